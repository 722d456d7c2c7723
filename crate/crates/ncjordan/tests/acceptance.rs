//! The verification matrix as a test target: one line per entry, every
//! entry must pass. Run with `--nocapture` to see the table.

use ncjordan::acceptance;

#[test]
fn verification_matrix() {
    let results = acceptance::run_all();
    let mut failed = Vec::new();
    for r in &results {
        println!(
            "{:4} {:48} {}",
            r.id,
            r.name,
            if r.passed { "pass" } else { "FAIL" }
        );
        println!("     {}", r.detail);
        if !r.passed {
            failed.push(r.id);
        }
    }
    assert!(failed.is_empty(), "failing entries: {:?}", failed);
}
