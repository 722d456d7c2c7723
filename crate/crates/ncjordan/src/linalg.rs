//! Dense exact linear algebra over any [`FieldValue`] domain.
//!
//! Over rational-function fields the rank computed here is the *generic*
//! rank: a matrix over ℚ(α) is treated as a matrix over the field ℚ(α), so
//! special parameter values where pivots vanish must be handled by
//! specializing the matrix first.

use crate::field::{Field, FieldValue};
use crate::Error;

/// A dense row-major matrix with entries in a single field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    entries: Vec<FieldValue>,
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<FieldValue>) -> Matrix {
        assert_eq!(entries.len(), rows * cols, "entry grid does not match dimensions");
        Matrix { rows, cols, field, entries }
    }

    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        let z = field.zero();
        Matrix { rows, cols, field, entries: vec![z; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field.clone(), n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<FieldValue>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        Matrix { rows: r, cols: c, field, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn at(&self, r: usize, c: usize) -> &FieldValue {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut FieldValue {
        &mut self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[FieldValue] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(self.field.clone(), self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *out.at_mut(c, r) = self.at(r, c).clone();
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), entries }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), entries }
    }

    pub fn scale(&self, c: &FieldValue) -> Matrix {
        let entries = self.entries.iter().map(|a| a.mul(c)).collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.clone(), entries }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Matrix::zero(self.field.clone(), self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(r, c).add(&a.mul(b));
                    *out.at_mut(r, c) = cur;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[FieldValue]) -> Vec<FieldValue> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![self.field.zero(); self.cols];
        for (r, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for c in 0..self.cols {
                let e = self.at(r, c);
                if e.is_zero() {
                    continue;
                }
                out[c] = out[c].add(&coeff.mul(e));
            }
        }
        out
    }

    /// Reduced row echelon form together with the rank and pivot columns.
    ///
    /// Pivot selection prefers structurally simple entries (lowest total
    /// degree over function fields) to limit intermediate expression swell.
    pub fn rref(&self) -> (Matrix, usize, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // Pick the simplest nonzero pivot in this column.
            let mut best: Option<(usize, (u32, usize))> = None;
            for r in row..m.rows {
                let e = m.at(r, col);
                if e.is_zero() {
                    continue;
                }
                let cx = e.complexity();
                if best.as_ref().map_or(true, |(_, bc)| cx < *bc) {
                    best = Some((r, cx));
                }
            }
            let Some((prow, _)) = best else { continue };
            m.swap_rows(row, prow);
            // Normalize the pivot row.
            let inv = m.at(row, col).inv().expect("pivot nonzero");
            for c in col..m.cols {
                let v = m.at(row, c).mul(&inv);
                *m.at_mut(row, c) = v;
            }
            // Eliminate everywhere else.
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in col..m.cols {
                    let upd = m.at(r, c).sub(&factor.mul(m.at(row, c)));
                    *m.at_mut(r, c) = upd;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, row, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// A basis of the right null space `{v : M v = 0}`.
    ///
    /// Each basis vector is scaled so its first nonzero coordinate is one,
    /// which makes the output deterministic and comparable.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldValue>> {
        let (r, rank, pivots) = self.rref();
        let mut out = Vec::with_capacity(self.cols - rank);
        let piv_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = Some(i);
            }
            v
        };
        for free in 0..self.cols {
            if piv_set[free].is_some() {
                continue;
            }
            let mut vec = vec![self.field.zero(); self.cols];
            vec[free] = self.field.one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                let e = r.at(prow, free);
                if !e.is_zero() {
                    vec[pcol] = e.neg();
                }
            }
            out.push(normalize_vector(vec));
        }
        out
    }

    /// Solves `M x = rhs`, returning one solution if the system is
    /// consistent.
    pub fn solve(&self, rhs: &[FieldValue]) -> Option<Vec<FieldValue>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Matrix::zero(self.field.clone(), self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, self.cols) = rhs[r].clone();
        }
        let (red, _, pivots) = aug.rref();
        // Inconsistent when a pivot lands in the augmented column.
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = red.at(prow, self.cols).clone();
        }
        Some(x)
    }

    /// Determinant by elimination; only defined for square matrices.
    pub fn det(&self) -> FieldValue {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = self.field.one();
        for col in 0..m.cols {
            let mut prow = None;
            for r in col..m.rows {
                if !m.at(r, col).is_zero() {
                    prow = Some(r);
                    break;
                }
            }
            let Some(prow) = prow else {
                return self.field.zero();
            };
            if prow != col {
                m.swap_rows(prow, col);
                det = det.neg();
            }
            let pivot = m.at(col, col).clone();
            det = det.mul(&pivot);
            let inv = pivot.inv().expect("pivot nonzero");
            for r in col + 1..m.rows {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).mul(&inv);
                for c in col..m.cols {
                    let upd = m.at(r, c).sub(&factor.mul(m.at(col, c)));
                    *m.at_mut(r, c) = upd;
                }
            }
        }
        det
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix, Error> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zero(self.field.clone(), n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n + r) = self.field.one();
        }
        let (red, rank, _) = aug.rref();
        if rank < n {
            return Err(Error::DivisionByZero);
        }
        let mut out = Matrix::zero(self.field.clone(), n, n);
        for r in 0..n {
            for c in 0..n {
                *out.at_mut(r, c) = red.at(r, n + c).clone();
            }
        }
        Ok(out)
    }

    /// Specializes every entry at the given bindings (function fields only).
    pub fn evaluate(&self, bindings: &std::collections::BTreeMap<String, FieldValue>) -> Result<Matrix, Error> {
        let mut entries = Vec::with_capacity(self.entries.len());
        let mut field = None;
        for e in &self.entries {
            let v = e.evaluate(bindings)?;
            field.get_or_insert_with(|| v.field());
            entries.push(v);
        }
        let field = field.unwrap_or(Field::Q);
        Ok(Matrix { rows: self.rows, cols: self.cols, field, entries })
    }
}

/// Scales a vector so its first nonzero coordinate is one.
pub fn normalize_vector(mut v: Vec<FieldValue>) -> Vec<FieldValue> {
    let lead = v.iter().find(|e| !e.is_zero()).cloned();
    if let Some(l) = lead {
        let inv = l.inv().expect("nonzero");
        for e in v.iter_mut() {
            *e = e.mul(&inv);
        }
    }
    v
}

/// Does `v` lie in the row space of `basis` (rows are basis vectors)?
pub fn in_row_space(basis: &Matrix, v: &[FieldValue]) -> bool {
    if basis.rows() == 0 {
        return v.iter().all(|e| e.is_zero());
    }
    basis.transpose().solve(v).is_some()
}

/// Checks that two row spaces are equal by mutual inclusion.
pub fn row_spaces_equal(a: &Matrix, b: &Matrix) -> bool {
    (0..a.rows()).all(|r| in_row_space(b, a.row(r)))
        && (0..b.rows()).all(|r| in_row_space(a, b.row(r)))
}

/// A basis of the intersection of two row spaces.
pub fn row_space_intersection(a: &Matrix, b: &Matrix) -> Vec<Vec<FieldValue>> {
    if a.rows() == 0 || b.rows() == 0 {
        return Vec::new();
    }
    assert_eq!(a.cols(), b.cols());
    // Solutions of c_a * A = c_b * B correspond to kernel vectors of the
    // transpose of the stacked matrix [A; -B].
    let mut stacked = Vec::new();
    for r in 0..a.rows() {
        stacked.push(a.row(r).to_vec());
    }
    for r in 0..b.rows() {
        stacked.push(b.row(r).iter().map(|e| e.neg()).collect());
    }
    let m = Matrix::from_rows(a.field().clone(), stacked).transpose();
    let mut out = Vec::new();
    for k in m.kernel_basis() {
        let ca = &k[..a.rows()];
        let v = a.apply_row(ca);
        if v.iter().any(|e| !e.is_zero()) {
            out.push(normalize_vector(v));
        }
    }
    // The construction can repeat directions; reduce to an echelon basis.
    if out.is_empty() {
        return out;
    }
    let m = Matrix::from_rows(a.field().clone(), out);
    let (red, rank, _) = m.rref();
    (0..rank).map(|r| red.row(r).to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qmat(rows: Vec<Vec<i64>>) -> Matrix {
        let f = Field::Q;
        Matrix::from_rows(
            f.clone(),
            rows.into_iter()
                .map(|r| r.into_iter().map(|e| f.int(e)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_identity() {
        let m = Matrix::identity(Field::Q, 3);
        let (r, rank, pivots) = m.rref();
        assert_eq!(r, m);
        assert_eq!(rank, 3);
        assert_eq!(pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_rank_one() {
        let m = qmat(vec![vec![1, 1], vec![2, 2]]);
        let (r, rank, pivots) = m.rref();
        assert_eq!(rank, 1);
        assert_eq!(pivots, vec![0]);
        assert_eq!(r, qmat(vec![vec![1, 1], vec![0, 0]]));
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = qmat(vec![vec![1, 1], vec![0, 0]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![Field::Q.int(1), Field::Q.int(-1)]);
    }

    #[test]
    fn kernel_of_invertible_is_empty() {
        let m = qmat(vec![vec![1, 2], vec![3, 4]]);
        assert!(m.kernel_basis().is_empty());
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = qmat(vec![vec![1, 1], vec![2, 2]]);
        let f = Field::Q;
        let x = m.solve(&[f.int(3), f.int(6)]).unwrap();
        // verify M x = rhs
        let mx: Vec<_> = (0..2)
            .map(|r| {
                (0..2).fold(f.zero(), |acc, c| acc.add(&m.at(r, c).mul(&x[c])))
            })
            .collect();
        assert_eq!(mx, vec![f.int(3), f.int(6)]);
        assert!(m.solve(&[f.int(3), f.int(7)]).is_none());
    }

    #[test]
    fn symbolic_rank_matches_specializations() {
        // [[a, 1], [a^2, a]] has generic rank 1? det = a*a - a^2 = 0, rank 1.
        let f = Field::rational_functions(["a"]);
        let a = f.var("a").unwrap();
        let m = Matrix::from_rows(
            f.clone(),
            vec![
                vec![a.clone(), f.one()],
                vec![a.mul(&a), a.clone()],
            ],
        );
        assert_eq!(m.rank(), 1);
        for pt in [2i64, 3, 5] {
            let mut b = std::collections::BTreeMap::new();
            b.insert("a".to_string(), Field::Q.int(pt));
            assert_eq!(m.evaluate(&b).unwrap().rank(), 1);
        }
    }

    #[test]
    fn intersection_of_row_spaces() {
        // span{(1,0,0),(0,1,0)} ∩ span{(0,1,0),(0,0,1)} = span{(0,1,0)}
        let a = qmat(vec![vec![1, 0, 0], vec![0, 1, 0]]);
        let b = qmat(vec![vec![0, 1, 0], vec![0, 0, 1]]);
        let i = row_space_intersection(&a, &b);
        assert_eq!(i.len(), 1);
        assert_eq!(i[0], vec![Field::Q.int(0), Field::Q.int(1), Field::Q.int(0)]);
    }

    #[test]
    fn determinant() {
        let m = qmat(vec![vec![2, 0], vec![1, 3]]);
        assert_eq!(m.det(), Field::Q.int(6));
        let s = qmat(vec![vec![1, 1], vec![2, 2]]);
        assert_eq!(s.det(), Field::Q.int(0));
    }
}
