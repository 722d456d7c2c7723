//! JSON ingestion and emission: the algebra-spec format shared with the
//! command line, and report serialization helpers.
//!
//! Algebra spec:
//! ```json
//! {
//!   "field": {"kind": "ratfunc", "vars": ["a", "b", "g"]},
//!   "dim": 3,
//!   "parity": [0, 1, 1],
//!   "names": ["e", "z", "w"],
//!   "table": [[0, 0, [[0, "1"]]], [0, 1, [[1, "a"], [2, "b"]]]]
//! }
//! ```
//! Omitted (i, j) pairs mean zero products; coefficients use the literal
//! syntax of the field parser.

use serde::{Deserialize, Serialize};

use crate::field::Field;
use crate::superalg::{Parity, SuperAlgebra};
use crate::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldJson {
    Q,
    Gf { p: u64 },
    Ratfunc {
        vars: Vec<String>,
        /// Base prime; omitted means the rationals.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<u64>,
    },
}

impl FieldJson {
    pub fn to_field(&self) -> Field {
        match self {
            FieldJson::Q => Field::Q,
            FieldJson::Gf { p } => Field::Fp(*p),
            FieldJson::Ratfunc { vars, p: None } => Field::rational_functions(vars.clone()),
            FieldJson::Ratfunc { vars, p: Some(p) } => {
                Field::rational_functions_mod(*p, vars.clone())
            }
        }
    }

    pub fn from_field(f: &Field) -> FieldJson {
        match f {
            Field::Q => FieldJson::Q,
            Field::Fp(p) => FieldJson::Gf { p: *p },
            Field::Func(ff) => FieldJson::Ratfunc {
                vars: ff.vars.clone(),
                p: match ff.base {
                    crate::field::BaseField::Q => None,
                    crate::field::BaseField::Fp(p) => Some(p),
                },
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub field: FieldJson,
    pub dim: usize,
    pub parity: Vec<u8>,
    pub names: Vec<String>,
    pub table: Vec<(usize, usize, Vec<(usize, String)>)>,
}

impl AlgebraJson {
    pub fn to_algebra(&self) -> Result<SuperAlgebra, Error> {
        let field = self.field.to_field();
        let dim = self.dim;
        if self.parity.len() != dim {
            return Err(Error::InvalidAlgebra("parity vector length".into()));
        }
        let mut table = vec![field.zero(); dim * dim * dim];
        for (i, j, entries) in &self.table {
            if *i >= dim || *j >= dim {
                return Err(Error::InvalidAlgebra(format!("index ({}, {}) out of range", i, j)));
            }
            for (k, coeff) in entries {
                if *k >= dim {
                    return Err(Error::InvalidAlgebra(format!("target index {} out of range", k)));
                }
                table[(i * dim + j) * dim + k] = field.parse(coeff)?;
            }
        }
        SuperAlgebra::new(
            field,
            self.parity.iter().map(|&p| Parity::from_u8(p)).collect(),
            self.names.clone(),
            table,
        )
    }

    pub fn from_algebra(a: &SuperAlgebra) -> AlgebraJson {
        let dim = a.dim();
        let mut table = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let entries: Vec<(usize, String)> = (0..dim)
                    .filter(|&k| !a.c(i, j, k).is_zero())
                    .map(|k| (k, a.c(i, j, k).to_string()))
                    .collect();
                if !entries.is_empty() {
                    table.push((i, j, entries));
                }
            }
        }
        AlgebraJson {
            field: FieldJson::from_field(a.field()),
            dim,
            parity: a.parities().iter().map(|p| p.as_u8()).collect(),
            names: a.names().to_vec(),
            table,
        }
    }
}

/// Reads an algebra spec from a JSON string.
pub fn algebra_from_json(text: &str) -> Result<SuperAlgebra, Error> {
    let spec: AlgebraJson = serde_json::from_str(text)?;
    spec.to_algebra()
}

/// Serializes an algebra to its JSON spec.
pub fn algebra_to_json(a: &SuperAlgebra) -> String {
    serde_json::to_string_pretty(&AlgebraJson::from_algebra(a)).expect("serializable")
}

/// Matrices rendered as nested coefficient strings for reports.
pub fn matrix_strings(m: &crate::linalg::Matrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|c| c.to_string()).collect())
        .collect()
}

/// Report form of a derivation space: dimensions plus printed bases.
#[derive(Debug, Clone, Serialize)]
pub struct DerivationSpaceJson {
    pub dims: (usize, usize),
    pub even_basis: Vec<Vec<Vec<String>>>,
    pub odd_basis: Vec<Vec<Vec<String>>>,
}

impl DerivationSpaceJson {
    pub fn from_space(s: &crate::derivation::DerivationSpace) -> Self {
        DerivationSpaceJson {
            dims: s.dims(),
            even_basis: s.even.iter().map(|d| matrix_strings(&d.matrix)).collect(),
            odd_basis: s.odd.iter().map(|d| matrix_strings(&d.matrix)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_k3;

    #[test]
    fn algebra_round_trip() {
        let f = Field::rational_functions(["a", "b", "g"]);
        let k3 = make_k3(&f.var("a").unwrap(), &f.var("b").unwrap(), &f.var("g").unwrap()).unwrap();
        let text = algebra_to_json(&k3);
        let back = algebra_from_json(&text).unwrap();
        assert_eq!(back.table(), k3.table());
        assert_eq!(back.parities(), k3.parities());
    }

    #[test]
    fn sparse_table_means_zero() {
        let text = r#"{
            "field": {"kind": "q"},
            "dim": 2,
            "parity": [0, 0],
            "names": ["u", "v"],
            "table": [[0, 0, [[0, "1"]]]]
        }"#;
        let a = algebra_from_json(text).unwrap();
        assert!(a.c(0, 0, 0).is_one());
        assert!(a.c(1, 1, 0).is_zero());
    }

    #[test]
    fn grading_violation_reported() {
        let text = r#"{
            "field": {"kind": "q"},
            "dim": 2,
            "parity": [0, 1],
            "names": ["e", "z"],
            "table": [[0, 1, [[0, "1"]]]]
        }"#;
        assert!(matches!(
            algebra_from_json(text),
            Err(Error::GradingViolation(0, 1, 0))
        ));
    }

    #[test]
    fn gf_field_round_trip() {
        let text = r#"{
            "field": {"kind": "gf", "p": 5},
            "dim": 1,
            "parity": [0],
            "names": ["e"],
            "table": [[0, 0, [[0, "7"]]]]
        }"#;
        let a = algebra_from_json(text).unwrap();
        assert_eq!(*a.c(0, 0, 0), Field::Fp(5).int(2));
    }
}
