//! Lie-algebra generators `r_ℓ z^ℓ` and `s_ℓ z^{-ℓ}`, the two-point table
//! `Ω_{α,p;β,q}` and the infinitesimal action on it.

mod deform;
mod table;

pub use deform::{
    r_deform_omega, r_deform_omega_long, r_deform_table, s_deform_omega, s_deform_table,
};
pub use table::{triple_omega, OmegaTable};
pub(crate) use table::triple_fast;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jetcalc::{rational_from_json, rational_to_json};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenKind {
    /// `r_ℓ z^ℓ`, upper triangular.
    Upper,
    /// `s_ℓ z^{-ℓ}`, lower triangular.
    Lower,
}

/// A single-level generator with matrix `E`, read as `E[μ][ν] = (g)^μ_ν`.
/// The parity constraint `Eᵀ = (-1)^{ℓ+1} E` is enforced on construction.
/// Accessors take 1-based colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GiventalGen {
    kind: GenKind,
    level: usize,
    matrix: Vec<Vec<Rational>>,
}

impl GiventalGen {
    pub fn new(kind: GenKind, level: usize, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidGenerator("level must be at least 1".into()));
        }
        let s = matrix.len();
        if s == 0 || matrix.iter().any(|r| r.len() != s) {
            return Err(Error::InvalidGenerator("matrix must be square and non-empty".into()));
        }
        let sign = if level % 2 == 1 { Rational::one() } else { -Rational::one() };
        for a in 0..s {
            for b in 0..s {
                if matrix[b][a] != &sign * &matrix[a][b] {
                    let what = if level % 2 == 1 { "symmetric" } else { "skew-symmetric" };
                    return Err(Error::InvalidGenerator(format!(
                        "level {level} requires a {what} matrix (entry ({},{}))",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(GiventalGen {
            kind,
            level,
            matrix,
        })
    }

    pub fn upper(level: usize, matrix: Vec<Vec<i64>>) -> Result<Self> {
        GiventalGen::new(GenKind::Upper, level, int_matrix(matrix))
    }

    pub fn lower(level: usize, matrix: Vec<Vec<i64>>) -> Result<Self> {
        GiventalGen::new(GenKind::Lower, level, int_matrix(matrix))
    }

    pub fn kind(&self) -> GenKind {
        self.kind
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Zero::is_zero)
    }

    /// `(g)^μ_ν`.
    pub fn up_lo(&self, mu: usize, nu: usize) -> &Rational {
        &self.matrix[mu - 1][nu - 1]
    }

    /// `(g)_α^μ = (g)^{αμ}`.
    pub fn lo_up(&self, a: usize, mu: usize) -> &Rational {
        &self.matrix[mu - 1][a - 1]
    }

    /// `(g)^{μν}`.
    pub fn up_up(&self, mu: usize, nu: usize) -> &Rational {
        &self.matrix[nu - 1][mu - 1]
    }

    /// `(g)_{αβ} = (-1)^{ℓ+1} (g)^α_β`.
    pub fn lo_lo(&self, a: usize, b: usize) -> Rational {
        let x = self.matrix[a - 1][b - 1].clone();
        if self.level % 2 == 1 {
            x
        } else {
            -x
        }
    }

    /// `(g)^μ_𝟙 = Σ_γ (g)^μ_γ u_γ`.
    pub fn up_unit(&self, mu: usize, unit: &[Rational]) -> Rational {
        unit.iter()
            .enumerate()
            .map(|(g, u)| self.up_lo(mu, g + 1) * u)
            .sum()
    }

    /// `(g)_{γ,𝟙} = Σ_δ (g)_{γδ} u_δ`.
    pub fn lo_unit(&self, gamma: usize, unit: &[Rational]) -> Rational {
        unit.iter()
            .enumerate()
            .map(|(d, u)| self.lo_lo(gamma, d + 1) * u)
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let kind = match self.kind {
            GenKind::Upper => "r",
            GenKind::Lower => "s",
        };
        let matrix: Vec<Vec<Value>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(rational_to_json).collect())
            .collect();
        json!({"kind": kind, "level": self.level, "matrix": matrix})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = match v.get("kind").and_then(Value::as_str) {
            Some("r") => GenKind::Upper,
            Some("s") => GenKind::Lower,
            other => {
                return Err(Error::InvalidGenerator(format!(
                    "kind must be \"r\" or \"s\", got {other:?}"
                )))
            }
        };
        let level = v
            .get("level")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidGenerator("missing integer level".into()))?;
        let rows = v
            .get("matrix")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidGenerator("missing matrix".into()))?;
        let mut matrix = Vec::with_capacity(rows.len());
        for r in rows {
            let r = r
                .as_array()
                .ok_or_else(|| Error::InvalidGenerator("matrix rows must be arrays".into()))?;
            let row = r
                .iter()
                .map(|x| rational_from_json(x).map_err(|e| Error::InvalidGenerator(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            matrix.push(row);
        }
        GiventalGen::new(kind, level as usize, matrix)
    }
}

fn int_matrix(m: Vec<Vec<i64>>) -> Vec<Vec<Rational>> {
    m.into_iter()
        .map(|r| r.into_iter().map(crate::rat).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_is_enforced() {
        assert!(GiventalGen::upper(1, vec![vec![1, 2], vec![2, 0]]).is_ok());
        assert!(GiventalGen::upper(1, vec![vec![1, 2], vec![3, 0]]).is_err());
        assert!(GiventalGen::upper(2, vec![vec![0, 1], vec![-1, 0]]).is_ok());
        assert!(GiventalGen::upper(2, vec![vec![1]]).is_err());
        assert!(GiventalGen::lower(0, vec![vec![1]]).is_err());
    }

    #[test]
    fn sign_conventions() {
        let g = GiventalGen::upper(2, vec![vec![0, 3], vec![-3, 0]]).unwrap();
        // (r)_α^β = (r)^{αβ}; (r)_{αβ} = (-1)^{ℓ+1} (r)^α_β
        assert_eq!(g.lo_up(1, 2), g.up_up(1, 2));
        assert_eq!(g.lo_lo(1, 2), -g.up_lo(1, 2).clone());
        // with an orthonormal metric both fully raised and fully lowered
        // forms agree
        for a in 1..=2 {
            for b in 1..=2 {
                assert_eq!(&g.lo_lo(a, b), g.up_up(a, b));
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let g = GiventalGen::lower(3, vec![vec![1, -2], vec![-2, 5]]).unwrap();
        assert_eq!(GiventalGen::from_json(&g.to_json()).unwrap(), g);
        let bad = json!({"kind": "q", "level": 1, "matrix": [[1]]});
        assert!(GiventalGen::from_json(&bad).is_err());
    }
}
