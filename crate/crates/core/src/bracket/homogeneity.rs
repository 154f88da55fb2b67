use serde_json::{json, Value};

use crate::diffop::DiffOperator;
use crate::jetcalc::{Degree, HbarSeries};

/// Outcome of a homogeneity check; `failures` lists the offending
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub failures: Vec<String>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: Verdict) {
        self.failures.extend(other.failures);
    }

    pub fn to_json(&self) -> Value {
        json!({ "pass": self.pass(), "failures": self.failures })
    }
}

fn describe(d: Degree) -> String {
    match d {
        Degree::Zero => "zero".into(),
        Degree::Homogeneous(k) => format!("degree {k}"),
        Degree::NonHomogeneous => "mixed degrees".into(),
    }
}

/// The ħ^g coefficient must be polynomial and homogeneous of degree
/// `2g + offset`.
pub fn check_series_homogeneity(x: &HbarSeries, offset: i64) -> Verdict {
    let mut v = Verdict::default();
    for (g, c) in x.coeffs().iter().enumerate() {
        let want = 2 * g as i64 + offset;
        if !c.is_polynomial() {
            v.failures.push(format!("ħ^{g}: Laurent monomial in {c}"));
        } else if !c.is_homogeneous(want) {
            v.failures.push(format!("ħ^{g}: expected degree {want}, found {}", describe(c.weighted_degree())));
        }
    }
    v
}

/// The ħ^g coefficient of `∂_x^s` must be polynomial and homogeneous of
/// degree `2g - s + offset`. With `offset = 0` (the degree rule `2g - s`)
/// constant coefficients at `(g, s) = (0, 1)` are admitted as the
/// hydrodynamic term; `offset = 1` is the rule under which `∂_x` itself has
/// the expected weight.
pub fn check_operator_homogeneity(op: &DiffOperator, offset: i64) -> Verdict {
    let mut v = Verdict::default();
    for (&(r, c, s), coef) in op.entries() {
        for (g, p) in coef.coeffs().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let want = 2 * g as i64 - s as i64 + offset;
            let tag = format!("({r},{c}) ∂^{s} ħ^{g}");
            if !p.is_polynomial() {
                v.failures.push(format!("{tag}: Laurent monomial in {p}"));
                continue;
            }
            if offset == 0 && g == 0 && s == 1 && p.as_constant().is_some() {
                continue;
            }
            if !p.is_homogeneous(want) {
                v.failures.push(format!("{tag}: expected degree {want}, found {}", describe(p.weighted_degree())));
            }
        }
    }
    v
}
