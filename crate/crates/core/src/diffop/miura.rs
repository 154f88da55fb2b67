//! Changes of dependent variables `w_α = w_α(v, v_1, v_2, ...; ħ)` and the
//! induced action on functions, flows and operators.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::DiffOperator;
use crate::error::{Error, Result};
use crate::jetcalc::{HbarSeries, Jet, JetPoly, Monomial};
use crate::Rational;

/// `C(e, k)` for integer (possibly negative) `e`.
fn gen_binomial(e: i64, k: usize) -> Rational {
    let mut c = Rational::one();
    for i in 0..k as i64 {
        c = c * Rational::from_integer((e - i).into()) / Rational::from_integer((i + 1).into());
    }
    c
}

fn invert_monomial_power(x0: &JetPoly, e: i64) -> Option<JetPoly> {
    let mut it = x0.terms();
    let (m, c) = it.next()?;
    if it.next().is_some() || m.jets().any(|j| j.order == 0) {
        return None;
    }
    let k = i32::try_from(-e).ok()?;
    let inv = Monomial::from_factors(m.factors().map(|(j, a)| (j, -a * k)));
    let mut coeff = Rational::one();
    for _ in 0..k {
        coeff /= c;
    }
    Some(JetPoly::term(coeff, inv))
}

struct Substitution<'a> {
    map: &'a [HbarSeries],
    trunc: usize,
    jets: HashMap<Jet, (JetPoly, HbarSeries)>,
    powers: HashMap<(Jet, i32), HbarSeries>,
}

impl<'a> Substitution<'a> {
    fn new(map: &'a [HbarSeries], trunc: usize) -> Self {
        Substitution {
            map,
            trunc,
            jets: HashMap::new(),
            powers: HashMap::new(),
        }
    }

    fn split(&mut self, jet: Jet) -> (JetPoly, HbarSeries) {
        if let Some(v) = self.jets.get(&jet) {
            return v.clone();
        }
        let x = match self.map.get(jet.color() - 1) {
            Some(s) => s.truncate(self.trunc).dx_n(jet.order()),
            None => HbarSeries::from_poly(JetPoly::var(jet.color(), jet.order()), self.trunc),
        };
        let x0 = x.coeff(0).clone();
        let mut delta = x;
        delta.set_coeff(0, JetPoly::zero());
        self.jets.insert(jet, (x0.clone(), delta.clone()));
        (x0, delta)
    }

    fn power(&mut self, jet: Jet, e: i32) -> Result<HbarSeries> {
        if let Some(v) = self.powers.get(&(jet, e)) {
            return Ok(v.clone());
        }
        let (x0, delta) = self.split(jet);
        let h = self.trunc;
        let mut out = HbarSeries::zero(h);
        let mut delta_k = HbarSeries::from_poly(JetPoly::one(), h);
        for k in 0..=h {
            if k > 0 {
                delta_k = &delta_k * &delta;
            }
            if delta_k.is_zero() {
                break;
            }
            let c = gen_binomial(i64::from(e), k);
            if c.is_zero() {
                break;
            }
            let rest = i64::from(e) - k as i64;
            let base = if rest >= 0 {
                x0.pow(rest as u32)
            } else {
                invert_monomial_power(&x0, rest).ok_or_else(|| {
                    Error::Inversion(format!("cannot expand ({x0})^{rest} as a Laurent monomial"))
                })?
            };
            out += &delta_k.mul_poly(&base).scale(&c);
        }
        self.powers.insert((jet, e), out.clone());
        Ok(out)
    }

    fn poly(&mut self, p: &JetPoly) -> Result<HbarSeries> {
        let h = self.trunc;
        let mut out = HbarSeries::zero(h);
        for (m, c) in p.terms() {
            let mut acc = HbarSeries::constant(c.clone(), h);
            for (jet, e) in m.factors() {
                acc = &acc * &self.power(jet, e)?;
            }
            out += &acc;
        }
        Ok(out)
    }
}

/// Replaces every jet `w[α,n]` of `p` by `∂_x^n map[α-1]`, to ħ order
/// `trunc`. Colors beyond `map` are left unchanged. Negative powers require
/// the ħ⁰ part of the replacement to be a single monomial in jets of order
/// `>= 1`.
pub fn substitute_poly(p: &JetPoly, map: &[HbarSeries], trunc: usize) -> Result<HbarSeries> {
    Substitution::new(map, trunc).poly(p)
}

/// Series version of [`substitute_poly`]; the ħ-grading of `s` is respected.
pub fn substitute_series(s: &HbarSeries, map: &[HbarSeries]) -> Result<HbarSeries> {
    let h = map.iter().map(HbarSeries::trunc).fold(s.trunc(), usize::min);
    let mut sub = Substitution::new(map, h);
    let mut out = HbarSeries::zero(h);
    for g in 0..=h {
        if s.coeff(g).is_zero() {
            continue;
        }
        out += &sub.poly(s.coeff(g))?.shift(g);
    }
    Ok(out)
}

/// A change of coordinates `w_α = forward[α-1](v)` with, once computed, the
/// inverse `v_α = inverse[α-1](w)`. Both sides use the same jet variables;
/// which coordinate system they denote is a matter of context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiuraChange {
    forward: Vec<HbarSeries>,
    inverse: Option<Vec<HbarSeries>>,
}

impl MiuraChange {
    pub fn new(forward: Vec<HbarSeries>) -> Self {
        MiuraChange {
            forward,
            inverse: None,
        }
    }

    pub fn identity(s: usize, trunc: usize) -> Self {
        let id: Vec<HbarSeries> = (1..=s)
            .map(|a| HbarSeries::from_poly(JetPoly::var(a, 0), trunc))
            .collect();
        MiuraChange {
            forward: id.clone(),
            inverse: Some(id),
        }
    }

    /// Builds a change with its inverse computed by series inversion.
    pub fn invertible(forward: Vec<HbarSeries>) -> Result<Self> {
        let mut m = MiuraChange::new(forward);
        m.inverse = Some(m.compute_inverse()?);
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.forward.len()
    }

    pub fn trunc(&self) -> usize {
        self.forward.iter().map(HbarSeries::trunc).min().unwrap_or(0)
    }

    pub fn forward(&self) -> &[HbarSeries] {
        &self.forward
    }

    pub fn inverse(&self) -> Result<&[HbarSeries]> {
        self.inverse
            .as_deref()
            .ok_or_else(|| Error::Inversion("inverse not computed".into()))
    }

    /// The inverse change (requires the inverse to be known).
    pub fn inverted(&self) -> Result<MiuraChange> {
        Ok(MiuraChange {
            forward: self.inverse()?.to_vec(),
            inverse: Some(self.forward.clone()),
        })
    }

    /// Order-by-order inversion. The ħ⁰ part must be an invertible constant
    /// linear map of the order-0 jets.
    pub fn compute_inverse(&self) -> Result<Vec<HbarSeries>> {
        let s = self.dim();
        let h = self.trunc();
        let mut lin = vec![vec![Rational::zero(); s]; s];
        for (a, f) in self.forward.iter().enumerate() {
            for (m, c) in f.coeff(0).terms() {
                let mut fs = m.factors();
                match (fs.next(), fs.next()) {
                    (Some((j, 1)), None) if j.order == 0 && j.color() <= s => {
                        lin[a][j.color() - 1] = c.clone();
                    }
                    _ => {
                        return Err(Error::Inversion(format!(
                            "ħ⁰ part of component {} is not linear: {}",
                            a + 1,
                            f.coeff(0)
                        )))
                    }
                }
            }
        }
        let inv = invert_matrix(&lin)
            .ok_or_else(|| Error::Inversion("ħ⁰ part is a singular linear map".into()))?;
        let apply_inv = |x: &[HbarSeries]| -> Vec<HbarSeries> {
            (0..s)
                .map(|a| {
                    let mut acc = HbarSeries::zero(h);
                    for b in 0..s {
                        if !inv[a][b].is_zero() {
                            acc += &x[b].scale(&inv[a][b]);
                        }
                    }
                    acc
                })
                .collect()
        };
        let w: Vec<HbarSeries> = (1..=s)
            .map(|a| HbarSeries::from_poly(JetPoly::var(a, 0), h))
            .collect();
        let delta: Vec<HbarSeries> = self
            .forward
            .iter()
            .map(|f| {
                let mut d = f.truncate(h);
                d.set_coeff(0, JetPoly::zero());
                d
            })
            .collect();
        let mut v = apply_inv(&w);
        for _ in 0..h {
            let mut rhs = Vec::with_capacity(s);
            for a in 0..s {
                rhs.push(&w[a] - &substitute_series(&delta[a], &v)?);
            }
            v = apply_inv(&rhs);
        }
        for a in 0..s {
            let back = substitute_series(&self.forward[a], &v)?;
            if back != w[a] {
                return Err(Error::Inversion(format!(
                    "series inversion did not converge for component {}",
                    a + 1
                )));
            }
        }
        Ok(v)
    }

    /// Expresses a function of the old coordinates in the new ones.
    pub fn to_new(&self, f: &HbarSeries) -> Result<HbarSeries> {
        substitute_series(f, self.inverse()?)
    }

    /// Expresses a function of the new coordinates in the old ones.
    pub fn to_old(&self, f: &HbarSeries) -> Result<HbarSeries> {
        substitute_series(f, &self.forward)
    }

    /// The linearization `L^{αμ} = Σ_e ∂w_α/∂v_{μ,e} ∂_x^e`, coefficients in
    /// old coordinates.
    pub fn jacobian(&self) -> DiffOperator {
        let s = self.dim();
        let h = self.trunc();
        let mut l = DiffOperator::zero(s, s, h);
        for (a, f) in self.forward.iter().enumerate() {
            for jet in f.jets() {
                if jet.color() > s {
                    continue;
                }
                l.add_entry(a + 1, jet.color(), jet.order(), &f.truncate(h).map(|p| p.partial_jet(jet)));
            }
        }
        l
    }

    /// Transforms an evolutionary flow `∂_t v = X(v)` into `∂_t w` written in
    /// the new coordinates.
    pub fn transform_flow(&self, flow: &[HbarSeries]) -> Result<Vec<HbarSeries>> {
        let wt = self.jacobian().apply(flow)?;
        wt.iter().map(|x| self.to_new(x)).collect()
    }

    /// `L ∘ P ∘ L^†`, re-expressed in the new coordinates.
    pub fn conjugate(&self, p: &DiffOperator) -> Result<DiffOperator> {
        let l = self.jacobian();
        let r = l.compose(p)?.compose(&l.adjoint())?;
        let inv = self.inverse()?;
        r.try_map_coeffs(|c| substitute_series(c, inv))
    }
}

/// Conjugates a Poisson operator written in `v` by the change `m`.
pub fn conjugate_by_miura(p: &DiffOperator, m: &MiuraChange) -> Result<DiffOperator> {
    m.conjugate(p)
}

fn invert_matrix(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let x = &f * &a[col][j];
                    a[r][j] -= x;
                    let y = &f * &inv[col][j];
                    inv[r][j] -= y;
                }
            }
        }
    }
    Some(inv)
}
