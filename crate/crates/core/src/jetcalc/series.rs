//! Truncated power series in ħ with [`JetPoly`] coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::poly::{Degree, JetPoly};
use crate::Rational;

/// `c_0 + c_1 ħ + ... + c_H ħ^H + O(ħ^{H+1})`.
///
/// Binary operations truncate at the smaller of the two orders, so nothing
/// beyond the known precision is ever produced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HbarSeries {
    coeffs: Vec<JetPoly>,
}

impl HbarSeries {
    pub fn zero(trunc: usize) -> Self {
        HbarSeries {
            coeffs: vec![JetPoly::zero(); trunc + 1],
        }
    }

    /// A series with a single ħ^0 coefficient.
    pub fn from_poly(p: JetPoly, trunc: usize) -> Self {
        let mut s = HbarSeries::zero(trunc);
        s.coeffs[0] = p;
        s
    }

    pub fn constant(c: Rational, trunc: usize) -> Self {
        HbarSeries::from_poly(JetPoly::constant(c), trunc)
    }

    /// Takes `coeffs[g]` as the coefficient of ħ^g; the truncation order is
    /// `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<JetPoly>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        HbarSeries { coeffs }
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, g: usize) -> &JetPoly {
        &self.coeffs[g]
    }

    pub fn coeffs(&self) -> &[JetPoly] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, g: usize, p: JetPoly) {
        self.coeffs[g] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(JetPoly::is_zero)
    }

    /// Drops coefficients above ħ^h (no-op if already shorter).
    pub fn truncate(&self, h: usize) -> HbarSeries {
        let h = h.min(self.trunc());
        HbarSeries {
            coeffs: self.coeffs[..=h].to_vec(),
        }
    }

    /// Pads with zero coefficients up to ħ^h. Only valid for series that are
    /// known exactly (e.g. constants).
    pub fn extend_exact(&self, h: usize) -> HbarSeries {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < h + 1 {
            coeffs.push(JetPoly::zero());
        }
        HbarSeries { coeffs }
    }

    /// Multiplies by ħ^k, discarding what falls beyond the truncation.
    pub fn shift(&self, k: usize) -> HbarSeries {
        let h = self.trunc();
        let mut out = HbarSeries::zero(h);
        for g in 0..=h {
            if g + k <= h {
                out.coeffs[g + k] = self.coeffs[g].clone();
            }
        }
        out
    }

    /// Applies a linear map to every coefficient.
    pub fn map(&self, f: impl Fn(&JetPoly) -> JetPoly) -> HbarSeries {
        HbarSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> HbarSeries {
        self.map(|p| p.scale(c))
    }

    pub fn scale_int(&self, c: i64) -> HbarSeries {
        self.map(|p| p.scale_int(c))
    }

    pub fn mul_poly(&self, p: &JetPoly) -> HbarSeries {
        self.map(|q| q * p)
    }

    pub fn dx(&self) -> HbarSeries {
        self.map(JetPoly::dx)
    }

    pub fn dx_n(&self, n: usize) -> HbarSeries {
        self.map(|p| p.dx_n(n))
    }

    pub fn neg_dx_n(&self, n: usize) -> HbarSeries {
        self.map(|p| p.neg_dx_n(n))
    }

    pub fn partial(&self, color: usize, order: usize) -> HbarSeries {
        self.map(|p| p.partial(color, order))
    }

    pub fn var_deriv(&self, color: usize) -> HbarSeries {
        self.map(|p| p.var_deriv(color))
    }

    pub fn t_op(&self, color: usize, k: i64) -> HbarSeries {
        self.map(|p| p.t_op(color, k))
    }

    /// Highest jet order of `color` over all coefficients.
    pub fn max_order(&self, color: usize) -> Option<usize> {
        self.coeffs.iter().filter_map(|p| p.max_order(color)).max()
    }

    /// All jets occurring in any coefficient.
    pub fn jets(&self) -> std::collections::BTreeSet<super::Jet> {
        self.coeffs.iter().flat_map(|p| p.jets()).collect()
    }

    pub fn is_polynomial(&self) -> bool {
        self.coeffs.iter().all(JetPoly::is_polynomial)
    }

    pub fn degrees(&self) -> Vec<Degree> {
        self.coeffs.iter().map(JetPoly::weighted_degree).collect()
    }

    /// Evolutionary derivation with a series-valued characteristic.
    pub fn evolutionary(&self, k: &[HbarSeries]) -> HbarSeries {
        let h = k
            .iter()
            .map(HbarSeries::trunc)
            .fold(self.trunc(), usize::min);
        let mut out = HbarSeries::zero(h);
        for g in 0..=h {
            for a in 0..=g {
                let chars: Vec<JetPoly> = k.iter().map(|s| s.coeffs[g - a].clone()).collect();
                let term = self.coeffs[a].evolutionary(&chars);
                out.coeffs[g] += term;
            }
        }
        out
    }

    pub fn map_colors(&self, f: impl Fn(usize) -> usize + Copy) -> HbarSeries {
        self.map(|p| p.map_colors(f))
    }
}

impl<'a> Add<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn add(self, rhs: &HbarSeries) -> HbarSeries {
        let h = self.trunc().min(rhs.trunc());
        HbarSeries {
            coeffs: (0..=h).map(|g| &self.coeffs[g] + &rhs.coeffs[g]).collect(),
        }
    }
}

impl Add for HbarSeries {
    type Output = HbarSeries;
    fn add(self, rhs: HbarSeries) -> HbarSeries {
        &self + &rhs
    }
}

impl AddAssign<&HbarSeries> for HbarSeries {
    fn add_assign(&mut self, rhs: &HbarSeries) {
        let h = self.trunc().min(rhs.trunc());
        self.coeffs.truncate(h + 1);
        for g in 0..=h {
            self.coeffs[g] += &rhs.coeffs[g];
        }
    }
}

impl AddAssign for HbarSeries {
    fn add_assign(&mut self, rhs: HbarSeries) {
        *self += &rhs;
    }
}

impl SubAssign<&HbarSeries> for HbarSeries {
    fn sub_assign(&mut self, rhs: &HbarSeries) {
        let h = self.trunc().min(rhs.trunc());
        self.coeffs.truncate(h + 1);
        for g in 0..=h {
            self.coeffs[g] -= &rhs.coeffs[g];
        }
    }
}

impl<'a> Sub<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn sub(self, rhs: &HbarSeries) -> HbarSeries {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for HbarSeries {
    type Output = HbarSeries;
    fn sub(self, rhs: HbarSeries) -> HbarSeries {
        &self - &rhs
    }
}

impl Neg for &HbarSeries {
    type Output = HbarSeries;
    fn neg(self) -> HbarSeries {
        self.map(|p| -p)
    }
}

impl Neg for HbarSeries {
    type Output = HbarSeries;
    fn neg(self) -> HbarSeries {
        -&self
    }
}

impl<'a> Mul<&'a HbarSeries> for &'a HbarSeries {
    type Output = HbarSeries;
    fn mul(self, rhs: &HbarSeries) -> HbarSeries {
        let h = self.trunc().min(rhs.trunc());
        let mut out = HbarSeries::zero(h);
        for a in 0..=h {
            if self.coeffs[a].is_zero() {
                continue;
            }
            for b in 0..=(h - a) {
                if rhs.coeffs[b].is_zero() {
                    continue;
                }
                out.coeffs[a + b] += &self.coeffs[a] * &rhs.coeffs[b];
            }
        }
        out
    }
}

impl Mul for HbarSeries {
    type Output = HbarSeries;
    fn mul(self, rhs: HbarSeries) -> HbarSeries {
        &self * &rhs
    }
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match g {
                0 => write!(f, "({c})")?,
                1 => write!(f, "ħ*({c})")?,
                _ => write!(f, "ħ^{g}*({c})")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(ħ^{})", self.trunc() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_truncate_at_min_order() {
        let w = JetPoly::var(1, 0);
        let a = HbarSeries::from_coeffs(vec![w.clone(), JetPoly::one(), JetPoly::one()]);
        let b = HbarSeries::from_coeffs(vec![JetPoly::one(), w.clone()]);
        let c = &a * &b;
        assert_eq!(c.trunc(), 1);
        assert_eq!(c.coeff(0), &w);
        assert_eq!(c.coeff(1), &(&w.pow(2) + &JetPoly::one()));
    }

    #[test]
    fn shift_discards_overflow() {
        let a = HbarSeries::from_coeffs(vec![JetPoly::one(), JetPoly::int(2)]);
        let s = a.shift(1);
        assert_eq!(s.coeff(0), &JetPoly::zero());
        assert_eq!(s.coeff(1), &JetPoly::one());
    }
}
