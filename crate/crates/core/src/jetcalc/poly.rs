//! Exact-rational Laurent differential polynomials.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use super::monomial::{Jet, Monomial};
use crate::Rational;

/// A finite sum of rational multiples of [`Monomial`]s. Zero coefficients are
/// never stored, so structural equality is mathematical equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JetPoly {
    terms: BTreeMap<Monomial, Rational>,
}

/// Weighted degree of a [`JetPoly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    /// The zero polynomial; homogeneous of every degree.
    Zero,
    Homogeneous(i64),
    NonHomogeneous,
}

impl JetPoly {
    pub fn zero() -> Self {
        JetPoly::default()
    }

    pub fn one() -> Self {
        JetPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        JetPoly::term(c, Monomial::one())
    }

    pub fn int(c: i64) -> Self {
        JetPoly::constant(Rational::from_integer(c.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        JetPoly::constant(Rational::new(num.into(), den.into()))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = JetPoly::zero();
        p.add_term(m, c);
        p
    }

    /// The jet variable `w[color, order]`.
    pub fn var(color: usize, order: usize) -> Self {
        JetPoly::term(Rational::one(), Monomial::var(Jet::new(color, order), 1))
    }

    /// `w[color, order]^exp`; negative powers require `order >= 1`.
    pub fn var_pow(color: usize, order: usize, exp: i32) -> Self {
        JetPoly::term(Rational::one(), Monomial::var(Jet::new(color, order), exp))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    /// True when the polynomial is a rational constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> JetPoly {
        if c.is_zero() {
            return JetPoly::zero();
        }
        JetPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> JetPoly {
        self.scale(&Rational::from_integer(c.into()))
    }

    pub fn mul_monomial(&self, c: &Rational, mono: &Monomial) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, k) in &self.terms {
            out.add_term(m.mul(mono), k * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> JetPoly {
        let mut acc = JetPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// All jets occurring in any monomial.
    pub fn jets(&self) -> BTreeSet<Jet> {
        self.terms.keys().flat_map(|m| m.jets()).collect()
    }

    /// Highest jet order in which `color` occurs, if at all.
    pub fn max_order(&self, color: usize) -> Option<usize> {
        self.jets()
            .into_iter()
            .filter(|j| j.color() == color)
            .map(Jet::order)
            .max()
    }

    pub fn max_color(&self) -> usize {
        self.terms.keys().map(Monomial::max_color).max().unwrap_or(0)
    }

    /// No negative exponents anywhere.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    /// Depends on order-0 jets only.
    pub fn is_dispersionless(&self) -> bool {
        self.terms.keys().all(|m| m.jets().all(|j| j.order == 0))
    }

    pub fn weighted_degree(&self) -> Degree {
        let mut degrees = self.terms.keys().map(Monomial::weighted_degree);
        match degrees.next() {
            None => Degree::Zero,
            Some(d) => {
                if degrees.all(|e| e == d) {
                    Degree::Homogeneous(d)
                } else {
                    Degree::NonHomogeneous
                }
            }
        }
    }

    pub fn is_homogeneous(&self, d: i64) -> bool {
        matches!(self.weighted_degree(), Degree::Zero)
            || self.weighted_degree() == Degree::Homogeneous(d)
    }

    /// Relabels colors, e.g. to embed a one-color polynomial in a product.
    pub fn map_colors(&self, f: impl Fn(usize) -> usize + Copy) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_colors(f), c.clone());
        }
        out
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> JetPoly {
        JetPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }
}

impl From<Rational> for JetPoly {
    fn from(c: Rational) -> Self {
        JetPoly::constant(c)
    }
}

impl<'a> Add<&'a JetPoly> for &'a JetPoly {
    type Output = JetPoly;
    fn add(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for JetPoly {
    type Output = JetPoly;
    fn add(mut self, rhs: JetPoly) -> JetPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&JetPoly> for JetPoly {
    fn add_assign(&mut self, rhs: &JetPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for JetPoly {
    fn add_assign(&mut self, rhs: JetPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&JetPoly> for JetPoly {
    fn sub_assign(&mut self, rhs: &JetPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Sub<&'a JetPoly> for &'a JetPoly {
    type Output = JetPoly;
    fn sub(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for JetPoly {
    type Output = JetPoly;
    fn sub(mut self, rhs: JetPoly) -> JetPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &JetPoly {
    type Output = JetPoly;
    fn neg(self) -> JetPoly {
        JetPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Neg for JetPoly {
    type Output = JetPoly;
    fn neg(self) -> JetPoly {
        -&self
    }
}

impl<'a> Mul<&'a JetPoly> for &'a JetPoly {
    type Output = JetPoly;
    fn mul(self, rhs: &JetPoly) -> JetPoly {
        if self.is_zero() || rhs.is_zero() {
            return JetPoly::zero();
        }
        let mut out = JetPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for JetPoly {
    type Output = JetPoly;
    fn mul(self, rhs: JetPoly) -> JetPoly {
        &self * &rhs
    }
}

fn fmt_coeff(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Text form: terms in canonical order, `w[α,n]` tokens, e.g.
/// `1/2*w[1,0]^2 + 1/12*w[1,2]`.
impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{}", fmt_coeff(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_coeff(&abs))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_coefficients_are_pruned() {
        let x = JetPoly::var(1, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.weighted_degree(), Degree::Zero);
    }

    #[test]
    fn degrees() {
        let w1 = JetPoly::var(1, 1);
        assert_eq!(w1.pow(2).weighted_degree(), Degree::Homogeneous(2));
        assert_eq!(JetPoly::var(1, 0).pow(5).weighted_degree(), Degree::Homogeneous(0));
        let mixed = &w1 + &JetPoly::var(1, 0);
        assert_eq!(mixed.weighted_degree(), Degree::NonHomogeneous);
        // w3/w1 + w2^2/w1^2, both of degree 2
        let q = &(&JetPoly::var(1, 3) * &JetPoly::var_pow(1, 1, -1))
            + &(&JetPoly::var(1, 2).pow(2) * &JetPoly::var_pow(1, 1, -2));
        assert_eq!(q.weighted_degree(), Degree::Homogeneous(2));
        assert!(!q.is_polynomial());
    }

    #[test]
    fn display_is_canonical() {
        let p = &JetPoly::var(1, 0).pow(2).scale(&Rational::new(1.into(), 2.into()))
            - &JetPoly::var(1, 2).scale(&Rational::new(1.into(), 12.into()));
        assert_eq!(p.to_string(), "1/2*w[1,0]^2 - 1/12*w[1,2]");
    }
}
