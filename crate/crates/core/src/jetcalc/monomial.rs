//! Jet variables and Laurent monomials over them.

use std::fmt;

use smallvec::SmallVec;

/// The jet coordinate `w[color, order]`: the `order`-th x-derivative of the
/// dependent variable with the given (1-based) color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub color: u16,
    pub order: u16,
}

impl Jet {
    pub fn new(color: usize, order: usize) -> Self {
        assert!(color >= 1, "colors are 1-based");
        Jet {
            color: u16::try_from(color).expect("color index overflow"),
            order: u16::try_from(order).expect("jet order overflow"),
        }
    }

    pub fn color(self) -> usize {
        self.color as usize
    }

    pub fn order(self) -> usize {
        self.order as usize
    }

    /// The jet one x-derivative higher.
    pub fn raised(self) -> Jet {
        Jet {
            color: self.color,
            order: self.order + 1,
        }
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w[{},{}]", self.color, self.order)
    }
}

/// A product of integer powers of jet variables, kept sorted by jet with no
/// zero exponents. Negative exponents only ever appear on jets of order >= 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[(Jet, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    /// `jet^exp`. Panics on a negative power of an order-0 jet.
    pub fn var(jet: Jet, exp: i32) -> Self {
        assert!(
            exp >= 0 || jet.order >= 1,
            "negative exponent on order-0 jet {jet}"
        );
        let mut m = Monomial::one();
        if exp != 0 {
            m.0.push((jet, exp));
        }
        m
    }

    /// Builds a monomial from unsorted factors, merging repeated jets.
    pub fn from_factors<I: IntoIterator<Item = (Jet, i32)>>(factors: I) -> Self {
        let mut m = Monomial::one();
        for (jet, exp) in factors {
            m = m.mul(&Monomial::var(jet, exp));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (Jet, i32)> + '_ {
        self.0.iter().copied()
    }

    pub fn exponent(&self, jet: Jet) -> i32 {
        match self.0.binary_search_by(|(j, _)| j.cmp(&jet)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    /// Returns a copy with the exponent of `jet` replaced.
    pub fn with_exponent(&self, jet: Jet, exp: i32) -> Self {
        debug_assert!(exp >= 0 || jet.order >= 1);
        let mut out = self.clone();
        match out.0.binary_search_by(|(j, _)| j.cmp(&jet)) {
            Ok(i) => {
                if exp == 0 {
                    out.0.remove(i);
                } else {
                    out.0[i].1 = exp;
                }
            }
            Err(i) => {
                if exp != 0 {
                    out.0.insert(i, (jet, exp));
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Weighted degree: sum of `exponent * order`.
    pub fn weighted_degree(&self) -> i64 {
        self.0
            .iter()
            .map(|(j, e)| i64::from(*e) * i64::from(j.order))
            .sum()
    }

    /// Polynomial degree in the order-0 jets.
    pub fn base_degree(&self) -> i64 {
        self.0
            .iter()
            .filter(|(j, _)| j.order == 0)
            .map(|(_, e)| i64::from(*e))
            .sum()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|(_, e)| *e > 0)
    }

    pub fn jets(&self) -> impl Iterator<Item = Jet> + '_ {
        self.0.iter().map(|(j, _)| *j)
    }

    pub fn max_color(&self) -> usize {
        self.0.iter().map(|(j, _)| j.color()).max().unwrap_or(0)
    }

    /// Applies `f` to every color index.
    pub fn map_colors(&self, f: impl Fn(usize) -> usize) -> Monomial {
        Monomial::from_factors(
            self.0
                .iter()
                .map(|(j, e)| (Jet::new(f(j.color()), j.order()), *e)),
        )
    }

    /// `[[color, order, exp], ...]` in canonical order.
    pub fn to_triples(&self) -> Vec<[i64; 3]> {
        self.0
            .iter()
            .map(|(j, e)| [i64::from(j.color), i64::from(j.order), i64::from(*e)])
            .collect()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (jet, exp)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *exp == 1 {
                write!(f, "{jet}")?;
            } else {
                write!(f, "{jet}^{exp}")?;
            }
        }
        Ok(())
    }
}
