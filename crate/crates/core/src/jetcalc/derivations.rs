//! Total derivative, partial derivatives, the Euler operator and its higher
//! analogues, evolutionary derivations and formal integration.

use std::collections::BTreeMap;

use num_traits::One;

use super::monomial::{Jet, Monomial};
use super::poly::JetPoly;
use crate::error::JetError;
use crate::Rational;

/// `n choose k`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    num_integer::binomial(n as u64, k as u64) as i64
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

impl JetPoly {
    /// The total x-derivative: `w[α,n] -> w[α,n+1]`, extended by Leibniz.
    pub fn dx(&self) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in self.terms() {
            for (jet, e) in m.factors() {
                let lowered = m.with_exponent(jet, e - 1);
                let mono = lowered.mul(&Monomial::var(jet.raised(), 1));
                out.add_term(mono, c * rat(i64::from(e)));
            }
        }
        out
    }

    /// `∂_x^n`.
    pub fn dx_n(&self, n: usize) -> JetPoly {
        let mut p = self.clone();
        for _ in 0..n {
            if p.is_zero() {
                break;
            }
            p = p.dx();
        }
        p
    }

    /// `(-∂_x)^n`.
    pub fn neg_dx_n(&self, n: usize) -> JetPoly {
        let p = self.dx_n(n);
        if n % 2 == 1 {
            -p
        } else {
            p
        }
    }

    /// Formal partial derivative with respect to `w[color, order]`.
    pub fn partial(&self, color: usize, order: usize) -> JetPoly {
        self.partial_jet(Jet::new(color, order))
    }

    pub fn partial_jet(&self, jet: Jet) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in self.terms() {
            let e = m.exponent(jet);
            if e != 0 {
                out.add_term(m.with_exponent(jet, e - 1), c * rat(i64::from(e)));
            }
        }
        out
    }

    /// The variational derivative `Σ_n (-∂_x)^n ∂/∂w[ξ,n]`.
    pub fn var_deriv(&self, color: usize) -> JetPoly {
        self.t_op(color, 0)
    }

    /// The higher Euler operator `T_{ξ,k} = Σ_n C(n,k) (-∂_x)^{n-k} ∂/∂w[ξ,n]`;
    /// zero for negative `k`.
    pub fn t_op(&self, color: usize, k: i64) -> JetPoly {
        let mut out = JetPoly::zero();
        if k < 0 {
            return out;
        }
        let Some(top) = self.max_order(color) else {
            return out;
        };
        let k = k as usize;
        for n in k..=top {
            let d = self.partial(color, n);
            if d.is_zero() {
                continue;
            }
            let c = binomial(n as i64, k as i64);
            out += d.neg_dx_n(n - k).scale_int(c);
        }
        out
    }

    /// Evolutionary derivation with characteristic `k`: `Σ_{α,n} ∂f/∂w[α,n] ∂_x^n k_α`.
    /// `k[α-1]` is the component for color `α`; missing colors are zero.
    pub fn evolutionary(&self, k: &[JetPoly]) -> JetPoly {
        let mut cache: BTreeMap<Jet, JetPoly> = BTreeMap::new();
        let mut out = JetPoly::zero();
        for jet in self.jets() {
            let Some(kc) = k.get(jet.color() - 1) else {
                continue;
            };
            if kc.is_zero() {
                continue;
            }
            let dk = cache
                .entry(jet)
                .or_insert_with(|| kc.dx_n(jet.order()))
                .clone();
            out += &self.partial_jet(jet) * &dk;
        }
        out
    }

    /// A left inverse of [`JetPoly::dx`] on its image: returns `q` without
    /// constant term with `dx(q) == self`, or [`JetError::NotExact`].
    pub fn formal_integrate(&self) -> Result<JetPoly, JetError> {
        if self.is_zero() {
            return Ok(JetPoly::zero());
        }
        let colors: Vec<usize> = self.jets().iter().map(|j| j.color()).collect();
        for &c in &colors {
            if !self.var_deriv(c).is_zero() {
                return Err(JetError::NotExact(self.to_string()));
            }
        }
        let not_exact = || JetError::NotExact(self.to_string());
        let mut rest = self.clone();
        let mut primitive = JetPoly::zero();
        // Each pass removes the highest jet (by order, then color) from the
        // remainder; exact inputs never reintroduce it.
        let mut guard = 0usize;
        while !rest.is_zero() {
            guard += 1;
            if guard > 10_000 {
                return Err(not_exact());
            }
            let top = rest
                .jets()
                .into_iter()
                .max_by_key(|j| (j.order, j.color))
                .ok_or_else(not_exact)?;
            if top.order == 0 {
                return Err(not_exact());
            }
            let lower = Jet::new(top.color(), top.order() - 1);
            let mut h = JetPoly::zero();
            for (m, c) in rest.terms() {
                let e = m.exponent(top);
                if e == 0 {
                    continue;
                }
                if e != 1 {
                    return Err(not_exact());
                }
                let g = m.with_exponent(top, 0);
                if g.jets().any(|j| j.order >= top.order) {
                    return Err(not_exact());
                }
                let a = g.exponent(lower);
                if a == -1 {
                    return Err(not_exact());
                }
                let k = c / rat(i64::from(a + 1));
                h.add_term(g.with_exponent(lower, a + 1), k);
            }
            rest -= &h.dx();
            primitive += h;
        }
        Ok(primitive)
    }
}

/// `Σ_{k=0}^{n} C(n, k) ∂^k f ∂^{n-k} g`, i.e. `∂^n (f g)` (used by tests).
pub fn leibniz_dx_n(f: &JetPoly, g: &JetPoly, n: usize) -> JetPoly {
    let mut out = JetPoly::zero();
    for k in 0..=n {
        out += (&f.dx_n(k) * &g.dx_n(n - k)).scale_int(binomial(n as i64, k as i64));
    }
    out
}

/// Integrates a polynomial in order-0 jets along the radial path from the
/// origin: returns `Φ` with `Φ(0) = 0` and `∂Φ/∂v_γ = grad[γ-1]` provided the
/// gradient field is closed. No closedness check is performed here.
pub fn radial_primitive(grad: &[JetPoly]) -> JetPoly {
    let mut out = JetPoly::zero();
    for (i, g) in grad.iter().enumerate() {
        let color = i + 1;
        for (m, c) in g.terms() {
            let d = m.base_degree();
            let mono = m.mul(&Monomial::var(Jet::new(color, 0), 1));
            out.add_term(mono, c / rat(d + 1));
        }
    }
    out
}

/// `1 / n!` as a rational.
pub fn inv_factorial(n: usize) -> Rational {
    let mut f = Rational::one();
    for k in 1..=n {
        f *= rat(k as i64);
    }
    f.recip()
}


#[cfg(test)]
mod tests {
    use super::*;

    fn w(n: usize) -> JetPoly {
        JetPoly::var(1, n)
    }

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn dx_examples() {
        assert_eq!(w(0).pow(2).dx(), (&w(0) * &w(1)).scale_int(2));
        assert!(JetPoly::ratio(3, 7).dx().is_zero());
        let inv = JetPoly::var_pow(1, 1, -1);
        let expect = -(&w(2) * &JetPoly::var_pow(1, 1, -2));
        assert_eq!(inv.dx(), expect);
    }

    #[test]
    fn partial_examples() {
        assert_eq!((&w(0) * &w(2)).partial(1, 2), w(0));
        assert!(w(0).pow(3).partial(1, 1).is_zero());
        assert_eq!(
            JetPoly::var_pow(1, 1, -1).partial(1, 1),
            -JetPoly::var_pow(1, 1, -2)
        );
    }

    #[test]
    fn var_deriv_examples() {
        assert_eq!((&w(0) * &w(2)).var_deriv(1), w(2).scale_int(2));
        assert_eq!(w(1).pow(2).scale(&r(1, 2)).var_deriv(1), -w(2));
        // h_1 of the KdV hierarchy -> w^2/2 + w_2/12 (ħ set to one)
        let h1 = &(&w(0).pow(3).scale(&r(1, 6))
            + &(&w(1).pow(2) + &(&w(0) * &w(2)).scale_int(2)).scale(&r(1, 24)))
            + &w(4).scale(&r(1, 240));
        let expect = &w(0).pow(2).scale(&r(1, 2)) + &w(2).scale(&r(1, 12));
        assert_eq!(h1.var_deriv(1), expect);
    }

    #[test]
    fn t_op_basics() {
        let p = &(&w(0) * &w(3)) + &w(1).pow(2);
        assert_eq!(p.t_op(1, 0), p.var_deriv(1));
        assert!(p.t_op(1, -1).is_zero());
        for k in -1..5 {
            assert_eq!(p.dx().t_op(1, k), p.t_op(1, k - 1));
        }
    }

    #[test]
    fn integrate_examples() {
        let p = (&w(0) * &w(1)).scale_int(2);
        assert_eq!(p.formal_integrate().unwrap(), w(0).pow(2));
        assert!(JetPoly::zero().formal_integrate().unwrap().is_zero());
        assert!(matches!(
            w(1).pow(2).formal_integrate(),
            Err(JetError::NotExact(_))
        ));
        assert!(JetPoly::int(1).formal_integrate().is_err());
        let two_color = &(&JetPoly::var(1, 1) * &JetPoly::var(2, 0))
            + &(&JetPoly::var(1, 0) * &JetPoly::var(2, 1));
        assert_eq!(
            two_color.formal_integrate().unwrap(),
            &JetPoly::var(1, 0) * &JetPoly::var(2, 0)
        );
    }

    #[test]
    fn radial_primitive_of_gradient() {
        // grad of v1^2 v2 + v2^3
        let v1 = JetPoly::var(1, 0);
        let v2 = JetPoly::var(2, 0);
        let g = vec![(&v1 * &v2).scale_int(2), &v1.pow(2) + &v2.pow(2).scale_int(3)];
        let phi = radial_primitive(&g);
        assert_eq!(phi, &(&v1.pow(2) * &v2) + &v2.pow(3));
    }
}
