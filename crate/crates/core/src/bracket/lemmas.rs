//! The two commutation relations used in the bracket computation, evaluated
//! on test functions.

use crate::jetcalc::JetPoly;

fn characteristic(b: &JetPoly, zeta: usize) -> Vec<JetPoly> {
    let mut k = vec![JetPoly::zero(); zeta];
    k[zeta - 1] = b.clone();
    k
}

/// `D_B f = Σ_n ∂_x^n B ∂f/∂w_{ζ,n}`.
pub fn flow_derivation(b: &JetPoly, zeta: usize, f: &JetPoly) -> JetPoly {
    f.evolutionary(&characteristic(b, zeta))
}

/// `∂_x D_B f - D_B ∂_x f`, which vanishes identically.
pub fn dx_commutator(b: &JetPoly, zeta: usize, f: &JetPoly) -> JetPoly {
    &flow_derivation(b, zeta, f).dx() - &flow_derivation(b, zeta, &f.dx())
}

/// `[A ∂_x^s ∘ δ_γ, D_B] f` minus
/// `A ∂_x^s Σ_j T_{γ,j}B (-∂_x)^j δ_ζ f - Σ_n ∂_x^n B ∂A/∂w_{ζ,n} ∂_x^s δ_γ f`,
/// which vanishes identically.
pub fn commutator_residual(
    a: &JetPoly,
    s: usize,
    gamma: usize,
    b: &JetPoly,
    zeta: usize,
    f: &JetPoly,
) -> JetPoly {
    let lhs = &(a * &flow_derivation(b, zeta, f).var_deriv(gamma).dx_n(s))
        - &flow_derivation(b, zeta, &(a * &f.var_deriv(gamma).dx_n(s)));
    let dz = f.var_deriv(zeta);
    let mut inner = JetPoly::zero();
    let top = b.max_order(gamma).unwrap_or(0);
    for j in 0..=top {
        let tb = b.t_op(gamma, j as i64);
        if !tb.is_zero() {
            inner += &tb * &dz.neg_dx_n(j);
        }
    }
    let first = a * &inner.dx_n(s);
    let second = &flow_derivation(b, zeta, a) * &f.var_deriv(gamma).dx_n(s);
    &(&lhs - &first) + &second
}
