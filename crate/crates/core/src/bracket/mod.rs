//! Deformation of the Poisson operator `Σ_s A_s ∂_x^s` under the Givental
//! Lie algebra, the residual of the defining equation, uniqueness checks and
//! ħ-homogeneity.

mod homogeneity;
pub mod lemmas;

pub use homogeneity::{check_operator_homogeneity, check_series_homogeneity, Verdict};

use num_traits::Zero;

use crate::diffop::DiffOperator;
use crate::error::{Error, Result};
use crate::givental::{triple_fast, GenKind, GiventalGen, OmegaTable};
use crate::jetcalc::{binomial, HbarSeries, Jet};
use crate::{rat, ratio, Rational};

/// A matrix differential operator with vanishing order-0 part and
/// `P^† = -P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonOp(DiffOperator);

impl PoissonOp {
    pub fn new(op: DiffOperator) -> Result<Self> {
        if op.rows() != op.cols() {
            return Err(Error::InvalidInput("a Poisson operator must be square".into()));
        }
        if !op.has_zero_order0() {
            return Err(Error::InvalidInput("order-0 coefficient must vanish".into()));
        }
        if !op.is_skew() {
            return Err(Error::InvalidInput("operator is not skew-adjoint".into()));
        }
        Ok(PoissonOp(op))
    }

    /// `δ^{αβ} ∂_x`.
    pub fn dx(s: usize, trunc: usize) -> Self {
        PoissonOp(DiffOperator::dx(s, trunc))
    }

    pub fn op(&self) -> &DiffOperator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }
}

fn sign(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

fn half_hbar(x: &HbarSeries) -> HbarSeries {
    x.shift(1).scale(&ratio(1, 2))
}

fn scalar_op(h: usize, terms: impl IntoIterator<Item = (usize, HbarSeries)>) -> DiffOperator {
    let mut op = DiffOperator::zero(1, 1, h);
    for (k, c) in terms {
        op.add_entry(1, 1, k, &c);
    }
    op
}

/// Adds `coef * op` (op scalar) into entry `(row, col)` of `out`.
fn add_block(out: &mut DiffOperator, row: usize, col: usize, op: &DiffOperator, coef: &HbarSeries) {
    for (&(_, _, k), c) in op.entries() {
        out.add_entry(row, col, k, &(coef * c));
    }
}

fn partial(x: &HbarSeries, jet: Jet) -> HbarSeries {
    x.map(|p| p.partial_jet(jet))
}

/// Replaces every coefficient `a` of `op` by `Σ_jets ∂a/∂jet · w(jet)`.
fn coeff_derivation(op: &DiffOperator, mut w: impl FnMut(Jet) -> Result<HbarSeries>) -> Result<DiffOperator> {
    let mut out = DiffOperator::zero(op.rows(), op.cols(), op.trunc());
    for (&(r, c, k), a) in op.entries() {
        let mut acc = HbarSeries::zero(op.trunc());
        for jet in a.jets() {
            acc += &(&partial(a, jet) * &w(jet)?);
        }
        out.add_entry(r, c, k, &acc);
    }
    Ok(out)
}

fn max_order(x: &HbarSeries, color: usize) -> usize {
    x.max_order(color).unwrap_or(0)
}

/// `Σ_v Σ_{u<=v} C(v,u) T_{γ,v+1}X · ((-∂)^{v-u} Y) (-∂)^{u+1}` and
/// `-Σ C(v+1,u) ((-∂)^{v-u} X) · T_{γ,v+1}Y (-∂)^{u+1}`.
fn euler_pair(x: &HbarSeries, y: &HbarSeries, gamma: usize, h: usize) -> (DiffOperator, DiffOperator) {
    let mut first = DiffOperator::zero(1, 1, h);
    for v in 0..max_order(x, gamma) {
        let tx = x.t_op(gamma, v as i64 + 1);
        if tx.is_zero() {
            continue;
        }
        for u in 0..=v {
            let c = rat(binomial(v as i64, u as i64)) * sign(u as i64 + 1);
            first.add_entry(1, 1, u + 1, &(&tx * &y.neg_dx_n(v - u)).scale(&c));
        }
    }
    let mut second = DiffOperator::zero(1, 1, h);
    for v in 0..max_order(y, gamma) {
        let ty = y.t_op(gamma, v as i64 + 1);
        if ty.is_zero() {
            continue;
        }
        for u in 0..=v {
            let c = rat(binomial(v as i64 + 1, u as i64)) * sign(u as i64 + 1);
            second.add_entry(1, 1, u + 1, &(&x.neg_dx_n(v - u) * &ty).scale(&-c));
        }
    }
    (first, second)
}

/// `Σ_n T_{γ,n}Y (-∂)^{n+1}`.
fn euler_tail(y: &HbarSeries, gamma: usize, h: usize) -> DiffOperator {
    scalar_op(
        h,
        (0..=max_order(y, gamma)).map(|n| (n + 1, y.t_op(gamma, n as i64).scale(&sign(n as i64 + 1)))),
    )
}

/// Number of separately computed summands of the r-deformation of the
/// bracket, see [`r_deform_bracket_terms`].
pub const R_BRACKET_TERMS: usize = 12;

/// The first-order change of the operator under `r_ℓ z^ℓ`: the sum over
/// all integers `i + j = ℓ - 1` (negative indices through the extension of the
/// table, so `-1 <= i <= ℓ`) of `(-1)^{i+1} (r)^{μν}` times the bracketed terms, with the
/// ħ/2 block built from triple correlators.
pub fn r_deform_bracket(t: &OmegaTable, p: &PoissonOp, g: &GiventalGen) -> Result<DiffOperator> {
    let terms = r_deform_bracket_terms(t, p, g)?;
    let mut out = DiffOperator::zero(t.dim(), t.dim(), terms[0].trunc());
    for term in &terms {
        out = out.add(term)?;
    }
    Ok(out)
}

/// The summands of [`r_deform_bracket`] in display order, each already
/// summed over `i, μ, ν`:
/// 0. `Ω_{𝟙,0;ν,j} ∂Ω_{μ,i;β,0}/∂w_{γ,n} ∂^n ∘ A`
/// 1. `-Σ C(n+1,a) ∂^bΩ_{𝟙,0;ν,j} ∂^aΩ_{μ,i;γ,0} ∂A/∂w_{γ,n}`
/// 2. `A_s Σ_{f+e=s-1} ∂^f ∘ Ω_{𝟙,0;ν,j} ∂^e ∘ Σ_n T_{γ,n}Ω_{μ,i;ξ,0} (-∂)^{n+1}`
/// 3. `Ω_{β,0;ν,j} ∂Ω_{μ,i;𝟙,0}/∂w_{γ,n} ∂^n ∘ A`
/// 4. `A ∘ Σ C(v,u) T_{γ,v+1}Ω_{𝟙,0;ν,j} ((-∂)^{v-u}Ω_{μ,i;ξ,0}) (-∂)^{u+1}`
/// 5. `-A ∘ Σ C(v+1,u) ((-∂)^{v-u}Ω_{𝟙,0;ν,j}) T_{γ,v+1}Ω_{μ,i;ξ,0} (-∂)^{u+1}`
/// 6. `A_s Σ_{e+f=s-1} C(s,e) (∂^e δ_γΩ_{𝟙,0;ν,j}) ∂^f ∘ Ω_{μ,i;ξ,0} ∂`
/// 7. `-∂Ω_{β,0;ν,j-1} Σ_{u<m} ((-∂)^u ∂Ω_{μ,i+1;𝟙,0}/∂w_{γ,m}) ∂^{m-1-u} ∘ A`
/// 8. `-∂Ω_{β,0;ν,j-1} Σ_{2<=f<=s} ((-∂)^{s-f}(A^{γξ}_s δ_γΩ_{μ,i+1;𝟙,0})) ∂^{f-1}`
/// 9. `ħ/2 ∂ ∘ ∂Ω_{β,0;μ,i;ν,j}/∂w_{γ,n} ∂^n ∘ A`
/// 10. `ħ/2 A ∘ Σ_m T_{γ,m}Ω_{ξ,0;μ,i;ν,j} (-∂)^{m+1}`
/// 11. `-ħ/2 Σ ∂^{n+1}Ω_{ζ,0;μ,i;ν,j} ∂A/∂w_{ζ,n}`
pub fn r_deform_bracket_terms(t: &OmegaTable, p: &PoissonOp, g: &GiventalGen) -> Result<Vec<DiffOperator>> {
    if g.kind() != GenKind::Upper {
        return Err(Error::InvalidGenerator("expected an upper generator".into()));
    }
    let s = t.dim();
    if g.dim() != s || p.dim() != s {
        return Err(Error::DimensionMismatch(format!(
            "table has {s} colors, generator {}, operator {}",
            g.dim(),
            p.dim()
        )));
    }
    let l = g.level();
    if l + 1 > t.max_index() {
        return Err(Error::OutOfBounds(format!(
            "level {l} needs table indices up to {}, table has {}",
            l + 1,
            t.max_index()
        )));
    }
    let h = t.trunc().min(p.op().trunc());
    let a = p.op().truncate(h);
    let mut out = vec![DiffOperator::zero(s, s, h); R_BRACKET_TERMS];
    if g.is_zero() {
        return Ok(out);
    }
    let one = HbarSeries::constant(rat(1), h);
    let dx1 = scalar_op(h, [(1, one.clone())]);
    let dx_s = DiffOperator::dx(s, h);
    let l = l as i64;
    for i in -1..=l {
        let j = l - 1 - i;
        for mu in 1..=s {
            for nu in 1..=s {
                let r = g.up_up(mu, nu);
                if r.is_zero() {
                    continue;
                }
                let coef = r * sign(i + 1);
                let mut term = vec![DiffOperator::zero(s, s, h); R_BRACKET_TERMS];
                let om1 = t.ext_unit(nu, j, 0)?.truncate(h);
                let omu_i = t.ext_unit(mu, i, 0)?.truncate(h);
                let omu_i1 = t.ext_unit(mu, i + 1, 0)?.truncate(h);
                let om_mi: Vec<HbarSeries> = (1..=s)
                    .map(|x| Ok(t.ext(mu, i, x, 0)?.truncate(h)))
                    .collect::<Result<_>>()?;
                let tris: Vec<HbarSeries> = (1..=s)
                    .map(|x| {
                        if h == 0 {
                            return Ok(HbarSeries::zero(h));
                        }
                        Ok(triple_fast(t, (x, 0), (mu, i), (nu, j))?.truncate(h))
                    })
                    .collect::<Result<_>>()?;

                let mut l0 = DiffOperator::zero(s, s, h);
                let mut l3 = DiffOperator::zero(s, s, h);
                let mut l7 = DiffOperator::zero(s, s, h);
                let mut m10 = DiffOperator::zero(s, s, h);
                for beta in 1..=s {
                    let x = &om_mi[beta - 1];
                    for jet in x.jets() {
                        l0.add_entry(beta, jet.color(), jet.order(), &(&om1 * &partial(x, jet)));
                    }
                    let w = t.ext(beta, 0, nu, j)?.truncate(h);
                    for jet in omu_i.jets() {
                        l3.add_entry(beta, jet.color(), jet.order(), &(&w * &partial(&omu_i, jet)));
                    }
                    if j >= 1 {
                        let z = t.ext(beta, 0, nu, j - 1)?.truncate(h).dx();
                        for jet in omu_i1.jets() {
                            let m = jet.order();
                            let d = partial(&omu_i1, jet);
                            for u in 0..m {
                                l7.add_entry(beta, jet.color(), m - 1 - u, &-(&z * &d.neg_dx_n(u)));
                            }
                        }
                    }
                    if h >= 1 {
                        let tr = &tris[beta - 1];
                        for jet in tr.jets() {
                            m10.add_entry(beta, jet.color(), jet.order(), &half_hbar(&partial(tr, jet)));
                        }
                    }
                }
                term[0] = l0.compose(&a)?;
                term[3] = l3.compose(&a)?;
                term[7] = l7.compose(&a)?;
                term[9] = dx_s.compose(&m10)?.compose(&a)?;

                let mut r4 = DiffOperator::zero(s, s, h);
                let mut r5 = DiffOperator::zero(s, s, h);
                let mut r10 = DiffOperator::zero(s, s, h);
                for gamma in 1..=s {
                    for xi in 1..=s {
                        let y = &om_mi[xi - 1];
                        let (e4, e5) = euler_pair(&om1, y, gamma, h);
                        add_block(&mut r4, gamma, xi, &e4, &one);
                        add_block(&mut r5, gamma, xi, &e5, &one);
                        if h >= 1 {
                            add_block(&mut r10, gamma, xi, &euler_tail(&tris[xi - 1], gamma, h), &half_hbar(&one));
                        }
                    }
                }
                term[4] = a.compose(&r4)?;
                term[5] = a.compose(&r5)?;
                term[10] = a.compose(&r10)?;

                let om1_op = scalar_op(h, [(0, om1.clone())]);
                for (&(beta, gamma, so), ac) in a.entries() {
                    if so == 0 {
                        continue;
                    }
                    let mut mid = DiffOperator::zero(1, 1, h);
                    for f in 0..so {
                        let e = so - 1 - f;
                        let lhs = scalar_op(h, [(f, one.clone())]);
                        let rhs = scalar_op(h, [(e, one.clone())]);
                        mid = mid.add(&lhs.compose(&om1_op)?.compose(&rhs)?)?;
                    }
                    let dg = om1.var_deriv(gamma);
                    for xi in 1..=s {
                        let y = &om_mi[xi - 1];
                        let t3 = mid.compose(&euler_tail(y, gamma, h))?;
                        add_block(&mut term[2], beta, xi, &t3, ac);
                        let y_op = scalar_op(h, [(0, y.clone())]).compose(&dx1)?;
                        for e in 0..so {
                            let f = so - 1 - e;
                            let c = ac * &dg.dx_n(e).scale_int(binomial(so as i64, e as i64));
                            let df = scalar_op(h, [(f, one.clone())]);
                            add_block(&mut term[6], beta, xi, &df.compose(&y_op)?, &c);
                        }
                    }
                }

                term[1] = coeff_derivation(&a, |jet| {
                    let n = jet.order();
                    let y = &om_mi[jet.color() - 1];
                    let mut k = HbarSeries::zero(h);
                    for aa in 0..=n {
                        let b = n - aa;
                        k += &(&om1.dx_n(b) * &y.dx_n(aa)).scale_int(binomial(n as i64 + 1, aa as i64));
                    }
                    Ok(k)
                })?
                .scale(&rat(-1));
                if h >= 1 {
                    term[11] = coeff_derivation(&a, |jet| Ok(half_hbar(&tris[jet.color() - 1].dx_n(jet.order() + 1))))?
                        .scale(&rat(-1));
                }

                if j >= 1 {
                    for beta in 1..=s {
                        let z = t.ext(beta, 0, nu, j - 1)?.truncate(h).dx();
                        for (&(gamma, xi, so), ac) in a.entries() {
                            if so < 2 {
                                continue;
                            }
                            let q = ac * &omu_i1.var_deriv(gamma);
                            for f in 2..=so {
                                term[8].add_entry(beta, xi, f - 1, &-(&z * &q.neg_dx_n(so - f)));
                            }
                        }
                    }
                }
                for (o, x) in out.iter_mut().zip(term) {
                    *o = o.add(&x.scale(&coef))?;
                }
            }
        }
    }
    Ok(out)
}

/// `-Σ_s (Σ_γ (s_1)_{γ,𝟙} ∂A_s/∂w_{γ,0}) ∂_x^s`; only level one contributes.
/// Accepts any square operator, order-0 coefficients included.
pub fn s_deform_bracket(p: &DiffOperator, g: &GiventalGen, unit: &[Rational]) -> Result<DiffOperator> {
    if g.kind() != GenKind::Lower {
        return Err(Error::InvalidGenerator("expected a lower generator".into()));
    }
    if p.rows() != p.cols() || g.dim() != p.rows() || unit.len() != p.rows() {
        return Err(Error::DimensionMismatch("generator, unit and operator sizes differ".into()));
    }
    let h = p.trunc();
    if g.level() != 1 {
        return Ok(DiffOperator::zero(p.rows(), p.rows(), h));
    }
    let d = coeff_derivation(p, |jet| {
        if jet.order() != 0 {
            return Ok(HbarSeries::zero(h));
        }
        Ok(HbarSeries::constant(g.lo_unit(jet.color(), unit), h))
    })?;
    Ok(d.scale(&rat(-1)))
}

/// `∂_x dΩ_{α,p;β,0} - Σ_γ (dP)^{βγ} δ_γ Ω_{α,p+1;𝟙,0} - Σ_γ P^{βγ} δ_γ dΩ_{α,p+1;𝟙,0}`.
pub fn def_a_residual(
    t: &OmegaTable,
    p: &PoissonOp,
    d_omega: &OmegaTable,
    dp: &DiffOperator,
    alpha: usize,
    pp: usize,
    beta: usize,
) -> Result<HbarSeries> {
    let s = t.dim();
    let f: Vec<HbarSeries> = (1..=s)
        .map(|x| Ok(t.ext_unit(alpha, pp as i64 + 1, 0)?.var_deriv(x)))
        .collect::<Result<_>>()?;
    let df: Vec<HbarSeries> = (1..=s)
        .map(|x| Ok(d_omega.ext_unit(alpha, pp as i64 + 1, 0)?.var_deriv(x)))
        .collect::<Result<_>>()?;
    let lhs = d_omega.get(alpha, pp, beta, 0)?.dx();
    let r1 = dp.apply(&f)?;
    let r2 = p.op().apply(&df)?;
    Ok(&(&lhs - &r1[beta - 1]) - &r2[beta - 1])
}

/// One uniqueness residual: `(α, p, β)` and
/// `Σ_ξ B^{βξ} δ_ξ Ω_{α,p+1;𝟙,0} - ∂_x Ω_{α,p;β,0}`.
pub type UniquenessResidual = ((usize, usize, usize), HbarSeries);

pub fn uniqueness_residuals(t: &OmegaTable, b: &DiffOperator, pmax: usize) -> Result<Vec<UniquenessResidual>> {
    let s = t.dim();
    if b.rows() != s || b.cols() != s {
        return Err(Error::DimensionMismatch("operator size differs from the table".into()));
    }
    if pmax + 1 > t.max_index() {
        return Err(Error::OutOfBounds(format!(
            "p <= {pmax} needs table indices up to {}",
            pmax + 1
        )));
    }
    let mut out = Vec::new();
    for alpha in 1..=s {
        for p in 0..=pmax {
            let f: Vec<HbarSeries> = (1..=s)
                .map(|x| Ok(t.ext_unit(alpha, p as i64 + 1, 0)?.var_deriv(x)))
                .collect::<Result<_>>()?;
            let bf = b.apply(&f)?;
            for beta in 1..=s {
                let r = &bf[beta - 1] - &t.get(alpha, p, beta, 0)?.dx();
                out.push(((alpha, p, beta), r));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::givental::{r_deform_table, s_deform_table};
    use crate::jetcalc::JetPoly;
    use crate::kdvbase::KdVPoint;
    use crate::par::Execution;

    fn kdv(h: usize) -> OmegaTable {
        KdVPoint::new(4, h, Execution::Sequential).unwrap().table().clone()
    }

    fn residuals(t: &OmegaTable, d_om: &OmegaTable, dp: &DiffOperator, pmax: usize) -> usize {
        let p = PoissonOp::dx(t.dim(), t.trunc());
        let mut bad = 0;
        for pp in 0..=pmax {
            for a in 1..=t.dim() {
                for b in 1..=t.dim() {
                    if !def_a_residual(t, &p, d_om, dp, a, pp, b).unwrap().is_zero() {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }

    #[test]
    fn poisson_invariants() {
        assert!(PoissonOp::new(DiffOperator::dx(2, 1)).is_ok());
        let mut op = DiffOperator::zero(1, 1, 0);
        op.add_entry(1, 1, 1, &HbarSeries::from_poly(JetPoly::var(1, 0), 0));
        assert!(PoissonOp::new(op).is_err());
        let mut op = DiffOperator::dx(1, 0);
        op.add_entry(1, 1, 0, &HbarSeries::constant(rat(1), 0));
        assert!(PoissonOp::new(op).is_err());
    }

    #[test]
    fn zero_generator() {
        let t = kdv(1);
        let g = GiventalGen::upper(1, vec![vec![0]]).unwrap();
        let d = r_deform_bracket(&t, &PoissonOp::dx(1, 1), &g).unwrap();
        assert!(d.entries().next().is_none());
        let g = GiventalGen::lower(1, vec![vec![0]]).unwrap();
        assert!(s_deform_bracket(&DiffOperator::dx(1, 1), &g, t.unit()).unwrap().entries().next().is_none());
    }

    #[test]
    fn r1_on_kdv_solves_the_defining_equation() {
        let t = kdv(1);
        let g = GiventalGen::upper(1, vec![vec![1]]).unwrap();
        let d_om = r_deform_table(&t, &g, 3, Execution::Sequential).unwrap();
        let dp = r_deform_bracket(&t, &PoissonOp::dx(1, 1), &g).unwrap();
        assert_eq!(residuals(&t, &d_om, &dp, 1), 0);
        assert!(dp.is_skew());
        assert!(dp.has_zero_order0());
        let mut expect = DiffOperator::zero(1, 1, 1);
        expect.add_entry(1, 1, 3, &HbarSeries::constant(rat(-1), 1).shift(1));
        assert_eq!(dp, expect);
        let zero = DiffOperator::zero(1, 1, 1);
        assert!(residuals(&t, &d_om, &zero, 0) > 0);
    }

    #[test]
    fn s_deformation_examples() {
        let t = kdv(1);
        let g = GiventalGen::lower(1, vec![vec![3]]).unwrap();
        assert!(s_deform_bracket(&DiffOperator::dx(1, 1), &g, t.unit()).unwrap().entries().next().is_none());
        let mut op = DiffOperator::zero(1, 1, 0);
        op.add_entry(1, 1, 1, &HbarSeries::from_poly(JetPoly::var(1, 0), 0));
        op.add_entry(1, 1, 0, &HbarSeries::from_poly(JetPoly::var(1, 1).scale(&ratio(1, 2)), 0));
        let d = s_deform_bracket(&op, &g, &[rat(1)]).unwrap();
        let mut expect = DiffOperator::zero(1, 1, 0);
        expect.add_entry(1, 1, 1, &HbarSeries::constant(rat(-3), 0));
        assert_eq!(d, expect);
        let r = GiventalGen::upper(1, vec![vec![1]]).unwrap();
        assert!(s_deform_bracket(&op, &r, &[rat(1)]).is_err());
    }

    #[test]
    fn s_deformation_residual_vanishes() {
        let t = kdv(1);
        for l in 1..=3 {
            let g = GiventalGen::lower(l, vec![vec![if l % 2 == 1 { 1 } else { 0 }]]).unwrap();
            let d_om = s_deform_table(&t, &g, 4, Execution::Sequential).unwrap();
            let dp = s_deform_bracket(&DiffOperator::dx(1, 1), &g, t.unit()).unwrap();
            assert_eq!(residuals(&t, &d_om, &dp, 2), 0, "level {l}");
        }
    }

    #[test]
    fn uniqueness_examples() {
        let t = kdv(0);
        let ok = uniqueness_residuals(&t, &DiffOperator::dx(1, 0), 3).unwrap();
        assert!(ok.iter().all(|(_, r)| r.is_zero()));
        let twice = DiffOperator::dx(1, 0).scale(&rat(2));
        assert!(uniqueness_residuals(&t, &twice, 0).unwrap().iter().any(|(_, r)| !r.is_zero()));
        let mut bent = DiffOperator::dx(1, 0);
        bent.add_entry(1, 1, 2, &HbarSeries::from_poly(JetPoly::var(1, 1), 0));
        assert!(uniqueness_residuals(&t, &bent, 2).unwrap().iter().any(|(_, r)| !r.is_zero()));
        assert!(uniqueness_residuals(&t, &bent, 4).is_err());
    }
}
