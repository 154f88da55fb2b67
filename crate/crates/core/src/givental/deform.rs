//! First-order action of `r_ℓ z^ℓ` and `s_ℓ z^{-ℓ}` on `Ω_{α,p;β,q}` in
//! w-coordinates.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::table::OmegaTable;
use super::{GenKind, GiventalGen};
use crate::error::{Error, Result};
use crate::jetcalc::{binomial, HbarSeries, Jet};
use crate::par::Execution;
use crate::{rat, ratio};

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn check_gen(t: &OmegaTable, g: &GiventalGen, kind: GenKind) -> Result<()> {
    if g.kind() != kind {
        return Err(Error::InvalidGenerator(format!("expected a {kind:?} generator")));
    }
    if g.dim() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generator of size {} on a {}-color table",
            g.dim(),
            t.dim()
        )));
    }
    Ok(())
}

fn check_room(t: &OmegaTable, need: usize, what: &str) -> Result<()> {
    if need > t.max_index() {
        return Err(Error::OutOfBounds(format!(
            "{what} needs table indices up to {need}, table has {}",
            t.max_index()
        )));
    }
    Ok(())
}

/// `Σ_{jets} ∂f/∂jet · c(jet)`.
fn directional(f: &HbarSeries, mut c: impl FnMut(Jet) -> Result<HbarSeries>) -> Result<HbarSeries> {
    let mut acc = HbarSeries::zero(f.trunc());
    for jet in f.jets() {
        let d = f.map(|p| p.partial_jet(jet));
        if d.is_zero() {
            continue;
        }
        acc += &(&d * &c(jet)?);
    }
    Ok(acc)
}

/// `Σ_{(γ,n),(ζ,m)} ∂²f/∂w_{γ,n}∂w_{ζ,m} ∂_x^n X_γ ∂_x^m Y_ζ`.
fn hessian_pair(f: &HbarSeries, x: &[HbarSeries], y: &[HbarSeries]) -> HbarSeries {
    let mut acc = HbarSeries::zero(f.trunc());
    for jet in f.jets() {
        let yz = &y[jet.color() - 1];
        if yz.is_zero() {
            continue;
        }
        let df = f.map(|p| p.partial_jet(jet));
        let inner = df.evolutionary(x);
        if inner.is_zero() {
            continue;
        }
        acc += &(&inner * &yz.dx_n(jet.order()));
    }
    acc
}

/// The r-action in the form with the extended index convention:
/// `Σ_d (-1)^{d+1} (r)^{μν} [Ω_{α,p;μ,d} Ω_{ν,ℓ-1-d;β,q} -
///   Σ ∂Ω/∂w_{γ,n} Σ_a C(n+1,a) ∂^a Ω_{γ,0;μ,d} ∂^{n-a} Ω_{ν,ℓ-1-d;𝟙,0} +
///   ħ/2 Σ ∂²Ω/∂w_{γ,n}∂w_{ζ,m} ∂^{n+1}Ω_{γ,0;μ,d} ∂^{m+1}Ω_{ν,ℓ-1-d;ζ,0}]`,
/// with `d` running over the window `[-p-1, ℓ+q]` outside of which every
/// summand vanishes.
pub fn r_deform_omega(t: &OmegaTable, g: &GiventalGen, a: usize, p: usize, b: usize, q: usize) -> Result<HbarSeries> {
    check_gen(t, g, GenKind::Upper)?;
    let l = g.level() as i64;
    check_room(t, g.level() + p.max(q), "r-deformation")?;
    let (pi, qi) = (p as i64, q as i64);
    let s = t.dim();
    let h = t.trunc();
    let omega = t.get(a, p, b, q)?.clone();
    let mut out = HbarSeries::zero(h);
    if g.is_zero() {
        return Ok(out);
    }
    for d in (-pi - 1)..=(l + qi) {
        let e = l - 1 - d;
        for mu in 1..=s {
            for nu in 1..=s {
                let r = g.up_up(mu, nu);
                if r.is_zero() {
                    continue;
                }
                let c = r * rat(sign(d + 1));
                let mut bracket = &t.ext(a, pi, mu, d)? * &t.ext(nu, e, b, qi)?;

                let left: Vec<HbarSeries> = (1..=s).map(|x| t.ext(x, 0, mu, d)).collect::<Result<_>>()?;
                let right_unit = t.ext_unit(nu, e, 0)?;
                let second = directional(&omega, |jet| {
                    let n = jet.order();
                    let base = &left[jet.color() - 1];
                    let mut acc = HbarSeries::zero(h);
                    for k in 0..=n {
                        let cb = binomial(n as i64 + 1, k as i64);
                        acc += &(&base.dx_n(k) * &right_unit.dx_n(n - k)).scale_int(cb);
                    }
                    Ok(acc)
                })?;
                bracket -= &second;

                if h >= 1 {
                    let x: Vec<HbarSeries> = left.iter().map(HbarSeries::dx).collect();
                    let y: Vec<HbarSeries> = (1..=s)
                        .map(|z| Ok(t.ext(nu, e, z, 0)?.dx()))
                        .collect::<Result<_>>()?;
                    let hh = hessian_pair(&omega, &x, &y);
                    bracket += &hh.shift(1).scale(&ratio(1, 2));
                }
                out += &bracket.scale(&c);
            }
        }
    }
    Ok(out)
}

/// The r-action written term by term without the index extension; used to
/// cross-check [`r_deform_omega`].
pub fn r_deform_omega_long(
    t: &OmegaTable,
    g: &GiventalGen,
    a: usize,
    p: usize,
    b: usize,
    q: usize,
) -> Result<HbarSeries> {
    check_gen(t, g, GenKind::Upper)?;
    let l = g.level();
    check_room(t, l + p.max(q), "r-deformation")?;
    let s = t.dim();
    let h = t.trunc();
    let unit = t.unit().to_vec();
    let omega = t.get(a, p, b, q)?.clone();
    let mut out = HbarSeries::zero(h);
    for mu in 1..=s {
        let c1 = g.lo_up(a, mu);
        if !c1.is_zero() {
            out += &t.get(mu, p + l, b, q)?.scale(c1);
        }
        let c2 = g.lo_up(b, mu);
        if !c2.is_zero() {
            out += &t.get(a, p, mu, q + l)?.scale(c2);
        }
    }
    for i in 0..l {
        for mu in 1..=s {
            for nu in 1..=s {
                let r = g.up_up(mu, nu);
                if r.is_zero() {
                    continue;
                }
                let c = r * rat(sign(i as i64 + 1));
                out += &(t.get(a, p, mu, i)? * t.get(nu, l - 1 - i, b, q)?).scale(&c);
            }
        }
    }
    let unit_l: Vec<HbarSeries> = (1..=s).map(|m| t.ext_unit(m, l as i64, 0)).collect::<Result<_>>()?;
    let second = directional(&omega, |jet| {
        let gam = jet.color();
        let n = jet.order();
        let mut acc = HbarSeries::zero(h);
        for mu in 1..=s {
            let c = g.up_lo(mu, gam);
            if !c.is_zero() {
                acc += &unit_l[mu - 1].dx_n(n).scale(c);
            }
            let cu = g.up_unit(mu, &unit);
            if !cu.is_zero() {
                acc += &t.get(gam, 0, mu, l)?.dx_n(n).scale(&(cu * rat(n as i64 + 1)));
            }
        }
        for i in 0..l {
            for mu in 1..=s {
                for nu in 1..=s {
                    let r = g.up_up(mu, nu);
                    if r.is_zero() {
                        continue;
                    }
                    let c = r * rat(sign(i as i64 + 1));
                    let x = t.get(gam, 0, mu, i)?;
                    let y = t.ext_unit(nu, (l - 1 - i) as i64, 0)?;
                    let mut inner = HbarSeries::zero(h);
                    for k in 0..n {
                        let cb = binomial(n as i64, k as i64);
                        inner += &(&x.dx_n(k + 1) * &y.dx_n(n - k - 1)).scale_int(cb);
                    }
                    inner += &(x * &y).dx_n(n);
                    acc += &inner.scale(&c);
                }
            }
        }
        Ok(acc)
    })?;
    out -= &second;
    if h >= 1 {
        let mut hh = HbarSeries::zero(h);
        for i in 0..l {
            for mu in 1..=s {
                for nu in 1..=s {
                    let r = g.up_up(mu, nu);
                    if r.is_zero() {
                        continue;
                    }
                    let c = r * rat(sign(i as i64 + 1));
                    let x: Vec<HbarSeries> = (1..=s)
                        .map(|z| Ok(t.get(z, 0, mu, i)?.dx()))
                        .collect::<Result<_>>()?;
                    let y: Vec<HbarSeries> = (1..=s)
                        .map(|z| Ok(t.get(nu, l - 1 - i, z, 0)?.dx()))
                        .collect::<Result<_>>()?;
                    hh += &hessian_pair(&omega, &x, &y).scale(&c);
                }
            }
        }
        out += &hh.shift(1).scale(&ratio(1, 2));
    }
    Ok(out)
}

/// The s-action of a single level `ℓ`:
/// `[ℓ<=p] (s)^μ_α Ω_{μ,p-ℓ;β,q} + [ℓ<=q] Ω_{α,p;μ,q-ℓ} (s)^μ_β
///  + [ℓ=p+q+1] (-1)^p (s)_{αβ} - [ℓ=1] Σ_γ ∂Ω/∂w_{γ,0} (s_1)_{γ,𝟙}`.
pub fn s_deform_omega(t: &OmegaTable, g: &GiventalGen, a: usize, p: usize, b: usize, q: usize) -> Result<HbarSeries> {
    check_gen(t, g, GenKind::Lower)?;
    let l = g.level();
    let s = t.dim();
    let h = t.trunc();
    let omega = t.get(a, p, b, q)?;
    let mut out = HbarSeries::zero(h);
    if l <= p {
        for mu in 1..=s {
            let c = g.up_lo(mu, a);
            if !c.is_zero() {
                out += &t.get(mu, p - l, b, q)?.scale(c);
            }
        }
    }
    if l <= q {
        for mu in 1..=s {
            let c = g.up_lo(mu, b);
            if !c.is_zero() {
                out += &t.get(a, p, mu, q - l)?.scale(c);
            }
        }
    }
    if l == p + q + 1 {
        let c = g.lo_lo(a, b) * rat(sign(p as i64));
        out += &HbarSeries::constant(c, h);
    }
    if l == 1 {
        for gam in 1..=s {
            let c = g.lo_unit(gam, t.unit());
            if !c.is_zero() {
                out -= &omega.partial(gam, 0).scale(&c);
            }
        }
    }
    Ok(out)
}

fn deform_table(
    t: &OmegaTable,
    bound: usize,
    exec: Execution,
    f: impl Fn(usize, usize, usize, usize) -> Result<HbarSeries> + Sync + Send,
) -> Result<OmegaTable> {
    let s = t.dim();
    let mut keys = Vec::new();
    for a in 1..=s {
        for p in 0..=bound {
            for b in 1..=s {
                for q in 0..=bound {
                    keys.push((a, p, b, q));
                }
            }
        }
    }
    let vals = exec.map(keys.clone(), |(a, p, b, q)| f(a, p, b, q));
    let mut entries = BTreeMap::new();
    for (k, v) in keys.into_iter().zip(vals) {
        entries.insert(k, v?);
    }
    Ok(OmegaTable::from_parts(s, bound, t.trunc(), t.unit().to_vec(), entries))
}

/// `δΩ_{α,p;β,q}` for all `p, q <= bound` under an upper generator.
pub fn r_deform_table(t: &OmegaTable, g: &GiventalGen, bound: usize, exec: Execution) -> Result<OmegaTable> {
    check_gen(t, g, GenKind::Upper)?;
    check_room(t, g.level() + bound, "r-deformation table")?;
    deform_table(t, bound, exec, |a, p, b, q| r_deform_omega(t, g, a, p, b, q))
}

/// `δΩ_{α,p;β,q}` for all `p, q <= bound` under a lower generator.
pub fn s_deform_table(t: &OmegaTable, g: &GiventalGen, bound: usize, exec: Execution) -> Result<OmegaTable> {
    check_gen(t, g, GenKind::Lower)?;
    check_room(t, bound, "s-deformation table")?;
    deform_table(t, bound, exec, |a, p, b, q| s_deform_omega(t, g, a, p, b, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genus0::{trr_extend, Genus0Data};
    use crate::jetcalc::parse_poly;

    fn kdv0(n: usize) -> OmegaTable {
        OmegaTable::from_genus0(&trr_extend(&Genus0Data::kdv(), n, n).unwrap())
    }

    fn two_color(n: usize) -> OmegaTable {
        OmegaTable::from_genus0(&trr_extend(&Genus0Data::kdv_power(2), n, n).unwrap())
    }

    #[test]
    fn forms_agree_and_are_symmetric() {
        let t = two_color(5);
        let gens = [
            GiventalGen::upper(1, vec![vec![1, 2], vec![2, -1]]).unwrap(),
            GiventalGen::upper(2, vec![vec![0, 1], vec![-1, 0]]).unwrap(),
        ];
        for g in &gens {
            for p in 0..=2 {
                for q in 0..=2 {
                    for a in 1..=2 {
                        for b in 1..=2 {
                            let x = r_deform_omega(&t, g, a, p, b, q).unwrap();
                            let y = r_deform_omega_long(&t, g, a, p, b, q).unwrap();
                            assert_eq!(x, y, "({a},{p};{b},{q}) level {}", g.level());
                            let z = r_deform_omega(&t, g, b, q, a, p).unwrap();
                            assert_eq!(x, z);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_generator_acts_trivially() {
        let t = kdv0(4);
        let g = GiventalGen::upper(1, vec![vec![0]]).unwrap();
        let d = r_deform_table(&t, &g, 2, Execution::Sequential).unwrap();
        assert!(d.entries().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn s_shift_on_kdv() {
        let t = kdv0(3);
        let g = GiventalGen::lower(1, vec![vec![1]]).unwrap();
        for p in 0..=3 {
            assert!(s_deform_omega(&t, &g, 1, p, 1, 0).unwrap().is_zero(), "p = {p}");
        }
        let d = s_deform_omega(&t, &g, 1, 1, 1, 1).unwrap();
        // 2 Ω_{0;1} - ∂_v Ω_{1;1} = v^2 - v^2 = 0 for KdV
        assert_eq!(d.coeff(0), &parse_poly("v^2 - v^2").unwrap());
    }

    #[test]
    fn bounds_are_checked() {
        let t = kdv0(3);
        let g = GiventalGen::upper(1, vec![vec![1]]).unwrap();
        assert!(matches!(r_deform_omega(&t, &g, 1, 3, 1, 0), Err(Error::OutOfBounds(_))));
        assert!(matches!(
            r_deform_table(&t, &GiventalGen::lower(1, vec![vec![1]]).unwrap(), 1, Execution::Sequential),
            Err(Error::InvalidGenerator(_))
        ));
    }

    #[test]
    fn parallel_matches_sequential() {
        let t = two_color(4);
        let g = GiventalGen::upper(1, vec![vec![1, 1], vec![1, 0]]).unwrap();
        let a = r_deform_table(&t, &g, 2, Execution::Sequential).unwrap();
        let b = r_deform_table(&t, &g, 2, Execution::Parallel).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
