//! Genus-zero data in flat coordinates: the TRR table `Ω^{[0]}`, the
//! principal hierarchy, its Hamiltonian densities and the commutation
//! identity.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jetcalc::{parse_poly, radial_primitive, JetPoly};
use crate::{rat, Rational};

/// The Hessian `Ω^{[0]}_{α,0;β,0}(v)` of the genus-zero potential together
/// with the unit vector `𝟙 = Σ_γ u_γ e_γ`. Indices run over an orthonormal
/// basis, so contractions are plain sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Genus0Data {
    hessian: Vec<Vec<JetPoly>>,
    unit: Vec<Rational>,
}

impl Genus0Data {
    /// Validates shape, symmetry, dependence on order-0 jets only and the
    /// normalization `Σ_β u_β Ω_{α,0;β,0} = v_α`.
    pub fn new(hessian: Vec<Vec<JetPoly>>, unit: Vec<Rational>) -> Result<Self> {
        let s = hessian.len();
        if s == 0 || unit.len() != s || hessian.iter().any(|row| row.len() != s) {
            return Err(Error::DimensionMismatch("hessian must be square and match the unit".into()));
        }
        for (a, row) in hessian.iter().enumerate() {
            for (b, h) in row.iter().enumerate() {
                if !h.is_dispersionless() || !h.is_polynomial() {
                    return Err(Error::InvalidInput(format!(
                        "hessian entry ({},{}) must be a polynomial in v: {h}",
                        a + 1,
                        b + 1
                    )));
                }
                if h.max_color() > s {
                    return Err(Error::InvalidInput(format!(
                        "hessian entry ({},{}) uses a color beyond {s}",
                        a + 1,
                        b + 1
                    )));
                }
                if *h != hessian[b][a] {
                    return Err(Error::InvalidInput("hessian is not symmetric".into()));
                }
            }
        }
        let data = Genus0Data { hessian, unit };
        for a in 1..=s {
            if data.unit_entry(a) != JetPoly::var(a, 0) {
                return Err(Error::InvalidInput(format!(
                    "unit normalization fails for color {a}: {}",
                    data.unit_entry(a)
                )));
            }
        }
        Ok(data)
    }

    /// Tries each basis vector and then the all-ones vector as the unit.
    pub fn with_detected_unit(hessian: Vec<Vec<JetPoly>>) -> Result<Self> {
        let s = hessian.len();
        let mut candidates: Vec<Vec<Rational>> = (0..s)
            .map(|c| (0..s).map(|k| if k == c { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        candidates.push(vec![Rational::one(); s]);
        let mut last = Error::InvalidInput("empty hessian".into());
        for u in candidates {
            match Genus0Data::new(hessian.clone(), u) {
                Ok(d) => return Ok(d),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    /// Parses entries in the text syntax of [`parse_poly`].
    pub fn parse(entries: &[Vec<String>]) -> Result<Self> {
        let hessian = entries
            .iter()
            .map(|row| row.iter().map(|e| parse_poly(e).map_err(Error::from)).collect())
            .collect::<Result<Vec<Vec<JetPoly>>>>()?;
        Genus0Data::with_detected_unit(hessian)
    }

    /// KdV: `F_0 = v³/6`.
    pub fn kdv() -> Self {
        Genus0Data::kdv_power(1)
    }

    /// `s` decoupled KdV copies: `Ω_{α,0;β,0} = δ_{αβ} v_α`, unit `Σ e_α`.
    pub fn kdv_power(s: usize) -> Self {
        let hessian = (1..=s)
            .map(|a| {
                (1..=s)
                    .map(|b| if a == b { JetPoly::var(a, 0) } else { JetPoly::zero() })
                    .collect()
            })
            .collect();
        Genus0Data::new(hessian, vec![Rational::one(); s]).expect("valid KdV data")
    }

    pub fn dim(&self) -> usize {
        self.hessian.len()
    }

    pub fn unit(&self) -> &[Rational] {
        &self.unit
    }

    pub fn hessian(&self, a: usize, b: usize) -> &JetPoly {
        &self.hessian[a - 1][b - 1]
    }

    fn unit_entry(&self, a: usize) -> JetPoly {
        let mut acc = JetPoly::zero();
        for (g, u) in self.unit.iter().enumerate() {
            acc += self.hessian[a - 1][g].scale(u);
        }
        acc
    }
}

/// `Ω^{[0]}_{α,p;β,q}` for `p, q <= max_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaTable0 {
    dim: usize,
    max_index: usize,
    unit: Vec<Rational>,
    entries: BTreeMap<(usize, usize, usize, usize), JetPoly>,
}

fn gradient(f: &JetPoly, s: usize) -> Vec<JetPoly> {
    (1..=s).map(|g| f.partial(g, 0)).collect()
}

fn check_closed(grad: &[JetPoly], what: &str) -> Result<()> {
    let s = grad.len();
    for a in 1..=s {
        for b in (a + 1)..=s {
            if grad[a - 1].partial(b, 0) != grad[b - 1].partial(a, 0) {
                return Err(Error::NotClosed(format!("{what}: components {a} and {b}")));
            }
        }
    }
    Ok(())
}

/// Builds the square table of side `max(pmax, qmax)` from the TRR
/// `∂Ω_{α,p+1;β,q}/∂v_γ = Σ_ξ Ω_{α,p;ξ,0} ∂Ω_{ξ,0;β,q}/∂v_γ`, normalized by
/// `Ω(0) = 0`. Each right-hand side is checked to be a gradient first.
pub fn trr_extend(d: &Genus0Data, pmax: usize, qmax: usize) -> Result<OmegaTable0> {
    let s = d.dim();
    let n = pmax.max(qmax);
    // col[p][α][β] = Ω_{α,p;β,0}
    let mut col: Vec<Vec<Vec<JetPoly>>> = vec![d.hessian.clone()];
    let dh: Vec<Vec<Vec<JetPoly>>> = (0..s)
        .map(|x| (0..s).map(|b| gradient(&d.hessian[x][b], s)).collect())
        .collect();
    for p in 0..n {
        let mut next = vec![vec![JetPoly::zero(); s]; s];
        for a in 0..s {
            for b in 0..s {
                let mut grad = vec![JetPoly::zero(); s];
                for x in 0..s {
                    let lhs = &col[p][a][x];
                    if lhs.is_zero() {
                        continue;
                    }
                    for g in 0..s {
                        grad[g] += lhs * &dh[x][b][g];
                    }
                }
                check_closed(&grad, &format!("Ω_{{{},{};{},0}}", a + 1, p + 1, b + 1))?;
                next[a][b] = radial_primitive(&grad);
            }
        }
        col.push(next);
    }
    let mut entries = BTreeMap::new();
    for p in 0..=n {
        for a in 0..s {
            for b in 0..s {
                entries.insert((a + 1, p, b + 1, 0), col[p][a][b].clone());
                entries.insert((b + 1, 0, a + 1, p), col[p][a][b].clone());
            }
        }
    }
    for p in 1..=n {
        for q in 1..=n {
            for a in 0..s {
                for b in 0..s {
                    let mut grad = vec![JetPoly::zero(); s];
                    for x in 0..s {
                        let lhs = &col[p - 1][a][x];
                        if lhs.is_zero() {
                            continue;
                        }
                        for (g, dg) in gradient(&col[q][b][x], s).into_iter().enumerate() {
                            grad[g] += lhs * &dg;
                        }
                    }
                    check_closed(&grad, &format!("Ω_{{{},{p};{},{q}}}", a + 1, b + 1))?;
                    entries.insert((a + 1, p, b + 1, q), radial_primitive(&grad));
                }
            }
        }
    }
    Ok(OmegaTable0 {
        dim: s,
        max_index: n,
        unit: d.unit.clone(),
        entries,
    })
}

impl OmegaTable0 {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn unit(&self) -> &[Rational] {
        &self.unit
    }

    pub fn get(&self, a: usize, p: usize, b: usize, q: usize) -> Result<&JetPoly> {
        self.entries.get(&(a, p, b, q)).ok_or_else(|| {
            Error::OutOfBounds(format!(
                "Ω_{{{a},{p};{b},{q}}} with colors <= {} and indices <= {}",
                self.dim, self.max_index
            ))
        })
    }

    /// `Ω_{α,p;𝟙,0} = Σ_γ u_γ Ω_{α,p;γ,0}`.
    pub fn unit_entry(&self, a: usize, p: usize) -> Result<JetPoly> {
        let mut acc = JetPoly::zero();
        for (g, u) in self.unit.iter().enumerate() {
            acc += self.get(a, p, g + 1, 0)?.scale(u);
        }
        Ok(acc)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize, usize), &JetPoly)> {
        self.entries.iter()
    }

    /// Checks symmetry and the TRR at every stored index with room above it.
    pub fn validate(&self) -> Result<()> {
        let s = self.dim;
        for (&(a, p, b, q), v) in &self.entries {
            if self.get(b, q, a, p)? != v {
                return Err(Error::InconsistentTable(format!("asymmetric at ({a},{p};{b},{q})")));
            }
            if p < self.max_index {
                let up = self.get(a, p + 1, b, q)?;
                for g in 1..=s {
                    let mut rhs = JetPoly::zero();
                    for x in 1..=s {
                        rhs += self.get(a, p, x, 0)? * &self.get(x, 0, b, q)?.partial(g, 0);
                    }
                    if up.partial(g, 0) != rhs {
                        return Err(Error::InconsistentTable(format!(
                            "TRR fails at ({a},{p};{b},{q}), direction {g}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let entries: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .map(|(&(a, p, b, q), v)| (format!("{a}.{p}.{b}.{q}"), v.to_json()))
            .collect();
        json!({"dim": self.dim, "max_index": self.max_index, "entries": entries})
    }
}

/// `∂v_α/∂t_{β,q} = ∂_x Ω_{α,0;β,q}` for every α.
pub fn principal_rhs(t: &OmegaTable0, b: usize, q: usize) -> Result<Vec<JetPoly>> {
    (1..=t.dim)
        .map(|a| Ok(t.get(a, 0, b, q)?.dx()))
        .collect()
}

/// `h_{α,p} = Ω_{𝟙,0;α,p+1}`; `p = -1` gives `v_α`.
pub fn hamiltonian_density0(t: &OmegaTable0, a: usize, p: i64) -> Result<JetPoly> {
    if p < -1 {
        return Err(Error::OutOfBounds(format!("h_{{{a},{p}}}")));
    }
    t.unit_entry(a, (p + 1) as usize)
}

/// `Σ_γ δh_{α,p}/δv_γ ∂_x δh_{β,q}/δv_γ - ∂_x Ω_{α,p+1;β,q}`.
pub fn check_commutation(t: &OmegaTable0, a: usize, p: usize, b: usize, q: usize) -> Result<JetPoly> {
    let ha = hamiltonian_density0(t, a, p as i64)?;
    let hb = hamiltonian_density0(t, b, q as i64)?;
    let mut lhs = JetPoly::zero();
    for g in 1..=t.dim {
        lhs += &ha.var_deriv(g) * &hb.var_deriv(g).dx();
    }
    Ok(&lhs - &t.get(a, p + 1, b, q)?.dx())
}

/// `[∂_{t_{β,q}}, ∂_{t_{γ,r}}] v_α` for each α, via the principal flows.
pub fn flow_commutator(t: &OmegaTable0, (b, q): (usize, usize), (c, r): (usize, usize)) -> Result<Vec<JetPoly>> {
    let x = principal_rhs(t, b, q)?;
    let y = principal_rhs(t, c, r)?;
    Ok((0..t.dim)
        .map(|a| &y[a].evolutionary(&x) - &x[a].evolutionary(&y))
        .collect())
}

/// `v^{p+q+1} / (p! q! (p+q+1))`, the closed form at the KdV point.
pub fn kdv_closed_form(p: usize, q: usize) -> JetPoly {
    let mut c = Rational::one() / rat((p + q + 1) as i64);
    c *= crate::jetcalc::inv_factorial(p) * crate::jetcalc::inv_factorial(q);
    JetPoly::var(1, 0).pow((p + q + 1) as u32).scale(&c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kdv_first_steps() {
        let t = trr_extend(&Genus0Data::kdv(), 2, 2).unwrap();
        assert_eq!(t.get(1, 1, 1, 0).unwrap(), &parse_poly("v^2/2").unwrap());
        assert_eq!(hamiltonian_density0(&t, 1, -1).unwrap(), parse_poly("v").unwrap());
        assert_eq!(hamiltonian_density0(&t, 1, 1).unwrap(), parse_poly("v^3/6").unwrap());
        t.validate().unwrap();
    }

    #[test]
    fn non_gradient_data_is_rejected() {
        // v1*v2^2 cannot be the (1,1) entry of a Hessian with unit e_2 and
        // Ω_{2,0;β,0} = v_β.
        let h = vec![
            vec![parse_poly("v1*v2^2").unwrap(), parse_poly("v1").unwrap()],
            vec![parse_poly("v1").unwrap(), parse_poly("v2").unwrap()],
        ];
        let d = Genus0Data::new(h, vec![Rational::zero(), Rational::one()]).unwrap();
        assert!(matches!(trr_extend(&d, 2, 2), Err(Error::NotClosed(_))));
    }

    #[test]
    fn bad_unit_is_rejected() {
        let h = vec![vec![parse_poly("v^2").unwrap()]];
        assert!(Genus0Data::with_detected_unit(h).is_err());
    }
}
