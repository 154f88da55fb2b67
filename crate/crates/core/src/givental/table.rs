use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::genus0::OmegaTable0;
use crate::jetcalc::{HbarSeries, JetPoly};
use crate::Rational;

/// Two-point functions `Ω_{α,p;β,q}` in w-jets for `p, q <= max_index`,
/// known to ħ order `trunc`, with the unit vector `𝟙 = Σ_γ u_γ e_γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaTable {
    dim: usize,
    max_index: usize,
    trunc: usize,
    unit: Vec<Rational>,
    entries: BTreeMap<(usize, usize, usize, usize), HbarSeries>,
}

impl OmegaTable {
    /// Requires every `(α,p,β,q)` with `p, q <= max_index` to be present and
    /// the table to be symmetric.
    pub fn new(
        dim: usize,
        max_index: usize,
        trunc: usize,
        unit: Vec<Rational>,
        entries: BTreeMap<(usize, usize, usize, usize), HbarSeries>,
    ) -> Result<Self> {
        if unit.len() != dim {
            return Err(Error::DimensionMismatch("unit vector length".into()));
        }
        let entries: BTreeMap<_, _> = entries
            .into_iter()
            .map(|(k, v)| (k, v.truncate(trunc)))
            .collect();
        let t = OmegaTable {
            dim,
            max_index,
            trunc,
            unit,
            entries,
        };
        for a in 1..=dim {
            for b in 1..=dim {
                for p in 0..=max_index {
                    for q in 0..=max_index {
                        let x = t.get(a, p, b, q)?;
                        if x.trunc() < trunc {
                            return Err(Error::InconsistentTable(format!(
                                "entry ({a},{p};{b},{q}) known only to ħ^{}",
                                x.trunc()
                            )));
                        }
                        if x != t.get(b, q, a, p)? {
                            return Err(Error::InconsistentTable(format!(
                                "asymmetric at ({a},{p};{b},{q})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(t)
    }

    /// The genus-zero sector as a table truncated at ħ⁰.
    pub fn from_genus0(t0: &OmegaTable0) -> Self {
        let entries = t0
            .entries()
            .map(|(&k, v)| (k, HbarSeries::from_poly(v.clone(), 0)))
            .collect();
        OmegaTable {
            dim: t0.dim(),
            max_index: t0.max_index(),
            trunc: 0,
            unit: t0.unit().to_vec(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn unit(&self) -> &[Rational] {
        &self.unit
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize, usize), &HbarSeries)> {
        self.entries.iter()
    }

    pub fn get(&self, a: usize, p: usize, b: usize, q: usize) -> Result<&HbarSeries> {
        self.entries.get(&(a, p, b, q)).ok_or_else(|| {
            Error::OutOfBounds(format!(
                "Ω_{{{a},{p};{b},{q}}} outside colors 1..={} and indices 0..={}",
                self.dim, self.max_index
            ))
        })
    }

    /// Lower ħ truncation and/or index bound.
    pub fn restrict(&self, max_index: usize, trunc: usize) -> OmegaTable {
        let max_index = max_index.min(self.max_index);
        let trunc = trunc.min(self.trunc);
        OmegaTable {
            dim: self.dim,
            max_index,
            trunc,
            unit: self.unit.clone(),
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| k.1 <= max_index && k.3 <= max_index)
                .map(|(&k, v)| (k, v.truncate(trunc)))
                .collect(),
        }
    }

    /// Entry with the negative-index extension: for `p < 0 <= q` it is
    /// `(-1)^q δ_{αβ} δ_{p+q,-1}`, for `q < 0 <= p` it is
    /// `(-1)^p δ_{αβ} δ_{p+q,-1}`, and zero when both are negative.
    pub fn ext(&self, a: usize, p: i64, b: usize, q: i64) -> Result<HbarSeries> {
        if p >= 0 && q >= 0 {
            return self.get(a, p as usize, b, q as usize).cloned();
        }
        let h = self.trunc;
        if (p < 0 && q < 0) || a != b || p + q != -1 {
            return Ok(HbarSeries::zero(h));
        }
        let k = if p >= 0 { p } else { q };
        let sign = if k % 2 == 0 { 1 } else { -1 };
        Ok(HbarSeries::from_poly(JetPoly::int(sign), h))
    }

    /// `Ω_{α,p;𝟙,q} = Σ_γ u_γ Ω_{α,p;γ,q}` with the extension.
    pub fn ext_unit(&self, a: usize, p: i64, q: i64) -> Result<HbarSeries> {
        let mut acc = HbarSeries::zero(self.trunc);
        for (g, u) in self.unit.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            let x = self.ext(a, p, g + 1, q)?;
            acc += &if u.is_one() { x } else { x.scale(u) };
        }
        Ok(acc)
    }

    /// Relabels the single color of a one-color table as `color` in an
    /// `s`-color ambient space (used to build tensor powers).
    pub fn tensor_power(&self, s: usize) -> Result<OmegaTable> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch("tensor powers need a one-color table".into()));
        }
        let mut entries = BTreeMap::new();
        for a in 1..=s {
            for b in 1..=s {
                for p in 0..=self.max_index {
                    for q in 0..=self.max_index {
                        let v = if a == b {
                            self.get(1, p, 1, q)?.map_colors(|_| a)
                        } else {
                            HbarSeries::zero(self.trunc)
                        };
                        entries.insert((a, p, b, q), v);
                    }
                }
            }
        }
        let u = &self.unit[0];
        Ok(OmegaTable {
            dim: s,
            max_index: self.max_index,
            trunc: self.trunc,
            unit: vec![u.clone(); s],
            entries,
        })
    }

    /// `self + eps * delta`, entry-wise over the common bounds.
    pub fn perturbed(&self, delta: &OmegaTable, eps: &Rational) -> Result<OmegaTable> {
        let n = self.max_index.min(delta.max_index);
        let h = self.trunc.min(delta.trunc);
        let mut entries = BTreeMap::new();
        for (&(a, p, b, q), v) in &self.entries {
            if p <= n && q <= n {
                entries.insert((a, p, b, q), &v.truncate(h) + &delta.get(a, p, b, q)?.scale(eps));
            }
        }
        OmegaTable::new(self.dim, n, h, self.unit.clone(), entries)
    }

    pub fn to_json(&self) -> Value {
        let entries: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .map(|(&(a, p, b, q), v)| (format!("{a}.{p}.{b}.{q}"), v.to_json()))
            .collect();
        json!({
            "dim": self.dim,
            "max_index": self.max_index,
            "trunc": self.trunc,
            "unit": self.unit.iter().map(crate::jetcalc::rational_to_json).collect::<Vec<_>>(),
            "entries": entries,
        })
    }

    pub(crate) fn from_parts(
        dim: usize,
        max_index: usize,
        trunc: usize,
        unit: Vec<Rational>,
        entries: BTreeMap<(usize, usize, usize, usize), HbarSeries>,
    ) -> Self {
        OmegaTable {
            dim,
            max_index,
            trunc,
            unit,
            entries,
        }
    }
}

/// `Σ_{ξ,n} ∂_x^{n+1} Ω_{i;ξ,0} ∂Ω_{j;k}/∂w_{ξ,n}`, i.e. the derivation along
/// the flow of slot `i` applied to the two-point function of the other slots.
fn triple_choice(
    t: &OmegaTable,
    i: (usize, usize),
    j: (usize, usize),
    k: (usize, usize),
) -> Result<HbarSeries> {
    let flow: Vec<HbarSeries> = (1..=t.dim)
        .map(|x| Ok(t.get(i.0, i.1, x, 0)?.dx()))
        .collect::<Result<_>>()?;
    Ok(t.get(j.0, j.1, k.0, k.1)?.evolutionary(&flow))
}

/// The triple correlator `Ω_{γ1,k1;γ2,k2;γ3,k3}`, zero if any `k` is
/// negative. All three choices of distinguished slot are evaluated and must
/// agree.
pub fn triple_omega(
    t: &OmegaTable,
    s1: (usize, i64),
    s2: (usize, i64),
    s3: (usize, i64),
) -> Result<HbarSeries> {
    if s1.1 < 0 || s2.1 < 0 || s3.1 < 0 {
        return Ok(HbarSeries::zero(t.trunc));
    }
    let a = (s1.0, s1.1 as usize);
    let b = (s2.0, s2.1 as usize);
    let c = (s3.0, s3.1 as usize);
    let x = triple_choice(t, a, b, c)?;
    let y = triple_choice(t, b, a, c)?;
    let z = triple_choice(t, c, a, b)?;
    if x != y || x != z {
        return Err(Error::InconsistentTable(format!(
            "triple correlator ({},{};{},{};{},{}) depends on the distinguished slot",
            a.0, a.1, b.0, b.1, c.0, c.1
        )));
    }
    Ok(x)
}

/// Unchecked variant used inside larger formulas once consistency has been
/// established.
pub(crate) fn triple_fast(
    t: &OmegaTable,
    s1: (usize, i64),
    s2: (usize, i64),
    s3: (usize, i64),
) -> Result<HbarSeries> {
    if s1.1 < 0 || s2.1 < 0 || s3.1 < 0 {
        return Ok(HbarSeries::zero(t.trunc));
    }
    triple_choice(
        t,
        (s1.0, s1.1 as usize),
        (s2.0, s2.1 as usize),
        (s3.0, s3.1 as usize),
    )
}
