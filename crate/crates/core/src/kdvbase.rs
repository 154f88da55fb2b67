//! The KdV point: dispersionless closed forms, the quasi-Miura change to the
//! dispersive hierarchy, and the two-point table to ħ² obtained by
//! transporting `F_1 = (1/24) log v_x` and the genus-two density along the
//! principal flows.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::diffop::MiuraChange;
use crate::error::{Error, Result};
use crate::genus0::kdv_closed_form;
use crate::givental::OmegaTable;
use crate::jetcalc::{inv_factorial, parse_poly, HbarSeries, JetPoly};
use crate::par::Execution;
use crate::{rat, ratio};

/// Highest ħ order for which the base point is known.
pub const MAX_TRUNC: usize = 2;
/// Largest `p + q` the table builder accepts.
pub const MAX_INDEX_SUM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Read off the displayed flows by integration (and cross-checked).
    Displayed,
    /// Obtained by transport along the principal flows.
    Transported,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Displayed => "displayed",
            Provenance::Transported => "transported",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `v -> w`
    Forward,
    /// `w -> v`
    Inverse,
}

/// `v^{p+q+1} / (p! q! (p+q+1))`.
pub fn kdv_dispersionless_omega(p: usize, q: usize) -> JetPoly {
    kdv_closed_form(p, q)
}

/// Right-hand side of the principal flow `v_{t_q} = ∂_x (v^{q+1}/(q+1)!)`.
pub fn principal_flow(q: usize) -> JetPoly {
    JetPoly::var(1, 0).pow(q as u32 + 1).scale(&inv_factorial(q + 1)).dx()
}

/// `∂_x F_1 = v_2 / (24 v_1)`; only derivatives of `log v_x` are ever built.
pub fn f1_dx() -> JetPoly {
    (&JetPoly::var(1, 2) * &JetPoly::var_pow(1, 1, -1)).scale(&ratio(1, 24))
}

/// `∂_{t_q} F_1 = (1/24) ∂_x v_{t_q} / v_1`.
pub fn f1_flow_derivative(q: usize) -> JetPoly {
    (&principal_flow(q).dx() * &JetPoly::var_pow(1, 1, -1)).scale(&ratio(1, 24))
}

/// The genus-two density whose second x-derivative is the ħ² part of the
/// quasi-Miura change.
pub fn f2_density() -> JetPoly {
    parse_poly("w[1,4]*w[1,1]^-2/1152 - 7*w[1,2]*w[1,3]*w[1,1]^-3/1920 + w[1,2]^3*w[1,1]^-4/360").expect("valid literal")
}

fn forward_component(h: usize) -> HbarSeries {
    let mut coeffs = vec![JetPoly::var(1, 0)];
    if h >= 1 {
        coeffs.push(f1_dx().dx());
    }
    if h >= 2 {
        coeffs.push(f2_density().dx_n(2));
    }
    HbarSeries::from_coeffs(coeffs)
}

fn check_trunc(h: usize) -> Result<()> {
    if h > MAX_TRUNC {
        return Err(Error::OutOfDerivableRange(format!(
            "the KdV point is known to ħ^{MAX_TRUNC}, requested ħ^{h}"
        )));
    }
    Ok(())
}

/// The quasi-Miura change
/// `v -> v + (ħ/24)(log v_x)_xx + ħ²(v_4/(1152 v_1²) - 7 v_2 v_3/(1920 v_1³) + v_2³/(360 v_1⁴))_xx`
/// with its inverse, or the inverse change itself.
pub fn quasi_miura(direction: Direction, h: usize) -> Result<MiuraChange> {
    check_trunc(h)?;
    let m = MiuraChange::invertible(vec![forward_component(h)])?;
    match direction {
        Direction::Forward => Ok(m),
        Direction::Inverse => m.inverted(),
    }
}

/// The displayed flows `w_{t_0}`, `w_{t_1}`, `w_{t_2}` truncated at ħ^h.
pub fn displayed_flows(h: usize) -> Vec<HbarSeries> {
    let raw = [
        vec!["w[1,1]", "0", "0"],
        vec!["w*w[1,1]", "w[1,3]/12", "0"],
        vec!["w^2*w[1,1]/2", "(2*w[1,1]*w[1,2] + w*w[1,3])/12", "w[1,5]/240"],
    ];
    raw.iter()
        .map(|row| HbarSeries::from_coeffs(row[..=h].iter().map(|s| parse_poly(s).expect("valid literal")).collect()))
        .collect()
}

fn transported(p: usize, q: usize, h: usize, m: &MiuraChange) -> Result<HbarSeries> {
    let mut coeffs = vec![kdv_dispersionless_omega(p, q)];
    let kp = [principal_flow(p)];
    let kq = [principal_flow(q)];
    if h >= 1 {
        coeffs.push(f1_flow_derivative(q).evolutionary(&kp));
    }
    if h >= 2 {
        coeffs.push(f2_density().evolutionary(&kq).evolutionary(&kp));
    }
    let in_v = HbarSeries::from_coeffs(coeffs);
    let in_w = m.to_new(&in_v)?;
    if !in_w.is_polynomial() {
        return Err(Error::DataIntegrity(format!(
            "Ω_({p},{q}) is not polynomial after the change of coordinates: {in_w}"
        )));
    }
    Ok(in_w)
}

fn from_display(q: usize, h: usize) -> Result<HbarSeries> {
    let flow = &displayed_flows(h)[q];
    let coeffs = flow
        .coeffs()
        .iter()
        .map(|c| c.formal_integrate().map_err(|e| Error::DataIntegrity(e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok(HbarSeries::from_coeffs(coeffs))
}

fn full_omega_with(p: usize, q: usize, h: usize, m: &MiuraChange) -> Result<(HbarSeries, Provenance)> {
    check_trunc(h)?;
    if p + q > MAX_INDEX_SUM {
        return Err(Error::OutOfDerivableRange(format!(
            "Ω_({p},{q}) exceeds the supported range p+q <= {MAX_INDEX_SUM}"
        )));
    }
    let t = transported(p.min(q), p.max(q), h, m)?;
    if p.min(q) == 0 && p.max(q) <= 2 {
        let d = from_display(p.max(q), h)?;
        if d != t {
            return Err(Error::DataIntegrity(format!(
                "transport gives {t} for Ω_({p},{q}), the displayed flow gives {d}"
            )));
        }
        return Ok((d, Provenance::Displayed));
    }
    Ok((t, Provenance::Transported))
}

/// `Ω_{p,q}` at the KdV point in w-coordinates, truncated at ħ^h.
pub fn kdv_full_omega(p: usize, q: usize, h: usize) -> Result<(HbarSeries, Provenance)> {
    check_trunc(h)?;
    full_omega_with(p, q, h, &quasi_miura(Direction::Forward, h)?)
}

/// The KdV base point: its two-point table in w-coordinates, provenance per
/// entry and the quasi-Miura change.
#[derive(Clone, Debug)]
pub struct KdVPoint {
    table: OmegaTable,
    provenance: BTreeMap<(usize, usize), Provenance>,
    miura: MiuraChange,
}

impl KdVPoint {
    /// Builds `Ω_{p,q}` for all `p, q <= max_index`.
    pub fn new(max_index: usize, trunc: usize, exec: Execution) -> Result<Self> {
        check_trunc(trunc)?;
        let miura = quasi_miura(Direction::Forward, trunc)?;
        let keys: Vec<(usize, usize)> = (0..=max_index)
            .flat_map(|p| (p..=max_index).map(move |q| (p, q)))
            .collect();
        let vals = exec.map(keys.clone(), |(p, q)| full_omega_with(p, q, trunc, &miura));
        let mut entries = BTreeMap::new();
        let mut provenance = BTreeMap::new();
        for ((p, q), v) in keys.into_iter().zip(vals) {
            let (series, prov) = v?;
            entries.insert((1, p, 1, q), series.clone());
            entries.insert((1, q, 1, p), series);
            provenance.insert((p, q), prov);
            provenance.insert((q, p), prov);
        }
        let table = OmegaTable::new(1, max_index, trunc, vec![rat(1)], entries)?;
        Ok(KdVPoint {
            table,
            provenance,
            miura,
        })
    }

    pub fn table(&self) -> &OmegaTable {
        &self.table
    }

    pub fn miura(&self) -> &MiuraChange {
        &self.miura
    }

    pub fn provenance(&self, p: usize, q: usize) -> Option<Provenance> {
        self.provenance.get(&(p, q)).copied()
    }

    /// `w_{t_q} = ∂_x Ω_{0,0;0,q}`.
    pub fn flow(&self, q: usize) -> Result<HbarSeries> {
        Ok(self.table.get(1, 0, 1, q)?.dx())
    }

    /// `h_p = Ω_{𝟙,0;0,p+1}` for `p >= -1`.
    pub fn hamiltonian(&self, p: i64) -> Result<HbarSeries> {
        if p < -1 {
            return Err(Error::InvalidInput(format!("h_{p} is not defined")));
        }
        Ok(self.table.get(1, 0, 1, (p + 1) as usize)?.clone())
    }

    /// `s` decoupled copies in colors `1..=s`.
    pub fn tensor_power(&self, s: usize) -> Result<OmegaTable> {
        self.table.tensor_power(s)
    }

    pub fn to_json(&self) -> Value {
        let prov: serde_json::Map<String, Value> = self
            .provenance
            .iter()
            .map(|(&(p, q), v)| (format!("{p}.{q}"), json!(v.as_str())))
            .collect();
        json!({
            "table": self.table.to_json(),
            "provenance": prov,
            "transform": self.miura.forward().iter().map(HbarSeries::to_json).collect::<Vec<_>>(),
        })
    }
}
