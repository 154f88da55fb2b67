//! Matrix differential operators `Σ_s A_s ∂_x^s` with ħ-series coefficients.

mod miura;

pub use miura::{conjugate_by_miura, substitute_poly, substitute_series, MiuraChange};

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, JetError, Result};
use crate::jetcalc::{binomial, HbarSeries, JetPoly};

/// An `rows × cols` matrix of scalar differential operators. Entry
/// `(α, β, s)` holds the coefficient `A_s^{αβ}` of `∂_x^s`; colors are 1-based.
/// Every stored coefficient is truncated at the common ħ order `trunc` and
/// zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOperator {
    rows: usize,
    cols: usize,
    trunc: usize,
    entries: BTreeMap<(usize, usize, usize), HbarSeries>,
}

impl DiffOperator {
    pub fn zero(rows: usize, cols: usize, trunc: usize) -> Self {
        DiffOperator {
            rows,
            cols,
            trunc,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(s: usize, trunc: usize) -> Self {
        let mut op = DiffOperator::zero(s, s, trunc);
        for a in 1..=s {
            op.add_entry(a, a, 0, &HbarSeries::from_poly(JetPoly::one(), trunc));
        }
        op
    }

    /// `δ^{αβ} ∂_x`, the KdV bracket and its tensor powers.
    pub fn dx(s: usize, trunc: usize) -> Self {
        let mut op = DiffOperator::zero(s, s, trunc);
        for a in 1..=s {
            op.add_entry(a, a, 1, &HbarSeries::from_poly(JetPoly::one(), trunc));
        }
        op
    }

    /// A scalar (1×1) operator from `(order, coefficient)` pairs.
    pub fn scalar(terms: &[(usize, JetPoly)], trunc: usize) -> Self {
        let mut op = DiffOperator::zero(1, 1, trunc);
        for (s, c) in terms {
            op.add_entry(1, 1, *s, &HbarSeries::from_poly(c.clone(), trunc));
        }
        op
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Iterates `((row, col, order), coefficient)` in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &HbarSeries)> {
        self.entries.iter()
    }

    pub fn coeff(&self, row: usize, col: usize, order: usize) -> HbarSeries {
        self.entries
            .get(&(row, col, order))
            .cloned()
            .unwrap_or_else(|| HbarSeries::zero(self.trunc))
    }

    pub fn max_order(&self) -> Option<usize> {
        self.entries.keys().map(|k| k.2).max()
    }

    /// Adds `c ∂_x^order` to entry `(row, col)`.
    pub fn add_entry(&mut self, row: usize, col: usize, order: usize, c: &HbarSeries) {
        assert!(
            (1..=self.rows).contains(&row) && (1..=self.cols).contains(&col),
            "entry ({row},{col}) outside a {}x{} operator",
            self.rows,
            self.cols
        );
        debug_assert!(c.trunc() >= self.trunc, "coefficient known to lower ħ order");
        let c = c.truncate(self.trunc);
        let key = (row, col, order);
        let sum = match self.entries.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.entries.insert(key, sum);
        }
    }

    pub fn truncate(&self, h: usize) -> DiffOperator {
        let h = h.min(self.trunc);
        let mut out = DiffOperator::zero(self.rows, self.cols, h);
        for (&(a, b, s), c) in &self.entries {
            out.add_entry(a, b, s, &c.truncate(h));
        }
        out
    }

    /// Applies a coefficient-wise linear map.
    pub fn map_coeffs(&self, f: impl Fn(&HbarSeries) -> HbarSeries) -> DiffOperator {
        let mut out = DiffOperator::zero(self.rows, self.cols, self.trunc);
        for (&(a, b, s), c) in &self.entries {
            out.add_entry(a, b, s, &f(c));
        }
        out
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&HbarSeries) -> Result<HbarSeries>) -> Result<DiffOperator> {
        let mut mapped = Vec::with_capacity(self.entries.len());
        for (&(a, b, s), c) in &self.entries {
            mapped.push((a, b, s, f(c)?));
        }
        let h = mapped.iter().map(|m| m.3.trunc()).fold(self.trunc, usize::min);
        let mut out = DiffOperator::zero(self.rows, self.cols, h);
        for (a, b, s, c) in mapped {
            out.add_entry(a, b, s, &c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &crate::Rational) -> DiffOperator {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn add(&self, other: &DiffOperator) -> Result<DiffOperator> {
        self.check_same_shape(other)?;
        let mut out = self.truncate(other.trunc);
        for (&(a, b, s), c) in &other.entries {
            out.add_entry(a, b, s, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffOperator) -> Result<DiffOperator> {
        self.add(&other.scale(&crate::rat(-1)))
    }

    fn check_same_shape(&self, other: &DiffOperator) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// `self ∘ other`, using `∂^a ∘ g = Σ_k C(a,k) ∂^k(g) ∂^{a-k}`.
    pub fn compose(&self, other: &DiffOperator) -> Result<DiffOperator> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let h = self.trunc.min(other.trunc);
        let mut out = DiffOperator::zero(self.rows, other.cols, h);
        let mut by_row: BTreeMap<usize, Vec<(usize, usize, &HbarSeries)>> = BTreeMap::new();
        for (&(m, b, t), g) in &other.entries {
            by_row.entry(m).or_default().push((b, t, g));
        }
        for (&(a, m, s), f) in &self.entries {
            let Some(right) = by_row.get(&m) else {
                continue;
            };
            for &(b, t, g) in right {
                for k in 0..=s {
                    let c = binomial(s as i64, k as i64);
                    let term = (f * &g.dx_n(k)).scale_int(c);
                    out.add_entry(a, b, s - k + t, &term);
                }
            }
        }
        Ok(out)
    }

    /// Formal adjoint: `f ∂^s ↦ (-∂)^s ∘ f`, with row and column swapped.
    pub fn adjoint(&self) -> DiffOperator {
        let mut out = DiffOperator::zero(self.cols, self.rows, self.trunc);
        for (&(a, b, s), f) in &self.entries {
            let sign = if s % 2 == 0 { 1 } else { -1 };
            for k in 0..=s {
                let c = sign * binomial(s as i64, k as i64);
                out.add_entry(b, a, s - k, &f.dx_n(k).scale_int(c));
            }
        }
        out
    }

    /// Row-wise `Σ_{β,s} A_s^{αβ} ∂_x^s p_β`.
    pub fn apply(&self, p: &[HbarSeries]) -> Result<Vec<HbarSeries>> {
        if p.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "operator has {} columns, vector has {} entries",
                self.cols,
                p.len()
            )));
        }
        let h = p.iter().map(HbarSeries::trunc).fold(self.trunc, usize::min);
        let mut out = vec![HbarSeries::zero(h); self.rows];
        for (&(a, b, s), f) in &self.entries {
            out[a - 1] += &(f * &p[b - 1].dx_n(s));
        }
        Ok(out)
    }

    /// Applies a scalar operator to a single series.
    pub fn apply_scalar(&self, p: &HbarSeries) -> Result<HbarSeries> {
        Ok(self.apply(std::slice::from_ref(p))?.remove(0))
    }

    /// `adjoint(P) == -P` exactly at the stored truncation.
    pub fn is_skew(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let neg = self.scale(&crate::rat(-1));
        self.adjoint() == neg
    }

    /// True when no `∂_x^0` coefficient is stored.
    pub fn has_zero_order0(&self) -> bool {
        self.entries.keys().all(|k| k.2 != 0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.entries.values().all(HbarSeries::is_polynomial)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(&(a, b, s), c)| json!({"row": a, "col": b, "order": s, "coeff": c.to_json()}))
            .collect();
        json!({"rows": self.rows, "cols": self.cols, "trunc": self.trunc, "entries": entries})
    }

    pub fn from_json(v: &Value) -> Result<DiffOperator> {
        let field = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| JetError::Schema(format!("operator without {k}")))
        };
        let rows = field("rows")?;
        let cols = field("cols")?;
        let entries = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| JetError::Schema("operator without entries".into()))?;
        let mut parsed = Vec::with_capacity(entries.len());
        for e in entries {
            let idx = |k: &str| {
                e.get(k)
                    .and_then(Value::as_u64)
                    .map(|x| x as usize)
                    .ok_or_else(|| JetError::Schema(format!("entry without {k}")))
            };
            let (a, b, s) = (idx("row")?, idx("col")?, idx("order")?);
            if !(1..=rows).contains(&a) || !(1..=cols).contains(&b) {
                return Err(JetError::Schema(format!("entry ({a},{b}) out of range")).into());
            }
            let c = HbarSeries::from_json(
                e.get("coeff")
                    .ok_or_else(|| JetError::Schema("entry without coeff".into()))?,
            )?;
            parsed.push((a, b, s, c));
        }
        let trunc = match v.get("trunc").and_then(Value::as_u64) {
            Some(t) => t as usize,
            None => parsed.iter().map(|p| p.3.trunc()).min().unwrap_or(0),
        };
        let mut op = DiffOperator::zero(rows, cols, trunc);
        for (a, b, s, c) in parsed {
            if c.trunc() < trunc {
                return Err(JetError::Schema("coefficient below operator truncation".into()).into());
            }
            op.add_entry(a, b, s, &c);
        }
        Ok(op)
    }
}

impl std::fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        for (k, (&(a, b, s), c)) in self.entries.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "[{a},{b}] ∂^{s}: {c}")?;
        }
        Ok(())
    }
}
