//! Seeded verification suites and the deformation report.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bracket::{
    check_operator_homogeneity, check_series_homogeneity, def_a_residual, lemmas, r_deform_bracket,
    s_deform_bracket, uniqueness_residuals, PoissonOp, Verdict,
};
use crate::diffop::DiffOperator;
use crate::error::{Error, Result};
use crate::genus0::{check_commutation, trr_extend, Genus0Data};
use crate::givental::{
    r_deform_omega_long, r_deform_table, s_deform_table, triple_omega, GenKind, GiventalGen, OmegaTable,
};
use crate::jetcalc::{HbarSeries, Jet, JetPoly, Monomial};
use crate::kdvbase::{displayed_flows, principal_flow, quasi_miura, Direction};
use crate::par::Execution;
use crate::rat;

/// Degree offset of bracket coefficients: `A_{g,s}` has degree `2g + 1 - s`.
pub const BRACKET_DEGREE_OFFSET: i64 = 1;

/// Random differential polynomials for property checks: up to four terms,
/// each a product of up to three jets of order at most 3 with exponents at
/// most 2, coefficients in `-3..=3`.
pub struct RandomPolys {
    rng: ChaCha8Rng,
    colors: usize,
}

impl RandomPolys {
    pub fn new(seed: u64, colors: usize) -> Self {
        RandomPolys {
            rng: ChaCha8Rng::seed_from_u64(seed),
            colors: colors.clamp(1, 3),
        }
    }

    pub fn color(&mut self) -> usize {
        self.rng.gen_range(1..=self.colors)
    }

    pub fn order(&mut self, max: usize) -> usize {
        self.rng.gen_range(0..=max)
    }

    pub fn poly(&mut self) -> JetPoly {
        let mut p = JetPoly::zero();
        let terms = self.rng.gen_range(1..=4);
        for _ in 0..terms {
            let factors = self.rng.gen_range(0..=3);
            let mut m = Monomial::one();
            for _ in 0..factors {
                let jet = Jet::new(self.color(), self.rng.gen_range(0..=3));
                m = m.mul(&Monomial::var(jet, self.rng.gen_range(1..=2)));
            }
            let c = self.rng.gen_range(-3..=3i64);
            p.add_term(m, rat(c));
        }
        p
    }
}

/// One named identity family with its pass count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &str, anchor: &str) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            passed: 0,
            total: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < 20 {
            self.failures.push(what());
        }
    }

    pub fn pass(&self) -> bool {
        self.passed == self.total
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "anchor": self.anchor,
            "passed": self.passed,
            "total": self.total,
            "failures": self.failures,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Commutation,
    QuasiMiura,
    Homogeneity,
    Uniqueness,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        Ok(match s {
            "lemmas" => Suite::Lemmas,
            "commutation" => Suite::Commutation,
            "quasimiura" => Suite::QuasiMiura,
            "homogeneity" => Suite::Homogeneity,
            "uniqueness" => Suite::Uniqueness,
            "all" => Suite::All,
            other => return Err(Error::InvalidInput(format!("unknown suite {other:?}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Commutation => "commutation",
            Suite::QuasiMiura => "quasimiura",
            Suite::Homogeneity => "homogeneity",
            Suite::Uniqueness => "uniqueness",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub pmax: usize,
    pub hbar: usize,
    pub dim: usize,
    pub exec: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            count: 100,
            pmax: 3,
            hbar: 2,
            dim: 1,
            exec: Execution::Parallel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "seed": self.seed,
            "pass": self.pass(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} (seed {})\n", self.suite, self.seed);
        for c in &self.checks {
            let mark = if c.pass() { "PASS" } else { "FAIL" };
            out += &format!("{mark} {:<28} {:>5}/{:<5} [{}]\n", c.name, c.passed, c.total, c.anchor);
            for f in &c.failures {
                out += &format!("     {f}\n");
            }
        }
        out
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Lemmas => lemma_checks(cfg),
        Suite::Commutation => commutation_checks(cfg)?,
        Suite::QuasiMiura => quasi_miura_checks(cfg)?,
        Suite::Homogeneity => homogeneity_checks(cfg)?,
        Suite::Uniqueness => uniqueness_checks(cfg)?,
        Suite::All => {
            let mut all = lemma_checks(cfg);
            all.extend(commutation_checks(cfg)?);
            all.extend(quasi_miura_checks(cfg)?);
            all.extend(homogeneity_checks(cfg)?);
            all.extend(uniqueness_checks(cfg)?);
            all
        }
    };
    Ok(SuiteReport {
        suite: suite.name().into(),
        seed: cfg.seed,
        checks,
    })
}

/// Instances are drawn sequentially from one stream, then evaluated under
/// `cfg.exec`, so results do not depend on the schedule.
pub fn lemma_checks(cfg: &SuiteConfig) -> Vec<Check> {
    let mut gen = RandomPolys::new(cfg.seed, 3);
    let first: Vec<(JetPoly, usize, JetPoly)> = (0..cfg.count)
        .map(|_| {
            let b = gen.poly();
            let z = gen.color();
            (b, z, gen.poly())
        })
        .collect();
    let second: Vec<(JetPoly, usize, usize, JetPoly, usize, JetPoly)> = (0..cfg.count)
        .map(|_| {
            let a = gen.poly();
            let s = gen.order(3);
            let g = gen.color();
            let b = gen.poly();
            let z = gen.color();
            (a, s, g, b, z, gen.poly())
        })
        .collect();
    let r1 = cfg.exec.map(first, |(b, z, f)| lemmas::dx_commutator(&b, z, &f));
    let r2 = cfg.exec.map(second, |(a, s, g, b, z, f)| lemmas::commutator_residual(&a, s, g, &b, z, &f));
    let mut c1 = Check::new("dx commutes with D_B", "[∂_x, D_B] = 0");
    for (k, r) in r1.iter().enumerate() {
        c1.record(r.is_zero(), || format!("instance {k}: {r}"));
    }
    let mut c2 = Check::new("commutator with A∂^s∘δ", "[D_B, A∂^s∘δ_ξ] = D_B(A)∂^s∘δ_ξ");
    for (k, r) in r2.iter().enumerate() {
        c2.record(r.is_zero(), || format!("instance {k}: {r}"));
    }
    vec![c1, c2]
}

pub fn commutation_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.pmax;
    let t = trr_extend(&Genus0Data::kdv_power(cfg.dim.max(1)), n + 1, n + 1)?;
    let s = t.dim();
    let mut items = Vec::new();
    for a in 1..=s {
        for b in 1..=s {
            for p in 0..=n {
                for q in 0..=n {
                    items.push((a, p, b, q));
                }
            }
        }
    }
    let res = cfg.exec.map(items.clone(), |(a, p, b, q)| check_commutation(&t, a, p, b, q));
    let mut c = Check::new("Hamiltonian commutation", "Σ_γ δh_{α,p}/δv_γ ∂_x δh_{β,q}/δv_γ = ∂_x Ω_{α,p+1;β,q}");
    for ((a, p, b, q), r) in items.into_iter().zip(res) {
        let r = r?;
        c.record(r.is_zero(), || format!("({a},{p};{b},{q}): {r}"));
    }
    Ok(vec![c])
}

pub fn quasi_miura_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let h = cfg.hbar.min(2);
    let fwd = quasi_miura(Direction::Forward, h)?;
    let dx = DiffOperator::dx(1, h);
    let mut c1 = Check::new("∂_x is invariant", "conjugate of ∂_x = ∂_x mod ħ³");
    let conj = fwd.conjugate(&dx)?;
    c1.record(conj == dx, || format!("conjugate is {conj}"));

    let mut c2 = Check::new("Riemann flows to KdV flows", "Riemann t_0, t_1, t_2 ↦ KdV t_0, t_1, t_2 mod ħ³");
    let flows = displayed_flows(h);
    for (q, want) in flows.iter().enumerate() {
        let riemann = HbarSeries::from_poly(principal_flow(q), h);
        let got = fwd.transform_flow(&[riemann])?.remove(0);
        c2.record(&got == want, || format!("t_{q}: got {got}, expected {want}"));
    }

    let mut c3 = Check::new("no order-0 term", "A_0 = 0");
    let back = quasi_miura(Direction::Inverse, h)?.conjugate(&dx)?;
    c3.record(back.has_zero_order0(), || format!("conjugate is {back}"));
    Ok(vec![c1, c2, c3])
}

pub fn homogeneity_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let h = cfg.hbar.min(2);
    let n = cfg.pmax;
    let point = crate::kdvbase::KdVPoint::new(n + 2, h, cfg.exec)?;
    let t = point.table().tensor_power(cfg.dim.max(1))?;
    let mut c1 = Check::new("Ω entries", "deg Ω_g = 2g");
    for (&(a, p, b, q), v) in t.entries() {
        if p <= n && q <= n {
            let verdict = check_series_homogeneity(v, 0);
            c1.record(verdict.pass(), || format!("({a},{p};{b},{q}): {:?}", verdict.failures));
        }
    }
    let mut c2 = Check::new("bracket under r_1", "deg A_{g,s} = 2g + 1 - s");
    let s = t.dim();
    let g = GiventalGen::upper(1, identity(s))?;
    let dp = r_deform_bracket(&t, &PoissonOp::dx(s, h), &g)?;
    let verdict = check_operator_homogeneity(&dp, BRACKET_DEGREE_OFFSET);
    c2.record(verdict.pass(), || format!("{:?}", verdict.failures));
    Ok(vec![c1, c2])
}

pub fn uniqueness_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let n = cfg.pmax;
    let point = crate::kdvbase::KdVPoint::new(n + 1, 0, cfg.exec)?;
    let t = point.table();
    let nonzero = |b: &DiffOperator| -> Result<usize> {
        Ok(uniqueness_residuals(t, b, n)?.iter().filter(|(_, r)| !r.is_zero()).count())
    };
    let mut c = Check::new("∂_x is singled out", "B δ_ξ Ω_{α,p+1;𝟙,0} = ∂_x Ω_{α,p;β,0} ⇔ B = ∂_x");
    let dx = DiffOperator::dx(1, 0);
    let k = nonzero(&dx)?;
    c.record(k == 0, || format!("∂_x leaves {k} nonzero residuals"));
    let twice = dx.scale(&rat(2));
    let k = nonzero(&twice)?;
    c.record(k > 0, || "2∂_x passes".into());
    let mut bent = dx.clone();
    bent.add_entry(1, 1, 2, &HbarSeries::from_poly(JetPoly::var(1, 1), 0));
    let k = nonzero(&bent)?;
    c.record(k > 0, || "∂_x + w_1∂_x² passes".into());
    Ok(vec![c])
}

fn identity(s: usize) -> Vec<Vec<i64>> {
    (0..s).map(|i| (0..s).map(|j| i64::from(i == j)).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Omega,
    Bracket,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Omega => "omega",
            Target::Bracket => "bracket",
        }
    }
}

/// Residual of one identity: its label and the number of nonzero monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryResidual {
    pub label: String,
    pub nonzero_monomials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeformationReport {
    pub generator: GiventalGen,
    pub target: Target,
    pub pmax: usize,
    pub hbar: usize,
    pub seed: Option<u64>,
    pub omega: OmegaTable,
    pub bracket: Option<DiffOperator>,
    pub residuals: Vec<EntryResidual>,
    pub homogeneity: Verdict,
    pub symmetric: bool,
    pub triples_consistent: bool,
    pub timing_ms: Option<f64>,
}

impl DeformationReport {
    pub fn pass(&self) -> bool {
        self.residuals.iter().all(|r| r.nonzero_monomials == 0)
            && self.homogeneity.pass()
            && self.symmetric
            && self.triples_consistent
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "generator": self.generator.to_json(),
            "target": self.target.name(),
            "pmax": self.pmax,
            "hbar": self.hbar,
            "pass": self.pass(),
            "residuals": self.residuals.iter().map(|r| json!({
                "identity": r.label,
                "nonzero_monomials": r.nonzero_monomials,
            })).collect::<Vec<_>>(),
            "homogeneity": self.homogeneity.to_json(),
            "symmetric": self.symmetric,
            "triples_consistent": self.triples_consistent,
            "omega": self.omega.to_json(),
        });
        if let Some(b) = &self.bracket {
            v["bracket"] = b.to_json();
        }
        if let Some(s) = self.seed {
            v["seed"] = json!(s);
        }
        if let Some(t) = self.timing_ms {
            v["timing_ms"] = json!(t);
        }
        v
    }

    pub fn to_text(&self) -> String {
        let kind = match self.generator.kind() {
            GenKind::Upper => "r",
            GenKind::Lower => "s",
        };
        let mut out = format!(
            "deformation by {kind}_{} ({}), p <= {}, ħ^{}\n",
            self.generator.level(),
            self.target.name(),
            self.pmax,
            self.hbar
        );
        for (&(a, p, b, q), v) in self.omega.entries() {
            if (a, p) <= (b, q) && !v.is_zero() {
                out += &format!("  dΩ({a},{p};{b},{q}) = {v}\n");
            }
        }
        if let Some(b) = &self.bracket {
            if b.is_zero() {
                out += "  dA = 0\n";
            } else {
                for line in b.to_string().lines() {
                    out += &format!("  dA {line}\n");
                }
            }
        }
        let bad = self.residuals.iter().filter(|r| r.nonzero_monomials > 0).count();
        out += &format!("residuals: {} checked, {bad} nonzero\n", self.residuals.len());
        for r in self.residuals.iter().filter(|r| r.nonzero_monomials > 0) {
            out += &format!("  {}: {} monomials\n", r.label, r.nonzero_monomials);
        }
        out += &format!("homogeneity: {}\n", if self.homogeneity.pass() { "pass" } else { "FAIL" });
        for f in &self.homogeneity.failures {
            out += &format!("  {f}\n");
        }
        out += &format!("symmetric: {}\n", self.symmetric);
        out += &format!("triple correlators consistent: {}\n", self.triples_consistent);
        if let Some(t) = self.timing_ms {
            out += &format!("time: {t:.1} ms\n");
        }
        out
    }
}

fn monomials(x: &HbarSeries) -> usize {
    x.coeffs().iter().map(JetPoly::len).sum()
}

/// Deforms the two-point table `t` (and, for the bracket target, the base
/// operator `∂_x`) by `g`, then checks the results. The omega target checks
/// the simplified against the long form for upper generators; the bracket
/// target evaluates the defining equation for all `p <= pmax`. Needs table
/// indices up to `pmax + 1 + ℓ`.
pub fn deform_report(
    t: &OmegaTable,
    g: &GiventalGen,
    target: Target,
    pmax: usize,
    exec: Execution,
    timing: bool,
) -> Result<DeformationReport> {
    let start = Instant::now();
    let s = t.dim();
    let h = t.trunc();
    if g.dim() != s {
        return Err(Error::DimensionMismatch(format!("generator has {} colors, table {s}", g.dim())));
    }
    let bound = match target {
        Target::Omega => pmax,
        Target::Bracket => pmax + 1,
    };
    let d_om = match g.kind() {
        GenKind::Upper => r_deform_table(t, g, bound, exec)?,
        GenKind::Lower => s_deform_table(t, g, bound, exec)?,
    };
    let mut residuals = Vec::new();
    let mut homogeneity = Verdict::default();
    let mut bracket = None;
    for (&(a, p, b, q), v) in d_om.entries() {
        let mut verdict = check_series_homogeneity(v, 0);
        for f in &mut verdict.failures {
            *f = format!("dΩ({a},{p};{b},{q}) {f}");
        }
        homogeneity.merge(verdict);
    }
    match target {
        Target::Omega => {
            if g.kind() == GenKind::Upper {
                let keys: Vec<_> = d_om.entries().map(|(&k, _)| k).filter(|k| (k.0, k.1) <= (k.2, k.3)).collect();
                let long = exec.map(keys.clone(), |(a, p, b, q)| r_deform_omega_long(t, g, a, p, b, q));
                for (k, l) in keys.into_iter().zip(long) {
                    let diff = &l? - d_om.get(k.0, k.1, k.2, k.3)?;
                    residuals.push(EntryResidual {
                        label: format!("long form ({},{};{},{})", k.0, k.1, k.2, k.3),
                        nonzero_monomials: monomials(&diff),
                    });
                }
            }
        }
        Target::Bracket => {
            let p0 = PoissonOp::dx(s, h);
            let dp = match g.kind() {
                GenKind::Upper => r_deform_bracket(t, &p0, g)?,
                GenKind::Lower => s_deform_bracket(p0.op(), g, t.unit())?,
            };
            let mut verdict = check_operator_homogeneity(&dp, BRACKET_DEGREE_OFFSET);
            for f in &mut verdict.failures {
                *f = format!("dA {f}");
            }
            homogeneity.merge(verdict);
            let mut keys = Vec::new();
            for a in 1..=s {
                for p in 0..=pmax {
                    for b in 1..=s {
                        keys.push((a, p, b));
                    }
                }
            }
            let res = exec.map(keys.clone(), |(a, p, b)| def_a_residual(t, &p0, &d_om, &dp, a, p, b));
            for ((a, p, b), r) in keys.into_iter().zip(res) {
                residuals.push(EntryResidual {
                    label: format!("bracket ({a},{p};{b})"),
                    nonzero_monomials: monomials(&r?),
                });
            }
            bracket = Some(dp);
        }
    }
    let symmetric = d_om
        .entries()
        .all(|(&(a, p, b, q), v)| d_om.get(b, q, a, p).map(|w| w == v).unwrap_or(false));
    let triples_consistent = triples_agree(t, pmax.min(2))?;
    let timing_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(DeformationReport {
        generator: g.clone(),
        target,
        pmax,
        hbar: h,
        seed: None,
        omega: d_om,
        bracket,
        residuals,
        homogeneity,
        symmetric,
        triples_consistent,
        timing_ms,
    })
}

/// Whether every triple correlator with indices up to `n` is independent of
/// the distinguished slot.
pub fn triples_agree(t: &OmegaTable, n: usize) -> Result<bool> {
    let s = t.dim();
    let n = n.min(t.max_index()) as i64;
    for a in 1..=s {
        for b in 1..=s {
            for c in 1..=s {
                for i in 0..=n {
                    for j in 0..=n {
                        for k in 0..=n {
                            match triple_omega(t, (a, i), (b, j), (c, k)) {
                                Ok(_) => {}
                                Err(Error::InconsistentTable(_)) => return Ok(false),
                                Err(e) => return Err(e),
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_reproducible() {
        let mut a = RandomPolys::new(11, 2);
        let mut b = RandomPolys::new(11, 2);
        for _ in 0..20 {
            let p = a.poly();
            assert_eq!(p, b.poly());
            assert!(p.max_color() <= 2);
            assert!(p.is_polynomial());
        }
    }

    #[test]
    fn small_suites_pass() {
        let cfg = SuiteConfig {
            count: 10,
            pmax: 2,
            hbar: 1,
            ..SuiteConfig::default()
        };
        for s in [Suite::Lemmas, Suite::Commutation, Suite::QuasiMiura, Suite::Homogeneity, Suite::Uniqueness] {
            let r = run_suite(s, &cfg).unwrap();
            assert!(r.pass(), "{}", r.to_text());
        }
        assert!(Suite::parse("nope").is_err());
    }

    #[test]
    fn reports_on_kdv() {
        let k = crate::kdvbase::KdVPoint::new(4, 1, Execution::Sequential).unwrap();
        let r1 = GiventalGen::upper(1, vec![vec![1]]).unwrap();
        let rep = deform_report(k.table(), &r1, Target::Bracket, 2, Execution::Parallel, false).unwrap();
        assert!(rep.pass(), "{}", rep.to_text());
        assert_eq!(rep.residuals.len(), 3);
        let s1 = GiventalGen::lower(1, vec![vec![1]]).unwrap();
        let rep = deform_report(k.table(), &s1, Target::Bracket, 2, Execution::Parallel, false).unwrap();
        assert!(rep.pass());
        assert!(rep.bracket.as_ref().unwrap().is_zero());
        let zero = GiventalGen::upper(1, vec![vec![0]]).unwrap();
        let rep = deform_report(k.table(), &zero, Target::Omega, 2, Execution::Parallel, false).unwrap();
        assert!(rep.pass());
        assert!(rep.omega.entries().all(|(_, v)| v.is_zero()));
        assert!(rep.to_json().get("timing_ms").is_none());
    }
}
