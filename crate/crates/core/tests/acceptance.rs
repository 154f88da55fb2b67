use std::time::{Duration, Instant};

use jetorbit_core::bracket::{check_operator_homogeneity, uniqueness_residuals};
use jetorbit_core::diffop::DiffOperator;
use jetorbit_core::genus0::{check_commutation, trr_extend, Genus0Data};
use jetorbit_core::givental::{GiventalGen, OmegaTable};
use jetorbit_core::jetcalc::{parse_poly, HbarSeries, JetPoly};
use jetorbit_core::kdvbase::{principal_flow, quasi_miura, Direction, KdVPoint};
use jetorbit_core::par::Execution;
use jetorbit_core::verify::{deform_report, lemma_checks, triples_agree, DeformationReport, SuiteConfig, Target};
use jetorbit_core::{rat, Rational};

type Outcome = Result<(bool, String), String>;

fn series(parts: &[&str]) -> HbarSeries {
    HbarSeries::from_coeffs(parts.iter().map(|s| parse_poly(s).unwrap()).collect())
}

/// The three flows printed for KdV, as text.
fn printed_flows() -> Vec<HbarSeries> {
    vec![
        series(&["w[1,1]", "0", "0"]),
        series(&["w*w[1,1]", "w[1,3]/12", "0"]),
        series(&["w^2*w[1,1]/2", "w[1,1]*w[1,2]/6 + w*w[1,3]/12", "w[1,5]/240"]),
    ]
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn flows() -> Outcome {
    let k = KdVPoint::new(3, 2, Execution::Parallel).map_err(err)?;
    let m = quasi_miura(Direction::Forward, 2).map_err(err)?;
    let mut bad = Vec::new();
    for (q, want) in printed_flows().iter().enumerate() {
        let from_table = k.flow(q).map_err(err)?;
        let riemann = HbarSeries::from_poly(principal_flow(q), 2);
        let conjugated = m.transform_flow(&[riemann]).map_err(err)?.remove(0);
        if &from_table != want || &conjugated != want {
            bad.push(format!("t_{q}"));
        }
    }
    Ok((bad.is_empty(), format!("3 flows to ħ², mismatches {bad:?}")))
}

fn hamiltonians() -> Outcome {
    let k = KdVPoint::new(3, 2, Execution::Parallel).map_err(err)?;
    let printed = [
        series(&["w", "0", "0"]),
        series(&["w^2/2", "w[1,2]/12", "0"]),
        series(&["w^3/6", "(w[1,1]^2 + 2*w*w[1,2])/24", "w[1,4]/240"]),
    ];
    let mut bad = Vec::new();
    for (i, want) in printed.iter().enumerate() {
        let p = i as i64 - 1;
        let got = k.hamiltonian(p).map_err(err)?;
        let diff = &got - want;
        let exact = diff.coeffs().iter().all(|c| c.var_deriv(1).is_zero() && c.formal_integrate().is_ok());
        if !exact {
            bad.push(format!("h_{p}: {got}"));
        }
    }
    Ok((bad.is_empty(), format!("h_-1, h_0, h_1 modulo ∂_x-exact terms, mismatches {bad:?}")))
}

fn dispersionless() -> Outcome {
    let t = trr_extend(&Genus0Data::kdv(), 6, 6).map_err(err)?;
    let fact = |n: usize| (1..=n as i64).product::<i64>();
    let mut checked = 0;
    let mut bad = 0;
    for p in 0..=6usize {
        for q in 0..=(6 - p) {
            let n = p + q + 1;
            let c = Rational::new(1.into(), (fact(p) * fact(q) * n as i64).into());
            let want = JetPoly::var(1, 0).pow(n as u32).scale(&c);
            checked += 1;
            if t.get(1, p, 1, q).map_err(err)? != &want {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("{checked} entries with p+q <= 6, {bad} mismatches")))
}

fn commutation() -> Outcome {
    let t = trr_extend(&Genus0Data::kdv(), 4, 4).map_err(err)?;
    let mut bad = 0;
    for p in 0..=3 {
        for q in 0..=3 {
            if !check_commutation(&t, 1, p, 1, q).map_err(err)?.is_zero() {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("16 pairs p,q <= 3, {bad} nonzero residuals")))
}

fn lemmas() -> Outcome {
    let cfg = SuiteConfig {
        seed: 7,
        count: 100,
        ..SuiteConfig::default()
    };
    let checks = lemma_checks(&cfg);
    let detail = checks
        .iter()
        .map(|c| format!("{} {}/{}", c.name, c.passed, c.total))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((checks.iter().all(|c| c.pass() && c.total == 100), format!("seed 7: {detail}")))
}

struct Runs {
    reports: Vec<(String, DeformationReport)>,
    bases: Vec<OmegaTable>,
}

fn upper_generators() -> Vec<GiventalGen> {
    let m = |l: usize, rows: Vec<Vec<i64>>| GiventalGen::upper(l, rows).unwrap();
    vec![
        m(1, vec![vec![1]]),
        m(2, vec![vec![0]]),
        m(3, vec![vec![1]]),
        m(1, vec![vec![1, 2], vec![2, -1]]),
        m(2, vec![vec![0, 1], vec![-1, 0]]),
        m(3, vec![vec![1, 1], vec![1, 0]]),
        m(1, vec![vec![0, 1, -1], vec![1, 2, 0], vec![-1, 0, 1]]),
        m(2, vec![vec![0, 1, 2], vec![-1, 0, -1], vec![-2, 1, 0]]),
    ]
}

fn lower_generators() -> Vec<GiventalGen> {
    let m = |l: usize, rows: Vec<Vec<i64>>| GiventalGen::lower(l, rows).unwrap();
    vec![
        m(1, vec![vec![1]]),
        m(3, vec![vec![2]]),
        m(1, vec![vec![1, -1], vec![-1, 2]]),
        m(2, vec![vec![0, 1], vec![-1, 0]]),
        m(3, vec![vec![0, 3], vec![3, 1]]),
    ]
}

fn deformation_runs(h: usize, gens: &[GiventalGen], pmax: usize) -> Result<Runs, String> {
    let max_level = gens.iter().map(GiventalGen::level).max().unwrap_or(1);
    let point = KdVPoint::new(pmax + 2 + max_level, h, Execution::Parallel).map_err(err)?;
    let mut bases: Vec<OmegaTable> = Vec::new();
    let mut reports = Vec::new();
    for g in gens {
        let s = g.dim();
        if bases.iter().all(|b| b.dim() != s) {
            bases.push(point.tensor_power(s).map_err(err)?);
        }
        let t = bases.iter().find(|b| b.dim() == s).unwrap();
        let r = deform_report(t, g, Target::Bracket, pmax, Execution::Parallel, false).map_err(err)?;
        let kind = if matches!(g.kind(), jetorbit_core::givental::GenKind::Upper) { "r" } else { "s" };
        reports.push((format!("{kind}_{} on {s} colors, ħ^{h}", g.level()), r));
    }
    Ok(Runs { reports, bases })
}

fn residual_summary(runs: &Runs) -> (bool, usize, Vec<String>) {
    let mut total = 0;
    let mut bad = Vec::new();
    for (name, r) in &runs.reports {
        total += r.residuals.len();
        let k = r.residuals.iter().filter(|x| x.nonzero_monomials > 0).count();
        if k > 0 {
            bad.push(format!("{name}: {k}"));
        }
    }
    (bad.is_empty(), total, bad)
}

fn def_a(runs: &[Runs]) -> Outcome {
    let mut total = 0;
    let mut bad = Vec::new();
    let mut skew = true;
    for r in runs {
        let (_, n, b) = residual_summary(r);
        total += n;
        bad.extend(b);
        skew &= r.reports.iter().all(|(_, x)| {
            x.bracket.as_ref().map(|d| d.is_skew() && d.has_zero_order0()).unwrap_or(false)
        });
    }
    let runs_n: usize = runs.iter().map(|r| r.reports.len()).sum();
    Ok((
        bad.is_empty() && skew,
        format!("{runs_n} generators (ℓ <= 3, 1-3 colors) at ħ^1 and ħ^2, {total} residuals, nonzero {bad:?}, deformed operators skew: {skew}"),
    ))
}

fn lower(runs: &Runs) -> Outcome {
    let (ok, total, bad) = residual_summary(runs);
    let zero = runs.reports.iter().all(|(_, r)| r.bracket.as_ref().map(DiffOperator::is_zero).unwrap_or(false));
    Ok((
        ok && zero,
        format!("{} generators, {total} residuals, nonzero {bad:?}, s-deformation of ∂_x is zero: {zero}", runs.reports.len()),
    ))
}

fn homogeneity(runs: &[&Runs]) -> Outcome {
    let mut failures = Vec::new();
    let mut laurent = 0;
    let mut literal = 0;
    let mut checked = 0;
    for r in runs {
        for (name, rep) in &r.reports {
            checked += 1;
            for f in &rep.homogeneity.failures {
                failures.push(format!("{name}: {f}"));
            }
            laurent += rep.omega.entries().filter(|(_, v)| !v.is_polynomial()).count();
            if let Some(b) = &rep.bracket {
                laurent += usize::from(!b.is_polynomial());
                literal += check_operator_homogeneity(b, 0).failures.len();
            }
        }
    }
    Ok((
        failures.is_empty() && laurent == 0,
        format!(
            "{checked} deformations: dΩ degree 2g, dA degree 2g+1-s, failures {failures:?}, Laurent outputs {laurent}; \
             the literal rule 2g-s rejects {literal} bracket coefficients (e.g. -ħ∂³ from r_1)"
        ),
    ))
}

fn quasi_miura_check() -> Outcome {
    let m = quasi_miura(Direction::Forward, 2).map_err(err)?;
    let dx = DiffOperator::dx(1, 2);
    let conj = m.conjugate(&dx).map_err(err)?;
    let riemann = HbarSeries::from_poly(principal_flow(1), 2);
    let t1 = m.transform_flow(&[riemann]).map_err(err)?.remove(0);
    let ok_dx = conj == dx;
    let ok_t1 = t1 == printed_flows()[1];
    Ok((ok_dx && ok_t1, format!("∂_x invariant mod ħ³: {ok_dx}, t_1 flow conjugates to KdV: {ok_t1}")))
}

fn uniqueness() -> Outcome {
    let k = KdVPoint::new(4, 0, Execution::Parallel).map_err(err)?;
    let nonzero = |b: &DiffOperator| -> Result<usize, String> {
        Ok(uniqueness_residuals(k.table(), b, 3)
            .map_err(err)?
            .iter()
            .filter(|(_, r)| !r.is_zero())
            .count())
    };
    let dx = DiffOperator::dx(1, 0);
    let base = nonzero(&dx)?;
    let twice = nonzero(&dx.scale(&rat(2)))?;
    let mut bent = dx.clone();
    bent.add_entry(1, 1, 2, &HbarSeries::from_poly(JetPoly::var(1, 1), 0));
    let bent = nonzero(&bent)?;
    let back = quasi_miura(Direction::Inverse, 2)
        .map_err(err)?
        .conjugate(&DiffOperator::dx(1, 2))
        .map_err(err)?;
    let no_const = back.has_zero_order0();
    Ok((
        base == 0 && twice > 0 && bent > 0 && no_const,
        format!(
            "∂_x: {base} nonzero of 4, 2∂_x: {twice}, ∂_x + w_1∂_x²: {bent}, inverse conjugate has no order-0 term: {no_const}"
        ),
    ))
}

fn symmetry(runs: &[&Runs]) -> Outcome {
    let mut asym = Vec::new();
    let mut points = 0;
    let mut bad_points = 0;
    for r in runs {
        for (name, rep) in &r.reports {
            if !rep.symmetric {
                asym.push(name.clone());
            }
        }
        for b in &r.bases {
            points += 1;
            if !triples_agree(b, 2).map_err(err)? {
                bad_points += 1;
            }
        }
    }
    Ok((
        asym.is_empty() && bad_points == 0,
        format!("asymmetric deformations {asym:?}, triple correlators slot-independent at {}/{points} points", points - bad_points),
    ))
}

fn report(n: usize, name: &str, limit: Duration, elapsed: Duration, outcome: Outcome) -> bool {
    let (ok, detail) = match outcome {
        Ok((ok, d)) => (ok, d),
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = elapsed <= limit;
    let pass = ok && in_time;
    println!(
        "criterion {n:>2} {} {name}: {detail} [{:.2} s, limit {} s]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let x = f();
    (x, start.elapsed())
}

fn main() {
    let mut all = true;
    let secs = Duration::from_secs;

    let (o, t) = timed(flows);
    all &= report(1, "KdV flows", secs(1), t, o);
    let (o, t) = timed(hamiltonians);
    all &= report(2, "KdV Hamiltonian densities", secs(1), t, o);
    let (o, t) = timed(dispersionless);
    all &= report(3, "dispersionless closed form", secs(1), t, o);
    let (o, t) = timed(commutation);
    all &= report(4, "commutation identity", secs(5), t, o);
    let (o, t) = timed(lemmas);
    all &= report(5, "commutation lemmas", secs(30), t, o);

    let (upper, t6) = timed(|| -> Result<Vec<Runs>, String> {
        Ok(vec![
            deformation_runs(1, &upper_generators(), 2)?,
            deformation_runs(2, &upper_generators(), 2)?,
        ])
    });
    let (lower_runs, t7) = timed(|| deformation_runs(2, &lower_generators(), 2));
    let upper_ok = upper.as_ref().ok();
    let lower_ok = lower_runs.as_ref().ok();
    all &= report(6, "defining equation, r-action", secs(600), t6, upper.as_ref().map_err(Clone::clone).and_then(|r| def_a(r)));
    all &= report(7, "defining equation, s-action", secs(60), t7, lower_runs.as_ref().map_err(Clone::clone).and_then(lower));

    let mut every: Vec<&Runs> = Vec::new();
    if let Some(u) = upper_ok {
        every.extend(u.iter());
    }
    if let Some(l) = lower_ok {
        every.push(l);
    }
    let failed_runs = || Err("deformation runs did not complete".to_string());
    let complete = upper_ok.is_some() && lower_ok.is_some();
    let (o, t) = timed(|| if complete { homogeneity(&every) } else { failed_runs() });
    all &= report(8, "ħ-homogeneity", secs(600), t, o);
    let (o, t) = timed(quasi_miura_check);
    all &= report(9, "quasi-Miura transform", secs(30), t, o);
    let (o, t) = timed(uniqueness);
    all &= report(10, "uniqueness of ∂_x", secs(60), t, o);
    let (o, t) = timed(|| if complete { symmetry(&every) } else { failed_runs() });
    all &= report(11, "symmetry and well-definedness", secs(60), t, o);

    println!("acceptance: {}", if all { "all criteria pass" } else { "some criteria fail" });
    if !all {
        std::process::exit(1);
    }
}
