//! `jetorbit`: generate KdV and principal-hierarchy tables, deform them by
//! Givental generators, and run the verification suites.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jetorbit_core::genus0::{trr_extend, Genus0Data};
use jetorbit_core::givental::{GenKind, GiventalGen, OmegaTable};
use jetorbit_core::jetcalc::HbarSeries;
use jetorbit_core::kdvbase::{quasi_miura, Direction, KdVPoint, MAX_TRUNC};
use jetorbit_core::par::Execution;
use jetorbit_core::verify::{deform_report, run_suite, Suite, SuiteConfig, Target};
use jetorbit_core::Error;

#[derive(Parser, Debug)]
#[command(name = "jetorbit", version, about = "Givental deformations of KdV-type hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a two-point table
    Generate {
        #[arg(value_enum)]
        what: GenerateWhat,
        /// Hessian of the genus-zero potential as a JSON array of string rows
        #[arg(long)]
        hessian: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Deform the KdV point by a generator read from a JSON file
    Deform {
        #[arg(long, value_enum, default_value = "bracket")]
        target: TargetArg,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: SuiteArg,
        #[command(flatten)]
        common: Common,
    },
    /// Print the quasi-Miura transform or a generator template
    Dump {
        #[arg(value_enum)]
        what: DumpWhat,
        /// Generator kind for the template
        #[arg(long, value_enum, default_value = "r")]
        kind: KindArg,
        /// Generator level for the template
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        inverse: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Number of colors
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pmax: usize,
    /// Defaults to pmax
    #[arg(long)]
    qmax: Option<usize>,
    /// ħ truncation order
    #[arg(long, default_value_t = 1)]
    hbar: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Generator JSON file
    #[arg(long)]
    generator: Option<PathBuf>,
    /// Tensor power of the KdV point
    #[arg(long)]
    tensor: Option<usize>,
    /// Write to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include wall-clock timings in the output
    #[arg(long)]
    timing: bool,
    /// Evaluate sequentially
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn qmax(&self) -> usize {
        self.qmax.unwrap_or(self.pmax)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenerateWhat {
    Kdv,
    Principal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Omega,
    Bracket,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Commutation,
    Quasimiura,
    Homogeneity,
    Uniqueness,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DumpWhat {
    Transform,
    Generator,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    R,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Input problems exit with 2, failed verifications and internal
/// inconsistencies with 1.
enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DataIntegrity(_) | Error::InconsistentTable(_) | Error::Inversion(_) => {
                Failure::Internal(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Outcome {
    json: Value,
    text: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Generate { common, .. }
        | Command::Deform { common, .. }
        | Command::Verify { common, .. }
        | Command::Dump { common, .. } => common,
    };
    let result = match &cli.command {
        Command::Generate { what, hessian, common } => generate(*what, hessian.as_deref(), common),
        Command::Deform { target, common } => deform(*target, common),
        Command::Verify { suite, common } => verify(*suite, common),
        Command::Dump {
            what,
            kind,
            level,
            inverse,
            common,
        } => dump(*what, *kind, *level, *inverse, common),
    };
    match result {
        Ok(out) => {
            let body = match common.format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
                Format::Text => out.text,
            };
            if let Some(path) = &common.output {
                if let Err(e) = std::fs::write(path, body) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{body}");
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("verification failure: {m}");
            ExitCode::from(1)
        }
    }
}

fn check_hbar(h: usize) -> Result<(), Failure> {
    if h > MAX_TRUNC {
        return Err(Failure::Input(format!("--hbar {h} exceeds the supported truncation {MAX_TRUNC}")));
    }
    Ok(())
}

fn table_text(t: &OmegaTable, pmax: usize, qmax: usize) -> String {
    let mut out = format!("colors {}, ħ^{}\n", t.dim(), t.trunc());
    for (&(a, p, b, q), v) in t.entries() {
        if p <= pmax && q <= qmax {
            out += &format!("Ω({a},{p};{b},{q}) = {v}\n");
        }
    }
    out
}

fn filter_entries(v: &mut Value, pmax: usize, qmax: usize) {
    if let Some(map) = v.get_mut("entries").and_then(Value::as_object_mut) {
        map.retain(|k, _| {
            let idx: Vec<usize> = k.split('.').filter_map(|x| x.parse().ok()).collect();
            idx.len() == 4 && idx[1] <= pmax && idx[3] <= qmax
        });
    }
}

fn generate(what: GenerateWhat, hessian: Option<&str>, c: &Common) -> Result<Outcome, Failure> {
    let (pmax, qmax) = (c.pmax, c.qmax());
    match what {
        GenerateWhat::Kdv => {
            check_hbar(c.hbar)?;
            let s = c.tensor.or(c.dim).unwrap_or(1);
            if s == 0 {
                return Err(Failure::Input("need at least one color".into()));
            }
            let point = KdVPoint::new(pmax.max(qmax), c.hbar, c.exec())?;
            let table = point.tensor_power(s)?;
            let mut tj = table.to_json();
            filter_entries(&mut tj, pmax, qmax);
            let mut json = point.to_json();
            json["table"] = tj;
            json["colors"] = json!(s);
            Ok(Outcome {
                text: table_text(&table, pmax, qmax),
                json,
                pass: true,
            })
        }
        GenerateWhat::Principal => {
            let src = hessian.ok_or_else(|| Failure::Input("--hessian is required for principal".into()))?;
            let rows: Vec<Vec<String>> =
                serde_json::from_str(src).map_err(|e| Failure::Input(format!("--hessian: {e}")))?;
            let data = Genus0Data::parse(&rows)?;
            if let Some(d) = c.dim {
                if d != data.dim() {
                    return Err(Failure::Input(format!("--dim {d} but the hessian has {} rows", data.dim())));
                }
            }
            let t = trr_extend(&data, pmax, qmax)?;
            let pass = t.validate().is_ok();
            let mut text = format!("colors {}, genus zero\n", t.dim());
            for (&(a, p, b, q), v) in t.entries() {
                text += &format!("Ω({a},{p};{b},{q}) = {v}\n");
            }
            Ok(Outcome {
                json: t.to_json(),
                text,
                pass,
            })
        }
    }
}

fn read_generator(c: &Common) -> Result<GiventalGen, Failure> {
    let path = c
        .generator
        .as_ref()
        .ok_or_else(|| Failure::Input("--generator <file> is required".into()))?;
    let src = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&src).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(GiventalGen::from_json(&v)?)
}

fn deform(target: TargetArg, c: &Common) -> Result<Outcome, Failure> {
    check_hbar(c.hbar)?;
    let g = read_generator(c)?;
    let s = g.dim();
    for (flag, v) in [("--tensor", c.tensor), ("--dim", c.dim)] {
        if let Some(v) = v {
            if v != s {
                return Err(Failure::Input(format!("{flag} {v} but the generator has {s} colors")));
            }
        }
    }
    let target = match target {
        TargetArg::Omega => Target::Omega,
        TargetArg::Bracket => Target::Bracket,
    };
    let bound = match target {
        Target::Omega => c.pmax,
        Target::Bracket => c.pmax + 1,
    };
    let room = match g.kind() {
        GenKind::Upper => g.level() + 1,
        GenKind::Lower => 0,
    };
    let point = KdVPoint::new(bound + room, c.hbar, c.exec())?;
    let table = point.tensor_power(s)?;
    let mut report = deform_report(&table, &g, target, c.pmax, c.exec(), c.timing)?;
    report.seed = Some(c.seed);
    Ok(Outcome {
        json: report.to_json(),
        text: report.to_text(),
        pass: report.pass(),
    })
}

fn verify(suite: SuiteArg, c: &Common) -> Result<Outcome, Failure> {
    check_hbar(c.hbar)?;
    let suite = match suite {
        SuiteArg::Lemmas => Suite::Lemmas,
        SuiteArg::Commutation => Suite::Commutation,
        SuiteArg::Quasimiura => Suite::QuasiMiura,
        SuiteArg::Homogeneity => Suite::Homogeneity,
        SuiteArg::Uniqueness => Suite::Uniqueness,
        SuiteArg::All => Suite::All,
    };
    let cfg = SuiteConfig {
        seed: c.seed,
        count: c.count,
        pmax: c.pmax,
        hbar: c.hbar,
        dim: c.tensor.or(c.dim).unwrap_or(1),
        exec: c.exec(),
    };
    let start = Instant::now();
    let report = run_suite(suite, &cfg)?;
    let mut json = report.to_json();
    let mut text = report.to_text();
    if c.timing {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        json["timing_ms"] = json!(ms);
        text += &format!("time: {ms:.1} ms\n");
    }
    Ok(Outcome {
        json,
        text,
        pass: report.pass(),
    })
}

fn dump(what: DumpWhat, kind: KindArg, level: usize, inverse: bool, c: &Common) -> Result<Outcome, Failure> {
    match what {
        DumpWhat::Transform => {
            check_hbar(c.hbar)?;
            let direction = if inverse { Direction::Inverse } else { Direction::Forward };
            let m = quasi_miura(direction, c.hbar)?;
            let comps: Vec<&HbarSeries> = m.forward().iter().collect();
            let name = if inverse { "inverse" } else { "forward" };
            let mut text = format!("quasi-Miura transform ({name}), ħ^{}\n", c.hbar);
            for (a, x) in comps.iter().enumerate() {
                text += &format!("component {}: {x}\n", a + 1);
            }
            Ok(Outcome {
                json: json!({
                    "direction": name,
                    "hbar": c.hbar,
                    "components": comps.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
                }),
                text,
                pass: true,
            })
        }
        DumpWhat::Generator => {
            let s = c.tensor.or(c.dim).unwrap_or(1);
            if s == 0 || level == 0 {
                return Err(Failure::Input("template needs at least one color and level >= 1".into()));
            }
            let matrix: Vec<Vec<i64>> = (0..s)
                .map(|i| {
                    (0..s)
                        .map(|j| match (level % 2, i.cmp(&j)) {
                            (1, std::cmp::Ordering::Equal) => 1,
                            (0, std::cmp::Ordering::Less) => 1,
                            (0, std::cmp::Ordering::Greater) => -1,
                            _ => 0,
                        })
                        .collect()
                })
                .collect();
            let g = match kind {
                KindArg::R => GiventalGen::upper(level, matrix)?,
                KindArg::S => GiventalGen::lower(level, matrix)?,
            };
            let json = g.to_json();
            Ok(Outcome {
                text: serde_json::to_string(&json).expect("serializable") + "\n",
                json,
                pass: true,
            })
        }
    }
}
