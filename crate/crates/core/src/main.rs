use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mdiew::fake::{example1_grid_minimum, example2_sweep, example2_value};
use mdiew::noise::{NoiseSpec, PauliIndexSet};
use mdiew::scan::{run_scan, write_scan, Axis, ScanConfig, ScanKind, ScanMethod};
use mdiew::states::{DensityMatrix, PerpConvention};
use mdiew::tensor::{ComplexMatrix, C64};
use mdiew::thresholds::{
    admixture_threshold, amplitude_damping_threshold, memory_threshold, numeric_threshold, pauli_threshold,
    white_noise_threshold, SumConvention, ThresholdResult,
};
use mdiew::verify::{run_verify, VerifyOptions};
use mdiew::{Error, Result};

const AGREEMENT: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "mdiew", version, about = "Measurement-device-independent entanglement witnesses with noisy inputs")]
struct Cli {
    /// Seed for sampled checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (CSV for scan, JSON otherwise).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON scan configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite; exit 1 if any invariant fails.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Perturb β₀₀ by this amount to exercise the failure path.
        #[arg(long, value_name = "DELTA")]
        inject_beta_fault: Option<f64>,
    },
    /// Evaluate the fake-detection examples.
    FakeDetect(FakeArgs),
    /// Sweep v* over two noise parameters and write a CSV grid.
    Scan(ScanArgs),
    /// Closed-form and numerical thresholds side by side.
    Threshold(ThresholdArgs),
    /// Print the scan configuration and noise specification schema.
    Schema,
}

#[derive(Args)]
struct FakeArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    example: u8,
    /// Noise weight of example 1.
    #[arg(long, default_value_t = 1.0)]
    q: f64,
    /// Single p for example 2 instead of a sweep.
    #[arg(long)]
    p: Option<f64>,
    /// Sweep step of example 2.
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, value_enum, default_value_t = Perp::ConjSwap)]
    perp: Perp,
    #[arg(long, default_value_t = 50)]
    polar: usize,
    #[arg(long, default_value_t = 100)]
    azimuth: usize,
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Perp {
    ConjSwap,
    NegConjSwap,
    IConjSwap,
    NegIConjSwap,
}

impl From<Perp> for PerpConvention {
    fn from(p: Perp) -> Self {
        match p {
            Perp::ConjSwap => PerpConvention::ConjSwap,
            Perp::NegConjSwap => PerpConvention::NegConjSwap,
            Perp::IConjSwap => PerpConvention::IConjSwap,
            Perp::NegIConjSwap => PerpConvention::NegIConjSwap,
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// `name:min:max:steps`
    #[arg(long)]
    axis1: Option<String>,
    /// `name:min:max:steps`
    #[arg(long)]
    axis2: Option<String>,
    /// `name=value`, repeatable.
    #[arg(long)]
    fixed: Vec<String>,
    #[arg(long)]
    numeric: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    White,
    AdmixtureMin,
    AdmixtureMax,
    Admixture,
    PauliSame,
    PauliDifferent,
    AmplitudeDamping,
}

impl From<Kind> for ScanKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::White => ScanKind::White,
            Kind::AdmixtureMin => ScanKind::AdmixtureMin,
            Kind::AdmixtureMax => ScanKind::AdmixtureMax,
            Kind::Admixture => ScanKind::Admixture,
            Kind::PauliSame => ScanKind::PauliSame,
            Kind::PauliDifferent => ScanKind::PauliDifferent,
            Kind::AmplitudeDamping => ScanKind::AmplitudeDamping,
        }
    }
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(value_enum)]
    kind: ThresholdKind,
    #[arg(long, default_value_t = 1.0)]
    p1: f64,
    #[arg(long, default_value_t = 1.0)]
    p2: f64,
    #[arg(long, default_value_t = 0.0)]
    eps1: f64,
    #[arg(long, default_value_t = 0.0)]
    eps2: f64,
    #[arg(long, default_value_t = 1)]
    i: usize,
    #[arg(long, default_value_t = 1)]
    j: usize,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Comma-separated probabilities of the memory channel.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])]
    probs: Vec<f64>,
    /// Include the identity in the memory channel's Pauli set.
    #[arg(long)]
    with_identity: bool,
    #[arg(long, value_enum, default_value_t = Convention::UnorderedPairs)]
    convention: Convention,
    /// Admixed state of Alice as `x0,x1,x2`.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.0, 0.0])]
    x: Vec<f64>,
    /// Admixed state of Bob as `y0,y1,y2`.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0, 0.0])]
    y: Vec<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdKind {
    White,
    Admixture,
    Pauli,
    AmplitudeDamping,
    Memory,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    AllPairs,
    OffDiagonal,
    UnorderedPairs,
}

impl From<Convention> for SumConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::AllPairs => SumConvention::AllPairs,
            Convention::OffDiagonal => SumConvention::OffDiagonal,
            Convention::UnorderedPairs => SumConvention::UnorderedPairs,
        }
    }
}

/// Failed invariant or disagreement, as opposed to bad input.
struct AssertionFailed;

type CmdResult = std::result::Result<(), Failure>;

enum Failure {
    Assertion(AssertionFailed),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify {
            trials,
            inject_beta_fault,
        } => cmd_verify(&cli, *trials, *inject_beta_fault),
        Command::FakeDetect(args) => cmd_fake_detect(&cli, args),
        Command::Scan(args) => cmd_scan(&cli, args),
        Command::Threshold(args) => cmd_threshold(&cli, args),
        Command::Schema => {
            print!("{SCHEMA}");
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(AssertionFailed)) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Contract(_) | Error::Channel(_) | Error::Consistency(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_verify(cli: &Cli, trials: usize, beta_fault: Option<f64>) -> CmdResult {
    let mut options = VerifyOptions {
        trials,
        beta_fault,
        ..Default::default()
    };
    if let Some(seed) = cli.seed {
        options.seed = seed;
    }
    let report = run_verify(&options)?;
    for suite in &report.suites {
        println!("{suite}");
    }
    if let Some(out) = &cli.out {
        write_json(out, &report)?;
    }
    if report.passed() {
        println!("all {} invariants hold", report.suites.len());
        Ok(())
    } else {
        for failed in report.failures() {
            eprintln!("invariant failed: {}", failed.name);
        }
        Err(Failure::Assertion(AssertionFailed))
    }
}

fn cmd_fake_detect(cli: &Cli, args: &FakeArgs) -> CmdResult {
    let perp = PerpConvention::from(args.perp);
    let json = if args.example == 1 {
        let best = example1_grid_minimum(args.q, args.polar, args.azimuth)?;
        let [a, b, c] = best.theta.components();
        println!("example 1, q = {}: minimum over {}x{} theta grid", args.q, args.polar, args.azimuth);
        println!("value {:.12}", displayed(best.value));
        println!("theta bloch ({a:.6}, {b:.6}, {c:.6})");
        serde_json::to_value(best).map_err(Error::from)?
    } else {
        let points = match args.p {
            Some(p) => vec![(p, example2_value(p, perp)?)],
            None => example2_sweep(args.step, perp)?,
        };
        println!("example 2 ({perp:?})");
        println!("p,value");
        for (p, v) in &points {
            println!("{p:.4},{:.12}", displayed(*v));
        }
        serde_json::to_value(points).map_err(Error::from)?
    };
    if let Some(out) = &cli.out {
        write_json(out, &json)?;
    }
    Ok(())
}

/// Round-off residue below the printed precision shows as 0 rather than -0.
fn displayed(v: f64) -> f64 {
    if v.abs() < 5e-13 {
        0.0
    } else {
        v
    }
}

fn parse_axis(field: &str, spec: &str) -> Result<Axis> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config {
        field: field.to_string(),
        reason: format!("'{spec}' is not name:min:max:steps"),
    };
    if parts.len() != 4 {
        return Err(bad());
    }
    Ok(Axis {
        name: parts[0].to_string(),
        min: parts[1].parse().map_err(|_| bad())?,
        max: parts[2].parse().map_err(|_| bad())?,
        steps: parts[3].parse().map_err(|_| bad())?,
    })
}

fn build_scan_config(cli: &Cli, args: &ScanArgs) -> Result<ScanConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            ScanConfig::from_json(&text)?
        }
        None => {
            let kind = args.kind.ok_or_else(|| Error::Config {
                field: "noise_kind".into(),
                reason: "give --kind or --config".into(),
            })?;
            ScanConfig::unit_square(kind.into(), 101)
        }
    };
    if let Some(kind) = args.kind {
        let kind = ScanKind::from(kind);
        if kind.axis_params() != config.noise_kind.axis_params() {
            let fresh = ScanConfig::unit_square(kind, config.axis1.steps);
            config.axis1 = fresh.axis1;
            config.axis2 = fresh.axis2;
        }
        config.noise_kind = kind;
    }
    if let Some(a) = &args.axis1 {
        config.axis1 = parse_axis("axis1", a)?;
    }
    if let Some(a) = &args.axis2 {
        config.axis2 = parse_axis("axis2", a)?;
    }
    for kv in &args.fixed {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config {
            field: "fixed".into(),
            reason: format!("'{kv}' is not name=value"),
        })?;
        let v = v.parse().map_err(|_| Error::Config {
            field: format!("fixed.{k}"),
            reason: format!("'{v}' is not a number"),
        })?;
        config.fixed.insert(k.to_string(), v);
    }
    if args.numeric {
        config.method = ScanMethod::Numeric;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_path = Some(out.clone());
    }
    Ok(config)
}

fn cmd_scan(cli: &Cli, args: &ScanArgs) -> CmdResult {
    let config = build_scan_config(cli, args)?;
    let result = run_scan(&config)?;
    match &config.output_path {
        Some(path) => {
            let sidecar = write_scan(&result, path)?;
            println!(
                "{}x{} grid, {} detectable cells -> {} ({})",
                result.grid.axis1.len(),
                result.grid.axis2.len(),
                result.grid.detectable_count(),
                path.display(),
                sidecar.display()
            );
        }
        None => print!("{}", result.grid.to_csv()?),
    }
    Ok(())
}

fn qubit_from_params(field: &str, p: &[f64]) -> Result<DensityMatrix> {
    if p.len() != 3 {
        return Err(Error::Config {
            field: field.into(),
            reason: "expected three comma-separated numbers".into(),
        });
    }
    let op = ComplexMatrix::from_rows(&[
        vec![C64::new(p[0], 0.0), C64::new(p[1], p[2])],
        vec![C64::new(p[1], -p[2]), C64::new(1.0 - p[0], 0.0)],
    ])?;
    DensityMatrix::single(op).map_err(|e| Error::Config {
        field: field.into(),
        reason: e.to_string(),
    })
}

#[derive(Serialize)]
struct ThresholdReport {
    noise: NoiseSpec,
    closed_form: ThresholdResult,
    numeric: ThresholdResult,
    agree: bool,
}

fn show(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12}")
    } else {
        "inf".into()
    }
}

fn cmd_threshold(cli: &Cli, a: &ThresholdArgs) -> CmdResult {
    let (noise, closed) = match a.kind {
        ThresholdKind::White => (
            NoiseSpec::WhiteNoise { p1: a.p1, p2: a.p2 },
            white_noise_threshold(a.p1, a.p2)?,
        ),
        ThresholdKind::Admixture => {
            let (x, y) = (qubit_from_params("x", &a.x)?, qubit_from_params("y", &a.y)?);
            (
                NoiseSpec::admixture(a.p1, a.p2, &x, &y),
                admixture_threshold(a.p1, a.p2, &x, &y)?,
            )
        }
        ThresholdKind::Pauli => (
            NoiseSpec::PauliFlip {
                i: a.i,
                j: a.j,
                p1: a.p1,
                p2: a.p2,
            },
            pauli_threshold(a.i, a.j, a.p1, a.p2)?,
        ),
        ThresholdKind::AmplitudeDamping => (
            NoiseSpec::AmplitudeDamping {
                eps1: a.eps1,
                eps2: a.eps2,
            },
            amplitude_damping_threshold(a.eps1, a.eps2)?,
        ),
        ThresholdKind::Memory => {
            for conv in SumConvention::ALL {
                let r = memory_threshold(a.m, &a.probs, conv)?;
                println!("closed form ({conv:?}): {}", show(r.v_star));
            }
            let index_set = if a.with_identity {
                PauliIndexSet::WithIdentity
            } else {
                PauliIndexSet::Flips
            };
            (
                NoiseSpec::CorrelatedPauli {
                    m: a.m,
                    probs: a.probs.clone(),
                    index_set,
                },
                memory_threshold(a.m, &a.probs, a.convention.into())?,
            )
        }
    };
    let numeric = numeric_threshold(&noise)?;
    let agree = closed.agrees_with(&numeric, AGREEMENT);
    println!("closed form: {}", show(closed.v_star));
    println!("numeric:     {}", show(numeric.v_star));
    let diff = if closed.v_star.is_finite() && numeric.v_star.is_finite() {
        format!("{:.3e}", (closed.v_star - numeric.v_star).abs())
    } else if agree {
        "0".into()
    } else {
        "inf".into()
    };
    println!("difference:  {diff}");
    println!("detectable:  {}", closed.detectable);
    if let Some(out) = &cli.out {
        write_json(
            out,
            &ThresholdReport {
                noise,
                closed_form: closed,
                numeric,
                agree,
            },
        )?;
    }
    if agree {
        Ok(())
    } else {
        eprintln!("closed form and numeric threshold disagree beyond {AGREEMENT:e}");
        Err(Failure::Assertion(AssertionFailed))
    }
}

const SCHEMA: &str = r#"Scan configuration (--config FILE, JSON):
{
  "noise_kind": "white" | "admixture_min" | "admixture_max" | "admixture"
              | "pauli_same" | "pauli_different" | "amplitude_damping",
  "axis1": {"name": string, "min": number, "max": number, "steps": int >= 2},
  "axis2": {"name": string, "min": number, "max": number, "steps": int >= 2},
  "fixed": {string: number},            optional, alias "fixed_params"
  "method": "closed_form" | "numeric",  optional, default "closed_form"
  "seed": int,                          optional, default 0
  "output_path": string                 optional, overridden by --out
}
Axis names: "p1", "p2" for every kind except amplitude_damping ("eps1", "eps2").
Fixed parameters:
  admixture        x0, x1, x2, y0, y1, y2 (required); X = [[x0, x1+i x2], [x1-i x2, 1-x0]]
  pauli_same       i (default 1)
  pauli_different  i (default 1), j (default 3)
Command-line flags (--kind, --axis1 name:min:max:steps, --axis2, --fixed k=v,
--numeric, --seed, --out) override the file.

CSV output: header "axis1\axis2,<axis2 values>", then "<axis1 value>,<cells>".
A cell holds v* when v* <= 1 and is empty otherwise; numbers carry 12
significant digits. A sidecar <out>.provenance.json records the config,
version and seed.

Noise specification (JSON, "kind" discriminator):
  {"kind": "identity"}
  {"kind": "white_noise", "p1": x, "p2": x}
  {"kind": "admixture", "p1": x, "p2": x, "x": M, "y": M}
  {"kind": "pauli_flip", "i": 1..3, "j": 1..3, "p1": x, "p2": x}
  {"kind": "amplitude_damping", "eps1": x, "eps2": x}
  {"kind": "correlated_pauli", "m": x, "probs": [x, ...], "index_set": "1..3" | "0..3"}
  {"kind": "non_uniform_example1", "q": x, "theta": [n1, n2, n3],
   "table_a": [x; 4] (optional), "table_b": [x; 4] (optional)}
  {"kind": "entangling_example2", "p": x,
   "perp": "conj_swap" | "neg_conj_swap" | "i_conj_swap" | "neg_i_conj_swap"}
M is a matrix given as rows of [re, im] pairs.

Exit codes: 0 success, 1 failed invariant or disagreement, 2 usage or
configuration error.
"#;
