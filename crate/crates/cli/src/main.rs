use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use opo_cv::condprep::{self, CondPrepConfig, Window};
use opo_cv::criteria::{eof, gemellity_from_covariance, log_negativity, separability, Quadrature};
use opo_cv::entopt::optimize_nonlocal_phase;
use opo_cv::io::{fixtures, MatrixDocument};
use opo_cv::opo::{below_threshold_covariance, coupled_covariance};
use opo_cv::{CoupledStateParams, CovarianceMatrix, Error, OpoParams};

mod report;

use report::ReportDocument;

const EXIT_INPUT: u8 = 2;
const EXIT_UNPHYSICAL: u8 = 3;
const EXIT_WRITE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "opo-cv",
    version,
    about = "Two-mode Gaussian states of a type-II OPO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every correlation criterion on a covariance-matrix file.
    Criteria(CriteriaArgs),
    /// Sweep the below-threshold OPO model over pump and frequency.
    OpoSweep(SweepArgs),
    /// Monte Carlo conditional preparation.
    Condprep(CondPrepArgs),
    /// Maximise E_N by a phase shift of A- relative to A+.
    Optimize(OptimizeArgs),
    /// List or write the shipped fixture files.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct CriteriaArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Report on matrices violating the uncertainty principle instead of failing.
    #[arg(long)]
    allow_unphysical: bool,
    /// Measured beam noise F; conditional variances then use 2G - G²/F.
    #[arg(long)]
    fano: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// `value` or `start:stop:count`.
    #[arg(long)]
    sigma: String,
    #[arg(long, default_value = "0")]
    omega: String,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Self-phase-locked state: `tilt,v1,v2` for the A- ellipse.
    #[arg(long)]
    coupled: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct CondPrepArgs {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    fano: Option<f64>,
    #[arg(long)]
    fano_idler: Option<f64>,
    #[arg(long)]
    gemellity: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    band_center: Option<f64>,
    #[arg(long)]
    band_halfwidth: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bands: Option<usize>,
    #[arg(long, value_enum)]
    window: Option<WindowArg>,
    /// Write the selected signal values (one per line) to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// `csv` prints the per-band table.
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Half,
    Full,
}

#[derive(Args)]
struct OptimizeArgs {
    input: PathBuf,
    /// Write the optimised matrix (same basis as the input) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include every objective evaluation in the output.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FixturesArgs {
    #[arg(long)]
    list: bool,
    #[arg(long, value_name = "DIR")]
    write: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::BadShape { .. }
            | Error::NonSymmetric { .. }
            | Error::Config(_)
            | Error::OutOfRange(_)
            | Error::BadCorrelation(_)
            | Error::BadEfficiency(_)
            | Error::UnphysicalBlock(_) => EXIT_INPUT,
            _ => EXIT_UNPHYSICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Criteria(a) => criteria_cmd(a),
        Command::OpoSweep(a) => sweep_cmd(a),
        Command::Condprep(a) => condprep_cmd(a),
        Command::Optimize(a) => optimize_cmd(a),
        Command::Fixtures(a) => fixtures_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("opo-cv: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_matrix(path: &Path) -> Result<(Vec<u8>, MatrixDocument, CovarianceMatrix), Failure> {
    let bytes = fs::read(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::input(format!("{}: not UTF-8", path.display())))?;
    let doc = MatrixDocument::parse(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let g = doc
        .to_covariance()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok((bytes, doc, g))
}

fn require_physical(g: &CovarianceMatrix, path: &Path) -> CliResult {
    let p = g.is_physical();
    if p.physical {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_UNPHYSICAL,
            message: format!(
                "{}: violates the uncertainty principle (smallest symplectic eigenvalue {} < 1)",
                path.display(),
                p.min_symplectic_eigenvalue
            ),
        })
    }
}

fn print_json(v: &impl serde::Serialize) -> CliResult {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::input(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn criteria_cmd(a: CriteriaArgs) -> CliResult {
    let (bytes, _, g) = load_matrix(&a.input)?;
    if !a.allow_unphysical {
        require_physical(&g, &a.input)?;
    }
    let report = ReportDocument::build(&bytes, &g, a.fano)?;
    match a.format {
        Format::Json => print_json(&report),
        Format::Csv => {
            let cols = report.columns();
            let mut w = csv::Writer::from_writer(io::stdout().lock());
            let io_err = |e: csv::Error| Failure::input(e.to_string());
            w.write_record(cols.iter().map(|(k, _)| *k))
                .map_err(io_err)?;
            w.write_record(cols.iter().map(|(_, v)| v.as_str()))
                .map_err(io_err)?;
            w.flush().map_err(|e| Failure::input(e.to_string()))
        }
    }
}

fn parse_range(spec: &str, name: &str) -> Result<Vec<f64>, Failure> {
    let bad = || {
        Failure::input(format!(
            "invalid {name} range {spec:?}: use VALUE or START:STOP:COUNT"
        ))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![v.trim().parse().map_err(|_| bad())?]),
        [start, stop, count] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
            let count: usize = count.trim().parse().map_err(|_| bad())?;
            if count < 2 || !start.is_finite() || !stop.is_finite() {
                return Err(bad());
            }
            // Interpolating from both ends keeps the endpoints exact.
            let last = (count - 1) as f64;
            Ok((0..count)
                .map(|k| {
                    let t = k as f64 / last;
                    start * (1.0 - t) + stop * t
                })
                .collect())
        }
        _ => Err(bad()),
    }
}

fn sweep_cmd(a: SweepArgs) -> CliResult {
    let sigmas = parse_range(&a.sigma, "sigma")?;
    let omegas = parse_range(&a.omega, "omega")?;
    let coupled = match &a.coupled {
        None => None,
        Some(s) => {
            let v: Vec<f64> = s
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::input(format!("invalid --coupled {s:?}: use TILT,V1,V2")))?;
            if v.len() != 3 {
                return Err(Failure::input(format!(
                    "invalid --coupled {s:?}: use TILT,V1,V2"
                )));
            }
            Some((v[0], v[1], v[2]))
        }
    };
    // Validate the whole grid before printing anything.
    let mut rows = Vec::with_capacity(sigmas.len() * omegas.len());
    for &sigma in &sigmas {
        for &omega in &omegas {
            let p = OpoParams::new(sigma, omega, a.eta)?;
            let g = match coupled {
                None => below_threshold_covariance(&p)?,
                Some((tilt, v1, v2)) => {
                    coupled_covariance(&CoupledStateParams::new(p, tilt, (v1, v2))?)?
                }
            };
            let sep = separability(&g).value;
            rows.push([
                sigma,
                omega,
                g.get(1, 1),
                g.get(0, 0),
                gemellity_from_covariance(&g, Quadrature::XDifference),
                sep,
                eof(sep)?,
                log_negativity(&g)?.e_n,
            ]);
        }
    }
    const HEADER: [&str; 8] = [
        "sigma",
        "omega",
        "v_sq",
        "v_anti",
        "gemellity",
        "separability",
        "eof_ebits",
        "log_negativity",
    ];
    match a.format {
        Format::Csv => write_csv(
            &HEADER,
            rows.iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect()),
        ),
        Format::Json => {
            let objects: Vec<_> = rows
                .iter()
                .map(|r| {
                    HEADER
                        .iter()
                        .zip(r)
                        .map(|(k, v)| (k.to_string(), json!(v)))
                        .collect::<serde_json::Map<_, _>>()
                })
                .collect();
            print_json(&objects)
        }
    }
}

fn write_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> CliResult {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    let io_err = |e: csv::Error| Failure::input(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::input(e.to_string()))
}

fn condprep_cmd(a: CondPrepArgs) -> CliResult {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<CondPrepConfig>(&text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        }
        None => CondPrepConfig::twin_beam_default(),
    };
    if let Some(f) = a.fano {
        cfg.fano_signal = f;
        if a.fano_idler.is_none() {
            cfg.fano_idler = f;
        }
    }
    if let Some(f) = a.fano_idler {
        cfg.fano_idler = f;
    }
    if let Some(g) = a.gemellity {
        cfg.gemellity = g;
    }
    if let Some(c) = a.band_center {
        cfg.band_center = c;
    }
    if let Some(w) = a.band_halfwidth {
        cfg.band_halfwidth = w;
    }
    if let Some(n) = a.samples {
        cfg.n_samples = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(b) = a.bands {
        cfg.n_bands = b;
    }
    if let Some(w) = a.window {
        cfg.window = match w {
            WindowArg::Half => Window::HalfWidth,
            WindowArg::Full => Window::FullWidth,
        };
    }
    cfg.validate()?;
    let result = condprep::run(&cfg)?;
    if let Some(path) = &a.dump {
        let pairs = condprep::sample_photocurrents(&cfg)?;
        let hw = cfg.effective_halfwidth();
        let mut out = String::new();
        for p in pairs
            .iter()
            .filter(|p| (p.idler - cfg.band_center).abs() <= hw)
        {
            out += &format!("{}\n", p.signal);
        }
        fs::write(path, out).map_err(|e| Failure {
            code: EXIT_WRITE,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
    }
    match a.format {
        Format::Json => print_json(&json!({ "config": cfg, "result": result })),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            write_csv(
                &["center", "halfwidth", "selected", "rate", "fano", "stderr"],
                result.per_band.iter().map(|b| {
                    vec![
                        b.center.to_string(),
                        b.halfwidth.to_string(),
                        b.selected.to_string(),
                        b.rate.to_string(),
                        opt(b.fano),
                        opt(b.stderr),
                    ]
                }),
            )
        }
    }
}

fn optimize_cmd(a: OptimizeArgs) -> CliResult {
    let (bytes, doc, g) = load_matrix(&a.input)?;
    require_physical(&g, &a.input)?;
    let out = optimize_nonlocal_phase(&g).map_err(|e| Failure {
        code: EXIT_UNPHYSICAL,
        message: e.to_string(),
    })?;
    let rows = |m: &CovarianceMatrix| m.entries().iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    let mut body = json!({
        "input_digest": report::digest(&bytes),
        "best_phase": out.best_phase,
        "e_n_before": out.e_n_before,
        "e_n_after": out.e_n_after,
        "e_n_max": out.e_n_max,
        "residual_gap": out.residual_gap(),
        "transform": { "kind": "phase_shift", "mode": "A-", "angle": out.best_phase },
        "state_plus_minus": rows(&out.state_plus_minus),
        "state_signal_idler": rows(&out.state_signal_idler),
        "evaluations": out.trace.len(),
    });
    if a.trace {
        body["trace"] = json!(out.trace);
    }
    if let Some(path) = &a.out {
        let state = out.state_plus_minus.in_basis(g.basis());
        let mut meta: BTreeMap<_, _> = doc.metadata.clone();
        meta.insert("optimized_phase_rad".into(), json!(out.best_phase));
        meta.insert("derived_from".into(), json!(report::digest(&bytes)));
        let text = MatrixDocument::from_covariance(&state, meta).to_canonical_string();
        fs::write(path, text).map_err(|e| Failure {
            code: EXIT_WRITE,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
    }
    print_json(&body)
}

fn fixtures_cmd(a: FixturesArgs) -> CliResult {
    let all = fixtures();
    if a.list {
        let mut stdout = io::stdout().lock();
        for f in &all {
            writeln!(stdout, "{}\t{}", f.name, f.description)
                .map_err(|e| Failure::input(e.to_string()))?;
        }
        return Ok(());
    }
    let dir = a.write.expect("clap enforces --list or --write");
    let unwritable = |e: io::Error| Failure {
        code: EXIT_WRITE,
        message: format!("cannot write to {}: {e}", dir.display()),
    };
    fs::create_dir_all(&dir).map_err(unwritable)?;
    for f in &all {
        fs::write(dir.join(f.name), &f.contents).map_err(unwritable)?;
        println!("{}", dir.join(f.name).display());
    }
    Ok(())
}
