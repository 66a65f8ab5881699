//! Command-line driver. `run_cli` parses arguments, runs one experiment,
//! writes its artifacts and returns the process exit code.
//!
//! A `--config <path>` file holds `key = value` lines using the long flag
//! names. Its entries are placed ahead of the command-line flags, so flags
//! given explicitly take precedence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dnls_core::evolution::{evolve, SimConfig};
use dnls_core::gauge::dnls_residual;
use dnls_core::harness::svg::{line_plot, Axes, Series};
use dnls_core::harness::{
    conservation_experiment, conserve_csv, converge_csv, convergence_experiment, relative_drifts, simulate_csv,
    tail_csv, tail_experiment, Cell, ConservationRow, ConvergenceSetup, CsvRecord, Diagnostics, TailSetup,
};
use dnls_core::multiplier::{bound_ratio_scan, dispersive_identity_check, dmvt_ratio_scan, factorization_check};
use dnls_core::nonlinearity::{resonance_classify, ResonanceClass};
use dnls_core::spectral::random_state;
use dnls_core::{BoundCase, DnlsError, FrequencyQuad, MuMode, SpectralProfile, SpectralState};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dnls", version, about = "DNLS pseudospectral laboratory", args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MuChoice {
    /// `mu` fixed to the mean mass of the initial data.
    Constant,
    /// `mu[u](t)` recomputed at every stage.
    Instant,
}

#[derive(Debug, Args)]
struct Common {
    /// Spectral cutoff of the run.
    #[arg(long, global = true)]
    nmax: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    tend: Option<f64>,
    /// Amplitude of the power-law data profile.
    #[arg(long, global = true)]
    amp: Option<f64>,
    /// Decay exponent of the data profile, `|c_xi| = amp <xi>^-sigma`.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long = "mu-mode", value_enum, global = true)]
    mu_mode: Option<MuChoice>,
    /// Galerkin truncation `N <= nmax`.
    #[arg(long, global = true)]
    trunc: Option<usize>,
    /// Frames are recorded every `stride` steps.
    #[arg(long, global = true)]
    stride: Option<usize>,
    /// CSV output path; the table goes to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// `key = value` file with defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve seeded data and tabulate the conserved quantities and norms.
    Simulate(NormArgs),
    /// As `simulate`, with `H^s` tail norms for each `--tails` cutoff.
    Conserve {
        #[command(flatten)]
        norms: NormArgs,
        #[arg(long, value_delimiter = ',', default_value = "8,16")]
        tails: Vec<usize>,
    },
    /// Truncation error against a high-resolution reference.
    Converge(ConvergeArgs),
    /// High-frequency tails against the data tail.
    Tail(TailArgs),
    /// Exhaustive check of the integer identities.
    Identities {
        #[arg(long, default_value_t = 20)]
        radius: i64,
    },
    /// Bound-ratio and mean-value scans of the multiplier.
    Multiplier {
        #[arg(long, default_value_t = 32)]
        radius: i64,
        #[arg(long, default_value_t = 0.45)]
        s: f64,
        #[arg(long = "xi-max", default_value_t = 256)]
        xi_max: i64,
    },
    /// Residual of the gauge-transformed run for `dt`, `dt/2`, `dt/4`.
    GaugeCheck,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 0.3)]
    s1: f64,
    #[arg(long, default_value_t = 3.0)]
    p: f64,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[arg(long, default_value_t = 0.6)]
    s: f64,
    #[arg(long = "s-prime", default_value_t = 0.45)]
    s_prime: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 3.0)]
    p: f64,
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256")]
    levels: Vec<usize>,
    #[arg(long = "nref", default_value_t = 1024)]
    n_ref: usize,
}

#[derive(Debug, Args)]
struct TailArgs {
    #[arg(long, default_value_t = 0.45)]
    s: f64,
    #[arg(long, value_delimiter = ',', default_value = "64,128,256,512")]
    ns: Vec<usize>,
    #[arg(long = "c-grid", value_delimiter = ',', default_value = "0.25,0.5,1,2,4")]
    c_grid: Vec<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<DnlsError> for Failure {
    fn from(e: DnlsError) -> Self {
        match e {
            DnlsError::Divergence { .. } | DnlsError::Io(_) => Failure::Numerical(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

/// Runs the command line `args` (program name first) and returns the exit
/// code. The summary goes to `stdout`, diagnostics to `stderr`.
pub fn run_cli<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match splice_config(args) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(summary) => {
            let _ = writeln!(stdout, "{summary}");
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Numerical(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_NUMERICAL
        }
    }
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k == "config" {
            return Err(format!("config line {}: invalid key `{k}`", i + 1));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

const SUBCOMMANDS: [&str; 7] = ["simulate", "conserve", "converge", "tail", "identities", "multiplier", "gauge-check"];

/// Inserts the config entries as flags right after the subcommand name.
fn splice_config(args: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let entries = parse_config(&text)?;
    let Some(sub) = args.iter().skip(1).position(|a| SUBCOMMANDS.contains(&a.as_str())).map(|p| p + 1) else {
        return Ok(args);
    };
    let mut spliced: Vec<String> = args[..=sub].to_vec();
    for (k, v) in entries {
        spliced.push(format!("--{k}={v}"));
    }
    spliced.extend_from_slice(&args[sub + 1..]);
    Ok(spliced)
}

struct Run {
    n_max: usize,
    dt: f64,
    t_end: f64,
    profile: SpectralProfile,
    mu: Option<MuChoice>,
    trunc: Option<usize>,
    stride: usize,
}

impl Run {
    fn from_common(c: &Common, n_max: usize, t_end: f64, sigma: f64, amp: f64) -> Self {
        Run {
            n_max: c.nmax.unwrap_or(n_max),
            dt: c.dt.unwrap_or(1e-3),
            t_end: c.tend.unwrap_or(t_end),
            profile: SpectralProfile {
                sigma: c.sigma.unwrap_or(sigma),
                amplitude: c.amp.unwrap_or(amp),
                seed: c.seed.unwrap_or(0),
            },
            mu: c.mu_mode,
            trunc: c.trunc,
            stride: c.stride.unwrap_or(10),
        }
    }

    fn data(&self) -> Result<SpectralState, Failure> {
        Ok(random_state(&self.profile, self.n_max)?)
    }

    fn config(&self, u0: &SpectralState, dt: f64) -> SimConfig {
        let mu_mode = match self.mu.unwrap_or(MuChoice::Constant) {
            MuChoice::Constant => MuMode::from_initial(u0),
            MuChoice::Instant => MuMode::Instantaneous,
        };
        let cfg = SimConfig::new(self.n_max, dt, self.t_end, mu_mode).with_stride(self.stride);
        match self.trunc {
            Some(n) => cfg.with_truncation(n),
            None => cfg,
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Simulate(norms) => {
            let (rows, run) = conservation_rows(c, norms, vec![])?;
            let rec = simulate_csv(&run_id(&run), &rows)?;
            emit(c, &rec, stdout)?;
            write_svg(c, || drift_plot(&rows))?;
            Ok(drift_summary("simulate", &rows))
        }
        Command::Conserve { norms, tails } => {
            let (rows, run) = conservation_rows(c, norms, tails.clone())?;
            let rec = conserve_csv(&run_id(&run), &rows, tails)?;
            emit(c, &rec, stdout)?;
            write_svg(c, || drift_plot(&rows))?;
            Ok(drift_summary("conserve", &rows))
        }
        Command::Converge(a) => converge(c, a, stdout),
        Command::Tail(a) => tail(c, a, stdout),
        Command::Identities { radius } => identities(*radius),
        Command::Multiplier { radius, s, xi_max } => multiplier(c, *radius, *s, *xi_max, stdout),
        Command::GaugeCheck => gauge_check(c, stdout),
    }
}

fn run_id(run: &Run) -> String {
    format!("seed{}_n{}", run.profile.seed, run.n_max)
}

fn conservation_rows(c: &Common, norms: &NormArgs, tails: Vec<usize>) -> Result<(Vec<ConservationRow>, Run), Failure> {
    let run = Run::from_common(c, 64, 0.5, 1.1, 0.1);
    let u0 = run.data()?;
    let cfg = run.config(&u0, run.dt);
    let diag = Diagnostics { s: norms.s, s1: norms.s1, p: norms.p, tail_ns: tails };
    let rows = conservation_experiment(&u0, &cfg, &diag)?;
    Ok((rows, run))
}

fn drift_summary(name: &str, rows: &[ConservationRow]) -> String {
    let [m, e, p] = relative_drifts(rows);
    format!(
        "{name}: frames={} t_end={} drift_mass={m:.3e} drift_energy={e:.3e} drift_momentum={p:.3e}",
        rows.len(),
        rows.last().map_or(0.0, |r| r.t)
    )
}

fn drift_plot(rows: &[ConservationRow]) -> String {
    let first = &rows[0];
    let rel = |f: fn(&ConservationRow) -> f64| -> Vec<(f64, f64)> {
        let q0 = f(first);
        rows.iter()
            .skip(1)
            .map(|r| (r.t, if q0 == 0.0 { (f(r) - q0).abs() } else { ((f(r) - q0) / q0).abs() }))
            .collect()
    };
    let series = [
        Series { name: "mass".into(), points: rel(|r| r.mass) },
        Series { name: "energy".into(), points: rel(|r| r.energy) },
        Series { name: "momentum".into(), points: rel(|r| r.momentum) },
    ];
    line_plot("Relative drift", "t", "|q(t) - q(0)| / |q(0)|", &series, Axes { log_x: false, log_y: true })
}

fn emit(c: &Common, rec: &CsvRecord, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &c.out {
        Some(path) => rec.write(path).map_err(Failure::from),
        None => write!(stdout, "{}", rec.render()).map_err(|e| Failure::Numerical(e.to_string())),
    }
}

fn write_svg(c: &Common, render: impl FnOnce() -> String) -> Result<(), Failure> {
    if let Some(path) = &c.svg {
        write_file(path, &render())?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Numerical(format!("cannot write {}: {e}", path.display())))
}

fn converge(c: &Common, a: &ConvergeArgs, stdout: &mut dyn Write) -> Outcome {
    let sigma = c.sigma.unwrap_or(a.s + 0.5 + a.delta);
    let run = Run::from_common(c, a.n_ref, 0.1, sigma, 0.1);
    let s1 = sigma - 1.0 / a.p - a.delta;
    let setup = ConvergenceSetup {
        profile: run.profile,
        s: a.s,
        s_prime: a.s_prime,
        s1,
        s1_prime: s1 - (a.s - a.s_prime),
        p: a.p,
        levels: a.levels.clone(),
        n_ref: run.n_max,
        t_end: run.t_end,
        dt: run.dt,
        record_stride: run.stride,
        band_limit: None,
    };
    let rep = convergence_experiment(&setup)?;
    emit(c, &converge_csv(&rep)?, stdout)?;
    write_svg(c, || {
        let pts = |f: fn(&dnls_core::harness::ConvergenceLevel) -> f64| rep.levels.iter().map(|l| (l.n as f64, f(l))).collect();
        let series = [
            Series { name: "err_hs".into(), points: pts(|l| l.err_hs) },
            Series { name: "err_fl".into(), points: pts(|l| l.err_fl) },
            Series { name: "data_tail".into(), points: rep.levels.iter().map(|l| l.n as f64).zip(rep.data_tails.iter().copied()).collect() },
        ];
        line_plot("Truncation error", "N", "error", &series, Axes { log_x: true, log_y: true })
    })?;
    let fmt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.4}"));
    Ok(format!(
        "converge: levels={} slope={} r2={} predicted={:.4} degenerate={} floor={:.3e}",
        rep.levels.len(),
        fmt(rep.fitted_slope),
        fmt(rep.fit_r2),
        rep.predicted_exponent,
        rep.degenerate,
        rep.reference_floor
    ))
}

fn tail(c: &Common, a: &TailArgs, stdout: &mut dyn Write) -> Outcome {
    let run = Run::from_common(c, 1024, 0.5, a.s + 0.55, 0.1);
    let setup = TailSetup {
        profile: run.profile,
        s: a.s,
        ns: a.ns.clone(),
        n_max: run.n_max,
        t_end: run.t_end,
        dt: run.dt,
        record_stride: run.stride,
        c_grid: a.c_grid.clone(),
        band_limit: None,
    };
    let rep = tail_experiment(&setup)?;
    emit(c, &tail_csv(&rep)?, stdout)?;
    write_svg(c, || {
        let n: Vec<f64> = rep.rows.iter().map(|r| r.n as f64).collect();
        let series = [
            Series { name: "sup_tail_hs".into(), points: n.iter().copied().zip(rep.rows.iter().map(|r| r.sup_tail_hs)).collect() },
            Series { name: "data_tail_hs".into(), points: n.iter().copied().zip(rep.data_tail_column()).collect() },
        ];
        line_plot("High-frequency tail", "N", "H^s tail", &series, Axes { log_x: true, log_y: true })
    })?;
    let env = rep
        .envelope
        .map_or("none".to_string(), |e| format!("C={} eps={:.4}", e.c, e.epsilon));
    Ok(format!("tail: rows={} monotone={} envelope {env} l2={:.4}", rep.rows.len(), rep.is_monotone(), rep.initial_l2))
}

fn identities(radius: i64) -> Outcome {
    if !(1..=200).contains(&radius) {
        return Err(Failure::Usage(format!("radius must lie in 1..=200, got {radius}")));
    }
    let (mut total, mut fact, mut disp, mut class) = (0u64, 0u64, 0u64, 0u64);
    for x1 in -radius..=radius {
        for x2 in -radius..=radius {
            for x3 in -radius..=radius {
                total += 1;
                fact += u64::from(factorization_check(x1, x2, x3));
                let t = 0.5 * (x1 - x2) as f64;
                disp += u64::from(dispersive_identity_check(&FrequencyQuad::complete(x1, x2, x3), [t, -t, 0.0, 0.0])?);
                let xi = x1 + x2 + x3;
                let nonres = resonance_classify(x1, x2, x3, xi)? == ResonanceClass::Nonresonant;
                class += u64::from(nonres == ((x1 - xi) * (x3 - xi) != 0));
            }
        }
    }
    let summary = format!(
        "identities: radius={radius} factorization={fact}/{total} dispersive={disp}/{total} resonance={class}/{total}"
    );
    if fact == total && disp == total && class == total {
        Ok(summary)
    } else {
        Err(Failure::Numerical(summary))
    }
}

fn multiplier(c: &Common, radius: i64, s: f64, xi_max: i64, stdout: &mut dyn Write) -> Outcome {
    let scan = bound_ratio_scan(radius, s)?;
    let dmvt = dmvt_ratio_scan(s, xi_max)?;
    let mut rec = CsvRecord::new(&["case", "count", "max_ratio"]);
    for case in BoundCase::BOUNDED {
        let st = scan.case(case);
        rec.push(vec![Cell::Text(case.label().into()), Cell::Int(st.count as i64), Cell::Float(st.max_ratio)])?;
    }
    rec.push(vec![Cell::Text("dmvt".into()), Cell::Int(dmvt.count as i64), Cell::Float(dmvt.max_ratio)])?;
    emit(c, &rec, stdout)?;
    let cases: Vec<String> = BoundCase::BOUNDED
        .iter()
        .map(|&k| format!("{}={:.4}", k.label(), scan.case(k).max_ratio))
        .collect();
    Ok(format!(
        "multiplier: radius={radius} s={s} {} excluded={}/{} dmvt={:.4}",
        cases.join(" "),
        scan.excluded,
        scan.total,
        dmvt.max_ratio
    ))
}

fn gauge_check(c: &Common, stdout: &mut dyn Write) -> Outcome {
    let run = Run::from_common(c, 16, 0.01, 1.0, 0.1);
    let u0 = run.data()?;
    let mut rec = CsvRecord::new(&["dt", "max_residual"]);
    let mut residuals = Vec::new();
    for k in 0..3 {
        let dt = run.dt / f64::from(1u32 << k);
        let cfg = run.config(&u0, dt).with_stride(1);
        let traj = evolve(&u0, &cfg)?;
        let r = dnls_residual(&traj, cfg.mu_mode)?.into_iter().fold(0.0, f64::max);
        rec.push(vec![Cell::Float(dt), Cell::Float(r)])?;
        residuals.push(r);
    }
    emit(c, &rec, stdout)?;
    let order = (residuals[1] / residuals[2]).log2();
    Ok(format!(
        "gauge-check: residual={:.3e},{:.3e},{:.3e} observed_order={order:.3}",
        residuals[0], residuals[1], residuals[2]
    ))
}
