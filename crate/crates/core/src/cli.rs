//! Command-line surface. Exit codes: 0 success, 1 invariant or run failure,
//! 2 configuration error, 3 I/O error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::criteria::probe::probe_constants;
use crate::criteria::{DiagnosticsAccumulator, EnvelopeCondition, MonitorOptions, C5};
use crate::error::{Error, Result};
use crate::flows::{abc_flow, taylor_green, RandomFieldSpec};
use crate::helical::{HelicalDecomposition, SpectralInterval};
use crate::io::csv::format_number;
use crate::io::{read_snapshot, write_diagnostics_csv, write_snapshot, RunConfig, ScheduleSpec};
use crate::solver::{simulate, SolverState};
use crate::spectral::GridSpec;
use crate::BOX_VOLUME;

#[derive(Debug, Parser)]
#[command(name = "beltrami", version, about = "Helical diagnostics for pseudo-spectral Navier–Stokes runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation; writes snapshots and diagnostics.csv into out_dir.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides out_dir from the config file.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Band energies and helical shell spectra of one snapshot.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated thresholds; `-inf` is allowed.
        #[arg(long, allow_hyphen_values = true)]
        bands: String,
        /// Defaults to the snapshot's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Recompute the diagnostics table from stored snapshots.
    Monitor {
        #[arg(long = "in")]
        input: PathBuf,
        /// const:<value>, neg_inf or table:<path>
        #[arg(long, default_value = "const:0", allow_hyphen_values = true)]
        a_schedule: String,
        /// `auto` (running max of energy) or a number.
        #[arg(long, default_value = "auto")]
        c5: String,
        /// Defaults to <in>/monitor.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical embedding constants over a random ensemble.
    Probe {
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        ensemble: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        slope: f64,
        #[arg(long, default_value_t = 0.5)]
        helicity_fraction: f64,
        #[arg(long, default_value_t = 1)]
        k_min: u32,
        #[arg(long, default_value_t = 4)]
        k_max: u32,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Verify,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::BadMagic { .. } | Error::SizeMismatch { .. } | Error::Parse(_) => 3,
        Error::Config(_)
        | Error::InvalidConfig(_)
        | Error::InvalidGrid(_)
        | Error::InvalidInterval { .. }
        | Error::EmptyShellRange { .. }
        | Error::InvalidC5 { .. }
        | Error::MissingProbeConstant => 2,
        _ => 1,
    }
}

pub fn dispatch<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Simulate { config, out_dir } => run_simulate(&config, out_dir),
        Command::Decompose { input, bands, out_dir } => run_decompose(&input, &bands, out_dir),
        Command::Monitor { input, a_schedule, c5, out } => run_monitor(&input, &a_schedule, &c5, out),
        Command::Probe { n, ensemble, seed, slope, helicity_fraction, k_min, k_max, out } => {
            let spec = RandomFieldSpec { slope, helicity_fraction, k_min, k_max, seed };
            run_probe(n, ensemble, &spec, out)
        }
        Command::Verify => return run_verify(),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn envelope_options(schedule: crate::criteria::Schedule, c5: C5) -> MonitorOptions {
    MonitorOptions { schedule, c5, c34: None, envelope: EnvelopeCondition::PositiveVorticity }
}

fn finish(acc: DiagnosticsAccumulator, grid: GridSpec, out: &Path) -> Result<()> {
    let (records, c1) = acc.finish(&[&abc_flow(grid, 1.0, 1.0, 1.0), &taylor_green(grid)])?;
    write_diagnostics_csv(out, &records)?;
    log::info!("probed c1_hat = {c1:.6e}; {} records", records.len());
    println!("{}", out.display());
    Ok(())
}

fn run_simulate(config: &Path, out_dir: Option<PathBuf>) -> Result<()> {
    let cfg = RunConfig::read(config)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let schedule = cfg.a_schedule.resolve(base)?;
    let out_dir = out_dir.unwrap_or_else(|| cfg.out_dir.clone());
    std::fs::create_dir_all(&out_dir)?;
    let v0 = cfg.initial_field()?;
    let grid = *v0.grid();
    let nu = cfg.nu;
    let mut acc = DiagnosticsAccumulator::new(envelope_options(schedule, C5::Auto));
    let mut writer = |step: usize, s: &SolverState| -> Result<()> { write_snapshot(&out_dir.join(format!("snap_{step:06}.bin")), s, nu) };
    let traj = simulate(&cfg.solver_config(), &v0, &mut [&mut writer, &mut acc])?;
    log::info!("reached t = {} after {} recorded states", traj.points.last().map_or(0.0, |p| p.t), traj.points.len());
    finish(acc, grid, &out_dir.join("diagnostics.csv"))
}

fn snapshot_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|s| s.to_str()).unwrap_or("");
            name.starts_with("snap_") && name.ends_with(".bin")
        })
        .collect();
    paths.sort();
    Ok(paths)
}

fn run_monitor(dir: &Path, schedule: &str, c5: &str, out: Option<PathBuf>) -> Result<()> {
    let schedule = ScheduleSpec::parse(schedule)?.resolve(Path::new("."))?;
    let c5 = match c5 {
        "auto" => C5::Auto,
        v => C5::Fixed(v.parse().map_err(|_| Error::Config(format!("--c5: expected auto or a number, got {v:?}")))?),
    };
    let paths = snapshot_paths(dir)?;
    if paths.is_empty() {
        return Err(Error::Config(format!("no snap_*.bin files in {}", dir.display())));
    }
    let mut acc = DiagnosticsAccumulator::new(envelope_options(schedule, c5));
    let mut grid = None;
    for p in &paths {
        let snap = read_snapshot(p)?;
        if snap.reprojected {
            log::warn!("{} was re-projected (residual {:.3e})", p.display(), snap.residual);
        }
        grid = Some(*snap.state.v.grid());
        acc.push(&snap.state)?;
    }
    let out = out.unwrap_or_else(|| dir.join("monitor.csv"));
    finish(acc, grid.expect("at least one snapshot"), &out)
}

fn run_decompose(input: &Path, bands: &str, out_dir: Option<PathBuf>) -> Result<()> {
    let thresholds = bands
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| crate::criteria::parse_value(s).map_err(|_| Error::Config(format!("--bands: bad threshold {s:?}"))))
        .collect::<Result<Vec<f64>>>()?;
    if thresholds.is_empty() || thresholds.iter().any(|a| a.is_nan() || *a == f64::INFINITY) {
        return Err(Error::Config("--bands needs at least one threshold below +inf".into()));
    }
    let snap = read_snapshot(input)?;
    let d = HelicalDecomposition::decompose(&snap.state.v)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("snapshot");
    let dir = out_dir.unwrap_or_else(|| input.parent().unwrap_or(Path::new(".")).to_path_buf());
    std::fs::create_dir_all(&dir)?;

    let mut s = String::from("a,energy_above,energy_at_or_below,grad_sq_above\n");
    for a in thresholds {
        let above = d.band(&SpectralInterval::above(a));
        let below = d.band(&SpectralInterval::at_most(a));
        let grad: f64 = BOX_VOLUME * above.modes().map(|m| m.abs_k * m.abs_k * (m.plus.norm_sqr() + m.minus.norm_sqr())).sum::<f64>();
        let _ = writeln!(s, "{},{},{},{}", format_number(a), format_number(above.energy()), format_number(below.energy()), format_number(grad));
    }
    let bands_path = dir.join(format!("{stem}_bands.csv"));
    std::fs::write(&bands_path, s)?;

    let mut shells: Vec<[f64; 3]> = Vec::new();
    for m in d.modes() {
        let shell = m.abs_k.round() as usize;
        if shells.len() <= shell {
            shells.resize(shell + 1, [0.0; 3]);
        }
        let (p, q) = (m.plus.norm_sqr(), m.minus.norm_sqr());
        shells[shell][0] += BOX_VOLUME * p;
        shells[shell][1] += BOX_VOLUME * q;
        shells[shell][2] += BOX_VOLUME * m.abs_k * (p - q);
    }
    let mut s = String::from("shell,energy_plus,energy_minus,helicity\n");
    for (k, e) in shells.iter().enumerate().skip(1) {
        let _ = writeln!(s, "{k},{},{},{}", format_number(e[0]), format_number(e[1]), format_number(e[2]));
    }
    let spectrum_path = dir.join(format!("{stem}_spectrum.csv"));
    std::fs::write(&spectrum_path, s)?;
    println!("{}\n{}", bands_path.display(), spectrum_path.display());
    Ok(())
}

fn run_probe(n: usize, size: usize, spec: &RandomFieldSpec, out: Option<PathBuf>) -> Result<()> {
    let grid = GridSpec::new(n).map_err(|e| Error::Config(e.to_string()))?;
    if size < 1 {
        return Err(Error::Config("--ensemble must be at least 1".into()));
    }
    let report = probe_constants(grid, spec, size)?;
    let text = report.to_key_values();
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_verify() -> i32 {
    let outcomes = crate::verify::run_suite();
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {} ({}) [{:.2}s]", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail, o.seconds);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    i32::from(failed > 0)
}
