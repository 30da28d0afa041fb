use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use twoel::harness::{self, scan, store, FamilyScan, ScanOptions, SolutionFile};
use twoel::helium::{self, HeliumSpec};
use twoel::hooke::{self, HookeSpec};
use twoel::metrics;
use twoel::state::PairGrid;
use twoel::{Error, Execution, Family, Result, SystemRecord};

mod config;
use config::Config;

#[derive(Parser)]
#[command(
    name = "twoel",
    version,
    about = "Two-electron systems, exact Kohn-Sham inversion and metric-space distances"
)]
struct Cli {
    /// key=value file supplying defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one system and write a solution file
    Solve {
        #[command(subcommand)]
        system: SolveCmd,
    },
    /// Invert a stored solution to its Kohn-Sham system
    InvertKs {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distances between two stored solutions
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        gauge_c: Option<f64>,
        /// use the Kohn-Sham block of --a
        #[arg(long)]
        a_ks: bool,
        #[arg(long)]
        b_ks: bool,
    },
    /// Scan a family against a reference parameter
    Scan {
        #[arg(long)]
        family: Option<Family>,
        /// comma-separated parameters; log-spaced defaults when absent
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        reference: Option<f64>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// default parameters over the whole supported window
        #[arg(long)]
        full: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// run without the thread pool
        #[arg(long)]
        serial: bool,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        omega_basis: Option<usize>,
        /// parameter whose energy joins the gauge set, or "none"
        #[arg(long)]
        gauge_anchor: Option<String>,
    },
    /// Emit a figure's CSV and SVG from scan directories
    Figure {
        which: Fig,
        #[arg(long, required = true)]
        scan: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    Hooke {
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Helium {
        #[arg(long)]
        z: Option<f64>,
        #[arg(long)]
        omega_basis: Option<usize>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fig {
    Fig1,
    Fig2,
    Fig3,
}

const SCAN_FILE: &str = "scan.json";

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn solve(cmd: SolveCmd, cfg: &Config) -> Result<()> {
    let (rec, out) = match cmd {
        SolveCmd::Hooke { omega, lambda, grid_n, out } => {
            let spec = HookeSpec::new(cfg.require(omega, "omega")?, cfg.pick(lambda, "lambda")?.unwrap_or(1.0))?;
            let n = cfg.pick(grid_n, "grid-n")?.unwrap_or(hooke::DEFAULT_GRID_N);
            let s = hooke::assemble_solution(&spec, n, Execution::Parallel)?;
            (SystemRecord::from_hooke(&s), cfg.require(out, "out")?)
        }
        SolveCmd::Helium { z, omega_basis, lambda, out } => {
            let spec = HeliumSpec::new(
                cfg.require(z, "z")?,
                cfg.require(omega_basis, "omega-basis")?,
                cfg.pick(lambda, "lambda")?.unwrap_or(1.0),
            )?;
            let s = helium::solve(&spec, Execution::Parallel)?;
            for w in &s.warnings {
                log::warn!("{w}");
            }
            (SystemRecord::from_helium(&s), cfg.require(out, "out")?)
        }
    };
    let file = SolutionFile::from_record(&rec)?;
    write(&out, &file.to_json()?)?;
    println!("e_total {} ionization {}", rec.e_total, rec.ionization);
    Ok(())
}

fn invert(input: &Path, out: &Path) -> Result<()> {
    let file = store::load(input)?;
    let rec = file.record()?;
    let (ks, _) = rec.invert()?;
    let rt = twoel::ksinv::round_trip(&ks)?;
    write(out, &file.with_ks(&ks).to_json()?)?;
    println!("eps_ks {} round_trip_eps {} overlap {}", ks.eps_ks, rt.eps, rt.overlap);
    Ok(())
}

fn pick_record(path: &Path, ks: bool) -> Result<SystemRecord> {
    let file = store::load(path)?;
    let mb = file.record()?;
    if !ks {
        return Ok(mb);
    }
    match file.ks_record(&mb)? {
        Some((_, r)) => Ok(r),
        None => Err(Error::Contract(format!("{} has no Kohn-Sham block; run invert-ks first", path.display()))),
    }
}

fn distance(a: &Path, b: &Path, gauge_c: Option<f64>, a_ks: bool, b_ks: bool) -> Result<()> {
    let (ra, rb) = (pick_record(a, a_ks)?, pick_record(b, b_ks)?);
    let energies = [ra.e_total, rb.e_total];
    let gauge = match gauge_c {
        Some(c) => metrics::gauge_fixed(c, &energies)?,
        None => metrics::gauge_constant_eigen(&energies)?,
    };
    let grid = PairGrid::covering([&ra.state, &rb.state])?;
    let report = metrics::compare(&ra, &rb, &gauge, &grid, Execution::Parallel)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Schema(e.to_string()))?;
    println!("{json}");
    Ok(())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Contract(format!("bad parameter '{t}': {e}"))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_scan(
    family: Family,
    params: Option<String>,
    reference: Option<f64>,
    out_dir: &Path,
    full: bool,
    serial: bool,
    lambda: Option<f64>,
    omega_basis: Option<usize>,
    anchor: Option<String>,
) -> Result<()> {
    let mut opts = ScanOptions::for_family(family);
    opts.exec = if serial { Execution::Serial } else { Execution::Parallel };
    if let Some(l) = lambda {
        opts.lambda = l;
    }
    if let Some(o) = omega_basis {
        opts.omega_basis = o;
    }
    match anchor.as_deref() {
        None => {}
        Some("none") => opts.gauge_anchor = None,
        Some(a) => {
            opts.gauge_anchor = Some(a.parse().map_err(|e| Error::Contract(format!("bad gauge anchor '{a}': {e}")))?)
        }
    }
    let scan = match params {
        None => {
            let mut s = scan::scan_default(family, full, &opts)?;
            if let Some(r) = reference {
                if r != s.reference {
                    s = scan::scan_family(family, &scan::default_params(family, full).0, r, &opts)?;
                }
            }
            s
        }
        Some(list) => {
            let ps = parse_list(&list)?;
            let r = reference.unwrap_or(scan::desk_range(family).2);
            scan::scan_family(family, &ps, r, &opts)?
        }
    };
    write(&out_dir.join(SCAN_FILE), &scan.to_json()?)?;
    println!("{} members, {} failed, gauge {}", scan.rows.len(), scan.failed_count(), scan.gauge.describe());
    Ok(())
}

fn load_scan(dir: &Path) -> Result<FamilyScan> {
    let path = if dir.is_dir() { dir.join(SCAN_FILE) } else { dir.to_path_buf() };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    FamilyScan::from_json(&text, &path.display().to_string())
}

fn figure(which: Fig, dirs: &[PathBuf], out: &Path) -> Result<()> {
    let scans: Vec<FamilyScan> = dirs.iter().map(|d| load_scan(d)).collect::<Result<_>>()?;
    let fig = match which {
        Fig::Fig1 | Fig::Fig3 if scans.len() != 1 => {
            return Err(Error::Contract("fig1 and fig3 take exactly one --scan".into()));
        }
        Fig::Fig1 => harness::emit_fig1(&scans[0])?,
        Fig::Fig2 => harness::emit_fig2(&scans)?,
        Fig::Fig3 => harness::emit_fig3(&scans[0])?,
    };
    let prefix = out.display().to_string();
    write(Path::new(&format!("{prefix}.csv")), &fig.csv)?;
    write(Path::new(&format!("{prefix}.svg")), &fig.svg)?;
    info!("wrote {prefix}.csv and {prefix}.svg");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.cmd {
        Cmd::Solve { system } => solve(system, &cfg),
        Cmd::InvertKs { input, out } => invert(&input, &out),
        Cmd::Distance { a, b, gauge_c, a_ks, b_ks } => distance(&a, &b, cfg.pick(gauge_c, "gauge-c")?, a_ks, b_ks),
        Cmd::Scan { family, params, reference, out_dir, full, threads, serial, lambda, omega_basis, gauge_anchor } => {
            let family = cfg.require(family, "family")?;
            let out_dir = cfg.require(out_dir, "out-dir")?;
            let threads = cfg.pick(threads, "threads")?;
            let go = || {
                run_scan(
                    family,
                    cfg.pick(params.clone(), "params")?,
                    cfg.pick(reference, "reference")?,
                    &out_dir,
                    cfg.flag(full, "full")?,
                    cfg.flag(serial, "serial")?,
                    cfg.pick(lambda, "lambda")?,
                    cfg.pick(omega_basis, "omega-basis")?,
                    cfg.pick(gauge_anchor.clone(), "gauge-anchor")?,
                )
            };
            with_threads(threads, go)
        }
        Cmd::Figure { which, scan, out } => figure(which, &scan, &out),
    }
}

#[cfg(feature = "parallel")]
fn with_threads(threads: Option<usize>, f: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    match threads {
        None => f(),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
            pool.install(f)
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads(_threads: Option<usize>, f: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    f()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
