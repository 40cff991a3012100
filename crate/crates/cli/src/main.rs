use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use susy_spectra::darboux::{self, PrepareOptions};
use susy_spectra::parse::{parse_complex, parse_rect, Rect};
use susy_spectra::potentials::{Potential, PotentialSpec};
use susy_spectra::schrodinger::{self, uniform_grid, SolverOptions};
use susy_spectra::spectral::{self, SpectralOptions};
use susy_spectra::verify::{self, ExampleReport};
use susy_spectra::{Complex64, Error};

const THREADS_VAR: &str = "SUSY_SPECTRA_THREADS";

#[derive(Parser)]
#[command(name = "susy-spectra", version, about = "Jost functions, spectral singularities and Darboux transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Jost function A(s).
    Jost {
        potential: PathBuf,
        /// Spectral parameter, e.g. "1+0i".
        #[arg(allow_hyphen_values = true)]
        s: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Locate spectral singularities and bound states.
    Spectrum {
        potential: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        kmin: f64,
        #[arg(long, default_value_t = 5.0)]
        kmax: f64,
        /// Contour "re0,re1,im0,im1"; defaults to a box holding every bound state.
        #[arg(long, allow_hyphen_values = true)]
        rect: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Apply a chain of Darboux steps and sample the result.
    Transform {
        potential: PathBuf,
        steps: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the worked examples against their closed forms.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["1", "2", "3", "all"])]
        example: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    /// Relative integration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Absolute integration tolerance.
    #[arg(long)]
    atol: Option<f64>,
    /// |A| at which a Newton iterate is accepted as a zero.
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    nodeless_threshold: Option<f64>,
    /// Right end of sampled grids.
    #[arg(long, default_value_t = 25.0)]
    xmax: f64,
    /// Grid points for samples, or scan points for `spectrum`.
    #[arg(long, default_value_t = 2000)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path; stdout when absent. `transform` treats it as a prefix.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Every knob that influenced a run, echoed into the output.
#[derive(Serialize)]
struct RunConfig {
    solver: SolverOptions,
    residual_tol: f64,
    nodeless_threshold: f64,
    x_max: f64,
    points: usize,
    format: Format,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_degenerate() {
            5
        } else if e.is_numerical() || matches!(e.root(), Error::InconclusiveFit(_)) {
            3
        } else if matches!(e.root(), Error::Inconsistent(_)) {
            4
        } else {
            2
        };
        let message = match e.root() {
            Error::Degenerate { x, .. } => format!("{e} (node near x = {x})"),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

type Outcome = Result<u8, Failure>;

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Failure> {
        let mut solver = SolverOptions::default();
        if let Some(t) = self.tol {
            solver.ode.rtol = t;
        }
        if let Some(t) = self.atol {
            solver.ode.atol = t;
        }
        let cfg = RunConfig {
            solver,
            residual_tol: self.residual_tol.unwrap_or(SpectralOptions::default().residual_tol),
            nodeless_threshold: self.nodeless_threshold.unwrap_or(PrepareOptions::default().nodeless_threshold),
            x_max: self.xmax,
            points: self.points,
            format: self.format,
        };
        let positive = [cfg.solver.ode.rtol, cfg.solver.ode.atol, cfg.residual_tol, cfg.nodeless_threshold, cfg.x_max];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Failure::usage("tolerances and --xmax must be positive"));
        }
        if cfg.points < 16 {
            return Err(Failure::usage("--points must be at least 16"));
        }
        Ok(cfg)
    }
}

impl RunConfig {
    fn prepare(&self) -> PrepareOptions {
        PrepareOptions { solver: self.solver, nodeless_threshold: self.nodeless_threshold, ..PrepareOptions::default() }
    }

    fn spectral(&self) -> SpectralOptions {
        SpectralOptions { solver: self.solver, residual_tol: self.residual_tol, ..SpectralOptions::default() }
    }

    fn grid(&self, pot: &Potential) -> Vec<f64> {
        let lo = if pot.is_singular() { 1e-3 / pot.scale() } else { 0.0 };
        uniform_grid(lo, self.x_max, self.points)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<PotentialSpec, Failure> {
    PotentialSpec::from_json(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure { code: 3, message: e.to_string() })
        }
    }
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn cmd_jost(path: &Path, s: &str, run: &RunArgs) -> Outcome {
    let cfg = run.config()?;
    let spec = load_spec(path)?;
    let s = parse_complex(s).map_err(|e| Failure::usage(e.to_string()))?;
    let pot = Potential::with_options(&spec, &cfg.prepare())?;
    let text = match cfg.format {
        Format::Json => {
            let ev = schrodinger::jost_function_with(&pot, s, &cfg.solver)?;
            pretty(&json!({
                "potential": spec.digest(),
                "s": ev.parameter.s,
                "A": ev.a,
                "x_max": ev.x_max,
                "tol": ev.tol_achieved,
                "config": cfg,
            }))
        }
        Format::Csv => schrodinger::jost_solution_with(&pot, s, &cfg.grid(&pot), &cfg.solver)?.to_csv(&spec),
    };
    emit(run.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_spectrum(path: &Path, kmin: f64, kmax: f64, rect: Option<&str>, run: &RunArgs) -> Outcome {
    let cfg = run.config()?;
    if !(kmin > 0.0 && kmax > kmin) {
        return Err(Failure::usage("need 0 < --kmin < --kmax"));
    }
    let spec = load_spec(path)?;
    let rect: Option<Rect> = rect.map(parse_rect).transpose().map_err(|e| Failure::usage(e.to_string()))?;
    let pot = Potential::with_options(&spec, &cfg.prepare())?;
    let rect = match rect {
        Some(r) => r,
        None => spectral::default_contour(&pot)?,
    };
    let report = spectral::classify_spectrum_with(&pot, (kmin, kmax), cfg.points, &rect, &cfg.spectral());
    let code = if !report.consistent || report.errors.iter().any(|e| matches!(e.error.root(), Error::Inconsistent(_))) {
        4
    } else if let Some(e) = report.errors.first() {
        Failure::from(e.error.clone()).code
    } else {
        0
    };
    for e in &report.errors {
        eprintln!("{} phase: {}", e.phase, e.message);
    }
    let text = match cfg.format {
        Format::Json => pretty(&json!({ "potential": spec.digest(), "report": report, "config": cfg })),
        Format::Csv => {
            let mut s = format!("# potential={}\nkind,re_s,im_s,re_e,im_e,residual\n", &spec.digest()[..16]);
            for p in report.bound_states.iter().chain(&report.singularities) {
                let kind = serde_json::to_value(p.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                s.push_str(&format!("{kind},{:e},{:e},{:e},{:e},{:e}\n", p.s.re, p.s.im, p.e.re, p.e.im, p.residual));
            }
            s
        }
    };
    emit(run.out.as_deref(), &text)?;
    if code == 4 {
        eprintln!("winding number and located zeros disagree");
    }
    Ok(code)
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn cmd_transform(path: &Path, steps: &Path, run: &RunArgs) -> Outcome {
    let cfg = run.config()?;
    let spec = load_spec(path)?;
    let chain = darboux::steps_from_json(&read(steps)?).map_err(|e| Failure::usage(format!("{}: {e}", steps.display())))?;
    let out = darboux::chain_transform_with(&spec, &chain, &cfg.prepare())?;
    let pot = Potential::with_options(&out, &cfg.prepare())?;
    let mut csv = format!("# potential={}\nx,re_v,im_v\n", &out.digest()[..16]);
    for x in cfg.grid(&pot) {
        let v = pot.eval(x)?;
        csv.push_str(&format!("{x:e},{:e},{:e}\n", v.re, v.im));
    }
    let doc = pretty(&json!({ "spec": out, "digest": out.digest(), "config": cfg }));
    match &run.out {
        Some(prefix) => {
            emit(Some(&with_extension(prefix, "json")), &doc)?;
            emit(Some(&with_extension(prefix, "csv")), &csv)?;
        }
        None => emit(None, if matches!(cfg.format, Format::Csv) { &csv } else { &doc })?,
    }
    Ok(0)
}

fn cmd_verify(which: &str, run: &RunArgs) -> Outcome {
    let cfg = run.config()?;
    let one = Complex64::new(1.0, 0.0);
    let reports: Vec<ExampleReport> = match which {
        "1" => vec![verify::run_example_1(one, 1.0)],
        "2" => vec![verify::run_example_2(1.0, None)],
        "3" => vec![verify::run_example_3(1.0, None)],
        _ => verify::run_all(),
    };
    let pass = reports.iter().all(|r| r.overall);
    let text = match cfg.format {
        Format::Json => pretty(&json!({ "reports": reports, "pass": pass })),
        Format::Csv => {
            let mut s = String::from("example,check,max_deviation,tolerance,pass\n");
            for r in &reports {
                for c in &r.checks {
                    s.push_str(&format!("{},\"{}\",{:e},{:e},{}\n", r.example_id, c.name, c.max_deviation, c.tolerance, c.pass));
                }
            }
            s
        }
    };
    emit(run.out.as_deref(), &text)?;
    Ok(if pass { 0 } else { 1 })
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Failure::usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Failure::usage(format!("{THREADS_VAR} must be positive")));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure { code: 3, message: e.to_string() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| match &cli.command {
        Command::Jost { potential, s, run } => cmd_jost(potential, s, run),
        Command::Spectrum { potential, kmin, kmax, rect, run } => cmd_spectrum(potential, *kmin, *kmax, rect.as_deref(), run),
        Command::Transform { potential, steps, run } => cmd_transform(potential, steps, run),
        Command::Verify { example, run } => cmd_verify(example, run),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
