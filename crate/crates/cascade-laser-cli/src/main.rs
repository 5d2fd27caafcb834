//! `cascade-laser`: closed-form observables, trajectory ensembles, the
//! number-basis oracle and figure-grade sweeps from one binary.
//!
//! Exit codes: 0 success, 1 io failure, 2 invalid input, 3 no steady state
//! in the requested region, 4 oracle not converged.

mod config;
mod render;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use cascade_laser::analytic::{steady_moments, steady_variance, transient_moments, Quadrature};
use cascade_laser::dynamics::sample_trajectories;
use cascade_laser::fock::{steady_state, steady_state_auto};
use cascade_laser::model::{check_threshold, compute_coefficients, LaserParams};
use cascade_laser::scan::{
    find_optimum, run_sweep, write_csv, AxisSpec, Objective, Observable, SearchAxis, SweepResult,
    SweepSpec,
};
use cascade_laser::ModelError;

use config::Settings;
use render::{emit, Field, Format, Report};

#[derive(Debug)]
enum CliError {
    Model(ModelError),
    Io(std::io::Error),
    Input(String),
    Unconverged(String),
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "{s}"),
            CliError::Unconverged(s) => write!(f, "{s}"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Model(e) => match e {
                ModelError::InvalidParam { .. }
                | ModelError::UnsupportedPhase { .. }
                | ModelError::InvalidSpec(_)
                | ModelError::StepSize { .. } => 2,
                ModelError::AboveThreshold { .. } | ModelError::EmptyFeasibleRegion { .. } => 3,
                ModelError::Unconverged { .. } => 4,
            },
            CliError::Io(_) => 1,
            CliError::Input(_) => 2,
            CliError::Unconverged(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cascade-laser",
    version,
    about = "Coherently driven three-level cascade laser: squeezing and photon statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adiabatic coefficient table and the stability report
    Coefficients(CommonArgs),
    /// Quadrature variances, at steady state or at a finite time
    Variance(VarianceArgs),
    /// Mean photon number, at steady state or at a finite time
    Photon(PhotonArgs),
    /// Trajectory ensemble compared against the closed-form moments
    Simulate(SimulateArgs),
    /// Number-basis steady state with deltas against the closed forms
    Oracle(OracleArgs),
    /// Evaluate an observable over a parameter grid
    Sweep(SweepArgs),
    /// Locate an optimum of an observable inside search bounds
    Optimize(OptimizeArgs),
    /// Describe the output layout, keys and exit codes
    Schema,
}

#[derive(Args)]
struct CommonArgs {
    /// Pump (gain) rate A, in units of the atomic decay rate
    #[arg(long = "A", value_name = "A")]
    gain_a: Option<f64>,
    /// Cavity damping rate kappa
    #[arg(long)]
    kappa: Option<f64>,
    /// Classical drive amplitude Omega
    #[arg(long)]
    omega: Option<f64>,
    /// Injected atomic population inversion eta, in [-1, 1]
    #[arg(long)]
    eta: Option<f64>,
    /// Phase of the injected atomic coherence (closed forms need 0)
    #[arg(long)]
    theta: Option<f64>,
    /// key=value or JSON config file; flags given here override it
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write output to this file instead of stdout; relative paths land
    /// under CASCADE_LASER_OUT_DIR when that is set
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VarianceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which quadrature to report
    #[arg(long, value_enum)]
    quadrature: Option<QuadArg>,
    /// Report the transient value at this time instead of the steady state
    #[arg(long, value_name = "T")]
    at_time: Option<f64>,
}

#[derive(Args)]
struct PhotonArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Report the transient value at this time instead of the steady state
    #[arg(long, value_name = "T")]
    at_time: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Ensemble size [default: 1000]
    #[arg(long)]
    n_traj: Option<usize>,
    /// Ensemble seed [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// End time [default: 30 / lambda_minus]
    #[arg(long)]
    t_final: Option<f64>,
    /// Time step [default: 0.01 / lambda_plus]
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Fock basis size; omitted, the basis is sized and grown automatically
    #[arg(long)]
    n_max: Option<usize>,
    /// Residual tolerance per unit time [default: 1e-9]
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sweep axis as name:min:max:count (repeat for a 2D grid)
    #[arg(long = "axis", value_name = "SPEC")]
    axes: Vec<String>,
    /// Observable: var_minus, var_plus or mean_photon [default: var_minus]
    #[arg(long)]
    observable: Option<String>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Search axis as name:min:max (repeat for a 2D search)
    #[arg(long = "axis", value_name = "SPEC")]
    axes: Vec<String>,
    /// Objective: minimize_var_minus or maximize_mean_photon
    /// [default: minimize_var_minus]
    #[arg(long)]
    objective: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuadArg {
    Plus,
    Minus,
    Both,
}

impl QuadArg {
    fn name(self) -> &'static str {
        match self {
            QuadArg::Plus => "plus",
            QuadArg::Minus => "minus",
            QuadArg::Both => "both",
        }
    }
}

const COMMON_KEYS: &[&str] = &["A", "kappa", "omega", "eta", "theta", "format"];

fn allowed_keys(extra: &[&'static str]) -> Vec<&'static str> {
    let mut keys = COMMON_KEYS.to_vec();
    keys.extend_from_slice(extra);
    keys
}

/// Everything shared by the subcommands once flags and config are merged.
struct RunConfig {
    subcommand: &'static str,
    params: LaserParams,
    format: Format,
    output: Option<PathBuf>,
    cfg: Settings,
}

impl RunConfig {
    fn resolve(
        subcommand: &'static str,
        common: &CommonArgs,
        extra_keys: &[&'static str],
    ) -> Result<Self, CliError> {
        let cfg = Settings::load(subcommand, common.config.as_deref(), &allowed_keys(extra_keys))?;
        let required = |flag: Option<f64>, key: &str| -> Result<f64, CliError> {
            match flag {
                Some(v) => Ok(v),
                None => cfg.f64(key)?.ok_or_else(|| {
                    CliError::Input(format!(
                        "missing required parameter {key} (--{key} or config)"
                    ))
                }),
            }
        };
        let gain_a = required(common.gain_a, "A")?;
        let kappa = required(common.kappa, "kappa")?;
        let omega = common.omega.or(cfg.f64("omega")?).unwrap_or(0.0);
        let eta = common.eta.or(cfg.f64("eta")?).unwrap_or(0.0);
        let theta = common.theta.or(cfg.f64("theta")?).unwrap_or(0.0);
        let params = LaserParams::with_theta(gain_a, kappa, omega, eta, theta)?;
        let format = match common.format {
            Some(f) => f.into(),
            None => match cfg.str("format") {
                Some("csv") | None => Format::Csv,
                Some("json") => Format::Json,
                Some(other) => {
                    return Err(CliError::Input(format!(
                        "config format = {other:?} is neither csv nor json"
                    )))
                }
            },
        };
        Ok(RunConfig {
            subcommand,
            params,
            format,
            output: common.output.clone(),
            cfg,
        })
    }

    fn provenance(&self) -> Vec<(String, Field)> {
        vec![
            ("subcommand".into(), Field::text(self.subcommand)),
            ("A".into(), Field::Num(self.params.gain_a)),
            ("kappa".into(), Field::Num(self.params.kappa)),
            ("omega".into(), Field::Num(self.params.omega)),
            ("eta".into(), Field::Num(self.params.eta)),
            ("theta".into(), Field::Num(self.params.theta)),
            ("format".into(), Field::text(self.format.name())),
        ]
    }

    fn emit_report(&self, report: &Report) -> Result<(), CliError> {
        emit(&report.render(self.format), self.output.as_deref())?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Coefficients(args) => cmd_coefficients(&args),
        Command::Variance(args) => cmd_variance(&args),
        Command::Photon(args) => cmd_photon(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Optimize(args) => cmd_optimize(&args),
        Command::Schema => cmd_schema(),
    }
}

fn cmd_coefficients(args: &CommonArgs) -> Result<(), CliError> {
    let rc = RunConfig::resolve("coefficients", args, &[])?;
    let k = compute_coefficients(&rc.params)?;
    let stability = check_threshold(&k);
    let results = vec![
        ("b".into(), Field::Num(k.b)),
        ("c".into(), Field::Num(k.c)),
        ("d".into(), Field::Num(k.d)),
        ("c_e".into(), Field::Num(k.c_e)),
        ("c_f".into(), Field::Num(k.c_f)),
        ("mu".into(), Field::Num(k.mu)),
        ("beta".into(), Field::Num(k.beta)),
        ("lambda_minus".into(), Field::Num(k.lambda_minus)),
        ("lambda_plus".into(), Field::Num(k.lambda_plus)),
        ("chi_plus".into(), Field::Num(k.chi_plus)),
        ("chi_minus".into(), Field::Num(k.chi_minus)),
        ("below_threshold".into(), Field::Bool(stability.below_threshold)),
        ("margin".into(), Field::Num(stability.margin)),
    ];
    rc.emit_report(&Report {
        provenance: rc.provenance(),
        results,
    })
}

fn moment_fields(
    m: &cascade_laser::analytic::QuadratureMoments,
    quad: QuadArg,
) -> Vec<(String, Field)> {
    let mut fields = Vec::new();
    if quad != QuadArg::Minus {
        fields.push(("alpha_sq_plus".into(), Field::Num(m.alpha_sq_plus)));
        fields.push(("var_plus".into(), Field::Num(m.var_plus)));
    }
    if quad != QuadArg::Plus {
        fields.push(("alpha_sq_minus".into(), Field::Num(m.alpha_sq_minus)));
        fields.push(("var_minus".into(), Field::Num(m.var_minus)));
    }
    if quad == QuadArg::Both {
        fields.push(("mean_photon".into(), Field::Num(m.mean_photon)));
    }
    fields
}

fn cmd_variance(args: &VarianceArgs) -> Result<(), CliError> {
    let rc = RunConfig::resolve("variance", &args.common, &["quadrature", "at_time"])?;
    let quad = match args.quadrature {
        Some(q) => q,
        None => match rc.cfg.str("quadrature") {
            None | Some("both") => QuadArg::Both,
            Some("plus") => QuadArg::Plus,
            Some("minus") => QuadArg::Minus,
            Some(other) => {
                return Err(CliError::Input(format!(
                    "config quadrature = {other:?} is not plus, minus or both"
                )))
            }
        },
    };
    let at_time = match args.at_time {
        Some(t) => Some(t),
        None => rc.cfg.f64("at_time")?,
    };

    let mut provenance = rc.provenance();
    provenance.push(("quadrature".into(), Field::text(quad.name())));
    let results = match at_time {
        Some(t) => {
            provenance.push(("at_time".into(), Field::Num(t)));
            let tm = transient_moments(&rc.params, t)?;
            let mut fields = moment_fields(&tm.moments, quad);
            fields.push(("convergent".into(), Field::Bool(tm.convergent)));
            fields
        }
        None => match quad {
            QuadArg::Both => moment_fields(&steady_moments(&rc.params)?, quad),
            QuadArg::Plus => vec![(
                "var_plus".into(),
                Field::Num(steady_variance(&rc.params, Quadrature::Plus)?),
            )],
            QuadArg::Minus => vec![(
                "var_minus".into(),
                Field::Num(steady_variance(&rc.params, Quadrature::Minus)?),
            )],
        },
    };
    rc.emit_report(&Report {
        provenance,
        results,
    })
}

fn cmd_photon(args: &PhotonArgs) -> Result<(), CliError> {
    let rc = RunConfig::resolve("photon", &args.common, &["at_time"])?;
    let at_time = match args.at_time {
        Some(t) => Some(t),
        None => rc.cfg.f64("at_time")?,
    };
    let mut provenance = rc.provenance();
    let results = match at_time {
        Some(t) => {
            provenance.push(("at_time".into(), Field::Num(t)));
            let tm = transient_moments(&rc.params, t)?;
            vec![
                ("mean_photon".into(), Field::Num(tm.moments.mean_photon)),
                ("convergent".into(), Field::Bool(tm.convergent)),
            ]
        }
        None => vec![(
            "mean_photon".into(),
            Field::Num(steady_moments(&rc.params)?.mean_photon),
        )],
    };
    rc.emit_report(&Report {
        provenance,
        results,
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let rc = RunConfig::resolve(
        "simulate",
        &args.common,
        &["n_traj", "seed", "t_final", "step"],
    )?;
    let n_traj = args.n_traj.or(rc.cfg.usize("n_traj")?).unwrap_or(1000);
    let seed = args.seed.or(rc.cfg.u64("seed")?).unwrap_or(42);
    let mut t_final = args.t_final.or(rc.cfg.f64("t_final")?);
    let mut step = args.step.or(rc.cfg.f64("step")?);
    if t_final.is_none() || step.is_none() {
        // Defaults scale with the slowest and fastest decay, so they only
        // exist below threshold; an explicit pair bypasses this.
        let k = compute_coefficients(&rc.params)?;
        if k.lambda_minus <= 0.0 {
            return Err(ModelError::AboveThreshold {
                rate_name: "lambda_minus",
                rate: k.lambda_minus,
                gain_a: rc.params.gain_a,
            }
            .into());
        }
        t_final = t_final.or(Some(30.0 / k.lambda_minus));
        step = step.or(Some(0.01 / k.lambda_plus));
    }
    let (t_final, step) = (t_final.unwrap(), step.unwrap());

    let stats = sample_trajectories(&rc.params, n_traj, t_final, step, seed)?;
    let reference = transient_moments(&rc.params, t_final)?.moments;
    let z = |est: cascade_laser::dynamics::Estimate, target: f64| {
        if est.std_err > 0.0 {
            (est.value - target) / est.std_err
        } else {
            0.0
        }
    };

    let mut provenance = rc.provenance();
    provenance.push(("n_traj".into(), Field::Int(n_traj as u64)));
    provenance.push(("seed".into(), Field::Int(seed)));
    provenance.push(("t_final".into(), Field::Num(t_final)));
    provenance.push(("step".into(), Field::Num(step)));

    let results = vec![
        ("realized_step".into(), Field::Num(stats.step)),
        ("alpha_sq_plus".into(), Field::Num(stats.alpha_sq_plus.value)),
        ("alpha_sq_plus_err".into(), Field::Num(stats.alpha_sq_plus.std_err)),
        ("alpha_sq_minus".into(), Field::Num(stats.alpha_sq_minus.value)),
        ("alpha_sq_minus_err".into(), Field::Num(stats.alpha_sq_minus.std_err)),
        ("mean_plus_re".into(), Field::Num(stats.mean_plus.re.value)),
        ("mean_plus_re_err".into(), Field::Num(stats.mean_plus.re.std_err)),
        ("mean_plus_im".into(), Field::Num(stats.mean_plus.im.value)),
        ("mean_plus_im_err".into(), Field::Num(stats.mean_plus.im.std_err)),
        ("mean_minus_re".into(), Field::Num(stats.mean_minus.re.value)),
        ("mean_minus_re_err".into(), Field::Num(stats.mean_minus.re.std_err)),
        ("mean_minus_im".into(), Field::Num(stats.mean_minus.im.value)),
        ("mean_minus_im_err".into(), Field::Num(stats.mean_minus.im.std_err)),
        ("analytic_alpha_sq_plus".into(), Field::Num(reference.alpha_sq_plus)),
        ("analytic_alpha_sq_minus".into(), Field::Num(reference.alpha_sq_minus)),
        ("z_alpha_sq_plus".into(), Field::Num(z(stats.alpha_sq_plus, reference.alpha_sq_plus))),
        ("z_alpha_sq_minus".into(), Field::Num(z(stats.alpha_sq_minus, reference.alpha_sq_minus))),
    ];
    rc.emit_report(&Report {
        provenance,
        results,
    })
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let rc = RunConfig::resolve("oracle", &args.common, &["n_max", "tol"])?;
    let tol = args.tol.or(rc.cfg.f64("tol")?).unwrap_or(1e-9);
    let n_max = args.n_max.or(rc.cfg.usize("n_max")?);
    let r = match n_max {
        Some(n) => steady_state(&rc.params, n, tol)?,
        None => steady_state_auto(&rc.params, tol)?,
    };

    let mut provenance = rc.provenance();
    provenance.push(("n_max".into(), Field::Int(r.n_max as u64)));
    provenance.push(("tol".into(), Field::Num(tol)));

    let m = r.moments;
    let mut results = vec![
        ("t_reached".into(), Field::Num(r.t_reached)),
        ("tail_population".into(), Field::Num(r.tail_population)),
        ("converged".into(), Field::Bool(r.converged)),
        ("alpha_sq_plus".into(), Field::Num(m.alpha_sq_plus)),
        ("alpha_sq_minus".into(), Field::Num(m.alpha_sq_minus)),
        ("var_plus".into(), Field::Num(m.var_plus)),
        ("var_minus".into(), Field::Num(m.var_minus)),
        ("mean_photon".into(), Field::Num(m.mean_photon)),
    ];
    // The closed forms only exist for a real injected coherence; deltas
    // are omitted otherwise rather than faked.
    if rc.params.theta == 0.0 {
        let a = steady_moments(&rc.params)?;
        results.push(("delta_var_plus".into(), Field::Num(m.var_plus - a.var_plus)));
        results.push(("delta_var_minus".into(), Field::Num(m.var_minus - a.var_minus)));
        results.push((
            "delta_mean_photon".into(),
            Field::Num(m.mean_photon - a.mean_photon),
        ));
    }
    rc.emit_report(&Report {
        provenance,
        results,
    })?;
    if !r.converged {
        return Err(CliError::Unconverged(format!(
            "basis n_max = {} left tail population {:.3e}; grow the basis",
            r.n_max, r.tail_population
        )));
    }
    Ok(())
}

fn sweep_provenance_json(result: &SweepResult, format: Format) -> Value {
    let mut prov = Map::new();
    prov.insert("subcommand".into(), Value::from("sweep"));
    prov.insert("format".into(), Value::from(format.name()));
    for line in result.header_lines() {
        let (key, value) = line.split_once(" = ").expect("header line shape");
        let json = match (key.starts_with("axis"), value.parse::<f64>()) {
            (false, Ok(x)) => serde_json::Number::from_f64(x)
                .map(Value::Number)
                .unwrap_or_else(|| Value::from(value)),
            _ => Value::from(value),
        };
        prov.insert(key.to_string(), json);
    }
    Value::Object(prov)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let rc = RunConfig::resolve("sweep", &args.common, &["observable", "axis1", "axis2"])?;
    let axes = resolve_axes::<AxisSpec>(&args.axes, &rc.cfg)?;
    let observable = match &args.observable {
        Some(s) => s.parse::<Observable>()?,
        None => match rc.cfg.str("observable") {
            Some(s) => s.parse()?,
            None => Observable::VarMinus,
        },
    };
    let spec = SweepSpec {
        base: rc.params,
        axes,
        observable,
        output: rc.output.as_ref().map(|p| p.display().to_string()),
    };
    let result = run_sweep(&spec)?;

    let text = match rc.format {
        Format::Csv => {
            let mut buf = Vec::new();
            use std::io::Write;
            writeln!(buf, "# subcommand = sweep")?;
            writeln!(buf, "# format = csv")?;
            write_csv(&result, &mut buf)?;
            String::from_utf8(buf).expect("csv is ascii")
        }
        Format::Json => {
            let inner = if result.grids.len() == 2 {
                result.grids[1].len()
            } else {
                1
            };
            let rows: Vec<Value> = result
                .values
                .iter()
                .enumerate()
                .map(|(idx, v)| {
                    let mut row = vec![Value::from(render::parse_back(result.grids[0][idx / inner]))];
                    if result.grids.len() == 2 {
                        row.push(Value::from(render::parse_back(result.grids[1][idx % inner])));
                    }
                    row.push(match v {
                        Some(x) => Value::from(render::parse_back(*x)),
                        None => Value::Null,
                    });
                    Value::Array(row)
                })
                .collect();
            let doc = json!({
                "provenance": sweep_provenance_json(&result, rc.format),
                "columns": result.column_names(),
                "rows": rows,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("static structure");
            text.push('\n');
            text
        }
    };
    emit(&text, rc.output.as_deref())?;
    Ok(())
}

fn resolve_axes<T: std::str::FromStr<Err = ModelError>>(
    flag_axes: &[String],
    cfg: &Settings,
) -> Result<Vec<T>, CliError> {
    let specs: Vec<String> = if flag_axes.is_empty() {
        ["axis1", "axis2"]
            .iter()
            .filter_map(|k| cfg.str(k).map(str::to_string))
            .collect()
    } else {
        flag_axes.to_vec()
    };
    if specs.is_empty() {
        return Err(CliError::Input(
            "no axis given (--axis or config axis1/axis2)".into(),
        ));
    }
    specs
        .iter()
        .map(|s| s.parse::<T>().map_err(CliError::from))
        .collect()
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<(), CliError> {
    let rc = RunConfig::resolve("optimize", &args.common, &["objective", "axis1", "axis2"])?;
    let axes = resolve_axes::<SearchAxis>(&args.axes, &rc.cfg)?;
    let objective = match &args.objective {
        Some(s) => s.parse::<Objective>()?,
        None => match rc.cfg.str("objective") {
            Some(s) => s.parse()?,
            None => Objective::MinimizeVarMinus,
        },
    };
    let opt = find_optimum(objective, &rc.params, &axes)?;

    let mut provenance = rc.provenance();
    provenance.push(("objective".into(), Field::text(objective.name())));
    for (i, a) in axes.iter().enumerate() {
        provenance.push((
            format!("axis{}", i + 1),
            Field::text(format!(
                "{}:{}:{}",
                a.axis.name(),
                cascade_laser::scan::format_sig(a.min),
                cascade_laser::scan::format_sig(a.max)
            )),
        ));
    }
    let results = vec![
        ("A".into(), Field::Num(opt.params.gain_a)),
        ("kappa".into(), Field::Num(opt.params.kappa)),
        ("omega".into(), Field::Num(opt.params.omega)),
        ("eta".into(), Field::Num(opt.params.eta)),
        ("value".into(), Field::Num(opt.value)),
    ];
    rc.emit_report(&Report {
        provenance,
        results,
    })
}

fn cmd_schema() -> Result<(), CliError> {
    let doc = json!({
        "schema_version": 1,
        "numbers": "12 significant digits, lowercase scientific notation",
        "csv": "lines '# key = value' carry provenance; scalar runs follow with 'name,value' rows, sweeps with named grid columns",
        "json": "object with 'provenance' and 'results' (sweeps: 'columns' and 'rows'; masked points are null)",
        "round_trip": "any emitted output, passed back via --config to the same subcommand, reproduces the run",
        "mask_token": "ABOVE_THRESHOLD",
        "exit_codes": {
            "0": "success",
            "1": "io failure",
            "2": "invalid input",
            "3": "no steady state in the requested region",
            "4": "oracle not converged",
        },
        "env": {
            "CASCADE_LASER_OUT_DIR": "base directory for relative --output paths",
        },
        "provenance_keys": {
            "common": ["subcommand", "A", "kappa", "omega", "eta", "theta", "format"],
            "variance": ["quadrature", "at_time (when transient)"],
            "photon": ["at_time (when transient)"],
            "simulate": ["n_traj", "seed", "t_final", "step"],
            "oracle": ["n_max", "tol"],
            "sweep": ["observable", "axis1", "axis2 (2D only)"],
            "optimize": ["objective", "axis1", "axis2 (2D only)"],
        },
        "result_keys": {
            "coefficients": ["b", "c", "d", "c_e", "c_f", "mu", "beta", "lambda_minus",
                             "lambda_plus", "chi_plus", "chi_minus", "below_threshold", "margin"],
            "variance": ["alpha_sq_plus", "var_plus", "alpha_sq_minus", "var_minus",
                         "mean_photon (both only)", "convergent (transient only)"],
            "photon": ["mean_photon", "convergent (transient only)"],
            "simulate": ["realized_step", "alpha_sq_plus(_err)", "alpha_sq_minus(_err)",
                         "mean_plus_re/im(_err)", "mean_minus_re/im(_err)",
                         "analytic_alpha_sq_plus", "analytic_alpha_sq_minus",
                         "z_alpha_sq_plus", "z_alpha_sq_minus"],
            "oracle": ["t_reached", "tail_population", "converged", "alpha_sq_plus",
                       "alpha_sq_minus", "var_plus", "var_minus", "mean_photon",
                       "delta_var_plus", "delta_var_minus", "delta_mean_photon (theta = 0 only)"],
            "sweep": ["axis columns then the observable; ABOVE_THRESHOLD marks masked points"],
            "optimize": ["A", "kappa", "omega", "eta", "value"],
        },
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("static structure");
    text.push('\n');
    emit(&text, None)?;
    Ok(())
}
