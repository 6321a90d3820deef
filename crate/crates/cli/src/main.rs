mod render;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sensbound::mediation::{nde_rd_bounds, nie_rd_bounds};
use sensbound::simulation::{run_comparison_with_workers, SimConfig, Targets, CSV_HEADER};
use sensbound::{
    averaged_rr_bounds, bounds_grid, compare_methods, conditional_rr_bounds, e_value,
    feasible_region, mediation_feasible_region, mediation_observed_from_counts, nde_bounds,
    nde_witness, nie_bounds, observed_from_counts, rd_bounds, rd_witness, rr_bounds, rr_witness,
    CountTable, DvParams64, FeasibleRegion, Interval64, MediationObserved64, Observed,
    Observed64, Params64, Scale, StratifiedObserved, Target, WitnessReport, WitnessScale,
    WitnessSpec,
};

use render::{csv_line, ext, grid_table, kv_table, sig17, two_dp};

#[derive(Parser)]
#[command(name = "sensbound", version, about = "Sharp bounds on causal effects under unmeasured confounding")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, env = "SENSBOUND_FORMAT", default_value = "table")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScaleArg {
    Rr,
    Rd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessScaleArg {
    Rr,
    Rd,
    Nde,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Lower,
    Upper,
}

#[derive(Subcommand)]
enum Command {
    /// Two-parameter bounds on the causal risk ratio or risk difference.
    Bounds {
        #[command(flatten)]
        input: ObservedArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "rr")]
        scale: ScaleArg,
    },
    /// Risk-ratio bounds over an evenly spaced grid of the feasible region.
    Grid {
        #[command(flatten)]
        input: ObservedArgs,
        /// Grid points for M, from M* to 1.
        #[arg(long = "nM", default_value_t = 5)]
        n_max: usize,
        /// Grid points for m, from m* to 0.
        #[arg(long = "nm", default_value_t = 5)]
        n_min: usize,
        /// Also write the grid as CSV to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All methods side by side with their tightest combination.
    Compare {
        #[command(flatten)]
        input: ObservedArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "rr-ud", requires_all = ["rr_e0u", "rr_e1u"])]
        rr_ud: Option<f64>,
        #[arg(long = "rr-e0u", requires_all = ["rr_ud", "rr_e1u"])]
        rr_e0u: Option<f64>,
        #[arg(long = "rr-e1u", requires_all = ["rr_ud", "rr_e0u"])]
        rr_e1u: Option<f64>,
    },
    /// E-value of an observed risk ratio.
    Evalue {
        #[arg(long = "rr-obs")]
        rr_obs: f64,
    },
    /// Near-attaining witness distribution for one bound.
    Witness {
        #[command(flatten)]
        input: ObservedArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = sensbound::sharpness::DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "lower")]
        target: TargetArg,
        #[arg(long, value_enum, default_value = "rr")]
        scale: WitnessScaleArg,
        /// Mediation law as JSON, for `--scale nde`.
        #[arg(long, conflicts_with = "data")]
        mediation: Option<PathBuf>,
        /// Write the witness joint distribution as JSON to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Natural direct and indirect effect bounds.
    Mediate {
        /// Counts CSV with a `z` column, or `-` for stdin.
        #[arg(long, required_unless_present = "json", conflicts_with = "json")]
        data: Option<String>,
        /// Mediation law as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "rr")]
        scale: ScaleArg,
    },
    /// Monte Carlo comparison over logistic generative models.
    Simulate {
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        pu: f64,
        #[arg(long)]
        pe: f64,
        #[arg(long)]
        pd: f64,
        #[arg(long, default_value_t = 1000)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative inflation of the true sensitivity parameters.
        #[arg(long, default_value_t = 0.0)]
        conservative: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Args)]
struct ObservedArgs {
    /// Counts CSV with columns e, d, count (and optionally c), or `-` for stdin.
    #[arg(long, conflicts_with_all = ["pe1", "pd1e1", "pd1e0"])]
    data: Option<String>,
    /// p(E=1).
    #[arg(long, requires_all = ["pd1e1", "pd1e0"])]
    pe1: Option<f64>,
    /// p(D=1|E=1).
    #[arg(long, requires_all = ["pe1", "pd1e0"])]
    pd1e1: Option<f64>,
    /// p(D=1|E=0).
    #[arg(long, requires_all = ["pe1", "pd1e1"])]
    pd1e0: Option<f64>,
}

#[derive(Args)]
struct ParamArgs {
    /// Upper limit on p(D=1|E,U).
    #[arg(long = "M")]
    max_risk: f64,
    /// Lower limit on p(D=1|E,U).
    #[arg(long = "m")]
    min_risk: f64,
}

enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

impl From<sensbound::Error> for CliError {
    fn from(e: sensbound::Error) -> Self {
        match e {
            sensbound::Error::BracketFailure(_) | sensbound::Error::Replicate { .. } => {
                CliError::Io(format!("internal: {e}"))
            }
            e => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_error(what: &str, e: io::Error) -> CliError {
    CliError::Io(format!("{what}: {e}"))
}

fn read_counts(source: &str) -> CliResult<CountTable> {
    let table = if source == "-" {
        let mut buf = String::new();
        io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| io_error("reading stdin", e))?;
        CountTable::from_csv_reader(buf.as_bytes())
    } else {
        CountTable::from_csv_path(source).map_err(|e| io_error(source, e))?
    };
    Ok(table?)
}

fn load_observed(input: &ObservedArgs) -> CliResult<Observed<f64>> {
    match (&input.data, input.pe1, input.pd1e1, input.pd1e0) {
        (Some(path), ..) => Ok(observed_from_counts(&read_counts(path)?)?),
        (None, Some(pe1), Some(pd1e1), Some(pd1e0)) => {
            Ok(Observed::Binary(Observed64::new(pe1, pd1e1, pd1e0)?))
        }
        _ => Err(CliError::Validation(
            "provide --data or all of --pe1, --pd1e1, --pd1e0".into(),
        )),
    }
}

fn load_binary(input: &ObservedArgs) -> CliResult<Observed64> {
    match load_observed(input)? {
        Observed::Binary(obs) => Ok(obs),
        Observed::Stratified(_) => Err(CliError::Validation(
            "this command needs an unstratified table; drop the c column".into(),
        )),
    }
}

fn load_mediation_json(path: &Path) -> CliResult<MediationObserved64> {
    let text = fs::read_to_string(path).map_err(|e| io_error(&path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("mediation JSON: {e}")))
}

fn params(p: &ParamArgs) -> CliResult<Params64> {
    Ok(Params64::new(p.max_risk, p.min_risk)?)
}

/// Parameters checked against `region` before their own ordering.
fn feasible_params(region: &FeasibleRegion<f64>, p: &ParamArgs) -> CliResult<Params64> {
    Ok(region.params(p.max_risk, p.min_risk)?)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| io_error(&path.display().to_string(), e))
}

fn interval_json(iv: &Interval64) -> Value {
    json!({ "lower": iv.lower(), "upper": number_or_inf(iv.upper_f64()) })
}

fn number_or_inf(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn scale_name(s: Scale) -> &'static str {
    match s {
        Scale::RiskRatio => "rr",
        Scale::RiskDifference => "rd",
    }
}

fn cmd_bounds(format: Format, input: &ObservedArgs, p: &ParamArgs, scale: ScaleArg) -> CliResult<String> {
    match load_observed(input)? {
        Observed::Binary(obs) => {
            let sp = feasible_params(&feasible_region(&obs), p)?;
            let iv = match scale {
                ScaleArg::Rr => rr_bounds(&obs, &sp)?,
                ScaleArg::Rd => rd_bounds(&obs, &sp)?,
            };
            Ok(render_bounds(format, &obs, &feasible_region(&obs), &sp, &iv))
        }
        Observed::Stratified(strat) => {
            if scale == ScaleArg::Rd {
                return Err(CliError::Validation(
                    "stratified input supports risk-ratio bounds only".into(),
                ));
            }
            render_stratified(format, &strat, &params(p)?)
        }
    }
}

fn render_bounds(
    format: Format,
    obs: &Observed64,
    region: &FeasibleRegion<f64>,
    sp: &Params64,
    iv: &Interval64,
) -> String {
    let rr_obs = obs.rr_obs().map(ext).unwrap_or(f64::NAN);
    let scale = scale_name(iv.scale());
    match format {
        Format::Table => kv_table(&[
            ("scale", scale.to_string()),
            ("RR_obs", two_dp(rr_obs)),
            ("RD_obs", two_dp(obs.rd_obs())),
            ("feasible region", format!("M >= {}, m <= {}", two_dp(region.max_star()), two_dp(region.min_star()))),
            ("parameters", format!("M = {}, m = {}", two_dp(sp.max_risk()), two_dp(sp.min_risk()))),
            ("lower", two_dp(iv.lower())),
            ("upper", two_dp(iv.upper_f64())),
        ]),
        Format::Csv => {
            csv_line(&["scale", "rr_obs", "M_star", "m_star", "M", "m", "lower", "upper"])
                + &csv_line(&[
                    scale.to_string(),
                    sig17(rr_obs),
                    sig17(region.max_star()),
                    sig17(region.min_star()),
                    sig17(sp.max_risk()),
                    sig17(sp.min_risk()),
                    sig17(iv.lower()),
                    sig17(iv.upper_f64()),
                ])
        }
        Format::Json => pretty(&json!({
            "scale": scale,
            "rr_obs": number_or_inf(rr_obs),
            "rd_obs": obs.rd_obs(),
            "feasible_region": region,
            "params": sp,
            "interval": interval_json(iv),
        })),
    }
}

fn render_stratified(format: Format, strat: &StratifiedObserved<f64>, sp: &Params64) -> CliResult<String> {
    let sps = vec![*sp; strat.len()];
    let per = conditional_rr_bounds(strat, &sps)?;
    let avg = averaged_rr_bounds(strat, &sps)?;
    let rows: Vec<(String, f64, Interval64)> = strat
        .strata()
        .iter()
        .zip(&per)
        .map(|(s, iv)| (s.label.clone(), s.weight, *iv))
        .chain([("averaged".to_string(), 1.0, avg)])
        .collect();
    Ok(match format {
        Format::Table => grid_table(
            &["stratum".into(), "weight".into(), "lower".into(), "upper".into()],
            &rows
                .iter()
                .map(|(l, w, iv)| vec![l.clone(), two_dp(*w), two_dp(iv.lower()), two_dp(iv.upper_f64())])
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut out = csv_line(&["stratum", "weight", "lower", "upper"]);
            for (l, w, iv) in &rows {
                out += &csv_line(&[l.clone(), sig17(*w), sig17(iv.lower()), sig17(iv.upper_f64())]);
            }
            out
        }
        Format::Json => pretty(&json!({
            "scale": "rr",
            "params": sp,
            "strata": rows.iter().map(|(l, w, iv)| json!({
                "stratum": l, "weight": w, "interval": interval_json(iv)
            })).collect::<Vec<_>>(),
        })),
    })
}

fn cmd_grid(format: Format, input: &ObservedArgs, n_max: usize, n_min: usize, out: Option<&Path>) -> CliResult<String> {
    let obs = load_binary(input)?;
    let grid = bounds_grid(&obs, n_max, n_min)?;
    let mut csv = csv_line(&["M", "m", "lower", "upper"]);
    for row in &grid {
        csv += &csv_line(&[
            sig17(row.max_risk),
            sig17(row.min_risk),
            sig17(row.interval.lower()),
            sig17(row.interval.upper_f64()),
        ]);
    }
    if let Some(path) = out {
        write_file(path, &csv)?;
    }
    Ok(match format {
        Format::Csv => csv,
        Format::Json => pretty(&json!(grid
            .iter()
            .map(|r| json!({ "M": r.max_risk, "m": r.min_risk, "interval": interval_json(&r.interval) }))
            .collect::<Vec<_>>())),
        Format::Table => {
            let header: Vec<String> = ["m \\ M".to_string()]
                .into_iter()
                .chain(grid[..n_max].iter().map(|r| two_dp(r.max_risk)))
                .collect();
            let rows: Vec<Vec<String>> = grid
                .chunks(n_max)
                .map(|chunk| {
                    [two_dp(chunk[0].min_risk)]
                        .into_iter()
                        .chain(chunk.iter().map(|r| {
                            format!("({}, {})", two_dp(r.interval.lower()), two_dp(r.interval.upper_f64()))
                        }))
                        .collect()
                })
                .collect();
            grid_table(&header, &rows)
        }
    })
}

fn cmd_compare(format: Format, input: &ObservedArgs, p: &ParamArgs, dv: Option<(f64, f64, f64)>) -> CliResult<String> {
    let obs = load_binary(input)?;
    let sp = feasible_params(&feasible_region(&obs), p)?;
    let dp = dv.map(|(ud, e0, e1)| DvParams64::new(ud, e0, e1)).transpose()?;
    let report = compare_methods(&obs, &sp, dp.as_ref())?;
    let mut rows: Vec<(String, &'static str, f64, f64)> = report
        .methods
        .iter()
        .map(|m| (m.name.to_string(), scale_name(m.scale), m.lower, ext(m.upper)))
        .collect();
    for t in [&report.tightest, &report.tightest_rd].into_iter().flatten() {
        rows.push((t.name.to_string(), scale_name(t.scale), t.lower, ext(t.upper)));
    }
    Ok(match format {
        Format::Json => pretty(&json!({
            "rr_obs": number_or_inf(ext(report.rr_obs)),
            "params": sp,
            "dv_params": dp,
            "methods": rows.iter().map(|(n, s, l, u)| json!({
                "method": n, "scale": s, "lower": l, "upper": number_or_inf(*u)
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = csv_line(&["method", "scale", "lower", "upper"]);
            for (n, s, l, u) in &rows {
                out += &csv_line(&[n.clone(), s.to_string(), sig17(*l), sig17(*u)]);
            }
            out
        }
        Format::Table => grid_table(
            &["method".into(), "scale".into(), "lower".into(), "upper".into()],
            &rows
                .iter()
                .map(|(n, s, l, u)| vec![n.clone(), s.to_string(), two_dp(*l), two_dp(*u)])
                .collect::<Vec<_>>(),
        ),
    })
}

fn cmd_evalue(format: Format, rr_obs: f64) -> CliResult<String> {
    let ev = e_value(rr_obs)?;
    Ok(match format {
        Format::Table => kv_table(&[("RR_obs", two_dp(rr_obs)), ("E-value", format!("{ev:.5}"))]),
        Format::Csv => csv_line(&["rr_obs", "e_value"]) + &csv_line(&[sig17(rr_obs), sig17(ev)]),
        Format::Json => pretty(&json!({ "rr_obs": rr_obs, "e_value": ev })),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_witness(
    format: Format,
    input: &ObservedArgs,
    p: &ParamArgs,
    epsilon: f64,
    target: TargetArg,
    scale: WitnessScaleArg,
    mediation: Option<&Path>,
    export: Option<&Path>,
) -> CliResult<String> {
    let target = match target {
        TargetArg::Lower => Target::Lower,
        TargetArg::Upper => Target::Upper,
    };
    let (report, joint): (WitnessReport, Value) = match scale {
        WitnessScaleArg::Rr | WitnessScaleArg::Rd => {
            if mediation.is_some() {
                return Err(CliError::Validation("--mediation applies to --scale nde only".into()));
            }
            let obs = load_binary(input)?;
            let sp = feasible_params(&feasible_region(&obs), p)?;
            let (joint, report) = if scale == WitnessScaleArg::Rr {
                rr_witness(&obs, &sp, &WitnessSpec::new(epsilon, target, WitnessScale::RiskRatio)?)?
            } else {
                rd_witness(&obs, &sp, &WitnessSpec::new(epsilon, target, WitnessScale::RiskDifference)?)?
            };
            (report, json!(joint))
        }
        WitnessScaleArg::Nde => {
            let med = match (mediation, &input.data) {
                (Some(path), _) => load_mediation_json(path)?,
                (None, Some(data)) => mediation_observed_from_counts(&read_counts(data)?)?,
                (None, None) => {
                    return Err(CliError::Validation(
                        "--scale nde needs --mediation JSON or --data counts with a z column".into(),
                    ))
                }
            };
            let sp = feasible_params(&mediation_feasible_region(&med), p)?;
            let spec = WitnessSpec::new(epsilon, target, WitnessScale::NaturalDirect)?;
            let (joint, report) = nde_witness(&med, &sp, &spec)?;
            (report, json!(joint))
        }
    };
    if let Some(path) = export {
        write_file(path, &pretty(&joint))?;
    }
    Ok(match format {
        Format::Table => kv_table(&[
            ("epsilon", format!("{epsilon:e}")),
            ("bound", format!("{:.5}", report.bound_value)),
            ("true value on witness", format!("{:.5}", report.true_value_on_witness)),
            ("gap", format!("{:.3e}", report.log_gap)),
            ("marginal discrepancy", format!("{:.3e}", report.marginal_discrepancy)),
        ]),
        Format::Csv => {
            csv_line(&["epsilon", "bound_value", "true_value_on_witness", "log_gap", "marginal_discrepancy"])
                + &csv_line(&[
                    sig17(epsilon),
                    sig17(report.bound_value),
                    sig17(report.true_value_on_witness),
                    sig17(report.log_gap),
                    sig17(report.marginal_discrepancy),
                ])
        }
        Format::Json => pretty(&json!({ "epsilon": epsilon, "report": report })),
    })
}

fn cmd_mediate(
    format: Format,
    data: Option<&str>,
    json_path: Option<&Path>,
    p: &ParamArgs,
    scale: ScaleArg,
) -> CliResult<String> {
    let med = match (data, json_path) {
        (_, Some(path)) => load_mediation_json(path)?,
        (Some(data), None) => mediation_observed_from_counts(&read_counts(data)?)?,
        (None, None) => return Err(CliError::Validation("provide --data or --json".into())),
    };
    let region = mediation_feasible_region(&med);
    let sp = feasible_params(&region, p)?;
    let (nde, nie) = match scale {
        ScaleArg::Rr => (nde_bounds(&med, &sp)?, nie_bounds(&med, &sp)?),
        ScaleArg::Rd => (nde_rd_bounds(&med, &sp)?, nie_rd_bounds(&med, &sp)?),
    };
    let scale = scale_name(nde.scale());
    Ok(match format {
        Format::Table => kv_table(&[
            ("scale", scale.to_string()),
            ("mediator levels", med.mediator_levels().to_string()),
            ("feasible region", format!("M >= {}, m <= {}", two_dp(region.max_star()), two_dp(region.min_star()))),
            ("natural direct", format!("({}, {})", two_dp(nde.lower()), two_dp(nde.upper_f64()))),
            ("natural indirect", format!("({}, {})", two_dp(nie.lower()), two_dp(nie.upper_f64()))),
        ]),
        Format::Csv => {
            let mut out = csv_line(&["effect", "scale", "lower", "upper"]);
            for (name, iv) in [("nde", nde), ("nie", nie)] {
                out += &csv_line(&[name.to_string(), scale.to_string(), sig17(iv.lower()), sig17(iv.upper_f64())]);
            }
            out
        }
        Format::Json => pretty(&json!({
            "scale": scale,
            "feasible_region": region,
            "params": sp,
            "nde": interval_json(&nde),
            "nie": interval_json(&nie),
        })),
    })
}

fn cmd_simulate(format: Format, config: SimConfig, workers: usize) -> CliResult<String> {
    let summary = run_comparison_with_workers(&config, workers)?;
    let fields = summary.csv_fields();
    Ok(match format {
        Format::Csv => csv_line(&CSV_HEADER) + &csv_line(&fields.map(sig17)),
        Format::Table => grid_table(
            &CSV_HEADER.map(String::from),
            &[fields.map(two_dp).to_vec()],
        ),
        Format::Json => pretty(&json!(summary)),
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn run(cli: &Cli) -> CliResult<String> {
    let f = cli.format;
    match &cli.command {
        Command::Bounds { input, params, scale } => cmd_bounds(f, input, params, *scale),
        Command::Grid { input, n_max, n_min, out } => cmd_grid(f, input, *n_max, *n_min, out.as_deref()),
        Command::Compare { input, params, rr_ud, rr_e0u, rr_e1u } => {
            let dv = match (rr_ud, rr_e0u, rr_e1u) {
                (Some(a), Some(b), Some(c)) => Some((*a, *b, *c)),
                _ => None,
            };
            cmd_compare(f, input, params, dv)
        }
        Command::Evalue { rr_obs } => cmd_evalue(f, *rr_obs),
        Command::Witness { input, params, epsilon, target, scale, mediation, export } => cmd_witness(
            f,
            input,
            params,
            *epsilon,
            *target,
            *scale,
            mediation.as_deref(),
            export.as_deref(),
        ),
        Command::Mediate { data, json, params, scale } => {
            cmd_mediate(f, data.as_deref(), json.as_deref(), params, *scale)
        }
        Command::Simulate { sigma, pu, pe, pd, reps, seed, conservative, workers } => {
            let config = SimConfig {
                sigma: *sigma,
                targets: Targets::new(*pu, *pe, *pd)?,
                reps: *reps,
                seed: *seed,
                conservative_factor: *conservative,
            };
            cmd_simulate(f, config, *workers)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.format == Format::Json {
                eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.message() } }));
            } else {
                eprintln!("error: {}", e.message());
            }
            ExitCode::from(e.code())
        }
    }
}
