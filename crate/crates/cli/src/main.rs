use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use ihara::graph::{io, BallClassKey, Graph};
use ihara::limits::{
    ball_distribution, converge_run, limit_coefficients, BallDistribution, Family, Limit,
};
use ihara::periodic::{
    free_cayley, honeycomb, ladder, lattice, parse_voltage_json, periodic_coefficients,
    periodic_log_zeta, AnyVoltageGraph, Group, VoltageGraph,
};
use ihara::selftest::run_selftest;
use ihara::series::Series;
use ihara::sofic::{sofic_outcome, FamilyProvider, ProviderSpec, SoficFamily};
use ihara::zeta::{
    coefficients_by_paths, coefficients_by_trace, det_formula_eval, det_formula_series,
    euler_product_series, log_zeta_finite, parse_rational, rational_string, regular_spectral_eval,
    MeasureMode, ZetaCoefficients, LOG_TAIL_TARGET, MAX_RECURSION_ORDER,
};
use ihara::{Error, ErrorKind};
use num_rational::BigRational;

#[derive(Parser)]
#[command(
    name = "ihara",
    version,
    about = "Ihara zeta functions of finite, periodic and limit graphs"
)]
struct Cli {
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficients and evaluations of the zeta function of a finite graph.
    Zeta {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Det)]
        method: Method,
        #[arg(long, default_value_t = 12)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Measure::Counting)]
        measure: Measure,
        /// Evaluation point `re,im`; repeatable.
        #[arg(long = "eval", value_parser = parse_point)]
        eval: Vec<Complex64>,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        out: Output,
        /// Run every method and fail unless they agree.
        #[arg(long)]
        verify: bool,
    },
    /// Rooted ball statistics of a finite graph.
    Balls {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Also emit limit coefficients up to this order.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Coefficients and evaluations for a periodic graph.
    Periodic {
        #[command(flatten)]
        voltage: VoltageSource,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long = "eval", value_parser = parse_point)]
        eval: Vec<Complex64>,
    },
    /// Builds the finite graph from a voltage graph and an almost homomorphism.
    Sofic {
        #[command(flatten)]
        voltage: VoltageSource,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Provider JSON, inline or as a file path.
        #[arg(long)]
        provider: String,
        /// Overrides the seed of a random provider.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Writes the constructed graph as JSON.
        #[arg(long)]
        emit_graph: Option<PathBuf>,
    },
    /// Runs a graph family against a limit.
    Converge {
        #[arg(long, value_enum)]
        family: FamilyKind,
        /// Size range `A..B`, inclusive.
        #[arg(long, value_parser = parse_range)]
        range: (usize, usize),
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Voltage-graph JSON, or a ball distribution emitted by `balls`.
        /// Sofic families also build their members from it.
        #[arg(long)]
        limit: Option<PathBuf>,
        #[arg(long = "eval", value_parser = parse_point)]
        eval: Vec<Complex64>,
        #[arg(long, value_enum, default_value_t = Output::Csv)]
        out: Output,
        /// Sofic families: `quotient` or `random`.
        #[arg(long, default_value = "quotient")]
        provider: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sofic families: construction radius.
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Reduced-size identity suite.
    Selftest,
}

#[derive(clap::Args)]
struct VoltageSource {
    /// Voltage-graph JSON.
    #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Line,
    Grid,
    Cubic,
    Honeycomb,
    Ladder,
    /// Cayley tree of the free group of rank 2.
    Tree4,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Method {
    Paths,
    Trace,
    Det,
    Euler,
    Spectral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Counting,
    Normalized,
}

impl From<Measure> for MeasureMode {
    fn from(m: Measure) -> Self {
        match m {
            Measure::Counting => MeasureMode::Counting,
            Measure::Normalized => MeasureMode::Normalized,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyKind {
    Cycle,
    Torus2,
    Sofic,
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let f = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad evaluation point {s:?}"))
    };
    Ok(Complex64::new(f(re)?, f(im)?))
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let bad = || format!("bad range {s:?}, expected A..B");
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// A command failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Consistency => 1,
            ErrorKind::Input => 2,
            ErrorKind::Domain => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

fn mismatch(message: String) -> Failure {
    Failure { code: 1, message }
}

type CmdResult = Result<(), Failure>;

/// `println!` that tolerates a closed stdout.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn strings(xs: &[BigRational]) -> Vec<String> {
    xs.iter().map(rational_string).collect()
}

fn print_json(v: &Value) {
    out!(
        "{}",
        serde_json::to_string_pretty(v).expect("json values serialize")
    );
}

fn coefficients(
    g: &Graph,
    method: Method,
    order: usize,
    mode: MeasureMode,
) -> ihara::Result<(Vec<BigRational>, Series<BigRational>)> {
    let from = |c: ZetaCoefficients| {
        let z = c.zeta_series();
        (c.nbar, z)
    };
    Ok(match method {
        Method::Paths => from(coefficients_by_paths(g, order, mode)),
        Method::Trace | Method::Spectral => from(coefficients_by_trace(g, order, mode)?),
        Method::Det => {
            let z = det_formula_series(g, order, mode)?;
            (coefficients_by_trace(g, order, mode)?.nbar, z)
        }
        Method::Euler => {
            let z = euler_product_series(g, order, mode)?;
            (coefficients_by_paths(g, order, mode).nbar, z)
        }
    })
}

fn evaluate(
    g: &Graph,
    method: Method,
    u: Complex64,
    mode: MeasureMode,
) -> ihara::Result<(Complex64, Option<f64>)> {
    match method {
        Method::Det => Ok((det_formula_eval(g, u, mode)?, None)),
        Method::Spectral => Ok((regular_spectral_eval(g, u, mode)?, None)),
        _ => {
            let l = log_zeta_finite(g, u, mode)?;
            Ok((l.value(), Some(l.tail_bound)))
        }
    }
}

fn verify(g: &Graph, order: usize, mode: MeasureMode, points: &[Complex64]) -> CmdResult {
    let (reference_n, reference_z) = coefficients(g, Method::Paths, order, mode)?;
    for method in [Method::Trace, Method::Det, Method::Euler] {
        let (n, z) = coefficients(g, method, order, mode)?;
        if n != reference_n || z != reference_z {
            return Err(mismatch(format!(
                "{method:?} coefficients differ from path counting"
            )));
        }
    }
    for &u in points {
        let (det, _) = evaluate(g, Method::Det, u, mode)?;
        let (rec, tail) = evaluate(g, Method::Trace, u, mode)?;
        let tol = 1e-9 * det.norm().max(1.0) + tail.unwrap_or(0.0) * rec.norm();
        if (det - rec).norm() > tol {
            return Err(mismatch(format!(
                "determinant and trace evaluations differ at {u}"
            )));
        }
        if g.regular_degree().is_some() {
            let (spec, _) = evaluate(g, Method::Spectral, u, mode)?;
            if (spec - det).norm() > 1e-9 * det.norm() {
                return Err(mismatch(format!(
                    "spectral and determinant evaluations differ at {u}"
                )));
            }
        }
    }
    log::info!("all methods agree to order {order}");
    Ok(())
}

fn cmd_zeta(
    input: &Path,
    method: Method,
    order: usize,
    measure: Measure,
    points: &[Complex64],
    out: Output,
    check: bool,
) -> CmdResult {
    let g = io::load(input)?.graph;
    let mode = MeasureMode::from(measure);
    if check {
        verify(&g, order, mode, points)?;
    }
    let (nbar, z) = coefficients(&g, method, order, mode)?;
    let evals = points
        .iter()
        .map(|&u| evaluate(&g, method, u, mode).map(|(v, tail)| (u, v, tail)))
        .collect::<ihara::Result<Vec<_>>>()?;
    match out {
        Output::Json => print_json(&json!({
            "method": format!("{method:?}").to_lowercase(),
            "measure": mode,
            "order": order,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "nbar": strings(&nbar),
            "zeta": strings(z.coeffs()),
            "evaluations": evals.iter().map(|(u, v, tail)| json!({
                "u": complex_json(*u),
                "z": complex_json(*v),
                "log_tail_bound": tail,
            })).collect::<Vec<_>>(),
            "verified": check,
        })),
        Output::Csv => {
            out!("j,N,Z");
            for (j, c) in z.coeffs().iter().enumerate() {
                let n = if j == 0 {
                    String::new()
                } else {
                    rational_string(&nbar[j - 1])
                };
                out!("{j},{n},{}", rational_string(c));
            }
            if !evals.is_empty() {
                out!("");
                out!("re,im,z_re,z_im");
                for (u, v, _) in &evals {
                    out!("{:e},{:e},{:e},{:e}", u.re, u.im, v.re, v.im);
                }
            }
        }
    }
    Ok(())
}

fn distribution_json(d: &BallDistribution) -> Value {
    json!({
        "radius": d.radius,
        "degree_bound": d.degree_bound,
        "classes": d.entries.iter().map(|(k, p)| {
            let ball = &d.representatives[k];
            json!({
                "key": k.to_hex(),
                "frequency": rational_string(p),
                "vertices": ball.vertex_count(),
                "edges": ball.graph.edge_count(),
                "tree": ball.is_tree(),
            })
        }).collect::<Vec<_>>(),
    })
}

fn distribution_from_json(v: &Value) -> ihara::Result<BallDistribution> {
    let bad =
        || Error::Parse("ball distribution needs radius and classes[{key, frequency}]".into());
    let radius = v["radius"].as_u64().ok_or_else(bad)? as usize;
    let classes = v["classes"].as_array().ok_or_else(bad)?;
    let balls = classes
        .iter()
        .map(|c| {
            let key = BallClassKey::from_hex(c["key"].as_str().ok_or_else(bad)?)?;
            let p = parse_rational(c["frequency"].as_str().ok_or_else(bad)?)?;
            Ok((key.decode()?.ball, p))
        })
        .collect::<ihara::Result<Vec<_>>>()?;
    BallDistribution::from_weighted_balls(radius, balls)
}

fn cmd_balls(input: &Path, radius: usize, order: Option<usize>) -> CmdResult {
    let g = io::load(input)?.graph;
    let d = ball_distribution(&g, radius)?;
    let mut v = distribution_json(&d);
    if let Some(order) = order {
        v["nbar"] = json!(strings(&limit_coefficients(&d, order)?.nbar));
    }
    print_json(&v);
    Ok(())
}

fn load_voltage(source: &VoltageSource) -> ihara::Result<AnyVoltageGraph> {
    if let Some(path) = &source.input {
        return parse_voltage_json(&std::fs::read_to_string(path)?);
    }
    Ok(match source.builtin.expect("clap requires a source") {
        Builtin::Line => lattice(1).into(),
        Builtin::Grid => lattice(2).into(),
        Builtin::Cubic => lattice(3).into(),
        Builtin::Honeycomb => honeycomb().into(),
        Builtin::Ladder => ladder().into(),
        Builtin::Tree4 => free_cayley(2).into(),
    })
}

fn periodic_json<G: Group>(
    vg: &VoltageGraph<G>,
    order: usize,
    points: &[Complex64],
) -> ihara::Result<Value> {
    let c = periodic_coefficients(vg, order)?;
    let z = c.zeta_series();
    let evals = points
        .iter()
        .map(|&u| {
            let l = periodic_log_zeta(vg, u, LOG_TAIL_TARGET, MAX_RECURSION_ORDER)?;
            Ok(json!({
                "u": complex_json(u),
                "z": complex_json(l.value()),
                "order": l.order,
                "log_tail_bound": l.tail_bound,
            }))
        })
        .collect::<ihara::Result<Vec<_>>>()?;
    Ok(json!({
        "vertex_orbits": vg.vertex_count(),
        "mass": rational_string(&vg.total_mass()),
        "degree_bound": vg.max_cover_degree(),
        "order": order,
        "nbar": strings(&c.nbar),
        "pbar": c.pbar.as_deref().map(strings),
        "zeta": strings(z.coeffs()),
        "evaluations": evals,
    }))
}

fn cmd_periodic(source: &VoltageSource, order: usize, points: &[Complex64]) -> CmdResult {
    let v = match load_voltage(source)? {
        AnyVoltageGraph::Zd(vg) => periodic_json(&vg, order, points)?,
        AnyVoltageGraph::Free(vg) => periodic_json(&vg, order, points)?,
    };
    print_json(&v);
    Ok(())
}

fn load_provider(text: &str, seed: Option<u64>) -> ihara::Result<ProviderSpec> {
    let raw = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text)?
    };
    let mut spec: ProviderSpec = serde_json::from_str(&raw)?;
    if let (ProviderSpec::Random { seed: s, .. }, Some(seed)) = (&mut spec, seed) {
        *s = seed;
    }
    Ok(spec)
}

fn cmd_sofic(
    source: &VoltageSource,
    radius: usize,
    provider: &str,
    seed: Option<u64>,
    delta: f64,
    emit_graph: Option<&Path>,
) -> CmdResult {
    let vg = load_voltage(source)?;
    let spec = load_provider(provider, seed)?;
    let o = sofic_outcome(&vg, radius, &spec, delta)?;
    if o.degree_violations > 0 {
        log::warn!(
            "{} vertices exceed the degree bound {}",
            o.degree_violations,
            o.degree_bound
        );
    }
    if !o.defects.collisions.is_empty() {
        log::warn!(
            "{} element pairs collide under the provider",
            o.defects.collisions.len()
        );
    }
    if let Some(path) = emit_graph {
        let text =
            serde_json::to_string(&io::GraphJson::from_graph(&o.graph)).map_err(Error::from)?;
        std::fs::write(path, text)?;
    }
    print_json(&json!({
        "vertices": o.graph.vertex_count(),
        "edges": o.graph.edge_count(),
        "loops_discarded": o.loops_discarded,
        "multi_edges_collapsed": o.multi_edges_collapsed,
        "degree_bound": o.degree_bound,
        "degree_violations": o.degree_violations,
        "t_size": o.t_size,
        "ttilde_size": o.ttilde_size,
        "defects": {
            "i": o.defects.defect_i,
            "ii": o.defects.defect_ii,
            "iii": o.defects.defect_iii,
            "collisions": o.defects.collisions.len(),
        },
        "good_index_fraction": o.good_index_fraction,
        "claim_lower_bound": o.claim_lower_bound,
        "delta": {
            "delta": o.delta.delta,
            "epsilon": o.delta.epsilon,
            "precondition_met": o.delta.precondition_met,
            "max_deviation": rational_string(&o.delta.max_deviation),
            "holds": o.delta.holds(),
        },
    }));
    Ok(())
}

fn load_limit(path: &Path) -> ihara::Result<Limit> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    if v.get("classes").is_some() {
        Ok(Limit::Distribution(distribution_from_json(&v)?))
    } else {
        Ok(Limit::Voltage(parse_voltage_json(&text)?))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_converge(
    kind: FamilyKind,
    (a, b): (usize, usize),
    order: usize,
    limit: Option<&Path>,
    points: &[Complex64],
    out: Output,
    provider: &str,
    seed: u64,
    radius: usize,
) -> CmdResult {
    let sizes: Vec<usize> = (a..=b).collect();
    let limit = limit.map(load_limit).transpose()?;
    let (family, limit) = match kind {
        FamilyKind::Cycle => (
            Family::Cycle(sizes),
            limit.unwrap_or(Limit::Voltage(lattice(1).into())),
        ),
        FamilyKind::Torus2 => (
            Family::Torus { dim: 2, sizes },
            limit.unwrap_or(Limit::Voltage(lattice(2).into())),
        ),
        FamilyKind::Sofic => {
            let voltage = match limit {
                Some(Limit::Voltage(v)) => v,
                None => lattice(2).into(),
                Some(Limit::Distribution(_)) => {
                    return Err(
                        Error::Parse("sofic families need a voltage-graph limit".into()).into(),
                    )
                }
            };
            let provider = match provider {
                "quotient" => FamilyProvider::Quotient,
                "random" => FamilyProvider::Random { seed },
                other => return Err(Error::Parse(format!("unknown provider {other:?}")).into()),
            };
            let family = SoficFamily {
                voltage: voltage.clone(),
                radius,
                provider,
                sizes,
            };
            (Family::Sofic(family), Limit::Voltage(voltage))
        }
    };
    let report = converge_run(&family, order, &limit, points)?;
    match out {
        Output::Csv => out!("{}", report.to_csv()?.trim_end()),
        Output::Json => print_json(&report.to_json()),
    }
    Ok(())
}

fn cmd_selftest() -> CmdResult {
    let results = run_selftest();
    for r in &results {
        out!(
            "{} {}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        );
    }
    match results.iter().find(|r| !r.passed) {
        Some(r) => Err(mismatch(format!("{} failed: {}", r.name, r.detail))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.quiet {
            log::LevelFilter::Error
        } else {
            log::LevelFilter::Info
        })
        .target(env_logger::Target::Stderr)
        .init();
    let result = match &cli.command {
        Command::Zeta {
            input,
            method,
            order,
            measure,
            eval,
            out,
            verify,
        } => cmd_zeta(input, *method, *order, *measure, eval, *out, *verify),
        Command::Balls {
            input,
            radius,
            order,
        } => cmd_balls(input, *radius, *order),
        Command::Periodic {
            voltage,
            order,
            eval,
        } => cmd_periodic(voltage, *order, eval),
        Command::Sofic {
            voltage,
            radius,
            provider,
            seed,
            delta,
            emit_graph,
        } => cmd_sofic(
            voltage,
            *radius,
            provider,
            *seed,
            *delta,
            emit_graph.as_deref(),
        ),
        Command::Converge {
            family,
            range,
            order,
            limit,
            eval,
            out,
            provider,
            seed,
            radius,
        } => cmd_converge(
            *family,
            *range,
            *order,
            limit.as_deref(),
            eval,
            *out,
            provider,
            *seed,
            *radius,
        ),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::error!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
