//! Command-line front end: reads network documents, runs the analyses of
//! `crnlap`, and prints deterministic JSON reports.

pub mod aux;
pub mod document;
pub mod error;
pub mod json;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use crnlap::equilibria::{birch_intersect, birch_residuals, cbe_manifold_sample, solve_cbe, CbeResult, CbeStatus};
use crnlap::laplacian::{core_matrix, cycle_decomposition, tree_constants, verify_core_decomposition, TreeBackend};
use crnlap::stability::{
    bdi_membership, decrease_certificate, lyapunov_derivative, simulate, BdiVerdict, SimulationControls, Verdict,
};
use crnlap::{AuxTree, Rational, ReactionNetwork, Scalar};
use serde_json::{json, Map, Value};

pub use document::{parse_network, NetworkDocument};
pub use error::CliError;
use json::{floats, matrix, vector, ToJson};

#[derive(Parser, Debug)]
#[command(name = "crnlap", version, about = "Laplacian core matrices and stability of mass-action networks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Arithmetic for graph computations.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Relative integration tolerance for `simulate`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for sampled output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the report (or, for `simulate`, the trajectory) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Auxiliary tree, e.g. `chain:1,2,3;4,5` or `star:root=1`.
    #[arg(long, global = true)]
    aux: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Components, tree constants, core decompositions and equilibria.
    Analyze { file: PathBuf },
    /// Core matrix for one auxiliary tree (canonical chain by default).
    Decompose { file: PathBuf },
    /// Complex-balanced equilibrium, manifold samples and Birch point.
    Equilibria {
        file: PathBuf,
        /// Number of points sampled on the equilibrium manifold.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// State whose stoichiometric class is intersected with the manifold.
        #[arg(long)]
        class: Option<String>,
    },
    /// Lyapunov decrease certificate at a state.
    Certify {
        file: PathBuf,
        /// Positive state, comma separated.
        #[arg(long)]
        x: String,
        /// Complex-balanced equilibrium; solved for when absent.
        #[arg(long)]
        x_star: Option<String>,
    },
    /// Membership of a velocity in the binomial differential inclusion.
    BdiCheck {
        file: PathBuf,
        /// Positive state, comma separated.
        #[arg(long)]
        x: String,
        /// Velocity to test; the mass-action vector field at `x` by default.
        #[arg(long)]
        v: Option<String>,
        #[arg(long)]
        x_star: Option<String>,
    },
    /// Integrates the mass-action system.
    Simulate {
        file: PathBuf,
        /// Initial state, comma separated.
        #[arg(long)]
        x0: String,
        /// Final time.
        #[arg(long = "t")]
        t_end: f64,
        /// Equilibrium used for the Lyapunov column; solved for when absent.
        #[arg(long)]
        x_star: Option<String>,
    },
}

/// Exit code and the text destined for standard output and error.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => {
                    let text = e.to_string();
                    failure(&CliError::Usage(text.trim().trim_start_matches("error: ").to_string()))
                }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = json::render(&report);
            if let (Some(path), false) = (&cli.global.out, matches!(cli.command, Command::Simulate { .. })) {
                if let Err(e) = std::fs::write(path, &text) {
                    return failure(&CliError::Io(format!("cannot write {}: {e}", path.display())));
                }
            }
            Outcome {
                code: 0,
                stdout: text,
                stderr: String::new(),
            }
        }
        Err(CliError::Inconclusive { message, report }) => {
            let err = CliError::Inconclusive {
                message,
                report: Value::Null,
            };
            Outcome {
                code: err.exit_code(),
                stdout: json::render(&report),
                stderr: json::render(&without_report(err.to_json())),
            }
        }
        Err(e) => failure(&e),
    }
}

fn without_report(mut v: Value) -> Value {
    if let Some(obj) = v.get_mut("error").and_then(Value::as_object_mut) {
        obj.remove("report");
    }
    v
}

fn failure(e: &CliError) -> Outcome {
    log::warn!("{e}");
    Outcome {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: json::render(&e.to_json()),
    }
}

fn load(path: &Path) -> Result<(NetworkDocument, ReactionNetwork<Rational>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    log::info!("parsing {}", path.display());
    parse_network(&text)
}

fn parse_vector(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{flag}: `{}` is not a number", s.trim())))
        })
        .collect()
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

fn execute(cli: &Cli) -> Result<Value, CliError> {
    let g = &cli.global;
    let mut report = match &cli.command {
        Command::Analyze { file } => {
            let (_, net) = load(file)?;
            match g.mode {
                Mode::Exact => analyze(&net, g)?,
                Mode::Float => analyze(&net.to_float(), g)?,
            }
        }
        Command::Decompose { file } => {
            let (_, net) = load(file)?;
            match g.mode {
                Mode::Exact => decompose(&net, g)?,
                Mode::Float => decompose(&net.to_float(), g)?,
            }
        }
        Command::Equilibria { file, samples, class } => {
            let (_, net) = load(file)?;
            let class = class.as_deref().map(|c| parse_vector("class", c)).transpose()?;
            equilibria(&net, *samples, class, g.seed)?
        }
        Command::Certify { file, x, x_star } => {
            let (_, net) = load(file)?;
            let x = parse_vector("x", x)?;
            let x_star = equilibrium(&net, x_star.as_deref())?;
            match g.mode {
                Mode::Exact => certify(&net, &x, &x_star)?,
                Mode::Float => certify(&net.to_float(), &x, &x_star)?,
            }
        }
        Command::BdiCheck { file, x, v, x_star } => {
            let (_, net) = load(file)?;
            let x = parse_vector("x", x)?;
            let v = v.as_deref().map(|v| parse_vector("v", v)).transpose()?;
            let x_star = equilibrium(&net, x_star.as_deref())?;
            bdi_check(&net, &x, v, &x_star)?
        }
        Command::Simulate { file, x0, t_end, x_star } => {
            let (_, net) = load(file)?;
            let x0 = parse_vector("x0", x0)?;
            let x_star = match x_star {
                Some(s) => Some(parse_vector("x-star", s)?),
                None => solve_cbe(&net)?.witness,
            };
            run_simulation(&net, &x0, *t_end, x_star, g)?
        }
    };
    let obj = report.as_object_mut().expect("reports are objects");
    obj.insert("mode".into(), json!(mode_name(g.mode)));
    obj.insert("seed".into(), json!(g.seed));
    Ok(report)
}

/// `--x-star` when given, else the solved equilibrium.
fn equilibrium(net: &ReactionNetwork<Rational>, given: Option<&str>) -> Result<Vec<f64>, CliError> {
    if let Some(text) = given {
        return parse_vector("x-star", text);
    }
    let result = solve_cbe(net)?;
    match result.witness {
        Some(w) => Ok(w),
        None => Err(CliError::Inconclusive {
            message: "the network has no complex-balanced equilibrium".into(),
            report: json!({ "cbe": cbe_json(&result) }),
        }),
    }
}

fn ids<T: Scalar>(net: &ReactionNetwork<T>, vertices: &[usize]) -> Value {
    json!(vertices.iter().map(|&v| net.graph().vertex_id(v)).collect::<Vec<_>>())
}

fn cbe_json(result: &CbeResult) -> Value {
    json!({
        "status": match result.status {
            CbeStatus::Found => "found",
            CbeStatus::Infeasible => "infeasible",
        },
        "witness": result.witness.as_deref().map(floats),
        "log_residual": result.log_residual.to_json(),
    })
}

fn close<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let scale = a.iter().chain(b).map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).is_negligible(scale, 1e-12))
}

fn decomposition_json<T: Scalar + ToJson>(net: &ReactionNetwork<T>, aux: &AuxTree) -> Result<Value, CliError> {
    let g = net.graph();
    let d = core_matrix(g, aux)?;
    let r = verify_core_decomposition(&d);
    Ok(json!({
        "aux": aux::aux_json(g, aux),
        "core": matrix(&d.core),
        "residual": d.residual.to_json(),
        "residual_ok": r.residual_ok,
        "invertible": r.invertible,
        "chain_nonnegative": r.chain_nonnegative,
        "star_dominant": r.star_dominant,
        "passed": r.passed(),
    }))
}

fn analyze<T: Scalar + ToJson>(net: &ReactionNetwork<T>, args: &GlobalArgs) -> Result<Value, CliError> {
    let g = net.graph();
    let mut report = Map::new();
    report.insert("command".into(), json!("analyze"));
    report.insert("species".into(), json!(net.species()));
    report.insert("vertices".into(), json!(g.vertex_ids()));
    let components: Vec<Value> = g.scc_partition().iter().map(|c| ids(net, c)).collect();
    report.insert("components".into(), Value::Array(components));
    report.insert("weakly_reversible".into(), json!(net.is_weakly_reversible()));
    report.insert("stoichiometric_dimension".into(), json!(net.s_basis().cols()));
    if net.is_weakly_reversible() {
        let enumeration = tree_constants(g, TreeBackend::Enumeration)?.values;
        let minors = tree_constants(g, TreeBackend::Minors)?.values;
        report.insert(
            "tree_constants".into(),
            json!({
                "enumeration": vector(&enumeration),
                "minors": vector(&minors),
                "backends_agree": close(&enumeration, &minors),
            }),
        );
        let mut trees = vec![AuxTree::canonical_chain(g), AuxTree::canonical_star(g)];
        if let Some(spec) = &args.aux {
            trees.push(aux::parse_aux(g, spec)?);
        }
        let decompositions = trees
            .iter()
            .map(|aux| decomposition_json(net, aux))
            .collect::<Result<Vec<_>, _>>()?;
        report.insert("decompositions".into(), Value::Array(decompositions));
        let cycles: Vec<Value> = cycle_decomposition(g)?
            .terms
            .iter()
            .map(|t| json!({ "cycle": ids(net, &t.cycle.vertices), "coefficient": t.coefficient.to_json() }))
            .collect();
        report.insert("cycle_decomposition".into(), Value::Array(cycles));
        report.insert("cbe".into(), cbe_json(&solve_cbe(net)?));
    }
    Ok(Value::Object(report))
}

fn decompose<T: Scalar + ToJson>(net: &ReactionNetwork<T>, args: &GlobalArgs) -> Result<Value, CliError> {
    let g = net.graph();
    let aux = match &args.aux {
        Some(spec) => aux::parse_aux(g, spec)?,
        None => AuxTree::canonical_chain(g),
    };
    let d = core_matrix(g, &aux)?;
    let mut report = decomposition_json(net, &aux)?;
    let obj = report.as_object_mut().expect("object");
    obj.insert("command".into(), json!("decompose"));
    obj.insert("vertices".into(), json!(g.vertex_ids()));
    obj.insert("laplacian".into(), matrix(&d.laplacian));
    obj.insert("tree_constants".into(), vector(&d.tree_constants.values));
    obj.insert("incidence".into(), matrix(&d.incidence));
    Ok(report)
}

fn equilibria(
    net: &ReactionNetwork<Rational>,
    samples: usize,
    class: Option<Vec<f64>>,
    seed: u64,
) -> Result<Value, CliError> {
    let result = solve_cbe(net)?;
    let mut report = json!({ "command": "equilibria", "cbe": cbe_json(&result) });
    let Some(x_star) = result.witness.clone() else {
        return Err(CliError::Inconclusive {
            message: "the network has no complex-balanced equilibrium".into(),
            report,
        });
    };
    report["manifold_dimension"] = json!(net.s_perp_basis().cols());
    if samples > 0 {
        let points = cbe_manifold_sample(net, &x_star, samples, seed)?;
        report["samples"] = Value::Array(points.iter().map(|p| floats(p)).collect());
    }
    if let Some(x_prime) = class {
        let x = birch_intersect(net, &x_star, &x_prime)?;
        let (class_residual, manifold_residual) = birch_residuals(net, &x_star, &x_prime, &x);
        report["birch_point"] = json!({
            "class_of": floats(&x_prime),
            "point": floats(&x),
            "class_residual": class_residual.to_json(),
            "manifold_residual": manifold_residual.to_json(),
        });
    }
    Ok(report)
}

fn certify<T: Scalar + ToJson>(net: &ReactionNetwork<T>, x: &[f64], x_star: &[f64]) -> Result<Value, CliError> {
    let cert = decrease_certificate(net, x, x_star)?;
    let g = net.graph();
    let derivative = lyapunov_derivative(net, x, x_star)?;
    let verdict = match cert.verdict {
        Verdict::StrictDecrease => "strict_decrease",
        Verdict::Equilibrium => "equilibrium",
        Verdict::Failure => "failure",
    };
    let witness = cert.witness_edge.map(|j| {
        let e = cert.aux.edges[j];
        json!([g.vertex_id(e.source), g.vertex_id(e.target)])
    });
    let report = json!({
        "command": "certify",
        "x": floats(x),
        "x_star": floats(x_star),
        "aux": aux::aux_json(g, &cert.aux),
        "a": floats(&cert.a),
        "b": floats(&cert.b),
        "core": matrix(&cert.core),
        "value": cert.value.to_json(),
        "lyapunov_derivative": derivative.to_json(),
        "witness_edge": witness,
        "verdict": verdict,
    });
    if cert.verdict == Verdict::Failure {
        return Err(CliError::Inconclusive {
            message: "no decrease certificate at this state".into(),
            report,
        });
    }
    Ok(report)
}

fn bdi_check(
    net: &ReactionNetwork<Rational>,
    x: &[f64],
    v: Option<Vec<f64>>,
    x_star: &[f64],
) -> Result<Value, CliError> {
    let v = match v {
        Some(v) => v,
        None => crnlap::crn::mass_action_rhs(&net.to_float(), x)?,
    };
    let r = bdi_membership(net, x_star, x, &v)?;
    let verdict = match r.verdict {
        BdiVerdict::Member => "member",
        BdiVerdict::NotMember => "not_member",
        BdiVerdict::Indeterminate => "indeterminate",
    };
    let report = json!({
        "command": "bdi-check",
        "x": floats(x),
        "x_star": floats(x_star),
        "v": floats(&v),
        "verdict": verdict,
        "on_equilibrium_manifold": r.on_equilibrium_manifold,
        "orders_checked": r.orders_checked,
    });
    if r.verdict == BdiVerdict::Indeterminate {
        return Err(CliError::Inconclusive {
            message: "too many tied evaluation orders".into(),
            report,
        });
    }
    Ok(report)
}

fn run_simulation(
    net: &ReactionNetwork<Rational>,
    x0: &[f64],
    t_end: f64,
    x_star: Option<Vec<f64>>,
    args: &GlobalArgs,
) -> Result<Value, CliError> {
    let mut controls = SimulationControls {
        x_star,
        ..SimulationControls::default()
    };
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol {tol} must be positive")));
        }
        controls.rtol = tol;
        controls.atol = tol * 1e-2;
    }
    let traj = simulate(net, x0, t_end, &controls)?;
    log::info!("simulation accepted {} steps, rejected {}", traj.accepted, traj.rejected);
    let monotone = traj.lyapunov.windows(2).all(|w| w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0));
    let data = json!({
        "species": net.species(),
        "times": floats(&traj.times),
        "states": Value::Array(traj.states.iter().map(|s| floats(s)).collect()),
        "lyapunov": floats(&traj.lyapunov),
        "x_star": traj.x_star.as_deref().map(floats),
    });
    let mut report = json!({
        "command": "simulate",
        "x0": floats(x0),
        "t_end": t_end.to_json(),
        "final_state": floats(traj.final_state()),
        "points": traj.times.len(),
        "accepted_steps": traj.accepted,
        "rejected_steps": traj.rejected,
        "lyapunov_nonincreasing": traj.x_star.as_ref().map(|_| monotone),
    });
    match &args.out {
        Some(path) => {
            let text = if path.extension().is_some_and(|e| e == "csv") {
                trajectory_csv(net.species(), &traj)
            } else {
                json::render(&data)
            };
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            report["out"] = json!(path.display().to_string());
        }
        None => report["trajectory"] = data,
    }
    Ok(report)
}

fn trajectory_csv(species: &[String], traj: &crnlap::stability::Trajectory) -> String {
    let mut out = String::from("t");
    for s in species {
        out.push(',');
        out.push_str(s);
    }
    if traj.x_star.is_some() {
        out.push_str(",L");
    }
    out.push('\n');
    for (i, (t, x)) in traj.times.iter().zip(&traj.states).enumerate() {
        out.push_str(&t.to_string());
        for v in x {
            out.push(',');
            out.push_str(&v.to_string());
        }
        if let Some(l) = traj.lyapunov.get(i).filter(|_| traj.x_star.is_some()) {
            out.push(',');
            out.push_str(&l.to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod cli_tests;
