//! `tensionweb` command-line tool.
//!
//! Exit status: 0 success or feasible, 2 infeasible (a certificate is printed),
//! 1 usage, input or I/O error.

mod io;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use tensionweb::airy::envelope_web;
use tensionweb::cone::{build_cone_web, ForceCone};
use tensionweb::geom::set_tolerance;
use tensionweb::interior::{multi_interior_easiest, solve_single_interior, InfeasibleReason, InteriorOutcome, InteriorProblem};
use tensionweb::mixed::{build_mixed, MemberRole, MixedOptions};
use tensionweb::proj3d::{check_projection, lattice_directions, test_field_inequality, Matrix3, Vec3};
use tensionweb::statics::{check_tension_feasible, edge_condition, FeasibilityCertificate};
use tensionweb::web::{solve_tensions, Web};
use tensionweb::Error;

use crate::io::{arr, read_json, v2, write_json, ProblemFile, WebFile};

#[derive(Parser)]
#[command(name = "tensionweb", version, about = "Tension-only webs for planar and spatial load sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// JSON result file (stdout when absent)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also draw the web as SVG
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Print member forces in the SVG
    #[arg(long)]
    labels: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Torque test for loads at the vertices of a convex polygon
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build the envelope web carrying a feasible load
    Build {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Solve for nonnegative tensions of a given web geometry
    Tensions {
        /// Web file giving the geometry
        #[arg(long)]
        web: PathBuf,
        /// Problem file giving the target loads
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Web carrying loads at interior points as well
    Interior {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Compression and tension truss for any balanced load
    Mixed {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        /// `auto` or a positive number
        #[arg(long, default_value = "auto")]
        lambda: String,
        #[arg(long)]
        rho: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Web carrying every nonnegative combination of the generators
    Cone {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Planar projection tests of a spatial load
    Project3d {
        #[arg(long)]
        input: PathBuf,
        /// Projection normal `x,y,z`; all 26 lattice directions when absent
        #[arg(long)]
        normal: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw a web file as SVG
    Render {
        /// Web file
        #[arg(long)]
        input: PathBuf,
        /// SVG file (stdout when absent)
        #[arg(long, alias = "output")]
        svg: Option<PathBuf>,
        #[arg(long)]
        labels: bool,
    },
}

enum Status {
    Done,
    Infeasible,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match apply_env().and_then(|_| run(cli.command)) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Infeasible) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn apply_env() -> Result<()> {
    if let Ok(raw) = std::env::var("TENSIONWEB_TOLERANCE") {
        let tau: f64 = raw.trim().parse().with_context(|| format!("TENSIONWEB_TOLERANCE={raw:?}"))?;
        if !(tau > 0.0 && tau < 1.0) {
            bail!("TENSIONWEB_TOLERANCE must lie in (0, 1), got {tau}");
        }
        set_tolerance(tau);
    }
    Ok(())
}

fn run(cmd: Command) -> Result<Status> {
    match cmd {
        Command::Check { input, output } => check(&input, output.as_deref()),
        Command::Build { input, out } => build(&input, &out),
        Command::Tensions { web, input, output } => tensions(&web, &input, output.as_deref()),
        Command::Interior { input, out } => interior(&input, &out),
        Command::Mixed { input, epsilon, lambda, rho, out } => {
            let lambda = match lambda.as_str() {
                "auto" => None,
                s => Some(s.parse::<f64>().with_context(|| format!("--lambda {s:?}"))?),
            };
            let weights = None;
            mixed(&input, MixedOptions { epsilon, lambda, weights, rho }, &out)
        }
        Command::Cone { input, out } => cone(&input, &out),
        Command::Project3d { input, normal, output } => project3d(&input, normal.as_deref(), output.as_deref()),
        Command::Render { input, svg, labels } => {
            let w = read_json::<WebFile>(&input)?.to_web()?;
            let text = svg::render(&w, labels);
            match svg {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            Ok(Status::Done)
        }
    }
}

fn certificate(c: &FeasibilityCertificate) -> Value {
    json!({
        "feasible": c.feasible,
        "violating_pair": c.violating_pair.map(|(j, i)| [j, i]),
        "min_margin": c.min_margin,
        "min_pair": [c.min_pair.0, c.min_pair.1],
    })
}

fn emit_web(file: WebFile, w: &Web, out: &Output) -> Result<Status> {
    if let Some(p) = &out.svg {
        fs::write(p, svg::render(w, out.labels)).with_context(|| format!("writing {}", p.display()))?;
    }
    write_json(out.output.as_deref(), &file)?;
    Ok(Status::Done)
}

fn check(input: &Path, output: Option<&Path>) -> Result<Status> {
    let f = read_json::<ProblemFile>(input)?.multiplet()?;
    let cert = check_tension_feasible(&f)?;
    let mut value = certificate(&cert);
    let edges = edge_condition(&f)?;
    // 1-based, like the pair labels
    let failing: Vec<usize> = edges.iter().enumerate().filter(|(_, &ok)| !ok).map(|(i, _)| i + 1).collect();
    value["edge_condition"] = json!(edges);
    value["failing_vertices"] = json!(failing);
    write_json(output, &value)?;
    Ok(if cert.feasible { Status::Done } else { Status::Infeasible })
}

fn build(input: &Path, out: &Output) -> Result<Status> {
    let f = read_json::<ProblemFile>(input)?.multiplet()?;
    let cert = check_tension_feasible(&f)?;
    if !cert.feasible {
        // the certificate goes to stdout, no web file is written
        write_json(None, &certificate(&cert))?;
        return Ok(Status::Infeasible);
    }
    let w = envelope_web(&f)?;
    let file = WebFile::from_web(&w, None)?.with_extra("min_margin", cert.min_margin);
    emit_web(file, &w.canonicalize(), out)
}

fn tensions(web: &Path, input: &Path, output: Option<&Path>) -> Result<Status> {
    let geometry = read_json::<WebFile>(web)?.to_web()?;
    let target = read_json::<ProblemFile>(input)?.multiplet()?;
    match solve_tensions(&geometry, &target) {
        Ok(q) => {
            write_json(output, &json!({ "feasible": true, "tensions": q }))?;
            Ok(Status::Done)
        }
        Err(Error::Infeasible { residual, nodes }) => {
            write_json(output, &json!({ "feasible": false, "residual": residual, "nodes": nodes }))?;
            Ok(Status::Infeasible)
        }
        Err(e) => Err(e.into()),
    }
}

fn interior(input: &Path, out: &Output) -> Result<Status> {
    let p = read_json::<ProblemFile>(input)?;
    let hull = p.multiplet()?;
    let loads: Vec<_> = p.interior.iter().map(|l| (v2(l.point), v2(l.force))).collect();
    match loads.len() {
        0 => bail!("problem has no interior loads"),
        1 => {
            let problem = InteriorProblem::new(hull, loads[0].0, loads[0].1)?;
            match solve_single_interior(&problem)? {
                InteriorOutcome::Supported(sol) => {
                    let file = WebFile::from_web(&sol.web, None)?
                        .with_extra("x1", arr(sol.x1))
                        .with_extra("offset", sol.s)
                        .with_extra("theta", sol.theta)
                        .with_extra("roofs", sol.roofs.len())
                        .with_extra("critical_theta", sol.trace.critical_theta);
                    emit_web(file, &sol.web.canonicalize(), out)
                }
                InteriorOutcome::Infeasible { reason, trace } => {
                    let reason = match reason {
                        InfeasibleReason::TorqueViolation { pair, margin } => {
                            json!({ "kind": "torque_violation", "pair": [pair.0, pair.1], "margin": margin })
                        }
                        InfeasibleReason::ScanExhausted => json!({ "kind": "scan_exhausted" }),
                    };
                    let samples: Vec<Value> =
                        trace.samples.iter().map(|s| json!({ "theta": s.theta, "reach": s.reach })).collect();
                    write_json(
                        None,
                        &json!({
                            "feasible": false,
                            "reason": reason,
                            "target": trace.target,
                            "base_reach": trace.base_reach,
                            "samples": samples,
                        }),
                    )?;
                    Ok(Status::Infeasible)
                }
            }
        }
        _ => match multi_interior_easiest(&hull, &loads)? {
            Some(w) => emit_web(WebFile::from_web(&w, None)?, &w.canonicalize(), out),
            None => {
                write_json(None, &json!({ "feasible": false, "reason": { "kind": "not_on_envelope_wires" } }))?;
                Ok(Status::Infeasible)
            }
        },
    }
}

fn mixed(input: &Path, opts: MixedOptions, out: &Output) -> Result<Status> {
    let f = read_json::<ProblemFile>(input)?.multiplet()?;
    let m = build_mixed(&f, &opts)?;
    let roles = m
        .roles
        .iter()
        .map(|r| match r {
            MemberRole::Compression => "compression",
            MemberRole::Tension => "tension",
            MemberRole::Stub => "stub",
        })
        .map(String::from)
        .collect();
    let file = WebFile::from_web(&m.web, Some(roles))?
        .with_extra("lambda", m.lambda)
        .with_extra("epsilon", m.epsilon)
        .with_extra("rho", m.rho)
        .with_extra("weights", &m.weights)
        .with_extra("centre", arr(m.centre));
    emit_web(file, &m.web.canonicalize(), out)
}

fn cone(input: &Path, out: &Output) -> Result<Status> {
    let p = read_json::<ProblemFile>(input)?;
    let built = build_cone_web(&ForceCone::new(p.generator_multiplets()?)?)?;
    let mut file = WebFile::from_web(&built.web, None)?.with_extra("attempts", built.attempts);
    if !p.forces.is_empty() {
        let carried = solve_tensions(&built.web, &p.multiplet()?).is_ok();
        file = file.with_extra("target_carried", carried);
    }
    emit_web(file, &built.web.canonicalize(), out)
}

fn parse_normal(s: &str) -> Result<Vec3> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| anyhow!("--normal expects x,y,z, got {s:?}"))?;
    let [x, y, z] = parts[..] else { bail!("--normal expects three components, got {s:?}") };
    Ok(Vec3::new(x, y, z))
}

fn project3d(input: &Path, normal: Option<&str>, output: Option<&Path>) -> Result<Status> {
    let m = read_json::<ProblemFile>(input)?.multiplet3()?;
    let normals = match normal {
        Some(s) => vec![parse_normal(s)?],
        None => lattice_directions(),
    };
    let mut all = true;
    let mut reports = Vec::new();
    for n in normals {
        let entry = match check_projection(&m, n) {
            Ok(rep) => {
                all &= rep.feasible();
                json!({
                    "normal": [n.x, n.y, n.z],
                    "feasible": rep.feasible(),
                    "balanced": rep.balanced,
                    "order": rep.order,
                    "offsets": rep.offsets,
                    "extended": certificate(&rep.extended),
                    "substituted": certificate(&rep.substituted),
                    "direction_order": certificate(&rep.direction_order),
                })
            }
            Err(Error::DegenerateProjection) => json!({ "normal": [n.x, n.y, n.z], "degenerate": true }),
            Err(e) => return Err(e.into()),
        };
        reports.push(entry);
    }
    let balance = m.is_balanced();
    let (field, field_ok) = test_field_inequality(&m, &Matrix3::identity())?;
    all &= balance && field_ok;
    write_json(
        output,
        &json!({
            "feasible": all,
            "balanced": balance,
            "identity_field": field,
            "projections": reports,
        }),
    )?;
    Ok(if all { Status::Done } else { Status::Infeasible })
}
