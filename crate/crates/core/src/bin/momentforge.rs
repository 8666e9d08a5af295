use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use momentforge::io::config::{Action, PipelineConfig, ScenarioOverrides};
use momentforge::pipeline::run;
use momentforge::scenarios::{Preset, Variant};
use momentforge::{Error, Result};

#[derive(Parser)]
#[command(name = "momentforge", version, about = "Moment-like maps over colored hypersurface arrangements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario through every applicable stage.
    Scenario {
        #[command(subcommand)]
        command: ScenarioCommand,
    },
    /// Sample-based check of the arrangement hypotheses.
    Validate(Common),
    /// Slice the region with a coordinate plane.
    Slice(Common),
    /// Build and embed the doubled surface over a slice.
    Double(Common),
    /// Reeb digraph of a coordinate on the doubled surface.
    Reeb(Common),
    /// Singular values of a coordinate projection.
    Singular(Common),
    /// Fiber types over a grid of target points.
    FiberSurvey(Common),
}

#[derive(Subcommand)]
enum ScenarioCommand {
    Run(Common),
    /// List the known scenario names.
    List,
}

#[derive(Args, Clone, Debug, Default)]
struct Common {
    /// Scenario name (thm2, thm3, caseA, caseB, caseC, problem3_n4, thm2-literal).
    name: Option<String>,
    /// JSON pipeline configuration; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    l: Option<usize>,
    /// Rational or decimal, e.g. 1/2 or 0.5.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
    #[arg(long)]
    density: Option<f64>,
    /// Boundary samples for validation.
    #[arg(long)]
    samples: Option<usize>,
    /// Rank tolerance for validation.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// 0-based coordinate. With --value it picks the slice plane; otherwise it
    /// is the function axis of `reeb` and `singular`.
    #[arg(long)]
    axis: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    value: Option<f64>,
    /// Keep only the half-space at or above this value of the singular axis.
    #[arg(long, allow_hyphen_values = true)]
    clip: Option<f64>,
    /// JSON report path; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// OFF file for the doubled surface.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Graphviz file for the Reeb digraph.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// SVG plot of the slice region.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Exit with status 2 when results contradict stated expectations.
    #[arg(long)]
    strict: bool,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    match s {
        "line" => Ok(Variant::Line),
        "circle" => Ok(Variant::Circle),
        _ => Err(format!("expected line or circle, got {s}")),
    }
}

fn build_config(c: &Common, actions: Option<Vec<Action>>, function_axis: Option<Action>) -> Result<PipelineConfig> {
    let mut cfg = match &c.config {
        Some(p) => PipelineConfig::from_json(&std::fs::read_to_string(p)?)?,
        None => PipelineConfig::default(),
    };
    if let Some(name) = &c.name {
        cfg.arrangement = None;
        let keep = cfg.scenario.take().filter(|s| s.preset == *name);
        cfg.scenario = Some(keep.unwrap_or_else(|| ScenarioOverrides { preset: name.clone(), ..Default::default() }));
    }
    if let Some(s) = cfg.scenario.as_mut() {
        s.l = c.l.or(s.l);
        s.a = c.a.clone().or(s.a.take());
        s.b = c.b.clone().or(s.b.take());
        s.variant = c.variant.or(s.variant);
    } else if c.l.is_some() || c.a.is_some() || c.b.is_some() || c.variant.is_some() {
        return Err(Error::Config("--l, --a, --b and --variant apply to named scenarios".into()));
    }
    let o = &mut cfg.options;
    o.density = c.density.or(o.density);
    o.samples = c.samples.or(o.samples);
    o.tol = c.tol.or(o.tol);
    o.seed = c.seed.or(o.seed);
    o.clip = c.clip.or(o.clip);
    o.strict |= c.strict;
    match (c.axis, c.value) {
        (axis, Some(v)) => o.slice = Some(vec![(axis.unwrap_or(2), v)]),
        (Some(k), None) => match function_axis {
            Some(Action::Reeb) => o.reeb_axis = Some(k),
            Some(Action::Singular) => o.singular_axis = Some(k),
            _ => return Err(Error::Config("--axis needs --value for this command".into())),
        },
        (None, None) => {}
    }
    let out = &mut cfg.outputs;
    out.report = c.out.clone().or(out.report.take());
    out.mesh = c.mesh.clone().or(out.mesh.take());
    out.dot = c.dot.clone().or(out.dot.take());
    out.svg = c.svg.clone().or(out.svg.take());
    if let Some(a) = actions {
        cfg.actions = a;
    }
    if cfg.actions.is_empty() {
        let survey = cfg.scenario.as_ref().and_then(|s| Preset::from_name(&s.preset).ok()) == Some(Preset::Problem3N4);
        cfg.actions = Action::ALL.into_iter().filter(|&a| a != Action::FiberSurvey || survey).collect();
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32> {
    let (common, actions, axis_target) = match cli.command {
        Command::Scenario { command: ScenarioCommand::List } => {
            for p in Preset::ALL {
                println!("{}", p.name());
            }
            return Ok(0);
        }
        Command::Scenario { command: ScenarioCommand::Run(c) } => (c, None, None),
        Command::Validate(c) => (c, Some(vec![Action::Validate]), None),
        Command::Slice(c) => (c, Some(vec![Action::Slice]), None),
        Command::Double(c) => (c, Some(vec![Action::Double]), None),
        Command::Reeb(c) => (c, Some(vec![Action::Reeb]), Some(Action::Reeb)),
        Command::Singular(c) => (c, Some(vec![Action::Singular]), Some(Action::Singular)),
        Command::FiberSurvey(c) => (c, Some(vec![Action::FiberSurvey]), None),
    };
    if common.name.is_none() && common.config.is_none() {
        return Err(Error::Config("give a scenario name or --config".into()));
    }
    let cfg = build_config(&common, actions, axis_target)?;
    let outcome = run(&cfg)?;
    if cfg.outputs.report.is_none() {
        print!("{}", outcome.report.to_json());
    }
    for c in &outcome.report.comparisons {
        eprintln!("{:<24} {:>5}  ({:?})", c.field, if c.matches { "ok" } else { "DIFF" }, c.provenance);
    }
    for f in &outcome.report.strict_failures {
        eprintln!("mismatch: {f}");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
