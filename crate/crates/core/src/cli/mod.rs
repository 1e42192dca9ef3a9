//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid instance, 3 a
//! disagreement with every hypothesis satisfied.

pub mod instance;
mod render;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::agreement::{
    check_knowledge_agreement, search_counterexamples, AgreementContext, GeneratorConfig,
    Hypothesis, Verdict,
};
use crate::assumptions::{assess, shared_disagreements};
use crate::augmentation::extend;
use crate::cps::Cps;
use crate::epistemic::{run as run_recursion, Modality};
use crate::foundations::{format_rational, parse_rational, Event, Rational};
use crate::renyi::represent;
use crate::Error;

pub use instance::{Instance, InstanceError, Query};
use render::Render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AgentArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

#[derive(Parser, Debug)]
#[command(
    name = "cpsagree",
    version,
    about = "Conditional probability spaces and agreement checks"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct QueryArgs {
    /// Event labels, comma separated; overrides the file's query.
    #[arg(long, value_delimiter = ',')]
    event: Option<Vec<String>>,
    #[arg(long = "qa", value_parser = parse_rational)]
    qa: Option<Rational>,
    #[arg(long = "qb", value_parser = parse_rational)]
    qb: Option<Rational>,
    #[arg(long)]
    omega: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check both agents' measures.
    Validate { file: PathBuf },
    /// List the atom of every state.
    Atoms {
        file: PathBuf,
        #[arg(long)]
        agent: AgentArg,
    },
    /// Beliefs in an event and the states where it is certain or known.
    Certainty {
        file: PathBuf,
        #[arg(long)]
        agent: AgentArg,
        #[arg(long, value_delimiter = ',', required = true)]
        event: Vec<String>,
    },
    /// Run the common-certainty recursion.
    CommonCertainty {
        file: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Run the common-knowledge recursion.
    CommonKnowledge {
        file: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Check reflection, 1-closedness and local consistency.
    Assumptions {
        file: PathBuf,
        /// Run the direct reflection check on any space size.
        #[arg(long)]
        force: bool,
    },
    /// Replace one agent by its extension to the 1-augmented family.
    Augment {
        file: PathBuf,
        #[arg(long)]
        agent: AgentArg,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Print a dimensionally ordered representation of one agent.
    Represent {
        file: PathBuf,
        #[arg(long)]
        agent: AgentArg,
    },
    /// Check the agreement conclusion under common certainty.
    Agree {
        file: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        force: bool,
    },
    /// Check the agreement conclusion under common knowledge.
    AgreeKnowledge {
        file: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Search generated instances for disagreements.
    Search {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: usize,
        /// Hypothesis to violate: reflection, one_closed or consistency.
        #[arg(long)]
        drop: Option<Hypothesis>,
        /// Give the agents independent sequences.
        #[arg(long)]
        independent: bool,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

struct Ctx {
    format: Format,
}

impl Ctx {
    fn emit(&self, text: String, json: Value) -> String {
        match self.format {
            Format::Text => text,
            Format::Json => {
                let mut s = instance::inline_leaves(
                    &serde_json::to_string_pretty(&json).expect("serializable"),
                );
                s.push('\n');
                s
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome::fail(EXIT_USAGE, rendered)
            } else {
                Outcome::ok(rendered)
            };
        }
    };
    let ctx = Ctx { format: cli.format };
    match dispatch(&ctx, cli.command) {
        Ok(o) => o,
        Err(o) => o,
    }
}

type Run = std::result::Result<Outcome, Outcome>;

fn load(path: &PathBuf) -> std::result::Result<Instance, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_USAGE, format!("cannot read {}: {e}\n", path.display())))?;
    Instance::parse(&text).map_err(|e| {
        Outcome::fail(
            EXIT_INVALID,
            format!("invalid instance {}: {e}\n", path.display()),
        )
    })
}

/// Fails with the validation report when either agent is invalid.
fn require_valid(ctx: &Ctx, inst: &Instance) -> std::result::Result<(), Outcome> {
    let (ra, rb) = (inst.a.validate(), inst.b.validate());
    if ra.is_valid() && rb.is_valid() {
        return Ok(());
    }
    let (text, json) = validation_report(inst);
    Err(Outcome {
        code: EXIT_INVALID,
        stdout: ctx.emit(text, json),
        stderr: "invalid instance: measure conditions fail\n".into(),
    })
}

fn validation_report(inst: &Instance) -> (String, Value) {
    let r = Render::new(inst.space());
    let (ta, ja) = r.validation("A", &inst.a.validate());
    let (tb, jb) = r.validation("B", &inst.b.validate());
    (format!("{ta}{tb}"), json!({"agents": {"A": ja, "B": jb}}))
}

fn lib_error(e: Error) -> Outcome {
    let code = match e {
        Error::TooLarge { .. } | Error::Config(_) | Error::OutOfRange { .. } => EXIT_USAGE,
        _ => EXIT_INVALID,
    };
    Outcome::fail(code, format!("error: {e}\n"))
}

fn agent(inst: &Instance, which: AgentArg) -> &Cps {
    match which {
        AgentArg::A => &inst.a,
        AgentArg::B => &inst.b,
    }
}

fn agent_name(which: AgentArg) -> &'static str {
    match which {
        AgentArg::A => "A",
        AgentArg::B => "B",
    }
}

fn labels_event(inst: &Instance, labels: &[String]) -> std::result::Result<Event, Outcome> {
    inst.space()
        .event(labels.iter().map(String::as_str))
        .map_err(|l| Outcome::fail(EXIT_USAGE, format!("unknown state label {l:?}\n")))
}

fn resolve_query(inst: &Instance, q: &QueryArgs) -> std::result::Result<Query, Outcome> {
    let file = inst.query.as_ref();
    let missing = |what: &str| {
        Outcome::fail(
            EXIT_USAGE,
            format!("no {what}: pass --{what} or add a query to the instance\n"),
        )
    };
    let event = match &q.event {
        Some(labels) => labels_event(inst, labels)?,
        None => file.map(|f| f.event).ok_or_else(|| missing("event"))?,
    };
    let qa = match &q.qa {
        Some(r) => r.clone(),
        None => file.map(|f| f.qa.clone()).ok_or_else(|| missing("qa"))?,
    };
    let qb = match &q.qb {
        Some(r) => r.clone(),
        None => file.map(|f| f.qb.clone()).ok_or_else(|| missing("qb"))?,
    };
    let omega = match &q.omega {
        Some(l) => inst
            .space()
            .index_of(l)
            .ok_or_else(|| Outcome::fail(EXIT_USAGE, format!("unknown state label {l:?}\n")))?,
        None => file.map(|f| f.omega).unwrap_or(0),
    };
    Ok(Query {
        event,
        qa,
        qb,
        omega,
    })
}

fn dispatch(ctx: &Ctx, command: Command) -> Run {
    match command {
        Command::Validate { file } => {
            let inst = load(&file)?;
            let (text, json) = validation_report(&inst);
            let valid = inst.a.validate().is_valid() && inst.b.validate().is_valid();
            Ok(Outcome {
                code: if valid { EXIT_OK } else { EXIT_INVALID },
                stdout: ctx.emit(text, json),
                stderr: String::new(),
            })
        }
        Command::Atoms { file, agent: which } => {
            let inst = load(&file)?;
            let cps = agent(&inst, which);
            let r = Render::new(inst.space());
            let mut text = String::new();
            let mut rows = Vec::new();
            for s in 0..cps.size() {
                text.push_str(&format!(
                    "m_{}({}) = {}\n",
                    agent_name(which),
                    r.state(s),
                    r.event(cps.atom(s))
                ));
                rows.push(json!({"state": r.state(s), "atom": r.event_json(cps.atom(s))}));
            }
            Ok(Outcome::ok(ctx.emit(
                text,
                json!({"agent": agent_name(which), "atoms": rows}),
            )))
        }
        Command::Certainty {
            file,
            agent: which,
            event,
        } => {
            let inst = load(&file)?;
            require_valid(ctx, &inst)?;
            let e = labels_event(&inst, &event)?;
            let cps = agent(&inst, which);
            let r = Render::new(inst.space());
            let beliefs = cps.beliefs(e);
            let mut text = String::new();
            let mut rows = Vec::new();
            for (s, q) in beliefs.iter().enumerate() {
                text.push_str(&format!(
                    "p_{{m({})}}({}) = {}\n",
                    r.state(s),
                    r.event(e),
                    format_rational(q)
                ));
                rows.push(json!({"state": r.state(s), "atom": r.event_json(cps.atom(s)), "belief": format_rational(q)}));
            }
            let (c, k) = (cps.certainty_event(e), cps.knowledge_event(e));
            text.push_str(&format!(
                "certain at: {}\nknown at: {}\n",
                r.event(c),
                r.event(k)
            ));
            let json = json!({
                "agent": agent_name(which), "event": r.event_json(e), "beliefs": rows,
                "certainty": r.event_json(c), "knowledge": r.event_json(k),
            });
            Ok(Outcome::ok(ctx.emit(text, json)))
        }
        Command::CommonCertainty { file, query } => {
            recursion(ctx, &file, &query, Modality::Certainty)
        }
        Command::CommonKnowledge { file, query } => {
            recursion(ctx, &file, &query, Modality::Knowledge)
        }
        Command::Assumptions { file, force } => {
            let inst = load(&file)?;
            require_valid(ctx, &inst)?;
            let report = assess(&inst.a, &inst.b, force).map_err(lib_error)?;
            let shared = shared_disagreements(&inst.a, &inst.b).map_err(lib_error)?;
            let r = Render::new(inst.space());
            let (ta, ja) = r.agent("A", &report.agent_a);
            let (tb, jb) = r.agent("B", &report.agent_b);
            let mut text = format!("{ta}{tb}");
            let mut rows = Vec::new();
            for c in &report.local_consistency {
                let (t, j) = r.consistency(c);
                text.push_str(&t);
                text.push('\n');
                rows.push(j);
            }
            let mut shared_rows = Vec::new();
            for &g in &shared {
                text.push_str(&format!(
                    "shared event {}: A gives {}, B gives {}\n",
                    r.event(g),
                    r.measure(&inst.a.measures()[&g]),
                    r.measure(&inst.b.measures()[&g])
                ));
                shared_rows.push(json!({
                    "event": r.event_json(g),
                    "measure_A": r.measure_json(&inst.a.measures()[&g]),
                    "measure_B": r.measure_json(&inst.b.measures()[&g]),
                }));
            }
            let json = json!({
                "agents": {"A": ja, "B": jb},
                "local_consistency": rows,
                "shared_disagreements": shared_rows,
            });
            Ok(Outcome::ok(ctx.emit(text, json)))
        }
        Command::Augment {
            file,
            agent: which,
            output,
        } => {
            let inst = load(&file)?;
            require_valid(ctx, &inst)?;
            let result = extend(agent(&inst, which)).map_err(lib_error)?;
            let mut out = inst.clone();
            match which {
                AgentArg::A => out.a = result.extended_cps,
                AgentArg::B => out.b = result.extended_cps,
            }
            out.comment = Some(format!(
                "agent {} replaced by its 1-augmented extension ({} {})",
                agent_name(which),
                env!("CARGO_PKG_NAME"),
                env!("CARGO_PKG_VERSION")
            ));
            let doc = out.to_json();
            match output {
                None => Ok(Outcome::ok(doc)),
                Some(path) => {
                    std::fs::write(&path, &doc).map_err(|e| {
                        Outcome::fail(
                            EXIT_USAGE,
                            format!("cannot write {}: {e}\n", path.display()),
                        )
                    })?;
                    let n = result.augmented_family.len();
                    let text = format!(
                        "wrote {} ({n} members in the augmented family)\n",
                        path.display()
                    );
                    let json = json!({"output": path.display().to_string(), "family_size": n});
                    Ok(Outcome::ok(ctx.emit(text, json)))
                }
            }
        }
        Command::Represent { file, agent: which } => {
            let inst = load(&file)?;
            require_valid(ctx, &inst)?;
            let cps = agent(&inst, which);
            let dof = represent(cps).map_err(lib_error)?;
            let r = Render::new(inst.space());
            let mut text = String::new();
            let mut levels = Vec::new();
            for (i, l) in dof.levels().iter().enumerate() {
                let (t, j) = r.level(l);
                text.push_str(&format!("level {i}: {t}\n"));
                levels.push(j);
            }
            let mut active = Vec::new();
            for g in cps.family().iter() {
                let l = dof.active_level(g).expect("verified representation");
                text.push_str(&format!("active level of {}: {l}\n", r.event(g)));
                active.push(json!({"given": r.event_json(g), "level": l}));
            }
            let json = json!({"agent": agent_name(which), "levels": levels, "active": active});
            Ok(Outcome::ok(ctx.emit(text, json)))
        }
        Command::Agree { file, query, force } => agree(ctx, &file, &query, Some(force)),
        Command::AgreeKnowledge { file, query } => agree(ctx, &file, &query, None),
        Command::Search {
            states,
            seed,
            trials,
            drop,
            independent,
        } => {
            let mut config = GeneratorConfig::new(states, seed, trials).with_drop(drop);
            if independent {
                config.shared_lexicographic = false;
            }
            let report = search_counterexamples(&config).map_err(lib_error)?;
            let (text, json) = render::search(&report);
            Ok(Outcome {
                code: if report.is_clean() {
                    EXIT_OK
                } else {
                    EXIT_DISAGREEMENT
                },
                stdout: ctx.emit(text, json),
                stderr: String::new(),
            })
        }
    }
}

fn recursion(ctx: &Ctx, file: &PathBuf, query: &QueryArgs, modality: Modality) -> Run {
    let inst = load(file)?;
    require_valid(ctx, &inst)?;
    let q = resolve_query(&inst, query)?;
    let trace =
        run_recursion(&inst.a, &inst.b, q.event, &q.qa, &q.qb, modality).map_err(lib_error)?;
    let r = Render::new(inst.space());
    let (text, mut json) = r.trace(&trace);
    json["query"] = r.query_json(q.event, &q.qa, &q.qb);
    Ok(Outcome::ok(ctx.emit(text, json)))
}

/// `force` is `Some` for the certainty variant.
fn agree(ctx: &Ctx, file: &PathBuf, query: &QueryArgs, force: Option<bool>) -> Run {
    let inst = load(file)?;
    require_valid(ctx, &inst)?;
    let q = resolve_query(&inst, query)?;
    let report = match force {
        Some(force) => AgreementContext::certainty(&inst.a, &inst.b, force)
            .and_then(|c| c.check(q.event, q.omega, &q.qa, &q.qb)),
        None => check_knowledge_agreement(&inst.a, &inst.b, q.event, q.omega, &q.qa, &q.qb),
    }
    .map_err(lib_error)?;
    let (text, json) = Render::new(inst.space()).agreement(&report);
    let code = if report.verdict == Verdict::DisagreementUnderHypotheses {
        EXIT_DISAGREEMENT
    } else {
        EXIT_OK
    };
    Ok(Outcome {
        code,
        stdout: ctx.emit(text, json),
        stderr: String::new(),
    })
}
