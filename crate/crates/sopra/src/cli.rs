//! The `sopra` command line.
//!
//! Exit codes are the same for every command: 0 on success, 1 when the
//! knowledge base is invalid or a query names something that does not exist,
//! 2 when the file cannot be read or parsed (and on usage errors).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use sopra_core::decision::BeliefFilter;
use sopra_core::model::KnowledgeBase;
use sopra_core::{DecisionConfig, PerformanceContext};

use crate::render::{self, Style};
use crate::scenario::ParseErrors;
use crate::{json, scenario};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for an invalid knowledge base or unknown ids.
pub const EXIT_SEMANTIC: i32 = 1;
/// Exit status for unreadable or malformed input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "sopra",
    version,
    about = "Validate, infer over and decide with social-practice knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the formal rules and report every violation
    Validate {
        #[command(flatten)]
        input: Input,
        /// Treat warnings as failures
        #[arg(long)]
        strict: bool,
    },
    /// Print inherited value strengths and conflicts
    Infer {
        #[command(flatten)]
        input: Input,
        /// Only rows for this value
        #[arg(long)]
        value: Option<String>,
        /// Only rows for this activity
        #[arg(long)]
        activity: Option<String>,
    },
    /// Choose the actions an agent performs in a context
    Decide {
        #[command(flatten)]
        decision: Decision,
        /// Append the explanation record
        #[arg(long)]
        explain: bool,
    },
    /// Like `decide`, always with the explanation record
    Explain {
        #[command(flatten)]
        decision: Decision,
    },
    /// Ask about agents' views of activities
    Query {
        #[command(flatten)]
        input: Input,
        #[command(subcommand)]
        query: Query,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Scenario file (`.sopra`, or `.json` for the JSON mirror)
    file: PathBuf,
    /// Print JSON instead of text
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args, Debug)]
struct Decision {
    #[command(flatten)]
    input: Input,
    /// Deciding agent
    #[arg(long)]
    agent: String,
    /// Comma-separated present cues; an empty string means none
    #[arg(long, default_value = "")]
    context: String,
    /// Activation at which habit overrides intention
    #[arg(long, default_value_t = 0.5)]
    habit_threshold: f64,
    /// `off` or `personal:<theta>`
    #[arg(long, default_value = "off", value_parser = parse_belief_filter)]
    belief_filter: BeliefFilter,
}

#[derive(Subcommand, Debug)]
enum Query {
    /// Activities the agent believes are widely shared
    SharedViews {
        #[arg(long)]
        agent: String,
        #[arg(long)]
        theta: f64,
    },
    /// Activities the agent itself holds
    PersonalViews {
        #[arg(long)]
        agent: String,
        #[arg(long)]
        theta: f64,
    },
    /// Views two agents hold of the same movement
    CommonGround {
        /// Two agents, comma-separated
        #[arg(long, value_parser = parse_agent_pair)]
        agents: (String, String),
        #[arg(long)]
        theta: f64,
    },
    /// Values the observer expects to be promoted by an activity
    ExpectedValues {
        #[arg(long)]
        observer: String,
        #[arg(long)]
        activity: String,
        #[arg(long)]
        theta: f64,
    },
}

fn parse_belief_filter(s: &str) -> Result<BeliefFilter, String> {
    if s.eq_ignore_ascii_case("off") {
        return Ok(BeliefFilter::Off);
    }
    let theta = s
        .strip_prefix("personal:")
        .ok_or_else(|| format!("expected `off` or `personal:<theta>`, got `{s}`"))?;
    theta
        .parse()
        .map(BeliefFilter::Personal)
        .map_err(|_| format!("malformed threshold `{theta}`"))
}

fn parse_agent_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains(',') => {
            Ok((a.into(), b.into()))
        }
        _ => Err(format!("expected two comma-separated agents, got `{s}`")),
    }
}

fn parse_context(s: &str) -> PerformanceContext {
    PerformanceContext::new(s.split(',').filter(|c| !c.is_empty()))
}

/// Why a scenario could not be loaded.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    /// The file could not be read.
    #[error("cannot read {path}: {source}")]
    Unreadable {
        /// File as given.
        path: String,
        /// Underlying error.
        source: std::io::Error,
    },
    /// The file was read but is not a valid scenario.
    #[error("{path}: cannot parse\n{}", render::parse_errors_text(.errors))]
    Malformed {
        /// File as given.
        path: String,
        /// Every problem found.
        errors: ParseErrors,
    },
}

/// Reads a scenario, choosing the JSON mirror for `.json` files.
pub fn load(path: &Path) -> Result<KnowledgeBase, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Unreadable {
        path: path.display().to_string(),
        source,
    })?;
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let parsed = if is_json {
        json::from_json(&text)
    } else {
        scenario::parse(&text)
    };
    parsed.map_err(|errors| LoadError::Malformed {
        path: path.display().to_string(),
        errors,
    })
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    style: Style,
}

impl Io<'_> {
    fn print(&mut self, text: &str) -> i32 {
        match self.out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => self.fail(EXIT_INPUT, &format!("cannot write output: {e}")),
        }
    }

    fn fail(&mut self, code: i32, message: &str) -> i32 {
        let _ = writeln!(self.err, "error: {}", message.trim_end());
        code
    }
}

/// Loads the file; with `--json`, parse errors also go to stdout as JSON.
fn open(io: &mut Io<'_>, input: &Input) -> Result<KnowledgeBase, i32> {
    load(&input.file).map_err(|e| {
        if let (true, LoadError::Malformed { errors, .. }) = (input.json, &e) {
            let _ = io
                .out
                .write_all(render::parse_errors_json(errors).as_bytes());
        }
        io.fail(EXIT_INPUT, &e.to_string())
    })
}

/// Loads the file and refuses knowledge bases that break the formal rules.
fn load_valid(io: &mut Io<'_>, input: &Input) -> Result<KnowledgeBase, i32> {
    let kb = open(io, input)?;
    let report = sopra_core::validate(&kb);
    if !report.is_valid() {
        let text = render::report_text(&report, io.style);
        return Err(io.fail(EXIT_SEMANTIC, &format!("invalid knowledge base\n{text}")));
    }
    Ok(kb)
}

fn run_command(io: &mut Io<'_>, command: Command) -> i32 {
    match command {
        Command::Validate { input, strict } => {
            let kb = match open(io, &input) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            let report = sopra_core::validate(&kb);
            let text = if input.json {
                render::report_json(&report)
            } else {
                render::report_text(&report, io.style)
            };
            let code = io.print(&text);
            if code != EXIT_OK {
                code
            } else if !report.is_valid() || (strict && report.warning_count() > 0) {
                EXIT_SEMANTIC
            } else {
                EXIT_OK
            }
        }
        Command::Infer {
            input,
            value,
            activity,
        } => {
            let kb = match load_valid(io, &input) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            if let Some(a) = activity.as_deref().filter(|a| kb.activity(a).is_none()) {
                return io.fail(EXIT_SEMANTIC, &format!("unknown activity `{a}`"));
            }
            if let Some(v) = value.as_deref().filter(|v| kb.value(v).is_none()) {
                return io.fail(EXIT_SEMANTIC, &format!("unknown value `{v}`"));
            }
            let table = match sopra_core::infer_related_values(&kb) {
                Ok(t) => t,
                Err(e) => return io.fail(EXIT_SEMANTIC, &e.to_string()),
            };
            let (a, v) = (activity.as_deref(), value.as_deref());
            let rows = render::table_rows(&kb, &table, a, v);
            let text = if input.json {
                render::table_json(&rows, &table, a, v)
            } else {
                render::table_text(&rows, &table, a, v)
            };
            io.print(&text)
        }
        Command::Decide { decision, explain } => run_decision(io, decision, explain),
        Command::Explain { decision } => run_decision(io, decision, true),
        Command::Query { input, query } => {
            let kb = match load_valid(io, &input) {
                Ok(kb) => kb,
                Err(code) => return code,
            };
            let text = match query {
                Query::SharedViews { agent, theta } => sopra_core::shared_views(&kb, &agent, theta)
                    .map(|v| {
                        if input.json {
                            render::views_json(&v)
                        } else {
                            render::views_text(&v)
                        }
                    }),
                Query::PersonalViews { agent, theta } => {
                    sopra_core::personal_views(&kb, &agent, theta).map(|v| {
                        if input.json {
                            render::views_json(&v)
                        } else {
                            render::views_text(&v)
                        }
                    })
                }
                Query::CommonGround {
                    agents: (a, b),
                    theta,
                } => sopra_core::common_ground(&kb, &a, &b, theta).map(|p| {
                    if input.json {
                        render::pairs_json(&p)
                    } else {
                        render::pairs_text(&p)
                    }
                }),
                Query::ExpectedValues {
                    observer,
                    activity,
                    theta,
                } => sopra_core::expected_values(&kb, &observer, &activity, theta).map(|v| {
                    if input.json {
                        render::expected_json(&v)
                    } else {
                        render::expected_text(&v)
                    }
                }),
            };
            match text {
                Ok(t) => io.print(&t),
                Err(e) => io.fail(EXIT_SEMANTIC, &e.to_string()),
            }
        }
    }
}

fn run_decision(io: &mut Io<'_>, d: Decision, with_explanation: bool) -> i32 {
    let kb = match load_valid(io, &d.input) {
        Ok(kb) => kb,
        Err(code) => return code,
    };
    let context = parse_context(&d.context);
    let config = DecisionConfig {
        habit_threshold: d.habit_threshold,
        belief_filter: d.belief_filter,
    };
    let exp = match sopra_core::explain(&kb, &d.agent, &context, &config) {
        Ok(e) => e,
        Err(e) => return io.fail(EXIT_SEMANTIC, &e.to_string()),
    };
    let text = match (d.input.json, with_explanation) {
        (true, true) => render::explanation_json(&exp),
        (true, false) => render::plan_json(&exp.agent, &context.present_cues, &exp.plan),
        (false, true) => render::explanation_text(&exp, io.style),
        (false, false) => render::plan_text(&exp.agent, &context.present_cues, &exp.plan, io.style),
    };
    io.print(&text)
}

/// Runs the command line `args` (program name first) and returns the exit
/// status. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, color: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let mut io = Io {
        out,
        err,
        style: Style { color },
    };
    run_command(&mut io, cli.command)
}
