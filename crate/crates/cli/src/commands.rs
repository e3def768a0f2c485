use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tripsolve::data::{load_database, save_database, Database};
use tripsolve::encoder::{solve_query, EncodingParams, PlanOutcome, SolveLimits};
use tripsolve::plan::{aggregate, undelivered, verify, Plan};
use tripsolve::query::{parse_query, Query};
use tripsolve::repair::{
    policy_from_spec, run_session, Policy, RepairConfig, RepairSession, Response, SessionState, Variant,
};
use tripsolve::scenario::{query_set, suite_params, Cause};
use tripsolve_nl::{translate, ChatError, EndpointConfig};

use crate::error::{exit, AppError};
use crate::http::{serve, AppState, ServiceConfig};
use crate::provider::ProviderKind;
use crate::render;

#[derive(Debug, Parser)]
#[command(name = "tripsolve", version, about = "Plan travel itineraries and repair infeasible requests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Overall solver time limit in seconds.
    #[arg(long, value_name = "S", default_value_t = 120.0)]
    pub time_limit: f64,
    /// Return the cheapest itinerary instead of the first one found.
    #[arg(long)]
    pub optimal: bool,
    /// Try destination tuples on all cores.
    #[arg(long)]
    pub parallel: bool,
}

impl SolveArgs {
    pub fn limits(&self) -> Result<SolveLimits, AppError> {
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(AppError::usage("bad-argument", "--time-limit must be a positive number of seconds"));
        }
        let total = Duration::from_secs_f64(self.time_limit);
        let base = SolveLimits::default();
        Ok(SolveLimits {
            total,
            per_tuple: base.per_tuple.min(total),
            optimal: self.optimal,
            parallel: self.parallel,
            ..base
        })
    }
}

#[derive(Debug, Args)]
pub struct EndpointArgs {
    /// Never contact the chat endpoint; use the offline stub.
    #[arg(long)]
    pub offline: bool,
    #[arg(long, value_name = "URL")]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the endpoint token.
    #[arg(long, value_name = "VAR")]
    pub token_env: Option<String>,
}

impl EndpointArgs {
    pub fn config(&self) -> EndpointConfig {
        let mut cfg = EndpointConfig { offline: self.offline, ..EndpointConfig::default() };
        if let Some(url) = &self.endpoint {
            cfg.base_url = url.clone();
        }
        if let Some(m) = &self.model {
            cfg.model = m.clone();
        }
        if let Some(v) = &self.token_env {
            cfg.token_env = v.clone();
        }
        cfg
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one query and print the itinerary or why there is none.
    Plan {
        query: PathBuf,
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Run a repair session on an infeasible query and print its transcript.
    Repair {
        query: PathBuf,
        #[arg(long)]
        db: PathBuf,
        /// `always-agree`, `hard:<field>`, `interactive`, or `script:<json>`.
        #[arg(long, default_value = "always-agree")]
        policy: String,
        #[arg(long, default_value_t = 10)]
        max_iter: usize,
        #[arg(long, default_value = "full")]
        variant: String,
        #[arg(long, value_enum, default_value_t = ProviderKind::Rules)]
        provider: ProviderKind,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        endpoint: EndpointArgs,
    },
    /// Solve every query in a directory and print the metrics table. A
    /// `<name>.plan.json` next to `<name>.json` is verified instead of solving.
    Eval {
        queries: PathBuf,
        #[arg(long)]
        db: PathBuf,
        /// Print the metrics as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write a synthetic database and seeded queries.
    GenData {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Make every query infeasible for this reason.
        #[arg(long, value_name = "MODE", value_parser = ["budget", "nonstop", "non-stop", "airline", "category"])]
        unsat_mode: Option<String>,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long)]
        db: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Answer `POST /plan` with a job id to poll at `GET /plan/{job}`.
        #[arg(long = "async")]
        asynchronous: bool,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Session lifetime in seconds.
        #[arg(long, default_value_t = 3600)]
        session_ttl: u64,
        #[arg(long, value_enum, default_value_t = ProviderKind::Rules)]
        provider: ProviderKind,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        endpoint: EndpointArgs,
    },
    /// Turn a natural-language request into a query.
    Translate {
        text: PathBuf,
        #[command(flatten)]
        endpoint: EndpointArgs,
    },
}

/// Standard streams, replaceable in tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn read(path: &Path) -> Result<String, AppError> {
    std::fs::read_to_string(path).map_err(|e| AppError::usage("unreadable-file", format!("{}: {e}", path.display())))
}

fn read_query(path: &Path) -> Result<Query, AppError> {
    parse_query(&read(path)?).map_err(|e| AppError { message: format!("{}: {e}", path.display()), ..AppError::query(&e, "") })
}

fn open_db(dir: &Path) -> Result<Database, AppError> {
    load_database(dir).map_err(|e| AppError::usage("bad-database", format!("{}: {e}", dir.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), AppError> {
    writeln!(out, "{text}").map_err(|e| AppError::internal(e.to_string()))
}

/// Runs one command; the value is the exit code.
pub fn run(cli: Cli, io: &mut Io<'_>) -> Result<u8, AppError> {
    match cli.command {
        Command::Plan { query, db, solve } => {
            let q = read_query(&query)?;
            let db = open_db(&db)?;
            let outcome = solve_query(&q, &db, &EncodingParams::default(), &solve.limits()?)
                .map_err(|e| AppError::internal(e.to_string()))?;
            emit(io.stdout, &render::to_text(&render::plan_outcome(&outcome)))?;
            Ok(if outcome.delivered().is_some() { exit::OK } else { exit::UNRESOLVED })
        }
        Command::Repair { query, db, policy, max_iter, variant, provider, solve, endpoint } => {
            let q = read_query(&query)?;
            let db = open_db(&db)?;
            let variant: Variant = variant.parse().map_err(|e: String| AppError::usage("bad-argument", e))?;
            let mut provider = provider.build(&endpoint.config())?;
            let config = RepairConfig { max_iterations: max_iter, variant, limits: solve.limits()?, ..RepairConfig::default() };
            let session = if policy == "interactive" {
                let mut p = Interactive { input: &mut *io.stdin, prompt: &mut *io.stderr };
                run_session(q, &db, provider.as_mut(), &mut p, config)
            } else {
                let spec = if policy == "always-agree" { "agree" } else { policy.as_str() };
                let mut p = policy_from_spec(spec).map_err(|e| AppError::usage("bad-argument", e))?;
                run_session(q, &db, provider.as_mut(), p.as_mut(), config)
            }
            .map_err(|e| AppError::internal(e.to_string()))?;
            emit(io.stdout, &render::to_text(&session.transcript()))?;
            Ok(if session.state == SessionState::Resolved { exit::OK } else { exit::UNRESOLVED })
        }
        Command::Eval { queries, db, json, solve } => {
            let db = open_db(&db)?;
            let metrics = evaluate_dir(&queries, &db, &solve.limits()?)?;
            let text = if json {
                render::to_text(&serde_json::to_value(&metrics).expect("metrics serialize"))
            } else {
                metrics.table().trim_end().to_string()
            };
            emit(io.stdout, &text)?;
            Ok(exit::OK)
        }
        Command::GenData { seed, out, unsat_mode, count } => {
            let cause: Option<Cause> =
                unsat_mode.map(|m| m.parse()).transpose().map_err(|e: String| AppError::usage("bad-argument", e))?;
            let manifest = gen_data(seed, &out, cause, count)?;
            emit(io.stdout, &render::to_text(&manifest))?;
            Ok(exit::OK)
        }
        Command::Serve { db, port, host, asynchronous, workers, session_ttl, provider, solve, endpoint } => {
            let endpoint = endpoint.config();
            if provider == ProviderKind::Chat {
                provider.build(&endpoint)?;
            }
            let limits = solve.limits()?;
            let cfg = ServiceConfig {
                repair: RepairConfig { limits: limits.clone(), ..RepairConfig::default() },
                limits,
                provider,
                endpoint,
                session_ttl: Duration::from_secs(session_ttl),
                workers,
                asynchronous,
                ..ServiceConfig::default()
            };
            let state = AppState::new(open_db(&db)?, cfg);
            let runtime = tokio::runtime::Runtime::new().map_err(|e| AppError::internal(e.to_string()))?;
            runtime
                .block_on(serve(state, SocketAddr::new(host, port)))
                .map_err(|e| AppError::internal(format!("server stopped: {e}")))?;
            Ok(exit::OK)
        }
        Command::Translate { text, endpoint } => {
            let text = read(&text)?;
            let result = translate(&text, &endpoint.config()).map_err(|e| match e {
                ChatError::MissingToken(_) | ChatError::Config(_) => AppError::usage("endpoint-unavailable", e.to_string()),
                e => AppError::internal(e.to_string()),
            })?;
            emit(io.stdout, &render::to_text(&serde_json::to_value(&result).expect("translations serialize")))?;
            Ok(if result.is_valid() { exit::OK } else { exit::UNRESOLVED })
        }
    }
}

/// Query files in `dir`, sorted, skipping saved plans.
fn query_files(dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let entries = std::fs::read_dir(dir).map_err(|e| AppError::usage("unreadable-file", format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.ends_with(".json") && !name.ends_with(".plan.json")
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Plan stored next to a query: either the output of `plan` or a bare plan.
fn saved_plan(path: &Path) -> Result<Option<Option<Plan>>, AppError> {
    let plan_path = path.with_extension("plan.json");
    if !plan_path.exists() {
        return Ok(None);
    }
    let value: serde_json::Value = serde_json::from_str(&read(&plan_path)?)
        .map_err(|e| AppError::usage("invalid-json", format!("{}: {e}", plan_path.display())))?;
    let plan_value = match value.get("status").and_then(|s| s.as_str()) {
        Some("delivered") => &value["plan"],
        Some(_) => return Ok(Some(None)),
        None => &value,
    };
    let plan = Plan::from_json(plan_value)
        .map_err(|e| AppError::usage("schema-violation", format!("{}: {e}", plan_path.display())))?;
    Ok(Some(Some(plan)))
}

pub fn evaluate_dir(dir: &Path, db: &Database, limits: &SolveLimits) -> Result<tripsolve::plan::Metrics, AppError> {
    let params = EncodingParams::default();
    let mut reports = Vec::new();
    for path in query_files(dir)? {
        let q = read_query(&path)?;
        let plan = match saved_plan(&path)? {
            Some(p) => p,
            None => match solve_query(&q, db, &params, limits).map_err(|e| AppError::internal(e.to_string()))? {
                PlanOutcome::Delivered(d) => Some(d.plan),
                _ => None,
            },
        };
        reports.push(match plan {
            Some(p) => (verify(&p, &q, db, &params), true),
            None => (undelivered(&q), false),
        });
    }
    aggregate(&reports).map_err(|e| AppError::usage("no-queries", format!("{}: {e}", dir.display())))
}

/// Writes `out/db/` and `out/queries/query-NN.json`; returns the manifest.
pub fn gen_data(seed: u64, out: &Path, cause: Option<Cause>, count: usize) -> Result<serde_json::Value, AppError> {
    if count == 0 {
        return Err(AppError::usage("bad-argument", "--count must be positive"));
    }
    // Feasible queries are the repaired side of budget scenarios.
    let causes = [cause.unwrap_or(Cause::Budget)];
    let (db_seed, db, pairs) = query_set(seed, &causes, count, &suite_params(), &EncodingParams::default())
        .map_err(|e| AppError::internal(e.to_string()))?;
    let io_err = |e: std::io::Error| AppError::internal(format!("{}: {e}", out.display()));
    save_database(&db, out.join("db")).map_err(|e| AppError::internal(e.to_string()))?;
    let qdir = out.join("queries");
    std::fs::create_dir_all(&qdir).map_err(io_err)?;
    let mut names = Vec::new();
    for (i, (query, base)) in pairs.iter().enumerate() {
        let q = if cause.is_some() { query } else { base };
        let name = format!("query-{i:02}.json");
        std::fs::write(qdir.join(&name), q.to_json_string() + "\n").map_err(io_err)?;
        names.push(format!("queries/{name}"));
    }
    let manifest = json!({
        "seed": seed,
        "db_seed": db_seed,
        "unsat_mode": cause.map(|c| c.as_str()),
        "db": "db",
        "queries": names,
    });
    std::fs::write(out.join("manifest.json"), render::to_text(&manifest) + "\n").map_err(io_err)?;
    Ok(manifest)
}

/// Asks on the terminal: `agree`, `disagree [reason]`, `abort`, or any text
/// (a modification in suggestion wording or a preference).
pub struct Interactive<'a> {
    pub input: &'a mut dyn BufRead,
    pub prompt: &'a mut dyn Write,
}

impl Policy for Interactive<'_> {
    fn respond(&mut self, session: &RepairSession) -> Response {
        let p = &mut *self.prompt;
        let _ = writeln!(p, "\nIteration {}", session.iterations.len() + 1);
        for r in &session.reasons {
            let _ = writeln!(p, "  reason: {}", r.text);
        }
        for s in &session.pending {
            let _ = writeln!(p, "  suggestion: {}", s.modification);
        }
        let _ = write!(p, "agree / disagree [why] / abort / your own edit > ");
        let _ = p.flush();
        let mut line = String::new();
        if self.input.read_line(&mut line).unwrap_or(0) == 0 {
            return Response::Abort;
        }
        let line = line.trim();
        match line.split_once(char::is_whitespace).map_or((line, ""), |(a, b)| (a, b.trim())) {
            ("agree" | "a" | "yes" | "y", "") => Response::Agree,
            ("abort" | "quit" | "q", "") => Response::Abort,
            ("disagree" | "no" | "n", why) => {
                Response::Disagree { feedback: (!why.is_empty()).then(|| why.to_string()) }
            }
            _ => Response::Text { text: line.to_string() },
        }
    }
}
