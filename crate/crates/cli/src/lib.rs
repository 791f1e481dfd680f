//! Commands behind the `attrex` binary.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use attrex_core::engine::{self, minimal_realizer_report};
use attrex_core::expert::{validate_expert, ExpertReport};
use attrex_core::format::{self, ImplicationRecord};
use attrex_core::logic::{self, DEFAULT_ENUMERATION_LIMIT};
use attrex_core::session::{verify_journal, SessionManager};
use attrex_core::{ExplorationBase, ExplorationSchema, Implication, MaskPolicy, Termination};

#[derive(Debug, Parser)]
#[command(
    name = "attrex",
    version,
    about = "Attribute exploration with partial counter-examples"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Explore a scripted domain and write the results to a directory.
    Explore(ExploreArgs),
    /// Host interactive sessions over HTTP.
    Serve(ServeArgs),
    /// Rebuild a base from its journal and check every recorded step.
    Replay(ReplayArgs),
    /// Summarize the base recorded in a journal.
    Report(ReportArgs),
    /// Check a scripted domain against the expert axioms.
    ValidateExpert(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MaskArgs {
    /// Masking policy: `none`, `random`, or `hide:a,b` (overrides the domain file).
    #[arg(long)]
    pub mask: Option<String>,
    /// Seed for the `random` policy.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct ExploreArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub domain: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Maximum number of questions.
    #[arg(long)]
    pub budget: Option<usize>,
    #[command(flatten)]
    pub mask: MaskArgs,
    /// Largest universe for which the minimal realizer is enumerated.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub max_enum: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory holding session journals; sessions stay in memory without it.
    #[arg(long)]
    pub journal: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub journal: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub journal: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub max_enum: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub schema: PathBuf,
    #[arg(long)]
    pub domain: PathBuf,
    #[command(flatten)]
    pub mask: MaskArgs,
    /// Journal whose validated implications counter-examples must respect.
    #[arg(long)]
    pub journal: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub max_enum: usize,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Explore(args) => {
            let summary = cmd_explore(&args)?;
            writeln!(
                out,
                "{}: {} questions, {} implications written to {}",
                summary.status,
                summary.question_count,
                summary.implications,
                args.out.display()
            )?;
            Ok(())
        }
        Command::Serve(args) => cmd_serve(&args),
        Command::Replay(args) => cmd_replay(&args, out),
        Command::Report(args) => cmd_report(&args, out),
        Command::ValidateExpert(args) => cmd_validate_expert(&args, out),
    }
}

/// Resolves the policy from the flags, falling back to the domain file.
pub fn resolve_mask(
    args: &MaskArgs,
    schema: &ExplorationSchema,
    from_file: MaskPolicy,
) -> Result<MaskPolicy> {
    let Some(spec) = args.mask.as_deref() else {
        if args.seed.is_some() {
            bail!("--seed needs --mask random");
        }
        return Ok(from_file);
    };
    Ok(match spec {
        "none" => MaskPolicy::None,
        "random" => MaskPolicy::PerQueryRandom {
            seed: args.seed.context("--mask random needs --seed")?,
        },
        other => {
            let names = other
                .strip_prefix("hide:")
                .with_context(|| format!("unknown mask policy {other:?}"))?;
            let names: Vec<&str> = names
                .split(',')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .collect();
            MaskPolicy::FixedHideSet(schema.set_of(names)?)
        }
    })
}

fn load_domain(
    schema: &ExplorationSchema,
    domain: &Path,
    mask: &MaskArgs,
) -> Result<attrex_core::ScriptedDomain> {
    let file = format::load_domain_file(domain)
        .with_context(|| format!("reading {}", domain.display()))?;
    let policy = resolve_mask(mask, schema, file.mask.decode(schema)?)?;
    Ok(attrex_core::ScriptedDomain::new(
        schema,
        file.member_sets(schema)?,
        policy,
    )?)
}

fn load_schema(path: &Path) -> Result<ExplorationSchema> {
    format::load_schema(path).with_context(|| format!("reading schema {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExploreSummary {
    pub status: &'static str,
    pub question_count: usize,
    pub implications: usize,
    pub examples: usize,
    pub order_violations: usize,
    pub minimal_realizer: &'static str,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Runs the exploration and writes `journal.jsonl`, `implications.txt`,
/// `implications.json`, `summary.json` and, when the universe is within
/// `max_enum`, `minimal_realizer.json` into `out`.
pub fn cmd_explore(args: &ExploreArgs) -> Result<ExploreSummary> {
    let schema = load_schema(&args.schema)?;
    let mut domain = load_domain(&schema, &args.domain, &args.mask)?;
    let result = engine::explore(&schema, &mut domain, Vec::new(), args.budget)
        .context("exploration failed")?;

    fs::create_dir_all(&args.out)?;
    let mut journal = Vec::new();
    format::write_journal(&mut journal, &schema, result.final_base.journal())?;
    fs::write(args.out.join("journal.jsonl"), journal)?;

    let lines: String = result
        .validated
        .iter()
        .map(|i| format::implication_line(&schema, i) + "\n")
        .collect();
    fs::write(args.out.join("implications.txt"), lines)?;
    let records: Vec<_> = result
        .validated
        .iter()
        .map(|i| ImplicationRecord::encode(&schema, i))
        .collect();
    write_json(&args.out.join("implications.json"), &records)?;

    let realizer = if schema.len() <= args.max_enum {
        let sets = minimal_realizer_report(
            &result.validated,
            schema.background(),
            schema.len(),
            args.max_enum,
        )?;
        let named: Vec<_> = sets.iter().map(|s| schema.names_of(s)).collect();
        write_json(&args.out.join("minimal_realizer.json"), &named)?;
        "written"
    } else {
        log::info!(
            "skipping minimal realizer: {} attributes exceed --max-enum",
            schema.len()
        );
        "skipped"
    };

    let summary = ExploreSummary {
        status: match result.terminated {
            Termination::Complete => "complete",
            Termination::BudgetExhausted => "budget_exhausted",
        },
        question_count: result.question_count,
        implications: result.validated.len(),
        examples: result.final_base.examples().len(),
        order_violations: result.order_violations,
        minimal_realizer: realizer,
    };
    write_json(&args.out.join("summary.json"), &summary)?;
    Ok(summary)
}

pub fn cmd_serve(args: &ServeArgs) -> Result<()> {
    let manager = match &args.journal {
        Some(dir) => {
            SessionManager::persistent(dir).with_context(|| format!("opening {}", dir.display()))?
        }
        None => SessionManager::in_memory(),
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async {
        let addr = SocketAddr::from(([127, 0, 0, 1], args.port));
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .with_context(|| format!("binding {addr}"))?;
        log::info!("serving sessions on http://{}", listener.local_addr()?);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        attrex_server::serve(listener, Arc::new(manager), shutdown).await?;
        Ok(())
    })
}

fn write_base(
    out: &mut dyn Write,
    schema: &ExplorationSchema,
    base: &ExplorationBase,
) -> Result<()> {
    writeln!(out, "implications ({}):", base.implications().len())?;
    for imp in base.implications() {
        writeln!(out, "  {}", format::implication_line(schema, imp))?;
    }
    writeln!(out, "examples ({}):", base.examples().len())?;
    for ex in base.examples() {
        writeln!(out, "  {}", ex.format(schema))?;
    }
    Ok(())
}

pub fn cmd_replay(args: &ReplayArgs, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(&args.schema)?;
    let entries = format::load_journal(&args.journal, &schema)?;
    let report = verify_journal(&schema, &entries);
    write_base(out, &schema, &report.base)?;
    if let Some(d) = report.divergence {
        bail!("divergence at seq {}: {}", d.seq, d.reason);
    }
    let state = if report.complete {
        "complete"
    } else if report.truncated {
        "stopped inside a normalization pass"
    } else {
        "awaiting an answer"
    };
    writeln!(out, "replay clean: {} entries, {state}", report.entries)?;
    Ok(())
}

pub fn cmd_report(args: &ReportArgs, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(&args.schema)?;
    let entries = format::load_journal(&args.journal, &schema)?;
    let exploration = attrex_core::Exploration::resume(schema.clone(), &entries)?;
    let base = exploration.base();
    write_base(out, &schema, base)?;
    writeln!(out, "consistent: {}", base.is_consistent(&schema))?;
    match exploration.question() {
        Some(q) => writeln!(out, "next question: {}", q.implication().display(&schema))?,
        None => writeln!(out, "exploration complete")?,
    }
    if schema.len() <= args.max_enum {
        let sets = minimal_realizer_report(
            base.implications(),
            schema.background(),
            schema.len(),
            args.max_enum,
        )?;
        writeln!(out, "minimal realizer ({}):", sets.len())?;
        for s in &sets {
            writeln!(out, "  {}", schema.format_set(s))?;
        }
    }
    Ok(())
}

/// Every query `A -> A ∪ {m}` with `m ∉ A`.
pub fn single_attribute_queries(universe: usize, limit: usize) -> Result<Vec<Implication>> {
    let mut queries = Vec::new();
    for a in logic::power_set(universe, limit)? {
        for m in (0..universe).filter(|m| !a.contains(*m)) {
            let mut s = a.clone();
            s.insert(m);
            queries.push(Implication::new(a.clone(), s));
        }
    }
    Ok(queries)
}

pub fn cmd_validate_expert(args: &ValidateArgs, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(&args.schema)?;
    let mut domain = load_domain(&schema, &args.domain, &args.mask)?;
    let validated = match &args.journal {
        Some(path) => ExplorationBase::replay(&format::load_journal(path, &schema)?)?
            .implications()
            .to_vec(),
        None => Vec::new(),
    };
    let queries = single_attribute_queries(schema.len(), args.max_enum)?;
    let report: ExpertReport = validate_expert(&mut domain, &schema, &validated, &queries);
    for v in &report.violations {
        let condition = serde_json::to_value(v.condition)?;
        writeln!(
            out,
            "violation of condition {} on {}: {}",
            condition.as_str().unwrap_or_default(),
            v.query.display(&schema),
            v.evidence
        )?;
    }
    if !report.is_clean() {
        bail!(
            "{} violations over {} queries",
            report.violations.len(),
            report.checked_queries
        );
    }
    writeln!(out, "expert clean over {} queries", report.checked_queries)?;
    Ok(())
}
