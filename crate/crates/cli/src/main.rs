//! `presheaf-cwf`: validation, the rule suite, Yoneda checking, enumeration
//! and script evaluation from the command line.
//!
//! Exit status: 0 success, 1 a law or rule failed, 2 bad input, 3 an
//! enumeration budget ran out.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use presheaf_cwf::mutation::Mutation;
use presheaf_cwf::par::Exec;
use presheaf_cwf::rules::{Mode, SuiteConfig};
use presheaf_cwf::Error;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "presheaf-cwf",
    version,
    about = "Presheaf models of dependent type theory over finite categories"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Config file with default caps (JSON); flags override it.
    #[arg(long, global = true, env = "PRESHEAF_CWF_CAP_DEFAULTS")]
    config: Option<PathBuf>,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate category, presheaf, type and term documents.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Check the Yoneda lemma on every pair of objects of a category.
    Yoneda {
        /// A builtin category name or a category document.
        category: String,
        /// Bound on the presheaf maps enumerated per pair.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Run the structural and type-former rule suite.
    Rules(RulesArgs),
    /// Evaluate the terms of a script.
    Eval(EvalArgs),
    /// Count (and optionally list) functors, natural transformations, terms
    /// or Pi elements.
    Enumerate {
        #[command(subcommand)]
        what: Enumerate,
    },
}

#[derive(Args)]
pub struct RulesArgs {
    /// Run only this rule (repeatable).
    #[arg(long = "rule")]
    pub rules: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub max_objects: Option<usize>,
    #[arg(long)]
    pub max_arrows: Option<usize>,
    #[arg(long)]
    pub max_set: Option<usize>,
    #[arg(long)]
    pub pi_cap: Option<usize>,
    /// Install a seeded kernel bug while checking.
    #[arg(long)]
    pub mutation: Option<Mutation>,
    /// Stop at the first failing fixture.
    #[arg(long)]
    pub fail_fast: bool,
}

#[derive(Args)]
pub struct EvalArgs {
    pub script: PathBuf,
    /// The term to print; defaults to the script's `eval` commands, or its
    /// last term.
    #[arg(long)]
    pub term: Option<String>,
    /// Object to evaluate at (name or index).
    #[arg(long)]
    pub at: Option<String>,
    /// Context element at that object.
    #[arg(long, requires = "at")]
    pub env: Option<usize>,
    #[arg(long)]
    pub pi_cap: Option<usize>,
}

#[derive(Args)]
pub struct ListArgs {
    /// Enumeration budget.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Print every item in canonical order.
    #[arg(long)]
    pub list: bool,
}

#[derive(Subcommand)]
pub enum Enumerate {
    /// Functors between two categories.
    Functors {
        source: String,
        target: String,
        #[command(flatten)]
        opts: ListArgs,
    },
    /// Natural transformations between functors, by their index in the
    /// functor enumeration; all pairs when no indices are given.
    Nattrans {
        source: String,
        target: String,
        #[arg(long, requires = "to")]
        from: Option<usize>,
        #[arg(long, requires = "from")]
        to: Option<usize>,
        #[command(flatten)]
        opts: ListArgs,
    },
    /// Terms of a type document.
    Terms {
        ty: PathBuf,
        #[command(flatten)]
        opts: ListArgs,
    },
    /// Elements of `Pi(A, B)` per fiber, for `B` over the extension by `A`.
    PiElements {
        dom: PathBuf,
        cod: PathBuf,
        #[arg(long)]
        pi_cap: Option<usize>,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Fail = 1,
    Input = 2,
    Budget = 3,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Fail
        }
    }
}

/// Shared settings for every subcommand.
pub struct Ctx {
    pub json: bool,
    pub exec: Exec,
    pub config: SuiteConfig,
}

fn load_config(path: Option<&PathBuf>) -> presheaf_cwf::Result<SuiteConfig> {
    let Some(path) = path else {
        return Ok(SuiteConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    let cfg: SuiteConfig =
        serde_json::from_str(&text).map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    cfg.check()
        .map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

fn report_error(e: &Error, json: bool) -> Status {
    let status = match e {
        Error::BudgetExceeded { .. } => Status::Budget,
        _ => Status::Input,
    };
    if json {
        let v = match e {
            Error::Script { line, col, message } => {
                json!({"line": line, "col": col, "message": message})
            }
            Error::BudgetExceeded { what, cap, partial } => {
                json!({"message": e.to_string(), "budget": {"what": what, "cap": cap, "partial": partial}})
            }
            _ => json!({"message": e.to_string()}),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "error": v })).expect("json")
        );
    } else {
        eprintln!("error: {e}");
    }
    status
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> presheaf_cwf::Result<Status> {
        let ctx = Ctx {
            json: cli.json,
            exec: if cli.sequential {
                Exec::Sequential
            } else {
                Exec::Parallel
            },
            config: load_config(cli.config.as_ref())?,
        };
        match &cli.cmd {
            Cmd::Validate { paths } => Ok(commands::validate(&ctx, paths)),
            Cmd::Yoneda { category, cap } => commands::yoneda(&ctx, category, *cap),
            Cmd::Rules(args) => commands::rules(&ctx, args),
            Cmd::Eval(args) => commands::eval(&ctx, args),
            Cmd::Enumerate { what } => commands::enumerate(&ctx, what),
        }
    };
    let status = run().unwrap_or_else(|e| report_error(&e, cli.json));
    ExitCode::from(status as u8)
}
