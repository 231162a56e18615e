//! The executable rule suite: fixture generation, one check per rule and an
//! aggregate report.

mod check;
mod config;
mod fixture;
mod sample;

use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::Value;

pub use check::{find_rule, Failure, FailureKind, Outcome, Rule, Tables, RULES};
pub use config::{Mode, SuiteConfig};
pub use fixture::{base_family, gen_fixtures, Fixture};
pub use sample::{sample_presheaf, spread, spread_presheaves, spread_terms};

use crate::mutation::{self, Mutation};
use crate::par::Exec;
use crate::{Error, Result};

/// Outcome of one rule on one fixture.
#[derive(Clone, Debug)]
pub struct RuleReport {
    pub id: &'static str,
    pub fixture: String,
    pub outcome: Outcome,
    pub elapsed: Duration,
}

pub fn check_rule(id: &str, fx: &Fixture, cfg: &SuiteConfig) -> Result<RuleReport> {
    let rule = find_rule(id).ok_or_else(|| Error::Load(format!("unknown rule `{id}`")))?;
    let start = Instant::now();
    let outcome = check::run_rule(rule, fx, &check::Env { pi_cap: cfg.pi_cap });
    Ok(RuleReport {
        id: rule.id,
        fixture: fx.digest.clone(),
        outcome,
        elapsed: start.elapsed(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub fixture: String,
    pub kind: FailureKind,
    pub witness: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleSummary {
    pub id: &'static str,
    /// Fixtures on which the rule was checked.
    pub fixtures: usize,
    pub failures: usize,
    /// Fixtures lacking the terms the rule needs, or over budget.
    pub skipped: usize,
    pub first_counterexample: Option<Counterexample>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RuleSummary {
    /// A rule passes when it was checked at least once and never failed.
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.fixtures > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub rules: Vec<RuleSummary>,
    pub total: usize,
    pub passed: usize,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }

    pub fn failures(&self) -> usize {
        self.rules.iter().map(|r| r.failures).sum()
    }

    /// Pretty-printed JSON; byte-stable for a fixed config.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub exec: Exec,
    /// Rule ids to run; all rules when empty.
    pub rules: Vec<String>,
    /// A seeded kernel bug installed while checking (fixtures are built
    /// without it). Forces sequential execution.
    pub mutation: Option<Mutation>,
    /// Stop at the first failure.
    pub fail_fast: bool,
}

fn selected(opts: &RunOptions) -> Result<Vec<&'static Rule>> {
    if opts.rules.is_empty() {
        return Ok(RULES.iter().collect());
    }
    opts.rules
        .iter()
        .map(|id| find_rule(id).ok_or_else(|| Error::Load(format!("unknown rule `{id}`"))))
        .collect()
}

/// Silences the default panic message while mutated code runs; the panic
/// itself is reported as a rule failure.
fn quiet_panics<R>(quiet: bool, f: impl FnOnce() -> R) -> R {
    if !quiet {
        return f();
    }
    let prev = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let r = f();
    std::panic::set_hook(prev);
    r
}

/// Runs the selected rules over every generated fixture. The report is in
/// rule order and, per rule, in canonical fixture order, whatever the
/// execution mode.
pub fn run_suite(cfg: &SuiteConfig, opts: &RunOptions) -> Result<SuiteReport> {
    let rules = selected(opts)?;
    let fixtures = gen_fixtures(cfg, opts.exec)?;
    let env = check::Env { pi_cap: cfg.pi_cap };
    let exec = if opts.mutation.is_some() {
        Exec::Sequential
    } else {
        opts.exec
    };
    let sequential = exec == Exec::Sequential || !Exec::available();

    let cells: Vec<Vec<(Outcome, Duration)>> = quiet_panics(opts.mutation.is_some(), || {
        mutation::with_mutation(opts.mutation, || {
            if sequential && opts.fail_fast {
                let mut out = Vec::new();
                'rules: for rule in &rules {
                    let mut row = Vec::new();
                    for fx in &fixtures {
                        let start = Instant::now();
                        let o = check::run_rule(rule, fx, &env);
                        let failed = matches!(o, Outcome::Fail(_));
                        row.push((o, start.elapsed()));
                        if failed {
                            out.push(row);
                            break 'rules;
                        }
                    }
                    out.push(row);
                }
                out
            } else {
                crate::par::map(exec, &rules, |rule| {
                    crate::par::map(exec, &fixtures, |fx| {
                        let start = Instant::now();
                        (check::run_rule(rule, fx, &env), start.elapsed())
                    })
                })
            }
        })
    });

    let mut summaries = Vec::with_capacity(rules.len());
    for (k, rule) in rules.iter().enumerate() {
        let row = cells.get(k).map(Vec::as_slice).unwrap_or(&[]);
        let mut s = RuleSummary {
            id: rule.id,
            fixtures: 0,
            failures: 0,
            skipped: 0,
            first_counterexample: None,
            elapsed: Duration::ZERO,
        };
        for ((outcome, dt), fx) in row.iter().zip(&fixtures) {
            s.elapsed += *dt;
            match outcome {
                Outcome::Pass => s.fixtures += 1,
                Outcome::Skip(_) => s.skipped += 1,
                Outcome::Fail(f) => {
                    s.fixtures += 1;
                    s.failures += 1;
                    if s.first_counterexample.is_none() {
                        s.first_counterexample = Some(Counterexample {
                            fixture: fx.digest.clone(),
                            kind: f.kind,
                            witness: f.witness.clone(),
                            lhs: f.lhs.clone(),
                            rhs: f.rhs.clone(),
                        });
                    }
                }
            }
        }
        summaries.push(s);
    }
    let passed = summaries.iter().filter(|s| s.passed()).count();
    Ok(SuiteReport {
        total: summaries.len(),
        passed,
        rules: summaries,
    })
}
