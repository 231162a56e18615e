use serde::{Deserialize, Serialize};

use crate::formers::DEFAULT_PI_CAP;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every base category of the family, with contexts spread evenly over
    /// their canonical enumeration.
    #[default]
    Exhaustive,
    /// Seeded rejection sampling throughout.
    Random,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "random" => Ok(Mode::Random),
            _ => Err(format!(
                "unknown mode `{s}` (expected exhaustive or random)"
            )),
        }
    }
}

/// Size caps and sampling knobs of the rule suite. Every field has a
/// default, so a config file only needs the keys it changes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Base categories: all categories up to isomorphism within these bounds.
    pub max_objects: usize,
    /// Arrow bound, identities included.
    pub max_arrows: usize,
    /// Bound on every context set, type fiber and raw table codomain.
    pub max_set: usize,
    /// Raw candidate tables allowed per `Pi` fiber.
    pub pi_cap: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Named categories added to the generated family.
    pub extra_bases: Vec<String>,
    /// Contexts kept per base category.
    pub contexts_per_base: usize,
    /// Fixtures per base category (exhaustive mode).
    pub fixtures_per_base: usize,
    /// Fixtures in total (random mode).
    pub random_fixtures: usize,
    /// Terms of each kind kept per fixture.
    pub terms_per_fixture: usize,
    /// Terms scanned before choosing the kept ones.
    pub term_scan: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            max_objects: 2,
            max_arrows: 4,
            max_set: 3,
            pi_cap: DEFAULT_PI_CAP,
            seed: 0,
            mode: Mode::Exhaustive,
            extra_bases: vec!["chain3".to_string()],
            contexts_per_base: 6,
            fixtures_per_base: 6,
            random_fixtures: 200,
            terms_per_fixture: 3,
            term_scan: 512,
        }
    }
}

impl SuiteConfig {
    pub fn check(&self) -> Result<(), String> {
        let positive = [
            ("max_arrows", self.max_arrows),
            ("max_set", self.max_set),
            ("pi_cap", self.pi_cap),
            ("contexts_per_base", self.contexts_per_base),
            ("fixtures_per_base", self.fixtures_per_base),
            ("random_fixtures", self.random_fixtures),
            ("terms_per_fixture", self.terms_per_fixture),
            ("term_scan", self.term_scan),
        ];
        match positive.iter().find(|(_, v)| *v == 0) {
            Some((k, _)) => Err(format!("`{k}` must be positive")),
            None => Ok(()),
        }
    }
}
