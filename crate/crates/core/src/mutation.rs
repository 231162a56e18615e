//! Seeded kernel bugs for mutation testing of the rule suite.
//!
//! A mutation is active only on the thread that installed it via
//! [`with_mutation`], so anything run under a mutation must stay on that
//! thread (the suite switches to sequential execution).

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// `p` sends `(rho, u)` to (a clamp of) `u` instead of `rho`.
    ProjSecond,
    /// `q` always picks element 0.
    QConstant,
    /// Restriction in `H.T` transports `rho` but leaves `u` untouched.
    ExtendRestrictionBroken,
    /// `(T)sigma` reindexes morphism tables by `rho` instead of `sigma(rho)`.
    TySubstIgnoresSub,
    /// `(t)sigma` reads `t` at `rho` instead of `sigma(rho)`.
    TmSubstIgnoresSub,
    /// `(sigma; u)` drops `u` and pairs with element 0.
    SubPairDropsTerm,
    /// Composition of context maps applies the outer map first when the
    /// contexts allow it.
    SubCompOrder,
    /// `Pi` keeps every candidate table, natural or not.
    PiNoNaturalityFilter,
    /// `Pi` morphism map composes `f` and `g` in the wrong order when possible.
    PiMorphCompOrder,
    /// `app` evaluates at the first non-identity arrow into `I` when one exists.
    AppNonIdentityArrow,
    /// `lambda` does not restrict the environment along the arrow.
    LambdaUnrestricted,
    /// `Sigma` morphism map transports the first component but not the second.
    SigmaMorphDropsSecond,
    /// `pr.1` returns (a clamp of) the second component.
    FstReturnsSnd,
}

impl Mutation {
    pub const ALL: [Mutation; 13] = [
        Mutation::ProjSecond,
        Mutation::QConstant,
        Mutation::ExtendRestrictionBroken,
        Mutation::TySubstIgnoresSub,
        Mutation::TmSubstIgnoresSub,
        Mutation::SubPairDropsTerm,
        Mutation::SubCompOrder,
        Mutation::PiNoNaturalityFilter,
        Mutation::PiMorphCompOrder,
        Mutation::AppNonIdentityArrow,
        Mutation::LambdaUnrestricted,
        Mutation::SigmaMorphDropsSecond,
        Mutation::FstReturnsSnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::ProjSecond => "proj-second",
            Mutation::QConstant => "q-constant",
            Mutation::ExtendRestrictionBroken => "extend-restriction-broken",
            Mutation::TySubstIgnoresSub => "ty-subst-ignores-sub",
            Mutation::TmSubstIgnoresSub => "tm-subst-ignores-sub",
            Mutation::SubPairDropsTerm => "sub-pair-drops-term",
            Mutation::SubCompOrder => "sub-comp-order",
            Mutation::PiNoNaturalityFilter => "pi-no-naturality-filter",
            Mutation::PiMorphCompOrder => "pi-morph-comp-order",
            Mutation::AppNonIdentityArrow => "app-non-identity-arrow",
            Mutation::LambdaUnrestricted => "lambda-unrestricted",
            Mutation::SigmaMorphDropsSecond => "sigma-morph-drops-second",
            Mutation::FstReturnsSnd => "fst-returns-snd",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation `{s}`"))
    }
}

thread_local! {
    static ACTIVE: Cell<Option<Mutation>> = const { Cell::new(None) };
}

/// Runs `f` with `m` installed on the current thread.
pub fn with_mutation<R>(m: Option<Mutation>, f: impl FnOnce() -> R) -> R {
    struct Reset(Option<Mutation>);
    impl Drop for Reset {
        fn drop(&mut self) {
            ACTIVE.with(|a| a.set(self.0));
        }
    }
    let prev = ACTIVE.with(|a| a.replace(m));
    let _reset = Reset(prev);
    f()
}

pub fn current() -> Option<Mutation> {
    ACTIVE.with(Cell::get)
}

#[inline]
pub(crate) fn active(m: Mutation) -> bool {
    ACTIVE.with(|a| a.get() == Some(m))
}

/// `x mod n`, or `x` when `n` is zero. Mutated code uses this to stay in
/// range where it can.
pub(crate) fn clamp(x: usize, n: usize) -> usize {
    if n == 0 {
        x
    } else {
        x % n
    }
}
