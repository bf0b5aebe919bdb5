use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::spin::Spin;
use crate::error::{Error, Result};

/// North, east, center. `y` grows northward.
pub const NEC: [(i32, i32); 3] = [(0, 1), (1, 0), (0, 0)];

const MAX_NEIGHBORS: usize = 16;

/// A deterministic local transition rule on binary spins.
///
/// The transition is stored as a lookup table indexed by a bit mask: bit `i`
/// is set when neighbor `i` is up. The table therefore covers every input
/// tuple by construction.
#[derive(Clone, PartialEq, Eq)]
pub struct CARule {
    name: Arc<str>,
    neighborhood: Vec<(i32, i32)>,
    table: Vec<Spin>,
}

impl CARule {
    pub fn from_fn(
        name: &str,
        neighborhood: &[(i32, i32)],
        f: impl Fn(&[Spin]) -> Spin,
    ) -> Result<Self> {
        let k = neighborhood.len();
        if k == 0 || k > MAX_NEIGHBORS {
            return Err(Error::Rule(format!(
                "neighborhood size must be in 1..={MAX_NEIGHBORS}, got {k}"
            )));
        }
        let mut buf = vec![Spin::Down; k];
        let table = (0..1usize << k)
            .map(|mask| {
                for (i, s) in buf.iter_mut().enumerate() {
                    *s = Spin::from_sign(mask >> i & 1 == 1);
                }
                f(&buf)
            })
            .collect();
        Ok(Self {
            name: name.into(),
            neighborhood: neighborhood.to_vec(),
            table,
        })
    }

    pub fn do_nothing() -> Self {
        Self::from_fn("do-nothing", &[(0, 0)], |s| s[0]).expect("static rule")
    }

    pub fn flip() -> Self {
        Self::from_fn("flip", &[(0, 0)], |s| -s[0]).expect("static rule")
    }

    /// Majority vote over NEC.
    pub fn toom() -> Self {
        Self::from_fn("toom", &NEC, majority).expect("static rule")
    }

    /// Anti-majority vote over NEC.
    pub fn pi_toom() -> Self {
        Self::from_fn("pi-toom", &NEC, |s| -majority(s)).expect("static rule")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn neighborhood(&self) -> &[(i32, i32)] {
        &self.neighborhood
    }

    pub fn arity(&self) -> usize {
        self.neighborhood.len()
    }

    pub fn table(&self) -> &[Spin] {
        &self.table
    }

    #[inline]
    pub fn apply_mask(&self, mask: usize) -> Spin {
        self.table[mask]
    }

    pub fn apply(&self, inputs: &[Spin]) -> Spin {
        let mask = inputs
            .iter()
            .enumerate()
            .fold(0usize, |m, (i, s)| m | (s.is_up() as usize) << i);
        self.table[mask]
    }

    /// The rule followed by `then`, cell-wise. Only defined when `then` reads
    /// the center cell alone.
    pub fn then_local(&self, then: &CARule) -> Result<CARule> {
        if then.neighborhood != [(0, 0)] {
            return Err(Error::Rule(format!("`{}` is not a single-site rule", then.name)));
        }
        let name = format!("{}+{}", self.name, then.name);
        CARule::from_fn(&name, &self.neighborhood, |s| then.apply(&[self.apply(s)]))
    }
}

fn majority(s: &[Spin]) -> Spin {
    let sum: i32 = s.iter().map(|v| v.value() as i32).sum();
    Spin::from_sign(sum > 0)
}

impl fmt::Debug for CARule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CARule")
            .field("name", &self.name)
            .field("neighborhood", &self.neighborhood)
            .finish()
    }
}

/// Identifiers for the shipped rules, as used in configs and CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleId {
    DoNothing,
    Flip,
    Toom,
    PiToom,
}

impl RuleId {
    pub const ALL: [RuleId; 4] = [RuleId::DoNothing, RuleId::Flip, RuleId::Toom, RuleId::PiToom];

    pub fn rule(self) -> CARule {
        match self {
            RuleId::DoNothing => CARule::do_nothing(),
            RuleId::Flip => CARule::flip(),
            RuleId::Toom => CARule::toom(),
            RuleId::PiToom => CARule::pi_toom(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::DoNothing => "do-nothing",
            RuleId::Flip => "flip",
            RuleId::Toom => "toom",
            RuleId::PiToom => "pi-toom",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Rule(format!("unknown rule `{s}`")))
    }
}

/// A cyclic sequence of rules; step `t` uses `rules[t % len]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSchedule {
    rules: Vec<CARule>,
}

impl RuleSchedule {
    pub fn new(rules: Vec<CARule>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Rule("empty rule schedule".into()));
        }
        Ok(Self { rules })
    }

    pub fn from_ids(ids: &[RuleId]) -> Result<Self> {
        Self::new(ids.iter().map(|r| r.rule()).collect())
    }

    /// The interleaving a Floquet cycle enacts: the step-two rule, then the
    /// step-four rule.
    pub fn floquet(step2: RuleId, step4: RuleId) -> Self {
        Self {
            rules: vec![step2.rule(), step4.rule()],
        }
    }

    #[inline]
    pub fn at(&self, step: usize) -> &CARule {
        &self.rules[step % self.rules.len()]
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[CARule] {
        &self.rules
    }

    pub fn names(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.name().to_string()).collect()
    }
}

impl From<CARule> for RuleSchedule {
    fn from(rule: CARule) -> Self {
        Self { rules: vec![rule] }
    }
}
