//! Agent behaviour: private states, pure strategies, and the exact best
//! response by backward induction.
//!
//! Ties are broken the same way everywhere: a testing tie follows the
//! principal's recommendation and a disclosure tie reveals.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::params::{Params, Report};
use crate::rat::Rat;

/// What the agent learned about the state of one period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    NoSignal,
    Saw0,
    Saw1,
}

impl Observation {
    pub fn saw(omega: bool) -> Observation {
        if omega {
            Observation::Saw1
        } else {
            Observation::Saw0
        }
    }

    pub fn state(self) -> Option<bool> {
        match self {
            Observation::NoSignal => None,
            Observation::Saw0 => Some(false),
            Observation::Saw1 => Some(true),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Observation::NoSignal => "none",
            Observation::Saw0 => "saw0",
            Observation::Saw1 => "saw1",
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The agent's information at the start of period two: what it observed in
/// period one and what it reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrivateState {
    pub o1: Observation,
    pub r1: Report,
}

impl PrivateState {
    /// The five consistent states in canonical order.
    pub const ALL: [PrivateState; 5] = [
        PrivateState { o1: Observation::NoSignal, r1: Report::Null },
        PrivateState { o1: Observation::Saw0, r1: Report::Null },
        PrivateState { o1: Observation::Saw0, r1: Report::Low },
        PrivateState { o1: Observation::Saw1, r1: Report::Null },
        PrivateState { o1: Observation::Saw1, r1: Report::High },
    ];

    pub fn new(o1: Observation, r1: Report) -> Option<PrivateState> {
        let ok = match r1 {
            Report::Null => true,
            Report::Low => o1 == Observation::Saw0,
            Report::High => o1 == Observation::Saw1,
        };
        ok.then_some(PrivateState { o1, r1 })
    }

    pub fn index(self) -> usize {
        match (self.o1, self.r1) {
            (Observation::NoSignal, _) => 0,
            (Observation::Saw0, Report::Null) => 1,
            (Observation::Saw0, _) => 2,
            (Observation::Saw1, Report::Null) => 3,
            (Observation::Saw1, _) => 4,
        }
    }

    /// State reached after observing `omega1` and choosing whether to reveal it.
    pub fn after_first(omega1: bool, reveal: bool) -> PrivateState {
        let r1 = if reveal { Report::of_state(omega1) } else { Report::Null };
        PrivateState { o1: Observation::saw(omega1), r1 }
    }

    pub const NO_SIGNAL: PrivateState = PrivateState::ALL[0];

    pub fn tag(self) -> &'static str {
        ["none_null", "saw0_null", "saw0_low", "saw1_null", "saw1_high"][self.index()]
    }
}

impl fmt::Display for PrivateState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.o1, self.r1)
    }
}

/// Belief that `omega2 = 1` held privately in `state`.
pub fn private_belief(params: &Params, state: PrivateState) -> Rat {
    match state.o1 {
        Observation::Saw1 => params.rho(),
        Observation::Saw0 => params.rho().complement(),
        Observation::NoSignal => params.mu2_null(),
    }
}

/// Probability of `omega = 1` being `mu`, as a distribution over `{0, 1}`.
fn weight(mu: Rat, omega: bool) -> Rat {
    if omega {
        mu
    } else {
        mu.complement()
    }
}

/// A complete contingent plan.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentStrategy {
    pub e1: bool,
    /// Reveal the first-period state, indexed by `omega1`.
    pub d1: [bool; 2],
    /// Second-period test, indexed by [`PrivateState::index`].
    pub e2: [bool; 5],
    /// Reveal the second-period state, indexed by state then `omega2`.
    pub d2: [[bool; 2]; 5],
}

/// Number of pure strategies, `2 * 4 * 2^5 * 2^10`.
pub const STRATEGY_COUNT: u32 = 1 << 18;

impl AgentStrategy {
    /// Names of the flat record fields, in bit order.
    pub const FIELDS: [&'static str; 18] = [
        "e1",
        "d1_saw0",
        "d1_saw1",
        "e2_none_null",
        "e2_saw0_null",
        "e2_saw0_low",
        "e2_saw1_null",
        "e2_saw1_high",
        "d2_none_null_w0",
        "d2_none_null_w1",
        "d2_saw0_null_w0",
        "d2_saw0_null_w1",
        "d2_saw0_low_w0",
        "d2_saw0_low_w1",
        "d2_saw1_null_w0",
        "d2_saw1_null_w1",
        "d2_saw1_high_w0",
        "d2_saw1_high_w1",
    ];

    pub fn e2_at(&self, s: PrivateState) -> bool {
        self.e2[s.index()]
    }

    pub fn d1_at(&self, omega1: bool) -> bool {
        self.d1[omega1 as usize]
    }

    pub fn d2_at(&self, s: PrivateState, omega2: bool) -> bool {
        self.d2[s.index()][omega2 as usize]
    }

    /// Second report sent in `s` after observing `omega2`.
    pub fn report2(&self, s: PrivateState, omega2: bool) -> Report {
        if self.d2_at(s, omega2) {
            Report::of_state(omega2)
        } else {
            Report::Null
        }
    }

    /// State reached after observing `omega1`.
    pub fn first_state(&self, omega1: bool) -> PrivateState {
        PrivateState::after_first(omega1, self.d1_at(omega1))
    }

    pub fn to_bits(&self) -> [bool; 18] {
        let mut b = [false; 18];
        b[0] = self.e1;
        b[1] = self.d1[0];
        b[2] = self.d1[1];
        b[3..8].copy_from_slice(&self.e2);
        for (i, d) in self.d2.iter().enumerate() {
            b[8 + 2 * i] = d[0];
            b[9 + 2 * i] = d[1];
        }
        b
    }

    pub fn from_bits(b: [bool; 18]) -> AgentStrategy {
        let mut s = AgentStrategy {
            e1: b[0],
            d1: [b[1], b[2]],
            ..Default::default()
        };
        s.e2.copy_from_slice(&b[3..8]);
        for i in 0..5 {
            s.d2[i] = [b[8 + 2 * i], b[9 + 2 * i]];
        }
        s
    }

    /// Packs the flat record into an integer, field `i` at bit `i`.
    pub fn index(&self) -> u32 {
        self.to_bits()
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u32) << i)
    }

    pub fn from_index(index: u32) -> AgentStrategy {
        assert!(index < STRATEGY_COUNT, "strategy index {index} out of range");
        let mut b = [false; 18];
        for (i, bit) in b.iter_mut().enumerate() {
            *bit = index >> i & 1 == 1;
        }
        AgentStrategy::from_bits(b)
    }

    pub fn to_record(&self) -> BTreeMap<&'static str, u8> {
        Self::FIELDS
            .iter()
            .zip(self.to_bits())
            .map(|(&k, b)| (k, b as u8))
            .collect()
    }

    /// Fields in record order as `name=bit` pairs.
    pub fn flat_string(&self) -> String {
        Self::FIELDS
            .iter()
            .zip(self.to_bits())
            .map(|(k, b)| format!("{k}={}", b as u8))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn fully_discloses(&self) -> bool {
        self.d1 == [true, true] && self.d2.iter().all(|d| *d == [true, true])
    }
}

impl Serialize for AgentStrategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(18))?;
        for (k, b) in Self::FIELDS.iter().zip(self.to_bits()) {
            map.serialize_entry(k, &(b as u8))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for AgentStrategy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, u8>::deserialize(d)?;
        strategy_from_map(&raw).map_err(serde::de::Error::custom)
    }
}

fn strategy_from_map(raw: &BTreeMap<String, u8>) -> Result<AgentStrategy> {
    if let Some(k) = raw.keys().find(|k| !AgentStrategy::FIELDS.contains(&k.as_str())) {
        return Err(Error::InvalidStrategy(format!("unknown field {k:?}")));
    }
    let mut b = [false; 18];
    for (i, name) in AgentStrategy::FIELDS.iter().enumerate() {
        b[i] = match raw.get(*name) {
            Some(0) => false,
            Some(1) => true,
            Some(v) => return Err(Error::InvalidStrategy(format!("{name} = {v} is not 0 or 1"))),
            None => return Err(Error::InvalidStrategy(format!("missing field {name:?}"))),
        };
    }
    Ok(AgentStrategy::from_bits(b))
}

impl fmt::Display for AgentStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.flat_string())
    }
}

/// Exact values under the best response.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValueTable {
    /// Optimal continuation value at the start of period two, by state.
    pub v2: [Rat; 5],
    /// Ex-ante value.
    pub v0: Rat,
}

impl ValueTable {
    pub fn at(&self, s: PrivateState) -> Rat {
        self.v2[s.index()]
    }
}

/// Second-period payoff in state `s` for a fixed test decision and disclosure rule.
pub fn second_period_value(
    params: &Params,
    mech: &Mechanism,
    s: PrivateState,
    e2: bool,
    reveal: [bool; 2],
) -> Rat {
    let mu = private_belief(params, s);
    let x = |omega: bool| {
        let r2 = if reveal[omega as usize] { Report::of_state(omega) } else { Report::Null };
        Rat::from_bit(mech.xhat(s.r1, r2))
    };
    let informed = weight(mu, true) * x(true) + weight(mu, false) * x(false);
    if e2 {
        informed - params.c()
    } else {
        params.pi() * informed + params.pi().complement() * Rat::from_bit(mech.xhat(s.r1, Report::Null))
    }
}

/// Expected agent payoff of an arbitrary pure strategy.
pub fn strategy_value(params: &Params, mech: &Mechanism, strat: &AgentStrategy) -> Rat {
    let local = |s: PrivateState| second_period_value(params, mech, s, strat.e2_at(s), strat.d2[s.index()]);
    let informed: Rat = [false, true]
        .iter()
        .map(|&w| weight(params.mu0(), w) * local(strat.first_state(w)))
        .sum();
    let uninformed = local(PrivateState::NO_SIGNAL);
    if strat.e1 {
        informed - params.c()
    } else {
        params.pi() * informed + params.pi().complement() * uninformed
    }
}

/// Backward induction with the tie rule.
pub fn best_response(params: &Params, mech: &Mechanism) -> (AgentStrategy, ValueTable) {
    let c = params.c();
    let pi = params.pi();
    let mut strat = AgentStrategy::default();
    let mut v2 = [Rat::ZERO; 5];

    for s in PrivateState::ALL {
        let i = s.index();
        let mu = private_belief(params, s);
        let x_null = mech.xhat(s.r1, Report::Null);
        let mut best = Rat::ZERO;
        for omega in [false, true] {
            let x_rev = mech.xhat(s.r1, Report::of_state(omega));
            let reveal = x_rev >= x_null;
            strat.d2[i][omega as usize] = reveal;
            best = best + weight(mu, omega) * Rat::from_bit(x_rev.max(x_null));
        }
        let test = best - c;
        let skip = pi * best + pi.complement() * Rat::from_bit(x_null);
        let e2 = test > skip || (test == skip && mech.sigma2(s.r1));
        strat.e2[i] = e2;
        v2[i] = if e2 { test } else { skip };
    }

    let mut informed = Rat::ZERO;
    for omega in [false, true] {
        let shown = v2[PrivateState::after_first(omega, true).index()];
        let hidden = v2[PrivateState::after_first(omega, false).index()];
        strat.d1[omega as usize] = shown >= hidden;
        informed = informed + weight(params.mu0(), omega) * shown.max(hidden);
    }
    let test = informed - c;
    let skip = pi * informed + pi.complement() * v2[PrivateState::NO_SIGNAL.index()];
    strat.e1 = test > skip || (test == skip && mech.sigma1);
    let v0 = if strat.e1 { test } else { skip };

    (strat, ValueTable { v2, v0 })
}

/// Best value attainable when the first-period test decision is fixed to `e1`.
pub fn value_given_first_period_test(params: &Params, mech: &Mechanism, e1: bool) -> Rat {
    let (_, table) = best_response(params, mech);
    let informed: Rat = [false, true]
        .iter()
        .map(|&w| {
            let shown = table.at(PrivateState::after_first(w, true));
            let hidden = table.at(PrivateState::after_first(w, false));
            weight(params.mu0(), w) * shown.max(hidden)
        })
        .sum();
    if e1 {
        informed - params.c()
    } else {
        params.pi() * informed + params.pi().complement() * table.at(PrivateState::NO_SIGNAL)
    }
}

/// The closed-form continuation value `v(r1, mu2)` of an obedient, fully disclosing agent.
pub fn continuation_value(params: &Params, mech: &Mechanism, r1: Report, mu2: Rat) -> Rat {
    let s2 = Rat::from_bit(mech.sigma2(r1));
    let pi = params.pi();
    let x = |r2| Rat::from_bit(mech.xhat(r1, r2));
    -params.c() * s2
        + (s2 + s2.complement() * pi) * (mu2 * x(Report::High) + mu2.complement() * x(Report::Low))
        + s2.complement() * pi.complement() * x(Report::Null)
}

/// Follow every recommendation and reveal everything.
pub fn obedient_strategy(mech: &Mechanism) -> AgentStrategy {
    AgentStrategy {
        e1: mech.sigma1,
        d1: [true, true],
        e2: PrivateState::ALL.map(|s| mech.sigma2(s.r1)),
        d2: [[true, true]; 5],
    }
}

/// Test in period one, hide bad news, never test again, reveal only a high second state.
pub fn deviation_def3() -> AgentStrategy {
    AgentStrategy {
        e1: true,
        d1: [false, true],
        e2: [false; 5],
        d2: [[false, true]; 5],
    }
}

/// Like [`deviation_def3`] but re-test after hiding a low first state, revealing
/// everything after that test.
pub fn deviation_defc1() -> AgentStrategy {
    let hidden_low = PrivateState::after_first(false, false).index();
    let mut s = deviation_def3();
    s.e2[hidden_low] = true;
    s.d2[hidden_low] = [true, true];
    s
}

/// Skip the first test, reveal only a high first state, follow every
/// second-period recommendation and disclose optimally in period two.
pub fn obedient_no_first_test(mech: &Mechanism) -> AgentStrategy {
    let mut s = AgentStrategy {
        e1: false,
        d1: [false, true],
        e2: PrivateState::ALL.map(|s| mech.sigma2(s.r1)),
        d2: [[true, true]; 5],
    };
    for st in PrivateState::ALL {
        for w in [false, true] {
            s.d2[st.index()][w as usize] =
                mech.xhat(st.r1, Report::of_state(w)) >= mech.xhat(st.r1, Report::Null);
        }
    }
    s
}

/// Where `strat` is consulted along paths played by an obedient, fully
/// disclosing agent, with its decisions at those nodes.
///
/// Returns the first node at which `strat` departs from obedience and full
/// disclosure, or `None` if it agrees at every reachable node.
pub fn on_path_departure(params: &Params, mech: &Mechanism, strat: &AgentStrategy) -> Option<String> {
    let free = params.pi().is_positive();
    if strat.e1 != mech.sigma1 {
        return Some(format!("e1 = {} against sigma1 = {}", strat.e1 as u8, mech.sigma1 as u8));
    }
    let informed = mech.sigma1 || free;
    let mut states = Vec::new();
    if !mech.sigma1 {
        states.push(PrivateState::NO_SIGNAL);
    }
    if informed {
        for w in [false, true] {
            if !strat.d1_at(w) {
                return Some(format!("conceals omega1 = {}", w as u8));
            }
            states.push(PrivateState::after_first(w, true));
        }
    }
    for s in states {
        let rec = mech.sigma2(s.r1);
        if strat.e2_at(s) != rec {
            return Some(format!("e2 = {} at {s} against sigma2 = {}", strat.e2_at(s) as u8, rec as u8));
        }
        if rec || free {
            for w in [false, true] {
                if !strat.d2_at(s, w) {
                    return Some(format!("conceals omega2 = {} at {s}", w as u8));
                }
            }
        }
    }
    None
}

/// Best response agrees with obedience and full disclosure wherever it is consulted on path.
pub fn best_response_is_obedient(params: &Params, mech: &Mechanism) -> bool {
    let (br, _) = best_response(params, mech);
    on_path_departure(params, mech, &br).is_none()
}
