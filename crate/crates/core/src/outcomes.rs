//! Exact distributions over terminal play paths and the players' payoffs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::agent::{obedient_strategy, AgentStrategy, Observation, PrivateState};
use crate::mechanism::Mechanism;
use crate::params::{Params, Report};
use crate::rat::Rat;

/// One terminal path with its probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct OutcomeAtom {
    pub omega1: bool,
    pub omega2: bool,
    pub o1: Observation,
    pub o2: Observation,
    pub r1: Report,
    pub r2: Report,
    pub e1: bool,
    pub e2: bool,
    pub x: bool,
    pub prob: Rat,
}

impl OutcomeAtom {
    pub fn tests(&self) -> i128 {
        self.e1 as i128 + self.e2 as i128
    }

    /// Discrete coordinates, without the probability.
    pub fn key(&self) -> (bool, bool, Observation, Observation, Report, Report, bool, bool, bool) {
        (
            self.omega1, self.omega2, self.o1, self.o2, self.r1, self.r2, self.e1, self.e2, self.x,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutcomeDistribution {
    pub atoms: Vec<OutcomeAtom>,
}

/// Branches of an observation: certain when testing, free with probability `pi` otherwise.
fn observations(params: &Params, tested: bool, omega: bool) -> impl Iterator<Item = (Observation, Rat)> {
    let pi = params.pi();
    let (p_saw, p_none) = if tested { (Rat::ONE, Rat::ZERO) } else { (pi, pi.complement()) };
    [(Observation::saw(omega), p_saw), (Observation::NoSignal, p_none)]
        .into_iter()
        .filter(|(_, p)| p.is_positive())
}

fn bernoulli(p: Rat, v: bool) -> Rat {
    if v {
        p
    } else {
        p.complement()
    }
}

/// Visits every positive-probability terminal path in a fixed order.
pub fn for_each_path(
    params: &Params,
    mech: &Mechanism,
    strat: &AgentStrategy,
    mut f: impl FnMut(&OutcomeAtom),
) {
    let rho = params.rho();
    for omega1 in [false, true] {
        let p1 = bernoulli(params.mu0(), omega1);
        for (o1, po1) in observations(params, strat.e1, omega1) {
            let state = match o1 {
                Observation::NoSignal => PrivateState::NO_SIGNAL,
                _ => strat.first_state(omega1),
            };
            let e2 = strat.e2_at(state);
            for omega2 in [false, true] {
                let p2 = if omega2 == omega1 { rho } else { rho.complement() };
                for (o2, po2) in observations(params, e2, omega2) {
                    let r2 = match o2 {
                        Observation::NoSignal => Report::Null,
                        _ => strat.report2(state, omega2),
                    };
                    f(&OutcomeAtom {
                        omega1,
                        omega2,
                        o1,
                        o2,
                        r1: state.r1,
                        r2,
                        e1: strat.e1,
                        e2,
                        x: mech.xhat(state.r1, r2),
                        prob: p1 * po1 * p2 * po2,
                    });
                }
            }
        }
    }
}

pub fn play(params: &Params, mech: &Mechanism, strat: &AgentStrategy) -> OutcomeDistribution {
    let mut atoms = Vec::with_capacity(16);
    for_each_path(params, mech, strat, |a| atoms.push(*a));
    OutcomeDistribution { atoms }
}

impl OutcomeDistribution {
    pub fn total(&self) -> Rat {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    /// Pushes the distribution forward through `key`.
    pub fn marginal<K: Ord>(&self, key: impl Fn(&OutcomeAtom) -> K) -> BTreeMap<K, Rat> {
        let mut m = BTreeMap::new();
        for a in &self.atoms {
            let e = m.entry(key(a)).or_insert(Rat::ZERO);
            *e = *e + a.prob;
        }
        m
    }

    /// Joint law of `(x, e1, e2, omega2)`.
    pub fn outcome_law(&self) -> BTreeMap<(bool, bool, bool, bool), Rat> {
        self.marginal(|a| (a.x, a.e1, a.e2, a.omega2))
    }

    pub fn probability(&self, event: impl Fn(&OutcomeAtom) -> bool) -> Rat {
        self.atoms.iter().filter(|a| event(a)).map(|a| a.prob).sum()
    }

    pub const CSV_HEADER: &'static str = "omega1,omega2,o1,o2,r1,r2,e1,e2,x,prob";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for a in &self.atoms {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                a.omega1 as u8,
                a.omega2 as u8,
                a.o1,
                a.o2,
                a.r1,
                a.r2,
                a.e1 as u8,
                a.e2 as u8,
                a.x as u8,
                a.prob
            )
            .unwrap();
        }
        out
    }
}

fn principal_atom(params: &Params, a: &OutcomeAtom) -> Rat {
    Rat::from_bit(a.x == a.omega2) - params.k() * Rat::int(a.tests())
}

fn agent_atom(params: &Params, a: &OutcomeAtom) -> Rat {
    Rat::from_bit(a.x) - params.c() * Rat::int(a.tests())
}

pub fn principal_payoff(dist: &OutcomeDistribution, params: &Params) -> Rat {
    dist.atoms.iter().map(|a| a.prob * principal_atom(params, a)).sum()
}

pub fn agent_payoff(dist: &OutcomeDistribution, params: &Params) -> Rat {
    dist.atoms.iter().map(|a| a.prob * agent_atom(params, a)).sum()
}

/// Principal payoff of `(mech, strat)` without materialising the distribution.
pub fn principal_value(params: &Params, mech: &Mechanism, strat: &AgentStrategy) -> Rat {
    let mut w = Rat::ZERO;
    for_each_path(params, mech, strat, |a| w = w + a.prob * principal_atom(params, a));
    w
}

/// Principal payoff when the agent is obedient and discloses everything.
pub fn baseline_payoff(params: &Params, mech: &Mechanism) -> Rat {
    principal_value(params, mech, &obedient_strategy(mech))
}

/// Draws one path by sampling nature and free signals with exact rational
/// Bernoulli trials, and returns the index of the matching atom of
/// `play(params, mech, strat)`.
pub fn sample_atom<R: Rng + ?Sized>(
    dist: &OutcomeDistribution,
    params: &Params,
    strat: &AgentStrategy,
    rng: &mut R,
) -> usize {
    let mut flip = |p: Rat| -> bool {
        let d = p.denom() as u128;
        (rng.gen_range(0..d) as i128) < p.numer()
    };
    let omega1 = flip(params.mu0());
    let o1 = if strat.e1 || flip(params.pi()) { Observation::saw(omega1) } else { Observation::NoSignal };
    let state = match o1 {
        Observation::NoSignal => PrivateState::NO_SIGNAL,
        _ => strat.first_state(omega1),
    };
    let omega2 = if flip(params.rho()) { omega1 } else { !omega1 };
    let e2 = strat.e2_at(state);
    let o2 = if e2 || flip(params.pi()) { Observation::saw(omega2) } else { Observation::NoSignal };
    dist.atoms
        .iter()
        .position(|a| a.omega1 == omega1 && a.omega2 == omega2 && a.o1 == o1 && a.o2 == o2)
        .expect("sampled path has positive probability")
}
