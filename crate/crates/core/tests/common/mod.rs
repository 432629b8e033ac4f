//! Reference computations for the integration tests. Written directly from
//! the game tree, without calling the library's solver.
#![allow(dead_code)]

use std::collections::BTreeMap;

use evidence_core::agent::{AgentStrategy, Observation, PrivateState, STRATEGY_COUNT};
use evidence_core::mechanism::Mechanism;
use evidence_core::params::{Params, Report};
use evidence_core::Rat;
use rand::Rng;
use rayon::prelude::*;

pub fn r(n: i128, d: i128) -> Rat {
    Rat::new(n, d)
}

pub fn point(rho: (i128, i128), mu0: (i128, i128), pi: (i128, i128), gamma: Rat, kappa: Rat) -> Params {
    Params::from_effective_costs(r(rho.0, rho.1), r(mu0.0, mu0.1), r(pi.0, pi.1), gamma, kappa)
        .expect("valid point")
}

fn coin(p: Rat, v: bool) -> Rat {
    if v {
        p
    } else {
        Rat::ONE - p
    }
}

fn report_of(omega: bool, reveal: bool) -> Report {
    match (reveal, omega) {
        (false, _) => Report::Null,
        (true, false) => Report::Low,
        (true, true) => Report::High,
    }
}

/// `P(omega2 | what the agent learned in period one)`.
fn second_state_prob(params: &Params, seen: Option<bool>, omega2: bool) -> Rat {
    match seen {
        Some(w1) => coin(params.rho(), omega2 == w1),
        None => [false, true]
            .iter()
            .map(|&w1| coin(params.mu0(), w1) * coin(params.rho(), omega2 == w1))
            .sum(),
    }
}

fn seen_of(state: PrivateState) -> Option<bool> {
    match state.o1 {
        Observation::NoSignal => None,
        Observation::Saw0 => Some(false),
        Observation::Saw1 => Some(true),
    }
}

/// Agent payoff from period two on, in `state`, for a local plan.
/// The free signal is drawn whether or not a test is taken; a test reveals
/// the state regardless of the draw.
pub fn local_value(params: &Params, mech: &Mechanism, state: PrivateState, e2: bool, d2: [bool; 2]) -> Rat {
    let seen = seen_of(state);
    let mut v = Rat::ZERO;
    for omega2 in [false, true] {
        let p = second_state_prob(params, seen, omega2);
        for free in [false, true] {
            let pf = coin(params.pi(), free);
            let observed = e2 || free;
            let r2 = if observed { report_of(omega2, d2[omega2 as usize]) } else { Report::Null };
            let x = Rat::from_bit(mech.xhat(state.r1, r2));
            v = v + p * pf * x;
        }
    }
    if e2 {
        v - params.c()
    } else {
        v
    }
}

fn state_after(omega1: Option<bool>, reveal: bool) -> PrivateState {
    match omega1 {
        None => PrivateState { o1: Observation::NoSignal, r1: Report::Null },
        Some(w) => PrivateState {
            o1: if w { Observation::Saw1 } else { Observation::Saw0 },
            r1: report_of(w, reveal),
        },
    }
}

/// Path key `(omega1, omega2, o1, o2, r1, r2, e1, e2, x)`.
pub type PathKey = (bool, bool, Observation, Observation, Report, Report, bool, bool, bool);

fn observation(seen: bool, omega: bool) -> Observation {
    match (seen, omega) {
        (false, _) => Observation::NoSignal,
        (true, false) => Observation::Saw0,
        (true, true) => Observation::Saw1,
    }
}

/// Walks the full tree with separate free-signal draws and merges leaves by key.
pub fn tree(params: &Params, mech: &Mechanism, s: &AgentStrategy) -> BTreeMap<PathKey, Rat> {
    let mut out: BTreeMap<PathKey, Rat> = BTreeMap::new();
    for omega1 in [false, true] {
        for free1 in [false, true] {
            let seen1 = s.e1 || free1;
            let st = state_after(seen1.then_some(omega1), s.d1[omega1 as usize]);
            let e2 = s.e2[st.index()];
            for omega2 in [false, true] {
                for free2 in [false, true] {
                    let seen2 = e2 || free2;
                    let r2 = if seen2 { report_of(omega2, s.d2[st.index()][omega2 as usize]) } else { Report::Null };
                    let p = coin(params.mu0(), omega1)
                        * coin(params.pi(), free1)
                        * coin(params.rho(), omega2 == omega1)
                        * coin(params.pi(), free2);
                    if p.is_zero() {
                        continue;
                    }
                    let key = (
                        omega1,
                        omega2,
                        observation(seen1, omega1),
                        observation(seen2, omega2),
                        st.r1,
                        r2,
                        s.e1,
                        e2,
                        mech.xhat(st.r1, r2),
                    );
                    let e = out.entry(key).or_insert(Rat::ZERO);
                    *e = *e + p;
                }
            }
        }
    }
    out
}

/// `(agent, principal)` expected payoffs from the tree.
pub fn tree_payoffs(params: &Params, mech: &Mechanism, s: &AgentStrategy) -> (Rat, Rat) {
    let mut a = Rat::ZERO;
    let mut w = Rat::ZERO;
    for (key, p) in tree(params, mech, s) {
        let (_, omega2, _, _, _, _, e1, e2, x) = key;
        let tests = Rat::int(e1 as i128 + e2 as i128);
        a = a + p * (Rat::from_bit(x) - params.c() * tests);
        w = w + p * (Rat::from_bit(x == omega2) - params.k() * tests);
    }
    (a, w)
}

/// Maximum agent value over all `2^18` pure strategies, and how many attain it.
pub fn exhaustive_best(params: &Params, mech: &Mechanism) -> (Rat, usize) {
    // local[state][e2 | d2_0 << 1 | d2_1 << 2]
    let mut local = [[Rat::ZERO; 8]; 5];
    for st in PrivateState::ALL {
        for o in 0..8usize {
            local[st.index()][o] = local_value(params, mech, st, o & 1 == 1, [o & 2 != 0, o & 4 != 0]);
        }
    }
    let value = |i: u32| {
        let s = AgentStrategy::from_index(i);
        let pick = |st: PrivateState| {
            let j = st.index();
            local[j][s.e2[j] as usize | (s.d2[j][0] as usize) << 1 | (s.d2[j][1] as usize) << 2]
        };
        let q = if s.e1 { Rat::ONE } else { params.pi() };
        let mut v = Rat::ZERO;
        for w in [false, true] {
            let informed = pick(state_after(Some(w), s.d1[w as usize]));
            let blind = pick(state_after(None, false));
            v = v + coin(params.mu0(), w) * (q * informed + (Rat::ONE - q) * blind);
        }
        if s.e1 {
            v - params.c()
        } else {
            v
        }
    };
    (0..STRATEGY_COUNT)
        .into_par_iter()
        .map(|i| (value(i), 1usize))
        .reduce(
            || (Rat::int(-10), 0),
            |a, b| match a.0.cmp(&b.0) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => (a.0, a.1 + b.1),
            },
        )
}

/// Sequentially rational plan with the tie rule: equal testing values follow
/// the recommendation, equal disclosure values reveal.
pub fn tie_rule_plan(params: &Params, mech: &Mechanism) -> (AgentStrategy, Rat) {
    let mut s = AgentStrategy::default();
    let mut cont = [Rat::ZERO; 5];
    for st in PrivateState::ALL {
        let j = st.index();
        // at an observed second state, compare the two assignments directly
        let d2 = [false, true].map(|w| mech.xhat(st.r1, report_of(w, true)) >= mech.xhat(st.r1, Report::Null));
        let with = local_value(params, mech, st, true, d2);
        let without = local_value(params, mech, st, false, d2);
        // exhaustive check that the disclosure choice is optimal for either test decision
        for e2 in [false, true] {
            let best = (0..4)
                .map(|o| local_value(params, mech, st, e2, [o & 1 != 0, o & 2 != 0]))
                .max()
                .unwrap();
            assert_eq!(best, local_value(params, mech, st, e2, d2));
        }
        let e2 = with > without || (with == without && mech.sigma2(st.r1));
        s.e2[j] = e2;
        s.d2[j] = d2;
        cont[j] = if e2 { with } else { without };
    }
    for w in [false, true] {
        s.d1[w as usize] = cont[state_after(Some(w), true).index()] >= cont[state_after(Some(w), false).index()];
    }
    let value_with = |e1: bool| {
        let mut t = s;
        t.e1 = e1;
        tree_payoffs(params, mech, &t).0
    };
    let (a, b) = (value_with(true), value_with(false));
    s.e1 = a > b || (a == b && mech.sigma1);
    (s, a.max(b))
}

/// Whether `s` agrees with obedience and full disclosure at every decision
/// node an obedient agent reaches with positive probability.
pub fn obeys_on_path(params: &Params, mech: &Mechanism, s: &AgentStrategy) -> bool {
    if s.e1 != mech.sigma1 {
        return false;
    }
    let pi_pos = params.pi().is_positive();
    let seen1_possible = mech.sigma1 || pi_pos;
    let blind_possible = !mech.sigma1;
    let mut states = Vec::new();
    if seen1_possible {
        for w in [false, true] {
            if !s.d1[w as usize] {
                return false;
            }
            states.push(state_after(Some(w), true));
        }
    }
    if blind_possible {
        states.push(state_after(None, false));
    }
    for st in states {
        let rec = mech.sigma2(st.r1);
        if s.e2[st.index()] != rec {
            return false;
        }
        if (rec || pi_pos) && s.d2[st.index()] != [true, true] {
            return false;
        }
    }
    true
}

/// Draws a Bernoulli variable with exact rational probability.
fn draw<R: Rng>(rng: &mut R, p: Rat) -> bool {
    let (n, d) = (p.numer(), p.denom());
    rng.gen_ratio(n as u32, d as u32)
}

/// Simulates one play of the game.
pub fn simulate<R: Rng>(params: &Params, mech: &Mechanism, s: &AgentStrategy, rng: &mut R) -> PathKey {
    let omega1 = draw(rng, params.mu0());
    let seen1 = s.e1 || draw(rng, params.pi());
    let st = state_after(seen1.then_some(omega1), s.d1[omega1 as usize]);
    let e2 = s.e2[st.index()];
    let omega2 = draw(rng, coin(params.rho(), omega1));
    let seen2 = e2 || draw(rng, params.pi());
    let r2 = if seen2 { report_of(omega2, s.d2[st.index()][omega2 as usize]) } else { Report::Null };
    (
        omega1,
        omega2,
        observation(seen1, omega1),
        observation(seen2, omega2),
        st.r1,
        r2,
        s.e1,
        e2,
        mech.xhat(st.r1, r2),
    )
}

/// Closed-form optimal values for the intermediate-cost cases.
pub fn case_one_value(p: &Params) -> Rat {
    let (rho, mu0, pi, k) = (p.rho(), p.mu0(), p.pi(), p.k());
    let one = Rat::ONE;
    pi * mu0 * rho + pi * (one - mu0) * (pi + (one - pi) * rho) + (one - pi) * (one - k)
}

pub fn case_two_value(p: &Params) -> Rat {
    let (rho, mu0, pi, k) = (p.rho(), p.mu0(), p.pi(), p.k());
    let one = Rat::ONE;
    (one - k) * (pi * mu0 + one - pi) + pi * (one - mu0) * (pi + (one - pi) * rho)
}
