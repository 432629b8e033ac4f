//! Seeded generators of parameter points, mechanisms and strategies with
//! small denominators.

use rand::Rng;

use crate::agent::{AgentStrategy, STRATEGY_COUNT};
use crate::mechanism::{Mechanism, MECHANISM_COUNT};
use crate::params::Params;
use crate::rat::Rat;

fn frac<R: Rng + ?Sized>(rng: &mut R, lo: i128, hi: i128, denom: i128) -> Rat {
    Rat::new(rng.gen_range(lo..=hi), denom)
}

/// `(rho, mu0, pi)` with `pi > 0` when `free_signals` is set.
fn primitives<R: Rng + ?Sized>(rng: &mut R, free_signals: bool) -> (Rat, Rat, Rat) {
    let rho = frac(rng, 11, 19, 20);
    let mu0 = frac(rng, 1, 19, 20);
    let pi = frac(rng, free_signals as i128, 9, 10);
    (rho, mu0, pi)
}

/// Any valid point: `pi` may be 0, costs in `[0, 1]`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> Params {
    let (rho, mu0, pi) = primitives(rng, false);
    Params::new(rho, mu0, pi, frac(rng, 0, 40, 40), frac(rng, 0, 40, 40)).expect("valid by construction")
}

/// `lo + t (hi - lo)` for `t = j/20`, `j` in `1..=20`: a point of `(lo, hi]`.
fn inside<R: Rng + ?Sized>(rng: &mut R, lo: Rat, hi: Rat) -> Rat {
    lo + frac(rng, 1, 20, 20) * (hi - lo)
}

/// A point with intermediate costs for both parties and `pi > 0`.
pub fn random_intermediate_params<R: Rng + ?Sized>(rng: &mut R) -> Params {
    let (rho, mu0, pi) = primitives(rng, true);
    let probe = Params::new(rho, mu0, pi, Rat::ZERO, Rat::ZERO).expect("valid");
    let lo = rho.complement();
    let kappa = inside(rng, lo, probe.mu2_null_min());
    let gamma = inside(rng, lo, probe.mu2_null());
    let p = Params::from_effective_costs(rho, mu0, pi, gamma, kappa).expect("valid");
    debug_assert!(p.intermediate_kappa() && p.intermediate_gamma());
    p
}

/// An intermediate point on `kappa = kappa_bar` (so `k = 1 - rho`) with
/// `gamma >= gamma_bar`.
pub fn random_boundary_params<R: Rng + ?Sized>(rng: &mut R) -> Params {
    loop {
        let (rho, mu0, pi) = primitives(rng, true);
        let probe = Params::new(rho, mu0, pi, Rat::ZERO, rho.complement()).expect("valid");
        let t = probe.thresholds();
        if !probe.intermediate_kappa() {
            continue;
        }
        let gamma_bar = t.gamma_bar.expect("pi > 0");
        if gamma_bar > t.mu2_null {
            continue;
        }
        let lo = t.one_minus_rho.max(gamma_bar);
        // gamma in [lo, mu2], excluding 1 - rho itself
        let j = rng.gen_range(0..=20);
        let gamma = lo + Rat::new(j, 20) * (t.mu2_null - lo);
        if gamma == t.one_minus_rho {
            continue;
        }
        let p = Params::from_effective_costs(rho, mu0, pi, gamma, t.kappa_bar).expect("valid");
        debug_assert!(p.intermediate_gamma() && p.kappa() == t.kappa_bar);
        return p;
    }
}

/// A point with `pi > 0` and `gamma` strictly between `1 - rho` and `mu2(null)`.
pub fn random_open_intermediate_gamma<R: Rng + ?Sized>(rng: &mut R) -> Params {
    let (rho, mu0, pi) = primitives(rng, true);
    let probe = Params::new(rho, mu0, pi, Rat::ZERO, Rat::ZERO).expect("valid");
    let lo = rho.complement();
    let gamma = lo + frac(rng, 1, 19, 20) * (probe.mu2_null() - lo);
    Params::from_effective_costs(rho, mu0, pi, gamma, frac(rng, 0, 40, 40)).expect("valid")
}

pub fn random_mechanism<R: Rng + ?Sized>(rng: &mut R) -> Mechanism {
    Mechanism::decode(rng.gen_range(0..MECHANISM_COUNT as u32)).expect("in range")
}

pub fn random_strategy<R: Rng + ?Sized>(rng: &mut R) -> AgentStrategy {
    AgentStrategy::from_index(rng.gen_range(0..STRATEGY_COUNT))
}
