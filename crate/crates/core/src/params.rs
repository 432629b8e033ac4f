//! Model primitives, beliefs, effective costs and parameter-region labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// The five primitives of the model.
///
/// * `rho`: probability the state persists from one period to the next.
/// * `mu0`: prior probability that the first-period state is 1.
/// * `pi`: probability of observing the state for free when not testing.
/// * `c`, `k`: testing cost of the agent and of the principal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Params {
    rho: Rat,
    mu0: Rat,
    pi: Rat,
    c: Rat,
    k: Rat,
}

impl Params {
    /// Validates `1/2 < rho < 1`, `0 < mu0 < 1`, `0 <= pi < 1`, `c >= 0`, `k >= 0`.
    pub fn new(rho: Rat, mu0: Rat, pi: Rat, c: Rat, k: Rat) -> Result<Params> {
        let fail = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if !(rho > Rat::HALF && rho < Rat::ONE) {
            return fail(&format!("rho = {rho} must lie in (1/2, 1)"));
        }
        if !(mu0 > Rat::ZERO && mu0 < Rat::ONE) {
            return fail(&format!("mu0 = {mu0} must lie in (0, 1)"));
        }
        if !(pi >= Rat::ZERO && pi < Rat::ONE) {
            return fail(&format!("pi = {pi} must lie in [0, 1)"));
        }
        if c.is_negative() {
            return fail(&format!("c = {c} must be non-negative"));
        }
        if k.is_negative() {
            return fail(&format!("k = {k} must be non-negative"));
        }
        Ok(Params { rho, mu0, pi, c, k })
    }

    /// Convenience constructor from `(numer, denom)` pairs. Panics on invalid input.
    pub fn from_fracs(
        rho: (i128, i128),
        mu0: (i128, i128),
        pi: (i128, i128),
        c: (i128, i128),
        k: (i128, i128),
    ) -> Params {
        let r = |(n, d): (i128, i128)| Rat::new(n, d);
        Params::new(r(rho), r(mu0), r(pi), r(c), r(k)).expect("invalid parameters")
    }

    /// Builds parameters from effective costs `gamma = c/(1-pi)` and `kappa = k/(1-pi)`.
    pub fn from_effective_costs(
        rho: Rat,
        mu0: Rat,
        pi: Rat,
        gamma: Rat,
        kappa: Rat,
    ) -> Result<Params> {
        let q = pi.complement();
        Params::new(rho, mu0, pi, gamma * q, kappa * q)
    }

    pub fn rho(&self) -> Rat {
        self.rho
    }
    pub fn mu0(&self) -> Rat {
        self.mu0
    }
    pub fn pi(&self) -> Rat {
        self.pi
    }
    pub fn c(&self) -> Rat {
        self.c
    }
    pub fn k(&self) -> Rat {
        self.k
    }

    pub fn with_costs(&self, c: Rat, k: Rat) -> Result<Params> {
        Params::new(self.rho, self.mu0, self.pi, c, k)
    }

    /// Effective cost of testing for the agent, `c / (1 - pi)`.
    pub fn gamma(&self) -> Rat {
        self.c / self.pi.complement()
    }

    /// Effective cost of testing for the principal, `k / (1 - pi)`.
    pub fn kappa(&self) -> Rat {
        self.k / self.pi.complement()
    }

    /// Belief that the second-period state is 1 when nothing was learned in period one.
    pub fn mu2_null(&self) -> Rat {
        self.rho * self.mu0 + self.rho.complement() * self.mu0.complement()
    }

    /// `min{mu2(null), 1 - mu2(null)}`, the upper end of the intermediate cost range.
    pub fn mu2_null_min(&self) -> Rat {
        let m = self.mu2_null();
        m.min(m.complement())
    }

    /// Intermediate testing cost for the principal: `kappa in (1-rho, min{mu2, 1-mu2}]`.
    pub fn intermediate_kappa(&self) -> bool {
        let kappa = self.kappa();
        kappa > self.rho.complement() && kappa <= self.mu2_null_min()
    }

    /// Intermediate testing cost for the agent: `gamma in (1-rho, mu2(null)]`.
    pub fn intermediate_gamma(&self) -> bool {
        let gamma = self.gamma();
        gamma > self.rho.complement() && gamma <= self.mu2_null()
    }

    /// Low testing cost for the agent: `gamma <= 1-rho`.
    pub fn low_gamma(&self) -> bool {
        self.gamma() <= self.rho.complement()
    }

    pub fn thresholds(&self) -> Thresholds {
        let one_minus_rho = self.rho.complement();
        let q = self.pi.complement();
        let gamma_bar = if self.pi.is_zero() {
            None
        } else {
            Some(one_minus_rho * (self.mu0 - self.mu0.complement() * q) / self.pi)
        };
        Thresholds {
            gamma: self.gamma(),
            kappa: self.kappa(),
            mu2_null: self.mu2_null(),
            gamma_bar,
            gamma_bar_prime: self.mu0 * one_minus_rho / (Rat::ONE - self.mu0 * q),
            kappa_bar: one_minus_rho / q,
            one_minus_rho,
        }
    }

    /// Whether the first-period deviation (test, hide bad news, never test
    /// again) is strictly profitable against the forcing baseline, by the
    /// closed-form threshold. With `pi = 0` the comparison no longer involves
    /// `gamma` and reduces to `mu0 > 1/2`.
    pub fn deviation_beats_baseline(&self) -> bool {
        match self.thresholds().gamma_bar {
            Some(gb) => self.gamma() < gb,
            None => self.mu0 > Rat::HALF,
        }
    }

    pub fn classify(&self) -> RegionLabel {
        classify_region(self)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rho={} mu0={} pi={} c={} k={}",
            self.rho, self.mu0, self.pi, self.c, self.k
        )
    }
}

impl<'de> Deserialize<'de> for Params {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            rho: Rat,
            mu0: Rat,
            pi: Rat,
            c: Rat,
            k: Rat,
        }
        let r = Raw::deserialize(d)?;
        Params::new(r.rho, r.mu0, r.pi, r.c, r.k).map_err(serde::de::Error::custom)
    }
}

/// A public report: nothing, or a verified state.
///
/// The derived order `Null < Low < High` is the canonical order wherever
/// reports need sorting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Report {
    Null,
    Low,
    High,
}

impl Report {
    pub const ALL: [Report; 3] = [Report::Null, Report::Low, Report::High];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Report {
        Report::ALL[i]
    }

    /// The report that discloses state `omega`.
    pub fn of_state(omega: bool) -> Report {
        if omega {
            Report::High
        } else {
            Report::Low
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Report::Null => "null",
            Report::Low => "low",
            Report::High => "high",
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Belief that `omega2 = 1` at the start of period two, given a truthful first report.
pub fn belief_after_report(params: &Params, r1: Report) -> Rat {
    match r1 {
        Report::High => params.rho(),
        Report::Low => params.rho().complement(),
        Report::Null => params.mu2_null(),
    }
}

/// Effective costs and the closed-form profitability thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    pub gamma: Rat,
    pub kappa: Rat,
    pub mu2_null: Rat,
    /// `(1-rho)[mu0 - (1-mu0)(1-pi)] / pi`; undefined when `pi = 0`.
    pub gamma_bar: Option<Rat>,
    /// `mu0 (1-rho) / (1 - mu0 (1-pi))`.
    pub gamma_bar_prime: Rat,
    /// `(1-rho) / (1-pi)`.
    pub kappa_bar: Rat,
    pub one_minus_rho: Rat,
}

pub fn thresholds(params: &Params) -> Thresholds {
    params.thresholds()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    /// Both effective costs in `(0, 1-rho]`: the baseline is optimal.
    BothLow,
    /// Intermediate costs, `kappa > kappa_bar` and `gamma >= gamma_bar`.
    IntermediateCaseI,
    /// Intermediate costs, `kappa < kappa_bar` or `gamma < gamma_bar`.
    IntermediateCaseII,
    /// Intermediate costs on `kappa = kappa_bar` with `gamma >= gamma_bar`: the two cases tie.
    IntermediateBoundary,
    /// `kappa > min{mu2, 1-mu2}` and `gamma >= rho`: never test.
    HighHigh,
    /// No free signals, intermediate `kappa`, `gamma <= mu2(null)`.
    PiZero,
    Uncovered,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 7] = [
        RegionLabel::BothLow,
        RegionLabel::IntermediateCaseI,
        RegionLabel::IntermediateCaseII,
        RegionLabel::IntermediateBoundary,
        RegionLabel::HighHigh,
        RegionLabel::PiZero,
        RegionLabel::Uncovered,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::BothLow => "both_low",
            RegionLabel::IntermediateCaseI => "intermediate_case_i",
            RegionLabel::IntermediateCaseII => "intermediate_case_ii",
            RegionLabel::IntermediateBoundary => "intermediate_boundary",
            RegionLabel::HighHigh => "high_high",
            RegionLabel::PiZero => "pi_zero",
            RegionLabel::Uncovered => "uncovered",
        }
    }

    pub fn is_intermediate(self) -> bool {
        matches!(
            self,
            RegionLabel::IntermediateCaseI
                | RegionLabel::IntermediateCaseII
                | RegionLabel::IntermediateBoundary
        )
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Assigns the unique region whose optimality result has all hypotheses
/// satisfied. Endpoints are inclusive or exclusive exactly as in the
/// corresponding statements.
///
/// The free-signal channel is assumed open (`pi > 0`) by every result except
/// the `pi = 0` one, so `pi = 0` points are either [`RegionLabel::PiZero`] or
/// uncovered.
pub fn classify_region(params: &Params) -> RegionLabel {
    let t = params.thresholds();
    let one_minus_rho = t.one_minus_rho;
    let gamma = t.gamma;
    let kappa = t.kappa;

    if params.pi().is_zero() {
        return if params.intermediate_kappa() && gamma <= t.mu2_null {
            RegionLabel::PiZero
        } else {
            RegionLabel::Uncovered
        };
    }

    if params.intermediate_kappa() && params.intermediate_gamma() {
        let gamma_bar = t.gamma_bar.expect("pi > 0");
        return if gamma < gamma_bar || kappa < t.kappa_bar {
            RegionLabel::IntermediateCaseII
        } else if kappa > t.kappa_bar {
            RegionLabel::IntermediateCaseI
        } else {
            RegionLabel::IntermediateBoundary
        };
    }

    let positive_low = |x: Rat| x.is_positive() && x <= one_minus_rho;
    if positive_low(kappa) && positive_low(gamma) {
        return RegionLabel::BothLow;
    }

    if kappa > params.mu2_null_min() && gamma >= params.rho() {
        return RegionLabel::HighHigh;
    }

    RegionLabel::Uncovered
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i128, d: i128) -> Rat {
        Rat::new(n, d)
    }

    fn running_example() -> Params {
        Params::from_fracs((7, 10), (4, 5), (1, 2), (7, 40), (17, 100))
    }

    #[test]
    fn rejects_out_of_range() {
        let ok = |rho, mu0, pi, c, k| Params::new(rho, mu0, pi, c, k).is_ok();
        assert!(!ok(r(1, 2), r(1, 2), r(1, 2), r(0, 1), r(0, 1)));
        assert!(!ok(r(1, 1), r(1, 2), r(1, 2), r(0, 1), r(0, 1)));
        assert!(!ok(r(7, 10), r(0, 1), r(1, 2), r(0, 1), r(0, 1)));
        assert!(!ok(r(7, 10), r(1, 2), r(1, 1), r(0, 1), r(0, 1)));
        assert!(!ok(r(7, 10), r(1, 2), r(-1, 2), r(0, 1), r(0, 1)));
        assert!(!ok(r(7, 10), r(1, 2), r(1, 2), r(-1, 10), r(0, 1)));
        assert!(!ok(r(7, 10), r(1, 2), r(1, 2), r(0, 1), r(-1, 10)));
        assert!(ok(r(7, 10), r(1, 2), r(0, 1), r(0, 1), r(0, 1)));
    }

    #[test]
    fn beliefs() {
        let p = running_example();
        assert_eq!(belief_after_report(&p, Report::Null), r(31, 50));
        assert_eq!(belief_after_report(&p, Report::High), r(7, 10));
        assert_eq!(belief_after_report(&p, Report::Low), r(3, 10));
        let sym = Params::from_fracs((9, 10), (1, 2), (1, 3), (0, 1), (0, 1));
        assert_eq!(belief_after_report(&sym, Report::Null), Rat::HALF);
    }

    #[test]
    fn running_example_thresholds() {
        let t = running_example().thresholds();
        assert_eq!(t.gamma, r(7, 20));
        assert_eq!(t.kappa, r(17, 50));
        assert_eq!(t.mu2_null, r(31, 50));
        assert_eq!(t.gamma_bar, Some(r(21, 50)));
        assert_eq!(t.gamma_bar_prime, r(2, 5));
        assert_eq!(t.kappa_bar, r(3, 5));
        assert_eq!(t.one_minus_rho, r(3, 10));
    }

    #[test]
    fn kappa_bar_high_persistence() {
        let p = Params::from_fracs((9, 10), (4, 5), (1, 2), (0, 1), (0, 1));
        assert_eq!(p.thresholds().kappa_bar, r(1, 5));
    }

    #[test]
    fn gamma_bar_symmetric_prior() {
        for (rho, pi) in [((7, 10), (1, 2)), ((3, 5), (1, 7)), ((19, 20), (4, 5))] {
            let p = Params::from_fracs(rho, (1, 2), pi, (0, 1), (0, 1));
            assert_eq!(
                p.thresholds().gamma_bar,
                Some(p.rho().complement() / Rat::int(2))
            );
        }
    }

    #[test]
    fn gamma_bar_undefined_without_free_signals() {
        let p = Params::from_fracs((7, 10), (4, 5), (0, 1), (1, 10), (1, 10));
        assert_eq!(p.thresholds().gamma_bar, None);
        assert!(p.deviation_beats_baseline());
    }

    #[test]
    fn region_examples() {
        assert_eq!(
            running_example().classify(),
            RegionLabel::IntermediateCaseII
        );
        let low = Params::from_fracs((7, 10), (4, 5), (1, 2), (1, 10), (1, 10));
        assert_eq!(low.classify(), RegionLabel::BothLow);
        let high = Params::from_fracs((7, 10), (4, 5), (1, 2), (2, 5), (1, 4));
        assert_eq!(high.classify(), RegionLabel::HighHigh);
        let case_i = Params::from_fracs((9, 10), (4, 5), (1, 2), (1, 4), (11, 100));
        assert_eq!(case_i.classify(), RegionLabel::IntermediateCaseI);
        let boundary = Params::from_fracs((9, 10), (4, 5), (1, 2), (1, 4), (1, 10));
        assert_eq!(boundary.classify(), RegionLabel::IntermediateBoundary);
        // gamma < gamma_bar wins over kappa = kappa_bar
        let below = Params::from_fracs((9, 10), (4, 5), (1, 2), (3, 50), (1, 10));
        assert_eq!(below.classify(), RegionLabel::IntermediateCaseII);
        let pi0 = Params::from_fracs((7, 10), (4, 5), (0, 1), (1, 5), (17, 50));
        assert_eq!(pi0.classify(), RegionLabel::PiZero);
        let pi0_high = Params::from_fracs((7, 10), (4, 5), (0, 1), (1, 5), (1, 10));
        assert_eq!(pi0_high.classify(), RegionLabel::Uncovered);
        // kappa low, gamma intermediate: no result covers it
        let mixed = Params::from_fracs((7, 10), (4, 5), (1, 2), (7, 40), (1, 20));
        assert_eq!(mixed.classify(), RegionLabel::Uncovered);
        // zero costs are outside every open-at-zero hypothesis
        let free = Params::from_fracs((7, 10), (4, 5), (1, 2), (0, 1), (0, 1));
        assert_eq!(free.classify(), RegionLabel::Uncovered);
    }

    #[test]
    fn gamma_bar_can_exceed_mu2_null() {
        let p = Params::from_fracs((7, 10), (4, 5), (1, 10), (0, 1), (0, 1));
        let t = p.thresholds();
        assert_eq!(t.gamma_bar, Some(r(93, 50)));
        assert!(t.gamma_bar.unwrap() > t.mu2_null);
    }

    fn arb_params() -> impl Strategy<Value = Params> {
        (
            51i128..100,
            1i128..100,
            0i128..100,
            0i128..100,
            0i128..100,
        )
            .prop_map(|(rho, mu0, pi, c, k)| {
                Params::from_fracs((rho, 100), (mu0, 100), (pi, 100), (c, 100), (k, 100))
            })
    }

    proptest! {
        #[test]
        fn mu2_null_strictly_inside(p in arb_params()) {
            let m = p.mu2_null();
            let lo = p.rho().complement();
            prop_assert!(m > lo && m < p.rho());
            prop_assert!(p.mu2_null_min() > lo);
        }

        #[test]
        fn gamma_bar_reconstructs_prior(p in arb_params()) {
            prop_assume!(p.pi().is_positive());
            let gb = p.thresholds().gamma_bar.unwrap();
            let back = gb * p.pi() / p.rho().complement() + p.mu0().complement() * p.pi().complement();
            prop_assert_eq!(back, p.mu0());
        }

        #[test]
        fn gamma_bar_above_one_minus_rho_iff_high_prior(p in arb_params()) {
            prop_assume!(p.pi().is_positive());
            let gb = p.thresholds().gamma_bar.unwrap();
            let cutoff = Rat::ONE / (Rat::int(2) - p.pi());
            prop_assert_eq!(gb > p.rho().complement(), p.mu0() > cutoff);
        }

        #[test]
        fn exactly_one_label(p in arb_params()) {
            let label = p.classify();
            let t = p.thresholds();
            match label {
                RegionLabel::BothLow => prop_assert!(t.kappa <= t.one_minus_rho && t.gamma <= t.one_minus_rho),
                RegionLabel::HighHigh => prop_assert!(t.gamma >= p.rho()),
                RegionLabel::PiZero => prop_assert!(p.pi().is_zero()),
                l if l.is_intermediate() => prop_assert!(p.intermediate_kappa() && p.intermediate_gamma()),
                _ => {}
            }
        }
    }
}
