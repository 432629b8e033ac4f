//! Closed-form mechanisms: efficient assignments, the no-agency baseline,
//! the result-dependent policy and the region-wise optima.

use serde::Serialize;

use crate::mechanism::{Mechanism, TestingPolicy};
use crate::outcomes::baseline_payoff;
use crate::params::{belief_after_report, classify_region, Params, RegionLabel, Report};
use crate::rat::Rat;

/// Statically optimal assignment at every report pair: assign 1 iff the
/// belief that `omega2 = 1` is at least 1/2. A revealed second state is
/// believed with certainty; otherwise the belief after `r1` is used. Cells
/// unreachable under a given policy are filled by the same rule.
pub fn efficient_assignments(params: &Params) -> [[bool; 3]; 3] {
    Mechanism::xhat_from(|r1, r2| match r2 {
        Report::High => true,
        Report::Low => false,
        Report::Null => belief_after_report(params, r1) >= Rat::HALF,
    })
}

/// Sets `xhat(r1, null) = 0` wherever a second-period test is requested.
pub fn make_forcing(mech: &Mechanism) -> Mechanism {
    let mut m = *mech;
    for r1 in Report::ALL {
        if m.sigma2(r1) {
            m.set_xhat(r1, Report::Null, false);
        }
    }
    m
}

/// Optimal no-agency mechanism: never test first; test second always when
/// `kappa <= 1-rho`, only after an empty first report when
/// `kappa <= min{mu2, 1-mu2}`, never otherwise.
pub fn baseline_mechanism(params: &Params) -> Mechanism {
    let kappa = params.kappa();
    let sigma2 = if kappa <= params.rho().complement() {
        [true; 3]
    } else if kappa <= params.mu2_null_min() {
        [true, false, false]
    } else {
        [false; 3]
    };
    make_forcing(&Mechanism {
        sigma1: false,
        sigma2,
        xhat: efficient_assignments(params),
    })
}

/// Test after an empty or high first report, never in period one.
pub fn sigma_rd1() -> TestingPolicy {
    TestingPolicy {
        sigma1: false,
        sigma2: [true, false, true],
    }
}

fn high_second_report() -> [[bool; 3]; 3] {
    Mechanism::xhat_from(|_, r2| r2 == Report::High)
}

/// `sigma_rd1` with `xhat = 1[r2 = high]`.
pub fn sigma_rd1_mechanism() -> Mechanism {
    Mechanism::with_policy(sigma_rd1(), high_second_report())
}

/// Test only after an empty first report; assign 1 after a high first report
/// and otherwise follow the second report.
pub fn case_i_mechanism() -> Mechanism {
    Mechanism {
        sigma1: false,
        sigma2: [true, false, false],
        xhat: Mechanism::xhat_from(|r1, r2| r1 == Report::High || r2 == Report::High),
    }
}

pub fn case_ii_mechanism() -> Mechanism {
    sigma_rd1_mechanism()
}

/// Never test; follow the second report.
pub fn never_test_mechanism() -> Mechanism {
    Mechanism {
        xhat: high_second_report(),
        ..Default::default()
    }
}

/// Test only after an empty first report; assign 1 only on `(null, high)`.
pub fn pi_zero_mechanism() -> Mechanism {
    Mechanism {
        sigma1: false,
        sigma2: [true, false, false],
        xhat: Mechanism::xhat_from(|r1, r2| r1 == Report::Null && r2 == Report::High),
    }
}

/// `pi mu0 rho + pi (1-mu0) [pi + (1-pi) rho] + (1-pi)(1-k)`.
pub fn case_i_welfare(params: &Params) -> Rat {
    let (rho, mu0, pi, k) = (params.rho(), params.mu0(), params.pi(), params.k());
    pi * mu0 * rho + pi * mu0.complement() * (pi + pi.complement() * rho) + pi.complement() * k.complement()
}

/// `(1-k) [pi mu0 + 1 - pi] + pi (1-mu0) [pi + (1-pi) rho]`.
pub fn case_ii_welfare(params: &Params) -> Rat {
    let (rho, mu0, pi, k) = (params.rho(), params.mu0(), params.pi(), params.k());
    k.complement() * (pi * mu0 + pi.complement()) + pi * mu0.complement() * (pi + pi.complement() * rho)
}

/// `pi + (1-pi)(1 - mu2(null))`.
pub fn never_test_welfare(params: &Params) -> Rat {
    let pi = params.pi();
    pi + pi.complement() * params.mu2_null().complement()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormResult {
    pub region: RegionLabel,
    pub mechanism: Option<Mechanism>,
    pub predicted_w: Option<Rat>,
    /// The second optimal mechanism on the `kappa = kappa_bar` boundary.
    pub tie: Option<Mechanism>,
}

pub fn optimal_closed_form(params: &Params) -> ClosedFormResult {
    let region = classify_region(params);
    let (mechanism, predicted_w, tie) = match region {
        RegionLabel::IntermediateCaseI => (case_i_mechanism(), case_i_welfare(params), None),
        RegionLabel::IntermediateCaseII => (case_ii_mechanism(), case_ii_welfare(params), None),
        RegionLabel::IntermediateBoundary => {
            (case_i_mechanism(), case_i_welfare(params), Some(case_ii_mechanism()))
        }
        RegionLabel::HighHigh => (never_test_mechanism(), never_test_welfare(params), None),
        RegionLabel::BothLow => {
            let m = baseline_mechanism(params);
            (m, baseline_payoff(params, &m), None)
        }
        RegionLabel::PiZero => {
            let m = pi_zero_mechanism();
            (m, baseline_payoff(params, &m), None)
        }
        RegionLabel::Uncovered => {
            return ClosedFormResult { region, mechanism: None, predicted_w: None, tie: None }
        }
    };
    ClosedFormResult {
        region,
        mechanism: Some(mechanism),
        predicted_w: Some(predicted_w),
        tie,
    }
}
