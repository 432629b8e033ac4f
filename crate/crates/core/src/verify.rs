//! Confronts every closed-form statement with exact computation at one
//! parameter point.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::agent::{
    best_response, best_response_is_obedient, deviation_def3, deviation_defc1, obedient_no_first_test,
    strategy_value, value_given_first_period_test, AgentStrategy, PrivateState,
};
use crate::closed_form::{
    baseline_mechanism, efficient_assignments, make_forcing, pi_zero_mechanism, sigma_rd1,
};
use crate::ic::{is_ic, spread_bounds_check, revelation_transform};
use crate::mechanism::{enumerate_all, Mechanism};
use crate::outcomes::{baseline_payoff, play};
use crate::params::{Params, RegionLabel, Report};
use crate::search::{full_disclosure_set, welfare_table, Mode, OptimumResult, RegionReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Mechanism(u16),
    Strategy(AgentStrategy),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Mechanism(i) => write!(f, "mechanism {i}"),
            Witness::Strategy(s) => write!(f, "strategy [{s}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub id: &'static str,
    pub applicable: bool,
    /// Present only when applicable.
    pub passed: Option<bool>,
    /// Reported but never counted as a failure.
    pub informational: bool,
    pub witness: Option<Witness>,
    pub detail: String,
}

impl ClaimResult {
    fn skipped(id: &'static str, why: &str) -> ClaimResult {
        ClaimResult {
            id,
            applicable: false,
            passed: None,
            informational: false,
            witness: None,
            detail: why.to_string(),
        }
    }

    fn checked(id: &'static str, passed: bool, witness: Option<Witness>, detail: String) -> ClaimResult {
        ClaimResult { id, applicable: true, passed: Some(passed), informational: false, witness, detail }
    }

    pub fn failed(&self) -> bool {
        !self.informational && self.passed == Some(false)
    }

    pub fn status(&self) -> &'static str {
        match self.passed {
            None => "n/a",
            Some(true) => "PASS",
            Some(false) if self.informational => "NOTE",
            Some(false) => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub params: Params,
    pub label: RegionLabel,
    pub claims: Vec<ClaimResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        !self.claims.iter().any(ClaimResult::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimResult> {
        self.claims.iter().filter(|c| c.failed())
    }

    pub fn get(&self, id: &str) -> Option<&ClaimResult> {
        self.claims.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} [{}]", self.params, self.label)?;
        for c in &self.claims {
            write!(f, "  {:<4} {}", c.status(), c.id)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            if let Some(w) = &c.witness {
                write!(f, " (witness: {w})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub mod ids {
    pub const BASELINE_OPTIMAL: &str = "baseline_optimal_without_agency";
    pub const BASELINE_TESTING: &str = "agent_testing_under_baseline";
    pub const FIRST_TEST_DEVIATION: &str = "first_test_deviation_threshold";
    pub const RETEST_DEVIATION: &str = "retest_deviation_threshold";
    pub const RD1_OBEYED: &str = "result_dependent_policy_obeyed";
    pub const RD1_MINIMAL: &str = "full_disclosure_needs_result_dependent_tests";
    pub const EMPTY_REPORT_TESTED: &str = "optimum_tests_after_empty_report";
    pub const REVELATION: &str = "revelation_transform_all_mechanisms";
    pub const IC_BOUNDS: &str = "ic_bounds_all_mechanisms";
    pub const CLOSED_FORM: &str = "closed_form_optimal";
    pub const PI_ZERO_BASELINE: &str = "no_free_signal_mechanism_matches_baseline";
    pub const GAMMA_BAR_REMARK: &str = "gamma_bar_below_mu2null";
}

fn baseline_optimal(params: &Params, no_agency: &OptimumResult) -> ClaimResult {
    let m = baseline_mechanism(params);
    let w = baseline_payoff(params, &m);
    let ok = w == no_agency.best_w && no_agency.contains(&m);
    ClaimResult::checked(
        ids::BASELINE_OPTIMAL,
        ok,
        (!ok).then_some(Witness::Mechanism(no_agency.canonical.encode())),
        format!("baseline W {w}, optimum {}", no_agency.best_w),
    )
}

fn baseline_testing(params: &Params) -> ClaimResult {
    if !params.intermediate_kappa() {
        return ClaimResult::skipped(ids::BASELINE_TESTING, "kappa not intermediate");
    }
    let m = baseline_mechanism(params);
    let (br, _) = best_response(params, &m);
    let gamma = params.gamma();
    let low = params.rho().complement();
    let st = |o1, r1| PrivateState { o1, r1 };
    use crate::agent::Observation::*;
    let checks = [
        ("no test after high report", !br.e2_at(st(Saw1, Report::High))),
        ("test after low report iff gamma < 1-rho", br.e2_at(st(Saw0, Report::Low)) == (gamma < low)),
        ("test with no signal iff gamma <= mu2", br.e2_at(st(NoSignal, Report::Null)) == (gamma <= params.mu2_null())),
        ("test after hiding low iff gamma <= 1-rho", br.e2_at(st(Saw0, Report::Null)) == (gamma <= low)),
    ];
    let bad: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    ClaimResult::checked(
        ids::BASELINE_TESTING,
        bad.is_empty(),
        (!bad.is_empty()).then_some(Witness::Strategy(br)),
        bad.join("; "),
    )
}

/// Whether the first-test deviation strictly beats the best plan without a first test.
pub fn first_test_deviation_profitable(params: &Params) -> (bool, bool) {
    let m = baseline_mechanism(params);
    let dev = strategy_value(params, &m, &deviation_def3());
    let stay = value_given_first_period_test(params, &m, false);
    (dev > stay, dev == stay)
}

/// Whether the re-test deviation strictly beats skipping the first test and
/// obeying afterwards.
pub fn retest_deviation_profitable(params: &Params) -> (bool, bool) {
    let m = baseline_mechanism(params);
    let dev = strategy_value(params, &m, &deviation_defc1());
    let stay = strategy_value(params, &m, &obedient_no_first_test(&m));
    (dev > stay, dev == stay)
}

fn first_test_deviation(params: &Params) -> ClaimResult {
    let t = params.thresholds();
    let Some(gamma_bar) = t.gamma_bar else {
        return ClaimResult::skipped(ids::FIRST_TEST_DEVIATION, "pi = 0");
    };
    if !(params.intermediate_kappa() && params.intermediate_gamma()) {
        return ClaimResult::skipped(ids::FIRST_TEST_DEVIATION, "costs not intermediate");
    }
    let (strict, tie) = first_test_deviation_profitable(params);
    let ok = strict == (t.gamma < gamma_bar) && (t.gamma != gamma_bar || tie);
    ClaimResult::checked(
        ids::FIRST_TEST_DEVIATION,
        ok,
        None,
        format!("gamma {} vs gamma_bar {gamma_bar}, strictly profitable: {strict}", t.gamma),
    )
}

fn retest_deviation(params: &Params) -> ClaimResult {
    if !(params.intermediate_kappa() && params.low_gamma()) {
        return ClaimResult::skipped(ids::RETEST_DEVIATION, "needs intermediate kappa and gamma <= 1-rho");
    }
    let t = params.thresholds();
    let (strict, tie) = retest_deviation_profitable(params);
    let ok = strict == (t.gamma < t.gamma_bar_prime) && (t.gamma != t.gamma_bar_prime || tie);
    ClaimResult::checked(
        ids::RETEST_DEVIATION,
        ok,
        None,
        format!("gamma {} vs gamma_bar_prime {}, strictly profitable: {strict}", t.gamma, t.gamma_bar_prime),
    )
}

fn rd1_with_efficient(params: &Params) -> Mechanism {
    make_forcing(&Mechanism::with_policy(sigma_rd1(), efficient_assignments(params)))
}

fn rd1_obeyed(params: &Params) -> ClaimResult {
    if !params.intermediate_gamma() {
        return ClaimResult::skipped(ids::RD1_OBEYED, "gamma not in (1-rho, mu2]");
    }
    let m = rd1_with_efficient(params);
    let ok = best_response_is_obedient(params, &m);
    ClaimResult::checked(
        ids::RD1_OBEYED,
        ok,
        (!ok).then(|| Witness::Strategy(best_response(params, &m).0)),
        String::new(),
    )
}

fn rd1_minimal(params: &Params) -> ClaimResult {
    let g = params.gamma();
    if !(g > params.rho().complement() && g < params.mu2_null()) {
        return ClaimResult::skipped(ids::RD1_MINIMAL, "gamma not in (1-rho, mu2)");
    }
    // Without free signals the agent has nothing to hide after the first
    // period, so cheaper policies also disclose fully.
    if !params.pi().is_positive() {
        return ClaimResult::skipped(ids::RD1_MINIMAL, "pi = 0");
    }
    let set = full_disclosure_set(params);
    let bad = set.iter().find(|s| !s.dominates(&sigma_rd1()));
    ClaimResult::checked(
        ids::RD1_MINIMAL,
        bad.is_none(),
        bad.map(|&p| Witness::Mechanism(make_forcing(&Mechanism::with_policy(p, efficient_assignments(params))).encode())),
        format!("{} policies induce full disclosure", set.len()),
    )
}

fn empty_report_tested(params: &Params, strategic: &OptimumResult) -> ClaimResult {
    if !(params.intermediate_kappa() && params.intermediate_gamma()) {
        return ClaimResult::skipped(ids::EMPTY_REPORT_TESTED, "costs not intermediate");
    }
    let members: Vec<Mechanism> =
        strategic.mechanisms().filter(|m| !m.sigma1 && is_ic(params, m)).collect();
    let bad = members.iter().find(|m| {
        !m.sigma2(Report::Null)
            || Report::ALL.iter().any(|&r2| m.xhat(Report::Null, r2) != (r2 == Report::High))
    });
    ClaimResult::checked(
        ids::EMPTY_REPORT_TESTED,
        bad.is_none() && !members.is_empty(),
        bad.map(|m| Witness::Mechanism(m.encode())),
        format!("{} incentive-compatible optima without a first test", members.len()),
    )
}

fn revelation_all(params: &Params) -> ClaimResult {
    let all: Vec<Mechanism> = enumerate_all().collect();
    let bad = all.par_iter().find_first(|m| {
        let t = revelation_transform(params, m);
        if !is_ic(params, &t) {
            return true;
        }
        let before = play(params, m, &best_response(params, m).0).outcome_law();
        let after = play(params, &t, &best_response(params, &t).0).outcome_law();
        before != after
    });
    ClaimResult::checked(
        ids::REVELATION,
        bad.is_none(),
        bad.map(|m| Witness::Mechanism(m.encode())),
        String::new(),
    )
}

fn ic_bounds_all(params: &Params) -> ClaimResult {
    let all: Vec<Mechanism> = enumerate_all().filter(|m| m.is_forcing()).collect();
    let checked: Vec<(u16, bool)> = all
        .par_iter()
        .filter(|m| is_ic(params, m))
        .map(|m| {
            let ok = spread_bounds_check(params, m)
                .map(|b| b.iter().all(|c| c.holds))
                .unwrap_or(false);
            (m.encode(), ok)
        })
        .collect();
    let bad = checked.iter().find(|(_, ok)| !ok);
    ClaimResult::checked(
        ids::IC_BOUNDS,
        bad.is_none(),
        bad.map(|(i, _)| Witness::Mechanism(*i)),
        format!("{} incentive-compatible mechanisms", checked.len()),
    )
}

fn closed_form(params: &Params, strategic: &OptimumResult) -> ClaimResult {
    let report = RegionReport::from_optimum(params, strategic);
    match report.closed_form_in_argmax {
        None => ClaimResult::skipped(ids::CLOSED_FORM, "no closed form for this region"),
        Some(ok) => ClaimResult::checked(
            ids::CLOSED_FORM,
            ok,
            (!ok).then_some(Witness::Mechanism(report.canonical_index)),
            if ok {
                format!("W {}", report.brute_force_w)
            } else {
                report.notes
            },
        ),
    }
}

fn pi_zero_baseline(params: &Params) -> ClaimResult {
    if params.classify() != RegionLabel::PiZero {
        return ClaimResult::skipped(ids::PI_ZERO_BASELINE, "not in the no-free-signal region");
    }
    let m = pi_zero_mechanism();
    let base = baseline_mechanism(params);
    let ours = play(params, &m, &best_response(params, &m).0).outcome_law();
    let theirs = play(params, &base, &crate::agent::obedient_strategy(&base)).outcome_law();
    let ok = ours == theirs;
    ClaimResult::checked(
        ids::PI_ZERO_BASELINE,
        ok,
        (!ok).then_some(Witness::Mechanism(m.encode())),
        String::new(),
    )
}

fn gamma_bar_remark(params: &Params) -> ClaimResult {
    let t = params.thresholds();
    let Some(gamma_bar) = t.gamma_bar else {
        return ClaimResult::skipped(ids::GAMMA_BAR_REMARK, "pi = 0");
    };
    let holds = gamma_bar < t.mu2_null;
    ClaimResult {
        id: ids::GAMMA_BAR_REMARK,
        applicable: true,
        passed: Some(holds),
        informational: true,
        witness: None,
        detail: format!(
            "gamma_bar_exceeds_mu2null: {} (gamma_bar {gamma_bar}, mu2 {})",
            !holds, t.mu2_null
        ),
    }
}

/// Runs every check that applies at `params`.
pub fn verify_claims(params: &Params) -> VerificationReport {
    let no_agency = OptimumResult::from_table(Mode::NoAgency, &welfare_table(params, Mode::NoAgency));
    let strategic = OptimumResult::from_table(Mode::Strategic, &welfare_table(params, Mode::Strategic));
    let claims = vec![
        baseline_optimal(params, &no_agency),
        baseline_testing(params),
        first_test_deviation(params),
        retest_deviation(params),
        rd1_obeyed(params),
        rd1_minimal(params),
        empty_report_tested(params, &strategic),
        revelation_all(params),
        ic_bounds_all(params),
        closed_form(params, &strategic),
        pi_zero_baseline(params),
        gamma_bar_remark(params),
    ];
    VerificationReport { params: *params, label: params.classify(), claims }
}
