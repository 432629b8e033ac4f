//! Incentive constraints, the revelation transform and the bounds that
//! incentive compatibility implies.
//!
//! Constraints are evaluated only where an obedient, fully disclosing agent
//! actually arrives. Off the equilibrium path the agent is valued at its
//! optimal continuation, so the verdict coincides exactly with comparing the
//! best response against obedience.

use std::fmt;

use serde::Serialize;

use crate::agent::{best_response, continuation_value, PrivateState, ValueTable};
use crate::closed_form::make_forcing;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::params::{belief_after_report, Params, Report};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstraintName {
    /// Do not test in period one when told not to.
    ObSigma1Zero,
    /// Test in period one when told to.
    ObSigma1One,
    /// Test in period two after `r1` when told to.
    ObSigma2One(Report),
    /// Do not test in period two after `r1` when told not to.
    ObSigma2Zero(Report),
    /// Reveal the first-period state.
    FdOmega1(bool),
    /// Reveal the second-period state after `r1`.
    FdR1Omega2(Report, bool),
}

impl fmt::Display for ConstraintName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintName::ObSigma1Zero => write!(f, "OB_sigma1_0"),
            ConstraintName::ObSigma1One => write!(f, "OB_sigma1_1"),
            ConstraintName::ObSigma2One(r) => write!(f, "OB_sigma2({r})=1"),
            ConstraintName::ObSigma2Zero(r) => write!(f, "OB_sigma2({r})=0"),
            ConstraintName::FdOmega1(w) => write!(f, "FD_omega1({})", *w as u8),
            ConstraintName::FdR1Omega2(r, w) => write!(f, "FD_r1_omega2({r},{})", *w as u8),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub name: ConstraintName,
    /// Left side minus right side in the constraint's own direction.
    pub slack: Rat,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintReport {
    pub constraints: Vec<Constraint>,
}

impl ConstraintReport {
    pub fn is_ic(&self) -> bool {
        self.constraints.iter().all(|c| c.satisfied)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().filter(|c| !c.satisfied)
    }

    pub fn get(&self, name: ConstraintName) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }
}

/// First reports an obedient, fully disclosing agent sends with positive probability.
pub fn on_path_reports(params: &Params, mech: &Mechanism) -> Vec<Report> {
    let mut out = Vec::with_capacity(3);
    if !mech.sigma1 {
        out.push(Report::Null);
    }
    if mech.sigma1 || params.pi().is_positive() {
        out.extend([Report::Low, Report::High]);
    }
    out
}

/// `E_mu[max(xhat(r1, omega), xhat(r1, null))]`: the assignment under optimal second disclosure.
fn best_disclosure_mean(mech: &Mechanism, r1: Report, mu: Rat) -> Rat {
    let null = mech.xhat(r1, Report::Null);
    let at = |w: bool| Rat::from_bit(mech.xhat(r1, Report::of_state(w)).max(null));
    mu * at(true) + mu.complement() * at(false)
}

fn mean_xhat(mech: &Mechanism, r1: Report, mu: Rat) -> Rat {
    mu * Rat::from_bit(mech.xhat(r1, Report::High))
        + mu.complement() * Rat::from_bit(mech.xhat(r1, Report::Low))
}

/// Value of the first-period information: `E_mu0[max(reveal, conceal)] - value without a signal`.
fn first_period_gain(params: &Params, table: &ValueTable) -> Rat {
    let informed: Rat = [false, true]
        .iter()
        .map(|&w| {
            let p = if w { params.mu0() } else { params.mu0().complement() };
            let shown = table.at(PrivateState::after_first(w, true));
            let hidden = table.at(PrivateState::after_first(w, false));
            p * shown.max(hidden)
        })
        .sum();
    informed - table.at(PrivateState::NO_SIGNAL)
}

/// Evaluates every obedience and full-disclosure constraint that applies on path.
pub fn ic_check(params: &Params, mech: &Mechanism) -> Result<ConstraintReport> {
    if !mech.is_forcing() {
        return Err(Error::NotForcing(mech.encode()));
    }
    let gamma = params.gamma();
    let free = params.pi().is_positive();
    let (_, table) = best_response(params, mech);
    let mut out = Vec::new();
    let mut push = |name, slack: Rat| {
        out.push(Constraint { name, slack, satisfied: !slack.is_negative() })
    };

    let on_path = on_path_reports(params, mech);

    let gain = first_period_gain(params, &table);
    if mech.sigma1 {
        push(ConstraintName::ObSigma1One, gain - gamma);
    } else {
        push(ConstraintName::ObSigma1Zero, gamma - gain);
    }

    for &r1 in &on_path {
        let mu = belief_after_report(params, r1);
        let null = Rat::from_bit(mech.xhat(r1, Report::Null));
        if mech.sigma2(r1) {
            push(ConstraintName::ObSigma2One(r1), mean_xhat(mech, r1, mu) - gamma);
        } else {
            push(
                ConstraintName::ObSigma2Zero(r1),
                gamma - (best_disclosure_mean(mech, r1, mu) - null),
            );
            if free {
                for w in [false, true] {
                    let shown = Rat::from_bit(mech.xhat(r1, Report::of_state(w)));
                    push(ConstraintName::FdR1Omega2(r1, w), shown - null);
                }
            }
        }
    }

    if mech.sigma1 || free {
        for w in [false, true] {
            let r = Report::of_state(w);
            let mu = belief_after_report(params, r);
            let shown = continuation_value(params, mech, r, mu);
            let hidden = table.at(PrivateState::after_first(w, false));
            push(ConstraintName::FdOmega1(w), shown - hidden);
        }
    }

    Ok(ConstraintReport { constraints: out })
}

/// Convenience: forcing and all applicable constraints hold.
pub fn is_ic(params: &Params, mech: &Mechanism) -> bool {
    ic_check(params, mech).map(|r| r.is_ic()).unwrap_or(false)
}

/// Builds an incentive-compatible mechanism with the same joint law of
/// `(x, e1, e2, omega2)` as `mech`.
///
/// Truthful first reports are routed to the report the agent would have sent,
/// recommendations follow what the agent actually does, and truthful second
/// reports are routed through the agent's own disclosure rule. An empty first
/// report after a mandated first test is off path and receives the worst
/// assignment with no test. The result is then made forcing.
pub fn revelation_transform(params: &Params, mech: &Mechanism) -> Mechanism {
    let (br, _) = best_response(params, mech);
    let mut out = Mechanism { sigma1: br.e1, ..Default::default() };
    for r1 in Report::ALL {
        let state = match r1 {
            Report::Null => PrivateState::NO_SIGNAL,
            Report::Low => br.first_state(false),
            Report::High => br.first_state(true),
        };
        out.sigma2[r1.index()] = br.e2_at(state);
        for r2 in Report::ALL {
            let sent = match r2 {
                Report::Null => Report::Null,
                Report::Low => br.report2(state, false),
                Report::High => br.report2(state, true),
            };
            out.set_xhat(r1, r2, mech.xhat(state.r1, sent));
        }
    }
    if out.sigma1 {
        out.sigma2[Report::Null.index()] = false;
        out.xhat[Report::Null.index()] = [false; 3];
    }
    make_forcing(&out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: Rat,
    pub lower: Option<Rat>,
    pub upper: Option<Rat>,
    pub holds: bool,
}

/// Bounds implied by incentive compatibility:
///
/// * after a first report with no second test requested,
///   `0 <= E[xhat(r1, .)] - xhat(r1, null) <= gamma`;
/// * with `c = 0` all three assignments after such a report coincide;
/// * with `sigma1 = 0`, `0 <= E_mu0[v(r1)] - E_mu0[v(null)] <= gamma`.
///
/// Checked at first reports that are reached on path. Lower bounds and the
/// zero-cost equalities come from the disclosure constraints, which only bind
/// when free signals arrive (`pi > 0`).
pub fn spread_bounds_check(params: &Params, mech: &Mechanism) -> Result<Vec<BoundCheck>> {
    let report = ic_check(params, mech)?;
    if !report.is_ic() {
        return Err(Error::NotIncentiveCompatible(mech.encode()));
    }
    let gamma = params.gamma();
    let free = params.pi().is_positive();
    let lower = free.then_some(Rat::ZERO);
    let mut out = Vec::new();
    let within = |v: Rat, lo: Option<Rat>, hi: Option<Rat>| {
        lo.is_none_or(|l| v >= l) && hi.is_none_or(|h| v <= h)
    };

    for r1 in on_path_reports(params, mech) {
        if mech.sigma2(r1) {
            continue;
        }
        let mu = belief_after_report(params, r1);
        let spread = mean_xhat(mech, r1, mu) - Rat::from_bit(mech.xhat(r1, Report::Null));
        out.push(BoundCheck {
            name: format!("second_period_spread({r1})"),
            value: spread,
            lower,
            upper: Some(gamma),
            holds: within(spread, lower, Some(gamma)),
        });
        if params.c().is_zero() && free {
            let row = mech.xhat[r1.index()];
            out.push(BoundCheck {
                name: format!("zero_cost_flat_row({r1})"),
                value: Rat::from_bit(row[0] == row[1] && row[1] == row[2]),
                lower: Some(Rat::ONE),
                upper: None,
                holds: row[0] == row[1] && row[1] == row[2],
            });
        }
    }

    if !mech.sigma1 {
        let v = |r: Report, mu: Rat| continuation_value(params, mech, r, mu);
        let mu0 = params.mu0();
        let rho = params.rho();
        let truthful = mu0 * v(Report::High, rho) + mu0.complement() * v(Report::Low, rho.complement());
        let silent = mu0 * v(Report::Null, rho) + mu0.complement() * v(Report::Null, rho.complement());
        let spread = truthful - silent;
        out.push(BoundCheck {
            name: "first_period_spread".to_string(),
            value: spread,
            lower,
            upper: Some(gamma),
            holds: within(spread, lower, Some(gamma)),
        });
    }
    Ok(out)
}
