//! Exhaustive search over all deterministic mechanisms, and region sweeps.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::agent::{best_response, best_response_is_obedient};
use crate::closed_form::{efficient_assignments, make_forcing, optimal_closed_form};
use crate::error::{Error, Result};
use crate::mechanism::{Mechanism, TestingPolicy, MECHANISM_COUNT};
use crate::outcomes::{baseline_payoff, principal_value};
use crate::params::{Params, RegionLabel};
use crate::rat::Rat;

pub use crate::mechanism::enumerate_all;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// The agent best-responds to the mechanism.
    Strategic,
    /// The agent is assumed obedient and fully disclosing.
    NoAgency,
}

/// Principal payoff of one mechanism in the given mode.
pub fn welfare(params: &Params, mech: &Mechanism, mode: Mode) -> Rat {
    match mode {
        Mode::Strategic => principal_value(params, mech, &best_response(params, mech).0),
        Mode::NoAgency => baseline_payoff(params, mech),
    }
}

/// Principal payoff of every mechanism, indexed by encoding.
pub fn welfare_table(params: &Params, mode: Mode) -> Vec<Rat> {
    (0..MECHANISM_COUNT as u32)
        .into_par_iter()
        .map(|i| welfare(params, &Mechanism::decode(i).expect("in range"), mode))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptimumResult {
    pub mode: Mode,
    pub best_w: Rat,
    /// Indices of every maximiser, ascending.
    pub argmax: Vec<u16>,
    /// The maximiser with the smallest index.
    pub canonical: Mechanism,
}

impl OptimumResult {
    pub fn from_table(mode: Mode, table: &[Rat]) -> OptimumResult {
        let best_w = *table.iter().max().expect("non-empty table");
        let argmax: Vec<u16> = table
            .iter()
            .enumerate()
            .filter(|(_, w)| **w == best_w)
            .map(|(i, _)| i as u16)
            .collect();
        let canonical = Mechanism::decode(argmax[0] as u32).expect("in range");
        OptimumResult { mode, best_w, argmax, canonical }
    }

    pub fn contains(&self, mech: &Mechanism) -> bool {
        self.argmax.binary_search(&mech.encode()).is_ok()
    }

    pub fn mechanisms(&self) -> impl Iterator<Item = Mechanism> + '_ {
        self.argmax.iter().map(|&i| Mechanism::decode(i as u32).expect("in range"))
    }
}

pub fn brute_force_optimum(params: &Params, mode: Mode) -> OptimumResult {
    OptimumResult::from_table(mode, &welfare_table(params, mode))
}

/// Testing policies that, paired with forced efficient assignments, are
/// obeyed with full disclosure on path.
pub fn full_disclosure_set(params: &Params) -> Vec<TestingPolicy> {
    let xhat = efficient_assignments(params);
    TestingPolicy::all()
        .filter(|&p| best_response_is_obedient(params, &make_forcing(&Mechanism::with_policy(p, xhat))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionReport {
    pub params: Params,
    pub label: RegionLabel,
    pub closed_form_w: Option<Rat>,
    pub brute_force_w: Rat,
    /// Closed form (and its tie partner, if any) are maximisers with the predicted value.
    pub closed_form_in_argmax: Option<bool>,
    pub canonical_index: u16,
    pub notes: String,
}

impl RegionReport {
    pub fn evaluate(params: &Params) -> RegionReport {
        RegionReport::from_optimum(params, &brute_force_optimum(params, Mode::Strategic))
    }

    /// Builds the report from an already computed strategic optimum.
    pub fn from_optimum(params: &Params, opt: &OptimumResult) -> RegionReport {
        let cf = optimal_closed_form(params);
        let mut notes = String::new();
        let closed_form_in_argmax = cf.mechanism.map(|m| {
            let mut ok = true;
            for (what, mech) in [("closed form", Some(m)), ("tie partner", cf.tie)] {
                let Some(mech) = mech else { continue };
                if !opt.contains(&mech) {
                    ok = false;
                    let _ = write!(notes, "{what} {} not optimal; ", mech.encode());
                }
            }
            if cf.predicted_w != Some(opt.best_w) {
                ok = false;
                let _ = write!(
                    notes,
                    "predicted W {} differs from optimum {}; ",
                    cf.predicted_w.expect("present with mechanism"),
                    opt.best_w
                );
            }
            ok
        });
        RegionReport {
            params: *params,
            label: cf.region,
            closed_form_w: cf.predicted_w,
            brute_force_w: opt.best_w,
            closed_form_in_argmax,
            canonical_index: opt.canonical.encode(),
            notes: notes.trim_end_matches("; ").to_string(),
        }
    }

    /// `true`/`false` when a closed form applies, `n/a` otherwise.
    pub fn match_field(&self) -> &'static str {
        match self.closed_form_in_argmax {
            Some(true) => "true",
            Some(false) => "false",
            None => "n/a",
        }
    }

    pub fn is_mismatch(&self) -> bool {
        self.closed_form_in_argmax == Some(false)
    }

    pub const CSV_HEADER: &'static str =
        "rho,mu0,pi,c,k,gamma,kappa,label,closed_form_W,brute_force_W,match,canonical_mechanism_index";

    pub fn csv_row(&self) -> String {
        let p = &self.params;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.rho(),
            p.mu0(),
            p.pi(),
            p.c(),
            p.k(),
            p.gamma(),
            p.kappa(),
            self.label,
            self.closed_form_w.map_or("n/a".to_string(), |w| w.to_string()),
            self.brute_force_w,
            self.match_field(),
            self.canonical_index
        )
    }
}

pub fn region_csv(reports: &[RegionReport]) -> String {
    let mut out = String::from(RegionReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// One report per `(c, k)` cell, in grid order.
pub fn sweep(base: &Params, grid: &[(Rat, Rat)]) -> Result<Vec<RegionReport>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let points: Vec<Params> = grid
        .iter()
        .map(|&(c, k)| base.with_costs(c, k))
        .collect::<Result<_>>()?;
    Ok(points.iter().map(RegionReport::evaluate).collect())
}
