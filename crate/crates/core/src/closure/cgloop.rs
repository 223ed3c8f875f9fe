//! Cutting-plane loops over the CG and 1-row CG closures.

use rayon::prelude::*;
use std::time::{Duration, Instant};

use crate::cg::{full_mask, one_row_masks, separate_cg_ladder_pool, CgCut, RowMask, SepOptions};
use crate::error::{Error, Result};
use crate::instance::{IlpInstance, LinearConstraint};
use crate::lp::{LpModel, LpStatus};
use crate::rational::Rational;

use super::ClosureValue;

pub const DEFAULT_ITERATION_CAP: usize = 500;
pub const DEFAULT_GOOD_CUTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgMode {
    Full,
    OneRow,
}

#[derive(Debug, Clone)]
pub struct CgLoopOptions {
    /// maximum number of cuts added before giving up
    pub iteration_cap: usize,
    /// a known integer optimum; the loop stops once the bound meets it
    pub known_ip: Option<Rational>,
    /// let the bound rows `x_j <= u_j` take multipliers; without them the
    /// loop optimizes over the CG closure of the rows alone, intersected
    /// with the box
    pub bound_rows: bool,
    /// a separation may return the first cut whose violation reaches this,
    /// instead of proving it found the most violated one
    pub good_enough: Option<Rational>,
    /// a separation stops once this many distinct cuts reach `good_enough`
    pub good_cuts: usize,
    /// wall-clock budget; when it runs out the last LP value is reported,
    /// which bounds the closure value from the LP side
    pub time_limit: Option<Duration>,
    /// rank-1 CG cuts of the rows to start from, such as those of a
    /// finished 1-row loop; they do not change the closure
    pub initial_cuts: Vec<LinearConstraint>,
}

impl Default for CgLoopOptions {
    fn default() -> Self {
        CgLoopOptions {
            iteration_cap: DEFAULT_ITERATION_CAP,
            known_ip: None,
            bound_rows: true,
            good_enough: Some(Rational::from_ratio(1, 4)),
            good_cuts: DEFAULT_GOOD_CUTS,
            time_limit: None,
            initial_cuts: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgLoopResult {
    pub value: ClosureValue,
    pub cuts: Vec<LinearConstraint>,
    pub rounds: usize,
    /// stopped because no tolerance on the ladder produced a cut while the
    /// LP optimum was still fractional
    pub eps_ladder_exhausted: bool,
    pub iteration_capped: bool,
    pub time_limited: bool,
}

fn cut_order(a: &CgCut, b: &CgCut) -> std::cmp::Ordering {
    b.violation.cmp(&a.violation).then_with(|| a.alpha.cmp(&b.alpha))
}

/// Optimizes over the CG closure (`Full`) or the intersection of the
/// single-row CG closures (`OneRow`) of `inst`.
pub fn z_cg(inst: &IlpInstance, mode: CgMode, opts: &CgLoopOptions) -> Result<CgLoopResult> {
    let masks: Vec<RowMask> = match mode {
        CgMode::Full => vec![full_mask(inst)],
        CgMode::OneRow => one_row_masks(inst),
    };
    let no_bounds = vec![None; inst.n()];
    let sep_upper = if opts.bound_rows { &inst.upper } else { &no_bounds };
    let mut lp = LpModel::from_instance(inst);
    for c in &opts.initial_cuts {
        lp.add_constraint(c);
    }
    let mut out = CgLoopResult {
        value: ClosureValue::Infeasible,
        cuts: Vec::new(),
        rounds: 0,
        eps_ladder_exhausted: false,
        iteration_capped: false,
        time_limited: false,
    };
    let deadline = opts.time_limit.map(|d| Instant::now() + d);
    let sep = SepOptions {
        good_enough: opts.good_enough.clone(),
        keep_pool: true,
        deadline,
        good_cuts: opts.good_cuts,
    };
    loop {
        let res = lp.solve();
        match res.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                out.value = ClosureValue::Infeasible;
                return Ok(out);
            }
            LpStatus::Unbounded => {
                out.value = ClosureValue::Unbounded;
                return Ok(out);
            }
        }
        let x = res.point.unwrap();
        let v = res.value.unwrap();
        out.value = ClosureValue::Value(v.clone());
        if x.iter().all(Rational::is_integer) || opts.known_ip.as_ref() == Some(&v) {
            return Ok(out);
        }
        if out.cuts.len() >= opts.iteration_cap {
            out.iteration_capped = true;
            return Ok(out);
        }
        // separation only ever uses the original rows and bounds
        if deadline.map_or(false, |d| Instant::now() >= d) {
            out.time_limited = true;
            return Ok(out);
        }
        let found: Result<Vec<Vec<CgCut>>> = masks
            .par_iter()
            .map(|mask| separate_cg_ladder_pool(&inst.rows, sep_upper, &x, mask, &sep))
            .collect();
        let found = match found {
            Err(Error::Resource(_)) if deadline.is_some() => {
                out.time_limited = true;
                return Ok(out);
            }
            r => r?,
        };
        let mut cuts: Vec<CgCut> = found.into_iter().flatten().collect();
        if cuts.is_empty() {
            out.eps_ladder_exhausted = true;
            return Ok(out);
        }
        cuts.sort_by(cut_order);
        cuts.dedup_by(|a, b| a.alpha == b.alpha && a.beta == b.beta && a.relation == b.relation);
        for c in cuts {
            let con = c.to_constraint();
            lp.add_constraint(&con);
            out.cuts.push(con);
        }
        out.rounds += 1;
    }
}
