//! Closure values, brackets, rank bounds and chain checks.

mod bracket;
mod cgloop;
mod chain;
mod clique;
mod kc;
mod lpstar;
mod rank;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use bracket::{
    aggregate, agg_bracket, agg_bracket_from, default_lambdas, sampled_value, AggBracket, LAMBDA_MAX_ENTRY,
    RANDOM_LAMBDAS,
};
pub use cgloop::{z_cg, CgLoopOptions, CgLoopResult, CgMode, DEFAULT_GOOD_CUTS, DEFAULT_ITERATION_CAP};
pub use chain::{verify_chain, ChainCheck, CheckOutcome};
pub use clique::{clique_cg_derivation, CliqueCertificate, CliqueRound};
pub use kc::{kc_inequality, separate_kc, z_kc, KcResult, KC_MAX_VARS};
pub use lpstar::{lp_star, oversized_columns};
pub use rank::{check_rank_hypothesis, log2_enclosure, rank_lower_bound, rank_lower_bound_for, RankBound};

use crate::error::{Error, Result};
use crate::hull::optimize_over_hull_intersection;
use crate::instance::{IlpInstance, InstanceClass, Sense};
use crate::lp::{LpResult, LpStatus};
use crate::mip::{solve_mip, MipStatus};
use crate::rational::Rational;

/// Optimum of a closure, or why there is none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureValue {
    Value(Rational),
    Infeasible,
    Unbounded,
}

impl ClosureValue {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            ClosureValue::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, ClosureValue::Infeasible)
    }

    fn from_lp(res: &LpResult) -> ClosureValue {
        match res.status {
            LpStatus::Optimal => ClosureValue::Value(res.value.clone().unwrap()),
            LpStatus::Infeasible => ClosureValue::Infeasible,
            LpStatus::Unbounded => ClosureValue::Unbounded,
        }
    }
}

impl fmt::Display for ClosureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureValue::Value(v) => write!(f, "{v}"),
            ClosureValue::Infeasible => f.write_str("infeasible"),
            ClosureValue::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Closure {
    Lp,
    LpStar,
    Kc,
    Cg,
    Cg1Row,
    Agg1Row,
    Agg,
    Ip,
}

impl Closure {
    pub const ALL: [Closure; 8] = [
        Closure::Lp,
        Closure::LpStar,
        Closure::Kc,
        Closure::Cg,
        Closure::Cg1Row,
        Closure::Agg1Row,
        Closure::Agg,
        Closure::Ip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Closure::Lp => "LP",
            Closure::LpStar => "LPSTAR",
            Closure::Kc => "KC",
            Closure::Cg => "CG",
            Closure::Cg1Row => "CG1ROW",
            Closure::Agg1Row => "AGG1ROW",
            Closure::Agg => "AGG",
            Closure::Ip => "IP",
        }
    }
}

impl fmt::Display for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Closure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Closure> {
        let up = s.trim().to_ascii_uppercase();
        Closure::ALL
            .into_iter()
            .find(|c| c.name() == up)
            .ok_or_else(|| {
                let names: Vec<&str> = Closure::ALL.iter().map(|c| c.name()).collect();
                Error::validation(format!("unknown closure '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Parses a comma-separated closure list.
pub fn parse_closures(s: &str) -> Result<Vec<Closure>> {
    let mut out: Vec<Closure> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReportFlags {
    pub eps_ladder_exhausted: bool,
    pub iteration_capped: bool,
    pub lambdas_skipped: bool,
    /// the CG loop ran out of time; its value only bounds z^C from the LP side
    pub cg_time_limited: bool,
    pub cg1row_time_limited: bool,
}

impl ReportFlags {
    /// `;`-separated names of the set flags.
    pub fn names(&self) -> String {
        let mut v = Vec::new();
        if self.eps_ladder_exhausted {
            v.push("eps_ladder_exhausted");
        }
        if self.iteration_capped {
            v.push("iteration_capped");
        }
        if self.lambdas_skipped {
            v.push("lambdas_skipped");
        }
        if self.cg_time_limited {
            v.push("cg_time_limited");
        }
        if self.cg1row_time_limited {
            v.push("cg1row_time_limited");
        }
        v.join(";")
    }
}

#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub instance: String,
    pub class: InstanceClass,
    pub sense: Sense,
    pub n: usize,
    pub m: usize,
    pub values: BTreeMap<Closure, ClosureValue>,
    pub agg_bracket: Option<AggBracket>,
    pub flags: ReportFlags,
    pub cut_counts: BTreeMap<Closure, usize>,
    pub times_ms: BTreeMap<Closure, u128>,
}

impl ClosureReport {
    pub fn get(&self, c: Closure) -> Option<&ClosureValue> {
        self.values.get(&c)
    }

    pub fn value(&self, c: Closure) -> Option<&Rational> {
        self.values.get(&c).and_then(ClosureValue::value)
    }

    pub fn total_ms(&self) -> u128 {
        self.times_ms.values().sum()
    }

    fn positive_ratio(num: Option<&Rational>, den: Option<&Rational>) -> Option<Rational> {
        match (num, den) {
            (Some(a), Some(b)) if a.is_positive() && b.is_positive() => Some(a / b),
            _ => None,
        }
    }

    /// `z^1C / z^C` for maximization, `z^C / z^1C` for minimization.
    pub fn cg_ratio(&self) -> Option<Rational> {
        let (c, c1) = (self.value(Closure::Cg), self.value(Closure::Cg1Row));
        match self.sense {
            Sense::Max => Self::positive_ratio(c1, c),
            Sense::Min => Self::positive_ratio(c, c1),
        }
    }

    /// `z^1A / z^C` for maximization, `z^C / z^1A` for minimization.
    pub fn agg1_cg_ratio(&self) -> Option<Rational> {
        let (c, a1) = (self.value(Closure::Cg), self.value(Closure::Agg1Row));
        match self.sense {
            Sense::Max => Self::positive_ratio(a1, c),
            Sense::Min => Self::positive_ratio(c, a1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClosureOptions {
    pub iteration_cap: usize,
    /// multipliers for the aggregation bracket; `None` uses the default sample
    pub lambdas: Option<Vec<Vec<Rational>>>,
    pub lambda_seed: u64,
    /// stop CG loops once they meet the integer optimum (when it is computed)
    pub stop_at_ip: bool,
    /// bound rows take part in CG separation
    pub cg_bound_rows: bool,
    /// early-stop threshold for CG separation, see [`CgLoopOptions`]
    pub cg_good_enough: Option<Rational>,
    /// wall-clock budget per CG loop
    pub cg_time_limit: Option<Duration>,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            iteration_cap: DEFAULT_ITERATION_CAP,
            lambdas: None,
            lambda_seed: 0,
            stop_at_ip: true,
            cg_bound_rows: true,
            cg_good_enough: Some(Rational::from_ratio(1, 4)),
            cg_time_limit: None,
        }
    }
}

/// Optimum of the pre-processed LP of a packing instance.
pub fn z_lp_star(inst: &IlpInstance) -> Result<ClosureValue> {
    Ok(ClosureValue::from_lp(&lp_star(inst)?))
}

/// Optimum over the intersection of the single-row integer hulls.
pub fn z_agg_1row(inst: &IlpInstance) -> Result<ClosureValue> {
    let opt = optimize_over_hull_intersection(inst)?;
    Ok(match opt.status {
        LpStatus::Optimal => ClosureValue::Value(opt.value.unwrap()),
        LpStatus::Infeasible => ClosureValue::Infeasible,
        LpStatus::Unbounded => ClosureValue::Unbounded,
    })
}

fn z_ip(inst: &IlpInstance) -> Result<ClosureValue> {
    match solve_mip(inst, &[]) {
        Ok(r) => Ok(match r.status {
            MipStatus::Optimal => ClosureValue::Value(r.value.unwrap()),
            MipStatus::Infeasible => ClosureValue::Infeasible,
        }),
        Err(Error::Unbounded(_)) => Ok(ClosureValue::Unbounded),
        Err(e) => Err(e),
    }
}

/// Computes the requested closures plus whatever they depend on: the
/// aggregation bracket needs the integer optimum and `z^LP*` (packing) or
/// `z^KC` (covering).
pub fn compute_report(inst: &IlpInstance, closures: &[Closure], opts: &ClosureOptions) -> Result<ClosureReport> {
    let mut rep = ClosureReport {
        instance: inst.name.clone(),
        class: inst.classify()?,
        sense: inst.sense,
        n: inst.n(),
        m: inst.m(),
        values: BTreeMap::new(),
        agg_bracket: None,
        flags: ReportFlags::default(),
        cut_counts: BTreeMap::new(),
        times_ms: BTreeMap::new(),
    };
    extend_report(inst, &mut rep, closures, opts)?;
    Ok(rep)
}

/// Adds the requested closures to a report made by [`compute_report`] for
/// the same instance; values already present are kept.
pub fn extend_report(
    inst: &IlpInstance,
    rep: &mut ClosureReport,
    closures: &[Closure],
    opts: &ClosureOptions,
) -> Result<()> {
    let class = rep.class;
    let mut want: Vec<Closure> = closures.to_vec();
    if want.contains(&Closure::Agg) {
        want.push(Closure::Ip);
        want.push(match class {
            InstanceClass::Packing => Closure::LpStar,
            InstanceClass::General => {
                return Err(Error::Class("aggregation brackets need packing or covering data".into()))
            }
            _ => Closure::Kc,
        });
    }
    want.sort();
    want.dedup();
    want.retain(|c| !rep.values.contains_key(c));
    // the integer optimum first so the CG loops can stop early, and the
    // 1-row loop before the full one, which starts from its cuts
    if let (Some(a), Some(b)) = (
        want.iter().position(|&c| c == Closure::Cg),
        want.iter().position(|&c| c == Closure::Cg1Row),
    ) {
        want.swap(a, b);
    }
    if let Some(p) = want.iter().position(|&c| c == Closure::Ip) {
        want.remove(p);
        want.insert(0, Closure::Ip);
    }
    let mut one_row_cuts = Vec::new();
    for c in want {
        let t0 = Instant::now();
        let value = match c {
            Closure::Lp => ClosureValue::from_lp(&crate::lp::solve_lp(inst, &[])),
            Closure::Ip => z_ip(inst)?,
            Closure::LpStar => z_lp_star(inst)?,
            Closure::Kc => {
                let r = z_kc(inst)?;
                rep.cut_counts.insert(c, r.cuts.len());
                r.value
            }
            Closure::Agg1Row => {
                let opt = optimize_over_hull_intersection(inst)?;
                rep.cut_counts.insert(c, opt.cuts.len());
                match opt.status {
                    LpStatus::Optimal => ClosureValue::Value(opt.value.unwrap()),
                    LpStatus::Infeasible => ClosureValue::Infeasible,
                    LpStatus::Unbounded => ClosureValue::Unbounded,
                }
            }
            Closure::Cg | Closure::Cg1Row => {
                let mode = if c == Closure::Cg { CgMode::Full } else { CgMode::OneRow };
                let known_ip = if opts.stop_at_ip {
                    rep.value(Closure::Ip).cloned()
                } else {
                    None
                };
                let lo = CgLoopOptions {
                    iteration_cap: opts.iteration_cap,
                    known_ip,
                    bound_rows: opts.cg_bound_rows,
                    good_enough: opts.cg_good_enough.clone(),
                    good_cuts: DEFAULT_GOOD_CUTS,
                    time_limit: opts.cg_time_limit,
                    initial_cuts: if c == Closure::Cg { std::mem::take(&mut one_row_cuts) } else { Vec::new() },
                };
                let r = z_cg(inst, mode, &lo)?;
                if c == Closure::Cg1Row {
                    one_row_cuts = r.cuts.clone();
                }
                if c == Closure::Cg {
                    rep.flags.cg_time_limited |= r.time_limited;
                } else {
                    rep.flags.cg1row_time_limited |= r.time_limited;
                }
                rep.flags.eps_ladder_exhausted |= r.eps_ladder_exhausted;
                rep.flags.iteration_capped |= r.iteration_capped;
                rep.cut_counts.insert(c, r.cuts.len());
                r.value
            }
            Closure::Agg => {
                let lambdas = opts
                    .lambdas
                    .clone()
                    .unwrap_or_else(|| default_lambdas(inst.m(), opts.lambda_seed));
                let need = |k: Closure| -> Result<Rational> {
                    rep.value(k)
                        .cloned()
                        .ok_or_else(|| Error::precondition(format!("aggregation bracket needs a finite {k} value")))
                };
                let z_i = need(Closure::Ip)?;
                let aux = need(if class == InstanceClass::Packing { Closure::LpStar } else { Closure::Kc })?;
                let b = agg_bracket_from(inst, &lambdas, &z_i, &aux)?;
                rep.flags.lambdas_skipped |= b.lambdas_skipped > 0;
                let v = ClosureValue::Value(b.sampled.clone());
                rep.agg_bracket = Some(b);
                v
            }
        };
        rep.values.insert(c, value);
        rep.times_ms.insert(c, t0.elapsed().as_millis());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_family, Family};
    use crate::rational::{q, qi};

    #[test]
    fn parse_names() {
        assert_eq!(parse_closures("cg, CG1ROW,agg1row").unwrap(), vec![Closure::Cg, Closure::Cg1Row, Closure::Agg1Row]);
        assert!(matches!("FOO".parse::<Closure>(), Err(Error::Validation(_))));
    }

    #[test]
    fn lp_star_examples() {
        let inst = gen_family(Family::PackingTight, 3).unwrap();
        assert_eq!(z_lp_star(&inst).unwrap(), ClosureValue::Value(q(3, 2)));
    }

    #[test]
    fn agg_1row_examples() {
        let pt = gen_family(Family::PackingTight, 3).unwrap();
        assert_eq!(z_agg_1row(&pt).unwrap(), ClosureValue::Value(q(3, 2)));
        let ck = gen_family(Family::CgVsKc, 5).unwrap();
        assert_eq!(z_agg_1row(&ck).unwrap(), ClosureValue::Value(qi(1)));
        let nc = gen_family(Family::Noncover, 5).unwrap();
        assert!(*z_agg_1row(&nc).unwrap().value().unwrap() >= q(34, 5));
    }

    #[test]
    fn packing_tight_report() {
        let inst = gen_family(Family::PackingTight, 100).unwrap();
        let rep = compute_report(&inst, &Closure::ALL.into_iter().filter(|&c| c != Closure::Kc).collect::<Vec<_>>(), &ClosureOptions::default()).unwrap();
        assert_eq!(rep.value(Closure::Agg1Row), Some(&q(200, 101)));
        assert_eq!(rep.value(Closure::Cg), Some(&qi(1)));
        assert_eq!(rep.agg1_cg_ratio(), Some(q(200, 101)));
        let checks = verify_chain(&rep);
        assert!(checks.iter().any(|c| c.name.starts_with("packing")));
        assert!(checks.iter().all(|c| c.outcome != CheckOutcome::Fails), "{checks:?}");
    }

    #[test]
    fn covering_tight_report() {
        let inst = gen_family(Family::CoveringTight, 10).unwrap();
        let all: Vec<Closure> = Closure::ALL.into_iter().filter(|&c| c != Closure::LpStar).collect();
        let rep = compute_report(&inst, &all, &ClosureOptions::default()).unwrap();
        assert_eq!(rep.value(Closure::Cg), Some(&qi(2)));
        assert_eq!(rep.value(Closure::Cg1Row), Some(&q(20, 19)));
        assert_eq!(rep.cg_ratio(), Some(q(38, 20)));
        let checks = verify_chain(&rep);
        assert!(checks.iter().all(|c| c.outcome != CheckOutcome::Fails), "{checks:?}");
        assert_eq!(checks.iter().filter(|c| c.name.starts_with("covering") && c.outcome == CheckOutcome::Holds).count(), 3);
    }

    #[test]
    fn noncover_report() {
        let inst = gen_family(Family::Noncover, 5).unwrap();
        let rep = compute_report(&inst, &[Closure::Lp, Closure::Cg, Closure::Agg1Row, Closure::Ip], &ClosureOptions::default()).unwrap();
        assert_eq!(rep.value(Closure::Cg), Some(&qi(2)));
        assert!(rep.agg1_cg_ratio().unwrap() >= q(17, 5));
        let checks = verify_chain(&rep);
        assert!(checks.iter().all(|c| !c.name.starts_with("packing") || c.outcome == CheckOutcome::Skipped));
        assert!(checks.iter().all(|c| c.outcome != CheckOutcome::Fails));
    }

    #[test]
    fn general_agg_is_class_error() {
        let inst = gen_family(Family::Noncover, 5).unwrap();
        assert!(matches!(compute_report(&inst, &[Closure::Agg], &ClosureOptions::default()), Err(Error::Class(_))));
    }
}
