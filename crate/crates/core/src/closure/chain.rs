//! Exact checks of the containment orderings and approximation chains.

use std::cmp::Ordering;

use crate::instance::{InstanceClass, Sense};
use crate::rational::{qi, Rational};

use super::{Closure, ClosureReport, ClosureValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckOutcome {
    Holds,
    Fails,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainCheck {
    pub name: String,
    pub outcome: CheckOutcome,
}

/// Value on the extended line, with an empty closure as the strongest
/// possible bound in the optimization direction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Ext {
    NegInf,
    Fin(Rational),
    PosInf,
}

fn ext(v: &ClosureValue, sense: Sense) -> Ext {
    match (v, sense) {
        (ClosureValue::Value(r), _) => Ext::Fin(r.clone()),
        (ClosureValue::Infeasible, Sense::Max) | (ClosureValue::Unbounded, Sense::Min) => Ext::NegInf,
        (ClosureValue::Infeasible, Sense::Min) | (ClosureValue::Unbounded, Sense::Max) => Ext::PosInf,
    }
}

fn outcome(b: bool) -> CheckOutcome {
    if b {
        CheckOutcome::Holds
    } else {
        CheckOutcome::Fails
    }
}

/// Runs every check that applies to the report's class; checks whose
/// inputs are missing are reported as skipped.
pub fn verify_chain(rep: &ClosureReport) -> Vec<ChainCheck> {
    let mut out = Vec::new();
    let sense = rep.sense;
    // a contains b, so a's bound is at least as weak
    let contains = [
        (Closure::Lp, Closure::Cg),
        (Closure::Cg, Closure::Ip),
        (Closure::Lp, Closure::Cg1Row),
        (Closure::Cg1Row, Closure::Agg1Row),
        (Closure::Agg1Row, Closure::Ip),
        (Closure::Cg1Row, Closure::Cg),
        (Closure::Lp, Closure::LpStar),
        (Closure::LpStar, Closure::Ip),
        (Closure::Lp, Closure::Kc),
        (Closure::Kc, Closure::Ip),
    ];
    for (a, b) in contains {
        let rel = if sense == Sense::Max { ">=" } else { "<=" };
        let name = format!("containment: z_{a} {rel} z_{b}");
        let o = match (rep.get(a), rep.get(b)) {
            (Some(x), Some(y)) => {
                let ord = ext(x, sense).cmp(&ext(y, sense));
                outcome(match sense {
                    Sense::Max => ord != Ordering::Less,
                    Sense::Min => ord != Ordering::Greater,
                })
            }
            _ => CheckOutcome::Skipped,
        };
        out.push(ChainCheck { name, outcome: o });
    }
    if let Some(b) = &rep.agg_bracket {
        out.push(ChainCheck {
            name: "bracket: lo <= hi".into(),
            outcome: outcome(b.lo <= b.hi),
        });
    }
    let two = qi(2);
    let v = |c: Closure| rep.value(c);
    let lo = rep.agg_bracket.as_ref().map(|b| &b.lo);
    let mut check = |name: &str, a: Option<&Rational>, b: Option<&Rational>, f: &dyn Fn(&Rational, &Rational) -> bool, applies: bool| {
        let o = match (applies, a, b) {
            (true, Some(a), Some(b)) => outcome(f(a, b)),
            _ => CheckOutcome::Skipped,
        };
        out.push(ChainCheck {
            name: name.to_string(),
            outcome: o,
        });
    };
    let packing = rep.class == InstanceClass::Packing;
    let covering = rep.class.is_covering();
    check("packing: z1A <= z1C", v(Closure::Agg1Row), v(Closure::Cg1Row), &|a, b| a <= b, packing);
    check("packing: z1C <= zLP*", v(Closure::Cg1Row), v(Closure::LpStar), &|a, b| a <= b, packing);
    check("packing: zLP* <= 2 zC", v(Closure::LpStar), v(Closure::Cg), &|a, b| *a <= b * &two, packing);
    check("packing: z1C <= 2 zC", v(Closure::Cg1Row), v(Closure::Cg), &|a, b| *a <= b * &two, packing);
    check("covering: 2 z1C >= zC", v(Closure::Cg1Row), v(Closure::Cg), &|a, b| a * &two >= *b, covering);
    check("covering: 2 z1A >= agg_lo", v(Closure::Agg1Row), lo, &|a, b| a * &two >= *b, covering);
    check("covering: 2 zKC >= agg_lo", v(Closure::Kc), lo, &|a, b| a * &two >= *b, covering);
    out
}
