//! Exact branch-and-bound over [`LpModel`].
//!
//! Best-bound node selection with FIFO ties, interleaved with plunges into
//! the child on the rounding side of the branching variable; most-fractional
//! branching with lowest-index ties. Nodes are evaluated lazily: a node carries its
//! parent's bound and is solved when popped. The LP model is shared by all
//! nodes; only variable bounds change, so each node re-optimizes from the
//! previous basis with the dual simplex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::instance::{IlpInstance, LinearConstraint, Sense};
use crate::lp::{LpModel, LpStatus};
use crate::rational::lcm_denominators;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct MipResult {
    pub status: MipStatus,
    pub point: Option<Vec<Rational>>,
    pub value: Option<Rational>,
    pub node_count: u64,
    /// superseded incumbents, oldest first, when requested
    pub pool: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, Default)]
pub struct MipOptions {
    /// Only solutions strictly better than this objective value are
    /// accepted; `Infeasible` then means none exists.
    pub cutoff: Option<Rational>,
    /// Abort with a resource error after this many nodes.
    pub node_limit: Option<u64>,
    /// Stop as soon as an incumbent reaches this objective value; the
    /// result is then feasible but not necessarily optimal.
    pub target: Option<Rational>,
    /// Keep superseded incumbents in [`MipResult::pool`].
    pub keep_pool: bool,
    /// Abort with a resource error once this instant has passed.
    pub deadline: Option<Instant>,
}

type Bounds = Vec<(Option<Rational>, Option<Rational>)>;

struct Node {
    /// parent LP value in the maximization direction
    bound: Rational,
    id: u64,
    bounds: Bounds,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Integer optimum of `inst` with `extra_cuts` appended.
pub fn solve_mip(inst: &IlpInstance, extra_cuts: &[LinearConstraint]) -> Result<MipResult> {
    let mut lp = LpModel::from_instance(inst);
    for c in extra_cuts {
        lp.add_constraint(c);
    }
    let integer = vec![true; inst.n()];
    solve_model(lp, &integer, &MipOptions::default())
}

/// Branch-and-bound on `lp` where `integer[j]` marks integer variables.
pub fn solve_model(lp: LpModel, integer: &[bool], opts: &MipOptions) -> Result<MipResult> {
    solve_model_hooked(lp, integer, opts, &mut |_| false)
}

/// As [`solve_model`], calling `hook` on every node LP optimum that is not
/// integral. The search stops early when the hook returns true; the result
/// then reflects the incumbent at that moment.
pub fn solve_model_hooked(
    mut lp: LpModel,
    integer: &[bool],
    opts: &MipOptions,
    hook: &mut dyn FnMut(&[Rational]) -> bool,
) -> Result<MipResult> {
    assert_eq!(integer.len(), lp.n());
    let sense = lp.sense();
    let sign = |v: &Rational| match sense {
        Sense::Max => v.clone(),
        Sense::Min => -v,
    };
    // when only integer variables carry cost, every integer point has an
    // objective in (1/D)Z and node bounds can be rounded down to that grid
    let grid: Option<Rational> = lp
        .cost()
        .iter()
        .zip(integer)
        .all(|(c, &int)| int || c.is_zero())
        .then(|| Rational::from_integer(&lcm_denominators(lp.cost())));
    let mut incumbent: Option<(Rational, Vec<Rational>)> = None;
    let mut pool = Vec::new();
    // internal (maximization) threshold a node must beat
    let mut threshold: Option<Rational> = opts.cutoff.as_ref().map(sign);
    let root_bounds: Bounds = (0..lp.n())
        .map(|j| {
            let (l, h) = lp.var_bounds(j);
            (l.cloned(), h.cloned())
        })
        .collect();
    let mut heap = BinaryHeap::new();
    let mut next_id = 0u64;
    let mut nodes = 0u64;
    let mut first = true;
    heap.push(Node {
        bound: Rational::zero(),
        id: 0,
        bounds: root_bounds,
    });
    let mut plunge: Option<Node> = None;
    while let Some(node) = plunge.take().or_else(|| heap.pop()) {
        if !first {
            if let Some(t) = &threshold {
                if node.bound <= *t {
                    continue;
                }
            }
        }
        if let Some(limit) = opts.node_limit {
            if nodes >= limit {
                return Err(Error::Resource(format!("branch-and-bound node limit {limit}")));
            }
        }
        if let Some(d) = opts.deadline {
            if Instant::now() >= d {
                return Err(Error::Resource("branch-and-bound deadline passed".into()));
            }
        }
        nodes += 1;
        for (j, (l, h)) in node.bounds.iter().enumerate() {
            lp.set_var_bounds(j, l.clone(), h.clone());
        }
        let res = lp.solve();
        match res.status {
            LpStatus::Infeasible => {
                first = false;
                continue;
            }
            LpStatus::Unbounded => {
                return Err(Error::Unbounded(
                    "LP relaxation is unbounded; bound the integer variables".into(),
                ))
            }
            LpStatus::Optimal => {}
        }
        first = false;
        let value = sign(res.value.as_ref().unwrap());
        let bound = match &grid {
            Some(d) => &Rational::from_integer(&(&value * d).floor()) / d,
            None => value.clone(),
        };
        if let Some(t) = &threshold {
            if bound <= *t {
                continue;
            }
        }
        let x = res.point.unwrap();
        // most fractional integer variable
        let mut branch: Option<(usize, Rational)> = None;
        let half = Rational::from_ratio(1, 2);
        for j in 0..x.len() {
            if !integer[j] || x[j].is_integer() {
                continue;
            }
            let f = x[j].fract();
            let dist = (&f - &half).abs();
            if branch.as_ref().map_or(true, |(_, d)| dist < *d) {
                branch = Some((j, dist));
            }
        }
        match branch {
            None => {
                threshold = Some(value.clone());
                let reached = opts.target.as_ref().map_or(false, |t| sign(t) <= value);
                if let Some((_, old)) = incumbent.take() {
                    if opts.keep_pool {
                        pool.push(old);
                    }
                }
                incumbent = Some((value, x));
                if reached {
                    break;
                }
            }
            Some((j, _)) => {
                if hook(&x) {
                    break;
                }
                let down = Rational::from_integer(&x[j].floor());
                let up = &down + &Rational::one();
                let up_first = x[j].fract() >= half;
                let mut b_down = node.bounds.clone();
                b_down[j].1 = Some(down);
                let mut b_up = node.bounds;
                b_up[j].0 = Some(up);
                let (near, far) = if up_first { (b_up, b_down) } else { (b_down, b_up) };
                next_id += 1;
                heap.push(Node {
                    bound: bound.clone(),
                    id: next_id,
                    bounds: far,
                });
                next_id += 1;
                plunge = Some(Node {
                    bound: bound.clone(),
                    id: next_id,
                    bounds: near,
                });
            }
        }
    }
    Ok(match incumbent {
        Some((v, x)) => MipResult {
            status: MipStatus::Optimal,
            value: Some(sign(&v)),
            point: Some(x),
            node_count: nodes,
            pool,
        },
        None => MipResult {
            status: MipStatus::Infeasible,
            point: None,
            value: None,
            node_count: nodes,
            pool,
        },
    })
}
