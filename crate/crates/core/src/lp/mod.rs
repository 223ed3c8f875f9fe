//! Exact linear programming.
//!
//! [`LpModel`] keeps its tableau between solves, so adding rows or changing
//! variable bounds re-optimizes from the previous basis (dual simplex when
//! the basis is still dual feasible). Every result carries a certificate
//! that [`LpModel::verify`] checks against the original data.

mod tableau;

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use tableau::{Outcome, Tableau};

use crate::instance::{IlpInstance, LinearConstraint, Relation, Sense};
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Certificates are stated for the maximization of the internal objective
/// (the objective itself for MAX, its negation for MIN).
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Row multipliers `y`; with `d = c - y^T A` the bound
    /// `sum_{d_j>0} d_j u_j + sum_{d_j<0} d_j l_j + sum y_i r_i` (each row
    /// activity at the bound matching the sign of `y_i`) equals the optimum.
    Dual(Vec<Rational>),
    /// Row multipliers whose aggregate `y^T A x` has a range over the
    /// variable box disjoint from the range of `y^T r` over the row bounds.
    Farkas(Vec<Rational>),
    /// Improving direction in the structural variables.
    Ray(Vec<Rational>),
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub point: Option<Vec<Rational>>,
    pub value: Option<Rational>,
    pub certificate: Certificate,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

static AUDIT: AtomicBool = AtomicBool::new(false);
static AUDIT_CHECKED: AtomicU64 = AtomicU64::new(0);
static AUDIT_FAILED: AtomicU64 = AtomicU64::new(0);

/// Enables certificate checking on every solve in the process.
pub fn set_audit(on: bool) {
    AUDIT.store(on, Ordering::SeqCst);
}

/// `(checked, failed)` certificate counts since start.
pub fn audit_counts() -> (u64, u64) {
    (
        AUDIT_CHECKED.load(Ordering::SeqCst),
        AUDIT_FAILED.load(Ordering::SeqCst),
    )
}

/// A linear program `sense c.x` subject to `lo_i <= a_i . x <= hi_i` and
/// `l_j <= x_j <= u_j`. Missing bounds are infinite.
#[derive(Clone)]
pub struct LpModel {
    sense: Sense,
    cost: Vec<Rational>,
    var_lo: Vec<Option<Rational>>,
    var_hi: Vec<Option<Rational>>,
    rows: Vec<Vec<Rational>>,
    row_lo: Vec<Option<Rational>>,
    row_hi: Vec<Option<Rational>>,
    tab: Option<Tableau>,
}

fn rel_bounds(rel: Relation, rhs: &Rational) -> (Option<Rational>, Option<Rational>) {
    match rel {
        Relation::Le => (None, Some(rhs.clone())),
        Relation::Ge => (Some(rhs.clone()), None),
        Relation::Eq => (Some(rhs.clone()), Some(rhs.clone())),
    }
}

impl LpModel {
    /// Variables default to `[0, +inf)`.
    pub fn new(sense: Sense, cost: Vec<Rational>) -> Self {
        let n = cost.len();
        LpModel {
            sense,
            cost,
            var_lo: vec![Some(Rational::zero()); n],
            var_hi: vec![None; n],
            rows: Vec::new(),
            row_lo: Vec::new(),
            row_hi: Vec::new(),
            tab: None,
        }
    }

    /// LP relaxation of an instance.
    pub fn from_instance(inst: &IlpInstance) -> Self {
        let mut lp = LpModel::new(inst.sense, inst.objective.clone());
        for j in 0..inst.n() {
            lp.var_hi[j] = inst.upper_rational(j);
        }
        for r in &inst.rows {
            lp.add_constraint(r);
        }
        lp
    }

    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn cost(&self) -> &[Rational] {
        &self.cost
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn var_bounds(&self, j: usize) -> (Option<&Rational>, Option<&Rational>) {
        (self.var_lo[j].as_ref(), self.var_hi[j].as_ref())
    }

    pub fn add_constraint(&mut self, c: &LinearConstraint) {
        let (lo, hi) = rel_bounds(c.relation, &c.rhs);
        self.add_row(c.coeffs.clone(), lo, hi);
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, lo: Option<Rational>, hi: Option<Rational>) {
        assert_eq!(coeffs.len(), self.n(), "row dimension mismatch");
        if let Some(t) = &mut self.tab {
            t.add_row(&coeffs, lo.clone(), hi.clone());
        }
        self.rows.push(coeffs);
        self.row_lo.push(lo);
        self.row_hi.push(hi);
    }

    pub fn set_var_bounds(&mut self, j: usize, lo: Option<Rational>, hi: Option<Rational>) {
        if self.var_lo[j] == lo && self.var_hi[j] == hi {
            return;
        }
        if let Some(t) = &mut self.tab {
            t.set_bounds(j, lo.clone(), hi.clone());
        }
        self.var_lo[j] = lo;
        self.var_hi[j] = hi;
    }

    fn internal_cost(&self) -> Vec<Rational> {
        match self.sense {
            Sense::Max => self.cost.clone(),
            Sense::Min => self.cost.iter().map(|c| -c).collect(),
        }
    }

    fn build(&self) -> Tableau {
        let mut t = Tableau::new(self.internal_cost(), self.var_lo.clone(), self.var_hi.clone());
        for i in 0..self.m() {
            t.add_row(&self.rows[i], self.row_lo[i].clone(), self.row_hi[i].clone());
        }
        t
    }

    /// Total pivots performed by this model so far.
    pub fn pivots(&self) -> u64 {
        self.tab.as_ref().map_or(0, |t| t.pivots)
    }

    /// Re-optimizes from the current basis.
    pub fn solve(&mut self) -> LpResult {
        if self.tab.is_none() {
            self.tab = Some(self.build());
        }
        let t = self.tab.as_mut().unwrap();
        let outcome = if t.dual_feasible() {
            match t.dual() {
                Some(o) => o,
                None => t.primal(),
            }
        } else {
            t.primal()
        };
        let n = self.cost.len();
        let result = match outcome {
            Outcome::Optimal => {
                let point = t.x[..n].to_vec();
                let y = t.reduced_costs()[n..].to_vec();
                LpResult {
                    status: LpStatus::Optimal,
                    value: Some(dot(&self.cost, &point)),
                    point: Some(point),
                    certificate: Certificate::Dual(y),
                }
            }
            Outcome::Infeasible(y) => LpResult {
                status: LpStatus::Infeasible,
                point: None,
                value: None,
                certificate: Certificate::Farkas(y),
            },
            Outcome::Unbounded(ray) => LpResult {
                status: LpStatus::Unbounded,
                point: Some(t.x[..n].to_vec()),
                value: None,
                certificate: Certificate::Ray(ray[..n].to_vec()),
            },
        };
        if AUDIT.load(Ordering::Relaxed) {
            AUDIT_CHECKED.fetch_add(1, Ordering::SeqCst);
            if !self.verify(&result) {
                AUDIT_FAILED.fetch_add(1, Ordering::SeqCst);
            }
        }
        result
    }

    fn point_feasible(&self, x: &[Rational]) -> bool {
        let within = |v: &Rational, lo: &Option<Rational>, hi: &Option<Rational>| {
            lo.as_ref().map_or(true, |l| v >= l) && hi.as_ref().map_or(true, |h| v <= h)
        };
        x.len() == self.n()
            && (0..self.n()).all(|j| within(&x[j], &self.var_lo[j], &self.var_hi[j]))
            && (0..self.m()).all(|i| within(&dot(&self.rows[i], x), &self.row_lo[i], &self.row_hi[i]))
    }

    /// Checks a result's certificate exactly against the model data.
    pub fn verify(&self, res: &LpResult) -> bool {
        let c = self.internal_cost();
        let n = self.n();
        match (&res.status, &res.certificate) {
            (LpStatus::Optimal, Certificate::Dual(y)) => {
                let (Some(x), Some(value)) = (&res.point, &res.value) else {
                    return false;
                };
                if y.len() != self.m() || !self.point_feasible(x) || *value != dot(&self.cost, x) {
                    return false;
                }
                // d = c - y^T A over structurals; y_i itself on activity i
                let mut bound = Rational::zero();
                let mut add = |d: &Rational, lo: &Option<Rational>, hi: &Option<Rational>| -> bool {
                    if d.is_positive() {
                        match hi {
                            Some(h) => bound += d * h,
                            None => return false,
                        }
                    } else if d.is_negative() {
                        match lo {
                            Some(l) => bound += d * l,
                            None => return false,
                        }
                    }
                    true
                };
                for j in 0..n {
                    let mut d = c[j].clone();
                    for i in 0..self.m() {
                        if !y[i].is_zero() && !self.rows[i][j].is_zero() {
                            d -= &y[i] * &self.rows[i][j];
                        }
                    }
                    if !add(&d, &self.var_lo[j], &self.var_hi[j]) {
                        return false;
                    }
                }
                for i in 0..self.m() {
                    if !add(&y[i], &self.row_lo[i], &self.row_hi[i]) {
                        return false;
                    }
                }
                bound == dot(&c, x)
            }
            (LpStatus::Infeasible, Certificate::Farkas(y)) => {
                if y.len() != self.m() {
                    return false;
                }
                // y^T A x ranges over [glo, ghi]; y^T r over [rlo, rhi]
                let g: Vec<Rational> = (0..n)
                    .map(|j| (0..self.m()).map(|i| &y[i] * &self.rows[i][j]).sum())
                    .collect();
                let (glo, ghi) = range(&g, &self.var_lo, &self.var_hi);
                let (rlo, rhi) = range(y, &self.row_lo, &self.row_hi);
                let disjoint = |a: &Option<Rational>, b: &Option<Rational>| {
                    matches!((a, b), (Some(a), Some(b)) if a < b)
                };
                disjoint(&ghi, &rlo) || disjoint(&rhi, &glo)
            }
            (LpStatus::Unbounded, Certificate::Ray(dir)) => {
                let Some(x) = &res.point else { return false };
                if dir.len() != n || !self.point_feasible(x) || !dot(&c, dir).is_positive() {
                    return false;
                }
                let recedes = |v: &Rational, lo: &Option<Rational>, hi: &Option<Rational>| {
                    (!v.is_positive() || hi.is_none()) && (!v.is_negative() || lo.is_none())
                };
                (0..n).all(|j| recedes(&dir[j], &self.var_lo[j], &self.var_hi[j]))
                    && (0..self.m())
                        .all(|i| recedes(&dot(&self.rows[i], dir), &self.row_lo[i], &self.row_hi[i]))
            }
            _ => false,
        }
    }
}

/// Range of `g . z` over the box; `None` ends are infinite.
fn range(
    g: &[Rational],
    lo: &[Option<Rational>],
    hi: &[Option<Rational>],
) -> (Option<Rational>, Option<Rational>) {
    let mut min = Some(Rational::zero());
    let mut max = Some(Rational::zero());
    for j in 0..g.len() {
        let gj = &g[j];
        if gj.is_zero() {
            continue;
        }
        let (for_min, for_max) = if gj.is_positive() {
            (&lo[j], &hi[j])
        } else {
            (&hi[j], &lo[j])
        };
        min = match (min, for_min) {
            (Some(acc), Some(b)) => Some(acc + gj * b),
            _ => None,
        };
        max = match (max, for_max) {
            (Some(acc), Some(b)) => Some(acc + gj * b),
            _ => None,
        };
    }
    (min, max)
}

/// LP relaxation of `inst` intersected with `extra_cuts`.
pub fn solve_lp(inst: &IlpInstance, extra_cuts: &[LinearConstraint]) -> LpResult {
    let mut lp = LpModel::from_instance(inst);
    for c in extra_cuts {
        lp.add_constraint(c);
    }
    lp.solve()
}

#[cfg(test)]
mod tests;
