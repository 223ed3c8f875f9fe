//! Dense bounded-variable simplex tableau over exact rationals.
//!
//! Columns are the structural variables followed by one activity variable
//! `r_i` per row, tied by `A x - r = 0`; row bounds live on `r_i`. The
//! tableau stores `T = B^-1 [A | -I]`, so the basic values satisfy
//! `z_B = -T_N z_N` and row `i` of `B^-1` is `-T[i][n..]`.

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Basic,
    Lower,
    Upper,
    /// nonbasic free variable held at zero
    Zero,
}

pub(crate) enum Outcome {
    Optimal,
    /// phase-one or dual-simplex infeasibility, with row multipliers
    Infeasible(Vec<Rational>),
    /// improving ray over all columns
    Unbounded(Vec<Rational>),
}

/// Consecutive degenerate pivots tolerated before switching to
/// smallest-index selection.
const DEGENERACY_STREAK: usize = 30;
/// Dual simplex pivots per call before falling back to the primal method.
const DUAL_PIVOT_LIMIT: usize = 20_000;

#[derive(Clone)]
pub(crate) struct Tableau {
    pub n: usize,
    pub t: Vec<Vec<Rational>>,
    pub lo: Vec<Option<Rational>>,
    pub hi: Vec<Option<Rational>>,
    pub cost: Vec<Rational>,
    pub basis: Vec<usize>,
    pub status: Vec<Status>,
    pub x: Vec<Rational>,
    d: Vec<Rational>,
    d_valid: bool,
    pub pivots: u64,
}

fn nonbasic_start(lo: &Option<Rational>, hi: &Option<Rational>) -> (Status, Rational) {
    match (lo, hi) {
        (Some(l), _) => (Status::Lower, l.clone()),
        (None, Some(h)) => (Status::Upper, h.clone()),
        (None, None) => (Status::Zero, Rational::zero()),
    }
}

impl Tableau {
    pub fn new(
        cost: Vec<Rational>,
        lo: Vec<Option<Rational>>,
        hi: Vec<Option<Rational>>,
    ) -> Self {
        let n = cost.len();
        let mut status = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        for j in 0..n {
            let (s, v) = nonbasic_start(&lo[j], &hi[j]);
            status.push(s);
            x.push(v);
        }
        Tableau {
            n,
            t: Vec::new(),
            d: vec![Rational::zero(); n],
            lo,
            hi,
            cost,
            basis: Vec::new(),
            status,
            x,
            d_valid: false,
            pivots: 0,
        }
    }

    pub fn ncols(&self) -> usize {
        self.cost.len()
    }

    /// Appends row `a . x` with activity bounds `[lo, hi]`; its activity
    /// variable enters the basis.
    pub fn add_row(&mut self, a: &[Rational], lo: Option<Rational>, hi: Option<Rational>) {
        debug_assert_eq!(a.len(), self.n);
        let col = self.ncols();
        for row in &mut self.t {
            row.push(Rational::zero());
        }
        // new row of T: -(a - sum over basic structurals of a_k * T[i])
        let mut row: Vec<Rational> = a.iter().map(|v| -v).collect();
        row.resize(col + 1, Rational::zero());
        row[col] = Rational::one();
        for (i, &k) in self.basis.iter().enumerate() {
            if k < self.n && !a[k].is_zero() {
                let f = &a[k];
                for (dst, src) in row.iter_mut().zip(&self.t[i]) {
                    if !src.is_zero() {
                        *dst += f * src;
                    }
                }
            }
        }
        let value = crate::rational::dot(a, &self.x[..self.n]);
        self.t.push(row);
        self.lo.push(lo);
        self.hi.push(hi);
        self.cost.push(Rational::zero());
        self.d.push(Rational::zero());
        self.basis.push(col);
        self.status.push(Status::Basic);
        self.x.push(value);
    }

    /// Changes the bounds of a column, moving it if nonbasic.
    pub fn set_bounds(&mut self, j: usize, lo: Option<Rational>, hi: Option<Rational>) {
        self.lo[j] = lo;
        self.hi[j] = hi;
        if self.status[j] == Status::Basic {
            return;
        }
        let (s, v) = match self.status[j] {
            Status::Upper if self.hi[j].is_some() => (Status::Upper, self.hi[j].clone().unwrap()),
            Status::Zero if self.lo[j].is_none() && self.hi[j].is_none() => {
                (Status::Zero, Rational::zero())
            }
            _ => nonbasic_start(&self.lo[j], &self.hi[j]),
        };
        let delta = &v - &self.x[j];
        self.status[j] = s;
        self.x[j] = v;
        if !delta.is_zero() {
            for i in 0..self.t.len() {
                let tij = &self.t[i][j];
                if !tij.is_zero() {
                    let k = self.basis[i];
                    let nv = &self.x[k] - &(tij * &delta);
                    self.x[k] = nv;
                }
            }
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        matches!((&self.lo[j], &self.hi[j]), (Some(l), Some(h)) if l == h)
    }

    fn can_increase(&self, j: usize) -> bool {
        match self.status[j] {
            Status::Lower => self.hi[j].as_ref() != Some(&self.x[j]),
            Status::Zero => true,
            _ => false,
        }
    }

    fn can_decrease(&self, j: usize) -> bool {
        match self.status[j] {
            Status::Upper => self.lo[j].as_ref() != Some(&self.x[j]),
            Status::Zero => true,
            _ => false,
        }
    }

    fn below(&self, k: usize) -> bool {
        matches!(&self.lo[k], Some(l) if self.x[k] < *l)
    }

    fn above(&self, k: usize) -> bool {
        matches!(&self.hi[k], Some(h) if self.x[k] > *h)
    }

    fn compute_d(&mut self) {
        let ncols = self.ncols();
        let mut d = self.cost.clone();
        for (i, &k) in self.basis.iter().enumerate() {
            let ck = &self.cost[k];
            if ck.is_zero() {
                continue;
            }
            for j in 0..ncols {
                let tij = &self.t[i][j];
                if !tij.is_zero() {
                    d[j] -= ck * tij;
                }
            }
        }
        self.d = d;
        self.d_valid = true;
    }

    fn pivot(&mut self, r: usize, q: usize) {
        self.pivots += 1;
        let piv = self.t[r][q].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for v in self.t[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let nz: Vec<usize> = (0..self.t[r].len())
            .filter(|&j| !self.t[r][j].is_zero())
            .collect();
        let prow = std::mem::take(&mut self.t[r]);
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q].clone();
            if f.is_zero() {
                continue;
            }
            for &j in &nz {
                row[j] -= &f * &prow[j];
            }
        }
        if self.d_valid {
            let f = self.d[q].clone();
            if !f.is_zero() {
                for &j in &nz {
                    self.d[j] -= &f * &prow[j];
                }
            }
        }
        self.t[r] = prow;
        self.basis[r] = q;
    }

    /// Moves entering column `q` by `s * step` and updates basic values.
    fn step(&mut self, q: usize, s: i32, step: &Rational) {
        if step.is_zero() {
            return;
        }
        let signed = if s > 0 { step.clone() } else { -step };
        self.x[q] += &signed;
        for i in 0..self.t.len() {
            let tiq = &self.t[i][q];
            if !tiq.is_zero() {
                let k = self.basis[i];
                let nv = &self.x[k] - &(tiq * &signed);
                self.x[k] = nv;
            }
        }
    }

    fn farkas_from_weights(&self, w: &[i32]) -> Vec<Rational> {
        let m = self.t.len();
        let mut y = vec![Rational::zero(); m];
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0 {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                let v = &self.t[i][self.n + k];
                if !v.is_zero() {
                    if wi > 0 {
                        *yk -= v;
                    } else {
                        *yk += v;
                    }
                }
            }
        }
        y
    }

    /// Two-phase primal simplex from the current basis.
    pub fn primal(&mut self) -> Outcome {
        let m = self.t.len();
        let ncols = self.ncols();
        let mut streak = 0usize;
        let mut bland = false;
        let mut w = vec![0i32; m];
        let mut dj = vec![Rational::zero(); ncols];
        loop {
            let mut phase1 = false;
            for i in 0..m {
                let k = self.basis[i];
                w[i] = if self.below(k) {
                    1
                } else if self.above(k) {
                    -1
                } else {
                    0
                };
                phase1 |= w[i] != 0;
            }
            if phase1 {
                for v in dj.iter_mut() {
                    *v = Rational::zero();
                }
                for i in 0..m {
                    if w[i] == 0 {
                        continue;
                    }
                    for (j, v) in dj.iter_mut().enumerate() {
                        let tij = &self.t[i][j];
                        if !tij.is_zero() {
                            if w[i] > 0 {
                                *v -= tij;
                            } else {
                                *v += tij;
                            }
                        }
                    }
                }
            } else if !self.d_valid {
                self.compute_d();
            }
            let d = if phase1 { &dj } else { &self.d };

            // entering column
            let mut enter: Option<(usize, i32)> = None;
            let mut best = Rational::zero();
            for j in 0..ncols {
                if self.status[j] == Status::Basic || self.is_fixed(j) || d[j].is_zero() {
                    continue;
                }
                let s = if d[j].is_positive() && self.can_increase(j) {
                    1
                } else if d[j].is_negative() && self.can_decrease(j) {
                    -1
                } else {
                    continue;
                };
                if bland {
                    enter = Some((j, s));
                    break;
                }
                let mag = d[j].abs();
                if enter.is_none() || mag > best {
                    best = mag;
                    enter = Some((j, s));
                }
            }
            let Some((q, s)) = enter else {
                if phase1 {
                    return Outcome::Infeasible(self.farkas_from_weights(&w));
                }
                return Outcome::Optimal;
            };

            // ratio test
            let mut limit: Option<Rational> = match (&self.lo[q], &self.hi[q]) {
                (Some(l), Some(h)) => Some(h - l),
                _ => None,
            };
            let mut leave: Option<(usize, Status)> = None;
            for i in 0..m {
                let tiq = &self.t[i][q];
                if tiq.is_zero() {
                    continue;
                }
                let k = self.basis[i];
                let delta = if s > 0 { -tiq } else { tiq.clone() };
                let cand = if delta.is_positive() {
                    if self.below(k) {
                        Some(((self.lo[k].as_ref().unwrap() - &self.x[k]) / &delta, Status::Lower))
                    } else if self.above(k) {
                        None
                    } else {
                        self.hi[k]
                            .as_ref()
                            .map(|h| ((h - &self.x[k]) / &delta, Status::Upper))
                    }
                } else if self.above(k) {
                    Some(((self.hi[k].as_ref().unwrap() - &self.x[k]) / &delta, Status::Upper))
                } else if self.below(k) {
                    None
                } else {
                    self.lo[k]
                        .as_ref()
                        .map(|l| ((l - &self.x[k]) / &delta, Status::Lower))
                };
                if let Some((ratio, bound)) = cand {
                    let better = match &limit {
                        None => true,
                        Some(cur) => {
                            ratio < *cur
                                || (ratio == *cur
                                    && leave.is_some_and(|(r, _)| k < self.basis[r]))
                        }
                    };
                    if better {
                        limit = Some(ratio);
                        leave = Some((i, bound));
                    }
                }
            }
            let Some(step) = limit else {
                let mut ray = vec![Rational::zero(); ncols];
                ray[q] = Rational::from_int(s as i64);
                for i in 0..m {
                    let tiq = &self.t[i][q];
                    if !tiq.is_zero() {
                        ray[self.basis[i]] = if s > 0 { -tiq } else { tiq.clone() };
                    }
                }
                return Outcome::Unbounded(ray);
            };

            if step.is_zero() {
                streak += 1;
                if streak > DEGENERACY_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }
            self.step(q, s, &step);
            match leave {
                None => {
                    // bound flip
                    if s > 0 {
                        self.status[q] = Status::Upper;
                        self.x[q] = self.hi[q].clone().unwrap();
                    } else {
                        self.status[q] = Status::Lower;
                        self.x[q] = self.lo[q].clone().unwrap();
                    }
                }
                Some((r, bound)) => {
                    let k = self.basis[r];
                    self.pivot(r, q);
                    self.status[q] = Status::Basic;
                    self.status[k] = bound;
                    self.x[k] = match bound {
                        Status::Lower => self.lo[k].clone().unwrap(),
                        _ => self.hi[k].clone().unwrap(),
                    };
                }
            }
        }
    }

    pub fn dual_feasible(&self) -> bool {
        if !self.d_valid {
            return false;
        }
        (0..self.ncols()).all(|j| {
            if self.is_fixed(j) {
                return true;
            }
            match self.status[j] {
                Status::Basic => true,
                Status::Lower => !self.d[j].is_positive(),
                Status::Upper => !self.d[j].is_negative(),
                Status::Zero => self.d[j].is_zero(),
            }
        })
    }

    /// Dual simplex from a dual-feasible basis. `None` means the pivot
    /// budget ran out and the caller should use the primal method.
    pub fn dual(&mut self) -> Option<Outcome> {
        debug_assert!(self.dual_feasible());
        let m = self.t.len();
        let ncols = self.ncols();
        let mut streak = 0usize;
        let mut bland = false;
        for _ in 0..DUAL_PIVOT_LIMIT {
            // leaving row
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..m {
                let k = self.basis[i];
                let viol = if self.below(k) {
                    self.lo[k].as_ref().unwrap() - &self.x[k]
                } else if self.above(k) {
                    &self.x[k] - self.hi[k].as_ref().unwrap()
                } else {
                    continue;
                };
                let better = match &leave {
                    None => true,
                    Some((r, v)) => {
                        if bland {
                            k < self.basis[*r]
                        } else {
                            viol > *v || (viol == *v && k < self.basis[*r])
                        }
                    }
                };
                if better {
                    leave = Some((i, viol));
                }
            }
            let Some((r, _)) = leave else {
                return Some(Outcome::Optimal);
            };
            let k = self.basis[r];
            let up = self.below(k);
            let target = if up {
                self.lo[k].clone().unwrap()
            } else {
                self.hi[k].clone().unwrap()
            };

            // entering column by dual ratio
            let mut enter: Option<(usize, Rational)> = None;
            for j in 0..ncols {
                if self.status[j] == Status::Basic || self.is_fixed(j) {
                    continue;
                }
                let a = &self.t[r][j];
                if a.is_zero() {
                    continue;
                }
                let ok = if up {
                    (a.is_negative() && self.can_increase(j))
                        || (a.is_positive() && self.can_decrease(j))
                } else {
                    (a.is_positive() && self.can_increase(j))
                        || (a.is_negative() && self.can_decrease(j))
                };
                if !ok {
                    continue;
                }
                let ratio = (&self.d[j] / a).abs();
                if enter.as_ref().map_or(true, |(_, b)| ratio < *b) {
                    enter = Some((j, ratio));
                }
            }
            let Some((q, ratio)) = enter else {
                let y: Vec<Rational> = (0..m).map(|i| -&self.t[r][self.n + i]).collect();
                return Some(Outcome::Infeasible(y));
            };
            if ratio.is_zero() {
                streak += 1;
                if streak > DEGENERACY_STREAK {
                    bland = true;
                }
            } else {
                streak = 0;
                bland = false;
            }
            let delta = (&target - &self.x[k]) / &(-&self.t[r][q]);
            if delta.is_positive() {
                self.step(q, 1, &delta);
            } else {
                self.step(q, -1, &-&delta);
            }
            self.pivot(r, q);
            self.status[q] = Status::Basic;
            self.status[k] = if up { Status::Lower } else { Status::Upper };
            self.x[k] = target;
        }
        None
    }

    pub fn reduced_costs(&mut self) -> &[Rational] {
        if !self.d_valid {
            self.compute_d();
        }
        &self.d
    }
}
