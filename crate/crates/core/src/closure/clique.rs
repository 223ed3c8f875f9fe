//! CG derivation of the clique inequality from the edge inequalities.

use num_bigint::BigInt;
use num_integer::binomial;

use crate::error::{Error, Result};
use crate::rational::{qi, Rational};

/// Rounds with more subsets than this are validated on one representative
/// subset; every subset of a given size is equivalent under relabeling.
pub const EXHAUSTIVE_SUBSET_LIMIT: u64 = 100_000;
/// Beyond this many sub-subsets the element counts come from the binomial
/// identity instead of enumeration.
pub const ENUMERATED_AGGREGATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueRound {
    pub round: usize,
    /// size of the subsets whose sum is bounded by 1 after this round
    pub size: usize,
    /// size of the previous-round subsets being averaged
    pub from_size: usize,
    /// weight on each previous-round inequality
    pub weight: Rational,
    pub rhs_before_rounding: Rational,
    pub rhs: BigInt,
    pub subsets_validated: u64,
    pub exhaustive: bool,
    /// aggregation counts obtained by enumerating sub-subsets
    pub enumerated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliqueCertificate {
    pub n: usize,
    /// round 0 is the edge inequalities themselves
    pub rounds: Vec<CliqueRound>,
    pub total_rounds: usize,
}

impl CliqueCertificate {
    pub fn is_complete(&self) -> bool {
        self.rounds.last().map_or(false, |r| r.size == self.n)
    }
}

/// Advances `c` to the next `k`-combination of `0..n` in lexicographic
/// order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for t in i + 1..k {
                c[t] = c[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Aggregates all `s`-subsets of `t` with weight `w` and checks that the
/// result is `sum_{v in t} x_v <= rhs`.
fn check_subset(t: &[usize], s: usize, w: &Rational, rhs: &Rational) -> bool {
    let mut count = vec![0u64; t.len()];
    let mut total = 0u64;
    let mut c: Vec<usize> = (0..s).collect();
    loop {
        total += 1;
        for &i in &c {
            count[i] += 1;
        }
        if !next_combination(&mut c, t.len()) {
            break;
        }
    }
    count.iter().all(|&k| &qi(k as i64) * w == Rational::one()) && &qi(total as i64) * w == *rhs
}

pub fn clique_cg_derivation(n: usize) -> Result<CliqueCertificate> {
    if n < 3 {
        return Err(Error::validation(format!("clique derivation needs n >= 3, got {n}")));
    }
    let mut rounds = vec![CliqueRound {
        round: 0,
        size: 2,
        from_size: 2,
        weight: Rational::one(),
        rhs_before_rounding: Rational::one(),
        rhs: BigInt::from(1),
        subsets_validated: 0,
        exhaustive: true,
        enumerated: true,
    }];
    let mut s = 2usize;
    while s < n {
        let s2 = (2 * s - 1).min(n);
        // each element of an s2-set lies in C(s2-1, s-1) of its s-subsets
        let w = Rational::new(1, binomial(BigInt::from(s2 - 1), BigInt::from(s - 1)));
        let rhs = Rational::from_ratio(s2 as i64, s as i64);
        let floor = rhs.floor();
        if floor != BigInt::from(1) {
            return Err(Error::precondition(format!("round rhs {rhs} does not round to 1")));
        }
        let subsets = binomial(BigInt::from(n), BigInt::from(s2));
        let exhaustive = subsets <= BigInt::from(EXHAUSTIVE_SUBSET_LIMIT);
        let inner = binomial(BigInt::from(s2), BigInt::from(s));
        let enumerated = inner <= BigInt::from(ENUMERATED_AGGREGATION_LIMIT);
        if !enumerated {
            let per = binomial(BigInt::from(s2 - 1), BigInt::from(s - 1));
            if Rational::from_integer(&per) * &w != Rational::one() || Rational::from_integer(&inner) * &w != rhs {
                return Err(Error::precondition(format!("aggregation identity fails for size {s2}")));
            }
        }
        let mut t: Vec<usize> = (0..s2).collect();
        let mut checked = 0u64;
        loop {
            if enumerated && !check_subset(&t, s, &w, &rhs) {
                return Err(Error::precondition(format!(
                    "aggregation for subset {t:?} does not reproduce the claimed row"
                )));
            }
            checked += 1;
            if !exhaustive || !next_combination(&mut t, n) {
                break;
            }
        }
        rounds.push(CliqueRound {
            round: rounds.len(),
            size: s2,
            from_size: s,
            weight: w,
            rhs_before_rounding: rhs,
            rhs: floor,
            subsets_validated: checked,
            exhaustive,
            enumerated,
        });
        s = s2;
    }
    let total_rounds = rounds.len() - 1;
    Ok(CliqueCertificate {
        n,
        rounds,
        total_rounds,
    })
}
