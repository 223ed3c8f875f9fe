//! Experiment campaigns on random general and market split instances, the
//! tight-family verification, and their CSV and SVG renderings.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::closure::{
    compute_report, extend_report, verify_chain, CheckOutcome, Closure, ClosureOptions, ClosureReport, ClosureValue,
};
use crate::error::Result;
use crate::hull::enumerate_lattice;
use crate::instance::{gen_family, gen_market_split, gen_random_general, Family, IlpInstance};
use crate::rational::Rational;

/// Fixed CSV column order shared by every experiment.
pub const CSV_HEADER: [&str; 17] = [
    "instance", "seed", "class", "n", "m", "z_lp", "z_lpstar", "z_kc", "z_cg", "z_cg1", "z_agg1", "agg_lo", "agg_hi",
    "z_ip", "ratio", "flags", "ms",
];

/// One CSV record. Absent values are empty; `ms` is left empty unless
/// `with_time` is set, so runs can be compared byte for byte.
pub fn csv_fields(rep: &ClosureReport, seed: u64, with_time: bool) -> Vec<String> {
    let v = |c: Closure| rep.get(c).map(ClosureValue::to_string).unwrap_or_default();
    let (lo, hi) = match &rep.agg_bracket {
        Some(b) => (b.lo.to_string(), b.hi.to_string()),
        None => (String::new(), String::new()),
    };
    vec![
        rep.instance.clone(),
        seed.to_string(),
        rep.class.name().to_string(),
        rep.n.to_string(),
        rep.m.to_string(),
        v(Closure::Lp),
        v(Closure::LpStar),
        v(Closure::Kc),
        v(Closure::Cg),
        v(Closure::Cg1Row),
        v(Closure::Agg1Row),
        lo,
        hi,
        v(Closure::Ip),
        rep.cg_ratio().map(|r| r.to_string()).unwrap_or_default(),
        rep.flags.names(),
        if with_time { rep.total_ms().to_string() } else { String::new() },
    ]
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
}

#[derive(Debug, Clone)]
pub struct Fig3Options {
    pub n: usize,
    pub count: u64,
    /// instance `i` uses generator seed `seed + i`
    pub seed: u64,
    pub jobs: usize,
    /// wall-clock budget for each CG loop; a capped loop reports its last
    /// LP value, which makes the ratio a lower bound
    pub cg_time_limit: Option<Duration>,
}

impl Default for Fig3Options {
    fn default() -> Self {
        Fig3Options {
            n: 10,
            count: 30,
            seed: 0,
            jobs: 1,
            cg_time_limit: Some(Duration::from_secs(240)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fig3Row {
    pub seed: u64,
    pub report: ClosureReport,
}

#[derive(Debug, Clone)]
pub struct Fig3Outcome {
    pub generated: u64,
    /// kept instances in seed order
    pub kept: Vec<Fig3Row>,
    pub elapsed: Duration,
}

impl Fig3Outcome {
    pub fn ratios(&self) -> Vec<Rational> {
        self.kept.iter().filter_map(|r| r.report.cg_ratio()).collect()
    }

    /// kept instances whose ratio exceeds 2
    pub fn above_two(&self) -> usize {
        let two = Rational::from_integer(&2.into());
        self.ratios().iter().filter(|r| **r > two).count()
    }

    /// Arithmetic and geometric means of the ratios, approximate.
    pub fn means(&self) -> Option<(f64, f64)> {
        let r: Vec<f64> = self.ratios().iter().map(Rational::to_f64).collect();
        if r.is_empty() {
            return None;
        }
        let k = r.len() as f64;
        let arith = r.iter().sum::<f64>() / k;
        let geo = (r.iter().map(|x| x.ln()).sum::<f64>() / k).exp();
        Some((arith, geo))
    }
}

/// True when `z^I > 0` and `z^LP / z^I > 2`.
fn keep_for_fig3(rep: &ClosureReport) -> bool {
    match (rep.value(Closure::Lp), rep.value(Closure::Ip)) {
        (Some(lp), Some(ip)) if ip.is_positive() => *lp > ip * &Rational::from_integer(&2.into()),
        _ => false,
    }
}

fn fig3_instance(inst: &IlpInstance, opts: &ClosureOptions) -> Result<Option<ClosureReport>> {
    let mut rep = compute_report(inst, &[Closure::Lp, Closure::Ip], opts)?;
    if !keep_for_fig3(&rep) {
        return Ok(None);
    }
    extend_report(inst, &mut rep, &[Closure::Cg1Row, Closure::Cg], opts)?;
    Ok(Some(rep))
}

/// Random general instances compared on `z^1C / z^C`.
pub fn run_fig3(opts: &Fig3Options) -> Result<Fig3Outcome> {
    let t0 = Instant::now();
    let copts = ClosureOptions {
        cg_time_limit: opts.cg_time_limit,
        ..Default::default()
    };
    let seeds: Vec<u64> = (0..opts.count).map(|i| opts.seed + i).collect();
    let rows: Vec<Option<Fig3Row>> = pool(opts.jobs).install(|| {
        seeds
            .par_iter()
            .map(|&s| {
                let inst = gen_random_general(opts.n, s);
                Ok(fig3_instance(&inst, &copts)?.map(|report| Fig3Row { seed: s, report }))
            })
            .collect::<Result<_>>()
    })?;
    let mut kept: Vec<Fig3Row> = rows.into_iter().flatten().collect();
    kept.sort_by_key(|r| r.seed);
    Ok(Fig3Outcome {
        generated: opts.count,
        kept,
        elapsed: t0.elapsed(),
    })
}

/// Scatter of instance index against ratio with a reference line at 2.
/// Plots only the ratios in `outcome`.
pub fn fig3_svg(outcome: &Fig3Outcome) -> String {
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let pts: Vec<(usize, f64)> = outcome
        .kept
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.report.cg_ratio().map(|q| (i, q.to_f64())))
        .collect();
    let ymax = pts.iter().map(|p| p.1).fold(4.0f64, f64::max).ceil();
    let xmax = (outcome.kept.len().max(2) - 1) as f64;
    let sx = |i: f64| pad + i / xmax * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - v / ymax * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (pad, h - pad, w - pad, pad);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    let steps = ymax as u64;
    let tick = (steps / 10).max(1);
    for t in (0..=steps).step_by(tick as usize) {
        let y = sy(t as f64);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="black"/>"#, x0 - 4.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-size="11" text-anchor="end">{t}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    let yr = sy(2.0);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{yr:.1}" x2="{x1}" y2="{yr:.1}" stroke="red" stroke-dasharray="6,4"/>"#
    );
    for (i, v) in &pts {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="none" stroke="blue"/>"#,
            sx(*i as f64),
            sy(*v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">instance</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">z^1C / z^C</text>"#,
        h / 2.0,
        h / 2.0
    );
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
        }
    }

    fn of(v: &ClosureValue) -> Verdict {
        if v.is_infeasible() {
            Verdict::Infeasible
        } else {
            Verdict::Feasible
        }
    }
}

#[derive(Debug, Clone)]
pub struct MarketSplitRow {
    pub seed: u64,
    pub report: ClosureReport,
    pub ip: Verdict,
    pub cg: Verdict,
    pub one_row: Verdict,
}

#[derive(Debug, Clone)]
pub struct MarketSplitOutcome {
    pub rows: Vec<MarketSplitRow>,
    pub elapsed: Duration,
}

impl MarketSplitOutcome {
    /// `(1-row, CG, IP, count)` for every combination that occurs, sorted.
    pub fn table(&self) -> Vec<(Verdict, Verdict, Verdict, usize)> {
        let mut t: std::collections::BTreeMap<(Verdict, Verdict, Verdict), usize> = Default::default();
        for r in &self.rows {
            *t.entry((r.one_row, r.cg, r.ip)).or_default() += 1;
        }
        t.into_iter().map(|((a, b, c), k)| (a, b, c, k)).collect()
    }

    pub fn count(&self, f: impl Fn(&MarketSplitRow) -> bool) -> usize {
        self.rows.iter().filter(|r| f(r)).count()
    }
}

/// Exhaustive feasibility of a 0/1 instance.
fn ip_verdict(inst: &IlpInstance) -> Result<Verdict> {
    let bx: Vec<(i64, i64)> = inst
        .upper
        .iter()
        .map(|u| (0, u.as_ref().map_or(0, |u| i64::try_from(u).unwrap_or(i64::MAX))))
        .collect();
    let pts = enumerate_lattice(&inst.rows, &bx)?;
    Ok(if pts.is_empty() { Verdict::Infeasible } else { Verdict::Feasible })
}

/// Market split instances with `m = 2`: which closures prove infeasibility.
pub fn run_market_split(count: u64, seed: u64, jobs: usize) -> Result<MarketSplitOutcome> {
    let t0 = Instant::now();
    // the objective is zero, so the LP value says nothing about the IP
    let copts = ClosureOptions {
        stop_at_ip: false,
        ..Default::default()
    };
    let seeds: Vec<u64> = (0..count).map(|i| seed + i).collect();
    let mut rows: Vec<MarketSplitRow> = pool(jobs).install(|| {
        seeds
            .par_iter()
            .map(|&s| {
                let inst = gen_market_split(2, s);
                let ip = ip_verdict(&inst)?;
                let report = compute_report(&inst, &[Closure::Lp, Closure::Cg, Closure::Cg1Row], &copts)?;
                let cg = Verdict::of(report.get(Closure::Cg).unwrap());
                let one_row = Verdict::of(report.get(Closure::Cg1Row).unwrap());
                Ok(MarketSplitRow {
                    seed: s,
                    report,
                    ip,
                    cg,
                    one_row,
                })
            })
            .collect::<Result<_>>()
    })?;
    rows.sort_by_key(|r| r.seed);
    Ok(MarketSplitOutcome {
        rows,
        elapsed: t0.elapsed(),
    })
}

/// Outcome of one exact check in [`verify_families`].
#[derive(Debug, Clone)]
pub struct FamilyCheck {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

fn ceil_div(a: &Rational) -> u64 {
    u64::try_from(&a.ceil()).expect("parameter fits in u64")
}

fn check(out: &mut Vec<FamilyCheck>, name: String, detail: String, pass: bool) {
    out.push(FamilyCheck { name, detail, pass });
}

fn value(rep: &ClosureReport, c: Closure) -> Result<Rational> {
    rep.value(c)
        .cloned()
        .ok_or_else(|| crate::Error::precondition(format!("{} of {} is not finite", c, rep.instance)))
}

/// Instantiates the tight families at accuracy `eps` and checks their
/// ratios and containments exactly.
pub fn verify_families(eps: &Rational) -> Result<Vec<FamilyCheck>> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(crate::Error::validation(format!("eps {eps} must lie in (0, 1)")));
    }
    let one = Rational::one();
    let two = &one + &one;
    let target = &two - eps;
    let mut out = Vec::new();
    let opts = ClosureOptions::default();

    let m = ceil_div(&(&two / eps));
    let inst = gen_family(Family::PackingTight, m)?;
    let rep = compute_report(&inst, &[Closure::Lp, Closure::Cg, Closure::Cg1Row, Closure::Agg1Row], &opts)?;
    let (a1, c) = (value(&rep, Closure::Agg1Row)?, value(&rep, Closure::Cg)?);
    let mq = Rational::from_integer(&m.into());
    let expect = &(&two * &mq) / &(&mq + &one);
    check(&mut out, format!("packing_tight({m}): z1A = 2M/(M+1)"), format!("{a1}"), a1 == expect);
    check(&mut out, format!("packing_tight({m}): zC = 1"), format!("{c}"), c == one);
    let r = &a1 / &c;
    check(&mut out, format!("packing_tight({m}): z1A/zC >= 2 - eps"), format!("{r}"), r >= target);

    let n = ceil_div(&(&one / eps)).max(2);
    let inst = gen_family(Family::CoveringTight, n)?;
    let rep = compute_report(&inst, &[Closure::Cg, Closure::Cg1Row], &opts)?;
    let (c, c1) = (value(&rep, Closure::Cg)?, value(&rep, Closure::Cg1Row)?);
    check(&mut out, format!("covering_tight({n}): zC = 2"), format!("{c}"), c == two);
    let r = &c / &c1;
    check(&mut out, format!("covering_tight({n}): zC/z1C >= 2 - eps"), format!("{r}"), r >= target);

    let k = ceil_div(&(&two / eps)) + 2;
    let inst = gen_family(Family::Noncover, k)?;
    let rep = compute_report(&inst, &[Closure::Cg, Closure::Agg1Row], &opts)?;
    let (c, a1) = (value(&rep, Closure::Cg)?, value(&rep, Closure::Agg1Row)?);
    let kq = Rational::from_integer(&k.into());
    check(&mut out, format!("noncover({k}): zC = 2"), format!("{c}"), c == two);
    let lb = &(&two + &kq) - &(&one / &kq);
    check(&mut out, format!("noncover({k}): z1A >= 2 + k - 1/k"), format!("{a1}"), a1 >= lb);
    let r = &a1 / &c;
    let half = &lb / &two;
    check(&mut out, format!("noncover({k}): z1A/zC >= k/2 + 1 - 1/(2k)"), format!("{r}"), r >= half);

    // bound rows are left out of the separation: with them the CG closure
    // already reaches the integer optimum 1
    let n = ceil_div(&(&one / eps)).max(2);
    let inst = gen_family(Family::CgVsKc, n)?;
    let ro = ClosureOptions {
        cg_bound_rows: false,
        stop_at_ip: false,
        ..Default::default()
    };
    let rep = compute_report(&inst, &[Closure::Cg], &ro)?;
    let rep_kc = compute_report(&inst, &[Closure::Kc], &opts)?;
    let (c, kc) = (value(&rep, Closure::Cg)?, value(&rep_kc, Closure::Kc)?);
    let nq = Rational::from_integer(&n.into());
    check(&mut out, format!("cg_vs_kc({n}): row-only zC = 1/n"), format!("{c}"), c == &one / &nq);
    check(&mut out, format!("cg_vs_kc({n}): zKC = 1"), format!("{kc}"), kc == one);
    let r = &kc / &c;
    check(&mut out, format!("cg_vs_kc({n}): zKC / row-only zC = n"), format!("{r}"), r == nq);
    Ok(out)
}

/// Chain checks on every closure that applies to `inst`.
pub fn verify_instance_chain(inst: &IlpInstance, opts: &ClosureOptions) -> Result<Vec<FamilyCheck>> {
    let class = inst.classify()?;
    let mut want = vec![Closure::Lp, Closure::Ip, Closure::Cg, Closure::Cg1Row, Closure::Agg1Row];
    match class {
        crate::instance::InstanceClass::Packing => want.extend([Closure::LpStar, Closure::Agg]),
        crate::instance::InstanceClass::General => {}
        _ => want.extend([Closure::Kc, Closure::Agg]),
    }
    let rep = compute_report(inst, &want, opts)?;
    Ok(verify_chain(&rep)
        .into_iter()
        .filter(|c| c.outcome != CheckOutcome::Skipped)
        .map(|c| FamilyCheck {
            name: format!("{}: {}", inst.name, c.name),
            detail: format!("{:?}", c.outcome),
            pass: c.outcome == CheckOutcome::Holds,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn families_at_one_fifth() {
        let checks = verify_families(&q(1, 5)).unwrap();
        for c in &checks {
            assert!(c.pass, "{} ({})", c.name, c.detail);
        }
        assert_eq!(checks.len(), 11);
    }

    #[test]
    fn eps_out_of_range() {
        assert!(verify_families(&q(0, 1)).is_err());
        assert!(verify_families(&q(1, 1)).is_err());
    }

    #[test]
    fn fig3_rows_respect_the_discard_rule() {
        let out = run_fig3(&Fig3Options {
            count: 3,
            seed: 20,
            ..Default::default()
        })
        .unwrap();
        assert!(out.kept.len() <= 3);
        for r in &out.kept {
            let (lp, ip) = (r.report.value(Closure::Lp).unwrap(), r.report.value(Closure::Ip).unwrap());
            assert!(ip.is_positive() && *lp > ip * &q(2, 1));
        }
        let svg = fig3_svg(&out);
        assert!(svg.starts_with("<svg") && svg.matches("<circle").count() == out.ratios().len());
    }

    #[test]
    fn fig3_empty() {
        let out = run_fig3(&Fig3Options {
            count: 0,
            ..Default::default()
        })
        .unwrap();
        assert!(out.kept.is_empty() && out.means().is_none());
        assert!(fig3_svg(&out).contains("stroke=\"red\""));
    }

    #[test]
    fn market_split_small_table() {
        let out = run_market_split(3, 0, 1).unwrap();
        assert_eq!(out.rows.len(), 3);
        for r in &out.rows {
            // the CG closure sits inside the 1-row closure and holds every integer point
            assert!(!(r.one_row == Verdict::Infeasible && r.cg == Verdict::Feasible));
            assert!(!(r.cg == Verdict::Infeasible && r.ip == Verdict::Feasible));
        }
        assert_eq!(out.table().iter().map(|t| t.3).sum::<usize>(), 3);
    }

    #[test]
    fn csv_record_shape() {
        let inst = gen_family(Family::PackingTight, 3).unwrap();
        let rep = compute_report(&inst, &[Closure::Lp, Closure::Cg, Closure::Cg1Row], &ClosureOptions::default()).unwrap();
        let f = csv_fields(&rep, 0, false);
        assert_eq!(f.len(), CSV_HEADER.len());
        assert_eq!(f[5], "3/2");
        assert_eq!(f[8], "1");
        assert_eq!(f[9], "3/2");
        assert_eq!(f[14], "3/2");
        assert_eq!(f[16], "");
    }
}
