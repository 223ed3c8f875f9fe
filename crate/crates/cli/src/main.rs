use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use closurelab::closure::{
    clique_cg_derivation, compute_report, parse_closures, rank_lower_bound_for, ClosureOptions,
    ClosureReport,
};
use closurelab::experiments::{
    csv_fields, fig3_svg, run_fig3, run_market_split, verify_families, verify_instance_chain, FamilyCheck,
    Fig3Options, CSV_HEADER,
};
use closurelab::instance::{
    gen_family, gen_market_split, gen_random_covering_bounds, gen_random_general, gen_random_packing, read_instance,
    to_json, Family,
};
use closurelab::{Error, Rational};

const EXIT_VERIFY: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "closurelab", version, about = "Exact cutting-plane closures for integer programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance as JSON
    #[command(subcommand)]
    Gen(GenCmd),
    /// Compute closure values for an instance file
    Solve(SolveArgs),
    /// Run an experiment campaign
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Check known equalities and bounds
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Round-by-round CG derivation of the clique inequality on K_n
    CliqueCert {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Random general instance with n variables and n/2 equality rows
    Random {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Market split instance
    MarketSplit {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structured family: packing_tight, noncover, covering_tight, cg_vs_kc, fstab
    Family {
        name: String,
        param: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    path: PathBuf,
    /// comma-separated subset of LP,LPSTAR,KC,CG,CG1ROW,AGG1ROW,AGG,IP
    #[arg(long, default_value = "LP,CG,CG1ROW,IP")]
    closures: String,
    #[arg(long, default_value = "csv")]
    format: String,
    /// separate CG cuts from the rows only, without the bound rows
    #[arg(long)]
    row_only_cg: bool,
    /// wall-clock budget per CG loop in seconds
    #[arg(long)]
    time_limit: Option<u64>,
    /// fill the ms column
    #[arg(long)]
    times: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Random general instances: z^1C / z^C
    Fig3 {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// wall-clock budget per CG loop in seconds, 0 for none
        #[arg(long, default_value_t = 240)]
        time_limit: u64,
        #[arg(long)]
        times: bool,
        /// CSV path; the SVG goes next to it
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Market split instances with m = 2: infeasibility detection
    MarketSplit {
        #[arg(long, default_value_t = 50)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        times: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Tight families at accuracy eps
    Families {
        #[arg(long, default_value = "1/10")]
        eps: String,
    },
    /// Containment chains on random packing and covering instances
    Chains {
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rank lower bound for an instance file or a family
    Rank {
        /// instance file
        #[arg(long, conflicts_with = "family")]
        path: Option<PathBuf>,
        #[arg(long, requires = "param")]
        family: Option<String>,
        #[arg(long)]
        param: Option<u64>,
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Error::Validation(msg.into()).into()
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn family(name: &str, param: u64) -> anyhow::Result<closurelab::IlpInstance> {
    let f = Family::parse(name).ok_or_else(|| usage(format!("unknown family {name:?}")))?;
    Ok(gen_family(f, param)?)
}

fn csv_text(records: &[Vec<String>], footer: &[String]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r)?;
    }
    let mut s = String::from_utf8(w.into_inner()?)?;
    for line in footer {
        s.push_str(line);
        s.push('\n');
    }
    Ok(s)
}

fn report_json(rep: &ClosureReport) -> serde_json::Value {
    let values: serde_json::Map<String, serde_json::Value> = rep
        .values
        .iter()
        .map(|(c, v)| (c.name().to_string(), v.to_string().into()))
        .collect();
    serde_json::json!({
        "instance": rep.instance,
        "class": rep.class.name(),
        "n": rep.n,
        "m": rep.m,
        "values": values,
        "agg_bracket": rep.agg_bracket.as_ref().map(|b| serde_json::json!({
            "lo": b.lo.to_string(), "hi": b.hi.to_string(), "sampled": b.sampled.to_string(),
        })),
        "ratio": rep.cg_ratio().map(|r| r.to_string()),
        "flags": rep.flags.names(),
    })
}

/// Prints one line per check; true if all pass.
fn print_checks(checks: &[FamilyCheck]) -> bool {
    for c in checks {
        println!("{} {} [{}]", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    checks.iter().all(|c| c.pass)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Gen(g) => {
            let (inst, out) = match g {
                GenCmd::Random { n, seed, out } => {
                    if n < 2 {
                        return Err(usage("n must be at least 2"));
                    }
                    (gen_random_general(n, seed), out)
                }
                GenCmd::MarketSplit { m, seed, out } => {
                    if m < 2 {
                        return Err(usage("m must be at least 2"));
                    }
                    (gen_market_split(m, seed), out)
                }
                GenCmd::Family { name, param, out } => (family(&name, param)?, out),
            };
            emit(out.as_deref(), &(to_json(&inst) + "\n"))?;
        }
        Cmd::Solve(a) => {
            let closures = parse_closures(&a.closures)?;
            if a.format != "csv" && a.format != "json" {
                return Err(usage(format!("unknown format {:?}", a.format)));
            }
            let inst = read_instance(&a.path)?;
            let opts = ClosureOptions {
                cg_bound_rows: !a.row_only_cg,
                cg_time_limit: a.time_limit.map(Duration::from_secs),
                ..Default::default()
            };
            let rep = compute_report(&inst, &closures, &opts)?;
            let text = if a.format == "json" {
                serde_json::to_string_pretty(&report_json(&rep))? + "\n"
            } else {
                csv_text(&[csv_fields(&rep, 0, a.times)], &[])?
            };
            emit(a.out.as_deref(), &text)?;
        }
        Cmd::Experiment(ExperimentCmd::Fig3 {
            n,
            count,
            seed,
            jobs,
            time_limit,
            times,
            out,
        }) => {
            if n < 2 {
                return Err(usage("n must be at least 2"));
            }
            let res = run_fig3(&Fig3Options {
                n,
                count,
                seed,
                jobs,
                cg_time_limit: (time_limit > 0).then(|| Duration::from_secs(time_limit)),
            })?;
            let records: Vec<Vec<String>> = res.kept.iter().map(|r| csv_fields(&r.report, r.seed, times)).collect();
            let mut footer = vec![format!(
                "# generated {} kept {} ratio>2 {}",
                res.generated,
                res.kept.len(),
                res.above_two()
            )];
            if let Some((a, g)) = res.means() {
                footer.push(format!("# arithmetic mean ratio (approx) {a:.4}"));
                footer.push(format!("# geometric mean ratio (approx) {g:.4}"));
            } else {
                footer.push("# arithmetic mean ratio (approx) n/a".into());
                footer.push("# geometric mean ratio (approx) n/a".into());
            }
            emit(out.as_deref(), &csv_text(&records, &footer)?)?;
            if let Some(p) = out {
                let svg = p.with_extension("svg");
                fs::write(&svg, fig3_svg(&res)).with_context(|| format!("writing {}", svg.display()))?;
            }
        }
        Cmd::Experiment(ExperimentCmd::MarketSplit {
            count,
            seed,
            jobs,
            times,
            out,
        }) => {
            let res = run_market_split(count, seed, jobs)?;
            let records: Vec<Vec<String>> = res.rows.iter().map(|r| csv_fields(&r.report, r.seed, times)).collect();
            let mut footer = vec!["# 1-row CG,CG,IP,instances".to_string()];
            for (a, b, c, k) in res.table() {
                footer.push(format!("# {},{},{},{k}", a.name(), b.name(), c.name()));
            }
            emit(out.as_deref(), &csv_text(&records, &footer)?)?;
        }
        Cmd::Verify(VerifyCmd::Families { eps }) => {
            let eps: Rational = eps.parse().map_err(|_| usage(format!("bad eps {eps:?}")))?;
            if !print_checks(&verify_families(&eps)?) {
                return Ok(EXIT_VERIFY);
            }
        }
        Cmd::Verify(VerifyCmd::Chains { count, seed }) => {
            let mut all = true;
            for s in seed..seed + count {
                let opts = ClosureOptions::default();
                all &= print_checks(&verify_instance_chain(&gen_random_packing(s, 1_000_000), &opts)?);
                all &= print_checks(&verify_instance_chain(&gen_random_covering_bounds(s), &opts)?);
            }
            if !all {
                return Ok(EXIT_VERIFY);
            }
        }
        Cmd::Verify(VerifyCmd::Rank { path, family: f, param, k }) => {
            let inst = match (path, f, param) {
                (Some(p), None, _) => read_instance(p)?,
                (None, Some(f), Some(p)) => family(&f, p)?,
                _ => return Err(usage("give --path or --family with --param")),
            };
            let b = rank_lower_bound_for(&inst, k)?;
            println!("{}: k = {} gap = {} rank >= {}", inst.name, b.k, b.gap, b.bound);
        }
        Cmd::CliqueCert { n } => {
            let cert = clique_cg_derivation(n)?;
            println!("clique on K_{n}: {} rounds", cert.total_rounds);
            for r in &cert.rounds {
                println!(
                    "round {}: cliques of size {} from size {}, weight {}, rhs {} -> {}, {} subsets validated{}",
                    r.round,
                    r.size,
                    r.from_size,
                    r.weight,
                    r.rhs_before_rounding,
                    r.rhs,
                    r.subsets_validated,
                    if r.exhaustive { "" } else { " (representative)" },
                );
            }
            if !cert.is_complete() {
                return Ok(EXIT_VERIFY);
            }
        }
    }
    Ok(0)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Resource(_)) => EXIT_RESOURCE,
        Some(Error::Validation(_) | Error::Parse { .. } | Error::Class(_) | Error::Precondition(_) | Error::Io(_)) => {
            EXIT_USAGE
        }
        Some(Error::Unbounded(_)) => EXIT_VERIFY,
        None if e.downcast_ref::<io::Error>().is_some() => EXIT_USAGE,
        None => EXIT_VERIFY,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let kind = match e.downcast_ref::<Error>() {
                Some(Error::Resource(_)) => "resource",
                Some(Error::Validation(_)) => "validation",
                Some(Error::Parse { .. }) => "parse",
                Some(Error::Class(_)) => "class",
                Some(Error::Precondition(_)) => "precondition",
                Some(Error::Io(_)) => "io",
                Some(Error::Unbounded(_)) => "unbounded",
                None => "error",
            };
            let msg = serde_json::json!({ "error": kind, "message": format!("{e:#}") });
            eprintln!("{msg}");
            ExitCode::from(exit_code(&e))
        }
    }
}
