//! Command-line front end for the zero-sum Schur number engine.
//!
//! Exit codes: 0 success, 1 zero-sum solution found, counterexample or table
//! mismatch, 2 usage or input error, 3 budget exhausted.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zsschur::constructions::{verify_many, Family, VerificationReport};
use zsschur::enumerate::{count_solutions, for_each_solution};
use zsschur::repro::{
    load_results, reproduce_with_cache, save_results, summary_grid, CellVerdict, TableId, TierSet,
};
use zsschur::search::{
    check_refutation, compute_number, refute, RefuteOutcome, SearchLimits, SearchOutcome, Verdict,
};
use zsschur::zero_sum::find_any_zero_sum;
use zsschur::{Coloring, Error, Palette, Params, ENGINE_VERSION};

const EXIT_FOUND: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "zsschur",
    version,
    about = "Exact zero-sum generalized Schur numbers"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write JSON here (`-` for stdout) instead of the plain-text report.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Worker threads [default: $ZSSCHUR_THREADS, else 1].
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    /// Time budget in seconds.
    #[arg(long, global = true, value_name = "SECS")]
    budget: Option<f64>,

    /// More detail on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Compute S3(k;r), or S3,2(k;r) with --binary.
    Compute {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        /// Restrict colorings to {0, 1}.
        #[arg(long)]
        binary: bool,
        /// Give up beyond this interval length.
        #[arg(long, default_value_t = 256)]
        max_n: u32,
        #[arg(long)]
        no_symmetry: bool,
        /// Also write a checked refutation log for n = value.
        #[arg(long, value_name = "FILE")]
        certificate: Option<PathBuf>,
    },
    /// Look for a zero-sum solution in a coloring.
    Check {
        /// Digit string, or comma-separated colors.
        #[arg(long)]
        coloring: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        binary: bool,
    },
    /// List the solutions of x_1 + ... + x_{k-1} = t.
    Enumerate {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        count_only: bool,
    },
    /// Check the explicit lower-bound colorings.
    Verify {
        /// p3, t4, t5, t6, p7, s32kk or all.
        #[arg(long)]
        family: String,
        #[arg(
            long,
            required_unless_present = "all_k_up_to",
            conflicts_with = "all_k_up_to"
        )]
        k: Option<u32>,
        /// Every applicable k up to this value.
        #[arg(long, value_name = "N")]
        all_k_up_to: Option<u32>,
    },
    /// Recompute the reference tables and grade every cell.
    Tables {
        #[arg(long, value_enum, default_value_t = TableArg::Both)]
        table: TableArg,
        /// a, ab, abc or abcd.
        #[arg(long, default_value = "ab")]
        tier: String,
        /// Reuse and update results stored in this file.
        #[arg(long, value_name = "FILE")]
        cache: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    match cli.command {
        Command::Compute {
            k,
            r,
            binary,
            max_n,
            no_symmetry,
            ref certificate,
        } => compute(
            g,
            params(k, r, binary)?,
            max_n,
            !no_symmetry,
            certificate.as_ref(),
        ),
        Command::Check {
            ref coloring,
            k,
            r,
            binary,
        } => check(g, params(k, r, binary)?, coloring),
        Command::Enumerate { t, k, count_only } => enumerate(g, t, k, count_only),
        Command::Verify {
            ref family,
            k,
            all_k_up_to,
        } => verify(g, family, k, all_k_up_to),
        Command::Tables {
            table,
            ref tier,
            ref cache,
        } => tables(g, table, tier, cache.as_ref()),
    }
}

fn params(k: u32, r: u32, binary: bool) -> Result<Params, Failure> {
    let palette = if binary {
        Palette::Binary
    } else {
        Palette::Full
    };
    Ok(Params::new(k, r, palette)?)
}

impl Global {
    fn threads(&self) -> Result<usize, Failure> {
        if let Some(n) = self.threads {
            return Ok(n.into());
        }
        match std::env::var("ZSSCHUR_THREADS") {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(Failure(
                    EXIT_USAGE,
                    format!("invalid ZSSCHUR_THREADS {v:?}"),
                )),
            },
            Err(_) => Ok(1),
        }
    }
}

fn limits(g: &Global, max_n: u32) -> Result<SearchLimits, Failure> {
    let mut lim = SearchLimits::new(max_n).with_workers(g.threads()?);
    if let Some(secs) = g.budget {
        let budget = Duration::try_from_secs_f64(secs)
            .map_err(|_| Failure(EXIT_USAGE, format!("invalid budget {secs}")))?;
        lim = lim.with_budget(budget);
    }
    Ok(lim)
}

/// Sends JSON to `--output` if given, else prints `text` on stdout.
fn emit(g: &Global, value: &Value, text: &str) -> io::Result<()> {
    match &g.output {
        None => {
            print!("{text}");
            io::stdout().flush()
        }
        Some(path) => {
            let json = serde_json::to_string_pretty(value).expect("json") + "\n";
            if path.as_os_str() == "-" {
                eprint!("{text}");
                io::stdout().write_all(json.as_bytes())
            } else {
                eprint!("{text}");
                fs::write(path, json)
            }
        }
    }
}

fn name(p: &Params) -> String {
    match p.palette() {
        Palette::Full => format!("S3({};{})", p.k(), p.r()),
        Palette::Binary => format!("S3,2({};{})", p.k(), p.r()),
    }
}

fn outcome_json(out: &SearchOutcome) -> Value {
    let p = &out.params;
    let mut rec = json!({
        "k": p.k(),
        "r": p.r(),
        "palette": p.palette(),
    });
    let m = rec.as_object_mut().unwrap();
    match &out.verdict {
        Verdict::Finite { value, witness } => {
            m.insert("status".into(), json!("finite"));
            m.insert("value".into(), json!(value));
            m.insert("witness".into(), json!(witness.encode(p.r())));
        }
        Verdict::Infinite => {
            m.insert("status".into(), json!("infinite"));
        }
        Verdict::Unresolved {
            lower_bound,
            witness,
        } => {
            m.insert("status".into(), json!("unresolved"));
            m.insert("lower_bound".into(), json!(lower_bound));
            m.insert("witness".into(), json!(witness.encode(p.r())));
        }
    }
    m.insert("nodes".into(), json!(out.stats.nodes));
    m.insert("elapsed_ms".into(), json!(out.stats.elapsed_ms));
    m.insert("engine_version".into(), json!(ENGINE_VERSION));
    rec
}

fn compute(
    g: &Global,
    p: Params,
    max_n: u32,
    symmetry: bool,
    certificate: Option<&PathBuf>,
) -> Outcome {
    let lim = limits(g, max_n)?.with_symmetry(symmetry);
    let out = compute_number(&p, &lim)?;
    let mut text = match &out.verdict {
        Verdict::Finite { value, witness } => format!(
            "{} = {value}\nwitness for [1, {}]: {}\n",
            name(&p),
            value - 1,
            witness.encode(p.r())
        ),
        Verdict::Infinite => format!("{} = infinite (r does not divide k)\n", name(&p)),
        Verdict::Unresolved {
            lower_bound,
            witness,
        } => format!(
            "{} > {lower_bound} (unresolved)\nwitness for [1, {lower_bound}]: {}\n",
            name(&p),
            witness.encode(p.r())
        ),
    };
    if g.verbose > 0 {
        text += &format!("{} nodes, {} ms\n", out.stats.nodes, out.stats.elapsed_ms);
    }
    if let Some(path) = certificate {
        let Verdict::Finite { value, .. } = out.verdict else {
            return Err(Failure(
                EXIT_BUDGET,
                "a certificate needs a finite value".into(),
            ));
        };
        let cert = match refute(value, &p, symmetry)? {
            RefuteOutcome::Refuted(cert) => cert,
            RefuteOutcome::Avoidable(w) => {
                return Err(Failure(
                    EXIT_FOUND,
                    format!(
                        "refutation search found an avoiding coloring {}",
                        w.encode(p.r())
                    ),
                ))
            }
        };
        let summary = check_refutation(&cert)?;
        fs::write(path, serde_json::to_string(&cert).expect("json") + "\n")?;
        text += &format!(
            "certificate for n = {value}: {} steps, {} nodes, checked\n",
            cert.steps.len(),
            summary.nodes
        );
    }
    emit(g, &outcome_json(&out), &text)?;
    Ok(match out.verdict {
        Verdict::Unresolved { .. } => EXIT_BUDGET,
        _ => 0,
    })
}

fn check(g: &Global, p: Params, coloring: &str) -> Outcome {
    let chi: Coloring = coloring.parse()?;
    chi.validate(&p)?;
    let found = find_any_zero_sum(&chi, &p);
    let text = match &found {
        Some(sol) => format!("{sol}\n"),
        None => "AVOIDING\n".to_string(),
    };
    let rec = json!({
        "k": p.k(),
        "r": p.r(),
        "palette": p.palette(),
        "length": chi.len(),
        "avoiding": found.is_none(),
        "solution": found,
    });
    emit(g, &rec, &text)?;
    Ok(if found.is_some() { EXIT_FOUND } else { 0 })
}

fn enumerate(g: &Global, t: u32, k: u32, count_only: bool) -> Outcome {
    if k < 2 {
        return Err(Failure(EXIT_USAGE, "k must be at least 2".into()));
    }
    if count_only {
        let n = count_solutions(t, k);
        emit(g, &json!({ "t": t, "k": k, "count": n }), &format!("{n}\n"))?;
        return Ok(0);
    }
    let mut all: Vec<Vec<u32>> = Vec::new();
    let _ = for_each_solution(t, k, |parts| {
        all.push(parts.to_vec());
        std::ops::ControlFlow::<()>::Continue(())
    });
    let mut text = String::new();
    for parts in &all {
        let lhs: Vec<String> = parts.iter().map(u32::to_string).collect();
        text += &format!("{} = {t}\n", lhs.join(" + "));
    }
    emit(
        g,
        &json!({ "t": t, "k": k, "count": all.len(), "solutions": all }),
        &text,
    )?;
    Ok(0)
}

fn verify(g: &Global, family: &str, k: Option<u32>, up_to: Option<u32>) -> Outcome {
    let families: Vec<Family> = if family.eq_ignore_ascii_case("all") {
        Family::ALL.to_vec()
    } else {
        vec![family.parse()?]
    };
    let mut instances = Vec::new();
    match (k, up_to) {
        (Some(k), _) => instances.extend(families.iter().map(|&f| (f, k))),
        (None, Some(n)) => {
            for &f in &families {
                instances.extend((2..=n).filter(|&k| f.applies_to(k)).map(|k| (f, k)));
            }
        }
        (None, None) => unreachable!("clap requires one of --k, --all-k-up-to"),
    }
    if instances.is_empty() {
        return Err(Failure(EXIT_USAGE, "no applicable instances".into()));
    }
    configure_pool(g)?;
    let reports: Vec<VerificationReport> = verify_many(&instances)
        .into_iter()
        .collect::<Result<_, _>>()?;
    let mut text = String::new();
    for rep in &reports {
        text += &format!(
            "{} k={} r={} {} length={} bound={} avoids={}",
            rep.family.id(),
            rep.k,
            rep.r,
            rep.palette,
            rep.length,
            rep.claimed_bound,
            rep.avoids
        );
        if let Some(cx) = &rep.counterexample {
            text += &format!(
                " counterexample: {} (color sum {})",
                cx.solution, cx.color_sum
            );
        }
        text.push('\n');
    }
    emit(g, &serde_json::to_value(&reports).expect("json"), &text)?;
    Ok(if reports.iter().all(|r| r.avoids) {
        0
    } else {
        EXIT_FOUND
    })
}

fn configure_pool(g: &Global) -> Result<(), Failure> {
    // Fails only if a pool already exists, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(g.threads()?)
        .build_global();
    Ok(())
}

fn tables(g: &Global, table: TableArg, tier: &str, cache: Option<&PathBuf>) -> Outcome {
    let tiers: TierSet = tier.parse()?;
    let ids: &[TableId] = match table {
        TableArg::One => &[TableId::One],
        TableArg::Two => &[TableId::Two],
        TableArg::Both => &TableId::ALL,
    };
    let cached = match cache {
        Some(path) if path.exists() => load_results(path)?,
        _ => Vec::new(),
    };
    configure_pool(g)?;
    // Cells already run in parallel; each search stays sequential.
    let lim = limits(g, 256)?.with_workers(1);
    let run = reproduce_with_cache(ids, |c| tiers.contains(c.tier()), &lim, &cached)?;
    if let Some(path) = cache {
        let mut merged = cached;
        merged.retain(|old| {
            !run.results
                .iter()
                .any(|new| (new.k, new.r, new.palette) == (old.k, old.r, old.palette))
        });
        merged.extend(run.results.iter().cloned());
        merged.sort_by_key(|c| (c.table, c.k, c.r));
        save_results(&merged, path)?;
    }

    let mut text = String::new();
    for &id in ids {
        text += &summary_grid(id, &run.results);
        text.push('\n');
    }
    for c in &run.results {
        if let Some(note) = &c.new_finding {
            text += &format!("NEW: table {} cell k={} r={}: {note}\n", c.table, c.k, c.r);
        }
        if c.verdict == CellVerdict::Mismatch || g.verbose > 0 {
            text += &format!(
                "table {} k={} r={} tier={:?} expected {} -> {} ({} ms)\n",
                c.table, c.k, c.r, c.tier, c.expected, c.verdict, c.outcome.stats.elapsed_ms
            );
        }
    }
    text += &format!(
        "{} cells: {} computed, {} from cache, {} mismatches, {} over budget\n",
        run.results.len(),
        run.computed,
        run.reused,
        run.mismatches(),
        run.skipped()
    );
    emit(g, &serde_json::to_value(&run.results).expect("json"), &text)?;
    Ok(if run.mismatches() > 0 {
        EXIT_FOUND
    } else if run.skipped() > 0 {
        EXIT_BUDGET
    } else {
        0
    })
}
