//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Every value the engine reports is re-checked here with code that shares
//! nothing with the engine: witnesses by a separate brute force over all
//! solutions, refutations by a separate reader of the JSON log.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde_json::Value;
use zsschur::constructions::{verify_many, Family};
use zsschur::enumerate::enumerate_solutions;
use zsschur::repro::{Expected, ExpectedTable, TableId, Tier};
use zsschur::search::{
    check_refutation, compute_number, refute, RefuteOutcome, SearchLimits, Verdict,
};
use zsschur::{is_infinite_instance, Coloring, Palette, Params};

const R2_CELL_LIMIT: Duration = Duration::from_secs(10);
const MID_CELL_LIMIT: Duration = Duration::from_secs(600);
const INFINITE_CELL_LIMIT: Duration = Duration::from_millis(1);
const WITNESS_TOTAL_LIMIT: Duration = Duration::from_secs(30 * 60);
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
/// Default budget for the open cell; `ZSSCHUR_S3_10_5_BUDGET` (seconds)
/// overrides it.
const OPEN_CELL_BUDGET: Duration = Duration::from_secs(600);
/// Known lower bound for S3(10;5).
const OPEN_CELL_LOWER_BOUND: u32 = 45;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("S3(k;2) column", r2_column),
        ("S3(k;r) mid cells", mid_cells),
        ("S3,2 table and infinite cells", binary_table),
        ("lower-bound colorings", witness_families),
        ("enumerator against brute force", enumerator_oracle),
        ("determinism across threads and symmetry", determinism),
        ("S3(10;5) consistency", open_cell),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match res {
            Ok(detail) => println!("criterion {}: PASS {title}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {title}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn name(p: &Params) -> String {
    match p.palette() {
        Palette::Full => format!("S3({};{})", p.k(), p.r()),
        Palette::Binary => format!("S3,2({};{})", p.k(), p.r()),
    }
}

// ---- independent oracles ----

/// First zero-sum solution of `colors`, found by ascending recursion over
/// non-decreasing tuples.
fn brute_zero_sum(colors: &[u8], k: u32, r: u32) -> Option<(Vec<u32>, u32)> {
    fn go(
        colors: &[u8],
        r: u32,
        left: u32,
        rest: u32,
        min: u32,
        acc: u32,
        parts: &mut Vec<u32>,
    ) -> bool {
        if left == 0 {
            return rest == 0 && acc.is_multiple_of(r);
        }
        let mut x = min;
        while x * left <= rest {
            parts.push(x);
            if go(
                colors,
                r,
                left - 1,
                rest - x,
                x,
                acc + colors[x as usize - 1] as u32,
                parts,
            ) {
                return true;
            }
            parts.pop();
            x += 1;
        }
        false
    }
    for t in 1..=colors.len() as u32 {
        let mut parts = Vec::new();
        if go(
            colors,
            r,
            k - 1,
            t,
            1,
            colors[t as usize - 1] as u32,
            &mut parts,
        ) {
            return Some((parts, t));
        }
    }
    None
}

fn brute_avoids(chi: &Coloring, p: &Params) -> Result<(), String> {
    ensure(
        chi.as_slice().iter().all(|&c| (c as u32) < p.num_colors()),
        || format!("{} witness uses colors outside the palette", name(p)),
    )?;
    match brute_zero_sum(chi.as_slice(), p.k(), p.r()) {
        None => Ok(()),
        Some((parts, t)) => Err(format!(
            "{} witness {} has the zero-sum solution {parts:?} -> {t}",
            name(p),
            chi.encode(p.r())
        )),
    }
}

/// All non-decreasing `(k-1)`-tuples summing to `t`, by counting through
/// every tuple in `[1, t]^(k-1)`.
fn odometer_solutions(t: u32, k: u32) -> BTreeSet<Vec<u32>> {
    let m = (k - 1) as usize;
    let mut out = BTreeSet::new();
    let mut x = vec![1u32; m];
    loop {
        if x.iter().sum::<u32>() == t && x.windows(2).all(|w| w[0] <= w[1]) {
            out.insert(x.clone());
        }
        let mut i = 0;
        while i < m && x[i] == t {
            x[i] = 1;
            i += 1;
        }
        if i == m {
            return out;
        }
        x[i] += 1;
    }
}

/// Re-checks a refutation log from its JSON form. Every rejected color
/// must carry a zero-sum solution, a blocked later target, or a color map
/// preserving zero sums that shrinks the prefix.
fn check_refutation_json(v: &Value) -> Result<u64, String> {
    let num = |v: &Value| {
        v.as_u64()
            .ok_or_else(|| format!("expected a number, got {v}"))
    };
    let params = &v["params"];
    let (k, r) = (num(&params["k"])?, num(&params["r"])?);
    let binary = params["palette"] == "binary";
    let q = if binary { 2 } else { r };
    let n = num(&v["n"])? as usize;
    let steps = v["steps"].as_array().ok_or("no steps")?;

    let solution = |s: &Value, prefix: &[u64]| -> Result<(u64, u64), String> {
        let parts: Vec<u64> = s["parts"]
            .as_array()
            .ok_or("no parts")?
            .iter()
            .map(num)
            .collect::<Result<_, _>>()?;
        let t = num(&s["target"])?;
        ensure(parts.len() as u64 == k - 1, || {
            format!("wrong part count in {s}")
        })?;
        ensure(parts.iter().all(|&x| x >= 1), || {
            format!("non-positive part in {s}")
        })?;
        ensure(parts.iter().sum::<u64>() == t, || {
            format!("parts do not sum in {s}")
        })?;
        let mut sum = 0;
        for &x in &parts {
            ensure(x as usize <= prefix.len(), || {
                format!("part {x} is uncolored in {s}")
            })?;
            sum += prefix[x as usize - 1];
        }
        Ok((t, sum))
    };
    let gcd = |mut a: u64, mut b: u64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };

    let mut prefix: Vec<u64> = Vec::new();
    let mut next: Vec<u64> = vec![0];
    let mut nodes = 1;
    for (i, st) in steps.iter().enumerate() {
        let err = |m: String| format!("step {i}: {m}");
        let d = prefix.len();
        match st["step"].as_str() {
            Some("enter") | Some("reject") => {
                let c = num(&st["color"])?;
                ensure(c == next[d] && c < q, || {
                    err(format!("color {c} out of order"))
                })?;
                prefix.push(c);
                if st["step"] == "enter" {
                    ensure(prefix.len() < n, || err("complete coloring entered".into()))?;
                    next.push(0);
                    nodes += 1;
                    continue;
                }
                let reason = &st["reason"];
                let pos = prefix.len() as u64;
                match reason["kind"].as_str() {
                    Some("zerosum") => {
                        let (t, s) = solution(&reason["solution"], &prefix)?;
                        ensure(t == pos && (s + c) % r == 0, || {
                            err(format!("bad zero-sum {reason}"))
                        })?;
                    }
                    Some("blocked") => {
                        let t = num(&reason["target"])?;
                        ensure(t > pos && t <= n as u64, || {
                            err(format!("target {t} out of range"))
                        })?;
                        let closers = reason["closers"].as_array().ok_or("no closers")?;
                        ensure(closers.len() as u64 == q, || err("closer count".into()))?;
                        for (cc, sol) in closers.iter().enumerate() {
                            let (tt, s) = solution(sol, &prefix)?;
                            ensure(tt == t && (s + cc as u64).is_multiple_of(r), || {
                                err(format!("bad closer {sol}"))
                            })?;
                        }
                    }
                    Some("symmetry") => {
                        let map = &reason["map"];
                        let divisible = k % r == 0;
                        let image: Vec<u64> = if let Some(a) = map.get("affine") {
                            let (mul, add) = (num(&a["mul"])?, num(&a["add"])?);
                            ensure(
                                !binary
                                    && mul < r
                                    && add < r
                                    && gcd(mul, r) == 1
                                    && (add == 0 || divisible),
                                || err(format!("map {map} does not preserve zero sums")),
                            )?;
                            prefix.iter().map(|&x| (mul * x + add) % r).collect()
                        } else {
                            ensure(map == "complement" && binary && divisible, || {
                                err(format!("map {map} does not preserve zero sums"))
                            })?;
                            prefix.iter().map(|&x| 1 - x).collect()
                        };
                        ensure(image < prefix, || {
                            err(format!("map {map} does not shrink the prefix"))
                        })?;
                    }
                    _ => return Err(err(format!("unknown reason {reason}"))),
                }
                prefix.pop();
                next[d] += 1;
            }
            Some("leave") => {
                ensure(d > 0 && next[d] == q, || err("early leave".into()))?;
                next.pop();
                prefix.pop();
                next[d - 1] += 1;
            }
            _ => return Err(err(format!("unknown step {st}"))),
        }
    }
    ensure(prefix.is_empty() && next == [q], || "log ends early".into())?;
    Ok(nodes)
}

// ---- shared checks ----

/// Computes `p`, checks the value against `want` and re-verifies the
/// witness. Returns the elapsed time.
fn expect_value(p: &Params, want: Option<u32>, limit: Duration) -> Result<Duration, String> {
    let start = Instant::now();
    let out = compute_number(p, &SearchLimits::new(256)).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    match (&out.verdict, want) {
        (Verdict::Finite { value, witness }, Some(v)) if *value == v => {
            ensure(witness.len() as u32 == v - 1, || {
                format!("{} witness length", name(p))
            })?;
            brute_avoids(witness, p)?;
        }
        (Verdict::Infinite, None) => {}
        (got, _) => return Err(format!("{} expected {want:?}, got {got:?}", name(p))),
    }
    ensure(took < limit, || {
        format!("{} took {took:?} (limit {limit:?})", name(p))
    })?;
    Ok(took)
}

fn table_value(id: TableId, k: u32, r: u32) -> Option<u32> {
    match ExpectedTable::load(id).get(k, r) {
        Some(Expected::Finite(v)) => Some(v),
        _ => None,
    }
}

// ---- criteria ----

fn r2_column() -> Outcome {
    let mut slowest = Duration::ZERO;
    for k in 2..=12 {
        let want = (k % 2 == 0).then(|| 2 * k - 3);
        ensure(table_value(TableId::One, k, 2) == want, || {
            format!("table disagrees at k = {k}")
        })?;
        slowest = slowest.max(expect_value(
            &Params::full(k, 2).unwrap(),
            want,
            R2_CELL_LIMIT,
        )?);
    }
    Ok(format!(
        "k = 2..12 match 2k-3 / infinite, slowest cell {slowest:.2?}"
    ))
}

fn mid_cells() -> Outcome {
    let mut report = Vec::new();
    for (k, r, v) in [
        (3, 3, 10),
        (6, 3, 15),
        (9, 3, 24),
        (4, 4, 13),
        (8, 4, 27),
        (12, 3, 33),
        (12, 4, 43),
        (5, 5, 38),
    ] {
        ensure(table_value(TableId::One, k, r) == Some(v), || {
            format!("table disagrees at ({k}, {r})")
        })?;
        let took = expect_value(&Params::full(k, r).unwrap(), Some(v), MID_CELL_LIMIT)?;
        report.push(format!("({k},{r})={v} {took:.1?}"));
    }
    Ok(report.join(", "))
}

fn binary_table() -> Outcome {
    let mut slowest = Duration::ZERO;
    let cells = [
        (2, 2, 1),
        (3, 3, 5),
        (4, 4, 11),
        (5, 5, 19),
        (4, 2, 5),
        (6, 2, 9),
        (8, 2, 13),
        (10, 2, 17),
        (12, 2, 21),
        (6, 3, 13),
        (9, 3, 22),
        (12, 3, 31),
        (8, 4, 25),
        (12, 4, 41),
        (10, 5, 41),
    ];
    for (k, r, v) in cells {
        ensure(table_value(TableId::Two, k, r) == Some(v), || {
            format!("table disagrees at ({k}, {r})")
        })?;
        slowest = slowest.max(expect_value(
            &Params::binary(k, r).unwrap(),
            Some(v),
            MID_CELL_LIMIT,
        )?);
    }
    let mut infinite = 0;
    for id in TableId::ALL {
        for cell in ExpectedTable::load(id)
            .cells()
            .filter(|c| c.expected == Expected::Infinite)
        {
            let p = cell.params();
            ensure(is_infinite_instance(&p), || {
                format!("{} is not infinite", name(&p))
            })?;
            expect_value(&p, None, INFINITE_CELL_LIMIT)?;
            infinite += 1;
        }
    }
    Ok(format!(
        "{} finite cells exact (slowest {slowest:.2?}), {infinite} infinite cells each < 1 ms",
        cells.len()
    ))
}

fn witness_families() -> Outcome {
    let start = Instant::now();
    let mut instances = Vec::new();
    instances.extend((4..=30).step_by(2).map(|k| (Family::P3, k)));
    instances.extend((6..=30).step_by(3).map(|k| (Family::T4, k)));
    instances.extend((6..=30).step_by(3).map(|k| (Family::T5, k)));
    instances.extend((8..=28).step_by(4).map(|k| (Family::T6, k)));
    instances.extend([3, 5, 7, 9].map(|k| (Family::P7, k)));
    instances.extend((3..=10).map(|k| (Family::S32KK, k)));
    for (res, &(f, k)) in verify_many(&instances).into_iter().zip(&instances) {
        let rep = res.map_err(|e| e.to_string())?;
        ensure(rep.avoids && rep.counterexample.is_none(), || {
            format!("{} k={k} is hit", f.id())
        })?;
        ensure(rep.length + 1 == rep.claimed_bound, || {
            format!("{} k={k} length", f.id())
        })?;
        let p = f.params(k).unwrap();
        let chi = zsschur::constructions::build_witness(f, k).unwrap();
        brute_avoids(&chi, &p)?;
    }

    // Bounds never exceed exact values; record where they are tight.
    let mut tight = Vec::new();
    for &(f, k) in &instances {
        let p = f.params(k).unwrap();
        if k > 12 || p.r() > 5 {
            continue;
        }
        let out = compute_number(&p, &SearchLimits::new(256)).map_err(|e| e.to_string())?;
        let v = out
            .value()
            .ok_or_else(|| format!("{} unresolved", name(&p)))?;
        let bound = f.claimed_bound(k);
        ensure(bound <= v, || {
            format!("{} k={k} bound {bound} exceeds {} = {v}", f.id(), name(&p))
        })?;
        if bound == v {
            tight.push(format!("{}@{k}", f.id()));
        }
    }
    for must in ["t4@6", "t4@9", "t4@12", "p7@3", "p7@5"] {
        ensure(tight.iter().any(|t| t == must), || {
            format!("{must} is not tight")
        })?;
    }
    let took = start.elapsed();
    ensure(took < WITNESS_TOTAL_LIMIT, || format!("took {took:?}"))?;
    Ok(format!(
        "{} colorings avoid; tight: {}",
        instances.len(),
        tight.join(" ")
    ))
}

fn enumerator_oracle() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for k in 2..=6 {
        for t in 1..=25 {
            let got: Vec<Vec<u32>> = enumerate_solutions(t, k)
                .iter()
                .map(|s| s.parts().to_vec())
                .collect();
            let set: BTreeSet<Vec<u32>> = got.iter().cloned().collect();
            ensure(set.len() == got.len(), || {
                format!("duplicates at t={t}, k={k}")
            })?;
            ensure(set == odometer_solutions(t, k), || {
                format!("sets differ at t={t}, k={k}")
            })?;
            total += got.len();
        }
    }
    let took = start.elapsed();
    ensure(took < ORACLE_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("{total} solutions over t <= 25, k <= 6 agree"))
}

fn determinism() -> Outcome {
    let mut cells = 0;
    for id in TableId::ALL {
        for cell in ExpectedTable::load(id)
            .cells()
            .filter(|c| c.tier() == Tier::A)
        {
            let p = cell.params();
            let mut seen = Vec::new();
            for workers in [1, 4] {
                for sym in [true, false] {
                    let lim = SearchLimits::new(256)
                        .with_workers(workers)
                        .with_symmetry(sym);
                    let out = compute_number(&p, &lim).map_err(|e| e.to_string())?;
                    if let Some(w) = out.witness() {
                        brute_avoids(w, &p)?;
                    }
                    let key = match out.verdict {
                        Verdict::Finite { value, .. } => format!("finite {value}"),
                        Verdict::Infinite => "infinite".into(),
                        Verdict::Unresolved { lower_bound, .. } => {
                            format!("unresolved {lower_bound}")
                        }
                    };
                    seen.push((workers, sym, key));
                }
            }
            ensure(seen.iter().all(|s| s.2 == seen[0].2), || {
                format!("{}: {seen:?}", name(&p))
            })?;
            cells += 1;
        }
    }
    Ok(format!(
        "{cells} tier-A cells agree across 1/4 workers x symmetry on/off"
    ))
}

fn open_cell() -> Outcome {
    let budget = std::env::var("ZSSCHUR_S3_10_5_BUDGET")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .map(Duration::from_secs_f64)
        .unwrap_or(OPEN_CELL_BUDGET);
    let p = Params::full(10, 5).unwrap();
    let out = compute_number(&p, &SearchLimits::new(256).with_budget(budget))
        .map_err(|e| e.to_string())?;
    match &out.verdict {
        Verdict::Infinite => Err("claimed infinite".into()),
        Verdict::Unresolved {
            lower_bound,
            witness,
        } => {
            ensure(*lower_bound >= p.k() - 1, || {
                format!("lower bound {lower_bound}")
            })?;
            ensure(witness.len() as u32 == *lower_bound, || {
                "witness length".into()
            })?;
            brute_avoids(witness, &p)?;
            let note = if *lower_bound >= OPEN_CELL_LOWER_BOUND {
                " (improves the known bound)"
            } else {
                ""
            };
            Ok(format!("unresolved within {budget:?}, verified avoiding coloring of length {lower_bound}{note}"))
        }
        Verdict::Finite { value, witness } => {
            ensure(*value >= OPEN_CELL_LOWER_BOUND, || {
                format!("claimed {value}, below the known bound {OPEN_CELL_LOWER_BOUND}")
            })?;
            // Audit trail: an avoiding coloring of [1, value - 1] ...
            ensure(witness.len() as u32 == value - 1, || {
                "witness length".into()
            })?;
            brute_avoids(witness, &p)?;
            // ... and a complete search log showing [1, value] cannot avoid.
            let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("s3_10_5");
            std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
            std::fs::write(dir.join("witness.txt"), witness.encode(p.r()) + "\n")
                .map_err(|e| e.to_string())?;
            let mut logs = Vec::new();
            for sym in [false, true] {
                let cert = match refute(*value, &p, sym).map_err(|e| e.to_string())? {
                    RefuteOutcome::Refuted(cert) => cert,
                    RefuteOutcome::Avoidable(w) => {
                        return Err(format!(
                            "avoiding coloring of length {value}: {}",
                            w.encode(p.r())
                        ))
                    }
                };
                check_refutation(&cert).map_err(|e| e.to_string())?;
                let json = serde_json::to_value(&cert).unwrap();
                let nodes = check_refutation_json(&json)?;
                let file = dir.join(format!(
                    "refutation{}.json",
                    if sym { "-symmetry" } else { "" }
                ));
                std::fs::write(&file, json.to_string()).map_err(|e| e.to_string())?;
                logs.push(format!("{} steps/{nodes} nodes", cert.steps.len()));
            }
            Ok(format!(
                "S3(10;5) = {value} (known bound {OPEN_CELL_LOWER_BOUND}); witness {} re-verified; \
                 refutation logs ({}) re-checked; written to {}",
                witness.encode(p.r()),
                logs.join(", "),
                dir.display()
            ))
        }
    }
}
