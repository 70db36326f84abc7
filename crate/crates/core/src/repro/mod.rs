//! Regenerates the reference tables of `S3(k; r)` and `S3,2(k; r)` cell by
//! cell, grades the results, and caches them on disk.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Palette, Params};
use crate::search::{compute_number, SearchLimits, SearchOutcome, Verdict};
use crate::zero_sum::find_any_zero_sum;
use crate::ENGINE_VERSION;

const TABLE_ONE: &str = include_str!("table1.tsv");
const TABLE_TWO: &str = include_str!("table2.tsv");

pub const K_RANGE: std::ops::RangeInclusive<u32> = 2..=12;
pub const R_RANGE: std::ops::RangeInclusive<u32> = 2..=5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum TableId {
    /// Full palette, `S3(k; r)`.
    One,
    /// Binary palette, `S3,2(k; r)`.
    Two,
}

impl TableId {
    pub const ALL: [TableId; 2] = [TableId::One, TableId::Two];

    pub fn palette(self) -> Palette {
        match self {
            TableId::One => Palette::Full,
            TableId::Two => Palette::Binary,
        }
    }

    fn source(self) -> &'static str {
        match self {
            TableId::One => TABLE_ONE,
            TableId::Two => TABLE_TWO,
        }
    }
}

impl From<TableId> for u8 {
    fn from(t: TableId) -> u8 {
        match t {
            TableId::One => 1,
            TableId::Two => 2,
        }
    }
}

impl TryFrom<u8> for TableId {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(TableId::One),
            2 => Ok(TableId::Two),
            _ => Err(format!("unknown table {v}")),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Expected {
    Finite(u32),
    Infinite,
    /// Only `S >= value` is known.
    LowerBoundOnly(u32),
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Finite(v) => write!(f, "{v}"),
            Expected::Infinite => f.write_str("∞"),
            Expected::LowerBoundOnly(v) => write!(f, "≥ {v}"),
        }
    }
}

impl FromStr for Expected {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParams(format!("unreadable table entry {s:?}"));
        if s == "∞" {
            Ok(Expected::Infinite)
        } else if let Some(rest) = s.strip_prefix('≥') {
            rest.trim()
                .parse()
                .map(Expected::LowerBoundOnly)
                .map_err(|_| bad())
        } else {
            s.parse().map(Expected::Finite).map_err(|_| bad())
        }
    }
}

/// Cost class of a cell. Tiers are budget estimates only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    A,
    B,
    C,
    D,
}

/// Which tiers a run includes: `a`, `ab`, `abc` or `abcd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierSet(Tier);

impl TierSet {
    pub const A: TierSet = TierSet(Tier::A);
    pub const AB: TierSet = TierSet(Tier::B);
    pub const ABC: TierSet = TierSet(Tier::C);
    pub const ALL: TierSet = TierSet(Tier::D);

    pub fn contains(self, tier: Tier) -> bool {
        tier <= self.0
    }
}

impl Default for TierSet {
    fn default() -> Self {
        TierSet::AB
    }
}

impl FromStr for TierSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(TierSet::A),
            "ab" => Ok(TierSet::AB),
            "abc" => Ok(TierSet::ABC),
            "abcd" => Ok(TierSet::ALL),
            _ => Err(Error::InvalidParams(format!(
                "unknown tier selection {s:?} (expected a, ab, abc or abcd)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub table: TableId,
    pub k: u32,
    pub r: u32,
    pub expected: Expected,
}

impl Cell {
    pub fn params(&self) -> Params {
        Params::new(self.k, self.r, self.table.palette())
            .expect("table cells have valid parameters")
    }

    pub fn tier(&self) -> Tier {
        let small = |v: u32| self.table == TableId::Two && v <= 25;
        match (self.table, self.k, self.r, self.expected) {
            (_, _, _, Expected::Infinite) => Tier::A,
            (TableId::One, 10, 5, _) => Tier::D,
            (TableId::Two, 9, 3, _) => Tier::B,
            (_, _, 2, _) => Tier::A,
            (TableId::One, 3, 3, _) | (TableId::One, 4, 4, _) => Tier::A,
            (_, _, _, Expected::Finite(v)) if small(v) => Tier::A,
            (TableId::One, 6, 3, _)
            | (TableId::One, 9, 3, _)
            | (TableId::One, 8, 4, _)
            | (TableId::Two, 12, 3, _) => Tier::B,
            _ => Tier::C,
        }
    }

    /// How the expected entry should be read.
    pub fn note(&self) -> &'static str {
        match self.expected {
            Expected::Finite(_) => "exact value",
            Expected::Infinite => "infinite since r does not divide k",
            Expected::LowerBoundOnly(_) => {
                "lower bound from a long unfinished search; exact value unknown"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedTable {
    pub id: TableId,
    pub cells: BTreeMap<(u32, u32), Expected>,
}

impl ExpectedTable {
    pub fn load(id: TableId) -> ExpectedTable {
        parse_table(id, id.source()).expect("embedded table parses")
    }

    pub fn get(&self, k: u32, r: u32) -> Option<Expected> {
        self.cells.get(&(k, r)).copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().map(|(&(k, r), &expected)| Cell {
            table: self.id,
            k,
            r,
            expected,
        })
    }
}

/// Parses a tab-separated grid: a header row of moduli, then one row per k.
pub fn parse_table(id: TableId, text: &str) -> Result<ExpectedTable> {
    let bad = |m: String| Error::InvalidParams(format!("table {id}: {m}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty".into()))?;
    let rs: Vec<u32> = header
        .split('\t')
        .skip(1)
        .map(|h| {
            h.trim()
                .parse()
                .map_err(|_| bad(format!("bad header cell {h:?}")))
        })
        .collect::<Result<_>>()?;
    let mut cells = BTreeMap::new();
    for line in lines {
        let mut fields = line.split('\t');
        let k: u32 = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| bad(format!("bad row {line:?}")))?;
        let entries: Vec<&str> = fields.collect();
        if entries.len() != rs.len() {
            return Err(bad(format!("row k = {k} has {} entries", entries.len())));
        }
        for (&r, e) in rs.iter().zip(entries) {
            cells.insert((k, r), e.parse()?);
        }
    }
    let want: Vec<(u32, u32)> = K_RANGE.flat_map(|k| R_RANGE.map(move |r| (k, r))).collect();
    if !cells.keys().copied().eq(want) {
        return Err(bad("does not cover k = 2..12, r = 2..5".into()));
    }
    Ok(ExpectedTable { id, cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellVerdict {
    Match,
    Mismatch,
    SkippedBudget,
    ConsistentLowerBound,
}

impl fmt::Display for CellVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellVerdict::Match => "match",
            CellVerdict::Mismatch => "mismatch",
            CellVerdict::SkippedBudget => "skipped-budget",
            CellVerdict::ConsistentLowerBound => "consistent-lower-bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellResult {
    pub table: TableId,
    pub k: u32,
    pub r: u32,
    pub palette: Palette,
    pub tier: Tier,
    pub expected: Expected,
    pub outcome: SearchOutcome,
    pub verdict: CellVerdict,
    /// Set when the computation improves on a lower-bound-only entry.
    pub new_finding: Option<String>,
    pub engine_version: String,
}

impl CellResult {
    fn key(&self) -> (u32, u32, Palette, &str) {
        (self.k, self.r, self.palette, &self.engine_version)
    }
}

/// Grades a computed outcome against the expected entry.
pub fn grade(expected: Expected, verdict: &Verdict) -> (CellVerdict, Option<String>) {
    use CellVerdict::*;
    match (expected, verdict) {
        (Expected::Infinite, Verdict::Infinite) => (Match, None),
        (Expected::Finite(v), Verdict::Finite { value, .. }) => {
            (if *value == v { Match } else { Mismatch }, None)
        }
        // An avoiding coloring of length >= v refutes the expected value.
        (Expected::Finite(v), Verdict::Unresolved { lower_bound, .. }) if *lower_bound >= v => {
            (Mismatch, None)
        }
        (Expected::Finite(_), Verdict::Unresolved { .. }) => (SkippedBudget, None),
        (Expected::LowerBoundOnly(v), Verdict::Finite { value, .. }) if *value >= v => (
            ConsistentLowerBound,
            Some(format!(
                "exact value {value}, previously known only to be at least {v}"
            )),
        ),
        (Expected::LowerBoundOnly(v), Verdict::Unresolved { lower_bound, .. })
            if *lower_bound >= v =>
        {
            (
                ConsistentLowerBound,
                Some(format!(
                    "avoiding coloring of length {lower_bound}, so the value is at least {}",
                    lower_bound + 1
                )),
            )
        }
        (Expected::LowerBoundOnly(_), Verdict::Unresolved { .. }) => (ConsistentLowerBound, None),
        _ => (Mismatch, None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReproRun {
    /// In `(table, k, r)` order.
    pub results: Vec<CellResult>,
    pub computed: usize,
    pub reused: usize,
}

impl ReproRun {
    pub fn mismatches(&self) -> usize {
        self.results
            .iter()
            .filter(|c| c.verdict == CellVerdict::Mismatch)
            .count()
    }

    pub fn skipped(&self) -> usize {
        self.results
            .iter()
            .filter(|c| c.verdict == CellVerdict::SkippedBudget)
            .count()
    }
}

/// Computes every selected cell. See [`reproduce_with_cache`].
pub fn reproduce_table(
    tables: &[TableId],
    filter: impl Fn(&Cell) -> bool + Sync,
    limits: &SearchLimits,
) -> Result<Vec<CellResult>> {
    reproduce_with_cache(tables, filter, limits, &[]).map(|run| run.results)
}

/// Computes the selected cells, reusing resolved results from `cache` that
/// were produced by this engine version. Cells run in parallel.
pub fn reproduce_with_cache(
    tables: &[TableId],
    filter: impl Fn(&Cell) -> bool + Sync,
    limits: &SearchLimits,
    cache: &[CellResult],
) -> Result<ReproRun> {
    let mut cells: Vec<Cell> = tables
        .iter()
        .flat_map(|&t| ExpectedTable::load(t).cells().collect::<Vec<_>>())
        .filter(|c| filter(c))
        .collect();
    cells.sort_by_key(|c| (c.table, c.k, c.r));
    cells.dedup();

    let reusable = |c: &Cell| {
        cache.iter().find(|hit| {
            hit.key() == (c.k, c.r, c.table.palette(), ENGINE_VERSION)
                && hit.verdict != CellVerdict::SkippedBudget
                && hit.expected == c.expected
        })
    };
    let results: Vec<(CellResult, bool)> = cells
        .par_iter()
        .map(|c| match reusable(c) {
            Some(hit) => Ok((hit.clone(), true)),
            None => run_cell(c, limits).map(|r| (r, false)),
        })
        .collect::<Result<_>>()?;
    let reused = results.iter().filter(|(_, hit)| *hit).count();
    Ok(ReproRun {
        computed: results.len() - reused,
        reused,
        results: results.into_iter().map(|(r, _)| r).collect(),
    })
}

pub fn run_cell(cell: &Cell, limits: &SearchLimits) -> Result<CellResult> {
    let p = cell.params();
    let outcome = compute_number(&p, limits)?;
    let (verdict, new_finding) = grade(cell.expected, &outcome.verdict);
    Ok(CellResult {
        table: cell.table,
        k: cell.k,
        r: cell.r,
        palette: p.palette(),
        tier: cell.tier(),
        expected: cell.expected,
        outcome,
        verdict,
        new_finding,
        engine_version: ENGINE_VERSION.to_string(),
    })
}

pub fn save_results(results: &[CellResult], path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(results).expect("results serialize");
    fs::write(path, json + "\n")?;
    Ok(())
}

/// Reads a cache file. Any defect fails the whole load.
pub fn load_results(path: &Path) -> Result<Vec<CellResult>> {
    let text = fs::read_to_string(path)?;
    parse_results(&text)
}

pub fn parse_results(text: &str) -> Result<Vec<CellResult>> {
    let results: Vec<CellResult> = serde_json::from_str(text).map_err(|e| Error::Cache {
        offset: byte_offset(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    for (index, c) in results.iter().enumerate() {
        let bad = |message: String| Error::CacheEntry { index, message };
        let p = Params::new(c.k, c.r, c.palette).map_err(|e| bad(e.to_string()))?;
        if c.outcome.params != p {
            return Err(bad("outcome parameters differ from the cell".into()));
        }
        if let Some(w) = c.outcome.witness() {
            w.validate(&p).map_err(|e| bad(e.to_string()))?;
            if let Some(sol) = find_any_zero_sum(w, &p) {
                return Err(bad(format!(
                    "stored witness has the zero-sum solution {sol}"
                )));
            }
        }
    }
    Ok(results)
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// Renders results in the layout of the reference tables. Each entry shows
/// the computed value followed by a mark: nothing for a match, `!` for a
/// mismatch, `?` when the budget ran out, `*` for a new finding, `~` for a
/// consistent lower bound. Cells not run show `.`.
pub fn summary_grid(table: TableId, results: &[CellResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} (k down, r across)",
        match table {
            TableId::One => "S3(k;r)",
            TableId::Two => "S3,2(k;r)",
        }
    );
    let _ = write!(out, "{:>4}", "k\\r");
    for r in R_RANGE {
        let _ = write!(out, "{r:>8}");
    }
    out.push('\n');
    for k in K_RANGE {
        let _ = write!(out, "{k:>4}");
        for r in R_RANGE {
            let entry = results
                .iter()
                .find(|c| c.table == table && c.k == k && c.r == r)
                .map(entry_text)
                .unwrap_or_else(|| ".".into());
            let _ = write!(out, "{entry:>8}");
        }
        out.push('\n');
    }
    out
}

fn entry_text(c: &CellResult) -> String {
    let value = match &c.outcome.verdict {
        Verdict::Finite { value, .. } => value.to_string(),
        Verdict::Infinite => "∞".into(),
        Verdict::Unresolved { lower_bound, .. } => format!(">{lower_bound}"),
    };
    let mark = match c.verdict {
        CellVerdict::Match => "",
        CellVerdict::Mismatch => "!",
        CellVerdict::SkippedBudget => "?",
        CellVerdict::ConsistentLowerBound if c.new_finding.is_some() => "*",
        CellVerdict::ConsistentLowerBound => "~",
    };
    format!("{value}{mark}")
}
