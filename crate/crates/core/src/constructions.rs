//! Explicit block colorings that certify lower bounds, and their
//! computational verification.
//!
//! Each family is described as a list of runs `(pattern, repetitions)` that
//! expand, left to right, into a coloring of `[1, n]`. A coloring of length
//! `n` that admits no zero-sum solution proves the corresponding number is
//! at least `n + 1`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{color_sum, Color, Coloring, Palette, Params, Solution};
use crate::search::{compute_number, SearchLimits, Verdict};
use crate::zero_sum::find_any_zero_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `0^{k-2} 1^{k-2}`, `S3(k; 2) >= 2k - 3` for even `k >= 4`.
    P3,
    /// `(012)^{k/3-1} (011)^{k/3} (021)^{k/3-1} 02`, `S3(k; 3) >= 3k - 3`.
    T4,
    /// `0^{k-2} 1^{2k-4}`, `S3,2(k; 3) >= 3k - 5`.
    T5,
    /// `(0123)^{k/4-1} (0120) (0220)^{k/2-1} (3210)^{k/4-1} 32`,
    /// `S3(k; 4) >= 4k - 5`.
    T6,
    /// `(01)^{k-2} (0 (k-1))^{(k-1)(k-2)} (01)^{k-2} 0`,
    /// `S3(k; k) >= 2(k^2 - k - 1)` for odd `k`.
    P7,
    /// `0^{k-2} 1^{(k-2)(k-1)} 0^{k-2}`, `S3,2(k; k) >= k^2 - k - 1`.
    S32KK,
}

/// One run of a block coloring: `pattern` repeated `reps` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub pattern: Vec<Color>,
    pub reps: u32,
}

fn run(pattern: &[Color], reps: u32) -> Run {
    Run {
        pattern: pattern.to_vec(),
        reps,
    }
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::P3,
        Family::T4,
        Family::T5,
        Family::T6,
        Family::P7,
        Family::S32KK,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::P3 => "p3",
            Family::T4 => "t4",
            Family::T5 => "t5",
            Family::T6 => "t6",
            Family::P7 => "p7",
            Family::S32KK => "s32kk",
        }
    }

    fn condition(self) -> &'static str {
        match self {
            Family::P3 => "k even and k >= 4",
            Family::T4 | Family::T5 => "3 | k",
            Family::T6 => "4 | k",
            Family::P7 => "k odd and 3 <= k <= 63",
            Family::S32KK => "3 <= k <= 64",
        }
    }

    pub fn applies_to(self, k: u32) -> bool {
        match self {
            Family::P3 => k >= 4 && k.is_multiple_of(2),
            Family::T4 | Family::T5 => k >= 3 && k.is_multiple_of(3),
            Family::T6 => k >= 4 && k.is_multiple_of(4),
            Family::P7 => (3..=63).contains(&k) && k % 2 == 1,
            Family::S32KK => (3..=64).contains(&k),
        }
    }

    fn check(self, k: u32) -> Result<()> {
        if self.applies_to(k) {
            Ok(())
        } else {
            Err(Error::Inapplicable {
                family: self.id(),
                k,
                condition: self.condition(),
            })
        }
    }

    /// The instance whose number this family bounds.
    pub fn params(self, k: u32) -> Result<Params> {
        self.check(k)?;
        match self {
            Family::P3 => Params::full(k, 2),
            Family::T4 => Params::full(k, 3),
            Family::T5 => Params::binary(k, 3),
            Family::T6 => Params::full(k, 4),
            Family::P7 => Params::full(k, k),
            Family::S32KK => Params::binary(k, k),
        }
    }

    /// The lower bound the coloring certifies.
    pub fn claimed_bound(self, k: u32) -> u32 {
        match self {
            Family::P3 => 2 * k - 3,
            Family::T4 => 3 * k - 3,
            Family::T5 => 3 * k - 5,
            Family::T6 => 4 * k - 5,
            Family::P7 => 2 * (k * k - k - 1),
            Family::S32KK => k * k - k - 1,
        }
    }

    pub fn runs(self, k: u32) -> Result<Vec<Run>> {
        self.check(k)?;
        let top = (k - 1) as Color;
        Ok(match self {
            Family::P3 => vec![run(&[0], k - 2), run(&[1], k - 2)],
            Family::T4 => vec![
                run(&[0, 1, 2], k / 3 - 1),
                run(&[0, 1, 1], k / 3),
                run(&[0, 2, 1], k / 3 - 1),
                run(&[0, 2], 1),
            ],
            Family::T5 => vec![run(&[0], k - 2), run(&[1], 2 * k - 4)],
            Family::T6 => vec![
                run(&[0, 1, 2, 3], k / 4 - 1),
                run(&[0, 1, 2, 0], 1),
                run(&[0, 2, 2, 0], k / 2 - 1),
                run(&[3, 2, 1, 0], k / 4 - 1),
                run(&[3, 2], 1),
            ],
            Family::P7 => vec![
                run(&[0, 1], k - 2),
                run(&[0, top], (k - 1) * (k - 2)),
                run(&[0, 1], k - 2),
                run(&[0], 1),
            ],
            Family::S32KK => vec![
                run(&[0], k - 2),
                run(&[1], (k - 2) * (k - 1)),
                run(&[0], k - 2),
            ],
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown family {s:?}")))
    }
}

pub fn expand_runs(runs: &[Run]) -> Coloring {
    let mut colors = Vec::new();
    for r in runs {
        for _ in 0..r.reps {
            colors.extend_from_slice(&r.pattern);
        }
    }
    Coloring::new(colors)
}

pub fn build_witness(family: Family, k: u32) -> Result<Coloring> {
    Ok(expand_runs(&family.runs(k)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub solution: Solution,
    pub color_sum: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: Family,
    pub k: u32,
    pub r: u32,
    pub palette: Palette,
    pub length: u32,
    pub claimed_bound: u32,
    pub avoids: bool,
    pub counterexample: Option<Counterexample>,
}

/// Builds the family's coloring and checks it against every solution.
pub fn verify_witness(family: Family, k: u32) -> Result<VerificationReport> {
    let p = family.params(k)?;
    let chi = build_witness(family, k)?;
    chi.validate(&p)?;
    let counterexample = find_any_zero_sum(&chi, &p).map(|solution| {
        // The solution came from `chi`, so every term is in range.
        let color_sum = color_sum(&solution, &chi, p.r()).unwrap_or(0);
        Counterexample {
            solution,
            color_sum,
        }
    });
    Ok(VerificationReport {
        family,
        k,
        r: p.r(),
        palette: p.palette(),
        length: chi.len() as u32,
        claimed_bound: family.claimed_bound(k),
        avoids: counterexample.is_none(),
        counterexample,
    })
}

/// Verifies several instances in parallel; results keep the input order.
pub fn verify_many(instances: &[(Family, u32)]) -> Vec<Result<VerificationReport>> {
    instances
        .par_iter()
        .map(|&(f, k)| verify_witness(f, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Question {
    /// `S3(k; 3) = 3k - 3` for `k >= 6`?
    ThreeColors,
    /// `S3(k; 4) = 4k - 5` for `k >= 8`?
    FourColors,
    /// Is `S3(k; k)` of order `k^2`?
    Diagonal,
}

impl FromStr for Question {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "three-colors" | "r3" => Ok(Question::ThreeColors),
            "four-colors" | "r4" => Ok(Question::FourColors),
            "diagonal" => Ok(Question::Diagonal),
            _ => Err(Error::InvalidParams(format!("unknown question {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub k: u32,
    pub r: u32,
    /// Exact value, if the search resolved it.
    pub computed: Option<u32>,
    /// Verified lower bound when the search ran out of budget.
    pub lower_bound: Option<u32>,
    /// Conjectured closed form, where there is one.
    pub conjectured: Option<u32>,
    /// `computed / k^2` for the diagonal question.
    pub ratio: Option<f64>,
    /// `None` when there is nothing to compare.
    pub consistent: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub question: Question,
    pub rows: Vec<EvidenceRow>,
}

/// Tabulates computed values against the conjectured formulas. Values of
/// `k` for which the instance is infinite are skipped.
pub fn conjecture_evidence(
    question: Question,
    ks: impl IntoIterator<Item = u32>,
    limits: &SearchLimits,
) -> Result<EvidenceReport> {
    let mut rows = Vec::new();
    for k in ks {
        let (r, formula) = match question {
            Question::ThreeColors => (3, Some(3 * k - 3)),
            Question::FourColors => (4, Some(4 * k - 5)),
            Question::Diagonal => (k, None),
        };
        if k % r != 0 {
            continue;
        }
        let out = compute_number(&Params::full(k, r)?, limits)?;
        let (computed, lower_bound) = match out.verdict {
            Verdict::Finite { value, .. } => (Some(value), None),
            Verdict::Unresolved { lower_bound, .. } => (None, Some(lower_bound)),
            Verdict::Infinite => (None, None),
        };
        let ratio = match question {
            Question::Diagonal => computed.map(|v| f64::from(v) / f64::from(k * k)),
            _ => None,
        };
        rows.push(EvidenceRow {
            k,
            r,
            computed,
            lower_bound,
            conjectured: formula,
            ratio,
            consistent: formula.zip(computed).map(|(f, c)| f == c),
        });
    }
    Ok(EvidenceReport { question, rows })
}
