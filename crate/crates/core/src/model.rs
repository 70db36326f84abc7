//! Domain types shared by every module: problem parameters, solutions of
//! `x_1 + ... + x_{k-1} = x_k`, colorings of `[1, n]`, and the zero-sum
//! predicates over them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus the engine accepts. Residue sets are packed into a `u64`.
pub const MAX_MODULUS: u32 = 64;

/// A color is an integer residue `0..r`.
pub type Color = u8;

/// Which colors a coloring may use. Sums are always taken modulo `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    /// Colors `0, 1, ..., r - 1`.
    Full,
    /// Colors `0` and `1` only.
    Binary,
}

impl fmt::Display for Palette {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Palette::Full => "full",
            Palette::Binary => "binary",
        })
    }
}

/// One problem instance: term count `k`, modulus `r` and palette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    k: u32,
    r: u32,
    palette: Palette,
}

impl Params {
    pub fn new(k: u32, r: u32, palette: Palette) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParams(format!(
                "k must be at least 2, got {k}"
            )));
        }
        if !(2..=MAX_MODULUS).contains(&r) {
            return Err(Error::InvalidParams(format!(
                "r must lie in [2, {MAX_MODULUS}], got {r}"
            )));
        }
        Ok(Params { k, r, palette })
    }

    pub fn full(k: u32, r: u32) -> Result<Self> {
        Self::new(k, r, Palette::Full)
    }

    pub fn binary(k: u32, r: u32) -> Result<Self> {
        Self::new(k, r, Palette::Binary)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn palette(&self) -> Palette {
        self.palette
    }

    /// Number of colors actually available.
    pub fn num_colors(&self) -> u32 {
        match self.palette {
            Palette::Full => self.r,
            Palette::Binary => 2,
        }
    }

    /// Number of summands on the left-hand side, `k - 1`.
    pub fn parts(&self) -> usize {
        self.k as usize - 1
    }
}

/// `true` iff `r` does not divide `k`. The constant coloring `1` then has
/// color sum `k mod r != 0` on every solution, so both numbers are infinite.
pub fn is_infinite_instance(p: &Params) -> bool {
    !p.k.is_multiple_of(p.r)
}

/// A solution `x_1 <= ... <= x_{k-1}`, `x_k = x_1 + ... + x_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Solution {
    parts: Vec<u32>,
    target: u32,
}

impl Solution {
    /// Builds a solution from its summands in any order.
    pub fn from_parts(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParams(
                "a solution needs at least one part".into(),
            ));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidParams("parts must be positive".into()));
        }
        parts.sort_unstable();
        let target = parts
            .iter()
            .try_fold(0u32, |acc, &x| acc.checked_add(x))
            .ok_or_else(|| Error::InvalidParams("sum of parts overflows".into()))?;
        Ok(Solution { parts, target })
    }

    /// Trusted constructor for the enumerator; `parts` must already be a
    /// sorted positive tuple summing to `target`.
    pub(crate) fn from_sorted_unchecked(parts: Vec<u32>, target: u32) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] <= w[1]));
        debug_assert_eq!(parts.iter().sum::<u32>(), target);
        Solution { parts, target }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    /// Term count `k` of the equation this solves.
    pub fn k(&self) -> u32 {
        self.parts.len() as u32 + 1
    }

    /// `x_1 + ... + x_m`; `prefix_sum(k - 1)` is the target.
    pub fn prefix_sum(&self, m: usize) -> u32 {
        self.parts[..m].iter().sum()
    }

    /// All `k` entries, parts first and target last.
    pub fn terms(&self) -> impl Iterator<Item = u32> + '_ {
        self.parts
            .iter()
            .copied()
            .chain(std::iter::once(self.target))
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, " = {}", self.target)
    }
}

/// An assignment `[1, n] -> colors`. Index 0 holds the color of position 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    colors: Vec<Color>,
}

impl Coloring {
    pub fn new(colors: Vec<Color>) -> Self {
        Coloring { colors }
    }

    pub fn constant(len: usize, color: Color) -> Self {
        Coloring {
            colors: vec![color; len],
        }
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.colors
    }

    pub fn into_vec(self) -> Vec<Color> {
        self.colors
    }

    /// Color of `position` (1-based).
    pub fn get(&self, position: u32) -> Result<Color> {
        position
            .checked_sub(1)
            .and_then(|i| self.colors.get(i as usize))
            .copied()
            .ok_or(Error::OutOfRange {
                position,
                length: self.colors.len() as u32,
            })
    }

    /// The coloring restricted to `[1, len]`.
    pub fn prefix(&self, len: usize) -> Coloring {
        Coloring::new(self.colors[..len.min(self.colors.len())].to_vec())
    }

    /// Checks that every color is admissible for `p`.
    pub fn validate(&self, p: &Params) -> Result<()> {
        let limit = p.num_colors();
        match self.colors.iter().position(|&c| u32::from(c) >= limit) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidColoring(format!(
                "position {} has color {}, but the {} palette with r = {} allows only 0..{}",
                i + 1,
                self.colors[i],
                p.palette(),
                p.r(),
                limit
            ))),
        }
    }

    /// Digit string for `r <= 10`, comma-separated integers otherwise.
    pub fn encode(&self, r: u32) -> String {
        if r <= 10 {
            self.colors.iter().map(|&c| char::from(b'0' + c)).collect()
        } else {
            self.colors
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl FromStr for Coloring {
    type Err = Error;

    /// Accepts either a digit string or comma-separated integers.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(',') {
            s.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<u32>()
                        .ok()
                        .filter(|&c| c < MAX_MODULUS)
                        .map(|c| c as Color)
                        .ok_or_else(|| Error::InvalidColoring(format!("bad color {tok:?}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Coloring::new)
        } else {
            s.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as Color)
                        .ok_or_else(|| Error::InvalidColoring(format!("bad color digit {ch:?}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Coloring::new)
        }
    }
}

impl Serialize for Coloring {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.colors.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Vec::<Color>::deserialize(deserializer).map(Coloring::new)
    }
}

/// `(chi(x_1) + ... + chi(x_{k-1}) + chi(x_k)) mod r`.
pub fn color_sum(sol: &Solution, chi: &Coloring, r: u32) -> Result<u32> {
    let mut total = 0u32;
    for x in sol.terms() {
        total = (total + u32::from(chi.get(x)?)) % r;
    }
    Ok(total)
}

/// `chi(x_1) + ... + chi(x_m)` over the first `m` parts, unreduced.
pub fn color_prefix_sum(sol: &Solution, chi: &Coloring, m: usize) -> Result<u32> {
    sol.parts()[..m]
        .iter()
        .try_fold(0u32, |acc, &x| Ok(acc + u32::from(chi.get(x)?)))
}

pub fn is_zero_sum(sol: &Solution, chi: &Coloring, r: u32) -> Result<bool> {
    Ok(color_sum(sol, chi, r)? == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chi(s: &str) -> Coloring {
        s.parse().unwrap()
    }

    #[test]
    fn infinite_instances() {
        assert!(is_infinite_instance(&Params::full(3, 2).unwrap()));
        assert!(!is_infinite_instance(&Params::full(12, 4).unwrap()));
        for r in 2..=MAX_MODULUS {
            assert!(!is_infinite_instance(&Params::full(r, r).unwrap()));
        }
    }

    #[test]
    fn params_validation() {
        assert!(Params::full(1, 2).is_err());
        assert!(Params::full(2, 1).is_err());
        assert!(Params::full(2, MAX_MODULUS + 1).is_err());
        assert!(Params::full(2, 2).is_ok());
        assert_eq!(Params::binary(6, 3).unwrap().num_colors(), 2);
    }

    #[test]
    fn color_sum_examples() {
        let s = Solution::from_parts(vec![1, 1, 2]).unwrap();
        assert_eq!(color_sum(&s, &chi("0000"), 4).unwrap(), 0);

        let s = Solution::from_parts(vec![3, 1]).unwrap();
        assert_eq!(s.parts(), &[1, 3]);
        assert_eq!(color_sum(&s, &chi("0110"), 3).unwrap(), 1);
        assert!(!is_zero_sum(&s, &chi("0110"), 3).unwrap());

        let s = Solution::from_parts(vec![1, 1, 2]).unwrap();
        assert_eq!(color_sum(&s, &chi("0112"), 4).unwrap(), 3);
        assert!(!is_zero_sum(&s, &chi("0112"), 4).unwrap());
    }

    #[test]
    fn color_sum_out_of_range() {
        let s = Solution::from_parts(vec![2, 3]).unwrap();
        assert!(matches!(
            color_sum(&s, &chi("0000"), 2),
            Err(Error::OutOfRange {
                position: 5,
                length: 4
            })
        ));
    }

    #[test]
    fn prefix_sums() {
        let s = Solution::from_parts(vec![3, 1, 2]).unwrap();
        assert_eq!(s.prefix_sum(2), 3);
        assert_eq!(s.prefix_sum(3), s.target());
        assert_eq!(color_prefix_sum(&s, &chi("012012"), 3).unwrap(), 3);
    }

    #[test]
    fn coloring_encoding() {
        let c = chi("0120");
        assert_eq!(c.encode(3), "0120");
        assert_eq!(c.encode(12), "0,1,2,0");
        assert_eq!(
            "0,11,3".parse::<Coloring>().unwrap().as_slice(),
            &[0, 11, 3]
        );
        assert!("01a".parse::<Coloring>().is_err());
        assert!(chi("0120")
            .validate(&Params::binary(6, 3).unwrap())
            .is_err());
        assert!(chi("0110").validate(&Params::binary(6, 3).unwrap()).is_ok());
    }

    proptest! {
        #[test]
        fn color_sum_is_reduced(
            parts in prop::collection::vec(1u32..6, 1..5),
            r in 2u32..7,
            seed in prop::collection::vec(0u8..64, 30),
        ) {
            let sol = Solution::from_parts(parts).unwrap();
            let colors: Vec<Color> = seed.iter().map(|&c| c % r as u8).collect();
            let chi = Coloring::new(colors);
            let sum = color_sum(&sol, &chi, r).unwrap();
            prop_assert!(sum < r);
            prop_assert_eq!(is_zero_sum(&sol, &chi, r).unwrap(), sum == 0);
        }

        #[test]
        fn monochromatic_solutions_are_zero_sum_when_r_divides_k(
            m in 1u32..4,
            r in 2u32..5,
            color in 0u8..5,
            seed in prop::collection::vec(1u32..4, 12),
        ) {
            let k = m * r;
            let parts: Vec<u32> = seed.iter().take(k as usize - 1).copied().collect();
            let sol = Solution::from_parts(parts).unwrap();
            let color = color % r as u8;
            let chi = Coloring::constant(sol.target() as usize, color);
            prop_assert!(is_zero_sum(&sol, &chi, r).unwrap());
        }
    }
}
