//! Color permutations that preserve zero-sum-ness of every solution.
//!
//! Multiplying all colors by a unit `u` of `Z_r` scales every color sum by
//! `u`, so it never changes whether a sum vanishes. When `r | k`, adding a
//! constant `c` to every color shifts a `k`-term sum by `k c = 0 mod r`. For
//! the binary palette the only available map is `x -> 1 - x`, which turns a
//! sum `s` into `k - s = -s mod r` when `r | k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{is_infinite_instance, Color, Coloring, Palette, Params};

/// A color map in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorMap {
    /// `x -> (mul * x + add) mod r`.
    Affine { mul: u32, add: u32 },
    /// `x -> 1 - x` on `{0, 1}`.
    Complement,
}

impl ColorMap {
    /// Applies the map, or `None` if `x` lies outside its domain.
    pub fn apply(self, x: Color, r: u32) -> Option<Color> {
        match self {
            ColorMap::Affine { mul, add } => {
                (u32::from(x) < r).then(|| ((mul * u32::from(x) + add) % r) as Color)
            }
            ColorMap::Complement => (x <= 1).then(|| 1 - x),
        }
    }
}

/// A set of non-identity color maps, each stored as a lookup table.
#[derive(Debug, Clone, Default)]
pub struct SymmetryGroup {
    maps: Vec<Vec<Color>>,
    forms: Vec<ColorMap>,
}

impl SymmetryGroup {
    /// The maps usable to prune a search for `p`. Unit multiplications are
    /// always sound; translations and complement need `r | k`.
    pub fn for_search(p: &Params) -> Self {
        let divisible = !is_infinite_instance(p);
        let r = p.r();
        let mut forms = Vec::new();
        match p.palette() {
            Palette::Full => {
                for u in units(r) {
                    let shifts = if divisible { r } else { 1 };
                    for c in 0..shifts {
                        if u == 1 && c == 0 {
                            continue;
                        }
                        forms.push(ColorMap::Affine { mul: u, add: c });
                    }
                }
            }
            Palette::Binary => {
                if divisible {
                    forms.push(ColorMap::Complement);
                }
            }
        }
        let domain = p.num_colors() as Color;
        let maps = forms
            .iter()
            .map(|f| {
                (0..domain)
                    .map(|x| f.apply(x, r).expect("color in domain"))
                    .collect()
            })
            .collect();
        SymmetryGroup { maps, forms }
    }

    /// The full group used for canonical forms; requires `r | k`.
    pub fn for_normalization(p: &Params) -> Result<Self> {
        if is_infinite_instance(p) {
            return Err(Error::NotDivisible { k: p.k(), r: p.r() });
        }
        Ok(Self::for_search(p))
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub(crate) fn maps(&self) -> &[Vec<Color>] {
        &self.maps
    }

    pub fn form(&self, i: usize) -> ColorMap {
        self.forms[i]
    }

    /// Image of `chi` under the `i`-th map.
    pub fn apply(&self, i: usize, chi: &Coloring) -> Coloring {
        let map = &self.maps[i];
        Coloring::new(chi.as_slice().iter().map(|&c| map[c as usize]).collect())
    }
}

fn units(r: u32) -> impl Iterator<Item = u32> {
    (1..r).filter(move |&u| gcd(u, r) == 1)
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lexicographically least coloring in the orbit of `chi`.
pub fn normalize_coloring(chi: &Coloring, p: &Params) -> Result<Coloring> {
    let group = SymmetryGroup::for_normalization(p)?;
    chi.validate(p)?;
    Ok((0..group.len())
        .map(|i| group.apply(i, chi))
        .fold(chi.clone(), |best, img| best.min(img)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zero_sum::find_any_zero_sum;
    use proptest::prelude::*;

    fn chi(s: &str) -> Coloring {
        s.parse().unwrap()
    }

    #[test]
    fn group_sizes() {
        // |affine group| - 1 = r * phi(r) - 1.
        assert_eq!(
            SymmetryGroup::for_search(&Params::full(3, 3).unwrap()).len(),
            5
        );
        assert_eq!(
            SymmetryGroup::for_search(&Params::full(4, 4).unwrap()).len(),
            7
        );
        assert_eq!(
            SymmetryGroup::for_search(&Params::full(5, 5).unwrap()).len(),
            19
        );
        // Units only when r does not divide k.
        assert_eq!(
            SymmetryGroup::for_search(&Params::full(7, 5).unwrap()).len(),
            3
        );
        assert_eq!(
            SymmetryGroup::for_search(&Params::binary(6, 3).unwrap()).len(),
            1
        );
        assert!(SymmetryGroup::for_search(&Params::binary(7, 3).unwrap()).is_empty());
    }

    #[test]
    fn normalize_examples() {
        let b = Params::binary(4, 2).unwrap();
        assert_eq!(normalize_coloring(&chi("1100"), &b).unwrap(), chi("0011"));

        // The six images of "120" under x -> u x + c, u in {1, 2}, c in Z_3.
        let f = Params::full(3, 3).unwrap();
        let mut images = Vec::new();
        for u in [1u8, 2] {
            for c in 0..3u8 {
                images.push(Coloring::new(
                    [1u8, 2, 0].iter().map(|&x| (u * x + c) % 3).collect(),
                ));
            }
        }
        let least = images.iter().min().unwrap().clone();
        assert_eq!(least, chi("012"));
        assert_eq!(normalize_coloring(&chi("120"), &f).unwrap(), least);
        assert_eq!(normalize_coloring(&chi("012"), &f).unwrap(), chi("012"));
    }

    #[test]
    fn normalize_requires_divisibility() {
        assert!(matches!(
            normalize_coloring(&chi("01"), &Params::full(4, 3).unwrap()),
            Err(Error::NotDivisible { k: 4, r: 3 })
        ));
        assert!(normalize_coloring(&chi("02"), &Params::binary(6, 3).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(m in 1u32..=3, r in 2u32..=5, seed in prop::collection::vec(0u8..5, 1..16)) {
            let p = Params::full(m * r, r).unwrap();
            let c = Coloring::new(seed.iter().map(|&x| x % r as u8).collect());
            let once = normalize_coloring(&c, &p).unwrap();
            prop_assert_eq!(normalize_coloring(&once, &p).unwrap(), once.clone());
            prop_assert!(once <= c);
            prop_assert_eq!(once.as_slice()[0], 0);
        }

        #[test]
        fn affine_maps_preserve_existence(
            m in 1u32..=2,
            r in 2u32..=5,
            seed in prop::collection::vec(0u8..5, 1..=20),
            pick in 0usize..64,
        ) {
            let p = Params::full(m * r, r).unwrap();
            let group = SymmetryGroup::for_search(&p);
            let c = Coloring::new(seed.iter().map(|&x| x % r as u8).collect());
            let img = group.apply(pick % group.len(), &c);
            prop_assert_eq!(find_any_zero_sum(&c, &p).is_some(), find_any_zero_sum(&img, &p).is_some());
            let norm = normalize_coloring(&c, &p).unwrap();
            prop_assert_eq!(find_any_zero_sum(&c, &p).is_some(), find_any_zero_sum(&norm, &p).is_some());
        }

        #[test]
        fn unit_maps_preserve_existence_without_divisibility(
            k in 2u32..=7,
            r in 3u32..=5,
            seed in prop::collection::vec(0u8..5, 1..=16),
            pick in 0usize..64,
        ) {
            let p = Params::full(k, r).unwrap();
            prop_assume!(k % r != 0);
            let group = SymmetryGroup::for_search(&p);
            let c = Coloring::new(seed.iter().map(|&x| x % r as u8).collect());
            let img = group.apply(pick % group.len(), &c);
            prop_assert_eq!(find_any_zero_sum(&c, &p).is_some(), find_any_zero_sum(&img, &p).is_some());
        }

        #[test]
        fn complement_preserves_existence(
            m in 1u32..=3,
            r in 2u32..=4,
            bits in prop::collection::vec(0u8..2, 1..=20),
        ) {
            let p = Params::binary(m * r, r).unwrap();
            let group = SymmetryGroup::for_search(&p);
            let c = Coloring::new(bits);
            let img = group.apply(0, &c);
            prop_assert_eq!(find_any_zero_sum(&c, &p).is_some(), find_any_zero_sum(&img, &p).is_some());
        }
    }
}
