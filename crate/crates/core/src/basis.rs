//! Configuration words over {U, F, D}, their base-3 codes, conserved
//! sectors and the symmetry actions of the periodic chain.
//!
//! Link 1 is the most significant base-3 digit and U, F, D map to the
//! digits 0, 1, 2. Every matrix-producing module uses this ordering.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One link of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    U,
    F,
    D,
}

impl Step {
    pub const ALL: [Step; 3] = [Step::U, Step::F, Step::D];

    pub fn digit(self) -> u64 {
        match self {
            Step::U => 0,
            Step::F => 1,
            Step::D => 2,
        }
    }

    pub fn from_digit(digit: u64) -> Step {
        match digit {
            0 => Step::U,
            1 => Step::F,
            2 => Step::D,
            _ => unreachable!("base-3 digit out of range"),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Step::U => 'u',
            Step::F => 'f',
            Step::D => 'd',
        }
    }

    pub fn from_symbol(c: char) -> Result<Step> {
        match c.to_ascii_lowercase() {
            'u' => Ok(Step::U),
            'f' => Ok(Step::F),
            'd' => Ok(Step::D),
            other => Err(Error::InvalidStep(other)),
        }
    }

    /// Height change of the step in the path picture.
    pub fn slope(self) -> i64 {
        match self {
            Step::U => 1,
            Step::F => 0,
            Step::D => -1,
        }
    }

    pub fn swapped(self) -> Step {
        match self {
            Step::U => Step::D,
            Step::F => Step::F,
            Step::D => Step::U,
        }
    }
}

pub fn pow3(length: usize) -> u64 {
    3u64.pow(length as u32)
}

/// A word of `length` steps, one per link, stored by its base-3 code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConfigWord {
    length: usize,
    code: u64,
}

impl ConfigWord {
    pub fn from_code(length: usize, code: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::ZeroLength);
        }
        assert!(code < pow3(length), "code {code} out of range for length {length}");
        Ok(ConfigWord { length, code })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    /// Step on link `j`, 1-based.
    pub fn step(&self, link: usize) -> Step {
        debug_assert!(link >= 1 && link <= self.length);
        let shift = pow3(self.length - link);
        Step::from_digit((self.code / shift) % 3)
    }

    pub fn steps(&self) -> Vec<Step> {
        decode(self)
    }

    pub fn all_flat(length: usize) -> Result<Self> {
        encode(&vec![Step::F; length])
    }
}

impl fmt::Display for ConfigWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.steps() {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for ConfigWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let steps = s.trim().chars().map(Step::from_symbol).collect::<Result<Vec<_>>>()?;
        encode(&steps)
    }
}

impl Serialize for ConfigWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

pub fn encode(steps: &[Step]) -> Result<ConfigWord> {
    if steps.is_empty() {
        return Err(Error::ZeroLength);
    }
    let code = steps.iter().fold(0u64, |acc, s| acc * 3 + s.digit());
    Ok(ConfigWord { length: steps.len(), code })
}

pub fn decode(word: &ConfigWord) -> Vec<Step> {
    let mut out = vec![Step::F; word.length];
    let mut code = word.code;
    for slot in out.iter_mut().rev() {
        *slot = Step::from_digit(code % 3);
        code /= 3;
    }
    out
}

/// Conserved step counts `(u, d)` of a word of length `length`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorLabel {
    pub u: usize,
    pub d: usize,
}

impl SectorLabel {
    pub fn new(u: usize, d: usize) -> Self {
        SectorLabel { u, d }
    }

    pub fn r(&self) -> usize {
        self.u + self.d
    }

    pub fn flats(&self, length: usize) -> usize {
        length - self.r()
    }

    pub fn validate(&self, length: usize) -> Result<()> {
        if length == 0 {
            return Err(Error::ZeroLength);
        }
        if self.u + self.d > length {
            return Err(Error::InvalidSector { length, u: self.u, d: self.d });
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        SectorLabel { u: self.d, d: self.u }
    }

    /// `L! / (u! d! f!)`.
    pub fn dimension(&self, length: usize) -> usize {
        (binomial(length, self.r()) * binomial(self.r(), self.u)) as usize
    }

    /// All valid labels for a chain, ordered by `(r, u)` descending in `u`.
    pub fn all(length: usize) -> Vec<SectorLabel> {
        (0..=length)
            .flat_map(|r| (0..=r).rev().map(move |u| SectorLabel { u, d: r - u }))
            .collect()
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.d)
    }
}

impl FromStr for SectorLabel {
    type Err = Error;

    /// Parses `"u,d"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSector { length: 0, u: usize::MAX, d: usize::MAX };
        let (u, d) = s.split_once(',').ok_or_else(bad)?;
        let u = u.trim().parse().map_err(|_| bad())?;
        let d = d.trim().parse().map_err(|_| bad())?;
        Ok(SectorLabel { u, d })
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

pub fn sector_of(word: &ConfigWord) -> SectorLabel {
    let steps = word.steps();
    SectorLabel {
        u: steps.iter().filter(|&&s| s == Step::U).count(),
        d: steps.iter().filter(|&&s| s == Step::D).count(),
    }
}

/// Every word with exactly `u` U's and `d` D's, ascending by code.
pub fn enumerate_sector(length: usize, sector: SectorLabel) -> Result<Vec<ConfigWord>> {
    sector.validate(length)?;
    let mut out = Vec::with_capacity(sector.dimension(length));
    let mut steps = Vec::with_capacity(length);
    fill_sector(length, sector.u, sector.d, length - sector.r(), &mut steps, &mut out);
    Ok(out)
}

// Depth-first in digit order U < F < D, so output is already sorted by code.
fn fill_sector(
    length: usize,
    u: usize,
    d: usize,
    f: usize,
    prefix: &mut Vec<Step>,
    out: &mut Vec<ConfigWord>,
) {
    if prefix.len() == length {
        out.push(encode(prefix).expect("nonempty"));
        return;
    }
    for (step, left) in [(Step::U, u), (Step::F, f), (Step::D, d)] {
        if left == 0 {
            continue;
        }
        prefix.push(step);
        match step {
            Step::U => fill_sector(length, u - 1, d, f, prefix, out),
            Step::F => fill_sector(length, u, d, f - 1, prefix, out),
            Step::D => fill_sector(length, u, d - 1, f, prefix, out),
        }
        prefix.pop();
    }
}

/// All words with `u + d = r`, ascending by code.
pub fn enumerate_particle_number(length: usize, r: usize) -> Result<Vec<ConfigWord>> {
    if r > length {
        return Err(Error::InvalidSector { length, u: r, d: 0 });
    }
    let mut all = Vec::new();
    for u in 0..=r {
        all.extend(enumerate_sector(length, SectorLabel { u, d: r - u })?);
    }
    all.sort();
    Ok(all)
}

/// Cyclic rotation: the step on link `j` moves to link `j + shift`.
pub fn translate(word: &ConfigWord, shift: i64) -> ConfigWord {
    let length = word.length;
    let s = shift.rem_euclid(length as i64) as usize;
    let steps = word.steps();
    let mut out = vec![Step::F; length];
    for (i, step) in steps.into_iter().enumerate() {
        out[(i + s) % length] = step;
    }
    encode(&out).expect("nonempty")
}

pub fn swap_ud(word: &ConfigWord) -> ConfigWord {
    let steps: Vec<Step> = word.steps().into_iter().map(Step::swapped).collect();
    encode(&steps).expect("nonempty")
}

/// An ordered list of basis words with reverse lookup.
///
/// Either the full `3^L` space (codes `0..3^L`) or a block such as a
/// conserved sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    length: usize,
    codes: Vec<u64>,
    index: Option<HashMap<u64, usize>>,
}

impl Basis {
    pub fn full(length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::ZeroLength);
        }
        Ok(Basis { length, codes: (0..pow3(length)).collect(), index: None })
    }

    pub fn sector(length: usize, sector: SectorLabel) -> Result<Self> {
        let words = enumerate_sector(length, sector)?;
        Ok(Self::from_words(length, &words))
    }

    pub fn particle_number(length: usize, r: usize) -> Result<Self> {
        let words = enumerate_particle_number(length, r)?;
        Ok(Self::from_words(length, &words))
    }

    pub fn from_words(length: usize, words: &[ConfigWord]) -> Self {
        let codes: Vec<u64> = words.iter().map(|w| w.code()).collect();
        let index = codes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        Basis { length, codes, index: Some(index) }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.codes.len()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn word(&self, i: usize) -> ConfigWord {
        ConfigWord { length: self.length, code: self.codes[i] }
    }

    pub fn index_of(&self, code: u64) -> Option<usize> {
        match &self.index {
            None => (code < self.codes.len() as u64).then_some(code as usize),
            Some(map) => map.get(&code).copied(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.index.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> ConfigWord {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&[Step::F, Step::F, Step::F]).unwrap().code(), 13);
        assert_eq!(encode(&[Step::U, Step::F, Step::D]).unwrap().code(), 5);
        assert_eq!(encode(&[]), Err(Error::ZeroLength));
    }

    #[test]
    fn text_form() {
        assert_eq!(w("ufdd").to_string(), "ufdd");
        assert_eq!(w("UFD").code(), 5);
        assert!(matches!("uxd".parse::<ConfigWord>(), Err(Error::InvalidStep('x'))));
    }

    #[test]
    fn sector_examples() {
        assert_eq!(sector_of(&w("ufdf")), SectorLabel::new(1, 1));
        assert_eq!(sector_of(&w("fffff")), SectorLabel::new(0, 0));
        let total: usize = SectorLabel::all(5).iter().map(|s| s.dimension(5)).sum();
        assert_eq!(total, 243);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_sector(5, SectorLabel::new(2, 0)).unwrap().len(), 10);
        assert_eq!(enumerate_particle_number(5, 2).unwrap().len(), 40);
        assert!(enumerate_sector(3, SectorLabel::new(2, 2)).is_err());

        // brute force over all 3^4 words
        let brute: Vec<ConfigWord> = (0..pow3(4))
            .map(|c| ConfigWord::from_code(4, c).unwrap())
            .filter(|w| sector_of(w) == SectorLabel::new(1, 1))
            .collect();
        assert_eq!(brute.len(), 12);
        assert_eq!(enumerate_sector(4, SectorLabel::new(1, 1)).unwrap(), brute);
    }

    #[test]
    fn sectors_partition_basis() {
        for length in 1..=9 {
            let mut seen = vec![false; pow3(length) as usize];
            for s in SectorLabel::all(length) {
                let words = enumerate_sector(length, s).unwrap();
                assert_eq!(words.len(), s.dimension(length));
                assert!(words.windows(2).all(|p| p[0] < p[1]));
                for word in words {
                    assert!(!seen[word.code() as usize]);
                    seen[word.code() as usize] = true;
                }
            }
            assert!(seen.into_iter().all(|x| x));
        }
    }

    #[test]
    fn r_aggregated_dimension() {
        for length in 1..=8 {
            for r in 0..=length {
                let n = enumerate_particle_number(length, r).unwrap().len() as u64;
                assert_eq!(n, binomial(length, r) << r);
            }
        }
    }

    #[test]
    fn translate_examples() {
        assert_eq!(translate(&w("uff"), 1), w("fuf"));
        assert_eq!(translate(&w("ufd"), 3), w("ufd"));
        assert_eq!(translate(&w("ufd"), -1), w("fdu"));
    }

    #[test]
    fn orbit_sizes_divide_length() {
        let length = 6;
        for c in 0..pow3(length) {
            let start = ConfigWord::from_code(length, c).unwrap();
            let mut size = 1;
            let mut cur = translate(&start, 1);
            while cur != start {
                size += 1;
                cur = translate(&cur, 1);
            }
            assert_eq!(length % size, 0);
        }
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_ud(&w("ufd")), w("dfu"));
        for c in 0..pow3(5) {
            let word = ConfigWord::from_code(5, c).unwrap();
            assert_eq!(swap_ud(&swap_ud(&word)), word);
            assert_eq!(sector_of(&swap_ud(&word)), sector_of(&word).swapped());
            assert_eq!(sector_of(&translate(&word, 2)), sector_of(&word));
        }
    }

    #[test]
    fn basis_lookup() {
        let b = Basis::sector(4, SectorLabel::new(1, 1)).unwrap();
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.codes()[i]), Some(i));
        }
        assert_eq!(b.index_of(0), None);
        let full = Basis::full(3).unwrap();
        assert_eq!(full.index_of(26), Some(26));
        assert_eq!(full.index_of(27), None);
    }

    fn arb_word(length: usize) -> impl Strategy<Value = Vec<Step>> {
        proptest::collection::vec(prop_oneof![Just(Step::U), Just(Step::F), Just(Step::D)], length)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn round_trip(steps in arb_word(8)) {
            let word = encode(&steps).unwrap();
            prop_assert!(word.code() < pow3(8));
            prop_assert_eq!(decode(&word), steps);
        }
    }
}
