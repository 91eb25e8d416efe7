//! Path view of configurations, equivalence-move orbits and the explicit
//! ground states.
//!
//! The moves `uf ↔ fu` and `df ↔ fd` act on every link pair including
//! `(L, 1)`. They never change the cyclic order of the non-flat steps, so
//! an orbit is fixed by its flat count and a cyclic class of flavor words.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{binomial, encode, enumerate_particle_number, pow3, Basis, ConfigWord, SectorLabel, Step};
use crate::error::{Error, Result};
use crate::exact::{exact_rank, ExactOperator, Q};
use crate::operators::{hamiltonian_on, HamiltonianSpec};
use crate::spectra::{kernel_dimension, KERNEL_TOL, SECTOR_CAP};

/// Heights `h₀ = 0, …, h_L` of the lattice path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathProfile {
    pub heights: Vec<i64>,
}

pub fn to_path(w: &ConfigWord) -> PathProfile {
    let mut heights = vec![0];
    for s in w.steps() {
        heights.push(heights.last().unwrap() + s.slope());
    }
    PathProfile { heights }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Minimum-code member.
    pub representative: ConfigWord,
    /// Sorted by code.
    pub members: Vec<ConfigWord>,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn sector(&self) -> SectorLabel {
        crate::basis::sector_of(&self.representative)
    }

    pub fn flats(&self) -> usize {
        self.sector().flats(self.representative.length())
    }
}

fn moves(w: &ConfigWord) -> Vec<ConfigWord> {
    let length = w.length();
    let steps = w.steps();
    let mut out = Vec::new();
    if length < 2 {
        return out;
    }
    for j in 0..length {
        let k = (j + 1) % length;
        let (a, b) = (steps[j], steps[k]);
        if a != b && (a == Step::F || b == Step::F) {
            let mut next = steps.clone();
            next.swap(j, k);
            out.push(encode(&next).expect("same length"));
        }
    }
    out
}

/// Breadth-first closure of `w` under the cyclic moves.
pub fn orbit(w: &ConfigWord) -> Orbit {
    let mut seen = BTreeSet::from([w.code()]);
    let mut queue = VecDeque::from([*w]);
    while let Some(x) = queue.pop_front() {
        for y in moves(&x) {
            if seen.insert(y.code()) {
                queue.push_back(y);
            }
        }
    }
    let members: Vec<ConfigWord> = seen.into_iter().map(|c| ConfigWord::from_code(w.length(), c).unwrap()).collect();
    Orbit { representative: members[0], members }
}

/// Partition of all words with `flats` flat steps into orbits, ordered by
/// representative code.
pub fn orbits_with_flats(length: usize, flats: usize) -> Result<Vec<Orbit>> {
    if flats > length {
        return Ok(vec![]);
    }
    let words = enumerate_particle_number(length, length - flats)?;
    let mut assigned = BTreeSet::new();
    let mut out = Vec::new();
    for w in words {
        if assigned.contains(&w.code()) {
            continue;
        }
        let o = orbit(&w);
        assigned.extend(o.members.iter().map(|m| m.code()));
        out.push(o);
    }
    Ok(out)
}

/// The `2^L` flat-free words and the all-flat word.
pub fn product_ground_states(length: usize) -> Result<Vec<ConfigWord>> {
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let mut out = enumerate_particle_number(length, length)?;
    out.push(ConfigWord::all_flat(length)?);
    out.sort_by_key(|w| w.code());
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntangledState {
    pub orbit: Orbit,
    pub flats: usize,
    /// Squared norm of the unnormalized equal-weight sum, the orbit size.
    pub weight_squared: u64,
    pub annihilated: bool,
}

impl EntangledState {
    /// `binom(L, f)`: the orbit size for a flavor word with no rotational
    /// repetition.
    pub fn binomial_weight(&self) -> u64 {
        binomial(self.orbit.representative.length(), self.flats)
    }

    /// Unit-norm amplitudes `1/√size` on the orbit members.
    pub fn normalized(&self) -> Vec<(ConfigWord, f64)> {
        let a = 1.0 / (self.weight_squared as f64).sqrt();
        self.orbit.members.iter().map(|w| (*w, a)).collect()
    }

    /// Unnormalized amplitudes keyed by basis code, as `"1/1"`.
    pub fn exact_json(&self) -> BTreeMap<u64, String> {
        self.orbit.members.iter().map(|w| (w.code(), "1/1".to_string())).collect()
    }
}

fn annihilated(members: &[ConfigWord], h: &ExactOperator, basis: &Basis) -> bool {
    let mut v = vec![Q::from_integer(0); basis.dim()];
    for w in members {
        v[basis.index_of(w.code()).expect("member in sector")] = Q::from_integer(1);
    }
    h.apply(&v).iter().all(|x| *x == Q::from_integer(0))
}

/// One equal-weight superposition per orbit with `1 ≤ f ≤ L − 1` flats,
/// each checked exactly against `H(L, 0)` on its sector.
pub fn entangled_ground_states(length: usize) -> Result<Vec<EntangledState>> {
    if length < 2 {
        return Err(Error::LengthTooSmall { length, min: 2, what: "entangled ground states" });
    }
    let spec = HamiltonianSpec::free(length)?;
    let sectors: Vec<SectorLabel> = SectorLabel::all(length).into_iter().filter(|s| s.r() >= 1 && s.r() < length).collect();
    let hs: HashMap<SectorLabel, (Basis, ExactOperator)> = sectors
        .par_iter()
        .map(|&s| {
            let basis = Basis::sector(length, s)?;
            let h = hamiltonian_on(&spec, &basis);
            Ok((s, (basis, h)))
        })
        .collect::<Result<_>>()?;
    let per_f: Vec<Vec<EntangledState>> = (1..length)
        .into_par_iter()
        .map(|f| {
            orbits_with_flats(length, f).map(|orbits| {
                orbits
                    .into_iter()
                    .map(|o| {
                        let (basis, h) = &hs[&o.sector()];
                        EntangledState {
                            annihilated: annihilated(&o.members, h, basis),
                            weight_squared: o.size() as u64,
                            flats: f,
                            orbit: o,
                        }
                    })
                    .collect()
            })
        })
        .collect::<Result<_>>()?;
    Ok(per_f.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GsdReport {
    #[serde(rename = "L")]
    pub length: usize,
    pub product: usize,
    pub entangled: usize,
    pub constructed: usize,
    /// Entangled states per flat count `f = 1..L−1`.
    pub entangled_by_flats: Vec<usize>,
    pub ed_kernel: Option<usize>,
    /// The closed form `2^(L+1) − 1` and whether the count reaches it.
    pub quoted: u64,
    pub matches_quoted: bool,
}

/// Ground-state count from the explicit construction, cross-checked
/// against the ED kernel when `L ≤ SECTOR_CAP`.
pub fn gsd(length: usize) -> Result<GsdReport> {
    if length < 2 {
        return Err(Error::LengthTooSmall { length, min: 2, what: "the ground-state count" });
    }
    let product = product_ground_states(length)?.len();
    let entangled = entangled_ground_states(length)?;
    let mut entangled_by_flats = vec![0; length - 1];
    for s in &entangled {
        entangled_by_flats[s.flats - 1] += 1;
    }
    let constructed = product + entangled.len();
    let ed_kernel = if length <= SECTOR_CAP {
        Some(kernel_dimension(length, Q::from_integer(0), KERNEL_TOL)?.kernel_dim)
    } else {
        None
    };
    if let Some(ed) = ed_kernel {
        if ed != constructed {
            return Err(Error::GsdInconsistency { constructed, ed });
        }
    }
    let quoted = (1u64 << (length + 1)) - 1;
    Ok(GsdReport {
        length,
        product,
        entangled: entangled.len(),
        constructed,
        entangled_by_flats,
        ed_kernel,
        quoted,
        matches_quoted: constructed as u64 == quoted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanReport {
    #[serde(rename = "L")]
    pub length: usize,
    pub candidates: usize,
    pub all_annihilated: bool,
    pub rank: usize,
    pub ed_kernel: usize,
    /// Independent, annihilated, and as many as the kernel dimension.
    pub spans_kernel: bool,
}

/// Exact rank of the product and entangled states as vectors on the full
/// space. Together with exact annihilation this shows they are a basis
/// of the kernel whenever the rank equals the ED kernel dimension.
pub fn ground_state_span(length: usize) -> Result<SpanReport> {
    let dim = pow3(length) as usize;
    let spec = HamiltonianSpec::free(length)?;
    let full = Basis::full(length)?;
    let h = hamiltonian_on(&spec, &full);
    let unit = |codes: &[u64]| {
        let mut v = vec![Q::from_integer(0); dim];
        for c in codes {
            v[*c as usize] = Q::from_integer(1);
        }
        v
    };
    let mut vectors: Vec<Vec<Q>> = product_ground_states(length)?.iter().map(|w| unit(&[w.code()])).collect();
    for s in entangled_ground_states(length)? {
        let codes: Vec<u64> = s.orbit.members.iter().map(|w| w.code()).collect();
        vectors.push(unit(&codes));
    }
    let all_annihilated = vectors.par_iter().all(|v| h.apply(v).iter().all(|x| *x == Q::from_integer(0)));
    let rank = exact_rank(&vectors);
    let ed_kernel = kernel_dimension(length, Q::from_integer(0), KERNEL_TOL)?.kernel_dim;
    Ok(SpanReport {
        length,
        candidates: vectors.len(),
        all_annihilated,
        rank,
        ed_kernel,
        spans_kernel: all_annihilated && rank == vectors.len() && rank == ed_kernel,
    })
}
