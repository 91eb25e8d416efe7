//! Exact diagonalization by conserved blocks, the spin-½ XXX oracle and
//! spectrum comparisons.
//!
//! At ε = 0 the blocks are the `(u, d)` sectors. At ε > 0 the flat move
//! `ff ↔ ud` mixes them and only the charge `u − d` survives.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{enumerate_sector, translate, Basis, ConfigWord, SectorLabel};
use crate::error::{Error, Result};
use crate::exact::{ExactOperator, Q};
use crate::operators::{hamiltonian_on, HamiltonianSpec};

/// Largest chain diagonalized as a whole.
pub const DENSE_CAP: usize = 8;
/// Largest chain handled one sector block at a time.
pub const SECTOR_CAP: usize = 10;
pub const KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSpectrum {
    /// `None` at ε > 0, where only the charge is conserved.
    pub u: Option<usize>,
    pub d: Option<usize>,
    pub charge: i64,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distinct {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    #[serde(rename = "L")]
    pub length: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub epsilon: Q,
    pub sectors: Vec<SectorSpectrum>,
    pub distinct: Vec<Distinct>,
    pub kernel_dim: usize,
    pub min_eigenvalue: f64,
    pub smallest_nonzero: Option<f64>,
    pub gap_ambiguity: bool,
}

impl SpectrumReport {
    pub fn all_eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.sectors.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Recounts kernels and the gap flag at another zero tolerance.
    pub fn with_tol(self, tol: f64) -> Self {
        let mut sectors = self.sectors;
        for s in &mut sectors {
            s.kernel_dim = s.eigenvalues.iter().filter(|e| **e < tol).count();
        }
        summarize(self.length, self.epsilon, sectors, tol)
    }

    /// `(sector_u, sector_d, eigenvalue)` records; ε > 0 blocks leave the
    /// sector columns empty.
    pub fn csv_rows(&self) -> Vec<[String; 3]> {
        let cell = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
        self.sectors
            .iter()
            .flat_map(|s| s.eigenvalues.iter().map(move |e| [cell(s.u), cell(s.d), format!("{e:.15e}")]))
            .collect()
    }
}

pub fn eigenvalues_of(op: &ExactOperator) -> Vec<f64> {
    if op.dim() == 0 {
        return vec![];
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Merges sorted values whose neighbours differ by less than
/// `1e-9 · max(1, |λ|)`; each cluster is reported by its mean.
pub fn cluster(sorted: &[f64]) -> Vec<Distinct> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &v in sorted {
        match out.last_mut() {
            Some((sum, n)) if (v - last).abs() < 1e-9 * v.abs().max(1.0) => {
                *sum += v;
                *n += 1;
            }
            _ => out.push((v, 1)),
        }
        last = v;
    }
    out.into_iter().map(|(sum, n)| Distinct { value: sum / n as f64, multiplicity: n }).collect()
}

fn charge_basis(length: usize, charge: i64) -> Result<Basis> {
    let mut words: Vec<ConfigWord> = Vec::new();
    for sector in SectorLabel::all(length) {
        if sector.u as i64 - sector.d as i64 == charge {
            words.extend(enumerate_sector(length, sector)?);
        }
    }
    words.sort_by_key(|w| w.code());
    Ok(Basis::from_words(length, &words))
}

fn summarize(length: usize, epsilon: Q, sectors: Vec<SectorSpectrum>, tol: f64) -> SpectrumReport {
    let mut all: Vec<f64> = sectors.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    let kernel_dim = all.iter().filter(|e| **e < tol).count();
    let smallest_nonzero = all.iter().copied().find(|e| *e >= tol);
    SpectrumReport {
        length,
        epsilon,
        distinct: cluster(&all),
        kernel_dim,
        min_eigenvalue: all.first().copied().unwrap_or(0.0),
        smallest_nonzero,
        gap_ambiguity: smallest_nonzero.is_some_and(|e| e < 100.0 * tol),
        sectors,
    }
}

fn block_spectra(spec: &HamiltonianSpec, cap: usize, tol: f64) -> Result<Vec<SectorSpectrum>> {
    let length = spec.length;
    if length > cap {
        return Err(Error::AboveDenseCap(length));
    }
    let jobs: Vec<(Option<SectorLabel>, i64)> = if spec.is_free() {
        SectorLabel::all(length).into_iter().map(|s| (Some(s), s.u as i64 - s.d as i64)).collect()
    } else {
        (-(length as i64)..=length as i64).map(|q| (None, q)).collect()
    };
    jobs.into_par_iter()
        .map(|(sector, charge)| {
            let basis = match sector {
                Some(s) => Basis::sector(length, s)?,
                None => charge_basis(length, charge)?,
            };
            let eigenvalues = eigenvalues_of(&hamiltonian_on(spec, &basis));
            Ok(SectorSpectrum {
                u: sector.map(|s| s.u),
                d: sector.map(|s| s.d),
                charge,
                dim: basis.dim(),
                kernel_dim: eigenvalues.iter().filter(|e| **e < tol).count(),
                eigenvalues,
            })
        })
        .collect()
}

/// Full spectrum of `H(L, ε)`, assembled from conserved blocks, for
/// `L ≤ DENSE_CAP`.
pub fn dense_spectrum(length: usize, epsilon: Q) -> Result<SpectrumReport> {
    let spec = HamiltonianSpec::new(length, epsilon)?;
    Ok(summarize(length, epsilon, block_spectra(&spec, DENSE_CAP, KERNEL_TOL)?, KERNEL_TOL))
}

/// Spectrum of one `(u, d)` block; needs ε = 0.
pub fn sector_spectrum(length: usize, sector: SectorLabel, epsilon: Q) -> Result<Vec<f64>> {
    let spec = HamiltonianSpec::new(length, epsilon)?;
    if !spec.is_free() {
        return Err(Error::SectorsNotConserved);
    }
    Ok(eigenvalues_of(&hamiltonian_on(&spec, &Basis::sector(length, sector)?)))
}

/// Report for a single `(u, d)` block, for chains above `DENSE_CAP`.
pub fn sector_report(length: usize, sector: SectorLabel) -> Result<SpectrumReport> {
    if length > SECTOR_CAP {
        return Err(Error::AboveDenseCap(length));
    }
    let eigenvalues = sector_spectrum(length, sector, Q::from_integer(0))?;
    let block = SectorSpectrum {
        u: Some(sector.u),
        d: Some(sector.d),
        charge: sector.u as i64 - sector.d as i64,
        dim: eigenvalues.len(),
        kernel_dim: eigenvalues.iter().filter(|e| **e < KERNEL_TOL).count(),
        eigenvalues,
    };
    Ok(summarize(length, Q::from_integer(0), vec![block], KERNEL_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    #[serde(rename = "L")]
    pub length: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub epsilon: Q,
    pub tol: f64,
    pub kernel_dim: usize,
    /// Zero modes per particle number `r = u + d` (ε = 0 only).
    pub per_r: Option<Vec<usize>>,
    pub smallest_nonzero: Option<f64>,
    pub gap_ambiguity: bool,
}

/// Counts eigenvalues below `tol`. Block-wise, so ε = 0 reaches
/// `SECTOR_CAP`; ε > 0 stays within `DENSE_CAP`.
pub fn kernel_dimension(length: usize, epsilon: Q, tol: f64) -> Result<KernelReport> {
    let spec = HamiltonianSpec::new(length, epsilon)?;
    let cap = if spec.is_free() { SECTOR_CAP } else { DENSE_CAP };
    let sectors = block_spectra(&spec, cap, tol)?;
    let per_r = spec.is_free().then(|| {
        let mut counts = vec![0; length + 1];
        for s in &sectors {
            counts[s.u.unwrap() + s.d.unwrap()] += s.kernel_dim;
        }
        counts
    });
    let report = summarize(length, epsilon, sectors, tol);
    Ok(KernelReport {
        length,
        epsilon,
        tol,
        kernel_dim: report.kernel_dim,
        per_r,
        smallest_nonzero: report.smallest_nonzero,
        gap_ambiguity: report.gap_ambiguity,
    })
}

/// `Σ_j (1 − P_{j,j+1})` on the `magnons`-flip block of a periodic
/// spin-½ ring, built from bit strings independently of the step basis.
pub fn xxx_reference_spectrum(length: usize, magnons: usize) -> Result<Vec<f64>> {
    if length < 2 || length > 30 {
        return Err(Error::LengthTooSmall { length, min: 2, what: "the XXX reference" });
    }
    if magnons > length {
        return Err(Error::InvalidSector { length, u: magnons, d: 0 });
    }
    let states: Vec<u32> = (0u32..1 << length).filter(|s| s.count_ones() as usize == magnons).collect();
    let index: BTreeMap<u32, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let n = states.len();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (col, &s) in states.iter().enumerate() {
        for j in 0..length {
            let (a, b) = (j, (j + 1) % length);
            if (s >> a & 1) != (s >> b & 1) {
                h[(col, col)] += 1.0;
                let t = s ^ (1 << a) ^ (1 << b);
                h[(index[&t], col)] -= 1.0;
            }
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityMismatch {
    pub value: f64,
    pub fm: usize,
    pub xxx: usize,
    pub expected_fm: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorComparison {
    pub r: usize,
    pub zero_modes: usize,
    pub expected_zero_modes: usize,
    pub nonzero_total: usize,
    pub expected_nonzero_total: usize,
    pub mismatches: Vec<MultiplicityMismatch>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    #[serde(rename = "L")]
    pub length: usize,
    pub tol: f64,
    pub distinct_equal: bool,
    pub fm_only: Vec<f64>,
    pub xxx_only: Vec<f64>,
    pub sectors: Vec<SectorComparison>,
    /// The quoted `2L(L−1) − 4` against the measured r = 2 nonzero count.
    pub r2_nonzero_quoted: usize,
    pub r2_nonzero_measured: usize,
    pub all_match: bool,
}

fn unmatched(a: &[Distinct], b: &[Distinct], tol: f64) -> Vec<f64> {
    a.iter().filter(|x| !b.iter().any(|y| (x.value - y.value).abs() < tol)).map(|x| x.value).collect()
}

/// Checks the free chain against `2^r` copies of the XXX chain: equal
/// distinct eigenvalues, per-value multiplicity ratio `2^r` in each
/// particle-number block, and `2^r` zero modes for `1 ≤ r ≤ L − 1`.
pub fn compare_to_xxx(length: usize, tol: f64) -> Result<ComparisonReport> {
    let report = dense_spectrum(length, Q::from_integer(0))?;
    let mut by_r: Vec<Vec<f64>> = vec![Vec::new(); length + 1];
    for s in &report.sectors {
        by_r[s.u.unwrap() + s.d.unwrap()].extend(&s.eigenvalues);
    }
    let xxx: Vec<Vec<f64>> = (0..=length).map(|r| xxx_reference_spectrum(length, r)).collect::<Result<_>>()?;

    let mut xxx_all: Vec<f64> = xxx.iter().flatten().copied().collect();
    xxx_all.sort_by(f64::total_cmp);
    let fm_distinct = &report.distinct;
    let xxx_distinct = cluster(&xxx_all);
    let fm_only = unmatched(fm_distinct, &xxx_distinct, tol);
    let xxx_only = unmatched(&xxx_distinct, fm_distinct, tol);

    let mut sectors = Vec::new();
    for r in 0..=length {
        let fm = &mut by_r[r];
        fm.sort_by(f64::total_cmp);
        let flavors = 1usize << r;
        let zero_modes = fm.iter().filter(|e| **e < KERNEL_TOL).count();
        let expected_zero_modes = if r == 0 { 1 } else { flavors };
        let fm_nz = cluster(&fm.iter().copied().filter(|e| *e >= KERNEL_TOL).collect::<Vec<_>>());
        let xxx_nz = cluster(&xxx[r].iter().copied().filter(|e| *e >= KERNEL_TOL).collect::<Vec<_>>());
        let mut mismatches = Vec::new();
        for x in &xxx_nz {
            let found = fm_nz.iter().find(|y| (x.value - y.value).abs() < tol).map_or(0, |y| y.multiplicity);
            if found != flavors * x.multiplicity {
                mismatches.push(MultiplicityMismatch { value: x.value, fm: found, xxx: x.multiplicity, expected_fm: flavors * x.multiplicity });
            }
        }
        for y in &fm_nz {
            if !xxx_nz.iter().any(|x| (x.value - y.value).abs() < tol) {
                mismatches.push(MultiplicityMismatch { value: y.value, fm: y.multiplicity, xxx: 0, expected_fm: 0 });
            }
        }
        let nonzero_total = fm_nz.iter().map(|d| d.multiplicity).sum();
        let expected_nonzero_total = flavors * xxx_nz.iter().map(|d| d.multiplicity).sum::<usize>();
        sectors.push(SectorComparison {
            r,
            zero_modes,
            expected_zero_modes,
            nonzero_total,
            expected_nonzero_total,
            ok: mismatches.is_empty() && zero_modes == expected_zero_modes,
            mismatches,
        });
    }
    let distinct_equal = fm_only.is_empty() && xxx_only.is_empty();
    let r2_nonzero_quoted = 2 * length * (length - 1) - 4;
    let r2_nonzero_measured = sectors[2].nonzero_total;
    let all_match = distinct_equal && sectors.iter().all(|s| s.ok) && r2_nonzero_quoted == r2_nonzero_measured;
    Ok(ComparisonReport {
        length,
        tol,
        distinct_equal,
        fm_only,
        xxx_only,
        sectors,
        r2_nonzero_quoted,
        r2_nonzero_measured,
        all_match,
    })
}

/// Block `m` holds the states with `T|ψ⟩ = e^{−iK}|ψ⟩`, `K = 2πm/L`,
/// where `T` moves every step one link forward. A plane wave `e^{ikn}`
/// therefore sits in the block of its momentum `k`.
pub fn momentum_resolve(length: usize, sector: SectorLabel) -> Result<BTreeMap<usize, Vec<f64>>> {
    let basis = Basis::sector(length, sector)?;
    let h = hamiltonian_on(&HamiltonianSpec::free(length)?, &basis);
    let mut seen = vec![false; basis.dim()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..basis.dim() {
        if seen[i] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut w = basis.word(i);
        loop {
            let idx = basis.index_of(w.code()).expect("sectors are translation invariant");
            if seen[idx] {
                break;
            }
            seen[idx] = true;
            orbit.push(idx);
            w = translate(&w, 1);
        }
        orbits.push(orbit);
    }
    (0..length)
        .into_par_iter()
        .map(|m| {
            let k = 2.0 * PI * m as f64 / length as f64;
            // |rep, K⟩ = Σ_s e^{iKs} T^s |rep⟩, kept when the period allows K
            let states: Vec<Vec<(usize, Complex64)>> = orbits
                .iter()
                .filter(|o| (m * o.len()) % length == 0)
                .map(|o| {
                    let norm = (o.len() as f64).sqrt();
                    o.iter().enumerate().map(|(s, &idx)| (idx, Complex64::from_polar(1.0, k * s as f64) / norm)).collect()
                })
                .collect();
            let n = states.len();
            let mut block = DMatrix::<Complex64>::zeros(n, n);
            let mut position = vec![None; basis.dim()];
            for (a, st) in states.iter().enumerate() {
                for (idx, c) in st {
                    position[*idx] = Some((a, *c));
                }
            }
            for (b, st) in states.iter().enumerate() {
                for (idx, c) in st {
                    for (row, v) in h.row(*idx).iter().map(|(col, v)| (*col, crate::exact::q_to_f64(v))) {
                        // H is symmetric, so row idx lists ⟨row|H|idx⟩
                        if let Some((a, ca)) = position[row] {
                            block[(a, b)] += ca.conj() * c * v;
                        }
                    }
                }
            }
            let mut ev: Vec<f64> = if n == 0 {
                vec![]
            } else {
                SymmetricEigen::new(block).eigenvalues.iter().copied().collect()
            };
            ev.sort_by(f64::total_cmp);
            (m, ev)
        })
        .map(Ok)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn dense_examples() {
        let r = dense_spectrum(2, q(0, 1)).unwrap();
        assert_eq!(r.all_eigenvalues().len(), 9);
        assert!(r.min_eigenvalue > -1e-12);
        assert_eq!(r.sectors.iter().map(|s| s.dim).sum::<usize>(), 9);
        assert_eq!(dense_spectrum(9, q(0, 1)), Err(Error::AboveDenseCap(9)));
        let msg = Error::AboveDenseCap(9).to_string();
        assert!(msg.contains("above dense cap; use --sector"));
    }

    #[test]
    fn periodic_kernel_counts() {
        // one state per cyclic class of flavor words, plus vacuum and flat-free words
        let expected = [(2, 7), (3, 14), (4, 26), (5, 48), (6, 88)];
        for (length, k) in expected {
            let r = dense_spectrum(length, q(0, 1)).unwrap();
            assert_eq!(r.kernel_dim, k, "L = {length}");
            assert!(!r.gap_ambiguity);
        }
        let k = kernel_dimension(4, q(0, 1), KERNEL_TOL).unwrap();
        assert_eq!(k.per_r.unwrap(), vec![1, 2, 3, 4, 16]);
    }

    #[test]
    fn sector_examples() {
        assert_eq!(sector_spectrum(5, SectorLabel::new(0, 0), q(0, 1)).unwrap(), vec![0.0]);
        let one = sector_spectrum(5, SectorLabel::new(1, 0), q(0, 1)).unwrap();
        let mut expect: Vec<f64> = (0..5).map(|m| 2.0 * (1.0 - (2.0 * PI * m as f64 / 5.0).cos())).collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in one.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-10);
        }
        for s in SectorLabel::all(5) {
            let a = sector_spectrum(5, s, q(0, 1)).unwrap();
            let b = sector_spectrum(5, s.swapped(), q(0, 1)).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
        }
        assert_eq!(sector_spectrum(5, SectorLabel::new(1, 0), q(1, 1)), Err(Error::SectorsNotConserved));
    }

    #[test]
    fn positive_epsilon_blocks() {
        for eps in [q(1, 4), q(1, 1), q(4, 1)] {
            let r = dense_spectrum(4, eps).unwrap();
            assert_eq!(r.sectors.iter().map(|s| s.dim).sum::<usize>(), 81);
            assert!(r.min_eigenvalue > -1e-10);
            let full = eigenvalues_of(&crate::operators::hamiltonian(&HamiltonianSpec::new(4, eps).unwrap()).unwrap());
            for (a, b) in r.all_eigenvalues().iter().zip(&full) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn xxx_oracle() {
        assert_eq!(xxx_reference_spectrum(6, 0).unwrap(), vec![0.0]);
        let one = xxx_reference_spectrum(6, 1).unwrap();
        let mut expect: Vec<f64> = (0..6).map(|m| 2.0 * (1.0 - (2.0 * PI * m as f64 / 6.0).cos())).collect();
        expect.sort_by(f64::total_cmp);
        assert!(one.iter().zip(&expect).all(|(a, b)| (a - b).abs() < 1e-10));
        let two = xxx_reference_spectrum(6, 2).unwrap();
        let mut bethe: Vec<f64> = crate::bethe::solve_two_particle(6).unwrap().iter().map(|s| s.energy).collect();
        bethe.sort_by(f64::total_cmp);
        assert_eq!(two.len(), 15);
        assert!(two.iter().zip(&bethe).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn xxx_comparison_findings() {
        let c = compare_to_xxx(4, 1e-9).unwrap();
        // r ≤ 1 blocks are exact copies
        assert!(c.sectors[0].ok && c.sectors[1].ok);
        assert_eq!(c.sectors[1].nonzero_total, 6);
        // the mixed-flavor block is a twisted chain, so new levels appear at r = 2
        assert!(!c.sectors[2].ok);
        assert_eq!(c.sectors[2].zero_modes, 3);
        assert!(!c.distinct_equal);
        assert!(!c.all_match);
    }

    #[test]
    fn momentum_blocks() {
        let blocks = momentum_resolve(5, SectorLabel::new(1, 0)).unwrap();
        let e1 = 2.0 * (1.0 - (2.0 * PI / 5.0).cos());
        assert_eq!(blocks[&1].len(), 1);
        assert!((blocks[&1][0] - e1).abs() < 1e-12);
        assert_eq!(momentum_resolve(5, SectorLabel::new(0, 0)).unwrap()[&0], vec![0.0]);
        for (length, s) in [(6, SectorLabel::new(1, 1)), (6, SectorLabel::new(2, 2))] {
            let blocks = momentum_resolve(length, s).unwrap();
            let total: usize = blocks.values().map(Vec::len).sum();
            assert_eq!(total, s.dimension(length));
            let mut merged: Vec<f64> = blocks.values().flatten().copied().collect();
            merged.sort_by(f64::total_cmp);
            let direct = sector_spectrum(length, s, q(0, 1)).unwrap();
            assert!(merged.iter().zip(&direct).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn bethe_total_momentum_lands_in_block() {
        let length = 6;
        let blocks = momentum_resolve(length, SectorLabel::new(2, 0)).unwrap();
        for sol in crate::bethe::solve_two_particle(length).unwrap() {
            let m = (sol.m[0] + sol.m[1]) % length;
            assert!(blocks[&m].iter().any(|e| (e - sol.energy).abs() < 1e-8), "{:?}", sol.m);
        }
    }

    #[test]
    fn clustering() {
        let d = cluster(&[0.0, 1e-12, 1.0, 1.0 + 1e-11, 2.0]);
        assert_eq!(d.iter().map(|x| x.multiplicity).collect::<Vec<_>>(), vec![2, 2, 1]);
    }
}
