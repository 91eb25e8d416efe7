//! Coordinate Bethe ansatz for the free chain.
//!
//! Particles are the non-flat steps. They hop past flats and never pass
//! each other, so the cyclic order of flavors is conserved. A Bethe
//! amplitude `f(n₁..n_r)` is placed on every word whose flavor sequence
//! (read in position order) is a rotation of the chosen flavor word.
//! This cyclic lift is what makes the amplitude periodic.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{Basis, SectorLabel, Step};
use crate::error::{Error, Result};
use crate::exact::ExactOperator;
use crate::operators::{hamiltonian_on, HamiltonianSpec};
use crate::report::ser_sig15_vec;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionClass {
    /// One particle at zero momentum.
    VacuumDescendant,
    RealScattering,
    Bound,
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionClass::VacuumDescendant => "vacuum-descendant",
            SolutionClass::RealScattering => "real-scattering",
            SolutionClass::Bound => "bound",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetheSolution {
    pub length: usize,
    pub r: usize,
    pub class: SolutionClass,
    pub m: Vec<usize>,
    pub momenta: Vec<Complex64>,
    /// `θ_{jl}`, absent when a pair is singular or a momentum is infinite.
    pub theta: Option<Vec<Vec<Complex64>>>,
    /// Bound states: `x = e^{-v}` in `[0, 1)`.
    pub bound_x: Option<f64>,
    pub energy: f64,
    /// ‖Hv − Ev‖ of the constructed `uu…` state.
    pub residual: f64,
    /// Residual of the root equations.
    pub root_residual: f64,
}

impl BetheSolution {
    fn momentum_parts(&self) -> (Vec<f64>, Vec<f64>) {
        self.momenta.iter().map(|k| (k.re, k.im)).unzip()
    }

    pub fn total_momentum(&self) -> f64 {
        (2.0 * PI * self.m.iter().sum::<usize>() as f64 / self.length as f64).rem_euclid(2.0 * PI)
    }
}

/// JSON form: `{L, r, class, m, k_re, k_im, energy, residual}`.
#[derive(Serialize)]
struct SolutionJson<'a> {
    #[serde(rename = "L")]
    length: usize,
    r: usize,
    class: SolutionClass,
    m: &'a [usize],
    #[serde(serialize_with = "ser_sig15_vec")]
    k_re: Vec<f64>,
    #[serde(serialize_with = "ser_sig15_vec")]
    k_im: Vec<f64>,
    energy: f64,
    residual: f64,
}

impl Serialize for BetheSolution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (k_re, k_im) = self.momentum_parts();
        SolutionJson {
            length: self.length,
            r: self.r,
            class: self.class,
            m: &self.m,
            k_re,
            k_im,
            energy: crate::report::sig15(self.energy),
            residual: self.residual,
        }
        .serialize(serializer)
    }
}

/// Flavors of the particles in position order, over `{u, d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlavorWord(Vec<Step>);

impl FlavorWord {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        if let Some(s) = steps.iter().find(|s| **s == Step::F) {
            return Err(Error::InvalidStep(s.symbol()));
        }
        Ok(FlavorWord(steps))
    }

    pub fn uniform(step: Step, r: usize) -> Result<Self> {
        Self::new(vec![step; r])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn sector(&self) -> SectorLabel {
        let u = self.0.iter().filter(|s| **s == Step::U).count();
        SectorLabel::new(u, self.0.len() - u)
    }

    pub fn rotations(&self) -> BTreeSet<Vec<Step>> {
        let n = self.0.len();
        (0..n.max(1)).map(|s| (0..n).map(|i| self.0[(i + s) % n]).collect()).collect()
    }

    /// All `2^r` words of length `r`.
    pub fn all(r: usize) -> Vec<FlavorWord> {
        (0..1usize << r)
            .map(|bits| FlavorWord((0..r).map(|i| if bits >> (r - 1 - i) & 1 == 0 { Step::U } else { Step::D }).collect()))
            .collect()
    }
}

impl fmt::Display for FlavorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl FromStr for FlavorWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.chars().map(Step::from_symbol).collect::<Result<_>>()?)
    }
}

/// Complex amplitudes on a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub basis: Basis,
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// `⟨self|other⟩` on the same basis.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.basis.codes(), other.basis.codes());
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Nonzero amplitudes keyed by word text.
    pub fn entries(&self, cutoff: f64) -> Vec<(String, Complex64)> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > cutoff)
            .map(|(i, a)| (self.basis.word(i).to_string(), *a))
            .collect()
    }
}

/// `E = 2[r − Σ cos k_j]`.
pub fn magnon_energy(momenta: &[Complex64]) -> Result<f64> {
    if momenta.is_empty() {
        return Err(Error::EmptyMomenta);
    }
    let e: Complex64 = momenta.iter().map(|k| 2.0 * (1.0 - k.cos())).sum();
    if e.im.abs() > 1e-12 * e.re.abs().max(1.0) {
        return Err(Error::NonPhysicalRoots(e.im));
    }
    Ok(e.re)
}

pub fn one_particle_solutions(length: usize) -> Result<Vec<BetheSolution>> {
    if length < 2 {
        return Err(Error::LengthTooSmall { length, min: 2, what: "Bethe solutions" });
    }
    let basis = Basis::sector(length, SectorLabel::new(1, 0))?;
    let h = hamiltonian_on(&HamiltonianSpec::free(length)?, &basis);
    let u = FlavorWord::uniform(Step::U, 1)?;
    (0..length)
        .map(|m| {
            let k = Complex64::new(2.0 * PI * m as f64 / length as f64, 0.0);
            let energy = magnon_energy(&[k])?;
            let state = if m == 0 { lift(&basis, &u, |_| Complex64::new(1.0, 0.0))? } else { r_particle_state(length, &[k], &u)? };
            Ok(BetheSolution {
                length,
                r: 1,
                class: if m == 0 { SolutionClass::VacuumDescendant } else { SolutionClass::RealScattering },
                m: vec![m],
                momenta: vec![k],
                theta: Some(vec![vec![Complex64::new(0.0, 0.0)]]),
                bound_x: None,
                energy,
                residual: eigen_residual(&state, energy, &h)?,
                root_residual: 0.0,
            })
        })
        .collect()
}

/// Principal branch of
/// `e^{iθ} = −e^{i(k₁−k₂)} (e^{−ik₁} + e^{ik₂} − 2)/(e^{ik₁} + e^{−ik₂} − 2)`.
pub fn scattering_phase(k1: Complex64, k2: Complex64) -> Result<Complex64> {
    let den = (I * k1).exp() + (-I * k2).exp() - 2.0;
    if den.norm() < 1e-14 {
        return Err(Error::PhaseSingularity { k1: k1.to_string(), k2: k2.to_string() });
    }
    let num = (-I * k1).exp() + (I * k2).exp() - 2.0;
    let ratio = -(I * (k1 - k2)).exp() * num / den;
    let mut theta = -I * ratio.ln();
    // ln puts the cut at −π; move it so the real part lies in (−π, π]
    if theta.re <= -PI {
        theta.re += 2.0 * PI;
    }
    Ok(theta)
}

fn real_scattering(length: usize, m1: usize, m2: usize) -> Result<(f64, f64, f64, f64)> {
    let l = length as f64;
    let (q1, q2) = (2.0 * PI * m1 as f64, 2.0 * PI * m2 as f64);
    let (mut k1, mut k2) = (q1 / l, q2 / l);
    for _ in 0..10_000 {
        let th = scattering_phase(k1.into(), k2.into())?.re;
        let (n1, n2) = ((q1 + th) / l, (q2 - th) / l);
        let step = (n1 - k1).abs() + (n2 - k2).abs();
        k1 = 0.5 * (k1 + n1);
        k2 = 0.5 * (k2 + n2);
        if step < 1e-14 {
            break;
        }
    }
    let th = scattering_phase(k1.into(), k2.into())?.re;
    let residual = (l * k1 - q1 - th).abs() + (l * k2 - q2 + th).abs();
    if residual > 1e-12 {
        return Err(Error::NoConvergence { m1, m2 });
    }
    Ok((k1, k2, th, residual))
}

/// Roots `x ∈ (0, 1)` of `c(1 ± x^L) − x ∓ x^{L−1}`: grid scan, then bisection.
fn bound_roots(length: usize, c: f64, sign: f64) -> Vec<(f64, f64)> {
    let n = length as i32;
    let g = |x: f64| c * (1.0 + sign * x.powi(n)) - x - sign * x.powi(n - 1);
    const GRID: usize = 200_000;
    let (lo, hi) = (1e-9, 1.0 - 1e-9);
    let xs: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let mut roots = Vec::new();
    for w in xs.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut ga, gb) = (g(a), g(b));
        if ga * gb >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let gm = g(mid);
            if gm == 0.0 || b - a < 1e-17 {
                a = mid;
                b = mid;
                break;
            }
            if ga * gm < 0.0 {
                b = mid;
            } else {
                a = mid;
                ga = gm;
            }
        }
        let x = 0.5 * (a + b);
        roots.push((x, g(x).abs()));
    }
    roots
}

/// Complete two-magnon solution list in `(m₁, m₂)` order:
/// `L` vacuum descendants `(0, m₂)`, real scattering pairs with
/// `1 ≤ m₁`, `m₂ − m₁ ≥ 2`, and bound pairs with `m₂ ∈ {m₁, m₁ + 1}`.
pub fn solve_two_particle(length: usize) -> Result<Vec<BetheSolution>> {
    if length < 4 {
        return Err(Error::LengthTooSmall { length, min: 4, what: "the two-particle solver" });
    }
    let l = length as f64;
    let mut pairs = Vec::new();
    for m1 in 0..length {
        for m2 in m1..length {
            pairs.push((m1, m2));
        }
    }
    let found: Vec<Vec<BetheSolution>> = pairs
        .par_iter()
        .map(|&(m1, m2)| -> Result<Vec<BetheSolution>> {
            let base = |class, momenta: Vec<Complex64>, theta, bound_x, energy, root_residual| BetheSolution {
                length,
                r: 2,
                class,
                m: vec![m1, m2],
                momenta,
                theta,
                bound_x,
                energy,
                residual: f64::NAN,
                root_residual,
            };
            let zero = Complex64::new(0.0, 0.0);
            let antisym = |t: Complex64| Some(vec![vec![zero, t], vec![-t, zero]]);
            if m1 == 0 {
                let k2 = Complex64::new(2.0 * PI * m2 as f64 / l, 0.0);
                let e = magnon_energy(&[zero, k2])?;
                return Ok(vec![base(SolutionClass::VacuumDescendant, vec![zero, k2], antisym(zero), None, e, 0.0)]);
            }
            if m2 >= m1 + 2 {
                let (k1, k2, th, res) = real_scattering(length, m1, m2)?;
                let momenta = vec![k1.into(), k2.into()];
                let e = magnon_energy(&momenta)?;
                return Ok(vec![base(SolutionClass::RealScattering, momenta, antisym(th.into()), None, e, res)]);
            }
            let total = PI * (m1 + m2) as f64 / l;
            let c = total.cos();
            if c.abs() < 1e-12 {
                // c = 0 only at even L; keep the m₁ + m₂ = L/2 member
                if 2 * (m1 + m2) != length {
                    return Ok(vec![]);
                }
                let re = Complex64::new(total, f64::INFINITY);
                let momenta = vec![re, re.conj()];
                return Ok(vec![base(SolutionClass::Bound, momenta, None, Some(0.0), 2.0, 0.0)]);
            }
            let sign = if m1 == m2 { 1.0 } else { -1.0 };
            Ok(bound_roots(length, c, sign)
                .into_iter()
                .map(|(x, res)| {
                    let v = -x.ln();
                    let k = Complex64::new(total, v);
                    let momenta = vec![k, k.conj()];
                    let theta = scattering_phase(k, k.conj()).ok().map(|t| vec![vec![zero, t], vec![-t, zero]]);
                    base(SolutionClass::Bound, momenta, theta, Some(x), 4.0 - 2.0 * c * (x + 1.0 / x), res)
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut solutions: Vec<BetheSolution> = found.into_iter().flatten().collect();

    let basis = Basis::sector(length, SectorLabel::new(2, 0))?;
    let h = hamiltonian_on(&HamiltonianSpec::free(length)?, &basis);
    let uu = FlavorWord::uniform(Step::U, 2)?;
    solutions.par_iter_mut().try_for_each(|sol| -> Result<()> {
        let state = two_particle_state_on(&basis, sol, &uu)?;
        sol.residual = eigen_residual(&state, sol.energy, &h)?;
        Ok(())
    })?;
    Ok(solutions)
}

/// Class sizes `(vacuum-descendant, real-scattering, bound)`.
pub fn class_counts(solutions: &[BetheSolution]) -> (usize, usize, usize) {
    let count = |c| solutions.iter().filter(|s| s.class == c).count();
    (count(SolutionClass::VacuumDescendant), count(SolutionClass::RealScattering), count(SolutionClass::Bound))
}

/// Lays `amplitude(positions)` onto every word of the flavor word's sector
/// whose flavor sequence is a rotation of `flavors`. Positions are 1-based.
fn lift(basis: &Basis, flavors: &FlavorWord, amplitude: impl Fn(&[usize]) -> Complex64) -> Result<StateVector> {
    let rotations = flavors.rotations();
    let mut positions = Vec::with_capacity(flavors.len());
    let mut seq = Vec::with_capacity(flavors.len());
    let amplitudes = (0..basis.dim())
        .map(|i| {
            positions.clear();
            seq.clear();
            for (j, s) in basis.word(i).steps().into_iter().enumerate() {
                if s != Step::F {
                    positions.push(j + 1);
                    seq.push(s);
                }
            }
            if rotations.contains(&seq) {
                amplitude(&positions)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector { basis: basis.clone(), amplitudes }.normalized()
}

fn check_flavors(flavors: &FlavorWord, r: usize) -> Result<()> {
    if flavors.len() != r {
        return Err(Error::FlavorLength { expected: r, got: flavors.len() });
    }
    Ok(())
}

fn two_particle_state_on(basis: &Basis, sol: &BetheSolution, flavors: &FlavorWord) -> Result<StateVector> {
    check_flavors(flavors, 2)?;
    let length = sol.length;
    let (k1, k2) = (sol.momenta[0], sol.momenta[1]);
    match sol.class {
        SolutionClass::Bound => {
            let x = sol.bound_x.expect("bound solutions carry x");
            let total = 2.0 * k1.re;
            let parity = if (sol.m[0] + sol.m[1]) % 2 == 0 { 1.0 } else { -1.0 };
            lift(basis, flavors, |n| {
                let d = (n[1] - n[0]) as i32;
                let centre = (I * total * (n[0] + n[1]) as f64 / 2.0).exp();
                // divided by x so the x = 0 limit stays finite
                centre * (x.powi(d - 1) + parity * x.powi(length as i32 - d - 1))
            })
        }
        _ => {
            let theta = sol.theta.as_ref().map_or(Complex64::new(0.0, 0.0), |t| t[0][1]);
            lift(basis, flavors, |n| {
                let (n1, n2) = (n[0] as f64, n[1] as f64);
                (I * (k1 * n1 + k2 * n2 + theta / 2.0)).exp() + (I * (k2 * n1 + k1 * n2 - theta / 2.0)).exp()
            })
        }
    }
}

/// Unit-norm two-particle state on the sector of `flavors`.
pub fn two_particle_state(sol: &BetheSolution, flavors: &FlavorWord) -> Result<StateVector> {
    check_flavors(flavors, 2)?;
    let basis = Basis::sector(sol.length, flavors.sector())?;
    two_particle_state_on(&basis, sol, flavors)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// `f(n) = Σ_P exp(i Σ_j k_{P(j)} n_j + (i/2) Σ_{l<j} θ_{P(l)P(j)})` on
/// the sector of `flavors`. All-zero momenta give the equal-weight state.
pub fn r_particle_state(length: usize, momenta: &[Complex64], flavors: &FlavorWord) -> Result<StateVector> {
    if momenta.is_empty() {
        return Err(Error::EmptyMomenta);
    }
    check_flavors(flavors, momenta.len())?;
    let r = momenta.len();
    if r > length {
        return Err(Error::InvalidSector { length, u: flavors.sector().u, d: flavors.sector().d });
    }
    let basis = Basis::sector(length, flavors.sector())?;
    if momenta.iter().all(|k| k.norm() == 0.0) {
        return lift(&basis, flavors, |_| Complex64::new(1.0, 0.0));
    }
    let mut theta = vec![vec![Complex64::new(0.0, 0.0); r]; r];
    for j in 0..r {
        for l in j + 1..r {
            theta[j][l] = scattering_phase(momenta[j], momenta[l])?;
            theta[l][j] = -theta[j][l];
        }
    }
    let perms = permutations(r);
    lift(&basis, flavors, |n| {
        perms
            .iter()
            .map(|p| {
                let mut phase: Complex64 = (0..r).map(|j| momenta[p[j]] * n[j] as f64).sum();
                for j in 0..r {
                    for l in 0..j {
                        phase += theta[p[l]][p[j]] / 2.0;
                    }
                }
                (I * phase).exp()
            })
            .sum()
    })
}

/// `‖Hv − Ev‖₂` for `v` scaled to unit norm.
pub fn eigen_residual(v: &StateVector, energy: f64, h: &ExactOperator) -> Result<f64> {
    if v.amplitudes.len() != h.dim() {
        return Err(Error::DimensionMismatch(v.amplitudes.len(), h.dim()));
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let hv = h.apply_complex(&v.amplitudes);
    Ok(hv.iter().zip(&v.amplitudes).map(|(a, b)| (a - b * energy).norm_sqr()).sum::<f64>().sqrt() / norm)
}
