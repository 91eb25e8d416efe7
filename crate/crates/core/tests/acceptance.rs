//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Details for failures follow each line.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use motzkin_core::algebra::{check_flat_algebra, check_ptl, check_s21, check_ybe, loop_weight, random_spectral_pairs};
use motzkin_core::bethe::{class_counts, eigen_residual, solve_two_particle, two_particle_state, FlavorWord};
use motzkin_core::operators::{action_table_check, hamiltonian, hamiltonian_on, number_ops};
use motzkin_core::paths::{entangled_ground_states, ground_state_span, product_ground_states};
use motzkin_core::spectra::{compare_to_xxx, dense_spectrum, kernel_dimension, sector_spectrum, KERNEL_TOL};
use motzkin_core::{Basis, HamiltonianSpec, SectorLabel, Q};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

fn outcome(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Outcome {
    Outcome { pass, summary: summary.into(), details }
}

fn zero() -> Q {
    Q::from_integer(0)
}

fn ground_state_degeneracy() -> Outcome {
    let mut details = Vec::new();
    for length in 2..=8 {
        let k = kernel_dimension(length, zero(), KERNEL_TOL).unwrap();
        let expected = (1usize << (length + 1)) - 1;
        if k.kernel_dim != expected || k.gap_ambiguity {
            details.push(format!(
                "L={length}: kernel {} vs 2^(L+1)-1 = {expected}, smallest nonzero {:.3e}, gap ambiguity {}",
                k.kernel_dim,
                k.smallest_nonzero.unwrap_or(f64::NAN),
                k.gap_ambiguity
            ));
        }
    }
    outcome(details.is_empty(), "kernel dim of H(L,0) = 2^(L+1)-1 for L=2..8", details)
}

fn ground_state_census() -> Outcome {
    let mut details = Vec::new();
    for length in 3..=6 {
        let product = product_ground_states(length).unwrap().len();
        let entangled = entangled_ground_states(length).unwrap();
        let annihilated = entangled.iter().all(|s| s.annihilated);
        let span = ground_state_span(length).unwrap();
        let want_product = (1usize << length) + 1;
        let want_entangled = (1usize << length) - 2;
        if product != want_product {
            details.push(format!("L={length}: {product} product states, expected {want_product}"));
        }
        if entangled.len() != want_entangled {
            details.push(format!("L={length}: {} entangled states, expected {want_entangled}", entangled.len()));
        }
        if !annihilated || !span.spans_kernel {
            details.push(format!(
                "L={length}: annihilated {annihilated}, rank {} of {} candidates, ED kernel {}",
                span.rank, span.candidates, span.ed_kernel
            ));
        }
    }
    outcome(details.is_empty(), "2^L+1 product and 2^L-2 entangled ground states spanning the kernel, L=3..6", details)
}

fn entangled_normalization() -> Outcome {
    let mut details = Vec::new();
    for length in 3..=8 {
        let states = entangled_ground_states(length).unwrap();
        let bad: Vec<String> = states
            .iter()
            .filter(|s| s.weight_squared != s.binomial_weight())
            .map(|s| format!("{}: {} vs {}", s.orbit.representative, s.weight_squared, s.binomial_weight()))
            .collect();
        if !bad.is_empty() {
            details.push(format!("L={length}: {} of {} classes differ, e.g. {}", bad.len(), states.len(), bad[0]));
        }
    }
    outcome(details.is_empty(), "squared weight of each entangled state = binom(L,f), L=3..8", details)
}

fn ptl() -> Outcome {
    let mut details = Vec::new();
    for length in 3..=6 {
        for r in check_ptl(length).unwrap() {
            if !r.exact_equal {
                details.push(format!("L={length} j={} {}: defect {}", r.j, r.relation, r.max_abs_defect));
            }
        }
    }
    let (delta, q) = loop_weight(4).unwrap();
    if delta != Q::from_integer(2) || (q - 1.0).abs() > 1e-12 {
        details.push(format!("loop weight {delta}, q = {q}"));
    }
    outcome(details.is_empty(), "periodic TL relations exact for all j, L=3..6; e^2 = 2e so q = 1", details)
}

fn yang_baxter() -> Outcome {
    let mut details = Vec::new();
    let pairs = random_spectral_pairs(20, 7);
    for length in 3..=4 {
        for (a, b) in &pairs {
            let r = check_ybe(*a, *b, length).unwrap();
            if !r.exact_equal {
                details.push(format!("L={length} ({a}, {b}): defect {}", r.max_abs_defect));
            }
        }
    }
    outcome(details.is_empty(), "YBE exact for 20 seeded rational pairs, L=3..4", details)
}

fn flat_algebra() -> Outcome {
    let mut details = Vec::new();
    for length in 3..=5 {
        let reports = check_flat_algebra(length).unwrap();
        let mut failing: Vec<String> = reports
            .iter()
            .filter(|r| !r.exact_equal)
            .map(|r| format!("{} ({})", r.relation, r.note.as_deref().unwrap_or("")))
            .collect();
        failing.sort();
        failing.dedup();
        if !failing.is_empty() {
            details.push(format!("L={length}: {}", failing.join("; ")));
        }
        let s21 = check_s21(length).unwrap();
        if !s21.all_match {
            details.push(format!("L={length}: S21 composition table mismatch"));
        }
    }
    outcome(details.is_empty(), "flat-move relations, nilpotency and both S21 tables exact, L=3..5", details)
}

fn bethe_one() -> Outcome {
    let mut details = Vec::new();
    for length in 3..=8 {
        let ed = sector_spectrum(length, SectorLabel::new(1, 0), zero()).unwrap();
        let mut bethe: Vec<f64> = (0..length).map(|m| 2.0 * (1.0 - (2.0 * PI * m as f64 / length as f64).cos())).collect();
        bethe.sort_by(f64::total_cmp);
        let worst = ed.iter().zip(&bethe).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if ed.len() != length || worst > 1e-10 {
            details.push(format!("L={length}: {} states, max deviation {worst:.2e}", ed.len()));
        }
    }
    outcome(details.is_empty(), "sector (1,0) spectrum = {2(1-cos 2pi m/L)}, L=3..8", details)
}

fn bethe_two() -> Outcome {
    let mut details = Vec::new();
    for length in 4..=12 {
        let sols = solve_two_particle(length).unwrap();
        let counts = class_counts(&sols);
        let want = (length, (length - 3) * (length - 2) / 2, length - 3);
        if sols.len() != length * (length - 1) / 2 || counts != want {
            details.push(format!("L={length}: {} solutions, classes {counts:?}, expected {want:?}", sols.len()));
        }
        let spec = HamiltonianSpec::free(length).unwrap();
        let mut worst: f64 = 0.0;
        for fl in FlavorWord::all(2) {
            let basis = Basis::sector(length, fl.sector()).unwrap();
            let h = hamiltonian_on(&spec, &basis);
            for sol in &sols {
                let v = two_particle_state(sol, &fl).unwrap();
                worst = worst.max(eigen_residual(&v, sol.energy, &h).unwrap());
            }
        }
        if worst >= 1e-8 {
            details.push(format!("L={length}: max eigen-residual {worst:.2e}"));
        }
        let ed = sector_spectrum(length, SectorLabel::new(2, 0), zero()).unwrap();
        let mut energies: Vec<f64> = sols.iter().map(|s| s.energy).collect();
        energies.sort_by(f64::total_cmp);
        let dev = ed.iter().zip(&energies).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if ed.len() != energies.len() || dev > 1e-8 {
            details.push(format!("L={length}: (2,0) ED multiset deviation {dev:.2e}"));
        }
        if length <= 10 {
            let mixed = sector_spectrum(length, SectorLabel::new(1, 1), zero()).unwrap();
            if let Some(e) = energies.iter().find(|e| !mixed.iter().any(|x| (*x - **e).abs() < 1e-8)) {
                details.push(format!("L={length}: energy {e} missing from the (1,1) spectrum"));
            }
        }
    }
    outcome(details.is_empty(), "two-magnon roots complete, all flavors certified, energies = sector ED, L=4..12", details)
}

fn xxx_equivalence() -> Outcome {
    let mut details = Vec::new();
    for length in 4..=7 {
        let c = compare_to_xxx(length, 1e-9).unwrap();
        if !c.distinct_equal {
            details.push(format!("L={length}: {} levels absent from XXX, {} XXX levels absent", c.fm_only.len(), c.xxx_only.len()));
        }
        for s in c.sectors.iter().filter(|s| !s.ok) {
            details.push(format!(
                "L={length} r={}: zero modes {} (expected {}), nonzero {} (expected {}), {} multiplicity mismatches",
                s.r,
                s.zero_modes,
                s.expected_zero_modes,
                s.nonzero_total,
                s.expected_nonzero_total,
                s.mismatches.len()
            ));
        }
        if c.r2_nonzero_measured != c.r2_nonzero_quoted {
            details.push(format!("L={length}: r=2 nonzero total {} vs 2L(L-1)-4 = {}", c.r2_nonzero_measured, c.r2_nonzero_quoted));
        }
    }
    outcome(details.is_empty(), "spectrum = XXX with 2^r multiplicities and zero modes, L=4..7", details)
}

fn action_table() -> Outcome {
    let report = action_table_check(6).unwrap();
    let details = report
        .equations
        .iter()
        .map(|e| {
            let wraps = e.mismatches.iter().filter(|m| m.n1 == 1 && m.n2 == 6).count();
            format!("{}: {} agree, {} differ ({} at the n1=1, n2=L wrap)", e.name, e.matches, e.mismatches.len(), wraps)
        })
        .collect();
    let summary = format!(
        "(1,1) action table audited at L=6: {} agreements, {} discrepancies listed",
        report.total_matches, report.total_mismatches
    );
    outcome(report.equations.len() == 8, summary, details)
}

fn epsilon_smoke() -> Outcome {
    let mut details = Vec::new();
    let mut kernels = Vec::new();
    for eps in [Q::new(1, 4), Q::from_integer(1), Q::from_integer(4)] {
        for length in 3..=6 {
            let r = dense_spectrum(length, eps).unwrap();
            if r.min_eigenvalue < -1e-10 {
                details.push(format!("eps={eps} L={length}: min eigenvalue {:.2e}", r.min_eigenvalue));
            }
            kernels.push(format!("{eps}/L{length}:{}", r.kernel_dim));
            let (nu, _, _) = number_ops(length).unwrap();
            let h = hamiltonian(&HamiltonianSpec::new(length, eps).unwrap()).unwrap();
            if nu.commutator(&h).is_zero() {
                details.push(format!("eps={eps} L={length}: [N_u, H] vanishes"));
            }
        }
    }
    let pass = details.is_empty();
    if pass {
        details.push(format!("kernel dims {}", kernels.join(" ")));
    }
    outcome(pass, "H(L, eps>0) PSD, kernel reported, [N_u, H] != 0, L=3..6", details)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("ground-state degeneracy", ground_state_degeneracy),
        ("ground-state census", ground_state_census),
        ("entangled normalization", entangled_normalization),
        ("PTL algebra", ptl),
        ("Yang-Baxter", yang_baxter),
        ("flat-move algebra", flat_algebra),
        ("Bethe r=1", bethe_one),
        ("Bethe r=2", bethe_two),
        ("XXX equivalence", xxx_equivalence),
        ("(1,1) action table", action_table),
        ("eps > 0 smoke", epsilon_smoke),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {name}: {} ({:.1}s)", i + 1, o.summary, start.elapsed().as_secs_f64());
        for d in &o.details {
            println!("         {d}");
        }
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
