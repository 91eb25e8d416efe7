//! One handler per subcommand. Each returns the rendered report and
//! whether its checks passed.

use std::path::PathBuf;

use motzkin_core::algebra::{check_flat_algebra, check_ptl, check_s21, check_ybe, random_spectral_pairs, RelationReport};
use motzkin_core::bethe::{eigen_residual, magnon_energy, one_particle_solutions, r_particle_state, solve_two_particle};
use motzkin_core::operators::{action_table_check, hamiltonian_on};
use motzkin_core::paths::{entangled_ground_states, gsd, orbit, product_ground_states};
use motzkin_core::spectra::{compare_to_xxx, dense_spectrum, sector_report, SECTOR_CAP};
use motzkin_core::{BetheSolution, HamiltonianSpec, Q};
use serde::Serialize;

use crate::output::{csv, json, lines, CliError, CliResult, Format, Report};
use crate::{AlgebraCommand, BetheCommand, Command, Common, PathsCommand, StateInput};

fn ensure_length(length: usize, min: usize, max: usize, what: &str) -> CliResult<()> {
    if length < min || length > max {
        return Err(CliError::Usage(format!("chain length {length} out of range {min}..={max} for {what}")));
    }
    Ok(())
}

pub fn run(command: Command) -> (CliResult<Report>, Option<PathBuf>) {
    let out = match &command {
        Command::Spectrum { common, .. }
        | Command::Gsd { common, .. }
        | Command::CompareXxx { common, .. }
        | Command::ActionTable { common, .. } => common.out.clone(),
        Command::Algebra { which } => match which {
            AlgebraCommand::Ptl { common, .. }
            | AlgebraCommand::Flat { common, .. }
            | AlgebraCommand::S21 { common, .. }
            | AlgebraCommand::Ybe { common, .. } => common.out.clone(),
        },
        Command::Bethe { which } => match which {
            BetheCommand::One { common, .. }
            | BetheCommand::Two { common, .. }
            | BetheCommand::State { common, .. }
            | BetheCommand::Residual { common, .. } => common.out.clone(),
        },
        Command::Paths { which } => match which {
            PathsCommand::Orbit { common, .. } | PathsCommand::GroundStates { common, .. } => common.out.clone(),
        },
    };
    (dispatch(command), out)
}

fn dispatch(command: Command) -> CliResult<Report> {
    match command {
        Command::Spectrum { chain, sector, tol, common } => spectrum(chain.length, chain.epsilon, sector, tol, &common),
        Command::Gsd { length, common } => ground_state_count(length, &common),
        Command::Algebra { which } => algebra(which),
        Command::Bethe { which } => bethe(which),
        Command::CompareXxx { length, tol, common } => xxx(length, tol, &common),
        Command::Paths { which } => paths(which),
        Command::ActionTable { length, common } => action_table(length, &common),
    }
}

fn spectrum(length: usize, epsilon: Q, sector: Option<motzkin_core::SectorLabel>, tol: f64, common: &Common) -> CliResult<Report> {
    ensure_length(length, 2, usize::MAX, "spectrum")?;
    HamiltonianSpec::new(length, epsilon)?;
    let report = match sector {
        Some(s) => {
            if epsilon != Q::from_integer(0) {
                return Err(motzkin_core::Error::SectorsNotConserved.into());
            }
            s.validate(length)?;
            if length > SECTOR_CAP {
                return Err(CliError::Usage(format!("chain length {length} above sector cap {SECTOR_CAP}")));
            }
            sector_report(length, s)?
        }
        None => dense_spectrum(length, epsilon)?,
    }
    .with_tol(tol);
    let passed = report.min_eigenvalue >= -tol && !report.gap_ambiguity;
    let body = match common.format {
        Format::Json => json(&report),
        Format::Csv => csv(&["sector_u", "sector_d", "eigenvalue"], report.csv_rows().into_iter().map(Vec::from)),
        Format::Text => {
            let mut out = vec![format!(
                "L={} epsilon={} kernel={} min={:.6e} gap_ambiguity={}",
                report.length, report.epsilon, report.kernel_dim, report.min_eigenvalue, report.gap_ambiguity
            )];
            for s in &report.sectors {
                let label = match (s.u, s.d) {
                    (Some(u), Some(d)) => format!("({u},{d})"),
                    _ => format!("charge {}", s.charge),
                };
                out.push(format!("{label} dim={} kernel={}", s.dim, s.kernel_dim));
            }
            out.extend(report.distinct.iter().map(|d| format!("{:.12} x{}", d.value, d.multiplicity)));
            lines(out)
        }
    };
    Ok(Report { body, passed })
}

fn ground_state_count(length: usize, common: &Common) -> CliResult<Report> {
    ensure_length(length, 2, SECTOR_CAP, "gsd")?;
    let r = gsd(length)?;
    let body = match common.format {
        Format::Json => json(&r),
        Format::Csv => csv(
            &["L", "product", "entangled", "constructed", "ed_kernel", "quoted", "matches_quoted"],
            [vec![
                r.length.to_string(),
                r.product.to_string(),
                r.entangled.to_string(),
                r.constructed.to_string(),
                r.ed_kernel.map_or(String::new(), |k| k.to_string()),
                r.quoted.to_string(),
                r.matches_quoted.to_string(),
            ]],
        ),
        Format::Text => lines([
            format!("L={}: {} = {} product + {} entangled", r.length, r.constructed, r.product, r.entangled),
            format!("entangled by flat count: {:?}", r.entangled_by_flats),
            format!("ED kernel: {}", r.ed_kernel.map_or("not computed".into(), |k| k.to_string())),
            format!("2^(L+1)-1 = {} ({})", r.quoted, if r.matches_quoted { "matches" } else { "differs" }),
        ]),
    };
    Ok(Report { body, passed: r.matches_quoted })
}

#[derive(Serialize)]
struct RelationRow<'a> {
    relation: &'a str,
    #[serde(rename = "L")]
    length: usize,
    j: usize,
    exact_equal: bool,
    defect_num: i64,
    defect_den: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

fn relations(reports: &[RelationReport], format: Format) -> Report {
    let passed = reports.iter().all(|r| r.exact_equal);
    let body = match format {
        Format::Json => {
            let rows: Vec<RelationRow> = reports
                .iter()
                .map(|r| RelationRow {
                    relation: &r.relation,
                    length: r.length,
                    j: r.j,
                    exact_equal: r.exact_equal,
                    defect_num: r.defect_num,
                    defect_den: r.defect_den,
                    note: r.note.as_deref(),
                })
                .collect();
            json(&rows)
        }
        Format::Csv => csv(
            &["relation", "L", "j", "exact_equal", "defect_num", "defect_den"],
            reports.iter().map(|r| {
                vec![
                    r.relation.clone(),
                    r.length.to_string(),
                    r.j.to_string(),
                    r.exact_equal.to_string(),
                    r.defect_num.to_string(),
                    r.defect_den.to_string(),
                ]
            }),
        ),
        Format::Text => lines(reports.iter().map(|r| {
            let tag = if r.exact_equal { "PASS" } else { "FAIL" };
            let note = r.note.as_deref().map_or(String::new(), |n| format!(" [{n}]"));
            format!("{tag} L={} j={} {}: {} vs {}, defect {}{note}", r.length, r.j, r.relation, r.lhs, r.rhs, r.max_abs_defect)
        })),
    };
    Report { body, passed }
}

fn algebra(which: AlgebraCommand) -> CliResult<Report> {
    match which {
        AlgebraCommand::Ptl { length, common } => {
            ensure_length(length, 3, 7, "algebra ptl")?;
            Ok(relations(&check_ptl(length)?, common.format))
        }
        AlgebraCommand::Flat { length, common } => {
            ensure_length(length, 3, 6, "algebra flat")?;
            Ok(relations(&check_flat_algebra(length)?, common.format))
        }
        AlgebraCommand::S21 { length, common } => {
            ensure_length(length, 3, 6, "algebra s21")?;
            let report = check_s21(length)?;
            let products: Vec<RelationReport> = report.subsets.iter().flat_map(|s| s.products.clone()).collect();
            match common.format {
                Format::Json => Ok(Report { body: json(&report), passed: report.all_match }),
                format => Ok(relations(&products, format)),
            }
        }
        AlgebraCommand::Ybe { length, lambda1, lambda2, random, seed, common } => {
            ensure_length(length, 3, 6, "algebra ybe")?;
            let pairs = match (lambda1, lambda2) {
                (Some(a), Some(b)) => vec![(a, b)],
                _ => random_spectral_pairs(random, seed),
            };
            let reports = pairs.into_iter().map(|(a, b)| check_ybe(a, b, length)).collect::<Result<Vec<_>, _>>()?;
            Ok(relations(&reports, common.format))
        }
    }
}

fn solutions(sols: &[BetheSolution], format: Format) -> Report {
    let passed = sols.iter().all(|s| s.residual < 1e-8);
    let join = |v: Vec<String>| v.join(";");
    let body = match format {
        Format::Json => json(sols),
        Format::Csv => csv(
            &["L", "r", "class", "m", "k_re", "k_im", "energy", "residual"],
            sols.iter().map(|s| {
                vec![
                    s.length.to_string(),
                    s.r.to_string(),
                    s.class.to_string(),
                    join(s.m.iter().map(|m| m.to_string()).collect()),
                    join(s.momenta.iter().map(|k| format!("{:.15e}", k.re)).collect()),
                    join(s.momenta.iter().map(|k| format!("{:.15e}", k.im)).collect()),
                    format!("{:.15e}", s.energy),
                    format!("{:.3e}", s.residual),
                ]
            }),
        ),
        Format::Text => lines(sols.iter().map(|s| {
            let k: Vec<String> = s.momenta.iter().map(|k| format!("{:.10}{:+.10}i", k.re, k.im)).collect();
            format!("{:?} {} k=[{}] E={:.12} residual={:.1e}", s.m, s.class, k.join(", "), s.energy, s.residual)
        })),
    };
    Report { body, passed }
}

#[derive(Serialize)]
struct Amplitude {
    word: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct StateJson {
    #[serde(rename = "L")]
    length: usize,
    flavors: String,
    k_re: Vec<f64>,
    k_im: Vec<f64>,
    energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<Amplitude>>,
}

fn bethe_state(input: StateInput, tol: Option<f64>, format: Format) -> CliResult<Report> {
    ensure_length(input.length, 1, 16, "bethe state")?;
    let v = r_particle_state(input.length, &input.momenta, &input.flavors)?;
    let energy = magnon_energy(&input.momenta)?;
    let residual = match tol {
        Some(_) => {
            let h = hamiltonian_on(&HamiltonianSpec::free(input.length)?, &v.basis);
            Some(eigen_residual(&v, energy, &h)?)
        }
        None => None,
    };
    let passed = match (tol, residual) {
        (Some(t), Some(r)) => r < t,
        _ => true,
    };
    let amplitudes = tol.is_none().then(|| {
        v.entries(0.0).into_iter().map(|(word, a)| Amplitude { word, re: a.re, im: a.im }).collect::<Vec<_>>()
    });
    let report = StateJson {
        length: input.length,
        flavors: input.flavors.to_string(),
        k_re: input.momenta.iter().map(|k| k.re).collect(),
        k_im: input.momenta.iter().map(|k| k.im).collect(),
        energy,
        residual,
        amplitudes,
    };
    let body = match format {
        Format::Json => json(&report),
        Format::Csv => match &report.amplitudes {
            Some(amps) => csv(&["word", "re", "im"], amps.iter().map(|a| vec![a.word.clone(), format!("{:.15e}", a.re), format!("{:.15e}", a.im)])),
            None => csv(&["L", "flavors", "energy", "residual"], [vec![
                report.length.to_string(),
                report.flavors.clone(),
                format!("{:.15e}", energy),
                format!("{:.3e}", residual.unwrap_or(f64::NAN)),
            ]]),
        },
        Format::Text => {
            let mut out = vec![format!("L={} flavors={} E={:.12}", report.length, report.flavors, energy)];
            if let Some(r) = residual {
                out.push(format!("residual {r:.3e}"));
            }
            if let Some(amps) = &report.amplitudes {
                out.extend(amps.iter().map(|a| format!("{} {:+.12} {:+.12}i", a.word, a.re, a.im)));
            }
            lines(out)
        }
    };
    Ok(Report { body, passed })
}

fn bethe(which: BetheCommand) -> CliResult<Report> {
    match which {
        BetheCommand::One { length, common } => {
            ensure_length(length, 2, 64, "bethe one")?;
            Ok(solutions(&one_particle_solutions(length)?, common.format))
        }
        BetheCommand::Two { length, common } => {
            ensure_length(length, 4, 40, "bethe two")?;
            Ok(solutions(&solve_two_particle(length)?, common.format))
        }
        BetheCommand::State { input, common } => bethe_state(input, None, common.format),
        BetheCommand::Residual { input, tol, common } => bethe_state(input, Some(tol), common.format),
    }
}

fn xxx(length: usize, tol: f64, common: &Common) -> CliResult<Report> {
    ensure_length(length, 2, usize::MAX, "compare-xxx")?;
    let c = compare_to_xxx(length, tol)?;
    let body = match common.format {
        Format::Json => json(&c),
        Format::Csv => csv(
            &["r", "zero_modes", "expected_zero_modes", "nonzero_total", "expected_nonzero_total", "mismatches", "ok"],
            c.sectors.iter().map(|s| {
                vec![
                    s.r.to_string(),
                    s.zero_modes.to_string(),
                    s.expected_zero_modes.to_string(),
                    s.nonzero_total.to_string(),
                    s.expected_nonzero_total.to_string(),
                    s.mismatches.len().to_string(),
                    s.ok.to_string(),
                ]
            }),
        ),
        Format::Text => {
            let mut out = vec![format!(
                "L={} distinct sets equal: {} ({} levels only in this chain, {} only in XXX)",
                c.length,
                c.distinct_equal,
                c.fm_only.len(),
                c.xxx_only.len()
            )];
            out.extend(c.sectors.iter().map(|s| {
                format!(
                    "r={}: zero modes {}/{}, nonzero {}/{}, {} mismatched levels",
                    s.r,
                    s.zero_modes,
                    s.expected_zero_modes,
                    s.nonzero_total,
                    s.expected_nonzero_total,
                    s.mismatches.len()
                )
            }));
            out.push(format!("r=2 nonzero total {} vs 2L(L-1)-4 = {}", c.r2_nonzero_measured, c.r2_nonzero_quoted));
            lines(out)
        }
    };
    Ok(Report { body, passed: c.all_match })
}

#[derive(Serialize)]
struct OrbitJson {
    representative: String,
    sector: String,
    size: usize,
    members: Vec<String>,
}

#[derive(Serialize)]
struct EntangledJson {
    flats: usize,
    representative: String,
    weight_squared: u64,
    annihilated: bool,
    amplitudes: std::collections::BTreeMap<u64, String>,
}

#[derive(Serialize)]
struct GroundStatesJson {
    #[serde(rename = "L")]
    length: usize,
    product: Vec<std::collections::BTreeMap<u64, String>>,
    entangled: Vec<EntangledJson>,
}

fn paths(which: PathsCommand) -> CliResult<Report> {
    match which {
        PathsCommand::Orbit { config, common } => {
            let o = orbit(&config);
            let members: Vec<String> = o.members.iter().map(|w| w.to_string()).collect();
            let body = match common.format {
                Format::Json => json(&OrbitJson {
                    representative: o.representative.to_string(),
                    sector: format!("{},{}", o.sector().u, o.sector().d),
                    size: o.size(),
                    members,
                }),
                Format::Csv => csv(&["word"], members.into_iter().map(|m| vec![m])),
                Format::Text => lines(members),
            };
            Ok(Report { body, passed: true })
        }
        PathsCommand::GroundStates { length, common } => {
            ensure_length(length, 2, SECTOR_CAP, "paths ground-states")?;
            let product = product_ground_states(length)?;
            let entangled = entangled_ground_states(length)?;
            let passed = entangled.iter().all(|s| s.annihilated);
            let body = match common.format {
                Format::Json => json(&GroundStatesJson {
                    length,
                    product: product.iter().map(|w| [(w.code(), "1/1".to_string())].into()).collect(),
                    entangled: entangled
                        .iter()
                        .map(|s| EntangledJson {
                            flats: s.flats,
                            representative: s.orbit.representative.to_string(),
                            weight_squared: s.weight_squared,
                            annihilated: s.annihilated,
                            amplitudes: s.exact_json(),
                        })
                        .collect(),
                }),
                Format::Csv => csv(
                    &["kind", "flats", "representative", "size"],
                    product
                        .iter()
                        .map(|w| vec!["product".into(), "".into(), w.to_string(), "1".into()])
                        .chain(entangled.iter().map(|s| {
                            vec!["entangled".into(), s.flats.to_string(), s.orbit.representative.to_string(), s.weight_squared.to_string()]
                        })),
                ),
                Format::Text => lines(
                    product
                        .iter()
                        .map(|w| format!("product {w}"))
                        .chain(entangled.iter().map(|s| format!("entangled f={} {} size={}", s.flats, s.orbit.representative, s.weight_squared))),
                ),
            };
            Ok(Report { body, passed })
        }
    }
}

fn action_table(length: usize, common: &Common) -> CliResult<Report> {
    ensure_length(length, 4, 10, "action-table")?;
    let r = action_table_check(length)?;
    let body = match common.format {
        Format::Json => json(&r),
        Format::Csv => csv(
            &["equation", "n1", "n2", "ordering", "case", "expected", "actual"],
            r.equations.iter().flat_map(|e| {
                e.mismatches.iter().map(move |m| {
                    vec![e.name.clone(), m.n1.to_string(), m.n2.to_string(), m.ordering.clone(), m.case.clone(), m.expected.clone(), m.actual.clone()]
                })
            }),
        ),
        Format::Text => {
            let mut out = vec![format!("L={}: {} agreements, {} discrepancies", r.length, r.total_matches, r.total_mismatches)];
            for e in &r.equations {
                out.push(format!("{} ({}): {} agree, {} differ", e.name, e.operator, e.matches, e.mismatches.len()));
                out.extend(e.mismatches.iter().map(|m| {
                    format!("  n1={} n2={} {} {}: expected {}, actual {}", m.n1, m.n2, m.ordering, m.case, m.expected, m.actual)
                }));
            }
            lines(out)
        }
    };
    // discrepancies are findings, not failures
    Ok(Report { body, passed: true })
}
