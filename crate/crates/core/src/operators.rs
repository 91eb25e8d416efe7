//! Local two-link terms, the periodic Hamiltonian and its symmetry
//! operators, all assembled exactly.
//!
//! The local terms follow the outer-product form `|ψ⟩⟨ψ|` with the
//! unnormalized two-link states
//!
//! * `Û_j`: `|u_j f_{j+1}⟩ − |f_j u_{j+1}⟩`
//! * `D̂_j`: `|d_j f_{j+1}⟩ − |f_j d_{j+1}⟩`
//! * `F̂_j`: `|f_j f_{j+1}⟩ − |u_j d_{j+1}⟩`
//!
//! so each squares to twice itself (`Û² = 2Û`). This scale gives
//! `ê² = 2ê`, `ê ê' ê = ê` and a magnon dispersion `2(1 − cos k)`. The
//! idempotent projectors are the halves, see [`local_projector`].
//!
//! Link `L + 1` is link 1.

use serde::Serialize;

use crate::basis::{pow3, swap_ud, translate, Basis, ConfigWord, SectorLabel, Step};
use crate::error::{Error, Result};
use crate::exact::{q, ExactOperator, Q};

/// A `3 × 3` single-link operator in the `(u, f, d)` basis.
pub type SiteOp = [[Q; 3]; 3];

/// A `9 × 9` two-link operator, index `3 * a + b` for steps `a` on link
/// `j` and `b` on link `j + 1`.
pub type BondOp = [[Q; 9]; 9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LocalTerm {
    /// Up-flat exchange `Û_j`.
    U,
    /// Down-flat exchange `D̂_j`.
    D,
    /// Flat move `F̂_j`.
    F,
    /// `ê_j = Û_j + D̂_j`.
    E,
}

impl LocalTerm {
    pub fn block(self) -> BondOp {
        match self {
            LocalTerm::U => outer(&[((Step::U, Step::F), 1), ((Step::F, Step::U), -1)]),
            LocalTerm::D => outer(&[((Step::D, Step::F), 1), ((Step::F, Step::D), -1)]),
            LocalTerm::F => outer(&[((Step::F, Step::F), 1), ((Step::U, Step::D), -1)]),
            LocalTerm::E => add_bond(&LocalTerm::U.block(), &LocalTerm::D.block()),
        }
    }
}

fn zero_bond() -> BondOp {
    [[Q::from_integer(0); 9]; 9]
}

fn outer(psi: &[((Step, Step), i64)]) -> BondOp {
    let mut m = zero_bond();
    for &((a, b), x) in psi {
        for &((c, d), y) in psi {
            let r = (a.digit() * 3 + b.digit()) as usize;
            let s = (c.digit() * 3 + d.digit()) as usize;
            m[r][s] += Q::from_integer(x * y);
        }
    }
    m
}

fn add_bond(a: &BondOp, b: &BondOp) -> BondOp {
    let mut m = *a;
    for (row, brow) in m.iter_mut().zip(b) {
        for (x, y) in row.iter_mut().zip(brow) {
            *x += *y;
        }
    }
    m
}

/// Tensor product of two site operators.
pub fn kron(a: &SiteOp, b: &SiteOp) -> BondOp {
    let mut m = zero_bond();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    m[i * 3 + k][j * 3 + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

fn check_link(link: usize, length: usize) -> Result<()> {
    if length < 2 {
        return Err(Error::LengthTooSmall { length, min: 2, what: "two-link operators" });
    }
    if link == 0 || link > length {
        return Err(Error::LinkOutOfRange { link, length });
    }
    Ok(())
}

fn digit_at(code: u64, length: usize, link: usize) -> u64 {
    (code / pow3(length - link)) % 3
}

fn set_digit(code: u64, length: usize, link: usize, digit: u64) -> u64 {
    let place = pow3(length - link);
    code - digit_at(code, length, link) * place + digit * place
}

/// Places a two-link block on links `(link, link + 1)` of the chain,
/// expressed in `basis`. Images leaving the basis are projected away.
pub fn embed_bond(block: &BondOp, link: usize, basis: &Basis) -> ExactOperator {
    let length = basis.length();
    let next = link % length + 1;
    let mut triplets = Vec::new();
    for (col, &code) in basis.codes().iter().enumerate() {
        let input = (digit_at(code, length, link) * 3 + digit_at(code, length, next)) as usize;
        for (out, row) in block.iter().enumerate() {
            let v = row[input];
            if v == Q::from_integer(0) {
                continue;
            }
            let image = set_digit(
                set_digit(code, length, link, out as u64 / 3),
                length,
                next,
                out as u64 % 3,
            );
            if let Some(r) = basis.index_of(image) {
                triplets.push((r, col, v));
            }
        }
    }
    ExactOperator::from_triplets(basis.dim(), triplets)
}

/// `Σ_j block_{j, j+1}` over all links of the periodic chain.
pub fn bond_sum(block: &BondOp, basis: &Basis) -> ExactOperator {
    let length = basis.length();
    let mut triplets = Vec::new();
    for link in 1..=length {
        triplets.extend(embed_bond(block, link, basis).triplets());
    }
    ExactOperator::from_triplets(basis.dim(), triplets)
}

pub fn local_term(term: LocalTerm, link: usize, length: usize) -> Result<ExactOperator> {
    check_link(link, length)?;
    Ok(embed_bond(&term.block(), link, &Basis::full(length)?))
}

#[allow(non_snake_case)]
pub fn local_U(link: usize, length: usize) -> Result<ExactOperator> {
    local_term(LocalTerm::U, link, length)
}

#[allow(non_snake_case)]
pub fn local_D(link: usize, length: usize) -> Result<ExactOperator> {
    local_term(LocalTerm::D, link, length)
}

#[allow(non_snake_case)]
pub fn local_F(link: usize, length: usize) -> Result<ExactOperator> {
    local_term(LocalTerm::F, link, length)
}

pub fn local_e(link: usize, length: usize) -> Result<ExactOperator> {
    local_term(LocalTerm::E, link, length)
}

/// The idempotent projector onto the range of a local term (half the term).
pub fn local_projector(term: LocalTerm, link: usize, length: usize) -> Result<ExactOperator> {
    Ok(local_term(term, link, length)?.scale(q(1, 2)))
}

/// Chain length, flat coupling `ε ≥ 0`, periodic boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HamiltonianSpec {
    pub length: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub epsilon: Q,
}

impl HamiltonianSpec {
    pub fn new(length: usize, epsilon: Q) -> Result<Self> {
        if epsilon < Q::from_integer(0) {
            return Err(Error::NegativeEpsilon(epsilon.to_string()));
        }
        if length < 2 {
            return Err(Error::LengthTooSmall { length, min: 2, what: "the Hamiltonian" });
        }
        Ok(HamiltonianSpec { length, epsilon })
    }

    pub fn free(length: usize) -> Result<Self> {
        Self::new(length, Q::from_integer(0))
    }

    pub fn is_free(&self) -> bool {
        self.epsilon == Q::from_integer(0)
    }

    fn bond(&self) -> BondOp {
        let mut block = LocalTerm::E.block();
        if !self.is_free() {
            let flat = LocalTerm::F.block();
            for (row, frow) in block.iter_mut().zip(flat.iter()) {
                for (x, y) in row.iter_mut().zip(frow) {
                    *x += *y * self.epsilon;
                }
            }
        }
        block
    }
}

/// `H = Σ_j [Û_j + D̂_j + ε F̂_j]` on the full space.
pub fn hamiltonian(spec: &HamiltonianSpec) -> Result<ExactOperator> {
    Ok(hamiltonian_on(spec, &Basis::full(spec.length)?))
}

/// The Hamiltonian compressed to `basis` (a block when the basis is an
/// invariant subspace).
pub fn hamiltonian_on(spec: &HamiltonianSpec, basis: &Basis) -> ExactOperator {
    assert_eq!(basis.length(), spec.length);
    bond_sum(&spec.bond(), basis)
}

/// Diagonal `(N_u, N_d, N_f)`.
pub fn number_ops(length: usize) -> Result<(ExactOperator, ExactOperator, ExactOperator)> {
    let basis = Basis::full(length)?;
    let count = |step: Step| {
        ExactOperator::diagonal(
            (0..basis.dim())
                .map(|i| {
                    let n = basis.word(i).steps().into_iter().filter(|&s| s == step).count();
                    Q::from_integer(n as i64)
                })
                .collect(),
        )
    };
    Ok((count(Step::U), count(Step::D), count(Step::F)))
}

/// `P_d = Π_j [|f⟩⟨f| + |u⟩⟨u| + |u⟩⟨d|]`: replaces every down step by an
/// up step. Idempotent, not orthogonal.
pub fn projector_pd(length: usize) -> Result<ExactOperator> {
    let basis = Basis::full(length)?;
    let triplets = (0..basis.dim()).map(|col| {
        let steps: Vec<Step> = basis
            .word(col)
            .steps()
            .into_iter()
            .map(|s| if s == Step::D { Step::U } else { s })
            .collect();
        let image = crate::basis::encode(&steps).expect("nonempty");
        (image.code() as usize, col, Q::from_integer(1))
    });
    Ok(ExactOperator::from_triplets(basis.dim(), triplets.collect::<Vec<_>>()))
}

fn word_permutation(basis: &Basis, f: impl Fn(&ConfigWord) -> ConfigWord) -> ExactOperator {
    let perm: Vec<usize> = (0..basis.dim())
        .map(|i| {
            let image = f(&basis.word(i));
            basis.index_of(image.code()).expect("map stays inside the basis")
        })
        .collect();
    ExactOperator::permutation(&perm)
}

/// `Π_j [|u⟩⟨d| + |d⟩⟨u| + |f⟩⟨f|]`, the unitary up/down interchange.
pub fn interchange_op(length: usize) -> Result<ExactOperator> {
    Ok(word_permutation(&Basis::full(length)?, swap_ud))
}

/// One-link cyclic shift `T`.
pub fn translation_op(length: usize) -> Result<ExactOperator> {
    translation_on(&Basis::full(length)?)
}

/// `T` on a translation-invariant basis such as a sector.
pub fn translation_on(basis: &Basis) -> Result<ExactOperator> {
    Ok(word_permutation(basis, |w| translate(w, 1)))
}

pub mod site {
    //! Embedded Pauli-type single-link operators.
    //!
    //! Raising and lowering use the flavor-symmetric convention
    //! `x⁺ = |x⟩⟨f|`, `x⁻ = |f⟩⟨x|` for `x ∈ {u, d}`; so `x⁺_j x⁻_{j+1}`
    //! moves a step of flavor `x` from link `j + 1` to link `j`.

    use super::SiteOp;
    use crate::exact::Q;

    fn from_ints(m: [[i64; 3]; 3]) -> SiteOp {
        m.map(|row| row.map(Q::from_integer))
    }

    pub fn one_u() -> SiteOp {
        from_ints([[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    }
    pub fn one_d() -> SiteOp {
        from_ints([[0, 0, 0], [0, 1, 0], [0, 0, 1]])
    }
    pub fn ux() -> SiteOp {
        from_ints([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    }
    /// `i · u^y`, real antisymmetric; `u^y ⊗ u^y = −(J ⊗ J)`.
    pub fn uj() -> SiteOp {
        from_ints([[0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    }
    pub fn uz() -> SiteOp {
        from_ints([[1, 0, 0], [0, -1, 0], [0, 0, 0]])
    }
    pub fn dx() -> SiteOp {
        from_ints([[0, 0, 0], [0, 0, 1], [0, 1, 0]])
    }
    pub fn dj() -> SiteOp {
        from_ints([[0, 0, 0], [0, 0, 1], [0, -1, 0]])
    }
    pub fn dz() -> SiteOp {
        from_ints([[0, 0, 0], [0, 1, 0], [0, 0, -1]])
    }
    pub fn u_plus() -> SiteOp {
        from_ints([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    }
    pub fn u_minus() -> SiteOp {
        from_ints([[0, 0, 0], [1, 0, 0], [0, 0, 0]])
    }
    pub fn d_plus() -> SiteOp {
        from_ints([[0, 0, 0], [0, 0, 0], [0, 1, 0]])
    }
    pub fn d_minus() -> SiteOp {
        from_ints([[0, 0, 0], [0, 0, 1], [0, 0, 0]])
    }
}

/// One row of the (1,1)-sector action audit.
#[derive(Debug, Clone, Serialize)]
pub struct ActionMismatch {
    pub n1: usize,
    pub n2: usize,
    /// Flavor order on `n1 < n2`: `"ud"` or `"du"`.
    pub ordering: String,
    /// `"adjacent"`, `"separated"` or `"wrap"` (`n1 = 1, n2 = L`).
    pub case: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionEquation {
    pub name: String,
    pub operator: String,
    pub matches: usize,
    pub mismatches: Vec<ActionMismatch>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionTableReport {
    #[serde(rename = "L")]
    pub length: usize,
    pub equations: Vec<ActionEquation>,
    pub total_matches: usize,
    pub total_mismatches: usize,
}

/// Predicted image of `|n1, n2⟩` under one of the displayed operator sums.
enum Predicted {
    Scalar(Q),
    /// New (first, second) positions, 1-based and possibly out of `1..=L`.
    Moved(i64, i64),
    Zero,
}

struct TableRow {
    name: &'static str,
    operator: &'static str,
    /// Site operators for the first-particle flavor role.
    left: fn() -> SiteOp,
    right: fn() -> SiteOp,
    /// Site operators after interchanging u and d.
    left_swapped: fn() -> SiteOp,
    right_swapped: fn() -> SiteOp,
    scale: Q,
    rule: fn(length: i64, n1: i64, n2: i64, adjacent: bool) -> Predicted,
}

fn action_rows() -> Vec<TableRow> {
    use site::*;
    vec![
        TableRow {
            name: "identity-u",
            operator: "sum_j 1u_j 1u_{j+1} / 2",
            left: one_u,
            right: one_u,
            left_swapped: one_d,
            right_swapped: one_d,
            scale: q(1, 2),
            rule: |l, _, _, _| Predicted::Scalar(q(l - 2, 2)),
        },
        TableRow {
            name: "identity-d",
            operator: "sum_j 1d_j 1d_{j+1} / 2",
            left: one_d,
            right: one_d,
            left_swapped: one_u,
            right_swapped: one_u,
            scale: q(1, 2),
            rule: |l, _, _, _| Predicted::Scalar(q(l - 2, 2)),
        },
        TableRow {
            name: "u-plus-minus",
            operator: "sum_j u+_j u-_{j+1}",
            left: u_plus,
            right: u_minus,
            left_swapped: d_plus,
            right_swapped: d_minus,
            scale: q(1, 1),
            rule: |_, n1, n2, adjacent| {
                if adjacent {
                    Predicted::Moved(n1 - 1, n1 + 1)
                } else {
                    Predicted::Moved(n1 - 1, n2)
                }
            },
        },
        TableRow {
            name: "d-plus-minus",
            operator: "sum_j d+_j d-_{j+1}",
            left: d_plus,
            right: d_minus,
            left_swapped: u_plus,
            right_swapped: u_minus,
            scale: q(1, 1),
            rule: |_, n1, n2, adjacent| {
                if adjacent {
                    Predicted::Zero
                } else {
                    Predicted::Moved(n1, n2 - 1)
                }
            },
        },
        TableRow {
            name: "u-minus-plus",
            operator: "sum_j u-_j u+_{j+1}",
            left: u_minus,
            right: u_plus,
            left_swapped: d_minus,
            right_swapped: d_plus,
            scale: q(1, 1),
            rule: |_, n1, n2, adjacent| {
                if adjacent {
                    Predicted::Zero
                } else {
                    Predicted::Moved(n1 + 1, n2)
                }
            },
        },
        TableRow {
            name: "d-minus-plus",
            operator: "sum_j d-_j d+_{j+1}",
            left: d_minus,
            right: d_plus,
            left_swapped: u_minus,
            right_swapped: u_plus,
            scale: q(1, 1),
            rule: |_, n1, n2, adjacent| {
                if adjacent {
                    Predicted::Moved(n1, n1 + 2)
                } else {
                    Predicted::Moved(n1, n2 + 1)
                }
            },
        },
        TableRow {
            name: "u-z-z",
            operator: "sum_j (uz_j / 2)(uz_{j+1} / 2)",
            left: uz,
            right: uz,
            left_swapped: dz,
            right_swapped: dz,
            scale: q(1, 4),
            rule: |l, _, _, adjacent| {
                if adjacent {
                    Predicted::Scalar(q(l - 3, 4) - q(1, 4))
                } else {
                    Predicted::Scalar(q(l - 4, 4) - q(1, 2))
                }
            },
        },
        TableRow {
            name: "d-z-z",
            operator: "sum_j (dz_j / 2)(dz_{j+1} / 2)",
            left: dz,
            right: dz,
            left_swapped: uz,
            right_swapped: uz,
            scale: q(1, 4),
            rule: |l, _, _, adjacent| {
                if adjacent {
                    Predicted::Scalar(q(l - 3, 4) - q(1, 4))
                } else {
                    Predicted::Scalar(q(l - 4, 4) - q(1, 2))
                }
            },
        },
    ]
}

fn scale_bond(block: BondOp, s: Q) -> BondOp {
    block.map(|row| row.map(|x| x * s))
}

fn two_particle_word(length: usize, first: (usize, Step), second: (usize, Step)) -> Option<ConfigWord> {
    if first.0 == second.0 {
        return None;
    }
    let mut steps = vec![Step::F; length];
    steps[first.0 - 1] = first.1;
    steps[second.0 - 1] = second.1;
    crate::basis::encode(&steps).ok()
}

fn describe(basis: &Basis, column: &[(usize, Q)]) -> String {
    if column.is_empty() {
        return "0".to_string();
    }
    column
        .iter()
        .map(|(i, v)| format!("{}*|{}>", v, basis.word(*i)))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Checks the displayed case table for the operator sums acting on the
/// (1,1) sector against direct matrix action.
///
/// `|n1, n2⟩` carries the first flavor at `n1 < n2`. For the `"ud"`
/// ordering the table is applied literally; for `"du"` it is applied with
/// the u and d operators interchanged. Positions are read cyclically.
pub fn action_table_check(length: usize) -> Result<ActionTableReport> {
    if length < 4 {
        return Err(Error::LengthTooSmall { length, min: 4, what: "the (1,1) action table" });
    }
    let basis = Basis::sector(length, SectorLabel::new(1, 1))?;
    let l = length as i64;
    let wrap_pos = |p: i64| ((p - 1).rem_euclid(l) + 1) as usize;

    let mut equations = Vec::new();
    for row in action_rows() {
        let mut matches = 0;
        let mut mismatches = Vec::new();
        for (ordering, first, second, left, right) in [
            ("ud", Step::U, Step::D, row.left, row.right),
            ("du", Step::D, Step::U, row.left_swapped, row.right_swapped),
        ] {
            let op = bond_sum(&scale_bond(kron(&left(), &right()), row.scale), &basis);
            let op_t = op.transpose();
            for n1 in 1..=length {
                for n2 in n1 + 1..=length {
                    let word = two_particle_word(length, (n1, first), (n2, second)).expect("distinct");
                    let col = basis.index_of(word.code()).expect("in sector");
                    let adjacent = n2 == n1 + 1;
                    let case = if adjacent {
                        "adjacent"
                    } else if n1 == 1 && n2 == length {
                        "wrap"
                    } else {
                        "separated"
                    };
                    let actual: Vec<(usize, Q)> = op_t.row(col).to_vec();
                    let expected: Option<Vec<(usize, Q)>> =
                        match (row.rule)(l, n1 as i64, n2 as i64, adjacent) {
                            Predicted::Zero => Some(Vec::new()),
                            Predicted::Scalar(s) if s == Q::from_integer(0) => Some(Vec::new()),
                            Predicted::Scalar(s) => Some(vec![(col, s)]),
                            Predicted::Moved(a, b) => two_particle_word(
                                length,
                                (wrap_pos(a), first),
                                (wrap_pos(b), second),
                            )
                            .map(|w| vec![(basis.index_of(w.code()).expect("in sector"), Q::from_integer(1))]),
                        };
                    if expected.as_deref() == Some(&actual[..]) {
                        matches += 1;
                    } else {
                        mismatches.push(ActionMismatch {
                            n1,
                            n2,
                            ordering: ordering.to_string(),
                            case: case.to_string(),
                            expected: expected
                                .map(|e| describe(&basis, &e))
                                .unwrap_or_else(|| "ill-defined (positions collide)".to_string()),
                            actual: describe(&basis, &actual),
                        });
                    }
                }
            }
        }
        equations.push(ActionEquation {
            name: row.name.to_string(),
            operator: row.operator.to_string(),
            matches,
            mismatches,
        });
    }
    let total_matches = equations.iter().map(|e| e.matches).sum();
    let total_mismatches = equations.iter().map(|e| e.mismatches.len()).sum();
    Ok(ActionTableReport { length, equations, total_matches, total_mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::encode;
    use nalgebra::SymmetricEigen;
    use num_traits::Signed;

    fn ket(s: &str) -> Vec<Q> {
        let w: ConfigWord = s.parse().unwrap();
        let mut v = vec![Q::from_integer(0); pow3(w.length()) as usize];
        v[w.code() as usize] = Q::from_integer(1);
        v
    }

    fn combo(length: usize, terms: &[(&str, i64)]) -> Vec<Q> {
        let mut v = vec![Q::from_integer(0); pow3(length) as usize];
        for (s, c) in terms {
            let w: ConfigWord = s.parse().unwrap();
            v[w.code() as usize] += Q::from_integer(*c);
        }
        v
    }

    fn eigenvalues(op: &ExactOperator) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }

    #[test]
    fn local_u_spectrum_and_action() {
        let u = local_U(1, 2).unwrap();
        let ev = eigenvalues(&u);
        assert!(ev[..8].iter().all(|x| x.abs() < 1e-12));
        assert!((ev[8] - 2.0).abs() < 1e-12);
        assert_eq!(u.apply(&ket("uf")), combo(2, &[("uf", 1), ("fu", -1)]));
        assert!(u.apply(&ket("dd")).iter().all(|x| *x == Q::from_integer(0)));
        assert!(local_U(1, 1).is_err());
        assert!(local_U(3, 2).is_err());
    }

    #[test]
    fn local_terms_are_scaled_projectors() {
        for length in 2..=6 {
            for link in 1..=length {
                for term in [LocalTerm::U, LocalTerm::D, LocalTerm::F] {
                    let p = local_projector(term, link, length).unwrap();
                    assert_eq!(&p * &p, p, "{term:?} link {link} L {length}");
                    assert!(p.is_symmetric());
                    let t = local_term(term, link, length).unwrap();
                    assert_eq!(&t * &t, t.scale(q(2, 1)));
                    // entries are dyadic
                    assert!(p.triplets().all(|(_, _, v)| v.denom().count_ones() == 1));
                }
            }
        }
    }

    #[test]
    fn pauli_form_matches_outer_product() {
        use site::*;
        // ½[1·1 − x⊗x − y⊗y − z⊗z] with y⊗y = −J⊗J
        let half = q(1, 2);
        let expand = |one: SiteOp, x: SiteOp, j: SiteOp, z: SiteOp| {
            let mut m = kron(&one, &one);
            let (xx, jj, zz) = (kron(&x, &x), kron(&j, &j), kron(&z, &z));
            for r in 0..9 {
                for c in 0..9 {
                    m[r][c] = half * (m[r][c] - xx[r][c] + jj[r][c] - zz[r][c]);
                }
            }
            m
        };
        assert_eq!(expand(one_u(), ux(), uj(), uz()), LocalTerm::U.block());
        assert_eq!(expand(one_d(), dx(), dj(), dz()), LocalTerm::D.block());
    }

    #[test]
    fn local_d_is_interchange_conjugate() {
        let x = interchange_op(3).unwrap();
        for link in 1..=3 {
            let u = local_U(link, 3).unwrap();
            let d = local_D(link, 3).unwrap();
            assert_eq!(&(&x * &u) * &x, d);
            let e = local_e(link, 3).unwrap();
            assert_eq!(&(&x * &e) * &x, e);
        }
        assert!(local_D(1, 2).unwrap().apply(&ket("uu")).iter().all(|v| *v == Q::from_integer(0)));
    }

    #[test]
    fn local_f_action() {
        let f = local_F(1, 2).unwrap();
        assert_eq!(f.apply(&ket("ff")), combo(2, &[("ff", 1), ("ud", -1)]));
        assert!(f.apply(&ket("du")).iter().all(|v| *v == Q::from_integer(0)));
        assert_eq!(f.trace(), Q::from_integer(2));
        assert!(f.triplets().all(|(_, _, v)| v.abs() == Q::from_integer(1)));
    }

    #[test]
    fn loop_relation_and_traces() {
        for link in 1..=3 {
            let e = local_e(link, 3).unwrap();
            assert_eq!(&e * &e, e.scale(q(2, 1)));
        }
        assert_eq!(local_e(1, 2).unwrap().trace(), Q::from_integer(4));
        for length in 2..=6 {
            let total: Q = (1..=length).map(|j| local_e(j, length).unwrap().trace()).sum();
            assert_eq!(total, Q::from_integer((4 * length as u64 * pow3(length - 2)) as i64));
        }
    }

    #[test]
    fn hamiltonian_basics() {
        let h = hamiltonian(&HamiltonianSpec::free(3).unwrap()).unwrap();
        assert!(h.is_symmetric());
        let ev = eigenvalues(&h);
        assert!(ev[0].abs() < 1e-10);
        let h4 = hamiltonian(&HamiltonianSpec::new(4, q(1, 1)).unwrap()).unwrap();
        assert!(eigenvalues(&h4)[0] > -1e-10);
        assert!(HamiltonianSpec::new(4, q(-1, 2)).is_err());
        assert!(HamiltonianSpec::free(1).is_err());
    }

    #[test]
    fn hamiltonian_is_translation_covariant() {
        for (length, eps) in [(3, q(0, 1)), (4, q(1, 1)), (5, q(1, 4))] {
            let h = hamiltonian(&HamiltonianSpec::new(length, eps).unwrap()).unwrap();
            let t = translation_op(length).unwrap();
            assert_eq!(&(&t * &h) * &t.transpose(), h);
        }
    }

    #[test]
    fn free_symmetries_commute() {
        let h = hamiltonian(&HamiltonianSpec::free(4).unwrap()).unwrap();
        let (nu, nd, nf) = number_ops(4).unwrap();
        for n in [&nu, &nd, &nf] {
            assert!(h.commutator(n).is_zero());
        }
        assert!(h.commutator(&interchange_op(4).unwrap()).is_zero());
        assert!(h.commutator(&projector_pd(4).unwrap()).is_zero());
        let hi = hamiltonian(&HamiltonianSpec::new(4, q(1, 1)).unwrap()).unwrap();
        assert!(!hi.commutator(&nu).is_zero());
    }

    #[test]
    fn number_ops_sum_to_length() {
        let (nu, nd, nf) = number_ops(3).unwrap();
        assert_eq!(&(&nu + &nd) + &nf, ExactOperator::identity(27).scale(q(3, 1)));
        assert_eq!(nu.apply(&ket("ufd")), ket("ufd"));
    }

    #[test]
    fn pd_and_interchange() {
        let pd = projector_pd(3).unwrap();
        assert_eq!(pd.apply(&ket("dfd")), ket("ufu"));
        assert_eq!(&pd * &pd, pd);
        let x = interchange_op(3).unwrap();
        assert_eq!(x.apply(&ket("ufd")), ket("dfu"));
        assert_eq!(&x * &x, ExactOperator::identity(27));
    }

    #[test]
    fn d_free_block_is_xxx() {
        // independent spin-1/2 build: u ↦ 1, f ↦ 0 bits, H = Σ (1 − P_{j,j+1})
        for length in 2..=6 {
            let words: Vec<ConfigWord> = (0..(1u64 << length))
                .map(|bits| {
                    let steps: Vec<Step> = (0..length)
                        .map(|i| if bits >> (length - 1 - i) & 1 == 1 { Step::U } else { Step::F })
                        .collect();
                    encode(&steps).unwrap()
                })
                .collect();
            let basis = Basis::from_words(length, &words);
            let h = hamiltonian_on(&HamiltonianSpec::free(length).unwrap(), &basis);
            let mut triplets = Vec::new();
            for bits in 0..(1usize << length) {
                for j in 0..length {
                    let (a, b) = (length - 1 - j, (length - 1 - (j + 1) % length));
                    let (x, y) = (bits >> a & 1, bits >> b & 1);
                    if x != y {
                        let swapped = bits ^ (1 << a) ^ (1 << b);
                        triplets.push((bits, bits, Q::from_integer(1)));
                        triplets.push((swapped, bits, Q::from_integer(-1)));
                    }
                }
            }
            assert_eq!(h, ExactOperator::from_triplets(1 << length, triplets), "L = {length}");
        }
    }

    #[test]
    fn action_table_bulk_cases() {
        let report = action_table_check(6).unwrap();
        assert_eq!(report.equations.len(), 8);
        let upm = &report.equations[2];
        // |u2 d3> -> |u1 d3>, an adjacent-branch agreement
        assert!(!upm.mismatches.iter().any(|m| m.n1 == 2 && m.n2 == 3));
        let dpm = &report.equations[3];
        assert!(!dpm.mismatches.iter().any(|m| m.case == "adjacent"));
        // every disagreement in the hopping rows is a wrap configuration
        for eq in &report.equations {
            assert!(eq.mismatches.iter().all(|m| m.case == "wrap"), "{}", eq.name);
        }
        assert!(report.total_mismatches > 0);
        assert!(action_table_check(3).is_err());
    }
}
