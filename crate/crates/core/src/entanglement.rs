//! Partial transposes, PPT verdicts and the local-hidden-variable sign
//! checks built on triples of commuting tensor-Pauli observables.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{self, CMatrix};
use crate::pauli::{idx, lambda_tensor, BasisIndex, CoherenceTensor, DensityMatrix, DIM};

pub const PPT_TOL: f64 = 1e-10;
pub const SIGN_TOL: f64 = 1e-8;
pub const COMMUTATOR_TOL: f64 = 1e-12;

/// Bipartition of three qubits, named by its singleton side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cut {
    /// 1|23
    A,
    /// 2|13
    B,
    /// 3|12
    C,
}

impl Cut {
    pub const ALL: [Self; 3] = [Self::A, Self::B, Self::C];

    /// The qubit (1-based) whose index is transposed.
    pub fn qubit(self) -> usize {
        match self {
            Self::A => 1,
            Self::B => 2,
            Self::C => 3,
        }
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "1|23",
            Self::B => "2|13",
            Self::C => "3|12",
        })
    }
}

/// Transposes the singleton qubit of `cut` by swapping its row and column bits.
pub fn partial_transpose(m: &CMatrix, cut: Cut) -> CMatrix {
    let shift = 3 - cut.qubit();
    let mask = 1usize << shift;
    let mut out = CMatrix::zeros(m.dim());
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let (bi, bj) = (i & mask, j & mask);
            let (ti, tj) = ((i & !mask) | bj, (j & !mask) | bi);
            out[(ti, tj)] = m[(i, j)];
        }
    }
    out
}

/// Same map in coherence coordinates: `lambda_2^T = -lambda_2`, all other
/// single-qubit basis elements are symmetric.
pub fn partial_transpose_coherence(t: &CoherenceTensor, cut: Cut) -> CoherenceTensor {
    t.map_components(|index, v| if index.at(cut.qubit()).value() == 2 { -v } else { v })
}

pub fn min_pt_eig(rho: &DensityMatrix, cut: Cut) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), cut);
    Ok(linalg::hermitian_eigenvalues(&pt)?.min())
}

/// Minimum partial-transpose eigenvalue for each of the three cuts.
pub fn min_pt_eigs(rho: &DensityMatrix) -> Result<[f64; 3]> {
    Ok([
        min_pt_eig(rho, Cut::A)?,
        min_pt_eig(rho, Cut::B)?,
        min_pt_eig(rho, Cut::C)?,
    ])
}

pub fn is_ppt(rho: &DensityMatrix) -> Result<bool> {
    Ok(min_pt_eigs(rho)?.iter().all(|e| *e >= -PPT_TOL))
}

/// Three observables whose expectation signs are compared against local
/// deterministic values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObservableTriple {
    pub indices: [BasisIndex; 3],
}

impl ObservableTriple {
    pub fn new(a: &str, b: &str, c: &str) -> Self {
        Self {
            indices: [idx(a), idx(b), idx(c)],
        }
    }

    /// Reads expectation signs off a tensor. Components with magnitude at or
    /// below `sign_tol` leave that observable unconstrained (sign 0).
    pub fn signed(&self, t: &CoherenceTensor, sign_tol: f64) -> SignedTriple {
        let signs = self.indices.map(|i| {
            let v = t.get(i);
            if v.abs() <= sign_tol {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        });
        SignedTriple { triple: *self, signs }
    }
}

impl fmt::Display for ObservableTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.indices;
        write!(f, "({a}, {b}, {c})")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedTriple {
    pub triple: ObservableTriple,
    /// +1, -1, or 0 for unconstrained.
    pub signs: [i8; 3],
}

/// Product of the three addressed coherence components.
pub fn triple_value(t: &CoherenceTensor, triple: &ObservableTriple) -> f64 {
    triple.indices.iter().map(|i| t.get(*i)).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleSet {
    /// Triples that expose the psi-complement state.
    Upb,
    /// Triples for the quarter-period orbit state.
    Oq,
}

pub fn builtin_triples(which: TripleSet) -> [ObservableTriple; 4] {
    match which {
        TripleSet::Upb => [
            ObservableTriple::new("031", "301", "330"),
            // derived from |1+0>; the commonly quoted (013, 103, 130) does not commute
            ObservableTriple::new("013", "303", "310"),
            ObservableTriple::new("033", "103", "130"),
            ObservableTriple::new("011", "101", "110"),
        ],
        TripleSet::Oq => [
            ObservableTriple::new("031", "101", "130"),
            ObservableTriple::new("013", "103", "110"),
            ObservableTriple::new("011", "301", "310"),
            ObservableTriple::new("033", "303", "330"),
        ],
    }
}

/// True iff the three observables pairwise commute and their product is a
/// positive multiple of `Lambda_000`.
pub fn verify_triple_structure(triple: &ObservableTriple) -> bool {
    let [a, b, c] = triple.indices.map(lambda_tensor);
    let commute = [(&a, &b), (&a, &c), (&b, &c)]
        .iter()
        .all(|(x, y)| x.commutator(y).frobenius_norm() < COMMUTATOR_TOL);
    if !commute {
        return false;
    }
    let product = &(&a * &b) * &c;
    // Lambda_000 = I / (2 sqrt 2): compare against the scaled identity
    let scale = product[(0, 0)];
    if scale.im.abs() > COMMUTATOR_TOL || scale.re <= COMMUTATOR_TOL {
        return false;
    }
    let target = CMatrix::identity(DIM).scale(Complex64::new(scale.re, 0.0));
    product.max_abs_diff(&target) < COMMUTATOR_TOL
}

/// Local hidden variable `(qubit, axis)` with axis in 1..=3.
pub type LocalVariable = (usize, usize);

/// Deterministic +-1 outcomes for every local variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvAssignment {
    pub values: BTreeMap<LocalVariable, i8>,
}

/// Local variables appearing in the supplied triples, sorted.
pub fn local_variables(triples: &[SignedTriple]) -> Vec<LocalVariable> {
    let mut vars: Vec<LocalVariable> = triples
        .iter()
        .flat_map(|t| t.triple.indices)
        .flat_map(|index| (1..=3).map(move |q| (q, index.at(q).value())))
        .filter(|(_, axis)| *axis != 0)
        .collect();
    vars.sort_unstable();
    vars.dedup();
    vars
}

fn consistent(triples: &[SignedTriple], vars: &[LocalVariable], bits: u64) -> bool {
    let value = |v: LocalVariable| -> i8 {
        let pos = vars.binary_search(&v).expect("variable registered");
        if bits >> pos & 1 == 1 {
            -1
        } else {
            1
        }
    };
    triples.iter().all(|t| {
        t.triple.indices.iter().zip(t.signs).all(|(index, sign)| {
            sign == 0
                || (1..=3)
                    .filter(|q| index.at(*q).value() != 0)
                    .map(|q| value((q, index.at(q).value())))
                    .product::<i8>()
                    == sign
        })
    })
}

/// Enumerates all `2^V` local assignments and returns those reproducing
/// every constrained sign.
pub fn lhv_assignments(triples: &[SignedTriple]) -> Vec<LhvAssignment> {
    let vars = local_variables(triples);
    assert!(vars.len() < 64, "too many local variables");
    (0..1u64 << vars.len())
        .filter(|bits| consistent(triples, &vars, *bits))
        .map(|bits| LhvAssignment {
            values: vars
                .iter()
                .enumerate()
                .map(|(pos, v)| (*v, if bits >> pos & 1 == 1 { -1 } else { 1 }))
                .collect(),
        })
        .collect()
}

/// Number of consistent local assignments.
pub fn lhv_oracle(triples: &[SignedTriple]) -> u64 {
    let vars = local_variables(triples);
    assert!(vars.len() < 64, "too many local variables");
    (0..1u64 << vars.len())
        .filter(|bits| consistent(triples, &vars, *bits))
        .count() as u64
}
