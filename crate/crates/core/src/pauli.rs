//! Orthonormal tensor-Pauli basis and the coherence-tensor view of
//! three-qubit states.
//!
//! Single-qubit basis: `lambda_mu = sigma_mu / sqrt(2)`, so that
//! `tr(lambda_a lambda_b) = delta_ab`. Three-qubit basis elements are
//! `Lambda_jkl = lambda_j (x) lambda_k (x) lambda_l` with qubit 1 as the most
//! significant Kronecker factor; coherence components are
//! `rho^{jkl} = tr(rho Lambda_jkl)` stored at flat index `16j + 4k + l`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

pub const SQRT2: f64 = std::f64::consts::SQRT_2;
pub const DIM: usize = 8;
pub const N_COMPONENTS: usize = 64;

/// Tolerance on Hermiticity and trace when constructing states.
pub const STATE_TOL: f64 = 1e-12;
/// Lowest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli direction: 0 is the identity, 1/2/3 are x/y/z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const I: Self = Self(0);
    pub const X: Self = Self(1);
    pub const Y: Self = Self(2);
    pub const Z: Self = Self(3);
    pub const ALL: [Self; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    pub fn new(value: u8) -> Result<Self> {
        if value < 4 {
            Ok(Self(value))
        } else {
            Err(Error::BadIndex(value.to_string()))
        }
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }
}

/// Index `(j, k, l)` of a three-qubit basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex(pub [PauliIndex; 3]);

impl BasisIndex {
    pub const IDENTITY: Self = Self([PauliIndex::I; 3]);

    pub fn new(j: u8, k: u8, l: u8) -> Result<Self> {
        Ok(Self([PauliIndex::new(j)?, PauliIndex::new(k)?, PauliIndex::new(l)?]))
    }

    pub fn from_flat(flat: usize) -> Self {
        assert!(flat < N_COMPONENTS, "flat index {flat} out of range");
        Self([
            PauliIndex((flat / 16) as u8),
            PauliIndex((flat / 4 % 4) as u8),
            PauliIndex((flat % 4) as u8),
        ])
    }

    pub fn flat(self) -> usize {
        16 * self.0[0].value() + 4 * self.0[1].value() + self.0[2].value()
    }

    /// Pauli direction on qubit `q` (1-based).
    pub fn at(self, q: usize) -> PauliIndex {
        self.0[q - 1]
    }

    /// Number of non-identity slots (the `k` of a k-coherence).
    pub fn weight(self) -> usize {
        self.0.iter().filter(|p| p.0 != 0).count()
    }

    pub fn all() -> impl Iterator<Item = Self> {
        (0..N_COMPONENTS).map(Self::from_flat)
    }
}

impl FromStr for BasisIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .map(|ch| ch.to_digit(10).filter(|d| *d < 4).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::BadIndex(s.to_string()))?;
        match digits.as_slice() {
            [j, k, l] => Self::new(*j, *k, *l),
            _ => Err(Error::BadIndex(s.to_string())),
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0].0, self.0[1].0, self.0[2].0)
    }
}

/// Parses a literal like `"031"`; panics on malformed input.
pub fn idx(s: &str) -> BasisIndex {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

/// `sigma_mu / sqrt(2)`.
pub fn lambda_matrix(mu: PauliIndex) -> CMatrix {
    let h = 1.0 / SQRT2;
    let z = c(0.0, 0.0);
    let data = match mu.0 {
        0 => vec![c(h, 0.0), z, z, c(h, 0.0)],
        1 => vec![z, c(h, 0.0), c(h, 0.0), z],
        2 => vec![z, c(0.0, -h), c(0.0, h), z],
        3 => vec![c(h, 0.0), z, z, c(-h, 0.0)],
        _ => unreachable!(),
    };
    CMatrix::from_rows(2, data).expect("2x2")
}

pub fn lambda_tensor(index: BasisIndex) -> CMatrix {
    let [j, k, l] = index.0;
    lambda_matrix(j).kron(&lambda_matrix(k)).kron(&lambda_matrix(l))
}

/// The 64 coherence components of a three-qubit operator.
#[derive(Clone, Copy, PartialEq)]
pub struct CoherenceTensor(pub [f64; N_COMPONENTS]);

impl CoherenceTensor {
    pub fn zeros() -> Self {
        Self([0.0; N_COMPONENTS])
    }

    /// Tensor of the maximally mixed state `I/8`.
    pub fn maximally_mixed() -> Self {
        let mut t = Self::zeros();
        t.0[0] = 1.0 / (2.0 * SQRT2);
        t
    }

    pub fn get(&self, index: BasisIndex) -> f64 {
        self.0[index.flat()]
    }

    pub fn set(&mut self, index: BasisIndex, value: f64) {
        self.0[index.flat()] = value;
    }

    /// Components other than `(0,0,0)`, paired with their index.
    pub fn homogeneous(&self) -> impl Iterator<Item = (BasisIndex, f64)> + '_ {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, v)| (BasisIndex::from_flat(i), *v))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn map_components(&self, f: impl Fn(BasisIndex, f64) -> f64) -> Self {
        let mut out = *self;
        for (i, v) in out.0.iter_mut().enumerate() {
            *v = f(BasisIndex::from_flat(i), *v);
        }
        out
    }
}

impl fmt::Debug for CoherenceTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, v) in self.0.iter().enumerate() {
            if v.abs() > 1e-15 {
                m.entry(&BasisIndex::from_flat(i).to_string(), v);
            }
        }
        m.finish()
    }
}

/// 8x8 Hermitian matrix representing a three-qubit state.
///
/// [`DensityMatrix::new`] enforces trace and positivity; the unchecked
/// constructors exist for reflected operators that need not be states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let rho = Self::hermitian(m)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Accepts any Hermitian 8x8 matrix without checking trace or positivity.
    pub fn hermitian(m: CMatrix) -> Result<Self> {
        if m.dim() != DIM {
            return Err(Error::ShapeMismatch {
                left: DIM,
                right: m.dim(),
            });
        }
        let residue = m.hermiticity_residue();
        if residue > STATE_TOL {
            return Err(Error::NonHermitian { residue });
        }
        Ok(Self(m))
    }

    pub fn maximally_mixed() -> Self {
        Self(CMatrix::identity(DIM).scale_re(1.0 / DIM as f64))
    }

    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != DIM {
            return Err(Error::ShapeMismatch {
                left: DIM,
                right: amplitudes.len(),
            });
        }
        Self::new(CMatrix::outer(amplitudes))
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.0.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigenvalues(&self.0)?.min();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).frobenius_norm()
    }
}

pub fn to_coherence(rho: &DensityMatrix) -> Result<CoherenceTensor> {
    let mut t = CoherenceTensor::zeros();
    for index in BasisIndex::all() {
        let z = trace_product(rho.matrix(), &lambda_tensor(index));
        if z.im.abs() > STATE_TOL {
            return Err(Error::NonHermitianInput {
                index: index.to_string(),
                residue: z.im.abs(),
            });
        }
        t.set(index, z.re);
    }
    Ok(t)
}

/// `tr(A B)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.dim();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn from_coherence(t: &CoherenceTensor) -> DensityMatrix {
    let mut m = CMatrix::zeros(DIM);
    for (i, v) in t.0.iter().enumerate() {
        if *v != 0.0 {
            m = &m + &lambda_tensor(BasisIndex::from_flat(i)).scale_re(*v);
        }
    }
    DensityMatrix(m)
}

/// Single-qubit ket label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KetSymbol {
    Zero,
    One,
    Plus,
    Minus,
}

impl KetSymbol {
    pub fn parse(ch: char) -> Result<Self> {
        match ch {
            '0' => Ok(Self::Zero),
            '1' => Ok(Self::One),
            '+' => Ok(Self::Plus),
            '-' | '−' => Ok(Self::Minus),
            other => Err(Error::BadSymbol(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::Zero => '0',
            Self::One => '1',
            Self::Plus => '+',
            Self::Minus => '-',
        }
    }

    pub fn vector(self) -> [Complex64; 2] {
        let h = 1.0 / SQRT2;
        match self {
            Self::Zero => [c(1.0, 0.0), c(0.0, 0.0)],
            Self::One => [c(0.0, 0.0), c(1.0, 0.0)],
            Self::Plus => [c(h, 0.0), c(h, 0.0)],
            Self::Minus => [c(h, 0.0), c(-h, 0.0)],
        }
    }

    /// The unique (up to phase) orthogonal state in the same basis.
    pub fn orthogonal(self) -> Self {
        match self {
            Self::Zero => Self::One,
            Self::One => Self::Zero,
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }

    /// Bloch vector `(x, y, z)`, physicist convention `tr(rho sigma_i)`.
    pub fn bloch(self) -> [f64; 3] {
        match self {
            Self::Zero => [0.0, 0.0, 1.0],
            Self::One => [0.0, 0.0, -1.0],
            Self::Plus => [1.0, 0.0, 0.0],
            Self::Minus => [-1.0, 0.0, 0.0],
        }
    }
}

/// Three-qubit product ket built from per-qubit symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductKet {
    symbols: [KetSymbol; 3],
    amplitudes: [Complex64; DIM],
}

impl ProductKet {
    pub fn from_symbols(symbols: [KetSymbol; 3]) -> Self {
        let [a, b, cc] = symbols.map(KetSymbol::vector);
        let mut amplitudes = [c(0.0, 0.0); DIM];
        for (i, amp) in amplitudes.iter_mut().enumerate() {
            *amp = a[(i >> 2) & 1] * b[(i >> 1) & 1] * cc[i & 1];
        }
        Self { symbols, amplitudes }
    }

    pub fn symbols(&self) -> [KetSymbol; 3] {
        self.symbols
    }

    pub fn amplitudes(&self) -> &[Complex64; DIM] {
        &self.amplitudes
    }

    /// Local vector on qubit `q` (1-based).
    pub fn local(&self, q: usize) -> [Complex64; 2] {
        self.symbols[q - 1].vector()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(CMatrix::outer(&self.amplitudes))
    }

    pub fn label(&self) -> String {
        self.symbols.iter().map(|s| s.as_char()).collect()
    }
}

impl fmt::Display for ProductKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}>", self.label())
    }
}

/// Parses a three-symbol string over `{0, 1, +, -}`; qubit 1 is leftmost.
pub fn ket_from_string(s: &str) -> Result<ProductKet> {
    let chars: Vec<char> = s.chars().collect();
    if chars.len() != 3 {
        return Err(Error::BadLength(chars.len()));
    }
    let mut symbols = [KetSymbol::Zero; 3];
    for (slot, ch) in symbols.iter_mut().zip(chars) {
        *slot = KetSymbol::parse(ch)?;
    }
    Ok(ProductKet::from_symbols(symbols))
}

/// Convex combination of states.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub weights: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Mixture {
    pub fn new(weights: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::WeightError(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0 || !w.is_finite()) {
            return Err(Error::WeightError(format!("weight {w} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::WeightError(format!("weights sum to {total}")));
        }
        Ok(Self { weights, states })
    }

    pub fn density(&self) -> DensityMatrix {
        let m = self
            .weights
            .iter()
            .zip(&self.states)
            .fold(CMatrix::zeros(DIM), |acc, (w, s)| &acc + &s.matrix().scale_re(*w));
        DensityMatrix(m)
    }
}

pub fn mix(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    Ok(Mixture::new(weights.to_vec(), states.to_vec())?.density())
}

/// Equal-weight mixture of product-ket projectors.
pub fn equal_mix(kets: &[ProductKet]) -> DensityMatrix {
    let w = 1.0 / kets.len() as f64;
    let states: Vec<_> = kets.iter().map(ProductKet::projector).collect();
    mix(&vec![w; kets.len()], &states).expect("equal weights are valid")
}

/// Partial trace keeping the qubits in `keep` (1-based, any order, result
/// ordered ascending). Works on the raw matrix so trace is carried through.
pub fn reduced_density(rho: &DensityMatrix, keep: &[usize]) -> Result<CMatrix> {
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() || kept.len() >= 3 || kept.iter().any(|q| !(1..=3).contains(q)) {
        return Err(Error::BadSubset(keep.to_vec()));
    }
    let traced: Vec<usize> = (1..=3).filter(|q| !kept.contains(q)).collect();
    let bit = |i: usize, q: usize| (i >> (3 - q)) & 1;
    let sub = |i: usize| kept.iter().fold(0, |acc, q| (acc << 1) | bit(i, *q));
    let n = 1 << kept.len();
    let mut out = CMatrix::zeros(n);
    let m = rho.matrix();
    for i in 0..DIM {
        for j in 0..DIM {
            if traced.iter().all(|q| bit(i, *q) == bit(j, *q)) {
                out[(sub(i), sub(j))] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Coherence 4-vector `tr(rho lambda_mu)` of a single-qubit matrix.
pub fn qubit_coherence(m: &CMatrix) -> [f64; 4] {
    PauliIndex::ALL.map(|mu| trace_product(m, &lambda_matrix(mu)).re)
}

/// Four-index coherence tensor (three qubits plus an ancilla qubit), flat
/// index `64 * (16j + 4k + l) + m`.
#[derive(Clone, PartialEq)]
pub struct Coherence4(pub Vec<f64>);

impl Coherence4 {
    pub fn get(&self, index: BasisIndex, m: usize) -> f64 {
        self.0[4 * index.flat() + m]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Nonzero components above `tol`, as `(jkl, m)` pairs.
    pub fn support(&self, tol: f64) -> Vec<(BasisIndex, usize)> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > tol)
            .map(|(i, _)| (BasisIndex::from_flat(i / 4), i % 4))
            .collect()
    }
}

impl fmt::Debug for Coherence4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.support(1e-15)).finish()
    }
}

/// Coherences of `rho (x) rho_a` as the outer product of the two tensors.
pub fn coherence_product(t: &CoherenceTensor, ancilla: [f64; 4]) -> Result<Coherence4> {
    if (ancilla[0] - 1.0 / SQRT2).abs() > STATE_TOL {
        return Err(Error::BadAncilla(ancilla[0]));
    }
    let mut out = vec![0.0; 4 * N_COMPONENTS];
    for (i, v) in t.0.iter().enumerate() {
        for (m, a) in ancilla.iter().enumerate() {
            out[4 * i + m] = v * a;
        }
    }
    Ok(Coherence4(out))
}

/// Coherences of a 16x16 four-qubit operator, computed by direct traces
/// against `Lambda_jkl (x) lambda_m`.
pub fn coherence4_of_matrix(m: &CMatrix) -> Result<Coherence4> {
    if m.dim() != 2 * DIM {
        return Err(Error::ShapeMismatch {
            left: 2 * DIM,
            right: m.dim(),
        });
    }
    let mut out = vec![0.0; 4 * N_COMPONENTS];
    for index in BasisIndex::all() {
        let big = lambda_tensor(index);
        for mu in PauliIndex::ALL {
            out[4 * index.flat() + mu.value()] = trace_product(m, &big.kron(&lambda_matrix(mu))).re;
        }
    }
    Ok(Coherence4(out))
}
