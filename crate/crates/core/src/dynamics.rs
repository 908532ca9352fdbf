//! Adjoint flows `rho -> e^{-itH} rho e^{itH}`, their closed-form action on
//! coherence tensors for the generators `Lambda_333` and `Lambda_222`, the
//! two-stage preparation of the UPB state and the PPT orbit of `Lambda_222`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::entanglement::{builtin_triples, lhv_oracle, min_pt_eigs, triple_value, TripleSet, PPT_TOL, SIGN_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RANK_TOL};
use crate::pauli::{
    from_coherence, idx, lambda_tensor, to_coherence, BasisIndex, CoherenceTensor, DensityMatrix, PauliIndex, DIM,
    N_COMPONENTS, SQRT2,
};
use crate::upb::{complement_map, reflect, rho_sep, rho_upb, KetFamily};

/// Period of the flows generated by `Lambda_333` and `Lambda_222`.
pub const TAU_P: f64 = 2.0 * SQRT2 * PI;

/// Hamiltonian `sum c * Lambda_jkl`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub terms: Vec<(BasisIndex, f64)>,
}

impl HamiltonianSpec {
    pub fn new(terms: Vec<(BasisIndex, f64)>) -> Result<Self> {
        if let Some((i, c)) = terms.iter().find(|(_, c)| !c.is_finite()) {
            return Err(Error::Config(format!("coefficient {c} of {i} is not finite")));
        }
        Ok(Self { terms })
    }

    /// Unit-coefficient sum of the given basis elements.
    pub fn sum_of(indices: &[&str]) -> Self {
        Self {
            terms: indices.iter().map(|s| (idx(s), 1.0)).collect(),
        }
    }

    /// `Lambda_333`, first preparation stage.
    pub fn stage_one() -> Self {
        Self::sum_of(&["333"])
    }

    /// Six two-body terms with pairwise equal indices, second preparation stage.
    pub fn stage_two() -> Self {
        Self::sum_of(&["011", "033", "101", "110", "303", "330"])
    }

    /// Nine-term generator that leaves the UPB state fixed.
    pub fn fixed_point() -> Self {
        Self::sum_of(&["011", "022", "033", "101", "110", "202", "220", "303", "330"])
    }

    /// `Lambda_222`, generator of the PPT orbit.
    pub fn orbit() -> Self {
        Self::sum_of(&["222"])
    }

    /// Single-qubit generator `lambda_axis` on qubit `q` (1-based).
    pub fn local(q: usize, axis: PauliIndex) -> Self {
        let mut slots = [PauliIndex::I; 3];
        slots[q - 1] = axis;
        Self {
            terms: vec![(BasisIndex(slots), 1.0)],
        }
    }

    pub fn matrix(&self) -> CMatrix {
        self.terms.iter().fold(CMatrix::zeros(DIM), |acc, (i, c)| {
            &acc + &lambda_tensor(*i).scale_re(*c)
        })
    }
}

impl fmt::Display for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, c)| {
                if *c == 1.0 {
                    format!("L{i}")
                } else {
                    format!("{c}*L{i}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Matrix-route adjoint flow.
pub fn flow(h: &HamiltonianSpec, t: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let m = linalg::conjugation_flow(&h.matrix(), t, rho.matrix())?;
    DensityMatrix::hermitian(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RodriguesAxis {
    Z333,
    Y222,
}

impl FromStr for RodriguesAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "333" => Ok(Self::Z333),
            "222" => Ok(Self::Y222),
            other => Err(Error::BadAxis(other.to_string())),
        }
    }
}

type Block = [[Complex64; 4]; 4];

/// Single-qubit `ad` (commutator) and `aad` (anticommutator) actions of
/// `lambda_axis` on the basis `(lambda_0..lambda_3)`, as 4x4 matrices with
/// `block[out][in]`.
pub fn local_blocks(axis: RodriguesAxis) -> (Block, Block) {
    let z = Complex64::new(0.0, 0.0);
    let r2 = Complex64::new(SQRT2, 0.0);
    let ir2 = Complex64::new(0.0, SQRT2);
    let mut ad = [[z; 4]; 4];
    let mut aad = [[z; 4]; 4];
    match axis {
        // [l3, l1] = i sqrt2 l2, [l3, l2] = -i sqrt2 l1; {l3, l0} = sqrt2 l3, {l3, l3} = sqrt2 l0
        RodriguesAxis::Z333 => {
            ad[2][1] = ir2;
            ad[1][2] = -ir2;
            aad[3][0] = r2;
            aad[0][3] = r2;
        }
        // [l2, l3] = i sqrt2 l1, [l2, l1] = -i sqrt2 l3; aad couples l0 <-> l2
        RodriguesAxis::Y222 => {
            ad[1][3] = ir2;
            ad[3][1] = -ir2;
            aad[2][0] = r2;
            aad[0][2] = r2;
        }
    }
    (ad, aad)
}

fn square(b: &Block) -> Block {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| b[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `(A (x) B (x) C) x` on a 64-vector with qubit 1 most significant.
fn apply_kron3(a: &Block, b: &Block, c: &Block, x: &[Complex64; N_COMPONENTS]) -> [Complex64; N_COMPONENTS] {
    let mut y = [Complex64::new(0.0, 0.0); N_COMPONENTS];
    for (out, slot) in y.iter_mut().enumerate() {
        let (i, j, k) = (out / 16, out / 4 % 4, out % 4);
        let mut acc = Complex64::new(0.0, 0.0);
        for ii in 0..4 {
            if a[i][ii].norm_sqr() == 0.0 {
                continue;
            }
            for jj in 0..4 {
                if b[j][jj].norm_sqr() == 0.0 {
                    continue;
                }
                for kk in 0..4 {
                    acc += a[i][ii] * b[j][jj] * c[k][kk] * x[16 * ii + 4 * jj + kk];
                }
            }
        }
        *slot = acc;
    }
    y
}

/// `ad^k` of `Lambda_aaa` for k = 1, 2 using
/// `ad^k = 4^-k (ad^k aad^k aad^k + aad^k ad^k aad^k + aad^k aad^k ad^k + ad^k ad^k ad^k)`;
/// the mixed products `ad * aad` vanish for a single Pauli axis.
fn ad_power(ad: &Block, aad: &Block, k: i32, x: &[Complex64; N_COMPONENTS]) -> [Complex64; N_COMPONENTS] {
    let terms = [(ad, aad, aad), (aad, ad, aad), (aad, aad, ad), (ad, ad, ad)];
    let scale = 4f64.powi(-k);
    let mut y = [Complex64::new(0.0, 0.0); N_COMPONENTS];
    for (a, b, c) in terms {
        for (acc, v) in y.iter_mut().zip(apply_kron3(a, b, c, x)) {
            *acc += v * scale;
        }
    }
    y
}

/// Closed-form `exp(-it ad_{Lambda_aaa})` on a coherence tensor:
/// `I - i sqrt2 sin(t/sqrt2) ad - 2 (1 - cos(t/sqrt2)) ad^2`.
/// `t` is reduced modulo the period first.
pub fn rodrigues_flow(axis: RodriguesAxis, t: f64, tensor: &CoherenceTensor) -> CoherenceTensor {
    let t = t.rem_euclid(TAU_P);
    let (ad, aad) = local_blocks(axis);
    let (ad2, aad2) = (square(&ad), square(&aad));
    let x: [Complex64; N_COMPONENTS] = tensor.0.map(|v| Complex64::new(v, 0.0));
    let first = ad_power(&ad, &aad, 1, &x);
    let second = ad_power(&ad2, &aad2, 2, &x);
    let s = Complex64::new(0.0, -SQRT2 * (t / SQRT2).sin());
    let c = -2.0 * (1.0 - (t / SQRT2).cos());
    let mut out = CoherenceTensor::zeros();
    for i in 0..N_COMPONENTS {
        out.0[i] = (x[i] + s * first[i] + second[i] * c).re;
    }
    out
}

/// Parses the axis label then applies [`rodrigues_flow`].
pub fn rodrigues_flow_str(axis: &str, t: f64, tensor: &CoherenceTensor) -> Result<CoherenceTensor> {
    Ok(rodrigues_flow(axis.parse()?, t, tensor))
}

/// Frobenius norm of `[H, rho]`.
pub fn stationarity(h: &HamiltonianSpec, rho: &DensityMatrix) -> f64 {
    h.matrix().commutator(rho.matrix()).frobenius_norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Standard,
    Swapped,
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub hamiltonian: HamiltonianSpec,
    pub duration: f64,
}

#[derive(Debug, Clone)]
pub struct InteriorSample {
    /// 0-based stage number.
    pub stage: usize,
    /// Time since the start of the stage.
    pub t: f64,
    pub min_pt_eigs: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct PreparationTrace {
    pub schedule: Vec<Stage>,
    /// State at every stage boundary, starting with the initial state.
    pub checkpoints: Vec<DensityMatrix>,
    pub interior_samples: Vec<InteriorSample>,
}

impl PreparationTrace {
    pub fn endpoint(&self) -> &DensityMatrix {
        self.checkpoints.last().expect("initial state is always recorded")
    }

    pub fn intermediate(&self) -> &DensityMatrix {
        &self.checkpoints[1]
    }

    pub fn total_duration(&self) -> f64 {
        self.schedule.iter().map(|s| s.duration).sum()
    }
}

pub const DEFAULT_INTERIOR_SAMPLES: usize = 9;

/// Runs the piecewise-constant schedule taking the psi mixture to the UPB
/// state. Stage durations travel with their Hamiltonians when swapped.
pub fn prepare_upb(order: Order, interior_samples: usize) -> Result<PreparationTrace> {
    let mut schedule = vec![
        Stage {
            hamiltonian: HamiltonianSpec::stage_one(),
            duration: TAU_P / 2.0,
        },
        Stage {
            hamiltonian: HamiltonianSpec::stage_two(),
            duration: TAU_P / 4.0,
        },
    ];
    if order == Order::Swapped {
        schedule.reverse();
    }
    let mut checkpoints = vec![rho_sep()];
    let mut interior = Vec::new();
    for (n, stage) in schedule.iter().enumerate() {
        let start = checkpoints.last().expect("nonempty").clone();
        for k in 1..=interior_samples {
            let t = stage.duration * k as f64 / (interior_samples + 1) as f64;
            let rho = flow(&stage.hamiltonian, t, &start)?;
            interior.push(InteriorSample {
                stage: n,
                t,
                min_pt_eigs: min_pt_eigs(&rho)?,
            });
        }
        checkpoints.push(flow(&stage.hamiltonian, stage.duration, &start)?);
    }
    Ok(PreparationTrace {
        schedule,
        checkpoints,
        interior_samples: interior,
    })
}

/// The eight three-body coherences moved by the `Lambda_222` flow.
pub const ORBIT_THREE_COHERENCES: [&str; 8] = ["111", "113", "131", "133", "311", "313", "331", "333"];

#[derive(Debug, Clone)]
pub struct OrbitSample {
    pub t: f64,
    pub tensor: CoherenceTensor,
    pub reflected_tensor: CoherenceTensor,
    pub min_pt_eigs: [f64; 3],
    pub reflected_min_pt_eigs: [f64; 3],
    pub rank: usize,
    pub reflected_rank: usize,
    pub ppt: bool,
    pub reflected_ppt: bool,
}

impl OrbitSample {
    pub fn at(t: f64) -> Result<Self> {
        let sep = to_coherence(&rho_sep())?;
        let tensor = rodrigues_flow(RodriguesAxis::Y222, t, &sep);
        let reflected_tensor = reflect(&tensor);
        let (rho, refl) = (from_coherence(&tensor), from_coherence(&reflected_tensor));
        let min_pt = min_pt_eigs(&rho)?;
        let refl_min_pt = min_pt_eigs(&refl)?;
        Ok(Self {
            t,
            tensor,
            reflected_tensor,
            min_pt_eigs: min_pt,
            reflected_min_pt_eigs: refl_min_pt,
            rank: linalg::rank_with_tol(rho.matrix(), RANK_TOL)?,
            reflected_rank: linalg::rank_with_tol(refl.matrix(), RANK_TOL)?,
            ppt: min_pt.iter().all(|e| *e >= -PPT_TOL),
            reflected_ppt: refl_min_pt.iter().all(|e| *e >= -PPT_TOL),
        })
    }

    pub fn three_coherences(&self) -> [f64; 8] {
        ORBIT_THREE_COHERENCES.map(|s| self.tensor.get(idx(s)))
    }
}

/// `samples` equispaced points on `[0, tau_p]`, both ends included.
pub fn orbit(samples: usize) -> Result<Vec<OrbitSample>> {
    if samples < 2 {
        return Err(Error::Config(format!("orbit needs at least 2 samples, got {samples}")));
    }
    (0..samples)
        .map(|k| OrbitSample::at(TAU_P * k as f64 / (samples - 1) as f64))
        .collect()
}

/// Key facts about the orbit at `t = 0, tau_p/4, tau_p/2`.
#[derive(Debug, Clone)]
pub struct OrbitSwapReport {
    /// `|rho_orb(0) - psi mixture|`.
    pub start_vs_psi: f64,
    /// `|reflect(rho_orb(0)) - rho_UPB|`.
    pub start_reflected_vs_upb: f64,
    /// UPB triples on `reflect(rho_orb(0))`.
    pub start_reflected_upb_triples: [f64; 4],
    /// `|reflect(rho_orb(tau_p/4)) - theta mixture|`.
    pub quarter_reflected_vs_theta: f64,
    /// `|rho_orb(tau_p/4) - complement of theta|`.
    pub quarter_vs_theta_complement: f64,
    /// Quarter-period triples on `rho_orb(tau_p/4)`.
    pub quarter_oq_triples: [f64; 4],
    /// `|rho_orb(tau_p/2) - phi mixture|`.
    pub half_vs_phi: f64,
    /// Consistent assignments of the UPB state, per quarter-period triple.
    pub upb_vs_oq_assignments: [u64; 4],
    /// Consistent assignments of `rho_orb(tau_p/4)`, per UPB triple.
    pub oq_vs_upb_assignments: [u64; 4],
    /// Same, with the four triples sharing one assignment (diagnostic; 0 here,
    /// as for the separable mixtures).
    pub upb_vs_oq_joint: u64,
    pub oq_vs_upb_joint: u64,
}

fn triple_values(t: &CoherenceTensor, which: TripleSet) -> [f64; 4] {
    builtin_triples(which).map(|tr| triple_value(t, &tr))
}

fn per_triple_assignments(t: &CoherenceTensor, which: TripleSet) -> [u64; 4] {
    builtin_triples(which).map(|tr| lhv_oracle(&[tr.signed(t, SIGN_TOL)]))
}

fn joint_assignments(t: &CoherenceTensor, which: TripleSet) -> u64 {
    let signed: Vec<_> = builtin_triples(which).iter().map(|tr| tr.signed(t, SIGN_TOL)).collect();
    lhv_oracle(&signed)
}

pub fn orbit_swap_report() -> Result<OrbitSwapReport> {
    let dist = |t: &CoherenceTensor, rho: &DensityMatrix| from_coherence(t).distance(rho);
    let start = OrbitSample::at(0.0)?;
    let quarter = OrbitSample::at(TAU_P / 4.0)?;
    let half = OrbitSample::at(TAU_P / 2.0)?;
    let upb = to_coherence(&rho_upb())?;
    let theta_complement = complement_map(&KetFamily::Theta.kets())?;
    Ok(OrbitSwapReport {
        start_vs_psi: dist(&start.tensor, &KetFamily::Psi.mixture()),
        start_reflected_vs_upb: dist(&start.reflected_tensor, &rho_upb()),
        start_reflected_upb_triples: triple_values(&start.reflected_tensor, TripleSet::Upb),
        quarter_reflected_vs_theta: dist(&quarter.reflected_tensor, &KetFamily::Theta.mixture()),
        quarter_vs_theta_complement: dist(&quarter.tensor, &theta_complement),
        quarter_oq_triples: triple_values(&quarter.tensor, TripleSet::Oq),
        half_vs_phi: dist(&half.tensor, &KetFamily::Phi.mixture()),
        upb_vs_oq_assignments: per_triple_assignments(&upb, TripleSet::Oq),
        oq_vs_upb_assignments: per_triple_assignments(&quarter.tensor, TripleSet::Upb),
        upb_vs_oq_joint: joint_assignments(&upb, TripleSet::Oq),
        oq_vs_upb_joint: joint_assignments(&quarter.tensor, TripleSet::Upb),
    })
}

/// One candidate evolution of the theta mixture under `Lambda_222`.
#[derive(Debug, Clone)]
pub struct ByproductCandidate {
    pub label: &'static str,
    pub t: f64,
    pub distance_to_upb: f64,
}

#[derive(Debug, Clone)]
pub struct ByproductResult {
    pub candidates: Vec<ByproductCandidate>,
    /// Indices into `candidates` that land on the UPB state.
    pub matched: Vec<usize>,
    /// State reached by the first matched candidate.
    pub state: DensityMatrix,
}

impl ByproductResult {
    pub fn matched_parameter(&self) -> f64 {
        self.candidates[self.matched[0]].t
    }

    pub fn matched_label(&self) -> &'static str {
        self.candidates[self.matched[0]].label
    }
}

pub const BYPRODUCT_TOL: f64 = 1e-10;

/// Evolves the separable theta mixture by `Lambda_222` for each signed
/// quarter and three-quarter period, keeping those that reach the UPB state.
pub fn byproduct_preparation() -> Result<ByproductResult> {
    let theta = KetFamily::Theta.mixture();
    let upb = rho_upb();
    let h = HamiltonianSpec::orbit();
    let specs: [(&'static str, f64); 4] = [
        ("+tau_p/4", TAU_P / 4.0),
        ("-tau_p/4", -TAU_P / 4.0),
        ("+3tau_p/4", 3.0 * TAU_P / 4.0),
        ("-3tau_p/4", -3.0 * TAU_P / 4.0),
    ];
    let mut candidates = Vec::with_capacity(4);
    let mut matched = Vec::new();
    let mut state = None;
    for (n, (label, t)) in specs.into_iter().enumerate() {
        let rho = flow(&h, t, &theta)?;
        let d = rho.distance(&upb);
        if d < BYPRODUCT_TOL {
            matched.push(n);
            state.get_or_insert(rho);
        }
        candidates.push(ByproductCandidate {
            label,
            t,
            distance_to_upb: d,
        });
    }
    let state = state.ok_or(Error::NoMatch)?;
    Ok(ByproductResult {
        candidates,
        matched,
        state,
    })
}
