//! Claim runner behind the `upb3` CLI: every check is a [`ClaimReport`]
//! with a stable id, a measured value, the expected value and a tolerance.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::Serialize;

use crate::dynamics::{
    byproduct_preparation, flow, orbit, orbit_swap_report, prepare_upb, rodrigues_flow, stationarity, HamiltonianSpec,
    OrbitSample, Order, RodriguesAxis, DEFAULT_INTERIOR_SAMPLES, ORBIT_THREE_COHERENCES, TAU_P,
};
use crate::entanglement::{builtin_triples, lhv_oracle, min_pt_eigs, triple_value, verify_triple_structure, TripleSet};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::pauli::{
    coherence4_of_matrix, coherence_product, from_coherence, idx, qubit_coherence, reduced_density, to_coherence,
    BasisIndex, CoherenceTensor, DensityMatrix, PauliIndex, SQRT2,
};
use crate::upb::{
    check_upb, complement_map, in_set_c, partial_reflect, reflect, reflect_density, rho_sep, rho_upb, KetFamily,
};

/// Magnitude of every nonzero homogeneous coherence of the UPB state.
pub const X: f64 = 1.0 / (8.0 * SQRT2);

const UPB_PLUS: [&str; 10] = ["031", "033", "103", "111", "133", "303", "310", "313", "330", "331"];
const UPB_MINUS: [&str; 6] = ["011", "013", "101", "110", "130", "301"];
const OQ_PLUS: [&str; 6] = ["011", "013", "101", "110", "130", "301"];
const OQ_MINUS: [&str; 10] = ["031", "033", "103", "113", "131", "303", "310", "311", "330", "333"];

fn signed_table(plus: &[&str], minus: &[&str]) -> CoherenceTensor {
    let mut t = CoherenceTensor::maximally_mixed();
    for s in plus {
        t.set(idx(s), X);
    }
    for s in minus {
        t.set(idx(s), -X);
    }
    t
}

/// Literal coherence table of the UPB state.
pub fn upb_table() -> CoherenceTensor {
    signed_table(&UPB_PLUS, &UPB_MINUS)
}

/// Literal coherence table of the orbit state at a quarter period.
pub fn quarter_orbit_table() -> CoherenceTensor {
    signed_table(&OQ_PLUS, &OQ_MINUS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// How `measured` is compared against `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `|measured - expected| <= tolerance` componentwise.
    Eq,
    /// `measured >= expected - tolerance`.
    Ge,
    /// `measured <= expected + tolerance`.
    Le,
    /// strictly `measured > expected`.
    Gt,
    /// strictly `measured < expected`.
    Lt,
    /// boolean equality.
    Bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Scalar(f64),
    Vector(Vec<f64>),
    None,
}

impl Value {
    fn components(&self) -> Vec<f64> {
        match self {
            Self::Scalar(v) => vec![*v],
            Self::Vector(v) => v.clone(),
            Self::Bool(_) | Self::None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub description: String,
    pub paper_ref: String,
    pub status: Status,
    pub comparison: Comparison,
    pub measured: Value,
    pub expected: Value,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Outcome of one claim before status is decided.
struct Measurement {
    comparison: Comparison,
    measured: Value,
    expected: Value,
    tolerance: f64,
    message: Option<String>,
}

impl Measurement {
    fn eq(measured: impl Into<Value>, expected: impl Into<Value>, tolerance: f64) -> Self {
        Self::new(Comparison::Eq, measured, expected, tolerance)
    }

    fn new(comparison: Comparison, measured: impl Into<Value>, expected: impl Into<Value>, tolerance: f64) -> Self {
        Self {
            comparison,
            measured: measured.into(),
            expected: expected.into(),
            tolerance,
            message: None,
        }
    }

    fn boolean(measured: bool) -> Self {
        Self::new(Comparison::Bool, measured, true, 0.0)
    }

    fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = Some(message.into());
        self
    }

    fn passes(&self) -> bool {
        if let (Value::Bool(m), Value::Bool(e)) = (&self.measured, &self.expected) {
            return m == e;
        }
        let measured = self.measured.components();
        let expected = self.expected.components();
        if measured.is_empty() || measured.iter().any(|v| v.is_nan()) {
            return false;
        }
        // a scalar expectation is a bound shared by every measured component
        let expected_at = |i: usize| {
            if expected.len() == 1 {
                Some(expected[0])
            } else {
                expected.get(i).copied()
            }
        };
        if expected.len() != 1 && expected.len() != measured.len() {
            return false;
        }
        let tol = self.tolerance;
        measured.iter().enumerate().all(|(i, m)| {
            let e = expected_at(i).expect("length checked");
            match self.comparison {
                Comparison::Eq => (m - e).abs() <= tol,
                Comparison::Ge => *m >= e - tol,
                Comparison::Le => *m <= e + tol,
                Comparison::Gt => *m > e,
                Comparison::Lt => *m < e,
                Comparison::Bool => false,
            }
        })
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Self::Scalar(v)
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Self::Vector(v)
    }
}

impl<const N: usize> From<[f64; N]> for Value {
    fn from(v: [f64; N]) -> Self {
        Self::Vector(v.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub equality: f64,
    /// Magnitude of the most negative eigenvalue still counted as PSD.
    pub psd: f64,
    pub sign: f64,
    pub flow: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            equality: 1e-12,
            psd: 1e-10,
            sign: 1e-8,
            flow: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub orbit_samples: usize,
    pub json_path: Option<PathBuf>,
    pub filter: Option<Regex>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            orbit_samples: 64,
            json_path: None,
            filter: None,
        }
    }
}

impl RunConfig {
    /// Compiles `pattern` as an anchored regular expression over claim ids.
    pub fn with_filter(mut self, pattern: &str) -> Result<Self> {
        let re = Regex::new(&format!("^(?:{pattern})$")).map_err(|e| Error::Config(e.to_string()))?;
        self.filter = Some(re);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("equality", t.equality),
            ("psd", t.psd),
            ("sign", t.sign),
            ("flow", t.flow),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.orbit_samples < 2 {
            return Err(Error::Config(format!(
                "orbit_samples must be >= 2, got {}",
                self.orbit_samples
            )));
        }
        Ok(())
    }

    fn selects(&self, claim_id: &str) -> bool {
        self.filter.as_ref().is_none_or(|re| re.is_match(claim_id))
    }
}

type ClaimFn = fn(&RunConfig) -> Result<Measurement>;

struct Claim {
    id: &'static str,
    description: &'static str,
    paper_ref: &'static str,
    run: ClaimFn,
}

fn tensor_vec(t: &CoherenceTensor) -> Vec<f64> {
    t.0.to_vec()
}

fn sorted_spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(linalg::hermitian_eigenvalues(m)?.eigenvalues)
}

fn signed_counts(t: &CoherenceTensor, which: TripleSet, sign_tol: f64) -> Vec<f64> {
    builtin_triples(which)
        .iter()
        .map(|tr| lhv_oracle(&[tr.signed(t, sign_tol)]) as f64)
        .collect()
}

fn joint_count(t: &CoherenceTensor, which: TripleSet, sign_tol: f64) -> f64 {
    let signed: Vec<_> = builtin_triples(which).iter().map(|tr| tr.signed(t, sign_tol)).collect();
    lhv_oracle(&signed) as f64
}

fn triple_products(t: &CoherenceTensor, which: TripleSet) -> Vec<f64> {
    builtin_triples(which).iter().map(|tr| triple_value(t, tr)).collect()
}

fn upb_spectrum_target() -> Vec<f64> {
    vec![0.0, 0.0, 0.0, 0.0, 0.25, 0.25, 0.25, 0.25]
}

fn claims() -> Vec<Claim> {
    vec![
        Claim {
            id: "upb.components",
            description: "coherence tensor of the UPB state: 10 at +x, 6 at -x, trace term 1/(2 sqrt2), 47 zeros",
            paper_ref: "coherence table of the UPB state",
            run: |_| {
                Ok(Measurement::eq(
                    tensor_vec(&to_coherence(&rho_upb())?),
                    tensor_vec(&upb_table()),
                    1e-13,
                ))
            },
        },
        Claim {
            id: "upb.spectrum",
            description: "eigenvalues of the UPB state are {0 x4, 1/4 x4}",
            paper_ref: "isospectrality of the complement map",
            run: |_| {
                Ok(Measurement::eq(
                    sorted_spectrum(rho_upb().matrix())?,
                    upb_spectrum_target(),
                    1e-11,
                ))
            },
        },
        Claim {
            id: "sep.spectrum",
            description: "eigenvalues of the psi mixture are {0 x4, 1/4 x4}",
            paper_ref: "isospectrality of the complement map",
            run: |_| {
                Ok(Measurement::eq(
                    sorted_spectrum(rho_sep().matrix())?,
                    upb_spectrum_target(),
                    1e-11,
                ))
            },
        },
        Claim {
            id: "sep.reduced",
            description: "all single-qubit reductions of the psi mixture and the UPB state are I/2",
            paper_ref: "cancellation of the 1-qubit coherences",
            run: |cfg| {
                let half = CMatrix::identity(2).scale_re(0.5);
                let mut d = Vec::new();
                for rho in [rho_sep(), rho_upb()] {
                    for q in 1..=3 {
                        d.push(linalg::frobenius_distance(&reduced_density(&rho, &[q])?, &half)?);
                    }
                }
                Ok(Measurement::eq(d, 0.0, cfg.tolerances.equality))
            },
        },
        Claim {
            id: "upb.set_c",
            description: "the psi mixture and the UPB state lie in set C (eigenvalues in [0, 1/4])",
            paper_ref: "invariance of set C under reflection",
            run: |cfg| {
                let mut ok = true;
                for rho in [rho_sep(), rho_upb()] {
                    let s = linalg::hermitian_eigenvalues(rho.matrix())?;
                    ok &= in_set_c(&rho)? && s.min() >= -cfg.tolerances.psd;
                }
                Ok(Measurement::boolean(ok))
            },
        },
        Claim {
            id: "reflect.sep_to_upb",
            description: "reflection of the psi mixture is the UPB state",
            paper_ref: "reflection of the homogeneous part",
            run: |cfg| {
                let r = from_coherence(&reflect(&to_coherence(&rho_sep())?));
                Ok(Measurement::eq(r.distance(&rho_upb()), 0.0, cfg.tolerances.equality))
            },
        },
        Claim {
            id: "reflect.partial",
            description: "two-qubit partial reflections on pairs 12, 23, 13 map the psi mixture to the UPB state",
            paper_ref: "two-qubit partial reflections",
            run: |cfg| {
                let sep = to_coherence(&rho_sep())?;
                let mut d = Vec::new();
                for pair in [[1, 2], [2, 3], [1, 3]] {
                    d.push(from_coherence(&partial_reflect(&sep, &pair)?).distance(&rho_upb()));
                }
                Ok(Measurement::eq(d, 0.0, cfg.tolerances.equality))
            },
        },
        Claim {
            id: "reflect.involution",
            description: "reflecting twice is the identity",
            paper_ref: "reflection of the homogeneous part",
            run: |cfg| {
                let mut d = Vec::new();
                for rho in [rho_sep(), rho_upb(), KetFamily::Theta.mixture()] {
                    let t = to_coherence(&rho)?;
                    d.push(from_coherence(&reflect(&reflect(&t))).distance(&rho));
                }
                Ok(Measurement::eq(d, 0.0, cfg.tolerances.equality))
            },
        },
        Claim {
            id: "reflect.single_component",
            description: "the reflection of a single psi projector has spectrum {-3/4, 1/4 x7}",
            paper_ref: "reflected single component is not a density",
            run: |_| {
                let r = reflect_density(&KetFamily::Psi.kets()[0].projector());
                let mut expected = vec![0.25; 8];
                expected[0] = -0.75;
                Ok(Measurement::eq(sorted_spectrum(r.matrix())?, expected, 1e-11))
            },
        },
        Claim {
            id: "ppt.upb",
            description: "minimum partial-transpose eigenvalue of the UPB state over the three cuts",
            paper_ref: "all partial transpositions are positive",
            run: |cfg| {
                Ok(Measurement::new(
                    Comparison::Ge,
                    min_pt_eigs(&rho_upb())?,
                    0.0,
                    cfg.tolerances.equality,
                ))
            },
        },
        Claim {
            id: "ppt.orbit",
            description: "every orbit sample and its reflection is PPT on all three cuts",
            paper_ref: "PPT orbit of Lambda_222",
            run: |cfg| {
                let samples = orbit(cfg.orbit_samples)?;
                let mins: Vec<f64> = samples
                    .iter()
                    .map(|s| {
                        s.min_pt_eigs
                            .iter()
                            .chain(&s.reflected_min_pt_eigs)
                            .copied()
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect();
                let verdicts = samples.iter().all(|s| s.ppt && s.reflected_ppt);
                let m = Measurement::new(Comparison::Ge, mins, 0.0, cfg.tolerances.equality);
                Ok(if verdicts {
                    m
                } else {
                    m.with_message("PPT verdict failed at the psd threshold")
                })
            },
        },
        Claim {
            id: "upb.unextendable",
            description: "psi and theta are orthogonal, product and unextendable (81-assignment search)",
            paper_ref: "unextendable product basis",
            run: |_| {
                let mut ok = true;
                for family in [KetFamily::Psi, KetFamily::Theta] {
                    let r = check_upb(&family.kets())?;
                    ok &= r.orthogonal && r.all_product && r.unextendable;
                }
                Ok(Measurement::boolean(ok))
            },
        },
        Claim {
            id: "upb.witness",
            description: "replacing |---> by |111> admits a product state orthogonal to all four members",
            paper_ref: "unextendable product basis",
            run: |_| {
                let kets = ["01+", "1+0", "+01", "111"].map(|s| crate::pauli::ket_from_string(s).expect("literal"));
                let r = check_upb(&kets)?;
                let Some(w) = r.extension_witness else {
                    return Ok(Measurement::boolean(false).with_message("no witness found"));
                };
                let overlaps: Vec<f64> = kets.iter().map(|k| k.inner(&w).norm()).collect();
                Ok(Measurement::new(Comparison::Le, overlaps, 0.0, 1e-10).with_message(format!("witness {w}")))
            },
        },
        Claim {
            id: "lhv.structure",
            description: "all eight built-in triples commute and multiply to a positive multiple of the identity",
            paper_ref: "triples of commuting observables",
            run: |_| {
                let ok = builtin_triples(TripleSet::Upb)
                    .iter()
                    .chain(&builtin_triples(TripleSet::Oq))
                    .all(verify_triple_structure);
                Ok(Measurement::boolean(ok))
            },
        },
        Claim {
            id: "lhv.triples_upb",
            description: "the four UPB triple products on the UPB state equal -x^3",
            paper_ref: "LHV inequalities for the UPB state",
            run: |cfg| {
                let v = triple_products(&to_coherence(&rho_upb())?, TripleSet::Upb);
                Ok(Measurement::eq(v, -X * X * X, cfg.tolerances.equality))
            },
        },
        Claim {
            id: "lhv.triples_sep",
            description: "the four UPB triple products on the psi mixture are positive",
            paper_ref: "the contradictions disappear for the separable mixture",
            run: |_| {
                Ok(Measurement::new(
                    Comparison::Gt,
                    triple_products(&to_coherence(&rho_sep())?, TripleSet::Upb),
                    0.0,
                    0.0,
                ))
            },
        },
        Claim {
            id: "lhv.oracle_upb",
            description: "no local assignment reproduces the UPB state's signs on any UPB triple",
            paper_ref: "LHV contradiction argument",
            run: |cfg| {
                Ok(Measurement::eq(
                    signed_counts(&to_coherence(&rho_upb())?, TripleSet::Upb, cfg.tolerances.sign),
                    0.0,
                    0.0,
                ))
            },
        },
        Claim {
            id: "lhv.oracle_sep",
            description: "each UPB triple admits a consistent local assignment for the psi mixture",
            paper_ref: "the contradictions disappear for the separable mixture",
            run: |cfg| {
                Ok(Measurement::new(
                    Comparison::Ge,
                    signed_counts(&to_coherence(&rho_sep())?, TripleSet::Upb, cfg.tolerances.sign),
                    1.0,
                    0.0,
                ))
            },
        },
        Claim {
            id: "lhv.triples_oq",
            description: "the four quarter-period triple products on rho_orb(tau_p/4) equal -x^3",
            paper_ref: "triplets of observables for the quarter-period state",
            run: |cfg| {
                let quarter = OrbitSample::at(TAU_P / 4.0)?;
                Ok(Measurement::eq(
                    triple_products(&quarter.tensor, TripleSet::Oq),
                    -X * X * X,
                    cfg.tolerances.equality,
                ))
            },
        },
        Claim {
            id: "lhv.oracle_oq",
            description: "no local assignment reproduces rho_orb(tau_p/4) on any quarter-period triple",
            paper_ref: "triplets of observables for the quarter-period state",
            run: |cfg| {
                let quarter = OrbitSample::at(TAU_P / 4.0)?;
                Ok(Measurement::eq(
                    signed_counts(&quarter.tensor, TripleSet::Oq, cfg.tolerances.sign),
                    0.0,
                    0.0,
                ))
            },
        },
        Claim {
            id: "lhv.oracle_theta",
            description: "each quarter-period triple admits a consistent assignment for the theta mixture",
            paper_ref: "triplets of observables for the quarter-period state",
            run: |cfg| {
                let t = to_coherence(&KetFamily::Theta.mixture())?;
                Ok(Measurement::new(
                    Comparison::Ge,
                    signed_counts(&t, TripleSet::Oq, cfg.tolerances.sign),
                    1.0,
                    0.0,
                ))
            },
        },
        Claim {
            id: "lhv.cross_upb_oq",
            description: "each quarter-period triple admits a consistent assignment for the UPB state",
            paper_ref: "the UPB state is compatible with the quarter-period LHV model",
            run: |cfg| {
                let t = to_coherence(&rho_upb())?;
                Ok(Measurement::new(
                    Comparison::Ge,
                    signed_counts(&t, TripleSet::Oq, cfg.tolerances.sign),
                    1.0,
                    0.0,
                )
                .with_message(format!(
                    "joint count over all four triples: {}",
                    joint_count(&t, TripleSet::Oq, cfg.tolerances.sign)
                )))
            },
        },
        Claim {
            id: "lhv.cross_oq_upb",
            description: "each UPB triple admits a consistent assignment for rho_orb(tau_p/4)",
            paper_ref: "the quarter-period state is compatible with the UPB LHV model",
            run: |cfg| {
                let quarter = OrbitSample::at(TAU_P / 4.0)?;
                Ok(Measurement::new(
                    Comparison::Ge,
                    signed_counts(&quarter.tensor, TripleSet::Upb, cfg.tolerances.sign),
                    1.0,
                    0.0,
                )
                .with_message(format!(
                    "joint count over all four triples: {}",
                    joint_count(&quarter.tensor, TripleSet::Upb, cfg.tolerances.sign)
                )))
            },
        },
        Claim {
            id: "prep.endpoint",
            description:
                "Lambda_333 for tau_p/2 then the six-term sum for tau_p/4 takes the psi mixture to the UPB state",
            paper_ref: "two-stage nonlocal preparation",
            run: |cfg| {
                let trace = prepare_upb(Order::Standard, 0)?;
                Ok(Measurement::eq(
                    trace.endpoint().distance(&rho_upb()),
                    0.0,
                    cfg.tolerances.flow,
                ))
            },
        },
        Claim {
            id: "prep.intermediate",
            description: "the standard schedule passes through the equal mixture of the mu kets",
            paper_ref: "separable intermediate state",
            run: |cfg| {
                let trace = prepare_upb(Order::Standard, 0)?;
                Ok(Measurement::eq(
                    trace.intermediate().distance(&KetFamily::Mu.mixture()),
                    0.0,
                    cfg.tolerances.flow,
                ))
            },
        },
        Claim {
            id: "prep.swapped_endpoint",
            description: "exchanging the two stages still reaches the UPB state",
            paper_ref: "swapped stage order",
            run: |cfg| {
                let trace = prepare_upb(Order::Swapped, 0)?;
                Ok(Measurement::eq(
                    trace.endpoint().distance(&rho_upb()),
                    0.0,
                    cfg.tolerances.flow,
                ))
            },
        },
        Claim {
            id: "prep.swapped_intermediate",
            description: "the swapped intermediate is the reflection of the mu mixture",
            paper_ref: "swapped stage order",
            run: |cfg| {
                let trace = prepare_upb(Order::Swapped, 0)?;
                let target = reflect_density(&KetFamily::Mu.mixture());
                Ok(Measurement::eq(
                    trace.intermediate().distance(&target),
                    0.0,
                    cfg.tolerances.flow,
                ))
            },
        },
        Claim {
            id: "prep.swapped_lhv",
            description: "the swapped intermediate violates all four UPB triples",
            paper_ref: "swapped intermediate obeys the LHV inequalities",
            run: |_| {
                let trace = prepare_upb(Order::Swapped, 0)?;
                Ok(Measurement::new(
                    Comparison::Lt,
                    triple_products(&to_coherence(trace.intermediate())?, TripleSet::Upb),
                    0.0,
                    0.0,
                ))
            },
        },
        Claim {
            id: "prep.interior_npt",
            description: "inside both stages, in both orders, every cut has a partial-transpose eigenvalue below -1e-6",
            paper_ref: "bipartite entanglement during the preparation",
            run: |_| {
                let mut worst = Vec::new();
                for order in [Order::Standard, Order::Swapped] {
                    let trace = prepare_upb(order, DEFAULT_INTERIOR_SAMPLES)?;
                    worst.extend(
                        trace
                            .interior_samples
                            .iter()
                            .map(|s| s.min_pt_eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                    );
                }
                Ok(Measurement::new(Comparison::Lt, worst, -1e-6, 0.0))
            },
        },
        Claim {
            id: "prep.byproduct",
            description: "evolving the theta mixture under Lambda_222 reaches the UPB state",
            paper_ref: "simpler preparation via the orbit",
            run: |cfg| {
                let r = byproduct_preparation()?;
                let labels: Vec<&str> = r.matched.iter().map(|i| r.candidates[*i].label).collect();
                Ok(
                    Measurement::eq(r.state.distance(&rho_upb()), 0.0, cfg.tolerances.flow).with_message(format!(
                        "matched {} (t = {:.17e}); all matches: {}",
                        r.matched_label(),
                        r.matched_parameter(),
                        labels.join(", ")
                    )),
                )
            },
        },
        Claim {
            id: "prep.byproduct_unique",
            description:
                "exactly one of the four signed quarter/three-quarter-period candidates lands on the UPB state",
            paper_ref: "simpler preparation via the orbit",
            run: |_| {
                let r = byproduct_preparation()?;
                let d: Vec<String> = r
                    .candidates
                    .iter()
                    .map(|c| format!("{}: {:.3e}", c.label, c.distance_to_upb))
                    .collect();
                Ok(Measurement::eq(r.matched.len() as f64, 1.0, 0.0).with_message(format!(
                    "distances to rho_UPB: {}; -tau_p/4 and +3tau_p/4 differ by one full period",
                    d.join(", ")
                )))
            },
        },
        Claim {
            id: "flow.rodrigues_333",
            description: "closed-form Lambda_333 flow matches matrix conjugation at 33 times",
            paper_ref: "tensored Rodrigues formula",
            run: |cfg| rodrigues_claim(RodriguesAxis::Z333, cfg),
        },
        Claim {
            id: "flow.rodrigues_222",
            description: "closed-form Lambda_222 flow matches matrix conjugation at 33 times",
            paper_ref: "tensored Rodrigues formula",
            run: |cfg| rodrigues_claim(RodriguesAxis::Y222, cfg),
        },
        Claim {
            id: "flow.period",
            description: "flows of Lambda_333 and Lambda_222 return to the start after tau_p = 2 sqrt2 pi",
            paper_ref: "period of the parametrization",
            run: |_| {
                let mut d = Vec::new();
                for h in [HamiltonianSpec::stage_one(), HamiltonianSpec::orbit()] {
                    for rho in [rho_sep(), rho_upb()] {
                        d.push(flow(&h, TAU_P, &rho)?.distance(&rho));
                    }
                }
                Ok(Measurement::eq(d, 0.0, 1e-11))
            },
        },
        Claim {
            id: "orbit.conservation",
            description: "all 0-, 1- and 2-coherences stay constant along the Lambda_222 orbit",
            paper_ref: "only the 8 3-qubit coherences move",
            run: |cfg| {
                let samples = orbit(cfg.orbit_samples)?;
                let start = samples[0].tensor;
                let moving: Vec<BasisIndex> = ORBIT_THREE_COHERENCES.iter().map(|s| idx(s)).collect();
                let dev: Vec<f64> = samples
                    .iter()
                    .map(|s| {
                        BasisIndex::all()
                            .filter(|i| !moving.contains(i))
                            .map(|i| (s.tensor.get(i) - start.get(i)).abs())
                            .fold(0.0, f64::max)
                    })
                    .collect();
                Ok(Measurement::eq(dev, 0.0, cfg.tolerances.equality))
            },
        },
        Claim {
            id: "orbit.sinusoids",
            description: "moving 3-coherences follow -x sin(t/sqrt2) and -x cos(t/sqrt2)",
            paper_ref: "sinusoidal law of the orbit",
            run: |cfg| {
                let samples = orbit(cfg.orbit_samples)?;
                let dev: Vec<f64> = samples
                    .iter()
                    .map(|s| {
                        let (sin, cos) = ((s.t / SQRT2).sin(), (s.t / SQRT2).cos());
                        ORBIT_THREE_COHERENCES
                            .iter()
                            .map(|name| {
                                let expected = match *name {
                                    "113" | "131" | "311" | "333" => -X * sin,
                                    _ => -X * cos,
                                };
                                (s.tensor.get(idx(name)) - expected).abs()
                            })
                            .fold(0.0, f64::max)
                    })
                    .collect();
                Ok(Measurement::eq(dev, 0.0, 1e-11))
            },
        },
        Claim {
            id: "orbit.rank",
            description: "every orbit state and its reflection has rank 4 (4 eigenvalues > 0.2, 4 below 1e-9)",
            paper_ref: "rank 4 along the orbit",
            run: |cfg| {
                let samples = orbit(cfg.orbit_samples)?;
                let mut ok = true;
                for s in &samples {
                    for t in [&s.tensor, &s.reflected_tensor] {
                        let e = sorted_spectrum(from_coherence(t).matrix())?;
                        ok &= e.iter().filter(|v| **v > 0.2).count() == 4
                            && e.iter().filter(|v| v.abs() < 1e-9).count() == 4;
                    }
                    ok &= s.rank == 4 && s.reflected_rank == 4;
                }
                Ok(Measurement::boolean(ok))
            },
        },
        Claim {
            id: "orbit.quarter",
            description: "rho_orb(tau_p/4) has the quarter-period coherence table",
            paper_ref: "coherence table at a quarter period",
            run: |cfg| {
                let quarter = OrbitSample::at(TAU_P / 4.0)?;
                Ok(Measurement::eq(
                    tensor_vec(&quarter.tensor),
                    tensor_vec(&quarter_orbit_table()),
                    cfg.tolerances.equality,
                ))
            },
        },
        Claim {
            id: "orbit.quarter_theta",
            description: "the reflection of rho_orb(tau_p/4) is the equal mixture of the theta kets",
            paper_ref: "separable reflected state at a quarter period",
            run: |cfg| {
                let quarter = OrbitSample::at(TAU_P / 4.0)?;
                Ok(Measurement::eq(
                    from_coherence(&quarter.reflected_tensor).distance(&KetFamily::Theta.mixture()),
                    0.0,
                    cfg.tolerances.equality,
                ))
            },
        },
        Claim {
            id: "orbit.quarter_complement",
            description: "rho_orb(tau_p/4) is the complement of the theta basis",
            paper_ref: "the quarter-period state is obtainable from the complement map",
            run: |cfg| {
                let quarter = OrbitSample::at(TAU_P / 4.0)?;
                let target = complement_map(&KetFamily::Theta.kets())?;
                Ok(Measurement::eq(
                    from_coherence(&quarter.tensor).distance(&target),
                    0.0,
                    cfg.tolerances.equality,
                ))
            },
        },
        Claim {
            id: "orbit.half_phi",
            description: "rho_orb(tau_p/2) is the equal mixture of the phi kets",
            paper_ref: "separable state at half period",
            run: |cfg| {
                let half = OrbitSample::at(TAU_P / 2.0)?;
                Ok(Measurement::eq(
                    from_coherence(&half.tensor).distance(&KetFamily::Phi.mixture()),
                    0.0,
                    cfg.tolerances.equality,
                ))
            },
        },
        Claim {
            id: "orbit.reflection_commutes",
            description: "reflection commutes with the Lambda_222 flow on the psi mixture",
            paper_ref: "reflection commutes with the flow",
            run: |cfg| {
                let h = HamiltonianSpec::orbit();
                let mut d = Vec::new();
                for k in 0..cfg.orbit_samples {
                    let t = TAU_P * k as f64 / (cfg.orbit_samples - 1) as f64;
                    let lhs = reflect_density(&flow(&h, t, &rho_sep())?);
                    let rhs = flow(&h, t, &rho_upb())?;
                    d.push(lhs.distance(&rhs));
                }
                Ok(Measurement::eq(d, 0.0, 1e-11))
            },
        },
        Claim {
            id: "orbit.swap",
            description: "entanglement swaps between the orbit and its reflection at quarter periods",
            paper_ref: "swapping of bound entanglement along the orbit",
            run: |cfg| {
                let r = orbit_swap_report()?;
                let tol = cfg.tolerances.equality;
                let ok = r.start_vs_psi < tol
                    && r.start_reflected_vs_upb < tol
                    && r.start_reflected_upb_triples.iter().all(|v| *v < 0.0)
                    && r.quarter_reflected_vs_theta < tol
                    && r.quarter_vs_theta_complement < tol
                    && r.quarter_oq_triples.iter().all(|v| *v < 0.0)
                    && r.half_vs_phi < tol
                    && r.upb_vs_oq_assignments.iter().all(|n| *n >= 1)
                    && r.oq_vs_upb_assignments.iter().all(|n| *n >= 1);
                Ok(Measurement::boolean(ok).with_message(format!("{r:?}")))
            },
        },
        Claim {
            id: "stationarity.fixed_point",
            description: "the nine-term generator commutes with the UPB state",
            paper_ref: "fixed point of the nine-term generator",
            run: |cfg| {
                Ok(Measurement::new(
                    Comparison::Le,
                    stationarity(&HamiltonianSpec::fixed_point(), &rho_upb()),
                    0.0,
                    cfg.tolerances.equality,
                ))
            },
        },
        Claim {
            id: "stationarity.local",
            description: "all nine single-qubit generators commute with the UPB state",
            paper_ref: "1-spin generators have no effect",
            run: |cfg| {
                let mut v = Vec::new();
                for q in 1..=3 {
                    for axis in [PauliIndex::X, PauliIndex::Y, PauliIndex::Z] {
                        v.push(stationarity(&HamiltonianSpec::local(q, axis), &rho_upb()));
                    }
                }
                Ok(
                    Measurement::new(Comparison::Le, v, 0.0, cfg.tolerances.equality).with_message(
                        "[Lambda_j00, rho_UPB] != 0; see stationarity.local_reductions for what is invariant",
                    ),
                )
            },
        },
        Claim {
            id: "stationarity.local_reductions",
            description: "single-qubit flows leave every 1-qubit reduction of the UPB state at I/2",
            paper_ref: "1-spin generators have no effect",
            run: |cfg| {
                let half = CMatrix::identity(2).scale_re(0.5);
                let mut d = Vec::new();
                for q in 1..=3 {
                    for axis in [PauliIndex::X, PauliIndex::Y, PauliIndex::Z] {
                        let moved = flow(&HamiltonianSpec::local(q, axis), 0.7, &rho_upb())?;
                        for r in 1..=3 {
                            d.push(linalg::frobenius_distance(&reduced_density(&moved, &[r])?, &half)?);
                        }
                    }
                }
                Ok(Measurement::eq(d, 0.0, cfg.tolerances.equality))
            },
        },
        Claim {
            id: "stationarity.orbit",
            description: "Lambda_222 does not commute with the UPB state",
            paper_ref: "the orbit generator moves the UPB state",
            run: |_| {
                Ok(Measurement::new(
                    Comparison::Gt,
                    stationarity(&HamiltonianSpec::orbit(), &rho_upb()),
                    1e-3,
                    0.0,
                ))
            },
        },
        Claim {
            id: "ancilla.support",
            description: "coherences of rho_UPB (x) I/2 live on (jkl, 0), scaled by 1/sqrt2",
            paper_ref: "carrier of the 3-qubit entanglement",
            run: |_| {
                let t = to_coherence(&rho_upb())?;
                let p = coherence_product(&t, [1.0 / SQRT2, 0.0, 0.0, 0.0])?;
                let mut ok = true;
                for index in BasisIndex::all() {
                    for m in 0..4 {
                        let expected = if m == 0 { t.get(index) / SQRT2 } else { 0.0 };
                        ok &= (p.get(index, m) - expected).abs() < 1e-13;
                    }
                }
                let support = p.support(1e-13);
                ok &= support.len() == 17 && support.iter().all(|(_, m)| *m == 0);
                Ok(Measurement::boolean(ok))
            },
        },
        Claim {
            id: "ancilla.kron",
            description: "outer-product coherences match direct traces of rho_UPB (x) rho_a",
            paper_ref: "carrier of the 3-qubit entanglement",
            run: |_| {
                let upb = rho_upb();
                let t = to_coherence(&upb)?;
                let mut d = Vec::new();
                for ancilla in [
                    CMatrix::identity(2).scale_re(0.5),
                    CMatrix::outer(&crate::pauli::KetSymbol::Zero.vector()),
                ] {
                    let via = coherence_product(&t, qubit_coherence(&ancilla))?;
                    let direct = coherence4_of_matrix(&upb.matrix().kron(&ancilla))?;
                    d.push(via.max_abs_diff(&direct));
                }
                Ok(Measurement::eq(d, 0.0, 1e-13))
            },
        },
        Claim {
            id: "bloch.rotation",
            description: "each phi local Bloch vector is the psi vector rotated by pi about y",
            paper_ref: "Bloch vectors of the orbit's separable decompositions",
            run: |_| {
                let rows = bloch_rows()?;
                let lookup = |family: &str, member: usize, qubit: usize| {
                    rows.iter()
                        .find(|r| r.family.starts_with(family) && r.member == member && r.qubit == qubit)
                        .map(|r| r.vector)
                        .expect("row present")
                };
                let mut ok = true;
                for member in 1..=3 {
                    for qubit in 1..=3 {
                        let [x, y, z] = lookup("psi", member, qubit);
                        let rotated = [-x, y, -z];
                        let phi = lookup("phi", member, qubit);
                        ok &= rotated.iter().zip(phi).all(|(a, b)| (a - b).abs() < 1e-12);
                    }
                }
                Ok(Measurement::boolean(ok))
            },
        },
    ]
}

fn rodrigues_claim(axis: RodriguesAxis, cfg: &RunConfig) -> Result<Measurement> {
    let h = match axis {
        RodriguesAxis::Z333 => HamiltonianSpec::stage_one(),
        RodriguesAxis::Y222 => HamiltonianSpec::orbit(),
    };
    let mut dev = Vec::new();
    for rho in [rho_sep(), rho_upb()] {
        let t0 = to_coherence(&rho)?;
        for k in 0..33 {
            let t = TAU_P * k as f64 / 32.0;
            let closed = rodrigues_flow(axis, t, &t0);
            let matrix = to_coherence(&flow(&h, t, &rho)?)?;
            dev.push(closed.max_abs_diff(&matrix));
        }
    }
    Ok(Measurement::eq(dev, 0.0, cfg.tolerances.flow))
}

/// Ids of every claim in report order.
pub fn claim_ids() -> Vec<&'static str> {
    let mut ids: Vec<_> = claims().iter().map(|c| c.id).collect();
    ids.sort_unstable();
    ids
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<ClaimReport>,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.status != Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn get(&self, claim_id: &str) -> Option<&ClaimReport> {
        self.reports.iter().find(|r| r.claim_id == claim_id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.reports).expect("reports serialize") + "\n"
    }
}

/// Runs every selected claim; errors inside a claim turn it into a failure.
/// Writes the JSON report when `json_path` is set.
pub fn run_claims(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let mut reports: Vec<ClaimReport> = claims()
        .into_iter()
        .map(|claim| {
            let base = |status, m: Measurement| ClaimReport {
                claim_id: claim.id.to_string(),
                description: claim.description.to_string(),
                paper_ref: claim.paper_ref.to_string(),
                status,
                comparison: m.comparison,
                measured: m.measured,
                expected: m.expected,
                tolerance: m.tolerance,
                message: m.message,
            };
            if !config.selects(claim.id) {
                return base(
                    Status::Skip,
                    Measurement::new(Comparison::Eq, Value::None, Value::None, 0.0),
                );
            }
            match (claim.run)(config) {
                Ok(m) => {
                    let status = if m.passes() { Status::Pass } else { Status::Fail };
                    base(status, m)
                }
                Err(e) => base(
                    Status::Fail,
                    Measurement::new(Comparison::Eq, Value::None, Value::None, 0.0).with_message(e.to_string()),
                ),
            }
        })
        .collect();
    reports.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    let outcome = RunOutcome { reports };
    if let Some(path) = &config.json_path {
        write_file(path, &outcome.to_json())?;
    }
    Ok(outcome)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// 17 significant digits; negative zero is printed as zero.
pub fn fmt_float(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

pub fn orbit_csv(samples: &[OrbitSample]) -> String {
    let mut out = String::from("t");
    for name in ORBIT_THREE_COHERENCES {
        write!(out, ",rho{name}").expect("string write");
    }
    for prefix in ["min_pt_orb", "min_pt_refl"] {
        for cut in ["1_23", "2_13", "3_12"] {
            write!(out, ",{prefix}_{cut}").expect("string write");
        }
    }
    out.push_str(",rank_orb,rank_refl\n");
    for s in samples {
        let mut fields = vec![fmt_float(s.t)];
        fields.extend(s.three_coherences().iter().map(|v| fmt_float(*v)));
        fields.extend(
            s.min_pt_eigs
                .iter()
                .chain(&s.reflected_min_pt_eigs)
                .map(|v| fmt_float(*v)),
        );
        fields.push(s.rank.to_string());
        fields.push(s.reflected_rank.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn emit_orbit_csv(config: &RunConfig, path: &Path) -> Result<Vec<OrbitSample>> {
    config.validate()?;
    let samples = orbit(config.orbit_samples)?;
    write_file(path, &orbit_csv(&samples))?;
    Ok(samples)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochRow {
    pub family: &'static str,
    pub member: usize,
    pub qubit: usize,
    pub vector: [f64; 3],
}

/// Local Bloch vectors `tr(rho_q sigma_i)` of the separable decompositions
/// met along the orbit.
pub fn bloch_rows() -> Result<Vec<BlochRow>> {
    let families = [
        ("psi@t=0", KetFamily::Psi),
        ("theta@t=tau_p/4", KetFamily::Theta),
        ("phi@t=tau_p/2", KetFamily::Phi),
    ];
    let mut rows = Vec::new();
    for (family, kets) in families {
        for (m, ket) in kets.kets().iter().enumerate() {
            let rho: DensityMatrix = ket.projector();
            for q in 1..=3 {
                let local = qubit_coherence(&reduced_density(&rho, &[q])?);
                // tr(rho sigma_i) = sqrt2 tr(rho lambda_i)
                let vector = [local[1] * SQRT2, local[2] * SQRT2, local[3] * SQRT2];
                rows.push(BlochRow {
                    family,
                    member: m + 1,
                    qubit: q,
                    vector,
                });
            }
        }
    }
    Ok(rows)
}

pub fn bloch_csv(rows: &[BlochRow]) -> String {
    let mut out = String::from("family,member,qubit,bloch_x,bloch_y,bloch_z\n");
    for r in rows {
        let [x, y, z] = r.vector.map(fmt_float);
        writeln!(out, "{},{},{},{x},{y},{z}", r.family, r.member, r.qubit).expect("string write");
    }
    out
}

pub fn emit_bloch_csv(path: &Path) -> Result<Vec<BlochRow>> {
    let rows = bloch_rows()?;
    write_file(path, &bloch_csv(&rows))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_have_expected_support() {
        let t = upb_table();
        assert_eq!(t.homogeneous().filter(|(_, v)| *v > 0.0).count(), 10);
        assert_eq!(t.homogeneous().filter(|(_, v)| *v < 0.0).count(), 6);
        assert_eq!(t.homogeneous().filter(|(_, v)| *v == 0.0).count(), 47);
        // the quarter-period table flips the 3-coherences and swaps 4 of them
        let q = quarter_orbit_table();
        assert_eq!(q.homogeneous().filter(|(_, v)| *v != 0.0).count(), 16);
    }

    #[test]
    fn measurement_comparisons() {
        assert!(Measurement::eq(vec![1.0, 1.0 + 1e-13], 1.0, 1e-12).passes());
        assert!(!Measurement::eq(vec![1.0, 1.1], 1.0, 1e-12).passes());
        assert!(Measurement::eq(vec![1.0, 1.0], vec![1.0], 0.0).passes());
        assert!(!Measurement::eq(vec![1.0, 1.0, 1.0], vec![1.0, 1.0], 0.0).passes());
        assert!(Measurement::new(Comparison::Ge, -1e-13, 0.0, 1e-12).passes());
        assert!(!Measurement::new(Comparison::Ge, -1e-11, 0.0, 1e-12).passes());
        assert!(Measurement::new(Comparison::Lt, vec![-1.0, -0.5], 0.0, 0.0).passes());
        assert!(!Measurement::new(Comparison::Gt, 0.0, 0.0, 0.0).passes());
        assert!(Measurement::boolean(true).passes());
        assert!(!Measurement::boolean(false).passes());
        assert!(!Measurement::eq(f64::NAN, 0.0, 1.0).passes());
    }

    #[test]
    fn filter_is_anchored() {
        let cfg = RunConfig::default().with_filter("lhv.*").unwrap();
        assert!(cfg.selects("lhv.triples_upb"));
        assert!(!cfg.selects("orbit.rank"));
        let cfg = RunConfig::default().with_filter("rank").unwrap();
        assert!(!cfg.selects("orbit.rank"));
        assert!(RunConfig::default().with_filter("(").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::default();
        cfg.tolerances.flow = 0.0;
        assert!(matches!(run_claims(&cfg), Err(Error::Config(_))));
        let cfg = RunConfig {
            orbit_samples: 1,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(-0.0), fmt_float(0.0));
        assert_eq!(fmt_float(0.25), "2.5000000000000000e-1");
        let parsed: f64 = fmt_float(X).parse().unwrap();
        assert_eq!(parsed, X);
    }

    #[test]
    fn claim_ids_are_unique() {
        let ids = claim_ids();
        let mut dedup = ids.clone();
        dedup.dedup();
        assert_eq!(ids, dedup);
        for id in ["upb.spectrum", "prep.endpoint", "prep.byproduct_unique", "ppt.orbit"] {
            assert!(ids.contains(&id), "{id}");
        }
    }
}
