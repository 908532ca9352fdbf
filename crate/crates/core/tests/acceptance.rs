//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//! Runs without the libtest harness so the lines always show up.

use std::process::ExitCode;
use std::time::Instant;

use upb3::dynamics::{
    byproduct_preparation, flow, orbit, prepare_upb, rodrigues_flow, stationarity, HamiltonianSpec, OrbitSample, Order,
    RodriguesAxis, DEFAULT_INTERIOR_SAMPLES, TAU_P,
};
use upb3::entanglement::{builtin_triples, lhv_oracle, min_pt_eigs, triple_value, TripleSet};
use upb3::linalg::{hermitian_eigenvalues, CMatrix};
use upb3::pauli::{
    coherence4_of_matrix, coherence_product, from_coherence, idx, ket_from_string, to_coherence, BasisIndex,
    CoherenceTensor, DensityMatrix, PauliIndex, SQRT2,
};
use upb3::upb::{check_upb, partial_reflect, reflect, reflect_density, rho_sep, rho_upb, KetFamily};
use upb3::Result;

const X: f64 = 1.0 / (8.0 * SQRT2);
const SIGN_TOL: f64 = 1e-8;

type Check = Result<std::result::Result<(), String>>;
type Criterion = (&'static str, fn() -> Check);

fn require(ok: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn table(plus: &[&str], minus: &[&str]) -> CoherenceTensor {
    let mut t = CoherenceTensor::zeros();
    t.set(BasisIndex::IDENTITY, 1.0 / (2.0 * SQRT2));
    plus.iter().for_each(|s| t.set(idx(s), X));
    minus.iter().for_each(|s| t.set(idx(s), -X));
    t
}

fn spectrum_error(rho: &DensityMatrix, target: &[f64]) -> Result<f64> {
    let e = hermitian_eigenvalues(rho.matrix())?.eigenvalues;
    Ok(e.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

fn counts(t: &CoherenceTensor, which: TripleSet) -> Vec<u64> {
    builtin_triples(which)
        .iter()
        .map(|tr| lhv_oracle(&[tr.signed(t, SIGN_TOL)]))
        .collect()
}

fn products(t: &CoherenceTensor, which: TripleSet) -> Vec<f64> {
    builtin_triples(which).iter().map(|tr| triple_value(t, tr)).collect()
}

fn c1_spectrum() -> Check {
    let target = [0.0, 0.0, 0.0, 0.0, 0.25, 0.25, 0.25, 0.25];
    let (u, s) = (
        spectrum_error(&rho_upb(), &target)?,
        spectrum_error(&rho_sep(), &target)?,
    );
    Ok(require(u <= 1e-11 && s <= 1e-11, || {
        format!("max deviation upb {u:e}, sep {s:e}")
    }))
}

fn c2_components() -> Check {
    let expected = table(
        &["031", "033", "103", "111", "133", "303", "310", "313", "330", "331"],
        &["011", "013", "101", "110", "130", "301"],
    );
    let t = to_coherence(&rho_upb())?;
    let zeros = t.homogeneous().filter(|(_, v)| v.abs() <= 1e-13).count();
    let d = t.max_abs_diff(&expected);
    Ok(require(d <= 1e-13 && zeros == 47, || {
        format!("max deviation {d:e}, {zeros} zeros")
    }))
}

fn c3_reflection() -> Check {
    let sep = to_coherence(&rho_sep())?;
    let upb = rho_upb();
    let mut worst = from_coherence(&reflect(&sep)).distance(&upb);
    for pair in [[1, 2], [2, 3], [1, 3]] {
        worst = worst.max(from_coherence(&partial_reflect(&sep, &pair)?).distance(&upb));
    }
    for rho in [rho_sep(), upb.clone()] {
        worst = worst.max(reflect_density(&reflect_density(&rho)).distance(&rho));
    }
    let mut target = [0.25; 8];
    target[0] = -0.75;
    let single = spectrum_error(&reflect_density(&KetFamily::Psi.kets()[0].projector()), &target)?;
    Ok(require(worst < 1e-12 && single <= 1e-11, || {
        format!("distance {worst:e}, single-component spectrum {single:e}")
    }))
}

fn c4_ppt() -> Check {
    let mut worst = min_pt_eigs(&rho_upb())?.into_iter().fold(f64::INFINITY, f64::min);
    let samples = orbit(64)?;
    for s in &samples {
        for e in s.min_pt_eigs.iter().chain(&s.reflected_min_pt_eigs) {
            worst = worst.min(*e);
        }
    }
    Ok(require(worst >= -1e-12 && samples.len() == 64, || {
        format!("min PT eigenvalue {worst:e}")
    }))
}

fn c5_unextendable() -> Check {
    for family in [KetFamily::Psi, KetFamily::Theta] {
        let r = check_upb(&family.kets())?;
        if !(r.orthogonal && r.all_product && r.unextendable) {
            return Ok(Err(format!("{} fails: {r:?}", family.name())));
        }
    }
    let weakened = ["01+", "1+0", "+01", "111"].map(|s| ket_from_string(s).expect("literal"));
    let r = check_upb(&weakened)?;
    let Some(w) = r.extension_witness else {
        return Ok(Err("weakened set has no witness".into()));
    };
    let worst = weakened.iter().map(|k| k.inner(&w).norm()).fold(0.0, f64::max);
    Ok(require(worst < 1e-10, || format!("witness {w} overlap {worst:e}")))
}

fn c6_lhv() -> Check {
    let upb = to_coherence(&rho_upb())?;
    let sep = to_coherence(&rho_sep())?;
    let oq = OrbitSample::at(TAU_P / 4.0)?.tensor;
    let theta = to_coherence(&KetFamily::Theta.mixture())?;
    let x3 = -X * X * X;
    let mut problems = Vec::new();
    for (name, t, which) in [("upb", &upb, TripleSet::Upb), ("oq", &oq, TripleSet::Oq)] {
        let p = products(t, which);
        if p.iter().any(|v| (v - x3).abs() > 1e-12) {
            problems.push(format!("{name} products {p:?}"));
        }
        if counts(t, which).iter().any(|n| *n != 0) {
            problems.push(format!("{name} oracle {:?}", counts(t, which)));
        }
    }
    for (name, t, which) in [("sep", &sep, TripleSet::Upb), ("theta", &theta, TripleSet::Oq)] {
        if products(t, which).iter().any(|v| *v <= 0.0) || counts(t, which).iter().any(|n| *n < 1) {
            problems.push(format!("{name} not consistent"));
        }
    }
    if counts(&upb, TripleSet::Oq).iter().any(|n| *n < 1) {
        problems.push(format!("upb vs quarter triples {:?}", counts(&upb, TripleSet::Oq)));
    }
    Ok(require(problems.is_empty(), || problems.join("; ")))
}

fn c7_preparation() -> Check {
    let upb = rho_upb();
    let standard = prepare_upb(Order::Standard, DEFAULT_INTERIOR_SAMPLES)?;
    let swapped = prepare_upb(Order::Swapped, DEFAULT_INTERIOR_SAMPLES)?;
    let d = [
        standard.endpoint().distance(&upb),
        standard.intermediate().distance(&KetFamily::Mu.mixture()),
        swapped.endpoint().distance(&upb),
        swapped
            .intermediate()
            .distance(&reflect_density(standard.intermediate())),
    ];
    let swapped_products = products(&to_coherence(swapped.intermediate())?, TripleSet::Upb);
    let interior = standard
        .interior_samples
        .iter()
        .chain(&swapped.interior_samples)
        .flat_map(|s| s.min_pt_eigs)
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = d.iter().all(|v| *v <= 1e-10)
        && swapped_products.iter().all(|v| *v < 0.0)
        && interior < -1e-6
        && !standard.interior_samples.is_empty();
    Ok(require(ok, || {
        format!("distances {d:?}, swapped products {swapped_products:?}, worst interior PT eigenvalue {interior:e}")
    }))
}

fn c8_rodrigues() -> Check {
    let mut worst = 0.0f64;
    let mut period = 0.0f64;
    for (axis, h) in [
        (RodriguesAxis::Z333, HamiltonianSpec::stage_one()),
        (RodriguesAxis::Y222, HamiltonianSpec::orbit()),
    ] {
        for rho in [rho_sep(), rho_upb()] {
            let t0 = to_coherence(&rho)?;
            for k in 0..33 {
                let t = TAU_P * k as f64 / 32.0 - TAU_P / 3.0;
                let m = to_coherence(&flow(&h, t, &rho)?)?;
                worst = worst.max(rodrigues_flow(axis, t, &t0).max_abs_diff(&m));
            }
            period = period.max(flow(&h, TAU_P, &rho)?.distance(&rho));
        }
    }
    Ok(require(worst <= 1e-10 && period <= 1e-11, || {
        format!("closed form vs matrix {worst:e}, period {period:e}")
    }))
}

fn c9_orbit() -> Check {
    let samples = orbit(64)?;
    let moving = ["111", "113", "131", "133", "311", "313", "331", "333"].map(idx);
    let start = samples[0].tensor;
    let (mut drift, mut sinus) = (0.0f64, 0.0f64);
    let mut rank_ok = true;
    for s in &samples {
        for i in BasisIndex::all() {
            if !moving.contains(&i) {
                drift = drift.max((s.tensor.get(i) - start.get(i)).abs());
            }
        }
        let (sn, cs) = ((s.t / SQRT2).sin(), (s.t / SQRT2).cos());
        for i in moving {
            let odd_ones = [1, 2, 3].iter().filter(|q| i.at(**q) == PauliIndex::X).count() % 2 == 1;
            // 111, 133, 313, 331 (odd number of 1s) follow cos; 113, 131, 311, 333 follow sin
            let expected = if odd_ones { -X * cs } else { -X * sn };
            sinus = sinus.max((s.tensor.get(i) - expected).abs());
        }
        for t in [&s.tensor, &s.reflected_tensor] {
            let e = hermitian_eigenvalues(from_coherence(t).matrix())?.eigenvalues;
            rank_ok &= e.iter().filter(|v| **v > 0.2).count() == 4 && e.iter().filter(|v| v.abs() < 1e-9).count() == 4;
        }
    }
    let quarter = OrbitSample::at(TAU_P / 4.0)?;
    let table8 = table(
        &["011", "013", "101", "110", "130", "301"],
        &["031", "033", "103", "113", "131", "303", "310", "311", "330", "333"],
    );
    let q_table = quarter.tensor.max_abs_diff(&table8);
    let q_theta = from_coherence(&quarter.reflected_tensor).distance(&KetFamily::Theta.mixture());
    let half = from_coherence(&OrbitSample::at(TAU_P / 2.0)?.tensor).distance(&KetFamily::Phi.mixture());
    let ok = drift <= 1e-12 && sinus <= 1e-11 && rank_ok && q_table <= 1e-12 && q_theta < 1e-12 && half < 1e-12;
    Ok(require(ok, || {
        format!("drift {drift:e}, sinusoid {sinus:e}, rank4 {rank_ok}, quarter table {q_table:e}, theta {q_theta:e}, phi {half:e}")
    }))
}

fn c10_stationarity() -> Check {
    let upb = rho_upb();
    let fixed = stationarity(&HamiltonianSpec::fixed_point(), &upb);
    let mut local = 0.0f64;
    for q in 1..=3 {
        for axis in [PauliIndex::X, PauliIndex::Y, PauliIndex::Z] {
            local = local.max(stationarity(&HamiltonianSpec::local(q, axis), &upb));
        }
    }
    let moving = stationarity(&HamiltonianSpec::orbit(), &upb);
    Ok(require(fixed < 1e-12 && local < 1e-12 && moving > 1e-3, || {
        format!("nine-term {fixed:e}, worst single-qubit {local:e}, Lambda_222 {moving:e}")
    }))
}

fn c11_byproduct() -> Check {
    let r = byproduct_preparation()?;
    let listing: Vec<String> = r
        .candidates
        .iter()
        .map(|c| format!("{} {:.1e}", c.label, c.distance_to_upb))
        .collect();
    let recorded = r.state.distance(&rho_upb()) <= 1e-10;
    Ok(require(r.matched.len() == 1 && recorded, || {
        format!(
            "{} candidates match ({}); recorded {}",
            r.matched.len(),
            listing.join(", "),
            r.matched_label()
        )
    }))
}

fn c12_ancilla() -> Check {
    let upb = rho_upb();
    let t = to_coherence(&upb)?;
    let p = coherence_product(&t, [1.0 / SQRT2, 0.0, 0.0, 0.0])?;
    let direct = coherence4_of_matrix(&upb.matrix().kron(&CMatrix::identity(2).scale_re(0.5)))?;
    let support = p.support(1e-13);
    let inherited: Vec<BasisIndex> = t
        .homogeneous()
        .filter(|(_, v)| v.abs() > 1e-13)
        .map(|(i, _)| i)
        .collect();
    let same_support = support.len() == inherited.len() + 1
        && support
            .iter()
            .all(|(i, m)| *m == 0 && (*i == BasisIndex::IDENTITY || inherited.contains(i)));
    let d = p.max_abs_diff(&direct);
    Ok(require(same_support && d <= 1e-13, || {
        format!("support ok {same_support}, Kronecker deviation {d:e}")
    }))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("UPB spectrum", c1_spectrum),
        ("component match", c2_components),
        ("reflection identities", c3_reflection),
        ("PPT", c4_ppt),
        ("UPB unextendability", c5_unextendable),
        ("LHV violations", c6_lhv),
        ("preparation", c7_preparation),
        ("Rodrigues vs oracle", c8_rodrigues),
        ("orbit structure", c9_orbit),
        ("stationarity", c10_stationarity),
        ("byproduct preparation", c11_byproduct),
        ("ancilla structure", c12_ancilla),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(Ok(())) => println!("PASS {:>2} {name}", n + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", n + 1);
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: error {e}", n + 1);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let fast = elapsed < 10.0;
    println!(
        "{} suite runtime {elapsed:.2}s (limit 10s)",
        if fast { "PASS" } else { "FAIL" }
    );
    println!("{} of {} criteria failed", failed, criteria.len());
    if failed == 0 && fast {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
