//! Named kets and states, the homogeneous-part reflection, set-C membership
//! and the brute-force unextendability check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::pauli::{
    equal_mix, from_coherence, ket_from_string, to_coherence, CoherenceTensor, DensityMatrix, KetSymbol, ProductKet,
    DIM,
};

/// Upper edge of set C: all eigenvalues in `[0, 1/4]`.
pub const SET_C_MAX: f64 = 0.25;
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
pub const PARALLEL_TOL: f64 = 1e-10;
pub const WITNESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KetFamily {
    Psi,
    Mu,
    Theta,
    Phi,
}

impl KetFamily {
    pub const ALL: [Self; 4] = [Self::Psi, Self::Mu, Self::Theta, Self::Phi];

    pub fn labels(self) -> [&'static str; 4] {
        match self {
            Self::Psi => ["01+", "1+0", "+01", "---"],
            Self::Mu => ["01-", "1-0", "-01", "+++"],
            Self::Theta => ["+1-", "-+1", "1-+", "000"],
            Self::Phi => ["10-", "0-1", "-10", "+++"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Psi => "psi",
            Self::Mu => "mu",
            Self::Theta => "theta",
            Self::Phi => "phi",
        }
    }

    pub fn kets(self) -> [ProductKet; 4] {
        self.labels().map(|s| ket_from_string(s).expect("valid literal"))
    }

    /// Equal-weight mixture of the family's projectors.
    pub fn mixture(self) -> DensityMatrix {
        equal_mix(&self.kets())
    }
}

/// Equal-weight mixture of the psi kets.
pub fn rho_sep() -> DensityMatrix {
    KetFamily::Psi.mixture()
}

/// `(I - sum_j |psi_j><psi_j|) / 4`.
pub fn rho_upb() -> DensityMatrix {
    complement_map(&KetFamily::Psi.kets()).expect("psi is an orthogonal 4-set")
}

/// Negates every component except `(0,0,0)`.
pub fn reflect(t: &CoherenceTensor) -> CoherenceTensor {
    t.map_components(|index, v| if index.weight() == 0 { v } else { -v })
}

/// Matrix-level reflection: `tr(rho)/4 * I - rho`.
pub fn reflect_density(rho: &DensityMatrix) -> DensityMatrix {
    let t = to_coherence(rho).expect("density matrices are Hermitian");
    from_coherence(&reflect(&t))
}

/// Negates every component whose indices on the two qubits of `pair`
/// (1-based) are not both identity.
pub fn partial_reflect(t: &CoherenceTensor, pair: &[usize]) -> Result<CoherenceTensor> {
    let (a, b) = match pair {
        [a, b] if a != b && (1..=3).contains(a) && (1..=3).contains(b) => (*a, *b),
        _ => return Err(Error::BadSubset(pair.to_vec())),
    };
    Ok(t.map_components(|index, v| {
        if index.at(a).value() == 0 && index.at(b).value() == 0 {
            v
        } else {
            -v
        }
    }))
}

/// Membership in set C (largest eigenvalue at most 1/4).
pub fn in_set_c(rho: &DensityMatrix) -> Result<bool> {
    let spectrum = linalg::hermitian_eigenvalues(rho.matrix())?;
    Ok(spectrum.max() <= SET_C_MAX + 1e-10)
}

fn check_orthogonal(kets: &[ProductKet]) -> Result<()> {
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate().skip(i + 1) {
            if a.inner(b).norm() > ORTHOGONALITY_TOL {
                return Err(Error::NotOrthogonal(i, j));
            }
        }
    }
    Ok(())
}

/// `(I - sum |k><k|) / 4` for four mutually orthogonal kets.
pub fn complement_map(kets: &[ProductKet]) -> Result<DensityMatrix> {
    if kets.len() != 4 {
        return Err(Error::WrongCount {
            expected: 4,
            got: kets.len(),
        });
    }
    check_orthogonal(kets)?;
    let projectors = kets
        .iter()
        .fold(CMatrix::zeros(DIM), |acc, k| &acc + k.projector().matrix());
    DensityMatrix::new((&CMatrix::identity(DIM) - &projectors).scale_re(0.25))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpbCheckResult {
    pub orthogonal: bool,
    pub all_product: bool,
    pub unextendable: bool,
    pub extension_witness: Option<ProductKet>,
}

fn parallel(a: [Complex64; 2], b: [Complex64; 2]) -> bool {
    let overlap = a[0].conj() * b[0] + a[1].conj() * b[1];
    overlap.norm() > 1.0 - PARALLEL_TOL
}

/// Searches all `3^4` ways of making each member orthogonal to a candidate
/// on one chosen party. A product state orthogonal to every member exists
/// iff, for some assignment, the local vectors assigned to each party are
/// pairwise parallel (qubit parties have a one-dimensional complement).
pub fn check_upb(kets: &[ProductKet]) -> Result<UpbCheckResult> {
    if kets.len() != 4 {
        return Err(Error::WrongCount {
            expected: 4,
            got: kets.len(),
        });
    }
    let orthogonal = check_orthogonal(kets).is_ok();

    for code in 0..81usize {
        let assignment: [usize; 4] = [code % 3, code / 3 % 3, code / 9 % 3, code / 27 % 3];
        let mut witness = [KetSymbol::Zero; 3];
        let feasible = (0..3).all(|party| {
            let members: Vec<&ProductKet> = kets
                .iter()
                .zip(assignment)
                .filter(|(_, p)| *p == party)
                .map(|(k, _)| k)
                .collect();
            let Some(first) = members.first() else {
                return true;
            };
            let ok = members
                .iter()
                .all(|k| parallel(first.local(party + 1), k.local(party + 1)));
            if ok {
                witness[party] = first.symbols()[party].orthogonal();
            }
            ok
        });
        if !feasible {
            continue;
        }
        let candidate = ProductKet::from_symbols(witness);
        if kets.iter().all(|k| k.inner(&candidate).norm() < WITNESS_TOL) {
            return Ok(UpbCheckResult {
                orthogonal,
                all_product: true,
                unextendable: false,
                extension_witness: Some(candidate),
            });
        }
    }
    Ok(UpbCheckResult {
        orthogonal,
        all_product: true,
        unextendable: true,
        extension_witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{idx, reduced_density, BasisIndex, SQRT2};

    const X: f64 = 1.0 / (8.0 * SQRT2);

    #[test]
    fn families_are_orthogonal() {
        for family in KetFamily::ALL {
            assert!(check_orthogonal(&family.kets()).is_ok(), "{}", family.name());
        }
    }

    #[test]
    fn rho_sep_components() {
        let t = to_coherence(&rho_sep()).unwrap();
        assert!((t.get(idx("031")) + X).abs() < 1e-15);
        assert!((t.get(BasisIndex::IDENTITY) - 1.0 / (2.0 * SQRT2)).abs() < 1e-15);
        for (index, v) in t.homogeneous() {
            if index.weight() == 1 {
                assert!(v.abs() < 1e-15, "{index}");
            }
        }
        for q in 1..=3 {
            let r = reduced_density(&rho_sep(), &[q]).unwrap();
            assert!(r.max_abs_diff(&CMatrix::identity(2).scale_re(0.5)) < 1e-15);
        }
    }

    #[test]
    fn upb_is_one_quarter_identity_minus_sep() {
        let lhs = rho_upb();
        let rhs = &CMatrix::identity(8).scale_re(0.25) - rho_sep().matrix();
        assert!(lhs.matrix().max_abs_diff(&rhs) < 1e-15);
        let s = linalg::hermitian_eigenvalues(lhs.matrix()).unwrap();
        assert!(s.min().abs() < 1e-12);
    }

    #[test]
    fn reflection_properties() {
        let sep = to_coherence(&rho_sep()).unwrap();
        let upb = to_coherence(&rho_upb()).unwrap();
        assert!(reflect(&sep).max_abs_diff(&upb) < 1e-15);
        assert_eq!(reflect(&reflect(&sep)), sep);
        let mixed = CoherenceTensor::maximally_mixed();
        assert_eq!(reflect(&mixed), mixed);
        for pair in [[1, 2], [2, 3], [1, 3]] {
            let p = partial_reflect(&sep, &pair).unwrap();
            assert!(p.max_abs_diff(&upb) < 1e-15, "{pair:?}");
            assert_eq!(partial_reflect(&p, &pair).unwrap(), sep);
        }
        assert!(partial_reflect(&sep, &[1]).is_err());
        assert!(partial_reflect(&sep, &[2, 2]).is_err());
        assert!(partial_reflect(&sep, &[1, 4]).is_err());
    }

    #[test]
    fn reflected_single_component_is_not_a_state() {
        let one = KetFamily::Psi.kets()[0].projector();
        let reflected = reflect_density(&one);
        let s = linalg::hermitian_eigenvalues(reflected.matrix()).unwrap();
        assert!((s.min() + 0.75).abs() < 1e-11);
        assert_eq!(s.multiplicity_of(0.25, 1e-11), 7);
        assert!(reflected.validate().is_err());
    }

    #[test]
    fn set_c_membership() {
        assert!(in_set_c(&rho_upb()).unwrap());
        assert!(in_set_c(&rho_sep()).unwrap());
        assert!(in_set_c(&DensityMatrix::maximally_mixed()).unwrap());
        assert!(!in_set_c(&ket_from_string("0+1").unwrap().projector()).unwrap());
    }

    #[test]
    fn complement_map_errors() {
        let kets = KetFamily::Psi.kets();
        assert_eq!(
            complement_map(&kets[..3]),
            Err(Error::WrongCount { expected: 4, got: 3 })
        );
        let mut bad = kets.to_vec();
        bad[3] = kets[0].clone();
        assert!(matches!(complement_map(&bad), Err(Error::NotOrthogonal(_, _))));
        let rho = complement_map(&kets).unwrap();
        assert_eq!(linalg::rank_with_tol(rho.matrix(), 1e-9).unwrap(), 4);
    }

    #[test]
    fn upb_families_unextendable() {
        for family in [KetFamily::Psi, KetFamily::Theta] {
            let r = check_upb(&family.kets()).unwrap();
            assert!(r.orthogonal && r.all_product && r.unextendable, "{}", family.name());
            assert!(r.extension_witness.is_none());
        }
    }

    #[test]
    fn mu_and_phi_are_also_unextendable() {
        // both are local rotations of psi
        for family in [KetFamily::Mu, KetFamily::Phi] {
            assert!(check_upb(&family.kets()).unwrap().unextendable, "{}", family.name());
        }
    }

    #[test]
    fn weakened_set_has_witness() {
        let kets = ["01+", "1+0", "+01", "111"].map(|s| ket_from_string(s).unwrap());
        let r = check_upb(&kets).unwrap();
        assert!(!r.unextendable);
        let w = r.extension_witness.unwrap();
        for k in &kets {
            assert!(k.inner(&w).norm() < 1e-10, "{w} vs {k}");
        }
    }

    #[test]
    fn incomplete_basis_extends() {
        let kets = ["000", "001", "010", "011"].map(|s| ket_from_string(s).unwrap());
        let r = check_upb(&kets).unwrap();
        assert!(r.orthogonal && !r.unextendable);
        assert_eq!(r.extension_witness.unwrap().symbols()[0], KetSymbol::One);
    }
}
