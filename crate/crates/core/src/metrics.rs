//! Fidelity and entanglement diagnostics.
//!
//! Three fidelities cover the experiments: overlap with the target Bell
//! state for distributed two-qubit states, the identity-identity chi
//! element as process fidelity, and the standard average gate fidelity
//! derived from it. Entanglement of two-qubit states is decided with the
//! partial-transpose (PPT) criterion, which is exact in dimension 2 x 2.

use serde::{Deserialize, Serialize};

use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::{bell_state, DensityMatrix, QcoreError};
use crate::scalar::Scalar;
use crate::tomography::repr::ChiMatrix;

/// Minimum partial-transpose eigenvalues within this of zero cannot be
/// called either way; beyond it on the negative side means entangled.
const ENTANGLEMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("expected a two-qubit state (dimension 4), got dimension {dim}")]
    NotTwoQubit { dim: usize },
    #[error("subsystem index {index} is out of range for {count} subsystems")]
    BadSubsystem { index: usize, count: usize },
    #[error(transparent)]
    Core(#[from] QcoreError),
}

/// Which fidelity a [`FidelityReport`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityKind {
    StateOverlap,
    Process,
    Average,
}

/// A fidelity value together with what it was measured against. Values
/// from virtual (non-completely-positive) channels may leave [0, 1]; they
/// are admitted as plain linear-functional evaluations and flagged.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityReport<T> {
    pub value: T,
    pub kind: FidelityKind,
    pub target: String,
    pub flags: Vec<String>,
}

impl<T: Scalar> FidelityReport<T> {
    fn new(value: T, kind: FidelityKind, target: &str) -> Self {
        FidelityReport {
            value,
            kind,
            target: target.to_string(),
            flags: Vec::new(),
        }
    }

    fn flag_if_non_physical(mut self, non_physical: bool) -> Self {
        if non_physical {
            self.flags.push("non-physical".to_string());
        }
        self
    }
}

/// Overlap of a two-qubit state with the Bell state (|00> + |11>)/sqrt(2).
pub fn bell_fidelity<T: Scalar>(
    rho: &DensityMatrix<T>,
) -> Result<FidelityReport<T>, MetricsError> {
    if rho.dim() != 4 {
        return Err(MetricsError::NotTwoQubit { dim: rho.dim() });
    }
    let projector = bell_state::<T>().density();
    let value = rho.expectation(projector.matrix()).re;
    Ok(FidelityReport::new(
        value,
        FidelityKind::StateOverlap,
        "Bell state (|00> + |11>)/sqrt(2)",
    ))
}

/// Process fidelity with the noiseless channel: the real identity-identity
/// chi element. Virtual channels are admitted and flagged when their chi
/// matrix is not positive semidefinite.
pub fn process_fidelity_to_identity<T: Scalar>(chi: &ChiMatrix<T>) -> FidelityReport<T> {
    let value = chi.identity_element();
    let non_physical = chi.min_eigenvalue() < T::real(-1e-9);
    FidelityReport::new(value, FidelityKind::Process, "identity channel")
        .flag_if_non_physical(non_physical)
}

/// Average gate fidelity (dim * F_process + 1) / (dim + 1). `dim` is the
/// Hilbert-space dimension the chi matrix describes.
pub fn average_fidelity<T: Scalar>(chi: &ChiMatrix<T>, dim: usize) -> FidelityReport<T> {
    debug_assert_eq!(dim, chi.dim(), "chi matrix does not describe dimension");
    let d = T::from_usize(dim).unwrap();
    let process = process_fidelity_to_identity(chi);
    let value = (d * process.value + T::one()) / (d + T::one());
    FidelityReport::new(value, FidelityKind::Average, "identity channel")
        .flag_if_non_physical(!process.flags.is_empty())
}

/// Transpose one tensor factor of a multipartite state. The result is
/// Hermitian with the same trace but need not be positive.
pub fn partial_transpose<T: Scalar>(
    rho: &DensityMatrix<T>,
    subsystem_dims: &[usize],
    transposed: usize,
) -> Result<ComplexMatrix<T>, MetricsError> {
    partial_transpose_entries(rho.matrix(), subsystem_dims, transposed)
}

fn partial_transpose_entries<T: Scalar>(
    source: &ComplexMatrix<T>,
    subsystem_dims: &[usize],
    transposed: usize,
) -> Result<ComplexMatrix<T>, MetricsError> {
    let total: usize = subsystem_dims.iter().product();
    if subsystem_dims.is_empty() || total != source.rows() || !source.is_square() {
        return Err(MetricsError::Core(QcoreError::DimensionMismatch {
            context: "subsystem dims do not factor the state dimension",
        }));
    }
    if transposed >= subsystem_dims.len() {
        return Err(MetricsError::BadSubsystem {
            index: transposed,
            count: subsystem_dims.len(),
        });
    }
    // Stride of the transposed subsystem's index in the flat basis label.
    let stride: usize = subsystem_dims[transposed + 1..].iter().product();
    let dt = subsystem_dims[transposed];
    // Replace the transposed subsystem's digit in a flat label.
    let rebuild = move |full: usize, replacement: usize| {
        full - ((full / stride) % dt) * stride + replacement * stride
    };
    let out = ComplexMatrix::from_fn(total, total, |r, c| {
        let (rt, ct) = ((r / stride) % dt, (c / stride) % dt);
        source[(rebuild(r, ct), rebuild(c, rt))]
    });
    Ok(out)
}

/// Entanglement verdict from the minimum partial-transpose eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementVerdict {
    Entangled,
    Separable,
    /// The minimum eigenvalue sits inside the tolerance band around the
    /// decision threshold; the data cannot distinguish the two.
    IndeterminateAtTolerance,
}

/// Ascending partial-transpose spectrum of a two-qubit state plus the PPT
/// verdict, which is necessary and sufficient in dimension 2 x 2.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PptReport<T> {
    pub eigenvalues: Vec<T>,
    pub min_eigenvalue: T,
    pub verdict: EntanglementVerdict,
}

impl<T: Scalar> PptReport<T> {
    pub fn entangled(&self) -> bool {
        self.verdict == EntanglementVerdict::Entangled
    }
}

/// Eigenvalues of the partial transpose of a two-qubit state, ascending,
/// with the entanglement verdict.
pub fn ppt_eigenvalues<T: Scalar>(rho: &DensityMatrix<T>) -> Result<PptReport<T>, MetricsError> {
    if rho.dim() != 4 {
        return Err(MetricsError::NotTwoQubit { dim: rho.dim() });
    }
    let pt = partial_transpose(rho, &[2, 2], 1)?;
    let eigenvalues = pt.hermitian_eigen().eigenvalues;
    let min_eigenvalue = eigenvalues[0];
    let tolerance = T::real(ENTANGLEMENT_TOLERANCE);
    let verdict = if min_eigenvalue < -tolerance {
        EntanglementVerdict::Entangled
    } else if min_eigenvalue > tolerance {
        EntanglementVerdict::Separable
    } else {
        EntanglementVerdict::IndeterminateAtTolerance
    };
    Ok(PptReport {
        eigenvalues,
        min_eigenvalue,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::channel::random;
    use crate::qcore::{depolarizing_channel, KrausChannel};

    fn isotropic(p: f64) -> DensityMatrix<f64> {
        let bell = bell_state::<f64>().density();
        let mixed = DensityMatrix::maximally_mixed(4);
        DensityMatrix::new_clamped(
            bell.matrix()
                .scale_real(p)
                .add(&mixed.matrix().scale_real(1.0 - p)),
        )
        .unwrap()
    }

    #[test]
    fn bell_fidelity_examples() {
        let bell = bell_state::<f64>().density();
        assert!((bell_fidelity(&bell).unwrap().value - 1.0).abs() < 1e-14);
        let mixed = DensityMatrix::<f64>::maximally_mixed(4);
        assert!((bell_fidelity(&mixed).unwrap().value - 0.25).abs() < 1e-14);
        assert!((bell_fidelity(&isotropic(0.33)).unwrap().value - 0.4975).abs() < 1e-12);
        assert!(matches!(
            bell_fidelity(&DensityMatrix::<f64>::maximally_mixed(2)),
            Err(MetricsError::NotTwoQubit { dim: 2 })
        ));
    }

    #[test]
    fn bell_fidelity_is_linear_along_the_isotropic_line() {
        for k in 0..50 {
            let p = k as f64 / 49.0;
            let got = bell_fidelity(&isotropic(p)).unwrap().value;
            assert!((got - (p + (1.0 - p) / 4.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_fidelity_reads_off_the_identity_probability() {
        let mut rng = random::rng(60, 0);
        let bell = bell_state::<f64>().density();
        let id = KrausChannel::<f64>::identity(2);
        for _ in 0..20 {
            let ch = random::pauli_channel::<f64>(1, &mut rng);
            let distributed = ch.to_kraus().tensor(&id).apply(&bell).unwrap();
            let f = bell_fidelity(&distributed).unwrap().value;
            assert!((f - ch.identity_prob()).abs() < 1e-12);
        }
    }

    #[test]
    fn process_and_average_fidelity_examples() {
        let id_chi = ChiMatrix::<f64>::from_pauli_channel(
            &crate::qcore::PauliChannel::identity(1),
        );
        assert!((process_fidelity_to_identity(&id_chi).value - 1.0).abs() < 1e-14);
        assert!((average_fidelity(&id_chi, 2).value - 1.0).abs() < 1e-14);

        let depo = depolarizing_channel::<f64>(0.5).unwrap();
        let chi = ChiMatrix::from_pauli_channel(&depo);
        let process = process_fidelity_to_identity(&chi);
        assert!((process.value - 0.625).abs() < 1e-14);
        assert!(process.flags.is_empty());
        assert!((average_fidelity(&chi, 2).value - 0.75).abs() < 1e-14);

        // Virtual-purified depolarizing noise.
        let virt = crate::purify::virtual_pauli_probs(&depo);
        let virt_chi = ChiMatrix::from_pauli_channel(&virt);
        let avg = average_fidelity(&virt_chi, 2);
        assert!((avg.value - (2.0 * (0.390625 / 0.4375) + 1.0) / 3.0).abs() < 1e-12);
        assert!((avg.value - 0.9285714285714286).abs() < 1e-12);
    }

    #[test]
    fn purified_mixed_pair_process_fidelity() {
        let bf = crate::qcore::bit_flip_channel::<f64>(0.5).unwrap();
        let pf = crate::qcore::phase_flip_channel::<f64>(0.5).unwrap();
        let (plus, _, _) = crate::purify::two_channel_purified_probs(&bf, &pf).unwrap();
        let chi = ChiMatrix::from_pauli_channel(&plus);
        assert!((process_fidelity_to_identity(&chi).value - 0.600).abs() < 1e-12);
    }

    #[test]
    fn non_physical_chi_is_flagged() {
        let entries = ComplexMatrix::from_fn(4, 4, |r, c| {
            if r != c {
                return num_complex::Complex::new(0.0, 0.0);
            }
            num_complex::Complex::new([1.1, -0.1, 0.0, 0.0][r], 0.0)
        });
        let chi = ChiMatrix::<f64>::from_entries(1, entries).unwrap();
        let report = process_fidelity_to_identity(&chi);
        assert!((report.value - 1.1).abs() < 1e-14);
        assert_eq!(report.flags, vec!["non-physical".to_string()]);
        assert!(!average_fidelity(&chi, 2).flags.is_empty());
    }

    #[test]
    fn partial_transpose_examples() {
        let mut rng = random::rng(61, 0);
        let a = random::density_matrix::<f64>(2, &mut rng);
        let b = random::density_matrix::<f64>(3, &mut rng);
        let product = a.tensor(&b);
        let pt = partial_transpose(&product, &[2, 3], 1).unwrap();
        let expected = crate::qcore::tensor_product(a.matrix(), &b.matrix().transpose());
        assert!(pt.max_abs_diff(&expected) < 1e-14);
        // Transposing a product state keeps it a state.
        assert!(pt.hermitian_eigen().eigenvalues[0] > -1e-12);

        let bell_pt = partial_transpose(&bell_state::<f64>().density(), &[2, 2], 1).unwrap();
        let eigs = bell_pt.hermitian_eigen().eigenvalues;
        assert!((eigs[0] + 0.5).abs() < 1e-13);
        for e in &eigs[1..] {
            assert!((e - 0.5).abs() < 1e-13);
        }

        let mixed = DensityMatrix::<f64>::maximally_mixed(4);
        let mpt = partial_transpose(&mixed, &[2, 2], 0).unwrap();
        assert!(mpt.max_abs_diff(mixed.matrix()) < 1e-15);
    }

    #[test]
    fn partial_transpose_is_a_trace_preserving_involution() {
        let mut rng = random::rng(62, 0);
        for _ in 0..10 {
            let rho = random::density_matrix::<f64>(8, &mut rng);
            for sub in [0usize, 1, 2] {
                let once = partial_transpose(&rho, &[2, 2, 2], sub).unwrap();
                assert!(once.hermiticity_residual() < 1e-12);
                assert!((once.trace().re - 1.0).abs() < 1e-12);
                // The intermediate need not be positive, so the second
                // application goes through the raw entries.
                let again = partial_transpose_entries(&once, &[2, 2, 2], sub).unwrap();
                assert!(again.max_abs_diff(rho.matrix()) < 1e-13);
            }
        }
    }

    #[test]
    fn partial_transpose_rejects_bad_layouts() {
        let rho = DensityMatrix::<f64>::maximally_mixed(4);
        assert!(partial_transpose(&rho, &[2, 3], 0).is_err());
        assert!(matches!(
            partial_transpose(&rho, &[2, 2], 2),
            Err(MetricsError::BadSubsystem { index: 2, count: 2 })
        ));
    }

    #[test]
    fn ppt_examples() {
        let report = ppt_eigenvalues(&isotropic(0.33)).unwrap();
        let expect = [0.0025, 0.3325, 0.3325, 0.3325];
        for (got, want) in report.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(report.verdict, EntanglementVerdict::Separable);
        assert!(!report.entangled());

        let bell_report = ppt_eigenvalues(&bell_state::<f64>().density()).unwrap();
        assert!((bell_report.min_eigenvalue + 0.5).abs() < 1e-13);
        assert!(bell_report.entangled());

        let mixed_report =
            ppt_eigenvalues(&DensityMatrix::<f64>::maximally_mixed(4)).unwrap();
        assert_eq!(mixed_report.verdict, EntanglementVerdict::Separable);
        for e in &mixed_report.eigenvalues {
            assert!((e - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn ppt_boundary_is_indeterminate() {
        let report = ppt_eigenvalues(&isotropic(1.0 / 3.0)).unwrap();
        assert_eq!(report.verdict, EntanglementVerdict::IndeterminateAtTolerance);
        assert!(report.min_eigenvalue.abs() < 1e-12);
        let f = bell_fidelity(&isotropic(1.0 / 3.0)).unwrap().value;
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn entanglement_threshold_matches_bell_fidelity_on_the_isotropic_family() {
        for k in 0..30 {
            // Stay off the p = 1/3 boundary.
            let p = 0.02 + 0.96 * k as f64 / 29.0;
            if (p - 1.0 / 3.0).abs() < 0.02 {
                continue;
            }
            let rho = isotropic(p);
            let f = bell_fidelity(&rho).unwrap().value;
            let entangled = ppt_eigenvalues(&rho).unwrap().entangled();
            assert_eq!(f > 0.5, entangled, "mismatch at p = {p}");
        }
    }

    #[test]
    fn report_serialization_shape() {
        let depo = depolarizing_channel::<f64>(0.5).unwrap();
        let chi = ChiMatrix::from_pauli_channel(&depo);
        let report = process_fidelity_to_identity(&chi);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["kind"], "process");
        assert_eq!(json["value"], 0.625);
        assert!(json["flags"].as_array().unwrap().is_empty());
        let verdict = serde_json::to_value(EntanglementVerdict::IndeterminateAtTolerance).unwrap();
        assert_eq!(verdict, "indeterminate-at-tolerance");
    }

    #[test]
    fn distributed_state_check_via_channel_application() {
        // One-sided depolarizing noise on a Bell pair lands exactly on the
        // isotropic line.
        let bell = bell_state::<f64>().density();
        let id = KrausChannel::<f64>::identity(2);
        let depo = depolarizing_channel::<f64>(0.33).unwrap().to_kraus();
        let distributed = depo.tensor(&id).apply(&bell).unwrap();
        assert!(distributed.matrix().max_abs_diff(isotropic(0.33).matrix()) < 1e-14);
    }
}
