//! Iterative maximum-likelihood state and process reconstruction.
//!
//! Both estimators maximize `L = sum_k w_k ln p_k` over the physical set,
//! where `w_k` are observed counts (or Born probabilities for exact
//! records) and `p_k` the model predictions. The state estimator iterates
//! the `R rho R` fixed point; the process estimator iterates the same map
//! on the Choi operator with an exact trace-preservation renormalization
//! after every step. A step that would lower the likelihood is replaced by
//! a diluted one, `(I + eps R)/(1 + eps)`, with `eps` halved until the
//! likelihood is non-decreasing, so the recorded trace never dips.

use crate::qcore::matrix::{tensor_product, ComplexMatrix};
use crate::qcore::DensityMatrix;
use crate::scalar::{Scalar, C};
use crate::tomography::repr::{ChiMatrix, ChoiMatrix};
use crate::tomography::sampling::{CountRecord, Shots};
use crate::tomography::TomographyError;

/// Stopping rule for the fixed-point iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MleOptions<T> {
    pub max_iterations: usize,
    /// Converged once the per-iteration likelihood gain drops below this.
    /// The default is tight because the fixed point is approached linearly:
    /// stopping at a gain of g leaves a parameter error on the order of
    /// sqrt(g), and exact-probability reconstructions are expected to land
    /// within 1e-6 of the truth.
    pub min_gain: T,
}

impl<T: Scalar> Default for MleOptions<T> {
    fn default() -> Self {
        MleOptions {
            max_iterations: 10_000,
            min_gain: T::real(1e-14),
        }
    }
}

/// Iteration diagnostics shared by both estimators.
#[derive(Clone, Debug)]
pub struct MleReport<T> {
    pub iterations: usize,
    pub converged: bool,
    pub final_gain: T,
    /// Accepted log-likelihood after every iteration, starting at the seed;
    /// non-decreasing by construction.
    pub log_likelihood: Vec<T>,
    /// Number of iterations that needed the diluted fallback step.
    pub dilution_events: usize,
}

/// State reconstruction result.
#[derive(Clone, Debug)]
pub struct MleState<T> {
    pub state: DensityMatrix<T>,
    pub report: MleReport<T>,
}

/// Process reconstruction result.
#[derive(Clone, Debug)]
pub struct MleProcess<T> {
    pub chi: ChiMatrix<T>,
    pub choi: ChoiMatrix<T>,
    pub report: MleReport<T>,
    /// Distance of the reconstructed Choi partial trace from the identity.
    pub tp_residual: T,
}

/// Measurement operators and their observed weights.
struct Dataset<T> {
    ops: Vec<ComplexMatrix<T>>,
    weights: Vec<T>,
}

fn trace_product<T: Scalar>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> C<T> {
    let mut acc = T::czero();
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc
}

impl<T: Scalar> Dataset<T> {
    fn probabilities(&self, x: &ComplexMatrix<T>) -> Vec<T> {
        self.ops
            .iter()
            .map(|m| trace_product(m, x).re.max(T::min_positive_value()))
            .collect()
    }

    fn log_likelihood(&self, probs: &[T]) -> T {
        let mut l = T::zero();
        for (w, p) in self.weights.iter().zip(probs) {
            if *w > T::zero() {
                l += *w * p.ln();
            }
        }
        l
    }

    fn r_operator(&self, probs: &[T]) -> ComplexMatrix<T> {
        let dim = self.ops[0].rows();
        let mut r = ComplexMatrix::zeros(dim, dim);
        for ((m, w), p) in self.ops.iter().zip(&self.weights).zip(probs) {
            if *w > T::zero() {
                r = r.add(&m.scale_real(*w / *p));
            }
        }
        r
    }

    /// Rank of the span of the measurement operators, from the spectrum of
    /// their Gram matrix.
    fn span_rank(&self) -> usize {
        let m = self.ops.len();
        let gram = ComplexMatrix::from_fn(m, m, |k, l| {
            // Frobenius inner product tr(M_k^dag M_l).
            let a = self.ops[k].entries();
            let b = self.ops[l].entries();
            a.iter()
                .zip(b)
                .fold(T::czero(), |acc, (x, y)| acc + x.conj() * *y)
        });
        let eig = gram.hermitian_eigen();
        let max = eig.eigenvalues.last().copied().unwrap_or_else(T::zero);
        if max <= T::zero() {
            return 0;
        }
        let cut = max * T::real(1e-10);
        eig.eigenvalues.iter().filter(|&&e| e > cut).count()
    }
}

struct IterationOutcome<T> {
    x: ComplexMatrix<T>,
    report: MleReport<T>,
}

/// Shared ascent loop. `step` applies one (possibly diluted) update
/// operator to the current iterate and renormalizes it.
fn run_fixed_point<T: Scalar>(
    data: &Dataset<T>,
    x0: ComplexMatrix<T>,
    options: &MleOptions<T>,
    mut step: impl FnMut(&ComplexMatrix<T>, &ComplexMatrix<T>) -> ComplexMatrix<T>,
) -> IterationOutcome<T> {
    let dim = x0.rows();
    let mut x = x0;
    let mut l = data.log_likelihood(&data.probabilities(&x));
    let mut trace = vec![l];
    let mut converged = false;
    let mut final_gain = T::zero();
    let mut dilution_events = 0usize;
    let mut iterations = 0usize;

    for _ in 0..options.max_iterations {
        let probs = data.probabilities(&x);
        let r = data.r_operator(&probs);
        let mut candidate = step(&x, &r);
        let mut l_new = data.log_likelihood(&data.probabilities(&candidate));
        if l_new < l {
            dilution_events += 1;
            let mut eps = T::one();
            let mut improved = false;
            while eps > T::real(1e-18) {
                let r_eps = ComplexMatrix::identity(dim)
                    .add(&r.scale_real(eps))
                    .scale_real(T::one() / (T::one() + eps));
                candidate = step(&x, &r_eps);
                l_new = data.log_likelihood(&data.probabilities(&candidate));
                if l_new >= l {
                    improved = true;
                    break;
                }
                eps *= T::real(0.5);
            }
            if !improved {
                // No ascent left at numerical resolution.
                converged = true;
                final_gain = T::zero();
                break;
            }
        }
        iterations += 1;
        x = candidate;
        final_gain = l_new - l;
        l = l_new;
        trace.push(l);
        if final_gain < options.min_gain {
            converged = true;
            break;
        }
    }

    IterationOutcome {
        x,
        report: MleReport {
            iterations,
            converged,
            final_gain,
            log_likelihood: trace,
            dilution_events,
        },
    }
}

/// Reject mixed finite/exact data sets and empty ones.
fn check_statistics_mode(records: &[CountRecord]) -> Result<(), TomographyError> {
    if records.is_empty() {
        return Err(TomographyError::EmptyRecords);
    }
    let exact = matches!(records[0].shots, Shots::Exact);
    if records
        .iter()
        .any(|r| matches!(r.shots, Shots::Exact) != exact)
    {
        return Err(TomographyError::InconsistentRecords {
            context: "records mix finite and exact statistics",
        });
    }
    Ok(())
}

fn record_weight(record: &CountRecord, label: &str) -> f64 {
    record.counts.get(label).copied().unwrap_or(0.0)
}

fn check_outcome_labels(record: &CountRecord) -> Result<(), TomographyError> {
    let n = record.setting.basis.len();
    for label in record.counts.keys() {
        if label.len() != n || !label.chars().all(|c| c == '0' || c == '1') {
            return Err(TomographyError::BadRecord {
                message: format!("outcome '{label}' is not a {n}-bit string"),
            });
        }
    }
    Ok(())
}

fn state_dataset<T: Scalar>(
    records: &[CountRecord],
) -> Result<(Dataset<T>, usize), TomographyError> {
    check_statistics_mode(records)?;
    let n = records[0].setting.basis.len();
    let mut ops = Vec::new();
    let mut weights = Vec::new();
    for record in records {
        if record.setting.prep.is_some() {
            return Err(TomographyError::InconsistentRecords {
                context: "state records must not carry preparations",
            });
        }
        if record.setting.basis.len() != n {
            return Err(TomographyError::InconsistentRecords {
                context: "state records must share one qubit count",
            });
        }
        check_outcome_labels(record)?;
        for (label, effect) in record.setting.effects::<T>() {
            weights.push(T::real(record_weight(record, &label)));
            ops.push(effect);
        }
    }
    let total: T = weights.iter().copied().sum();
    if total <= T::zero() {
        return Err(TomographyError::BadRecord {
            message: "records contain no counts".into(),
        });
    }
    Ok((Dataset { ops, weights }, 1 << n))
}

fn process_dataset<T: Scalar>(records: &[CountRecord]) -> Result<Dataset<T>, TomographyError> {
    check_statistics_mode(records)?;
    let mut ops = Vec::new();
    let mut weights = Vec::new();
    for record in records {
        let prep = record.setting.prep.ok_or(TomographyError::InconsistentRecords {
            context: "process records must carry preparations",
        })?;
        if record.setting.basis.len() != 1 {
            return Err(TomographyError::InconsistentRecords {
                context: "process records must measure one qubit",
            });
        }
        check_outcome_labels(record)?;
        let rho_t = prep.state::<T>().density().matrix().transpose();
        for (label, effect) in record.setting.effects::<T>() {
            // Measuring effect E after preparing rho probes tr(C (E (x) rho^T)).
            weights.push(T::real(record_weight(record, &label)));
            ops.push(tensor_product(&effect, &rho_t));
        }
    }
    let total: T = weights.iter().copied().sum();
    if total <= T::zero() {
        return Err(TomographyError::BadRecord {
            message: "records contain no counts".into(),
        });
    }
    Ok(Dataset { ops, weights })
}

/// Partial trace over the leading (output) factor of a d^2 x d^2 matrix.
fn trace_out_first<T: Scalar>(x: &ComplexMatrix<T>, d: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(d, d, |j, k| {
        (0..d).fold(T::czero(), |acc, i| acc + x[(i * d + j, i * d + k)])
    })
}

/// Maximum-likelihood density matrix from projective count records.
pub fn mle_state<T: Scalar>(
    records: &[CountRecord],
    options: &MleOptions<T>,
) -> Result<MleState<T>, TomographyError> {
    let (data, dim) = state_dataset::<T>(records)?;
    let rank = data.span_rank();
    if rank < dim * dim {
        return Err(TomographyError::Underdetermined {
            rank,
            needed: dim * dim,
        });
    }
    let seed = ComplexMatrix::identity(dim)
        .scale_real(T::one() / T::from_usize(dim).unwrap());
    let outcome = run_fixed_point(&data, seed, options, |x, r| {
        let y = r.matmul(x).matmul(r);
        let tr = y.trace().re;
        y.scale_real(T::one() / tr.max(T::min_positive_value()))
    });
    Ok(MleState {
        state: DensityMatrix::new_clamped(outcome.x)?,
        report: outcome.report,
    })
}

/// Maximum-likelihood single-qubit process from prepare-and-measure count
/// records, trace preservation enforced at every iteration.
pub fn mle_process<T: Scalar>(
    records: &[CountRecord],
    options: &MleOptions<T>,
) -> Result<MleProcess<T>, TomographyError> {
    let data = process_dataset::<T>(records)?;
    let rank = data.span_rank();
    if rank < 16 {
        return Err(TomographyError::Underdetermined { rank, needed: 16 });
    }
    // Seed with the fully depolarizing channel's Choi operator I/d.
    let seed = ComplexMatrix::identity(4).scale_real(T::real(0.5));
    let id_out = ComplexMatrix::<T>::identity(2);
    let outcome = run_fixed_point(&data, seed, options, |c, r| {
        let x = r.matmul(c).matmul(r);
        let lambda = trace_out_first(&x, 2);
        // Pseudo-inverse square root keeps the step exact on the support.
        let floor = lambda.trace().re.max(T::zero()) * T::real(1e-14);
        let s = lambda.hermitian_map(|e| {
            if e > floor && e > T::zero() {
                T::one() / e.sqrt()
            } else {
                T::zero()
            }
        });
        let renorm = tensor_product(&id_out, &s);
        renorm.matmul(&x).matmul(&renorm)
    });
    let choi = ChoiMatrix::from_entries(2, outcome.x)?;
    let chi = ChiMatrix::from_choi(&choi)?;
    let tp_residual = choi.trace_preservation_residual();
    Ok(MleProcess {
        chi,
        choi,
        report: outcome.report,
        tp_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::channel::random;
    use crate::qcore::{bell_state, depolarizing_channel, DensityMatrix};
    use crate::tomography::repr::chi_from_channel;
    use crate::tomography::sampling::{
        simulate_process_tomography, simulate_state_tomography, Axis, Shots,
    };

    fn assert_non_decreasing(trace: &[f64]) {
        for w in trace.windows(2) {
            assert!(w[1] >= w[0], "likelihood dipped: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn state_recovery_from_exact_records() {
        let mut rng = random::rng(31, 0);
        let truth = random::density_matrix::<f64>(2, &mut rng);
        let records = simulate_state_tomography(&truth, Shots::Exact, 0).unwrap();
        let fit = mle_state(&records, &MleOptions::default()).unwrap();
        assert!(fit.report.converged);
        assert_non_decreasing(&fit.report.log_likelihood);
        assert!(fit.state.matrix().max_abs_diff(truth.matrix()) < 1e-6);
    }

    #[test]
    fn two_qubit_state_recovery() {
        // Interior two-qubit state: a Bell state softened with white noise.
        let bell = bell_state::<f64>().density();
        let mixed = DensityMatrix::new_clamped(
            bell.matrix()
                .scale_real(0.9)
                .add(&ComplexMatrix::identity(4).scale_real(0.025)),
        )
        .unwrap();
        let records = simulate_state_tomography(&mixed, Shots::Exact, 0).unwrap();
        let fit = mle_state(&records, &MleOptions::default()).unwrap();
        assert_non_decreasing(&fit.report.log_likelihood);
        assert!(fit.state.matrix().max_abs_diff(mixed.matrix()) < 1e-5);
    }

    #[test]
    fn state_recovery_from_finite_records() {
        let mut rng = random::rng(33, 0);
        let truth = random::density_matrix::<f64>(2, &mut rng);
        let records = simulate_state_tomography(&truth, Shots::Finite(100_000), 5).unwrap();
        let fit = mle_state(&records, &MleOptions::default()).unwrap();
        assert_non_decreasing(&fit.report.log_likelihood);
        assert!(fit.state.matrix().max_abs_diff(truth.matrix()) < 0.02);
    }

    #[test]
    fn state_estimator_rejects_bad_record_sets() {
        assert!(matches!(
            mle_state::<f64>(&[], &MleOptions::default()),
            Err(TomographyError::EmptyRecords)
        ));

        let truth = DensityMatrix::<f64>::maximally_mixed(2);
        let mut records = simulate_state_tomography(&truth, Shots::Exact, 0).unwrap();
        // Only the Z setting: informationally incomplete.
        records.retain(|r| r.setting.basis == [Axis::Z]);
        assert!(matches!(
            mle_state::<f64>(&records, &MleOptions::default()),
            Err(TomographyError::Underdetermined { rank: 2, needed: 4 })
        ));

        // Process records cannot feed the state estimator.
        let ch = depolarizing_channel::<f64>(0.5).unwrap().to_kraus();
        let process_records = simulate_process_tomography(&ch, Shots::Exact, 0).unwrap();
        assert!(matches!(
            mle_state::<f64>(&process_records, &MleOptions::default()),
            Err(TomographyError::InconsistentRecords { .. })
        ));
    }

    #[test]
    fn process_recovery_from_exact_records() {
        let truth = depolarizing_channel::<f64>(0.5).unwrap();
        let records =
            simulate_process_tomography(&truth.to_kraus(), Shots::Exact, 0).unwrap();
        let fit = mle_process(&records, &MleOptions::default()).unwrap();
        assert!(fit.report.converged);
        assert_non_decreasing(&fit.report.log_likelihood);
        assert!(fit.tp_residual < 1e-9);
        assert!(fit.choi.min_eigenvalue() > -1e-9);
        let target = chi_from_channel(&truth.to_kraus()).unwrap();
        let err = fit.chi.entries().max_abs_diff(target.entries());
        assert!(err < 1e-6, "chi error {err}");
    }

    #[test]
    fn process_recovery_of_a_generic_channel() {
        // Four Kraus operators give a full-rank Choi matrix, keeping the
        // likelihood optimum in the interior where convergence is linear.
        let mut rng = random::rng(37, 0);
        let truth = random::cptp_channel::<f64>(2, 4, &mut rng);
        let records = simulate_process_tomography(&truth, Shots::Exact, 0).unwrap();
        let fit = mle_process(&records, &MleOptions::default()).unwrap();
        assert_non_decreasing(&fit.report.log_likelihood);
        let target = chi_from_channel(&truth).unwrap();
        let err = fit.chi.entries().max_abs_diff(target.entries());
        assert!(err < 1e-6, "chi error {err}");
    }

    #[test]
    fn process_recovery_from_finite_records() {
        let truth = depolarizing_channel::<f64>(0.5).unwrap();
        let records =
            simulate_process_tomography(&truth.to_kraus(), Shots::Finite(100_000), 11).unwrap();
        let fit = mle_process(&records, &MleOptions::default()).unwrap();
        assert_non_decreasing(&fit.report.log_likelihood);
        assert!((fit.chi.identity_element() - 0.625).abs() < 0.02);
    }

    #[test]
    fn process_estimator_rejects_state_records() {
        let truth = DensityMatrix::<f64>::maximally_mixed(2);
        let records = simulate_state_tomography(&truth, Shots::Exact, 0).unwrap();
        assert!(matches!(
            mle_process::<f64>(&records, &MleOptions::default()),
            Err(TomographyError::InconsistentRecords { .. })
        ));
    }

    #[test]
    fn mixed_statistics_modes_are_rejected() {
        let truth = DensityMatrix::<f64>::maximally_mixed(2);
        let mut records = simulate_state_tomography(&truth, Shots::Exact, 0).unwrap();
        let mut finite = simulate_state_tomography(&truth, Shots::Finite(10), 0).unwrap();
        records.append(&mut finite);
        assert!(matches!(
            mle_state::<f64>(&records, &MleOptions::default()),
            Err(TomographyError::InconsistentRecords { .. })
        ));
    }

    #[test]
    fn reconstruction_error_shrinks_with_shots() {
        let truth = depolarizing_channel::<f64>(0.5).unwrap();
        let target = chi_from_channel(&truth.to_kraus()).unwrap();
        let mut errors = Vec::new();
        for shots in [1_000u64, 100_000u64] {
            let records =
                simulate_process_tomography(&truth.to_kraus(), Shots::Finite(shots), 3).unwrap();
            let fit = mle_process(&records, &MleOptions::default()).unwrap();
            errors.push(fit.chi.entries().max_abs_diff(target.entries()));
        }
        assert!(errors[1] < errors[0]);
    }

}
