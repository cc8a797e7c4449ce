//! Jones-calculus model of the polarization optics.
//!
//! Conventions, fixed jointly by the phase-gate identity and the wave-plate
//! settings table below (the hardware fixes behavior, not conventions):
//!
//! - Jones vectors live in the (H, V) basis, H first.
//! - `hwp(theta)` = i * [[cos 2t, sin 2t], [sin 2t, -cos 2t]], so HWP^2 = -I.
//! - `qwp(theta)` = R(t) diag(e^{-i pi/4}, e^{i pi/4}) R(-t) with R the real
//!   rotation matrix.
//! - With these, QWP(pi/4) HWP(t) QWP(pi/4) = diag(e^{-iT}, e^{iT}) with
//!   T = 2(t - pi/4) exactly, and the settings table reproduces the Pauli
//!   gates up to a global phase.
//!
//! The beam-splitter model follows the hardware description: per
//! polarization a 2x2 spatial unitary with reflectance/transmittance
//! amplitudes and three phases. [`solve_compensation`] finds the phase-tuner
//! settings that turn the interferometer into a spatial Hadamard gate for
//! both polarizations at once, and [`verify_spatial_hadamard`] checks the
//! composite end to end.

use serde::{Deserialize, Serialize};

use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::Pauli;
use crate::scalar::Scalar;
use crate::C;

/// A 2x2 complex operator on the (H, V) polarization basis.
pub type JonesMatrix<T> = ComplexMatrix<T>;

#[derive(Debug, thiserror::Error)]
pub enum OpticsError {
    #[error("axis has norm {norm}, expected a unit vector")]
    NonUnitAxis { norm: f64 },
    #[error("beam splitter is not lossless: R + T = {sum}, R = {reflectance}")]
    NotLossless { sum: f64, reflectance: f64 },
    #[error(
        "phase compensation needs a balanced splitter (R = T = 1/2), got R = {reflectance}, T = {transmittance}"
    )]
    UnsupportedConfiguration { reflectance: f64, transmittance: f64 },
    #[error("wave-plate chain is empty")]
    EmptyChain,
}

/// Photon polarization label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// One wave plate: which element and its fast-axis angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePlateSetting<T> {
    pub element: PlateKind,
    pub angle: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlateKind {
    Hwp,
    Qwp,
}

impl<T: Scalar> WavePlateSetting<T> {
    pub fn hwp(angle: T) -> Self {
        WavePlateSetting {
            element: PlateKind::Hwp,
            angle,
        }
    }

    pub fn qwp(angle: T) -> Self {
        WavePlateSetting {
            element: PlateKind::Qwp,
            angle,
        }
    }

    pub fn matrix(&self) -> JonesMatrix<T> {
        match self.element {
            PlateKind::Hwp => hwp(self.angle),
            PlateKind::Qwp => qwp(self.angle),
        }
    }
}

/// Half-wave plate with fast axis at `theta`.
pub fn hwp<T: Scalar>(theta: T) -> JonesMatrix<T> {
    let (c, s) = ((theta + theta).cos(), (theta + theta).sin());
    ComplexMatrix::from_rows(vec![
        vec![C::new(T::zero(), c), C::new(T::zero(), s)],
        vec![C::new(T::zero(), s), C::new(T::zero(), -c)],
    ])
    .expect("fixed 2x2 shape")
}

/// Quarter-wave plate with fast axis at `theta`.
pub fn qwp<T: Scalar>(theta: T) -> JonesMatrix<T> {
    let (c, s) = (theta.cos(), theta.sin());
    let rot = ComplexMatrix::from_rows(vec![
        vec![C::new(c, T::zero()), C::new(-s, T::zero())],
        vec![C::new(s, T::zero()), C::new(c, T::zero())],
    ])
    .expect("fixed 2x2 shape");
    let quarter = T::FRAC_PI_4();
    let retarder = ComplexMatrix::from_rows(vec![
        vec![C::<T>::new(quarter.cos(), -quarter.sin()), T::czero()],
        vec![T::czero(), C::<T>::new(quarter.cos(), quarter.sin())],
    ])
    .expect("fixed 2x2 shape");
    rot.matmul(&retarder).matmul(&rot.transpose())
}

/// Ordered product of wave plates, first element applied first.
pub fn waveplate_chain<T: Scalar>(
    settings: &[WavePlateSetting<T>],
) -> Result<JonesMatrix<T>, OpticsError> {
    let mut iter = settings.iter();
    let first = iter.next().ok_or(OpticsError::EmptyChain)?;
    let mut m = first.matrix();
    for s in iter {
        m = s.matrix().matmul(&m);
    }
    Ok(m)
}

/// Qubit rotation by `theta` about the Bloch axis `n`:
/// cos(theta/2) I + sin(theta/2) (n_x (-iX) + n_y (-iY) + n_z (-iZ)).
pub fn rotation_from_axis_angle<T: Scalar>(
    n: [T; 3],
    theta: T,
) -> Result<JonesMatrix<T>, OpticsError> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - T::one()).abs() > T::real(1e-9) {
        return Err(OpticsError::NonUnitAxis {
            norm: norm.as_f64(),
        });
    }
    let half = theta * T::real(0.5);
    let (c, s) = (half.cos(), half.sin());
    let mut m = ComplexMatrix::<T>::identity(2).scale(C::new(c, T::zero()));
    for (axis, weight) in [Pauli::X, Pauli::Y, Pauli::Z].into_iter().zip(n) {
        m = m.add(&axis.matrix::<T>().scale(C::new(T::zero(), -(s * weight))));
    }
    Ok(m)
}

/// Beam-splitter parameters: shared reflectance/transmittance plus three
/// phases per polarization (global, transmission, reflection), radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsPhases<T> {
    pub reflectance: T,
    pub transmittance: T,
    pub phi0_h: T,
    pub phi0_v: T,
    pub phi_tau_h: T,
    pub phi_tau_v: T,
    pub phi_rho_h: T,
    pub phi_rho_v: T,
}

impl<T: Scalar> BsPhases<T> {
    /// Balanced lossless splitter with all phases zero.
    pub fn balanced() -> Self {
        let half = T::real(0.5);
        BsPhases {
            reflectance: half,
            transmittance: half,
            phi0_h: T::zero(),
            phi0_v: T::zero(),
            phi_tau_h: T::zero(),
            phi_tau_v: T::zero(),
            phi_rho_h: T::zero(),
            phi_rho_v: T::zero(),
        }
    }

    /// Check losslessness: R + T = 1 within 1e-12 and both nonnegative.
    pub fn validate(&self) -> Result<(), OpticsError> {
        let sum = self.reflectance + self.transmittance;
        if (sum - T::one()).abs() > T::real(1e-12)
            || self.reflectance < T::zero()
            || self.transmittance < T::zero()
        {
            return Err(OpticsError::NotLossless {
                sum: sum.as_f64(),
                reflectance: self.reflectance.as_f64(),
            });
        }
        Ok(())
    }

    fn phi0(&self, pol: Polarization) -> T {
        match pol {
            Polarization::H => self.phi0_h,
            Polarization::V => self.phi0_v,
        }
    }

    fn phi_tau(&self, pol: Polarization) -> T {
        match pol {
            Polarization::H => self.phi_tau_h,
            Polarization::V => self.phi_tau_v,
        }
    }

    fn phi_rho(&self, pol: Polarization) -> T {
        match pol {
            Polarization::H => self.phi_rho_h,
            Polarization::V => self.phi_rho_v,
        }
    }
}

/// Beam-splitter unitary on the two spatial modes for one polarization:
/// e^{i phi0} [[sqrt(R) e^{i phi_tau},  sqrt(T) e^{i phi_rho}],
///             [-sqrt(T) e^{-i phi_rho}, sqrt(R) e^{-i phi_tau}]].
pub fn bs_unitary<T: Scalar>(phases: &BsPhases<T>, pol: Polarization) -> ComplexMatrix<T> {
    let (sr, st) = (phases.reflectance.sqrt(), phases.transmittance.sqrt());
    let (p0, pt, pr) = (phases.phi0(pol), phases.phi_tau(pol), phases.phi_rho(pol));
    let ph = |amp: T, angle: T| C::<T>::new(amp * angle.cos(), amp * angle.sin());
    let m = ComplexMatrix::from_rows(vec![
        vec![ph(sr, pt), ph(st, pr)],
        vec![-ph(st, -pr), ph(sr, -pt)],
    ])
    .expect("fixed 2x2 shape");
    m.scale(ph(T::one(), p0))
}

/// Phase-tuner settings that make the interferometer a spatial Hadamard.
/// theta1/theta2 are birefringent tuners on input paths 0/1 (H picks up
/// e^{-i theta}, V picks up e^{+i theta}), theta3/theta4 the same on the
/// output paths, and delta is the splitter tilt phase on input path 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compensation<T> {
    pub theta1: T,
    pub theta2: T,
    pub theta3: T,
    pub theta4: T,
    pub delta: T,
}

/// Wrap a phase into the canonical range (-pi, pi].
pub fn canonical_phase<T: Scalar>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x % two_pi;
    if y > T::PI() {
        y -= two_pi;
    } else if y <= -T::PI() {
        y += two_pi;
    }
    y
}

/// Solve the compensation phases for a balanced splitter. theta1 is a free
/// parameter of the constraint system (only differences are pinned) and is
/// set to 0; all results are reported in (-pi, pi].
pub fn solve_compensation<T: Scalar>(
    phases: &BsPhases<T>,
) -> Result<Compensation<T>, OpticsError> {
    phases.validate()?;
    let half = T::real(0.5);
    if (phases.reflectance - half).abs() > T::real(1e-12)
        || (phases.transmittance - half).abs() > T::real(1e-12)
    {
        return Err(OpticsError::UnsupportedConfiguration {
            reflectance: phases.reflectance.as_f64(),
            transmittance: phases.transmittance.as_f64(),
        });
    }
    let theta1 = T::zero();
    // Input side: theta1 - theta2 + delta = phi_rho_h + phi_tau_h + pi and
    // theta1 - theta2 - delta = -(phi_rho_v + phi_tau_v) + pi, solved as a
    // linear system.
    let gap = (phases.phi_rho_h + phases.phi_tau_h - phases.phi_rho_v - phases.phi_tau_v) * half
        + T::PI();
    let theta2 = canonical_phase(theta1 - gap);
    let delta = canonical_phase(
        (phases.phi_rho_h + phases.phi_tau_h + phases.phi_rho_v + phases.phi_tau_v) * half,
    );
    // Output side: cancel the residual H-V phase difference on each path.
    let theta3 = canonical_phase(
        (phases.phi0_h + phases.phi_tau_h - phases.phi0_v - phases.phi_tau_v) * half - theta1,
    );
    let theta4 = canonical_phase(
        (phases.phi0_h + phases.phi_rho_h - phases.phi0_v - phases.phi_rho_v) * half - theta1,
    );
    Ok(Compensation {
        theta1,
        theta2,
        theta3,
        theta4,
        delta,
    })
}

/// Outcome of checking the compensated interferometer against the ideal
/// polarization-independent spatial Hadamard.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HadamardCheck<T> {
    /// True when the composite factorizes as identity-on-polarization
    /// tensor (diagonal phases times Hadamard) within 1e-10.
    pub passes: bool,
    /// Largest deviation over all factorization checks.
    pub residual: T,
    /// How far the H-polarization spatial block is from (phases x Hadamard).
    pub spatial_residual_h: T,
    /// Same for the V block.
    pub spatial_residual_v: T,
    /// Probability that a spatial |+> input exits on path 0.
    pub plus_path0_probability: T,
}

/// Compose phase tuners, tilt, and the beam splitter on the joint
/// polarization (x) spatial space (polarization most significant) and test
/// whether the result is a spatial Hadamard for both polarizations at once.
pub fn verify_spatial_hadamard<T: Scalar>(
    phases: &BsPhases<T>,
    comp: &Compensation<T>,
) -> HadamardCheck<T> {
    let unit = |angle: T| C::<T>::new(angle.cos(), angle.sin());
    // Basis order: H path0, H path1, V path0, V path1.
    let pre = [
        unit(-comp.theta1),
        unit(comp.delta - comp.theta2),
        unit(comp.theta1),
        unit(comp.delta + comp.theta2),
    ];
    let post = [
        unit(-comp.theta3),
        unit(-comp.theta4),
        unit(comp.theta3),
        unit(comp.theta4),
    ];
    // The splitter acts on incoming modes; the hardware convention writes
    // its matrix on outgoing ones, so each polarization block enters the
    // chain transposed.
    let bh = bs_unitary(phases, Polarization::H).transpose();
    let bv = bs_unitary(phases, Polarization::V).transpose();
    let mut m = ComplexMatrix::<T>::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = post[r] * bh[(r, c)] * pre[c];
            m[(2 + r, 2 + c)] = post[2 + r] * bv[(r, c)] * pre[2 + c];
        }
    }

    let h = T::creal(std::f64::consts::FRAC_1_SQRT_2);
    let hadamard =
        ComplexMatrix::from_rows(vec![vec![h, h], vec![h, -h]]).expect("fixed 2x2 shape");
    let block = |row0: usize| {
        ComplexMatrix::from_fn(2, 2, |r, c| m[(row0 + r, row0 + c)])
    };
    let (mh, mv) = (block(0), block(2));

    // Each block should be (diagonal unit phases) * Hadamard.
    let spatial_residual = |b: &ComplexMatrix<T>| {
        let q = b.matmul(&hadamard);
        let mut residual = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                let dev = if r == c {
                    (q[(r, c)].norm() - T::one()).abs()
                } else {
                    q[(r, c)].norm()
                };
                if dev > residual {
                    residual = dev;
                }
            }
        }
        residual
    };
    let spatial_residual_h = spatial_residual(&mh);
    let spatial_residual_v = spatial_residual(&mv);

    // Full factorization: the V block must be the H block up to one global
    // phase, extracted at the largest-magnitude H entry.
    let mut idx = (0usize, 0usize);
    for r in 0..2 {
        for c in 0..2 {
            if mh[(r, c)].norm() > mh[(idx.0, idx.1)].norm() {
                idx = (r, c);
            }
        }
    }
    let ratio = mv[(idx.0, idx.1)] / mh[(idx.0, idx.1)];
    let scale = ratio.norm();
    let phase = if scale > T::zero() {
        ratio / C::<T>::new(scale, T::zero())
    } else {
        T::cone()
    };
    let factor_residual = mv.sub(&mh.scale(phase)).max_norm();

    let residual = spatial_residual_h
        .max(spatial_residual_v)
        .max(factor_residual);
    // Normalized input: polarization (|H> + |V>)/sqrt(2), spatial |+>.
    let plus_both = vec![T::creal(0.5); 4];
    let out = m.apply_vec(&plus_both);
    let plus_path0_probability = out[0].norm_sqr() + out[2].norm_sqr();
    HadamardCheck {
        passes: residual <= T::real(1e-10),
        residual,
        spatial_residual_h,
        spatial_residual_v,
        plus_path0_probability,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::channel::random;
    use crate::qcore::KrausChannel;
    use num_complex::Complex;
    use rand::Rng;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    /// Largest entry deviation after removing one global phase, extracted
    /// at the largest-magnitude target entry.
    fn diff_up_to_phase(got: &ComplexMatrix<f64>, target: &ComplexMatrix<f64>) -> f64 {
        let mut idx = (0usize, 0usize);
        for r in 0..target.rows() {
            for c in 0..target.cols() {
                if target[(r, c)].norm() > target[(idx.0, idx.1)].norm() {
                    idx = (r, c);
                }
            }
        }
        let ratio = got[(idx.0, idx.1)] / target[(idx.0, idx.1)];
        let phase = ratio / Complex::new(ratio.norm(), 0.0);
        got.max_abs_diff(&target.scale(phase))
    }

    fn wrap(x: f64) -> f64 {
        canonical_phase(x)
    }

    #[test]
    fn wave_plates_are_unitary() {
        let mut rng = random::rng(70, 0);
        for _ in 0..20 {
            let theta = (rng.gen::<f64>() - 0.5) * 8.0;
            assert!(hwp(theta).unitarity_residual() < 1e-12);
            assert!(qwp(theta).unitarity_residual() < 1e-12);
            // This convention squares the half-wave plate to -I.
            let sq = hwp(theta).matmul(&hwp(theta));
            assert!(sq.add(&ComplexMatrix::identity(2)).max_norm() < 1e-12);
        }
    }

    #[test]
    fn hwp_at_22_5_degrees_rotates_h_to_diagonal() {
        let out = hwp(deg(22.5)).apply_vec(&[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
        let ratio = out[1] / out[0];
        assert!((ratio - Complex::new(1.0, 0.0)).norm() < 1e-12);
        assert!((out[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn phase_gate_identity_holds_for_all_angles() {
        let mut rng = random::rng(71, 0);
        for _ in 0..100 {
            let theta = (rng.gen::<f64>() - 0.5) * 12.0;
            let got = qwp(std::f64::consts::FRAC_PI_4)
                .matmul(&hwp(theta))
                .matmul(&qwp(std::f64::consts::FRAC_PI_4));
            let phase = 2.0 * (theta - std::f64::consts::FRAC_PI_4);
            let want = ComplexMatrix::from_rows(vec![
                vec![Complex::from_polar(1.0, -phase), Complex::new(0.0, 0.0)],
                vec![Complex::new(0.0, 0.0), Complex::from_polar(1.0, phase)],
            ])
            .unwrap();
            assert!(got.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn pauli_settings_table() {
        let i = Complex::new(0.0, 1.0);
        let rows: [(&[WavePlateSetting<f64>; 3], ComplexMatrix<f64>); 4] = [
            (
                &[
                    WavePlateSetting::qwp(0.0),
                    WavePlateSetting::hwp(0.0),
                    WavePlateSetting::qwp(0.0),
                ],
                ComplexMatrix::identity(2),
            ),
            (
                &[
                    WavePlateSetting::qwp(0.0),
                    WavePlateSetting::hwp(deg(45.0)),
                    WavePlateSetting::qwp(0.0),
                ],
                crate::qcore::Pauli::X.matrix::<f64>().scale(-i),
            ),
            (
                &[
                    WavePlateSetting::qwp(0.0),
                    WavePlateSetting::hwp(deg(45.0)),
                    WavePlateSetting::qwp(deg(90.0)),
                ],
                crate::qcore::Pauli::Y.matrix::<f64>().scale(-i),
            ),
            (
                &[
                    WavePlateSetting::qwp(0.0),
                    WavePlateSetting::hwp(0.0),
                    WavePlateSetting::qwp(deg(90.0)),
                ],
                crate::qcore::Pauli::Z.matrix::<f64>().scale(-i),
            ),
        ];
        for (settings, target) in rows {
            let got = waveplate_chain(settings).unwrap();
            assert!(diff_up_to_phase(&got, &target) < 1e-12);
        }
    }

    #[test]
    fn chain_applies_first_element_first() {
        let settings = [WavePlateSetting::<f64>::hwp(deg(22.5)), WavePlateSetting::qwp(deg(10.0))];
        let got = waveplate_chain(&settings).unwrap();
        let want = qwp(deg(10.0)).matmul(&hwp(deg(22.5)));
        assert!(got.max_abs_diff(&want) < 1e-15);
        assert!(matches!(
            waveplate_chain::<f64>(&[]),
            Err(OpticsError::EmptyChain)
        ));
    }

    #[test]
    fn rotation_examples() {
        let id = rotation_from_axis_angle([0.0, 0.0, 1.0], 0.0).unwrap();
        assert!(id.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let x_pi = rotation_from_axis_angle([1.0, 0.0, 0.0], std::f64::consts::PI).unwrap();
        let minus_ix = crate::qcore::Pauli::X
            .matrix::<f64>()
            .scale(Complex::new(0.0, -1.0));
        assert!(x_pi.max_abs_diff(&minus_ix) < 1e-12);

        let z_quarter =
            rotation_from_axis_angle([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2).unwrap();
        let want = ComplexMatrix::identity(2)
            .sub(&crate::qcore::Pauli::Z.matrix::<f64>().scale(Complex::new(0.0, 1.0)))
            .scale(Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        assert!(z_quarter.max_abs_diff(&want) < 1e-12);

        assert!(matches!(
            rotation_from_axis_angle([0.5, 0.0, 0.0], 1.0),
            Err(OpticsError::NonUnitAxis { .. })
        ));
    }

    #[test]
    fn rotation_twirls_to_axis_weighted_flips() {
        let mut rng = random::rng(72, 0);
        for _ in 0..10 {
            let raw = [
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            ];
            let norm = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
            let n = [raw[0] / norm, raw[1] / norm, raw[2] / norm];
            let theta = rng.gen::<f64>() * 6.0 - 3.0;
            let u = rotation_from_axis_angle(n, theta).unwrap();
            assert!(u.unitarity_residual() < 1e-12);
            let twirled = crate::purify::pauli_twirl(&KrausChannel::from_unitary(u).unwrap())
                .unwrap();
            let c2 = (theta / 2.0).cos().powi(2);
            let s2 = (theta / 2.0).sin().powi(2);
            let want = [c2, s2 * n[0] * n[0], s2 * n[1] * n[1], s2 * n[2] * n[2]];
            for (got, want) in twirled.probs().iter().zip(want) {
                assert!((got - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bs_unitary_shapes() {
        let balanced = BsPhases::<f64>::balanced();
        let u = bs_unitary(&balanced, Polarization::H);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = ComplexMatrix::from_rows(vec![
            vec![Complex::new(h, 0.0), Complex::new(h, 0.0)],
            vec![Complex::new(-h, 0.0), Complex::new(h, 0.0)],
        ])
        .unwrap();
        assert!(u.max_abs_diff(&want) < 1e-15);

        let mut rng = random::rng(73, 0);
        for _ in 0..20 {
            let mut phases = BsPhases::<f64>::balanced();
            let mut p = || (rng.gen::<f64>() * 2.0 - 1.0) * std::f64::consts::PI;
            phases.phi0_h = p();
            phases.phi0_v = p();
            phases.phi_tau_h = p();
            phases.phi_tau_v = p();
            phases.phi_rho_h = p();
            phases.phi_rho_v = p();
            for pol in [Polarization::H, Polarization::V] {
                assert!(bs_unitary(&phases, pol).unitarity_residual() < 1e-12);
            }
        }

        let mut mirror = BsPhases::<f64>::balanced();
        mirror.reflectance = 1.0;
        mirror.transmittance = 0.0;
        let diag = bs_unitary(&mirror, Polarization::V);
        assert!(diag[(0, 1)].norm() < 1e-15 && diag[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn lossless_validation() {
        let mut bad = BsPhases::<f64>::balanced();
        bad.transmittance = 0.6;
        assert!(matches!(bad.validate(), Err(OpticsError::NotLossless { .. })));
        assert!(matches!(
            solve_compensation(&bad),
            Err(OpticsError::NotLossless { .. })
        ));

        let mut unbalanced = BsPhases::<f64>::balanced();
        unbalanced.reflectance = 0.6;
        unbalanced.transmittance = 0.4;
        assert!(unbalanced.validate().is_ok());
        assert!(matches!(
            solve_compensation(&unbalanced),
            Err(OpticsError::UnsupportedConfiguration { .. })
        ));
    }

    #[test]
    fn zero_phase_solution() {
        let comp = solve_compensation(&BsPhases::<f64>::balanced()).unwrap();
        assert_eq!(comp.theta1, 0.0);
        assert!(wrap(comp.theta1 - comp.theta2 - std::f64::consts::PI).abs() < 1e-12);
        assert!(comp.delta.abs() < 1e-12);
        let check = verify_spatial_hadamard(&BsPhases::balanced(), &comp);
        assert!(check.passes, "residual {}", check.residual);
        assert!(check.residual <= 1e-10);
        assert!((check.plus_path0_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_phases_solution() {
        let mut phases = BsPhases::<f64>::balanced();
        let q = std::f64::consts::FRAC_PI_2;
        phases.phi_tau_h = q;
        phases.phi_tau_v = q;
        phases.phi_rho_h = q;
        phases.phi_rho_v = q;
        let comp = solve_compensation(&phases).unwrap();
        assert!(wrap(comp.delta - std::f64::consts::PI).abs() < 1e-12);
        assert!(wrap(comp.theta1 - comp.theta2 - std::f64::consts::PI).abs() < 1e-12);
        assert!(verify_spatial_hadamard(&phases, &comp).passes);
    }

    #[test]
    fn solved_compensation_satisfies_the_constraint_system() {
        let mut rng = random::rng(74, 0);
        let pi = std::f64::consts::PI;
        for _ in 0..25 {
            let mut phases = BsPhases::<f64>::balanced();
            let mut p = || (rng.gen::<f64>() * 2.0 - 1.0) * pi;
            phases.phi0_h = p();
            phases.phi0_v = p();
            phases.phi_tau_h = p();
            phases.phi_tau_v = p();
            phases.phi_rho_h = p();
            phases.phi_rho_v = p();
            let comp = solve_compensation(&phases).unwrap();
            for angle in [comp.theta1, comp.theta2, comp.theta3, comp.theta4, comp.delta] {
                assert!(angle > -pi && angle <= pi, "angle {angle} not canonical");
            }
            let r1_h = comp.theta1 - comp.theta2 + comp.delta
                - (phases.phi_rho_h + phases.phi_tau_h + pi);
            let r1_v = comp.theta1 - comp.theta2 - comp.delta
                - (-phases.phi_rho_v - phases.phi_tau_v + pi);
            let r2_path0 = 2.0 * comp.theta3
                - (phases.phi0_h + phases.phi_tau_h - phases.phi0_v - phases.phi_tau_v
                    - 2.0 * comp.theta1);
            let r2_path1 = 2.0 * comp.theta4
                - (phases.phi0_h + phases.phi_rho_h - phases.phi0_v - phases.phi_rho_v
                    - 2.0 * comp.theta1);
            for residual in [r1_h, r1_v, r2_path0, r2_path1] {
                assert!(wrap(residual).abs() < 1e-10);
            }
            let check = verify_spatial_hadamard(&phases, &comp);
            assert!(check.passes, "residual {}", check.residual);
            assert!((check.plus_path0_probability - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn omitting_output_tuners_keeps_the_spatial_marginal() {
        let mut phases = BsPhases::<f64>::balanced();
        phases.phi0_h = 0.4;
        phases.phi0_v = -0.3;
        phases.phi_tau_h = 0.9;
        phases.phi_rho_v = -1.2;
        let solved = solve_compensation(&phases).unwrap();
        let stripped = Compensation {
            theta3: 0.0,
            theta4: 0.0,
            ..solved
        };
        let check = verify_spatial_hadamard(&phases, &stripped);
        assert!(!check.passes);
        assert!(check.residual > 1e-3);
        assert!(check.spatial_residual_h <= 1e-10);
        assert!(check.spatial_residual_v <= 1e-10);
        assert!((check.plus_path0_probability - 1.0).abs() < 1e-10);
    }

    #[test]
    fn canonical_phase_range() {
        let pi = std::f64::consts::PI;
        assert_eq!(canonical_phase(pi), pi);
        assert!((canonical_phase(-pi) - pi).abs() < 1e-15);
        assert!((canonical_phase(3.0 * pi) - pi).abs() < 1e-12);
        assert!(canonical_phase(0.25_f64).abs() - 0.25 < 1e-15);
        let mut rng = random::rng(75, 0);
        for _ in 0..50 {
            let x = (rng.gen::<f64>() - 0.5) * 50.0;
            let y = canonical_phase(x);
            assert!(y > -pi && y <= pi);
            assert!(wrap(x - y).abs() < 1e-12);
            assert!((canonical_phase(y) - y).abs() < 1e-15);
        }
    }

    #[test]
    fn serialization_is_flat() {
        let phases = serde_json::to_value(BsPhases::<f64>::balanced()).unwrap();
        assert_eq!(phases["reflectance"], 0.5);
        assert_eq!(phases["phi_tau_h"], 0.0);
        let comp =
            serde_json::to_value(solve_compensation(&BsPhases::<f64>::balanced()).unwrap())
                .unwrap();
        assert!(comp.get("theta1").is_some());
        assert!(comp.get("delta").is_some());
        let parsed: BsPhases<f64> = serde_json::from_value(phases).unwrap();
        assert_eq!(parsed, BsPhases::<f64>::balanced());
    }
}
