//! Time-dependent Schrödinger propagation.
//!
//! Two routes are provided for two-level problems: direct fourth-order
//! Runge-Kutta on the amplitudes, and integration of the Euler angles
//! (α, β, γ) that parametrize the propagator as
//! `U = e^{iασx} · e^{iβσy} · e^{iγσz}`. Larger systems only have the direct
//! route. All Hamiltonians are angular frequencies (rad/ns); times are ns.

use std::io::Write;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Norm drift above which a run is flagged.
pub const NORM_WARN: f64 = 1e-6;
/// Norm drift above which a run fails.
pub const NORM_FAIL: f64 = 1e-4;
/// Largest phase per step, dt·‖H‖, considered resolved.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;
/// |cos 2β| below which the Euler-angle chart is declared singular.
pub const EULER_SINGULAR: f64 = 1e-6;

/// Normalized state in a 2-, 3- or 4-dimensional basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::Usage(format!(
                "state is not normalized: |psi|^2 = {norm}"
            )));
        }
        Ok(Self(amplitudes))
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Usage(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.0[i]
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

/// A time-indexed Hermitian matrix, rad/ns.
pub trait Hamiltonian {
    fn dim(&self) -> usize;
    fn at(&self, t: f64) -> DMatrix<C64>;
}

/// Adapter for a closure `t ↦ H(t)`.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> DMatrix<C64>> FnHamiltonian<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> DMatrix<C64>> Hamiltonian for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn at(&self, t: f64) -> DMatrix<C64> {
        (self.f)(t)
    }
}

/// Euler angles of a two-level propagator at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub t: f64,
}

impl EulerAngles {
    pub fn identity(t: f64) -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
            t,
        }
    }
}

/// Output of a propagation run, one entry per step including the start.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// `populations[k][i]` is |⟨i|ψ(t_k)⟩|².
    pub populations: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    /// max_k |‖ψ(t_k)‖² − 1|
    pub norm_drift: f64,
    /// Largest dt·‖H‖ seen (‖·‖ = max absolute row sum).
    pub max_phase_per_step: f64,
    pub angles: Option<Vec<EulerAngles>>,
    pub eta: Option<Vec<f64>>,
    /// Set when the drift exceeded [`NORM_WARN`] or the step was too coarse.
    pub flagged: bool,
}

impl PropagationResult {
    pub fn final_state(&self) -> &StateVector {
        self.states
            .last()
            .expect("propagation always records the initial state")
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations
            .last()
            .expect("propagation always records the initial state")
    }

    pub fn population_series(&self, i: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with header `t_ns,pop_0..pop_{n-1},norm[,eta]`, every `stride`-th
    /// sample plus the last. Floats carry 9 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, stride: usize) -> Result<()> {
        let stride = stride.max(1);
        let dim = self.populations.first().map_or(0, Vec::len);
        let mut header = String::from("t_ns");
        for i in 0..dim {
            header.push_str(&format!(",pop_{i}"));
        }
        header.push_str(",norm");
        if self.eta.is_some() {
            header.push_str(",eta");
        }
        writeln!(w, "{header}")?;
        let last = self.len().saturating_sub(1);
        for k in (0..self.len()).filter(|&k| k % stride == 0 || k == last) {
            let mut line = fmt_float(self.times[k]);
            for p in &self.populations[k] {
                line.push(',');
                line.push_str(&fmt_float(*p));
            }
            line.push(',');
            line.push_str(&fmt_float(self.norms[k]));
            if let Some(eta) = &self.eta {
                line.push(',');
                line.push_str(&fmt_float(eta[k]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

pub(crate) fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.8e}")
    }
}

fn step_count(t0: f64, t1: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Usage(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if !(t0 <= t1) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::Usage(format!("bad time window [{t0}, {t1}]")));
    }
    Ok(((t1 - t0) / dt - 1e-9).ceil().max(0.0) as usize)
}

fn row_sum_norm(h: &DMatrix<C64>) -> f64 {
    h.row_iter()
        .map(|r| r.iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Classical RK4 on iψ̇ = Hψ over [t0, t1]. The step is shrunk slightly if
/// needed so that the last sample lands exactly on t1.
pub fn propagate_state<H: Hamiltonian + ?Sized>(
    h: &H,
    psi0: &StateVector,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<PropagationResult> {
    if psi0.dim() != h.dim() {
        return Err(Error::Usage(format!(
            "state dimension {} does not match Hamiltonian dimension {}",
            psi0.dim(),
            h.dim()
        )));
    }
    let n = step_count(t0, t1, dt)?;
    let step = if n == 0 { 0.0 } else { (t1 - t0) / n as f64 };
    let minus_i = C64::new(0.0, -1.0);

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut psi = psi0.0.clone();
    times.push(t0);
    states.push(psi.clone());
    let mut max_phase: f64 = 0.0;

    for k in 0..n {
        let t = t0 + k as f64 * step;
        let h0 = h.at(t);
        let hm = h.at(t + 0.5 * step);
        let h1 = h.at(t + step);
        max_phase = max_phase.max(step * row_sum_norm(&h0));
        let k1 = (&h0 * &psi) * minus_i;
        let k2 = (&hm * (&psi + &k1 * C64::from(0.5 * step))) * minus_i;
        let k3 = (&hm * (&psi + &k2 * C64::from(0.5 * step))) * minus_i;
        let k4 = (&h1 * (&psi + &k3 * C64::from(step))) * minus_i;
        psi += (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(step / 6.0);
        times.push(if k + 1 == n { t1 } else { t + step });
        states.push(psi.clone());
    }

    let norms: Vec<f64> = states.iter().map(|s| s.norm_squared()).collect();
    let norm_drift = norms.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    if norm_drift > NORM_FAIL {
        return Err(Error::Accuracy {
            drift: norm_drift,
            limit: NORM_FAIL,
            dt: step,
        });
    }
    let populations = states
        .iter()
        .map(|s| s.iter().map(|c| c.norm_sqr()).collect())
        .collect();
    Ok(PropagationResult {
        times,
        states: states.into_iter().map(StateVector).collect(),
        populations,
        norms,
        norm_drift,
        max_phase_per_step: max_phase,
        angles: None,
        eta: None,
        flagged: norm_drift > NORM_WARN || max_phase >= MAX_PHASE_PER_STEP,
    })
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Generic driven two-level system
/// H(t) = [A(t) − ω̇(t)/2]·σz + B(t)·σx, with σz = diag(1, −1) in the basis
/// order (first, second). A, B and ω̇ are in rad/ns.
#[derive(Clone)]
pub struct GenericDrive {
    a: ScalarFn,
    b: ScalarFn,
    omega_rate: ScalarFn,
}

impl std::fmt::Debug for GenericDrive {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GenericDrive").finish_non_exhaustive()
    }
}

impl GenericDrive {
    pub fn new(
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64) -> f64 + Send + Sync + 'static,
        omega_rate: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            a: Arc::new(a),
            b: Arc::new(b),
            omega_rate: Arc::new(omega_rate),
        }
    }

    pub fn a(&self, t: f64) -> f64 {
        (self.a)(t)
    }

    pub fn b(&self, t: f64) -> f64 {
        (self.b)(t)
    }

    pub fn omega_rate(&self, t: f64) -> f64 {
        (self.omega_rate)(t)
    }

    /// Coefficient of σz: A − ω̇/2.
    pub fn z_coefficient(&self, t: f64) -> f64 {
        self.a(t) - 0.5 * self.omega_rate(t)
    }

    pub fn matrix(&self, t: f64) -> Matrix2<C64> {
        let z = self.z_coefficient(t);
        let b = self.b(t);
        Matrix2::new(C64::from(z), C64::from(b), C64::from(b), C64::from(-z))
    }
}

impl Hamiltonian for GenericDrive {
    fn dim(&self) -> usize {
        2
    }
    fn at(&self, t: f64) -> DMatrix<C64> {
        let m = self.matrix(t);
        DMatrix::from_iterator(2, 2, m.iter().copied())
    }
}

fn euler_rhs(drive: &GenericDrive, t: f64, y: [f64; 3]) -> Result<[f64; 3]> {
    let [alpha, beta, _] = y;
    let cos2b = (2.0 * beta).cos();
    if cos2b.abs() < EULER_SINGULAR {
        return Err(Error::CoordinateSingularity { t, beta });
    }
    let z = drive.z_coefficient(t);
    let (s2a, c2a) = (2.0 * alpha).sin_cos();
    Ok([
        -z * c2a * (2.0 * beta).tan() - drive.b(t),
        z * s2a,
        -z * c2a / cos2b,
    ])
}

/// Integrate the Euler-angle equations
///
/// ```text
/// α̇ = −[A − ω̇/2] cos 2α tan 2β − B
/// β̇ =  [A − ω̇/2] sin 2α
/// γ̇ = −[A − ω̇/2] cos 2α / cos 2β
/// ```
///
/// from α = β = γ = 0 at t0 with fixed-step RK4. Fails with
/// [`Error::CoordinateSingularity`] when |cos 2β| < 1e-6.
pub fn propagate_euler_angles(
    drive: &GenericDrive,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<EulerAngles>> {
    let n = step_count(t0, t1, dt)?;
    let step = if n == 0 { 0.0 } else { (t1 - t0) / n as f64 };
    let mut y = [0.0; 3];
    let mut out = Vec::with_capacity(n + 1);
    out.push(EulerAngles::identity(t0));
    let axpy =
        |y: [f64; 3], a: f64, k: [f64; 3]| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]];
    for k in 0..n {
        let t = t0 + k as f64 * step;
        let k1 = euler_rhs(drive, t, y)?;
        let k2 = euler_rhs(drive, t + 0.5 * step, axpy(y, 0.5 * step, k1))?;
        let k3 = euler_rhs(drive, t + 0.5 * step, axpy(y, 0.5 * step, k2))?;
        let k4 = euler_rhs(drive, t + step, axpy(y, step, k3))?;
        for i in 0..3 {
            y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = if k + 1 == n { t1 } else { t + step };
        out.push(EulerAngles {
            alpha: y[0],
            beta: y[1],
            gamma: y[2],
            t: t_next,
        });
    }
    Ok(out)
}

/// U = [[cos α, i sin α], [i sin α, cos α]] · [[cos β, sin β], [−sin β, cos β]]
///     · diag(e^{iγ}, e^{−iγ})
pub fn reconstruct_unitary(a: &EulerAngles) -> Matrix2<C64> {
    let i = C64::i();
    let (sa, ca) = a.alpha.sin_cos();
    let (sb, cb) = a.beta.sin_cos();
    let x = Matrix2::new(C64::from(ca), i * sa, i * sa, C64::from(ca));
    let y = Matrix2::new(C64::from(cb), C64::from(sb), C64::from(-sb), C64::from(cb));
    let z = Matrix2::new(
        C64::from_polar(1.0, a.gamma),
        C64::from(0.0),
        C64::from(0.0),
        C64::from_polar(1.0, -a.gamma),
    );
    x * y * z
}

/// (P₁, P₀): probability of leaving |0⟩ and of leaving |1⟩,
/// 1 − |⟨0|U|0⟩|² and 1 − |⟨1|U|1⟩|².
pub fn transfer_probabilities(a: &EulerAngles) -> (f64, f64) {
    let i = C64::i();
    let (sa, ca) = a.alpha.sin_cos();
    let (sb, cb) = a.beta.sin_cos();
    let u00 = ca * cb - i * (sa * sb);
    let u11 = ca * cb + i * (sa * sb);
    (1.0 - u00.norm_sqr(), 1.0 - u11.norm_sqr())
}

/// Amplitudes (C₁, C₂) = U|first⟩ in closed form.
pub fn first_column(a: &EulerAngles) -> (C64, C64) {
    let i = C64::i();
    let (sa, ca) = a.alpha.sin_cos();
    let (sb, cb) = a.beta.sin_cos();
    let phase = C64::from_polar(1.0, a.gamma);
    (
        (ca * cb - i * (sa * sb)) * phase,
        (i * (sa * cb) - ca * sb) * phase,
    )
}

/// Instantaneous eigenbasis of H/ħ = [[0, Ω/2], [Ω/2, Δ]].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticFrame {
    /// Mixing angle θ = ½·atan2(Ω, Δ).
    pub theta: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl AdiabaticFrame {
    /// |λ₊⟩ = sin θ|0⟩ + cos θ|1⟩
    pub fn plus_state(&self) -> [f64; 2] {
        [self.theta.sin(), self.theta.cos()]
    }

    /// |λ₋⟩ = cos θ|0⟩ − sin θ|1⟩
    pub fn minus_state(&self) -> [f64; 2] {
        [self.theta.cos(), -self.theta.sin()]
    }
}

pub fn adiabatic_frame(delta: f64, omega_rabi: f64) -> Result<AdiabaticFrame> {
    if delta == 0.0 && omega_rabi == 0.0 {
        return Err(Error::Singular { t: f64::NAN });
    }
    let root = delta.hypot(omega_rabi);
    Ok(AdiabaticFrame {
        theta: 0.5 * omega_rabi.atan2(delta),
        lambda_plus: 0.5 * (delta + root),
        lambda_minus: 0.5 * (delta - root),
    })
}

/// Final populations predicted by perfect adiabatic following: the basis
/// state `initial` is assigned to the eigenvector it overlaps most at the
/// start, and that eigenvector is read off at the end.
pub fn adiabatic_following(
    start: &AdiabaticFrame,
    end: &AdiabaticFrame,
    initial: usize,
) -> [f64; 2] {
    let plus0 = start.plus_state()[initial].abs();
    let minus0 = start.minus_state()[initial].abs();
    let v = if plus0 >= minus0 {
        end.plus_state()
    } else {
        end.minus_state()
    };
    [v[0] * v[0], v[1] * v[1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn pauli_x(scale: f64) -> DMatrix<C64> {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from(0.0),
                C64::from(scale),
                C64::from(scale),
                C64::from(0.0),
            ],
        )
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let h = FnHamiltonian::new(3, |_| DMatrix::zeros(3, 3));
        let psi0 =
            StateVector::from_slice(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8), C64::from(0.0)])
                .unwrap();
        let r = propagate_state(&h, &psi0, 0.0, 5.0, 0.1).unwrap();
        assert!(r.states.iter().all(|s| s == &psi0));
        assert_eq!(*r.times.last().unwrap(), 5.0);
    }

    #[test]
    fn pi_pulse_inverts() {
        let omega = 0.8;
        let h = FnHamiltonian::new(2, move |_| pauli_x(0.5 * omega));
        let r = propagate_state(
            &h,
            &StateVector::basis(2, 0).unwrap(),
            0.0,
            PI / omega,
            1e-3,
        )
        .unwrap();
        assert!((r.final_populations()[1] - 1.0).abs() < 1e-9);
        assert!(r.norm_drift < NORM_WARN);
        assert!(!r.flagged);
    }

    #[test]
    fn coarse_step_is_accuracy_error() {
        let h = FnHamiltonian::new(2, |_| pauli_x(5.0));
        let err =
            propagate_state(&h, &StateVector::basis(2, 0).unwrap(), 0.0, 50.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }), "{err}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let h = FnHamiltonian::new(2, |_| pauli_x(1.0));
        let psi = StateVector::basis(2, 0).unwrap();
        assert!(propagate_state(&h, &psi, 0.0, 1.0, 0.0).is_err());
        assert!(propagate_state(&h, &psi, 1.0, 0.0, 0.1).is_err());
        assert!(propagate_state(&h, &StateVector::basis(3, 0).unwrap(), 0.0, 1.0, 0.1).is_err());
        assert!(StateVector::from_slice(&[C64::from(1.0), C64::from(1.0)]).is_err());
        assert!(StateVector::basis(2, 2).is_err());
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Smooth Gaussian drive with a chirp; reference from a much finer run.
        let h = FnHamiltonian::new(2, |t: f64| {
            let b = 1.5 * (-(t - 2.0).powi(2) / 1.5).exp();
            let z = 0.7 * (t - 2.0);
            DMatrix::from_row_slice(
                2,
                2,
                &[C64::from(z), C64::from(b), C64::from(b), C64::from(-z)],
            )
        });
        let psi0 = StateVector::basis(2, 0).unwrap();
        let end = |dt: f64| {
            propagate_state(&h, &psi0, 0.0, 4.0, dt)
                .unwrap()
                .final_state()
                .clone()
        };
        let reference = end(1e-4);
        let err = |dt: f64| (end(dt).amplitudes() - reference.amplitudes()).norm();
        let ratio = err(0.04) / err(0.02);
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn euler_trivial_cases() {
        let b = 0.3;
        let drive = GenericDrive::new(|_| 0.25, move |_| b, |_| 0.5);
        let angles = propagate_euler_angles(&drive, 1.0, 6.0, 0.01).unwrap();
        for a in &angles {
            assert!((a.alpha + b * (a.t - 1.0)).abs() < 1e-12);
            assert_eq!(a.beta, 0.0);
            assert_eq!(a.gamma, 0.0);
        }
        let still = GenericDrive::new(|_| 0.0, |_| 0.0, |_| 0.0);
        let last = *propagate_euler_angles(&still, 0.0, 3.0, 0.1)
            .unwrap()
            .last()
            .unwrap();
        assert_eq!(reconstruct_unitary(&last), Matrix2::identity());
    }

    #[test]
    fn euler_singularity_is_reported() {
        // Starting the ODE on the singular chart is a hard error.
        let drive = GenericDrive::new(|_| 1.0, |_| 0.5, |_| 0.0);
        let mut y = [0.0, FRAC_PI_4, 0.0];
        y[1] = FRAC_PI_4;
        assert!(matches!(
            euler_rhs(&drive, 0.0, y),
            Err(Error::CoordinateSingularity { .. })
        ));
    }

    #[test]
    fn euler_matches_direct_for_chirped_drive() {
        let drive = GenericDrive::new(
            |t: f64| 0.2 * t,
            |t: f64| 0.6 * (-t * t / 16.0).exp(),
            |_| 0.1,
        );
        let angles = propagate_euler_angles(&drive, -8.0, 8.0, 1e-3).unwrap();
        let direct =
            propagate_state(&drive, &StateVector::basis(2, 0).unwrap(), -8.0, 8.0, 1e-3).unwrap();
        for (a, s) in angles.iter().zip(&direct.states) {
            let u = reconstruct_unitary(a);
            assert!((u[(0, 0)] - s.amplitude(0)).norm() < 1e-8);
            assert!((u[(1, 0)] - s.amplitude(1)).norm() < 1e-8);
            let (c1, c2) = first_column(a);
            assert!((c1 - u[(0, 0)]).norm() < 1e-12 && (c2 - u[(1, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn unitary_examples() {
        assert_eq!(
            reconstruct_unitary(&EulerAngles::identity(0.0)),
            Matrix2::identity()
        );
        let u = reconstruct_unitary(&EulerAngles {
            alpha: -FRAC_PI_2,
            beta: 0.0,
            gamma: 0.0,
            t: 0.0,
        });
        let minus_i_x = Matrix2::new(C64::from(0.0), -C64::i(), -C64::i(), C64::from(0.0));
        assert!((u - minus_i_x).norm() < 1e-15);
    }

    #[test]
    fn transfer_examples() {
        assert_eq!(
            transfer_probabilities(&EulerAngles::identity(0.0)),
            (0.0, 0.0)
        );
        let (p1, p0) = transfer_probabilities(&EulerAngles {
            alpha: -FRAC_PI_2,
            beta: 0.0,
            gamma: 0.0,
            t: 0.0,
        });
        assert!((p1 - 1.0).abs() < 1e-15 && (p0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frame_examples() {
        let f = adiabatic_frame(2.0, 0.0).unwrap();
        assert_eq!((f.theta, f.lambda_plus, f.lambda_minus), (0.0, 2.0, 0.0));
        let f = adiabatic_frame(0.0, 3.0).unwrap();
        assert!((f.theta - FRAC_PI_4).abs() < 1e-15);
        assert!((f.lambda_plus - 1.5).abs() < 1e-15 && (f.lambda_minus + 1.5).abs() < 1e-15);
        assert!(adiabatic_frame(0.0, 0.0).is_err());
    }

    #[test]
    fn slow_sweep_follows_adiabatic_prediction() {
        // Ω fixed, Δ swept from −8Ω to +8Ω slowly: peak η ≈ 0.01.
        let (omega, rate) = (1.0, 0.02);
        let h = FnHamiltonian::new(2, move |t: f64| {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::from(0.0),
                    C64::from(0.5 * omega),
                    C64::from(0.5 * omega),
                    C64::from(rate * t),
                ],
            )
        });
        let (t0, t1) = (-400.0, 400.0);
        let r = propagate_state(&h, &StateVector::basis(2, 1).unwrap(), t0, t1, 0.01).unwrap();
        let predicted = adiabatic_following(
            &adiabatic_frame(rate * t0, omega).unwrap(),
            &adiabatic_frame(rate * t1, omega).unwrap(),
            1,
        );
        for (p, q) in r.final_populations().iter().zip(predicted) {
            assert!((p - q).abs() < 0.01);
        }
    }

    #[test]
    fn csv_layout() {
        let h = FnHamiltonian::new(2, |_| pauli_x(0.5));
        let mut r = propagate_state(&h, &StateVector::basis(2, 0).unwrap(), 0.0, 1.0, 0.1).unwrap();
        r.eta = Some(vec![0.0; r.len()]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf, 5).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t_ns,pop_0,pop_1,norm,eta");
        assert_eq!(lines.len(), 1 + 3);
        assert!(lines[1].starts_with("0.00000000e0,1.00000000e0,"));
    }

    proptest! {
        #[test]
        fn reconstructed_unitary_is_unitary(a in -10.0f64..10.0, b in -10.0f64..10.0, g in -10.0f64..10.0) {
            let u = reconstruct_unitary(&EulerAngles { alpha: a, beta: b, gamma: g, t: 0.0 });
            let dev = (u.adjoint() * u - Matrix2::identity()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            prop_assert!(dev < 1e-12);
            let (p1, p0) = transfer_probabilities(&EulerAngles { alpha: a, beta: b, gamma: g, t: 0.0 });
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&p1));
            prop_assert!((-1e-15..=1.0 + 1e-15).contains(&p0));
            prop_assert!((p1 - (1.0 - u[(0, 0)].norm_sqr())).abs() < 1e-12);
            prop_assert!((p0 - (1.0 - u[(1, 1)].norm_sqr())).abs() < 1e-12);
        }

        #[test]
        fn frame_vectors_are_eigenvectors(delta in -5.0f64..5.0, omega in -5.0f64..5.0) {
            prop_assume!(delta.abs() + omega.abs() > 1e-6);
            let f = adiabatic_frame(delta, omega).unwrap();
            prop_assert!(f.lambda_plus >= f.lambda_minus);
            let h = [[0.0, 0.5 * omega], [0.5 * omega, delta]];
            for (v, lambda) in [(f.plus_state(), f.lambda_plus), (f.minus_state(), f.lambda_minus)] {
                for r in 0..2 {
                    let hv = h[r][0] * v[0] + h[r][1] * v[1];
                    prop_assert!((hv - lambda * v[r]).abs() < 1e-10);
                }
            }
        }
    }
}
