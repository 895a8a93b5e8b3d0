//! Scenario Hamiltonians, analytic gates and gate reports.
//!
//! Single-qubit scenarios use the lowest three bound states of one electron
//! driven by a Stark chirp E_dc(t) and a resonant pump ξ(t). Two-qubit
//! scenarios use two Coulomb-coupled electrons with a Stark chirp on the
//! second one; the {|01⟩, |10⟩} block is an invariant subspace.
//!
//! Two-qubit basis order is |00⟩, |01⟩, |10⟩, |11⟩ (first digit: electron 1).

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    self, propagate_euler_angles, propagate_state, reconstruct_unitary, FnHamiltonian,
    GenericDrive, PropagationResult, StateVector,
};
use crate::pulses::{self, adiabaticity, peak_adiabaticity_driven, DrivePair, Pulse, Sweep};
use crate::spectral::{PhysicalConstants, SpectralData};
use crate::units::{field_length_rate, joule_to_rad_per_ns, NS, UM};
use crate::{Error, Result, C64};

/// Coupling floor (relative to its peak) used to delimit the driven part of
/// a window when reporting peak η.
pub const ETA_COUPLING_FLOOR: f64 = 0.05;

/// U = cos(D/2)·1 − i sin(D/2)·σx with D = ΩT.
pub fn rabi_evolution(omega_rabi: f64, duration: f64) -> Result<Matrix2<C64>> {
    if !(duration >= 0.0) {
        return Err(Error::Usage(format!(
            "duration must be non-negative, got {duration}"
        )));
    }
    let half = 0.5 * omega_rabi * duration;
    let (c, s) = (C64::from(half.cos()), C64::new(0.0, -half.sin()));
    Ok(Matrix2::new(c, s, s, c))
}

/// Û_p(ϱ) = exp(iϱ|1⟩⟨1|)
pub fn phase_gate(rho: f64) -> Matrix2<C64> {
    Matrix2::new(
        C64::from(1.0),
        C64::from(0.0),
        C64::from(0.0),
        C64::from_polar(1.0, rho),
    )
}

/// Phase ϱ = −∫Δ dt accumulated on |1⟩ over [t0, t1].
pub fn accumulated_phase(drive: &DrivePair, t0: f64, t1: f64) -> Result<f64> {
    Ok(-pulses::detuning_area(drive, t0, t1)?)
}

/// ρ_sub = [[|C₁|², C₁*C₂], [C₂*C₁, |C₂|²]]
pub fn subspace_density(c1: C64, c2: C64) -> Result<Matrix2<C64>> {
    let norm = c1.norm_sqr() + c2.norm_sqr();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Usage(format!(
            "subspace amplitudes not normalized: {norm}"
        )));
    }
    let off = c1.conj() * c2;
    Ok(Matrix2::new(
        C64::from(c1.norm_sqr()),
        off,
        off.conj(),
        C64::from(c2.norm_sqr()),
    ))
}

/// F = |Tr(U_target† U)|² / n²
pub fn gate_fidelity(actual: &DMatrix<C64>, target: &DMatrix<C64>) -> Result<f64> {
    if actual.shape() != target.shape() || !actual.is_square() {
        return Err(Error::Usage(format!(
            "fidelity needs equal square matrices, got {:?} and {:?}",
            actual.shape(),
            target.shape()
        )));
    }
    let n = actual.nrows() as f64;
    let tr = (target.adjoint() * actual).trace();
    Ok((tr.norm_sqr() / (n * n)).clamp(0.0, 1.0))
}

/// Classical fidelity (Σ√(pᵢqᵢ))² between two population vectors.
pub fn population_fidelity(actual: &[f64], target: &[f64]) -> Result<f64> {
    if actual.len() != target.len() {
        return Err(Error::Usage("population vectors differ in length".into()));
    }
    let bc: f64 = actual
        .iter()
        .zip(target)
        .map(|(p, q)| (p.max(0.0) * q.max(0.0)).sqrt())
        .sum();
    Ok((bc * bc).clamp(0.0, 1.0))
}

pub(crate) fn to_dmatrix<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> DMatrix<C64> {
    DMatrix::from_iterator(N, N, m.iter().copied())
}

/// Complex matrix as rows of `[re, im]` pairs.
pub type ComplexPairs = Vec<Vec<[f64; 2]>>;

pub fn to_pairs(m: &DMatrix<C64>) -> ComplexPairs {
    m.row_iter()
        .map(|r| r.iter().map(|c| [c.re, c.im]).collect())
        .collect()
}

pub fn from_pairs(rows: &ComplexPairs) -> Result<DMatrix<C64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Usage("complex matrix must be square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Summary of a gate run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub final_populations: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<ComplexPairs>,
    pub fidelity: f64,
    pub peak_eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_sub: Option<ComplexPairs>,
    /// Re(C₁*C₂) at the end of a two-qubit run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<f64>,
    /// ns
    pub duration: f64,
    pub norm_drift: f64,
}

/// A report together with the time series it summarizes.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub report: GateReport,
    pub trace: PropagationResult,
}

fn eta_series<S: Sweep + ?Sized>(drive: &S, times: &[f64]) -> Vec<f64> {
    times
        .iter()
        .map(|&t| adiabaticity(drive, t).unwrap_or(f64::NAN))
        .collect()
}

// ---------------------------------------------------------------------------
// Single qubit

/// One electron, three levels, Stark chirp plus pump.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitScenario {
    pub spectral: SpectralData,
    pub drive: DrivePair,
    /// (t0, t1), ns
    pub window: (f64, f64),
    /// e/ħ·μm in rad/(ns·V/m·μm)
    field_rate: f64,
}

impl SingleQubitScenario {
    pub fn new(
        spectral: SpectralData,
        stark: Pulse,
        pump: Pulse,
        window: (f64, f64),
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        if spectral.levels() < 3 {
            return Err(Error::Usage(format!(
                "single-qubit scenario needs 3 levels, spectral data has {}",
                spectral.levels()
            )));
        }
        if !(window.0 < window.1) || !window.0.is_finite() || !window.1.is_finite() {
            return Err(Error::Usage(format!(
                "bad window [{}, {}]",
                window.0, window.1
            )));
        }
        let drive = DrivePair::new(stark, pump, &spectral, constants)?;
        Ok(Self {
            spectral,
            drive,
            window,
            field_rate: field_length_rate(constants),
        })
    }

    /// κz₀₁/ħ with κ = eξ/2, rad/ns.
    pub fn coupling(&self, t: f64) -> f64 {
        0.5 * self.field_rate * self.drive.pump.eval(t) * self.spectral.z(0, 1)
    }

    /// Generic-drive form of the qubit block: A = −Δ/2, B = Ω/2, ω̇ = 0
    /// (σz = diag(1, −1) on (|0⟩, |1⟩)).
    pub fn generic_drive(&self) -> GenericDrive {
        let d = self.drive;
        GenericDrive::new(
            move |t| -0.5 * d.detuning(t),
            move |t| 0.5 * d.coupling(t),
            |_| 0.0,
        )
    }

    pub fn peak_eta(&self, dt: f64) -> Result<f64> {
        peak_adiabaticity_driven(
            &self.drive,
            self.window.0,
            self.window.1,
            dt,
            ETA_COUPLING_FLOOR,
        )
    }

    /// The same scenario with every pulse edge and the window stretched by
    /// `factor` about t = 0, keeping amplitudes and ramp rates.
    pub fn with_durations_scaled(&self, factor: f64) -> Self {
        let scale_edges = |p: Pulse| match p {
            Pulse::Window {
                amplitude,
                t_on,
                t_off,
            } => Pulse::Window {
                amplitude,
                t_on: t_on * factor,
                t_off: t_off * factor,
            },
            other => other,
        };
        let mut s = self.clone();
        s.drive.stark = scale_edges(s.drive.stark);
        s.drive.pump = scale_edges(s.drive.pump);
        s.window = (self.window.0 * factor, self.window.1 * factor);
        s
    }
}

/// 3×3 interaction-picture Hamiltonian (rad/ns):
/// (0,1) = (1,0) = κz₀₁/ħ, (1,1) = eE_dc(z₁₁ − z₀₀)/ħ, (2,2) = eE_dc(z₂₂ − z₀₀)/ħ.
pub fn build_scrap_hamiltonian(s: &SingleQubitScenario, t: f64) -> DMatrix<C64> {
    let e = s.drive.stark.eval(t);
    let z = |i, j| s.spectral.z(i, j);
    let k = s.coupling(t);
    let mut h = DMatrix::zeros(3, 3);
    h[(0, 1)] = C64::from(k);
    h[(1, 0)] = C64::from(k);
    h[(1, 1)] = C64::from(s.field_rate * e * (z(1, 1) - z(0, 0)));
    h[(2, 2)] = C64::from(s.field_rate * e * (z(2, 2) - z(0, 0)));
    h
}

/// Propagate the three-level SCRAP model from basis state `initial`.
/// Fidelity is measured against `target` populations (length 3).
pub fn run_scrap_single(
    s: &SingleQubitScenario,
    initial: usize,
    target: &[f64],
    dt: f64,
) -> Result<ScenarioRun> {
    if initial > 2 {
        return Err(Error::Usage(format!(
            "initial level must be 0, 1 or 2, got {initial}"
        )));
    }
    let h = FnHamiltonian::new(3, |t| build_scrap_hamiltonian(s, t));
    let mut trace = propagate_state(
        &h,
        &StateVector::basis(3, initial)?,
        s.window.0,
        s.window.1,
        dt,
    )?;
    trace.eta = Some(eta_series(&s.drive, &trace.times));
    let final_populations = trace.final_populations().to_vec();
    let report = GateReport {
        fidelity: population_fidelity(&final_populations, target)?,
        final_populations,
        unitary: None,
        peak_eta: s.peak_eta(dt)?,
        rho_sub: None,
        coherence: None,
        duration: s.window.1 - s.window.0,
        norm_drift: trace.norm_drift,
    };
    Ok(ScenarioRun { report, trace })
}

/// Fast (non-adiabatic) single-qubit gate on the two lowest levels:
/// H = [eE'(z₁₁ − z₀₀)/2]σz + [eξ'z₀₁/2]σx.
///
/// The propagator comes from the Euler-angle equations; if they hit their
/// coordinate singularity the run falls back to direct propagation of both
/// basis states.
pub fn run_nonadiabatic_single(
    s: &SingleQubitScenario,
    initial: usize,
    target: &[f64],
    dt: f64,
) -> Result<ScenarioRun> {
    if initial > 1 {
        return Err(Error::Usage(format!(
            "initial qubit state must be 0 or 1, got {initial}"
        )));
    }
    let drive = s.generic_drive();
    let (t0, t1) = s.window;
    let mut trace = propagate_state(&drive, &StateVector::basis(2, initial)?, t0, t1, dt)?;
    let unitary = match propagate_euler_angles(&drive, t0, t1, dt) {
        Ok(angles) => {
            let u = to_dmatrix(&reconstruct_unitary(angles.last().expect("non-empty")));
            trace.angles = Some(angles);
            u
        }
        Err(Error::CoordinateSingularity { .. }) => direct_unitary(&drive, t0, t1, dt)?,
        Err(e) => return Err(e),
    };
    trace.eta = Some(eta_series(&s.drive, &trace.times));
    let final_populations = trace.final_populations().to_vec();
    let report = GateReport {
        fidelity: population_fidelity(&final_populations, target)?,
        final_populations,
        unitary: Some(to_pairs(&unitary)),
        peak_eta: s.peak_eta(dt)?,
        rho_sub: None,
        coherence: None,
        duration: t1 - t0,
        norm_drift: trace.norm_drift,
    };
    Ok(ScenarioRun { report, trace })
}

/// Propagator assembled column by column from direct propagation.
pub fn direct_unitary<H: dynamics::Hamiltonian + ?Sized>(
    h: &H,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<DMatrix<C64>> {
    let n = h.dim();
    let mut u = DMatrix::zeros(n, n);
    for j in 0..n {
        let r = propagate_state(h, &StateVector::basis(n, j)?, t0, t1, dt)?;
        u.set_column(j, r.final_state().amplitudes());
    }
    Ok(u)
}

/// Constant resonant drive H = (Ω/2)σx for time `duration`, from `initial`.
pub fn run_rabi(omega_rabi: f64, duration: f64, initial: usize, dt: f64) -> Result<ScenarioRun> {
    let drive = GenericDrive::new(|_| 0.0, move |_| 0.5 * omega_rabi, |_| 0.0);
    let mut trace = propagate_state(&drive, &StateVector::basis(2, initial)?, 0.0, duration, dt)?;
    trace.eta = Some(vec![0.0; trace.len()]);
    let u = direct_unitary(&drive, 0.0, duration, dt)?;
    let target = to_dmatrix(&rabi_evolution(omega_rabi, duration)?);
    let report = GateReport {
        final_populations: trace.final_populations().to_vec(),
        fidelity: gate_fidelity(&u, &target)?,
        unitary: Some(to_pairs(&u)),
        peak_eta: 0.0,
        rho_sub: None,
        coherence: None,
        duration,
        norm_drift: trace.norm_drift,
    };
    Ok(ScenarioRun { report, trace })
}

// ---------------------------------------------------------------------------
// Two qubits

/// Dipole elements of one electron, μm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectronZ {
    pub z00: f64,
    pub z11: f64,
    pub z01: f64,
}

impl ElectronZ {
    pub fn from_spectral(s: &SpectralData) -> Self {
        Self {
            z00: s.z(0, 0),
            z11: s.z(1, 1),
            z01: s.z(0, 1),
        }
    }
}

/// ζ coefficients of the Coulomb coupling in the Pauli basis, J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombCoefficients {
    pub zeta1_z: f64,
    pub zeta2_z: f64,
    pub zeta1_x: f64,
    pub zeta2_x: f64,
    pub zeta12_zz: f64,
    pub zeta12_xx: f64,
    pub zeta12_zx: f64,
    pub zeta12_xz: f64,
}

/// Expand e²(z₁ − z₂)²/(2d³·4πε₀) in the two-qubit Pauli basis.
/// `d` in μm.
pub fn coulomb_coefficients(
    z1: &ElectronZ,
    z2: &ElectronZ,
    d: f64,
    constants: &PhysicalConstants,
) -> Result<CoulombCoefficients> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!(
            "electron spacing must be positive, got {d} um"
        )));
    }
    let scale = constants.coulomb_constant() / (d * UM).powi(3) * UM * UM;
    let sum = z1.z00 + z1.z11 - z2.z00 - z2.z11;
    let (split1, split2) = (z1.z11 - z1.z00, z2.z11 - z2.z00);
    Ok(CoulombCoefficients {
        zeta1_z: scale / 4.0 * sum * split1,
        zeta2_z: -scale / 4.0 * sum * split2,
        zeta1_x: scale / 2.0 * sum * z1.z01,
        zeta2_x: -scale / 2.0 * sum * z2.z01,
        zeta12_zz: -scale / 4.0 * split1 * split2,
        zeta12_xx: -scale * z1.z01 * z2.z01,
        zeta12_zx: -scale / 2.0 * split1 * z2.z01,
        zeta12_xz: -scale / 2.0 * split2 * z1.z01,
    })
}

/// RWA Hamiltonian ζzz σ₁ᶻσ₂ᶻ + ζxx(σ₁⁺σ₂⁻ + σ₁⁻σ₂⁺) in rad/ns, with
/// σᶻ = |1⟩⟨1| − |0⟩⟨0|.
pub fn rwa_hamiltonian(c: &CoulombCoefficients, constants: &PhysicalConstants) -> DMatrix<C64> {
    let zz = joule_to_rad_per_ns(constants, c.zeta12_zz);
    let xx = joule_to_rad_per_ns(constants, c.zeta12_xx);
    let mut h = DMatrix::zeros(4, 4);
    for (i, sign) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
        h[(i, i)] = C64::from(sign * zz);
    }
    h[(1, 2)] = C64::from(xx);
    h[(2, 1)] = C64::from(xx);
    h
}

/// exp(−iH_RWA t) in closed form with ξ = tζxx/ħ, φ = tζzz/ħ:
/// corners e^{−iφ}, inner block e^{iφ}[[cos ξ, −i sin ξ], [−i sin ξ, cos ξ]].
pub fn iswap_unitary(xi: f64, phi: f64) -> DMatrix<C64> {
    let outer = C64::from_polar(1.0, -phi);
    let inner = C64::from_polar(1.0, phi);
    let mut u = DMatrix::zeros(4, 4);
    u[(0, 0)] = outer;
    u[(3, 3)] = outer;
    u[(1, 1)] = inner * xi.cos();
    u[(2, 2)] = inner * xi.cos();
    u[(1, 2)] = inner * C64::new(0.0, -xi.sin());
    u[(2, 1)] = inner * C64::new(0.0, -xi.sin());
    u
}

/// Two Coulomb-coupled electrons with a Stark chirp on electron 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitConfig {
    /// Inter-electron spacing, μm.
    pub d: f64,
    /// Weight of the electron-2 electrode field at electron 1.
    pub cross_factor: f64,
    pub z1: ElectronZ,
    pub z2: ElectronZ,
    /// ω = ω₁₀⁽¹⁾ − ω₁₀⁽²⁾, rad/ns.
    pub omega_detuning: f64,
    /// E_dc⁽²⁾(t)
    pub stark2: Pulse,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

/// Basis states of the two-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoQubitBasis {
    #[serde(rename = "00")]
    S00,
    #[serde(rename = "01")]
    S01,
    #[serde(rename = "10")]
    S10,
    #[serde(rename = "11")]
    S11,
}

impl TwoQubitBasis {
    pub fn index(self) -> usize {
        match self {
            Self::S00 => 0,
            Self::S01 => 1,
            Self::S10 => 2,
            Self::S11 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        ["00", "01", "10", "11"][self.index()]
    }
}

impl std::str::FromStr for TwoQubitBasis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim_start_matches('|').trim_end_matches('>') {
            "00" => Ok(Self::S00),
            "01" => Ok(Self::S01),
            "10" => Ok(Self::S10),
            "11" => Ok(Self::S11),
            other => Err(Error::Config(format!("unknown two-qubit state '{other}'"))),
        }
    }
}

/// Which Hamiltonian a two-qubit run propagates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TwoQubitFrame {
    /// 2×2 {|01⟩, |10⟩} block in the frame rotating at ω.
    #[default]
    Subspace,
    /// Full 4×4 matrix with explicit e^{∓iωt} phases.
    Full,
}

impl TwoQubitConfig {
    /// Electrons with the dipole elements used for the two-qubit passages
    /// (z₁₁ differs slightly between the electrons because of their
    /// holding fields), spaced 0.5 μm apart, level crossing at t = 0.
    pub fn reference(stark2: Pulse) -> Self {
        let mut cfg = Self {
            d: 0.5,
            cross_factor: 1.0 / 8f64.sqrt(),
            z1: ElectronZ {
                z00: 0.0115,
                z11: 0.0457,
                z01: -0.0043,
            },
            z2: ElectronZ {
                z00: 0.0115,
                z11: 0.0458,
                z01: -0.0043,
            },
            omega_detuning: 0.0,
            stark2,
            constants: PhysicalConstants::default(),
        };
        cfg.omega_detuning = cfg.resonant_omega(0.0);
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) {
            return Err(Error::Config(format!(
                "spacing d must be positive, got {}",
                self.d
            )));
        }
        if !self.cross_factor.is_finite() || !self.omega_detuning.is_finite() {
            return Err(Error::Config(
                "cross_factor and omega_detuning must be finite".into(),
            ));
        }
        self.stark2.validate()?;
        self.constants.validate()
    }

    /// α_c/ħ = e²/(2d³·4πε₀ħ), rad/ns per μm².
    pub fn coupling_strength(&self) -> f64 {
        let alpha = self.constants.coulomb_constant() / (2.0 * (self.d * UM).powi(3));
        alpha * UM * UM / self.constants.hbar * NS
    }

    fn field_rate(&self) -> f64 {
        field_length_rate(&self.constants)
    }

    /// Δ₁..Δ₄ at time `t`, rad/ns.
    pub fn deltas(&self, t: f64) -> [f64; 4] {
        let a = self.coupling_strength();
        let (z1, z2) = (&self.z1, &self.z2);
        let exch = z1.z01 * z1.z01 + z2.z01 * z2.z01;
        let field = self.field_rate() * self.stark2.eval(t);
        let c = self.cross_factor;
        let level = |p1: f64, p2: f64| {
            a * (p1 * p1 + p2 * p2 + exch - 2.0 * p1 * p2) + field * (p2 + c * p1)
        };
        [
            level(z1.z00, z2.z00),
            level(z1.z00, z2.z11),
            level(z1.z11, z2.z00),
            level(z1.z11, z2.z11),
        ]
    }

    /// Exchange coupling B = −2α_c z₁⁰¹z₂¹⁰/ħ, rad/ns.
    pub fn exchange(&self) -> f64 {
        -2.0 * self.coupling_strength() * self.z1.z01 * self.z2.z01
    }

    /// A(t) = (Δ₂ − Δ₃)/2, rad/ns.
    pub fn half_splitting(&self, t: f64) -> f64 {
        let d = self.deltas(t);
        0.5 * (d[1] - d[2])
    }

    fn half_splitting_rate(&self, t: f64) -> f64 {
        let (z1, z2) = (&self.z1, &self.z2);
        let lever = z2.z11 - z2.z00 + self.cross_factor * (z1.z00 - z1.z11);
        0.5 * self.field_rate() * lever * self.stark2.derivative(t)
    }

    /// ω that puts the |01⟩/|10⟩ crossing of the rotating frame at `t`.
    pub fn resonant_omega(&self, t: f64) -> f64 {
        2.0 * self.half_splitting(t)
    }

    /// Rotating-frame block as a generic drive: A(t), B, ω̇ = ω.
    pub fn generic_drive(&self) -> GenericDrive {
        let cfg = *self;
        let b = self.exchange();
        let omega = self.omega_detuning;
        GenericDrive::new(move |t| cfg.half_splitting(t), move |_| b, move |_| omega)
    }
}

/// η for the two-qubit block reads Δ ≡ A − ω/2 and Ω ≡ B off the
/// generic-drive form.
impl Sweep for TwoQubitConfig {
    fn detuning(&self, t: f64) -> f64 {
        self.half_splitting(t) - 0.5 * self.omega_detuning
    }
    fn detuning_rate(&self, t: f64) -> f64 {
        self.half_splitting_rate(t)
    }
    fn coupling(&self, _t: f64) -> f64 {
        self.exchange()
    }
    fn coupling_rate(&self, _t: f64) -> f64 {
        0.0
    }
    fn edges(&self) -> Vec<f64> {
        self.stark2.edges()
    }
}

/// Full 4×4 Hamiltonian (rad/ns) with diagonal Δ₁..Δ₄ and the |01⟩–|10⟩
/// coupling −2α_c z₁⁰¹z₂¹⁰ e^{∓iωt}.
pub fn build_two_qubit_full(cfg: &TwoQubitConfig, t: f64) -> DMatrix<C64> {
    let d = cfg.deltas(t);
    let mut h = DMatrix::zeros(4, 4);
    for (i, di) in d.iter().enumerate() {
        h[(i, i)] = C64::from(*di);
    }
    let v = cfg.exchange();
    h[(1, 2)] = C64::from_polar(v, -cfg.omega_detuning * t);
    h[(2, 1)] = C64::from_polar(v, cfg.omega_detuning * t);
    h
}

/// {|01⟩, |10⟩} block (rad/ns). Without `rotating_frame`: [[0, Ve^{−iωt}],
/// [Ve^{iωt}, Δ₃ − Δ₂]]. With it: (A − ω/2)σz + Bσx.
pub fn build_two_qubit_subspace(
    cfg: &TwoQubitConfig,
    t: f64,
    rotating_frame: bool,
) -> DMatrix<C64> {
    if rotating_frame {
        let m = cfg.generic_drive().matrix(t);
        return to_dmatrix(&m);
    }
    let d = cfg.deltas(t);
    let v = cfg.exchange();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::from(0.0),
            C64::from_polar(v, -cfg.omega_detuning * t),
            C64::from_polar(v, cfg.omega_detuning * t),
            C64::from(d[2] - d[1]),
        ],
    )
}

/// Propagate the two-qubit register from `initial` over [t0, t1].
/// `target` holds the wanted populations of |00⟩, |01⟩, |10⟩, |11⟩.
pub fn run_two_qubit(
    cfg: &TwoQubitConfig,
    initial: TwoQubitBasis,
    window: (f64, f64),
    dt: f64,
    frame: TwoQubitFrame,
    target: &[f64],
) -> Result<ScenarioRun> {
    cfg.validate()?;
    let (t0, t1) = window;
    let in_subspace = matches!(initial, TwoQubitBasis::S01 | TwoQubitBasis::S10);
    let (mut trace, c1, c2) = if frame == TwoQubitFrame::Subspace && in_subspace {
        let drive = cfg.generic_drive();
        let sub = propagate_state(
            &drive,
            &StateVector::basis(2, initial.index() - 1)?,
            t0,
            t1,
            dt,
        )?;
        let (c1, c2) = (
            sub.final_state().amplitude(0),
            sub.final_state().amplitude(1),
        );
        (embed_subspace(sub), c1, c2)
    } else {
        let h = FnHamiltonian::new(4, |t| build_two_qubit_full(cfg, t));
        let full = propagate_state(&h, &StateVector::basis(4, initial.index())?, t0, t1, dt)?;
        let (c1, c2) = (
            full.final_state().amplitude(1),
            full.final_state().amplitude(2),
        );
        (full, c1, c2)
    };
    trace.eta = Some(eta_series(cfg, &trace.times));
    let (rho_sub, coherence) = if in_subspace {
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        let rho = subspace_density(c1 / norm, c2 / norm)?;
        (Some(to_pairs(&to_dmatrix(&rho))), Some((c1.conj() * c2).re))
    } else {
        (None, None)
    };
    let final_populations = trace.final_populations().to_vec();
    let report = GateReport {
        fidelity: population_fidelity(&final_populations, target)?,
        final_populations,
        unitary: None,
        peak_eta: peak_adiabaticity_driven(cfg, t0, t1, dt, ETA_COUPLING_FLOOR)?,
        rho_sub,
        coherence,
        duration: t1 - t0,
        norm_drift: trace.norm_drift,
    };
    Ok(ScenarioRun { report, trace })
}

/// Lift a {|01⟩, |10⟩} trace into the four-state register.
fn embed_subspace(sub: PropagationResult) -> PropagationResult {
    let zero = C64::from(0.0);
    let states = sub
        .states
        .iter()
        .map(|s| {
            StateVector::from_slice(&[zero, s.amplitude(0), s.amplitude(1), zero])
                .unwrap_or_else(|_| s.clone())
        })
        .collect::<Vec<_>>();
    let populations = sub
        .populations
        .iter()
        .map(|p| vec![0.0, p[0], p[1], 0.0])
        .collect();
    PropagationResult {
        states,
        populations,
        ..sub
    }
}
