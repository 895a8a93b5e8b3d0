//! Bound states of an electron above liquid helium.
//!
//! Perpendicular to the surface the electron sees the attractive image
//! potential −Λe²/(4πε₀z) and a hard wall at z ≤ 0. The resulting spectrum is
//! a one-dimensional hydrogen series. This module discretizes the
//! Hamiltonian by second-order finite differences, solves for the lowest
//! bound states and extracts dipole matrix elements ⟨i|z|j⟩.

mod tridiag;

pub use tridiag::SymTridiagonal;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::units::{joule_to_mev, UM};
use crate::{Error, Result};

/// Physical constants (SI) for the surface-state problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Elementary charge, C.
    pub e_charge: f64,
    /// Electron mass, kg.
    pub m_e: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Dielectric constant of liquid helium.
    pub helium_dielectric: f64,
    /// Image-charge strength Λ = (ε−1)/(4(ε+1)).
    pub lambda_image: f64,
    /// Height of the repulsive surface barrier, eV. Kept for reference only;
    /// the barrier is modeled as an infinite wall.
    pub barrier_height_ev: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            e_charge: 1.602_176_634e-19,
            m_e: 9.109_383_701_5e-31,
            eps0: 8.854_187_812_8e-12,
            helium_dielectric: 1.057,
            lambda_image: 0.0069,
            barrier_height_ev: 1.0,
        }
    }
}

impl PhysicalConstants {
    /// Λ recomputed from the dielectric constant.
    pub fn lambda_from_dielectric(&self) -> f64 {
        let eps = self.helium_dielectric;
        (eps - 1.0) / (4.0 * (eps + 1.0))
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("hbar", self.hbar),
            ("e_charge", self.e_charge),
            ("m_e", self.m_e),
            ("eps0", self.eps0),
            ("helium_dielectric", self.helium_dielectric),
            ("lambda_image", self.lambda_image),
            ("barrier_height_ev", self.barrier_height_ev),
        ];
        for (name, value) in all {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Domain(format!(
                    "constant {name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// e²/(4πε₀), J·m.
    pub fn coulomb_constant(&self) -> f64 {
        self.e_charge * self.e_charge / (4.0 * PI * self.eps0)
    }

    /// Effective Rydberg R* = mΛ²e⁴/(2ħ²(4πε₀)²), J.
    pub fn effective_rydberg(&self) -> f64 {
        let k = self.lambda_image * self.coulomb_constant();
        self.m_e * k * k / (2.0 * self.hbar * self.hbar)
    }

    /// Effective Bohr radius a_B = ħ²(4πε₀)/(mΛe²), m.
    pub fn effective_bohr_radius(&self) -> f64 {
        self.hbar * self.hbar / (self.m_e * self.lambda_image * self.coulomb_constant())
    }
}

/// Uniform grid on [z_min, z_max] in metres. The wavefunction vanishes one
/// spacing outside either end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            z_min: 1e-4 * UM,
            z_max: 0.6 * UM,
            n_points: 6000,
        }
    }
}

impl Grid {
    pub const MIN_POINTS: usize = 1000;

    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        let g = Self {
            z_min,
            z_max,
            n_points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z_min > 0.0) {
            return Err(Error::Domain(format!(
                "grid must start above the surface (z_min = {} m); the image potential is singular at z = 0",
                self.z_min
            )));
        }
        if !(self.z_max > self.z_min) {
            return Err(Error::Domain(format!(
                "grid needs z_min < z_max, got {} and {}",
                self.z_min, self.z_max
            )));
        }
        if self.n_points < Self::MIN_POINTS {
            return Err(Error::Domain(format!(
                "grid needs at least {} points, got {}",
                Self::MIN_POINTS,
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.z_min + k as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|k| self.point(k))
    }

    /// Same grid with twice as many intervals.
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }
}

/// An eigenstate of the discretized Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub index: usize,
    /// Energy in meV.
    pub energy: f64,
    /// Samples on `grid`, normalized so that Σ|ψ_k|² h = 1 (units m^-1/2).
    pub wavefunction: Vec<f64>,
    pub grid: Grid,
}

impl BoundState {
    /// Number of sign changes, ignoring the exponentially small tail.
    pub fn node_count(&self) -> usize {
        let peak = self.wavefunction.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let floor = 1e-6 * peak;
        let mut last_sign = 0.0;
        let mut nodes = 0;
        for &x in &self.wavefunction {
            if x.abs() < floor {
                continue;
            }
            let s = x.signum();
            if last_sign != 0.0 && s != last_sign {
                nodes += 1;
            }
            last_sign = s;
        }
        nodes
    }

    pub fn norm_squared(&self) -> f64 {
        self.wavefunction.iter().map(|x| x * x).sum::<f64>() * self.grid.spacing()
    }
}

/// Energies and dipole matrix elements of the lowest bound states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// Bound-state energies, meV, ascending.
    pub energies: Vec<f64>,
    /// ⟨i|z|j⟩ in μm, symmetric.
    pub z_elements: Vec<Vec<f64>>,
    /// (E₁ − E₀)/ħ in rad/s.
    pub omega10: f64,
}

impl SpectralData {
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// ⟨i|z|j⟩ in μm.
    pub fn z(&self, i: usize, j: usize) -> f64 {
        self.z_elements[i][j]
    }

    /// Transition frequency ω₁₀/2π in GHz.
    pub fn f10_ghz(&self) -> f64 {
        self.omega10 / (2.0 * PI) / 1e9
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.energies.len();
        if n < 2 {
            return Err(Error::Usage(
                "spectral data needs at least two levels".into(),
            ));
        }
        if self.z_elements.len() != n || self.z_elements.iter().any(|row| row.len() != n) {
            return Err(Error::Usage(format!("z-element matrix must be {n}x{n}")));
        }
        if self.energies.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Usage("energies must be strictly increasing".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if self.z_elements[i][j] != self.z_elements[j][i] {
                    return Err(Error::Usage(format!(
                        "z-elements not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let data: Self = serde_json::from_str(text)?;
        data.validate()?;
        Ok(data)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Finite-difference matrix of −(ħ²/2m) d²/dz² − Λe²/(4πε₀z) with Dirichlet
/// ends, in joules.
pub fn build_hamiltonian(grid: &Grid, constants: &PhysicalConstants) -> Result<SymTridiagonal> {
    grid.validate()?;
    constants.validate()?;
    let h = grid.spacing();
    let kinetic = constants.hbar * constants.hbar / (constants.m_e * h * h);
    let strength = constants.lambda_image * constants.coulomb_constant();
    let diagonal = grid.points().map(|z| kinetic - strength / z).collect();
    let off_diagonal = vec![-0.5 * kinetic; grid.n_points - 1];
    SymTridiagonal::new(diagonal, off_diagonal)
}

/// The `k` lowest bound states, energies ascending. Wavefunctions are
/// normalized and start positive at the wall (ψ'(z_min) > 0).
pub fn solve_bound_states(
    grid: &Grid,
    constants: &PhysicalConstants,
    k: usize,
) -> Result<Vec<BoundState>> {
    if k == 0 {
        return Err(Error::Usage("need at least one bound state".into()));
    }
    let hamiltonian = build_hamiltonian(grid, constants)?;
    let negative = hamiltonian.count_below(0.0);
    if negative < k {
        return Err(Error::Resolution(format!(
            "grid [{:.3e}, {:.3e}] m with {} points holds {negative} negative-energy states, {k} requested; \
             extend z_max (effective Bohr radius {:.3e} m)",
            grid.z_min,
            grid.z_max,
            grid.n_points,
            constants.effective_bohr_radius()
        )));
    }

    // Work in meV so that bisection tolerances are relative to level spacings.
    let to_mev = joule_to_mev(constants, 1.0);
    let scaled = hamiltonian.scaled(to_mev);
    let h = grid.spacing();
    let pairs = scaled.lowest_eigenpairs(k)?;
    let states = pairs
        .into_iter()
        .enumerate()
        .map(|(index, (energy, mut psi))| {
            let first = psi
                .iter()
                .copied()
                .find(|x| x.abs() > 1e-300)
                .unwrap_or(1.0);
            let scale = first.signum() / h.sqrt();
            psi.iter_mut().for_each(|x| *x *= scale);
            BoundState {
                index,
                energy,
                wavefunction: psi,
                grid: *grid,
            }
        })
        .collect::<Vec<_>>();

    if let Some(bad) = states.iter().find(|s| s.energy >= 0.0) {
        return Err(Error::Resolution(format!(
            "state {} has non-negative energy {} meV on this grid",
            bad.index, bad.energy
        )));
    }
    Ok(states)
}

/// ⟨a|z|b⟩ in μm. The sum runs in grid order for both argument orders, so the
/// result is bitwise symmetric.
pub fn dipole_element(a: &BoundState, b: &BoundState, grid: &Grid) -> Result<f64> {
    if a.grid != *grid || b.grid != *grid {
        return Err(Error::Usage(
            "bound states were computed on a different grid".into(),
        ));
    }
    if a.wavefunction.len() != grid.n_points || b.wavefunction.len() != grid.n_points {
        return Err(Error::Usage(
            "wavefunction length does not match the grid".into(),
        ));
    }
    let h = grid.spacing();
    let sum: f64 = grid
        .points()
        .zip(a.wavefunction.iter().zip(&b.wavefunction))
        .map(|(z, (pa, pb))| (pa * pb) * z)
        .sum();
    Ok(sum * h / UM)
}

/// Closed-form level −R*/(n+1)² of the hard-wall 1D hydrogen problem, meV.
pub fn analytic_spectrum_oracle(n: usize, constants: &PhysicalConstants) -> f64 {
    let level = (n + 1) as f64;
    -joule_to_mev(constants, constants.effective_rydberg()) / (level * level)
}

/// Closed-form ⟨n|z|n⟩ = 3(n+1)²a_B/2, μm.
pub fn analytic_mean_height(n: usize, constants: &PhysicalConstants) -> f64 {
    let level = (n + 1) as f64;
    1.5 * level * level * constants.effective_bohr_radius() / UM
}

/// Solve for `levels` bound states and tabulate energies and z-elements.
pub fn compute_spectral_data(
    grid: &Grid,
    constants: &PhysicalConstants,
    levels: usize,
) -> Result<SpectralData> {
    let states = solve_bound_states(grid, constants, levels.max(2))?;
    let n = states.len();
    let mut z_elements = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let z = dipole_element(&states[i], &states[j], grid)?;
            z_elements[i][j] = z;
            z_elements[j][i] = z;
        }
    }
    let energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
    let omega10 = crate::units::mev_to_joule(constants, energies[1] - energies[0]) / constants.hbar;
    Ok(SpectralData {
        energies,
        z_elements,
        omega10,
    })
}
