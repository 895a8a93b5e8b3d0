//! Control pulses, pulse areas and the adiabaticity parameter.
//!
//! Gaussian pulses use the convention `A·exp(−(t−c)²/w²)`: the width enters
//! without the factor 2 of a standard deviation. A Gaussian with `w = 15`
//! has σ = 15/√2 ns.

use serde::{Deserialize, Serialize};

use crate::spectral::{PhysicalConstants, SpectralData};
use crate::units::{field_length_rate, NS};
use crate::{Error, Result};

/// Field amplitude as a function of time. Times in ns, amplitudes in V/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Pulse {
    Zero,
    /// `rate · t` with `rate` in V/(m·s).
    Linear {
        rate: f64,
    },
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Constant on the closed interval [t_on, t_off], zero elsewhere.
    Window {
        amplitude: f64,
        t_on: f64,
        t_off: f64,
    },
}

impl Pulse {
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Pulse::Zero => Ok(()),
            Pulse::Linear { rate } if finite(&[rate]) => Ok(()),
            Pulse::Gaussian {
                amplitude,
                center,
                width,
            } if finite(&[amplitude, center, width]) => {
                if width > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "gaussian width must be positive, got {width}"
                    )))
                }
            }
            Pulse::Window {
                amplitude,
                t_on,
                t_off,
            } if finite(&[amplitude, t_on, t_off]) => {
                if t_on < t_off {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "window needs t_on < t_off, got [{t_on}, {t_off}]"
                    )))
                }
            }
            _ => Err(Error::Config(format!(
                "pulse parameters must be finite: {self:?}"
            ))),
        }
    }

    /// Field at time `t` (ns), V/m.
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Pulse::Zero => 0.0,
            Pulse::Linear { rate } => rate * t * NS,
            Pulse::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let x = (t - center) / width;
                amplitude * (-x * x).exp()
            }
            Pulse::Window {
                amplitude,
                t_on,
                t_off,
            } => {
                if (t_on..=t_off).contains(&t) {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Time derivative, V/(m·ns). Zero inside and outside a window; the
    /// edges themselves are excluded from adiabaticity sampling.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Pulse::Zero | Pulse::Window { .. } => 0.0,
            Pulse::Linear { rate } => rate * NS,
            Pulse::Gaussian { center, width, .. } => {
                -2.0 * (t - center) / (width * width) * self.eval(t)
            }
        }
    }

    /// Points where the pulse is discontinuous.
    pub fn edges(&self) -> Vec<f64> {
        match *self {
            Pulse::Window { t_on, t_off, .. } => vec![t_on, t_off],
            _ => vec![],
        }
    }

    /// Points a quadrature should split at so that narrow features are not
    /// stepped over.
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Pulse::Window { t_on, t_off, .. } => vec![t_on, t_off],
            Pulse::Gaussian { center, width, .. } => {
                (-6..=6).map(|k| center + k as f64 * width).collect()
            }
            _ => vec![],
        }
    }

    /// The same pulse with its time axis stretched by `factor` about t = 0.
    pub fn stretched(&self, factor: f64) -> Self {
        match *self {
            Pulse::Zero => Pulse::Zero,
            Pulse::Linear { rate } => Pulse::Linear {
                rate: rate / factor,
            },
            Pulse::Gaussian {
                amplitude,
                center,
                width,
            } => Pulse::Gaussian {
                amplitude,
                center: center * factor,
                width: width * factor,
            },
            Pulse::Window {
                amplitude,
                t_on,
                t_off,
            } => Pulse::Window {
                amplitude,
                t_on: t_on * factor,
                t_off: t_off * factor,
            },
        }
    }
}

/// A detuning Δ(t) swept against a coupling Ω(t), both in rad/ns.
///
/// Anything implementing this can be fed to [`adiabaticity`].
pub trait Sweep {
    fn detuning(&self, t: f64) -> f64;
    fn detuning_rate(&self, t: f64) -> f64;
    fn coupling(&self, t: f64) -> f64;
    fn coupling_rate(&self, t: f64) -> f64;
    /// Discontinuities excluded from sampling.
    fn edges(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Stark chirp plus resonant pump acting on one electron.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivePair {
    /// dc chirp field E_dc(t).
    pub stark: Pulse,
    /// Resonant pump amplitude ξ(t).
    pub pump: Pulse,
    /// Δ per unit E_dc: e(z₁₁ − z₀₀)/ħ, rad/(ns·V/m).
    pub detuning_gain: f64,
    /// Ω per unit ξ: e·z₀₁/ħ, rad/(ns·V/m). Carries the sign of z₀₁.
    pub rabi_gain: f64,
}

impl DrivePair {
    pub fn new(
        stark: Pulse,
        pump: Pulse,
        spectral: &SpectralData,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        stark.validate()?;
        pump.validate()?;
        if spectral.levels() < 2 {
            return Err(Error::Usage("drive needs at least two levels".into()));
        }
        let k = field_length_rate(constants);
        Ok(Self {
            stark,
            pump,
            detuning_gain: k * (spectral.z(1, 1) - spectral.z(0, 0)),
            rabi_gain: k * spectral.z(0, 1),
        })
    }
}

impl Sweep for DrivePair {
    fn detuning(&self, t: f64) -> f64 {
        self.detuning_gain * self.stark.eval(t)
    }
    fn detuning_rate(&self, t: f64) -> f64 {
        self.detuning_gain * self.stark.derivative(t)
    }
    fn coupling(&self, t: f64) -> f64 {
        self.rabi_gain * self.pump.eval(t)
    }
    fn coupling_rate(&self, t: f64) -> f64 {
        self.rabi_gain * self.pump.derivative(t)
    }
    fn edges(&self) -> Vec<f64> {
        let mut e = self.stark.edges();
        e.extend(self.pump.edges());
        e
    }
}

/// ∫ pulse dt over [t0, t1], (V/m)·ns.
pub fn integrate_pulse(pulse: &Pulse, t0: f64, t1: f64) -> Result<f64> {
    if !(t0 <= t1) {
        return Err(Error::Usage(format!(
            "integration needs t0 <= t1, got [{t0}, {t1}]"
        )));
    }
    if let Pulse::Linear { rate } = *pulse {
        return Ok(0.5 * rate * NS * (t1 * t1 - t0 * t0));
    }
    let mut cuts = pulse.breakpoints();
    cuts.retain(|&c| c > t0 && c < t1);
    cuts.push(t0);
    cuts.push(t1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let f = |t: f64| pulse.eval(t);
    Ok(cuts
        .windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], 1e-12, 50))
        .sum())
}

/// D = ∫ Ω dt over [t0, t1], rad.
pub fn pulse_area(drive: &DrivePair, t0: f64, t1: f64) -> Result<f64> {
    Ok(drive.rabi_gain * integrate_pulse(&drive.pump, t0, t1)?)
}

/// ∫ Δ dt over [t0, t1], rad.
pub fn detuning_area(drive: &DrivePair, t0: f64, t1: f64) -> Result<f64> {
    Ok(drive.detuning_gain * integrate_pulse(&drive.stark, t0, t1)?)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    // Open at the ends so a window edge on a boundary is never evaluated.
    let a_in = a + 1e-12 * (b - a);
    let b_in = b - 1e-12 * (b - a);
    let (fa, fb) = (f(a_in), f(b_in));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// η = |ΩΔ̇ − ΔΩ̇| / (2(Δ² + Ω²)^{3/2}) from instantaneous values.
pub fn adiabatic_parameter(
    detuning: f64,
    detuning_rate: f64,
    coupling: f64,
    coupling_rate: f64,
) -> Option<f64> {
    let gap2 = detuning * detuning + coupling * coupling;
    if gap2 == 0.0 {
        return None;
    }
    Some((coupling * detuning_rate - detuning * coupling_rate).abs() / (2.0 * gap2 * gap2.sqrt()))
}

/// Adiabaticity η(t) of a sweep.
pub fn adiabaticity<S: Sweep + ?Sized>(drive: &S, t: f64) -> Result<f64> {
    adiabatic_parameter(
        drive.detuning(t),
        drive.detuning_rate(t),
        drive.coupling(t),
        drive.coupling_rate(t),
    )
    .ok_or(Error::Singular { t })
}

/// Samples t0, t0 + dt, … up to t1, skipping pulse edges.
pub(crate) fn sample_times(
    t0: f64,
    t1: f64,
    dt: f64,
    edges: &[f64],
) -> impl Iterator<Item = f64> + '_ {
    let n = ((t1 - t0) / dt + 1e-9).floor() as usize;
    (0..=n)
        .map(move |k| t0 + k as f64 * dt)
        .filter(move |t| edges.iter().all(|e| (t - e).abs() > 1e-9 * dt.max(1.0)))
}

/// Maximum of η over [t0, t1] sampled every `dt`, skipping singular points.
pub fn peak_adiabaticity<S: Sweep + ?Sized>(drive: &S, t0: f64, t1: f64, dt: f64) -> Result<f64> {
    peak_adiabaticity_where(drive, t0, t1, dt, |_| true)
}

/// As [`peak_adiabaticity`], restricted to samples accepted by `keep`.
pub fn peak_adiabaticity_where<S: Sweep + ?Sized>(
    drive: &S,
    t0: f64,
    t1: f64,
    dt: f64,
    keep: impl Fn(f64) -> bool,
) -> Result<f64> {
    if !(dt > 0.0) || !(t0 <= t1) {
        return Err(Error::Usage(format!(
            "bad sampling window [{t0}, {t1}] with dt = {dt}"
        )));
    }
    let edges = drive.edges();
    sample_times(t0, t1, dt, &edges)
        .filter(|&t| keep(t))
        .filter_map(|t| adiabaticity(drive, t).ok())
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
        .ok_or(Error::Singular { t: t0 })
}

/// Peak η over the part of the window where the coupling is at least
/// `floor` times its largest sampled magnitude. Where the coupling has
/// switched off, η measures nothing physical, and for smooth pulses it
/// diverges in the tails.
pub fn peak_adiabaticity_driven<S: Sweep + ?Sized>(
    drive: &S,
    t0: f64,
    t1: f64,
    dt: f64,
    floor: f64,
) -> Result<f64> {
    let edges = drive.edges();
    let max_coupling = sample_times(t0, t1, dt, &edges)
        .map(|t| drive.coupling(t).abs())
        .fold(0.0, f64::max);
    let threshold = floor * max_coupling;
    peak_adiabaticity_where(drive, t0, t1, dt, |t| drive.coupling(t).abs() >= threshold)
}
