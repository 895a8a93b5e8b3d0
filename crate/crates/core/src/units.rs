//! Conversions between SI quantities and the working units (μm, ns, V/m,
//! rad/ns).

use crate::spectral::PhysicalConstants;

pub const UM: f64 = 1e-6;
pub const NS: f64 = 1e-9;
pub const MEV: f64 = 1e-3;

/// Angular frequency (rad/ns) of an energy `e·E·z` with `E` in V/m and `z`
/// in μm.
pub fn field_length_rate(c: &PhysicalConstants) -> f64 {
    c.e_charge * UM / c.hbar * NS
}

/// Energy in joules to angular frequency in rad/ns.
pub fn joule_to_rad_per_ns(c: &PhysicalConstants, energy: f64) -> f64 {
    energy / c.hbar * NS
}

pub fn joule_to_mev(c: &PhysicalConstants, energy: f64) -> f64 {
    energy / c.e_charge / MEV
}

pub fn mev_to_joule(c: &PhysicalConstants, energy: f64) -> f64 {
    energy * MEV * c.e_charge
}
