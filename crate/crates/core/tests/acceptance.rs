//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use he_qubit::cli::presets::preset;
use he_qubit::cli::run::simulate;
use he_qubit::cli::ScenarioConfig;
use he_qubit::dynamics::{
    propagate_euler_angles, propagate_state, reconstruct_unitary, FnHamiltonian, GenericDrive,
    StateVector,
};
use he_qubit::gates::{
    build_two_qubit_full, coulomb_coefficients, direct_unitary, iswap_unitary, run_rabi,
    rwa_hamiltonian, SingleQubitScenario, TwoQubitConfig,
};
use he_qubit::spectral::{
    analytic_mean_height, analytic_spectrum_oracle, compute_spectral_data, Grid, PhysicalConstants,
};
use he_qubit::units::joule_to_rad_per_ns;
use he_qubit::{Result, C64};

type Check = fn() -> Result<Verdict>;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn two_qubit_config(name: &str) -> Result<TwoQubitConfig> {
    let cfg = preset(name)?;
    cfg.two_qubit
        .as_ref()
        .expect("two-qubit preset")
        .build(cfg.pulse("stark2"), cfg.constants)
}

fn single_scenario(cfg: &ScenarioConfig) -> Result<SingleQubitScenario> {
    let [t0, t1] = cfg.numerics.window;
    SingleQubitScenario::new(
        he_qubit::cli::run::load_spectral(cfg)?,
        cfg.pulse("stark"),
        cfg.pulse("pump"),
        (t0, t1),
        &cfg.constants,
    )
}

fn spectrum() -> Result<Verdict> {
    let start = Instant::now();
    let c = PhysicalConstants::default();
    let data = compute_spectral_data(&Grid::default(), &c, 3)?;
    let secs = start.elapsed().as_secs_f64();
    let quoted = [-0.65, -0.16, -0.072];
    let worst_quoted = (0..3)
        .map(|n| rel(data.energies[n], quoted[n]))
        .fold(0.0, f64::max);
    let worst_oracle = (0..3)
        .map(|n| rel(data.energies[n], analytic_spectrum_oracle(n, &c)))
        .fold(0.0, f64::max);
    let omega_err = rel(data.omega10, 2.0 * PI * 117e9);
    verdict(
        worst_quoted < 0.01 && worst_oracle < 0.01 && omega_err < 0.02 && secs < 5.0,
        format!(
            "E = {:.4?} meV, max rel err {:.2e} (quoted) {:.2e} (oracle), f10 = {:.2} GHz ({:.2e}), {:.2} s",
            data.energies,
            worst_quoted,
            worst_oracle,
            data.f10_ghz(),
            omega_err,
            secs
        ),
    )
}

fn dipoles() -> Result<Verdict> {
    let c = PhysicalConstants::default();
    let data = compute_spectral_data(&Grid::default(), &c, 3)?;
    let got = [
        data.z(0, 0),
        data.z(1, 1),
        data.z(2, 2),
        data.z(0, 1).abs(),
        data.z(1, 2).abs(),
    ];
    let quoted = [0.0115, 0.0461, 0.1038, 0.0043, 0.0142];
    let worst_quoted = got
        .iter()
        .zip(&quoted)
        .map(|(g, q)| rel(*g, *q))
        .fold(0.0, f64::max);
    let worst_oracle = (0..3)
        .map(|n| rel(data.z(n, n), analytic_mean_height(n, &c)))
        .fold(0.0, f64::max);
    verdict(
        worst_quoted < 0.05 && worst_oracle < 0.01,
        format!(
            "z = {got:.5?} um, max rel err {worst_quoted:.2e} (quoted) {worst_oracle:.2e} (oracle)"
        ),
    )
}

fn rabi() -> Result<Verdict> {
    let run = run_rabi(PI, 1.0, 0, 1e-3)?;
    let transfer_err = (run.report.final_populations[1] - 1.0).abs();
    let pointwise = run
        .trace
        .times
        .iter()
        .zip(&run.trace.populations)
        .map(|(t, p)| (p[1] - (1.0 - (PI * t).cos()) / 2.0).abs())
        .fold(0.0, f64::max);
    verdict(
        transfer_err < 1e-6 && pointwise < 1e-5,
        format!("|P1(T) - 1| = {transfer_err:.2e}, max |P1(t) - (1 - cos D)/2| = {pointwise:.2e}"),
    )
}

fn fig3a() -> Result<Verdict> {
    let start = Instant::now();
    let run = simulate(&preset("fig3a")?)?;
    let secs = start.elapsed().as_secs_f64();
    let p = &run.report.final_populations;
    let eta = run.report.peak_eta;
    verdict(
        p[0] > 0.99 && p[2] < 0.01 && (0.09..=0.17).contains(&eta) && secs < 30.0,
        format!(
            "P0 = {:.5}, P2 = {:.2e}, peak eta = {eta:.3}, {secs:.2} s",
            p[0], p[2]
        ),
    )
}

fn fig3c() -> Result<Verdict> {
    let run = simulate(&preset("fig3c")?)?;
    let p = &run.report.final_populations;
    verdict(
        (p[0] - 0.5).abs() <= 0.02 && (p[1] - 0.5).abs() <= 0.02,
        format!("P0 = {:.5}, P1 = {:.5}, P2 = {:.2e}", p[0], p[1], p[2]),
    )
}

fn duration_insensitivity() -> Result<Verdict> {
    let cfg = preset("fig3a")?;
    let base = single_scenario(&cfg)?;
    let stretched = base.with_durations_scaled(1.5);
    let p = |s: &SingleQubitScenario| -> Result<f64> {
        let run = he_qubit::gates::run_scrap_single(s, 1, &[1.0, 0.0, 0.0], cfg.numerics.dt)?;
        Ok(run.report.final_populations[0])
    };
    let (a, b) = (p(&base)?, p(&stretched)?);
    verdict(
        (a - b).abs() < 0.005,
        format!(
            "P0 = {a:.5} (x1) vs {b:.5} (x1.5), change {:.2e}",
            (a - b).abs()
        ),
    )
}

fn fig5() -> Result<Verdict> {
    let run = simulate(&preset("fig5")?)?;
    let p10 = run.report.final_populations[2];
    let eta = run.report.peak_eta;
    verdict(
        p10 > 0.99 && (0.07..=0.13).contains(&eta),
        format!("P(10) = {p10:.5}, peak eta = {eta:.3}"),
    )
}

fn fig6b() -> Result<Verdict> {
    let cfg = preset("fig6b")?;
    let run = simulate(&cfg)?;
    let p10 = run.report.final_populations[2];
    let eta = run.report.peak_eta;
    let window = cfg.numerics.window[1] - cfg.numerics.window[0];
    verdict(
        p10 > 0.98 && window <= 100.0 && (0.35..=0.65).contains(&eta),
        format!("P(10) = {p10:.5} after {window:.1} ns, peak eta = {eta:.3}"),
    )
}

fn fig6c() -> Result<Verdict> {
    let run = simulate(&preset("fig6c")?)?;
    let p = &run.report.final_populations;
    let coherence = run.report.coherence.unwrap_or(0.0);
    verdict(
        (p[1] - 0.5).abs() <= 0.05 && (p[2] - 0.5).abs() <= 0.05 && coherence.abs() > 0.1,
        format!(
            "P(01) = {:.5}, P(10) = {:.5}, Re(C1*C2) = {coherence:.4}",
            p[1], p[2]
        ),
    )
}

/// Largest pointwise gap between the Euler-angle propagator and direct RK4
/// from the first basis state, and the largest unitarity defect.
fn euler_vs_direct(
    drive: &GenericDrive,
    t0: f64,
    t1: f64,
    dt: f64,
    refine: usize,
) -> Result<(f64, f64)> {
    let direct = propagate_state(drive, &StateVector::basis(2, 0)?, t0, t1, dt)?;
    let steps = direct.len() - 1;
    let angles = propagate_euler_angles(drive, t0, t1, (t1 - t0) / (steps * refine) as f64)?;
    assert_eq!(angles.len(), steps * refine + 1);
    let mut gap: f64 = 0.0;
    let mut defect: f64 = 0.0;
    for (k, state) in direct.states.iter().enumerate() {
        let u = reconstruct_unitary(&angles[k * refine]);
        gap = gap
            .max((u[(0, 0)] - state.amplitude(0)).norm())
            .max((u[(1, 0)] - state.amplitude(1)).norm());
        let id = u.adjoint() * u - nalgebra::Matrix2::<C64>::identity();
        defect = defect.max(id.iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    Ok((gap, defect))
}

fn propagator_equivalence() -> Result<Verdict> {
    let mut cases: Vec<(String, GenericDrive, f64, f64)> = Vec::new();
    cases.push((
        "rabi".into(),
        GenericDrive::new(|_| 0.0, |_| 0.5 * PI, |_| 0.0),
        0.0,
        1.0,
    ));
    let cfg6a = preset("fig6a")?;
    let [a0, a1] = cfg6a.numerics.window;
    cases.push((
        "fig6a".into(),
        single_scenario(&cfg6a)?.generic_drive(),
        a0,
        a1,
    ));
    for name in ["fig5", "fig6b", "fig6c"] {
        let [t0, t1] = preset(name)?.numerics.window;
        cases.push((name.into(), two_qubit_config(name)?.generic_drive(), t0, t1));
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, drive, t0, t1) in &cases {
        match euler_vs_direct(drive, *t0, *t1, 1e-3, 100) {
            Ok((gap, defect)) => {
                pass &= gap < 1e-5 && defect < 1e-10;
                parts.push(format!("{name} {gap:.1e}/{defect:.1e}"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name} failed: {e}"));
            }
        }
    }
    verdict(
        pass,
        format!("max |U e0 - psi| / unitarity defect: {}", parts.join(", ")),
    )
}

fn invariant_subspaces() -> Result<Verdict> {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for name in ["fig5", "fig6b", "fig6c"] {
        let tq = two_qubit_config(name)?;
        let [t0, t1] = preset(name)?.numerics.window;
        // Keep the largest diagonal phase per step at 0.005 rad.
        let max_rate = [t0, t1]
            .iter()
            .flat_map(|&t| tq.deltas(t))
            .map(f64::abs)
            .fold(0.0, f64::max);
        let dt = 0.005 / max_rate;
        let h = FnHamiltonian::new(4, |t| build_two_qubit_full(&tq, t));
        for idx in [0, 3] {
            let run = propagate_state(&h, &StateVector::basis(4, idx)?, t0, t1, dt)?;
            let dev = run
                .populations
                .iter()
                .map(|p| (p[idx] - 1.0).abs())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
            pass &= dev < 1e-8;
        }
    }
    verdict(
        pass,
        format!("max population change of |00>, |11> over fig5/fig6b/fig6c = {worst:.2e}"),
    )
}

fn iswap_oracle() -> Result<Verdict> {
    let c = PhysicalConstants::default();
    let z = TwoQubitConfig::reference(he_qubit::pulses::Pulse::Zero).z1;
    let coeffs = coulomb_coefficients(&z, &z, 0.5, &c)?;
    let h = rwa_hamiltonian(&coeffs, &c);
    let hh = FnHamiltonian::new(4, |_| h.clone());
    let xi_rate = joule_to_rad_per_ns(&c, coeffs.zeta12_xx);
    let phi_rate = joule_to_rad_per_ns(&c, coeffs.zeta12_zz);
    let mut worst: f64 = 0.0;
    for t in [1.73, 4.42, 9.07] {
        let u = direct_unitary(&hh, 0.0, t, 1e-3)?;
        let target = iswap_unitary(t * xi_rate, t * phi_rate);
        worst = worst.max((u - target).iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    verdict(
        worst < 1e-6,
        format!("max entrywise gap {worst:.2e} (xi rate {xi_rate:.4} rad/ns)"),
    )
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("spectrum", spectrum),
        ("dipole elements", dipoles),
        ("rabi baseline", rabi),
        ("fig3a scrap", fig3a),
        ("fig3c hadamard-like", fig3c),
        ("duration insensitivity", duration_insensitivity),
        ("fig5 adiabatic two-qubit", fig5),
        ("fig6b non-adiabatic i-swap", fig6b),
        ("fig6c bell state", fig6c),
        ("euler vs direct propagator", propagator_equivalence),
        ("invariant subspaces", invariant_subspaces),
        ("i-swap oracle", iswap_oracle),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
