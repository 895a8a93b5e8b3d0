//! Scenario execution and output files.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::{Scenario, ScenarioConfig, SpectralSource};
use crate::gates::{self, GateReport, ScenarioRun, SingleQubitScenario, TwoQubitBasis};
use crate::spectral::{compute_spectral_data, SpectralData};
use crate::{Error, Result};

/// What a finished run reports back.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub csv: Option<PathBuf>,
    pub json: PathBuf,
    pub report: Option<GateReport>,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    scenario: Scenario,
    name: &'a str,
    #[serde(flatten)]
    report: &'a GateReport,
}

pub fn load_spectral(cfg: &ScenarioConfig) -> Result<SpectralData> {
    let data = match &cfg.spectral {
        SpectralSource::Solve { levels, grid } => {
            compute_spectral_data(grid, &cfg.constants, *levels)?
        }
        SpectralSource::File { path } => SpectralData::from_json(&fs::read_to_string(path)?)?,
    };
    data.validate()?;
    Ok(data)
}

fn output_path(out_dir: &Path, given: &Option<PathBuf>, label: &str, ext: &str) -> PathBuf {
    match given {
        Some(p) if p.is_absolute() => p.clone(),
        Some(p) => out_dir.join(p),
        None => out_dir.join(format!("{label}.{ext}")),
    }
}

/// Run one scenario and write its CSV and JSON into `out_dir`.
pub fn execute(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Outcome> {
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let start = Instant::now();
    let label = cfg.label().to_string();
    let json = output_path(out_dir, &cfg.output.json, &label, "json");

    if cfg.scenario == Scenario::Spectrum {
        let data = load_spectral(cfg)?;
        fs::write(&json, data.to_json()? + "\n")?;
        let energies: Vec<String> = data.energies.iter().map(|e| format!("{e:.4}")).collect();
        let summary = format!(
            "{label}: energies [{}] meV, f10 {:.2} GHz, wall {:.2} s",
            energies.join(", "),
            data.f10_ghz(),
            start.elapsed().as_secs_f64()
        );
        return Ok(Outcome {
            summary,
            csv: None,
            json,
            report: None,
        });
    }

    let run = simulate(cfg)?;
    let csv = output_path(out_dir, &cfg.output.csv, &label, "csv");
    run.trace
        .write_csv(BufWriter::new(fs::File::create(&csv)?), cfg.output.stride)?;
    let doc = ReportDocument {
        scenario: cfg.scenario,
        name: &label,
        report: &run.report,
    };
    fs::write(&json, serde_json::to_string_pretty(&doc)? + "\n")?;

    let pops: Vec<String> = run
        .report
        .final_populations
        .iter()
        .map(|p| format!("{p:.4}"))
        .collect();
    let mut summary = format!(
        "{label}: populations [{}], peak eta {:.3}, fidelity {:.4}",
        pops.join(", "),
        run.report.peak_eta,
        run.report.fidelity
    );
    if run.trace.flagged {
        summary.push_str(&format!(
            ", norm drift {:.1e} (flagged)",
            run.trace.norm_drift
        ));
    }
    summary.push_str(&format!(", wall {:.2} s", start.elapsed().as_secs_f64()));
    Ok(Outcome {
        summary,
        csv: Some(csv),
        json,
        report: Some(run.report),
    })
}

/// Propagate a gate scenario without touching the filesystem (except to
/// read a cached spectrum).
pub fn simulate(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let dt = cfg.numerics.dt;
    let [t0, t1] = cfg.numerics.window;
    let target = cfg.target_populations()?;
    match cfg.scenario {
        Scenario::Spectrum => Err(Error::Usage("spectrum has no time evolution".into())),
        Scenario::Rabi => {
            let rabi = cfg.rabi.as_ref().expect("validated");
            let mut run = gates::run_rabi(rabi.omega, t1 - t0, cfg.qubit_index(2)?, dt)?;
            run.trace.times.iter_mut().for_each(|t| *t += t0);
            run.report.fidelity =
                gates::population_fidelity(&run.report.final_populations, &target)?;
            Ok(run)
        }
        Scenario::ScrapSingle | Scenario::NonadiabaticSingle => {
            let scenario = SingleQubitScenario::new(
                load_spectral(cfg)?,
                cfg.pulse("stark"),
                cfg.pulse("pump"),
                (t0, t1),
                &cfg.constants,
            )?;
            if cfg.scenario == Scenario::ScrapSingle {
                gates::run_scrap_single(&scenario, cfg.qubit_index(3)?, &target, dt)
            } else {
                gates::run_nonadiabatic_single(&scenario, cfg.qubit_index(2)?, &target, dt)
            }
        }
        Scenario::ScrapTwo | Scenario::NonadiabaticTwo | Scenario::Bell => {
            let params = cfg.two_qubit.as_ref().expect("validated");
            let tq = params.build(cfg.pulse("stark2"), cfg.constants)?;
            let initial: TwoQubitBasis = cfg.initial.parse()?;
            gates::run_two_qubit(&tq, initial, (t0, t1), dt, params.frame, &target)
        }
    }
}

/// Parse `key=v1,v2,...` into the key and its values.
pub fn parse_sweep(spec: &str) -> Result<(String, Vec<String>)> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| Error::Usage(format!("--sweep expects KEY=V1,V2,..., got '{spec}'")))?;
    let values: Vec<String> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect();
    if key.trim().is_empty() || values.is_empty() {
        return Err(Error::Usage(format!(
            "--sweep expects KEY=V1,V2,..., got '{spec}'"
        )));
    }
    Ok((key.trim().to_string(), values))
}

/// One configuration per sweep value, each with its own output names.
pub fn expand_sweep(
    cfg: &ScenarioConfig,
    key: &str,
    values: &[String],
) -> Result<Vec<ScenarioConfig>> {
    let leaf = key.rsplit('.').next().unwrap_or(key);
    values
        .iter()
        .map(|v| {
            let mut c = cfg.with_override(key, v)?;
            c.name = Some(format!("{}_{leaf}={v}", cfg.label()));
            c.output.csv = None;
            c.output.json = None;
            Ok(c)
        })
        .collect()
}

/// Run independent configurations on worker threads. Results come back in
/// input order.
pub fn execute_all(configs: &[ScenarioConfig], out_dir: &Path) -> Vec<Result<Outcome>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || execute(c, out_dir)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Usage("worker thread panicked".into())))
            })
            .collect()
    })
}
