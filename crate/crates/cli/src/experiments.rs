use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use whichpath_core::circuit::{InterferometerSpec, PositionTwo};
use whichpath_core::estimator::{
    estimate_d_from, estimate_vc_from, estimate_vp, estimate_vp_from, fit_sine,
    phase_average_oracle_with_error, protocol_seed, record_fringes, uniform_phase_grid,
    visibility_std_error, EstimateResult, FringeData, Sampling, SineFit,
};
use whichpath_core::noise::{
    fit_noise_params_with, model_curves, model_value, FitOptions, NoiseParams, Observation,
    QuantityKind, Weighting,
};
use whichpath_core::quantifiers::{
    distinguishability, visibility_coherence, visibility_purity, CoherenceMode, OverlapMatrix,
};

use crate::config::{Experiment, ExperimentConfig, Quantity, WeightingSetting};
use crate::error::CliError;
use crate::results::{
    with_uncertainty, FitSummary, Method, ParamEstimate, RawRow, Record, Results, FORMAT,
};
use crate::svg::{self, Plot, Series, Style};

/// Exact protocol values must reproduce their references this closely.
pub const REFERENCE_TOL: f64 = 1e-8;
/// Tolerance on exact duality and hierarchy checks.
pub const DUALITY_TOL: f64 = 1e-10;
/// Monte Carlo deviations beyond this many standard errors are flagged.
pub const ORACLE_SIGMAS: f64 = 5.0;
/// Placeholder sigma of exact synthetic observations (sets the fit's scale
/// only; the optimum is unaffected).
pub const EXACT_SIGMA: f64 = 1e-3;

const SLOT_FRINGES: usize = 3;
const SLOT_ORACLE: usize = 4;
const PANEL: (f64, f64) = (420.0, 300.0);
const SMALL_PANEL: (f64, f64) = (260.0, 200.0);

pub struct Outcome {
    pub results: Results,
    pub raw: Vec<RawRow>,
    /// `(file name, svg text)`.
    pub plots: Vec<(String, String)>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    config
        .validate()
        .map_err(|(field, message)| CliError::Config {
            line: None,
            message: format!("{field}: {message}"),
        })?;
    let mut outcome = match config.experiment {
        Experiment::SweepTheta => sweep(config, &config.sweep_quantities(), false)?,
        Experiment::EstimateVp => sweep(config, &[Quantity::PurityVisibility], true)?,
        Experiment::Fringes => fringes(config)?,
        Experiment::Fit => fit(config)?,
        Experiment::OracleCheck => oracle_check(config)?,
    };
    outcome.results.violations.sort();
    outcome.results.violations.dedup();
    Ok(outcome)
}

fn sampling(config: &ExperimentConfig) -> Sampling {
    config.shots.map_or(Sampling::Exact, Sampling::Shots)
}

fn method(sampling: Sampling) -> Method {
    match sampling {
        Sampling::Exact => Method::Exact,
        Sampling::Shots(_) => Method::Sampled,
    }
}

fn spec_at(config: &ExperimentConfig, theta: f64) -> Result<InterferometerSpec, CliError> {
    Ok(InterferometerSpec::per_qubit_rotation(config.paths, theta)?
        .with_noise(config.noise_params()))
}

/// Analytic quantifier for ideal settings, exact noisy prediction otherwise.
fn reference(config: &ExperimentConfig, theta: f64, quantity: Quantity) -> Result<f64, CliError> {
    let quantity = match quantity {
        // Two-path fringe visibility equals V_C for real overlaps.
        Quantity::FringeVisibility if config.noise.is_ideal() => Quantity::CoherenceVisibility,
        Quantity::FringeVisibility => {
            let spec = spec_at(config, theta)?;
            let grid = uniform_phase_grid(config.phase_points);
            return Ok(fit_sine(&record_fringes(&spec, &grid, Sampling::Exact, 0)?)?.visibility());
        }
        q => q,
    };
    if config.noise.is_ideal() {
        let o = OverlapMatrix::from_spec(&InterferometerSpec::per_qubit_rotation(
            config.paths,
            theta,
        )?)?;
        Ok(match quantity {
            Quantity::CoherenceVisibility => {
                visibility_coherence(&o, CoherenceMode::RealOverlaps)?.value()
            }
            Quantity::PurityVisibility => visibility_purity(&o),
            _ => distinguishability(&o)?,
        })
    } else {
        let kind = quantity.kind().expect("protocol quantity");
        Ok(model_value(
            config.paths,
            theta,
            config.noise_params(),
            kind,
        )?)
    }
}

fn record(
    theta: f64,
    quantity: Quantity,
    est: &EstimateResult,
    sampling: Sampling,
    seed: u64,
    reference: f64,
) -> Record {
    Record {
        theta,
        quantity,
        method: method(sampling),
        value: est.value,
        std_error: est.std_error,
        settings_used: est.settings_used,
        clamped: est.clamped,
        seed: sampling.shots().map(|_| seed),
        reference: Some(reference),
    }
}

fn counts_text(counts: Option<&Vec<u64>>) -> String {
    counts.map_or(String::new(), |c| {
        c.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
    })
}

fn raw_rows(
    theta: f64,
    quantity: Quantity,
    est: &EstimateResult,
) -> impl Iterator<Item = RawRow> + '_ {
    est.settings.iter().map(move |s| RawRow {
        theta,
        quantity,
        setting: s.setting,
        phi: None,
        probability: s.probability,
        observed: s.observed,
        counts: counts_text(s.counts.as_ref()),
    })
}

fn check_reference(violations: &mut Vec<String>, r: &Record) {
    if let (Method::Exact, Some(reference)) = (r.method, r.reference) {
        if (r.value - reference).abs() > REFERENCE_TOL {
            violations.push(format!(
                "theta={}: exact {} = {} differs from reference {}",
                r.theta,
                r.quantity.label(),
                r.value,
                reference
            ));
        }
    }
}

/// Duality and hierarchy on exact records of one angle.
fn check_duality(
    violations: &mut Vec<String>,
    config: &ExperimentConfig,
    theta: f64,
    records: &[Record],
) {
    let exact = |q: Quantity| {
        records
            .iter()
            .find(|r| r.quantity == q && r.method == Method::Exact)
            .map(|r| r.value)
    };
    let (d, v_c, v_p) = (
        exact(Quantity::Distinguishability),
        exact(Quantity::CoherenceVisibility).or(exact(Quantity::FringeVisibility)),
        exact(Quantity::PurityVisibility),
    );
    if let (Some(v_c), Some(v_p)) = (v_c, v_p) {
        if v_c > v_p + DUALITY_TOL {
            violations.push(format!("theta={theta}: V_C = {v_c} exceeds V_P = {v_p}"));
        }
    }
    if let Some(d) = d {
        // Equality needs the ideal model and V_P; otherwise only the bound.
        if let (true, Some(v_p)) = (config.noise.is_ideal(), v_p) {
            let residual = d * d + v_p * v_p - 1.0;
            if residual.abs() > DUALITY_TOL {
                violations.push(format!("theta={theta}: D^2 + V_P^2 - 1 = {residual:e}"));
            }
        }
        if let Some(v) = v_p.or(v_c) {
            let residual = d * d + v * v - 1.0;
            if residual > DUALITY_TOL {
                violations.push(format!(
                    "theta={theta}: D^2 + V^2 = {} exceeds 1",
                    1.0 + residual
                ));
            }
        }
    }
}

fn sweep(
    config: &ExperimentConfig,
    quantities: &[Quantity],
    settings_plot: bool,
) -> Result<Outcome, CliError> {
    let sampling = sampling(config);
    let thetas = config.thetas();
    let per_angle = thetas
        .par_iter()
        .enumerate()
        .map(
            |(i, &theta)| -> Result<(Vec<Record>, Vec<RawRow>), CliError> {
                let spec = spec_at(config, theta)?;
                let at_two = PositionTwo::prepare(&spec)?;
                let mut records = Vec::new();
                let mut raw = Vec::new();
                for &q in quantities {
                    let kind = q.kind().expect("sweep quantity");
                    let stream = protocol_seed(config.seed, i, kind as usize);
                    let est = match kind {
                        QuantityKind::CoherenceVisibility => {
                            estimate_vc_from(&at_two, &spec, sampling, stream)?
                        }
                        QuantityKind::PurityVisibility => {
                            estimate_vp_from(&at_two, &spec, sampling, stream)?
                        }
                        QuantityKind::Distinguishability => {
                            estimate_d_from(&at_two, &spec, sampling, stream)?
                        }
                    };
                    records.push(record(
                        theta,
                        q,
                        &est,
                        sampling,
                        stream,
                        reference(config, theta, q)?,
                    ));
                    raw.extend(raw_rows(theta, q, &est));
                }
                Ok((records, raw))
            },
        )
        .collect::<Vec<_>>();

    let mut records = Vec::new();
    let mut raw = Vec::new();
    let mut violations = Vec::new();
    for (theta, angle) in thetas.iter().zip(per_angle) {
        let (r, w) = angle?;
        r.iter()
            .for_each(|rec| check_reference(&mut violations, rec));
        check_duality(&mut violations, config, *theta, &r);
        records.extend(r);
        raw.extend(w);
    }

    let mut plots = vec![
        (
            "visibility.svg".to_string(),
            quantities_plot(config, &records, "Quantifiers vs rotation angle"),
        ),
        ("duality.svg".to_string(), duality_plot(&records)),
    ];
    if settings_plot {
        plots.push(("settings.svg".to_string(), settings_figure(config, &raw)));
    }
    Ok(Outcome {
        results: Results {
            format: FORMAT.into(),
            config: config.clone(),
            records,
            fit: None,
            violations,
        },
        raw,
        plots,
    })
}

struct FringeAngle {
    theta: f64,
    data: FringeData,
    fit: SineFit,
    records: Vec<Record>,
    raw: Vec<RawRow>,
}

fn fringes(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let sampling = sampling(config);
    let grid = uniform_phase_grid(config.phase_points);
    let thetas = config.thetas();
    let angles = thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| -> Result<FringeAngle, CliError> {
            let spec = spec_at(config, theta)?;
            let stream = protocol_seed(config.seed, i, SLOT_FRINGES);
            let data = record_fringes(&spec, &grid, sampling, stream)?;
            let fit = fit_sine(&data)?;
            let visibility = Record {
                theta,
                quantity: Quantity::FringeVisibility,
                method: method(sampling),
                value: fit.visibility(),
                std_error: visibility_std_error(&data, &fit)?,
                settings_used: grid.len(),
                clamped: false,
                seed: sampling.shots().map(|_| stream),
                reference: Some(reference(config, theta, Quantity::FringeVisibility)?),
            };
            let d_stream = protocol_seed(config.seed, i, QuantityKind::Distinguishability as usize);
            let at_two = PositionTwo::prepare(&spec)?;
            let d = estimate_d_from(&at_two, &spec, sampling, d_stream)?;
            let d_record = record(
                theta,
                Quantity::Distinguishability,
                &d,
                sampling,
                d_stream,
                reference(config, theta, Quantity::Distinguishability)?,
            );

            let exact = record_fringes(&spec, &grid, Sampling::Exact, 0)?;
            let mut raw: Vec<RawRow> = (0..grid.len())
                .map(|j| RawRow {
                    theta,
                    quantity: Quantity::FringeVisibility,
                    setting: j,
                    phi: Some(grid[j]),
                    probability: exact.rate0[j],
                    observed: data.rate0[j],
                    counts: data.counts.as_ref().map_or(String::new(), |c| {
                        format!("{};{}", c.counts0[j], c.counts1[j])
                    }),
                })
                .collect();
            raw.extend(raw_rows(theta, Quantity::Distinguishability, &d));
            Ok(FringeAngle {
                theta,
                data,
                fit,
                records: vec![visibility, d_record],
                raw,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut records = Vec::new();
    let mut raw = Vec::new();
    let mut violations = Vec::new();
    for a in &angles {
        a.records
            .iter()
            .filter(|r| r.quantity == Quantity::Distinguishability)
            .for_each(|r| check_reference(&mut violations, r));
        check_duality(&mut violations, config, a.theta, &a.records);
        records.extend(a.records.iter().cloned());
        raw.extend(a.raw.iter().cloned());
    }
    let plots = vec![
        ("fringes.svg".to_string(), fringe_figure(&angles)),
        (
            "visibility.svg".to_string(),
            quantities_plot(config, &records, "Fringe visibility and distinguishability"),
        ),
        ("duality.svg".to_string(), duality_plot(&records)),
    ];
    Ok(Outcome {
        results: Results {
            format: FORMAT.into(),
            config: config.clone(),
            records,
            fit: None,
            violations,
        },
        raw,
        plots,
    })
}

#[derive(Debug, Deserialize)]
struct DataRow {
    theta: f64,
    quantity: Quantity,
    value: f64,
    sigma: f64,
}

fn read_observations(path: &Path) -> Result<Vec<Observation>, CliError> {
    let input_error = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| input_error(e.to_string()))?;
    let mut out = Vec::new();
    for row in reader.deserialize::<DataRow>() {
        let row = row.map_err(|e| {
            let line = e
                .position()
                .map_or(String::new(), |p| format!("line {}: ", p.line()));
            input_error(format!("{line}{e}"))
        })?;
        let quantity = row
            .quantity
            .kind()
            .ok_or_else(|| input_error("fits use V_C, V_P or D observations".into()))?;
        out.push(Observation {
            theta: row.theta,
            quantity,
            value: row.value,
            sigma: row.sigma,
        });
    }
    if out.is_empty() {
        return Err(input_error("no observations".into()));
    }
    Ok(out)
}

fn quantity_of(kind: QuantityKind) -> Quantity {
    match kind {
        QuantityKind::CoherenceVisibility => Quantity::CoherenceVisibility,
        QuantityKind::PurityVisibility => Quantity::PurityVisibility,
        QuantityKind::Distinguishability => Quantity::Distinguishability,
    }
}

fn fit(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let fit_config = config.fit.as_ref().expect("validated");
    let sampling = sampling(config);
    let (observations, mut records, raw, truth) = match &fit_config.data {
        Some(path) => {
            let obs = read_observations(path)?;
            let records = obs
                .iter()
                .map(|o| Record {
                    theta: o.theta,
                    quantity: quantity_of(o.quantity),
                    method: Method::Sampled,
                    value: o.value,
                    std_error: o.sigma,
                    settings_used: 0,
                    clamped: false,
                    seed: None,
                    reference: None,
                })
                .collect::<Vec<_>>();
            (obs, records, Vec::new(), None)
        }
        None => {
            let measured = sweep(config, &fit_config.quantities, false)?;
            let obs = measured
                .results
                .records
                .iter()
                .map(|r| Observation {
                    theta: r.theta,
                    quantity: r.quantity.kind().expect("protocol quantity"),
                    value: r.value,
                    sigma: match sampling {
                        Sampling::Exact => EXACT_SIGMA,
                        Sampling::Shots(shots) => r.std_error.max(1.0 / shots as f64),
                    },
                })
                .collect();
            (
                obs,
                measured.results.records,
                measured.raw,
                Some(config.noise.values()),
            )
        }
    };

    let options = FitOptions {
        paths: config.paths,
        free: fit_config.free,
        initial: fit_config.initial.params()?,
        multistarts: fit_config.multistarts,
        weighting: match fit_config.weighting {
            WeightingSetting::Sigma => Weighting::Sigma,
            WeightingSetting::Uniform => Weighting::Uniform,
        },
    };
    let result = fit_noise_params_with(&observations, &options)?;
    let values = result.params.to_array();
    let estimate = |i: usize| ParamEstimate {
        value: values[i],
        std_error: result.std_errors[i],
        fixed: result.fixed_mask[i],
        display: with_uncertainty(values[i], result.std_errors[i]),
    };
    let summary = FitSummary {
        epsilon: estimate(0),
        t: estimate(1),
        gamma: estimate(2),
        residual_sum: result.residual_sum,
        converged: result.converged,
        evaluations: result.evaluations,
        observations: observations.len(),
        truth,
    };

    let mut kinds: Vec<QuantityKind> = observations.iter().map(|o| o.quantity).collect();
    kinds.sort();
    kinds.dedup();
    let mut thetas: Vec<f64> = observations.iter().map(|o| o.theta).collect();
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();
    for &kind in &kinds {
        for (theta, value) in
            thetas
                .iter()
                .zip(model_curves(config.paths, &thetas, result.params, kind)?)
        {
            records.push(Record {
                theta: *theta,
                quantity: quantity_of(kind),
                method: Method::Model,
                value,
                std_error: 0.0,
                settings_used: 0,
                clamped: false,
                seed: None,
                reference: None,
            });
        }
    }
    let mut violations = Vec::new();
    if !result.converged {
        violations.push("fit: multistart optima disagree beyond 1e-3".to_string());
    }
    let plot = fit_plot(config, &observations, &kinds, result.params, &summary)?;
    Ok(Outcome {
        results: Results {
            format: FORMAT.into(),
            config: config.clone(),
            records,
            fit: Some(summary),
            violations,
        },
        raw,
        plots: vec![("fit.svg".to_string(), plot)],
    })
}

fn oracle_check(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let thetas = config.thetas();
    let per_angle = thetas
        .par_iter()
        .enumerate()
        .map(
            |(i, &theta)| -> Result<(Vec<Record>, Vec<RawRow>), CliError> {
                let spec = spec_at(config, theta)?;
                let stream = protocol_seed(config.seed, i, SLOT_ORACLE);
                let (oracle, oracle_se) =
                    phase_average_oracle_with_error(&spec, config.oracle_samples, stream)?;
                let sweep = estimate_vp(&spec, Sampling::Exact, 0)?;
                let closed = if config.noise.is_ideal() {
                    Some(visibility_purity(&OverlapMatrix::from_spec(&spec)?))
                } else {
                    None
                };
                let records = vec![
                    Record {
                        theta,
                        quantity: Quantity::PurityVisibility,
                        method: Method::Oracle,
                        value: oracle,
                        std_error: oracle_se,
                        settings_used: config.oracle_samples,
                        clamped: false,
                        seed: Some(stream),
                        reference: closed,
                    },
                    Record {
                        theta,
                        quantity: Quantity::PurityVisibility,
                        method: Method::Exact,
                        value: sweep.value,
                        std_error: 0.0,
                        settings_used: sweep.settings_used,
                        clamped: false,
                        seed: None,
                        reference: closed,
                    },
                ];
                Ok((
                    records,
                    raw_rows(theta, Quantity::PurityVisibility, &sweep).collect(),
                ))
            },
        )
        .collect::<Vec<_>>();

    let mut records = Vec::new();
    let mut raw = Vec::new();
    let mut violations = Vec::new();
    for angle in per_angle {
        let (r, w) = angle?;
        for rec in &r {
            match (rec.method, rec.reference) {
                (Method::Exact, Some(closed)) if rec.value > closed + DUALITY_TOL => violations.push(format!(
                    "theta={}: binary sweep {} exceeds the phase average {closed}",
                    rec.theta, rec.value
                )),
                (Method::Oracle, Some(closed)) if (rec.value - closed).abs() > ORACLE_SIGMAS * rec.std_error.max(1e-12) => {
                    violations.push(format!(
                        "theta={}: oracle {} deviates from {closed} by more than {ORACLE_SIGMAS} standard errors",
                        rec.theta, rec.value
                    ))
                }
                _ => {}
            }
        }
        records.extend(r);
        raw.extend(w);
    }
    let plot = oracle_plot(&records);
    Ok(Outcome {
        results: Results {
            format: FORMAT.into(),
            config: config.clone(),
            records,
            fit: None,
            violations,
        },
        raw,
        plots: vec![("oracle.svg".to_string(), plot)],
    })
}

fn color_of(q: Quantity) -> &'static str {
    match q {
        Quantity::Distinguishability => svg::GREEN,
        Quantity::PurityVisibility => svg::RED,
        _ => svg::BLUE,
    }
}

fn theta_range(thetas: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = thetas.fold((0.0f64, PI), |(a, b), t| (a.min(t), b.max(t)));
    (lo, hi)
}

fn quantities_plot(config: &ExperimentConfig, records: &[Record], title: &str) -> String {
    let mut quantities: Vec<Quantity> = records.iter().map(|r| r.quantity).collect();
    quantities.sort();
    quantities.dedup();
    let mut series = Vec::new();
    for q in quantities {
        let rs: Vec<&Record> = records.iter().filter(|r| r.quantity == q).collect();
        series.push(
            Series::new(
                q.label(),
                color_of(q),
                Style::Markers,
                rs.iter().map(|r| (r.theta, r.value)).collect(),
            )
            .with_errors(rs.iter().map(|r| r.std_error).collect()),
        );
        let label = if config.noise.is_ideal() {
            "analytic"
        } else {
            "model"
        };
        series.push(Series::new(
            format!("{} {label}", q.label()),
            color_of(q),
            Style::Dashed,
            rs.iter()
                .filter_map(|r| r.reference.map(|v| (r.theta, v)))
                .collect(),
        ));
    }
    let plot = Plot {
        title: format!("{title} (N = {})", config.paths),
        x_label: "theta [rad]".into(),
        y_label: "value".into(),
        x_range: theta_range(records.iter().map(|r| r.theta)),
        y_range: (0.0, 1.05),
        series,
    };
    svg::figure(&[plot], 1, PANEL)
}

fn duality_plot(records: &[Record]) -> String {
    let by_theta = |q: Quantity| -> Vec<(f64, f64)> {
        records
            .iter()
            .filter(|r| r.quantity == q)
            .map(|r| (r.theta, r.value))
            .collect()
    };
    let d = by_theta(Quantity::Distinguishability);
    let mut series = Vec::new();
    for q in [
        Quantity::FringeVisibility,
        Quantity::CoherenceVisibility,
        Quantity::PurityVisibility,
    ] {
        let v = by_theta(q);
        let points: Vec<(f64, f64)> = v
            .iter()
            .filter_map(|&(t, vv)| {
                d.iter()
                    .find(|(td, _)| *td == t)
                    .map(|&(_, dd)| (dd * dd, vv * vv))
            })
            .collect();
        if !points.is_empty() {
            series.push(Series::new(
                format!("{}^2 vs D^2", q.label()),
                color_of(q),
                Style::Markers,
                points,
            ));
        }
    }
    series.push(Series::new(
        "D^2 + V^2 = 1",
        svg::BLACK,
        Style::Line,
        vec![(0.0, 1.0), (1.0, 0.0)],
    ));
    let plot = Plot {
        title: "Duality plane".into(),
        x_label: "D^2".into(),
        y_label: "V^2".into(),
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        series,
    };
    svg::figure(&[plot], 1, (360.0, 340.0))
}

fn fringe_figure(angles: &[FringeAngle]) -> String {
    let plots: Vec<Plot> = angles
        .iter()
        .map(|a| {
            let phi = &a.data.phi_grid;
            let dense: Vec<f64> = (0..=100).map(|i| 2.0 * PI * i as f64 / 100.0).collect();
            let model = |x: f64| a.fit.amplitude * (x + a.fit.phase_shift).sin() + a.fit.offset;
            Plot {
                title: format!("theta = {:.3} pi", a.theta / PI),
                x_label: "phi [rad]".into(),
                y_label: "rate".into(),
                x_range: (0.0, 2.0 * PI),
                y_range: (0.0, 1.0),
                series: vec![
                    Series::new(
                        "|0>",
                        svg::BLUE,
                        Style::Markers,
                        phi.iter()
                            .copied()
                            .zip(a.data.rate0.iter().copied())
                            .collect(),
                    ),
                    Series::new(
                        "fit |0>",
                        svg::BLUE,
                        Style::Line,
                        dense.iter().map(|&x| (x, model(x))).collect(),
                    ),
                    Series::new(
                        "|1>",
                        svg::GREEN,
                        Style::Markers,
                        phi.iter()
                            .copied()
                            .zip(a.data.rate0.iter().map(|p| 1.0 - p))
                            .collect(),
                    ),
                    Series::new(
                        "fit |1>",
                        svg::GREEN,
                        Style::Dashed,
                        dense.iter().map(|&x| (x, 1.0 - model(x))).collect(),
                    ),
                ],
            }
        })
        .collect();
    svg::figure(&plots, 4, SMALL_PANEL)
}

fn settings_figure(config: &ExperimentConfig, raw: &[RawRow]) -> String {
    let mut thetas: Vec<f64> = raw.iter().map(|r| r.theta).collect();
    thetas.dedup();
    let plots: Vec<Plot> = thetas
        .iter()
        .map(|&theta| {
            let rows: Vec<&RawRow> = raw.iter().filter(|r| r.theta == theta).collect();
            let settings = rows.len() as f64;
            let mean = 1.0 / config.paths as f64;
            Plot {
                title: format!("theta = {:.3} pi", theta / PI),
                x_label: "binary setting".into(),
                y_label: "p(0|phi)".into(),
                x_range: (0.0, settings.max(2.0) - 1.0),
                y_range: Plot::auto_range(rows.iter().map(|r| r.observed).chain([mean])),
                series: vec![
                    Series::new(
                        "observed",
                        svg::BLUE,
                        Style::Markers,
                        rows.iter()
                            .map(|r| (r.setting as f64, r.observed))
                            .collect(),
                    ),
                    Series::new(
                        "1/N",
                        svg::GREY,
                        Style::Dashed,
                        vec![(0.0, mean), (settings - 1.0, mean)],
                    ),
                ],
            }
        })
        .collect();
    svg::figure(&plots, 3, SMALL_PANEL)
}

fn fit_plot(
    config: &ExperimentConfig,
    observations: &[Observation],
    kinds: &[QuantityKind],
    params: NoiseParams,
    summary: &FitSummary,
) -> Result<String, CliError> {
    let (lo, hi) = theta_range(observations.iter().map(|o| o.theta));
    let dense: Vec<f64> = (0..=100)
        .map(|i| lo + (hi - lo) * i as f64 / 100.0)
        .collect();
    let mut series = Vec::new();
    for &kind in kinds {
        let q = quantity_of(kind);
        let obs: Vec<&Observation> = observations.iter().filter(|o| o.quantity == kind).collect();
        series.push(
            Series::new(
                q.label(),
                color_of(q),
                Style::Markers,
                obs.iter().map(|o| (o.theta, o.value)).collect(),
            )
            .with_errors(obs.iter().map(|o| o.sigma).collect()),
        );
        let curve = model_curves(config.paths, &dense, params, kind)?;
        series.push(Series::new(
            format!("{} fit", q.label()),
            color_of(q),
            Style::Line,
            dense.iter().copied().zip(curve).collect(),
        ));
    }
    let plot = Plot {
        title: format!(
            "N = {}: epsilon = {}, T = {}, gamma = {}",
            config.paths, summary.epsilon.display, summary.t.display, summary.gamma.display
        ),
        x_label: "theta [rad]".into(),
        y_label: "value".into(),
        x_range: (lo, hi),
        y_range: (0.0, 1.05),
        series,
    };
    Ok(svg::figure(&[plot], 1, (520.0, 340.0)))
}

fn oracle_plot(records: &[Record]) -> String {
    let pick = |m: Method| -> Vec<&Record> { records.iter().filter(|r| r.method == m).collect() };
    let oracle = pick(Method::Oracle);
    let sweep = pick(Method::Exact);
    let mut series = vec![
        Series::new(
            "phase average",
            svg::RED,
            Style::Markers,
            oracle.iter().map(|r| (r.theta, r.value)).collect(),
        )
        .with_errors(oracle.iter().map(|r| r.std_error).collect()),
        Series::new(
            "binary sweep",
            svg::BLUE,
            Style::Markers,
            sweep.iter().map(|r| (r.theta, r.value)).collect(),
        ),
    ];
    let closed: Vec<(f64, f64)> = sweep
        .iter()
        .filter_map(|r| r.reference.map(|v| (r.theta, v)))
        .collect();
    if !closed.is_empty() {
        series.push(Series::new(
            "closed form",
            svg::BLACK,
            Style::Dashed,
            closed,
        ));
    }
    let plot = Plot {
        title: "V_P: phase average vs binary sweep".into(),
        x_label: "theta [rad]".into(),
        y_label: "V_P".into(),
        x_range: theta_range(records.iter().map(|r| r.theta)),
        y_range: (0.0, 1.05),
        series,
    };
    svg::figure(&[plot], 1, PANEL)
}
