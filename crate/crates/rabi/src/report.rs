//! CSV, JSON and SVG output of each experiment.

use rabi_core::dynamics::Trajectory;
use rabi_core::metrics::FourierSpectrum;
use rabi_core::model::{Branch, Frame, Parity};
use rabi_core::spectrum::{InverseSqrtFit, SpectrumTable};
use serde_json::json;

use crate::error::Result;
use crate::experiments::{
    BoundsTable, CellStatus, ConvergenceStudy, DynamicsComparison, HorizonRule, SplittingScan, SweepResult, SweepRow,
};
use crate::output::{at, num, opt_num, OutputDir};
use crate::plot::{Heatmap, LineChart, Series, Style};

fn sign(b: Branch) -> String {
    b.symbol().to_string()
}

fn frame_name(f: Frame) -> &'static str {
    match f {
        Frame::Lab => "lab",
        Frame::DisplacedRotating => "displaced",
    }
}

fn times(tr: &Trajectory) -> Vec<f64> {
    tr.grid.times().collect()
}

// ---------------------------------------------------------------- spectrum

pub fn spectrum(out: &mut OutputDir, table: &SpectrumTable, levels: usize, n_max: usize) -> Result<()> {
    let rows = table.rows.iter().map(|r| {
        vec![
            num(r.lambda),
            if r.parity == Parity::Even { "even" } else { "odd" }.to_string(),
            r.branch.to_string(),
            num(r.energy_full),
            num(r.energy_rwa),
        ]
    });
    out.csv("spectrum.csv", &["lambda", "sector", "branch", "energy_full", "energy_rwa"], rows)?;
    out.json(
        "spectrum.json",
        &json!({
            "levels": levels,
            "n_max": n_max,
            "lambda_points": table.lambda_grid.len(),
            "min_tracking_overlap": table.min_overlap,
        }),
    )?;
    out.svg("spectrum.svg", |path| {
        let mut c = LineChart::new("Full (solid) and RWA (dotted) spectra", "lambda / omega0", "E / omega0");
        for parity in [Parity::Even, Parity::Odd] {
            let branches = table.rows.iter().filter(|r| r.parity == parity).map(|r| r.branch).max().unwrap_or(0);
            for b in 0..=branches {
                let rows: Vec<_> = table.rows.iter().filter(|r| r.parity == parity && r.branch == b).collect();
                if rows.is_empty() {
                    continue;
                }
                let full_colour = if parity == Parity::Even { 0 } else { 2 };
                let rwa_colour = match rows[0].rwa_label {
                    Some((_, Branch::Plus)) => 1,
                    _ => 3,
                };
                c.series.push(Series::unlabelled(
                    rows.iter().map(|r| (r.lambda, r.energy_full)).collect(),
                    full_colour,
                    Style::Solid,
                ));
                c.series.push(Series::unlabelled(
                    rows.iter().map(|r| (r.lambda, r.energy_rwa)).collect(),
                    rwa_colour,
                    Style::Dotted,
                ));
            }
        }
        c.render(path)
    })
}

// --------------------------------------------------------------- splitting

fn fit_json(f: &Option<InverseSqrtFit>) -> serde_json::Value {
    match f {
        Some(f) => json!({
            "coefficient": f.coefficient,
            "residual": f.residual,
            "offset": f.offset,
            "prefactor": f.prefactor,
            "exponent": f.exponent,
        }),
        None => serde_json::Value::Null,
    }
}

pub fn splitting(out: &mut OutputDir, scan: &SplittingScan) -> Result<()> {
    let rows = scan.rows.iter().map(|r| {
        vec![
            r.n.to_string(),
            sign(r.branch),
            opt_num(r.lambda_s),
            num(r.delta),
            opt_num(scan.fit_coefficient(r.branch)),
            num(r.lambda_c_rwa),
            num(r.lambda_c_pusc),
        ]
    });
    out.csv(
        "splittings.csv",
        &["n", "sign", "lambda_s", "delta", "fit_coefficient", "lambda_c_rwa", "lambda_c_pusc"],
        rows,
    )?;
    let minus_above = scan
        .points(Branch::Minus)
        .iter()
        .filter_map(|&(n, m)| scan.points(Branch::Plus).iter().find(|p| p.0 == n).map(|p| m > p.1))
        .all(|b| b);
    out.json(
        "splittings.json",
        &json!({
            "delta": scan.delta,
            "fit_minus": fit_json(&scan.fit_minus),
            "fit_plus": fit_json(&scan.fit_plus),
            "tail_from": scan.fit_from,
            "tail_fit_minus": fit_json(&scan.tail_fit_minus),
            "tail_fit_plus": fit_json(&scan.tail_fit_plus),
            "minus_above_plus": minus_above,
            "failures": scan.failures().map(|r| json!({
                "n": r.n, "sign": sign(r.branch), "error": r.error,
            })).collect::<Vec<_>>(),
        }),
    )?;
    out.svg("splittings.svg", |path| {
        let mut c = LineChart::new("Splitting points", "n", "lambda_s / omega0");
        for (branch, colour, label) in [(Branch::Minus, 1, "lambda_s^-"), (Branch::Plus, 3, "lambda_s^+")] {
            let pts: Vec<(f64, f64)> = scan.points(branch).into_iter().map(|(n, l)| (n as f64, l)).collect();
            let n_hi = pts.iter().map(|p| p.0).fold(1.0, f64::max);
            c.series.push(Series::new(label, pts, colour, Style::Points));
            if let Some(k) = scan.fit_coefficient(branch) {
                let off = crate::experiments::branch_offset(branch) as f64;
                let curve = (0..=200).map(|i| 1.0 + (n_hi - 1.0) * i as f64 / 200.0).map(|n| (n, k / (n + off).sqrt()));
                c.series.push(Series::unlabelled(curve.collect(), colour, Style::Solid));
            }
        }
        c.render(path)
    })
}

// ---------------------------------------------------------------- dynamics

fn population_rows<'a>(full: &'a Trajectory, rwa: &'a Trajectory) -> impl Iterator<Item = Vec<String>> + 'a {
    full.grid
        .times()
        .zip(full.excited_population.iter().zip(&rwa.excited_population))
        .map(|(t, (a, b))| vec![num(t), num(*a), num(*b)])
}

fn fft_rows<'a>(a: &'a FourierSpectrum, b: &'a FourierSpectrum) -> impl Iterator<Item = Vec<String>> + 'a {
    (0..a.amplitudes.len().min(b.amplitudes.len()))
        .map(|k| vec![num(a.omega(k)), num(a.amplitudes[k]), num(b.amplitudes[k])])
}

fn population_chart(title: &str, full: &Trajectory, rwa: &Trajectory, guides: &[f64]) -> LineChart {
    let t = times(full);
    let mut c = LineChart::new(title, "t omega0", "P+");
    c.series.push(Series::from_xy("full", &t, &full.excited_population, 0, Style::Solid));
    c.series.push(Series::from_xy("RWA", &t, &rwa.excited_population, 1, Style::Dashed));
    c.vlines = guides.to_vec();
    c
}

fn spectrum_chart(title: &str, a: &FourierSpectrum, b: &FourierSpectrum, omega_max: f64) -> LineChart {
    let pts = |s: &FourierSpectrum| -> Vec<(f64, f64)> {
        (0..s.amplitudes.len()).map(|k| (s.omega(k), s.amplitudes[k])).take_while(|p| p.0 <= omega_max).collect()
    };
    let mut c = LineChart::new(title, "omega / omega0", "|FFT|");
    c.series.push(Series::new("full", pts(a), 0, Style::Solid));
    c.series.push(Series::new("RWA", pts(b), 1, Style::Dashed));
    c
}

fn conservation_json(tr: &Trajectory) -> serde_json::Value {
    let c = &tr.conservation;
    json!({
        "max_norm_error": c.max_norm_error,
        "energy_drift": c.energy_drift,
        "parity_drift": c.parity_drift,
        "excitation_drift": c.excitation_drift,
        "edge_weight": c.edge_weight,
        "n_max": tr.n_max,
    })
}

/// Populations, spectra and the run summary. With `metrics` also the
/// distance and bound series.
pub fn dynamics(out: &mut OutputDir, c: &DynamicsComparison, rule: HorizonRule, metrics: bool) -> Result<()> {
    let (tg, dg) = c.guides();
    out.csv(
        "dynamics.csv",
        &["t", "p_excited_full", "p_excited_rwa"],
        population_rows(&c.quantum_full, &c.quantum_rwa),
    )?;
    out.csv("dynamics_sc.csv", &["t", "p_excited_full", "p_excited_rwa"], population_rows(&c.sc_full, &c.sc_rwa))?;
    out.csv("fft.csv", &["omega", "amp_full", "amp_rwa"], fft_rows(&c.spectra_q.full, &c.spectra_q.rwa))?;
    out.csv("fft_sc.csv", &["omega", "amp_full", "amp_rwa"], fft_rows(&c.spectra_sc.full, &c.spectra_sc.rwa))?;

    let header = ["t", "norm_diff", "trace_dist_state", "trace_dist_spin", "bound_q", "bound_sc"];
    if metrics {
        let (q, s) = (&c.metrics_q, &c.metrics_sc);
        let rows = c.grid.times().enumerate().map(|(k, t)| {
            vec![
                num(t),
                at(&q.norm_diff, k),
                at(&q.trace_dist_state, k),
                at(&q.trace_dist_spin, k),
                at(&q.bound_value, k),
                at(&s.bound_value, k),
            ]
        });
        out.csv("metrics.csv", &header, rows)?;
        let rows = c.grid.times().enumerate().map(|(k, t)| {
            vec![
                num(t),
                at(&s.norm_diff, k),
                at(&s.trace_dist_state, k),
                at(&s.trace_dist_spin, k),
                String::new(),
                at(&s.bound_value, k),
            ]
        });
        out.csv("metrics_sc.csv", &header, rows)?;
        bounds_csv(out, "propagator.csv", &c.propagator)?;
    }

    out.json(
        "summary.json",
        &json!({
            "params": {
                "lambda": c.lambda, "alpha": c.alpha, "A": c.amplitude, "omega0": 1.0, "omega": 1.0,
            },
            "horizon": {
                "rule": rule.to_string(), "t_end": c.horizon.t_end, "requested": c.horizon.requested,
                "capped": c.horizon.capped, "samples": c.grid.len(), "dt": c.grid.dt(),
            },
            "r": c.spectra_q.correlation.r,
            "one_minus_r2": c.spectra_q.correlation.one_minus_r2,
            "semiclassical": {
                "r": c.spectra_sc.correlation.r,
                "one_minus_r2": c.spectra_sc.correlation.one_minus_r2,
            },
            "timescales": {
                "tau_r": c.timescales.tau_r, "tau_col": c.timescales.tau_col, "tau_rev": c.timescales.tau_rev,
            },
            "frame": frame_name(c.frame()),
            "bounds": {
                "aw_level": c.aw.level,
                "aw_horizon": c.aw.horizon,
                "burgarth_q_moments": [c.moments.0, c.moments.1],
                "burgarth_q_factor_at_50": c.bound_factor_at(50.0),
                "propagator_bound_holds": c.propagator.holds(),
            },
            "guides": { "t": tg, "distance": dg },
            "conservation": {
                "quantum_full": conservation_json(&c.quantum_full),
                "quantum_rwa": conservation_json(&c.quantum_rwa),
                "sc_full": conservation_json(&c.sc_full),
                "sc_rwa": conservation_json(&c.sc_rwa),
            },
            "violations": c.violations,
        }),
    )?;

    out.svg("dynamics.svg", |p| population_chart("Quantum", &c.quantum_full, &c.quantum_rwa, &[]).render(p))?;
    out.svg("dynamics_sc.svg", |p| population_chart("Semiclassical", &c.sc_full, &c.sc_rwa, &[]).render(p))?;
    out.svg("fft.svg", |p| spectrum_chart("Quantum spectra", &c.spectra_q.full, &c.spectra_q.rwa, 3.0).render(p))?;
    out.svg("fft_sc.svg", |p| {
        spectrum_chart("Semiclassical spectra", &c.spectra_sc.full, &c.spectra_sc.rwa, 3.0).render(p)
    })?;
    if !metrics {
        return Ok(());
    }
    let t: Vec<f64> = c.grid.times().collect();
    let distance_chart = |title: &str, series: Vec<Series>| {
        let mut ch = LineChart::new(title, "t omega0", "distance");
        ch.series = series;
        ch.vlines = tg.to_vec();
        ch.hlines = dg.to_vec();
        ch
    };
    let some = |v: &Option<Vec<f64>>| v.clone().unwrap_or_default();
    out.svg("norm_diff.svg", |p| {
        distance_chart(
            "|psi - psi_RWA|",
            vec![
                Series::from_xy("quantum", &t, &some(&c.metrics_q.norm_diff), 0, Style::Solid),
                Series::from_xy("quantum bound", &t, &some(&c.metrics_q.bound_value), 3, Style::Dashed),
                Series::from_xy("semiclassical", &t, &some(&c.metrics_sc.norm_diff), 2, Style::Solid),
            ],
        )
        .render(p)
    })?;
    out.svg("trace_distance.svg", |p| {
        distance_chart(
            "Trace distance",
            vec![
                Series::from_xy("quantum state", &t, &some(&c.metrics_q.trace_dist_state), 0, Style::Solid),
                Series::from_xy("quantum spin", &t, &some(&c.metrics_q.trace_dist_spin), 1, Style::Solid),
                Series::from_xy("semiclassical", &t, &some(&c.metrics_sc.trace_dist_state), 2, Style::Solid),
            ],
        )
        .render(p)
    })?;
    out.svg("propagator.svg", |p| bounds_chart(&c.propagator).render(p))
}

// ------------------------------------------------------------------ bounds

fn bounds_csv(out: &mut OutputDir, name: &str, b: &BoundsTable) -> Result<()> {
    let rows =
        b.grid.times().zip(b.propagator_diff.iter().zip(&b.bound_sc)).map(|(t, (d, s))| vec![num(t), num(*d), num(*s)]);
    out.csv(name, &["t", "propagator_diff", "bound_sc"], rows)
}

fn bounds_chart(b: &BoundsTable) -> LineChart {
    let t: Vec<f64> = b.grid.times().collect();
    let mut c = LineChart::new("|U - U_RWA|", "t omega0", "spectral norm");
    c.series.push(Series::from_xy("measured", &t, &b.propagator_diff, 0, Style::Solid));
    c.series.push(Series::from_xy("bound", &t, &b.bound_sc, 3, Style::Dashed));
    c
}

pub fn bounds(out: &mut OutputDir, b: &BoundsTable) -> Result<()> {
    bounds_csv(out, "bounds.csv", b)?;
    let slack = b
        .propagator_diff
        .iter()
        .zip(&b.bound_sc)
        .filter(|(d, _)| **d > 0.0)
        .map(|(d, s)| s / d)
        .fold(f64::INFINITY, f64::min);
    out.json(
        "bounds.json",
        &json!({
            "A": b.amplitude,
            "t_max": b.grid.t_end(),
            "holds": b.holds(),
            "min_bound_over_measured": slack.is_finite().then_some(slack),
            "aw_level": b.aw.level,
            "aw_horizon": b.aw.horizon,
        }),
    )?;
    out.svg("bounds.svg", |p| bounds_chart(b).render(p))
}

// ------------------------------------------------------------------ sweeps

fn cell_rows(rows: &[SweepRow]) -> impl Iterator<Item = Vec<String>> + '_ {
    rows.iter().map(|r| {
        let detail = match &r.status {
            CellStatus::Failed(e) => e.clone(),
            _ => r.violations.join("; "),
        };
        vec![
            num(r.lambda),
            num(r.alpha),
            num(r.amplitude),
            opt_num(r.one_minus_r2_q),
            opt_num(r.one_minus_r2_sc),
            num(r.t_end),
            r.status.label().to_string(),
            r.frame.map(frame_name).unwrap_or_default().to_string(),
            r.n_max.map(|n| n.to_string()).unwrap_or_default(),
            detail,
        ]
    })
}

const CELL_HEADER: [&str; 10] =
    ["lambda", "alpha", "A", "one_minus_r2_q", "one_minus_r2_sc", "t_end", "status", "frame", "n_max", "detail"];

fn sweep_json(res: &SweepResult) -> serde_json::Value {
    json!({
        "kind": res.kind,
        "config_hash": res.config_hash,
        "spec": res.spec,
        "cells": res.rows.len(),
        "failed": res.failures().count(),
        "horizon_capped": res.rows.iter().filter(|r| r.status == CellStatus::HorizonCapped).count(),
        "with_violations": res.rows.iter().filter(|r| !r.violations.is_empty()).count(),
        "determinism": crate::experiments::DETERMINISM_NOTE,
    })
}

pub fn contour(out: &mut OutputDir, res: &SweepResult) -> Result<()> {
    let rows = res.rows.iter().map(|r| vec![num(r.lambda), num(r.alpha), num(r.amplitude), opt_num(r.one_minus_r2_q)]);
    out.csv("contour.csv", &["lambda", "alpha", "A", "one_minus_r2_q"], rows)?;
    out.csv("contour_cells.csv", &CELL_HEADER, cell_rows(&res.rows))?;
    out.json("contour.json", &sweep_json(res))?;
    out.svg("contour.svg", |path| {
        let mut xs: Vec<f64> = res.rows.iter().map(|r| r.lambda).collect();
        xs.dedup();
        let ys: Vec<f64> = res.rows.iter().take_while(|r| r.lambda == xs[0]).map(|r| r.alpha).collect();
        let (lo, hi) = (xs[0].min(xs[xs.len() - 1]), xs[0].max(xs[xs.len() - 1]));
        let overlays = res
            .spec
            .amplitudes
            .iter()
            .map(|&a| {
                let pts = (0..=200).map(|k| lo * (hi / lo).powf(k as f64 / 200.0)).map(|l| (l, a / l)).collect();
                Series::unlabelled(pts, 0, Style::Solid)
            })
            .collect();
        Heatmap {
            title: "1 - r_q^2".into(),
            x_label: "lambda / omega0".into(),
            y_label: "alpha".into(),
            xs,
            ys,
            values: res.rows.iter().map(|r| r.one_minus_r2_q).collect(),
            overlays,
        }
        .render(path)
    })
}

pub fn slices(out: &mut OutputDir, res: &SweepResult) -> Result<()> {
    out.csv("slices.csv", &CELL_HEADER, cell_rows(&res.rows))?;
    let per_a: Vec<serde_json::Value> = res
        .spec
        .amplitudes
        .iter()
        .map(|&a| {
            let vals: Vec<f64> = res.slice(a).iter().filter_map(|r| r.one_minus_r2_q).collect();
            let mean = vals.iter().sum::<f64>() / vals.len().max(1) as f64;
            let spread = vals.iter().copied().fold(f64::MIN, f64::max) - vals.iter().copied().fold(f64::MAX, f64::min);
            json!({
                "A": a,
                "one_minus_r2_sc": res.slice(a).first().and_then(|r| r.one_minus_r2_sc),
                "q_mean": (!vals.is_empty()).then_some(mean),
                "q_relative_spread": (!vals.is_empty() && mean > 0.0).then(|| spread / mean),
            })
        })
        .collect();
    let mut summary = sweep_json(res);
    summary["slices"] = serde_json::Value::Array(per_a);
    out.json("slices.json", &summary)?;
    out.svg("slices.svg", |path| {
        let mut c = LineChart::new("1 - r^2 at constant A", "lambda / omega0", "1 - r^2");
        c.log_x = true;
        c.log_y = true;
        for (k, &a) in res.spec.amplitudes.iter().enumerate() {
            let rows = res.slice(a);
            let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.one_minus_r2_q.map(|v| (r.lambda, v))).collect();
            c.series.push(Series::new(format!("A = {a}"), pts.clone(), k, Style::Points));
            c.series.push(Series::unlabelled(pts, k, Style::Dotted));
            if let Some(sc) = rows.first().and_then(|r| r.one_minus_r2_sc) {
                let ends: Vec<(f64, f64)> =
                    [rows.first(), rows.last()].iter().flatten().map(|r| (r.lambda, sc)).collect();
                c.series.push(Series::unlabelled(ends, k, Style::Dashed));
            }
        }
        c.render(path)
    })
}

// ------------------------------------------------------------- convergence

pub fn convergence(out: &mut OutputDir, studies: &[ConvergenceStudy]) -> Result<()> {
    let rows = studies.iter().flat_map(|s| {
        s.rows.iter().map(|r| {
            vec![
                num(r.lambda),
                num(r.amplitude),
                opt_num(r.one_minus_r2_q),
                num(r.one_minus_r2_sc),
                opt_num(r.ratio),
                opt_num(r.max_pop_dev),
            ]
        })
    });
    out.csv("convergence.csv", &["lambda", "A", "one_minus_r2_q", "one_minus_r2_sc", "ratio", "max_pop_dev"], rows)?;
    let rows = studies.iter().flat_map(|s| {
        s.runs.iter().flat_map(move |run| {
            run.full.grid.times().enumerate().map(move |(k, t)| {
                vec![
                    num(s.amplitude),
                    num(run.lambda),
                    num(t),
                    num(run.full.excited_population[k]),
                    num(run.rwa.excited_population[k]),
                    opt_num(run.trace_dist_state.get(k).copied()),
                    opt_num(run.trace_dist_spin.get(k).copied()),
                ]
            })
        })
    });
    out.csv(
        "convergence_dynamics.csv",
        &["A", "lambda", "t", "p_excited_full", "p_excited_rwa", "trace_dist_state", "trace_dist_spin"],
        rows,
    )?;
    let rows = studies.iter().flat_map(|s| {
        s.grid.times().enumerate().map(move |(k, t)| {
            vec![
                num(s.amplitude),
                num(t),
                num(s.sc_full.excited_population[k]),
                num(s.sc_rwa.excited_population[k]),
                opt_num(s.trace_dist_sc.get(k).copied()),
            ]
        })
    });
    out.csv("convergence_sc.csv", &["A", "t", "p_excited_full", "p_excited_rwa", "trace_dist"], rows)?;
    let detail: Vec<_> = studies
        .iter()
        .map(|s| {
            json!({
                "A": s.amplitude,
                "periods": s.periods,
                "t_end": s.grid.t_end(),
                "one_minus_r2_sc": s.one_minus_r2_sc,
                "rows": s.rows.iter().map(|r| json!({
                    "lambda": r.lambda,
                    "ratio": r.ratio,
                    "max_pop_dev": r.max_pop_dev,
                    "max_pop_dev_rwa": r.max_pop_dev_rwa,
                    "max_full_rwa_dev": r.max_full_rwa_dev,
                    "max_spin_distance_dev": r.max_spin_distance_dev,
                    "frame": s.runs.iter().find(|x| x.lambda == r.lambda).map(|x| frame_name(x.frame)),
                    "violations": s.runs.iter().find(|x| x.lambda == r.lambda).map(|x| x.violations.clone()),
                    "error": r.error,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    out.json("convergence.json", &detail)?;

    out.svg("convergence_ratio.svg", |path| {
        let mut c = LineChart::new("(1 - r_q^2) / (1 - r_sc^2)", "lambda / omega0", "ratio");
        c.log_x = true;
        c.hlines = vec![1.0];
        for (k, s) in studies.iter().enumerate() {
            let pts: Vec<(f64, f64)> = s.rows.iter().filter_map(|r| r.ratio.map(|v| (r.lambda, v))).collect();
            c.series.push(Series::new(format!("A = {}", s.amplitude), pts.clone(), k, Style::Points));
            c.series.push(Series::unlabelled(pts, k, Style::Dotted));
        }
        c.render(path)
    })?;
    for s in studies {
        let t: Vec<f64> = s.grid.times().collect();
        let tag = format!("A{}", s.amplitude);
        out.svg(&format!("convergence_trace_{tag}.svg"), |path| {
            let mut c = LineChart::new(format!("Trace distance, A = {}", s.amplitude), "t omega0", "distance");
            for (k, run) in s.runs.iter().enumerate() {
                c.series.push(Series::from_xy(
                    format!("spin, lambda = {:e}", run.lambda),
                    &t,
                    &run.trace_dist_spin,
                    k,
                    Style::Dashed,
                ));
            }
            c.series.push(Series::from_xy("semiclassical", &t, &s.trace_dist_sc, 7, Style::Solid));
            c.render(path)
        })?;
        for run in &s.runs {
            out.svg(&format!("convergence_pop_{tag}_lambda{:e}.svg", run.lambda), |path| {
                population_chart(&format!("A = {}, lambda = {:e}", s.amplitude, run.lambda), &run.full, &run.rwa, &[])
                    .render(path)
            })?;
        }
        out.svg(&format!("convergence_pop_{tag}_sc.svg"), |path| {
            population_chart(&format!("Semiclassical, A = {}", s.amplitude), &s.sc_full, &s.sc_rwa, &[]).render(path)
        })?;
    }
    Ok(())
}
