use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{march_mode, MarchOptions, ModeEvolution, ModeRun};
use crate::base_flow::BaseFlow;
use crate::error::{Error, Result};
use crate::numerics::norm::weighted_sup;
use crate::numerics::{fit_exponent, GridFn, YGrid};
use crate::quasimode::{Quasimode, QuasimodeConfig};
use crate::spectral::SpectralSolution;

type C64 = Complex64;

/// March grid for frequency `k`: spacing `k^{−1/2}/points_per_layer` (the
/// wall layer width over the resolution) up to `fine_end`, then geometric
/// growth to `y_max`, with a node at `anchor`.
pub fn mode_grid(k: f64, anchor: f64, fine_end: f64, y_max: f64, points_per_layer: f64, growth: f64) -> Result<YGrid> {
    if !(k > 0.0 && points_per_layer > 0.0) {
        return Err(Error::invalid("mode grid needs k > 0 and a positive resolution"));
    }
    let h = k.powf(-0.5) / points_per_layer;
    YGrid::anchored(anchor, h, fine_end, y_max.max(fine_end + 1.0), growth)
}

/// Source of initial data: the quasimode of `flow` at `ε = 1/k`, built with
/// the settings of `template` (its `eps` is replaced per k).
#[derive(Debug, Clone, Copy)]
pub struct QuasimodeData<'a> {
    pub flow: &'a BaseFlow,
    pub spec: &'a SpectralSolution,
    pub template: &'a QuasimodeConfig,
}

/// A quasimode at one ε with its march grid and frame rotation.
struct Prepared<'a> {
    qm: Quasimode<'a>,
    grid: YGrid,
    theta: f64,
}

impl<'a> QuasimodeData<'a> {
    fn prepare(&self, k: f64, points_per_layer: f64, growth: f64) -> Result<Prepared<'a>> {
        let mut cfg = self.template.clone();
        cfg.eps = 1.0 / k;
        let qm = Quasimode::new(&cfg, self.flow, self.spec)?;
        let sl = qm.slice(0.0)?;
        let fine_end = sl.state.a + qm.cutoff.outer + 6.0 * sl.ell;
        let grid = mode_grid(k, sl.state.a, fine_end, cfg.y_max(), points_per_layer, growth)?;
        let theta = -sl.omega.re / cfg.eps;
        Ok(Prepared { qm, grid, theta })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanConfig {
    pub ks: Vec<f64>,
    /// Absolute regularization rates `δ`.
    pub deltas: Vec<f64>,
    /// Regularization rates as fractions of the fitted slope of `γ(k)`
    /// against `√k`.
    pub delta_fractions: Vec<f64>,
    pub sigma: f64,
    pub x_window: f64,
    /// `dx = dx_factor / k`.
    pub dx_factor: f64,
    pub points_per_layer: f64,
    pub growth: f64,
    /// Minimum factor between consecutive regularized suprema for a verdict
    /// of growth.
    pub growth_ratio: f64,
    pub beta: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            ks: vec![100.0, 400.0, 1600.0],
            deltas: Vec::new(),
            delta_fractions: vec![0.5],
            sigma: 0.0,
            x_window: 1.0,
            dx_factor: 0.05,
            points_per_layer: 8.0,
            growth: 1.03,
            growth_ratio: 1.5,
            beta: 0.5,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ks.len() < 2 || self.ks.iter().any(|&k| !(k > 0.0)) {
            return Err(Error::config("evolution.k_list", "needs at least two positive frequencies"));
        }
        if self.ks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("evolution.k_list", "frequencies must increase"));
        }
        if self.deltas.iter().any(|&d| !(d >= 0.0)) || self.delta_fractions.iter().any(|&d| !(d >= 0.0)) {
            return Err(Error::config("evolution.delta", "regularization rates must be >= 0"));
        }
        if !(0.0..0.5).contains(&self.sigma) {
            return Err(Error::config("evolution.sigma", "must lie in [0, 1/2)"));
        }
        if !(self.x_window > 0.0) {
            return Err(Error::config("evolution.x_window", "must be positive"));
        }
        if !(self.dx_factor > 0.0) {
            return Err(Error::config("evolution.dx", "must be positive"));
        }
        if !(self.points_per_layer > 0.0 && self.growth >= 1.0 && self.beta >= 0.0) {
            return Err(Error::config("evolution", "grid resolution, growth and beta must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: f64,
    pub x_end: f64,
    pub dx: f64,
    pub gamma: f64,
    pub gamma_over_sqrt_k: f64,
    /// `‖û(x_end)‖/‖u₁‖`.
    pub end_ratio: f64,
    pub compat_defect: f64,
    pub xs: Vec<f64>,
    pub norms: Vec<f64>,
}

impl ScanRow {
    /// `sup_x e^{−δx√k}‖û(x)‖/(k^σ‖u₁‖)`.
    pub fn regularized_sup(&self, delta: f64, sigma: f64) -> f64 {
        let n0 = self.norms[0];
        let s = self.k.sqrt();
        self.xs
            .iter()
            .zip(&self.norms)
            .map(|(x, v)| (-delta * (x - self.xs[0]) * s).exp() * v / n0)
            .fold(0.0, f64::max)
            / self.k.powf(sigma)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaVerdict {
    pub delta: f64,
    pub sups: Vec<f64>,
    /// Consecutive ratios `sup(k_{i+1})/sup(k_i)`.
    pub ratios: Vec<f64>,
    /// Every ratio is at least the configured growth factor.
    pub grows: bool,
    /// `δ` is below the fitted slope, so growth is expected.
    pub below_slope: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub flow: String,
    pub sigma: f64,
    pub ks: Vec<f64>,
    pub gammas: Vec<f64>,
    /// `γ(k) ≈ slope·√k + intercept`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub rows: Vec<ScanRow>,
    pub verdicts: Vec<DeltaVerdict>,
    /// Positive slope and growth for every tested `δ` below it.
    pub ill_posed_signature: bool,
}

impl ScanResult {
    pub fn verdict(&self, delta: f64, growth_ratio: f64) -> DeltaVerdict {
        let sups: Vec<f64> = self.rows.iter().map(|r| r.regularized_sup(delta, self.sigma)).collect();
        let ratios: Vec<f64> = sups.windows(2).map(|w| w[1] / w[0]).collect();
        DeltaVerdict {
            delta,
            grows: ratios.iter().all(|&r| r >= growth_ratio),
            below_slope: delta < self.slope,
            sups,
            ratios,
        }
    }
}

fn scan_row(k: f64, flow: &BaseFlow, data: &QuasimodeData<'_>, cfg: &ScanConfig) -> Result<ScanRow> {
    let prep = data.prepare(k, cfg.points_per_layer, cfg.growth)?;
    let ys = prep.grid.nodes();
    let u1 = GridFn::new(prep.grid.shared(), prep.qm.u_hat_at(0.0, ys)?)?;
    let x_end = cfg.x_window.min(k.powf(-0.25));
    let mut run = ModeRun::new(k, flow, u1, x_end, cfg.dx_factor / k);
    run.opts = MarchOptions {
        beta: cfg.beta,
        phase_shift: prep.theta,
        ..MarchOptions::default()
    };
    let ev = march_mode(&run)?;
    Ok(ScanRow {
        k,
        x_end,
        dx: ev.dx,
        gamma: ev.gamma,
        gamma_over_sqrt_k: ev.gamma / k.sqrt(),
        end_ratio: ev.norms.last().unwrap() / ev.norms[0],
        compat_defect: ev.compat_defect,
        xs: ev.xs,
        norms: ev.norms,
    })
}

/// For each `k`, marches the quasimode slice at `ε = 1/k` on `flow` over
/// `[0, min(x_window, k^{−1/4})]` and fits `γ(k)` against `√k`. `flow` may
/// differ from the flow that generates the data (the control run).
pub fn illposedness_scan(cfg: &ScanConfig, flow: &BaseFlow, data: &QuasimodeData<'_>) -> Result<ScanResult> {
    cfg.validate()?;
    let rows = cfg
        .ks
        .par_iter()
        .map(|&k| scan_row(k, flow, data, cfg))
        .collect::<Result<Vec<_>>>()?;
    let gammas: Vec<f64> = rows.iter().map(|r| r.gamma).collect();
    let roots: Vec<f64> = cfg.ks.iter().map(|k| k.sqrt()).collect();
    let fit = fit_exponent(&roots, &gammas)?;
    let mut result = ScanResult {
        flow: flow.name.clone(),
        sigma: cfg.sigma,
        ks: cfg.ks.clone(),
        gammas,
        slope: fit.rate,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        rows,
        verdicts: Vec::new(),
        ill_posed_signature: false,
    };
    let mut deltas = cfg.deltas.clone();
    if result.slope > 0.0 {
        deltas.extend(cfg.delta_fractions.iter().map(|f| f * result.slope));
    }
    result.verdicts = deltas.iter().map(|&d| result.verdict(d, cfg.growth_ratio)).collect();
    let tested: Vec<&DeltaVerdict> = result.verdicts.iter().filter(|v| v.below_slope).collect();
    result.ill_posed_signature = result.slope > 0.0 && !tested.is_empty() && tested.iter().all(|v| v.grows);
    Ok(result)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub eps: f64,
    pub x_end: f64,
    pub dx: f64,
    pub n_y: usize,
    /// `Im ω(0)/ε`, the predicted growth rate at the origin.
    pub predicted_rate: f64,
    pub gamma: f64,
    pub xs: Vec<f64>,
    pub predicted_amp: Vec<f64>,
    /// `‖û(x)‖ / (‖û(0)‖·predicted_amp(x))`.
    pub amp_ratio: Vec<f64>,
    /// `‖Ũ(x)‖ / ‖û_qm(x)‖`, `Ũ` the Duhamel solution forced by the residual.
    pub relative_deviation: Vec<f64>,
    /// `sup_x ‖J_ε(x)‖/predicted_amp(x)` over the sampled stations.
    pub residual_sup: f64,
    /// `max_x ‖Ũ(x)‖ / (√ε · residual_sup · predicted_amp(x))`.
    pub k_measured: f64,
    /// `max_x ‖(û − û_qm) − Ũ‖/‖Ũ‖`: the two routes to the error agree.
    pub duhamel_mismatch: f64,
    pub compat_defect: f64,
}

impl ConsistencyReport {
    pub fn amp_ratio_range(&self) -> (f64, f64) {
        self.amp_ratio
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &r| (lo.min(r), hi.max(r)))
    }
}

/// Settings of [`evolve_quasimode_consistency`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConsistencyOptions {
    /// Window `[0, window·√ε]`.
    pub window: f64,
    /// `dx = dx_factor·ε`.
    pub dx_factor: f64,
    pub points_per_layer: f64,
    pub growth: f64,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        Self {
            window: 5.0,
            dx_factor: 0.05,
            points_per_layer: 8.0,
            growth: 1.03,
        }
    }
}

/// Marches the quasimode's initial slice at `k = 1/ε` and, separately, the
/// error `Ũ` from zero data with forcing `−J_ε`, and compares both with the
/// predicted amplitude.
pub fn evolve_quasimode_consistency(data: &QuasimodeData<'_>, eps: f64, opts: ConsistencyOptions) -> Result<ConsistencyReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let k = 1.0 / eps;
    let prep = data.prepare(k, opts.points_per_layer, opts.growth)?;
    let qm = &prep.qm;
    let ys = prep.grid.nodes().to_vec();
    let beta = qm.cfg.beta;
    let x_end = opts.window * eps.sqrt();
    let dx = opts.dx_factor * eps;
    let frozen = data.flow.is_x_independent();
    if !frozen && x_end > qm.cfg.x_span() {
        return Err(Error::config(
            "evolution.x_window",
            format!("window {x_end:.4} exceeds the tracked span {:.4} of an x-dependent flow", qm.cfg.x_span()),
        ));
    }

    let u1 = GridFn::new(prep.grid.shared(), qm.u_hat_at(0.0, &ys)?)?;
    let march_opts = MarchOptions {
        beta,
        phase_shift: prep.theta,
        ..MarchOptions::default()
    };
    let mut run = ModeRun::new(k, data.flow, u1.clone(), x_end, dx);
    run.opts = march_opts;

    let j0 = if frozen { Some(qm.residual_amplitude(0.0, &ys)?) } else { None };
    let residual = |x: f64| -> Result<Vec<C64>> {
        let e = qm.phase_factor(x)?;
        let amp = match &j0 {
            Some(j) => j.clone(),
            None => qm.residual_amplitude(x, &ys)?,
        };
        Ok(amp.into_iter().map(|v| -e * v).collect())
    };
    let mut forced = ModeRun::new(k, data.flow, GridFn::zeros(prep.grid.shared()), x_end, dx);
    forced.opts = march_opts;
    forced.forcing = Some(Arc::new(residual));

    let (free, tilde): (Result<ModeEvolution>, Result<ModeEvolution>) =
        rayon::join(|| march_mode(&run), || march_mode(&forced));
    let (free, tilde) = (free?, tilde?);

    let n0 = free.norms[0];
    let mut predicted_amp = Vec::with_capacity(free.xs.len());
    let mut amp_ratio = Vec::with_capacity(free.xs.len());
    for (x, v) in free.xs.iter().zip(&free.norms) {
        let a = qm.predicted_amp(*x)?;
        predicted_amp.push(a);
        amp_ratio.push(v / (n0 * a));
    }

    let stations = 21;
    let mut residual_sup = 0.0_f64;
    for i in 0..stations {
        let x = x_end * i as f64 / (stations - 1) as f64;
        let j = match &j0 {
            Some(j) => j.clone(),
            None => qm.residual_amplitude(x, &ys)?,
        };
        residual_sup = residual_sup.max(weighted_sup(&ys, &j, beta));
        if frozen {
            break;
        }
    }

    let mut relative_deviation = Vec::new();
    let mut k_measured = 0.0_f64;
    for (x, v) in tilde.xs.iter().zip(&tilde.norms) {
        let j = free.xs.iter().position(|fx| (fx - x).abs() < 1e-12 * x_end).unwrap();
        let a = predicted_amp[j];
        k_measured = k_measured.max(v / (eps.sqrt() * residual_sup * a));
        relative_deviation.push(v / (n0 * a));
    }

    // (û − û_qm) at the last level against Ũ there.
    let x_last = free.final_x();
    let qm_last = qm.u_hat_at(x_last, &ys)?;
    let diff: Vec<C64> = free.last.values().iter().zip(&qm_last).map(|(a, b)| a - b).collect();
    let tv = tilde.last.values();
    let mism = diff.iter().zip(tv).map(|(d, t)| (d - t).norm()).fold(0.0, f64::max);
    let tmax = tv.iter().map(|t| t.norm()).fold(0.0, f64::max);

    Ok(ConsistencyReport {
        eps,
        x_end,
        dx: free.dx,
        n_y: ys.len(),
        predicted_rate: qm.slice(0.0)?.omega.im / eps,
        gamma: free.gamma,
        xs: free.xs,
        predicted_amp,
        amp_ratio,
        relative_deviation,
        residual_sup,
        k_measured,
        duhamel_mismatch: if tmax > 0.0 { mism / tmax } else { 0.0 },
        compat_defect: free.compat_defect.max(tilde.compat_defect),
    })
}
