use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Config;
use crate::base_flow::io::{read_inflow_csv, write_baseflow_csv};
use crate::base_flow::mises::march_unchecked;
use crate::base_flow::{
    blasius_round_trip, check_oleinik_conditions, find_critical_point, invert_von_mises, von_mises_march, BaseFlow,
    MisesResolution, OleinikReport, SteadyBC,
};
use crate::error::{Error, Result};
use crate::evolution::{
    evolve_quasimode_consistency, illposedness_scan, structural_invariants, write_scan_csv, ConsistencyReport,
    DeltaVerdict, InvariantReport, QuasimodeData, ScanResult,
};
use crate::quasimode::{
    residual_bound_check, write_report_csv, write_report_json, write_summary_csv, EpsSummary, QuasimodeConfig,
};
use crate::spectral::cache::{cache_path, read_cache, write_cache};
use crate::spectral::{auxiliary_eigenproblem, find_tau, solve_spectral, SpectralConfig, SpectralSolution};

/// Where and how a command writes.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: Config,
    pub out: PathBuf,
    pub force: bool,
}

impl Context {
    pub fn new(config: Config, out: Option<PathBuf>, force: bool) -> Result<Self> {
        let out = out.unwrap_or_else(|| config.output_dir.clone());
        fs::create_dir_all(&out)?;
        Ok(Self { config, out, force })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Files written by one command, relative to the output directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommandIndex {
    pub command: String,
    pub files: Vec<String>,
}

fn finish(ctx: &Context, command: &str, files: Vec<PathBuf>) -> Result<Vec<PathBuf>> {
    let rel = files
        .iter()
        .map(|p| p.strip_prefix(&ctx.out).unwrap_or(p).display().to_string())
        .collect();
    let idx = ctx.path(&format!("index_{command}.json"));
    write_json(
        &idx,
        &CommandIndex {
            command: command.into(),
            files: rel,
        },
    )?;
    Ok(files)
}

// ---------------------------------------------------------------- spectral

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralCheck {
    pub c: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub mismatch: f64,
    pub ode_residual: f64,
    /// Interior residual of the profile re-solved on a grid twice as fine.
    pub ode_residual_fine: f64,
    pub decay_c: f64,
    pub decay_r_squared: f64,
    /// `|τ(1.5·z_max) − τ(z_max)|` at fixed spacing.
    pub tau_shift_zmax: f64,
    /// `max_k |α_k(2C) − 2α_k(C)| / (2α_k(C))`.
    pub aux_scaling: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub flow: String,
    pub a: f64,
    pub flow_check: SpectralCheck,
    pub cache_file: String,
    pub checks: Vec<SpectralCheck>,
}

fn check_spectral(sol: &SpectralSolution, cfg: &SpectralConfig) -> Result<SpectralCheck> {
    let c = sol.c;
    let fine = crate::numerics::ZGrid::symmetric(sol.zgrid.z_max(), 2 * sol.zgrid.center())?;
    let ode_residual_fine = SpectralSolution::at(sol.tau, c, fine)?.ode_residual;
    let mut wide = cfg.clone();
    wide.z_max = Some(1.5 * sol.zgrid.z_max());
    let tau_wide = find_tau(c, &[sol.tau], &wide)?.tau;
    let a1 = auxiliary_eigenproblem(c, 8.0, 400)?;
    let a2 = auxiliary_eigenproblem(2.0 * c, 8.0, 400)?;
    let aux_scaling = a1
        .alphas
        .iter()
        .zip(&a2.alphas)
        .map(|(x, y)| (y - 2.0 * x).abs() / (2.0 * x))
        .fold(0.0, f64::max);
    Ok(SpectralCheck {
        c,
        tau_re: sol.tau.re,
        tau_im: sol.tau.im,
        mismatch: sol.bc_mismatch,
        ode_residual: sol.ode_residual,
        ode_residual_fine,
        decay_c: sol.decay_fit.c,
        decay_r_squared: sol.decay_fit.r_squared,
        tau_shift_zmax: (tau_wide - sol.tau).norm(),
        aux_scaling,
    })
}

fn dump_landscape(ctx: &Context, err: &Error) {
    if let Error::NoRoot { landscape, .. } = err {
        let path = ctx.path("spectral_landscape.csv");
        let mut text = String::from("tau_re,tau_im,mismatch\n");
        for (re, im, m) in landscape {
            text.push_str(&format!("{re},{im},{m}\n"));
        }
        if fs::write(&path, text).is_ok() {
            eprintln!("search landscape written to {}", path.display());
        }
    }
}

/// The catalog flow `name`, its critical point and the spectral solution
/// for `C = u₀(0, a)`, read from the cache when present.
pub(crate) fn flow_and_spectrum(ctx: &Context, name: &str) -> Result<(BaseFlow, f64, SpectralSolution, PathBuf, bool)> {
    let flow = ctx.config.flow.build(name)?;
    let a = find_critical_point(&flow).map_err(|e| Error::config("flow.catalog", e.to_string()))?;
    let c = flow.eval(0.0, a).u;
    if !(c > 0.0) {
        return Err(Error::config("flow.catalog", format!("C = u0(0, a) = {c} must be positive")));
    }
    let cfg = &ctx.config.spectral;
    let n = cfg.grid_for(c)?.len();
    let dir = ctx.path("cache");
    fs::create_dir_all(&dir)?;
    let path = cache_path(&dir, c, cfg.z_max_for(c), n, cfg.tol);
    if path.is_file() && !ctx.force {
        if let Ok(sol) = read_cache(&path) {
            return Ok((flow, a, sol, path, true));
        }
    }
    let sol = solve_spectral(c, cfg).inspect_err(|e| dump_landscape(ctx, e))?;
    write_cache(&path, &sol)?;
    Ok((flow, a, sol, path, false))
}

pub fn cmd_spectral(ctx: &Context) -> Result<Vec<PathBuf>> {
    let name = ctx.config.flow.catalog.clone();
    let (_, a, sol, cache, hit) = flow_and_spectrum(ctx, &name)?;
    println!("{} spectral solution for {name}: {}", if hit { "cached" } else { "computed" }, cache.display());
    let cfg = &ctx.config.spectral;
    let flow_check = check_spectral(&sol, cfg)?;
    let checks = ctx
        .config
        .spectral_checks
        .par_iter()
        .map(|&c| {
            let s = solve_spectral(c, cfg).inspect_err(|e| dump_landscape(ctx, e))?;
            check_spectral(&s, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    for ch in std::iter::once(&flow_check).chain(&checks) {
        println!(
            "C = {:.6}: tau = {:.10}{:+.10}i  mismatch {:.2e}  residual {:.2e} (fine {:.2e})  decay c = {:.4} (r2 {:.4})",
            ch.c, ch.tau_re, ch.tau_im, ch.mismatch, ch.ode_residual, ch.ode_residual_fine, ch.decay_c, ch.decay_r_squared
        );
    }
    let summary = SpectralSummary {
        flow: name,
        a,
        flow_check,
        cache_file: cache.strip_prefix(&ctx.out).unwrap_or(&cache).display().to_string(),
        checks,
    };
    let json = ctx.path("spectral.json");
    write_json(&json, &summary)?;

    let csv = ctx.path("spectral_profile.csv");
    let mut w = csv::Writer::from_path(&csv)?;
    w.write_record(["z", "w_re", "w_im", "abs_w_minus_h"])?;
    for (&z, v) in sol.zgrid.nodes().iter().zip(sol.w.values()) {
        let h = if z >= 0.0 { 1.0 } else { 0.0 };
        w.write_record(&[z.to_string(), v.re.to_string(), v.im.to_string(), (v - h).norm().to_string()])?;
    }
    w.flush()?;
    finish(ctx, "spectral", vec![json, csv, cache])
}

// ---------------------------------------------------------------- quasimode

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasimodeSummary {
    pub flow: String,
    pub c: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub delta0_leading: f64,
    pub rows: Vec<EpsSummary>,
    /// `max/min` of the bound constant across the ladder.
    pub bound_spread: f64,
    /// `min` of the lower sandwich constant.
    pub c1: f64,
    /// `max/min` of the upper sandwich constant.
    pub c2_spread: f64,
    pub s0_min: f64,
    pub s0_max: f64,
}

fn spread(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let hi = v.clone().fold(0.0, f64::max);
    let lo = v.fold(f64::INFINITY, f64::min);
    hi / lo
}

pub fn cmd_quasimode(ctx: &Context) -> Result<Vec<PathBuf>> {
    let name = ctx.config.flow.catalog.clone();
    let (flow, _, spec, _, _) = flow_and_spectrum(ctx, &name)?;
    let q = &ctx.config.quasimode;
    let reports = q
        .eps_list
        .par_iter()
        .map(|&eps| residual_bound_check(&q.at(eps), &flow, &spec))
        .collect::<Result<Vec<_>>>()?;
    let mut files = Vec::new();
    for r in &reports {
        let stem = format!("quasimode_eps_{:.3e}", r.eps);
        let (j, c) = (ctx.path(&format!("{stem}.json")), ctx.path(&format!("{stem}.csv")));
        write_report_json(&j, r)?;
        write_report_csv(&c, r)?;
        files.extend([j, c]);
    }
    let rows: Vec<EpsSummary> = reports.iter().map(EpsSummary::from).collect();
    for r in &rows {
        println!(
            "eps = {:.3e}: bound constant {:.4}  sandwich [{:.4}, {:.4}·eps^(-1/4)]  s0 [{:.4}, {:.4}]  delta0_eff {:.4}",
            r.eps, r.bound_constant, r.lower_const, r.upper_const, r.s0_min, r.s0_max, r.delta0_effective
        );
    }
    let summary = QuasimodeSummary {
        flow: name,
        c: spec.c,
        tau_re: spec.tau.re,
        tau_im: spec.tau.im,
        delta0_leading: reports[0].delta0_leading,
        bound_spread: spread(rows.iter().map(|r| r.bound_constant)),
        c1: rows.iter().map(|r| r.lower_const).fold(f64::INFINITY, f64::min),
        c2_spread: spread(rows.iter().map(|r| r.upper_const)),
        s0_min: rows.iter().map(|r| r.s0_min).fold(f64::INFINITY, f64::min),
        s0_max: rows.iter().map(|r| r.s0_max).fold(0.0, f64::max),
        rows,
    };
    let csv = ctx.path("quasimode_summary.csv");
    write_summary_csv(&csv, &summary.rows)?;
    let json = ctx.path("quasimode_summary.json");
    write_json(&json, &summary)?;
    files.extend([csv, json]);
    finish(ctx, "quasimode", files)
}

// ---------------------------------------------------------------- scan

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSummary {
    pub flow: String,
    pub ks: Vec<f64>,
    pub gammas: Vec<f64>,
    pub gamma_over_sqrt_k: Vec<f64>,
    pub slope: f64,
    pub r_squared: f64,
    pub verdicts: Vec<DeltaVerdict>,
    pub ill_posed_signature: bool,
}

impl From<&ScanResult> for ScanSummary {
    fn from(r: &ScanResult) -> Self {
        Self {
            flow: r.flow.clone(),
            ks: r.ks.clone(),
            gammas: r.gammas.clone(),
            gamma_over_sqrt_k: r.rows.iter().map(|row| row.gamma_over_sqrt_k).collect(),
            slope: r.slope,
            r_squared: r.r_squared,
            verdicts: r.verdicts.clone(),
            ill_posed_signature: r.ill_posed_signature,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanFile {
    pub data_flow: String,
    pub sigma: f64,
    pub main: ScanSummary,
    /// The control flow with its suprema at the main flow's `δ`s.
    pub control: Option<(ScanSummary, Vec<DeltaVerdict>)>,
}

pub fn cmd_scan(ctx: &Context) -> Result<Vec<PathBuf>> {
    let ev = &ctx.config.evolution;
    let (data_flow, _, spec, _, _) = flow_and_spectrum(ctx, &ev.data_flow)?;
    let template = ctx.config.quasimode.at(ev.consistency_eps);
    let data = QuasimodeData {
        flow: &data_flow,
        spec: &spec,
        template: &template,
    };
    let scan_cfg = ev.scan_config(ctx.config.quasimode.beta);
    let main_name = ctx.config.flow.catalog.clone();
    let main_flow = ctx.config.flow.build(&main_name)?;
    let control = if ev.control.is_empty() || ev.control == main_name {
        None
    } else {
        Some(ctx.config.flow.build(&ev.control)?)
    };

    let mut files = Vec::new();
    let main = illposedness_scan(&scan_cfg, &main_flow, &data)?;
    let p = ctx.path(&format!("scan_{main_name}.csv"));
    write_scan_csv(&p, &main)?;
    files.push(p);
    println!("ILL-POSED-SIGNATURE: {} ({main_name})", if main.ill_posed_signature { "yes" } else { "no" });

    let control = match &control {
        Some(f) => {
            let r = illposedness_scan(&scan_cfg, f, &data)?;
            let p = ctx.path(&format!("scan_{}.csv", r.flow));
            write_scan_csv(&p, &r)?;
            files.push(p);
            println!("ILL-POSED-SIGNATURE: {} ({})", if r.ill_posed_signature { "yes" } else { "no" }, r.flow);
            let at_main: Vec<DeltaVerdict> = main
                .verdicts
                .iter()
                .map(|v| r.verdict(v.delta, scan_cfg.growth_ratio))
                .collect();
            Some((ScanSummary::from(&r), at_main))
        }
        None => None,
    };
    let scan = ScanFile {
        data_flow: ev.data_flow.clone(),
        sigma: scan_cfg.sigma,
        main: ScanSummary::from(&main),
        control,
    };
    let p = ctx.path("scan.json");
    write_json(&p, &scan)?;
    files.push(p);

    let cons: ConsistencyReport = evolve_quasimode_consistency(&data, ev.consistency_eps, ev.consistency)?;
    let (lo, hi) = cons.amp_ratio_range();
    println!(
        "consistency at eps = {:.3e}: norm/predicted in [{lo:.4}, {hi:.4}], gamma {:.3} vs predicted {:.3}",
        cons.eps, cons.gamma, cons.predicted_rate
    );
    let p = ctx.path("consistency.json");
    write_json(&p, &cons)?;
    files.push(p);
    let p = ctx.path("consistency.csv");
    let mut w = csv::Writer::from_path(&p)?;
    w.write_record(["x", "predicted_amp", "amp_ratio", "relative_deviation"])?;
    for i in 0..cons.xs.len() {
        w.write_record(&[
            cons.xs[i].to_string(),
            cons.predicted_amp[i].to_string(),
            cons.amp_ratio[i].to_string(),
            cons.relative_deviation[i].to_string(),
        ])?;
    }
    w.flush()?;
    files.push(p);

    let inv: InvariantReport = structural_invariants(&data, ev.consistency_eps, ctx.config.rng_seed)?;
    let p = ctx.path("invariants.json");
    write_json(&p, &inv)?;
    files.push(p);
    finish(ctx, "scan", files)
}

// ---------------------------------------------------------------- steady

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteadySummary {
    /// `blasius` or the inflow path.
    pub source: String,
    /// `VERIFIED` when the Oleinik conditions hold, `UNVERIFIED` otherwise.
    pub status: String,
    pub conditions: OleinikReport,
    /// Max error against the similarity solution at the configured and at
    /// twice the ψ-resolution (Blasius source only).
    pub blasius_errors: Option<[f64; 2]>,
    pub separated_at: Option<f64>,
}

pub fn cmd_steady(ctx: &Context) -> Result<Vec<PathBuf>> {
    let st = &ctx.config.steady;
    let (flow, summary) = match &st.inflow {
        None => {
            let fine = MisesResolution {
                n_psi: 2 * st.resolution.n_psi,
                ..st.resolution
            };
            let (base, refined) = rayon::join(|| blasius_round_trip(st.resolution, st.n_y), || blasius_round_trip(fine, st.n_y));
            let (base, refined) = (base?, refined?);
            let b = crate::base_flow::blasius(14.0, 1e-3);
            let bc = b.inflow(1.0, 14.0, 2e-3, 1.0)?;
            println!(
                "Blasius round trip: max error {:.3e} (n_psi = {}), {:.3e} (n_psi = {})",
                base.max_error,
                st.resolution.n_psi,
                refined.max_error,
                fine.n_psi
            );
            let summary = SteadySummary {
                source: "blasius".into(),
                status: "VERIFIED".into(),
                conditions: check_oleinik_conditions(&bc),
                blasius_errors: Some([base.max_error, refined.max_error]),
                separated_at: base.separated_at,
            };
            (base.flow, summary)
        }
        Some(path) => {
            let (y, u) = read_inflow_csv(path).map_err(|e| Error::config("steady.inflow", e.to_string()))?;
            let bc = SteadyBC::with_constant_pressure(y, u, st.p_x, st.x_end)
                .map_err(|e| Error::config("steady.inflow", e.to_string()))?;
            let report = check_oleinik_conditions(&bc);
            let ok = report.all_passed();
            if !ok && !ctx.force {
                let failed: Vec<String> = report
                    .failed()
                    .iter()
                    .map(|c| format!("{} (measured {:.6e})", c.name, c.measured))
                    .collect();
                return Err(Error::config(
                    "steady.inflow",
                    format!("Oleinik conditions failed: {}; rerun with --force for diagnostics", failed.join(", ")),
                ));
            }
            let mf = if ok {
                von_mises_march(&bc, st.psi_max, st.resolution)?
            } else {
                march_unchecked(&bc, st.psi_max, st.resolution)?
            };
            let flow = invert_von_mises(&mf, st.n_y)?;
            let summary = SteadySummary {
                source: path.display().to_string(),
                status: if ok { "VERIFIED" } else { "UNVERIFIED" }.into(),
                conditions: report,
                blasius_errors: None,
                separated_at: mf.separated_at,
            };
            (flow, summary)
        }
    };
    println!("steady flow {}: {}", summary.source, summary.status);
    let csv = ctx.path("steady_flow.csv");
    write_baseflow_csv(&csv, &flow)?;
    let json = ctx.path("steady.json");
    write_json(&json, &summary)?;
    finish(ctx, "steady", vec![csv, json])
}

/// The quasimode template of a config at one ε (used by the examples).
pub fn quasimode_config(cfg: &Config, eps: f64) -> QuasimodeConfig {
    cfg.quasimode.at(eps)
}

// ---------------------------------------------------------------- report

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub config: Config,
    pub commands: Vec<(String, Vec<ManifestFile>)>,
    pub criteria: Vec<super::criteria::Criterion>,
}

fn sha256_file(path: &Path) -> Result<String> {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(fs::read(path)?);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn cmd_report(ctx: &Context) -> Result<Vec<PathBuf>> {
    let mut commands = Vec::new();
    for name in ["spectral", "quasimode", "scan", "steady"] {
        let idx = ctx.path(&format!("index_{name}.json"));
        if !idx.is_file() {
            continue;
        }
        let index: CommandIndex = read_json(&idx)?;
        let files = index
            .files
            .iter()
            .map(|f| {
                Ok(ManifestFile {
                    path: f.clone(),
                    sha256: sha256_file(&ctx.out.join(f))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        commands.push((name.to_string(), files));
    }
    let criteria = super::criteria::evaluate(&ctx.out);
    let mut text = String::new();
    for c in &criteria {
        println!("{}", c.line());
        text.push_str(&c.line());
        text.push('\n');
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: ctx.config.hash(),
        config: ctx.config.clone(),
        commands,
        criteria,
    };
    let json = ctx.path("manifest.json");
    write_json(&json, &manifest)?;
    let txt = ctx.path("summary.txt");
    fs::write(&txt, text)?;
    Ok(vec![json, txt])
}
