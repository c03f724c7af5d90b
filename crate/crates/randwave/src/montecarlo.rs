//! Experiment orchestration: run seeded trials, aggregate statistics by a
//! deterministic ordered fold, and emit the report artifacts.
//!
//! Reproducibility contract: a report is a pure function of its
//! configuration. Coefficients come from counter-mode streams keyed by
//! (master seed, trial index), trials are collected in trial order, and the
//! worker count is a call argument that can only change wall time, never a
//! byte of output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{DomainSpec, SpectralWindow, WindowKind};
use crate::ensemble::{sample_coefficients, GAUSSIAN_TRANSFORM, RNG_ALGORITHM};
use crate::kacrice::{self, TraceBasis};
use crate::zerocount::{self, count_zeros, minimum_grid, regularized_count};
use crate::{round_sig, Error, Result};

/// Trials that fail count stabilization are excluded from the statistics;
/// beyond this fraction the whole experiment aborts instead of reporting.
pub const EXCLUDED_QUOTA: f64 = 0.01;

/// Scan grids default to this multiple of the admissibility floor; tight
/// zero pairs below one scan cell are what destabilize counts, and their
/// rate falls with the cube of the cell width.
pub const DEFAULT_GRID_FACTOR: usize = 4;

/// Everything a run depends on. Serialized verbatim into the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub basis: TraceBasis,
    pub trials: u64,
    pub master_seed: u64,
    /// Scan grid for zero counting; default [`DEFAULT_GRID_FACTOR`] times
    /// the [`minimum_grid`] floor.
    #[serde(default)]
    pub grid_n: Option<usize>,
    /// Root refinement tolerance as a fraction of the period; default
    /// [`zerocount::DEFAULT_REFINE_TOL_REL`].
    #[serde(default)]
    pub refine_tol_rel: Option<f64>,
    /// Regularized-count widths as fractions of each trial's sup|V|; one
    /// extra CSV column per entry.
    #[serde(default)]
    pub eps_rel: Vec<f64>,
    /// Where the per-trial CSV goes; `None` keeps it in memory only.
    #[serde(default)]
    pub per_trial_csv: Option<String>,
    /// Where the per-root dump CSV goes, if wanted.
    #[serde(default)]
    pub zero_dump_csv: Option<String>,
}

/// Provenance block: algorithm ids, code version, effective tolerances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub rng: String,
    pub gaussian_transform: String,
    pub version: String,
    pub grid_n: usize,
    pub refine_tol: f64,
    pub quad_n: usize,
    pub eps_rel: Vec<f64>,
    pub kacrice_grid_n: usize,
}

/// One trial's outcome. `count` is `None` when the trial was excluded
/// (unstable count); excluded trials still appear in the CSV with empty
/// value cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub count: Option<usize>,
    pub reg: Vec<f64>,
    pub dump_rows: Option<String>,
}

/// Aggregated statistics next to the two deterministic estimates. All
/// fields carry 12 significant digits. The gap fields are the MC-vs-Z and
/// MC-vs-prediction discrepancies in units of standard error; `None` when
/// se = 0 and the gap is not exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub var: f64,
    pub se: f64,
    pub kacrice_z: f64,
    pub prediction: f64,
    pub excluded: usize,
    pub z_gap_se: Option<f64>,
    pub prediction_gap_se: Option<f64>,
}

/// Full experiment output. The JSON form carries `config`, `manifest`,
/// `per_trial` (path of the CSV, if one was written), and `summary`;
/// per-trial records live in the CSV, not the JSON.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub manifest: Manifest,
    pub per_trial: Option<String>,
    pub summary: Summary,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Header plus one row per trial: `trial,count[,reg_<eps>...]`. Excluded
/// trials keep their row with empty value cells.
pub fn per_trial_csv(records: &[TrialRecord], eps_rel: &[f64]) -> String {
    let mut out = String::from("trial,count");
    for eps in eps_rel {
        out.push_str(&format!(",reg_{eps}"));
    }
    out.push('\n');
    for rec in records {
        out.push_str(&rec.trial.to_string());
        match rec.count {
            Some(c) => out.push_str(&format!(",{c}")),
            None => out.push(','),
        }
        for i in 0..eps_rel.len() {
            match rec.reg.get(i) {
                Some(&r) => out.push_str(&format!(",{}", round_sig(r, 12))),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Header plus the per-root rows of every resolved trial, in trial order.
pub fn zero_dump_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(zerocount::ZERO_DUMP_HEADER);
    out.push('\n');
    for rec in records {
        if let Some(rows) = &rec.dump_rows {
            out.push_str(rows);
        }
    }
    out
}

fn validate(config: &ExperimentConfig) -> Result<()> {
    if config.trials == 0 {
        return Err(Error::Config("an experiment needs at least one trial".into()));
    }
    if config.eps_rel.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Config(format!(
            "regularization factors must be positive and finite: {:?}",
            config.eps_rel
        )));
    }
    if let Some(tol) = config.refine_tol_rel {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Config(format!("refine_tol_rel must be positive: {tol}")));
        }
    }
    Ok(())
}

/// Asymptotic (or closed-form, for the synthetic family) zero-count
/// prediction for a basis.
pub fn prediction_for(basis: &TraceBasis, ell: f64) -> f64 {
    match basis {
        TraceBasis::Window { domain, window } => kacrice::asymptotic_prediction(domain, window),
        TraceBasis::SyntheticTrig { ms } => {
            // c11 = |ms|, c22 = Σ m^2, both constant: Z = (ell/π)·sqrt(c22/c11)
            let mean_sq =
                ms.iter().map(|&m| (m as f64).powi(2)).sum::<f64>() / ms.len().max(1) as f64;
            ell / std::f64::consts::PI * mean_sq.sqrt()
        }
    }
}

/// Run the experiment: T seeded trials, ordered aggregation, Kac-Rice and
/// asymptotic comparison values, optional CSV artifacts. Deterministic for
/// a given config; `workers` only sizes the thread pool.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    validate(config)?;
    if workers == 0 {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    let prepared = config.basis.prepare()?;
    let ell = prepared.boundary_length();
    let floor = minimum_grid(prepared.max_frequency(), ell);
    let grid_n = config.grid_n.unwrap_or(DEFAULT_GRID_FACTOR * floor);
    if grid_n < floor {
        return Err(Error::Config(format!(
            "grid_n = {grid_n} is below the scan floor {floor} for this window"
        )));
    }
    let refine_tol =
        round_sig(config.refine_tol_rel.unwrap_or(zerocount::DEFAULT_REFINE_TOL_REL) * ell, 12);
    let quad_n = grid_n;
    let want_dump = config.zero_dump_csv.is_some();

    let run_trial = |trial: u64| -> Result<TrialRecord> {
        let coeffs = sample_coefficients(prepared.dimension(), config.master_seed, trial);
        let field = prepared.realize(coeffs)?;
        match count_zeros(&field, grid_n, Some(refine_tol)) {
            Ok(set) => {
                let mut reg = Vec::with_capacity(config.eps_rel.len());
                for rel in &config.eps_rel {
                    reg.push(regularized_count(&field, rel * set.sup_abs, quad_n)?);
                }
                let dump_rows = want_dump.then(|| zerocount::zero_dump_rows(trial, &set));
                Ok(TrialRecord { trial, count: Some(set.count), reg, dump_rows })
            }
            Err(Error::UnresolvedZeros { .. }) => {
                Ok(TrialRecord { trial, count: None, reg: Vec::new(), dump_rows: None })
            }
            Err(e) => Err(e),
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> =
        pool.install(|| (0..config.trials).into_par_iter().map(run_trial).collect::<Result<_>>())?;

    let excluded = records.iter().filter(|r| r.count.is_none()).count();
    if excluded as f64 > EXCLUDED_QUOTA * config.trials as f64 {
        return Err(Error::ExcludedQuota { excluded, trials: config.trials as usize });
    }

    let included: Vec<f64> =
        records.iter().filter_map(|r| r.count).map(|c| c as f64).collect();
    let n = included.len() as f64;
    let mean = included.iter().sum::<f64>() / n;
    let var = if included.len() > 1 {
        included.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let se = (var / n).sqrt();

    let z = kacrice::expected_zero_count(&prepared, kacrice::DEFAULT_GRID_N)?.z;
    let prediction = prediction_for(&config.basis, ell);
    let gap_in_se = |estimate: f64| -> Option<f64> {
        let gap = (mean - estimate).abs();
        if se > 0.0 {
            Some(round_sig(gap / se, 12))
        } else {
            (gap == 0.0).then_some(0.0)
        }
    };

    let summary = Summary {
        mean: round_sig(mean, 12),
        var: round_sig(var, 12),
        se: round_sig(se, 12),
        kacrice_z: round_sig(z, 12),
        prediction: round_sig(prediction, 12),
        excluded,
        z_gap_se: gap_in_se(z),
        prediction_gap_se: gap_in_se(prediction),
    };
    let manifest = Manifest {
        rng: RNG_ALGORITHM.into(),
        gaussian_transform: GAUSSIAN_TRANSFORM.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        grid_n,
        refine_tol,
        quad_n,
        eps_rel: config.eps_rel.clone(),
        kacrice_grid_n: kacrice::DEFAULT_GRID_N,
    };

    if let Some(path) = &config.per_trial_csv {
        std::fs::write(path, per_trial_csv(&records, &config.eps_rel))?;
    }
    if let Some(path) = &config.zero_dump_csv {
        std::fs::write(path, zero_dump_csv(&records))?;
    }

    Ok(ExperimentReport {
        config: config.clone(),
        manifest,
        per_trial: config.per_trial_csv.clone(),
        summary,
        records,
    })
}

/// One λ of a slope study.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeRow {
    pub lambda: f64,
    pub z: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub prediction: f64,
    pub z_over_lambda: f64,
    pub excluded: usize,
}

/// Kac-Rice Z against λ across one window family, with the through-origin
/// least-squares slope (the asymptote ℓλ·const passes through the origin)
/// and its asymptotic target ℓ/(√6π) or ℓ/(2π).
#[derive(Debug, Clone, Serialize)]
pub struct SlopeStudy {
    pub rows: Vec<SlopeRow>,
    pub slope: f64,
    pub target: f64,
}

/// Run one experiment per λ (seeded master_seed + index) and fit Z vs λ.
pub fn slope_study(
    domain: DomainSpec,
    kind: WindowKind,
    lambdas: &[f64],
    trials: u64,
    master_seed: u64,
    workers: usize,
) -> Result<SlopeStudy> {
    if lambdas.is_empty() {
        return Err(Error::Config("slope study needs at least one lambda".into()));
    }
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &lambda) in lambdas.iter().enumerate() {
        let window = SpectralWindow { kind, lambda };
        let config = ExperimentConfig {
            basis: TraceBasis::Window { domain, window },
            trials,
            master_seed: master_seed + i as u64,
            grid_n: None,
            refine_tol_rel: None,
            eps_rel: Vec::new(),
            per_trial_csv: None,
            zero_dump_csv: None,
        };
        let report = run_experiment(&config, workers)?;
        let z = report.summary.kacrice_z;
        num += lambda * z;
        den += lambda * lambda;
        rows.push(SlopeRow {
            lambda,
            z,
            mc_mean: report.summary.mean,
            mc_se: report.summary.se,
            prediction: report.summary.prediction,
            z_over_lambda: round_sig(z / lambda, 12),
            excluded: report.summary.excluded,
        });
    }
    let ell = domain.boundary_length();
    let target = match kind {
        WindowKind::Long => ell / (6.0f64.sqrt() * std::f64::consts::PI),
        WindowKind::Short => ell / std::f64::consts::TAU,
    };
    Ok(SlopeStudy { rows, slope: round_sig(num / den, 12), target: round_sig(target, 12) })
}
