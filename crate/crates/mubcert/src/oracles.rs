//! Randomised and exhaustive verification of the operator inequalities the
//! certification bounds rest on.
//!
//! Each suite evaluates an inequality margin (right-hand side minus
//! left-hand side, exactly as the inequality is stated) over many seeded
//! trials and reports the most negative slack together with the seed that
//! produced it, so any violation can be replayed in isolation. Trials are
//! independent and run concurrently; the worst-case reduction breaks ties
//! toward the lowest trial index, so results do not depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{certification_report, ideal_asp};
use crate::error::Result;
use crate::linalg::{operator_norm, psd_sqrt, ComplexMatrix};
use crate::measurements::{
    depolarize, fourier_mub_pair, mix_povms, overlap_data, random_pair, random_povm_with_retry,
    MeasurementPair,
};
use crate::qrac::optimal_asp;
use crate::rng::{derive_seed, random_general, random_psd, rng_from_seed};

pub const TOL_HLEMMA: f64 = 1e-12;
pub const TOL_KITTANEH_MAX: f64 = 1e-9;
pub const TOL_KITTANEH_QUAD: f64 = 1e-9;
pub const TOL_RADIUS: f64 = 1e-8;
pub const TOL_ASP_CHAIN: f64 = 1e-9;
pub const TOL_SCHUR: f64 = 1e-9;
pub const TOL_TRACE_SQUARE: f64 = 1e-8;
pub const TOL_CONSISTENCY: f64 = 1e-8;

/// Outcome of one verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub suite_name: String,
    pub trials: u64,
    /// Most negative inequality slack observed.
    pub worst_margin: f64,
    /// Seed of the worst trial (grid index for the lemma scan); replaying a
    /// single trial with this seed reproduces the margin.
    pub worst_case_seed: u64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SuiteOutcome {
    fn from_margins(suite_name: &str, tolerance: f64, margins: &[(f64, u64)]) -> Self {
        let mut worst_margin = f64::INFINITY;
        let mut worst_case_seed = 0;
        for &(margin, seed) in margins {
            if margin < worst_margin {
                worst_margin = margin;
                worst_case_seed = seed;
            }
        }
        SuiteOutcome {
            suite_name: suite_name.to_string(),
            trials: margins.len() as u64,
            worst_margin,
            worst_case_seed,
            tolerance,
            passed: worst_margin >= -tolerance,
        }
    }
}

fn run_seeded_trials<F>(
    suite_name: &str,
    trials: u64,
    seed: u64,
    tolerance: f64,
    trial: F,
) -> Result<SuiteOutcome>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let margins: Vec<(f64, u64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, t);
            trial(trial_seed).map(|m| (m, trial_seed))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteOutcome::from_margins(suite_name, tolerance, &margins))
}

/// Scan h(x, y) = x + y - (2 - sqrt(2)) x y - sqrt(x^2 + y^2) over a uniform
/// grid on the unit square. The lemma states h >= 0 there, with zeros at the
/// origin and at (1, 1).
pub fn check_h_lemma(grid_points_per_axis: usize) -> SuiteOutcome {
    let g = grid_points_per_axis.max(2);
    let margins: Vec<(f64, u64)> = (0..g as u64)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / (g - 1) as f64;
            let mut row_worst = f64::INFINITY;
            let mut row_seed = 0u64;
            for j in 0..g as u64 {
                let y = j as f64 / (g - 1) as f64;
                let h = h_lemma_value(x, y);
                if h < row_worst {
                    row_worst = h;
                    row_seed = i * g as u64 + j;
                }
            }
            (row_worst, row_seed)
        })
        .collect();
    let mut outcome = SuiteOutcome::from_margins("hlemma", TOL_HLEMMA, &margins);
    outcome.trials = (g as u64) * (g as u64);
    outcome
}

pub(crate) fn h_lemma_value(x: f64, y: f64) -> f64 {
    let alpha = 2.0 - std::f64::consts::SQRT_2;
    x + y - alpha * x * y - x.hypot(y)
}

fn kittaneh_max_margin(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let cross = operator_norm(&(&psd_sqrt(a)? * &psd_sqrt(b)?));
    let rhs = operator_norm(a).max(operator_norm(b)) + cross;
    Ok(rhs - operator_norm(&(a + b)))
}

/// ||A + B|| <= max(||A||, ||B||) + ||sqrt(A) sqrt(B)|| for PSD A, B.
pub fn check_kittaneh_max(trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    run_seeded_trials("kittaneh-max", trials, seed, TOL_KITTANEH_MAX, |s| {
        let mut rng = rng_from_seed(s);
        let a = random_psd(d, &mut rng);
        let b = random_psd(d, &mut rng);
        kittaneh_max_margin(&a, &b)
    })
}

fn kittaneh_quad_margin(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let na = operator_norm(a);
    let nb = operator_norm(b);
    let cross = operator_norm(&(&psd_sqrt(a)? * &psd_sqrt(b)?));
    let rhs = 0.5 * (na + nb + ((na - nb).powi(2) + 4.0 * cross * cross).sqrt());
    Ok(rhs - operator_norm(&(a + b)))
}

/// The quadratic strengthening
/// ||A + B|| <= (||A|| + ||B|| + sqrt((||A|| - ||B||)^2 + 4 ||sqrt(A) sqrt(B)||^2)) / 2.
pub fn check_kittaneh_quadratic(trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    run_seeded_trials("kittaneh-quad", trials, seed, TOL_KITTANEH_QUAD, |s| {
        let mut rng = rng_from_seed(s);
        let a = random_psd(d, &mut rng);
        let b = random_psd(d, &mut rng);
        kittaneh_quad_margin(&a, &b)
    })
}

pub(crate) fn radius_margin(o: &ComplexMatrix) -> f64 {
    let w = crate::linalg::numerical_radius(o);
    let g = ComplexMatrix::from_dmatrix(
        o.as_dmatrix().adjoint() * o.as_dmatrix() + o.as_dmatrix() * o.as_dmatrix().adjoint(),
    )
    .expect("products of finite matrices are finite");
    0.5 * operator_norm(&g) - w * w
}

/// Power inequality for the numerical radius: w(O)^2 <= ||O†O + OO†|| / 2.
pub fn check_numerical_radius(trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    run_seeded_trials("radius", trials, seed, TOL_RADIUS, |s| {
        let mut rng = rng_from_seed(s);
        Ok(radius_margin(&random_general(d, &mut rng)))
    })
}

/// The four links of the success-probability chain for one pair, evaluated
/// with optimal preparations:
/// p <= 1/2 + (2d^2)^{-1} sum [s - (2 - sqrt(2)) s n]
///   <= 1/2 + (2d^2)^{-1} sum s
///   <= 1/2 + (2d^2)^{-1} sum sqrt(t),  and p <= ideal.
pub(crate) fn asp_chain_margins(pair: &MeasurementPair) -> Result<[f64; 4]> {
    let d = pair.dim();
    let norm = 2.0 * (d * d) as f64;
    let alpha = 2.0 - std::f64::consts::SQRT_2;
    let p = optimal_asp(pair)?;
    let data = overlap_data(pair);
    let mut sum_s = 0.0;
    let mut sum_strong = 0.0;
    let mut sum_sqrt_t = 0.0;
    for i in 0..d {
        for j in 0..d {
            let s = data.s[i][j];
            let n = data.n[i][j];
            sum_s += s;
            sum_strong += s - alpha * s * n;
            sum_sqrt_t += data.t[i][j].max(0.0).sqrt();
        }
    }
    let e1 = 0.5 + sum_strong / norm;
    let e2 = 0.5 + sum_s / norm;
    let e3 = 0.5 + sum_sqrt_t / norm;
    Ok([e1 - p, e2 - e1, e3 - e2, ideal_asp(d)? - p])
}

/// Full chain of success-probability bounds on random d-outcome pairs.
pub fn check_asp_chain(trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    run_seeded_trials("asp-chain", trials, seed, TOL_ASP_CHAIN, |s| {
        let pair = random_pair(d, s)?;
        let margins = asp_chain_margins(&pair)?;
        Ok(margins.into_iter().fold(f64::INFINITY, f64::min))
    })
}

/// Strict concavity margin of sum sqrt(t) under the normalisation
/// sum t = d: the uniform distribution is the unique maximiser, so the
/// margin d sqrt(d) - sum sqrt(t) is non-negative and, by strictness, must
/// exceed 1e-6 whenever some t deviates from 1/d by more than 1e-3.
pub fn check_schur_concavity(trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    let per_trial: Vec<(f64, bool, u64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, t);
            let mut rng = rng_from_seed(s);
            let df = d as f64;
            // Normalised exponentials: a uniform draw from the simplex,
            // rescaled to total mass d.
            let draws: Vec<f64> = (0..d * d)
                .map(|_| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::Exp1))
                .collect();
            let total: f64 = draws.iter().sum();
            let overlaps: Vec<f64> = draws.iter().map(|&e| df * e / total).collect();
            let sum_sqrt: f64 = overlaps.iter().map(|&x| x.sqrt()).sum();
            let margin = df * df.sqrt() - sum_sqrt;
            let deviation = overlaps
                .iter()
                .map(|&x| (x - 1.0 / df).abs())
                .fold(0.0f64, f64::max);
            let strict_violation = deviation > 1e-3 && margin <= 1e-6;
            (margin, strict_violation, s)
        })
        .collect();
    let margins: Vec<(f64, u64)> = per_trial.iter().map(|&(m, _, s)| (m, s)).collect();
    let mut outcome = SuiteOutcome::from_margins("schur", TOL_SCHUR, &margins);
    if let Some(&(_, _, s)) = per_trial.iter().find(|&&(_, v, _)| v) {
        outcome.passed = false;
        outcome.worst_case_seed = s;
    }
    Ok(outcome)
}

/// Trace-square bound for d-outcome measurements on C^d:
/// sum (tr A_i)^2 <= d + (d - q)(d - q + 1) with q the norm sum.
pub fn check_trace_square(trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    run_seeded_trials("tracesq", trials, seed, TOL_TRACE_SQUARE, |s| {
        let povm = random_povm_with_retry(d, d, s)?;
        Ok(trace_square_margin_for(&povm))
    })
}

pub(crate) fn trace_square_margin_for(povm: &crate::measurements::Povm) -> f64 {
    let d = povm.dim() as f64;
    let stats = crate::measurements::povm_stats(povm);
    let q = stats.norm_sum;
    let sum_tr_sq: f64 = stats.traces.iter().map(|&t| t * t).sum();
    d + (d - q) * (d - q + 1.0) - sum_tr_sq
}

/// End-to-end soundness of the certification report on noisy mixtures: a
/// depolarised mutually unbiased pair convexly mixed with a random pair,
/// both mixing parameters drawn per trial.
pub fn check_certification_consistency(trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    run_seeded_trials("consistency", trials, seed, TOL_CONSISTENCY, |s| {
        let mut rng = rng_from_seed(s);
        let eta: f64 = rand::Rng::random(&mut rng);
        let lambda: f64 = rand::Rng::random(&mut rng);
        let mub = fourier_mub_pair(d)?;
        let noisy_a = depolarize(mub.a(), eta)?;
        let noisy_b = depolarize(mub.b(), eta)?;
        let rnd = random_pair(d, derive_seed(s, 1))?;
        let pair = MeasurementPair::new(
            mix_povms(&noisy_a, rnd.a(), lambda)?,
            mix_povms(&noisy_b, rnd.b(), lambda)?,
        )?;
        let report = certification_report(&pair)?;
        Ok(report.consistency.worst_slack)
    })
}

/// Names accepted by [`run_suite`], in display order.
pub const SUITE_NAMES: &[&str] = &[
    "hlemma",
    "kittaneh-max",
    "kittaneh-quad",
    "radius",
    "asp-chain",
    "schur",
    "tracesq",
    "consistency",
];

/// Dispatch a suite by CLI name. For `hlemma` the trial budget is spent on
/// a square grid with floor(sqrt(trials)) points per axis.
pub fn run_suite(name: &str, trials: u64, d: usize, seed: u64) -> Result<SuiteOutcome> {
    match name {
        "hlemma" => Ok(check_h_lemma((trials as f64).sqrt().floor() as usize)),
        "kittaneh-max" => check_kittaneh_max(trials, d, seed),
        "kittaneh-quad" => check_kittaneh_quadratic(trials, d, seed),
        "radius" => check_numerical_radius(trials, d, seed),
        "asp-chain" => check_asp_chain(trials, d, seed),
        "schur" => check_schur_concavity(trials, d, seed),
        "tracesq" => check_trace_square(trials, d, seed),
        "consistency" => check_certification_consistency(trials, d, seed),
        other => Err(crate::error::Error::UnknownSuite(other.to_string())),
    }
}
