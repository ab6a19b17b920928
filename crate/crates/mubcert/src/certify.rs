//! Closed-form certification bounds in the observed success probability,
//! direct-from-measurement quantities, and the consolidated report.
//!
//! Every evaluator is a pure function of (p_bar, d). All entropic
//! quantities are in bits (logarithm base 2, so "log d bits of randomness"
//! is literal); serialised reports carry a `log_base` header recording that
//! convention. Bounds are clamped into their trivially valid ranges and
//! reported as absent outside their nontrivial regions rather than as
//! vacuous numbers.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{check_density_matrix, operator_norm, ComplexMatrix};
use crate::measurements::{
    is_mub_pair, overlap_data, povm_stats, MeasurementPair, OverlapData, Povm,
};
use crate::qrac::{optimal_asp, optimal_states};

/// Logarithm base of every entropic quantity in this crate.
pub const LOG_BASE: u32 = 2;

/// Slack allowed above the ideal success probability before an input is
/// treated as invalid data rather than rounding noise.
pub const P_BAR_HEADROOM: f64 = 1e-12;

/// Window around the ideal success probability inside which the overlap
/// range collapses to its exact closed-form limit (the raw expression has a
/// square-root singularity there and loses half the working precision).
const P_Q_SNAP: f64 = 1e-13;

/// Per-report consistency margin.
pub const CONSISTENCY_TOL: f64 = 1e-8;

fn require_dim(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDim {
            dim: d,
            reason: "certification bounds need dimension at least 2",
        });
    }
    Ok(d as f64)
}

/// Ideal success probability (1 + 1/sqrt(d))/2, attained exactly by a pair
/// of mutually unbiased bases.
pub fn ideal_asp(d: usize) -> Result<f64> {
    let df = require_dim(d)?;
    Ok(0.5 * (1.0 + 1.0 / df.sqrt()))
}

/// Nontrivial-region thresholds.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Thresholds {
    /// Above this the norm-sum and incompatibility bounds become available.
    pub p_0: f64,
    /// Above this the overlap-entropy bound is positive.
    pub entropy_threshold: f64,
}

pub fn thresholds(d: usize) -> Result<Thresholds> {
    let df = require_dim(d)?;
    Ok(Thresholds {
        p_0: 0.5 + ((df * df - 1.0) * df).sqrt() / (2.0 * df * df),
        entropy_threshold: 0.5 + 1.0 / (2.0 * df * df.sqrt()),
    })
}

fn check_distribution(dist: &[f64]) -> Result<Vec<f64>> {
    if dist.is_empty() {
        return Err(Error::NotADistribution {
            reason: "empty distribution".into(),
        });
    }
    let mut clamped = Vec::with_capacity(dist.len());
    for (i, &p) in dist.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NotADistribution {
                reason: format!("non-finite entry at index {i}"),
            });
        }
        if p < -1e-12 {
            return Err(Error::NotADistribution {
                reason: format!("negative entry {p:e} at index {i}"),
            });
        }
        clamped.push(p.max(0.0));
    }
    let sum: f64 = clamped.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::NotADistribution {
            reason: format!("entries sum to {sum}, not 1"),
        });
    }
    Ok(clamped)
}

/// Order-1/2 Renyi entropy 2 log2(sum_i sqrt(p_i)) in bits.
pub fn renyi_half_entropy(dist: &[f64]) -> Result<f64> {
    let p = check_distribution(dist)?;
    let root_sum: f64 = p.iter().map(|&x| x.sqrt()).sum();
    Ok(2.0 * root_sum.log2())
}

/// Shannon entropy -sum_i p_i log2 p_i in bits, with 0 log 0 = 0.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    let p = check_distribution(dist)?;
    Ok(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum())
}

/// Shannon entropy of the outcome statistics of a POVM on a state.
pub fn outcome_entropy(povm: &Povm, rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimMismatch {
            expected: povm.dim(),
            found: rho.dim(),
        });
    }
    check_density_matrix(rho, 1e-9)?;
    let probs: Vec<f64> = povm
        .operators()
        .iter()
        .map(|op| (op * rho).trace_re())
        .collect();
    shannon_entropy(&probs)
}

/// Overlap entropy: Renyi-1/2 entropy of the normalised trace overlaps
/// {t_ij / d}. Maximal value log2(d^2), reached by mutually unbiased bases
/// (and also by trivial measurements, which is why the norm-sum bound
/// exists).
pub fn overlap_entropy(pair: &MeasurementPair) -> Result<f64> {
    let d = pair.dim() as f64;
    let data = overlap_data(pair);
    let dist: Vec<f64> = data.t.iter().flatten().map(|&t| t / d).collect();
    renyi_half_entropy(&dist)
}

fn check_p_bar(p_bar: f64, d: usize, lo: f64) -> Result<f64> {
    let p_q = ideal_asp(d)?;
    if !p_bar.is_finite() || p_bar < lo || p_bar > p_q + P_BAR_HEADROOM {
        return Err(Error::OutOfRange {
            quantity: "p_bar",
            value: p_bar,
            lo,
            hi: p_q,
        });
    }
    Ok(p_q)
}

/// Lower bound on the overlap entropy: max(0, 2 log2[d sqrt(d) (2 p_bar - 1)]).
///
/// Positive above the entropy threshold; equals log2(d^2) at the ideal
/// success probability. Domain: 1/2 < p_bar <= ideal + headroom.
pub fn overlap_entropy_lower_bound(p_bar: f64, d: usize) -> Result<f64> {
    check_p_bar(p_bar, d, 0.5)?;
    if p_bar <= 0.5 {
        return Err(Error::OutOfRange {
            quantity: "p_bar",
            value: p_bar,
            lo: 0.5,
            hi: ideal_asp(d)?,
        });
    }
    let df = d as f64;
    let arg = df * df.sqrt() * (2.0 * p_bar - 1.0);
    Ok((2.0 * arg.log2()).max(0.0))
}

fn s_range_raw(p_bar: f64, d: usize) -> (f64, f64) {
    let df = d as f64;
    let u = 2.0 * p_bar - 1.0;
    let inner = (df * (df * df - 1.0) * (1.0 - df * u * u)).max(0.0);
    let r = inner.sqrt() / df;
    (u - r, u + r)
}

/// Range [s_min, s_max] certified for every generalised overlap
/// ||sqrt(A_i) sqrt(B_j)|| by an observed success probability.
///
/// Clamped into [0, 1]; collapses to (1/sqrt(d), 1/sqrt(d)) at the ideal
/// success probability. Domain: 1/2 <= p_bar <= ideal + headroom.
pub fn s_range(p_bar: f64, d: usize) -> Result<(f64, f64)> {
    let p_q = check_p_bar(p_bar, d, 0.5)?;
    // The raw expression loses half the working precision in a
    // square-root singularity at the ideal point; snap to the limit there.
    if (p_bar - p_q).abs() <= P_Q_SNAP {
        let v = 1.0 / (d as f64).sqrt();
        return Ok((v, v));
    }
    let (lo, hi) = s_range_raw(p_bar, d);
    Ok((lo.clamp(0.0, 1.0), hi.clamp(0.0, 1.0)))
}

/// Lower bound on the sum of operator norms N(A) = sum_i ||A_i|| (and by
/// symmetry on N(B)).
///
/// Meaningful for p_bar >= p_0; evaluates to d - (2 + sqrt(2))/d in the
/// limit p_bar -> p_0 and exactly d at the ideal success probability.
/// Inputs below p_0 (beyond rounding headroom) error with
/// [`Error::NontrivialRegionRequired`].
pub fn norm_sum_lower_bound(p_bar: f64, d: usize) -> Result<f64> {
    check_p_bar(p_bar, d, 0.5)?;
    let t = thresholds(d)?;
    if p_bar < t.p_0 - P_BAR_HEADROOM {
        return Err(Error::NontrivialRegionRequired { p_bar, p_0: t.p_0 });
    }
    let df = d as f64;
    let u = 2.0 * p_bar - 1.0;
    let inner = (df.powi(3) * u * u - (df * df - 1.0)).max(0.0);
    Ok(df - (2.0 + std::f64::consts::SQRT_2) / df * (1.0 - inner.sqrt()))
}

/// Upper bound d + (d - q)(d - q + 1) on sum_i (tr A_i)^2 for a d-outcome
/// measurement on C^d whose norm sum is at least q.
pub fn trace_square_upper_bound(q: f64, d: usize) -> Result<f64> {
    let df = require_dim(d)?;
    if !(-1e-9..=df + 1e-9).contains(&q) {
        return Err(Error::OutOfRange {
            quantity: "q",
            value: q,
            lo: 0.0,
            hi: df,
        });
    }
    Ok(df + (df - q) * (df - q + 1.0))
}

/// Direct upper bound on the incompatibility robustness of a pair, from the
/// operator norms and traces of the measurement operators themselves.
///
/// Clamped to at most 1 (identical measurements are compatible and must not
/// be certified incompatible). Errors when the denominator degenerates,
/// which happens exactly when both POVMs are trivial.
pub fn incompatibility_bound_direct(pair: &MeasurementPair) -> Result<f64> {
    let df = pair.dim() as f64;
    let mut max_norm = f64::NEG_INFINITY;
    for ai in pair.a().operators() {
        for bj in pair.b().operators() {
            max_norm = max_norm.max(operator_norm(&(ai + bj)));
        }
    }
    let tr_sq = |p: &Povm| -> (f64, f64) {
        let mut sum_tr2 = 0.0;
        let mut sum_sq_tr = 0.0;
        for op in p.operators() {
            let tr = op.trace_re();
            sum_sq_tr += tr * tr;
            sum_tr2 += (op * op).trace_re();
        }
        (sum_sq_tr, sum_tr2)
    };
    let (sa, fa) = tr_sq(pair.a());
    let (sb, fb) = tr_sq(pair.b());
    let numerator = df * df * max_norm - sa - sb;
    let denominator = df * fa + df * fb - sa - sb;
    if denominator <= 1e-12 {
        return Err(Error::DegenerateDenominator { value: denominator });
    }
    Ok((numerator / denominator).min(1.0))
}

/// Upper bound on the incompatibility robustness from the observed success
/// probability alone.
///
/// Uses the certified norm sum q and overlap ceiling s_max; equals
/// (sqrt(d)/2 + 1)/(sqrt(d) + 1) at the ideal success probability. Errors
/// below p_0 or when the certified denominator degenerates (the bound is
/// then vacuous).
pub fn incompatibility_bound_from_asp(p_bar: f64, d: usize) -> Result<f64> {
    let q = norm_sum_lower_bound(p_bar, d)?;
    let (_, s_max) = s_range(p_bar, d)?;
    let df = d as f64;
    let denominator = q * q - df - (df - q) * (df - q + 1.0);
    if denominator <= 1e-12 {
        return Err(Error::DegenerateDenominator { value: denominator });
    }
    let numerator = 0.5 * df * df * (1.0 + s_max) - q * q / df;
    Ok((numerator / denominator).min(1.0))
}

/// State-independent lower bound on H(A) + H(B) in bits, from the largest
/// generalised overlap: -log2 max_ij s_ij^2.
pub fn uncertainty_bound_direct(pair: &MeasurementPair) -> f64 {
    let data = overlap_data(pair);
    uncertainty_from_overlaps(&data)
}

fn uncertainty_from_overlaps(data: &OverlapData) -> f64 {
    // s <= 1 exactly; clamp rounding so the bound is never spuriously negative.
    let s_max = data.s_max().min(1.0);
    (-2.0 * s_max.log2()).max(0.0)
}

/// Entropies observed on a concrete state, together with the bound they must
/// respect.
#[derive(Debug, Clone, Serialize)]
pub struct UncertaintyObservation {
    pub lower_bound: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
}

/// Evaluate H(A) + H(B) on a state and check it against the overlap bound.
pub fn uncertainty_observed(
    pair: &MeasurementPair,
    rho: &ComplexMatrix,
) -> Result<UncertaintyObservation> {
    let lower_bound = uncertainty_bound_direct(pair);
    let entropy_a = outcome_entropy(pair.a(), rho)?;
    let entropy_b = outcome_entropy(pair.b(), rho)?;
    let margin = entropy_a + entropy_b - lower_bound;
    if margin < -1e-9 {
        return Err(Error::ConsistencyViolation {
            check: "entropic uncertainty",
            margin,
        });
    }
    Ok(UncertaintyObservation {
        lower_bound,
        entropy_a,
        entropy_b,
    })
}

/// Lower bound on H(A) + H(B) in bits from the observed success probability:
/// max(0, -2 log2 s_max). Equals log2 d at the ideal success probability.
pub fn uncertainty_bound_from_asp(p_bar: f64, d: usize) -> Result<f64> {
    let (_, s_max) = s_range(p_bar, d)?;
    if s_max <= 0.0 {
        // Unreachable for valid inputs: s_max >= 2 p_bar - 1 >= 0 and only
        // vanishes at p_bar = 1/2 where the clamp below already yields 0.
        return Ok(0.0);
    }
    Ok((-2.0 * s_max.log2()).max(0.0))
}

/// Largest p_bar at which the uncertainty bound is still zero (raw s_max
/// crosses 1). Found by bisection; the bound is positive strictly above the
/// returned value.
pub fn uncertainty_nontrivial_threshold(d: usize) -> Result<f64> {
    let p_q = ideal_asp(d)?;
    let f = |p: f64| s_range_raw(p, d).1 - 1.0;
    let (mut lo, mut hi) = (0.5, p_q);
    // f(1/2) > 0 for every d >= 2 and f(p_q) < 0.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// All success-probability-derived bounds for one observation.
///
/// `p_bar` here is the effective value used by the evaluators: the observed
/// probability clamped into [1/2, ideal]; below 1/2 nothing is certified
/// and the bounds take their trivial values. Optional fields are absent
/// exactly when the observation sits outside the bound's nontrivial region.
#[derive(Debug, Clone, Serialize)]
pub struct AspBounds {
    pub d: usize,
    pub p_bar: f64,
    pub p_q: f64,
    pub p_0: f64,
    pub entropy_threshold: f64,
    pub s_min: f64,
    pub s_max: f64,
    /// Lower bound on the overlap entropy, bits.
    pub h_s_lower: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_sum_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incompat_upper: Option<f64>,
    /// Lower bound on H(A) + H(B), bits.
    pub uncertainty_lower: f64,
}

impl AspBounds {
    /// Evaluate every bound at the observed success probability.
    pub fn evaluate(p_bar: f64, d: usize) -> Result<Self> {
        let p_q = ideal_asp(d)?;
        if p_bar > p_q + P_BAR_HEADROOM {
            return Err(Error::OutOfRange {
                quantity: "p_bar",
                value: p_bar,
                lo: 0.5,
                hi: p_q,
            });
        }
        let t = thresholds(d)?;
        let p_eff = p_bar.max(0.5);
        let (s_min, s_max) = s_range(p_eff, d)?;
        let h_s_lower = if p_eff > 0.5 {
            overlap_entropy_lower_bound(p_eff, d)?
        } else {
            0.0
        };
        let norm_sum_lower = if p_eff >= t.p_0 - P_BAR_HEADROOM {
            Some(norm_sum_lower_bound(p_eff, d)?)
        } else {
            None
        };
        let incompat_upper = if norm_sum_lower.is_some() {
            incompatibility_bound_from_asp(p_eff, d).ok()
        } else {
            None
        };
        let uncertainty_lower = uncertainty_bound_from_asp(p_eff, d)?;
        Ok(Self {
            d,
            p_bar: p_eff,
            p_q,
            p_0: t.p_0,
            entropy_threshold: t.entropy_threshold,
            s_min,
            s_max,
            h_s_lower,
            norm_sum_lower,
            incompat_upper,
            uncertainty_lower,
        })
    }
}

/// Quantities computed directly from the measurement operators.
#[derive(Debug, Clone, Serialize)]
pub struct DirectQuantities {
    /// Overlap entropy of the pair, bits.
    pub overlap_entropy: f64,
    pub norm_sum_a: f64,
    pub norm_sum_b: f64,
    pub overlap_data: OverlapData,
    /// Direct incompatibility-robustness upper bound; absent when both
    /// measurements are trivial and the bound degenerates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incompat_upper_direct: Option<f64>,
    /// Direct entropic uncertainty lower bound, bits.
    pub uncertainty_lower_direct: f64,
    pub mub_flag: bool,
}

/// Pass/fail consistency flags: every direct quantity must respect its
/// success-probability-derived bound within [`CONSISTENCY_TOL`].
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyCheck {
    pub overlap_entropy_ok: bool,
    pub s_range_ok: bool,
    pub norm_sum_ok: bool,
    pub uncertainty_ok: bool,
    pub all_ok: bool,
    /// Most negative slack across the applicable checks.
    pub worst_slack: f64,
}

/// Consolidated certification record for one measurement pair.
#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    /// Logarithm base of every entropic field (fixed convention, see
    /// [`LOG_BASE`]).
    pub log_base: u32,
    pub dim: usize,
    /// Best success probability attainable with this pair.
    pub p_bar: f64,
    pub asp_bounds: AspBounds,
    pub direct: DirectQuantities,
    /// Grid slots where the optimal preparation was degenerate.
    pub degeneracy_flags: Vec<Vec<bool>>,
    pub consistency: ConsistencyCheck,
}

impl CertificationReport {
    /// Serialise to JSON with 17-significant-digit reals.
    pub fn to_json(&self) -> String {
        crate::serialize::to_json(self)
    }
}

fn consistency_check(
    bounds: &AspBounds,
    direct: &DirectQuantities,
    data: &OverlapData,
) -> ConsistencyCheck {
    let mut slacks: Vec<f64> = vec![
        direct.overlap_entropy - bounds.h_s_lower,
        data.s_min() - bounds.s_min,
        bounds.s_max - data.s_max(),
        direct.uncertainty_lower_direct - bounds.uncertainty_lower,
    ];
    if let Some(q) = bounds.norm_sum_lower {
        slacks.push(direct.norm_sum_a - q);
        slacks.push(direct.norm_sum_b - q);
    }
    let worst_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = |s: f64| s >= -CONSISTENCY_TOL;
    let overlap_entropy_ok = ok(slacks[0]);
    let s_range_ok = ok(slacks[1]) && ok(slacks[2]);
    let uncertainty_ok = ok(slacks[3]);
    let norm_sum_ok = bounds
        .norm_sum_lower
        .is_none_or(|q| ok(direct.norm_sum_a - q) && ok(direct.norm_sum_b - q));
    ConsistencyCheck {
        overlap_entropy_ok,
        s_range_ok,
        norm_sum_ok,
        uncertainty_ok,
        all_ok: overlap_entropy_ok && s_range_ok && norm_sum_ok && uncertainty_ok,
        worst_slack,
    }
}

/// Compute the full certification report for a d-outcome pair.
pub fn certification_report(pair: &MeasurementPair) -> Result<CertificationReport> {
    let d = pair.dim();
    let opt = optimal_states(pair)?;
    let p_bar = optimal_asp(pair)?;
    let asp_bounds = AspBounds::evaluate(p_bar, d)?;
    let data = overlap_data(pair);
    let direct = DirectQuantities {
        overlap_entropy: overlap_entropy(pair)?,
        norm_sum_a: povm_stats(pair.a()).norm_sum,
        norm_sum_b: povm_stats(pair.b()).norm_sum,
        incompat_upper_direct: incompatibility_bound_direct(pair).ok(),
        uncertainty_lower_direct: uncertainty_from_overlaps(&data),
        mub_flag: is_mub_pair(pair, 1e-9),
        overlap_data: data.clone(),
    };
    let consistency = consistency_check(&asp_bounds, &direct, &data);
    Ok(CertificationReport {
        log_base: LOG_BASE,
        dim: d,
        p_bar,
        asp_bounds,
        direct,
        degeneracy_flags: opt.degenerate,
        consistency,
    })
}
