//! The 2^d -> 1 quantum random access code: average success probability,
//! optimal preparations, and a seesaw optimiser over general POVMs.
//!
//! Two classical dits are encoded in one qudit; the receiver measures
//! {A_i} or {B_j} depending on which dit is requested. The figure of merit
//! is the average success probability (ASP)
//! p = (2 d^2)^{-1} sum_ij tr[rho_ij (A_i + B_j)].

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    check_density_matrix, frobenius_norm, operator_norm, psd_inv_sqrt_with_null, top_eigenpair,
    ComplexMatrix,
};
use crate::measurements::{fourier_mub_pair, random_pair, MeasurementPair, Povm};
use crate::rng::derive_seed;
use crate::serialize::{matrix_to_grid, OperatorGrid};

/// Outer loop stops once the ASP improves by less than this.
const OUTER_IMPROVEMENT_TOL: f64 = 1e-9;

/// Inner fixed-point iterations stop once operators move less than this.
const INNER_CHANGE_TOL: f64 = 1e-10;

/// Cap on fixed-point iterations per measurement update.
const MAX_INNER_ITERS: usize = 50;

/// A proposed measurement update may lower its objective by at most this;
/// otherwise it is rejected and the restart halts.
const DECREASE_GUARD: f64 = 1e-12;

/// Spectral cutoff below which the update normaliser is treated as singular
/// on that direction.
const NORMALISER_CUTOFF: f64 = 1e-12;

/// d x d grid of preparation states rho_ij, outer index i.
pub type StateGrid = Vec<Vec<ComplexMatrix>>;

/// A measurement pair together with a d x d grid of preparation states.
#[derive(Debug, Clone)]
pub struct QracConfiguration {
    pair: MeasurementPair,
    states: StateGrid,
}

impl QracConfiguration {
    /// Validate a configuration: the pair needs d outcomes on each side, the
    /// state grid must be d x d, and every state must be a density matrix.
    pub fn new(pair: MeasurementPair, states: StateGrid) -> Result<Self> {
        let d = pair.dim();
        if !pair.has_square_outcomes() {
            return Err(Error::InvalidParams(format!(
                "the random access code needs d = {d} outcomes on both sides, got {} and {}",
                pair.a().outcomes(),
                pair.b().outcomes()
            )));
        }
        if states.len() != d || states.iter().any(|row| row.len() != d) {
            return Err(Error::DimMismatch {
                expected: d,
                found: states.len(),
            });
        }
        for row in &states {
            for rho in row {
                if rho.dim() != d {
                    return Err(Error::DimMismatch {
                        expected: d,
                        found: rho.dim(),
                    });
                }
                check_density_matrix(rho, 1e-9)?;
            }
        }
        Ok(Self { pair, states })
    }

    pub fn pair(&self) -> &MeasurementPair {
        &self.pair
    }

    pub fn states(&self) -> &StateGrid {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }
}

fn asp_raw(states: &StateGrid, a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    let d = a.len();
    let mut total = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let sum = ai + bj;
            total += (&states[i][j] * &sum).trace_re();
        }
    }
    total / (2.0 * (d * d) as f64)
}

/// Average success probability of a configuration.
pub fn asp(config: &QracConfiguration) -> f64 {
    asp_raw(
        config.states(),
        config.pair.a().operators(),
        config.pair.b().operators(),
    )
}

/// Optimal preparations for a fixed pair: top eigenprojectors of A_i + B_j.
#[derive(Debug, Clone)]
pub struct OptimalStates {
    pub states: StateGrid,
    /// (i, j) entries where the top eigenvalue was degenerate; the
    /// deterministic eigensolver choice is used there.
    pub degenerate: Vec<Vec<bool>>,
}

fn optimal_states_raw(
    a: &[ComplexMatrix],
    b: &[ComplexMatrix],
) -> Result<(StateGrid, Vec<Vec<bool>>)> {
    let mut states = Vec::with_capacity(a.len());
    let mut degenerate = Vec::with_capacity(a.len());
    for ai in a {
        let mut srow = Vec::with_capacity(b.len());
        let mut drow = Vec::with_capacity(b.len());
        for bj in b {
            let top = top_eigenpair(&(ai + bj))?;
            srow.push(ComplexMatrix::projector(&top.eigenvector));
            drow.push(top.degenerate);
        }
        states.push(srow);
        degenerate.push(drow);
    }
    Ok((states, degenerate))
}

/// States maximising the ASP for the given pair.
pub fn optimal_states(pair: &MeasurementPair) -> Result<OptimalStates> {
    require_square(pair)?;
    let (states, degenerate) = optimal_states_raw(pair.a().operators(), pair.b().operators())?;
    Ok(OptimalStates { states, degenerate })
}

fn require_square(pair: &MeasurementPair) -> Result<()> {
    if !pair.has_square_outcomes() {
        return Err(Error::InvalidParams(format!(
            "the random access code needs d = {} outcomes on both sides, got {} and {}",
            pair.dim(),
            pair.a().outcomes(),
            pair.b().outcomes()
        )));
    }
    Ok(())
}

/// Best ASP attainable with the given pair: (2 d^2)^{-1} sum_ij ||A_i + B_j||.
pub fn optimal_asp(pair: &MeasurementPair) -> Result<f64> {
    require_square(pair)?;
    let d = pair.dim();
    let mut total = 0.0;
    for ai in pair.a().operators() {
        for bj in pair.b().operators() {
            total += operator_norm(&(ai + bj));
        }
    }
    Ok(total / (2.0 * (d * d) as f64))
}

/// Parameters of the seesaw optimiser.
#[derive(Debug, Clone)]
pub struct SeesawParams {
    pub dim: usize,
    pub restarts: usize,
    pub max_outer_iters: usize,
    pub seed: u64,
    /// Start restart 0 from the exact computational/Fourier pair instead of
    /// a random pair.
    pub warm_start: bool,
}

impl SeesawParams {
    pub fn new(dim: usize, restarts: usize, max_outer_iters: usize, seed: u64) -> Self {
        Self {
            dim,
            restarts,
            max_outer_iters,
            seed,
            warm_start: false,
        }
    }
}

/// Outcome of a seesaw run.
#[derive(Debug, Clone)]
pub struct SeesawResult {
    pub best_asp: f64,
    pub best_configuration: QracConfiguration,
    pub restarts_run: usize,
    pub iterations_per_restart: Vec<usize>,
    /// Best ASP reached by each restart, in restart order.
    pub restart_asps: Vec<f64>,
    /// True when the winning restart stopped by improvement criterion rather
    /// than by exhausting the iteration budget.
    pub converged: bool,
}

struct RestartOutcome {
    best_asp: f64,
    a: Vec<ComplexMatrix>,
    b: Vec<ComplexMatrix>,
    states: StateGrid,
    iterations: usize,
    converged: bool,
}

fn objective(ops: &[ComplexMatrix], weights: &[ComplexMatrix]) -> f64 {
    ops.iter()
        .zip(weights)
        .map(|(a, r)| (r * a).trace_re())
        .sum()
}

/// One measurement update: the fixed-point iteration
/// A_i <- L^{-1/2} R_i A_i R_i L^{-1/2}, L = sum_i R_i A_i R_i.
///
/// Directions of L below [`NORMALISER_CUTOFF`] are treated as exact nulls
/// and their identity share is split evenly over the outcomes, so every
/// iterate is a POVM by construction. Returns true when a proposed step
/// lowered the objective by more than [`DECREASE_GUARD`]; the step is then
/// rejected and the caller halts the restart.
fn update_povm(ops: &mut Vec<ComplexMatrix>, weights: &[ComplexMatrix]) -> Result<bool> {
    let dim = ops[0].dim();
    let outcomes = ops.len();
    let mut obj = objective(ops, weights);
    for _ in 0..MAX_INNER_ITERS {
        let lifted: Vec<ComplexMatrix> =
            ops.iter().zip(weights).map(|(a, r)| &(r * a) * r).collect();
        let mut normaliser = ComplexMatrix::zeros(dim);
        for m in &lifted {
            normaliser = &normaliser + m;
        }
        let (inv_sqrt, null_proj) = psd_inv_sqrt_with_null(&normaliser, NORMALISER_CUTOFF)?;
        let share = null_proj.scaled(1.0 / outcomes as f64);
        let candidate: Vec<ComplexMatrix> = lifted
            .iter()
            .map(|m| &(&(&inv_sqrt * m) * &inv_sqrt) + &share)
            .collect();
        let cand_obj = objective(&candidate, weights);
        if cand_obj < obj - DECREASE_GUARD {
            return Ok(true);
        }
        let change = candidate
            .iter()
            .zip(ops.iter())
            .map(|(x, y)| frobenius_norm(&(x - y)))
            .fold(0.0f64, f64::max);
        *ops = candidate;
        obj = cand_obj;
        if change < INNER_CHANGE_TOL {
            break;
        }
    }
    Ok(false)
}

fn run_restart(d: usize, max_outer: usize, seed: u64, warm_start: bool) -> Result<RestartOutcome> {
    let init = if warm_start {
        fourier_mub_pair(d)?
    } else {
        random_pair(d, seed)?
    };
    let mut a: Vec<ComplexMatrix> = init.a().operators().to_vec();
    let mut b: Vec<ComplexMatrix> = init.b().operators().to_vec();

    let mut best: Option<RestartOutcome> = None;
    let mut prev = f64::NEG_INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..max_outer {
        iterations += 1;
        let (states, _) = optimal_states_raw(&a, &b)?;
        let p = asp_raw(&states, &a, &b);
        if best.as_ref().is_none_or(|o| p > o.best_asp) {
            best = Some(RestartOutcome {
                best_asp: p,
                a: a.clone(),
                b: b.clone(),
                states: states.clone(),
                iterations,
                converged,
            });
        }
        if p - prev < OUTER_IMPROVEMENT_TOL {
            converged = true;
            break;
        }
        prev = p;

        // Accumulated preparations per requested outcome: row sums feed the
        // first measurement's update, column sums the second's.
        let r_a: Vec<ComplexMatrix> = states
            .iter()
            .map(|row| {
                row.iter()
                    .fold(ComplexMatrix::zeros(d), |acc, rho| &acc + rho)
            })
            .collect();
        let mut r_b = vec![ComplexMatrix::zeros(d); d];
        for row in &states {
            for (j, rho) in row.iter().enumerate() {
                r_b[j] = &r_b[j] + rho;
            }
        }
        let halt_a = update_povm(&mut a, &r_a)?;
        let halt_b = update_povm(&mut b, &r_b)?;
        if halt_a || halt_b {
            converged = true;
            break;
        }
    }

    let mut out = best.expect("at least one outer iteration ran");
    out.iterations = iterations;
    out.converged = converged;
    Ok(out)
}

/// Alternating optimisation of preparations and measurements.
///
/// Restarts are independent, seeded by `derive_seed(seed, restart)`, and may
/// run concurrently; the reported winner is the maximum over restarts (ties
/// to the lowest index), independent of scheduling.
pub fn seesaw_optimize(params: &SeesawParams) -> Result<SeesawResult> {
    if params.dim < 2 {
        return Err(Error::InvalidParams(format!(
            "seesaw needs dimension at least 2, got {}",
            params.dim
        )));
    }
    if params.restarts < 1 || params.max_outer_iters < 1 {
        return Err(Error::InvalidParams(
            "seesaw needs at least one restart and one outer iteration".into(),
        ));
    }

    use rayon::prelude::*;
    let outcomes: Vec<RestartOutcome> = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            run_restart(
                params.dim,
                params.max_outer_iters,
                derive_seed(params.seed, r as u64),
                params.warm_start && r == 0,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut winner = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.best_asp > outcomes[winner].best_asp {
            winner = r;
        }
    }

    let iterations_per_restart: Vec<usize> = outcomes.iter().map(|o| o.iterations).collect();
    let restart_asps: Vec<f64> = outcomes.iter().map(|o| o.best_asp).collect();
    let converged = outcomes[winner].converged;
    let best = &outcomes[winner];

    let pair = MeasurementPair::new(Povm::new(best.a.clone())?, Povm::new(best.b.clone())?)?;
    let best_configuration = QracConfiguration::new(pair, best.states.clone())?;
    Ok(SeesawResult {
        best_asp: best.best_asp,
        best_configuration,
        restarts_run: params.restarts,
        iterations_per_restart,
        restart_asps,
        converged,
    })
}

#[derive(Serialize)]
struct ConfigurationDocument {
    dim: usize,
    #[serde(rename = "A")]
    a: Vec<OperatorGrid>,
    #[serde(rename = "B")]
    b: Vec<OperatorGrid>,
    states: Vec<Vec<OperatorGrid>>,
}

#[derive(Serialize)]
struct SeesawDocument {
    best_asp: f64,
    restarts_run: usize,
    iterations_per_restart: Vec<usize>,
    restart_asps: Vec<f64>,
    converged: bool,
    best_configuration: ConfigurationDocument,
}

/// Serialise a seesaw result to JSON (17 significant digits).
pub fn seesaw_result_to_json(result: &SeesawResult) -> String {
    let config = &result.best_configuration;
    let doc = SeesawDocument {
        best_asp: result.best_asp,
        restarts_run: result.restarts_run,
        iterations_per_restart: result.iterations_per_restart.clone(),
        restart_asps: result.restart_asps.clone(),
        converged: result.converged,
        best_configuration: ConfigurationDocument {
            dim: config.dim(),
            a: config
                .pair()
                .a()
                .operators()
                .iter()
                .map(matrix_to_grid)
                .collect(),
            b: config
                .pair()
                .b()
                .operators()
                .iter()
                .map(matrix_to_grid)
                .collect(),
            states: config
                .states()
                .iter()
                .map(|row| row.iter().map(matrix_to_grid).collect())
                .collect(),
        },
    };
    crate::serialize::to_json(&doc)
}

/// Uniformly mixed states I/d on every grid slot; handy baseline.
pub fn maximally_mixed_states(d: usize) -> StateGrid {
    let rho = ComplexMatrix::identity(d).scaled(1.0 / d as f64);
    vec![vec![rho; d]; d]
}

/// Basis-state grid rho_ij = |i><i|; a valid but generally suboptimal choice.
pub fn computational_states(d: usize) -> StateGrid {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|_| {
                    let mut v = DVector::from_element(d, Complex64::new(0.0, 0.0));
                    v[i] = Complex64::new(1.0, 0.0);
                    ComplexMatrix::projector(&v)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{depolarize, trivial_povm};
    use crate::rng::{random_density, random_unitary, rng_from_seed};
    use proptest::prelude::*;

    const P_Q_2: f64 = 0.853_553_390_593_273_8;

    fn trivial_pair(d: usize) -> MeasurementPair {
        MeasurementPair::new(trivial_povm(d).unwrap(), trivial_povm(d).unwrap()).unwrap()
    }

    #[test]
    fn asp_fourier_with_optimal_states_hits_ideal() {
        let pair = fourier_mub_pair(2).unwrap();
        let opt = optimal_states(&pair).unwrap();
        let config = QracConfiguration::new(pair, opt.states).unwrap();
        assert!((asp(&config) - P_Q_2).abs() < 1e-12);
    }

    #[test]
    fn asp_trivial_pair_is_inverse_dim() {
        for d in 2..=4 {
            let pair = trivial_pair(d);
            let config = QracConfiguration::new(pair, computational_states(d)).unwrap();
            assert!((asp(&config) - 1.0 / d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn asp_mixed_states_is_inverse_dim() {
        let pair = fourier_mub_pair(3).unwrap();
        let config = QracConfiguration::new(pair, maximally_mixed_states(3)).unwrap();
        assert!((asp(&config) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_states_fourier_d2_top_pair() {
        let pair = fourier_mub_pair(2).unwrap();
        let a0 = pair.a().operator(0);
        let b0 = pair.b().operator(0);
        let top = top_eigenpair(&(a0 + b0)).unwrap();
        let expected = 1.0 + std::f64::consts::FRAC_1_SQRT_2;
        assert!((top.eigenvalue - expected).abs() < 1e-12);
        assert!(!top.degenerate);

        let opt = optimal_states(&pair).unwrap();
        let rho = &opt.states[0][0];
        // The projector reproduces the eigenvalue as tr[rho (A_0 + B_0)].
        let val = (rho * &(a0 + b0)).trace_re();
        assert!((val - expected).abs() < 1e-12);
    }

    #[test]
    fn optimal_states_same_basis_picks_that_basis() {
        let pair = fourier_mub_pair(3).unwrap();
        let same = MeasurementPair::new(pair.a().clone(), pair.a().clone()).unwrap();
        let opt = optimal_states(&same).unwrap();
        for i in 0..3 {
            assert!(!opt.degenerate[i][i]);
            let diff = frobenius_norm(&(&opt.states[i][i] - pair.a().operator(i)));
            assert!(diff < 1e-9, "diff {diff}");
        }
    }

    #[test]
    fn optimal_states_trivial_pair_all_degenerate() {
        let opt = optimal_states(&trivial_pair(3)).unwrap();
        assert!(opt.degenerate.iter().flatten().all(|&f| f));
    }

    #[test]
    fn optimal_asp_matches_state_evaluation() {
        for seed in [1u64, 2, 3] {
            let pair = random_pair(3, seed).unwrap();
            let p = optimal_asp(&pair).unwrap();
            let opt = optimal_states(&pair).unwrap();
            let config = QracConfiguration::new(pair, opt.states).unwrap();
            assert!((p - asp(&config)).abs() < 1e-9);
        }
    }

    #[test]
    fn optimal_asp_fourier_matches_closed_form() {
        for d in 2..=9 {
            let pair = fourier_mub_pair(d).unwrap();
            let expected = 0.5 * (1.0 + 1.0 / (d as f64).sqrt());
            assert!(
                (optimal_asp(&pair).unwrap() - expected).abs() < 1e-9,
                "d = {d}"
            );
        }
    }

    #[test]
    fn optimal_asp_depolarized_closed_form() {
        let pair = fourier_mub_pair(4).unwrap();
        let noisy = MeasurementPair::new(
            depolarize(pair.a(), 0.9).unwrap(),
            depolarize(pair.b(), 0.9).unwrap(),
        )
        .unwrap();
        assert!((optimal_asp(&noisy).unwrap() - 0.7).abs() < 1e-9);
    }

    #[test]
    fn configuration_rejects_bad_states() {
        let pair = fourier_mub_pair(2).unwrap();
        // Wrong grid shape.
        let states = vec![vec![ComplexMatrix::identity(2).scaled(0.5); 2]];
        assert!(QracConfiguration::new(pair.clone(), states).is_err());
        // Not a density matrix (trace 2).
        let states = vec![vec![ComplexMatrix::identity(2); 2]; 2];
        assert!(QracConfiguration::new(pair.clone(), states).is_err());
        // Outcome count mismatch with the code dimension.
        let lop_sided = MeasurementPair::new(
            trivial_povm(2).unwrap(),
            Povm::new(vec![ComplexMatrix::identity(2)]).unwrap(),
        )
        .unwrap();
        assert!(QracConfiguration::new(lop_sided, maximally_mixed_states(2)).is_err());
    }

    #[test]
    fn seesaw_rejects_bad_params() {
        assert!(seesaw_optimize(&SeesawParams::new(1, 10, 10, 0)).is_err());
        assert!(seesaw_optimize(&SeesawParams::new(2, 0, 10, 0)).is_err());
    }

    #[test]
    fn seesaw_is_deterministic() {
        let params = SeesawParams::new(2, 1, 40, 9);
        let a = seesaw_optimize(&params).unwrap();
        let b = seesaw_optimize(&params).unwrap();
        assert_eq!(a.best_asp.to_bits(), b.best_asp.to_bits());
        assert_eq!(seesaw_result_to_json(&a), seesaw_result_to_json(&b));
    }

    #[test]
    fn seesaw_warm_start_stays_at_optimum() {
        let mut params = SeesawParams::new(2, 1, 50, 1);
        params.warm_start = true;
        let res = seesaw_optimize(&params).unwrap();
        assert!((res.best_asp - P_Q_2).abs() < 1e-9, "asp {}", res.best_asp);
        assert!(res.iterations_per_restart[0] <= 2);
        assert!(res.converged);
    }

    #[test]
    fn seesaw_short_run_reaches_near_optimum_d2() {
        let res = seesaw_optimize(&SeesawParams::new(2, 6, 150, 7)).unwrap();
        assert!(res.best_asp <= P_Q_2 + 1e-7);
        assert!(res.best_asp >= P_Q_2 - 1e-3, "asp {}", res.best_asp);
        assert!((asp(&res.best_configuration) - res.best_asp).abs() < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn asp_never_beats_optimal(seed in 0u64..3_000, d in 2usize..4) {
            let pair = random_pair(d, seed).unwrap();
            let bound = optimal_asp(&pair).unwrap();
            let mut rng = rng_from_seed(derive_seed(seed, 99));
            let states: Vec<Vec<ComplexMatrix>> = (0..d)
                .map(|_| (0..d).map(|_| random_density(d, &mut rng)).collect())
                .collect();
            let config = QracConfiguration::new(pair, states).unwrap();
            prop_assert!(asp(&config) <= bound + 1e-9);
        }

        #[test]
        fn optimal_asp_never_beats_ideal(seed in 0u64..3_000, d in 2usize..5) {
            let pair = random_pair(d, seed).unwrap();
            let p_q = 0.5 * (1.0 + 1.0 / (d as f64).sqrt());
            prop_assert!(optimal_asp(&pair).unwrap() <= p_q + 1e-9);
        }

        #[test]
        fn optimal_asp_unitary_invariant(seed in 0u64..3_000, d in 2usize..4) {
            let pair = random_pair(d, seed).unwrap();
            let u = random_unitary(d, &mut rng_from_seed(derive_seed(seed, 7)));
            let conj = |p: &Povm| {
                let ops = p
                    .operators()
                    .iter()
                    .map(|op| &(&u * op) * &u.adjoint())
                    .collect();
                Povm::new(ops).unwrap()
            };
            let rotated = MeasurementPair::new(conj(pair.a()), conj(pair.b())).unwrap();
            let p0 = optimal_asp(&pair).unwrap();
            let p1 = optimal_asp(&rotated).unwrap();
            prop_assert!((p0 - p1).abs() < 1e-9);
        }
    }
}
