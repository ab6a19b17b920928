//! POVM data model, the computational/Fourier mutually unbiased pair,
//! depolarising noise, and pairwise overlap quantities.
//!
//! A [`Povm`] is validated on construction and never silently repaired:
//! certification semantics demand honest inputs. All overlap quantities are
//! computed from their definitions rather than analytic shortcuts, so the
//! special values for mutually unbiased bases emerge in tests instead of
//! being baked in.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_norm, hermitian_eigen, operator_norm, psd_sqrt, ComplexMatrix, HERMITIAN_TOL, PSD_TOL,
};
use crate::rng::{ginibre, rng_from_seed};
use crate::serialize::{grid_to_matrix, matrix_to_grid, OperatorGrid};

/// Frobenius tolerance on the completeness relation sum = identity.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// Tolerance used by the rank-1 projectivity test.
pub const PROJECTIVE_TOL: f64 = 1e-9;

/// A positive-operator-valued measure: a dimension plus an ordered list of
/// PSD operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl Povm {
    /// Validate a candidate list of operators into a POVM.
    ///
    /// Checks, in order: non-empty, matching dimensions, Hermiticity of each
    /// operator, positivity of each operator (eigenvalues at least
    /// -[`PSD_TOL`]), and completeness within [`COMPLETENESS_TOL`] in
    /// Frobenius norm.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::InvalidParams(
            "a POVM needs at least one operator".into(),
        ))?;
        let dim = first.dim();
        for op in &operators {
            if op.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            if !op.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::NotHermitian {
                    defect: op.hermitian_defect(),
                    tol: HERMITIAN_TOL * frobenius_norm(op).max(1.0),
                });
            }
            let eig = hermitian_eigen(op)?;
            let min = eig
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if min < -PSD_TOL {
                return Err(Error::NotPsd {
                    eigenvalue: min,
                    tol: PSD_TOL,
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(dim);
        for op in &operators {
            sum = &sum + op;
        }
        let deviation = frobenius_norm(&(&sum - &ComplexMatrix::identity(dim)));
        if deviation > COMPLETENESS_TOL {
            return Err(Error::NotComplete { deviation });
        }
        Ok(Self { dim, operators })
    }

    /// Construction bypass for internal code paths that preserve the
    /// invariants structurally (noise maps, congruence updates).
    pub(crate) fn new_unchecked(dim: usize, operators: Vec<ComplexMatrix>) -> Self {
        Self { dim, operators }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn operator(&self, i: usize) -> &ComplexMatrix {
        &self.operators[i]
    }
}

/// Two POVMs of equal dimension; the object being certified.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPair {
    a: Povm,
    b: Povm,
}

impl MeasurementPair {
    pub fn new(a: Povm, b: Povm) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &Povm {
        &self.a
    }

    pub fn b(&self) -> &Povm {
        &self.b
    }

    /// True when both POVMs have exactly `dim` outcomes, the shape required
    /// by the random access code.
    pub fn has_square_outcomes(&self) -> bool {
        self.a.outcomes() == self.dim() && self.b.outcomes() == self.dim()
    }
}

/// Pairwise overlap quantities of a measurement pair.
///
/// `t[i][j] = tr(A_i B_j)` is the trace overlap, `s[i][j] = ||sqrt(A_i)
/// sqrt(B_j)||` the generalised overlap, and `n[i][j] = 1 - (||A_i|| +
/// ||B_j||)/2` the norm deficiency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapData {
    pub t: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub n: Vec<Vec<f64>>,
}

impl OverlapData {
    pub fn t_sum(&self) -> f64 {
        self.t.iter().flatten().sum()
    }

    pub fn s_min(&self) -> f64 {
        self.s
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn s_max(&self) -> f64 {
        self.s
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The computational/Fourier pair: A is the computational basis, B the
/// discrete Fourier basis |b_j> = d^{-1/2} sum_k exp(2πi jk/d) |k>.
///
/// The pair is mutually unbiased in every dimension d >= 2, no prime-power
/// machinery required.
pub fn fourier_mub_pair(d: usize) -> Result<MeasurementPair> {
    if d < 2 {
        return Err(Error::InvalidDim {
            dim: d,
            reason: "a mutually unbiased pair needs dimension at least 2",
        });
    }
    let mut a_ops = Vec::with_capacity(d);
    for i in 0..d {
        let op = ComplexMatrix::from_fn(d, |r, c| {
            if r == i && c == i {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })?;
        a_ops.push(op);
    }
    let mut b_ops = Vec::with_capacity(d);
    for j in 0..d {
        // (B_j)_{kl} = omega^{j(k-l)} / d, with the angle reduced mod d
        // before the trig call to keep entries accurate for larger d.
        let op = ComplexMatrix::from_fn(d, |k, l| {
            let e = (j * k) % d + d - (j * l) % d;
            let angle = std::f64::consts::TAU * ((e % d) as f64) / d as f64;
            Complex64::new(angle.cos() / d as f64, angle.sin() / d as f64)
        })?;
        b_ops.push(op);
    }
    MeasurementPair::new(Povm::new(a_ops)?, Povm::new(b_ops)?)
}

/// The trivial d-outcome POVM with every operator I/d.
pub fn trivial_povm(d: usize) -> Result<Povm> {
    if d < 1 {
        return Err(Error::InvalidDim {
            dim: d,
            reason: "dimension must be at least 1",
        });
    }
    let op = ComplexMatrix::identity(d).scaled(1.0 / d as f64);
    Povm::new(vec![op; d])
}

fn rank1_projective(povm: &Povm, tol: f64) -> bool {
    povm.operators().iter().all(|op| {
        let idempotency = frobenius_norm(&(&(op * op) - op));
        idempotency <= tol && (op.trace_re() - 1.0).abs() <= tol
    })
}

/// True iff both POVMs are rank-1 projective and all trace overlaps equal
/// 1/d within `tol`. Requires d outcomes on each side.
pub fn is_mub_pair(pair: &MeasurementPair, tol: f64) -> bool {
    let d = pair.dim();
    if !pair.has_square_outcomes() {
        return false;
    }
    if !rank1_projective(pair.a(), tol) || !rank1_projective(pair.b(), tol) {
        return false;
    }
    let data = overlap_data(pair);
    data.t
        .iter()
        .flatten()
        .all(|&t| (t - 1.0 / d as f64).abs() <= tol)
}

/// Depolarising noise A_i -> eta A_i + (1 - eta) tr(A_i) I/d.
pub fn depolarize(povm: &Povm, eta: f64) -> Result<Povm> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange { eta });
    }
    let d = povm.dim();
    let ops = povm
        .operators()
        .iter()
        .map(|op| {
            let iso = ComplexMatrix::identity(d).scaled(op.trace_re() * (1.0 - eta) / d as f64);
            &op.scaled(eta) + &iso
        })
        .collect();
    // The map preserves Hermiticity, positivity and completeness exactly.
    Ok(Povm::new_unchecked(d, ops))
}

/// Convex mixture lambda P + (1 - lambda) Q of two POVMs with matching
/// shape; again a valid POVM by construction.
pub fn mix_povms(p: &Povm, q: &Povm, lambda: f64) -> Result<Povm> {
    if p.dim() != q.dim() {
        return Err(Error::DimMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if p.outcomes() != q.outcomes() {
        return Err(Error::DimMismatch {
            expected: p.outcomes(),
            found: q.outcomes(),
        });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::OutOfRange {
            quantity: "lambda",
            value: lambda,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let ops = p
        .operators()
        .iter()
        .zip(q.operators())
        .map(|(x, y)| &x.scaled(lambda) + &y.scaled(1.0 - lambda))
        .collect();
    Ok(Povm::new_unchecked(p.dim(), ops))
}

/// All pairwise overlap quantities of a pair.
pub fn overlap_data(pair: &MeasurementPair) -> OverlapData {
    let sqrt_a: Vec<ComplexMatrix> = pair
        .a()
        .operators()
        .iter()
        .map(|op| psd_sqrt(op).expect("validated POVM operators are PSD"))
        .collect();
    let sqrt_b: Vec<ComplexMatrix> = pair
        .b()
        .operators()
        .iter()
        .map(|op| psd_sqrt(op).expect("validated POVM operators are PSD"))
        .collect();
    let norms_a: Vec<f64> = pair.a().operators().iter().map(operator_norm).collect();
    let norms_b: Vec<f64> = pair.b().operators().iter().map(operator_norm).collect();

    let mut t = Vec::with_capacity(pair.a().outcomes());
    let mut s = Vec::with_capacity(pair.a().outcomes());
    let mut n = Vec::with_capacity(pair.a().outcomes());
    for (i, ai) in pair.a().operators().iter().enumerate() {
        let mut t_row = Vec::with_capacity(pair.b().outcomes());
        let mut s_row = Vec::with_capacity(pair.b().outcomes());
        let mut n_row = Vec::with_capacity(pair.b().outcomes());
        for (j, bj) in pair.b().operators().iter().enumerate() {
            t_row.push((ai * bj).trace_re());
            s_row.push(operator_norm(&(&sqrt_a[i] * &sqrt_b[j])));
            n_row.push(1.0 - 0.5 * (norms_a[i] + norms_b[j]));
        }
        t.push(t_row);
        s.push(s_row);
        n.push(n_row);
    }
    OverlapData { t, s, n }
}

/// Per-POVM summary statistics.
#[derive(Debug, Clone, Serialize)]
pub struct PovmStats {
    /// N(A) = sum of operator norms; equals the outcome count iff the
    /// measurement is rank-1 projective.
    pub norm_sum: f64,
    pub traces: Vec<f64>,
    pub norms: Vec<f64>,
    pub rank1_projective: bool,
}

pub fn povm_stats(povm: &Povm) -> PovmStats {
    let norms: Vec<f64> = povm.operators().iter().map(operator_norm).collect();
    let traces: Vec<f64> = povm.operators().iter().map(|op| op.trace_re()).collect();
    PovmStats {
        norm_sum: norms.iter().sum(),
        traces,
        norms,
        rank1_projective: rank1_projective(povm, PROJECTIVE_TOL),
    }
}

/// Random POVM from the Ginibre ensemble: A_i = S^{-1/2} G_i S^{-1/2} with
/// G_i = M_i M_i† and S the sum of the G_i.
///
/// Deterministic in the seed; full support with probability 1. Errors with
/// [`Error::DegenerateSample`] when S is numerically singular (regenerating
/// with a fresh seed is the caller's job).
pub fn random_povm(d: usize, outcomes: usize, seed: u64) -> Result<Povm> {
    if d < 1 || outcomes < 1 {
        return Err(Error::InvalidParams(
            "dimension and outcome count must be at least 1".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let g: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let m = ginibre(d, &mut rng);
            ComplexMatrix::from_dmatrix(&m * m.adjoint()).expect("Gaussian entries are finite")
        })
        .collect();
    let mut s = ComplexMatrix::zeros(d);
    for gi in &g {
        s = &s + gi;
    }
    let eig = hermitian_eigen(&s)?;
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < 1e-12 {
        return Err(Error::DegenerateSample { eigenvalue: min });
    }
    let inv_roots = nalgebra::DVector::from_iterator(
        d,
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::new(1.0 / l.sqrt(), 0.0)),
    );
    let s_inv_sqrt = ComplexMatrix::from_dmatrix(
        &eig.vectors * nalgebra::DMatrix::from_diagonal(&inv_roots) * eig.vectors.adjoint(),
    )?;
    let ops: Vec<ComplexMatrix> = g
        .iter()
        .map(|gi| &(&s_inv_sqrt * gi) * &s_inv_sqrt)
        .collect();
    Povm::new(ops)
}

/// [`random_povm`], retrying degenerate samples with derived fresh seeds.
/// Degeneracy has probability zero in exact arithmetic, so the retry loop
/// is bounded and the last attempt propagates its error.
pub fn random_povm_with_retry(d: usize, outcomes: usize, seed: u64) -> Result<Povm> {
    for attempt in 0..15 {
        match random_povm(d, outcomes, crate::rng::derive_seed(seed, attempt)) {
            Err(Error::DegenerateSample { .. }) => continue,
            other => return other,
        }
    }
    random_povm(d, outcomes, crate::rng::derive_seed(seed, 15))
}

/// Draw a random pair of d-outcome POVMs from two derived sub-seeds.
pub fn random_pair(d: usize, seed: u64) -> Result<MeasurementPair> {
    let a = random_povm_with_retry(d, d, crate::rng::derive_seed(seed, 0xA))?;
    let b = random_povm_with_retry(d, d, crate::rng::derive_seed(seed, 0xB))?;
    MeasurementPair::new(a, b)
}

/// Measurement-pair wire format: { "dim": d, "A": [op, ...], "B": [op, ...] }
/// with each op a dim x dim row-major grid of [re, im] pairs.
#[derive(Serialize, Deserialize)]
struct PairDocument {
    dim: usize,
    #[serde(rename = "A")]
    a: Vec<OperatorGrid>,
    #[serde(rename = "B")]
    b: Vec<OperatorGrid>,
}

/// Serialise a pair to the JSON wire format (17 significant digits).
pub fn pair_to_json(pair: &MeasurementPair) -> String {
    let doc = PairDocument {
        dim: pair.dim(),
        a: pair.a().operators().iter().map(matrix_to_grid).collect(),
        b: pair.b().operators().iter().map(matrix_to_grid).collect(),
    };
    crate::serialize::to_json(&doc)
}

/// Parse and validate a pair from the JSON wire format.
///
/// `origin` names the source (a file path, or a placeholder when parsing
/// from memory) for error context.
pub fn pair_from_json(text: &str, origin: &str) -> Result<MeasurementPair> {
    let doc: PairDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    let to_povm = |grids: &[OperatorGrid], which: &str| -> Result<Povm> {
        let ops = grids
            .iter()
            .map(grid_to_matrix)
            .collect::<Result<Vec<_>>>()?;
        for op in &ops {
            if op.dim() != doc.dim {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    message: format!(
                        "operator in {which} has dimension {} but the document declares {}",
                        op.dim(),
                        doc.dim
                    ),
                });
            }
        }
        Povm::new(ops)
    };
    MeasurementPair::new(to_povm(&doc.a, "A")?, to_povm(&doc.b, "B")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis_projector(d: usize, k: usize) -> ComplexMatrix {
        let mut v = DVector::from_element(d, c(0.0, 0.0));
        v[k] = c(1.0, 0.0);
        ComplexMatrix::projector(&v)
    }

    #[test]
    fn validate_accepts_projective_basis() {
        let povm = Povm::new(vec![basis_projector(2, 0), basis_projector(2, 1)]);
        assert!(povm.is_ok());
    }

    #[test]
    fn validate_accepts_trivial() {
        let half = ComplexMatrix::identity(2).scaled(0.5);
        assert!(Povm::new(vec![half.clone(), half]).is_ok());
    }

    #[test]
    fn validate_rejects_incomplete() {
        let p = basis_projector(2, 0);
        assert!(matches!(
            Povm::new(vec![p.clone(), p]),
            Err(Error::NotComplete { .. })
        ));
    }

    #[test]
    fn fourier_pair_is_mub() {
        for d in 2..=5 {
            let pair = fourier_mub_pair(d).unwrap();
            assert!(is_mub_pair(&pair, 1e-9), "d = {d}");
            let data = overlap_data(&pair);
            for row in &data.t {
                for &t in row {
                    assert!((t - 1.0 / d as f64).abs() < 1e-12, "d = {d}, t = {t}");
                }
            }
        }
    }

    #[test]
    fn fourier_pair_d2_is_plus_minus_basis() {
        let pair = fourier_mub_pair(2).unwrap();
        let plus = pair.b().operator(0);
        for i in 0..2 {
            for j in 0..2 {
                assert!((plus.entry(i, j) - c(0.5, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn fourier_rejects_dim_below_two() {
        assert!(matches!(fourier_mub_pair(1), Err(Error::InvalidDim { .. })));
    }

    #[test]
    fn trivial_pair_is_not_mub() {
        let pair =
            MeasurementPair::new(trivial_povm(2).unwrap(), trivial_povm(2).unwrap()).unwrap();
        assert!(!is_mub_pair(&pair, 1e-9));
    }

    #[test]
    fn depolarized_pair_is_not_mub() {
        let pair = fourier_mub_pair(3).unwrap();
        let noisy = MeasurementPair::new(
            depolarize(pair.a(), 0.9).unwrap(),
            depolarize(pair.b(), 0.9).unwrap(),
        )
        .unwrap();
        assert!(!is_mub_pair(&noisy, 1e-9));
    }

    #[test]
    fn depolarize_identity_and_full_noise() {
        let pair = fourier_mub_pair(3).unwrap();
        let same = depolarize(pair.a(), 1.0).unwrap();
        for (x, y) in same.operators().iter().zip(pair.a().operators()) {
            assert!(frobenius_norm(&(x - y)) < 1e-15);
        }
        let flat = depolarize(pair.a(), 0.0).unwrap();
        let trivial = trivial_povm(3).unwrap();
        for (x, y) in flat.operators().iter().zip(trivial.operators()) {
            assert!(frobenius_norm(&(x - y)) < 1e-15);
        }
    }

    #[test]
    fn depolarize_rejects_bad_eta() {
        let pair = fourier_mub_pair(2).unwrap();
        assert!(matches!(
            depolarize(pair.a(), 1.5),
            Err(Error::EtaOutOfRange { .. })
        ));
    }

    #[test]
    fn depolarize_composes_multiplicatively() {
        let pair = fourier_mub_pair(3).unwrap();
        let twice = depolarize(&depolarize(pair.a(), 0.8).unwrap(), 0.5).unwrap();
        let once = depolarize(pair.a(), 0.4).unwrap();
        for (x, y) in twice.operators().iter().zip(once.operators()) {
            for i in 0..3 {
                for j in 0..3 {
                    assert!((x.entry(i, j) - y.entry(i, j)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn overlap_data_fourier_values() {
        for d in [2usize, 4] {
            let pair = fourier_mub_pair(d).unwrap();
            let data = overlap_data(&pair);
            let inv_sqrt_d = 1.0 / (d as f64).sqrt();
            for i in 0..d {
                for j in 0..d {
                    assert!((data.t[i][j] - 1.0 / d as f64).abs() < 1e-10);
                    assert!((data.s[i][j] - inv_sqrt_d).abs() < 1e-9);
                    assert!(data.n[i][j].abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn overlap_data_trivial_values() {
        let pair =
            MeasurementPair::new(trivial_povm(2).unwrap(), trivial_povm(2).unwrap()).unwrap();
        let data = overlap_data(&pair);
        for i in 0..2 {
            for j in 0..2 {
                assert!((data.t[i][j] - 0.5).abs() < 1e-12);
                assert!((data.s[i][j] - 0.5).abs() < 1e-9);
                assert!((data.n[i][j] - 0.5).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn povm_stats_examples() {
        let pair = fourier_mub_pair(4).unwrap();
        let stats = povm_stats(pair.a());
        assert!((stats.norm_sum - 4.0).abs() < 1e-9);
        assert!(stats.rank1_projective);

        let trivial = trivial_povm(4).unwrap();
        let stats = povm_stats(&trivial);
        assert!((stats.norm_sum - 1.0).abs() < 1e-12);
        assert!(!stats.rank1_projective);

        // Depolarised projective POVM: per-operator norm eta + (1-eta)/d.
        let eta = 0.7;
        let noisy = depolarize(pair.a(), eta).unwrap();
        let stats = povm_stats(&noisy);
        let expected = 4.0 * eta + 1.0 - eta;
        assert!((stats.norm_sum - expected).abs() < 1e-9);
    }

    #[test]
    fn random_povm_is_deterministic_and_valid() {
        let p1 = random_povm(3, 3, 42).unwrap();
        let p2 = random_povm(3, 3, 42).unwrap();
        assert_eq!(p1, p2);
        for seed in 0..1000 {
            let p = random_povm(3, 3, seed).unwrap();
            // Re-validate through the public constructor.
            assert!(Povm::new(p.operators().to_vec()).is_ok(), "seed {seed}");
        }
    }

    #[test]
    fn random_povm_single_outcome_is_identity() {
        let p = random_povm(3, 1, 5).unwrap();
        let defect = frobenius_norm(&(&p.operators()[0] - &ComplexMatrix::identity(3)));
        assert!(defect < 1e-10);
    }

    #[test]
    fn pair_json_round_trip() {
        let pair = fourier_mub_pair(3).unwrap();
        let text = pair_to_json(&pair);
        let back = pair_from_json(&text, "<memory>").unwrap();
        assert_eq!(pair, back);
    }

    #[test]
    fn pair_json_rejects_garbage() {
        assert!(matches!(
            pair_from_json("{ not json", "<memory>"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn pair_json_rejects_invalid_povm() {
        let pair = fourier_mub_pair(2).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&pair_to_json(&pair)).unwrap();
        doc["A"][0][0][0][0] = serde_json::json!(5.0);
        let res = pair_from_json(&doc.to_string(), "<memory>");
        assert!(res.is_err());
    }

    #[test]
    fn mub_pair_holds_up_to_dim_16() {
        for d in 2..=16 {
            assert!(is_mub_pair(&fourier_mub_pair(d).unwrap(), 1e-9), "d = {d}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_pair_overlap_invariants(seed in 0u64..5_000, d in 2usize..5) {
            let pair = random_pair(d, seed).unwrap();
            let data = overlap_data(&pair);
            // Completeness forces the trace overlaps to sum to d.
            prop_assert!((data.t_sum() - d as f64).abs() < 1e-8);
            for i in 0..d {
                for j in 0..d {
                    prop_assert!(data.t[i][j] >= -1e-10);
                    prop_assert!(data.s[i][j] >= -1e-10 && data.s[i][j] <= 1.0 + 1e-10);
                    prop_assert!(data.n[i][j] >= -1e-10 && data.n[i][j] <= 1.0 + 1e-10);
                    // Generalised overlap below the Frobenius bound.
                    prop_assert!(data.s[i][j] <= data.t[i][j].max(0.0).sqrt() + 1e-8);
                }
            }
        }

        #[test]
        fn norm_sum_bounded_by_outcomes_and_dim(
            seed in 0u64..5_000,
            d in 2usize..5,
            outcomes in 1usize..7,
        ) {
            let povm = random_povm(d, outcomes, seed).unwrap();
            let stats = povm_stats(&povm);
            prop_assert!(stats.norm_sum <= (d.min(outcomes)) as f64 + 1e-9);
            prop_assert!(stats.norm_sum > 0.0);
            // Equality with d certifies rank-1 projectivity.
            if outcomes == d && stats.norm_sum > d as f64 - 1e-9 {
                prop_assert!(stats.rank1_projective);
            }
        }
    }
}
