//! Dense complex-matrix primitives: Hermitian eigendecomposition, norms,
//! PSD square roots and the numerical radius.
//!
//! Everything downstream operates on small matrices (dimension below ~20),
//! so all routines are dense and allocate freely. Tolerances are explicit
//! constants; callers that need different margins pass them in.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues no lower than `-PSD_TOL` count as numerically PSD; anything
/// more negative is rejected rather than repaired.
pub const PSD_TOL: f64 = 1e-9;

/// Top-eigenvalue gaps below this are flagged as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Number of coarse grid points used by [`numerical_radius`].
const RADIUS_GRID: usize = 720;

/// Angular resolution of the golden-section refinement in [`numerical_radius`].
const RADIUS_THETA_TOL: f64 = 1e-10;

/// Dense square matrix of complex double-precision values.
///
/// The universal carrier for operators, projectors and states. Construction
/// enforces squareness, dimension at least 1 and finite entries; everything
/// else (Hermiticity, positivity, ...) is checked by the operations that
/// need it.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Wrap an nalgebra matrix, validating the type invariants.
    pub fn from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimMismatch {
                expected: data.nrows(),
                found: data.ncols(),
            });
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidDim {
                dim: 0,
                reason: "matrices must have dimension at least 1",
            });
        }
        for i in 0..data.nrows() {
            for j in 0..data.ncols() {
                let z = data[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { data })
    }

    /// Build from row-major nested slices.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        let data = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        Self::from_dmatrix(data)
    }

    /// Build entrywise from a closure over (row, col).
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(dim: usize, f: F) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_fn(dim, dim, f))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            data: DMatrix::identity(dim, dim),
        }
    }

    /// Diagonal matrix with real entries.
    pub fn diag_real(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "dimension must be at least 1");
        let v =
            DVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)));
        Self {
            data: DMatrix::from_diagonal(&v),
        }
    }

    /// Rank-1 projector |v><v| onto a (not necessarily normalised) vector.
    pub fn projector(v: &DVector<Complex64>) -> Self {
        let n = v.norm();
        assert!(n > 0.0, "cannot project onto the zero vector");
        let u = v.unscale(n);
        Self {
            data: &u * u.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Real part of the trace; the whole trace for Hermitian matrices.
    pub fn trace_re(&self) -> f64 {
        self.data.trace().re
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.scale(factor),
        }
    }

    /// Frobenius distance to the own adjoint.
    pub fn hermitian_defect(&self) -> f64 {
        (&self.data - self.data.adjoint()).norm()
    }

    /// Hermitian within `tol` relative to max(1, Frobenius norm).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.data.norm().max(1.0)
    }

    /// (M + M†)/2; used to symmetrise before eigendecomposition.
    pub fn hermitian_part(&self) -> Self {
        Self {
            data: (&self.data + self.data.adjoint()).scale(0.5),
        }
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted in non-decreasing order; the k-th column
/// of `vectors` is a unit eigenvector for the k-th eigenvalue, with the first
/// sufficiently large component made real positive so the output is
/// deterministic for identical input.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn eigenvector(&self, k: usize) -> DVector<Complex64> {
        self.vectors.column(k).into_owned()
    }
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct TopEigenpair {
    pub eigenvalue: f64,
    pub eigenvector: DVector<Complex64>,
    /// True when the next eigenvalue is within [`DEGENERACY_TOL`] of the top.
    pub degenerate: bool,
}

fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    let defect = m.hermitian_defect();
    let tol = HERMITIAN_TOL * m.as_dmatrix().norm().max(1.0);
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    Ok(())
}

/// Fix the global phase of each column: first component with modulus above
/// 1e-8 (a unit vector always has one) is rotated onto the positive real axis.
fn fix_phases(vectors: &mut DMatrix<Complex64>) {
    for j in 0..vectors.ncols() {
        let mut phase = None;
        for i in 0..vectors.nrows() {
            let z = vectors[(i, j)];
            if z.norm() > 1e-8 {
                phase = Some(z.conj() / z.norm());
                break;
            }
        }
        if let Some(p) = phase {
            let mut col = vectors.column_mut(j);
            col *= p;
        }
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// Errors with [`Error::NotHermitian`] when the input fails the relative
/// Hermiticity test; the matrix is symmetrised before decomposition so the
/// result is exactly Hermitian-consistent.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    ensure_hermitian(m)?;
    let h = m.hermitian_part();
    let eig = h.data.symmetric_eigen();
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    fix_phases(&mut vectors);
    Ok(HermitianEigen {
        eigenvalues,
        vectors,
    })
}

/// Largest eigenvalue of a Hermitian matrix, eigenvalues only.
///
/// Closed form for dimensions 1 and 2; tridiagonalisation otherwise.
pub(crate) fn lambda_max_hermitian(h: &DMatrix<Complex64>) -> f64 {
    match h.nrows() {
        1 => h[(0, 0)].re,
        2 => {
            let a = h[(0, 0)].re;
            let c = h[(1, 1)].re;
            let b = h[(0, 1)];
            let mid = 0.5 * (a + c);
            let rad = ((0.5 * (a - c)).powi(2) + b.norm_sqr()).sqrt();
            mid + rad
        }
        _ => h
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Operator norm (largest singular value), computed as the square root of
/// the largest eigenvalue of M†M.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    let g = m.data.adjoint() * &m.data;
    lambda_max_hermitian(&g).max(0.0).sqrt()
}

/// Frobenius norm: l2 norm of the entries.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.data.norm()
}

/// PSD square root V Λ^{1/2} V†.
///
/// Eigenvalues in [-[`PSD_TOL`], 0] are clamped to 0 (rounding noise);
/// anything more negative is an error, not silently repaired.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).expect("finite"))
    {
        if min < -PSD_TOL {
            return Err(Error::NotPsd {
                eigenvalue: min,
                tol: PSD_TOL,
            });
        }
    }
    let roots = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)),
    );
    let data = &eig.vectors * DMatrix::from_diagonal(&roots) * eig.vectors.adjoint();
    Ok(ComplexMatrix { data })
}

/// Inverse square root on the range, treating eigenvalues below `cutoff` as
/// exactly zero. Returns the inverse root together with the projector onto
/// the discarded null space.
pub(crate) fn psd_inv_sqrt_with_null(
    m: &ComplexMatrix,
    cutoff: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = hermitian_eigen(m)?;
    let n = m.dim();
    let inv_roots = DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&l| {
            if l >= cutoff {
                Complex64::new(1.0 / l.sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
    );
    let inv = &eig.vectors * DMatrix::from_diagonal(&inv_roots) * eig.vectors.adjoint();
    let mut null = DMatrix::zeros(n, n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l < cutoff {
            let v = eig.vectors.column(k);
            null += v * v.adjoint();
        }
    }
    Ok((ComplexMatrix { data: inv }, ComplexMatrix { data: null }))
}

/// Largest eigenvalue with a unit eigenvector of a Hermitian matrix.
///
/// Phase convention as in [`hermitian_eigen`]; when the top eigenvalue is
/// degenerate within [`DEGENERACY_TOL`] the decomposition's deterministic
/// choice is returned and the pair is flagged.
pub fn top_eigenpair(m: &ComplexMatrix) -> Result<TopEigenpair> {
    let eig = hermitian_eigen(m)?;
    let n = m.dim();
    let top = eig.eigenvalues[n - 1];
    let degenerate = n >= 2 && (top - eig.eigenvalues[n - 2]).abs() < DEGENERACY_TOL;
    Ok(TopEigenpair {
        eigenvalue: top,
        eigenvector: eig.eigenvector(n - 1),
        degenerate,
    })
}

/// Numerical radius w(O) = max_θ λ_max((e^{iθ} O + e^{-iθ} O†)/2).
///
/// Coarse 720-point grid over [0, 2π) followed by golden-section refinement
/// of the best bracket down to 1e-10 in θ. The result underestimates the
/// true radius by at most the grid/refinement resolution, which keeps every
/// inequality test that consumes it one-sided.
pub fn numerical_radius(o: &ComplexMatrix) -> f64 {
    let h = (&o.data + o.data.adjoint()).scale(0.5);
    let k = (&o.data - o.data.adjoint()).scale(0.5) * Complex64::new(0.0, 1.0);
    let eval = |theta: f64| -> f64 {
        let m = h.scale(theta.cos()) + k.scale(theta.sin());
        lambda_max_hermitian(&m)
    };

    let step = std::f64::consts::TAU / RADIUS_GRID as f64;
    let mut best_theta = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..RADIUS_GRID {
        let theta = i as f64 * step;
        let v = eval(theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }

    // Golden-section refinement of the surrounding bracket.
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_theta - step, best_theta + step);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    best = best.max(fc).max(fd);
    while b - a > RADIUS_THETA_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c);
            best = best.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d);
            best = best.max(fd);
        }
    }
    best
}

/// Check that `m` is a density matrix: Hermitian, PSD within `-tol` and unit
/// trace within `tol`.
pub fn check_density_matrix(m: &ComplexMatrix, tol: f64) -> Result<()> {
    let eig = hermitian_eigen(m)?;
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NotPsd {
            eigenvalue: min,
            tol,
        });
    }
    let tr = m.trace_re();
    if (tr - 1.0).abs() > tol {
        return Err(Error::OutOfRange {
            quantity: "state trace",
            value: tr,
            lo: 1.0 - tol,
            hi: 1.0 + tol,
        });
    }
    Ok(())
}
