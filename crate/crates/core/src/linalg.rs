//! Dense real linear algebra used throughout the crate.
//!
//! Everything is binary64: for real `q > 0` all operators in scope have real
//! entries. Kernels are computed from an SVD with a relative cutoff, and the
//! returned bases use a deterministic sign convention so reports are
//! reproducible.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen, QR, SVD};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default relative cutoff for numerical ranks and kernels.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative singular values in `[tol, RANK_GRAY_UPPER)` make a rank ambiguous.
pub const RANK_GRAY_UPPER: f64 = 1e-6;
/// Relative tolerance used when grouping eigenvalues into clusters.
pub const EIGEN_CLUSTER_TOL: f64 = 1e-8;

/// A square operator on a (possibly tensor-factored) space.
#[derive(Clone, Debug, PartialEq)]
pub struct LinOperator {
    matrix: Matrix,
    space_dims: Vec<usize>,
}

impl LinOperator {
    pub fn new(matrix: Matrix, space_dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let prod: usize = space_dims.iter().product();
        if prod != matrix.nrows() {
            return Err(Error::Shape(format!(
                "factor dimensions {:?} multiply to {prod}, matrix side is {}",
                space_dims,
                matrix.nrows()
            )));
        }
        Ok(LinOperator { matrix, space_dims })
    }

    /// An operator on a single unfactored space.
    pub fn plain(matrix: Matrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, vec![n])
    }

    pub fn identity(space_dims: Vec<usize>) -> Self {
        let n = space_dims.iter().product();
        LinOperator {
            matrix: Matrix::identity(n, n),
            space_dims,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn space_dims(&self) -> &[usize] {
        &self.space_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn compose(&self, other: &LinOperator) -> Result<LinOperator> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "cannot compose operators of sides {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(LinOperator {
            matrix: &self.matrix * &other.matrix,
            space_dims: self.space_dims.clone(),
        })
    }
}

/// A positive-definite symmetric matrix defining an inner product.
#[derive(Clone, Debug)]
pub struct GramForm {
    matrix: Matrix,
    chol: Cholesky<f64, Dyn>,
}

impl PartialEq for GramForm {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl GramForm {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape("Gram matrix must be square".into()));
        }
        let scale = max_abs(&matrix).max(f64::MIN_POSITIVE);
        let asym = max_abs(&(&matrix - matrix.transpose()));
        if asym > 1e-12 * scale {
            return Err(Error::NoInvariantForm(format!(
                "matrix is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let chol = Cholesky::new(sym.clone())
            .ok_or_else(|| Error::NoInvariantForm("matrix is not positive definite".into()))?;
        Ok(GramForm { matrix: sym, chol })
    }

    pub fn euclidean(n: usize) -> Self {
        GramForm::new(Matrix::identity(n, n)).expect("identity is positive definite")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Lower Cholesky factor `L` with `G = L Lᵀ`.
    pub fn cholesky_l(&self) -> Matrix {
        self.chol.l()
    }

    /// `G⁻¹ X`.
    pub fn solve(&self, x: &Matrix) -> Matrix {
        self.chol.solve(x)
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.matrix * y))
    }

    /// The form `G ⊗ H` on the tensor product.
    pub fn tensor(&self, other: &GramForm) -> GramForm {
        GramForm::new(self.matrix.kronecker(&other.matrix))
            .expect("tensor product of positive forms is positive")
    }

    /// Restriction `Bᵀ G B` to the column span of `basis`.
    pub fn restrict(&self, basis: &Matrix) -> Result<GramForm> {
        GramForm::new(basis.transpose() * &self.matrix * basis)
    }
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Maximum entrywise distance between two matrices of equal shape.
pub fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Permutation `τ : V ⊗ W → W ⊗ V` for factor dimensions `a = dim V`, `b = dim W`.
pub fn flip(a: usize, b: usize) -> Matrix {
    let mut p = Matrix::zeros(a * b, a * b);
    for i in 0..a {
        for j in 0..b {
            p[(j * a + i, i * b + j)] = 1.0;
        }
    }
    p
}

/// `I_left ⊗ m ⊗ I_right`.
pub fn embed(m: &Matrix, left: usize, right: usize) -> Matrix {
    let mut out = m.clone();
    if left > 1 {
        out = Matrix::identity(left, left).kronecker(&out);
    }
    if right > 1 {
        out = out.kronecker(&Matrix::identity(right, right));
    }
    out
}

/// Singular values (descending) and right singular vectors (as rows of `vt`,
/// always a full `n×n` matrix) of an `m×n` matrix.
fn full_svd(a: &Matrix) -> (Vec<f64>, Matrix) {
    let (m, n) = a.shape();
    let square = if m > n {
        // Kernel and singular values are preserved by passing to R of A = QR.
        QR::new(a.clone()).r()
    } else if m < n {
        let mut padded = Matrix::zeros(n, n);
        padded.view_mut((0, 0), (m, n)).copy_from(a);
        padded
    } else {
        a.clone()
    };
    let svd = SVD::new(square, false, true);
    let vt = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut sorted = Matrix::zeros(n, n);
    for (row, &i) in order.iter().enumerate() {
        sorted.set_row(row, &vt.row(i));
    }
    (values, sorted)
}

/// Singular values of `a` in descending order.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn sign_fix(v: &mut Vector) {
    let scale = v.amax();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale).copied() {
        if first < 0.0 {
            v.neg_mut();
        }
    }
}

fn kernel_with_values(a: &Matrix, tol: f64, floor: f64) -> (Vec<Vector>, Vec<f64>) {
    let n = a.ncols();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    if a.nrows() == 0 {
        let basis = (0..n)
            .map(|i| {
                let mut v = Vector::zeros(n);
                v[i] = 1.0;
                v
            })
            .collect();
        return (basis, Vec::new());
    }
    let (s, vt) = full_svd(a);
    let smax = s[0].max(floor);
    if smax == 0.0 {
        let basis = (0..n)
            .map(|i| {
                let mut v = Vector::zeros(n);
                v[i] = 1.0;
                v
            })
            .collect();
        return (basis, s);
    }
    // Vectors are taken in ascending singular-value order.
    let mut basis = Vec::new();
    for k in (0..n).rev() {
        if s[k] < tol * smax {
            let mut v: Vector = vt.row(k).transpose();
            sign_fix(&mut v);
            basis.push(v);
        }
    }
    (basis, s)
}

/// Orthonormal basis of the numerical kernel of `a`.
///
/// A right singular vector is kept when its singular value is below
/// `tol · σ_max`.
///
/// ```
/// use nalgebra::DMatrix;
/// let k = qsymx::linalg::kernel(&DMatrix::from_diagonal_element(3, 3, 1.0), 1e-9);
/// assert!(k.is_empty());
/// ```
pub fn kernel(a: &Matrix, tol: f64) -> Vec<Vector> {
    kernel_with_values(a, tol, 0.0).0
}

/// Like [`kernel`], but fails when a singular value sits in the gray zone
/// `[tol, 1e-6)` relative to the largest one, where the rank is not trustworthy.
pub fn kernel_checked(a: &Matrix, tol: f64) -> Result<Vec<Vector>> {
    kernel_checked_scaled(a, tol, 0.0)
}

/// [`kernel_checked`] with the cutoff taken relative to `max(σ_max, floor)`.
///
/// Blocks cut out of a larger operator can be entirely roundoff; the floor
/// (typically the norm of the parent operator) keeps such blocks from being
/// counted as full rank.
pub fn kernel_checked_scaled(a: &Matrix, tol: f64, floor: f64) -> Result<Vec<Vector>> {
    let (basis, s) = kernel_with_values(a, tol, floor);
    check_gray_zone(&s, tol, floor)?;
    Ok(basis)
}

fn check_gray_zone(s: &[f64], tol: f64, floor: f64) -> Result<()> {
    let Some(&first) = s.first() else {
        return Ok(());
    };
    let smax = first.max(floor);
    if smax == 0.0 {
        return Ok(());
    }
    let upper = RANK_GRAY_UPPER.max(tol * 10.0);
    for &x in s {
        let rel = x / smax;
        if rel >= tol && rel < upper {
            return Err(Error::RankAmbiguous(rel));
        }
    }
    Ok(())
}

/// Numerical rank with the same cutoff as [`kernel`].
pub fn rank(a: &Matrix, tol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x >= tol * smax).count(),
        _ => 0,
    }
}

/// Rank with the gray-zone ambiguity check.
pub fn rank_checked(a: &Matrix, tol: f64) -> Result<usize> {
    let s = singular_values(a);
    check_gray_zone(&s, tol, 0.0)?;
    Ok(match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x >= tol * smax).count(),
        _ => 0,
    })
}

pub fn columns(vectors: &[Vector], nrows: usize) -> Matrix {
    if vectors.is_empty() {
        return Matrix::zeros(nrows, 0);
    }
    Matrix::from_columns(vectors)
}

/// Euclidean orthonormal basis of the column span of `a` (rank via `tol`).
pub fn range_basis(a: &Matrix, tol: f64) -> Matrix {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Matrix::zeros(m, 0);
    }
    let svd = SVD::new(a.clone(), true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Matrix::zeros(m, 0);
    }
    let mut idx: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] >= tol * smax)
        .collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let cols: Vec<Vector> = idx
        .iter()
        .map(|&i| {
            let mut v: Vector = u.column(i).into_owned();
            sign_fix(&mut v);
            v
        })
        .collect();
    columns(&cols, m)
}

/// Form-orthonormalizes the columns of `basis` (assumed independent).
pub fn form_orthonormalize(basis: &Matrix, form: &GramForm) -> Matrix {
    let mut out: Vec<Vector> = Vec::with_capacity(basis.ncols());
    let g = form.matrix();
    for col in basis.column_iter() {
        let mut v: Vector = col.into_owned();
        for _ in 0..2 {
            for u in &out {
                let c = u.dot(&(g * &v));
                v -= u * c;
            }
        }
        let norm = v.dot(&(g * &v)).sqrt();
        out.push(v / norm);
    }
    columns(&out, basis.nrows())
}

/// Form-orthogonal projector `B (Bᵀ G B)⁻¹ Bᵀ G` onto the column span of `basis`.
pub fn form_projector(basis: &Matrix, form: &GramForm) -> Result<Matrix> {
    let n = basis.nrows();
    if basis.ncols() == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let g = form.matrix();
    let small = basis.transpose() * g * basis;
    let inv = Cholesky::new(small)
        .ok_or_else(|| Error::Shape("projector basis is degenerate".into()))?
        .inverse();
    Ok(basis * inv * basis.transpose() * g)
}

/// Adjoint `A* = G⁻¹ Aᵀ G` with respect to `form`, so that `(Av, w) = (v, A*w)`.
pub fn adjoint(op: &LinOperator, form: &GramForm) -> Result<LinOperator> {
    if op.dim() != form.dim() {
        return Err(Error::Shape(format!(
            "operator side {} does not match form side {}",
            op.dim(),
            form.dim()
        )));
    }
    let m = form.solve(&(op.matrix().transpose() * form.matrix()));
    LinOperator::new(m, op.space_dims().to_vec())
}

/// `‖G A − Aᵀ G‖ / ‖G A‖` (max-entry norms).
pub fn self_adjoint_residual(a: &Matrix, form: &GramForm) -> f64 {
    let ga = form.matrix() * a;
    let scale = max_abs(&ga).max(f64::MIN_POSITIVE);
    max_diff(&ga, &(a.transpose() * form.matrix())) / scale
}

/// Spectral decomposition of a form-self-adjoint operator.
///
/// Returns eigenvalues (ascending) and eigenvectors as columns, orthonormal
/// with respect to `form`.
pub fn form_eigen(a: &Matrix, form: &GramForm) -> (Vec<f64>, Matrix) {
    // In the frame x = Lᵀ y the operator becomes the symmetric Lᵀ A L⁻ᵀ.
    let l = form.cholesky_l();
    let lt = l.transpose();
    let lt_inv = lt
        .clone()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let sym = &lt * a * &lt_inv;
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs: Vec<Vector> = order
        .iter()
        .map(|&i| &lt_inv * eig.eigenvectors.column(i))
        .collect();
    (values, columns(&vecs, a.nrows()))
}

/// `A^{-1/2}` for a form-self-adjoint operator with positive spectrum.
///
/// The result `T` is form-self-adjoint and satisfies `T A T = id`.
pub fn inv_sqrt_psd(op: &LinOperator, form: &GramForm) -> Result<LinOperator> {
    let a = op.matrix();
    if a.nrows() != form.dim() {
        return Err(Error::Shape("operator and form sides differ".into()));
    }
    let res = self_adjoint_residual(a, form);
    if res >= 1e-8 {
        return Err(Error::NotSelfAdjoint(res));
    }
    let l = form.cholesky_l();
    let lt = l.transpose();
    let lt_inv = lt
        .clone()
        .try_inverse()
        .expect("Cholesky factor is invertible");
    let sym = &lt * a * &lt_inv;
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let top = eig.eigenvalues.amax();
    for &ev in eig.eigenvalues.iter() {
        if ev <= EIGEN_CLUSTER_TOL * top {
            return Err(Error::NonPositiveEigenvalue(ev));
        }
    }
    let d = Matrix::from_diagonal(&eig.eigenvalues.map(|x| x.powf(-0.5)));
    let u = &eig.eigenvectors;
    let t = &lt_inv * u * d * u.transpose() * &lt;
    LinOperator::new(t, op.space_dims().to_vec())
}

/// Eigenvalues of a general real square matrix, as `(re, im)` pairs.
pub fn complex_eigenvalues(a: &Matrix) -> Vec<(f64, f64)> {
    a.clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect()
}

/// Dimension of the intersection of two column spans.
pub fn intersection_dim(a: &Matrix, b: &Matrix, tol: f64) -> Result<usize> {
    let ra = rank_checked(a, tol)?;
    let rb = rank_checked(b, tol)?;
    let mut joined = Matrix::zeros(a.nrows(), a.ncols() + b.ncols());
    joined.view_mut((0, 0), a.shape()).copy_from(a);
    joined.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    let rj = rank_checked(&joined, tol)?;
    Ok(ra + rb - rj)
}

/// Principal angles (radians, ascending) between two column spans given by
/// Euclidean-orthonormal bases.
pub fn principal_angles(a: &Matrix, b: &Matrix) -> Vec<f64> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return Vec::new();
    }
    let mut s = singular_values(&(a.transpose() * b));
    s.sort_by(|x, y| y.total_cmp(x));
    s.into_iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect()
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Shape("matrix is singular".into()))
}
