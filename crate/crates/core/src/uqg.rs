//! Concrete `U_q(g)`-modules at a fixed real `q > 0`.
//!
//! A [`ModuleRep`] is a weight basis with matrices for `E_i` and `F_i`;
//! `K_i` is the diagonal `q_i^{μ_i}`. Tensor products use the coproduct
//!
//! ```text
//! Δ(E_i) = E_i ⊗ 1 + K_i ⊗ E_i,   Δ(F_i) = F_i ⊗ K_i⁻¹ + 1 ⊗ F_i,   Δ(K_i) = K_i ⊗ K_i
//! ```
//!
//! and every module carries an invariant inner product for the compact real
//! form `E_i* = K_i F_i`, `F_i* = E_i K_i⁻¹`, `K_i* = K_i`.

use std::collections::BTreeMap;

use crate::cartan::{RootSystem, Weight};
use crate::error::{Error, Result};
use crate::linalg::{self, GramForm, LinOperator, Matrix, Vector};

/// Relation residuals above this are rejected at construction.
pub const RELATION_TOL: f64 = 1e-8;
/// Relative norm below which a new closure vector is considered dependent.
pub const CLOSURE_DROP_TOL: f64 = 1e-9;

/// The quantum integer `[n]_{q_i}`, equal to `n` at `q_i = 1`.
///
/// ```
/// use qsymx::uqg::quantum_integer;
/// assert_eq!(quantum_integer(1, 1.7), 1.0);
/// assert!((quantum_integer(2, 1.2) - (1.2 + 1.0 / 1.2)).abs() < 1e-14);
/// // [3]_q = q² + 1 + q⁻²
/// assert!((quantum_integer(3, 1.2) - 3.134_444_444_444_444).abs() < 1e-12);
/// assert_eq!(quantum_integer(4, 1.0), 4.0);
/// ```
pub fn quantum_integer(n: i32, qi: f64) -> f64 {
    // sinh form avoids the cancellation in (q^n - q^-n)/(q - q^-1) near q = 1.
    let h = qi.ln();
    if h == 0.0 {
        return n as f64;
    }
    (n as f64 * h).sinh() / h.sinh()
}

pub fn quantum_factorial(n: u32, qi: f64) -> f64 {
    (1..=n as i32).map(|k| quantum_integer(k, qi)).product()
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidQ(q))
    }
}

/// A simple direct summand `V_λ` occupying a contiguous block of the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Summand {
    pub highest: Weight,
    pub offset: usize,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct ModuleRep {
    rs: RootSystem,
    q: f64,
    weights: Vec<Weight>,
    e: Vec<Matrix>,
    f: Vec<Matrix>,
    form: GramForm,
    factor_dims: Vec<usize>,
    summands: Option<Vec<Summand>>,
}

/// Worst residuals of the defining relations on a module.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RelationResiduals {
    /// `K_i E_j K_i⁻¹ − q_i^{a_ij} E_j` and the `F` analogue.
    pub cartan: f64,
    /// `[E_i, F_j] − δ_ij (K_i − K_i⁻¹)/(q_i − q_i⁻¹)`.
    pub commutator: f64,
    /// Quantum Serre relations for `E` and `F`.
    pub serre: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.cartan.max(self.commutator).max(self.serre)
    }
}

impl ModuleRep {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn e(&self, i: usize) -> &Matrix {
        &self.e[i]
    }

    pub fn f(&self, i: usize) -> &Matrix {
        &self.f[i]
    }

    pub fn form(&self) -> &GramForm {
        &self.form
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    /// Direct-sum structure, when the module was built as a sum of simples.
    pub fn summands(&self) -> Option<&[Summand]> {
        self.summands.as_deref()
    }

    /// Diagonal of `K_i`, i.e. `q_i^{μ_i}` on each basis vector.
    pub fn k_diag(&self, i: usize) -> Vec<f64> {
        let qi = self.rs.q_i(self.q, i);
        self.weights
            .iter()
            .map(|w| qi.powi(w.coords()[i]))
            .collect()
    }

    pub fn k(&self, i: usize) -> Matrix {
        Matrix::from_diagonal(&Vector::from_vec(self.k_diag(i)))
    }

    pub fn k_inv(&self, i: usize) -> Matrix {
        Matrix::from_diagonal(&Vector::from_vec(
            self.k_diag(i).into_iter().map(|x| 1.0 / x).collect(),
        ))
    }

    /// Indices of basis vectors of weight `mu`.
    pub fn weight_indices(&self, mu: &Weight) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| &self.weights[k] == mu)
            .collect()
    }

    /// Distinct weights with their multiplicities.
    pub fn weight_multiset(&self) -> BTreeMap<Weight, i64> {
        let mut out = BTreeMap::new();
        for w in &self.weights {
            *out.entry(w.clone()).or_insert(0) += 1;
        }
        out
    }

    /// Distinct dominant weights occurring in the module, sorted.
    pub fn dominant_weights(&self) -> Vec<Weight> {
        self.weight_multiset()
            .into_keys()
            .filter(Weight::is_dominant)
            .collect()
    }

    /// Matrix of the generator `X_i` acting through `gen`.
    pub fn generator(&self, gen: Generator) -> Matrix {
        match gen {
            Generator::E(i) => self.e[i].clone(),
            Generator::F(i) => self.f[i].clone(),
            Generator::K(i) => self.k(i),
        }
    }

    /// All generators `E_i, F_i, K_i` in a fixed order.
    pub fn generators(&self) -> Vec<Generator> {
        (0..self.rank())
            .flat_map(|i| [Generator::E(i), Generator::F(i), Generator::K(i)])
            .collect()
    }

    pub fn relation_residuals(&self) -> RelationResiduals {
        let mut out = RelationResiduals::default();
        let r = self.rank();
        for i in 0..r {
            let qi = self.rs.q_i(self.q, i);
            let ki = self.k_diag(i);
            for j in 0..r {
                let aij = self.rs.cartan_entry(i, j);
                let shift = qi.powi(aij);
                for (x, s) in [(&self.e[j], shift), (&self.f[j], 1.0 / shift)] {
                    let mut conj = x.clone();
                    for col in 0..conj.ncols() {
                        for row in 0..conj.nrows() {
                            conj[(row, col)] *= ki[row] / ki[col];
                        }
                    }
                    out.cartan = out.cartan.max(linalg::max_diff(&conj, &(x * s)));
                }
                let mut comm = &self.e[i] * &self.f[j] - &self.f[j] * &self.e[i];
                if i == j {
                    for (k, w) in self.weights.iter().enumerate() {
                        comm[(k, k)] -= quantum_integer(w.coords()[i], qi);
                    }
                }
                out.commutator = out.commutator.max(linalg::max_abs(&comm));
                if i != j {
                    let m = (1 - aij) as u32;
                    for x in [&self.e, &self.f] {
                        let mut acc = Matrix::zeros(self.dim(), self.dim());
                        for n in 0..=m {
                            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                            let left = divided_power(&x[i], m - n, qi);
                            let right = divided_power(&x[i], n, qi);
                            acc += left * &x[j] * right * sign;
                        }
                        out.serre = out.serre.max(linalg::max_abs(&acc));
                    }
                }
            }
        }
        out
    }

    pub fn check_relations(&self, tol: f64) -> Result<()> {
        let res = self.relation_residuals();
        for (name, value) in [
            ("K E K^-1 = q^a E", res.cartan),
            ("[E_i, F_j]", res.commutator),
            ("quantum Serre", res.serre),
        ] {
            if !(value < tol) {
                return Err(Error::RelationResidual {
                    relation: name.into(),
                    residual: value,
                    tolerance: tol,
                });
            }
        }
        Ok(())
    }

    /// Worst invariance residual `‖G X − (X*)ᵀ G‖` of the stored form.
    pub fn form_invariance_residual(&self) -> f64 {
        let g = self.form.matrix();
        let mut worst = 0.0_f64;
        for i in 0..self.rank() {
            let k = self.k(i);
            let kinv = self.k_inv(i);
            let e_star = &k * &self.f[i];
            let f_star = &self.e[i] * &kinv;
            worst = worst.max(linalg::max_diff(
                &(g * &self.e[i]),
                &(e_star.transpose() * g),
            ));
            worst = worst.max(linalg::max_diff(
                &(g * &self.f[i]),
                &(f_star.transpose() * g),
            ));
            worst = worst.max(linalg::max_diff(&(g * &k), &(k.transpose() * g)));
        }
        worst
    }

    /// Joint kernel of all `E_i` on the `λ`-weight space, as full-length vectors.
    pub fn highest_weight_vectors(&self, lambda: &Weight, tol: f64) -> Result<Vec<Vector>> {
        let cols = self.weight_indices(lambda);
        highest_weight_vectors_in(self, &cols, None, tol)
    }

    /// Smallest `F`-stable subspace containing the given vectors, as a
    /// Euclidean-orthonormal basis of weight vectors with their weights.
    pub fn f_closure(&self, start: &[(Vector, Weight)]) -> (Matrix, Vec<Weight>) {
        let mut basis: Vec<Vector> = Vec::new();
        let mut weights: Vec<Weight> = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for (v, w) in start {
            if let Some(u) = orthogonalize_against(v, w, &basis, &weights, v.norm()) {
                basis.push(u.clone());
                weights.push(w.clone());
                queue.push_back(basis.len() - 1);
            }
        }
        // Drops are measured against the size of F_i, not of F_i x, so that
        // cancellation-level images are discarded.
        let scales: Vec<f64> = self.f.iter().map(linalg::max_abs).collect();
        while let Some(idx) = queue.pop_front() {
            for i in 0..self.rank() {
                let y = &self.f[i] * &basis[idx];
                let w = &weights[idx] - &self.rs.simple_root(i);
                if let Some(u) = orthogonalize_against(&y, &w, &basis, &weights, scales[i]) {
                    basis.push(u);
                    weights.push(w);
                    queue.push_back(basis.len() - 1);
                }
            }
        }
        (linalg::columns(&basis, self.dim()), weights)
    }

    /// Restricts the action to an invariant subspace with Euclidean-orthonormal basis `b`.
    pub(crate) fn restrict(
        &self,
        b: &Matrix,
        weights: Vec<Weight>,
        summands: Option<Vec<Summand>>,
    ) -> Result<ModuleRep> {
        let bt = b.transpose();
        let e = self.e.iter().map(|x| &bt * x * b).collect();
        let f = self.f.iter().map(|x| &bt * x * b).collect();
        let form = self.form.restrict(b)?;
        Ok(ModuleRep {
            rs: self.rs.clone(),
            q: self.q,
            weights,
            e,
            f,
            form,
            factor_dims: vec![b.ncols()],
            summands,
        })
    }
}

/// A generator of `U_q(g)` acting on a module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    E(usize),
    F(usize),
    K(usize),
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::E(i) => write!(f, "E{}", i + 1),
            Generator::F(i) => write!(f, "F{}", i + 1),
            Generator::K(i) => write!(f, "K{}", i + 1),
        }
    }
}

fn orthogonalize_against(
    v: &Vector,
    w: &Weight,
    basis: &[Vector],
    weights: &[Weight],
    scale: f64,
) -> Option<Vector> {
    if v.norm() == 0.0 {
        return None;
    }
    let mut y = v.clone();
    // Modified Gram–Schmidt, twice; vectors of other weights are already orthogonal.
    for _ in 0..2 {
        for (b, bw) in basis.iter().zip(weights) {
            if bw == w {
                let c = b.dot(&y);
                y -= b * c;
            }
        }
    }
    let norm = y.norm();
    if norm > CLOSURE_DROP_TOL * scale {
        Some(y / norm)
    } else {
        None
    }
}

/// Joint kernel of the `E_i` restricted to the span of `cols` (basis indices)
/// or, if given, of the columns of `sub` (full-length vectors of one weight).
pub(crate) fn highest_weight_vectors_in(
    m: &ModuleRep,
    cols: &[usize],
    sub: Option<&Matrix>,
    tol: f64,
) -> Result<Vec<Vector>> {
    let span = match sub {
        Some(s) => s.clone(),
        None => {
            let mut s = Matrix::zeros(m.dim(), cols.len());
            for (k, &c) in cols.iter().enumerate() {
                s[(c, k)] = 1.0;
            }
            s
        }
    };
    let k = span.ncols();
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = m.dim();
    let r = m.rank();
    let mut stacked = Matrix::zeros(r * n, k);
    for i in 0..r {
        stacked
            .view_mut((i * n, 0), (n, k))
            .copy_from(&(&m.e[i] * &span));
    }
    let floor = m.e.iter().map(linalg::max_abs).fold(0.0, f64::max);
    let coeffs = linalg::kernel_checked_scaled(&stacked, tol, floor)?;
    Ok(coeffs.iter().map(|c| &span * c).collect())
}

pub(crate) fn divided_power(x: &Matrix, n: u32, qi: f64) -> Matrix {
    let mut out = Matrix::identity(x.nrows(), x.ncols());
    for k in 1..=n {
        out = &out * x / quantum_integer(k as i32, qi);
    }
    out
}

/// All nonzero divided powers `X^{(0)}, X^{(1)}, …` of a nilpotent matrix.
fn divided_powers(x: &Matrix, qi: f64) -> Vec<Matrix> {
    let mut out = vec![Matrix::identity(x.nrows(), x.ncols())];
    loop {
        let k = out.len();
        let next = out[k - 1].clone() * x / quantum_integer(k as i32, qi);
        if linalg::max_abs(&next) == 0.0 || k > x.nrows() {
            break;
        }
        out.push(next);
    }
    out
}

/// Seeds of the fundamental modules: weights and `(from, to, generator, F coeff, E coeff)` arrows.
type Arrow = (usize, usize, usize, f64, f64);

fn fundamental_seed(rs: &RootSystem, i: usize, q: f64) -> (Vec<Weight>, Vec<Arrow>) {
    use crate::cartan::CartanType::*;
    let w = |c: &[i32]| Weight::new(c.to_vec());
    match (rs.cartan_type(), i) {
        (A1, _) => (vec![w(&[1]), w(&[-1])], vec![(0, 1, 0, 1.0, 1.0)]),
        (A2, 0) => (
            vec![w(&[1, 0]), w(&[-1, 1]), w(&[0, -1])],
            vec![(0, 1, 0, 1.0, 1.0), (1, 2, 1, 1.0, 1.0)],
        ),
        (A2, _) => (
            vec![w(&[0, 1]), w(&[1, -1]), w(&[-1, 0])],
            vec![(0, 1, 1, 1.0, 1.0), (1, 2, 0, 1.0, 1.0)],
        ),
        (B2, 0) => {
            // Vector representation; the zero-weight step carries [2] for the short root.
            let two = quantum_integer(2, rs.q_i(q, 1));
            (
                vec![
                    w(&[1, 0]),
                    w(&[-1, 2]),
                    w(&[0, 0]),
                    w(&[1, -2]),
                    w(&[-1, 0]),
                ],
                vec![
                    (0, 1, 0, 1.0, 1.0),
                    (1, 2, 1, 1.0, two),
                    (2, 3, 1, two, 1.0),
                    (3, 4, 0, 1.0, 1.0),
                ],
            )
        }
        (B2, _) => (
            vec![w(&[0, 1]), w(&[1, -1]), w(&[-1, 1]), w(&[0, -1])],
            vec![
                (0, 1, 1, 1.0, 1.0),
                (1, 2, 0, 1.0, 1.0),
                (2, 3, 1, 1.0, 1.0),
            ],
        ),
    }
}

/// The fundamental module `V_{ω_i}` from hardcoded seed matrices.
pub fn build_fundamental(rs: &RootSystem, i: usize, q: f64) -> Result<ModuleRep> {
    rs.check_generator(i)?;
    check_q(q)?;
    let (weights, arrows) = fundamental_seed(rs, i, q);
    let n = weights.len();
    let r = rs.rank();
    let mut e = vec![Matrix::zeros(n, n); r];
    let mut f = vec![Matrix::zeros(n, n); r];
    for (from, to, g, fc, ec) in arrows {
        f[g][(to, from)] = fc;
        e[g][(from, to)] = ec;
    }
    let highest = Weight::fundamental(r, i);
    let summands = Some(vec![Summand {
        highest,
        offset: 0,
        dim: n,
    }]);
    let mut m = ModuleRep {
        rs: rs.clone(),
        q,
        weights,
        e,
        f,
        form: GramForm::euclidean(n),
        factor_dims: vec![n],
        summands,
    };
    m.check_relations(RELATION_TOL)?;
    m.form = gram_form(&m)?;
    Ok(m)
}

/// The one-dimensional trivial module.
pub fn trivial(rs: &RootSystem, q: f64) -> Result<ModuleRep> {
    check_q(q)?;
    let r = rs.rank();
    Ok(ModuleRep {
        rs: rs.clone(),
        q,
        weights: vec![Weight::zero(r)],
        e: vec![Matrix::zeros(1, 1); r],
        f: vec![Matrix::zeros(1, 1); r],
        form: GramForm::euclidean(1),
        factor_dims: vec![1],
        summands: Some(vec![Summand {
            highest: Weight::zero(r),
            offset: 0,
            dim: 1,
        }]),
    })
}

/// Tensor product `A ⊗ B` through the coproduct.
pub fn tensor(a: &ModuleRep, b: &ModuleRep) -> ModuleRep {
    let ia = Matrix::identity(a.dim(), a.dim());
    let ib = Matrix::identity(b.dim(), b.dim());
    let r = a.rank();
    let e = (0..r)
        .map(|i| a.e[i].kronecker(&ib) + a.k(i).kronecker(&b.e[i]))
        .collect();
    let f = (0..r)
        .map(|i| a.f[i].kronecker(&b.k_inv(i)) + ia.kronecker(&b.f[i]))
        .collect();
    let weights = a
        .weights
        .iter()
        .flat_map(|x| b.weights.iter().map(move |y| x + y))
        .collect();
    let mut factor_dims = a.factor_dims.clone();
    factor_dims.extend_from_slice(&b.factor_dims);
    ModuleRep {
        rs: a.rs.clone(),
        q: a.q,
        weights,
        e,
        f,
        form: a.form.tensor(&b.form),
        factor_dims,
        summands: None,
    }
}

/// `V^{⊗n}`, nested from the left.
pub fn tensor_power(v: &ModuleRep, n: usize) -> ModuleRep {
    assert!(n >= 1, "tensor power needs n >= 1");
    let mut out = v.clone();
    for _ in 1..n {
        out = tensor(&out, v);
    }
    out
}

/// An ordered tensor product of modules, iterated from the left.
#[derive(Clone, Debug)]
pub struct TensorSpace {
    factors: Vec<ModuleRep>,
    module: ModuleRep,
}

impl TensorSpace {
    pub fn new(factors: Vec<ModuleRep>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::Invalid("a tensor space needs at least one factor".into()))?;
        for f in &factors[1..] {
            if f.rs != first.rs || f.q != first.q {
                return Err(Error::Invalid(
                    "tensor factors must share the Cartan type and q".into(),
                ));
            }
        }
        let module = factors[1..]
            .iter()
            .fold(first.clone(), |acc, f| tensor(&acc, f));
        Ok(TensorSpace { factors, module })
    }

    pub fn factors(&self) -> &[ModuleRep] {
        &self.factors
    }

    pub fn module(&self) -> &ModuleRep {
        &self.module
    }
}

/// Direct sum of modules; their summand structures are concatenated.
pub fn direct_sum(parts: &[ModuleRep]) -> Result<ModuleRep> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Invalid("empty direct sum".into()))?;
    let n: usize = parts.iter().map(ModuleRep::dim).sum();
    let r = first.rank();
    let mut e = vec![Matrix::zeros(n, n); r];
    let mut f = vec![Matrix::zeros(n, n); r];
    let mut g = Matrix::zeros(n, n);
    let mut weights = Vec::with_capacity(n);
    let mut summands = Vec::new();
    let mut off = 0;
    for p in parts {
        if p.rs != first.rs || p.q != first.q {
            return Err(Error::Invalid(
                "direct summands must share the Cartan type and q".into(),
            ));
        }
        let d = p.dim();
        for i in 0..r {
            e[i].view_mut((off, off), (d, d)).copy_from(&p.e[i]);
            f[i].view_mut((off, off), (d, d)).copy_from(&p.f[i]);
        }
        g.view_mut((off, off), (d, d)).copy_from(p.form.matrix());
        weights.extend(p.weights.iter().cloned());
        match &p.summands {
            Some(ss) => summands.extend(ss.iter().map(|s| Summand {
                highest: s.highest.clone(),
                offset: s.offset + off,
                dim: s.dim,
            })),
            None => {
                return Err(Error::Invalid(
                    "direct summands must themselves be sums of simples".into(),
                ))
            }
        }
        off += d;
    }
    Ok(ModuleRep {
        rs: first.rs.clone(),
        q: first.q,
        weights,
        e,
        f,
        form: GramForm::new(g)?,
        factor_dims: vec![n],
        summands: Some(summands),
    })
}

/// The simple module `V_λ`, realized as the cyclic submodule generated by the
/// product of highest weight vectors in `⊗_i V_{ω_i}^{⊗λ_i}`.
pub fn build_simple(rs: &RootSystem, lambda: &Weight, q: f64) -> Result<ModuleRep> {
    check_q(q)?;
    let expected = rs.weyl_dim(lambda)? as usize;
    if lambda.is_zero() {
        return trivial(rs, q);
    }
    let mut ambient: Option<ModuleRep> = None;
    for (i, &count) in lambda.coords().iter().enumerate() {
        if count == 0 {
            continue;
        }
        let fund = build_fundamental(rs, i, q)?;
        for _ in 0..count {
            ambient = Some(match ambient {
                None => fund.clone(),
                Some(a) => tensor(&a, &fund),
            });
        }
    }
    let ambient = ambient.expect("nonzero weight has a fundamental factor");
    let mut start = Vector::zeros(ambient.dim());
    start[0] = 1.0;
    let (basis, weights) = ambient.f_closure(&[(start, lambda.clone())]);
    if basis.ncols() != expected {
        return Err(Error::ClosureDimension {
            weight: lambda.clone(),
            expected,
            got: basis.ncols(),
        });
    }
    let summands = Some(vec![Summand {
        highest: lambda.clone(),
        offset: 0,
        dim: expected,
    }]);
    let mut m = ambient.restrict(&basis, weights, summands)?;
    m.check_relations(RELATION_TOL)?;
    m.form = gram_form(&m)?;
    Ok(m)
}

/// Direct sum `⊕ V_λ` of simple modules.
pub fn build_sum(rs: &RootSystem, highest: &[Weight], q: f64) -> Result<ModuleRep> {
    let parts = highest
        .iter()
        .map(|l| build_simple(rs, l, q))
        .collect::<Result<Vec<_>>>()?;
    direct_sum(&parts)
}

/// Solves the invariance equations `E_iᵀ G = G K_i F_i` for a symmetric,
/// weight-block-diagonal `G` on each simple summand, normalized so that every
/// chosen highest weight vector has norm 1.
pub fn gram_form(m: &ModuleRep) -> Result<GramForm> {
    let summands = m.summands.as_ref().ok_or_else(|| {
        Error::NoInvariantForm("module is not presented as a direct sum of simples".into())
    })?;
    let n = m.dim();
    let mut g = Matrix::zeros(n, n);
    for s in summands {
        let block = solve_block_form(m, s)?;
        g.view_mut((s.offset, s.offset), (s.dim, s.dim))
            .copy_from(&block);
    }
    GramForm::new(g)
}

fn solve_block_form(m: &ModuleRep, s: &Summand) -> Result<Matrix> {
    let d = s.dim;
    let range = s.offset..s.offset + d;
    let wts: Vec<&Weight> = m.weights[range.clone()].iter().collect();
    let unknowns: Vec<(usize, usize)> = (0..d)
        .flat_map(|a| (a..d).map(move |b| (a, b)))
        .filter(|&(a, b)| wts[a] == wts[b])
        .collect();
    let r = m.rank();
    let e: Vec<Matrix> = (0..r)
        .map(|i| m.e[i].view((s.offset, s.offset), (d, d)).into_owned())
        .collect();
    let kf: Vec<Matrix> = (0..r)
        .map(|i| {
            let k = m.k(i).view((s.offset, s.offset), (d, d)).into_owned();
            k * m.f[i].view((s.offset, s.offset), (d, d))
        })
        .collect();
    let mut system = Matrix::zeros(r * d * d, unknowns.len());
    for (col, &(a, b)) in unknowns.iter().enumerate() {
        let mut unit = Matrix::zeros(d, d);
        unit[(a, b)] = 1.0;
        unit[(b, a)] = 1.0;
        for i in 0..r {
            let eq = e[i].transpose() * &unit - &unit * &kf[i];
            for (k, v) in eq.iter().enumerate() {
                system[(i * d * d + k, col)] = *v;
            }
        }
    }
    let sol = linalg::kernel_checked(&system, linalg::DEFAULT_TOL)?;
    if sol.len() != 1 {
        return Err(Error::NoInvariantForm(format!(
            "invariance equations on V{} have a {}-dimensional solution space",
            s.highest,
            sol.len()
        )));
    }
    let mut g = Matrix::zeros(d, d);
    for (&(a, b), &x) in unknowns.iter().zip(sol[0].iter()) {
        g[(a, b)] = x;
        g[(b, a)] = x;
    }
    let top = g[(0, 0)];
    if top == 0.0 {
        return Err(Error::NoInvariantForm(
            "highest weight vector is isotropic".into(),
        ));
    }
    Ok(g / top)
}

/// Lusztig's symmetry `T''_{i,1}` on an integrable module:
/// `T_i v = Σ_{a−b+c=μ_i} (−1)^b q_i^{b−ac} F_i^{(a)} E_i^{(b)} F_i^{(c)} v`.
///
/// It maps the `μ`-weight space onto the `s_i μ`-weight space and satisfies
/// `T_i E_i T_i⁻¹ = −K_i F_i`.
pub fn braid_operator(m: &ModuleRep, i: usize) -> Result<LinOperator> {
    m.rs.check_generator(i)?;
    LinOperator::new(braid_matrix(m, i, false), m.factor_dims.clone())
}

/// The inverse `T'_{i,−1}` of [`braid_operator`]:
/// `Σ_{−a+b−c=μ_i} (−1)^b q_i^{ac−b} E_i^{(a)} F_i^{(b)} E_i^{(c)}`.
pub fn braid_operator_inverse(m: &ModuleRep, i: usize) -> Result<LinOperator> {
    m.rs.check_generator(i)?;
    LinOperator::new(braid_matrix(m, i, true), m.factor_dims.clone())
}

fn braid_matrix(m: &ModuleRep, i: usize, inverse: bool) -> Matrix {
    let qi = m.rs.q_i(m.q, i);
    let n = m.dim();
    let fp = divided_powers(&m.f[i], qi);
    let ep = divided_powers(&m.e[i], qi);
    // Outer/inner powers are F,E,F for T and E,F,E for its inverse.
    let (outer, middle) = if inverse { (&ep, &fp) } else { (&fp, &ep) };
    let mut by_m: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (k, w) in m.weights.iter().enumerate() {
        by_m.entry(w.coords()[i]).or_default().push(k);
    }
    let mut t = Matrix::zeros(n, n);
    for (&mu, cols) in &by_m {
        let mut sel = Matrix::zeros(n, cols.len());
        for (k, &c) in cols.iter().enumerate() {
            sel[(c, k)] = 1.0;
        }
        let mut acc = Matrix::zeros(n, cols.len());
        for (c, xc) in outer.iter().enumerate() {
            let y = xc * &sel;
            for (b, xb) in middle.iter().enumerate() {
                // T: a − b + c = μ;  inverse: −a + b − c = μ.
                let a = if inverse {
                    b as i32 - c as i32 - mu
                } else {
                    mu + b as i32 - c as i32
                };
                if a < 0 || a as usize >= outer.len() {
                    continue;
                }
                let a = a as usize;
                let expo = (b as i32) - (a * c) as i32;
                let expo = if inverse { -expo } else { expo };
                let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
                acc += &outer[a] * (xb * &y) * (sign * qi.powi(expo));
            }
        }
        for (k, &c) in cols.iter().enumerate() {
            t.set_column(c, &acc.column(k));
        }
    }
    t
}

/// Quantum root vectors `E_{β_k}`, `F_{β_k}` acting on a module, ordered along
/// the fixed reduced word for `w₀`.
#[derive(Clone, Debug)]
pub struct RootVectors {
    pub e: Vec<LinOperator>,
    pub f: Vec<LinOperator>,
}

/// `E_{β_k} = T_{i_1}⋯T_{i_{k−1}} E_{i_k} T_{i_{k−1}}⁻¹⋯T_{i_1}⁻¹`, likewise for `F`.
pub fn root_vector_operators(m: &ModuleRep) -> RootVectors {
    let word = m.rs.w0_word().to_vec();
    let n = m.dim();
    let mut p = Matrix::identity(n, n);
    let mut p_inv = Matrix::identity(n, n);
    let mut e = Vec::with_capacity(word.len());
    let mut f = Vec::with_capacity(word.len());
    for &ik in &word {
        let dims = m.factor_dims.clone();
        e.push(LinOperator::new(&p * &m.e[ik] * &p_inv, dims.clone()).expect("square"));
        f.push(LinOperator::new(&p * &m.f[ik] * &p_inv, dims).expect("square"));
        p = &p * braid_matrix(m, ik, false);
        p_inv = braid_matrix(m, ik, true) * &p_inv;
    }
    RootVectors { e, f }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanType;
    use approx::assert_relative_eq;

    fn rs(t: CartanType) -> RootSystem {
        RootSystem::new(t)
    }

    #[test]
    fn fundamentals_satisfy_relations() {
        for t in CartanType::ALL {
            let rs = rs(t);
            for i in 0..rs.rank() {
                for q in [1.0, 1.2, 1.3, 0.7] {
                    let m = build_fundamental(&rs, i, q).unwrap();
                    assert!(m.relation_residuals().max() < 1e-14, "{t} {i} {q}");
                    assert_eq!(
                        m.dim() as u64,
                        rs.weyl_dim(&Weight::fundamental(rs.rank(), i)).unwrap()
                    );
                    assert!(m.form_invariance_residual() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn a1_form_on_lowered_vector_is_q() {
        let m = build_fundamental(&rs(CartanType::A1), 0, 1.2).unwrap();
        assert_relative_eq!(m.form().matrix()[(0, 0)], 1.0);
        assert_relative_eq!(m.form().matrix()[(1, 1)], 1.2, epsilon = 1e-14);
    }

    #[test]
    fn simple_modules_have_weyl_dimension() {
        for (t, lam) in [
            (CartanType::A1, vec![3]),
            (CartanType::A1, vec![0]),
            (CartanType::A2, vec![1, 1]),
            (CartanType::A2, vec![2, 0]),
            (CartanType::B2, vec![1, 1]),
            (CartanType::B2, vec![0, 2]),
        ] {
            let rs = rs(t);
            let lam = Weight::new(lam);
            let m = build_simple(&rs, &lam, 1.2).unwrap();
            assert_eq!(m.dim() as u64, rs.weyl_dim(&lam).unwrap());
            assert!(m.relation_residuals().max() < 1e-10);
            assert!(m.form_invariance_residual() < 1e-10);
            assert_eq!(m.weights()[0], lam);
        }
    }

    #[test]
    fn solved_form_matches_restricted_ambient_form() {
        // Independent route: restrict the tensor-product form of the ambient space.
        let rs = rs(CartanType::A2);
        let q = 1.3;
        let f1 = build_fundamental(&rs, 0, q).unwrap();
        let f2 = build_fundamental(&rs, 1, q).unwrap();
        let ambient = tensor(&f1, &f2);
        let mut start = Vector::zeros(ambient.dim());
        start[0] = 1.0;
        let (b, _) = ambient.f_closure(&[(start, Weight::new([1, 1]))]);
        let restricted = ambient.form().restrict(&b).unwrap();
        let m = build_simple(&rs, &Weight::new([1, 1]), q).unwrap();
        assert!(linalg::max_diff(restricted.matrix(), m.form().matrix()) < 1e-10);
    }

    #[test]
    fn trivial_module_acts_by_zero() {
        let m = build_simple(&rs(CartanType::B2), &Weight::new([0, 0]), 1.2).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(linalg::max_abs(m.e(0)), 0.0);
        assert_eq!(linalg::max_abs(m.f(1)), 0.0);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let a2 = rs(CartanType::A2);
        assert!(matches!(
            build_simple(&a2, &Weight::new([-1, 0]), 1.2),
            Err(Error::NotDominant(_))
        ));
        assert!(matches!(
            build_fundamental(&a2, 2, 1.2),
            Err(Error::GeneratorIndex { .. })
        ));
        assert!(matches!(
            build_fundamental(&a2, 0, -1.0),
            Err(Error::InvalidQ(_))
        ));
        assert!(matches!(
            build_fundamental(&a2, 0, f64::NAN),
            Err(Error::InvalidQ(_))
        ));
    }

    #[test]
    fn braid_operator_conjugates_e_to_minus_kf() {
        for t in CartanType::ALL {
            let rs = rs(t);
            let m = build_simple(&rs, &Weight::new(vec![1; rs.rank()]), 1.2).unwrap();
            for i in 0..rs.rank() {
                let t_op = braid_operator(&m, i).unwrap().into_matrix();
                let t_inv = braid_operator_inverse(&m, i).unwrap().into_matrix();
                let n = m.dim();
                assert!(linalg::max_diff(&(&t_op * &t_inv), &Matrix::identity(n, n)) < 1e-10);
                let lu = linalg::inverse(&t_op).unwrap();
                assert!(linalg::max_diff(&lu, &t_inv) < 1e-9);
                let lhs = &t_op * m.e(i) * &t_inv;
                let rhs = -(m.k(i) * m.f(i));
                assert!(linalg::max_diff(&lhs, &rhs) < 1e-10, "{t} {i}");
            }
        }
    }

    #[test]
    fn braid_operator_reflects_weights() {
        for t in CartanType::ALL {
            let rs = rs(t);
            let m = build_simple(&rs, &Weight::new(vec![1; rs.rank()]), 1.2).unwrap();
            for i in 0..rs.rank() {
                let t_op = braid_operator(&m, i).unwrap().into_matrix();
                for (col, w) in m.weights().iter().enumerate() {
                    let target = rs.reflect(i, w);
                    for row in 0..m.dim() {
                        if t_op[(row, col)].abs() > 1e-12 {
                            assert_eq!(m.weights()[row], target);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn braid_relations() {
        for t in [CartanType::A2, CartanType::B2] {
            let rs = rs(t);
            for lam in [vec![1, 0], vec![0, 1], vec![1, 1]] {
                let m = build_simple(&rs, &Weight::new(lam), 1.2).unwrap();
                let t1 = braid_operator(&m, 0).unwrap().into_matrix();
                let t2 = braid_operator(&m, 1).unwrap().into_matrix();
                let (lhs, rhs) = if t == CartanType::A2 {
                    (&t1 * &t2 * &t1, &t2 * &t1 * &t2)
                } else {
                    (&t1 * &t2 * &t1 * &t2, &t2 * &t1 * &t2 * &t1)
                };
                assert!(linalg::max_diff(&lhs, &rhs) < 1e-8);
            }
        }
    }

    #[test]
    fn root_vectors_shift_by_their_root_and_are_nilpotent() {
        for t in CartanType::ALL {
            let rs = rs(t);
            let m = build_simple(&rs, &Weight::new(vec![1; rs.rank()]), 1.3).unwrap();
            let rv = root_vector_operators(&m);
            let betas = rs.positive_roots_fw();
            for (k, beta) in betas.iter().enumerate() {
                let e = rv.e[k].matrix();
                let f = rv.f[k].matrix();
                for col in 0..m.dim() {
                    for row in 0..m.dim() {
                        if e[(row, col)].abs() > 1e-10 {
                            assert_eq!(m.weights()[row], &m.weights()[col] + beta);
                        }
                        if f[(row, col)].abs() > 1e-10 {
                            assert_eq!(m.weights()[row], &m.weights()[col] - beta);
                        }
                    }
                }
                let mut pe = Matrix::identity(m.dim(), m.dim());
                for _ in 0..m.dim() {
                    pe = &pe * e;
                }
                assert!(linalg::max_abs(&pe) < 1e-9);
            }
            // A1 and the first root vector of every type are the plain generators.
            let first = rs.w0_word()[0];
            assert!(linalg::max_diff(rv.e[0].matrix(), m.e(first)) < 1e-15);
        }
    }

    #[test]
    fn tensor_products_satisfy_relations() {
        let rs = rs(CartanType::B2);
        let v = build_fundamental(&rs, 0, 1.2).unwrap();
        let w = build_fundamental(&rs, 1, 1.2).unwrap();
        let t = TensorSpace::new(vec![v, w.clone(), w]).unwrap();
        assert_eq!(t.module().dim(), 80);
        assert!(t.module().relation_residuals().max() < 1e-10);
        assert!(t.module().form_invariance_residual() < 1e-10);
        assert_eq!(t.module().factor_dims(), &[5, 4, 4]);
    }

    #[test]
    fn equal_dimensions_and_weights_across_q() {
        for t in CartanType::ALL {
            let rs = rs(t);
            let lam = Weight::new(vec![1; rs.rank()]);
            let a = build_simple(&rs, &lam, 1.2).unwrap();
            let b = build_simple(&rs, &lam, 1.3).unwrap();
            assert_eq!(a.weight_multiset(), b.weight_multiset());
        }
    }

    #[test]
    fn generators_are_continuous_at_q_one() {
        for t in CartanType::ALL {
            let rs = rs(t);
            let lam = Weight::new(vec![1; rs.rank()]);
            let a = build_simple(&rs, &lam, 1.0).unwrap();
            let b = build_simple(&rs, &lam, 1.0 + 1e-6).unwrap();
            assert_eq!(a.weights(), b.weights());
            for i in 0..rs.rank() {
                assert!(linalg::max_diff(a.e(i), b.e(i)) < 1e-4);
                assert!(linalg::max_diff(a.f(i), b.f(i)) < 1e-4);
                assert!(linalg::max_diff(&a.k(i), &b.k(i)) < 1e-4);
            }
        }
    }

    #[test]
    fn direct_sum_keeps_summands() {
        let rs = rs(CartanType::A1);
        let m = build_sum(&rs, &[Weight::new([1]), Weight::new([2])], 1.2).unwrap();
        assert_eq!(m.dim(), 5);
        let s = m.summands().unwrap();
        assert_eq!(s[1].offset, 2);
        assert!(m.form_invariance_residual() < 1e-12);
        let g = gram_form(&m).unwrap();
        assert!(linalg::max_diff(g.matrix(), m.form().matrix()) < 1e-12);
    }
}
