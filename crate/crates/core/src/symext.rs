//! Quantum symmetric and exterior powers.
//!
//! `S^n_q V` is the common fixed space of the adjacent coboundaries
//! `σ_i = σ_{i,i,i+1}` on `V^{⊗n}` and `Λ^n_q V` their common `−1`-eigenspace.
//! The quotient side is `T(V)/⟨Λ²_q V⟩` (resp. `⟨S²_q V⟩`), whose degree-`n`
//! ideal component is `J^n = Σ_i V^{⊗(i−1)} ⊗ R ⊗ V^{⊗(n−i−1)}`.
//!
//! All dimensions are integer ranks taken with a relative cutoff; a singular
//! value near the cutoff aborts with [`Error::RankAmbiguous`].

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::braiding::CoboundaryPath;
use crate::cactus::{self, CactusAction, CactusGen, Parity};
use crate::cartan::Weight;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::uqg::ModuleRep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Sym,
    Ext,
}

impl Kind {
    fn eigenvalue(self) -> f64 {
        match self {
            Kind::Sym => 1.0,
            Kind::Ext => -1.0,
        }
    }

    pub fn dual(self) -> Kind {
        match self {
            Kind::Sym => Kind::Ext,
            Kind::Ext => Kind::Sym,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Sym => "sym",
            Kind::Ext => "ext",
        })
    }
}

/// A subspace of `V^{⊗n}` spanned by weight vectors, form-orthonormal.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub basis: Matrix,
    pub weights: Vec<Weight>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Basis columns of weight `mu`.
    pub fn weight_block(&self, mu: &Weight) -> Matrix {
        let cols: Vec<Vector> = self
            .weights
            .iter()
            .zip(self.basis.column_iter())
            .filter(|(w, _)| *w == mu)
            .map(|(_, c)| c.into_owned())
            .collect();
        linalg::columns(&cols, self.basis.nrows())
    }
}

/// Dimensions of a graded object in degrees `0..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedDims {
    pub dims: Vec<usize>,
}

impl GradedDims {
    pub fn new(dims: Vec<usize>, dim_v: usize) -> Result<Self> {
        if dims.first() != Some(&1) || (dims.len() > 1 && dims[1] != dim_v) {
            return Err(Error::Invalid(format!(
                "graded dimensions must start 1, {dim_v}; got {dims:?}"
            )));
        }
        Ok(GradedDims { dims })
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Classical `dim S^n` of a `d`-dimensional space.
pub fn classical_sym_dim(d: usize, n: usize) -> u64 {
    binomial((d + n) as u64 - 1, n as u64)
}

/// Classical `dim Λ^n` of a `d`-dimensional space.
pub fn classical_ext_dim(d: usize, n: usize) -> u64 {
    binomial(d as u64, n as u64)
}

/// `S^n_q V` (or `Λ^n_q V`) inside the space of `action`.
///
/// For an odd-parity action the sign twist exchanges the two kinds.
pub fn power_subspace(action: &CactusAction, kind: Kind, tol: f64) -> Result<Subspace> {
    let n = action.n();
    let space = action.tensor_space();
    let eps = kind.eigenvalue();
    let adjacent: Vec<Matrix> = (1..n)
        .map(|p| action.generator(p, p + 1))
        .collect::<Result<_>>()?;
    let mut by_weight: BTreeMap<&Weight, Vec<usize>> = BTreeMap::new();
    for (k, w) in space.weights().iter().enumerate() {
        by_weight.entry(w).or_default().push(k);
    }
    let dim = space.dim();
    let mut vectors = Vec::new();
    let mut weights = Vec::new();
    for (w, idx) in by_weight {
        let m = idx.len();
        let mut stacked = Matrix::zeros(adjacent.len() * m, m);
        for (a, s) in adjacent.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                for (r, &i) in idx.iter().enumerate() {
                    let delta = if i == j { eps } else { 0.0 };
                    stacked[(a * m + r, c)] = s[(i, j)] - delta;
                }
            }
        }
        // σ_i − ε has norm O(1), so a block that is pure roundoff is a kernel.
        for k in linalg::kernel_checked_scaled(&stacked, tol, 1.0)? {
            let mut full = Vector::zeros(dim);
            for (c, &j) in idx.iter().enumerate() {
                full[j] = k[c];
            }
            vectors.push(full);
            weights.push(w.clone());
        }
    }
    let basis = linalg::form_orthonormalize(&linalg::columns(&vectors, dim), space.form());
    Ok(Subspace { basis, weights })
}

pub fn sym_subspace(v: &ModuleRep, n: usize, tol: f64) -> Result<Subspace> {
    power_subspace(&CactusAction::new(v, n)?, Kind::Sym, tol)
}

pub fn ext_subspace(v: &ModuleRep, n: usize, tol: f64) -> Result<Subspace> {
    power_subspace(&CactusAction::new(v, n)?, Kind::Ext, tol)
}

/// Degree-`n` component of `T(V)/⟨R⟩` compared with the subspace `S^n_q V` (or `Λ^n_q V`).
#[derive(Clone, Debug, Serialize)]
pub struct QuotientComponent {
    pub n: usize,
    pub kind: Kind,
    pub dim_ideal: usize,
    pub dim_quotient: usize,
    pub dim_subspace: usize,
    pub dim_intersection: usize,
    /// `J^n ∩ S^n_q V = 0` and `dim J^n + dim S^n_q V = d^n`.
    pub embedding_holds: bool,
    /// Form-orthogonal complement of `J^n`, representing the quotient.
    #[serde(skip)]
    pub quotient_basis: Matrix,
}

pub fn quotient_component(
    v: &ModuleRep,
    n: usize,
    kind: Kind,
    tol: f64,
) -> Result<QuotientComponent> {
    let action = CactusAction::new(v, n)?;
    quotient_component_for(&action, kind, tol)
}

/// As [`quotient_component`], reusing an existing action on `V^{⊗n}`.
pub fn quotient_component_for(
    action: &CactusAction,
    kind: Kind,
    tol: f64,
) -> Result<QuotientComponent> {
    let v = action.module();
    let n = action.n();
    let d = v.dim();
    let pair = CactusAction::with_options(v, 2, action.parity(), CoboundaryPath::Scalar, tol)?;
    let relations = power_subspace(&pair, kind.dual(), tol)?.basis;
    let sub = power_subspace(action, kind, tol)?;
    let total = d.pow(n as u32);
    let per = d.pow((n - 2) as u32) * relations.ncols();
    let mut span = Matrix::zeros(total, (n - 1) * per);
    for i in 0..n - 1 {
        let block = linalg::embed(&relations, d.pow(i as u32), d.pow((n - 2 - i) as u32));
        span.view_mut((0, i * per), (total, per)).copy_from(&block);
    }
    let dim_ideal = linalg::rank_checked(&span, tol)?;
    let dim_intersection = linalg::intersection_dim(&span, &sub.basis, tol)?;
    let g = action.tensor_space().form().matrix().clone();
    let complement = linalg::columns(
        &linalg::kernel_checked(&(span.transpose() * &g), tol)?,
        total,
    );
    Ok(QuotientComponent {
        n,
        kind,
        dim_ideal,
        dim_quotient: total - dim_ideal,
        dim_subspace: sub.dim(),
        dim_intersection,
        embedding_holds: dim_intersection == 0 && dim_ideal + sub.dim() == total,
        quotient_basis: complement,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeVerdict {
    pub n: usize,
    pub sym: usize,
    pub ext: usize,
    pub classical_sym: u64,
    pub classical_ext: u64,
    pub sym_flat: bool,
    pub ext_flat: bool,
}

/// Per-degree comparison of `dim S^n_q V`, `dim Λ^n_q V` with the classical counts.
pub fn flatness(v: &ModuleRep, n_max: usize, tol: f64) -> Result<Vec<DegreeVerdict>> {
    let d = v.dim();
    let mut out = Vec::new();
    for n in 0..=n_max {
        let (sym, ext) = match n {
            0 => (1, 1),
            1 => (d, d),
            _ => {
                let action = CactusAction::new(v, n)?;
                (
                    power_subspace(&action, Kind::Sym, tol)?.dim(),
                    power_subspace(&action, Kind::Ext, tol)?.dim(),
                )
            }
        };
        let classical_sym = classical_sym_dim(d, n);
        let classical_ext = classical_ext_dim(d, n);
        out.push(DegreeVerdict {
            n,
            sym,
            ext,
            classical_sym,
            classical_ext,
            sym_flat: sym as u64 == classical_sym,
            ext_flat: ext as u64 == classical_ext,
        });
    }
    Ok(out)
}

/// Residual of the commutativity criterion on `S^n_q V` (or `Λ^n_q V` for the super variant).
#[derive(Clone, Debug, Serialize)]
pub struct CommutativityReport {
    pub n: usize,
    pub super_variant: bool,
    pub subspace_dim: usize,
    pub residual: f64,
    pub worst_generator: Option<CactusGen>,
}

/// Checks `‖π ∘ ρ_q(x) − π‖` and `‖ρ_q(x)|_S − id‖` for every generator `x` of `J_n`,
/// where `π` is the form-orthogonal projection onto `S^n_q V` along `J^n`.
pub fn commutativity_check(
    v: &ModuleRep,
    n: usize,
    super_variant: bool,
    tol: f64,
) -> Result<CommutativityReport> {
    let parity = if super_variant {
        Parity::Odd
    } else {
        Parity::Even
    };
    let action = CactusAction::with_options(v, n, parity, CoboundaryPath::Scalar, tol)?;
    // Under the sign twist the fixed space of the adjacent generators is Λ^n_q V.
    let sub = power_subspace(&action, Kind::Sym, tol)?;
    let space = action.tensor_space();
    let pi = linalg::form_projector(&sub.basis, space.form())?;
    let mut residual = 0.0_f64;
    let mut worst = None;
    for g in cactus::generators(n) {
        let rho = action.generator(g.p, g.t)?;
        let r = linalg::max_diff(&(&pi * &rho), &pi)
            .max(linalg::max_diff(&(&rho * &sub.basis), &sub.basis));
        if worst.is_none() || r > residual {
            residual = r;
            worst = Some(g);
        }
    }
    Ok(CommutativityReport {
        n,
        super_variant,
        subspace_dim: sub.dim(),
        residual,
        worst_generator: worst,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KoszulReport {
    pub sym: GradedDims,
    pub ext: GradedDims,
    /// `dim S³_q V − dim Λ³_q V`.
    pub difference: i64,
    /// `(dim V)²`.
    pub expected: i64,
    pub holds: bool,
}

/// Degrees `0..=3` of `S_q(V)` and `Λ_q(V)` and the check `dim S³_q − dim Λ³_q = (dim V)²`.
pub fn hilbert_and_koszul(v: &ModuleRep, tol: f64) -> Result<KoszulReport> {
    let verdicts = flatness(v, 3, tol)?;
    let d = v.dim();
    let sym = GradedDims::new(verdicts.iter().map(|x| x.sym).collect(), d)?;
    let ext = GradedDims::new(verdicts.iter().map(|x| x.ext).collect(), d)?;
    let difference = sym.dims[3] as i64 - ext.dims[3] as i64;
    let expected = (d * d) as i64;
    Ok(KoszulReport {
        sym,
        ext,
        difference,
        expected,
        holds: difference == expected,
    })
}
