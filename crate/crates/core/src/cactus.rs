//! The cactus group `J_n` acting on `V^{⊗n}` through coboundary operators.
//!
//! Generators `s_{p,t}` (1-based, `p < t`) reverse the interval `p..=t`.
//! With `σ_{p,r,t}` the coboundary between the grouped blocks `p..=r` and
//! `r+1..=t`, the action is `s_{p,p+1} = σ_{p,p,p+1}` and
//! `s_{p,t} = σ_{p,p,t} ∘ s_{p+1,t}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;

use crate::braiding::{self, CoboundaryPath};
use crate::error::{Error, Result};
use crate::linalg::{self, LinOperator, Matrix};
use crate::uqg::{self, ModuleRep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// A generator `s_{p,t}` of `J_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CactusGen {
    pub p: usize,
    pub t: usize,
}

impl fmt::Display for CactusGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s({},{})", self.p, self.t)
    }
}

/// A word in the generators of `J_n`, applied right to left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CactusWord {
    n: usize,
    letters: Vec<CactusGen>,
}

impl CactusWord {
    pub fn new(n: usize, letters: Vec<CactusGen>) -> Result<Self> {
        for g in &letters {
            check_gen(n, g.p, g.t)?;
        }
        Ok(CactusWord { n, letters })
    }

    pub fn generator(n: usize, p: usize, t: usize) -> Result<Self> {
        Self::new(n, vec![CactusGen { p, t }])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[CactusGen] {
        &self.letters
    }
}

fn check_gen(n: usize, p: usize, t: usize) -> Result<()> {
    if n >= 2 && 1 <= p && p < t && t <= n {
        Ok(())
    } else {
        Err(Error::CactusIndex { p, t, n })
    }
}

/// All generators `s_{p,t}` of `J_n`.
pub fn generators(n: usize) -> Vec<CactusGen> {
    (1..=n)
        .flat_map(|p| (p + 1..=n).map(move |t| CactusGen { p, t }))
        .collect()
}

/// The `J_n` action on `V^{⊗n}`, with coboundaries cached per block shape.
pub struct CactusAction {
    v: ModuleRep,
    n: usize,
    parity: Parity,
    path: CoboundaryPath,
    tol: f64,
    blocks: Mutex<HashMap<(usize, usize), Matrix>>,
    gens: Mutex<HashMap<(usize, usize), Matrix>>,
}

impl CactusAction {
    pub fn new(v: &ModuleRep, n: usize) -> Result<Self> {
        Self::with_options(
            v,
            n,
            Parity::Even,
            CoboundaryPath::Scalar,
            linalg::DEFAULT_TOL,
        )
    }

    pub fn with_options(
        v: &ModuleRep,
        n: usize,
        parity: Parity,
        path: CoboundaryPath,
        tol: f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid(format!(
                "cactus action needs n >= 2, got {n}"
            )));
        }
        Ok(CactusAction {
            v: v.clone(),
            n,
            parity,
            path,
            tol,
            blocks: Mutex::new(HashMap::new()),
            gens: Mutex::new(HashMap::new()),
        })
    }

    pub fn module(&self) -> &ModuleRep {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Side length `(dim V)^n`.
    pub fn space_dim(&self) -> usize {
        self.v.dim().pow(self.n as u32)
    }

    fn space_dims(&self) -> Vec<usize> {
        vec![self.v.dim(); self.n]
    }

    /// `σ_{V^{⊗a}, V^{⊗b}}`, sign-twisted by `(−1)^{ab}` for odd `V`.
    pub fn block_coboundary(&self, a: usize, b: usize) -> Result<Matrix> {
        if let Some(m) = self.blocks.lock().expect("cache lock").get(&(a, b)) {
            return Ok(m.clone());
        }
        let x = uqg::tensor_power(&self.v, a);
        let y = uqg::tensor_power(&self.v, b);
        let mut sigma = braiding::coboundary_with_tol(&x, &y, self.path, self.tol)?.into_matrix();
        if self.parity == Parity::Odd && (a * b) % 2 == 1 {
            sigma.neg_mut();
        }
        self.blocks
            .lock()
            .expect("cache lock")
            .insert((a, b), sigma.clone());
        Ok(sigma)
    }

    /// `σ_{p,r,t}`: identity outside `p..=t`, the block coboundary inside.
    pub fn sigma_prt(&self, p: usize, r: usize, t: usize) -> Result<LinOperator> {
        let n = self.n;
        if !(1 <= p && p <= r && r < t && t <= n) {
            return Err(Error::BlockIndex { p, r, t, n });
        }
        let d = self.v.dim();
        let inner = self.block_coboundary(r - p + 1, t - r)?;
        let m = linalg::embed(&inner, d.pow((p - 1) as u32), d.pow((n - t) as u32));
        LinOperator::new(m, self.space_dims())
    }

    /// `ρ_q(s_{p,t})`.
    pub fn generator(&self, p: usize, t: usize) -> Result<Matrix> {
        check_gen(self.n, p, t)?;
        if let Some(m) = self.gens.lock().expect("cache lock").get(&(p, t)) {
            return Ok(m.clone());
        }
        let head = self.sigma_prt(p, p, t)?.into_matrix();
        let m = if t == p + 1 {
            head
        } else {
            head * self.generator(p + 1, t)?
        };
        self.gens
            .lock()
            .expect("cache lock")
            .insert((p, t), m.clone());
        Ok(m)
    }

    /// `ρ_q(w)`, composing letters right to left.
    pub fn act(&self, w: &CactusWord) -> Result<LinOperator> {
        if w.n() != self.n {
            return Err(Error::Invalid(format!(
                "word for J_{} applied to a J_{} action",
                w.n(),
                self.n
            )));
        }
        let dim = self.space_dim();
        let mut out = Matrix::identity(dim, dim);
        for g in w.letters() {
            out *= self.generator(g.p, g.t)?;
        }
        LinOperator::new(out, self.space_dims())
    }

    /// `V^{⊗n}` as a module.
    pub fn tensor_space(&self) -> ModuleRep {
        uqg::tensor_power(&self.v, self.n)
    }
}

/// `(−1)^{ij} σ_{V,W}` for parities `i`, `j`.
pub fn super_coboundary(
    v: &ModuleRep,
    par_v: Parity,
    w: &ModuleRep,
    par_w: Parity,
) -> Result<LinOperator> {
    let sigma = braiding::coboundary(v, w, CoboundaryPath::Scalar)?;
    if par_v.bit() * par_w.bit() == 1 {
        let dims = sigma.space_dims().to_vec();
        LinOperator::new(-sigma.into_matrix(), dims)
    } else {
        Ok(sigma)
    }
}

/// Permutation matrix of the interval reversal `ŝ_{p,t}` on `V^{⊗n}`.
pub fn interval_reversal(d: usize, n: usize, p: usize, t: usize) -> Result<Matrix> {
    check_gen(n, p, t)?;
    let total = d.pow(n as u32);
    let mut m = Matrix::zeros(total, total);
    let mut digits = vec![0usize; n];
    for idx in 0..total {
        let mut x = idx;
        for k in (0..n).rev() {
            digits[k] = x % d;
            x /= d;
        }
        let mut out = digits.clone();
        out[p - 1..t].reverse();
        let target = out.iter().fold(0, |acc, &v| acc * d + v);
        m[(target, idx)] = 1.0;
    }
    Ok(m)
}

/// Worst residuals of the defining relations of `J_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CactusRelations {
    /// `s_{p,t}² = 1`.
    pub involution: f64,
    /// Disjoint generators commute.
    pub disjoint: f64,
    /// `s_{p,t} s_{k,l} = s_{i,j} s_{p,t}` for `p ≤ k < l ≤ t`, `i + l = j + k = p + t`.
    pub nesting: f64,
}

impl CactusRelations {
    pub fn max(&self) -> f64 {
        self.involution.max(self.disjoint).max(self.nesting)
    }
}

pub fn relation_residuals(action: &CactusAction) -> Result<CactusRelations> {
    let n = action.n();
    let dim = action.space_dim();
    let id = Matrix::identity(dim, dim);
    let gens = generators(n);
    let mut out = CactusRelations::default();
    for g in &gens {
        let s = action.generator(g.p, g.t)?;
        out.involution = out.involution.max(linalg::max_diff(&(&s * &s), &id));
        for h in &gens {
            let u = action.generator(h.p, h.t)?;
            if g.t < h.p || h.t < g.p {
                out.disjoint = out.disjoint.max(linalg::max_diff(&(&s * &u), &(&u * &s)));
            } else if g.p <= h.p && h.t <= g.t && g != h {
                let i = g.p + g.t - h.t;
                let j = g.p + g.t - h.p;
                let w = action.generator(i, j)?;
                out.nesting = out.nesting.max(linalg::max_diff(&(&s * &u), &(&w * &s)));
            }
        }
    }
    Ok(out)
}

/// Worst residual of `ρ_q(s_{p,t}) Δ(a) = Δ(a) ρ_q(s_{p,t})` over generators.
pub fn module_map_residual(action: &CactusAction) -> Result<f64> {
    let space = action.tensor_space();
    let mut worst = 0.0_f64;
    for g in generators(action.n()) {
        let s = action.generator(g.p, g.t)?;
        for x in space.generators() {
            let a = space.generator(x);
            worst = worst.max(linalg::max_diff(&(&s * &a), &(&a * &s)));
        }
    }
    Ok(worst)
}

/// The distinguished elements `a = s_{12}`, `b = s_{23}`, `ψ = s_{13} s_{12}` of `J_3`.
#[derive(Clone, Debug)]
pub struct J3Elements {
    pub a: Matrix,
    pub b: Matrix,
    pub psi: Matrix,
    /// Worst residual of `a² = b² = 1`, `ψ a = b ψ`, `a ψ a = ψ⁻¹`.
    pub residual: f64,
}

/// Computes `a_q`, `b_q`, `ψ_q` on `V^{⊗3}` and verifies the `J_3` relations.
pub fn j3_special_elements(action: &CactusAction, tol: f64) -> Result<J3Elements> {
    if action.n() != 3 {
        return Err(Error::Invalid(
            "the J_3 elements need an action on V⊗V⊗V".into(),
        ));
    }
    let a = action.generator(1, 2)?;
    let b = action.generator(2, 3)?;
    let psi = action.generator(1, 3)? * &a;
    let dim = action.space_dim();
    let id = Matrix::identity(dim, dim);
    let mut residual = linalg::max_diff(&(&a * &a), &id);
    residual = residual.max(linalg::max_diff(&(&b * &b), &id));
    residual = residual.max(linalg::max_diff(&(&psi * &a), &(&b * &psi)));
    // ψ⁻¹ is compared through a ψ a ψ = 1 to avoid an explicit inverse.
    residual = residual.max(linalg::max_diff(&(&a * &psi * &a * &psi), &id));
    if residual >= tol {
        return Err(Error::RelationResidual {
            relation: "J_3 relations for a, b, psi".into(),
            residual,
            tolerance: tol,
        });
    }
    Ok(J3Elements {
        a,
        b,
        psi,
        residual,
    })
}
