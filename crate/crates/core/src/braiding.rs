//! R-matrices, isotypic decompositions and coboundary operators on `V ⊗ W`.
//!
//! The universal R-matrix acts as `R = D · Π_k Σ_t c_t F_{β_k}^t ⊗ E_{β_k}^t`
//! with `D(v ⊗ w) = q^{(wt v | wt w)} v ⊗ w`, `q_β = q^{(β|β)/2}` and
//! `c_t = (1 − q_β^{−2})^t q_β^{t(t+1)/2} / [t]_{q_β}!`. On the
//! `V_λ`-isotypic part of `V_μ ⊗ V_ν` the operator `R₂₁R` is the scalar
//! `q^{c(λ) − c(μ) − c(ν)}` with `c(λ) = (λ|λ+2ρ)`. The coboundary operator is
//! the unitary part `σ = τ ∘ R ∘ (R₂₁R)^{−1/2}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::cartan::Weight;
use crate::error::{Error, Result};
use crate::linalg::{self, LinOperator, Matrix};
use crate::uqg::{self, quantum_factorial, ModuleRep};

/// Intertwiner residual accepted for a product order.
pub const INTERTWINER_TOL: f64 = 1e-8;
/// Residual above which no convention is accepted at all.
pub const INTERTWINER_REJECT: f64 = 1e-6;
/// Maximum disagreement between the scalar and spectral routes.
pub const PATH_REJECT: f64 = 1e-7;

/// Order of the root-vector factors in the R-matrix product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductOrder {
    /// `k = 1..n` along the reduced word.
    Forward,
    /// `k = n..1`.
    Reverse,
}

impl fmt::Display for ProductOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProductOrder::Forward => "forward",
            ProductOrder::Reverse => "reverse",
        })
    }
}

/// How `(R₂₁R)^{−1/2}` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoboundaryPath {
    /// Casimir exponents on isotypic components.
    Scalar,
    /// Eigendecomposition in a form-orthonormal frame.
    Spectral,
}

#[derive(Clone, Debug)]
pub struct RMatrix {
    pub op: LinOperator,
    pub order: ProductOrder,
    /// Scaled intertwiner residual of the accepted order.
    pub residual: f64,
}

/// The diagonal operator `q^{(wt v | wt w)}` on `V ⊗ W`.
pub fn d_operator(v: &ModuleRep, w: &ModuleRep) -> LinOperator {
    let rs = v.root_system();
    let q = v.q();
    let mut cache: BTreeMap<(&Weight, &Weight), f64> = BTreeMap::new();
    let diag: Vec<f64> = v
        .weights()
        .iter()
        .flat_map(|a| w.weights().iter().map(move |b| (a, b)))
        .map(|(a, b)| {
            *cache
                .entry((a, b))
                .or_insert_with(|| q.powf(rs.inner_f64(a, b)))
        })
        .collect();
    let n = diag.len();
    LinOperator::new(
        Matrix::from_diagonal(&linalg::Vector::from_vec(diag)),
        pair_dims(v, w),
    )
    .unwrap_or_else(|_| LinOperator::identity(vec![n]))
}

fn pair_dims(v: &ModuleRep, w: &ModuleRep) -> Vec<usize> {
    let mut dims = v.factor_dims().to_vec();
    dims.extend_from_slice(w.factor_dims());
    dims
}

fn check_pair(v: &ModuleRep, w: &ModuleRep) -> Result<()> {
    if v.root_system() != w.root_system() || v.q() != w.q() {
        return Err(Error::Invalid(
            "both factors must share the Cartan type and q".into(),
        ));
    }
    Ok(())
}

/// Quasi-R-matrix factors `Σ_t c_t F_β^t ⊗ E_β^t`, in reduced-word order.
fn root_factors(v: &ModuleRep, w: &ModuleRep) -> Vec<Matrix> {
    let rs = v.root_system();
    let q = v.q();
    let rv = uqg::root_vector_operators(v);
    let rw = uqg::root_vector_operators(w);
    let n = v.dim() * w.dim();
    let tmax = v.dim().min(w.dim());
    rs.positive_roots_fw()
        .iter()
        .enumerate()
        .map(|(k, beta)| {
            let qb = q.powf(rs.inner_f64(beta, beta) / 2.0);
            let fv = rv.f[k].matrix();
            let ew = rw.e[k].matrix();
            let mut sum = Matrix::identity(n, n);
            let mut fp = Matrix::identity(v.dim(), v.dim());
            let mut ep = Matrix::identity(w.dim(), w.dim());
            for t in 1..=tmax {
                fp = &fp * fv;
                ep = &ep * ew;
                if linalg::max_abs(&fp) * linalg::max_abs(&ep) < 1e-15 {
                    break;
                }
                let t32 = t as i32;
                let c = (1.0 - qb.powi(-2)).powi(t32) * qb.powf((t * (t + 1)) as f64 / 2.0)
                    / quantum_factorial(t as u32, qb);
                if c == 0.0 {
                    break;
                }
                sum += fp.kronecker(&ep) * c;
            }
            sum
        })
        .collect()
}

fn assemble(d: &LinOperator, factors: &[Matrix], order: ProductOrder) -> Matrix {
    let mut r = d.matrix().clone();
    match order {
        ProductOrder::Forward => factors.iter().for_each(|f| r = &r * f),
        ProductOrder::Reverse => factors.iter().rev().for_each(|f| r = &r * f),
    }
    r
}

/// Worst scaled residual of `R Δ(a) − Δ^op(a) R` over all generators `a`.
pub fn intertwiner_residual(v: &ModuleRep, w: &ModuleRep, r: &Matrix) -> f64 {
    let vw = uqg::tensor(v, w);
    let wv = uqg::tensor(w, v);
    let p = linalg::flip(v.dim(), w.dim());
    let scale_r = linalg::max_abs(r).max(1.0);
    vw.generators()
        .into_iter()
        .map(|g| {
            let x = vw.generator(g);
            let op = p.transpose() * wv.generator(g) * &p;
            let scale = scale_r * linalg::max_abs(&x).max(1.0);
            linalg::max_diff(&(r * &x), &(&op * r)) / scale
        })
        .fold(0.0, f64::max)
}

/// The R-matrix on `V ⊗ W`, with the product order pinned by the intertwiner test.
pub fn r_matrix(v: &ModuleRep, w: &ModuleRep) -> Result<RMatrix> {
    check_pair(v, w)?;
    let d = d_operator(v, w);
    if v.q() == 1.0 {
        return Ok(RMatrix {
            op: LinOperator::identity(pair_dims(v, w)),
            order: ProductOrder::Forward,
            residual: 0.0,
        });
    }
    let factors = root_factors(v, w);
    let mut best: Option<RMatrix> = None;
    for order in [ProductOrder::Forward, ProductOrder::Reverse] {
        let r = assemble(&d, &factors, order);
        let residual = intertwiner_residual(v, w, &r);
        let candidate = RMatrix {
            op: LinOperator::new(r, pair_dims(v, w))?,
            order,
            residual,
        };
        if residual < INTERTWINER_TOL {
            return Ok(candidate);
        }
        if best.as_ref().map_or(true, |b| residual < b.residual) {
            best = Some(candidate);
        }
    }
    let best = best.expect("two orders tried");
    if best.residual < INTERTWINER_REJECT {
        Ok(best)
    } else {
        Err(Error::ConventionMismatch(best.residual))
    }
}

/// `R₂₁ = τ_{W,V}ᵀ R_{W,V} τ_{W,V}` acting on `V ⊗ W`, where `τ` flips `V ⊗ W` to `W ⊗ V`.
pub fn r21(v: &ModuleRep, w: &ModuleRep) -> Result<Matrix> {
    let rwv = r_matrix(w, v)?;
    let p = linalg::flip(v.dim(), w.dim());
    Ok(p.transpose() * rwv.op.matrix() * p)
}

#[derive(Clone, Debug)]
pub struct IsotypicComponent {
    pub highest: Weight,
    pub projector: LinOperator,
    pub multiplicity: usize,
}

#[derive(Clone, Debug)]
pub struct IsotypicDecomposition {
    pub components: Vec<IsotypicComponent>,
}

impl IsotypicDecomposition {
    pub fn component(&self, lambda: &Weight) -> Option<&IsotypicComponent> {
        self.components.iter().find(|c| &c.highest == lambda)
    }

    /// Worst deviations from idempotence, mutual annihilation and completeness.
    pub fn projector_residual(&self) -> f64 {
        let Some(first) = self.components.first() else {
            return 0.0;
        };
        let n = first.projector.dim();
        let mut sum = Matrix::zeros(n, n);
        let mut worst = 0.0_f64;
        for (a, ca) in self.components.iter().enumerate() {
            let p = ca.projector.matrix();
            sum += p;
            worst = worst.max(linalg::max_diff(&(p * p), p));
            for cb in &self.components[a + 1..] {
                worst = worst.max(linalg::max_abs(&(p * cb.projector.matrix())));
            }
        }
        worst.max(linalg::max_diff(&sum, &Matrix::identity(n, n)))
    }
}

/// Decomposes a module into isotypic components.
///
/// For each dominant weight the highest weight vectors are the joint kernel of
/// the `E_i` on that weight space; they are closed under the `F_i` and the
/// projector is the form-orthogonal projection onto their span.
pub fn isotypic(m: &ModuleRep, tol: f64) -> Result<IsotypicDecomposition> {
    let rs = m.root_system();
    let dims = m.factor_dims().to_vec();
    let n = m.dim();
    if let Some(summands) = m.summands() {
        // Blocks of a direct sum are already form-orthogonal submodules.
        let mut grouped: BTreeMap<Weight, (usize, Matrix)> = BTreeMap::new();
        for s in summands {
            let entry = grouped
                .entry(s.highest.clone())
                .or_insert_with(|| (0, Matrix::zeros(n, n)));
            entry.0 += 1;
            for k in s.offset..s.offset + s.dim {
                entry.1[(k, k)] = 1.0;
            }
        }
        let components = grouped
            .into_iter()
            .rev()
            .map(|(highest, (mult, p))| {
                Ok(IsotypicComponent {
                    highest,
                    projector: LinOperator::new(p, dims.clone())?,
                    multiplicity: mult,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(IsotypicDecomposition { components });
    }
    let mut dominant = m.dominant_weights();
    // Highest first, by height (μ|ρ); ties broken by the weight order.
    dominant.sort_by(|a, b| {
        rs.inner(b, rs.rho())
            .cmp(&rs.inner(a, rs.rho()))
            .then_with(|| b.cmp(a))
    });
    let mut components = Vec::new();
    let mut total = 0;
    for lambda in dominant {
        let hw = m.highest_weight_vectors(&lambda, tol)?;
        if hw.is_empty() {
            continue;
        }
        let mult = hw.len();
        let start: Vec<_> = hw.into_iter().map(|v| (v, lambda.clone())).collect();
        let (basis, _) = m.f_closure(&start);
        let expected = mult * rs.weyl_dim(&lambda)? as usize;
        if basis.ncols() != expected {
            return Err(Error::DimensionSum(format!(
                "isotypic component V{lambda} spans {} dimensions, expected {expected}",
                basis.ncols()
            )));
        }
        total += expected;
        let projector = linalg::form_projector(&basis, m.form())?;
        components.push(IsotypicComponent {
            highest: lambda,
            projector: LinOperator::new(projector, dims.clone())?,
            multiplicity: mult,
        });
    }
    if total != n {
        return Err(Error::DimensionSum(format!(
            "isotypic components cover {total} of {n} dimensions"
        )));
    }
    Ok(IsotypicDecomposition { components })
}

/// `Σ_λ q^{s·c(λ)} P_λ`, the action of a power of the ribbon-type Casimir.
pub fn casimir_power(m: &ModuleRep, iso: &IsotypicDecomposition, s: f64) -> Matrix {
    let rs = m.root_system();
    let n = m.dim();
    let mut out = Matrix::zeros(n, n);
    for c in &iso.components {
        let expo = crate::cartan::ratio_to_f64(rs.casimir(&c.highest));
        out += c.projector.matrix() * m.q().powf(s * expo);
    }
    out
}

/// `(R₂₁R)^{−1/2}` on `V ⊗ W` from Casimir exponents:
/// `(Ω_V^{1/2} ⊗ Ω_W^{1/2}) Ω_{V⊗W}^{−1/2}`.
pub fn r21r_inv_sqrt_scalar(v: &ModuleRep, w: &ModuleRep, tol: f64) -> Result<Matrix> {
    let vw = uqg::tensor(v, w);
    let iso_v = isotypic(v, tol)?;
    let iso_w = isotypic(w, tol)?;
    let iso_vw = isotypic(&vw, tol)?;
    let left = casimir_power(v, &iso_v, 0.5).kronecker(&casimir_power(w, &iso_w, 0.5));
    Ok(left * casimir_power(&vw, &iso_vw, -0.5))
}

/// `(R₂₁R)^{−1/2}` on `V ⊗ W` by a form-orthonormal eigendecomposition.
pub fn r21r_inv_sqrt_spectral(v: &ModuleRep, w: &ModuleRep, r: &Matrix) -> Result<Matrix> {
    let prod = r21(v, w)? * r;
    let vw_form = v.form().tensor(w.form());
    let op = LinOperator::new(prod, pair_dims(v, w))?;
    Ok(linalg::inv_sqrt_psd(&op, &vw_form)?.into_matrix())
}

/// The coboundary operator `σ_{V,W} = τ ∘ R ∘ (R₂₁R)^{−1/2} : V ⊗ W → W ⊗ V`.
///
/// At `q = 1` this is exactly the flip.
pub fn coboundary(v: &ModuleRep, w: &ModuleRep, path: CoboundaryPath) -> Result<LinOperator> {
    coboundary_with_tol(v, w, path, linalg::DEFAULT_TOL)
}

pub fn coboundary_with_tol(
    v: &ModuleRep,
    w: &ModuleRep,
    path: CoboundaryPath,
    tol: f64,
) -> Result<LinOperator> {
    check_pair(v, w)?;
    let tau = linalg::flip(v.dim(), w.dim());
    let out_dims = pair_dims(w, v);
    if v.q() == 1.0 {
        return LinOperator::new(tau, out_dims);
    }
    let r = r_matrix(v, w)?;
    let t = match path {
        CoboundaryPath::Scalar => r21r_inv_sqrt_scalar(v, w, tol)?,
        CoboundaryPath::Spectral => r21r_inv_sqrt_spectral(v, w, r.op.matrix())?,
    };
    LinOperator::new(tau * r.op.matrix() * t, out_dims)
}

/// Both routes for `σ_{V,W}`; fails when they disagree by more than [`PATH_REJECT`].
/// Returns the scalar-route operator and the disagreement.
pub fn coboundary_checked(v: &ModuleRep, w: &ModuleRep, tol: f64) -> Result<(LinOperator, f64)> {
    check_pair(v, w)?;
    let tau = linalg::flip(v.dim(), w.dim());
    let out_dims = pair_dims(w, v);
    if v.q() == 1.0 {
        return Ok((LinOperator::new(tau, out_dims)?, 0.0));
    }
    let r = r_matrix(v, w)?;
    let scalar = r21r_inv_sqrt_scalar(v, w, tol)?;
    let spectral = r21r_inv_sqrt_spectral(v, w, r.op.matrix())?;
    let gap = linalg::max_diff(&scalar, &spectral);
    if gap > PATH_REJECT {
        return Err(Error::PathDisagreement(gap));
    }
    Ok((
        LinOperator::new(tau * r.op.matrix() * scalar, out_dims)?,
        gap,
    ))
}

/// `‖σ* σ − id‖` with the adjoint taken between the product forms of `V ⊗ W` and `W ⊗ V`.
pub fn unitarity_residual(v: &ModuleRep, w: &ModuleRep, sigma: &Matrix) -> f64 {
    let g_vw = v.form().tensor(w.form());
    let g_wv = w.form().tensor(v.form());
    // σ* = G_VW⁻¹ σᵀ G_WV.
    let adj = g_vw.solve(&(sigma.transpose() * g_wv.matrix()));
    let n = sigma.nrows();
    linalg::max_diff(&(adj * sigma), &Matrix::identity(n, n))
}

/// `‖σ_{V,W}* − σ_{W,V}‖`.
pub fn adjoint_pair_residual(
    v: &ModuleRep,
    w: &ModuleRep,
    sigma_vw: &Matrix,
    sigma_wv: &Matrix,
) -> f64 {
    let g_vw = v.form().tensor(w.form());
    let g_wv = w.form().tensor(v.form());
    let adj = g_vw.solve(&(sigma_vw.transpose() * g_wv.matrix()));
    linalg::max_diff(&adj, sigma_wv)
}

/// Worst residual of `σ Δ_{V⊗W}(a) = Δ_{W⊗V}(a) σ`.
pub fn module_map_residual(v: &ModuleRep, w: &ModuleRep, sigma: &Matrix) -> f64 {
    let vw = uqg::tensor(v, w);
    let wv = uqg::tensor(w, v);
    vw.generators()
        .into_iter()
        .map(|g| linalg::max_diff(&(sigma * vw.generator(g)), &(wv.generator(g) * sigma)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{CartanType, RootSystem};
    use crate::uqg::{build_fundamental, build_simple};
    use approx::assert_relative_eq;

    fn a1(q: f64) -> ModuleRep {
        build_fundamental(&RootSystem::new(CartanType::A1), 0, q).unwrap()
    }

    #[test]
    fn d_operator_entries() {
        let v = a1(1.2);
        let d = d_operator(&v, &v);
        assert_relative_eq!(d.matrix()[(0, 0)], 1.2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(d.matrix()[(1, 1)], 1.2f64.powf(-0.5), epsilon = 1e-15);
        let one = d_operator(&a1(1.0), &a1(1.0));
        assert_eq!(one.matrix(), &Matrix::identity(4, 4));
    }

    #[test]
    fn intertwiner_on_all_fundamental_pairs() {
        for t in CartanType::ALL {
            let rs = RootSystem::new(t);
            let funds: Vec<_> = (0..rs.rank())
                .map(|i| build_fundamental(&rs, i, 1.3).unwrap())
                .collect();
            for v in &funds {
                for w in &funds {
                    let r = r_matrix(v, w).unwrap();
                    assert!(r.residual < 1e-12, "{t}: {}", r.residual);
                    assert_eq!(r.order, ProductOrder::Forward);
                    let lam = &v.weights()[0];
                    let mu = &w.weights()[0];
                    let expect = 1.3f64.powf(rs.inner_f64(lam, mu));
                    assert_relative_eq!(r.op.matrix()[(0, 0)], expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn r_matrix_is_identity_at_q_one() {
        let v = a1(1.0);
        assert_eq!(
            r_matrix(&v, &v).unwrap().op.matrix(),
            &Matrix::identity(4, 4)
        );
    }

    #[test]
    fn r21r_eigenvalues_on_a1_square() {
        let v = a1(1.2);
        let r = r_matrix(&v, &v).unwrap();
        let prod = r21(&v, &v).unwrap() * r.op.matrix();
        let (ev, _) = linalg::form_eigen(&prod, &v.form().tensor(v.form()));
        assert_relative_eq!(ev[0], 1.2f64.powi(-3), epsilon = 1e-12);
        for x in &ev[1..] {
            assert_relative_eq!(*x, 1.2, epsilon = 1e-12);
        }
        let t = linalg::inv_sqrt_psd(
            &LinOperator::plain(prod).unwrap(),
            &v.form().tensor(v.form()),
        )
        .unwrap();
        let (tev, _) = linalg::form_eigen(t.matrix(), &v.form().tensor(v.form()));
        assert_relative_eq!(tev[3], 1.2f64.powf(1.5), epsilon = 1e-12);
        assert_relative_eq!(tev[0], 1.2f64.powf(-0.5), epsilon = 1e-12);
    }

    #[test]
    fn isotypic_examples() {
        let v = a1(1.2);
        let iso = isotypic(&uqg::tensor(&v, &v), 1e-9).unwrap();
        assert_eq!(iso.components.len(), 2);
        assert_eq!(iso.components[0].highest, Weight::new([2]));
        assert_eq!(iso.components[1].highest, Weight::new([0]));
        assert!(iso.projector_residual() < 1e-9);

        let rs = RootSystem::new(CartanType::A2);
        let w1 = build_fundamental(&rs, 0, 1.2).unwrap();
        let w2 = build_fundamental(&rs, 1, 1.2).unwrap();
        let iso = isotypic(&uqg::tensor(&w1, &w2), 1e-9).unwrap();
        let got: Vec<_> = iso
            .components
            .iter()
            .map(|c| (c.highest.clone(), c.multiplicity))
            .collect();
        assert_eq!(
            got,
            vec![(Weight::new([1, 1]), 1), (Weight::new([0, 0]), 1)]
        );

        let triv = uqg::trivial(&rs, 1.2).unwrap();
        let iso = isotypic(&uqg::tensor(&w1, &triv), 1e-9).unwrap();
        assert_eq!(iso.components.len(), 1);
        assert!(
            linalg::max_diff(
                iso.components[0].projector.matrix(),
                &Matrix::identity(3, 3)
            ) < 1e-12
        );
    }

    #[test]
    fn sigma_on_a1_square_is_plus_minus_one() {
        let v = a1(1.2);
        let sigma = coboundary(&v, &v, CoboundaryPath::Scalar).unwrap();
        let (ev, _) = linalg::form_eigen(sigma.matrix(), &v.form().tensor(v.form()));
        assert_relative_eq!(ev[0], -1.0, epsilon = 1e-12);
        for x in &ev[1..] {
            assert_relative_eq!(*x, 1.0, epsilon = 1e-12);
        }
        let s1 = coboundary(&a1(1.0), &a1(1.0), CoboundaryPath::Scalar).unwrap();
        assert_eq!(s1.matrix(), &linalg::flip(2, 2));
    }

    #[test]
    fn both_paths_agree_and_sigma_is_unitary() {
        for t in CartanType::ALL {
            let rs = RootSystem::new(t);
            let lams: Vec<Weight> = match t {
                CartanType::A1 => vec![Weight::new([1]), Weight::new([2])],
                _ => vec![Weight::new([1, 0]), Weight::new([0, 1])],
            };
            for a in &lams {
                for b in &lams {
                    let v = build_simple(&rs, a, 1.2).unwrap();
                    let w = build_simple(&rs, b, 1.2).unwrap();
                    let (s, gap) = coboundary_checked(&v, &w, 1e-9).unwrap();
                    assert!(gap < 1e-9, "{t} {a} {b}: {gap}");
                    assert!(unitarity_residual(&v, &w, s.matrix()) < 1e-9);
                    assert!(module_map_residual(&v, &w, s.matrix()) < 1e-8);
                    let back = coboundary(&w, &v, CoboundaryPath::Scalar).unwrap();
                    assert!(adjoint_pair_residual(&v, &w, s.matrix(), back.matrix()) < 1e-9);
                    let n = v.dim() * w.dim();
                    assert!(
                        linalg::max_diff(&(back.matrix() * s.matrix()), &Matrix::identity(n, n))
                            < 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn sigma_vv_is_a_self_adjoint_involution() {
        let v = a1(1.2);
        let s = coboundary(&v, &v, CoboundaryPath::Spectral).unwrap();
        let form = v.form().tensor(v.form());
        let adj = linalg::adjoint(&s, &form).unwrap();
        assert!(linalg::max_diff(adj.matrix(), s.matrix()) < 1e-12);
        assert!(linalg::max_diff(&(s.matrix() * s.matrix()), &Matrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn hexagon_type_identity() {
        for (t, idx) in [(CartanType::A1, [0, 0, 0]), (CartanType::A2, [0, 1, 0])] {
            let rs = RootSystem::new(t);
            let x = build_fundamental(&rs, idx[0], 1.2).unwrap();
            let y = build_fundamental(&rs, idx[1], 1.2).unwrap();
            let z = build_fundamental(&rs, idx[2], 1.2).unwrap();
            let (dx, dy, dz) = (x.dim(), y.dim(), z.dim());
            let path = CoboundaryPath::Scalar;
            let yz = uqg::tensor(&y, &z);
            let xy = uqg::tensor(&x, &y);
            let lhs = linalg::embed(coboundary(&y, &z, path).unwrap().matrix(), 1, dx)
                * coboundary(&x, &yz, path).unwrap().matrix();
            let rhs = linalg::embed(coboundary(&x, &y, path).unwrap().matrix(), dz, 1)
                * coboundary(&xy, &z, path).unwrap().matrix();
            assert!(linalg::max_diff(&lhs, &rhs) < 1e-8, "{t}");
            assert_eq!(lhs.nrows(), dx * dy * dz);
        }
    }

    #[test]
    fn continuity_at_q_one() {
        let v = a1(1.001);
        let r = r_matrix(&v, &v).unwrap();
        assert!(linalg::max_diff(r.op.matrix(), &Matrix::identity(4, 4)) < 0.05);
        let s = coboundary(&v, &v, CoboundaryPath::Scalar).unwrap();
        assert!(linalg::max_diff(s.matrix(), &linalg::flip(2, 2)) < 0.05);
    }

    #[test]
    fn reverse_order_fails_the_intertwiner_test() {
        // Guards the convention: only one product order is a valid R-matrix.
        let rs = RootSystem::new(CartanType::A2);
        let v = build_fundamental(&rs, 0, 1.2).unwrap();
        let w = build_fundamental(&rs, 1, 1.2).unwrap();
        let d = d_operator(&v, &w);
        let f = root_factors(&v, &w);
        let rev = assemble(&d, &f, ProductOrder::Reverse);
        assert!(intertwiner_residual(&v, &w, &rev) > 1e-6);
    }
}
