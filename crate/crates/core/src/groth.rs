//! Grothendieck-ring bookkeeping: decompositions into simple modules, the
//! classical characters of symmetric and exterior powers, and the cube
//! identity `S³_q V − Λ³_q V = S³ V − Λ³ V`.
//!
//! Two independent routes produce multiplicities. The quantum route counts
//! highest weight vectors (the joint kernel of the `E_i` on each dominant
//! weight space). The classical route peels a weight multiset by characters
//! computed with Freudenthal's formula in exact arithmetic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::cactus::{self, CactusAction};
use crate::cartan::{RootSystem, Weight};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::symext::{self, Kind, Subspace};
use crate::uqg::{self, ModuleRep};

/// Minimum accepted singular value of `ψ_q^λ + id`.
pub const PSI_MARGIN: f64 = 0.05;

/// A finitely supported integer combination of simple modules `V_λ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GrothElement {
    terms: BTreeMap<Weight, i64>,
}

impl GrothElement {
    pub fn new() -> Self {
        Self::default()
    }

    /// The class of a single simple module.
    pub fn simple(lambda: Weight) -> Result<Self> {
        let mut g = Self::new();
        g.add_term(lambda, 1)?;
        Ok(g)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Weight, i64)>) -> Result<Self> {
        let mut g = Self::new();
        for (w, m) in terms {
            g.add_term(w, m)?;
        }
        Ok(g)
    }

    pub fn add_term(&mut self, lambda: Weight, mult: i64) -> Result<()> {
        if !lambda.is_dominant() {
            return Err(Error::NotDominant(lambda));
        }
        let entry = self.terms.entry(lambda.clone()).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            self.terms.remove(&lambda);
        }
        Ok(())
    }

    pub fn get(&self, lambda: &Weight) -> i64 {
        self.terms.get(lambda).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> &BTreeMap<Weight, i64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|&m| m > 0)
    }

    /// `Σ m_λ · dim V_λ`.
    pub fn total_dim(&self, rs: &RootSystem) -> Result<i64> {
        self.terms
            .iter()
            .map(|(w, m)| Ok(m * rs.weyl_dim(w)? as i64))
            .sum()
    }

    /// Termwise minimum of two elements.
    pub fn termwise_min(&self, other: &GrothElement) -> GrothElement {
        let mut out = GrothElement::new();
        for (w, &m) in &self.terms {
            let k = m.min(other.get(w));
            if k != 0 {
                out.terms.insert(w.clone(), k);
            }
        }
        for (w, &m) in &other.terms {
            if !self.terms.contains_key(w) && m < 0 {
                out.terms.insert(w.clone(), m);
            }
        }
        out
    }

    /// Terms where `self` and `other` differ, as `(λ, self, other)`.
    pub fn differences(&self, other: &GrothElement) -> Vec<(Weight, i64, i64)> {
        let mut keys: Vec<&Weight> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|w| self.get(w) != other.get(w))
            .map(|w| (w.clone(), self.get(w), other.get(w)))
            .collect()
    }

    fn combine(&self, other: &GrothElement, sign: i64) -> GrothElement {
        let mut out = self.clone();
        for (w, &m) in &other.terms {
            let entry = out.terms.entry(w.clone()).or_insert(0);
            *entry += sign * m;
            if *entry == 0 {
                out.terms.remove(w);
            }
        }
        out
    }
}

impl Add for &GrothElement {
    type Output = GrothElement;
    fn add(self, rhs: &GrothElement) -> GrothElement {
        self.combine(rhs, 1)
    }
}

impl Sub for &GrothElement {
    type Output = GrothElement;
    fn sub(self, rhs: &GrothElement) -> GrothElement {
        self.combine(rhs, -1)
    }
}

impl Neg for &GrothElement {
    type Output = GrothElement;
    fn neg(self) -> GrothElement {
        GrothElement::new().combine(self, -1)
    }
}

impl fmt::Display for GrothElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest terms first.
        for (k, (w, m)) in self.terms.iter().rev().enumerate() {
            let (sign, abs) = if *m < 0 { ("-", -m) } else { ("+", *m) };
            if k == 0 {
                if *m < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if abs != 1 {
                write!(f, "{abs} ")?;
            }
            write!(f, "V{w}")?;
        }
        Ok(())
    }
}

struct Term<'a>(&'a Weight, i64);

impl Serialize for Term<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("weight", self.0)?;
        st.serialize_field("multiplicity", &self.1)?;
        st.end()
    }
}

impl Serialize for GrothElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (w, m) in self.terms.iter().rev() {
            seq.serialize_element(&Term(w, *m))?;
        }
        seq.end()
    }
}

/// Weight multiset as a map weight → multiplicity.
pub type WeightMultiset = BTreeMap<Weight, i64>;

/// The character of `V_λ` by Freudenthal's multiplicity formula.
pub fn character(rs: &RootSystem, lambda: &Weight) -> Result<WeightMultiset> {
    rs.check_rank(lambda)?;
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.clone()));
    }
    let r = rs.rank();
    let lowest = rs.apply_word(rs.w0_word(), lambda);
    let span: Vec<i64> = rs
        .weight_to_root(&(lambda - &lowest))
        .iter()
        .map(|x| x.to_integer())
        .collect();
    // Depth vectors n ≥ 0 with μ = λ − Σ n_i α_i, visited by increasing depth.
    let mut depths: Vec<Vec<i64>> = vec![vec![]];
    for &bound in &span {
        depths = depths
            .into_iter()
            .flat_map(|d| {
                (0..=bound).map(move |k| {
                    let mut e = d.clone();
                    e.push(k);
                    e
                })
            })
            .collect();
    }
    depths.sort_by_key(|d| (d.iter().sum::<i64>(), d.clone()));
    let roots: Vec<Vec<i64>> = rs
        .positive_roots()
        .iter()
        .map(|b| b.iter().map(|&x| x as i64).collect())
        .collect();
    let roots_fw = rs.positive_roots_fw();
    let to_weight = |d: &[i64]| -> Weight {
        let mut w = lambda.clone();
        for (i, &k) in d.iter().enumerate() {
            w = &w - &rs.simple_root(i).scale(k as i32);
        }
        w
    };
    let lr = lambda + rs.rho();
    let top = rs.inner(&lr, &lr);
    let mut mult: HashMap<Vec<i64>, i64> = HashMap::new();
    let mut out = WeightMultiset::new();
    for d in depths {
        let mu = to_weight(&d);
        let m = if d.iter().all(|&x| x == 0) {
            1
        } else {
            let mut num = Rational64::zero();
            for (beta, beta_fw) in roots.iter().zip(&roots_fw) {
                let mut k = 1i64;
                loop {
                    let shifted: Vec<i64> = (0..r).map(|i| d[i] - k * beta[i]).collect();
                    if shifted.iter().any(|&x| x < 0) {
                        break;
                    }
                    if let Some(&m) = mult.get(&shifted) {
                        let w = to_weight(&shifted);
                        num += rs.inner(&w, beta_fw) * Rational64::from_integer(m);
                    }
                    k += 1;
                }
            }
            let mr = &mu + rs.rho();
            let den = top - rs.inner(&mr, &mr);
            if den.is_positive() {
                let val = num * Rational64::from_integer(2) / den;
                if !val.is_integer() || val.is_negative() {
                    return Err(Error::Invalid(format!(
                        "Freudenthal recursion produced {val} at {mu}"
                    )));
                }
                val.to_integer()
            } else {
                0
            }
        };
        if m > 0 {
            mult.insert(d, m);
            out.insert(mu, m);
        }
    }
    let total: i64 = out.values().sum();
    if total != rs.weyl_dim(lambda)? as i64 {
        return Err(Error::DimensionSum(format!(
            "character of V{lambda} has total {total}"
        )));
    }
    Ok(out)
}

/// Decomposes a Weyl-invariant weight multiset into characters by repeatedly
/// removing the character of its highest remaining weight.
pub fn peel(rs: &RootSystem, multiset: &WeightMultiset) -> Result<GrothElement> {
    let mut rest: WeightMultiset = multiset
        .iter()
        .filter(|(_, &m)| m != 0)
        .map(|(w, &m)| (w.clone(), m))
        .collect();
    let mut out = GrothElement::new();
    let mut cache: HashMap<Weight, WeightMultiset> = HashMap::new();
    if let Some((w, _)) = rest.iter().find(|(_, &m)| m < 0) {
        return Err(Error::NegativePeel(w.clone()));
    }
    while !rest.is_empty() {
        let top = rest
            .keys()
            .max_by(|a, b| {
                rs.inner(a, rs.rho())
                    .cmp(&rs.inner(b, rs.rho()))
                    .then_with(|| a.cmp(b))
            })
            .cloned()
            .expect("nonempty");
        if !top.is_dominant() {
            return Err(Error::NegativePeel(top));
        }
        let m = rest[&top];
        if !cache.contains_key(&top) {
            cache.insert(top.clone(), character(rs, &top)?);
        }
        for (w, &c) in &cache[&top] {
            let entry = rest.entry(w.clone()).or_insert(0);
            *entry -= m * c;
            if *entry < 0 {
                return Err(Error::NegativePeel(w.clone()));
            }
            if *entry == 0 {
                rest.remove(w);
            }
        }
        out.add_term(top, m)?;
    }
    Ok(out)
}

/// Pointwise sums of weights: the character of a tensor product.
pub fn multiset_product(a: &WeightMultiset, b: &WeightMultiset) -> WeightMultiset {
    let mut out = WeightMultiset::new();
    for (x, &m) in a {
        for (y, &n) in b {
            *out.entry(x + y).or_insert(0) += m * n;
        }
    }
    out
}

/// Weight multiset of `S^n V` or `Λ^n V` from the list of basis weights of `V`.
pub fn power_multiset(weights: &[Weight], n: usize, kind: Kind) -> WeightMultiset {
    let mut out = WeightMultiset::new();
    let d = weights.len();
    let rank = weights.first().map_or(0, Weight::rank);
    // Non-decreasing (sym) or increasing (ext) index tuples.
    fn rec(
        start: usize,
        left: usize,
        d: usize,
        strict: bool,
        acc: Weight,
        weights: &[Weight],
        out: &mut WeightMultiset,
    ) {
        if left == 0 {
            *out.entry(acc).or_insert(0) += 1;
            return;
        }
        for i in start..d {
            let next = if strict { i + 1 } else { i };
            rec(next, left - 1, d, strict, &acc + &weights[i], weights, out);
        }
    }
    rec(
        0,
        n,
        d,
        kind == Kind::Ext,
        Weight::zero(rank),
        weights,
        &mut out,
    );
    out
}

/// Classical `S³ V` or `Λ³ V` in the Grothendieck ring, by character peeling.
pub fn classical_cube(rs: &RootSystem, weights: &[Weight], kind: Kind) -> Result<GrothElement> {
    classical_power(rs, weights, 3, kind)
}

pub fn classical_power(
    rs: &RootSystem,
    weights: &[Weight],
    n: usize,
    kind: Kind,
) -> Result<GrothElement> {
    peel(rs, &power_multiset(weights, n, kind))
}

/// Highest-weight-vector count on every dominant weight space.
pub fn decompose(m: &ModuleRep, tol: f64) -> Result<GrothElement> {
    let mut out = GrothElement::new();
    for lambda in m.dominant_weights() {
        let k = m.highest_weight_vectors(&lambda, tol)?.len();
        if k > 0 {
            out.add_term(lambda, k as i64)?;
        }
    }
    check_total(m.root_system(), &out, m.dim())?;
    Ok(out)
}

/// As [`decompose`], for the submodule of `m` spanned by a [`Subspace`].
pub fn decompose_subspace(m: &ModuleRep, sub: &Subspace, tol: f64) -> Result<GrothElement> {
    let mut out = GrothElement::new();
    let mut dominant: Vec<&Weight> = sub.weights.iter().filter(|w| w.is_dominant()).collect();
    dominant.sort();
    dominant.dedup();
    for lambda in dominant {
        let block = sub.weight_block(lambda);
        let k = uqg::highest_weight_vectors_in(m, &[], Some(&block), tol)?.len();
        if k > 0 {
            out.add_term(lambda.clone(), k as i64)?;
        }
    }
    check_total(m.root_system(), &out, sub.dim())?;
    Ok(out)
}

fn check_total(rs: &RootSystem, g: &GrothElement, dim: usize) -> Result<()> {
    let total = g.total_dim(rs)?;
    if total != dim as i64 {
        return Err(Error::DimensionSum(format!(
            "{g} has dimension {total}, module has {dim}"
        )));
    }
    Ok(())
}

/// `S³_q V` or `Λ³_q V` with the cross-check against the fixed-space description
/// `{v : a_q v = ±v, ψ_q v = v}`.
#[derive(Clone, Debug, Serialize)]
pub struct QuantumCube {
    pub kind: Kind,
    pub element: GrothElement,
    pub dim: usize,
    /// Dimension of `{v : a_q v = ±v, ψ_q v = v}`.
    pub fixed_space_dim: usize,
    /// Largest principal angle between the two descriptions.
    pub max_angle: f64,
    pub cross_check_holds: bool,
}

pub fn quantum_cube(v: &ModuleRep, kind: Kind, tol: f64) -> Result<QuantumCube> {
    let action = CactusAction::new(v, 3)?;
    quantum_cube_with(&action, kind, tol)
}

/// As [`quantum_cube`], reusing an action on `V^{⊗3}`.
pub fn quantum_cube_with(action: &CactusAction, kind: Kind, tol: f64) -> Result<QuantumCube> {
    let space = action.tensor_space();
    let sub = symext::power_subspace(action, kind, tol)?;
    let element = decompose_subspace(&space, &sub, tol)?;
    let j3 = cactus::j3_special_elements(action, 1e-8)?;
    let n = space.dim();
    let id = Matrix::identity(n, n);
    let sign = if kind == Kind::Sym { 1.0 } else { -1.0 };
    let mut stacked = Matrix::zeros(2 * n, n);
    stacked
        .view_mut((0, 0), (n, n))
        .copy_from(&(&j3.a - &id * sign));
    stacked.view_mut((n, 0), (n, n)).copy_from(&(&j3.psi - &id));
    let fixed = linalg::columns(&linalg::kernel_checked_scaled(&stacked, tol, 1.0)?, n);
    let max_angle = if fixed.ncols() == sub.dim() && sub.dim() > 0 {
        let orth = linalg::range_basis(&sub.basis, tol);
        linalg::principal_angles(&orth, &fixed)
            .into_iter()
            .fold(0.0, f64::max)
    } else if fixed.ncols() == sub.dim() {
        0.0
    } else {
        std::f64::consts::FRAC_PI_2
    };
    Ok(QuantumCube {
        kind,
        dim: sub.dim(),
        fixed_space_dim: fixed.ncols(),
        cross_check_holds: fixed.ncols() == sub.dim() && max_angle < 1e-6,
        max_angle,
        element,
    })
}

/// The classical comparison obtained by removing the greatest common
/// submodule `W` of `S²V ⊗ V` and `Λ²V ⊗ V`.
#[derive(Clone, Debug, Serialize)]
pub struct CommonPartReport {
    pub common: GrothElement,
    pub sym: GrothElement,
    pub ext: GrothElement,
    /// `sym − ext = S³V − Λ³V`.
    pub holds: bool,
}

pub fn common_part_cubes(rs: &RootSystem, weights: &[Weight]) -> Result<CommonPartReport> {
    let v: WeightMultiset = weights.iter().fold(WeightMultiset::new(), |mut acc, w| {
        *acc.entry(w.clone()).or_insert(0) += 1;
        acc
    });
    let s2v = peel(
        rs,
        &multiset_product(&power_multiset(weights, 2, Kind::Sym), &v),
    )?;
    let l2v = peel(
        rs,
        &multiset_product(&power_multiset(weights, 2, Kind::Ext), &v),
    )?;
    let common = s2v.termwise_min(&l2v);
    let sym = &s2v - &common;
    let ext = &l2v - &common;
    let s3 = classical_cube(rs, weights, Kind::Sym)?;
    let l3 = classical_cube(rs, weights, Kind::Ext)?;
    let holds = &sym - &ext == &s3 - &l3;
    Ok(CommonPartReport {
        common,
        sym,
        ext,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CubeReport {
    pub q: f64,
    pub dim: usize,
    pub sym_q: GrothElement,
    pub ext_q: GrothElement,
    pub sym: GrothElement,
    pub ext: GrothElement,
    /// `S³_q V − Λ³_q V`.
    pub lhs: GrothElement,
    /// `S³ V − Λ³ V`.
    pub rhs: GrothElement,
    pub identity_holds: bool,
    /// `S³_q V + Λ³ V = S³ V + Λ³_q V` in `K⁺`.
    pub lifted_holds: bool,
    /// Terms where the two sides differ, as `(λ, lhs, rhs)`.
    pub differing: Vec<(Weight, i64, i64)>,
    pub fixed_space_check_holds: bool,
    pub common_part: CommonPartReport,
}

/// Verifies the cube identity for `V = ⊕ m_λ V_λ`.
pub fn verify_cube_identity(
    rs: &RootSystem,
    summands: &[(Weight, usize)],
    q: f64,
    tol: f64,
) -> Result<CubeReport> {
    let highest: Vec<Weight> = summands
        .iter()
        .flat_map(|(w, m)| std::iter::repeat(w.clone()).take(*m))
        .collect();
    if highest.is_empty() {
        return Err(Error::Invalid(
            "the module needs at least one summand".into(),
        ));
    }
    let v = uqg::build_sum(rs, &highest, q)?;
    verify_cube_identity_for(&v, tol)
}

pub fn verify_cube_identity_for(v: &ModuleRep, tol: f64) -> Result<CubeReport> {
    let rs = v.root_system();
    let action = CactusAction::new(v, 3)?;
    let sq = quantum_cube_with(&action, Kind::Sym, tol)?;
    let lq = quantum_cube_with(&action, Kind::Ext, tol)?;
    let sym = classical_cube(rs, v.weights(), Kind::Sym)?;
    let ext = classical_cube(rs, v.weights(), Kind::Ext)?;
    let lhs = &sq.element - &lq.element;
    let rhs = &sym - &ext;
    let lifted_holds = &sq.element + &ext == &sym + &lq.element;
    Ok(CubeReport {
        q: v.q(),
        dim: v.dim(),
        identity_holds: lhs == rhs,
        differing: lhs.differences(&rhs),
        lifted_holds,
        fixed_space_check_holds: sq.cross_check_holds && lq.cross_check_holds,
        common_part: common_part_cubes(rs, v.weights())?,
        sym_q: sq.element,
        ext_q: lq.element,
        sym,
        ext,
        lhs,
        rhs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiComponent {
    pub highest: Weight,
    pub multiplicity: usize,
    /// Smallest singular value of `ψ_q^λ + id`.
    pub min_singular: f64,
    /// Real eigenvalues of `ψ_q^λ` (clustered).
    pub real_eigenvalues: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiReport {
    pub q: f64,
    pub components: Vec<PsiComponent>,
    pub min_singular: f64,
    /// Worst residual of `a_q ker(ψ_q − t) ⊆ ker(ψ_q − t⁻¹)`.
    pub pairing_residual: f64,
    /// `‖ψ_1³ − id‖`, reported at `q = 1` only.
    pub psi_cube_residual: Option<f64>,
    pub pass: bool,
}

/// Restricts `ψ_q` to each highest-weight space of `V^{⊗3}` and certifies that
/// `−1` is not an eigenvalue; at `q = 1` checks `ψ_1³ = id` instead.
pub fn psi_spectrum_check(v: &ModuleRep, tol: f64) -> Result<PsiReport> {
    let action = CactusAction::new(v, 3)?;
    let j3 = cactus::j3_special_elements(&action, 1e-8)?;
    let space = action.tensor_space();
    let g = space.form().matrix();
    let mut components = Vec::new();
    let mut min_singular = f64::INFINITY;
    let mut pairing_residual = 0.0_f64;
    for lambda in space.dominant_weights() {
        let hw = space.highest_weight_vectors(&lambda, tol)?;
        if hw.is_empty() {
            continue;
        }
        let h = linalg::form_orthonormalize(&linalg::columns(&hw, space.dim()), space.form());
        let ht_g = h.transpose() * g;
        let psi = &ht_g * &j3.psi * &h;
        let a = &ht_g * &j3.a * &h;
        let k = h.ncols();
        let id = Matrix::identity(k, k);
        let smin = linalg::singular_values(&(&psi + &id))
            .last()
            .copied()
            .unwrap_or(f64::INFINITY);
        min_singular = min_singular.min(smin);
        let mut reals: Vec<f64> = linalg::complex_eigenvalues(&psi)
            .into_iter()
            .filter(|(_, im)| im.abs() < linalg::EIGEN_CLUSTER_TOL)
            .map(|(re, _)| re)
            .collect();
        reals.sort_by(f64::total_cmp);
        reals.dedup_by(|x, y| (*x - *y).abs() < linalg::EIGEN_CLUSTER_TOL * y.abs().max(1.0));
        for &t in &reals {
            for x in linalg::kernel(&(&psi - &id * t), 1e-7) {
                let image = &a * x;
                let res = (&psi - &id / t) * image;
                pairing_residual = pairing_residual.max(res.amax());
            }
        }
        components.push(PsiComponent {
            highest: lambda,
            multiplicity: k,
            min_singular: smin,
            real_eigenvalues: reals,
        });
    }
    let psi_cube_residual = if v.q() == 1.0 {
        let n = space.dim();
        Some(linalg::max_diff(
            &(&j3.psi * &j3.psi * &j3.psi),
            &Matrix::identity(n, n),
        ))
    } else {
        None
    };
    let pass = match psi_cube_residual {
        Some(r) => r == 0.0,
        None => min_singular > PSI_MARGIN && pairing_residual < 1e-6,
    };
    Ok(PsiReport {
        q: v.q(),
        components,
        min_singular,
        pairing_residual,
        psi_cube_residual,
        pass,
    })
}

/// Euclidean-orthonormal basis of the highest-weight space of weight `λ`.
pub fn highest_weight_space(m: &ModuleRep, lambda: &Weight, tol: f64) -> Result<Matrix> {
    let hw = m.highest_weight_vectors(lambda, tol)?;
    Ok(linalg::range_basis(&linalg::columns(&hw, m.dim()), tol))
}
