//! Root-system and weight-lattice data for the supported Cartan types.
//!
//! Weights are stored in fundamental-weight coordinates, so a weight is
//! dominant exactly when all of its coordinates are non-negative. The
//! bilinear form is normalized so that short roots have squared length 2,
//! and every quantity in this module is exact rational arithmetic.
//!
//! Generator indices are 0-based in code (`0..rank`). For B2 the first
//! simple root is long and the second is short, so `d = (2, 1)`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CartanType {
    A1,
    A2,
    B2,
}

impl CartanType {
    pub const ALL: [CartanType; 3] = [CartanType::A1, CartanType::A2, CartanType::B2];

    pub fn rank(self) -> usize {
        match self {
            CartanType::A1 => 1,
            CartanType::A2 | CartanType::B2 => 2,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CartanType::A1 => "A1",
            CartanType::A2 => "A2",
            CartanType::B2 => "B2",
        };
        f.write_str(name)
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(CartanType::A1),
            "A2" => Ok(CartanType::A2),
            "B2" => Ok(CartanType::B2),
            _ => Err(Error::UnsupportedType(s.to_string())),
        }
    }
}

/// An integral weight in fundamental-weight coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(Vec<i32>);

impl Weight {
    pub fn new(coords: impl Into<Vec<i32>>) -> Self {
        Weight(coords.into())
    }

    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// The `i`-th fundamental weight.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Weight(c)
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i32) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        debug_assert_eq!(self.rank(), rhs.rank());
        Weight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(self.0.iter().map(|a| -a).collect())
    }
}

/// Static Cartan data for one supported type.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSystem {
    cartan_type: CartanType,
    cartan_matrix: Vec<Vec<i32>>,
    symmetrizers: Vec<i32>,
    fw_gram: Vec<Vec<Rational64>>,
    positive_roots: Vec<Vec<i32>>,
    w0_word: Vec<usize>,
    rho: Weight,
}

/// Parses a type name and builds its root system.
pub fn build_root_system(name: &str) -> Result<RootSystem> {
    Ok(RootSystem::new(name.parse()?))
}

impl RootSystem {
    pub fn new(cartan_type: CartanType) -> Self {
        let (cartan_matrix, symmetrizers, positive_roots, w0_word) = match cartan_type {
            CartanType::A1 => (vec![vec![2]], vec![1], vec![vec![1]], vec![0]),
            CartanType::A2 => (
                vec![vec![2, -1], vec![-1, 2]],
                vec![1, 1],
                vec![vec![1, 0], vec![1, 1], vec![0, 1]],
                vec![0, 1, 0],
            ),
            CartanType::B2 => (
                vec![vec![2, -1], vec![-2, 2]],
                vec![2, 1],
                vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]],
                vec![0, 1, 0, 1],
            ),
        };
        let rank = cartan_type.rank();
        // (w_i | a_j) = delta_ij d_j with a_j = sum_k C_kj w_k gives G C = diag(d).
        let c: Vec<Vec<Rational64>> = cartan_matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| Rational64::from_integer(x as i64))
                    .collect()
            })
            .collect();
        let c_inv = rational_inverse(&c);
        let fw_gram = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| c_inv[i][j] * Rational64::from_integer(symmetrizers[i] as i64))
                    .collect()
            })
            .collect();
        RootSystem {
            cartan_type,
            cartan_matrix,
            symmetrizers,
            fw_gram,
            positive_roots,
            w0_word,
            rho: Weight(vec![1; rank]),
        }
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan_matrix.len()
    }

    /// Entry `a_ij = (a_i | a_j) / d_i`.
    pub fn cartan_entry(&self, i: usize, j: usize) -> i32 {
        self.cartan_matrix[i][j]
    }

    pub fn cartan_matrix(&self) -> &[Vec<i32>] {
        &self.cartan_matrix
    }

    /// `d_i = (a_i | a_i) / 2`.
    pub fn symmetrizer(&self, i: usize) -> i32 {
        self.symmetrizers[i]
    }

    pub fn symmetrizers(&self) -> &[i32] {
        &self.symmetrizers
    }

    /// Gram matrix `(w_i | w_j)` of the fundamental weights.
    pub fn fw_gram(&self) -> &[Vec<Rational64>] {
        &self.fw_gram
    }

    /// Positive roots in simple-root coordinates, ordered along [`Self::w0_word`].
    pub fn positive_roots(&self) -> &[Vec<i32>] {
        &self.positive_roots
    }

    /// The fixed reduced word for the longest Weyl group element (0-based).
    pub fn w0_word(&self) -> &[usize] {
        &self.w0_word
    }

    pub fn rho(&self) -> &Weight {
        &self.rho
    }

    pub fn check_generator(&self, i: usize) -> Result<()> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(Error::GeneratorIndex {
                index: i,
                rank: self.rank(),
            })
        }
    }

    pub fn check_rank(&self, w: &Weight) -> Result<()> {
        if w.rank() == self.rank() {
            Ok(())
        } else {
            Err(Error::RankMismatch {
                expected: self.rank(),
                got: w.rank(),
            })
        }
    }

    /// Simple root `a_i` in fundamental-weight coordinates (column `i` of the Cartan matrix).
    pub fn simple_root(&self, i: usize) -> Weight {
        Weight((0..self.rank()).map(|k| self.cartan_matrix[k][i]).collect())
    }

    /// Converts simple-root coordinates into fundamental-weight coordinates.
    pub fn root_to_weight(&self, root: &[i32]) -> Weight {
        let r = self.rank();
        Weight(
            (0..r)
                .map(|k| (0..r).map(|j| self.cartan_matrix[k][j] * root[j]).sum())
                .collect(),
        )
    }

    /// Converts a weight into (rational) simple-root coordinates.
    pub fn weight_to_root(&self, w: &Weight) -> Vec<Rational64> {
        let c: Vec<Vec<Rational64>> = self
            .cartan_matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| Rational64::from_integer(x as i64))
                    .collect()
            })
            .collect();
        let inv = rational_inverse(&c);
        (0..self.rank())
            .map(|i| {
                (0..self.rank())
                    .map(|j| inv[i][j] * Rational64::from_integer(w.0[j] as i64))
                    .sum()
            })
            .collect()
    }

    pub fn positive_roots_fw(&self) -> Vec<Weight> {
        self.positive_roots
            .iter()
            .map(|r| self.root_to_weight(r))
            .collect()
    }

    /// Exact value of `(mu | nu)`.
    pub fn weight_inner(&self, mu: &Weight, nu: &Weight) -> Result<Rational64> {
        self.check_rank(mu)?;
        self.check_rank(nu)?;
        Ok(self.inner(mu, nu))
    }

    pub(crate) fn inner(&self, mu: &Weight, nu: &Weight) -> Rational64 {
        let mut acc = Rational64::zero();
        for (i, &a) in mu.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in nu.0.iter().enumerate() {
                acc += self.fw_gram[i][j] * Rational64::from_integer(a as i64 * b as i64);
            }
        }
        acc
    }

    pub(crate) fn inner_f64(&self, mu: &Weight, nu: &Weight) -> f64 {
        ratio_to_f64(self.inner(mu, nu))
    }

    /// Simple reflection `s_i(mu) = mu - <mu, a_i^v> a_i`.
    pub fn reflect(&self, i: usize, mu: &Weight) -> Weight {
        let a = self.simple_root(i);
        &mu.clone() - &a.scale(mu.0[i])
    }

    /// Image of `mu` under `w_{i_1} ... w_{i_k}` (rightmost letter acts first).
    pub fn apply_word(&self, word: &[usize], mu: &Weight) -> Weight {
        word.iter()
            .rev()
            .fold(mu.clone(), |acc, &i| self.reflect(i, &acc))
    }

    /// Recomputes `beta_k = w_{i_1} ... w_{i_{k-1}}(a_{i_k})` from the reduced word.
    pub fn roots_from_word(&self) -> Vec<Weight> {
        (0..self.w0_word.len())
            .map(|k| {
                let alpha = self.simple_root(self.w0_word[k]);
                self.apply_word(&self.w0_word[..k], &alpha)
            })
            .collect()
    }

    /// `(lambda | lambda + 2 rho)`, the Casimir exponent.
    pub fn casimir(&self, lambda: &Weight) -> Rational64 {
        let shifted = lambda + &self.rho.scale(2);
        self.inner(lambda, &shifted)
    }

    /// Classical Weyl dimension formula.
    pub fn weyl_dim(&self, lambda: &Weight) -> Result<u64> {
        self.check_rank(lambda)?;
        if !lambda.is_dominant() {
            return Err(Error::NotDominant(lambda.clone()));
        }
        let shifted = lambda + &self.rho;
        let mut num = Rational64::one();
        for beta in self.positive_roots_fw() {
            num *= self.inner(&shifted, &beta) / self.inner(&self.rho, &beta);
        }
        debug_assert!(num.is_integer() && num.is_positive());
        Ok(num.to_integer() as u64)
    }

    /// `q_i = q^{d_i}`.
    pub fn q_i(&self, q: f64, i: usize) -> f64 {
        q.powi(self.symmetrizers[i])
    }
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    r.to_f64().expect("small rationals convert")
}

fn rational_inverse(m: &[Vec<Rational64>]) -> Vec<Vec<Rational64>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational64::one()
                } else {
                    Rational64::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrices are invertible");
        a.swap(col, pivot);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..2 * n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}
