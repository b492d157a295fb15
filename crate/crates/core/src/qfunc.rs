//! Quadratic functions on `Rⁿ`, the lift of lattice points into the space of
//! quadratic functions without constant term, and quadratic rank.
//!
//! A function is stored as `F(x) = xᵀ·gram·x + linear·x + constant`. Its
//! coefficient vector is taken over the monomials `xᵢxⱼ (i ≤ j)`, then `xᵢ`,
//! then `1`, so the `xᵢxⱼ` coefficient is `2·gram[i][j]` off the diagonal.

use crate::exact::{
    self, definiteness, dot, primitive, rat, Definiteness, Int, Mat, Rat,
};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QfuncError {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid rational {0:?}")]
    BadRational(String),
}

/// `dim 𝓕(n)`: number of monomials of degree at most two in `n` variables.
pub fn monomial_count(n: usize) -> usize {
    n * (n + 1) / 2 + n + 1
}

/// Monomial values `(xᵢxⱼ)_{i≤j}, (xᵢ), 1` at an integer point.
pub fn monomials(z: &[i64]) -> Vec<Int> {
    let n = z.len();
    let mut out = Vec::with_capacity(monomial_count(n));
    for i in 0..n {
        for j in i..n {
            out.push(Int::from(z[i]) * Int::from(z[j]));
        }
    }
    out.extend(z.iter().map(|&x| Int::from(x)));
    out.push(Int::one());
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuadraticFunctionJson", into = "QuadraticFunctionJson")]
pub struct QuadraticFunction {
    dim: usize,
    gram: Mat,
    linear: Vec<Rat>,
    constant: Rat,
}

impl QuadraticFunction {
    pub fn new(gram: Mat, linear: Vec<Rat>, constant: Rat) -> Result<Self, QfuncError> {
        if !gram.is_symmetric() {
            return Err(QfuncError::NotSymmetric);
        }
        if linear.len() != gram.rows() {
            return Err(QfuncError::Dimension { expected: gram.rows(), found: linear.len() });
        }
        Ok(QuadraticFunction { dim: gram.rows(), gram, linear, constant })
    }

    pub fn zero(n: usize) -> Self {
        QuadraticFunction { dim: n, gram: Mat::zeros(n, n), linear: vec![Rat::zero(); n], constant: Rat::zero() }
    }

    /// Builds from small integer data: gram (row-major), linear part, constant.
    pub fn from_ints(n: usize, gram: &[i64], linear: &[i64], constant: i64) -> Result<Self, QfuncError> {
        Self::new(Mat::from_ints(n, n, gram), exact::to_rat_vec(linear), rat(constant))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn linear(&self) -> &[Rat] {
        &self.linear
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    pub fn from_coeffs(n: usize, c: &[Rat]) -> Self {
        assert_eq!(c.len(), monomial_count(n));
        let mut gram = Mat::zeros(n, n);
        let mut k = 0;
        let half = exact::frac(1, 2);
        for i in 0..n {
            for j in i..n {
                if i == j {
                    gram[(i, i)] = c[k].clone();
                } else {
                    let v = &c[k] * &half;
                    gram[(i, j)] = v.clone();
                    gram[(j, i)] = v;
                }
                k += 1;
            }
        }
        let linear = c[k..k + n].to_vec();
        let constant = c[k + n].clone();
        QuadraticFunction { dim: n, gram, linear, constant }
    }

    pub fn from_int_coeffs(n: usize, c: &[Int]) -> Self {
        let r: Vec<Rat> = exact::int_to_rat_vec(c);
        Self::from_coeffs(n, &r)
    }

    pub fn coeffs(&self) -> Vec<Rat> {
        let n = self.dim;
        let mut out = Vec::with_capacity(monomial_count(n));
        let two = rat(2);
        for i in 0..n {
            for j in i..n {
                if i == j {
                    out.push(self.gram[(i, i)].clone());
                } else {
                    out.push(&self.gram[(i, j)] * &two);
                }
            }
        }
        out.extend(self.linear.iter().cloned());
        out.push(self.constant.clone());
        out
    }

    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.dim);
        self.gram.quad(x) + dot(&self.linear, x) + &self.constant
    }

    /// Exact value at an integer point.
    pub fn eval_int(&self, z: &[i64]) -> Rat {
        assert_eq!(z.len(), self.dim);
        let mut s = self.constant.clone();
        for i in 0..self.dim {
            if z[i] == 0 {
                continue;
            }
            let zi = Int::from(z[i]);
            let mut row = &self.gram[(i, i)] * Rat::from_integer(zi.clone());
            for j in i + 1..self.dim {
                if z[j] != 0 && !self.gram[(i, j)].is_zero() {
                    row += &self.gram[(i, j)] * Rat::from_integer(Int::from(2 * z[j]));
                }
            }
            row += &self.linear[i];
            s += row * Rat::from_integer(zi);
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut gram = self.gram.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                gram[(i, j)] += &other.gram[(i, j)];
            }
        }
        QuadraticFunction {
            dim: self.dim,
            gram,
            linear: self.linear.iter().zip(&other.linear).map(|(a, b)| a + b).collect(),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn scale(&self, s: &Rat) -> Self {
        QuadraticFunction {
            dim: self.dim,
            gram: self.gram.map(|x| x * s),
            linear: self.linear.iter().map(|x| x * s).collect(),
            constant: &self.constant * s,
        }
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: &Rat, other: &Self) -> Self {
        self.add(&other.scale(s))
    }

    pub fn shift_constant(&self, delta: &Rat) -> Self {
        let mut out = self.clone();
        out.constant += delta;
        out
    }

    pub fn is_zero(&self) -> bool {
        self.gram.is_zero() && self.linear.iter().all(Zero::is_zero) && self.constant.is_zero()
    }

    pub fn definiteness(&self) -> Definiteness {
        definiteness(&self.gram).expect("gram is symmetric by construction")
    }

    /// Primitive integer coefficient vector of the normalized representative.
    pub fn primitive_coeffs(&self) -> Vec<Int> {
        self.normalized().coeffs().iter().map(|x| x.to_integer()).collect()
    }

    /// Representative of the ray `R₊·self` up to sign: primitive integer
    /// coefficients, oriented so that a nonzero semidefinite gram part is
    /// positive semidefinite, otherwise so the leading coefficient is positive.
    pub fn normalized(&self) -> Self {
        let mut c = primitive(&self.coeffs());
        let flip = if self.gram.is_zero() {
            c.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative())
        } else if is_psd(&self.gram) {
            false
        } else if is_psd(&self.gram.map(|x| -x)) {
            true
        } else {
            c.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative())
        };
        if flip {
            for x in c.iter_mut() {
                *x = -&*x;
            }
        }
        Self::from_int_coeffs(self.dim, &c)
    }

    /// Scales by a positive factor to primitive integer coefficients, keeping orientation.
    pub fn positive_primitive(&self) -> Self {
        Self::from_int_coeffs(self.dim, &primitive(&self.coeffs()))
    }

    /// `x ↦ self(M·x + s)` for an `n × k` matrix `M`, a function on `Rᵏ`.
    pub fn compose_affine(&self, m: &Mat, s: &[Rat]) -> Self {
        assert_eq!(m.rows(), self.dim);
        assert_eq!(s.len(), self.dim);
        let mt = m.transpose();
        let gram = mt.mul(&self.gram).mul(m);
        let qs = self.gram.mul_vec(s);
        let two = rat(2);
        let shifted: Vec<Rat> = qs.iter().zip(&self.linear).map(|(a, l)| a * &two + l).collect();
        let linear = mt.mul_vec(&shifted);
        let constant = self.evaluate(s);
        QuadraticFunction { dim: m.cols(), gram, linear, constant }
    }

    /// Center `c = -½·gram⁻¹·linear` when the gram part is invertible.
    pub fn center(&self) -> Option<Vec<Rat>> {
        let inv = exact::inverse(&self.gram)?;
        let half = exact::frac(-1, 2);
        Some(inv.mul_vec(&self.linear).into_iter().map(|x| x * &half).collect())
    }
}

fn is_psd(m: &Mat) -> bool {
    !matches!(definiteness(m), Ok(Definiteness::Indefinite { .. }) | Err(_))
}

/// A point of `𝓕₀(n)`: symmetric block plus vector block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiftedPoint {
    pub sym: Mat,
    pub vec: Vec<Rat>,
}

impl LiftedPoint {
    pub fn dim(&self) -> usize {
        self.vec.len()
    }
}

/// The lift `u ↦ (x ↦ xᵀ(uuᵀ)x + uᵀx)`.
pub fn d_map(u: &[i64]) -> LiftedPoint {
    LiftedPoint { sym: v_map(u), vec: exact::to_rat_vec(u) }
}

/// Gram matrix `uuᵀ` of the rank-one form attached to `u`.
pub fn v_map(u: &[i64]) -> Mat {
    let n = u.len();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = rat(u[i] * u[j]);
        }
    }
    m
}

/// The point `I` with identity symmetric block and zero vector block.
pub fn identity_point(n: usize) -> LiftedPoint {
    LiftedPoint { sym: Mat::identity(n), vec: vec![Rat::zero(); n] }
}

/// `trace(gram·sym) + linear·vec`.
pub fn pairing(f: &QuadraticFunction, p: &LiftedPoint) -> Rat {
    assert_eq!(f.dim(), p.dim());
    let n = f.dim();
    let mut s = dot(f.linear(), &p.vec);
    for i in 0..n {
        for j in 0..n {
            let a = &f.gram()[(i, j)];
            let b = &p.sym[(j, i)];
            if !a.is_zero() && !b.is_zero() {
                s += a * b;
            }
        }
    }
    s
}

/// One row of monomial values per point.
pub fn evaluation_rows(points: &[Vec<i64>]) -> Vec<Vec<Int>> {
    points.iter().map(|p| monomials(p)).collect()
}

/// Dimension of the space of quadratic functions on `Rⁿ` vanishing on `points`.
pub fn qrank(points: &[Vec<i64>], n: usize) -> usize {
    assert!(points.iter().all(|p| p.len() == n), "point dimension mismatch");
    let cols = monomial_count(n);
    let e = exact::echelon_int(evaluation_rows(points), cols);
    cols - e.rank()
}

/// Basis of the quadratic functions vanishing on `points`, each with a primitive integer coefficient vector.
pub fn vanishing_space(points: &[Vec<i64>], n: usize) -> Vec<QuadraticFunction> {
    assert!(points.iter().all(|p| p.len() == n), "point dimension mismatch");
    let cols = monomial_count(n);
    let e = exact::echelon_int(evaluation_rows(points), cols);
    e.kernel().iter().map(|c| QuadraticFunction::from_int_coeffs(n, c)).collect()
}

pub fn parse_rat(s: &str) -> Result<Rat, QfuncError> {
    Rat::from_str(s.trim()).map_err(|_| QfuncError::BadRational(s.to_string()))
}

#[derive(Serialize, Deserialize)]
struct QuadraticFunctionJson {
    dim: usize,
    gram: Vec<Vec<String>>,
    lin: Vec<String>,
    #[serde(rename = "const")]
    constant: String,
}

impl From<QuadraticFunction> for QuadraticFunctionJson {
    fn from(f: QuadraticFunction) -> Self {
        QuadraticFunctionJson {
            dim: f.dim,
            gram: f.gram.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            lin: f.linear.iter().map(|x| x.to_string()).collect(),
            constant: f.constant.to_string(),
        }
    }
}

impl TryFrom<QuadraticFunctionJson> for QuadraticFunction {
    type Error = QfuncError;

    fn try_from(j: QuadraticFunctionJson) -> Result<Self, QfuncError> {
        if j.gram.len() != j.dim {
            return Err(QfuncError::Dimension { expected: j.dim, found: j.gram.len() });
        }
        let mut rows = Vec::with_capacity(j.dim);
        for r in &j.gram {
            if r.len() != j.dim {
                return Err(QfuncError::Dimension { expected: j.dim, found: r.len() });
            }
            rows.push(r.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?);
        }
        let linear = j.lin.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>()?;
        QuadraticFunction::new(Mat::from_rows(j.dim, &rows), linear, parse_rat(&j.constant)?)
    }
}
