//! Exact lattice point enumeration in ellipsoids.
//!
//! Enumeration is Fincke–Pohst over a rational `LDLᵀ` factorization: the form
//! is written as `q[y] = Σₖ dₖ (yₖ + Σ_{j>k} rₖⱼ yⱼ)²` and coordinates are fixed
//! from the last one down. Each coordinate range is found by scanning outward
//! from the conditional center with exact comparisons, so no square roots or
//! floating point enter the bounds.

use crate::exact::{
    self, clear_denominators, floor, rat, to_i64_vec, Definiteness, IMat, Int, Mat,
    Rat,
};
use crate::qfunc::QuadraticFunction;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CvpError {
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch")]
    Dimension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvpResult {
    /// All minimizers, sorted lexicographically.
    pub minimizers: Vec<Vec<i64>>,
    pub squared_distance: Rat,
}

/// `q = Rᵀ·diag(d)·R` with `R` unit upper triangular.
struct Ldl {
    d: Vec<Rat>,
    /// `r[k][j]` for `j > k`; other entries unused.
    r: Vec<Vec<Rat>>,
}

impl Ldl {
    fn new(q: &Mat) -> Result<Self, CvpError> {
        if !q.is_symmetric() {
            return Err(CvpError::NotPositiveDefinite);
        }
        let n = q.rows();
        let mut s = q.to_rows();
        let mut d = Vec::with_capacity(n);
        let mut r = vec![vec![Rat::zero(); n]; n];
        for k in 0..n {
            let dk = s[k][k].clone();
            if !dk.is_positive() {
                return Err(CvpError::NotPositiveDefinite);
            }
            for j in k + 1..n {
                r[k][j] = &s[k][j] / &dk;
            }
            for i in k + 1..n {
                if s[k][i].is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    if !r[k][j].is_zero() {
                        let delta = &s[k][i] * &r[k][j];
                        s[i][j] -= delta;
                    }
                }
            }
            d.push(dk);
        }
        Ok(Ldl { d, r })
    }

    fn dim(&self) -> usize {
        self.d.len()
    }
}

/// Depth-first search over `{x : q[x − c] ≤ bound}` (or `<` when `strict`).
/// The visitor sees each point with its value and may shrink the bound.
struct Search<'a, F: FnMut(&[i64], &Rat, &mut Rat) -> bool> {
    ldl: &'a Ldl,
    c: &'a [Rat],
    strict: bool,
    bound: Rat,
    x: Vec<i64>,
    /// `x − c` for the coordinates already fixed.
    y: Vec<Rat>,
    visit: F,
    stopped: bool,
}

impl<F: FnMut(&[i64], &Rat, &mut Rat) -> bool> Search<'_, F> {
    fn admits(&self, v: &Rat) -> bool {
        if self.strict {
            v < &self.bound
        } else {
            v <= &self.bound
        }
    }

    fn run(&mut self) {
        let n = self.ldl.dim();
        if n == 0 {
            let z = Rat::zero();
            if self.admits(&z) {
                let mut b = self.bound.clone();
                (self.visit)(&[], &z, &mut b);
            }
            return;
        }
        self.descend(n - 1, Rat::zero());
    }

    fn descend(&mut self, k: usize, partial: Rat) {
        let n = self.ldl.dim();
        let mut shift = Rat::zero();
        for j in k + 1..n {
            let rk = &self.ldl.r[k][j];
            if !rk.is_zero() {
                shift += rk * &self.y[j];
            }
        }
        // term = d_k (x_k − t)² with t = c_k − shift
        let t = &self.c[k] - &shift;
        let start = floor(&t);
        let start: i64 = exact::to_i64_vec(&[start]).expect("coordinate fits in i64")[0];
        // Two monotone scans: downward from floor(t), upward from floor(t) + 1.
        let mut down = start;
        let mut up = start + 1;
        let mut up_open = true;
        let mut down_open = true;
        while (up_open || down_open) && !self.stopped {
            let take_up = if up_open && down_open {
                // closer side first so that good points come early
                rat(up) - &t < &t - rat(down)
            } else {
                up_open
            };
            let xk = if take_up { up } else { down };
            let diff = rat(xk) - &t;
            let value = &partial + &self.ldl.d[k] * &diff * &diff;
            if !self.admits(&value) {
                if take_up {
                    up_open = false;
                } else {
                    down_open = false;
                }
                continue;
            }
            if take_up {
                up += 1;
            } else {
                down -= 1;
            }
            self.x[k] = xk;
            self.y[k] = rat(xk) - &self.c[k];
            if k == 0 {
                let mut b = self.bound.clone();
                if !(self.visit)(&self.x, &value, &mut b) {
                    self.stopped = true;
                }
                self.bound = b;
            } else {
                self.descend(k - 1, value);
            }
        }
    }
}

fn search<F>(ldl: &Ldl, c: &[Rat], bound: Rat, strict: bool, visit: F)
where
    F: FnMut(&[i64], &Rat, &mut Rat) -> bool,
{
    let n = ldl.dim();
    let mut s = Search {
        ldl,
        c,
        strict,
        bound,
        x: vec![0; n],
        y: vec![Rat::zero(); n],
        visit,
        stopped: false,
    };
    s.run();
}

/// Nearest-plane rounding: a lattice point with `q[x − c] ≤ Σ dₖ/4`.
fn babai(ldl: &Ldl, c: &[Rat]) -> (Vec<i64>, Rat) {
    let n = ldl.dim();
    let mut x = vec![0i64; n];
    let mut y = vec![Rat::zero(); n];
    let mut value = Rat::zero();
    let half = exact::frac(1, 2);
    for k in (0..n).rev() {
        let mut shift = Rat::zero();
        for j in k + 1..n {
            shift += &ldl.r[k][j] * &y[j];
        }
        let t = &c[k] - &shift;
        let xk = floor(&(&t + &half));
        x[k] = to_i64_vec(&[xk]).expect("coordinate fits in i64")[0];
        y[k] = rat(x[k]) - &c[k];
        let diff = rat(x[k]) - &t;
        value += &ldl.d[k] * &diff * &diff;
    }
    (x, value)
}

/// All integer minimizers of `(x − c)ᵀ·q·(x − c)` for positive definite `q`.
pub fn closest_vectors(q: &Mat, c: &[Rat]) -> Result<CvpResult, CvpError> {
    if c.len() != q.rows() {
        return Err(CvpError::Dimension);
    }
    let ldl = Ldl::new(q)?;
    let (_, start) = babai(&ldl, c);
    let mut best = start.clone();
    let mut found: Vec<Vec<i64>> = Vec::new();
    search(&ldl, c, start, false, |x, v, bound| {
        if v < &best {
            best = v.clone();
            found.clear();
            *bound = v.clone();
        }
        found.push(x.to_vec());
        true
    });
    found.sort();
    Ok(CvpResult { minimizers: found, squared_distance: best })
}

fn require_pd(f: &QuadraticFunction) -> Result<Ldl, CvpError> {
    Ldl::new(f.gram())
}

/// Every `z ∈ Zⁿ` with `f(z) ≤ bound`, sorted lexicographically.
pub fn points_at_most(f: &QuadraticFunction, bound: &Rat) -> Result<Vec<Vec<i64>>, CvpError> {
    let ldl = require_pd(f)?;
    let c = f.center().ok_or(CvpError::NotPositiveDefinite)?;
    let radius = bound - f.evaluate(&c);
    if radius.is_negative() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    search(&ldl, &c, radius, false, |x, _, _| {
        out.push(x.to_vec());
        true
    });
    out.sort();
    Ok(out)
}

/// Lattice minimum of a positive definite `f` and all points attaining it.
pub fn lattice_minimum(f: &QuadraticFunction) -> Result<(Rat, Vec<Vec<i64>>), CvpError> {
    let c = f.center().ok_or(CvpError::NotPositiveDefinite)?;
    let r = closest_vectors(f.gram(), &c)?;
    let m = &r.squared_distance + f.evaluate(&c);
    Ok((m, r.minimizers))
}

/// Some `z ∈ Zⁿ` with `f(z) < 0`, or `None` as the certificate that `f ≥ 0` on `Zⁿ`.
pub fn interior_point(f: &QuadraticFunction) -> Option<Vec<i64>> {
    match f.definiteness() {
        Definiteness::PositiveDefinite => {
            let c = f.center().expect("positive definite gram is invertible");
            let fc = f.evaluate(&c);
            if !fc.is_negative() {
                return None;
            }
            // f(z) = q[z − c] + f(c): a negative value means q[z − c] < −f(c).
            let r = closest_vectors(f.gram(), &c).expect("positive definite");
            if r.squared_distance < -fc {
                r.minimizers.into_iter().next()
            } else {
                None
            }
        }
        Definiteness::PositiveSemidefinite { kernel } => semidefinite_interior_point(f, &kernel),
        Definiteness::Indefinite { negative_direction } => {
            let d = to_i64_vec(&negative_direction).expect("direction fits in i64");
            Some(ray_until_negative(f, &d))
        }
    }
}

fn ray_until_negative(f: &QuadraticFunction, d: &[i64]) -> Vec<i64> {
    let mut t: i64 = 1;
    loop {
        for s in [t, -t] {
            let z: Vec<i64> = d.iter().map(|&x| x * s).collect();
            if f.eval_int(&z).is_negative() {
                return z;
            }
        }
        t = t.checked_mul(2).expect("negative value reached before overflow");
    }
}

fn semidefinite_interior_point(f: &QuadraticFunction, kernel: &[Vec<Int>]) -> Option<Vec<i64>> {
    let n = f.dim();
    for k in kernel {
        let kr = exact::int_to_rat_vec(k);
        if !exact::dot(f.linear(), &kr).is_zero() {
            let d = to_i64_vec(k).expect("kernel vector fits in i64");
            return Some(ray_until_negative(f, &d));
        }
    }
    // f is constant along the kernel lattice; enumerate on a lattice complement.
    let split = exact::integer_kernel(&integer_gram(f.gram()));
    let r = split.complement.len();
    if r == 0 {
        return if f.constant().is_negative() { Some(vec![0; n]) } else { None };
    }
    let mut b = Mat::zeros(n, r);
    for (j, v) in split.complement.iter().enumerate() {
        for i in 0..n {
            b[(i, j)] = Rat::from_integer(v[i].clone());
        }
    }
    let reduced = f.compose_affine(&b, &vec![Rat::zero(); n]);
    let y = interior_point(&reduced)?;
    let yr = exact::to_rat_vec(&y);
    let x = b.mul_vec(&yr);
    Some(x.iter().map(|v| to_i64_vec(&[v.to_integer()]).expect("fits")[0]).collect())
}

/// Gram matrix scaled to integers (same kernel).
pub fn integer_gram(q: &Mat) -> IMat {
    let all: Vec<Rat> = (0..q.rows()).flat_map(|i| q.row(i).to_vec()).collect();
    let ints = clear_denominators(&all);
    IMat::from_vec(q.rows(), q.cols(), ints)
}

/// Exact bound on coordinates of any closest vector: `|xᵢ − cᵢ|² ≤ (Σ dₖ/4)·(q⁻¹)ᵢᵢ`.
pub fn covering_box(q: &Mat, c: &[Rat]) -> Result<Vec<(i64, i64)>, CvpError> {
    let ldl = Ldl::new(q)?;
    let mu: Rat = ldl.d.iter().fold(Rat::zero(), |a, d| a + d) * exact::frac(1, 4);
    let inv = exact::inverse(q).ok_or(CvpError::NotPositiveDefinite)?;
    Ok((0..q.rows())
        .map(|i| {
            let r2 = &mu * &inv[(i, i)];
            // smallest integer s with s² ≥ r2
            let mut s: i64 = 0;
            while rat(s * s) < r2 {
                s += 1;
            }
            let lo = floor(&(&c[i] - rat(s)));
            let hi = exact::ceil(&(&c[i] + rat(s)));
            (to_i64_vec(&[lo]).unwrap()[0], to_i64_vec(&[hi]).unwrap()[0])
        })
        .collect())
}
