//! Delaunay polyhedra given by their empty quadratic functions, perfection,
//! and the splitting of unbounded polyhedra into a bounded factor times a
//! lattice of translations.

use crate::cvp::{self, integer_gram};
use crate::exact::{self, rat, to_i64_vec, Definiteness, IMat, Int, Mat, Rat};
use crate::qfunc::{qrank, vanishing_space, QuadraticFunction};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DelaunayError {
    #[error("not a Delaunay function: {0}")]
    NotDelaunay(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A Delaunay polyhedron `{z : f(z) = 0}` of an empty quadratic function `f ≥ 0`.
///
/// For unbounded polyhedra `vertices` lists one translate class of the
/// bounded factor and `kernel` is a basis of the translation lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolytopeRecord {
    pub dim: usize,
    pub vertices: Vec<Vec<i64>>,
    pub function: QuadraticFunction,
    pub bounded: bool,
    pub kernel: Vec<Vec<i64>>,
}

impl PolytopeRecord {
    pub fn from_function(f: &QuadraticFunction) -> Result<Self, DelaunayError> {
        vertex_set_of(f)
    }

    /// The record's lattice points, enlarged for unbounded records to a finite
    /// set with the same quadratic rank as the full zero set: each vertex `v`
    /// together with `v + kᵢ`, `v + 2kᵢ` and `v + kᵢ + kⱼ` (these translates are
    /// unisolvent for quadratic polynomials in the kernel coordinates).
    pub fn rank_sample(&self) -> Vec<Vec<i64>> {
        let mut out = self.vertices.clone();
        let k = &self.kernel;
        for v in &self.vertices {
            for i in 0..k.len() {
                out.push(add(v, &k[i], 1));
                out.push(add(v, &k[i], 2));
                for j in i + 1..k.len() {
                    out.push(add(&add(v, &k[i], 1), &k[j], 1));
                }
            }
        }
        out
    }

    pub fn qrank(&self) -> usize {
        qrank(&self.rank_sample(), self.dim)
    }

    pub fn is_perfect(&self) -> bool {
        self.qrank() == 1
    }

    /// True when `z` lies in the zero set of the record's function.
    pub fn contains(&self, z: &[i64]) -> bool {
        self.function.eval_int(z).is_zero()
    }

    /// Image under `z ↦ L·z + t`.
    pub fn transformed(&self, l: &IMat, t: &[i64]) -> Result<Self, DelaunayError> {
        let lr = l.to_rat();
        let inv = exact::inverse(&lr).ok_or_else(|| DelaunayError::Precondition("singular map".into()))?;
        let tr = exact::to_rat_vec(t);
        let shift: Vec<Rat> = inv.mul_vec(&tr).into_iter().map(|x| -x).collect();
        let g = self.function.compose_affine(&inv, &shift);
        let mut rec = vertex_set_of(&g)?;
        if !self.bounded {
            // keep the transported vertex list rather than a freshly chosen complement
            let mut vs: Vec<Vec<i64>> = self.vertices.iter().map(|v| apply(l, t, v)).collect();
            vs.sort();
            rec.vertices = vs;
        }
        Ok(rec)
    }
}

fn add(a: &[i64], b: &[i64], s: i64) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// `L·v + t`.
pub fn apply(l: &IMat, t: &[i64], v: &[i64]) -> Vec<i64> {
    (0..l.rows())
        .map(|i| {
            let mut s = Int::from(t[i]);
            for j in 0..l.cols() {
                s += &l[(i, j)] * Int::from(v[j]);
            }
            to_i64_vec(&[s]).expect("image coordinate fits in i64")[0]
        })
        .collect()
}

/// Quadratic functions through every point of `s`; a single function when the rank is one.
pub fn circumscribe(s: &[Vec<i64>], n: usize) -> Vec<QuadraticFunction> {
    vanishing_space(s, n)
}

/// The Delaunay polyhedron of `f`: shifts `f` by its lattice minimum and
/// returns the zero set of the shifted, normalized function.
pub fn vertex_set_of(f: &QuadraticFunction) -> Result<PolytopeRecord, DelaunayError> {
    let n = f.dim();
    match f.definiteness() {
        Definiteness::Indefinite { .. } => Err(DelaunayError::NotDelaunay("indefinite quadratic form".into())),
        Definiteness::PositiveDefinite => {
            let (m, mut vertices) = cvp::lattice_minimum(f).expect("positive definite");
            vertices.sort();
            Ok(PolytopeRecord {
                dim: n,
                vertices,
                function: f.shift_constant(&-m).normalized(),
                bounded: true,
                kernel: Vec::new(),
            })
        }
        Definiteness::PositiveSemidefinite { kernel } => {
            for k in &kernel {
                if !exact::dot(f.linear(), &exact::int_to_rat_vec(k)).is_zero() {
                    return Err(DelaunayError::NotDelaunay("unbounded below along the kernel".into()));
                }
            }
            let split = exact::integer_kernel(&integer_gram(f.gram()));
            if split.complement.is_empty() {
                return Err(DelaunayError::NotDelaunay("zero quadratic form".into()));
            }
            let complement: Vec<Vec<i64>> = split.complement.iter().map(|v| to_i64_vec(v).expect("fits")).collect();
            let gamma: Vec<Vec<i64>> = split.kernel.iter().map(|v| to_i64_vec(v).expect("fits")).collect();
            let d = factor(f, &complement, &gamma)?;
            Ok(PolytopeRecord {
                dim: n,
                vertices: d.vertices,
                function: d.shifted,
                bounded: false,
                kernel: gamma,
            })
        }
    }
}

/// An unbounded polyhedron written as `vert D + Γ` with `D` living in the
/// lattice spanned by the columns of `embedding`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// `D` in the coordinates of the embedded lattice `Zʳ`.
    pub factor: PolytopeRecord,
    /// Columns span a lattice complement of `Γ` in `Zⁿ`.
    pub embedding: Vec<Vec<i64>>,
    /// `vert D` in `Zⁿ`.
    pub vertices: Vec<Vec<i64>>,
    pub gamma: Vec<Vec<i64>>,
}

struct Factored {
    reduced: PolytopeRecord,
    vertices: Vec<Vec<i64>>,
    shifted: QuadraticFunction,
}

fn columns_to_mat(cols: &[Vec<i64>], n: usize) -> Mat {
    let mut m = Mat::zeros(n, cols.len());
    for (j, v) in cols.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = rat(v[i]);
        }
    }
    m
}

fn factor(f: &QuadraticFunction, complement: &[Vec<i64>], gamma: &[Vec<i64>]) -> Result<Factored, DelaunayError> {
    let n = f.dim();
    let b = columns_to_mat(complement, n);
    let reduced = f.compose_affine(&b, &vec![Rat::zero(); n]);
    if !reduced.definiteness().is_positive_definite() {
        return Err(DelaunayError::Precondition("complement does not meet the kernel trivially".into()));
    }
    let full: Vec<Vec<i64>> = complement.iter().chain(gamma).cloned().collect();
    let basis = columns_to_mat(&full, n);
    if exact::det(&basis).abs() != rat(1) {
        return Err(DelaunayError::Precondition("complement and kernel do not form a lattice basis".into()));
    }
    let (m, mut ys) = cvp::lattice_minimum(&reduced).expect("positive definite");
    ys.sort();
    let mut vertices: Vec<Vec<i64>> = ys
        .iter()
        .map(|y| {
            b.mul_vec(&exact::to_rat_vec(y))
                .iter()
                .map(|x| to_i64_vec(&[x.to_integer()]).expect("fits")[0])
                .collect()
        })
        .collect();
    vertices.sort();
    let reduced_record = PolytopeRecord {
        dim: complement.len(),
        vertices: ys,
        function: reduced.shift_constant(&-m.clone()).normalized(),
        bounded: true,
        kernel: Vec::new(),
    };
    Ok(Factored { reduced: reduced_record, vertices, shifted: f.shift_constant(&-m).normalized() })
}

/// Splits an unbounded record into its bounded factor and translation lattice.
pub fn decompose(p: &PolytopeRecord) -> Result<Decomposition, DelaunayError> {
    if p.bounded {
        return Err(DelaunayError::Precondition("record is bounded".into()));
    }
    let split = exact::integer_kernel(&integer_gram(p.function.gram()));
    let complement: Vec<Vec<i64>> = split.complement.iter().map(|v| to_i64_vec(v).expect("fits")).collect();
    decompose_with(p, &complement)
}

/// As [`decompose`], with a caller-chosen lattice complement of the kernel.
pub fn decompose_with(p: &PolytopeRecord, complement: &[Vec<i64>]) -> Result<Decomposition, DelaunayError> {
    if p.bounded {
        return Err(DelaunayError::Precondition("record is bounded".into()));
    }
    let fac = factor(&p.function, complement, &p.kernel)?;
    Ok(Decomposition {
        factor: fac.reduced,
        embedding: complement.to_vec(),
        vertices: fac.vertices,
        gamma: p.kernel.clone(),
    })
}

impl Decomposition {
    /// Whether `z ∈ vert D + Γ`, by solving for coordinates in the basis `[B | Γ]`.
    pub fn contains(&self, z: &[i64]) -> bool {
        let n = z.len();
        let full: Vec<Vec<i64>> = self.embedding.iter().chain(&self.gamma).cloned().collect();
        let basis = columns_to_mat(&full, n);
        let coords = exact::solve(&basis, &Mat::from_vec(n, 1, exact::to_rat_vec(z))).expect("basis is invertible");
        let r = self.embedding.len();
        let y: Vec<i64> = (0..r).map(|i| to_i64_vec(&[coords[(i, 0)].to_integer()]).expect("fits")[0]).collect();
        debug_assert!((0..n).all(|i| coords[(i, 0)].is_integer()));
        self.factor.vertices.binary_search(&y).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qf(n: usize, g: &[i64], l: &[i64], c: i64) -> QuadraticFunction {
        QuadraticFunction::from_ints(n, g, l, c).unwrap()
    }

    #[test]
    fn circumscribe_examples() {
        assert_eq!(circumscribe(&[vec![0], vec![1]], 1).len(), 1);
        assert!(circumscribe(&[vec![1], vec![2], vec![3]], 1).is_empty());
        let sq = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]];
        assert_eq!(circumscribe(&sq, 2).len(), 2);
    }

    #[test]
    fn vertex_set_examples() {
        let r = vertex_set_of(&qf(1, &[1], &[-3], 2)).unwrap();
        assert_eq!(r.vertices, vec![vec![1], vec![2]]);
        assert!(r.bounded && r.is_perfect());

        let slab = vertex_set_of(&qf(2, &[1, 0, 0, 0], &[-1, 0], 0)).unwrap();
        assert!(!slab.bounded);
        assert_eq!(slab.vertices, vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(slab.kernel, vec![vec![0, 1]]);
        assert!(slab.is_perfect());

        assert!(matches!(vertex_set_of(&qf(2, &[1, 0, 0, -1], &[-1, 0], 0)), Err(DelaunayError::NotDelaunay(_))));
    }

    #[test]
    fn shifted_minimum_is_zero() {
        let r = vertex_set_of(&qf(1, &[2], &[-6], 7)).unwrap();
        assert_eq!(r.vertices, vec![vec![1], vec![2]]);
        assert_eq!(r.function, qf(1, &[1], &[-3], 2));
    }

    #[test]
    fn perfection_examples() {
        assert!(vertex_set_of(&qf(1, &[1], &[-1], 0)).unwrap().is_perfect());
        assert!(!vertex_set_of(&qf(2, &[1, 0, 0, 1], &[-1, -1], 0)).unwrap().is_perfect());
    }

    #[test]
    fn json_round_trip() {
        let r = vertex_set_of(&qf(2, &[1, 0, 0, 0], &[-1, 0], 0)).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: PolytopeRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn slab_decomposition() {
        let slab = vertex_set_of(&qf(2, &[1, 0, 0, 0], &[-1, 0], 0)).unwrap();
        let d = decompose(&slab).unwrap();
        assert_eq!(d.factor.vertices, vec![vec![0], vec![1]]);
        assert_eq!(d.gamma, vec![vec![0, 1]]);
        for a in -4..=4 {
            for b in -4..=4 {
                assert_eq!(d.contains(&[a, b]), slab.contains(&[a, b]));
            }
        }
        let other = decompose_with(&slab, &[vec![1, 1]]).unwrap();
        assert_eq!(other.vertices, vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(other.factor, d.factor);
    }
}
