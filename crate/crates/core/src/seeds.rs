//! Known perfect Delaunay polytopes and small Delaunay test cells.
//!
//! Root lattices are written in the basis of simple roots, so the lattice is
//! `Zⁿ` and the metric is the Cartan matrix. For a minuscule node `k` the
//! function `xᵀ·A·x − 2·x_k` equals `A[x − ω_k] − A[ω_k]` with `ω_k = A⁻¹e_k`,
//! and its zero set is the Delaunay polytope around the fundamental weight.

use crate::delaunay::{vertex_set_of, DelaunayError, PolytopeRecord};
use crate::exact::{rat, Mat, Rat};
use crate::hinge::{flip, HingePencil};
use crate::qfunc::QuadraticFunction;
use num_traits::Zero;

/// Cartan matrix from an edge list of the Dynkin diagram (0-based nodes).
pub fn cartan(n: usize, edges: &[(usize, usize)]) -> Mat {
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = rat(2);
    }
    for &(a, b) in edges {
        m[(a, b)] = rat(-1);
        m[(b, a)] = rat(-1);
    }
    m
}

/// Bourbaki labelling: chain 1–3–4–5–6 with 2 attached to 4.
pub fn e6() -> Mat {
    cartan(6, &[(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)])
}

/// Chain 1–3–4–5–6–7 with 2 attached to 4.
pub fn e7() -> Mat {
    cartan(7, &[(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 3)])
}

pub fn a_n(n: usize) -> Mat {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    cartan(n, &edges)
}

/// Chain 1–…–(n−1) with n attached to n−2.
pub fn d_n(n: usize) -> Mat {
    assert!(n >= 3);
    let mut edges: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
    edges.push((n - 3, n - 1));
    cartan(n, &edges)
}

/// `xᵀ·A·x − 2·x_k`: the empty ellipsoid around the weight `A⁻¹e_k`.
pub fn weight_hole_function(a: &Mat, k: usize) -> QuadraticFunction {
    let n = a.rows();
    let mut lin = vec![Rat::zero(); n];
    lin[k] = rat(-2);
    QuadraticFunction::new(a.clone(), lin, Rat::zero()).expect("Cartan matrices are symmetric")
}

pub fn weight_hole(a: &Mat, k: usize) -> Result<PolytopeRecord, DelaunayError> {
    vertex_set_of(&weight_hole_function(a, k))
}

/// The 27-vertex Gosset polytope `2_21` in the E6 root lattice.
pub fn gosset_221() -> PolytopeRecord {
    weight_hole(&e6(), 0).expect("2_21 seed")
}

/// The 56-vertex Gosset polytope `3_21` in the E7 root lattice.
pub fn gosset_321() -> PolytopeRecord {
    weight_hole(&e7(), 6).expect("3_21 seed")
}

/// The segment `[0, 1]` in `Z`.
pub fn unit_segment() -> PolytopeRecord {
    vertex_set_of(&QuadraticFunction::from_ints(1, &[1], &[-1], 0).expect("valid")).expect("segment seed")
}

/// The slab `0 ≤ x₁ ≤ 1` in `Zⁿ`.
pub fn unit_slab(n: usize) -> PolytopeRecord {
    let mut gram = Mat::zeros(n, n);
    gram[(0, 0)] = rat(1);
    let mut lin = vec![Rat::zero(); n];
    lin[0] = rat(-1);
    vertex_set_of(&QuadraticFunction::new(gram, lin, Rat::zero()).expect("valid")).expect("slab")
}

/// Vertices of the unit cube `{0,1}ⁿ` with `Σ xᵢ(xᵢ − 1)`.
pub fn unit_cube(n: usize) -> PolytopeRecord {
    let gram = Mat::identity(n);
    let lin = vec![rat(-1); n];
    vertex_set_of(&QuadraticFunction::new(gram, lin, Rat::zero()).expect("valid")).expect("cube")
}

/// The product `P × Z` as an unbounded record in dimension `n + 1`.
pub fn product_with_line(p: &PolytopeRecord) -> PolytopeRecord {
    let n = p.dim;
    let f = &p.function;
    let mut gram = Mat::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = f.gram()[(i, j)].clone();
        }
    }
    let mut lin = f.linear().to_vec();
    lin.push(Rat::zero());
    vertex_set_of(&QuadraticFunction::new(gram, lin, f.constant().clone()).expect("valid")).expect("product")
}

/// A bounded perfect 8-polytope with 72 vertices, obtained by flipping
/// `3_21 × Z` across the ridge `vert × {0} ∪ {x₂ = 0} × {1} ∪ {x₂ = 3} × {−1}`
/// with generator `x₈·(2x₂ − 3 + 3x₈)`.
pub fn perfect_72() -> PolytopeRecord {
    let base = gosset_321();
    let prod = product_with_line(&base);
    let mut ridge = Vec::new();
    for v in &base.vertices {
        let mut w = v.clone();
        w.push(0);
        ridge.push(w);
        let level = v[1];
        if level == 0 || level == 3 {
            let mut w = v.clone();
            w.push(if level == 0 { 1 } else { -1 });
            ridge.push(w);
        }
    }
    ridge.sort();
    let mut gram = vec![0i64; 64];
    gram[63] = 3;
    gram[7 * 8 + 1] = 1;
    gram[8 + 7] = 1;
    let mut lin = vec![0i64; 8];
    lin[7] = -3;
    let g = QuadraticFunction::from_ints(8, &gram, &lin, 0).expect("valid");
    let pencil = HingePencil { f: prod.function.clone(), g, ridge };
    flip(&pencil, &[]).expect("bounded flip").new_record
}
