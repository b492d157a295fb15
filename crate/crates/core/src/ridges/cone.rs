//! Integer point configurations spanning polyhedral cones, with exact rank,
//! kernel and supporting-hyperplane helpers.

use crate::exact::{self, Int};
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    let mut s = Int::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn rank(points: &[&Vec<Int>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let cols = points[0].len();
    exact::echelon_int(points.iter().map(|p| (*p).clone()).collect(), cols).rank()
}

/// Primitive integer basis of `{a : a·p = 0 for every p}`.
pub fn kernel(points: &[&Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    exact::echelon_int(points.iter().map(|p| (*p).clone()).collect(), dim).kernel()
}

/// Coordinates of `points` on a maximal independent column set, so that the
/// configuration spans its own ambient space.
pub fn local_coordinates(points: &[&Vec<Int>]) -> Vec<Vec<Int>> {
    if points.is_empty() {
        return Vec::new();
    }
    let cols = points[0].len();
    let e = exact::echelon_int(points.iter().map(|p| (*p).clone()).collect(), cols);
    points.iter().map(|p| e.pivots.iter().map(|&c| p[c].clone()).collect()).collect()
}

fn parallel(a: &[Int], b: &[Int]) -> bool {
    rank(&[&a.to_vec(), &b.to_vec()]) < 2
}

/// Compares `x₁/y₁` with `x₂/y₂` for positive denominators.
fn cmp_ratio(x1: &Int, y1: &Int, x2: &Int, y2: &Int) -> Ordering {
    (x1 * y2).cmp(&(x2 * y1))
}

/// Tilts the supporting functional `a` (nonnegative on all points, zero exactly
/// on `zero`) around the points of `zero` in direction `b` until it meets
/// another point. Returns the new primitive functional.
pub fn tilt(points: &[Vec<Int>], a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut best: Option<(Int, Int)> = None;
    for p in points {
        let ap = dot(a, p);
        if !ap.is_positive() {
            continue;
        }
        let bp = -dot(b, p);
        match &best {
            Some((x, y)) if cmp_ratio(&bp, &ap, x, y) != Ordering::Greater => {}
            _ => best = Some((bp, ap)),
        }
    }
    let (neg_bp, ap) = best.expect("some point lies off the supporting hyperplane");
    // a' = (a·p*)·b − (b·p*)·a
    let out: Vec<Int> = b.iter().zip(a).map(|(bi, ai)| &ap * bi + &neg_bp * ai).collect();
    exact::primitive_int(out)
}

pub fn zero_set(points: &[Vec<Int>], a: &[Int]) -> Vec<usize> {
    (0..points.len()).filter(|&i| dot(a, &points[i]).is_zero()).collect()
}

/// A functional positive on every point of a configuration lying in an affine
/// hyperplane not through the origin.
pub fn positive_functional(points: &[Vec<Int>]) -> Vec<Int> {
    let d = points[0].len();
    let a = exact::Mat::from_rows(d, &points.iter().map(|p| exact::int_to_rat_vec(p)).collect::<Vec<_>>());
    let ones = exact::Mat::from_vec(points.len(), 1, vec![exact::rat(1); points.len()]);
    let x = exact::solve(&a, &ones).expect("points lie on an affine hyperplane");
    exact::primitive(&x.column(0))
}

/// A facet of the cone spanned by full-dimensional `points`, found by rotating
/// a positive functional until its zero set has rank `d − 1`.
pub fn initial_facet(points: &[Vec<Int>]) -> Vec<usize> {
    let d = points[0].len();
    let mut a = positive_functional(points);
    loop {
        let z = zero_set(points, &a);
        let zp: Vec<&Vec<Int>> = z.iter().map(|&i| &points[i]).collect();
        if rank(&zp) == d - 1 {
            return z;
        }
        let basis = if zp.is_empty() {
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { Int::from(1) } else { Int::zero() }).collect())
                .collect()
        } else {
            kernel(&zp, d)
        };
        let b = basis.into_iter().find(|b| !parallel(b, &a)).expect("kernel has dimension at least two");
        a = tilt(points, &a, &b);
    }
}

/// Normal of the facet `facet` (indices into `points`), oriented nonnegative.
pub fn facet_normal(points: &[Vec<Int>], facet: &[usize]) -> Vec<Int> {
    let d = points[0].len();
    let fp: Vec<&Vec<Int>> = facet.iter().map(|&i| &points[i]).collect();
    let k = kernel(&fp, d);
    assert_eq!(k.len(), 1, "facet must have corank one");
    let mut a = k.into_iter().next().expect("one kernel vector");
    if points.iter().any(|p| dot(&a, p).is_negative()) {
        a = a.into_iter().map(|x| -x).collect();
    }
    a
}

/// The other facet through the ridge `ridge ⊂ facet`.
pub fn neighbour(points: &[Vec<Int>], facet: &[usize], ridge: &[usize]) -> Vec<usize> {
    let d = points[0].len();
    let a = facet_normal(points, facet);
    let rp: Vec<&Vec<Int>> = ridge.iter().map(|&i| &points[i]).collect();
    let k = kernel(&rp, d);
    assert_eq!(k.len(), 2, "ridge must have corank two");
    let mut b = k.into_iter().find(|b| !parallel(b, &a)).expect("two-dimensional kernel");
    let off = facet.iter().find(|i| !ridge.contains(i)).expect("ridge is a proper subset");
    if dot(&b, &points[*off]).is_negative() {
        b = b.into_iter().map(|x| -x).collect();
    }
    let a2 = tilt(points, &a, &b);
    zero_set(points, &a2)
}
