//! Double description: facets of the cone spanned by integer points, by
//! adding one point at a time to the dual cone and keeping its extreme rays.

use super::cone::{dot, rank};
use crate::exact::{self, Int};
use fixedbitset::FixedBitSet;
use num_traits::{Signed, Zero};

struct Ray {
    a: Vec<Int>,
    /// Processed points on which `a` vanishes.
    zeros: FixedBitSet,
}

/// Facets of the full-dimensional cone spanned by `points`, as sorted lists of
/// the points lying on each facet. Output is sorted.
pub fn facets(points: &[Vec<Int>]) -> Vec<Vec<usize>> {
    let m = points.len();
    let d = points[0].len();
    // d independent points start the iteration.
    let mut basis: Vec<usize> = Vec::new();
    for i in 0..m {
        let mut trial: Vec<&Vec<Int>> = basis.iter().map(|&j| &points[j]).collect();
        trial.push(&points[i]);
        if rank(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    assert_eq!(basis.len(), d, "points must span the space");
    let pb = exact::Mat::from_rows(d, &basis.iter().map(|&i| exact::int_to_rat_vec(&points[i])).collect::<Vec<_>>());
    let inv = exact::inverse(&pb).expect("independent points");
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let a = exact::primitive(&inv.column(j));
            let mut zeros = FixedBitSet::with_capacity(m);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(b);
                }
            }
            Ray { a, zeros }
        })
        .collect();

    let in_basis: FixedBitSet = basis.iter().copied().collect::<FixedBitSet>();
    for i in 0..m {
        if i < in_basis.len() && in_basis.contains(i) {
            continue;
        }
        let p = &points[i];
        let values: Vec<Int> = rays.iter().map(|r| dot(&r.a, p)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| values[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if values[k].is_zero() {
                    r.zeros.insert(i);
                }
            }
            continue;
        }
        let mut created: Vec<Ray> = Vec::new();
        for &u in &pos {
            for &w in &neg {
                let mut common = rays[u].zeros.clone();
                common.intersect_with(&rays[w].zeros);
                if common.count_ones(..) + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|k| k == u || k == w || !common.is_subset(&rays[k].zeros));
                if !adjacent {
                    continue;
                }
                let vu = &values[u];
                let vw = &values[w];
                let a: Vec<Int> = rays[u].a.iter().zip(&rays[w].a).map(|(x, y)| vu * y - vw * x).collect();
                let a = exact::primitive_int(a);
                common.insert(i);
                created.push(Ray { a, zeros: common });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                r.zeros.insert(i);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }
    let mut out: Vec<Vec<usize>> = rays.iter().map(|r| r.zeros.ones().collect()).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[&[i64]]) -> Vec<Vec<Int>> {
        v.iter().map(|p| p.iter().map(|&x| Int::from(x)).collect()).collect()
    }

    #[test]
    fn square_cone() {
        // cone over the unit square at height 1
        let p = pts(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        assert_eq!(facets(&p), vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn octahedron_cone() {
        let p = pts(&[
            &[1, 0, 0, 1],
            &[-1, 0, 0, 1],
            &[0, 1, 0, 1],
            &[0, -1, 0, 1],
            &[0, 0, 1, 1],
            &[0, 0, -1, 1],
        ]);
        let f = facets(&p);
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|x| x.len() == 3));
    }

    #[test]
    fn cube_cone() {
        let mut v = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    v.push(vec![a, b, c, 1]);
                }
            }
        }
        let p: Vec<Vec<Int>> = v.iter().map(|q| q.iter().map(|&x| Int::from(x)).collect()).collect();
        let f = facets(&p);
        assert_eq!(f.len(), 6);
        assert!(f.iter().all(|x| x.len() == 4));
    }
}
