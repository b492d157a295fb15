//! Ridge orbits of a perfect Delaunay polytope: the maximal vertex subsets of
//! quadratic rank 2, up to the polytope's symmetry group.
//!
//! A vertex subset has quadratic rank `dim 𝓕(n) − rank` of its monomial rows,
//! so the maximal rank-2 subsets are the facets of the cone over the lifted
//! vertices. Facets are enumerated with one of three backends: drop-one
//! subsets for simplices, double description for faces with few extra points,
//! and otherwise adjacency decomposition, which keeps one facet per orbit and
//! reaches its neighbours by gift wrapping across ridges found recursively.

pub mod cone;
pub mod dd;

use crate::delaunay::PolytopeRecord;
use crate::equiv::canon::{canonical_form, ColouredGraph};
use crate::equiv::perm::{group_order, orbit_representatives};
use crate::equiv::{EquivError, Symmetry};
use crate::exact::Int;
use crate::qfunc::{monomials, qrank};
use log::debug;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RidgeError {
    #[error("record is not a bounded perfect polytope")]
    NotPerfect,
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RidgeOrbit {
    /// Sorted vertex subset `S` with `qrank S = 2`.
    pub representative: Vec<Vec<i64>>,
    pub orbit_size: u64,
    pub stabilizer_order: BigUint,
}

/// How facets of a face are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RidgeOptions {
    /// Faces with at most `dim + dd_excess` points use double description.
    pub dd_excess: usize,
    /// Faces nested deeper than this always use double description.
    pub adm_depth: usize,
}

impl Default for RidgeOptions {
    fn default() -> Self {
        RidgeOptions { dd_excess: 8, adm_depth: 1 }
    }
}

pub fn qrank2_check(s: &[Vec<i64>], n: usize) -> bool {
    qrank(s, n) == 2
}

/// Lifted vertices `(xᵢxⱼ, xᵢ, 1)` restricted to independent coordinates.
pub fn lifted_points(p: &PolytopeRecord) -> Vec<Vec<Int>> {
    let rows: Vec<Vec<Int>> = p.vertices.iter().map(|v| monomials(v)).collect();
    let refs: Vec<&Vec<Int>> = rows.iter().collect();
    cone::local_coordinates(&refs)
}

struct Decomposer<'a> {
    graph: &'a ColouredGraph,
    points: Vec<Vec<Int>>,
    options: RidgeOptions,
}

impl Decomposer<'_> {
    fn key(&self, colours: Vec<u32>) -> Vec<u32> {
        canonical_form(&self.graph.with_vertex_colours(colours)).key
    }

    /// Vertex colours recording a nested chain of faces: the number of faces containing each vertex.
    fn chain_colours(&self, chain: &[&[usize]]) -> Vec<u32> {
        let mut c = vec![0u32; self.points.len()];
        for face in chain {
            for &v in *face {
                c[v] += 1;
            }
        }
        c
    }

    /// One facet per orbit of the chain stabilizer, for the last face of `chain`.
    fn facet_orbits(&self, chain: &[&[usize]]) -> Vec<Vec<usize>> {
        let face = *chain.last().expect("nonempty chain");
        let refs: Vec<&Vec<Int>> = face.iter().map(|&i| &self.points[i]).collect();
        let local = cone::local_coordinates(&refs);
        let k = local[0].len();
        let base = self.chain_colours(chain);
        if face.len() == k {
            // simplex: facets are the drop-one subsets
            let gens = canonical_form(&self.graph.with_vertex_colours(base.clone())).generators;
            let refs: Vec<&Vec<usize>> = gens.iter().collect();
            let reps = orbit_representatives(self.points.len(), &refs);
            let mut seen = Vec::new();
            let mut out = Vec::new();
            for &v in face {
                if seen.contains(&reps[v]) {
                    continue;
                }
                seen.push(reps[v]);
                out.push(face.iter().copied().filter(|&x| x != v).collect());
            }
            return out;
        }
        let marked = |sub: &[usize]| {
            let mut c = base.clone();
            for &v in sub {
                c[v] += 1;
            }
            c
        };
        let mut registry: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        if face.len() <= k + self.options.dd_excess || chain.len() > self.options.adm_depth {
            for f in dd::facets(&local) {
                let sub: Vec<usize> = f.iter().map(|&i| face[i]).collect();
                registry.entry(self.key(marked(&sub))).or_insert(sub);
            }
            return registry.into_values().collect();
        }
        debug!("adjacency decomposition on a face with {} points in dimension {k}", face.len());
        let first: Vec<usize> = cone::initial_facet(&local).iter().map(|&i| face[i]).collect();
        registry.insert(self.key(marked(&first)), first.clone());
        let mut queue = VecDeque::from([first]);
        let position = |v: usize| face.binary_search(&v).expect("face member");
        while let Some(f) = queue.pop_front() {
            let mut sub_chain: Vec<&[usize]> = chain.to_vec();
            sub_chain.push(&f);
            for ridge in self.facet_orbits(&sub_chain) {
                let lf: Vec<usize> = f.iter().map(|&v| position(v)).collect();
                let lr: Vec<usize> = ridge.iter().map(|&v| position(v)).collect();
                let next: Vec<usize> = cone::neighbour(&local, &lf, &lr).iter().map(|&i| face[i]).collect();
                let key = self.key(marked(&next));
                if !registry.contains_key(&key) {
                    registry.insert(key, next.clone());
                    queue.push_back(next);
                }
            }
        }
        registry.into_values().collect()
    }
}

/// Orbit representatives of the maximal qrank-2 vertex subsets of `p`,
/// ordered by canonical form.
pub fn ridge_orbits(p: &PolytopeRecord, sym: &Symmetry) -> Result<Vec<RidgeOrbit>, RidgeError> {
    ridge_orbits_with(p, sym, RidgeOptions::default())
}

pub fn ridge_orbits_with(p: &PolytopeRecord, sym: &Symmetry, options: RidgeOptions) -> Result<Vec<RidgeOrbit>, RidgeError> {
    if !p.bounded || !p.is_perfect() {
        return Err(RidgeError::NotPerfect);
    }
    let d = Decomposer { graph: &sym.graph.graph, points: lifted_points(p), options };
    let all: Vec<usize> = (0..p.vertices.len()).collect();
    let reps = d.facet_orbits(&[&all]);
    let mut keyed = Vec::with_capacity(reps.len());
    for s in reps {
        let mut colours = vec![0u32; p.vertices.len()];
        for &v in &s {
            colours[v] = 1;
        }
        let canon = canonical_form(&sym.graph.graph.with_vertex_colours(colours));
        let stab = group_order(p.vertices.len(), &canon.generators);
        let orbit = (&sym.group.order / &stab).to_u64().expect("orbit size fits in u64");
        let representative: Vec<Vec<i64>> = s.iter().map(|&i| p.vertices[i].clone()).collect();
        debug_assert!(qrank2_check(&representative, p.dim));
        keyed.push((canon.key, RidgeOrbit { representative, orbit_size: orbit, stabilizer_order: stab }));
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let out: Vec<RidgeOrbit> = keyed.into_iter().map(|(_, o)| o).collect();
    Ok(out)
}

/// Every maximal qrank-2 subset, by plain double description (small inputs only).
pub fn all_ridges(p: &PolytopeRecord) -> Vec<Vec<Vec<i64>>> {
    let pts = lifted_points(p);
    dd::facets(&pts).into_iter().map(|f| f.iter().map(|&i| p.vertices[i].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::analyze;
    use crate::seeds::{gosset_221, unit_segment};

    #[test]
    fn segment_ridges() {
        let p = unit_segment();
        let s = analyze(&p).unwrap();
        let r = ridge_orbits(&p, &s).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].orbit_size, 2);
        assert_eq!(r[0].representative.len(), 1);
    }

    #[test]
    fn qrank2_examples() {
        assert!(qrank2_check(&[vec![1]], 1));
        assert!(!qrank2_check(&[vec![0], vec![1]], 1));
        assert!(qrank2_check(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]], 2));
    }

    #[test]
    fn gosset_221_single_orbit_of_27() {
        let p = gosset_221();
        let s = analyze(&p).unwrap();
        let r = ridge_orbits(&p, &s).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].orbit_size, 27);
        assert_eq!(r[0].representative.len(), 26);
    }
}
