//! Arithmetic equivalence of perfect Delaunay polytopes under `Aff_n(Z)`.
//!
//! The perfect function of a polytope is unique up to scale, so an affine
//! lattice map between two polytopes preserves the values `Q[vᵢ − vⱼ]` of its
//! normalized quadratic form. The complete graph on the vertices coloured by
//! these values is therefore an invariant; its canonical form gives a
//! certificate, and every candidate vertex bijection is checked for an exact
//! affine realization `z ↦ L·z + t` with `L ∈ GLₙ(Z)`.

pub mod canon;
pub mod perm;

use crate::delaunay::{apply, decompose, DelaunayError, PolytopeRecord};
use crate::exact::{self, rat, IMat, Int, Mat, Rat};
use canon::{canonical_form, Canon, ColouredGraph};
use num_bigint::BigUint;
use num_traits::Signed;
use perm::{Perm, StabChain};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Serialization tag hashed into every certificate.
pub const CERTIFICATE_VERSION: &str = "pdt-cert/1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("record is unbounded")]
    Unbounded,
    #[error("vertices do not affinely span the space")]
    NotFullDimensional,
    #[error("graph automorphism has no affine lattice realization")]
    NotRealizable,
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Certificate(pub String);

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Edge colours are indices into `palette` shifted by one; colour 0 is the diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantGraph {
    pub graph: ColouredGraph,
    pub palette: Vec<Int>,
}

fn form_value(q: &Mat, d: &[i64]) -> Int {
    let v = q.quad(&exact::to_rat_vec(d));
    debug_assert!(v.is_integer(), "normalized forms are integral on the lattice");
    v.to_integer()
}

pub fn invariant_graph(p: &PolytopeRecord) -> Result<InvariantGraph, EquivError> {
    if !p.bounded {
        return Err(EquivError::Unbounded);
    }
    let q = p.function.gram();
    let n = p.vertices.len();
    let mut values: Vec<Int> = Vec::with_capacity(n * n);
    for a in &p.vertices {
        for b in &p.vertices {
            let d: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            values.push(form_value(q, &d));
        }
    }
    let mut palette: Vec<Int> = values
        .iter()
        .enumerate()
        .filter(|(k, _)| k / n.max(1) != k % n.max(1))
        .map(|(_, v)| v.clone())
        .collect();
    palette.sort();
    palette.dedup();
    let edge: Vec<u32> = values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if k / n == k % n {
                0
            } else {
                palette.binary_search(v).expect("in palette") as u32 + 1
            }
        })
        .collect();
    Ok(InvariantGraph { graph: ColouredGraph::new(vec![0; n], edge), palette })
}

/// Solves for affine maps from images of an affinely spanning vertex subset.
struct AffineFrame {
    base: Vec<usize>,
    inverse: Mat,
}

impl AffineFrame {
    fn new(vertices: &[Vec<i64>], dim: usize) -> Result<Self, EquivError> {
        if vertices.is_empty() {
            return Err(EquivError::NotFullDimensional);
        }
        let mut base = vec![0usize];
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (i, v) in vertices.iter().enumerate().skip(1) {
            if rows.len() == dim {
                break;
            }
            let d: Vec<Rat> = v.iter().zip(&vertices[0]).map(|(a, b)| rat(a - b)).collect();
            let mut trial = rows.clone();
            trial.push(d.clone());
            if exact::rank(&Mat::from_rows(dim, &trial)) == trial.len() {
                rows = trial;
                base.push(i);
            }
        }
        if rows.len() < dim {
            return Err(EquivError::NotFullDimensional);
        }
        // columns are the difference vectors
        let v = Mat::from_rows(dim, &rows).transpose();
        let inverse = exact::inverse(&v).expect("spanning differences");
        Ok(AffineFrame { base, inverse })
    }

    /// `(L, t)` with `L·src[i] + t = dst[map[i]]` for all `i`, if one exists in `Aff_n(Z)`.
    fn realize(&self, src: &[Vec<i64>], dst: &[Vec<i64>], map: &[usize]) -> Option<(IMat, Vec<i64>)> {
        let dim = self.inverse.rows();
        let b0 = self.base[0];
        let cols: Vec<Vec<Rat>> = self.base[1..]
            .iter()
            .map(|&i| dst[map[i]].iter().zip(&dst[map[b0]]).map(|(a, b)| rat(a - b)).collect())
            .collect();
        let w = Mat::from_rows(dim, &cols).transpose();
        let l = w.mul(&self.inverse).to_int()?;
        if exact::det(&l.to_rat()).abs() != rat(1) {
            return None;
        }
        let image0 = apply(&l, &vec![0; dim], &src[b0]);
        let t: Vec<i64> = dst[map[b0]].iter().zip(&image0).map(|(a, b)| a - b).collect();
        for (i, v) in src.iter().enumerate() {
            if apply(&l, &t, v) != dst[map[i]] {
                return None;
            }
        }
        Some((l, t))
    }
}

/// Symmetry group of a bounded perfect polytope acting on its (sorted) vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutGroup {
    pub generators: Vec<Perm>,
    pub order: BigUint,
    /// `(L, t)` for each generator.
    pub affine_realizations: Vec<(IMat, Vec<i64>)>,
}

/// Invariant graph, canonical form and automorphism group of one bounded record.
#[derive(Clone, Debug)]
pub struct Symmetry {
    pub graph: InvariantGraph,
    pub canon: Canon,
    pub group: AutGroup,
    pub certificate: Certificate,
}

fn serialize_canonical(dim: usize, palette: &[Int], key: &[u32], extra: &str) -> String {
    let mut s = String::new();
    s.push_str(CERTIFICATE_VERSION);
    s.push('\n');
    s.push_str(&format!("dim {dim}\n"));
    s.push_str(extra);
    s.push_str("palette");
    for c in palette {
        s.push(' ');
        s.push_str(&c.to_string());
    }
    s.push_str("\nkey");
    for k in key {
        s.push(' ');
        s.push_str(&k.to_string());
    }
    s.push('\n');
    s
}

fn hash(text: &str) -> Certificate {
    Certificate(hex::encode(Sha256::digest(text.as_bytes())))
}

pub fn analyze(p: &PolytopeRecord) -> Result<Symmetry, EquivError> {
    let graph = invariant_graph(p)?;
    let canon = canonical_form(&graph.graph);
    let frame = AffineFrame::new(&p.vertices, p.dim)?;
    let mut affine = Vec::with_capacity(canon.generators.len());
    for g in &canon.generators {
        let r = frame.realize(&p.vertices, &p.vertices, g).ok_or(EquivError::NotRealizable)?;
        affine.push(r);
    }
    let order = StabChain::new(p.vertices.len(), &canon.generators).order();
    let certificate = hash(&serialize_canonical(p.dim, &graph.palette, &canon.key, "bounded\n"));
    let group = AutGroup { generators: canon.generators.clone(), order, affine_realizations: affine };
    Ok(Symmetry { graph, canon, group, certificate })
}

pub fn automorphisms(p: &PolytopeRecord) -> Result<AutGroup, EquivError> {
    Ok(analyze(p)?.group)
}

/// Certificate of a record; unbounded records are keyed by the certificate of
/// their bounded factor and the rank of the translation lattice.
pub fn certificate(p: &PolytopeRecord) -> Result<Certificate, EquivError> {
    if p.bounded {
        return Ok(analyze(p)?.certificate);
    }
    let d = decompose(p)?;
    let inner = certificate(&d.factor)?;
    Ok(hash(&format!("{CERTIFICATE_VERSION}\nunbounded\ndim {}\nrank {}\nfactor {}\n", p.dim, d.gamma.len(), inner)))
}

/// Vertex colouring marking the members of `subset`.
pub fn membership_colours(p: &PolytopeRecord, subset: &[Vec<i64>]) -> Vec<u32> {
    p.vertices.iter().map(|v| u32::from(subset.contains(v))).collect()
}

/// Certificate of the pair (polytope, distinguished vertex subset), invariant
/// under affine maps carrying one pair onto the other.
pub fn marked_certificate(sym: &Symmetry, p: &PolytopeRecord, subset: &[Vec<i64>]) -> Certificate {
    let g = sym.graph.graph.with_vertex_colours(membership_colours(p, subset));
    let c = canonical_form(&g);
    hash(&serialize_canonical(p.dim, &sym.graph.palette, &c.key, "bounded marked\n"))
}

/// An affine lattice map carrying `p` onto `q`, or `None` when they are inequivalent.
pub fn are_equivalent(p: &PolytopeRecord, q: &PolytopeRecord) -> Result<Option<(IMat, Vec<i64>)>, EquivError> {
    if p.dim != q.dim || p.vertices.len() != q.vertices.len() {
        return Ok(None);
    }
    let gp = invariant_graph(p)?;
    let gq = invariant_graph(q)?;
    if gp.palette != gq.palette {
        return Ok(None);
    }
    let cp = canonical_form(&gp.graph);
    let cq = canonical_form(&gq.graph);
    let Some(map) = canon::isomorphism(&cp, &cq) else {
        return Ok(None);
    };
    let frame = AffineFrame::new(&p.vertices, p.dim)?;
    match frame.realize(&p.vertices, &q.vertices, &map) {
        Some((l, t)) => {
            debug_assert!({
                let mut img: Vec<Vec<i64>> = p.vertices.iter().map(|v| apply(&l, &t, v)).collect();
                img.sort();
                img == q.vertices
            });
            Ok(Some((l, t)))
        }
        // Every automorphism of p is affine, so one non-affine isomorphism means none is.
        None => Err(EquivError::NotRealizable),
    }
}

/// Realizes a vertex permutation of `p` as an affine lattice map.
pub fn realize_permutation(p: &PolytopeRecord, map: &[usize]) -> Result<Option<(IMat, Vec<i64>)>, EquivError> {
    let frame = AffineFrame::new(&p.vertices, p.dim)?;
    Ok(frame.realize(&p.vertices, &p.vertices, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::vertex_set_of;
    use crate::qfunc::QuadraticFunction;

    fn unit_segment() -> PolytopeRecord {
        vertex_set_of(&QuadraticFunction::from_ints(1, &[1], &[-1], 0).unwrap()).unwrap()
    }

    #[test]
    fn segment_graph_and_group() {
        let p = unit_segment();
        let g = invariant_graph(&p).unwrap();
        assert_eq!(g.palette, vec![Int::from(1)]);
        let aut = automorphisms(&p).unwrap();
        assert_eq!(aut.order, BigUint::from(2u32));
        assert_eq!(aut.affine_realizations, vec![(IMat::from_i64(1, 1, &[-1]), vec![1])]);
    }

    #[test]
    fn translation_invariance() {
        let p = unit_segment();
        let q = p.transformed(&IMat::identity(1), &[5]).unwrap();
        assert_eq!(q.vertices, vec![vec![5], vec![6]]);
        assert_eq!(certificate(&p).unwrap(), certificate(&q).unwrap());
        let (l, t) = are_equivalent(&p, &q).unwrap().unwrap();
        let mut img: Vec<Vec<i64>> = p.vertices.iter().map(|v| apply(&l, &t, v)).collect();
        img.sort();
        assert_eq!(img, q.vertices);
    }

    #[test]
    fn slab_certificates() {
        let a = vertex_set_of(&QuadraticFunction::from_ints(2, &[1, 0, 0, 0], &[-1, 0], 0).unwrap()).unwrap();
        let b = vertex_set_of(&QuadraticFunction::from_ints(2, &[0, 0, 0, 1], &[0, -1], 0).unwrap()).unwrap();
        assert_eq!(certificate(&a).unwrap(), certificate(&b).unwrap());
        let c = certificate(&a).unwrap();
        assert_eq!(c.0.len(), 64);
        assert!(c.0.chars().all(|ch| ch.is_ascii_hexdigit() && !ch.is_ascii_uppercase()));
    }
}
