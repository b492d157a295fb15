//! Flipping a perfect Delaunay polytope across a ridge.
//!
//! A ridge is a vertex subset `S` with qrank 2. The functions vanishing on `S`
//! form a pencil `f + ρ·g`, where `f` is the polytope's function and `g > 0`
//! on the remaining vertices. Increasing `ρ` rotates the supporting hyperplane
//! about the ridge until it meets a new lattice point; the function at that
//! moment defines the neighbouring perfect Delaunay polyhedron.

use crate::cvp::interior_point;
use crate::delaunay::{vertex_set_of, DelaunayError, PolytopeRecord};
use crate::exact::{rank, rat, simplest_between, Definiteness, Mat, Rat};
use crate::qfunc::{qrank, vanishing_space, QuadraticFunction};
use log::debug;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

/// Largest multiple of `f` subtracted from `g` before giving up on a pencil.
const MAX_REPARAMETRIZATION: i64 = 1 << 40;

/// Bracketing rounds (64 probes each) spent on a semidefinite boundary.
const MAX_BOUNDARY_ROUNDS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HingeError {
    #[error("ridge has qrank {0}, expected 2")]
    QrankMismatch(usize),
    #[error("ridge is not a subset of the vertex set")]
    NotSubset,
    #[error("generator has no uniform sign off the ridge")]
    SignAmbiguous,
    #[error("source polytope is unbounded")]
    UnboundedSource,
    #[error("no finite flip along this ridge")]
    UnboundedRidge,
    #[error("hinge parameter limit is not rational")]
    IrrationalBoundary,
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HingePencil {
    /// Source function, lattice minimum 0.
    pub f: QuadraticFunction,
    /// Vanishes on the ridge and is positive on the other source vertices.
    pub g: QuadraticFunction,
    pub ridge: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipResult {
    /// `ρ_m` for the generator actually used (see [`FlipResult::pencil`]).
    pub rho_m: Rat,
    pub new_record: PolytopeRecord,
    /// Lattice point `u` with `f(u) + ρ_m·g(u) = 0` and `g(u) < 0`.
    pub witness: Vec<i64>,
    /// The pencil after any reparametrization `g ← g − k·f`.
    pub pencil: HingePencil,
}

fn pivot(f: &QuadraticFunction) -> (usize, Rat) {
    let c = f.coeffs();
    let i = c.iter().position(|x| !x.is_zero()).expect("nonzero function");
    (i, c[i].clone())
}

/// `g` with its coefficient on the first nonzero monomial of `f` removed, primitive integral.
fn reduce_against(g: &QuadraticFunction, f: &QuadraticFunction) -> QuadraticFunction {
    let (p, fp) = pivot(f);
    let gp = g.coeffs()[p].clone();
    g.add_scaled(&-(gp / fp), f).positive_primitive()
}

/// The hinge generator of `p` around the ridge `s`.
pub fn ridge_generator(p: &PolytopeRecord, s: &[Vec<i64>]) -> Result<HingePencil, HingeError> {
    if !p.bounded {
        return Err(HingeError::UnboundedSource);
    }
    if !s.iter().all(|v| p.vertices.binary_search(v).is_ok()) {
        return Err(HingeError::NotSubset);
    }
    let mut ridge = s.to_vec();
    ridge.sort();
    ridge.dedup();
    let r = qrank(&ridge, p.dim);
    if r != 2 {
        return Err(HingeError::QrankMismatch(r));
    }
    let f = &p.function;
    let basis = vanishing_space(&ridge, p.dim);
    let (pi, _) = pivot(f);
    // first basis element not proportional to f, with its f-pivot coefficient removed
    let g = basis
        .iter()
        .map(|h| {
            let hp = h.coeffs()[pi].clone();
            let fp = f.coeffs()[pi].clone();
            h.add_scaled(&-(hp / fp), f)
        })
        .find(|h| !h.is_zero())
        .expect("qrank 2 pencil contains a function independent of f")
        .positive_primitive();
    let off: Vec<&Vec<i64>> = p.vertices.iter().filter(|v| ridge.binary_search(v).is_err()).collect();
    let signs: Vec<Rat> = off.iter().map(|v| g.eval_int(v)).collect();
    let g = if signs.iter().all(|x| x.is_positive()) {
        g
    } else if signs.iter().all(|x| x.is_negative()) {
        g.scale(&rat(-1))
    } else {
        return Err(HingeError::SignAmbiguous);
    };
    Ok(HingePencil { f: f.clone(), g, ridge })
}

/// Pencil that flips `result` back across the same ridge.
pub fn reverse_pencil(forward: &HingePencil, result: &FlipResult) -> HingePencil {
    let f = result.new_record.function.clone();
    let g = reduce_against(&forward.g.scale(&rat(-1)), &f);
    HingePencil { f, g, ridge: forward.ridge.clone() }
}

/// Starting point with `g(z) < 0`: reflections of off-ridge source vertices
/// through ridge vertices, falling back to a lattice point of negative `g`.
fn start_point(pencil: &HingePencil, source: &[Vec<i64>]) -> Option<(Vec<i64>, Rat)> {
    let mut best: Option<(Vec<i64>, Rat)> = None;
    for v in source {
        if pencil.ridge.binary_search(v).is_ok() {
            continue;
        }
        for s in &pencil.ridge {
            let z: Vec<i64> = s.iter().zip(v).map(|(a, b)| 2 * a - b).collect();
            let gz = pencil.g.eval_int(&z);
            if gz.is_negative() {
                let rho = pencil.f.eval_int(&z) / -gz;
                if best.as_ref().is_none_or(|(_, r)| &rho < r) {
                    best = Some((z, rho));
                }
            }
        }
    }
    if best.is_some() {
        return best;
    }
    let z = interior_point(&pencil.g)?;
    let rho = pencil.f.eval_int(&z) / -pencil.g.eval_int(&z);
    Some((z, rho))
}

enum Boundary {
    /// The semidefinite boundary value itself is admissible.
    Admissible(Rat),
    /// A lattice point below the boundary where the pencil is negative.
    Obstructed(Vec<i64>),
}

fn common_kernel_dim(pencil: &HingePencil) -> usize {
    let n = pencil.f.dim();
    let mut rows = pencil.f.gram().to_rows();
    rows.extend(pencil.g.gram().to_rows());
    n - rank(&Mat::from_rows(n, &rows))
}

/// Gram of `f + ρ·g`: positive semidefinite with only the common kernel
/// (`Less`), semidefinite with a larger kernel (`Equal`), or indefinite (`Greater`).
fn classify(pencil: &HingePencil, rho: &Rat, common: usize) -> Ordering {
    match pencil.f.add_scaled(rho, &pencil.g).definiteness() {
        Definiteness::PositiveDefinite => Ordering::Less,
        Definiteness::PositiveSemidefinite { kernel } if kernel.len() == common => Ordering::Less,
        Definiteness::PositiveSemidefinite { .. } => Ordering::Equal,
        Definiteness::Indefinite { .. } => Ordering::Greater,
    }
}

/// Locates the largest `ρ* < hi` keeping the pencil semidefinite, by
/// alternating simplest-rational probes with bisection. Every definite probe
/// is also checked for a lattice point where the pencil is negative, which
/// settles the flip below the boundary.
fn boundary_step(pencil: &HingePencil, hi: &Rat, common: usize) -> Result<Boundary, HingeError> {
    let mut lo = Rat::zero();
    let mut hi = hi.clone();
    for round in 0..MAX_BOUNDARY_ROUNDS {
        for step in 0..64 {
            let c = if step % 2 == 0 { simplest_between(&lo, Some(&hi)) } else { (&lo + &hi) / rat(2) };
            match classify(pencil, &c, common) {
                Ordering::Less => {
                    // probe while the form is still well conditioned
                    if let Some(w) = interior_point(&pencil.f.add_scaled(&c, &pencil.g)) {
                        return Ok(Boundary::Obstructed(w));
                    }
                    lo = c;
                }
                Ordering::Greater => hi = c,
                Ordering::Equal => {
                    let h = pencil.f.add_scaled(&c, &pencil.g);
                    return Ok(match interior_point(&h) {
                        None => Boundary::Admissible(c),
                        Some(w) => Boundary::Obstructed(w),
                    });
                }
            }
        }
        debug!("boundary bracket round {round}: [{lo}, {hi}]");
    }
    Err(HingeError::IrrationalBoundary)
}

/// Rotates the pencil until it meets a new lattice point.
///
/// `source` is used only to pick a starting point; pass the source vertices
/// (or an empty slice).
pub fn flip(pencil: &HingePencil, source: &[Vec<i64>]) -> Result<FlipResult, HingeError> {
    let mut pencil = pencil.clone();
    let mut k: i64 = 1;
    let (mut z, mut rho) = loop {
        if let Some(found) = start_point(&pencil, source) {
            break found;
        }
        // g ≥ 0 on the lattice: every ρ ≥ 0 is admissible, so tilt the generator toward −f.
        if k > MAX_REPARAMETRIZATION {
            return Err(HingeError::UnboundedRidge);
        }
        debug!("generator nonnegative on the lattice, subtracting {k}·f");
        pencil.g = pencil.g.add_scaled(&rat(-k), &pencil.f).positive_primitive();
        k *= 2;
    };
    let common = common_kernel_dim(&pencil);
    let mut steps = 0usize;
    loop {
        let h = pencil.f.add_scaled(&rho, &pencil.g);
        let w = if matches!(h.definiteness(), Definiteness::Indefinite { .. }) {
            // Every admissible ρ keeps the gram semidefinite, so ρ_m lies below the boundary.
            match boundary_step(&pencil, &rho, common)? {
                Boundary::Admissible(star) => {
                    rho = star;
                    break;
                }
                Boundary::Obstructed(w) => w,
            }
        } else {
            match interior_point(&h) {
                None => break,
                Some(w) => w,
            }
        };
        let gw = pencil.g.eval_int(&w);
        assert!(gw.is_negative(), "interior point of the pencil must have g < 0");
        let next = pencil.f.eval_int(&w) / -gw;
        assert!(next < rho, "hinge parameter must strictly decrease");
        z = w;
        rho = next;
        steps += 1;
    }
    debug!("flip converged after {steps} refinements, rho = {rho}");
    let h = pencil.f.add_scaled(&rho, &pencil.g);
    let new_record = vertex_set_of(&h)?;
    Ok(FlipResult { rho_m: rho, new_record, witness: z, pencil })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(a: i64) -> PolytopeRecord {
        // (x − a)(x − a − 1)
        vertex_set_of(&QuadraticFunction::from_ints(1, &[1], &[-(2 * a + 1)], a * (a + 1)).unwrap()).unwrap()
    }

    fn qf(g: &[i64], l: &[i64], c: i64) -> QuadraticFunction {
        QuadraticFunction::from_ints(g.len().isqrt(), g, l, c).unwrap()
    }

    #[test]
    fn generator_examples() {
        assert_eq!(ridge_generator(&segment(0), &[vec![1]]).unwrap().g, qf(&[0], &[-1], 1));
        assert_eq!(ridge_generator(&segment(1), &[vec![2]]).unwrap().g, qf(&[0], &[-1], 2));
        assert_eq!(
            ridge_generator(&segment(1), &[vec![1], vec![2]]),
            Err(HingeError::QrankMismatch(1))
        );
    }

    #[test]
    fn golden_segment_flip() {
        let p = segment(1);
        let pencil = ridge_generator(&p, &[vec![2]]).unwrap();
        let r = flip(&pencil, &p.vertices).unwrap();
        assert_eq!(r.rho_m, rat(2));
        assert_eq!(r.witness, vec![3]);
        assert_eq!(r.new_record.vertices, vec![vec![2], vec![3]]);
        assert_eq!(r.new_record.function, qf(&[1], &[-5], 6));
    }

    #[test]
    fn flip_from_unit_segment() {
        let p = segment(0);
        let pencil = ridge_generator(&p, &[vec![1]]).unwrap();
        let r = flip(&pencil, &p.vertices).unwrap();
        assert_eq!(r.rho_m, rat(2));
        assert_eq!(r.new_record.vertices, vec![vec![1], vec![2]]);
        let r = flip(&ridge_generator(&p, &[vec![0]]).unwrap(), &p.vertices).unwrap();
        assert_eq!(r.new_record.vertices, vec![vec![-1], vec![0]]);
    }

    #[test]
    fn flip_back_recovers_source() {
        let p = segment(1);
        let pencil = ridge_generator(&p, &[vec![2]]).unwrap();
        let r = flip(&pencil, &p.vertices).unwrap();
        let back = reverse_pencil(&pencil, &r);
        assert_eq!(back.g, qf(&[0], &[1], -2));
        let rr = flip(&back, &r.new_record.vertices).unwrap();
        assert_eq!(rr.new_record, p);
        // the direct generator on the new segment agrees with the reverse pencil
        assert_eq!(ridge_generator(&r.new_record, &[vec![2]]).unwrap().g, back.g);
    }

    #[test]
    fn nonnegative_generator_is_reparametrized() {
        // g = (x − 1)² vanishes on the ridge and is nonnegative everywhere
        let p = segment(0);
        let pencil = HingePencil { f: p.function.clone(), g: qf(&[1], &[-2], 1), ridge: vec![vec![1]] };
        let r = flip(&pencil, &[]).unwrap();
        assert_eq!(r.new_record.vertices, vec![vec![1], vec![2]]);
    }
}
