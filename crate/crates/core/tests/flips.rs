mod common;

use common::{random_shift, random_unimodular};
use num_traits::{Signed, Zero};
use pdt_core::cvp::interior_point;
use pdt_core::delaunay::{apply, decompose_with, vertex_set_of, PolytopeRecord};
use pdt_core::equiv::{analyze, are_equivalent, certificate, marked_certificate};
use pdt_core::exact::{frac, rat};
use pdt_core::hinge::{flip, reverse_pencil, ridge_generator, FlipResult};
use pdt_core::qfunc::{qrank, vanishing_space};
use pdt_core::ridges::{ridge_orbits, RidgeOrbit};
use pdt_core::seeds::{gosset_221, gosset_321, unit_segment, unit_slab};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

/// 3_21, its ridge orbits, and the 35-vertex polytope across the 34-point orbit.
fn gosset_321_data() -> &'static (PolytopeRecord, Vec<RidgeOrbit>, PolytopeRecord) {
    static DATA: OnceLock<(PolytopeRecord, Vec<RidgeOrbit>, PolytopeRecord)> = OnceLock::new();
    DATA.get_or_init(|| {
        let p = gosset_321();
        let orbits = ridge_orbits(&p, &analyze(&p).unwrap()).unwrap();
        let s = &orbits.iter().find(|o| o.representative.len() == 34).unwrap().representative;
        let r = flip(&ridge_generator(&p, s).unwrap(), &p.vertices).unwrap();
        (p, orbits, r.new_record)
    })
}

fn transformed_ridge(p: &PolytopeRecord, s: &[Vec<i64>], seed: u64) -> (PolytopeRecord, Vec<Vec<i64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = random_unimodular(p.dim, &mut rng);
    let t = random_shift(p.dim, &mut rng);
    let q = p.transformed(&l, &t).unwrap();
    let mut img: Vec<Vec<i64>> = s.iter().map(|v| apply(&l, &t, v)).collect();
    img.sort();
    (q, img)
}

/// The flip postconditions that do not depend on boundedness of the result.
fn check_flip(p: &PolytopeRecord, s: &[Vec<i64>], r: &FlipResult) {
    let f = &r.pencil.f;
    let g = &r.pencil.g;
    assert!(r.rho_m.is_positive());
    let h = f.add_scaled(&r.rho_m, g);
    assert!(interior_point(&h).is_none(), "f + ρ_m·g takes a negative value");
    assert!(h.eval_int(&r.witness).is_zero());
    assert!(g.eval_int(&r.witness).is_negative());
    // just past ρ_m the pencil is no longer nonnegative
    let past = &r.rho_m * frac(11, 10);
    assert!(interior_point(&f.add_scaled(&past, g)).is_some());
    let new = &r.new_record;
    for v in s {
        assert!(new.contains(v));
    }
    assert!(new.contains(&r.witness));
    assert!(!p.contains(&r.witness));
    if new.bounded {
        assert!(new.vertices.len() > s.len());
        assert!(new.vertices.iter().any(|v| p.vertices.binary_search(v).is_err()));
        assert!(interior_point(&new.function).is_none());
    }
}

#[test]
fn golden_segment_flip() {
    let p = vertex_set_of(&pdt_core::qfunc::QuadraticFunction::from_ints(1, &[1], &[-3], 2).unwrap()).unwrap();
    assert_eq!(p.vertices, vec![vec![1], vec![2]]);
    let s = vec![vec![2]];
    let r = flip(&ridge_generator(&p, &s).unwrap(), &p.vertices).unwrap();
    assert_eq!(r.rho_m, rat(2));
    assert_eq!(r.witness, vec![3]);
    assert_eq!(r.new_record.vertices, vec![vec![2], vec![3]]);
    check_flip(&p, &s, &r);
}

#[test]
fn flips_of_transformed_seeds_satisfy_postconditions() {
    let seg = unit_segment();
    let g221 = gosset_221();
    let s221 = ridge_orbits(&g221, &analyze(&g221).unwrap()).unwrap()[0].representative.clone();
    for seed in 0..10 {
        for (p, s) in [(&seg, vec![vec![1]]), (&seg, vec![vec![0]]), (&g221, s221.clone())] {
            let (q, img) = transformed_ridge(p, &s, seed);
            let r = flip(&ridge_generator(&q, &img).unwrap(), &q.vertices).unwrap();
            check_flip(&q, &img, &r);
            assert_eq!(r.new_record.bounded, p.dim == 1);
        }
    }
}

#[test]
fn bounded_flips_are_involutions() {
    let (p321, _, er35) = gosset_321_data();
    let seg = unit_segment();
    let mut cases = vec![(seg.clone(), vec![vec![0]]), (seg, vec![vec![1]])];
    let s35 = gosset_321_data().1.iter().find(|o| o.representative.len() == 34).unwrap().representative.clone();
    cases.push((p321.clone(), s35));
    for seed in 0..4 {
        for (p, s) in &cases {
            let (q, img) = transformed_ridge(p, s, seed);
            let forward = ridge_generator(&q, &img).unwrap();
            let r = flip(&forward, &q.vertices).unwrap();
            assert!(r.new_record.bounded);
            check_flip(&q, &img, &r);
            let back = flip(&reverse_pencil(&r.pencil, &r), &r.new_record.vertices).unwrap();
            assert_eq!(back.new_record.vertices, q.vertices);
            // the forward result also arises from the pencil built from scratch
            let again = flip(&ridge_generator(&r.new_record, &img).unwrap(), &r.new_record.vertices).unwrap();
            assert_eq!(again.new_record.vertices, q.vertices);
        }
    }
    assert_eq!(er35.vertices.len(), 35);
}

#[test]
fn perfect_records_have_one_dimensional_vanishing_space() {
    let (p321, _, er35) = gosset_321_data();
    for p in [unit_segment(), gosset_221(), p321.clone(), er35.clone()] {
        for seed in 0..3 {
            let (q, _) = transformed_ridge(&p, &[], seed);
            let space = vanishing_space(&q.vertices, q.dim);
            assert_eq!(space.len(), 1);
            assert_eq!(space[0].normalized(), q.function.normalized());
            assert_eq!(vertex_set_of(&q.function).unwrap(), q);
            assert_eq!(qrank(&q.vertices, q.dim), 1);
        }
    }
}

#[test]
fn slab_decompositions_agree_for_different_bases() {
    let z2 = unit_slab(2);
    let a = decompose_with(&z2, &[vec![1, 0]]).unwrap();
    let b = decompose_with(&z2, &[vec![1, 3]]).unwrap();
    assert!(are_equivalent(&a.factor, &b.factor).unwrap().is_some());

    let z3 = unit_slab(3);
    let mut other = z3.clone();
    other.kernel = vec![vec![0, 1, 1], vec![0, 1, 2]];
    let a = decompose_with(&z3, &[vec![1, 0, 0]]).unwrap();
    let b = decompose_with(&other, &[vec![1, -2, 5]]).unwrap();
    assert!(are_equivalent(&a.factor, &b.factor).unwrap().is_some());
    for x in -3..=3 {
        for y in -3..=3 {
            for z in -3..=3 {
                let p = [x, y, z];
                assert_eq!(a.contains(&p), x == 0 || x == 1);
                assert_eq!(b.contains(&p), a.contains(&p));
            }
        }
    }
    assert_eq!(certificate(&z3).unwrap(), certificate(&other).unwrap());
}

#[test]
fn equivalence_is_sound_and_certificates_invariant() {
    let (p321, _, er35) = gosset_321_data();
    let seeds = [unit_segment(), pdt_core::seeds::unit_cube(3), gosset_221(), p321.clone(), er35.clone()];
    for p in &seeds {
        let cert = certificate(p).unwrap();
        for seed in 0..4 {
            let (q, _) = transformed_ridge(p, &[], 100 + seed);
            assert_eq!(certificate(&q).unwrap(), cert);
            let (l, t) = are_equivalent(p, &q).unwrap().expect("equivalent");
            let mut img: Vec<Vec<i64>> = p.vertices.iter().map(|v| apply(&l, &t, v)).collect();
            img.sort();
            assert_eq!(img, q.vertices);
            // Lᵀ·Q·L matches the source gram up to the positive scale fixed by normalization
            let pulled = q.function.compose_affine(&l.to_rat(), &pdt_core::exact::to_rat_vec(&t)).normalized();
            assert_eq!(pulled, p.function.normalized());
        }
    }
    assert!(are_equivalent(&gosset_221(), &p321.clone()).unwrap().is_none());
    assert_ne!(certificate(p321).unwrap(), certificate(er35).unwrap());
}

#[test]
fn ridge_orbits_are_equivariant() {
    let (_, _, er35) = gosset_321_data();
    for p in [gosset_221(), er35.clone()] {
        let sym = analyze(&p).unwrap();
        let orbits = ridge_orbits(&p, &sym).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let l = random_unimodular(p.dim, &mut rng);
        let t = random_shift(p.dim, &mut rng);
        let q = p.transformed(&l, &t).unwrap();
        let qsym = analyze(&q).unwrap();
        let qorbits = ridge_orbits(&q, &qsym).unwrap();
        assert_eq!(orbits.len(), qorbits.len());
        for (a, b) in orbits.iter().zip(&qorbits) {
            assert_eq!(a.orbit_size, b.orbit_size);
            let img: Vec<Vec<i64>> = a.representative.iter().map(|v| apply(&l, &t, v)).collect();
            assert_eq!(marked_certificate(&qsym, &q, &img), marked_certificate(&qsym, &q, &b.representative));
        }
    }
}
