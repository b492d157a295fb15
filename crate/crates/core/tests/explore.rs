mod common;

use common::{random_shift, random_unimodular};
use pdt_core::delaunay::PolytopeRecord;
use pdt_core::equiv::{certificate, Certificate};
use pdt_core::hinge::{flip, ridge_generator};
use pdt_core::explore::{explore, export_gap, export_json, AdjacencyGraph, Control, Exploration, Limits, StopReason};
use pdt_core::qfunc::qrank;
use pdt_core::seeds::{gosset_221, gosset_321, unit_segment};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn certificates(g: &AdjacencyGraph) -> Vec<Certificate> {
    g.nodes.iter().map(|n| n.certificate.clone()).collect()
}

fn check_edges(g: &AdjacencyGraph) {
    for e in &g.edges {
        assert_eq!(qrank(&e.ridge, g.dim), 2);
        let source = &g.nodes[e.source].record;
        for v in &e.ridge {
            assert!(source.vertices.binary_search(v).is_ok());
        }
        // the target is stored in the coordinates where it was first found, so compare classes
        let r = flip(&ridge_generator(source, &e.ridge).unwrap(), &source.vertices).unwrap();
        assert!(e.ridge.iter().all(|v| r.new_record.contains(v)));
        assert_eq!(certificate(&r.new_record).unwrap(), g.nodes[e.target].certificate);
    }
}

#[test]
fn exploration_is_deterministic() {
    for seed in [unit_segment(), gosset_221()] {
        let mut a = Exploration::new(&[seed.clone()]).unwrap();
        let mut b = Exploration::new(&[seed]).unwrap();
        assert_eq!(a.run(&Limits::default(), &mut Control::default()).unwrap(), StopReason::Complete);
        assert_eq!(b.run(&Limits::default(), &mut Control::default()).unwrap(), StopReason::Complete);
        assert_eq!(a.to_json(), b.to_json());
        check_edges(&a.graph);
    }
}

#[test]
fn exploration_is_invariant_under_lattice_maps() {
    let cases: [(PolytopeRecord, &str); 2] = [(unit_segment(), "1: [1, 1]\n"), (gosset_221(), "1:\n")];
    for (p, gap) in cases {
        let reference = explore(&[p.clone()], &Limits::default()).unwrap();
        assert_eq!(export_gap(&reference), gap);
        let mut rng = ChaCha8Rng::seed_from_u64(p.dim as u64);
        for _ in 0..10 {
            let l = random_unimodular(p.dim, &mut rng);
            let t = random_shift(p.dim, &mut rng);
            let g = explore(&[p.transformed(&l, &t).unwrap()], &Limits::default()).unwrap();
            assert_eq!(certificates(&g), certificates(&reference));
            assert_eq!(export_gap(&g), gap);
            check_edges(&g);
        }
    }
}

#[test]
fn resuming_from_any_checkpoint_reproduces_the_full_run() {
    let mut snapshots: Vec<String> = Vec::new();
    let mut full = Exploration::new(&[gosset_321()]).unwrap();
    {
        let mut record = |ex: &Exploration| snapshots.push(ex.to_json());
        let mut control = Control { stop: None, checkpoint: Some(&mut record) };
        assert_eq!(full.run(&Limits::default(), &mut control).unwrap(), StopReason::Complete);
    }
    assert_eq!(export_gap(&full.graph), "1: [1, 2]\n2:\n");
    assert_eq!(full.graph.bounded_nodes().len(), 2);
    check_edges(&full.graph);
    let expected = export_json(&full);
    assert!(snapshots.len() >= 8);
    for snap in &snapshots {
        let mut ex = Exploration::from_json(snap).unwrap();
        assert_eq!(ex.run(&Limits::default(), &mut Control::default()).unwrap(), StopReason::Complete);
        assert_eq!(export_json(&ex), expected);
        assert_eq!(ex.to_json(), full.to_json());
    }
}

#[test]
fn flip_limits_stop_and_resume() {
    let mut ex = Exploration::new(&[gosset_221()]).unwrap();
    let limits = Limits { max_flips: Some(0), ..Limits::default() };
    assert_eq!(ex.run(&limits, &mut Control::default()).unwrap(), StopReason::MaxFlips);
    assert!(ex.state.flips.is_empty());
    let mut resumed = Exploration::from_json(&ex.to_json()).unwrap();
    assert_eq!(resumed.run(&Limits::default(), &mut Control::default()).unwrap(), StopReason::Complete);
    assert_eq!(export_gap(&resumed.graph), "1:\n");
    assert_eq!(resumed.graph.nodes.len(), 2);
}
