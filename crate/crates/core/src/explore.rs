//! Breadth-first construction of the adjacency graph of perfect Delaunay
//! polytopes reachable from seeds by flips, with resumable state and export.
//!
//! Every bounded node is expanded by flipping one representative of each
//! ridge orbit. Bounded results are deduplicated by certificate; unbounded
//! results become terminal nodes. An edge is identified by the unordered pair
//! of marked certificates (polytope, ridge) seen from its two ends, so the
//! same facet pair reached from either side is recorded once.

use crate::cvp::interior_point;
use crate::delaunay::{circumscribe, vertex_set_of, DelaunayError, PolytopeRecord};
use crate::equiv::{analyze, are_equivalent, certificate, marked_certificate, Certificate, EquivError, Symmetry};
use crate::hinge::{flip, ridge_generator, HingeError};
use crate::qfunc::{qrank, QuadraticFunction};
use crate::ridges::{ridge_orbits, RidgeError, RidgeOrbit};
use log::{debug, info};
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};
use thiserror::Error;

/// Format tag of serialized explorations.
pub const STATE_VERSION: &str = "pdt-explore/1";

/// Completeness caveat carried by every export.
pub const CAVEAT: &str = "ridges of unbounded perfect polyhedra are not enumerated, so the component may be incomplete";

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("seed {index} is not a bounded perfect Delaunay polytope")]
    InvalidSeed { index: usize },
    #[error("seeds have different dimensions")]
    MixedDimensions,
    #[error("certificate {0} matched an inequivalent polytope")]
    CertificateCollision(Certificate),
    #[error("state file version {0:?} is not supported")]
    Version(String),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Ridge(#[from] RidgeError),
    #[error(transparent)]
    Hinge(#[from] HingeError),
    #[error(transparent)]
    Delaunay(#[from] DelaunayError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Total number of nodes, bounded and unbounded.
    pub max_nodes: Option<usize>,
    /// Total number of flips, counted across resumed runs.
    pub max_flips: Option<usize>,
    /// Seconds for this run.
    pub wall_clock: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub certificate: Certificate,
    pub record: PolytopeRecord,
    pub bounded: bool,
}

/// Edge between the source of a flip and its result, labelled by the source ridge orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    /// Index into the source node's ridge orbit list.
    pub orbit: usize,
    /// Orbit representative, in the source node's coordinates.
    pub ridge: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyGraph {
    pub dim: usize,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl AdjacencyGraph {
    /// Indices of bounded nodes in discovery order.
    pub fn bounded_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].bounded).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub representative: Vec<Vec<i64>>,
    pub orbit_size: u64,
    /// Decimal.
    pub stabilizer_order: String,
}

impl From<RidgeOrbit> for OrbitEntry {
    fn from(o: RidgeOrbit) -> Self {
        OrbitEntry { representative: o.representative, orbit_size: o.orbit_size, stabilizer_order: o.stabilizer_order.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeProgress {
    pub orbits: Vec<OrbitEntry>,
    /// Orbits `0..done` have been flipped.
    pub done: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlipOutcome {
    Node {
        target: usize,
        /// `ρ_m` as `p/q`.
        rho_m: String,
        witness: Vec<i64>,
        /// False when the edge was already known from its other end.
        new_edge: bool,
    },
    UnboundedRidge,
    IrrationalBoundary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub source: usize,
    pub orbit: usize,
    pub ridge: Vec<Vec<i64>>,
    pub outcome: FlipOutcome,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationState {
    /// Bounded nodes not yet fully expanded, in discovery order.
    pub frontier: VecDeque<usize>,
    pub progress: BTreeMap<usize, NodeProgress>,
    pub registry: BTreeMap<Certificate, usize>,
    /// Unordered pairs of marked certificates of recorded edges.
    pub edge_keys: BTreeSet<(Certificate, Certificate)>,
    pub flips: Vec<FlipRecord>,
    pub complete: bool,
}

/// Graph plus the bookkeeping needed to resume.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exploration {
    pub version: String,
    pub graph: AdjacencyGraph,
    pub state: ExplorationState,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Complete,
    MaxNodes,
    MaxFlips,
    WallClock,
    Interrupted,
}

/// Cancellation flag and per-flip checkpoint hook for [`Exploration::run`].
#[derive(Default)]
pub struct Control<'a> {
    pub stop: Option<&'a AtomicBool>,
    pub checkpoint: Option<&'a mut dyn FnMut(&Exploration)>,
}

struct Prepared {
    orbit: usize,
    outcome: Result<PreparedFlip, HingeError>,
}

struct PreparedFlip {
    rho_m: String,
    witness: Vec<i64>,
    record: PolytopeRecord,
    certificate: Certificate,
    /// Marked certificates of the ridge on the source and result sides.
    marks: (Certificate, Certificate),
}

fn prepare(source: &PolytopeRecord, sym: &Symmetry, orbit: usize, ridge: &[Vec<i64>]) -> Result<Prepared, ExploreError> {
    let pencil = ridge_generator(source, ridge)?;
    let result = match flip(&pencil, &source.vertices) {
        Ok(r) => r,
        Err(e @ (HingeError::UnboundedRidge | HingeError::IrrationalBoundary)) => return Ok(Prepared { orbit, outcome: Err(e) }),
        Err(e) => return Err(e.into()),
    };
    let record = result.new_record;
    let source_mark = marked_certificate(sym, source, ridge);
    let (cert, target_mark) = if record.bounded {
        let s = analyze(&record)?;
        let m = marked_certificate(&s, &record, ridge);
        (s.certificate, m)
    } else {
        let c = certificate(&record)?;
        (c.clone(), Certificate(format!("unbounded:{c}")))
    };
    let marks = if source_mark <= target_mark { (source_mark, target_mark) } else { (target_mark, source_mark) };
    Ok(Prepared {
        orbit,
        outcome: Ok(PreparedFlip { rho_m: result.rho_m.to_string(), witness: result.witness, record, certificate: cert, marks }),
    })
}

impl Exploration {
    /// Registers the seeds as the first nodes.
    pub fn new(seeds: &[PolytopeRecord]) -> Result<Self, ExploreError> {
        let dim = seeds.first().map_or(0, |s| s.dim);
        let mut ex = Exploration { version: STATE_VERSION.to_string(), graph: AdjacencyGraph { dim, ..Default::default() }, state: ExplorationState::default() };
        for (index, seed) in seeds.iter().enumerate() {
            if seed.dim != dim {
                return Err(ExploreError::MixedDimensions);
            }
            if !seed.bounded || !seed.is_perfect() {
                return Err(ExploreError::InvalidSeed { index });
            }
            let c = analyze(seed)?.certificate;
            if ex.state.registry.contains_key(&c) {
                continue;
            }
            let id = ex.graph.nodes.len();
            ex.state.registry.insert(c.clone(), id);
            ex.graph.nodes.push(Node { certificate: c, record: seed.clone(), bounded: true });
            ex.state.frontier.push_back(id);
        }
        Ok(ex)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn check_version(&self) -> Result<(), ExploreError> {
        if self.version == STATE_VERSION {
            Ok(())
        } else {
            Err(ExploreError::Version(self.version.clone()))
        }
    }

    /// Continues the breadth-first search until it completes or a limit is hit.
    /// State is consistent after every applied flip, so a stop never loses work.
    pub fn run(&mut self, limits: &Limits, control: &mut Control<'_>) -> Result<StopReason, ExploreError> {
        self.check_version()?;
        let start = Instant::now();
        let deadline = limits.wall_clock.map(Duration::from_secs);
        let batch = rayon::current_num_threads().max(1);
        while let Some(&node) = self.state.frontier.front() {
            let record = self.graph.nodes[node].record.clone();
            let sym = analyze(&record)?;
            if !self.state.progress.contains_key(&node) {
                let orbits = ridge_orbits(&record, &sym)?;
                info!("node {} ({} vertices): {} ridge orbits", node + 1, record.vertices.len(), orbits.len());
                let orbits = orbits.into_iter().map(OrbitEntry::from).collect();
                self.state.progress.insert(node, NodeProgress { orbits, done: 0 });
                self.checkpoint(control);
            }
            loop {
                let (done, total) = {
                    let p = &self.state.progress[&node];
                    (p.done, p.orbits.len())
                };
                if done == total {
                    break;
                }
                if let Some(reason) = self.should_stop(limits, control, start, deadline) {
                    return Ok(reason);
                }
                let end = (done + batch).min(total);
                let ridges: Vec<(usize, Vec<Vec<i64>>)> =
                    (done..end).map(|i| (i, self.state.progress[&node].orbits[i].representative.clone())).collect();
                let prepared: Vec<Result<Prepared, ExploreError>> =
                    ridges.par_iter().map(|(i, s)| prepare(&record, &sym, *i, s)).collect();
                for p in prepared {
                    if let Some(reason) = self.should_stop(limits, control, start, deadline) {
                        return Ok(reason);
                    }
                    if !self.apply(node, p?, limits)? {
                        return Ok(StopReason::MaxNodes);
                    }
                    self.checkpoint(control);
                }
            }
            self.state.frontier.pop_front();
            self.checkpoint(control);
        }
        self.state.complete = true;
        Ok(StopReason::Complete)
    }

    fn checkpoint(&self, control: &mut Control<'_>) {
        if let Some(cb) = control.checkpoint.as_mut() {
            cb(self);
        }
    }

    fn should_stop(&self, limits: &Limits, control: &Control<'_>, start: Instant, deadline: Option<Duration>) -> Option<StopReason> {
        if control.stop.is_some_and(|s| s.load(Ordering::SeqCst)) {
            return Some(StopReason::Interrupted);
        }
        if limits.max_flips.is_some_and(|m| self.state.flips.len() >= m) {
            return Some(StopReason::MaxFlips);
        }
        if deadline.is_some_and(|d| start.elapsed() >= d) {
            return Some(StopReason::WallClock);
        }
        None
    }

    /// Records one flip; returns false (and changes nothing) when it would exceed `max_nodes`.
    fn apply(&mut self, source: usize, p: Prepared, limits: &Limits) -> Result<bool, ExploreError> {
        let ridge = self.state.progress[&source].orbits[p.orbit].representative.clone();
        let outcome = match p.outcome {
            Err(HingeError::UnboundedRidge) => FlipOutcome::UnboundedRidge,
            Err(HingeError::IrrationalBoundary) => FlipOutcome::IrrationalBoundary,
            Err(e) => return Err(e.into()),
            Ok(f) => {
                let target = match self.state.registry.get(&f.certificate) {
                    Some(&t) => {
                        let known = &self.graph.nodes[t];
                        if known.bounded && are_equivalent(&known.record, &f.record)?.is_none() {
                            return Err(ExploreError::CertificateCollision(f.certificate));
                        }
                        t
                    }
                    None => {
                        if limits.max_nodes.is_some_and(|m| self.graph.nodes.len() >= m) {
                            return Ok(false);
                        }
                        let t = self.graph.nodes.len();
                        debug!("new node {} ({} vertices, bounded {})", t + 1, f.record.vertices.len(), f.record.bounded);
                        self.state.registry.insert(f.certificate.clone(), t);
                        if f.record.bounded {
                            self.state.frontier.push_back(t);
                        }
                        let bounded = f.record.bounded;
                        self.graph.nodes.push(Node { certificate: f.certificate, record: f.record, bounded });
                        t
                    }
                };
                let new_edge = self.state.edge_keys.insert(f.marks);
                if new_edge {
                    self.graph.edges.push(Edge { source, target, orbit: p.orbit, ridge: ridge.clone() });
                }
                FlipOutcome::Node { target, rho_m: f.rho_m, witness: f.witness, new_edge }
            }
        };
        self.state.flips.push(FlipRecord { source, orbit: p.orbit, ridge, outcome });
        self.state.progress.get_mut(&source).expect("node in progress").done += 1;
        Ok(true)
    }
}

/// Explores from `seeds` until completion or a limit.
pub fn explore(seeds: &[PolytopeRecord], limits: &Limits) -> Result<AdjacencyGraph, ExploreError> {
    let mut ex = Exploration::new(seeds)?;
    ex.run(limits, &mut Control::default())?;
    Ok(ex.graph)
}

/// Adjacency list of the bounded nodes in GAP layout: line `k` lists `[k, j]`
/// for every edge whose lower endpoint is `k`, in discovery order.
pub fn export_gap(g: &AdjacencyGraph) -> String {
    let bounded = g.bounded_nodes();
    let number: BTreeMap<usize, usize> = bounded.iter().enumerate().map(|(k, &i)| (i, k + 1)).collect();
    let mut lines: Vec<Vec<usize>> = vec![Vec::new(); bounded.len()];
    for e in &g.edges {
        let (Some(&a), Some(&b)) = (number.get(&e.source), number.get(&e.target)) else {
            continue;
        };
        let (lo, hi) = (a.min(b), a.max(b));
        lines[lo - 1].push(hi);
    }
    let mut out = String::new();
    for (k, js) in lines.iter().enumerate() {
        let k = k + 1;
        out.push_str(&format!("{k}:"));
        let items: Vec<String> = js.iter().map(|j| format!("[{k}, {j}]")).collect();
        if !items.is_empty() {
            out.push(' ');
            out.push_str(&items.join(", "));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonNode<'a> {
    index: usize,
    certificate: &'a Certificate,
    bounded: bool,
    vertex_count: usize,
    /// Line number in the GAP export, for bounded nodes.
    gap_index: Option<usize>,
}

#[derive(Serialize)]
struct JsonEdge<'a> {
    source: usize,
    target: usize,
    orbit: usize,
    ridge: &'a [Vec<i64>],
}

/// Node, edge and orbit numbers are 1-based.
#[derive(Serialize)]
struct JsonGraph<'a> {
    version: &'static str,
    dim: usize,
    complete: bool,
    caveat: &'static str,
    nodes: Vec<JsonNode<'a>>,
    edges: Vec<JsonEdge<'a>>,
}

/// Full graph, unbounded terminal nodes included, as JSON.
pub fn export_json(ex: &Exploration) -> String {
    let g = &ex.graph;
    let bounded = g.bounded_nodes();
    let nodes = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| JsonNode {
            index: i + 1,
            certificate: &n.certificate,
            bounded: n.bounded,
            vertex_count: n.record.vertices.len(),
            gap_index: bounded.iter().position(|&b| b == i).map(|k| k + 1),
        })
        .collect();
    let edges = g
        .edges
        .iter()
        .map(|e| JsonEdge { source: e.source + 1, target: e.target + 1, orbit: e.orbit + 1, ridge: &e.ridge })
        .collect();
    let j = JsonGraph { version: STATE_VERSION, dim: g.dim, complete: ex.state.complete, caveat: CAVEAT, nodes, edges };
    serde_json::to_string_pretty(&j).expect("serializable") + "\n"
}

/// Seed file: a vertex list, a quadratic function, or both.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<QuadraticFunction>,
}

/// Why a seed was rejected.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Diagnostic {
    #[error("cannot read seed: {0}")]
    Io(String),
    #[error("cannot parse seed: {0}")]
    Parse(String),
    #[error("qrank = {0}, not perfect")]
    NotPerfect(usize),
    #[error("no quadratic function vanishes on the vertices with a lattice minimum: {0}")]
    NotDelaunay(String),
    #[error("emptiness certificate failed: lattice point {0:?} lies inside the circumscribed ellipsoid")]
    NotEmpty(Vec<i64>),
    #[error("vertex list does not match the zero set of the function")]
    VertexMismatch,
    #[error("polyhedron is unbounded; seeds must be bounded")]
    Unbounded,
}

impl Diagnostic {
    /// Input could not be read or parsed, as opposed to a failed certificate.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Diagnostic::Io(_) | Diagnostic::Parse(_))
    }
}

pub fn validate_seed(path: &Path) -> Result<PolytopeRecord, Diagnostic> {
    let text = std::fs::read_to_string(path).map_err(|e| Diagnostic::Io(e.to_string()))?;
    validate_seed_str(&text)
}

pub fn validate_seed_str(text: &str) -> Result<PolytopeRecord, Diagnostic> {
    let seed: SeedFile = serde_json::from_str(text).map_err(|e| Diagnostic::Parse(e.to_string()))?;
    validate(&seed)
}

/// Re-certifies a seed: zero set of the function, emptiness, qrank 1, boundedness.
pub fn validate(seed: &SeedFile) -> Result<PolytopeRecord, Diagnostic> {
    let n = seed.dim;
    if let Some(vs) = &seed.vertices {
        if vs.is_empty() || vs.iter().any(|v| v.len() != n) {
            return Err(Diagnostic::Parse(format!("vertices must be nonempty vectors of length {n}")));
        }
    }
    let f = match (&seed.function, &seed.vertices) {
        (Some(f), _) => {
            if f.dim() != n {
                return Err(Diagnostic::Parse(format!("function has dimension {}, expected {n}", f.dim())));
            }
            f.clone()
        }
        (None, Some(vs)) => {
            let basis = circumscribe(vs, n);
            if basis.len() != 1 {
                return Err(Diagnostic::NotPerfect(qrank(vs, n)));
            }
            basis[0].normalized()
        }
        (None, None) => return Err(Diagnostic::Parse("seed needs vertices or a function".into())),
    };
    if let Some(vs) = &seed.vertices {
        if vs.iter().all(|v| f.eval_int(v).is_zero()) {
            if let Some(z) = interior_point(&f) {
                return Err(Diagnostic::NotEmpty(z));
            }
        }
    }
    let record = vertex_set_of(&f).map_err(|e| Diagnostic::NotDelaunay(e.to_string()))?;
    if let Some(vs) = &seed.vertices {
        let mut given = vs.clone();
        given.sort();
        given.dedup();
        if record.bounded && given != record.vertices {
            return Err(Diagnostic::VertexMismatch);
        }
    }
    if let Some(z) = interior_point(&record.function) {
        return Err(Diagnostic::NotEmpty(z));
    }
    let r = record.qrank();
    if r != 1 {
        return Err(Diagnostic::NotPerfect(r));
    }
    if !record.bounded {
        return Err(Diagnostic::Unbounded);
    }
    Ok(record)
}
