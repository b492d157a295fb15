//! Canonical labelling of complete edge-coloured graphs with vertex colours.
//!
//! Individualization–refinement: colour refinement to an equitable ordered
//! partition, branching on the first non-singleton cell, and the lexicographically
//! smallest relabelled colour matrix as canonical key. Automorphisms found by
//! matching leaves prune sibling branches that lie in one orbit of the
//! pointwise stabilizer of the current prefix.

use super::perm::{compose, inverse, is_identity, orbit_representatives, Perm};

/// Colour matrix of a complete graph; `colour(i, i)` is ignored in favour of the vertex colour.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColouredGraph {
    n: usize,
    vertex: Vec<u32>,
    edge: Vec<u32>,
    colours: u32,
}

impl ColouredGraph {
    /// `edge` is row-major `n × n` and symmetric.
    pub fn new(vertex: Vec<u32>, edge: Vec<u32>) -> Self {
        let n = vertex.len();
        assert_eq!(edge.len(), n * n, "edge matrix size");
        debug_assert!((0..n).all(|i| (0..n).all(|j| edge[i * n + j] == edge[j * n + i])));
        let colours = edge.iter().copied().max().map_or(1, |m| m + 1);
        ColouredGraph { n, vertex, edge, colours }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn colour(&self, i: usize, j: usize) -> u32 {
        self.edge[i * self.n + j]
    }

    pub fn vertex_colour(&self, i: usize) -> u32 {
        self.vertex[i]
    }

    pub fn with_vertex_colours(&self, vertex: Vec<u32>) -> Self {
        assert_eq!(vertex.len(), self.n);
        ColouredGraph { vertex, ..self.clone() }
    }

    pub fn is_automorphism(&self, p: &[usize]) -> bool {
        (0..self.n).all(|i| {
            self.vertex[i] == self.vertex[p[i]] && (0..self.n).all(|j| self.colour(i, j) == self.colour(p[i], p[j]))
        })
    }

    /// Relabelled vertex colours followed by the relabelled colour matrix.
    fn key(&self, order: &[usize]) -> Vec<u32> {
        let mut k = Vec::with_capacity(self.n * (self.n + 1));
        k.extend(order.iter().map(|&v| self.vertex[v]));
        for &a in order {
            for &b in order {
                k.push(if a == b { u32::MAX } else { self.colour(a, b) });
            }
        }
        k
    }
}

#[derive(Clone, Debug)]
pub struct Canon {
    /// `order[p]` is the vertex placed at canonical position `p`.
    pub order: Vec<usize>,
    pub key: Vec<u32>,
    /// Generators of the automorphism group (image arrays).
    pub generators: Vec<Perm>,
}

type Cells = Vec<Vec<usize>>;

fn initial_partition(g: &ColouredGraph) -> Cells {
    let mut colours: Vec<u32> = g.vertex.clone();
    colours.sort_unstable();
    colours.dedup();
    colours
        .iter()
        .map(|&c| (0..g.n).filter(|&v| g.vertex[v] == c).collect())
        .collect()
}

/// Splits cells until every cell has the same colour-count profile towards every cell.
fn refine(g: &ColouredGraph, mut cells: Cells) -> Cells {
    let k = g.colours as usize;
    loop {
        let mut changed = false;
        let mut s = 0;
        while s < cells.len() {
            let splitter = cells[s].clone();
            let mut next: Cells = Vec::with_capacity(cells.len());
            for cell in &cells {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut sigs: Vec<(Vec<u32>, usize)> = cell
                    .iter()
                    .map(|&v| {
                        let mut counts = vec![0u32; k];
                        for &w in &splitter {
                            if w != v {
                                counts[g.colour(v, w) as usize] += 1;
                            }
                        }
                        (counts, v)
                    })
                    .collect();
                sigs.sort();
                let mut start = 0;
                let before = next.len();
                while start < sigs.len() {
                    let mut end = start + 1;
                    while end < sigs.len() && sigs[end].0 == sigs[start].0 {
                        end += 1;
                    }
                    let mut part: Vec<usize> = sigs[start..end].iter().map(|x| x.1).collect();
                    part.sort_unstable();
                    next.push(part);
                    start = end;
                }
                if next.len() - before > 1 {
                    changed = true;
                }
            }
            cells = next;
            s += 1;
        }
        if !changed {
            return cells;
        }
    }
}

fn individualize(cells: &Cells, t: usize, v: usize) -> Cells {
    let mut out = Vec::with_capacity(cells.len() + 1);
    for (i, c) in cells.iter().enumerate() {
        if i == t {
            out.push(vec![v]);
            out.push(c.iter().copied().filter(|&x| x != v).collect());
        } else {
            out.push(c.clone());
        }
    }
    out
}

struct Leaf {
    key: Vec<u32>,
    order: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'a> {
    g: &'a ColouredGraph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Perm>,
}

impl Search<'_> {
    /// Returns `Some(level)` when the whole subtree below `path[..level + 1]` is
    /// known to be the image of an explored subtree and the search should resume
    /// at depth `level`.
    fn dfs(&mut self, cells: Cells, path: &mut Vec<usize>) -> Option<usize> {
        let Some(t) = cells.iter().position(|c| c.len() > 1) else {
            return self.leaf(cells, path);
        };
        let depth = path.len();
        let candidates = cells[t].clone();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &candidates {
            if !explored.is_empty() {
                let fixing: Vec<&Perm> =
                    self.generators.iter().filter(|p| path.iter().all(|&x| p[x] == x)).collect();
                if !fixing.is_empty() {
                    let reps = orbit_representatives(self.g.n, &fixing);
                    if explored.iter().any(|&e| reps[e] == reps[v]) {
                        continue;
                    }
                }
            }
            let child = refine(self.g, individualize(&cells, t, v));
            path.push(v);
            let r = self.dfs(child, path);
            path.pop();
            explored.push(v);
            if let Some(level) = r {
                if level < depth {
                    return Some(level);
                }
            }
        }
        None
    }

    fn leaf(&mut self, cells: Cells, path: &[usize]) -> Option<usize> {
        let order: Vec<usize> = cells.into_iter().map(|c| c[0]).collect();
        let key = self.g.key(&order);
        let leaf = Leaf { key, order, path: path.to_vec() };
        let Some(first) = &self.first else {
            self.best = Some(Leaf { key: leaf.key.clone(), order: leaf.order.clone(), path: leaf.path.clone() });
            self.first = Some(leaf);
            return None;
        };
        let best = self.best.as_ref().expect("set with first");
        let reference = if leaf.key == first.key {
            Some(first)
        } else if leaf.key == best.key {
            Some(best)
        } else {
            None
        };
        if let Some(r) = reference {
            // γ maps the reference labelling onto the current one.
            let mut gamma = vec![0; self.g.n];
            for (a, b) in r.order.iter().zip(&leaf.order) {
                gamma[*a] = *b;
            }
            debug_assert!(self.g.is_automorphism(&gamma));
            let jump = jump_level(&gamma, &r.path, &leaf.path);
            if !is_identity(&gamma) {
                self.generators.push(gamma);
            }
            return jump;
        }
        if leaf.key < best.key {
            self.best = Some(leaf);
        }
        None
    }
}

/// Depth at which the current branch is an image of an explored one: `γ` must
/// fix the common prefix of both paths and send the reference child to the
/// current child.
fn jump_level(gamma: &[usize], reference: &[usize], current: &[usize]) -> Option<usize> {
    let l = reference.iter().zip(current).take_while(|(a, b)| a == b).count();
    if l >= current.len() || l >= reference.len() {
        return None;
    }
    if current[..l].iter().all(|&x| gamma[x] == x) && gamma[reference[l]] == current[l] {
        Some(l)
    } else {
        None
    }
}

pub fn canonical_form(g: &ColouredGraph) -> Canon {
    if g.n == 0 {
        return Canon { order: Vec::new(), key: Vec::new(), generators: Vec::new() };
    }
    let mut s = Search { g, first: None, best: None, generators: Vec::new() };
    let start = refine(g, initial_partition(g));
    s.dfs(start, &mut Vec::new());
    let best = s.best.expect("at least one leaf");
    Canon { order: best.order, key: best.key, generators: s.generators }
}

/// Vertex bijection `a → b` mapping canonical positions onto each other, when the keys agree.
pub fn isomorphism(a: &Canon, b: &Canon) -> Option<Perm> {
    if a.key != b.key {
        return None;
    }
    // position p: a.order[p] ↦ b.order[p]
    let inv_a = inverse(&a.order);
    Some(compose(&inv_a, &b.order))
}
