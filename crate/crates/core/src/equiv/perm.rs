//! Permutation groups given by generators: stabilizer chains and orders.
//!
//! Permutations are image arrays, `p[i]` is the image of `i`, and products
//! apply the left factor first.

use num_bigint::BigUint;
use num_traits::One;

pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

/// `p` then `q`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    p.iter().map(|&x| q[x]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut out = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        out[x] = i;
    }
    out
}

struct Level {
    base: usize,
    /// `transversal[x] = u` with `u[base] = x`, for `x` in the basic orbit.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<usize>,
}

/// Base and strong generating set built by the deterministic Schreier–Sims algorithm.
pub struct StabChain {
    n: usize,
    levels: Vec<Level>,
    strong: Vec<Perm>,
}

impl StabChain {
    pub fn new(n: usize, generators: &[Perm]) -> Self {
        let mut chain = StabChain { n, levels: Vec::new(), strong: Vec::new() };
        for g in generators {
            assert_eq!(g.len(), n, "generator degree");
            if is_identity(g) {
                continue;
            }
            let (h, _) = chain.strip(g, 0);
            if !is_identity(&h) {
                chain.add_strong(h);
            }
        }
        chain.complete();
        chain
    }

    fn fixes_prefix(&self, g: &[usize], upto: usize) -> bool {
        self.levels[..upto].iter().all(|l| g[l.base] == l.base)
    }

    fn add_strong(&mut self, h: Perm) {
        if self.fixes_prefix(&h, self.levels.len()) {
            let b = (0..self.n).find(|&i| h[i] != i).expect("non-identity");
            self.levels.push(Level { base: b, transversal: Vec::new(), orbit: Vec::new() });
        }
        self.strong.push(h);
        for i in 0..self.levels.len() {
            self.rebuild_orbit(i);
        }
    }

    fn rebuild_orbit(&mut self, i: usize) {
        let b = self.levels[i].base;
        let gens: Vec<&Perm> = self.strong.iter().filter(|g| self.fixes_prefix(g, i)).collect();
        let mut transversal: Vec<Option<Perm>> = vec![None; self.n];
        transversal[b] = Some(identity(self.n));
        let mut orbit = vec![b];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            let ux = transversal[x].clone().expect("orbit point has a coset rep");
            for s in &gens {
                let y = s[x];
                if transversal[y].is_none() {
                    transversal[y] = Some(compose(&ux, s));
                    orbit.push(y);
                }
            }
            k += 1;
        }
        self.levels[i].transversal = transversal;
        self.levels[i].orbit = orbit;
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level where it stopped.
    fn strip(&self, g: &[usize], from: usize) -> (Perm, usize) {
        let mut h = g.to_vec();
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let x = h[level.base];
            match &level.transversal[x] {
                None => return (h, j),
                Some(u) => h = compose(&h, &inverse(u)),
            }
        }
        (h, self.levels.len())
    }

    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() - 1;
        loop {
            match self.nontrivial_schreier_residue(i) {
                Some((h, _)) => {
                    self.add_strong(h);
                    i = self.levels.len() - 1;
                }
                None => {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                }
            }
        }
    }

    fn nontrivial_schreier_residue(&self, i: usize) -> Option<(Perm, usize)> {
        let level = &self.levels[i];
        let gens: Vec<&Perm> = self.strong.iter().filter(|g| self.fixes_prefix(g, i)).collect();
        for &x in &level.orbit {
            let ux = level.transversal[x].as_ref().expect("orbit point");
            for s in &gens {
                let y = s[x];
                let uy = level.transversal[y].as_ref().expect("orbit closed");
                let sg = compose(&compose(ux, s), &inverse(uy));
                if is_identity(&sg) {
                    continue;
                }
                let (h, j) = self.strip(&sg, i + 1);
                if !is_identity(&h) {
                    return Some((h, j));
                }
            }
        }
        None
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &[usize]) -> bool {
        is_identity(&self.strip(g, 0).0)
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }
}

pub fn group_order(n: usize, generators: &[Perm]) -> BigUint {
    StabChain::new(n, generators).order()
}

/// Orbits of `{0..n}` under the group generated by `generators`, as a representative map.
pub fn orbit_representatives(n: usize, generators: &[&Perm]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for g in generators {
        for (i, &j) in g.iter().enumerate() {
            let a = find(&mut parent, i);
            let b = find(&mut parent, j);
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}
