//! Loopless simple graphs with per-vertex incidence lists.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple graph. `incidence[v]` lists the ids of the edges at `v`; its order
/// fixes the index order in which a vertex tensor is read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct SimpleGraph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    incidence: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    n_vertices: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for SimpleGraph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        SimpleGraph::new(file.n_vertices, file.edges.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<SimpleGraph> for GraphFile {
    fn from(g: SimpleGraph) -> Self {
        GraphFile {
            n_vertices: g.n_vertices,
            edges: g.edges.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl SimpleGraph {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut incidence = vec![Vec::new(); n_vertices];
        for (id, &(a, b)) in edges.iter().enumerate() {
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::InvalidGraph(format!("edge {id} = ({a}, {b}) leaves 0..{n_vertices}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("edge {id} is a loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("edge {id} = ({a}, {b}) is a parallel edge")));
            }
            incidence[a].push(id);
            incidence[b].push(id);
        }
        Ok(Self {
            n_vertices,
            edges,
            incidence,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("edgeless graph is simple")
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).tuple_combinations().collect()).expect("complete graph is simple")
    }

    /// Path on `n` vertices.
    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path is simple")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("a simple cycle needs 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect()).expect("star is simple")
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn random_gnp(n: usize, p: f64, rng: &mut impl Rng) -> Self {
        let edges = (0..n).tuple_combinations().filter(|_| rng.random::<f64>() < p).collect();
        Self::new(n, edges).expect("sampled graph is simple")
    }

    /// Named small graphs: `K<n>`, `C<n>`, `P<n>` (path on n vertices), `E<n>`
    /// (edgeless), `S<n>` (star with n leaves), plus `path3` and `triangle`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "triangle" => return Ok(Self::complete(3)),
            "path3" => return Ok(Self::path(3)),
            _ => {}
        }
        let (kind, digits) = name.split_at(name.len().min(1));
        let n: usize = digits
            .parse()
            .map_err(|_| Error::InvalidGraph(format!("unknown graph name {name:?}")))?;
        match kind {
            "K" => Ok(Self::complete(n)),
            "C" => Self::cycle(n),
            "P" => Ok(Self::path(n)),
            "E" => Ok(Self::empty(n)),
            "S" => Ok(Self::star(n)),
            _ => Err(Error::InvalidGraph(format!("unknown graph name {name:?}"))),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn incidence(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.incidence.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n_vertices]; self.n_vertices];
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }

    /// Same graph with `delta(v)` reordered as `order` (a permutation of positions).
    pub fn with_incidence_order(&self, v: usize, order: &[usize]) -> Result<Self> {
        let current = &self.incidence[v];
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..current.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidGraph(format!("{order:?} is not a permutation of delta({v})")));
        }
        let mut out = self.clone();
        out.incidence[v] = order.iter().map(|&p| current[p]).collect();
        Ok(out)
    }

    /// `self ⊔ other`, with the vertices of `other` shifted past those of `self`.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> SimpleGraph {
        let shift = self.n_vertices;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(a, b)| (a + shift, b + shift)))
            .collect();
        Self::new(shift + other.n_vertices, edges).expect("union of simple graphs is simple")
    }

    pub fn with_isolated_vertex(&self) -> SimpleGraph {
        self.disjoint_union(&SimpleGraph::empty(1))
    }

    /// Every labelled simple graph on `n` vertices, `2^(n choose 2)` of them.
    pub fn all_labelled(n: usize) -> Vec<SimpleGraph> {
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        (0..(1usize << pairs.len()))
            .map(|mask| {
                let edges = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                SimpleGraph::new(n, edges).expect("subgraph of K_n is simple")
            })
            .collect()
    }

    /// Smallest adjacency bitmask over all vertex relabelings.
    pub fn canonical_code(&self) -> u64 {
        let n = self.n_vertices;
        let adj = self.adjacency();
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        (0..n)
            .permutations(n)
            .map(|p| {
                pairs.iter().enumerate().fold(0u64, |code, (bit, &(a, b))| {
                    if adj[p[a]][p[b]] {
                        code | 1 << bit
                    } else {
                        code
                    }
                })
            })
            .min()
            .unwrap_or(0)
    }

    /// One representative per isomorphism class of graphs with `1..=max_vertices` vertices.
    pub fn up_to_isomorphism(max_vertices: usize) -> Vec<SimpleGraph> {
        let mut out = Vec::new();
        for n in 1..=max_vertices {
            let mut seen = BTreeSet::new();
            for g in Self::all_labelled(n) {
                if seen.insert(g.canonical_code()) {
                    out.push(g);
                }
            }
        }
        out
    }
}
