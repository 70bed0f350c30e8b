//! Union-find over particles with cluster sizes, gel flags and the list of
//! created edges.
//!
//! A cluster whose size reaches the threshold is frozen: it falls into the gel
//! and every later link touching it is refused. Links inside a cluster that is
//! still in solution are kept as surplus edges.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of offering an activated pair to [`ClusterForest::try_link`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkOutcome {
    /// One endpoint was already in the gel; nothing changed.
    Rejected,
    /// Both endpoints were in the same cluster in solution; a surplus edge was
    /// recorded.
    IntraCluster,
    /// Two clusters merged into one of the given size, still in solution.
    Merged(usize),
    /// Two clusters merged and the result, of the given size, fell into the gel.
    MergedAndFell(usize),
}

/// A connected component extracted from the created edges, with local labels.
///
/// `vertices[i]` is the particle carried by local vertex `i`; edges use local
/// labels. The root is local vertex 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentGraph {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl ComponentGraph {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Edges beyond a spanning tree.
    pub fn surplus(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertices.len())
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }
}

#[derive(Debug, Clone)]
struct AdjacencyIndex {
    edges_indexed: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

/// The configuration of the system: partition into clusters, gel flags and the
/// created edges.
#[derive(Debug, Clone)]
pub struct ClusterForest {
    parent: Vec<u32>,
    // size and edge count are only meaningful at roots
    size: Vec<u32>,
    edge_count: Vec<u32>,
    frozen: Vec<bool>,
    created_edges: Vec<(u32, u32)>,
    n_in_solution: usize,
    gel_mass: usize,
    adjacency: Option<AdjacencyIndex>,
}

impl ClusterForest {
    /// `n` singleton clusters, none frozen, no edges.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        if n > u32::MAX as usize {
            return Err(Error::Domain(format!("{n} particles exceed the u32 range")));
        }
        Ok(Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            edge_count: vec![0; n],
            frozen: vec![false; n],
            created_edges: Vec::new(),
            n_in_solution: n,
            gel_mass: 0,
            adjacency: None,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.parent.len()
    }

    pub fn n_in_solution(&self) -> usize {
        self.n_in_solution
    }

    pub fn gel_mass(&self) -> usize {
        self.gel_mass
    }

    pub fn created_edges(&self) -> &[(u32, u32)] {
        &self.created_edges
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.parent.len() {
            Ok(())
        } else {
            Err(Error::ParticleOutOfRange {
                particle: v,
                n: self.parent.len(),
            })
        }
    }

    /// Canonical representative of the cluster of `v`.
    pub fn find_root(&mut self, v: usize) -> Result<usize> {
        self.check(v)?;
        Ok(self.find(v as u32) as usize)
    }

    pub(crate) fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Size of the cluster containing `v`.
    pub fn cluster_size(&mut self, v: usize) -> Result<usize> {
        let r = self.find_root(v)?;
        Ok(self.size[r] as usize)
    }

    /// Whether the cluster containing `v` is in the gel.
    pub fn is_frozen(&mut self, v: usize) -> Result<bool> {
        let r = self.find_root(v)?;
        Ok(self.frozen[r])
    }

    /// Surplus edges (edges minus size plus one) of the cluster containing `v`.
    pub fn cluster_surplus(&mut self, v: usize) -> Result<usize> {
        let r = self.find_root(v)?;
        Ok((self.edge_count[r] as usize + 1).saturating_sub(self.size[r] as usize))
    }

    fn push_edge(&mut self, u: u32, v: u32) {
        self.created_edges.push((u.min(v), u.max(v)));
    }

    fn union_roots(&mut self, ru: u32, rv: u32) -> u32 {
        let (big, small) = if self.size[ru as usize] >= self.size[rv as usize] {
            (ru, rv)
        } else {
            (rv, ru)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.edge_count[big as usize] += self.edge_count[small as usize] + 1;
        big
    }

    /// Offers the activated pair `(u, v)` to the threshold dynamics.
    ///
    /// Links touching the gel are refused. A merge reaching `threshold` is
    /// performed and the merged cluster falls.
    pub fn try_link(&mut self, u: usize, v: usize, threshold: usize) -> Result<LinkOutcome> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let ru = self.find(u as u32);
        let rv = self.find(v as u32);
        if self.frozen[ru as usize] || self.frozen[rv as usize] {
            return Ok(LinkOutcome::Rejected);
        }
        self.push_edge(u as u32, v as u32);
        if ru == rv {
            self.edge_count[ru as usize] += 1;
            return Ok(LinkOutcome::IntraCluster);
        }
        let root = self.union_roots(ru, rv);
        let size = self.size[root as usize] as usize;
        if size >= threshold {
            self.frozen[root as usize] = true;
            self.n_in_solution -= size;
            self.gel_mass += size;
            Ok(LinkOutcome::MergedAndFell(size))
        } else {
            Ok(LinkOutcome::Merged(size))
        }
    }

    /// Creates the edge `(u, v)` unconditionally (pure percolation).
    ///
    /// Clusters reaching `threshold` are still flagged as large and counted as
    /// gel mass, but they keep growing. `MergedAndFell` is returned only when
    /// two clusters that were both below the threshold merge above it; merges
    /// involving a large cluster return `Merged`.
    pub fn link_unconditional(
        &mut self,
        u: usize,
        v: usize,
        threshold: usize,
    ) -> Result<LinkOutcome> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let ru = self.find(u as u32);
        let rv = self.find(v as u32);
        self.push_edge(u as u32, v as u32);
        if ru == rv {
            self.edge_count[ru as usize] += 1;
            return Ok(LinkOutcome::IntraCluster);
        }
        let fu = self.frozen[ru as usize];
        let fv = self.frozen[rv as usize];
        let (su, sv) = (self.size[ru as usize] as usize, self.size[rv as usize] as usize);
        let root = self.union_roots(ru, rv);
        let size = su + sv;
        match (fu, fv) {
            (true, true) => Ok(LinkOutcome::Merged(size)),
            (true, false) | (false, true) => {
                let absorbed = if fu { sv } else { su };
                self.frozen[root as usize] = true;
                self.n_in_solution -= absorbed;
                self.gel_mass += absorbed;
                Ok(LinkOutcome::Merged(size))
            }
            (false, false) if size >= threshold => {
                self.frozen[root as usize] = true;
                self.n_in_solution -= size;
                self.gel_mass += size;
                Ok(LinkOutcome::MergedAndFell(size))
            }
            (false, false) => Ok(LinkOutcome::Merged(size)),
        }
    }

    /// Size of the largest cluster, frozen or not.
    pub fn largest_cluster(&self) -> usize {
        (0..self.parent.len())
            .filter(|&v| self.parent[v] as usize == v)
            .map(|r| self.size[r] as usize)
            .max()
            .unwrap_or(0)
    }

    /// Sizes of all clusters in solution.
    pub fn solution_cluster_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent.len())
            .filter(|&v| self.parent[v] as usize == v && !self.frozen[v])
            .map(|r| self.size[r] as usize)
    }

    /// Map size → number of clusters in solution of that size.
    pub fn component_size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for s in self.solution_cluster_sizes() {
            *hist.entry(s).or_insert(0) += 1;
        }
        hist
    }

    fn adjacency(&mut self) -> &AdjacencyIndex {
        let stale = self
            .adjacency
            .as_ref()
            .is_none_or(|a| a.edges_indexed != self.created_edges.len());
        if stale {
            let n = self.parent.len();
            let mut offsets = vec![0u32; n + 1];
            for &(a, b) in &self.created_edges {
                offsets[a as usize + 1] += 1;
                offsets[b as usize + 1] += 1;
            }
            for i in 0..n {
                offsets[i + 1] += offsets[i];
            }
            let mut fill = offsets.clone();
            let mut targets = vec![0u32; 2 * self.created_edges.len()];
            for &(a, b) in &self.created_edges {
                targets[fill[a as usize] as usize] = b;
                fill[a as usize] += 1;
                targets[fill[b as usize] as usize] = a;
                fill[b as usize] += 1;
            }
            self.adjacency = Some(AdjacencyIndex {
                edges_indexed: self.created_edges.len(),
                offsets,
                targets,
            });
        }
        self.adjacency.as_ref().expect("index just built")
    }

    /// The connected component of `v` under the created edges, rooted at `v`.
    ///
    /// Surplus edges are included; parallel edges cannot occur since each pair
    /// is activated at most once.
    pub fn extract_component(&mut self, v: usize) -> Result<ComponentGraph> {
        self.check(v)?;
        let adj = self.adjacency();
        let mut local: rustc_hash::FxHashMap<u32, u32> = rustc_hash::FxHashMap::default();
        let mut vertices = vec![v as u32];
        local.insert(v as u32, 0);
        let mut queue = VecDeque::from([v as u32]);
        let mut edges = Vec::new();
        while let Some(x) = queue.pop_front() {
            let lx = local[&x];
            let (lo, hi) = (adj.offsets[x as usize], adj.offsets[x as usize + 1]);
            for &y in &adj.targets[lo as usize..hi as usize] {
                let ly = match local.get(&y) {
                    Some(&ly) => ly,
                    None => {
                        let ly = vertices.len() as u32;
                        local.insert(y, ly);
                        vertices.push(y);
                        queue.push_back(y);
                        ly
                    }
                };
                // each undirected edge seen twice; keep it once
                if x < y {
                    edges.push((lx, ly));
                }
            }
        }
        Ok(ComponentGraph { vertices, edges })
    }
}
