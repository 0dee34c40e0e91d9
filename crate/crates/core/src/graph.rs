//! Undirected simple graphs over dense node indices `0..node_count`.
//!
//! Adjacency lists are kept sorted, so every traversal visits nodes in
//! ascending order and results never depend on insertion history.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Empty graph with `node_count` isolated nodes.
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::Bounds("graph needs at least one node"));
        }
        Ok(Self {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        })
    }

    /// Builds a graph from an edge list; duplicate edges are collapsed.
    pub fn from_edges(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(node_count)?;
        for &(i, j) in edges {
            g.add_link(i, j)?;
        }
        Ok(g)
    }

    /// Complete graph on `node_count` nodes.
    pub fn complete(node_count: usize) -> Result<Self> {
        let mut g = Self::new(node_count)?;
        for i in 0..node_count {
            for j in (i + 1)..node_count {
                g.add_link(i, j)?;
            }
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_link(&self, i: usize, j: usize) -> bool {
        i < self.node_count() && self.adjacency[i].binary_search(&j).is_ok()
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::Bounds("node id out of range"))
        }
    }

    /// Adds the undirected link `i–j`. Returns `true` if the link is new.
    pub fn add_link(&mut self, i: usize, j: usize) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        match self.adjacency[i].binary_search(&j) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adjacency[i].insert(pos, j);
                let back = self.adjacency[j].binary_search(&i).unwrap_err();
                self.adjacency[j].insert(back, i);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    /// Removes the undirected link `i–j`. Returns `true` if a link was removed.
    pub fn remove_link(&mut self, i: usize, j: usize) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        match self.adjacency[i].binary_search(&j) {
            Err(_) => Ok(false),
            Ok(pos) => {
                self.adjacency[i].remove(pos);
                let back = self.adjacency[j].binary_search(&i).unwrap();
                self.adjacency[j].remove(back);
                self.edge_count -= 1;
                Ok(true)
            }
        }
    }

    /// All edges as `(src, dst)` with `src < dst`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, adj)| adj.iter().copied().filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Nodes reachable from `v` in at most `order` hops, excluding `v`.
    /// Only orders 1 and 2 are supported.
    pub fn neighbors_within(&self, v: usize, order: u8) -> Result<BTreeSet<usize>> {
        self.check_node(v)?;
        let mut out: BTreeSet<usize> = self.adjacency[v].iter().copied().collect();
        match order {
            1 => {}
            2 => {
                for &u in &self.adjacency[v] {
                    out.extend(self.adjacency[u].iter().copied());
                }
                out.remove(&v);
            }
            _ => return Err(Error::Bounds("neighborhood order must be 1 or 2")),
        }
        Ok(out)
    }

    /// Local clustering coefficient of `v`; zero when the degree is below 2.
    pub fn local_clustering(&self, v: usize) -> f64 {
        let adj = &self.adjacency[v];
        let k = adj.len();
        if k < 2 {
            return 0.0;
        }
        let mut closed = 0usize;
        for (a, &u) in adj.iter().enumerate() {
            for &w in &adj[a + 1..] {
                if self.has_link(u, w) {
                    closed += 1;
                }
            }
        }
        closed as f64 / ((k * (k - 1)) as f64 / 2.0)
    }

    /// Average of the local clustering coefficients over all nodes.
    pub fn clustering_coefficient(&self) -> f64 {
        let n = self.node_count();
        let sum: f64 = (0..n).map(|v| self.local_clustering(v)).sum();
        sum / n as f64
    }

    /// Mean shortest-path length over connected unordered node pairs.
    pub fn average_path_length(&self) -> Result<f64> {
        if self.edge_count == 0 {
            return Err(Error::UndefinedMetric("average path length of a graph without edges"));
        }
        let n = self.node_count();
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut total: u64 = 0;
        let mut pairs: u64 = 0;
        for src in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[src] = 0;
            queue.clear();
            queue.push_back(src);
            while let Some(u) = queue.pop_front() {
                let du = dist[u];
                for &w in &self.adjacency[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = du + 1;
                        queue.push_back(w);
                        if w > src {
                            total += (du + 1) as u64;
                            pairs += 1;
                        }
                    }
                }
            }
        }
        Ok(total as f64 / pairs as f64)
    }

    /// Degree → number of nodes with that degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for adj in &self.adjacency {
            *hist.entry(adj.len()).or_insert(0) += 1;
        }
        hist
    }
}

/// Uniform random graph with exactly `m` distinct edges (the G(n, M) model).
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    let mut g = Graph::new(n)?;
    let total = n * (n - 1) / 2;
    if m > total {
        return Err(Error::Bounds("edge count exceeds n(n-1)/2"));
    }
    // Row offsets of the strict upper triangle, used to decode pair indices.
    let offsets: Vec<usize> = (0..n).map(|i| i * (2 * n - i - 1) / 2).collect();
    let mut picks = index::sample(rng, total, m).into_vec();
    picks.sort_unstable();
    for k in picks {
        let i = offsets.partition_point(|&o| o <= k) - 1;
        let j = i + 1 + (k - offsets[i]);
        g.add_link(i, j)?;
    }
    Ok(g)
}

/// Preferential-attachment growth from a complete seed clique.
///
/// Every node added after the seed attaches `m_per_node` distinct links,
/// choosing targets with probability proportional to their current degree.
pub fn barabasi_albert<R: Rng + ?Sized>(n: usize, m_per_node: usize, seed_size: usize, rng: &mut R) -> Result<Graph> {
    if m_per_node == 0 || seed_size < m_per_node || n < seed_size {
        return Err(Error::Bounds(
            "barabasi_albert requires seed_size >= m_per_node >= 1 and n >= seed_size",
        ));
    }
    let mut g = Graph::new(n)?;
    // One entry per edge endpoint: uniform draws are degree-proportional.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * (seed_size * seed_size + n * m_per_node));
    for i in 0..seed_size {
        for j in (i + 1)..seed_size {
            g.add_link(i, j)?;
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets: Vec<usize> = Vec::with_capacity(m_per_node);
    for v in seed_size..n {
        targets.clear();
        while targets.len() < m_per_node {
            let t = if endpoints.is_empty() {
                rng.random_range(0..v)
            } else {
                endpoints[rng.random_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            g.add_link(v, t)?;
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn erdos_renyi_exact_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = erdos_renyi(100, 197, &mut rng).unwrap();
        assert_eq!(g.node_count(), 100);
        assert_eq!(g.edge_count(), 197);
        assert_eq!(g.degree_histogram().values().sum::<usize>(), 100);
    }

    #[test]
    fn erdos_renyi_full_and_overfull() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(erdos_renyi(3, 3, &mut rng).unwrap(), Graph::complete(3).unwrap());
        assert!(matches!(erdos_renyi(5, 11, &mut rng), Err(Error::Bounds(_))));
        assert_eq!(erdos_renyi(5, 10, &mut rng).unwrap(), Graph::complete(5).unwrap());
    }

    #[test]
    fn barabasi_albert_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = barabasi_albert(100, 2, 3, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 197);
        assert_eq!(barabasi_albert(3, 2, 3, &mut rng).unwrap(), Graph::complete(3).unwrap());
        assert!(barabasi_albert(10, 3, 2, &mut rng).is_err());
        assert!(barabasi_albert(2, 2, 3, &mut rng).is_err());
        assert!(barabasi_albert(10, 0, 3, &mut rng).is_err());
        // degenerate one-node seed falls back to uniform attachment
        assert_eq!(barabasi_albert(10, 1, 1, &mut rng).unwrap().edge_count(), 9);
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(Graph::complete(3).unwrap().clustering_coefficient(), 1.0);
        assert_eq!(path3().clustering_coefficient(), 0.0);
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        assert!((g.clustering_coefficient() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(Graph::complete(6).unwrap().average_path_length().unwrap(), 1.0);
        assert!((path3().average_path_length().unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            Graph::new(4).unwrap().average_path_length(),
            Err(Error::UndefinedMetric(_))
        ));
        // two disjoint links: only the connected pairs count
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.average_path_length().unwrap(), 1.0);
    }

    #[test]
    fn histogram_examples() {
        let k3 = Graph::complete(3).unwrap().degree_histogram();
        assert_eq!(k3.into_iter().collect::<Vec<_>>(), vec![(2, 3)]);
        let p = path3().degree_histogram();
        assert_eq!(p.into_iter().collect::<Vec<_>>(), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn neighborhoods() {
        let g = path3();
        assert_eq!(
            g.neighbors_within(0, 1).unwrap().into_iter().collect::<Vec<_>>(),
            vec![1]
        );
        assert_eq!(
            g.neighbors_within(0, 2).unwrap().into_iter().collect::<Vec<_>>(),
            vec![1, 2]
        );
        let lone = Graph::new(2).unwrap();
        assert!(lone.neighbors_within(0, 1).unwrap().is_empty());
        assert!(lone.neighbors_within(0, 2).unwrap().is_empty());
        assert!(g.neighbors_within(3, 1).is_err());
        assert!(g.neighbors_within(0, 3).is_err());
    }

    #[test]
    fn link_edits() {
        let original = path3();
        let mut g = original.clone();
        assert!(g.add_link(0, 2).unwrap());
        assert!(!g.add_link(2, 0).unwrap());
        assert_eq!(g.edge_count(), 3);
        assert!(g.remove_link(0, 2).unwrap());
        assert!(!g.remove_link(0, 2).unwrap());
        assert_eq!(g, original);
        assert!(matches!(g.add_link(1, 1), Err(Error::SelfLoop(1))));
        assert!(g.remove_link(0, 9).is_err());
    }

    #[test]
    fn edges_are_ordered() {
        let g = Graph::from_edges(4, &[(3, 1), (2, 0), (1, 0)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (1, 3)]);
    }
}
