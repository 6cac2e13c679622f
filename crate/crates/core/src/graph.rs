//! Weighted undirected graphs in compressed adjacency form, with Dijkstra and
//! component labelling. Shared by the mesh, metric and domain code.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{param, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distances and shortest-path predecessors from a set of sources.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Vertex sequence from the nearest source to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut v = target;
        while let Some(p) = self.pred[v] {
            path.push(p);
            v = p;
        }
        path.reverse();
        Some(path)
    }
}

impl WeightedGraph {
    /// Builds a graph from undirected weighted edges. Parallel edges keep the lighter weight.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut deg = vec![0usize; vertex_count];
        for &(a, b, w) in edges {
            if a >= vertex_count || b >= vertex_count {
                return param(format!("edge ({a}, {b}) out of range for {vertex_count} vertices"));
            }
            if a == b {
                return param(format!("self loop at vertex {a}"));
            }
            if !(w.is_finite() && w >= 0.0) {
                return param(format!("edge ({a}, {b}) has invalid weight {w}"));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut offsets = vec![0usize; vertex_count + 1];
        for v in 0..vertex_count {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[vertex_count]];
        let mut weights = vec![0.0; offsets[vertex_count]];
        for &(a, b, w) in edges {
            targets[fill[a]] = b;
            weights[fill[a]] = w;
            fill[a] += 1;
            targets[fill[b]] = a;
            weights[fill[b]] = w;
            fill[b] += 1;
        }
        // sort each adjacency list by target for deterministic traversal
        for v in 0..vertex_count {
            let (s, e) = (offsets[v], offsets[v + 1]);
            let mut pairs: Vec<(usize, f64)> =
                targets[s..e].iter().copied().zip(weights[s..e].iter().copied()).collect();
            pairs.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.total_cmp(&y.1)));
            pairs.dedup_by(|x, y| x.0 == y.0);
            for (i, (t, w)) in pairs.iter().enumerate() {
                targets[s + i] = *t;
                weights[s + i] = *w;
            }
            for i in s + pairs.len()..e {
                targets[i] = usize::MAX;
            }
        }
        // compact away the duplicates
        let mut new_offsets = vec![0usize; vertex_count + 1];
        let mut new_targets = Vec::with_capacity(targets.len());
        let mut new_weights = Vec::with_capacity(weights.len());
        for v in 0..vertex_count {
            for i in offsets[v]..offsets[v + 1] {
                if targets[i] != usize::MAX {
                    new_targets.push(targets[i]);
                    new_weights.push(weights[i]);
                }
            }
            new_offsets[v + 1] = new_targets.len();
        }
        Ok(Self {
            offsets: new_offsets,
            targets: new_targets,
            weights: new_weights,
        })
    }

    /// Unit-weight graph.
    pub fn unweighted(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let e: Vec<_> = edges.iter().map(|&(a, b)| (a, b, 1.0)).collect();
        Self::from_edges(vertex_count, &e)
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Weight of the edge `a–b`, if present.
    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        let r = self.offsets[a]..self.offsets[a + 1];
        self.targets[r.clone()]
            .binary_search(&b)
            .ok()
            .map(|i| self.weights[r.start + i])
    }

    /// Multi-source Dijkstra restricted to vertices with `allowed[v] == true`.
    ///
    /// Ties are broken by vertex index so results are reproducible.
    pub fn dijkstra(&self, sources: &[usize], allowed: Option<&[bool]>) -> ShortestPaths {
        self.dijkstra_until(sources, allowed, None)
    }

    /// As [`dijkstra`](Self::dijkstra) but stops once `stop` is settled.
    pub fn dijkstra_until(
        &self,
        sources: &[usize],
        allowed: Option<&[bool]>,
        stop: Option<usize>,
    ) -> ShortestPaths {
        let n = self.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        let ok = |v: usize| allowed.is_none_or(|a| a[v]);
        for &s in sources {
            if ok(s) && dist[s] > 0.0 {
                dist[s] = 0.0;
                heap.push(HeapItem { dist: 0.0, vertex: s });
            }
        }
        while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            if stop == Some(v) {
                break;
            }
            for (w, len) in self.neighbors(v) {
                if done[w] || !ok(w) {
                    continue;
                }
                let nd = d + len;
                if nd < dist[w] || (nd == dist[w] && pred[w].is_some_and(|p| v < p)) {
                    dist[w] = nd;
                    pred[w] = Some(v);
                    heap.push(HeapItem { dist: nd, vertex: w });
                }
            }
        }
        ShortestPaths { dist, pred }
    }

    /// Breadth-first hop counts from `source` (`usize::MAX` when unreachable).
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let n = self.vertex_count();
        let mut hops = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        hops[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for (w, _) in self.neighbors(v) {
                if hops[w] == usize::MAX {
                    hops[w] = hops[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        hops
    }

    /// Connected-component label of every allowed vertex (`None` for excluded vertices).
    /// Labels are assigned in order of the smallest vertex of each component.
    pub fn components(&self, allowed: Option<&[bool]>) -> (Vec<Option<usize>>, usize) {
        let n = self.vertex_count();
        let mut label = vec![None; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s].is_some() || !allowed.is_none_or(|a| a[s]) {
                continue;
            }
            label[s] = Some(count);
            stack.push(s);
            while let Some(v) = stack.pop() {
                for (w, _) in self.neighbors(v) {
                    if label[w].is_none() && allowed.is_none_or(|a| a[w]) {
                        label[w] = Some(count);
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_distances() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let sp = g.dijkstra(&[0], None);
        assert_eq!(sp.dist, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(sp.path_to(3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(g.weight(2, 1), Some(1.0));
        assert_eq!(g.weight(0, 3), None);
    }

    #[test]
    fn restricted_and_components() {
        let g = WeightedGraph::unweighted(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let allowed = [true, true, false, true, true];
        let sp = g.dijkstra(&[0], Some(&allowed));
        assert!(sp.dist[3].is_infinite());
        let (labels, count) = g.components(Some(&allowed));
        assert_eq!(count, 2);
        assert_eq!(labels, vec![Some(0), Some(0), None, Some(1), Some(1)]);
    }

    #[test]
    fn parallel_edges_keep_minimum() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 3.0), (1, 0, 2.0)]).unwrap();
        assert_eq!(g.degree(0), 1);
        assert_eq!(g.weight(0, 1), Some(2.0));
        assert!(WeightedGraph::from_edges(2, &[(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::from_edges(2, &[(0, 1, -1.0)]).is_err());
    }
}
