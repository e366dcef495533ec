//! Undirected communication graph over dense node ids.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Node identifier. Ids are dense `0..n` and their order is the tie-break
/// order used by every protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type NodeSet = BTreeSet<NodeId>;

/// Symmetric adjacency without self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommGraph {
    n: usize,
    adj: Vec<Vec<NodeId>>,
}

impl CommGraph {
    pub fn empty(n: usize) -> Self {
        CommGraph {
            n,
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Self-loops and duplicates are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = CommGraph::empty(n);
        for (a, b) in edges {
            g.add_edge(NodeId::from(a), NodeId::from(b));
        }
        g
    }

    /// Inserts the undirected edge; returns false if it already existed or is
    /// a self-loop.
    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        assert!(
            a.index() < self.n && b.index() < self.n,
            "edge endpoint out of range"
        );
        if a == b {
            return false;
        }
        match self.adj[a.index()].binary_search(&b) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[a.index()].insert(pos, b);
                let pos_b = self.adj[b.index()].binary_search(&a).unwrap_err();
                self.adj[b.index()].insert(pos_b, a);
                true
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.n).map(NodeId::from)
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.adj[a.index()].binary_search(&b).is_ok()
    }

    /// Edges as `(lo, hi)` pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, nbrs) in self.adj.iter().enumerate() {
            let a = NodeId::from(i);
            out.extend(nbrs.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// Membership mask for a node subset.
    pub fn mask<'a, I>(&self, nodes: I) -> Vec<bool>
    where
        I: IntoIterator<Item = &'a NodeId>,
    {
        let mut m = vec![false; self.n];
        for v in nodes {
            m[v.index()] = true;
        }
        m
    }

    /// Hop distances from `sources` inside the subgraph induced by `mask`.
    /// Unreached nodes get `None`.
    pub fn bfs_within(&self, mask: &[bool], sources: &[NodeId]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if mask[s.index()] && dist[s.index()].is_none() {
                dist[s.index()] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v.index()].unwrap();
            for &w in self.neighbors(v) {
                if mask[w.index()] && dist[w.index()].is_none() {
                    dist[w.index()] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components of the induced subgraph, each sorted, ordered by
    /// smallest member.
    pub fn components_within(&self, nodes: &NodeSet) -> Vec<NodeSet> {
        let mask = self.mask(nodes);
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for &s in nodes {
            if seen[s.index()] {
                continue;
            }
            let mut comp = NodeSet::new();
            let mut stack = vec![s];
            seen[s.index()] = true;
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for &w in self.neighbors(v) {
                    if mask[w.index()] && !seen[w.index()] {
                        seen[w.index()] = true;
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<NodeSet> {
        self.components_within(&self.nodes().collect())
    }

    /// Shortest path inside `mask` from `from` to `to`, ties broken by the
    /// lexicographically smallest id sequence.
    pub fn shortest_path_within(
        &self,
        mask: &[bool],
        from: NodeId,
        to: NodeId,
    ) -> Option<Vec<NodeId>> {
        // distances measured from the target so that a greedy forward walk
        // picking the smallest admissible id yields the lexicographic minimum
        let dist = self.bfs_within(mask, &[to]);
        let mut d = dist[from.index()]?;
        let mut path = vec![from];
        let mut cur = from;
        while d > 0 {
            let next = self
                .neighbors(cur)
                .iter()
                .copied()
                .find(|w| mask[w.index()] && dist[w.index()] == Some(d - 1))?;
            path.push(next);
            cur = next;
            d -= 1;
        }
        Some(path)
    }

    /// Subgraph induced on `nodes`, keeping global ids (other nodes isolated).
    pub fn induced(&self, nodes: &NodeSet) -> CommGraph {
        let mask = self.mask(nodes);
        let mut g = CommGraph::empty(self.n);
        for &v in nodes {
            g.adj[v.index()] = self.adj[v.index()]
                .iter()
                .copied()
                .filter(|w| mask[w.index()])
                .collect();
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> CommGraph {
        CommGraph::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    #[test]
    fn add_edge_is_symmetric_and_deduplicated() {
        let mut g = CommGraph::empty(3);
        assert!(g.add_edge(NodeId(0), NodeId(2)));
        assert!(!g.add_edge(NodeId(2), NodeId(0)));
        assert!(!g.add_edge(NodeId(1), NodeId(1)));
        assert!(g.has_edge(NodeId(2), NodeId(0)));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn components_of_two_paths() {
        let g = CommGraph::from_edges(5, [(0, 1), (2, 3), (3, 4)]);
        let comps = g.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(
            comps[1].iter().map(|v| v.0).collect::<Vec<_>>(),
            vec![2, 3, 4]
        );
    }

    #[test]
    fn shortest_path_prefers_small_ids() {
        // square 0-1-3, 0-2-3
        let g = CommGraph::from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3)]);
        let mask = vec![true; 4];
        let p = g.shortest_path_within(&mask, NodeId(0), NodeId(3)).unwrap();
        assert_eq!(p, vec![NodeId(0), NodeId(1), NodeId(3)]);
        let mask = vec![true, false, true, true];
        let p = g.shortest_path_within(&mask, NodeId(0), NodeId(3)).unwrap();
        assert_eq!(p, vec![NodeId(0), NodeId(2), NodeId(3)]);
    }

    #[test]
    fn bfs_respects_mask() {
        let g = path(4);
        let mask = vec![true, true, false, true];
        let d = g.bfs_within(&mask, &[NodeId(0)]);
        assert_eq!(d, vec![Some(0), Some(1), None, None]);
    }
}
