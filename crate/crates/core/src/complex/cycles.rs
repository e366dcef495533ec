//! Homology annotations of edges and the shortest non-bounding cycle.
//!
//! An annotation assigns every edge an integer vector of length β1 so that a
//! 1-cycle bounds iff the sum of its edge annotations is zero. With it, the
//! shortest non-bounding cycle is found among the candidates "tree path,
//! non-tree edge, tree path" of a breadth-first tree rooted at each vertex.

use std::collections::VecDeque;

use num_traits::ToPrimitive;

use super::exact::q;
use super::exact::{denominator_lcm, Echelon, SparseVec};
use super::{triangle_faces, RipsComplex};
use crate::graph::NodeId;

#[derive(Debug, Clone)]
pub struct H1Annotation {
    dim: usize,
    /// per edge (complex order): sparse integer annotation
    edge_ann: Vec<Vec<(usize, i128)>>,
}

impl H1Annotation {
    pub fn new(x: &RipsComplex) -> Self {
        let nv = x.vertices().len();
        let adj = local_adjacency(x);

        // spanning forest by BFS from the smallest vertex of each component
        let mut in_tree = vec![false; x.edges().len()];
        let mut seen = vec![false; nv];
        for s in 0..nv {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &(w, e) in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        in_tree[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }

        let mut nontree = vec![usize::MAX; x.edges().len()];
        let mut k = 0;
        for (e, t) in in_tree.iter().enumerate() {
            if !t {
                nontree[e] = k;
                k += 1;
            }
        }

        // triangle relations restricted to non-tree coordinates
        let mut rel = Echelon::new();
        for &t in x.triangles() {
            let mut v = SparseVec::new();
            for (f, s) in triangle_faces(t) {
                let e = x.edge_index(f[0], f[1]).expect("face present");
                if nontree[e] != usize::MAX {
                    v.insert(nontree[e], q(s));
                }
            }
            rel.insert(v);
        }
        let reduced = rel.reduced_pivots();
        let mut free_pos = vec![usize::MAX; k];
        let mut dim = 0;
        for (i, slot) in free_pos.iter_mut().enumerate() {
            if !reduced.contains_key(&i) {
                *slot = dim;
                dim += 1;
            }
        }

        // a pivot coordinate equals minus the free part of its relation
        let scale = denominator_lcm(reduced.values().flat_map(|v| v.values()));
        let scale_q = num_rational::BigRational::from_integer(scale);
        let mut edge_ann = vec![Vec::new(); x.edges().len()];
        for (e, &i) in nontree.iter().enumerate() {
            if i == usize::MAX {
                continue;
            }
            let mut ann: Vec<(usize, i128)> = match reduced.get(&i) {
                None => vec![(
                    free_pos[i],
                    scale_q
                        .to_integer()
                        .to_i128()
                        .expect("annotation fits i128"),
                )],
                Some(p) => p
                    .iter()
                    .filter(|(&r, _)| r != i)
                    .map(|(&r, c)| {
                        let val = -(c * &scale_q);
                        debug_assert!(val.is_integer());
                        (
                            free_pos[r],
                            val.to_integer().to_i128().expect("annotation fits i128"),
                        )
                    })
                    .collect(),
            };
            ann.sort_unstable();
            edge_ann[e] = ann;
        }
        H1Annotation { dim, edge_ann }
    }

    /// Rank of H1, i.e. the annotation length.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds the annotation of the oriented edge `a → b` (edge index `e`) into
    /// `acc`, multiplied by `sign`.
    fn accumulate(&self, acc: &mut [i128], x: &RipsComplex, e: usize, a: NodeId, sign: i128) {
        let orient = if a == x.edges()[e][0] { 1 } else { -1 };
        for &(i, v) in &self.edge_ann[e] {
            acc[i] += sign * orient * v;
        }
    }

    /// Annotation of the closed walk `v0 → … → v0`; `None` if a step is not
    /// an edge of the complex.
    pub fn of_walk(&self, x: &RipsComplex, walk: &[NodeId]) -> Option<Vec<i128>> {
        let mut acc = vec![0i128; self.dim];
        for i in 0..walk.len() {
            let (a, b) = (walk[i], walk[(i + 1) % walk.len()]);
            let e = x.edge_index(a, b)?;
            self.accumulate(&mut acc, x, e, a, 1);
        }
        Some(acc)
    }

    pub fn bounds(&self, x: &RipsComplex, walk: &[NodeId]) -> Option<bool> {
        self.of_walk(x, walk).map(|a| a.iter().all(|&v| v == 0))
    }
}

fn local_adjacency(x: &RipsComplex) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); x.vertices().len()];
    for (e, &[a, b]) in x.edges().iter().enumerate() {
        let (ia, ib) = (x.vertex_index(a).unwrap(), x.vertex_index(b).unwrap());
        adj[ia].push((ib, e));
        adj[ib].push((ia, e));
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    adj
}

/// Shortest simple cycle (in hops) that does not bound in `x`, as a node
/// sequence starting at its root. Ties are broken by root id, then by the
/// closing edge. Returns `None` when β1 = 0.
pub fn shortest_nontrivial_cycle(x: &RipsComplex, ann: &H1Annotation) -> Option<Vec<NodeId>> {
    let d = ann.dim();
    if d == 0 {
        return None;
    }
    let nv = x.vertices().len();
    let adj = local_adjacency(x);
    let mut best: Option<(usize, Vec<usize>)> = None;

    let mut dist = vec![usize::MAX; nv];
    let mut parent = vec![(usize::MAX, usize::MAX); nv];
    let mut branch = vec![usize::MAX; nv];
    let mut pa = vec![0i128; nv * d];
    let mut order = Vec::with_capacity(nv);
    let mut tmp = vec![0i128; d];

    for r in 0..nv {
        let limit = best.as_ref().map_or(usize::MAX, |b| b.0);
        if limit <= 3 {
            break;
        }
        for &v in &order {
            dist[v] = usize::MAX;
        }
        order.clear();
        dist[r] = 0;
        parent[r] = (usize::MAX, usize::MAX);
        branch[r] = r;
        pa[r * d..(r + 1) * d].iter_mut().for_each(|v| *v = 0);
        order.push(r);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            // a candidate through depth-k nodes has length ≥ 2k + 1
            if 2 * dist[v] + 1 >= limit {
                continue;
            }
            for &(w, e) in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = (v, e);
                    branch[w] = if v == r { w } else { branch[v] };
                    let (src, dst) = (v * d, w * d);
                    for i in 0..d {
                        pa[dst + i] = pa[src + i];
                    }
                    ann_add(ann, x, e, x.vertices()[v], &mut pa[dst..dst + d]);
                    order.push(w);
                }
            }
        }
        let mut found: Option<(usize, usize, usize)> = None;
        for &a in &order {
            for &(b, e) in &adj[a] {
                if b <= a || dist[b] == usize::MAX {
                    continue;
                }
                if parent[b].1 == e || parent[a].1 == e || branch[a] == branch[b] {
                    continue;
                }
                let len = dist[a] + dist[b] + 1;
                let cur = found.map_or(limit, |f| f.0).min(limit);
                if len >= cur {
                    continue;
                }
                tmp.iter_mut().for_each(|v| *v = 0);
                for i in 0..d {
                    tmp[i] = pa[a * d + i] - pa[b * d + i];
                }
                ann_add(ann, x, e, x.vertices()[a], &mut tmp);
                if tmp.iter().any(|&v| v != 0) {
                    found = Some((len, a, b));
                }
            }
        }
        if let Some((len, a, b)) = found {
            let mut left = vec![a];
            let mut v = a;
            while parent[v].0 != usize::MAX {
                v = parent[v].0;
                left.push(v);
            }
            left.reverse();
            let mut v = b;
            while v != r {
                left.push(v);
                v = parent[v].0;
            }
            best = Some((len, left));
        }
    }
    best.map(|(_, c)| c.into_iter().map(|i| x.vertices()[i]).collect())
}

fn ann_add(ann: &H1Annotation, x: &RipsComplex, e: usize, from: NodeId, acc: &mut [i128]) {
    ann.accumulate(acc, x, e, from, 1);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{betti_exact, build_rips};
    use crate::graph::CommGraph;

    #[test]
    fn annotation_dimension_is_beta1() {
        let g = CommGraph::from_edges(
            8,
            [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 4),
                (0, 4),
            ],
        );
        let x = build_rips(&g);
        assert_eq!(H1Annotation::new(&x).dim(), betti_exact(&x).b1);
    }

    #[test]
    fn square_with_tail_yields_the_square() {
        // square 0..3 with a pendant triangle hanging off node 0
        let g = CommGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (0, 5)]);
        let x = build_rips(&g);
        let ann = H1Annotation::new(&x);
        let c = shortest_nontrivial_cycle(&x, &ann).unwrap();
        let mut sorted = c.clone();
        sorted.sort();
        assert_eq!(sorted, vec![NodeId(0), NodeId(1), NodeId(2), NodeId(3)]);
        assert_eq!(ann.bounds(&x, &c), Some(false));
    }

    #[test]
    fn filled_complex_has_no_cycle() {
        let g = CommGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let x = build_rips(&g);
        let ann = H1Annotation::new(&x);
        assert_eq!(ann.dim(), 0);
        assert!(shortest_nontrivial_cycle(&x, &ann).is_none());
    }

    #[test]
    fn triangle_loop_bounds() {
        let g = CommGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let x = build_rips(&g);
        let ann = H1Annotation::new(&x);
        assert_eq!(
            ann.bounds(&x, &[NodeId(0), NodeId(1), NodeId(2), NodeId(3)]),
            Some(true)
        );
    }
}
