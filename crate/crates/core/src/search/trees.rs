//! Spanning-tree counting and enumeration on small graphs.

use std::ops::ControlFlow;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::mesh::Graph;

use super::SearchError;

/// Exact spanning-tree count via the Matrix-Tree theorem, using
/// fraction-free (Bareiss) elimination on the reduced Laplacian.
/// Parallel edges count separately; loops are ignored.
pub fn count_spanning_trees(graph: &Graph) -> Result<BigUint, SearchError> {
    if !graph.is_connected() {
        return Err(SearchError::DisconnectedGraph);
    }
    let n = graph.vertex_count;
    if n <= 1 {
        return Ok(BigUint::one());
    }
    let size = n - 1;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for &(a, b) in &graph.edges {
        if a == b {
            continue;
        }
        for (x, y) in [(a, b), (b, a)] {
            if x < size {
                m[x][x] += 1;
                if y < size {
                    m[x][y] -= 1;
                }
            }
        }
    }
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..size {
        if m[k][k].is_zero() {
            match (k + 1..size).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return Ok(BigUint::zero()),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = if negate { -prev } else { prev };
    Ok(det.abs().to_biguint().expect("absolute value"))
}

/// Calls `visit` with the sorted edge ids of every spanning tree, in
/// lexicographic order.
pub fn for_each_spanning_tree(
    graph: &Graph,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<(), SearchError> {
    let en = TreeEnumerator::new(graph, &[])?;
    let mut buf = Vec::with_capacity(graph.vertex_count);
    let mut st = en.state();
    let _ = en.descend(&mut st, 0, &mut |s: &TreeState| {
        buf.clear();
        buf.extend(mask_edges(s.mask));
        visit(&buf)
    });
    Ok(())
}

/// Every spanning tree as a sorted edge list, in lexicographic order.
pub fn spanning_trees(graph: &Graph) -> Result<Vec<Vec<usize>>, SearchError> {
    let mut out = Vec::new();
    for_each_spanning_tree(graph, |t| {
        out.push(t.to_vec());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

pub(crate) fn mask_edges(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let e = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(e)
    })
}

fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            return None;
        }
        let i = x.trailing_zeros() as usize;
        x &= x - 1;
        Some(i)
    })
}

/// Include-first contraction/deletion recursion over edges in id order.
/// An edge is included when it joins two components and excluded when the
/// remaining edges still connect its endpoints, so every branch ends in a
/// tree and trees come out in lexicographic order.
///
/// Each edge may also carry `(group, bit)` tags; the state keeps one bit
/// pattern per group over the included edges.
pub(crate) struct TreeEnumerator {
    n: usize,
    ends: Vec<(usize, usize)>,
    /// `later[d][v]`: neighbors of `v` through edges with id ≥ `d`.
    later: Vec<Vec<u64>>,
    tags: Vec<Vec<(usize, u32)>>,
    group_count: usize,
}

pub(crate) struct TreeState {
    pub mask: u128,
    pub patterns: Vec<u32>,
    size: usize,
    label: [u8; 64],
    comp: [u64; 64],
}

impl TreeEnumerator {
    pub fn new(graph: &Graph, tags: &[Vec<(usize, u32)>]) -> Result<Self, SearchError> {
        let (n, m) = (graph.vertex_count, graph.edges.len());
        if n > 64 || m > 128 {
            return Err(SearchError::GraphTooLarge { vertices: n, edges: m });
        }
        if !graph.is_connected() {
            return Err(SearchError::DisconnectedGraph);
        }
        let mut later = vec![vec![0u64; n]; m + 1];
        for d in (0..m).rev() {
            later[d] = later[d + 1].clone();
            let (a, b) = graph.edges[d];
            later[d][a] |= 1 << b;
            later[d][b] |= 1 << a;
        }
        let mut all_tags = vec![Vec::new(); m];
        for (e, t) in tags.iter().enumerate().take(m) {
            all_tags[e] = t.clone();
        }
        let group_count = tags.iter().flatten().map(|t| t.0 + 1).max().unwrap_or(0);
        Ok(TreeEnumerator {
            n,
            ends: graph.edges.clone(),
            later,
            tags: all_tags,
            group_count,
        })
    }

    pub fn state(&self) -> TreeState {
        let mut st = TreeState {
            mask: 0,
            patterns: vec![0; self.group_count],
            size: 0,
            label: [0; 64],
            comp: [0; 64],
        };
        for v in 0..self.n {
            st.label[v] = v as u8;
            st.comp[v] = 1 << v;
        }
        st
    }

    /// Fresh state with the edges of `prefix` included.
    pub fn state_with(&self, prefix: u128) -> TreeState {
        let mut st = self.state();
        for e in mask_edges(prefix) {
            let (u, v) = self.ends[e];
            let (lu, lv) = (st.label[u], st.label[v]);
            debug_assert_ne!(lu, lv);
            self.include(&mut st, e, lu, lv);
        }
        st
    }

    fn include(&self, st: &mut TreeState, e: usize, lu: u8, lv: u8) -> (u8, u8, u64) {
        let (keep, drop) = if st.comp[lu as usize].count_ones() >= st.comp[lv as usize].count_ones() {
            (lu, lv)
        } else {
            (lv, lu)
        };
        let moved = st.comp[drop as usize];
        for w in bits(moved) {
            st.label[w] = keep;
        }
        st.comp[keep as usize] |= moved;
        st.comp[drop as usize] = 0;
        st.mask |= 1 << e;
        st.size += 1;
        for &(g, bit) in &self.tags[e] {
            st.patterns[g] |= bit;
        }
        (keep, drop, moved)
    }

    fn undo(&self, st: &mut TreeState, e: usize, (keep, drop, moved): (u8, u8, u64)) {
        for w in bits(moved) {
            st.label[w] = drop;
        }
        st.comp[keep as usize] &= !moved;
        st.comp[drop as usize] = moved;
        st.mask &= !(1 << e);
        st.size -= 1;
        for &(g, bit) in &self.tags[e] {
            st.patterns[g] &= !bit;
        }
    }

    /// Whether components `lu` and `lv` stay connected through included
    /// edges and edges with id > `d`.
    fn connected_after(&self, st: &TreeState, d: usize, lu: u8, lv: u8) -> bool {
        let adj = &self.later[d + 1];
        let target = st.comp[lv as usize];
        let mut reach = st.comp[lu as usize];
        let mut frontier = reach;
        loop {
            let mut nb = 0u64;
            for w in bits(frontier) {
                nb |= adj[w];
            }
            nb &= !reach;
            if nb == 0 {
                return false;
            }
            if nb & target != 0 {
                return true;
            }
            let mut next = 0u64;
            while nb != 0 {
                let w = nb.trailing_zeros() as usize;
                let c = st.comp[st.label[w] as usize];
                next |= c;
                nb &= !c;
            }
            reach |= next;
            frontier = next;
        }
    }

    pub fn descend<F>(&self, st: &mut TreeState, d: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&TreeState) -> ControlFlow<()>,
    {
        if st.size + 1 >= self.n {
            return visit(st);
        }
        let (u, v) = self.ends[d];
        let (lu, lv) = (st.label[u], st.label[v]);
        if lu != lv {
            let saved = self.include(st, d, lu, lv);
            let r = self.descend(st, d + 1, visit);
            self.undo(st, d, saved);
            r?;
            if !self.connected_after(st, d, lu, lv) {
                return ControlFlow::Continue(());
            }
        }
        self.descend(st, d + 1, visit)
    }

    /// Included-edge masks of the viable partial states after deciding the
    /// first `depth` edges, in enumeration order. States that complete a
    /// tree earlier are returned as they are.
    fn frontier(&self, depth: usize) -> Vec<u128> {
        let mut out = Vec::new();
        let mut st = self.state();
        self.collect(&mut st, 0, depth, &mut out);
        out
    }

    fn collect(&self, st: &mut TreeState, d: usize, depth: usize, out: &mut Vec<u128>) {
        if st.size + 1 >= self.n || d == depth {
            out.push(st.mask);
            return;
        }
        let (u, v) = self.ends[d];
        let (lu, lv) = (st.label[u], st.label[v]);
        if lu != lv {
            let saved = self.include(st, d, lu, lv);
            self.collect(st, d + 1, depth, out);
            self.undo(st, d, saved);
            if !self.connected_after(st, d, lu, lv) {
                return;
            }
        }
        self.collect(st, d + 1, depth, out);
    }

    /// Splits the enumeration into at least `target` prefixes where
    /// possible. Returns the split depth and the prefixes in order; running
    /// `descend(state_with(p), depth)` for each covers every tree once.
    pub fn split(&self, target: usize) -> (usize, Vec<u128>) {
        let m = self.ends.len();
        let mut depth = 0;
        let mut prefixes = self.frontier(0);
        while prefixes.len() < target && depth < m {
            depth += 1;
            prefixes = self.frontier(depth);
        }
        (depth, prefixes)
    }

    /// Spanning trees extending `prefix` that use none of the other edges
    /// below `depth`.
    pub fn prefix_count(&self, prefix: u128, depth: usize) -> u128 {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in mask_edges(prefix) {
            let (a, b) = self.ends[e];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut index = vec![usize::MAX; self.n];
        let mut k = 0;
        for v in 0..self.n {
            let r = find(&mut parent, v);
            if index[r] == usize::MAX {
                index[r] = k;
                k += 1;
            }
        }
        let edges: Vec<(usize, usize)> = self.ends[depth.min(self.ends.len())..]
            .iter()
            .map(|&(a, b)| (index[find(&mut parent, a)], index[find(&mut parent, b)]))
            .filter(|(a, b)| a != b)
            .collect();
        count_spanning_trees(&Graph::new(k, edges))
            .ok()
            .and_then(|c| c.to_u128())
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures;
    use crate::mesh::skeleton_graph;

    fn brute_force(graph: &Graph) -> usize {
        let m = graph.edges.len();
        let n = graph.vertex_count;
        (0u32..1 << m)
            .filter(|s| s.count_ones() as usize == n - 1)
            .filter(|&s| graph.components_with(|e| s >> e & 1 == 1) == 1)
            .count()
    }

    #[test]
    fn small_counts() {
        let path = Graph::new(3, vec![(0, 1), (1, 2)]);
        assert_eq!(count_spanning_trees(&path).unwrap(), BigUint::from(1u32));
        let tri = Graph::complete(3);
        assert_eq!(spanning_trees(&tri).unwrap().len(), 3);
        let k4 = Graph::complete(4);
        assert_eq!(count_spanning_trees(&k4).unwrap(), BigUint::from(16u32));
        assert_eq!(brute_force(&k4), 16);
        assert_eq!(spanning_trees(&k4).unwrap().len(), 16);
        let single = Graph::new(1, vec![]);
        assert_eq!(spanning_trees(&single).unwrap(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = Graph::new(4, vec![(0, 1), (2, 3)]);
        assert_eq!(count_spanning_trees(&g), Err(SearchError::DisconnectedGraph));
        assert!(spanning_trees(&g).is_err());
    }

    #[test]
    fn cube_trees_match_oracle_and_are_sorted() {
        let g = skeleton_graph(&fixtures::cube());
        assert_eq!(count_spanning_trees(&g).unwrap(), BigUint::from(384u32));
        assert_eq!(brute_force(&g), 384);
        let trees = spanning_trees(&g).unwrap();
        assert_eq!(trees.len(), 384);
        assert!(trees.windows(2).all(|w| w[0] < w[1]));
        assert!(trees
            .iter()
            .all(|t| g.components_with(|e| t.contains(&e)) == 1 && t.len() == 7));
    }

    #[test]
    fn multigraph_counts() {
        // Two parallel edges plus a pendant edge.
        let g = Graph::new(3, vec![(0, 1), (0, 1), (1, 2)]);
        assert_eq!(count_spanning_trees(&g).unwrap(), BigUint::from(2u32));
        assert_eq!(spanning_trees(&g).unwrap(), vec![vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn split_covers_every_tree_once() {
        let g = skeleton_graph(&fixtures::cube());
        let en = TreeEnumerator::new(&g, &[]).unwrap();
        let whole = spanning_trees(&g).unwrap();
        for target in [1, 5, 40, 1000] {
            let (depth, prefixes) = en.split(target);
            let mut got = Vec::new();
            let mut total = 0;
            for p in prefixes {
                total += en.prefix_count(p, depth);
                let mut st = en.state_with(p);
                let _ = en.descend(&mut st, depth, &mut |s: &TreeState| {
                    got.push(mask_edges(s.mask).collect::<Vec<_>>());
                    ControlFlow::Continue(())
                });
            }
            assert_eq!(got, whole, "target {target}");
            assert_eq!(total, 384);
        }
    }

    #[test]
    fn group_patterns_track_included_edges() {
        let g = Graph::complete(4);
        let tags: Vec<Vec<(usize, u32)>> = (0..6).map(|e| vec![(0, 1 << e)]).collect();
        let en = TreeEnumerator::new(&g, &tags).unwrap();
        let mut st = en.state();
        let _ = en.descend(&mut st, 0, &mut |s: &TreeState| {
            assert_eq!(s.patterns[0] as u128, s.mask);
            ControlFlow::Continue(())
        });
        assert_eq!(st.patterns[0], 0);
        assert_eq!(st.mask, 0);
    }
}
