//! Small undirected and directed graph types over dense `usize` vertices.

use std::collections::BTreeSet;

/// Simple undirected graph. Self-loops are ignored, parallel edges collapse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![BTreeSet::new(); n] }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    /// Connect every pair of the given vertices.
    pub fn add_clique(&mut self, vs: &[usize]) {
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
    }
}

/// Directed graph with adjacency lists in insertion order (duplicates dropped).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<BTreeSet<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { succ: vec![BTreeSet::new(); n] }
    }

    pub fn num_vertices(&self) -> usize {
        self.succ.len()
    }

    pub fn add_arc(&mut self, u: usize, v: usize) {
        self.succ[u].insert(v);
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.succ[u].contains(&v)
    }

    pub fn successors(&self, v: usize) -> &BTreeSet<usize> {
        &self.succ[v]
    }

    pub fn num_arcs(&self) -> usize {
        self.succ.iter().map(|s| s.len()).sum()
    }

    /// Strongly connected component index for every vertex (Tarjan, iterative).
    /// Components are numbered in reverse topological order.
    pub fn scc_ids(&self) -> Vec<usize> {
        let n = self.succ.len();
        let succ: Vec<Vec<usize>> = self.succ.iter().map(|s| s.iter().copied().collect()).collect();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(start, 0)];
            index[start] = next_index;
            low[start] = next_index;
            next_index += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < succ[v].len() {
                    let w = succ[v][*pos];
                    *pos += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(p, _)) = call.last() {
                        low[p] = low[p].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                }
            }
        }
        comp
    }

    /// True iff the digraph has no directed cycle (self-loops count as cycles).
    pub fn is_acyclic(&self) -> bool {
        let comp = self.scc_ids();
        let mut size = vec![0usize; self.succ.len()];
        for &c in &comp {
            size[c] += 1;
        }
        (0..self.succ.len()).all(|v| size[comp[v]] == 1 && !self.succ[v].contains(&v))
    }

    pub fn underlying_graph(&self) -> Graph {
        let mut g = Graph::new(self.succ.len());
        for (u, s) in self.succ.iter().enumerate() {
            for &v in s {
                g.add_edge(u, v);
            }
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_finds_cycle() {
        let mut d = Digraph::new(4);
        d.add_arc(0, 1);
        d.add_arc(1, 2);
        d.add_arc(2, 0);
        d.add_arc(2, 3);
        let c = d.scc_ids();
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
        assert!(!d.is_acyclic());
    }

    #[test]
    fn self_loop_is_cycle() {
        let mut d = Digraph::new(2);
        d.add_arc(0, 0);
        assert!(!d.is_acyclic());
        let mut e = Digraph::new(2);
        e.add_arc(0, 1);
        assert!(e.is_acyclic());
    }

    #[test]
    fn graph_edges_sorted() {
        let mut g = Graph::new(3);
        g.add_edge(2, 0);
        g.add_edge(1, 2);
        g.add_edge(1, 1);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 2)]);
    }
}
