//! Disjoint-paths instances and their translation into normal programs
//! whose primal treewidth stays linear in the instance's treewidth.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::asp::Program;
use crate::graph::{Digraph, Graph};
use crate::td::{decompose_heuristic, make_nice, validate_td, Heuristic, TreeDecomposition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DjpError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("{vertices} vertices exceed the solver limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

/// Directed graph with disjoint (source, destination) pairs. Vertices are
/// 0-based here and 1-based in text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DjpInstance {
    pub num_vertices: usize,
    pub arcs: Vec<(usize, usize)>,
    pub pairs: Vec<(usize, usize)>,
}

impl DjpInstance {
    pub fn new(num_vertices: usize, arcs: Vec<(usize, usize)>, pairs: Vec<(usize, usize)>) -> Result<Self, DjpError> {
        let inst = DjpInstance { num_vertices, arcs, pairs };
        inst.check()?;
        Ok(inst)
    }

    fn check(&self) -> Result<(), DjpError> {
        let bad = |m: String| Err(DjpError::InvariantViolation(m));
        let n = self.num_vertices;
        let mut seen = BTreeSet::new();
        for &(u, v) in &self.arcs {
            if u >= n || v >= n {
                return bad(format!("arc ({}, {}) uses an unknown vertex", u + 1, v + 1));
            }
            if u == v {
                return bad(format!("self-loop on {}", u + 1));
            }
            if !seen.insert((u, v)) {
                return bad(format!("duplicate arc ({}, {})", u + 1, v + 1));
            }
        }
        let mut terminals = BTreeSet::new();
        for &(s, d) in &self.pairs {
            for x in [s, d] {
                if x >= n {
                    return bad(format!("pair uses unknown vertex {}", x + 1));
                }
                if !terminals.insert(x) {
                    return bad(format!("vertex {} occurs in more than one pair position", x + 1));
                }
            }
            if let Some(&(u, _)) = self.arcs.iter().find(|&&(_, v)| v == s) {
                return bad(format!("source {} has an incoming arc from {}", s + 1, u + 1));
            }
            if let Some(&(_, v)) = self.arcs.iter().find(|&&(u, _)| u == d) {
                return bad(format!("destination {} has an outgoing arc to {}", d + 1, v + 1));
            }
        }
        Ok(())
    }

    pub fn digraph(&self) -> Digraph {
        let mut g = Digraph::new(self.num_vertices);
        for &(u, v) in &self.arcs {
            g.add_arc(u, v);
        }
        g
    }

    pub fn underlying_graph(&self) -> Graph {
        self.digraph().underlying_graph()
    }
}

pub fn djp_parse(text: &str) -> Result<DjpInstance, DjpError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut arcs = Vec::new();
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let malformed = |m: &str| DjpError::Malformed { line, message: m.to_string() };
        let nums = |toks: &[&str]| -> Result<Vec<usize>, DjpError> {
            toks.iter().map(|t| t.parse::<usize>().map_err(|_| malformed(&format!("bad number `{t}`")))).collect()
        };
        match toks.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(malformed("second header"));
                }
                if toks.len() != 5 || toks[1] != "djp" {
                    return Err(malformed("expected `p djp <n> <m> <q>`"));
                }
                let v = nums(&toks[2..])?;
                header = Some((v[0], v[1], v[2]));
            }
            Some(kind @ ("a" | "d")) => {
                let (n, _, _) = header.ok_or_else(|| malformed("line before header"))?;
                if toks.len() != 3 {
                    return Err(malformed("expected two vertices"));
                }
                let v = nums(&toks[1..])?;
                if v.iter().any(|&x| x == 0 || x > n) {
                    return Err(malformed("vertex out of range"));
                }
                let e = (v[0] - 1, v[1] - 1);
                if kind == "a" {
                    arcs.push(e);
                } else {
                    pairs.push(e);
                }
            }
            Some(t) => return Err(malformed(&format!("unknown line type `{t}`"))),
        }
    }
    let (n, m, q) = header.ok_or(DjpError::Malformed { line: 0, message: "missing header".into() })?;
    if arcs.len() != m || pairs.len() != q {
        return Err(DjpError::Malformed {
            line: 0,
            message: format!("header announces {m} arcs and {q} pairs, found {} and {}", arcs.len(), pairs.len()),
        });
    }
    DjpInstance::new(n, arcs, pairs)
}

pub fn djp_write(inst: &DjpInstance) -> String {
    let mut s = format!("p djp {} {} {}\n", inst.num_vertices, inst.arcs.len(), inst.pairs.len());
    for &(u, v) in &inst.arcs {
        let _ = writeln!(s, "a {} {}", u + 1, v + 1);
    }
    for &(a, b) in &inst.pairs {
        let _ = writeln!(s, "d {} {}", a + 1, b + 1);
    }
    s
}

// ---------------------------------------------------------------- solver

pub const SOLVER_LIMIT: usize = 12;

/// Vertex-disjoint paths (as vertex sequences, one per pair), if any exist.
pub fn djp_bruteforce_solve(inst: &DjpInstance) -> Result<Option<Vec<Vec<usize>>>, DjpError> {
    if inst.num_vertices > SOLVER_LIMIT {
        return Err(DjpError::TooLarge { vertices: inst.num_vertices, limit: SOLVER_LIMIT });
    }
    let g = inst.digraph();
    let mut used = vec![false; inst.num_vertices];
    for &(s, d) in &inst.pairs {
        used[s] = true;
        used[d] = true;
    }
    let mut paths = Vec::new();
    Ok(route(&g, &inst.pairs, &mut used, &mut paths).then_some(paths))
}

fn route(g: &Digraph, pairs: &[(usize, usize)], used: &mut [bool], paths: &mut Vec<Vec<usize>>) -> bool {
    let Some(&(s, d)) = pairs.get(paths.len()) else {
        return true;
    };
    let mut path = vec![s];
    extend(g, d, pairs, used, &mut path, paths)
}

fn extend(
    g: &Digraph,
    d: usize,
    pairs: &[(usize, usize)],
    used: &mut [bool],
    path: &mut Vec<usize>,
    paths: &mut Vec<Vec<usize>>,
) -> bool {
    let u = *path.last().expect("path starts at its source");
    for &v in g.successors(u) {
        if v == d {
            path.push(v);
            paths.push(path.clone());
            if route(g, pairs, used, paths) {
                return true;
            }
            paths.pop();
            path.pop();
        } else if !used[v] {
            used[v] = true;
            path.push(v);
            if extend(g, d, pairs, used, path, paths) {
                return true;
            }
            path.pop();
            used[v] = false;
        }
    }
    false
}

// ---------------------------------------------------------------- decompositions

/// Pairs in order of closure plus the node each pair is closed at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureSequence {
    pub order: Vec<usize>,
    pub closing_node: Vec<usize>,
}

impl ClosureSequence {
    /// Position of each pair in the sequence.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &p) in self.order.iter().enumerate() {
            pos[p] = i;
        }
        pos
    }
}

/// Which endpoints of a pair occur at or below a node.
fn below_status(below: &BTreeSet<usize>, (s, d): (usize, usize)) -> (bool, bool) {
    (below.contains(&s), below.contains(&d))
}

/// Pairs open at `t`: exactly one endpoint occurs at or below `t`.
pub fn open_pairs(td: &TreeDecomposition, inst: &DjpInstance, t: usize) -> Vec<usize> {
    let below = td.vertices_below(t);
    (0..inst.pairs.len())
        .filter(|&i| {
            let (a, b) = below_status(&below, inst.pairs[i]);
            a != b
        })
        .collect()
}

/// A pair is closed at the first node in post-order that has both
/// endpoints at or below it.
pub fn closure_sequence(td: &TreeDecomposition, inst: &DjpInstance) -> ClosureSequence {
    let below = td.all_vertices_below();
    let post = td.post_order();
    let mut closing_node = vec![td.root(); inst.pairs.len()];
    let mut rank = vec![usize::MAX; inst.pairs.len()];
    for (i, &p) in inst.pairs.iter().enumerate() {
        if let Some((r, &t)) = post.iter().enumerate().find(|(_, &t)| below_status(&below[t], p) == (true, true)) {
            closing_node[i] = t;
            rank[i] = r;
        }
    }
    let mut order: Vec<usize> = (0..inst.pairs.len()).collect();
    order.sort_by_key(|&i| (rank[i], i));
    ClosureSequence { order, closing_node }
}

/// Adds each vertex to every bag on a path between two of its bags.
fn connect_occurrences(td: &TreeDecomposition, bags: &mut [BTreeSet<usize>]) {
    let n = td.num_nodes();
    let depth: Vec<usize> = (0..n).map(|t| td.depth(t)).collect();
    for v in 0..td.num_vertices() {
        let nodes: Vec<usize> = (0..n).filter(|&t| bags[t].contains(&v)).collect();
        if nodes.len() < 2 {
            continue;
        }
        let mut frontier: BTreeSet<(usize, usize)> = nodes.iter().map(|&t| (depth[t], t)).collect();
        while frontier.len() > 1 {
            let (d, t) = frontier.pop_last().expect("nonempty");
            bags[t].insert(v);
            let p = td.parent(t).expect("non-root");
            frontier.insert((d - 1, p));
        }
        let top = frontier.pop_first().expect("meeting node").1;
        bags[top].insert(v);
    }
}

fn rebuild(td: &TreeDecomposition, bags: Vec<BTreeSet<usize>>) -> TreeDecomposition {
    let parent = (0..td.num_nodes()).map(|t| td.parent(t)).collect();
    TreeDecomposition::new(td.num_vertices(), bags.into_iter().map(|b| b.into_iter().collect()).collect(), parent)
        .expect("same tree")
}

/// Adds pair endpoints to bags so that an open pair's present endpoint is in
/// the bag and a node closing a pair holds both endpoints.
pub fn pair_respecting_td(td: &TreeDecomposition, inst: &DjpInstance) -> TreeDecomposition {
    let below = td.all_vertices_below();
    let mut bags: Vec<BTreeSet<usize>> = td.bags().iter().map(|b| b.iter().copied().collect()).collect();
    for &(s, d) in &inst.pairs {
        for t in 0..td.num_nodes() {
            match below_status(&below[t], (s, d)) {
                (true, false) => {
                    bags[t].insert(s);
                }
                (false, true) => {
                    bags[t].insert(d);
                }
                (true, true) => {
                    let closes = td.children(t).iter().any(|&c| {
                        let (a, b) = below_status(&below[c], (s, d));
                        a != b
                    });
                    if closes {
                        bags[t].insert(s);
                        bags[t].insert(d);
                    }
                }
                (false, false) => {}
            }
        }
    }
    connect_occurrences(td, &mut bags);
    rebuild(td, bags)
}

pub fn audit_pair_respecting(td: &TreeDecomposition, inst: &DjpInstance) -> Result<(), String> {
    let below = td.all_vertices_below();
    for (i, &(s, d)) in inst.pairs.iter().enumerate() {
        for t in 0..td.num_nodes() {
            let status = below_status(&below[t], (s, d));
            let need: Vec<usize> = match status {
                (true, false) => vec![s],
                (false, true) => vec![d],
                (true, true)
                    if td.children(t).iter().any(|&c| {
                        let (a, b) = below_status(&below[c], (s, d));
                        a != b
                    }) =>
                {
                    vec![s, d]
                }
                _ => vec![],
            };
            if let Some(v) = need.into_iter().find(|&v| !td.contains(t, v)) {
                return Err(format!("pair {} needs vertex {} in node {}", i + 1, v + 1, t + 1));
            }
        }
    }
    Ok(())
}

/// Makes the endpoints of the pair closed just before each pair present in
/// that pair's closing node, by adding them along the tree path between the
/// two closing nodes.
pub fn pair_connected_td(td: &TreeDecomposition, inst: &DjpInstance) -> (TreeDecomposition, ClosureSequence) {
    let sigma = closure_sequence(td, inst);
    let mut bags: Vec<BTreeSet<usize>> = td.bags().iter().map(|b| b.iter().copied().collect()).collect();
    let depth: Vec<usize> = (0..td.num_nodes()).map(|t| td.depth(t)).collect();
    for w in sigma.order.windows(2) {
        let (prev, next) = (w[0], w[1]);
        let (s, d) = inst.pairs[prev];
        let (mut a, mut b) = (sigma.closing_node[prev], sigma.closing_node[next]);
        loop {
            bags[a].insert(s);
            bags[a].insert(d);
            bags[b].insert(s);
            bags[b].insert(d);
            if a == b {
                break;
            }
            if depth[a] >= depth[b] {
                a = td.parent(a).expect("non-root");
            } else {
                b = td.parent(b).expect("non-root");
            }
        }
    }
    let out = rebuild(td, bags);
    let sigma = closure_sequence(&out, inst);
    (out, sigma)
}

pub fn audit_pair_connected(td: &TreeDecomposition, inst: &DjpInstance, sigma: &ClosureSequence) -> Result<(), String> {
    audit_pair_respecting(td, inst)?;
    if *sigma != closure_sequence(td, inst) {
        return Err("closure sequence does not match the decomposition".into());
    }
    for w in sigma.order.windows(2) {
        let (s, d) = inst.pairs[w[0]];
        let t = sigma.closing_node[w[1]];
        if !td.contains(t, s) || !td.contains(t, d) {
            return Err(format!("node {} closes pair {} but misses pair {}", t + 1, w[1] + 1, w[0] + 1));
        }
    }
    Ok(())
}

/// Arcs whose endpoints are together in some child's bag but not in this
/// node's bag; the root also takes the arcs inside its own bag.
pub fn ready_edges(td: &TreeDecomposition, inst: &DjpInstance, t: usize) -> Vec<(usize, usize)> {
    let inside = |n: usize, (u, v): (usize, usize)| td.contains(n, u) && td.contains(n, v);
    inst.arcs
        .iter()
        .copied()
        .filter(|&e| {
            if inside(t, e) {
                t == td.root()
            } else {
                td.children(t).iter().any(|&c| inside(c, e))
            }
        })
        .collect()
}

// ---------------------------------------------------------------- program

/// Names of generated atoms.
pub fn edge_atom(u: usize, v: usize) -> String {
    format!("e_{}_{}", u + 1, v + 1)
}

pub fn unused_atom(u: usize, v: usize) -> String {
    format!("ne_{}_{}", u + 1, v + 1)
}

pub fn reach_atom(u: usize) -> String {
    format!("r_{}", u + 1)
}

pub fn finished_atom(u: usize, t: usize) -> String {
    format!("f_{}_t{}", u + 1, t + 1)
}

/// The program `a :- not a.`
pub fn inconsistent_program() -> Program {
    let mut p = Program::new();
    p.add(&["a"], &[], &["a"]);
    p
}

/// Some node has more open pairs than bag atoms.
pub fn too_many_open_pairs(td: &TreeDecomposition, inst: &DjpInstance) -> Option<usize> {
    (0..td.num_nodes()).find(|&t| open_pairs(td, inst, t).len() > td.bag(t).len())
}

/// Rules per node for the reachability, linking and disjointness parts.
pub fn generate_djp_program(inst: &DjpInstance, td: &TreeDecomposition, sigma: &ClosureSequence) -> Program {
    if too_many_open_pairs(td, inst).is_some() {
        return inconsistent_program();
    }
    let mut p = Program::new();
    for t in td.post_order() {
        let ready = ready_edges(td, inst, t);
        for &(u, v) in &ready {
            let (e, ne) = (edge_atom(u, v), unused_atom(u, v));
            p.add(&[&e], &[&reach_atom(u)], &[&ne]);
            p.add(&[&ne], &[], &[&e]);
            p.add(&[&reach_atom(v)], &[&e], &[]);
        }
        let children = td.children(t);
        for &(u, v) in &ready {
            if td.contains(t, u) {
                p.add(&[&finished_atom(u, t)], &[&edge_atom(u, v)], &[]);
            }
        }
        for &c in children {
            for &u in td.bag(c) {
                if td.contains(t, u) {
                    p.add(&[&finished_atom(u, t)], &[&finished_atom(u, c)], &[]);
                }
            }
        }
        for (i, &c1) in children.iter().enumerate() {
            for &c2 in &children[i + 1..] {
                for &u in td.bag(c1) {
                    if td.contains(c2, u) {
                        p.add(&[], &[&finished_atom(u, c1), &finished_atom(u, c2)], &[]);
                    }
                }
            }
        }
        for &(u, v) in &ready {
            for &c in children {
                if td.contains(c, u) {
                    p.add(&[], &[&finished_atom(u, c), &edge_atom(u, v)], &[]);
                }
            }
        }
        for (i, &(u, v)) in ready.iter().enumerate() {
            for &(u2, w) in &ready[i + 1..] {
                if u2 == u && w != v {
                    p.add(&[], &[&edge_atom(u, v), &edge_atom(u, w)], &[]);
                }
            }
        }
    }
    for &(_, d) in &inst.pairs {
        p.add(&[], &[], &[&reach_atom(d)]);
    }
    for (i, &pi) in sigma.order.iter().enumerate() {
        let s = inst.pairs[pi].0;
        if i == 0 {
            p.add(&[&reach_atom(s)], &[], &[]);
        } else {
            let (ps, pd) = inst.pairs[sigma.order[i - 1]];
            p.add(&[&reach_atom(s)], &[&reach_atom(ps), &reach_atom(pd)], &[]);
        }
    }
    p
}

/// Output of the full pipeline.
#[derive(Clone, Debug)]
pub struct DjpReduction {
    pub program: Program,
    /// Decomposition the program was generated along, if generation ran.
    pub td: Option<TreeDecomposition>,
    pub sigma: Option<ClosureSequence>,
    pub early_out: bool,
}

/// Decomposes (if needed), checks open pairs, makes the decomposition nice,
/// pair-respecting and pair-connected, and generates the program.
pub fn djp_to_program(inst: &DjpInstance, td: Option<&TreeDecomposition>, seed: u64) -> DjpReduction {
    let g = inst.underlying_graph();
    let base = match td {
        Some(td) => td.clone(),
        None => decompose_heuristic(&g, Heuristic::MinFill, seed),
    };
    if too_many_open_pairs(&base, inst).is_some() {
        return DjpReduction { program: inconsistent_program(), td: None, sigma: None, early_out: true };
    }
    let nice = make_nice(&base).into_td();
    let respecting = make_nice(&pair_respecting_td(&nice, inst)).into_td();
    let respecting = if audit_pair_respecting(&respecting, inst).is_ok() { respecting } else { pair_respecting_td(&nice, inst) };
    let (connected, sigma) = pair_connected_td(&respecting, inst);
    debug_assert!(validate_td(&g, &connected).is_valid());
    let program = generate_djp_program(inst, &connected, &sigma);
    DjpReduction { program, td: Some(connected), sigma: Some(sigma), early_out: false }
}

/// Used edges of an answer set, grouped by tail vertex.
pub fn used_edges_by_tail(p: &Program, answer: &crate::asp::Interpretation) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for name in answer.names(p) {
        if let Some(rest) = name.strip_prefix("e_") {
            if let Some((u, _)) = rest.split_once('_') {
                out.entry(u.to_string()).or_default().push(name.to_string());
            }
        }
    }
    out
}

// ---------------------------------------------------------------- random

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DjpSizes {
    pub vertices: usize,
    pub arcs: usize,
    pub pairs: usize,
}

/// Random instance respecting the invariants; fewer arcs are placed when the
/// requested number does not fit.
pub fn random_djp(seed: u64, sizes: DjpSizes) -> DjpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sizes.vertices;
    let q = sizes.pairs.min(n / 2);
    let mut vs: Vec<usize> = (0..n).collect();
    vs.shuffle(&mut rng);
    let pairs: Vec<(usize, usize)> = (0..q).map(|i| (vs[2 * i], vs[2 * i + 1])).collect();
    let sources: BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    let dests: BTreeSet<usize> = pairs.iter().map(|p| p.1).collect();
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && !dests.contains(&u) && !sources.contains(&v))
        .collect();
    candidates.shuffle(&mut rng);
    let m = sizes.arcs.min(candidates.len());
    let mut arcs: Vec<(usize, usize)> = candidates[..m].to_vec();
    arcs.sort_unstable();
    if rng.gen_bool(0.5) {
        arcs.reverse();
    }
    DjpInstance::new(n, arcs, pairs).expect("generated instances respect the invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::classify;
    use crate::oracles::answer_sets_search;

    // s1 d1 s2 d2 s3 d3 x y z = 1..9
    pub const RUNNING_INSTANCE: &str = "c running instance\np djp 9 10 3\na 1 7\na 3 7\na 7 2\na 8 4\na 3 8\na 5 9\na 9 6\na 8 6\na 9 8\na 8 9\nd 1 2\nd 3 4\nd 5 6\n";

    fn three_node_td() -> TreeDecomposition {
        // t1 = {s3,d3,y,z}, t2 = {s3,d3,y}, t3 = {s1,d1,s2,d2,s3,d3,x,y}
        TreeDecomposition::new(9, vec![vec![4, 5, 7, 8], vec![4, 5, 7], vec![0, 1, 2, 3, 4, 5, 6, 7]], vec![Some(1), Some(2), None])
            .unwrap()
    }

    #[test]
    fn parse_and_write_round_trip() {
        let inst = djp_parse(RUNNING_INSTANCE).unwrap();
        assert_eq!(inst.pairs.len(), 3);
        assert_eq!(inst.arcs.len(), 10);
        assert_eq!(djp_parse(&djp_write(&inst)).unwrap(), inst);
        assert_eq!(djp_parse("p djp 0 0 0\n").unwrap().num_vertices, 0);
        assert!(matches!(djp_parse("p djp 2 1 1\na 2 1\nd 1 2\n"), Err(DjpError::InvariantViolation(_))));
        assert!(matches!(djp_parse("p djp 2 1 0\nx 1 2\n"), Err(DjpError::Malformed { line: 2, .. })));
    }

    #[test]
    fn solver_on_running_instance() {
        let inst = djp_parse(RUNNING_INSTANCE).unwrap();
        let paths = djp_bruteforce_solve(&inst).unwrap().unwrap();
        assert_eq!(paths, vec![vec![0, 6, 1], vec![2, 7, 3], vec![4, 8, 5]]);
        let stuck = DjpInstance::new(3, vec![(0, 2)], vec![(0, 1)]).unwrap();
        assert_eq!(djp_bruteforce_solve(&stuck).unwrap(), None);
        let empty = DjpInstance::new(0, vec![], vec![]).unwrap();
        assert_eq!(djp_bruteforce_solve(&empty).unwrap(), Some(vec![]));
    }

    #[test]
    fn ready_edges_of_three_node_td() {
        let inst = djp_parse(RUNNING_INSTANCE).unwrap();
        let td = three_node_td();
        assert!(validate_td(&inst.underlying_graph(), &td).is_valid());
        assert!(ready_edges(&td, &inst, 0).is_empty());
        let mut t2 = ready_edges(&td, &inst, 1);
        t2.sort();
        assert_eq!(t2, vec![(4, 8), (7, 8), (8, 5), (8, 7)]);
        assert_eq!(ready_edges(&td, &inst, 2).len(), inst.arcs.len() - 4);
    }

    #[test]
    fn checking_rules_at_middle_node() {
        let inst = djp_parse(RUNNING_INSTANCE).unwrap();
        let td = three_node_td();
        let sigma = closure_sequence(&td, &inst);
        assert_eq!(sigma.order, vec![2, 0, 1]);
        let p = generate_djp_program(&inst, &td, &sigma);
        let text = p.to_string();
        for rule in [
            "f_8_t2 :- e_8_9.",
            "f_5_t2 :- e_5_9.",
            "f_5_t2 :- f_5_t1.",
            "f_6_t2 :- f_6_t1.",
            "f_8_t2 :- f_8_t1.",
            ":- f_8_t1, e_8_9.",
            ":- f_9_t1, e_9_8.",
            ":- f_9_t1, e_9_6.",
            ":- f_5_t1, e_5_9.",
            ":- e_9_6, e_9_8.",
        ] {
            assert!(text.lines().any(|l| l == rule), "missing {rule}");
        }
        assert!(classify(&p).is_normal);
        assert!(!answer_sets_search(&p, 1).unwrap().is_empty());
    }

    #[test]
    fn pipeline_on_running_instance() {
        let inst = djp_parse(RUNNING_INSTANCE).unwrap();
        let red = djp_to_program(&inst, None, 0);
        assert!(!red.early_out);
        let td = red.td.as_ref().unwrap();
        audit_pair_connected(td, &inst, red.sigma.as_ref().unwrap()).unwrap();
        assert!(!answer_sets_search(&red.program, 1).unwrap().is_empty());
    }

    #[test]
    fn consistency_matches_solver_on_random_instances() {
        for seed in 0..200 {
            let sizes = DjpSizes { vertices: 3 + (seed % 4) as usize, arcs: (seed % 8) as usize, pairs: 1 + (seed % 2) as usize };
            let inst = random_djp(seed, sizes);
            let red = djp_to_program(&inst, None, seed);
            let consistent = !answer_sets_search(&red.program, 1).unwrap().is_empty();
            let solvable = djp_bruteforce_solve(&inst).unwrap().is_some();
            assert_eq!(consistent, solvable, "seed {seed}\n{}", djp_write(&inst));
        }
    }

    #[test]
    fn random_instances_are_valid_and_distinct() {
        let sizes = DjpSizes { vertices: 6, arcs: 7, pairs: 2 };
        let a: Vec<DjpInstance> = (0..3).map(|s| random_djp(s, sizes)).collect();
        assert_ne!(a[0], a[1]);
        assert_ne!(a[1], a[2]);
        for i in &a {
            i.check().unwrap();
        }
    }
}
