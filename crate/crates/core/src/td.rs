//! Tree decompositions: representation, validation, heuristics, nice form,
//! bag programs, rule assignment and PACE `.td` I/O.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::asp::Program;
use crate::graph::Graph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TdError {
    #[error("invalid tree decomposition: {0}")]
    InvalidInput(String),
    #[error("rule {0} is not covered by any bag")]
    UncoveredRule(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Rooted tree of bags. Bags are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    num_vertices: usize,
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl TreeDecomposition {
    /// Builds a TD from bags and a parent relation. Fails unless the parent
    /// relation forms a single tree rooted at the unique parentless node.
    pub fn new(num_vertices: usize, bags: Vec<Vec<usize>>, parent: Vec<Option<usize>>) -> Result<Self, TdError> {
        if bags.is_empty() || bags.len() != parent.len() {
            return Err(TdError::InvalidInput("need at least one bag and one parent entry per bag".into()));
        }
        let n = bags.len();
        let roots: Vec<usize> = (0..n).filter(|&t| parent[t].is_none()).collect();
        if roots.len() != 1 {
            return Err(TdError::InvalidInput(format!("expected one root, found {}", roots.len())));
        }
        let mut children = vec![Vec::new(); n];
        for (t, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(TdError::InvalidInput(format!("node {t} has unknown parent {p}")));
                }
                children[p].push(t);
            }
        }
        let mut bags = bags;
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
            if let Some(&v) = b.iter().find(|&&v| v >= num_vertices) {
                return Err(TdError::InvalidInput(format!("vertex {v} out of range")));
            }
        }
        let td = TreeDecomposition { num_vertices, bags, parent, children, root: roots[0] };
        if td.post_order().len() != n {
            return Err(TdError::InvalidInput("parent relation is not a tree".into()));
        }
        Ok(td)
    }

    /// Single bag holding every vertex.
    pub fn single_bag(num_vertices: usize) -> Self {
        Self::new(num_vertices, vec![(0..num_vertices).collect()], vec![None]).expect("single bag")
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn bag(&self, t: usize) -> &[usize] {
        &self.bags[t]
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn children(&self, t: usize) -> &[usize] {
        &self.children[t]
    }

    pub fn contains(&self, t: usize, v: usize) -> bool {
        self.bags[t].binary_search(&v).is_ok()
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Max bag size minus one (0 for all-empty decompositions).
    pub fn width(&self) -> usize {
        self.max_bag_size().saturating_sub(1)
    }

    /// Nodes with every child before its parent; children visited in order.
    pub fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.bags.len());
        let mut stack = vec![(self.root, 0usize)];
        let mut seen = vec![false; self.bags.len()];
        seen[self.root] = true;
        while let Some((t, i)) = stack.pop() {
            if i < self.children[t].len() {
                stack.push((t, i + 1));
                let c = self.children[t][i];
                if !seen[c] {
                    seen[c] = true;
                    stack.push((c, 0));
                }
            } else {
                out.push(t);
            }
        }
        out
    }

    /// Union of the bags in the subtree rooted at `t`.
    pub fn vertices_below(&self, t: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![t];
        while let Some(s) = stack.pop() {
            out.extend(self.bags[s].iter().copied());
            stack.extend(self.children[s].iter().copied());
        }
        out
    }

    /// `vertices_below` for every node at once.
    pub fn all_vertices_below(&self) -> Vec<BTreeSet<usize>> {
        let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.bags.len()];
        for t in self.post_order() {
            let mut s: BTreeSet<usize> = self.bags[t].iter().copied().collect();
            for &c in &self.children[t] {
                s.extend(below[c].iter().copied());
            }
            below[t] = s;
        }
        below
    }

    /// Rank of every node in reverse post-order (parents before children).
    pub fn root_first_ranks(&self) -> Vec<usize> {
        let post = self.post_order();
        let mut rank = vec![0; post.len()];
        for (i, &t) in post.iter().enumerate() {
            rank[t] = post.len() - 1 - i;
        }
        rank
    }

    pub fn depth(&self, t: usize) -> usize {
        let mut d = 0;
        let mut s = t;
        while let Some(p) = self.parent[s] {
            d += 1;
            s = p;
        }
        d
    }

    /// Same tree rooted at another node.
    pub fn reroot(&self, new_root: usize) -> Self {
        let n = self.bags.len();
        let mut adj = vec![Vec::new(); n];
        for t in 0..n {
            if let Some(p) = self.parent[t] {
                adj[t].push(p);
                adj[p].push(t);
            }
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![new_root];
        seen[new_root] = true;
        while let Some(t) = stack.pop() {
            for &u in &adj[t] {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(t);
                    stack.push(u);
                }
            }
        }
        Self::new(self.num_vertices, self.bags.clone(), parent).expect("reroot keeps a tree")
    }
}

// ---------------------------------------------------------------- validation

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TdReport {
    pub missing_vertices: Vec<usize>,
    pub uncovered_edges: Vec<(usize, usize)>,
    pub disconnected_vertices: Vec<usize>,
    pub vertex_count_mismatch: bool,
}

impl TdReport {
    pub fn is_valid(&self) -> bool {
        self.missing_vertices.is_empty()
            && self.uncovered_edges.is_empty()
            && self.disconnected_vertices.is_empty()
            && !self.vertex_count_mismatch
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        if self.vertex_count_mismatch {
            s.push_str("vertex count differs from graph; ");
        }
        if let Some(v) = self.missing_vertices.first() {
            let _ = write!(s, "vertex {v} in no bag; ");
        }
        if let Some((u, v)) = self.uncovered_edges.first() {
            let _ = write!(s, "edge {{{u},{v}}} not covered; ");
        }
        if let Some(v) = self.disconnected_vertices.first() {
            let _ = write!(s, "bags of vertex {v} are disconnected; ");
        }
        if s.is_empty() {
            s.push_str("valid");
        }
        s.trim_end_matches("; ").to_string()
    }
}

pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> TdReport {
    let n = g.num_vertices();
    let mut report = TdReport { vertex_count_mismatch: n != td.num_vertices, ..Default::default() };
    let mut occurrences = vec![0usize; n];
    let mut tops = vec![0usize; n];
    for t in 0..td.num_nodes() {
        for &v in td.bag(t) {
            if v >= n {
                continue;
            }
            occurrences[v] += 1;
            if td.parent(t).is_none_or(|p| !td.contains(p, v)) {
                tops[v] += 1;
            }
        }
    }
    for v in 0..n {
        if occurrences[v] == 0 {
            report.missing_vertices.push(v);
        } else if tops[v] != 1 {
            report.disconnected_vertices.push(v);
        }
    }
    let mut covered: HashSet<(usize, usize)> = HashSet::new();
    for b in td.bags() {
        for (i, &u) in b.iter().enumerate() {
            for &v in &b[i + 1..] {
                covered.insert((u, v));
            }
        }
    }
    report.uncovered_edges = g.edges().filter(|e| !covered.contains(e)).collect();
    report
}

// ---------------------------------------------------------------- heuristics

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Heuristic {
    MinFill,
    MinDegree,
}

impl std::str::FromStr for Heuristic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "min-fill" => Ok(Heuristic::MinFill),
            "min-degree" => Ok(Heuristic::MinDegree),
            _ => Err(format!("unknown heuristic '{s}'")),
        }
    }
}

/// Tie-break ranks: identity for seed 0, a seeded permutation otherwise.
fn tie_ranks(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if seed != 0 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut rank = vec![0; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    rank
}

fn fill_in(adj: &[HashSet<usize>], v: usize) -> usize {
    let ns: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in ns.iter().enumerate() {
        for &b in &ns[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy elimination ordering. Ties are broken by a seed-derived vertex
/// ranking (seed 0 means lowest vertex id first).
pub fn elimination_order(g: &Graph, method: Heuristic, seed: u64) -> Vec<usize> {
    let n = g.num_vertices();
    let rank = tie_ranks(n, seed);
    let mut adj: Vec<HashSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let score = |adj: &[HashSet<usize>], v: usize| match method {
        Heuristic::MinDegree => adj[v].len(),
        Heuristic::MinFill => fill_in(adj, v),
    };
    let mut current: Vec<usize> = (0..n).map(|v| score(&adj, v)).collect();
    let mut queue: BTreeSet<(usize, usize, usize)> = (0..n).map(|v| (current[v], rank[v], v)).collect();
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some((_, _, v)) = queue.pop_first() {
        eliminated[v] = true;
        order.push(v);
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            adj[a].remove(&v);
            for &b in &ns[i + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                }
            }
        }
        let mut affected: BTreeSet<usize> = ns.iter().copied().collect();
        if method == Heuristic::MinFill {
            for &a in &ns {
                affected.extend(adj[a].iter().copied());
            }
        }
        for u in affected {
            if eliminated[u] {
                continue;
            }
            let s = score(&adj, u);
            if s != current[u] {
                queue.remove(&(current[u], rank[u], u));
                current[u] = s;
                queue.insert((s, rank[u], u));
            }
        }
    }
    order
}

/// TD induced by an elimination ordering: one bag `{v} ∪ N(v)` per vertex.
pub fn td_from_elimination(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.num_vertices();
    if n == 0 {
        return TreeDecomposition::single_bag(0);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).clone()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] > i).collect();
        for (j, &a) in later.iter().enumerate() {
            for &b in &later[j + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let mut bag = later.clone();
        bag.push(v);
        bags.push(bag);
        parent[i] = later.iter().map(|&u| pos[u]).min();
    }
    // join components under the last bag
    let last = n - 1;
    for (i, p) in parent.iter_mut().enumerate() {
        if p.is_none() && i != last {
            *p = Some(last);
        }
    }
    TreeDecomposition::new(n, bags, parent).expect("elimination yields a tree")
}

pub fn decompose_heuristic(g: &Graph, method: Heuristic, seed: u64) -> TreeDecomposition {
    td_from_elimination(g, &elimination_order(g, method, seed))
}

// ---------------------------------------------------------------- nice form

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTd {
    td: TreeDecomposition,
    kinds: Vec<NodeKind>,
    source: Vec<Option<usize>>,
}

impl Deref for NiceTd {
    type Target = TreeDecomposition;
    fn deref(&self) -> &TreeDecomposition {
        &self.td
    }
}

impl NiceTd {
    pub fn kind(&self, t: usize) -> NodeKind {
        self.kinds[t]
    }

    pub fn kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    /// Original node whose chain produced `t` (None for the final forget chain).
    pub fn source(&self, t: usize) -> Option<usize> {
        self.source[t]
    }

    pub fn td(&self) -> &TreeDecomposition {
        &self.td
    }

    pub fn into_td(self) -> TreeDecomposition {
        self.td
    }

    /// Wraps a TD that already has nice shape; fails otherwise.
    pub fn from_td(td: TreeDecomposition) -> Result<Self, TdError> {
        let mut kinds = Vec::with_capacity(td.num_nodes());
        for t in 0..td.num_nodes() {
            kinds.push(infer_kind(&td, t).ok_or_else(|| TdError::InvalidInput(format!("node {t} is not nice")))?);
        }
        if !td.bag(td.root()).is_empty() {
            return Err(TdError::InvalidInput("root bag not empty".into()));
        }
        let source = vec![None; td.num_nodes()];
        Ok(NiceTd { td, kinds, source })
    }

    /// Checks every node-kind constraint.
    pub fn audit(&self) -> Result<(), String> {
        for t in 0..self.num_nodes() {
            if infer_kind(&self.td, t) != Some(self.kinds[t]) {
                return Err(format!("node {t} does not match kind {:?}", self.kinds[t]));
            }
        }
        if !self.bag(self.root()).is_empty() {
            return Err("root bag not empty".into());
        }
        Ok(())
    }
}

fn infer_kind(td: &TreeDecomposition, t: usize) -> Option<NodeKind> {
    let bag = td.bag(t);
    match td.children(t) {
        [] => bag.is_empty().then_some(NodeKind::Leaf),
        [c] => {
            let cb = td.bag(*c);
            if bag.len() == cb.len() + 1 {
                let v = *bag.iter().find(|v| cb.binary_search(v).is_err())?;
                cb.iter().all(|x| bag.binary_search(x).is_ok()).then_some(NodeKind::Introduce(v))
            } else if cb.len() == bag.len() + 1 {
                let v = *cb.iter().find(|v| bag.binary_search(v).is_err())?;
                bag.iter().all(|x| cb.binary_search(x).is_ok()).then_some(NodeKind::Forget(v))
            } else {
                None
            }
        }
        [a, b] => (td.bag(*a) == bag && td.bag(*b) == bag).then_some(NodeKind::Join),
        _ => None,
    }
}

struct NiceBuilder {
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    kinds: Vec<NodeKind>,
    source: Vec<Option<usize>>,
}

impl NiceBuilder {
    fn add(&mut self, bag: Vec<usize>, kind: NodeKind, children: &[usize], source: Option<usize>) -> usize {
        let id = self.bags.len();
        self.bags.push(bag);
        self.parent.push(None);
        self.kinds.push(kind);
        self.source.push(source);
        for &c in children {
            self.parent[c] = Some(id);
        }
        id
    }

    fn introduce(&mut self, mut cur: usize, vs: &[usize], source: Option<usize>) -> usize {
        for &v in vs {
            let mut bag = self.bags[cur].clone();
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            cur = self.add(bag, NodeKind::Introduce(v), &[cur], source);
        }
        cur
    }

    fn forget(&mut self, mut cur: usize, vs: &[usize], source: Option<usize>) -> usize {
        for &v in vs.iter().rev() {
            let bag: Vec<usize> = self.bags[cur].iter().copied().filter(|&x| x != v).collect();
            cur = self.add(bag, NodeKind::Forget(v), &[cur], source);
        }
        cur
    }
}

/// Nicification with default (ascending) introduce order.
pub fn make_nice(td: &TreeDecomposition) -> NiceTd {
    make_nice_by(td, |_, _, _| {})
}

/// Nicification. Between every node and its child a chain of forgets
/// (descending vertex order) then introduces is inserted; `order` may permute
/// the introduce list, given `(child or None for a leaf chain, node, list)`.
/// Several children are combined by binary joins; an empty leaf starts each
/// branch and a forget chain above the old root empties the root bag.
pub fn make_nice_by<F>(td: &TreeDecomposition, mut order: F) -> NiceTd
where
    F: FnMut(Option<usize>, usize, &mut Vec<usize>),
{
    let mut b = NiceBuilder { bags: Vec::new(), parent: Vec::new(), kinds: Vec::new(), source: Vec::new() };
    let mut top = vec![usize::MAX; td.num_nodes()];
    for x in td.post_order() {
        let bag = td.bag(x);
        let kids = td.children(x);
        let result = if kids.is_empty() {
            let leaf = b.add(Vec::new(), NodeKind::Leaf, &[], Some(x));
            let mut intro = bag.to_vec();
            order(None, x, &mut intro);
            b.introduce(leaf, &intro, Some(x))
        } else {
            let mut ends = Vec::with_capacity(kids.len());
            for &c in kids {
                let cb = td.bag(c);
                let forget: Vec<usize> = cb.iter().copied().filter(|v| bag.binary_search(v).is_err()).collect();
                let mut intro: Vec<usize> = bag.iter().copied().filter(|v| cb.binary_search(v).is_err()).collect();
                order(Some(c), x, &mut intro);
                let cur = b.forget(top[c], &forget, Some(x));
                ends.push(b.introduce(cur, &intro, Some(x)));
            }
            let mut acc = ends[0];
            for &e in &ends[1..] {
                acc = b.add(bag.to_vec(), NodeKind::Join, &[acc, e], Some(x));
            }
            acc
        };
        top[x] = result;
    }
    let root_bag = td.bag(td.root()).to_vec();
    b.forget(top[td.root()], &root_bag, None);
    let nice_td = TreeDecomposition::new(td.num_vertices(), b.bags, b.parent).expect("nice tree");
    NiceTd { td: nice_td, kinds: b.kinds, source: b.source }
}

// ---------------------------------------------------------------- rules

/// Indices of rules whose atoms all lie in the bag of `t`.
pub fn bag_program(p: &Program, td: &TreeDecomposition, t: usize) -> Vec<usize> {
    p.rules()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.atoms().iter().all(|a| td.contains(t, a.index())))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleAssignment {
    node_of: Vec<usize>,
    rules_at: Vec<Vec<usize>>,
}

impl RuleAssignment {
    pub fn from_nodes(node_of: Vec<usize>, num_nodes: usize) -> Self {
        let mut rules_at = vec![Vec::new(); num_nodes];
        for (r, &t) in node_of.iter().enumerate() {
            rules_at[t].push(r);
        }
        RuleAssignment { node_of, rules_at }
    }

    pub fn node_of(&self, rule: usize) -> usize {
        self.node_of[rule]
    }

    /// Rules assigned to `t`, ascending.
    pub fn rules_at(&self, t: usize) -> &[usize] {
        &self.rules_at[t]
    }

    pub fn num_rules(&self) -> usize {
        self.node_of.len()
    }
}

/// Assigns each rule to the topmost node of the (connected) region of bags
/// covering it.
pub fn assign_rules(p: &Program, td: &TreeDecomposition) -> Result<RuleAssignment, TdError> {
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); td.num_vertices()];
    for t in 0..td.num_nodes() {
        for &v in td.bag(t) {
            occ[v].push(t);
        }
    }
    let covers = |t: usize, at: &[usize]| at.iter().all(|&v| td.contains(t, v));
    let mut node_of = Vec::with_capacity(p.rules().len());
    for (i, r) in p.rules().iter().enumerate() {
        let at: Vec<usize> = r.atoms().iter().map(|a| a.index()).collect();
        let start = match at.first() {
            None => td.root(),
            Some(&v) => *occ
                .get(v)
                .and_then(|ts| ts.iter().find(|&&t| covers(t, &at)))
                .ok_or(TdError::UncoveredRule(i))?,
        };
        let mut t = start;
        while let Some(par) = td.parent(t).filter(|&par| covers(par, &at)) {
            t = par;
        }
        node_of.push(t);
    }
    Ok(RuleAssignment::from_nodes(node_of, td.num_nodes()))
}

// ---------------------------------------------------------------- PACE I/O

/// Writes canonical PACE `.td` text: bags in node order, sorted vertices,
/// tree edges `parent child` in child order. Ids are 1-based.
pub fn write_pace(td: &TreeDecomposition) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "s td {} {} {}", td.num_nodes(), td.max_bag_size(), td.num_vertices());
    for (t, bag) in td.bags().iter().enumerate() {
        let _ = write!(s, "b {}", t + 1);
        for v in bag {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    for t in 0..td.num_nodes() {
        if let Some(p) = td.parent(t) {
            let _ = writeln!(s, "{} {}", p + 1, t + 1);
        }
    }
    s
}

/// Reads PACE `.td` text, rooted at 1-based bag `root` (default 1).
pub fn read_pace(text: &str, root: Option<usize>) -> Result<TreeDecomposition, TdError> {
    let perr = |line: usize, message: &str| TdError::Parse { line, message: message.to_string() };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| perr(ln, &format!("bad number '{s}'")));
        match fields[0] {
            "s" => {
                if header.is_some() || fields.len() != 5 || fields[1] != "td" {
                    return Err(perr(ln, "malformed solution line"));
                }
                let h = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
                bags = vec![None; h.0];
                header = Some(h);
            }
            "b" => {
                let (_, _, nv) = header.ok_or_else(|| perr(ln, "bag before header"))?;
                let id = num(fields.get(1).ok_or_else(|| perr(ln, "missing bag id"))?)?;
                if id == 0 || id > bags.len() || bags[id - 1].is_some() {
                    return Err(perr(ln, "bad or repeated bag id"));
                }
                let mut bag = Vec::new();
                for f in &fields[2..] {
                    let v = num(f)?;
                    if v == 0 || v > nv {
                        return Err(perr(ln, "vertex out of range"));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            }
            _ => {
                if header.is_none() || fields.len() != 2 {
                    return Err(perr(ln, "malformed edge line"));
                }
                let (u, v) = (num(fields[0])?, num(fields[1])?);
                if u == 0 || v == 0 || u > bags.len() || v > bags.len() {
                    return Err(perr(ln, "edge refers to unknown bag"));
                }
                edges.push((u - 1, v - 1));
            }
        }
    }
    let (nb, max_bag, nv) = header.ok_or_else(|| perr(0, "missing 's td' header"))?;
    if nb == 0 {
        return Err(perr(0, "decomposition has no bags"));
    }
    let bags: Vec<Vec<usize>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| perr(0, &format!("bag {} missing", i + 1))))
        .collect::<Result<_, _>>()?;
    if edges.len() + 1 != nb {
        return Err(perr(0, "tree must have #bags - 1 edges"));
    }
    let root = root.unwrap_or(1);
    if root == 0 || root > nb {
        return Err(perr(0, "root out of range"));
    }
    let mut adj = vec![Vec::new(); nb];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parent = vec![None; nb];
    let mut seen = vec![false; nb];
    let mut stack = vec![root - 1];
    seen[root - 1] = true;
    while let Some(t) = stack.pop() {
        for &u in &adj[t] {
            if !seen[u] {
                seen[u] = true;
                parent[u] = Some(t);
                stack.push(u);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(perr(0, "tree edges do not connect all bags"));
    }
    let td = TreeDecomposition::new(nv, bags, parent).map_err(|e| perr(0, &e.to_string()))?;
    if td.max_bag_size() != max_bag {
        return Err(perr(0, "declared bag size does not match bags"));
    }
    Ok(td)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::{parse_program, primal_graph};

    const EXAMPLE: &str = "a | b.\nc | e :- d.\nd :- b, not e.\ne :- b, not d.\nb :- e, not d.\nd :- not b.\n";

    /// Bags t1={c,d,e}, t2={a,b}, t3={b,d,e}; t3 is the root.
    fn example_td(p: &Program) -> TreeDecomposition {
        let v = |n: &str| p.lookup(n).unwrap().index();
        TreeDecomposition::new(
            5,
            vec![vec![v("c"), v("d"), v("e")], vec![v("a"), v("b")], vec![v("b"), v("d"), v("e")]],
            vec![Some(2), Some(2), None],
        )
        .unwrap()
    }

    #[test]
    fn example_td_is_valid() {
        let p = parse_program(EXAMPLE).unwrap();
        let td = example_td(&p);
        assert!(validate_td(&primal_graph(&p), &td).is_valid());
        assert_eq!(td.width(), 2);
    }

    #[test]
    fn detects_uncovered_edge_and_disconnection() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1);
        g.add_edge(1, 2);
        let td = TreeDecomposition::new(3, vec![vec![0], vec![1, 2]], vec![None, Some(0)]).unwrap();
        let r = validate_td(&g, &td);
        assert_eq!(r.uncovered_edges, vec![(0, 1)]);
        let td2 = TreeDecomposition::new(3, vec![vec![0, 1], vec![2], vec![1, 2]], vec![None, Some(0), Some(1)]).unwrap();
        assert_eq!(validate_td(&g, &td2).disconnected_vertices, vec![1]);
        let td3 = TreeDecomposition::new(3, vec![vec![0, 1]], vec![None]).unwrap();
        assert_eq!(validate_td(&g, &td3).missing_vertices, vec![2]);
    }

    #[test]
    fn heuristic_widths() {
        let mut k3 = Graph::new(3);
        k3.add_clique(&[0, 1, 2]);
        for m in [Heuristic::MinFill, Heuristic::MinDegree] {
            assert_eq!(decompose_heuristic(&k3, m, 0).width(), 2);
            assert_eq!(decompose_heuristic(&Graph::new(1), m, 3).width(), 0);
        }
        let p = parse_program(EXAMPLE).unwrap();
        let g = primal_graph(&p);
        for seed in 0..10 {
            let td = decompose_heuristic(&g, Heuristic::MinFill, seed);
            assert!(validate_td(&g, &td).is_valid());
            assert_eq!(td.width(), 2);
        }
    }

    #[test]
    fn heuristic_is_deterministic() {
        let p = parse_program(EXAMPLE).unwrap();
        let g = primal_graph(&p);
        assert_eq!(decompose_heuristic(&g, Heuristic::MinFill, 7), decompose_heuristic(&g, Heuristic::MinFill, 7));
    }

    #[test]
    fn one_bag_nicification() {
        let td = TreeDecomposition::single_bag(2);
        let nice = make_nice(&td);
        nice.audit().unwrap();
        let mut kinds = Vec::new();
        let mut t = nice.root();
        loop {
            kinds.push(nice.kind(t));
            match nice.children(t) {
                [c] => t = *c,
                _ => break,
            }
        }
        kinds.reverse();
        use NodeKind::*;
        assert_eq!(kinds, vec![Leaf, Introduce(0), Introduce(1), Forget(1), Forget(0)]);
    }

    #[test]
    fn nicification_of_example_and_idempotence() {
        let p = parse_program(EXAMPLE).unwrap();
        let g = primal_graph(&p);
        let nice = make_nice(&example_td(&p));
        nice.audit().unwrap();
        assert_eq!(nice.width(), 2);
        assert!(validate_td(&g, &nice).is_valid());
        let again = make_nice(&nice);
        assert_eq!(again.num_nodes(), nice.num_nodes());
        let sorted = |n: &NiceTd| {
            let mut k: Vec<String> = n.kinds().iter().map(|k| format!("{k:?}")).collect();
            k.sort();
            k
        };
        assert_eq!(sorted(&again), sorted(&nice));
    }

    #[test]
    fn bag_programs_and_assignment() {
        let p = parse_program(EXAMPLE).unwrap();
        let td = example_td(&p);
        assert_eq!(bag_program(&p, &td, 2), vec![2, 3, 4, 5]);
        assert_eq!(bag_program(&p, &td, 1), vec![0]);
        assert_eq!(bag_program(&p, &td, 0), vec![1]);
        let a = assign_rules(&p, &td).unwrap();
        assert_eq!((0..6).map(|r| a.node_of(r)).collect::<Vec<_>>(), vec![1, 0, 2, 2, 2, 2]);
        let nice = make_nice(&td);
        let a = assign_rules(&p, &nice).unwrap();
        for r in 0..6 {
            let t = a.node_of(r);
            assert!(bag_program(&p, &nice, t).contains(&r));
            if let Some(par) = nice.parent(t) {
                assert!(!bag_program(&p, &nice, par).contains(&r));
            }
        }
    }

    #[test]
    fn uncovered_rule_reported() {
        let p = parse_program("a :- b.").unwrap();
        let td = TreeDecomposition::new(2, vec![vec![0], vec![1]], vec![None, Some(0)]).unwrap();
        assert_eq!(assign_rules(&p, &td), Err(TdError::UncoveredRule(0)));
    }

    #[test]
    fn pace_round_trip() {
        let p = parse_program(EXAMPLE).unwrap();
        let td = example_td(&p).reroot(0);
        let text = write_pace(&td);
        let back = read_pace(&format!("c comment\n{text}"), Some(1)).unwrap();
        assert_eq!(back, td);
        assert_eq!(write_pace(&back), text);
        assert!(read_pace("s td 2 1 1\nb 1 1\nb 2 1\n", None).is_err());
        assert!(matches!(read_pace("s td 1 1 1\nb 1 9\n", None), Err(TdError::Parse { line: 2, .. })));
    }
}
