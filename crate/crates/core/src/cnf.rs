//! CNF construction: keyed variable registry, Tseitin gates, precedence over
//! order bits, DIMACS output, witness decompositions and width certification.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::ops::Not;

use serde::Serialize;
use thiserror::Error;

use crate::asp::{Atom, Program};
use crate::graph::Graph;
use crate::td::{validate_td, TreeDecomposition};

/// DIMACS literal: positive or negative variable id (ids start at 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        Lit(var as i32)
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_neg(self) -> bool {
        self.0 < 0
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }

    pub fn from_dimacs(x: i32) -> Lit {
        assert!(x != 0);
        Lit(x)
    }

    /// Value under an assignment indexed by `var - 1`.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var() as usize - 1] != self.is_neg()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

/// Semantic key of a CNF variable. Nodes index the guiding decomposition,
/// rules index the program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKey {
    Atom(Atom),
    Bit { node: usize, atom: Atom, bit: usize },
    GlobalBit { atom: Atom, bit: usize },
    ProvenBelow { node: usize, atom: Atom },
    ProvenAt { node: usize, atom: Atom },
    ProvenByRule { node: usize, atom: Atom, rule: usize },
    Prec { node: usize, x: Atom, y: Atom },
    PrecProvenAt { node: usize, x: Atom, y: Atom },
    PrecProvenBelow { node: usize, x: Atom, y: Atom },
    Gate(u32),
}

impl VarKey {
    /// Text form used in `c v` lines; nodes and rules are printed 1-based.
    pub fn text(&self, names: &[String]) -> String {
        let n = |a: &Atom| names[a.index()].as_str();
        match self {
            VarKey::Atom(a) => format!("atom({})", n(a)),
            VarKey::Bit { node, atom, bit } => format!("bit({},{},{})", node + 1, n(atom), bit),
            VarKey::GlobalBit { atom, bit } => format!("gbit({},{})", n(atom), bit),
            VarKey::ProvenBelow { node, atom } => format!("pBelow({},{})", node + 1, n(atom)),
            VarKey::ProvenAt { node, atom } => format!("pAt({},{})", node + 1, n(atom)),
            VarKey::ProvenByRule { node, atom, rule } => format!("pRule({},{},{})", node + 1, n(atom), rule + 1),
            VarKey::Prec { node, x, y } => format!("prec({},{},{})", node + 1, n(x), n(y)),
            VarKey::PrecProvenAt { node, x, y } => format!("pPrecAt({},{},{})", node + 1, n(x), n(y)),
            VarKey::PrecProvenBelow { node, x, y } => format!("pPrecBelow({},{},{})", node + 1, n(x), n(y)),
            VarKey::Gate(s) => format!("aux({s})"),
        }
    }

    /// Guiding node the key belongs to, if any.
    pub fn node(&self) -> Option<usize> {
        match *self {
            VarKey::Bit { node, .. }
            | VarKey::ProvenBelow { node, .. }
            | VarKey::ProvenAt { node, .. }
            | VarKey::ProvenByRule { node, .. }
            | VarKey::Prec { node, .. }
            | VarKey::PrecProvenAt { node, .. }
            | VarKey::PrecProvenBelow { node, .. } => Some(node),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    And,
    Or,
    Equiv,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("atom {atom} is not in the bag of node {node}")]
    AtomNotInBag { node: usize, atom: String },
    #[error("certification failed: {0}")]
    CertificationFailed(String),
}

#[derive(Clone, Debug, Default)]
pub struct CnfFormula {
    names: Vec<String>,
    keys: Vec<VarKey>,
    ids: HashMap<VarKey, u32>,
    clauses: Vec<Vec<Lit>>,
    clause_home: Vec<Option<usize>>,
    home: Option<usize>,
    next_gate: u32,
    const_false: Option<Lit>,
    projection: Vec<u32>,
    node_rank: Vec<usize>,
    /// Variable each clause is a definition of, if any.
    clause_defines: Vec<Option<u32>>,
    defining: Option<u32>,
    defined: Vec<bool>,
}

impl CnfFormula {
    /// Empty formula over the atom table of `p` (used for key text).
    pub fn new(p: &Program) -> Self {
        CnfFormula { names: p.atoms().map(|a| p.name(a).to_string()).collect(), ..Default::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.keys.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn key(&self, var: u32) -> VarKey {
        self.keys[var as usize - 1]
    }

    pub fn keys(&self) -> &[VarKey] {
        &self.keys
    }

    pub fn atom_names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, key: &VarKey) -> Option<Lit> {
        self.ids.get(key).map(|&v| Lit::pos(v))
    }

    /// Atom variables, ascending.
    pub fn projection(&self) -> &[u32] {
        &self.projection
    }

    /// Guiding node credited with subsequently added clauses.
    pub fn set_home(&mut self, node: Option<usize>) {
        self.home = node;
    }

    pub fn clause_home(&self, i: usize) -> Option<usize> {
        self.clause_home[i]
    }

    /// Records a root-first rank for each guiding node; model counting
    /// branches on variables of low-rank nodes first.
    pub fn set_node_ranks(&mut self, ranks: Vec<usize>) {
        self.node_rank = ranks;
    }

    /// Rank of the node a clause was emitted at (0 if unknown).
    pub fn clause_rank(&self, i: usize) -> usize {
        self.clause_home[i].and_then(|t| self.node_rank.get(t).copied()).unwrap_or(0)
    }

    /// Rank of a node (0 if unknown).
    pub fn node_rank(&self, t: usize) -> usize {
        self.node_rank.get(t).copied().unwrap_or(0)
    }

    /// Variable for `key`, registered on first use.
    pub fn var(&mut self, key: VarKey) -> Lit {
        if let Some(&v) = self.ids.get(&key) {
            return Lit::pos(v);
        }
        self.keys.push(key);
        self.defined.push(false);
        let v = self.keys.len() as u32;
        self.ids.insert(key, v);
        if let VarKey::Atom(_) = key {
            let at = self.projection.binary_search(&v).unwrap_err();
            self.projection.insert(at, v);
        }
        Lit::pos(v)
    }

    pub fn atom(&mut self, a: Atom) -> Lit {
        self.var(VarKey::Atom(a))
    }

    fn fresh_gate(&mut self) -> Lit {
        let s = self.next_gate;
        self.next_gate += 1;
        self.var(VarKey::Gate(s))
    }

    /// The formula-wide always-false variable.
    pub fn false_lit(&mut self) -> Lit {
        if let Some(l) = self.const_false {
            return l;
        }
        let g = self.fresh_gate();
        self.const_false = Some(g);
        self.defined[g.var() as usize - 1] = true;
        self.clauses.push(vec![!g]);
        self.clause_home.push(self.home);
        self.clause_defines.push(Some(g.var()));
        g
    }

    pub fn true_lit(&mut self) -> Lit {
        !self.false_lit()
    }

    fn constant(&self, l: Lit) -> Option<bool> {
        let f = self.const_false?;
        if l == f {
            Some(false)
        } else if l == !f {
            Some(true)
        } else {
            None
        }
    }

    /// Adds a clause. Constants are folded, duplicates dropped and
    /// tautologies skipped; a clause that folds to empty becomes the unit
    /// clause over the false variable.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        let mut out: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.constant(l) {
                Some(true) => return,
                Some(false) => continue,
                None => {}
            }
            if out.contains(&!l) {
                return;
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        if out.is_empty() {
            out.push(self.false_lit());
        }
        self.clauses.push(out);
        self.clause_home.push(self.home);
        self.clause_defines.push(self.defining);
    }

    /// Runs `emit` with its clauses recorded as the definition of `target`.
    /// A variable defined twice keeps only its first definition; later ones
    /// count as constraints.
    fn defining(&mut self, target: Lit, emit: impl FnOnce(&mut Self)) {
        let v = target.var();
        let first = !std::mem::replace(&mut self.defined[v as usize - 1], true);
        let saved = self.defining;
        self.defining = first.then_some(v);
        emit(self);
        self.defining = saved;
    }

    /// Whether the variable is fixed by a definition over other variables.
    pub fn is_defined(&self, var: u32) -> bool {
        self.defined[var as usize - 1]
    }

    /// Variable clause `i` defines, or `None` for a constraint clause.
    pub fn clause_defines(&self, i: usize) -> Option<u32> {
        self.clause_defines[i]
    }

    /// True iff the definitions never depend on themselves, so every
    /// defined variable is a function of the undefined ones.
    pub fn definitions_acyclic(&self) -> bool {
        let n = self.num_vars();
        let mut deps: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (c, d) in self.clauses.iter().zip(&self.clause_defines) {
            if let Some(v) = *d {
                deps[v as usize - 1].extend(c.iter().map(|l| l.var()).filter(|&w| w != v));
            }
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; n];
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                if let Some(&w) = deps[v].get(*k) {
                    *k += 1;
                    let w = w as usize - 1;
                    match state[w] {
                        0 => {
                            state[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    stack.pop();
                }
            }
        }
        true
    }

    /// Simplified gate inputs, or the constant the gate folds to.
    fn fold(&mut self, kind: GateKind, inputs: &[Lit]) -> Result<Vec<Lit>, Lit> {
        let absorbing = kind == GateKind::Or;
        let mut out: Vec<Lit> = Vec::with_capacity(inputs.len());
        for &l in inputs {
            match self.constant(l) {
                Some(c) if c == absorbing => return Err(l),
                Some(_) => continue,
                None => {}
            }
            if out.contains(&!l) {
                return Err(if absorbing { self.true_lit() } else { self.false_lit() });
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        match out.len() {
            0 => Err(if absorbing { self.false_lit() } else { self.true_lit() }),
            1 => Err(out[0]),
            _ => Ok(out),
        }
    }

    /// Fresh gate literal `g ↔ kind(inputs)` with full biconditional clauses.
    /// Single-input And/Or return the input; constants fold.
    pub fn define_gate(&mut self, kind: GateKind, inputs: &[Lit]) -> Lit {
        if kind == GateKind::Equiv {
            assert_eq!(inputs.len(), 2, "Equiv takes two inputs");
            let (a, b) = (inputs[0], inputs[1]);
            if a == b {
                return self.true_lit();
            }
            if a == !b {
                return self.false_lit();
            }
            match (self.constant(a), self.constant(b)) {
                (Some(x), _) => return if x { b } else { !b },
                (_, Some(y)) => return if y { a } else { !a },
                _ => {}
            }
            let g = self.fresh_gate();
            self.defining(g, |f| f.define_equiv_into(g, a, b));
            return g;
        }
        match self.fold(kind, inputs) {
            Err(l) => l,
            Ok(ins) => {
                let g = self.fresh_gate();
                self.defining(g, |f| f.define_into(g, kind, &ins));
                g
            }
        }
    }

    pub fn and(&mut self, inputs: &[Lit]) -> Lit {
        self.define_gate(GateKind::And, inputs)
    }

    pub fn or(&mut self, inputs: &[Lit]) -> Lit {
        self.define_gate(GateKind::Or, inputs)
    }

    fn define_equiv_into(&mut self, g: Lit, a: Lit, b: Lit) {
        self.add_clause(&[!g, !a, b]);
        self.add_clause(&[!g, a, !b]);
        self.add_clause(&[g, a, b]);
        self.add_clause(&[g, !a, !b]);
    }

    fn define_into(&mut self, target: Lit, kind: GateKind, inputs: &[Lit]) {
        match kind {
            GateKind::And => {
                for &x in inputs {
                    self.add_clause(&[!target, x]);
                }
                let mut big: Vec<Lit> = inputs.iter().map(|&x| !x).collect();
                big.push(target);
                self.add_clause(&big);
            }
            GateKind::Or => {
                for &x in inputs {
                    self.add_clause(&[target, !x]);
                }
                let mut big = inputs.to_vec();
                big.push(!target);
                self.add_clause(&big);
            }
            GateKind::Equiv => self.define_equiv_into(target, inputs[0], inputs[1]),
        }
    }

    /// Asserts `target ↔ kind(inputs)` for an existing variable.
    pub fn define(&mut self, target: Lit, kind: GateKind, inputs: &[Lit]) {
        if kind == GateKind::Equiv {
            self.defining(target, |f| f.define_equiv_into(target, inputs[0], inputs[1]));
            return;
        }
        match self.fold(kind, inputs) {
            Err(l) => self.defining(target, |f| f.assert_equiv(target, l)),
            Ok(ins) => self.defining(target, |f| f.define_into(target, kind, &ins)),
        }
    }

    /// Asserts `a ↔ b` with two binary clauses.
    pub fn assert_equiv(&mut self, a: Lit, b: Lit) {
        self.add_clause(&[!a, b]);
        self.add_clause(&[a, !b]);
    }

    /// Asserts `target ↔ ⋁ inputs`, splitting long disjunctions into a chain
    /// of binary partial-OR gates.
    pub fn define_or_chain(&mut self, target: Lit, inputs: &[Lit]) {
        if inputs.len() <= 2 {
            self.define(target, GateKind::Or, inputs);
            return;
        }
        let mut acc = self.or(&inputs[..2]);
        for &x in &inputs[2..inputs.len() - 1] {
            acc = self.or(&[acc, x]);
        }
        self.define(target, GateKind::Or, &[acc, inputs[inputs.len() - 1]]);
    }

    /// True iff every clause holds; `assignment[v-1]` is the value of v.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    /// Primal graph over variables (vertex `v-1` for variable `v`).
    pub fn primal_graph(&self) -> Graph {
        let mut g = Graph::new(self.num_vars());
        for c in &self.clauses {
            let vs: Vec<usize> = c.iter().map(|l| l.var() as usize - 1).collect();
            g.add_clique(&vs);
        }
        g
    }
}

// ---------------------------------------------------------------- order bits

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrderScope {
    /// Positions local to each bag, `ceil(log2 |bag|)` bits.
    Local,
    /// One position per atom over the whole program.
    Global,
}

/// Number of bits needed for `n` distinct positions (0 for n ≤ 1).
pub fn bits_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Bit-variable layout for precedence encodings.
pub struct OrderBits<'a> {
    td: &'a TreeDecomposition,
    scope: OrderScope,
    global_bits: usize,
}

impl<'a> OrderBits<'a> {
    pub fn new(td: &'a TreeDecomposition, scope: OrderScope, num_atoms: usize) -> Self {
        OrderBits { td, scope, global_bits: bits_for(num_atoms) }
    }

    pub fn scope(&self) -> OrderScope {
        self.scope
    }

    pub fn bits(&self, node: usize) -> usize {
        match self.scope {
            OrderScope::Local => bits_for(self.td.bag(node).len()),
            OrderScope::Global => self.global_bits,
        }
    }

    pub fn bit(&self, f: &mut CnfFormula, node: usize, atom: Atom, bit: usize) -> Lit {
        match self.scope {
            OrderScope::Local => f.var(VarKey::Bit { node, atom, bit }),
            OrderScope::Global => f.var(VarKey::GlobalBit { atom, bit }),
        }
    }

    pub fn bit_vector(&self, f: &mut CnfFormula, node: usize, atom: Atom) -> Vec<Lit> {
        (0..self.bits(node)).map(|i| self.bit(f, node, atom, i)).collect()
    }
}

/// Fresh literal equivalent to `pos(x) < pos(y)` at `node` (bit 0 least
/// significant). Irreflexive pairs and zero-bit positions give constant false.
pub fn encode_prec(f: &mut CnfFormula, ob: &OrderBits, node: usize, x: Atom, y: Atom) -> Result<Lit, CnfError> {
    for a in [x, y] {
        if ob.scope == OrderScope::Local && !ob.td.contains(node, a.index()) {
            return Err(CnfError::AtomNotInBag { node, atom: f.names[a.index()].clone() });
        }
    }
    if x == y {
        return Ok(f.false_lit());
    }
    let bx = ob.bit_vector(f, node, x);
    let by = ob.bit_vector(f, node, y);
    Ok(less_than(f, &bx, &by))
}

/// Unsigned comparison of two equal-length bit vectors (LSB first).
pub fn less_than(f: &mut CnfFormula, bx: &[Lit], by: &[Lit]) -> Lit {
    let n = bx.len();
    let imp: Vec<Lit> = (0..n).map(|j| if j == 0 { bx[0] } else { f.or(&[!bx[j], by[j]]) }).collect();
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        let mut ins = vec![by[i], !bx[i]];
        ins.extend_from_slice(&imp[i + 1..]);
        terms.push(f.and(&ins));
    }
    f.or(&terms)
}

/// Fresh literal true iff the bit vector encodes `value`.
pub fn equals_const(f: &mut CnfFormula, bits: &[Lit], value: usize) -> Lit {
    if value >> bits.len() != 0 {
        return f.false_lit();
    }
    let ins: Vec<Lit> = bits.iter().enumerate().map(|(i, &b)| if value >> i & 1 == 1 { b } else { !b }).collect();
    f.and(&ins)
}

// ---------------------------------------------------------------- DIMACS

/// DIMACS text: `c v` key lines in variable order, header, clauses.
pub fn write_dimacs(f: &CnfFormula) -> String {
    let mut s = String::new();
    for (i, k) in f.keys.iter().enumerate() {
        let _ = writeln!(s, "c v {} {}", i + 1, k.text(&f.names));
    }
    let _ = writeln!(s, "p cnf {} {}", f.num_vars(), f.num_clauses());
    for c in &f.clauses {
        for l in c {
            let _ = write!(s, "{} ", l.dimacs());
        }
        s.push_str("0\n");
    }
    s
}

// ---------------------------------------------------------------- witness

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTd {
    pub td: TreeDecomposition,
    pub c1: usize,
    pub c2: usize,
    /// Number of spine nodes (the first nodes of `td`, one per guiding node).
    pub spine_nodes: usize,
}

pub const C1: usize = 8;
pub const C2: usize = 8;

/// Witness decomposition of `f`'s primal graph guided by `guide`.
///
/// Every clause carries the guiding node it was emitted at. A variable used
/// at one node only is private to it; all others form the spine bag of each
/// node on the subtree spanned by their nodes. Private variables are then
/// eliminated per node (min-degree), each elimination bag hanging below the
/// node's spine bag.
pub fn build_witness(f: &CnfFormula, guide: &TreeDecomposition) -> WitnessTd {
    let nv = f.num_vars();
    let n = guide.num_nodes();
    let root = guide.root();
    let home_of = |i: usize| f.clause_home[i].unwrap_or(root);
    let mut homes: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
    for (i, c) in f.clauses.iter().enumerate() {
        for l in c {
            homes[l.var() as usize - 1].insert(home_of(i));
        }
    }
    let depth: Vec<usize> = (0..n).map(|t| guide.depth(t)).collect();
    let mut spine: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut private: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut orphans = Vec::new();
    for (v, hs) in homes.iter().enumerate() {
        match hs.len() {
            0 => orphans.push(v),
            1 => private[*hs.iter().next().expect("one home")].push(v),
            _ => {
                let mut marked: BTreeSet<usize> = BTreeSet::new();
                // climb the deepest frontier until all paths meet
                let mut frontier: BTreeSet<(usize, usize)> = hs.iter().map(|&t| (depth[t], t)).collect();
                while frontier.len() > 1 {
                    let (d, t) = frontier.pop_last().expect("nonempty");
                    marked.insert(t);
                    let p = guide.parent(t).expect("non-root has parent");
                    frontier.insert((d - 1, p));
                }
                marked.insert(frontier.pop_first().expect("meeting node").1);
                for t in marked {
                    spine[t].push(v);
                }
            }
        }
    }
    let mut bags: Vec<Vec<usize>> = spine;
    let mut parent: Vec<Option<usize>> = (0..n).map(|t| guide.parent(t)).collect();
    let mut clauses_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..f.clauses.len() {
        clauses_at[home_of(i)].push(i);
    }
    let mut is_private = vec![false; nv];
    for t in 0..n {
        if private[t].is_empty() {
            continue;
        }
        for &v in &private[t] {
            is_private[v] = true;
        }
        let mut adj: HashMap<usize, BTreeSet<usize>> = private[t].iter().map(|&v| (v, BTreeSet::new())).collect();
        for &ci in &clauses_at[t] {
            let vs: Vec<usize> = f.clauses[ci].iter().map(|l| l.var() as usize - 1).collect();
            for &a in &vs {
                if is_private[a] {
                    let e = adj.get_mut(&a).expect("private var");
                    e.extend(vs.iter().copied().filter(|&b| b != a));
                }
            }
        }
        let mut queue: BTreeSet<(usize, usize)> = adj.iter().map(|(&v, ns)| (ns.len(), v)).collect();
        let mut bag_of: HashMap<usize, usize> = HashMap::new();
        let mut pending: Vec<(usize, Vec<usize>)> = Vec::new();
        while let Some((_, v)) = queue.pop_first() {
            let ns: Vec<usize> = adj.remove(&v).expect("queued").into_iter().collect();
            for &a in &ns {
                if let Some(na) = adj.get_mut(&a) {
                    let before = na.len();
                    na.remove(&v);
                    na.extend(ns.iter().copied().filter(|&b| b != a));
                    queue.remove(&(before, a));
                    queue.insert((na.len(), a));
                }
            }
            let id = bags.len();
            let mut bag = ns.clone();
            bag.push(v);
            bags.push(bag);
            parent.push(None);
            bag_of.insert(v, id);
            pending.push((id, ns.into_iter().filter(|&u| is_private[u]).collect()));
        }
        for (id, private_ns) in pending {
            // neighbors are eliminated later; the earliest of them is the parent
            let p = private_ns.iter().map(|u| bag_of[u]).min().unwrap_or(t);
            parent[id] = Some(p);
        }
        for &v in &private[t] {
            is_private[v] = false;
        }
    }
    for v in orphans {
        bags.push(vec![v]);
        parent.push(Some(root));
    }
    let td = TreeDecomposition::new(nv, bags, parent).expect("witness is a tree");
    WitnessTd { td, c1: C1, c2: C2, spine_nodes: n }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WidthRegime {
    KLogK,
    KSquared,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub width: usize,
    pub bound: usize,
    pub regime: WidthRegime,
    pub input_width: usize,
}

pub fn width_bound(k: usize, regime: WidthRegime, c1: usize, c2: usize) -> usize {
    match regime {
        WidthRegime::KLogK => c1 * (k + 1) * bits_for(k + 2).max(1) + c2,
        WidthRegime::KSquared => c1 * (k + 1) * (k + 1) + c2,
    }
}

/// Checks the witness against `f`'s primal graph and the width bound for
/// input width `k`.
pub fn certify_width(f: &CnfFormula, w: &WitnessTd, k: usize, regime: WidthRegime) -> Result<Certification, CnfError> {
    let report = validate_td(&f.primal_graph(), &w.td);
    if !report.is_valid() {
        return Err(CnfError::CertificationFailed(format!("witness invalid: {}", report.summary())));
    }
    let bound = width_bound(k, regime, w.c1, w.c2);
    let width = w.td.width();
    if width > bound {
        let bag = (0..w.td.num_nodes()).max_by_key(|&t| w.td.bag(t).len()).unwrap_or(0);
        return Err(CnfError::CertificationFailed(format!(
            "width {width} exceeds bound {bound} (bag {})",
            bag + 1
        )));
    }
    Ok(Certification { width, bound, regime, input_width: k })
}
