//! Pieces shared by the decomposition-guided translations.

use serde::Serialize;
use thiserror::Error;

use crate::asp::{classify, primal_graph, Atom, Program, Rule};
use crate::cnf::{build_witness, CnfError, CnfFormula, Lit, VarKey, WitnessTd};
use crate::td::{validate_td, RuleAssignment, TreeDecomposition};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("program is not head-cycle-free")]
    NotHcf,
    #[error("program is not tight")]
    NotTight,
    #[error("program is not normal")]
    NotNormal,
    #[error("invalid tree decomposition: {0}")]
    InvalidTd(String),
    #[error("strengthening needs local ordering bits")]
    StrengthenNeedsLocalBits,
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// One emitted formula instance in readable form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub formula: &'static str,
    pub node: usize,
    pub text: String,
}

#[derive(Clone, Debug)]
pub struct Translation {
    pub cnf: CnfFormula,
    pub witness: WitnessTd,
    /// Decomposition the translation was guided by.
    pub guide: TreeDecomposition,
    pub instances: Vec<Instance>,
}

impl Translation {
    /// Instances of one formula, in emission order.
    pub fn instances_of(&self, formula: &str) -> Vec<&Instance> {
        self.instances.iter().filter(|i| i.formula == formula).collect()
    }
}

pub(crate) fn check_inputs(p: &Program, td: &TreeDecomposition, assign: &RuleAssignment) -> Result<(), TranslateError> {
    if !classify(p).is_hcf {
        return Err(TranslateError::NotHcf);
    }
    if td.num_vertices() != p.num_atoms() {
        return Err(TranslateError::InvalidTd(format!(
            "decomposition has {} vertices, program has {} atoms",
            td.num_vertices(),
            p.num_atoms()
        )));
    }
    let report = validate_td(&primal_graph(p), td);
    if !report.is_valid() {
        return Err(TranslateError::InvalidTd(report.summary()));
    }
    if assign.num_rules() != p.rules().len() {
        return Err(TranslateError::InvalidTd("rule assignment does not match the program".into()));
    }
    for (i, r) in p.rules().iter().enumerate() {
        let t = assign.node_of(i);
        if t >= td.num_nodes() || !r.atoms().iter().all(|a| td.contains(t, a.index())) {
            return Err(TranslateError::InvalidTd(format!("rule {} is not covered by its node", i + 1)));
        }
    }
    Ok(())
}

/// Formula builder with an optional readable log.
pub(crate) struct Emitter<'a> {
    pub p: &'a Program,
    pub td: &'a TreeDecomposition,
    pub assign: &'a RuleAssignment,
    pub f: CnfFormula,
    pub log: Option<Vec<Instance>>,
    pub node: usize,
}

impl<'a> Emitter<'a> {
    pub fn new(p: &'a Program, td: &'a TreeDecomposition, assign: &'a RuleAssignment, log: bool) -> Self {
        let mut f = CnfFormula::new(p);
        f.set_node_ranks(td.root_first_ranks());
        for a in p.atoms() {
            f.atom(a);
        }
        Emitter { p, td, assign, f, log: log.then(Vec::new), node: td.root() }
    }

    pub fn at(&mut self, t: usize) {
        self.node = t;
        self.f.set_home(Some(t));
    }

    pub fn logging(&self) -> bool {
        self.log.is_some()
    }

    pub fn record(&mut self, formula: &'static str, text: impl FnOnce(&Self) -> String) {
        if self.log.is_some() {
            let text = text(self);
            let node = self.node;
            self.log.as_mut().expect("logging").push(Instance { formula, node, text });
        }
    }

    pub fn name(&self, a: Atom) -> &str {
        self.p.name(a)
    }

    pub fn bag_atoms(&self, t: usize) -> Vec<Atom> {
        self.td.bag(t).iter().map(|&v| Atom(v as u32)).collect()
    }

    pub fn p_below(&mut self, t: usize, x: Atom) -> Lit {
        self.f.var(VarKey::ProvenBelow { node: t, atom: x })
    }

    pub fn p_at(&mut self, t: usize, x: Atom) -> Lit {
        self.f.var(VarKey::ProvenAt { node: t, atom: x })
    }

    pub fn show_key(&self, key: VarKey) -> String {
        key.text(self.f.atom_names())
    }

    /// Every rule assigned to the current node is satisfied.
    pub fn rule_satisfaction(&mut self) {
        for &ri in self.assign.rules_at(self.node) {
            let r = &self.p.rules()[ri];
            let mut lits: Vec<Lit> = r.pos.iter().map(|&b| !self.f.atom(b)).collect();
            lits.extend(r.neg.iter().chain(&r.head).map(|&a| self.f.atom(a)));
            self.f.add_clause(&lits);
            self.record("rule-satisfied", |e| e.show_satisfaction(r));
        }
    }

    fn show_satisfaction(&self, r: &Rule) -> String {
        let parts: Vec<String> = r
            .pos
            .iter()
            .map(|&b| format!("!{}", self.name(b)))
            .chain(r.neg.iter().chain(&r.head).map(|&a| self.name(a).to_string()))
            .collect();
        if parts.is_empty() {
            "false".into()
        } else {
            parts.join(" | ")
        }
    }

    /// Atoms leaving the decomposition at a child (or sitting at the root) must
    /// be proven below it; proven-below is defined as proven here or below a child.
    pub fn provability_guidance(&mut self) {
        let t = self.node;
        let children = self.td.children(t).to_vec();
        for &c in &children {
            for x in self.bag_atoms(c) {
                if !self.td.contains(t, x.index()) {
                    self.require_proof("proven-on-forget", c, x);
                }
            }
        }
        if t == self.td.root() {
            for x in self.bag_atoms(t) {
                self.require_proof("proven-at-root", t, x);
            }
        }
        for x in self.bag_atoms(t) {
            let target = self.p_below(t, x);
            let mut ins = vec![self.p_at(t, x)];
            let mut shown = vec![VarKey::ProvenAt { node: t, atom: x }];
            for &c in &children {
                if self.td.contains(c, x.index()) {
                    ins.push(self.p_below(c, x));
                    shown.push(VarKey::ProvenBelow { node: c, atom: x });
                }
            }
            self.f.define_or_chain(target, &ins);
            self.record("proven-below", |e| {
                let rhs: Vec<String> = shown.iter().map(|&k| e.show_key(k)).collect();
                format!("{} <-> {}", e.show_key(VarKey::ProvenBelow { node: t, atom: x }), rhs.join(" | "))
            });
        }
    }

    fn require_proof(&mut self, formula: &'static str, c: usize, x: Atom) {
        let (a, pb) = (self.f.atom(x), self.p_below(c, x));
        self.f.add_clause(&[!a, pb]);
        self.record(formula, |e| format!("{} -> {}", e.name(x), e.show_key(VarKey::ProvenBelow { node: c, atom: x })));
    }

    pub fn finish(self) -> Translation {
        let witness = build_witness(&self.f, self.td);
        Translation { cnf: self.f, witness, guide: self.td.clone(), instances: self.log.unwrap_or_default() }
    }
}
