//! Exact CNF model counting and projected model enumeration.
//!
//! DPLL with chronological backtracking and unit propagation, extended with
//! connected-component decomposition and a residual-formula cache so that
//! formulas built along a tree decomposition are counted without
//! enumerating every model.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use varisat::ExtendFormula;

use crate::cnf::{CnfFormula, Lit, VarKey};

/// Internal literal: `2 * var_index + negated`.
type ILit = u32;

fn ilit(l: Lit) -> ILit {
    2 * (l.var() - 1) + l.is_neg() as u32
}

const UNASSIGNED: u8 = 0;
const TRUE: u8 = 1;
const FALSE: u8 = 2;

struct Engine {
    clauses: Vec<Vec<ILit>>,
    occ: Vec<Vec<u32>>,
    units: Vec<ILit>,
    has_empty: bool,
    value: Vec<u8>,
    trail: Vec<u32>,
    priority: Vec<(u8, usize, usize)>,
    cache: HashMap<Vec<u32>, BigUint>,
    /// Decisions left before giving up.
    budget: u64,
    exhausted: bool,
}

impl Engine {
    fn new(f: &CnfFormula) -> Self {
        let nv = f.num_vars();
        let mut clauses = Vec::with_capacity(f.num_clauses());
        let mut occ = vec![Vec::new(); 2 * nv];
        let mut units = Vec::new();
        let mut has_empty = false;
        let mut rank = vec![usize::MAX; nv];
        let mut count = vec![0usize; nv];
        for (i, c) in f.clauses().iter().enumerate() {
            let mut lits: Vec<ILit> = c.iter().map(|&l| ilit(l)).collect();
            lits.sort_unstable();
            lits.dedup();
            let r = f.clause_rank(i);
            for &l in &lits {
                occ[l as usize].push(i as u32);
                let v = (l >> 1) as usize;
                rank[v] = rank[v].min(r);
                count[v] += 1;
            }
            match lits.len() {
                0 => has_empty = true,
                1 => units.push(lits[0]),
                _ => {}
            }
            clauses.push(lits);
        }
        // atoms first, then ordering variables node by node from the root,
        // then everything else
        let priority = (0..nv)
            .map(|v| {
                let key = f.keys()[v];
                let class = match key {
                    VarKey::Atom(_) => 0,
                    VarKey::Bit { .. } | VarKey::GlobalBit { .. } | VarKey::Prec { .. } => 1,
                    VarKey::Gate(_) => 3,
                    _ => 2,
                };
                let r = match key.node() {
                    Some(t) => f.node_rank(t),
                    None if rank[v] == usize::MAX => 0,
                    None => rank[v],
                };
                (class, r, usize::MAX - count[v])
            })
            .collect();
        Engine {
            clauses,
            occ,
            units,
            has_empty,
            value: vec![UNASSIGNED; nv],
            trail: Vec::new(),
            priority,
            cache: HashMap::new(),
            budget: u64::MAX,
            exhausted: false,
        }
    }

    fn lit_value(&self, l: ILit) -> u8 {
        match self.value[(l >> 1) as usize] {
            UNASSIGNED => UNASSIGNED,
            v => {
                if (v == TRUE) != (l & 1 == 1) {
                    TRUE
                } else {
                    FALSE
                }
            }
        }
    }

    /// Assigns `l` true; false on immediate contradiction.
    fn assign(&mut self, l: ILit) -> bool {
        match self.lit_value(l) {
            TRUE => true,
            FALSE => false,
            _ => {
                self.value[(l >> 1) as usize] = if l & 1 == 1 { FALSE } else { TRUE };
                self.trail.push(l);
                true
            }
        }
    }

    fn propagate(&mut self, mut head: usize) -> bool {
        while head < self.trail.len() {
            let falsified = self.trail[head] ^ 1;
            head += 1;
            for k in 0..self.occ[falsified as usize].len() {
                let ci = self.occ[falsified as usize][k] as usize;
                let mut unassigned = None;
                let mut n_unassigned = 0;
                let mut satisfied = false;
                for &l in &self.clauses[ci] {
                    match self.lit_value(l) {
                        TRUE => {
                            satisfied = true;
                            break;
                        }
                        UNASSIGNED => {
                            n_unassigned += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match n_unassigned {
                    0 => return false,
                    1 => {
                        self.assign(unassigned.expect("one unassigned"));
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let l = self.trail.pop().expect("trail");
            self.value[(l >> 1) as usize] = UNASSIGNED;
        }
    }

    fn is_satisfied(&self, ci: usize) -> bool {
        self.clauses[ci].iter().any(|&l| self.lit_value(l) == TRUE)
    }

    fn residual(&self, ci: usize) -> Vec<ILit> {
        self.clauses[ci].iter().copied().filter(|&l| self.lit_value(l) == UNASSIGNED).collect()
    }

    /// Splits unsatisfied clauses into variable-connected components.
    fn components(&self, ids: &[u32]) -> Vec<Vec<u32>> {
        let live: Vec<u32> = ids.iter().copied().filter(|&c| !self.is_satisfied(c as usize)).collect();
        let mut parent: HashMap<u32, u32> = HashMap::new();
        fn find(parent: &mut HashMap<u32, u32>, x: u32) -> u32 {
            let mut r = x;
            while let Some(&p) = parent.get(&r) {
                if p == r {
                    break;
                }
                r = p;
            }
            let mut y = x;
            while y != r {
                let next = parent[&y];
                parent.insert(y, r);
                y = next;
            }
            r
        }
        for &c in &live {
            let vars: Vec<u32> = self.residual(c as usize).iter().map(|l| l >> 1).collect();
            for &v in &vars {
                parent.entry(v).or_insert(v);
            }
            for w in vars.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                if a != b {
                    parent.insert(a, b);
                }
            }
        }
        let mut groups: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &c in &live {
            let v = self.clauses[c as usize].iter().find(|&&l| self.lit_value(l) == UNASSIGNED).expect("live clause") >> 1;
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(c);
        }
        groups.into_values().collect()
    }

    fn residual_vars(&self, ids: &[u32]) -> Vec<u32> {
        let mut vars: Vec<u32> = ids
            .iter()
            .flat_map(|&c| self.clauses[c as usize].iter().copied())
            .filter(|&l| self.lit_value(l) == UNASSIGNED)
            .map(|l| l >> 1)
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    fn pow2(&self, n: usize) -> BigUint {
        BigUint::one() << n
    }

    /// Counts models of a component (all clauses unsatisfied, ≥2 open literals)
    /// over the variables it mentions.
    fn count_component(&mut self, ids: Vec<u32>) -> BigUint {
        let mut rows: Vec<Vec<ILit>> = ids.iter().map(|&c| self.residual(c as usize)).collect();
        rows.sort_unstable();
        rows.dedup();
        let mut key = Vec::with_capacity(rows.iter().map(|r| r.len() + 1).sum());
        for r in &rows {
            key.extend_from_slice(r);
            key.push(u32::MAX);
        }
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        if self.budget == 0 {
            self.exhausted = true;
        }
        if self.exhausted {
            return BigUint::zero();
        }
        self.budget -= 1;
        let vars = self.residual_vars(&ids);
        let v = *vars.iter().min_by_key(|&&v| (self.priority[v as usize], v)).expect("component has variables");
        let mut total = BigUint::zero();
        for neg in [false, true] {
            let mark = self.trail.len();
            let lit = 2 * v + neg as u32;
            if self.assign(lit) && self.propagate(mark) {
                let remaining: Vec<u32> = ids.iter().copied().filter(|&c| !self.is_satisfied(c as usize)).collect();
                let after = self.residual_vars(&remaining).len();
                let assigned = self.trail.len() - mark;
                let mut prod = self.pow2(vars.len() - assigned - after);
                for comp in self.components(&remaining) {
                    if prod.is_zero() {
                        break;
                    }
                    prod *= self.count_component(comp);
                }
                total += prod;
            }
            self.undo(mark);
        }
        if !self.exhausted {
            self.cache.insert(key, total.clone());
        }
        total
    }

    /// Number of models consistent with `assumptions`.
    fn count(&mut self, assumptions: &[Lit]) -> BigUint {
        self.undo(0);
        if self.has_empty {
            return BigUint::zero();
        }
        let seeds: Vec<ILit> = self.units.iter().copied().chain(assumptions.iter().map(|&l| ilit(l))).collect();
        for l in seeds {
            if !self.assign(l) {
                self.undo(0);
                return BigUint::zero();
            }
        }
        if !self.propagate(0) {
            self.undo(0);
            return BigUint::zero();
        }
        let all: Vec<u32> = (0..self.clauses.len() as u32).collect();
        let remaining: Vec<u32> = all.into_iter().filter(|&c| !self.is_satisfied(c as usize)).collect();
        let open = self.residual_vars(&remaining).len();
        let mut prod = self.pow2(self.value.len() - self.trail.len() - open);
        for comp in self.components(&remaining) {
            if prod.is_zero() {
                break;
            }
            prod *= self.count_component(comp);
        }
        self.undo(0);
        prod
    }
}

/// Runs `f` on a thread with a large stack (the counter recurses per decision).
fn with_stack<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(512 << 20)
            .spawn_scoped(s, f)
            .expect("spawn counting thread")
            .join()
            .expect("counting thread panicked")
    })
}

/// Exact number of models of `f` under `assumptions`.
pub fn count_models(f: &CnfFormula, assumptions: &[Lit]) -> BigUint {
    with_stack(|| Engine::new(f).count(assumptions))
}

/// Like `count_models`, giving up after `budget` branching decisions.
pub fn count_models_within(f: &CnfFormula, assumptions: &[Lit], budget: u64) -> Option<BigUint> {
    with_stack(|| {
        let mut e = Engine::new(f);
        e.budget = budget;
        let n = e.count(assumptions);
        (!e.exhausted).then_some(n)
    })
}

/// Distinct projections of the models onto `projection`, without counting,
/// stopping after `cap`. The flag is false when the cap was hit.
pub fn projected_models(f: &CnfFormula, projection: &[u32], cap: usize) -> (BTreeSet<Vec<bool>>, bool) {
    let mut solver = sat_solver(f);
    let mut out = BTreeSet::new();
    while solver.solve().expect("in-memory solving does not fail") {
        if out.len() >= cap {
            return (out, false);
        }
        let model = solver.model().expect("satisfiable");
        let vals: Vec<bool> = projection.iter().map(|&v| model[v as usize - 1].is_positive()).collect();
        let block: Vec<varisat::Lit> = projection
            .iter()
            .zip(&vals)
            .map(|(&v, &b)| varisat::Lit::from_dimacs(if b { -(v as isize) } else { v as isize }))
            .collect();
        out.insert(vals);
        if block.is_empty() {
            break;
        }
        solver.add_clause(&block);
    }
    (out, true)
}

/// Satisfiability of `f` under `assumptions`.
pub fn is_satisfiable(f: &CnfFormula, assumptions: &[Lit]) -> bool {
    let mut s = sat_solver(f);
    s.assume(&assumptions.iter().map(|&l| sat_lit(l)).collect::<Vec<_>>());
    s.solve().expect("in-memory solving does not fail")
}

fn sat_lit(l: Lit) -> varisat::Lit {
    varisat::Lit::from_dimacs(l.dimacs() as isize)
}

/// CDCL solver loaded with `f`; used for decisions, the counter for counts.
fn sat_solver(f: &CnfFormula) -> varisat::Solver<'static> {
    let mut s = varisat::Solver::new();
    for _ in 0..f.num_vars() {
        s.new_var();
    }
    for c in f.clauses() {
        s.add_clause(&c.iter().map(|&l| sat_lit(l)).collect::<Vec<_>>());
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    Fails,
    /// The formulas cannot be compared over their free variables.
    Incomparable(String),
}

fn free_keys(f: &CnfFormula) -> BTreeSet<VarKey> {
    (1..=f.num_vars() as u32).filter(|&v| !f.is_defined(v)).map(|v| f.key(v)).collect()
}

/// Whether every model of `sub` restricted to its free variables (those no
/// definition fixes) extends to a model of `sup`. Free variables are matched
/// by key and must agree between the two. With acyclic definitions each
/// formula has exactly one model per satisfying free assignment, so `Holds`
/// also gives `#models(sub) <= #models(sup)`.
pub fn free_inclusion(sub: &CnfFormula, sup: &CnfFormula) -> Inclusion {
    for (name, f) in [("first", sub), ("second", sup)] {
        if !f.definitions_acyclic() {
            return Inclusion::Incomparable(format!("{name} formula has cyclic definitions"));
        }
    }
    if free_keys(sub) != free_keys(sup) {
        return Inclusion::Incomparable("free variables differ".into());
    }
    let mut s = sat_solver(sub);
    let map: Vec<varisat::Var> = (1..=sup.num_vars() as u32)
        .map(|v| match sup.is_defined(v) {
            true => s.new_var(),
            false => {
                let own = sub.lookup(&sup.key(v)).expect("free keys agree");
                varisat::Var::from_dimacs(own.var() as isize)
            }
        })
        .collect();
    let lit = |l: Lit| map[l.var() as usize - 1].lit(!l.is_neg());
    let mut some_violated = Vec::new();
    for (i, c) in sup.clauses().iter().enumerate() {
        let c: Vec<varisat::Lit> = c.iter().map(|&l| lit(l)).collect();
        if sup.clause_defines(i).is_some() {
            s.add_clause(&c);
        } else {
            let sel = s.new_var().positive();
            for &l in &c {
                s.add_clause(&[!sel, !l]);
            }
            some_violated.push(sel);
        }
    }
    s.add_clause(&some_violated);
    match s.solve().expect("in-memory solving does not fail") {
        true => Inclusion::Fails,
        false => Inclusion::Holds,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSummary {
    /// Projection variables, ascending.
    pub projection: Vec<u32>,
    /// Projected assignment (values in projection order) to its multiplicity.
    pub models: BTreeMap<Vec<bool>, BigUint>,
    pub total: BigUint,
    pub complete: bool,
}

impl ModelSummary {
    /// Projected assignments as sets of true variables.
    pub fn true_vars(&self) -> Vec<Vec<u32>> {
        self.models
            .keys()
            .map(|vals| self.projection.iter().zip(vals).filter(|(_, &b)| b).map(|(&v, _)| v).collect())
            .collect()
    }
}

/// Enumerates projections onto the atom variables of `f` with multiplicities,
/// stopping after `cap` distinct projections.
pub fn enumerate_models(f: &CnfFormula, cap: usize) -> ModelSummary {
    enumerate_projected(f, f.projection(), cap)
}

/// Projected models are found one at a time with blocking clauses; each is
/// then counted exactly.
pub fn enumerate_projected(f: &CnfFormula, projection: &[u32], cap: usize) -> ModelSummary {
    with_stack(|| {
        let mut solver = sat_solver(f);
        let mut counter = Engine::new(f);
        let mut summary = ModelSummary {
            projection: projection.to_vec(),
            models: BTreeMap::new(),
            total: BigUint::zero(),
            complete: true,
        };
        while solver.solve().expect("in-memory solving does not fail") {
            if summary.models.len() >= cap {
                summary.complete = false;
                break;
            }
            let model = solver.model().expect("satisfiable");
            let vals: Vec<bool> = projection.iter().map(|&v| model[v as usize - 1].is_positive()).collect();
            let fixed: Vec<Lit> =
                projection.iter().zip(&vals).map(|(&v, &b)| if b { Lit::pos(v) } else { !Lit::pos(v) }).collect();
            let n = counter.count(&fixed);
            summary.total += &n;
            summary.models.insert(vals, n);
            if fixed.is_empty() {
                break;
            }
            solver.add_clause(&fixed.iter().map(|&l| sat_lit(!l)).collect::<Vec<_>>());
        }
        summary
    })
}

/// Reference enumerator over all 2^n assignments (n ≤ 24).
pub fn enumerate_truth_table(f: &CnfFormula) -> ModelSummary {
    let n = f.num_vars();
    assert!(n <= 24, "truth table limited to 24 variables");
    let projection = f.projection().to_vec();
    let mut models: BTreeMap<Vec<bool>, BigUint> = BTreeMap::new();
    let mut total = BigUint::zero();
    let mut asg = vec![false; n];
    for m in 0u32..1 << n {
        for (i, a) in asg.iter_mut().enumerate() {
            *a = m >> i & 1 == 1;
        }
        if f.eval(&asg) {
            total += 1u32;
            let key: Vec<bool> = projection.iter().map(|&v| asg[v as usize - 1]).collect();
            *models.entry(key).or_insert_with(BigUint::zero) += 1u32;
        }
    }
    ModelSummary { projection, models, total, complete: true }
}
