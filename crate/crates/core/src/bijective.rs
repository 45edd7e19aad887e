//! Translation with explicit precedence variables per atom pair.

use serde::Serialize;

use crate::asp::{Atom, Program};
use crate::cnf::{GateKind, Lit, VarKey};
use crate::reduction::{check_inputs, Emitter, TranslateError, Translation};
use crate::td::{RuleAssignment, TreeDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BijectiveOptions {
    /// Most rules per node; None means `max(1, width + 1)`.
    pub max_rules_per_node: Option<usize>,
    pub seed: u64,
    pub log_instances: bool,
}

impl Default for BijectiveOptions {
    fn default() -> Self {
        BijectiveOptions { max_rules_per_node: None, seed: 0, log_instances: false }
    }
}

pub fn default_rule_limit(td: &TreeDecomposition) -> usize {
    td.width() + 1
}

/// Inserts copies of a node above it until each node carries at most `c`
/// rules. The node keeps its first `c` rules, each copy takes the next `c`.
pub fn split_bag_rules(td: &TreeDecomposition, assign: &RuleAssignment, c: usize) -> (TreeDecomposition, RuleAssignment) {
    let c = c.max(1);
    let n = td.num_nodes();
    let mut bags: Vec<Vec<usize>> = td.bags().to_vec();
    let mut parent: Vec<Option<usize>> = (0..n).map(|t| td.parent(t)).collect();
    let mut node_of: Vec<usize> = (0..assign.num_rules()).map(|r| assign.node_of(r)).collect();
    for t in 0..n {
        let rules = assign.rules_at(t);
        let mut below = t;
        for chunk in rules.chunks(c).skip(1) {
            let copy = bags.len();
            bags.push(td.bag(t).to_vec());
            parent.push(parent[below]);
            parent[below] = Some(copy);
            for &r in chunk {
                node_of[r] = copy;
            }
            below = copy;
        }
    }
    let num_nodes = bags.len();
    let out = TreeDecomposition::new(td.num_vertices(), bags, parent).expect("copies keep the tree shape");
    (out, RuleAssignment::from_nodes(node_of, num_nodes))
}

/// Splits bag programs to the configured size and translates.
pub fn translate_bijective_split(
    p: &Program,
    td: &TreeDecomposition,
    assign: &RuleAssignment,
    opts: &BijectiveOptions,
) -> Result<Translation, TranslateError> {
    let c = opts.max_rules_per_node.unwrap_or_else(|| default_rule_limit(td));
    let (td, assign) = split_bag_rules(td, assign, c);
    translate_bijective(p, &td, &assign, opts)
}

/// Translates along `td` as given; apply `split_bag_rules` first for the
/// width guarantee.
pub fn translate_bijective(
    p: &Program,
    td: &TreeDecomposition,
    assign: &RuleAssignment,
    opts: &BijectiveOptions,
) -> Result<Translation, TranslateError> {
    check_inputs(p, td, assign)?;
    let mut e = Emitter::new(p, td, assign, opts.log_instances);
    for t in td.post_order() {
        e.at(t);
        e.rule_satisfaction();
        rule_proofs(&mut e);
        order_axioms(&mut e);
        atom_proofs(&mut e);
        precedence_proofs(&mut e);
        e.provability_guidance();
        precedence_guidance(&mut e);
    }
    Ok(e.finish())
}

/// Highest node whose bag holds both atoms, starting from a node that does.
fn region_top(td: &TreeDecomposition, mut t: usize, x: Atom, y: Atom) -> usize {
    while let Some(up) = td.parent(t) {
        if td.contains(up, x.index()) && td.contains(up, y.index()) {
            t = up;
        } else {
            break;
        }
    }
    t
}

fn prec(e: &mut Emitter, x: Atom, y: Atom) -> Lit {
    if x == y {
        return e.f.false_lit();
    }
    let node = region_top(e.td, e.node, x, y);
    e.f.var(VarKey::Prec { node, x, y })
}

fn show_prec(e: &Emitter, x: Atom, y: Atom) -> String {
    format!("prec({},{})", e.name(x), e.name(y))
}

fn p_rule(e: &mut Emitter, x: Atom, rule: usize) -> Lit {
    e.f.var(VarKey::ProvenByRule { node: e.node, atom: x, rule })
}

/// A rule proves its head atom iff it fires and the atom precedes none of
/// its positive body; a proof puts the whole positive body before the head.
fn rule_proofs(e: &mut Emitter) {
    let t = e.node;
    for ri in e.assign.rules_at(t).to_vec() {
        let r = e.p.rules()[ri].clone();
        for &x in &r.head {
            let pr = p_rule(e, x, ri);
            let negs: Vec<Atom> = r.neg.iter().chain(r.head.iter().filter(|&&h| h != x)).copied().collect();
            let mut ins: Vec<Lit> = r.pos.iter().map(|&b| e.f.atom(b)).collect();
            ins.push(e.f.atom(x));
            for &b in &r.pos {
                ins.push(!prec(e, x, b));
            }
            ins.extend(negs.iter().map(|&a| !e.f.atom(a)));
            e.f.define(pr, GateKind::And, &ins);
            e.record("rule-proof", |e| {
                let mut parts: Vec<String> = r.pos.iter().map(|&b| e.name(b).to_string()).collect();
                parts.push(e.name(x).to_string());
                parts.extend(r.pos.iter().map(|&b| format!("!{}", show_prec(e, x, b))));
                parts.extend(negs.iter().map(|&a| format!("!{}", e.name(a))));
                let key = VarKey::ProvenByRule { node: t, atom: x, rule: ri };
                format!("{} <-> {}", e.show_key(key), parts.join(" & "))
            });
            for &b in &r.pos {
                let bx = prec(e, b, x);
                e.f.add_clause(&[!pr, bx]);
                e.record("rule-proof-order", |e| {
                    let key = VarKey::ProvenByRule { node: t, atom: x, rule: ri };
                    format!("{} -> {}", e.show_key(key), show_prec(e, b, x))
                });
            }
        }
    }
}

/// Transitivity and asymmetry within the bag.
fn order_axioms(e: &mut Emitter) {
    let bag = e.bag_atoms(e.node);
    if bag.len() >= 3 {
        for &x in &bag {
            for &y in &bag {
                for &z in &bag {
                    if x == y || y == z || x == z {
                        continue;
                    }
                    let (xy, yz, xz) = (prec(e, x, y), prec(e, y, z), prec(e, x, z));
                    e.f.add_clause(&[!xy, !yz, xz]);
                    e.record("order-transitive", |e| {
                        format!("{} & {} -> {}", show_prec(e, x, y), show_prec(e, y, z), show_prec(e, x, z))
                    });
                }
            }
        }
    }
    for (i, &x) in bag.iter().enumerate() {
        for &y in &bag[i + 1..] {
            let (xy, yx) = (prec(e, x, y), prec(e, y, x));
            e.f.add_clause(&[!xy, !yx]);
            e.record("order-asymmetric", |e| format!("!{} | !{}", show_prec(e, x, y), show_prec(e, y, x)));
        }
    }
}

/// An atom is proven here iff one of the node's rules proves it.
fn atom_proofs(e: &mut Emitter) {
    let t = e.node;
    let rules = e.assign.rules_at(t).to_vec();
    for x in e.bag_atoms(t) {
        let by: Vec<usize> = rules.iter().copied().filter(|&ri| e.p.rules()[ri].head.contains(&x)).collect();
        let ins: Vec<Lit> = by.iter().map(|&ri| p_rule(e, x, ri)).collect();
        let target = e.p_at(t, x);
        e.f.define_or_chain(target, &ins);
        e.record("proven-here", |e| {
            let rhs: Vec<String> =
                by.iter().map(|&ri| e.show_key(VarKey::ProvenByRule { node: t, atom: x, rule: ri })).collect();
            let rhs = if rhs.is_empty() { "false".to_string() } else { rhs.join(" | ") };
            format!("{} <-> {}", e.show_key(VarKey::ProvenAt { node: t, atom: x }), rhs)
        });
    }
}

/// `y` precedes `x` directly through a rule proving `x`, or
/// transitively through a third bag atom.
fn precedence_proofs(e: &mut Emitter) {
    let t = e.node;
    let bag = e.bag_atoms(t);
    let rules = e.assign.rules_at(t).to_vec();
    for &y in &bag {
        for &x in &bag {
            if x == y {
                continue;
            }
            let direct: Vec<usize> = rules
                .iter()
                .copied()
                .filter(|&ri| {
                    let r = &e.p.rules()[ri];
                    r.head.contains(&x) && r.pos.contains(&y)
                })
                .collect();
            let mut ins: Vec<Lit> = direct.iter().map(|&ri| p_rule(e, x, ri)).collect();
            let via: Vec<Atom> = bag.iter().copied().filter(|&z| z != x && z != y).collect();
            for &z in &via {
                let (yz, zx) = (prec(e, y, z), prec(e, z, x));
                ins.push(e.f.and(&[yz, zx]));
            }
            let target = e.f.var(VarKey::PrecProvenAt { node: t, x: y, y: x });
            e.f.define_or_chain(target, &ins);
            e.record("precedence-proof", |e| {
                let mut rhs: Vec<String> =
                    direct.iter().map(|&ri| e.show_key(VarKey::ProvenByRule { node: t, atom: x, rule: ri })).collect();
                rhs.extend(via.iter().map(|&z| format!("({} & {})", show_prec(e, y, z), show_prec(e, z, x))));
                let rhs = if rhs.is_empty() { "false".to_string() } else { rhs.join(" | ") };
                format!("{} <-> {}", e.show_key(VarKey::PrecProvenAt { node: t, x: y, y: x }), rhs)
            });
        }
    }
}

/// Precedences leaving the decomposition must be justified below; the
/// justified-below variables collect this node and its children.
fn precedence_guidance(e: &mut Emitter) {
    let t = e.node;
    let children = e.td.children(t).to_vec();
    for &c in &children {
        let bag = e.bag_atoms(c);
        for &x in &bag {
            for &y in &bag {
                if x != y && !(e.td.contains(t, x.index()) && e.td.contains(t, y.index())) {
                    require_precedence_proof(e, "precedence-on-forget", c, x, y);
                }
            }
        }
    }
    let bag = e.bag_atoms(t);
    if t == e.td.root() {
        for &x in &bag {
            for &y in &bag {
                if x != y {
                    require_precedence_proof(e, "precedence-at-root", t, x, y);
                }
            }
        }
    }
    for &x in &bag {
        for &y in &bag {
            if x == y {
                continue;
            }
            let mut keys = vec![VarKey::PrecProvenAt { node: t, x, y }];
            for &c in &children {
                if e.td.contains(c, x.index()) && e.td.contains(c, y.index()) {
                    keys.push(VarKey::PrecProvenBelow { node: c, x, y });
                }
            }
            let ins: Vec<Lit> = keys.iter().map(|&k| e.f.var(k)).collect();
            let target = e.f.var(VarKey::PrecProvenBelow { node: t, x, y });
            e.f.define_or_chain(target, &ins);
            e.record("precedence-below", |e| {
                let rhs: Vec<String> = keys.iter().map(|&k| e.show_key(k)).collect();
                format!("{} <-> {}", e.show_key(VarKey::PrecProvenBelow { node: t, x, y }), rhs.join(" | "))
            });
        }
    }
}

fn require_precedence_proof(e: &mut Emitter, formula: &'static str, c: usize, x: Atom, y: Atom) {
    let saved = e.node;
    e.node = c;
    let xy = prec(e, x, y);
    e.node = saved;
    let pb = e.f.var(VarKey::PrecProvenBelow { node: c, x, y });
    e.f.add_clause(&[!xy, pb]);
    e.record(formula, |e| {
        format!("{} -> {}", show_prec(e, x, y), e.show_key(VarKey::PrecProvenBelow { node: c, x, y }))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::parse_program;
    use crate::models::count_models;
    use crate::td::{assign_rules, make_nice};

    const EXAMPLE: &str = "a | b.\nc | e :- d.\nd :- b, not e.\ne :- b, not d.\nb :- e, not d.\nd :- not b.\n";

    #[test]
    fn split_partitions_rules() {
        let p = parse_program("a. a :- b. a :- not b. b :- a. b. b :- not a.").unwrap();
        let td = TreeDecomposition::single_bag(2);
        let asg = assign_rules(&p, &td).unwrap();
        let (td2, asg2) = split_bag_rules(&td, &asg, 2);
        assert_eq!(td2.num_nodes(), 3);
        assert_eq!(td2.width(), td.width());
        for t in 0..3 {
            assert_eq!(asg2.rules_at(t).len(), 2);
        }
        let (td3, _) = split_bag_rules(&td, &asg, 6);
        assert_eq!(td3, td);
    }

    #[test]
    fn example_has_one_model_per_answer_set() {
        let p = parse_program(EXAMPLE).unwrap();
        let nice = make_nice(&crate::td::decompose_heuristic(&crate::asp::primal_graph(&p), crate::td::Heuristic::MinFill, 0));
        let asg = assign_rules(&p, &nice).unwrap();
        let tr = translate_bijective_split(&p, &nice, &asg, &BijectiveOptions::default()).unwrap();
        assert_eq!(count_models(&tr.cnf, &[]), 4u32.into());
    }

    #[test]
    fn tight_chain_has_one_model() {
        let p = parse_program("a. b :- a.").unwrap();
        let td = TreeDecomposition::single_bag(2);
        let asg = assign_rules(&p, &td).unwrap();
        let tr = translate_bijective(&p, &td, &asg, &BijectiveOptions::default()).unwrap();
        assert_eq!(count_models(&tr.cnf, &[]), 1u32.into());
    }
}
