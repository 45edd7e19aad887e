//! Translation with bag-local ordering positions encoded in binary.

use std::collections::HashMap;

use serde::Serialize;

use crate::asp::{Atom, Program};
use crate::cnf::{encode_prec, equals_const, Lit, OrderBits, OrderScope, VarKey};
use crate::reduction::{check_inputs, Emitter, TranslateError, Translation};
use crate::td::{RuleAssignment, TreeDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrderedOptions {
    /// Emit the extra clauses that prune redundant orderings.
    pub strengthen: bool,
    pub scope: OrderScope,
    /// Seed of the decomposition heuristic, when one is used by the caller.
    pub seed: u64,
    /// Keep a readable log of the emitted formula instances.
    pub log_instances: bool,
}

impl Default for OrderedOptions {
    fn default() -> Self {
        OrderedOptions { strengthen: false, scope: OrderScope::Local, seed: 0, log_instances: false }
    }
}

pub fn translate_ordered(
    p: &Program,
    td: &TreeDecomposition,
    assign: &RuleAssignment,
    opts: &OrderedOptions,
) -> Result<Translation, TranslateError> {
    check_inputs(p, td, assign)?;
    if opts.strengthen && opts.scope == OrderScope::Global {
        return Err(TranslateError::StrengthenNeedsLocalBits);
    }
    let ob = OrderBits::new(td, opts.scope, p.num_atoms());
    let mut e = Emitter::new(p, td, assign, opts.log_instances);
    for t in td.post_order() {
        e.at(t);
        for x in e.bag_atoms(t) {
            e.f.atom(x);
            ob.bit_vector(&mut e.f, t, x);
        }
        e.rule_satisfaction();
        if opts.scope == OrderScope::Local {
            compatibility(&mut e, &ob)?;
        }
        e.provability_guidance();
        fresh_proofs(&mut e, &ob)?;
        if opts.strengthen {
            strengthening(&mut e, &ob)?;
        }
    }
    Ok(e.finish())
}

fn show_prec(e: &Emitter, t: usize, x: Atom, y: Atom) -> String {
    format!("prec({},{},{})", t + 1, e.name(x), e.name(y))
}

/// Children and parent agree on the order of shared atoms.
fn compatibility(e: &mut Emitter, ob: &OrderBits) -> Result<(), TranslateError> {
    let t = e.node;
    for c in e.td.children(t).to_vec() {
        let shared: Vec<Atom> = e.bag_atoms(c).into_iter().filter(|a| e.td.contains(t, a.index())).collect();
        for &x in &shared {
            for &y in &shared {
                if x == y {
                    continue;
                }
                let below = encode_prec(&mut e.f, ob, c, x, y)?;
                let here = encode_prec(&mut e.f, ob, t, x, y)?;
                e.f.assert_equiv(below, here);
                e.record("order-agrees", |e| format!("{} <-> {}", show_prec(e, c, x, y), show_prec(e, t, x, y)));
            }
        }
    }
    Ok(())
}

/// An atom is freshly proven at a node iff one of the node's
/// rules proves it with its positive body ordered first.
fn fresh_proofs(e: &mut Emitter, ob: &OrderBits) -> Result<(), TranslateError> {
    let t = e.node;
    let rules = e.assign.rules_at(t).to_vec();
    for x in e.bag_atoms(t) {
        let mut gates = Vec::new();
        let mut shown = Vec::new();
        for &ri in &rules {
            let r = &e.p.rules()[ri];
            if !r.head.contains(&x) {
                continue;
            }
            let mut ins: Vec<Lit> = r.pos.iter().map(|&b| e.f.atom(b)).collect();
            ins.push(e.f.atom(x));
            for &b in &r.pos {
                ins.push(encode_prec(&mut e.f, ob, t, b, x)?);
            }
            let negs: Vec<Atom> = r.neg.iter().chain(r.head.iter().filter(|&&h| h != x)).copied().collect();
            ins.extend(negs.iter().map(|&a| !e.f.atom(a)));
            gates.push(e.f.and(&ins));
            if e.logging() {
                let mut parts: Vec<String> = r.pos.iter().map(|&b| e.name(b).to_string()).collect();
                parts.push(e.name(x).to_string());
                parts.extend(r.pos.iter().map(|&b| show_prec(e, t, b, x)));
                parts.extend(negs.iter().map(|&a| format!("!{}", e.name(a))));
                shown.push(format!("({})", parts.join(" & ")));
            }
        }
        let target = e.p_at(t, x);
        e.f.define_or_chain(target, &gates);
        e.record("proven-here", |e| {
            let rhs = if shown.is_empty() { "false".to_string() } else { shown.join(" | ") };
            format!("{} <-> {}", e.show_key(VarKey::ProvenAt { node: t, atom: x }), rhs)
        });
    }
    Ok(())
}

/// Extra clauses: false atoms sit at position zero, occupied positions are
/// contiguous from zero, and an atom proven by a rule sits directly above
/// some atom of that rule's positive body.
fn strengthening(e: &mut Emitter, ob: &OrderBits) -> Result<(), TranslateError> {
    let t = e.node;
    let bag = e.bag_atoms(t);
    let nbits = ob.bits(t);
    if nbits == 0 {
        return Ok(());
    }
    let positions = 1usize << nbits;
    let mut eq: HashMap<(Atom, usize), Lit> = HashMap::new();
    let mut pos_is = |e: &mut Emitter, x: Atom, i: usize| -> Lit {
        *eq.entry((x, i)).or_insert_with(|| {
            let bits = ob.bit_vector(&mut e.f, t, x);
            equals_const(&mut e.f, &bits, i)
        })
    };
    for &x in &bag {
        let a = e.f.atom(x);
        for b in ob.bit_vector(&mut e.f, t, x) {
            e.f.add_clause(&[a, !b]);
        }
    }
    for &x in &bag {
        for i in 1..positions {
            let mut clause = vec![!pos_is(e, x, i)];
            for &y in bag.iter().filter(|&&y| y != x) {
                clause.push(pos_is(e, y, i - 1));
            }
            e.f.add_clause(&clause);
        }
    }
    for ri in e.assign.rules_at(t).to_vec() {
        let r = e.p.rules()[ri].clone();
        for &x in &r.head {
            for i in 1..positions {
                let mut clause = vec![!pos_is(e, x, i)];
                for &b in &r.pos {
                    clause.push(!e.f.atom(b));
                    clause.push(!encode_prec(&mut e.f, ob, t, b, x)?);
                }
                for &a in r.neg.iter().chain(r.head.iter().filter(|&&h| h != x)) {
                    clause.push(e.f.atom(a));
                }
                for &y in &r.pos {
                    clause.push(pos_is(e, y, i - 1));
                }
                e.f.add_clause(&clause);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::parse_program;
    use crate::models::enumerate_models;
    use crate::oracles::projected_interpretations;
    use crate::td::{assign_rules, make_nice};

    const EXAMPLE: &str = "a | b.\nc | e :- d.\nd :- b, not e.\ne :- b, not d.\nb :- e, not d.\nd :- not b.\n";

    fn running_td(p: &Program) -> TreeDecomposition {
        let ids = |s: &[&str]| s.iter().map(|n| p.lookup(n).unwrap().index()).collect::<Vec<_>>();
        TreeDecomposition::new(5, vec![ids(&["c", "d", "e"]), ids(&["a", "b"]), ids(&["b", "d", "e"])], vec![Some(2), Some(2), None])
            .unwrap()
    }

    fn projected(p: &Program, tr: &Translation) -> Vec<String> {
        let s = enumerate_models(&tr.cnf, 1 << 16);
        assert!(s.complete);
        let mut v: Vec<String> = projected_interpretations(&tr.cnf, &s)
            .keys()
            .map(|m| {
                let mut n = m.names(p);
                n.sort();
                n.concat()
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn example_over_running_td_and_nice() {
        let p = parse_program(EXAMPLE).unwrap();
        let td = running_td(&p);
        let want = vec!["acd", "ade", "bcd", "be"];
        for strengthen in [false, true] {
            let opts = OrderedOptions { strengthen, ..Default::default() };
            let tr = translate_ordered(&p, &td, &assign_rules(&p, &td).unwrap(), &opts).unwrap();
            assert_eq!(projected(&p, &tr), want);
            let nice = make_nice(&td);
            let tr = translate_ordered(&p, &nice, &assign_rules(&p, &nice).unwrap(), &opts).unwrap();
            assert_eq!(projected(&p, &tr), want);
        }
        let single = make_nice(&TreeDecomposition::single_bag(5));
        let opts = OrderedOptions { scope: OrderScope::Global, ..Default::default() };
        let tr = translate_ordered(&p, &single, &assign_rules(&p, &single).unwrap(), &opts).unwrap();
        assert_eq!(projected(&p, &tr), want);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = parse_program("a | b. a :- b. b :- a.").unwrap();
        let td = TreeDecomposition::single_bag(2);
        let asg = assign_rules(&p, &td).unwrap();
        assert_eq!(translate_ordered(&p, &td, &asg, &OrderedOptions::default()).unwrap_err(), TranslateError::NotHcf);
        let q = parse_program("a :- b. b :- c.").unwrap();
        let bad = TreeDecomposition::new(3, vec![vec![0, 1], vec![2]], vec![None, Some(0)]).unwrap();
        let asg = crate::td::RuleAssignment::from_nodes(vec![0, 0], 2);
        assert!(matches!(translate_ordered(&q, &bad, &asg, &OrderedOptions::default()), Err(TranslateError::InvalidTd(_))));
        let opts = OrderedOptions { strengthen: true, scope: OrderScope::Global, ..Default::default() };
        let td = TreeDecomposition::single_bag(3);
        let asg = assign_rules(&q, &td).unwrap();
        assert_eq!(translate_ordered(&q, &td, &asg, &opts).unwrap_err(), TranslateError::StrengthenNeedsLocalBits);
    }

    #[test]
    fn empty_program() {
        let p = Program::new();
        let td = TreeDecomposition::single_bag(0);
        let asg = assign_rules(&p, &td).unwrap();
        let tr = translate_ordered(&p, &td, &asg, &OrderedOptions::default()).unwrap();
        assert!(tr.cnf.projection().is_empty());
        assert!(crate::models::is_satisfiable(&tr.cnf, &[]));
    }
}
