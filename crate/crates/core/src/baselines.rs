//! Reference encodings without decomposition guidance.

use crate::asp::{classify, Program};
use crate::cnf::{CnfFormula, GateKind, Lit, OrderScope};
use crate::ordered::{translate_ordered, OrderedOptions};
use crate::reduction::{TranslateError, Translation};
use crate::td::{assign_rules, make_nice, TreeDecomposition};

/// Clark's completion of a tight normal program: each atom is equivalent to
/// the disjunction of its rule bodies.
pub fn clark_completion(p: &Program) -> Result<CnfFormula, TranslateError> {
    let class = classify(p);
    if !class.is_normal {
        return Err(TranslateError::NotNormal);
    }
    if !class.is_tight {
        return Err(TranslateError::NotTight);
    }
    let mut f = CnfFormula::new(p);
    for a in p.atoms() {
        f.atom(a);
    }
    let mut bodies: Vec<Vec<Lit>> = vec![Vec::new(); p.num_atoms()];
    for r in p.rules() {
        let mut body: Vec<Lit> = r.pos.iter().map(|&b| f.atom(b)).collect();
        body.extend(r.neg.iter().map(|&a| !f.atom(a)));
        match r.head.first() {
            Some(&h) => {
                let g = f.and(&body);
                bodies[h.index()].push(g);
            }
            None => {
                let clause: Vec<Lit> = body.iter().map(|&l| !l).collect();
                f.add_clause(&clause);
            }
        }
    }
    for a in p.atoms() {
        let x = f.atom(a);
        f.define(x, GateKind::Or, &bodies[a.index()]);
    }
    Ok(f)
}

/// The ordered translation over one bag holding every atom, with positions
/// shared by all nodes.
pub fn global_translation(p: &Program, opts: &OrderedOptions) -> Result<Translation, TranslateError> {
    let td = make_nice(&TreeDecomposition::single_bag(p.num_atoms()));
    let assign = assign_rules(p, &td).map_err(|e| TranslateError::InvalidTd(e.to_string()))?;
    let opts = OrderedOptions { scope: OrderScope::Global, strengthen: false, ..*opts };
    translate_ordered(p, &td, &assign, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::parse_program;
    use crate::cnf::VarKey;
    use crate::models::enumerate_models;

    fn models(p: &Program, f: &CnfFormula) -> Vec<String> {
        let s = enumerate_models(f, 1000);
        let mut v: Vec<String> = crate::oracles::projected_interpretations(f, &s)
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
    fn completion_examples() {
        let p = parse_program("a :- not b. b :- not a.").unwrap();
        assert_eq!(models(&p, &clark_completion(&p).unwrap()), vec!["a", "b"]);
        let p = parse_program("a.").unwrap();
        assert_eq!(models(&p, &clark_completion(&p).unwrap()), vec!["a"]);
        let p = parse_program("a. b :- a.").unwrap();
        assert_eq!(models(&p, &clark_completion(&p).unwrap()), vec!["ab"]);
        let p = parse_program("a :- b. b :- a.").unwrap();
        assert_eq!(clark_completion(&p).unwrap_err(), TranslateError::NotTight);
        let p = parse_program("a | b.").unwrap();
        assert_eq!(clark_completion(&p).unwrap_err(), TranslateError::NotNormal);
    }

    #[test]
    fn global_translation_examples() {
        let p = parse_program("a | b.\nc | e :- d.\nd :- b, not e.\ne :- b, not d.\nb :- e, not d.\nd :- not b.\n").unwrap();
        let tr = global_translation(&p, &OrderedOptions::default()).unwrap();
        assert_eq!(models(&p, &tr.cnf), vec!["acd", "ade", "bcd", "be"]);
        let p = parse_program("a.").unwrap();
        let tr = global_translation(&p, &OrderedOptions::default()).unwrap();
        assert!(!tr.cnf.keys().iter().any(|k| matches!(k, VarKey::GlobalBit { .. } | VarKey::Bit { .. })));
    }
}
