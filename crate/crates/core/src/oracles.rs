//! Reference answer-set enumerators and preservation checks.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::asp::{classify, shift_hcf, Atom, Interpretation, Program};
use crate::cnf::{CnfFormula, VarKey};
use crate::models::{enumerate_models, projected_models, ModelSummary};
use crate::par::Execution;

pub const DEFAULT_ATOM_CAP: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{atoms} atoms exceed the oracle cap of {cap}")]
    TooLarge { atoms: usize, cap: usize },
    #[error("program is not head-cycle-free")]
    NotHcf,
    #[error("program is not normal")]
    NotNormal,
    #[error("more than {0} projected models")]
    CapExceeded(usize),
}

struct MaskRule {
    head: u64,
    pos: u64,
    neg: u64,
}

fn mask_rules(p: &Program) -> Vec<MaskRule> {
    let m = |v: &[Atom]| v.iter().fold(0u64, |acc, a| acc | 1 << a.0);
    p.rules().iter().map(|r| MaskRule { head: m(&r.head), pos: m(&r.pos), neg: m(&r.neg) }).collect()
}

fn is_model(rules: &[MaskRule], i: u64) -> bool {
    rules.iter().all(|r| r.pos & !i != 0 || (r.head | r.neg) & i != 0)
}

/// Least model of the reduct of a normal program w.r.t. `i`, or None if a
/// constraint of the reduct is violated.
fn least_model_of_reduct(rules: &[MaskRule], i: u64) -> Option<u64> {
    let mut lm = 0u64;
    loop {
        let mut changed = false;
        for r in rules {
            if r.neg & i != 0 || r.pos & !lm != 0 {
                continue;
            }
            if r.head == 0 {
                return None;
            }
            if r.head & !lm != 0 {
                lm |= r.head;
                changed = true;
            }
        }
        if !changed {
            return Some(lm);
        }
    }
}

/// True iff no proper subset of `i` is a model of the reduct.
fn is_minimal_reduct_model(rules: &[MaskRule], i: u64) -> bool {
    let reduct: Vec<MaskRule> =
        rules.iter().filter(|r| r.neg & i == 0).map(|r| MaskRule { head: r.head, pos: r.pos, neg: 0 }).collect();
    let mut sub = i;
    while sub != 0 {
        sub = (sub - 1) & i;
        if is_model(&reduct, sub) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minimality {
    /// Least-model equality; normal programs only.
    LeastModel,
    /// Search over all subsets of the candidate.
    SubsetSearch,
}

fn check_cap(p: &Program, cap: usize) -> Result<(), OracleError> {
    if p.num_atoms() > cap.min(63) {
        return Err(OracleError::TooLarge { atoms: p.num_atoms(), cap: cap.min(63) });
    }
    Ok(())
}

fn sweep<F>(n: usize, exec: Execution, keep: F) -> Vec<Interpretation>
where
    F: Fn(u64) -> bool + Sync + Send,
{
    const CHUNK: u64 = 1 << 12;
    let total = 1u64 << n;
    let chunks = total.div_ceil(CHUNK);
    let found = exec.map_range(chunks, |c| {
        let lo = c * CHUNK;
        (lo..(lo + CHUNK).min(total)).filter(|&m| keep(m)).collect::<Vec<u64>>()
    });
    let set: BTreeSet<Interpretation> = found.into_iter().flatten().map(Interpretation::from_mask).collect();
    set.into_iter().collect()
}

/// Answer sets as minimal models of the reduct, by brute force over all
/// interpretations. Normal programs use least-model equality.
pub fn answer_sets_reduct(p: &Program, cap: usize) -> Result<Vec<Interpretation>, OracleError> {
    let how = if classify(p).is_normal { Minimality::LeastModel } else { Minimality::SubsetSearch };
    answer_sets_reduct_with(p, cap, how, Execution::default())
}

pub fn answer_sets_reduct_with(
    p: &Program,
    cap: usize,
    how: Minimality,
    exec: Execution,
) -> Result<Vec<Interpretation>, OracleError> {
    check_cap(p, cap)?;
    if how == Minimality::LeastModel && !classify(p).is_normal {
        return Err(OracleError::NotNormal);
    }
    let rules = mask_rules(p);
    Ok(sweep(p.num_atoms(), exec, |i| {
        is_model(&rules, i)
            && match how {
                Minimality::LeastModel => least_model_of_reduct(&rules, i) == Some(i),
                Minimality::SubsetSearch => is_minimal_reduct_model(&rules, i),
            }
    }))
}

/// Atoms of `i` provable in stages: a rule proves its head atom `a` when `i`
/// satisfies its body, `a` is its only true head atom and every positive
/// body atom was proven earlier. Returns each atom with its stage, or None if
/// `i` is not a model or some atom stays unproven.
pub fn proving_order(p: &Program, i: &Interpretation) -> Option<Vec<(Atom, usize)>> {
    if !p.is_model(i) {
        return None;
    }
    let suitable: Vec<(Atom, &[Atom])> = p
        .rules()
        .iter()
        .filter(|r| r.pos.iter().all(|&b| i.contains(b)) && !r.neg.iter().any(|&a| i.contains(a)))
        .filter_map(|r| {
            let mut true_heads = r.head.iter().filter(|&&h| i.contains(h));
            match (true_heads.next(), true_heads.next()) {
                (Some(&a), None) => Some((a, r.pos.as_slice())),
                _ => None,
            }
        })
        .collect();
    let mut stage: BTreeMap<Atom, usize> = BTreeMap::new();
    let mut level = 0;
    loop {
        let fresh: BTreeSet<Atom> = suitable
            .iter()
            .filter(|(a, body)| !stage.contains_key(a) && body.iter().all(|b| stage.contains_key(b)))
            .map(|(a, _)| *a)
            .collect();
        if fresh.is_empty() {
            break;
        }
        for a in fresh {
            stage.insert(a, level);
        }
        level += 1;
    }
    (stage.len() == i.len()).then(|| stage.into_iter().collect())
}

/// Answer sets via the proving characterization (HCF programs).
pub fn answer_sets_proving(p: &Program, cap: usize) -> Result<Vec<Interpretation>, OracleError> {
    answer_sets_proving_with(p, cap, Execution::default())
}

pub fn answer_sets_proving_with(p: &Program, cap: usize, exec: Execution) -> Result<Vec<Interpretation>, OracleError> {
    if !classify(p).is_hcf {
        return Err(OracleError::NotHcf);
    }
    check_cap(p, cap)?;
    let rules = mask_rules(p);
    Ok(sweep(p.num_atoms(), exec, |i| {
        if !is_model(&rules, i) {
            return false;
        }
        let mut proven = 0u64;
        loop {
            let mut changed = false;
            for r in &rules {
                let heads = r.head & i;
                if heads.count_ones() == 1 && r.pos & !i == 0 && r.neg & i == 0 && r.pos & !proven == 0 && heads & !proven != 0
                {
                    proven |= heads;
                    changed = true;
                }
            }
            if !changed {
                return proven == i;
            }
        }
    }))
}

/// Answer sets of an HCF program without an atom cap: the program is shifted
/// and searched by branching on atoms that occur negatively, pruning with the
/// least models of the surely- and possibly-applicable rules.
pub fn answer_sets_search(p: &Program, limit: usize) -> Result<Vec<Interpretation>, OracleError> {
    let q = if classify(p).is_normal { p.clone() } else { shift_hcf(p).map_err(|_| OracleError::NotHcf)? };
    let n = q.num_atoms();
    let mut negated = vec![false; n];
    for r in q.rules() {
        for a in &r.neg {
            negated[a.index()] = true;
        }
    }
    let branch: Vec<usize> = (0..n).filter(|&a| negated[a]).collect();
    let mut out = BTreeSet::new();
    let mut assign: Vec<Option<bool>> = vec![None; n];
    search(&q, &branch, &mut assign, limit, &mut out);
    Ok(out.into_iter().collect())
}

fn least_model(p: &Program, usable: impl Fn(usize) -> bool) -> Vec<bool> {
    let n = p.num_atoms();
    let mut lm = vec![false; n];
    let mut missing: Vec<usize> = p.rules().iter().map(|r| r.pos.len()).collect();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue = Vec::new();
    for (i, r) in p.rules().iter().enumerate() {
        if !usable(i) {
            missing[i] = usize::MAX;
            continue;
        }
        for b in &r.pos {
            watchers[b.index()].push(i);
        }
        if r.pos.is_empty() {
            queue.push(i);
        }
    }
    while let Some(i) = queue.pop() {
        if let Some(h) = p.rules()[i].head.first() {
            if !lm[h.index()] {
                lm[h.index()] = true;
                for &j in &watchers[h.index()] {
                    missing[j] -= 1;
                    if missing[j] == 0 {
                        queue.push(j);
                    }
                }
            }
        }
    }
    lm
}

fn search(
    p: &Program,
    branch: &[usize],
    assign: &mut Vec<Option<bool>>,
    limit: usize,
    out: &mut BTreeSet<Interpretation>,
) {
    if out.len() >= limit {
        return;
    }
    let saved = assign.clone();
    let lower = loop {
        let lower = least_model(p, |i| p.rules()[i].neg.iter().all(|a| assign[a.index()] == Some(false)));
        let upper = least_model(p, |i| p.rules()[i].neg.iter().all(|a| assign[a.index()] != Some(true)));
        let mut changed = false;
        for &a in branch {
            match assign[a] {
                Some(true) if !upper[a] => {
                    *assign = saved;
                    return;
                }
                Some(false) if lower[a] => {
                    *assign = saved;
                    return;
                }
                None if lower[a] => {
                    assign[a] = Some(true);
                    changed = true;
                }
                None if !upper[a] => {
                    assign[a] = Some(false);
                    changed = true;
                }
                _ => {}
            }
        }
        let violated = p.rules().iter().any(|r| {
            r.head.is_empty()
                && r.neg.iter().all(|a| assign[a.index()] == Some(false))
                && r.pos.iter().all(|b| lower[b.index()])
        });
        if violated {
            *assign = saved;
            return;
        }
        if !changed {
            break lower;
        }
    };
    match branch.iter().find(|&&a| assign[a].is_none()) {
        Some(&a) => {
            for v in [true, false] {
                assign[a] = Some(v);
                search(p, branch, assign, limit, out);
                assign[a] = None;
            }
        }
        None => {
            let m: Interpretation = (0..p.num_atoms()).filter(|&a| lower[a]).map(|a| Atom(a as u32)).collect();
            let ok = p.rules().iter().all(|r| {
                !r.head.is_empty() || r.neg.iter().any(|&a| m.contains(a)) || !r.pos.iter().all(|&b| m.contains(b))
            });
            if ok {
                out.insert(m);
            }
        }
    }
    *assign = saved;
}

/// Answer sets by the reduct oracle when within the cap, else by search.
pub fn answer_sets(p: &Program, cap: usize) -> Result<Vec<Interpretation>, OracleError> {
    if p.num_atoms() <= cap.min(63) {
        answer_sets_reduct(p, cap)
    } else {
        answer_sets_search(p, usize::MAX)
    }
}

// ---------------------------------------------------------------- preservation

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PreservationMode {
    Weak,
    Bijective,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatches {
    /// Answer sets with no model.
    pub missing: Vec<Vec<String>>,
    /// Projected models that are not answer sets.
    pub extra: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multiplicity {
    pub answer_set: Vec<String>,
    pub models: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub answer_sets: usize,
    pub projected_models: usize,
    /// Only counted in bijective mode.
    pub total_models: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    pub status: String,
    pub mode: PreservationMode,
    pub mismatches: Mismatches,
    pub multiplicities: Vec<Multiplicity>,
    pub counts: Counts,
}

impl PreservationReport {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Projected models of `f` as interpretations of `p`'s atoms.
pub fn projected_interpretations(f: &CnfFormula, summary: &ModelSummary) -> BTreeMap<Interpretation, BigUint> {
    summary
        .models
        .iter()
        .map(|(vals, n)| {
            let m: Interpretation = summary
                .projection
                .iter()
                .zip(vals)
                .filter(|(_, &b)| b)
                .map(|(&v, _)| match f.key(v) {
                    VarKey::Atom(a) => a,
                    k => panic!("projection variable {v} is not an atom: {k:?}"),
                })
                .collect();
            (m, n.clone())
        })
        .collect()
}

/// Compares the projected models of `f` with the answer sets of `p`.
pub fn check_preservation(
    p: &Program,
    f: &CnfFormula,
    mode: PreservationMode,
    cap: usize,
) -> Result<PreservationReport, OracleError> {
    let expected: BTreeSet<Interpretation> = answer_sets(p, cap)?.into_iter().collect();
    let model_cap = 1 << 16;
    let (got, total): (BTreeMap<Interpretation, Option<BigUint>>, Option<BigUint>) = match mode {
        PreservationMode::Weak => {
            let (sets, complete) = projected_models(f, f.projection(), model_cap);
            if !complete {
                return Err(OracleError::CapExceeded(model_cap));
            }
            let summary = ModelSummary {
                projection: f.projection().to_vec(),
                models: sets.into_iter().map(|v| (v, BigUint::one())).collect(),
                total: BigUint::zero(),
                complete,
            };
            (projected_interpretations(f, &summary).into_keys().map(|m| (m, None)).collect(), None)
        }
        PreservationMode::Bijective => {
            let summary = enumerate_models(f, model_cap);
            if !summary.complete {
                return Err(OracleError::CapExceeded(model_cap));
            }
            let got = projected_interpretations(f, &summary).into_iter().map(|(m, n)| (m, Some(n))).collect();
            (got, Some(summary.total))
        }
    };
    let names = |m: &Interpretation| m.names(p).into_iter().map(String::from).collect::<Vec<_>>();
    let missing: Vec<Vec<String>> = expected.iter().filter(|m| !got.contains_key(m)).map(names).collect();
    let extra: Vec<Vec<String>> = got.keys().filter(|m| !expected.contains(m)).map(names).collect();
    let multiplicities: Vec<Multiplicity> = got
        .iter()
        .filter_map(|(m, n)| n.as_ref().map(|n| Multiplicity { answer_set: names(m), models: n.to_string() }))
        .collect();
    let mut ok = missing.is_empty() && extra.is_empty();
    if mode == PreservationMode::Bijective {
        ok &= got.values().all(|n| n.as_ref().is_some_and(|n| n.is_one()));
    }
    Ok(PreservationReport {
        status: if ok { "pass" } else { "fail" }.to_string(),
        mode,
        mismatches: Mismatches { missing, extra },
        multiplicities,
        counts: Counts {
            answer_sets: expected.len(),
            projected_models: got.len(),
            total_models: total.map(|t| t.to_string()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::parse_program;

    const EXAMPLE: &str = "a | b.\nc | e :- d.\nd :- b, not e.\ne :- b, not d.\nb :- e, not d.\nd :- not b.\n";

    fn show(p: &Program, sets: &[Interpretation]) -> Vec<String> {
        let mut v: Vec<String> = sets
            .iter()
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
    fn example_answer_sets() {
        let p = parse_program(EXAMPLE).unwrap();
        let want = vec!["acd", "ade", "bcd", "be"];
        assert_eq!(show(&p, &answer_sets_reduct(&p, 22).unwrap()), want);
        assert_eq!(show(&p, &answer_sets_proving(&p, 22).unwrap()), want);
        assert_eq!(show(&p, &answer_sets_search(&p, 100).unwrap()), want);
    }

    #[test]
    fn non_hcf_program() {
        let p = parse_program("a | b. a :- b. b :- a.").unwrap();
        assert_eq!(show(&p, &answer_sets_reduct(&p, 22).unwrap()), vec!["ab"]);
        assert_eq!(answer_sets_proving(&p, 22), Err(OracleError::NotHcf));
    }

    #[test]
    fn trivial_programs() {
        let empty = Program::new();
        assert_eq!(answer_sets_reduct(&empty, 22).unwrap(), vec![Interpretation::new()]);
        let p = parse_program("a :- not a.").unwrap();
        assert!(answer_sets_proving(&p, 22).unwrap().is_empty());
        assert!(answer_sets_search(&p, 10).unwrap().is_empty());
        assert!(matches!(answer_sets_reduct(&p, 0), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn proving_order_of_example() {
        let p = parse_program(EXAMPLE).unwrap();
        let order = proving_order(&p, &p.interpretation(&["b", "c", "d"])).unwrap();
        let named: Vec<(&str, usize)> = order.iter().map(|&(a, l)| (p.name(a), l)).collect();
        let mut named = named;
        named.sort();
        assert_eq!(named, vec![("b", 0), ("c", 2), ("d", 1)]);
        assert!(proving_order(&p, &p.interpretation(&["b", "d"])).is_none());
    }

    #[test]
    fn minimality_checks_agree_on_normal_programs() {
        let p = parse_program("a :- not b. b :- not a. c :- a. c :- d. d :- c, b.").unwrap();
        let x = answer_sets_reduct_with(&p, 22, Minimality::LeastModel, Execution::Sequential).unwrap();
        let y = answer_sets_reduct_with(&p, 22, Minimality::SubsetSearch, Execution::Parallel).unwrap();
        assert_eq!(x, y);
    }
}
