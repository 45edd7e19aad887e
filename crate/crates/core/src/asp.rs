//! Ground disjunctive programs: model, parser, graphs, classification, reduct.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Digraph, Graph};

/// Dense atom index into a program's atom table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom(pub u32);

impl Atom {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Vec<Atom>,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Vec<Atom>, pos: Vec<Atom>, neg: Vec<Atom>) -> Self {
        Rule { head: dedup(head), pos: dedup(pos), neg: dedup(neg) }
    }

    /// Atoms occurring anywhere in the rule, sorted and unique.
    pub fn atoms(&self) -> Vec<Atom> {
        let s: BTreeSet<Atom> = self.head.iter().chain(&self.pos).chain(&self.neg).copied().collect();
        s.into_iter().collect()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }
}

fn dedup(v: Vec<Atom>) -> Vec<Atom> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|a| seen.insert(*a)).collect()
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    names: Vec<String>,
    index: HashMap<String, Atom>,
    rules: Vec<Rule>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.rules == other.rules
    }
}

impl Eq for Program {}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AspError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("program is not head-cycle-free (rule {rule})")]
    NotHcf { rule: usize },
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, adding it to the table if new.
    pub fn intern(&mut self, name: &str) -> Atom {
        if let Some(&a) = self.index.get(name) {
            return a;
        }
        let a = Atom(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), a);
        a
    }

    pub fn lookup(&self, name: &str) -> Option<Atom> {
        self.index.get(name).copied()
    }

    pub fn name(&self, a: Atom) -> &str {
        &self.names[a.index()]
    }

    pub fn num_atoms(&self) -> usize {
        self.names.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        (0..self.names.len() as u32).map(Atom)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn add_rule(&mut self, rule: Rule) {
        assert!(
            rule.atoms().iter().all(|a| a.index() < self.names.len()),
            "rule refers to an unknown atom"
        );
        self.rules.push(rule);
    }

    /// Convenience for building rules by name.
    pub fn add(&mut self, head: &[&str], pos: &[&str], neg: &[&str]) {
        let h = head.iter().map(|n| self.intern(n)).collect();
        let p = pos.iter().map(|n| self.intern(n)).collect();
        let n = neg.iter().map(|n| self.intern(n)).collect();
        self.add_rule(Rule::new(h, p, n));
    }

    /// Same atom table, different rules.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Program {
        Program { names: self.names.clone(), index: self.index.clone(), rules }
    }

    /// Atoms that occur in some rule.
    pub fn used_atoms(&self) -> BTreeSet<Atom> {
        self.rules.iter().flat_map(|r| r.atoms()).collect()
    }

    pub fn interpretation(&self, names: &[&str]) -> Interpretation {
        names
            .iter()
            .map(|n| self.lookup(n).unwrap_or_else(|| panic!("unknown atom {n}")))
            .collect()
    }

    pub fn is_model(&self, m: &Interpretation) -> bool {
        self.rules.iter().all(|r| satisfies(r, m))
    }

    pub fn rule_to_string(&self, r: &Rule) -> String {
        let mut s = r.head.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(" | ");
        let body: Vec<String> = r
            .pos
            .iter()
            .map(|&a| self.name(a).to_string())
            .chain(r.neg.iter().map(|&a| format!("not {}", self.name(a))))
            .collect();
        if !body.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(":- ");
            s.push_str(&body.join(", "));
        }
        s.push('.');
        s
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}", self.rule_to_string(r))?;
        }
        Ok(())
    }
}

pub fn satisfies(r: &Rule, m: &Interpretation) -> bool {
    r.head.iter().chain(&r.neg).any(|a| m.contains(*a)) || r.pos.iter().any(|a| !m.contains(*a))
}

/// Set of atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Interpretation(BTreeSet<Atom>);

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: Atom) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: Atom) -> bool {
        self.0.remove(&a)
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset(&self, other: &Interpretation) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Bitmask form; requires all atom ids < 64.
    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0, |m, a| m | (1u64 << a.0))
    }

    pub fn from_mask(mask: u64) -> Self {
        (0..64).filter(|i| mask >> i & 1 == 1).map(Atom).collect()
    }

    pub fn names<'a>(&self, p: &'a Program) -> Vec<&'a str> {
        self.0.iter().map(|&a| p.name(a)).collect()
    }

    pub fn display(&self, p: &Program) -> String {
        format!("{{{}}}", self.names(p).join(","))
    }
}

impl FromIterator<Atom> for Interpretation {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        Interpretation(iter.into_iter().collect())
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Bar,
    If,
    Comma,
    Dot,
    Not,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> AspError {
        AspError::Syntax { line, column, message: message.into() }
    }

    /// Next token with its start position.
    fn next_tok(&mut self) -> Result<Option<(Tok, usize, usize)>, AspError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(_) => break,
            }
        }
        let (line, column) = (self.line, self.column);
        let c = self.bump().expect("peeked");
        let tok = match c {
            '|' => Tok::Bar,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ':' => {
                if self.chars.peek() == Some(&'-') {
                    self.bump();
                    Tok::If
                } else {
                    return Err(self.err(line, column, "expected ':-'"));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = c.to_string();
                while let Some(&d) = self.chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if s == "not" {
                    Tok::Not
                } else {
                    Tok::Ident(s)
                }
            }
            other => return Err(self.err(line, column, format!("unexpected character '{other}'"))),
        };
        Ok(Some((tok, line, column)))
    }
}

/// Parses the line-oriented rule format (`h1 | h2 :- b, not c.`).
pub fn parse_program(text: &str) -> Result<Program, AspError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: 1, column: 1 };
    let mut toks = Vec::new();
    while let Some(t) = lx.next_tok()? {
        toks.push(t);
    }
    let end = (lx.line, lx.column);
    let mut prog = Program::new();
    let mut i = 0;
    let err = |pos: Option<&(Tok, usize, usize)>, msg: &str| {
        let (line, column) = pos.map(|t| (t.1, t.2)).unwrap_or(end);
        AspError::Syntax { line, column, message: msg.to_string() }
    };
    while i < toks.len() {
        let mut head = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        // head
        if let Tok::Ident(_) = toks[i].0 {
            loop {
                match toks.get(i) {
                    Some((Tok::Ident(n), ..)) => {
                        head.push(prog.intern(n));
                        i += 1;
                    }
                    t => return Err(err(t, "expected atom in head")),
                }
                match toks.get(i) {
                    Some((Tok::Bar, ..)) => i += 1,
                    _ => break,
                }
            }
        }
        match toks.get(i) {
            Some((Tok::Dot, ..)) if !head.is_empty() => {
                i += 1;
            }
            Some((Tok::If, ..)) => {
                i += 1;
                loop {
                    let negated = matches!(toks.get(i), Some((Tok::Not, ..)));
                    if negated {
                        i += 1;
                    }
                    match toks.get(i) {
                        Some((Tok::Ident(n), ..)) => {
                            let a = prog.intern(n);
                            if negated { neg.push(a) } else { pos.push(a) }
                            i += 1;
                        }
                        t => return Err(err(t, "expected literal in body")),
                    }
                    match toks.get(i) {
                        Some((Tok::Comma, ..)) => i += 1,
                        Some((Tok::Dot, ..)) => {
                            i += 1;
                            break;
                        }
                        t => return Err(err(t, "expected ',' or '.'")),
                    }
                }
            }
            t => return Err(err(t, "expected ':-' or '.'")),
        }
        prog.rules.push(Rule::new(head, pos, neg));
    }
    Ok(prog)
}

// ---------------------------------------------------------------- graphs

/// Primal graph: atoms as vertices, edges between atoms sharing a rule.
pub fn primal_graph(p: &Program) -> Graph {
    let mut g = Graph::new(p.num_atoms());
    for r in &p.rules {
        let at: Vec<usize> = r.atoms().iter().map(|a| a.index()).collect();
        g.add_clique(&at);
    }
    g
}

/// Positive dependency digraph: arc b -> h for b in the positive body, h in the head.
pub fn dependency_digraph(p: &Program) -> Digraph {
    let mut d = Digraph::new(p.num_atoms());
    for r in &p.rules {
        for b in &r.pos {
            for h in &r.head {
                d.add_arc(b.index(), h.index());
            }
        }
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProgramClass {
    pub is_normal: bool,
    pub is_unary: bool,
    pub is_tight: bool,
    pub is_hcf: bool,
}

pub fn classify(p: &Program) -> ProgramClass {
    let d = dependency_digraph(p);
    ProgramClass {
        is_normal: p.rules.iter().all(|r| r.head.len() <= 1),
        is_unary: p.rules.iter().all(|r| r.pos.len() <= 1),
        is_tight: d.is_acyclic(),
        is_hcf: first_head_cycle(p, &d).is_none(),
    }
}

fn first_head_cycle(p: &Program, d: &Digraph) -> Option<usize> {
    let comp = d.scc_ids();
    p.rules.iter().position(|r| {
        r.head.len() >= 2
            && r.head
                .iter()
                .enumerate()
                .any(|(i, a)| r.head[i + 1..].iter().any(|b| comp[a.index()] == comp[b.index()]))
    })
}

/// Gelfond-Lifschitz reduct: drop rules blocked by `m`, then drop negative literals.
pub fn gl_reduct(p: &Program, m: &Interpretation) -> Program {
    let rules = p
        .rules
        .iter()
        .filter(|r| !r.neg.iter().any(|a| m.contains(*a)))
        .map(|r| Rule { head: r.head.clone(), pos: r.pos.clone(), neg: Vec::new() })
        .collect();
    p.with_rules(rules)
}

/// Rewrites disjunctive heads into negative bodies. Only sound for HCF programs.
pub fn shift_hcf(p: &Program) -> Result<Program, AspError> {
    if let Some(rule) = first_head_cycle(p, &dependency_digraph(p)) {
        return Err(AspError::NotHcf { rule });
    }
    let mut rules = Vec::new();
    for r in &p.rules {
        if r.head.len() <= 1 {
            rules.push(r.clone());
            continue;
        }
        for &h in &r.head {
            let mut neg = r.neg.clone();
            neg.extend(r.head.iter().copied().filter(|&a| a != h));
            rules.push(Rule::new(vec![h], r.pos.clone(), neg));
        }
    }
    Ok(p.with_rules(rules))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const EXAMPLE: &str = "a | b.\nc | e :- d.\nd :- b, not e.\ne :- b, not d.\nb :- e, not d.\nd :- not b.\n";

    #[test]
    fn parses_example_program() {
        let p = parse_program(EXAMPLE).unwrap();
        assert_eq!(p.num_atoms(), 5);
        assert_eq!(p.rules().len(), 6);
        let names: Vec<_> = p.atoms().map(|a| p.name(a).to_string()).collect();
        assert_eq!(names, ["a", "b", "c", "e", "d"]);
    }

    #[test]
    fn parses_empty_and_self_negation() {
        assert_eq!(parse_program("").unwrap().rules().len(), 0);
        let p = parse_program("a :- not a.").unwrap();
        let a = p.lookup("a").unwrap();
        assert_eq!(p.rules()[0], Rule::new(vec![a], vec![], vec![a]));
    }

    #[test]
    fn rejects_empty_rule_with_position() {
        let e = parse_program("a.\n  :- .").unwrap_err();
        assert_eq!(e, AspError::Syntax { line: 2, column: 6, message: "expected literal in body".into() });
        assert!(matches!(parse_program("a :- b"), Err(AspError::Syntax { line: 1, .. })));
        assert!(matches!(parse_program("a # b."), Err(AspError::Syntax { line: 1, column: 3, .. })));
    }

    #[test]
    fn comments_and_duplicates() {
        let p = parse_program("% header\na. % fact\na.\n:- a, not b.").unwrap();
        assert_eq!(p.rules().len(), 3);
        assert!(p.rules()[2].is_constraint());
    }

    #[test]
    fn display_round_trips() {
        let p = parse_program(EXAMPLE).unwrap();
        let q = parse_program(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn example_graphs() {
        let p = parse_program(EXAMPLE).unwrap();
        let id = |n| p.lookup(n).unwrap().index();
        let g = primal_graph(&p);
        let mut want: Vec<(usize, usize)> = [("a", "b"), ("c", "e"), ("c", "d"), ("d", "e"), ("b", "d"), ("b", "e")]
            .iter()
            .map(|(x, y)| (id(x).min(id(y)), id(x).max(id(y))))
            .collect();
        want.sort();
        assert_eq!(g.edges().collect::<Vec<_>>(), want);
        let d = dependency_digraph(&p);
        assert_eq!(d.num_arcs(), 5);
        for (x, y) in [("d", "c"), ("d", "e"), ("b", "d"), ("b", "e"), ("e", "b")] {
            assert!(d.has_arc(id(x), id(y)));
        }
    }

    #[test]
    fn classification() {
        let p = parse_program(EXAMPLE).unwrap();
        let c = classify(&p);
        assert!(!c.is_normal && !c.is_tight && c.is_hcf);
        let q = parse_program("a | b. a :- b. b :- a.").unwrap();
        assert!(!classify(&q).is_hcf);
        let t = classify(&parse_program("a :- not b. b :- not a.").unwrap());
        assert!(t.is_tight && t.is_hcf && t.is_normal);
    }

    #[test]
    fn reduct_of_example() {
        let p = parse_program(EXAMPLE).unwrap();
        let r = gl_reduct(&p, &p.interpretation(&["b", "c", "d"]));
        assert_eq!(r.to_string(), "a | b.\nc | e :- d.\nd :- b.\n");
        let q = parse_program("a :- not a.").unwrap();
        assert!(gl_reduct(&q, &q.interpretation(&["a"])).rules().is_empty());
    }

    #[test]
    fn shifting() {
        let p = parse_program("a | b.\nc | e :- d.\nx :- y.").unwrap();
        let s = shift_hcf(&p).unwrap();
        assert_eq!(s.to_string(), "a :- not b.\nb :- not a.\nc :- d, not e.\ne :- d, not c.\nx :- y.\n");
        let q = parse_program("a | b. a :- b. b :- a.").unwrap();
        assert_eq!(shift_hcf(&q), Err(AspError::NotHcf { rule: 0 }));
    }

    #[test]
    fn model_check() {
        let p = parse_program(EXAMPLE).unwrap();
        assert!(p.is_model(&p.interpretation(&["b", "c", "d"])));
        assert!(!p.is_model(&p.interpretation(&["b"])));
    }
}
