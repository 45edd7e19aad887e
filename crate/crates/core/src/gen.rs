//! Seeded random programs and benchmark corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asp::{classify, Atom, Program, Rule};
use crate::td::TreeDecomposition;

/// Atom names `a`..`z`, then `x26`, `x27`, ...
pub fn atom_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

fn with_atoms(n: usize) -> Program {
    let mut p = Program::new();
    for i in 0..n {
        p.intern(&atom_name(i));
    }
    p
}

fn pick(rng: &mut ChaCha8Rng, pool: &[usize], k: usize) -> Vec<Atom> {
    let mut v: Vec<usize> = pool.choose_multiple(rng, k.min(pool.len())).copied().collect();
    v.sort_unstable();
    v.into_iter().map(|i| Atom(i as u32)).collect()
}

/// Shape of generated rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProgramShape {
    pub atoms: usize,
    pub rules: usize,
    /// Largest head; 1 gives normal programs.
    pub max_head: usize,
    pub max_pos: usize,
    pub max_neg: usize,
    /// Chance (in percent) of a rule being a constraint.
    pub constraint_percent: u32,
}

impl ProgramShape {
    pub fn small(atoms: usize, rules: usize) -> Self {
        ProgramShape { atoms, rules, max_head: 2, max_pos: 2, max_neg: 2, constraint_percent: 10 }
    }
}

/// Rules over windows of `window` consecutive atoms, so the program has a
/// path decomposition of width `window - 1`. With `tight`, positive bodies
/// only use atoms ordered before the head under a hidden permutation of each
/// window's atoms; with `max_head == 1` the program is normal.
fn windowed(seed: u64, shape: ProgramShape, window: usize, tight: bool) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.atoms;
    let mut p = with_atoms(n);
    if n == 0 {
        return p;
    }
    let window = window.clamp(1, n);
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut rng);
    for _ in 0..shape.rules {
        let start = rng.gen_range(0..=n - window);
        let pool: Vec<usize> = (start..start + window).collect();
        let constraint = rng.gen_ratio(shape.constraint_percent.min(100), 100);
        let nh = if constraint { 0 } else { rng.gen_range(1..=shape.max_head.max(1)) };
        let head = pick(&mut rng, &pool, nh);
        let rest: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&i| !head.contains(&Atom(i as u32)))
            .filter(|&i| !tight || head.iter().all(|h| rank[i] < rank[h.index()]))
            .collect();
        let np = rng.gen_range(0..=shape.max_pos);
        let pos = pick(&mut rng, &rest, np);
        let rest: Vec<usize> = pool.iter().copied().filter(|&i| !pos.contains(&Atom(i as u32))).collect();
        // a constraint keeps at least one body literal
        let nn = if head.is_empty() && pos.is_empty() {
            rng.gen_range(1..=shape.max_neg.max(1))
        } else {
            rng.gen_range(0..=shape.max_neg)
        };
        let neg = pick(&mut rng, &rest, nn);
        p.add_rule(Rule::new(head, pos, neg));
    }
    p
}

/// Random head-cycle-free program; draws are repeated with derived seeds
/// until the program is HCF (it falls back to a normal one after 64 tries).
pub fn random_hcf_program(seed: u64, shape: ProgramShape) -> Program {
    random_hcf_windowed(seed, shape, shape.atoms)
}

pub fn random_hcf_windowed(seed: u64, shape: ProgramShape, window: usize) -> Program {
    for attempt in 0..64u64 {
        let p = windowed(seed.wrapping_mul(0x9e37_79b9).wrapping_add(attempt), shape, window, false);
        if classify(&p).is_hcf {
            return p;
        }
    }
    windowed(seed, ProgramShape { max_head: 1, ..shape }, window, false)
}

/// Random tight normal program.
pub fn random_tight_program(seed: u64, shape: ProgramShape) -> Program {
    random_tight_windowed(seed, shape, shape.atoms)
}

pub fn random_tight_windowed(seed: u64, shape: ProgramShape, window: usize) -> Program {
    windowed(seed, ProgramShape { max_head: 1, ..shape }, window, true)
}

/// Path decomposition with bags `{i, .., i + window - 1}`.
pub fn window_td(atoms: usize, window: usize) -> TreeDecomposition {
    if atoms == 0 {
        return TreeDecomposition::single_bag(0);
    }
    let window = window.clamp(1, atoms);
    let count = atoms - window + 1;
    let bags = (0..count).map(|i| (i..i + window).collect()).collect();
    let parent = (0..count).map(|i| (i + 1 < count).then_some(i + 1)).collect();
    TreeDecomposition::new(atoms, bags, parent).expect("path of windows")
}

/// Reachability from the first to the last vertex over a guessed subset of
/// arcs.
pub fn reachability_program(num_vertices: usize, arcs: &[(usize, usize)]) -> Program {
    let mut p = Program::new();
    if num_vertices == 0 {
        return p;
    }
    let r = |v: usize| format!("r{}", v + 1);
    for &(u, v) in arcs {
        let (e, ne) = (format!("e{}_{}", u + 1, v + 1), format!("ne{}_{}", u + 1, v + 1));
        p.add(&[&e], &[], &[&ne]);
        p.add(&[&ne], &[], &[&e]);
        p.add(&[&r(v)], &[&r(u), &e], &[]);
    }
    p.add(&[&r(0)], &[], &[]);
    p.add(&[], &[], &[&r(num_vertices - 1)]);
    p
}

/// Grid with arcs in both directions between neighbours.
pub fn grid_arcs(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let id = |r: usize, c: usize| r * cols + c;
    let mut arcs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                arcs.push((id(r, c), id(r, c + 1)));
                arcs.push((id(r, c + 1), id(r, c)));
            }
            if r + 1 < rows {
                arcs.push((id(r, c), id(r + 1, c)));
                arcs.push((id(r + 1, c), id(r, c)));
            }
        }
    }
    arcs
}

/// Random digraph: a directed cycle through all vertices plus `extra` arcs
/// between vertices at most `reach` apart.
pub fn sparse_arcs(rng: &mut ChaCha8Rng, n: usize, extra: usize, reach: usize) -> Vec<(usize, usize)> {
    let mut arcs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).filter(|&(u, v)| u != v).collect();
    for _ in 0..extra * 4 {
        if arcs.len() >= n + extra || n < 3 {
            break;
        }
        let u = rng.gen_range(0..n);
        let d = rng.gen_range(1..=reach.max(1));
        let v = if rng.gen_bool(0.5) { (u + d) % n } else { (u + n - d % n) % n };
        if u != v && !arcs.contains(&(u, v)) {
            arcs.push((u, v));
        }
    }
    arcs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Tight programs.
    S1,
    /// Reachability over grids and sparse digraphs.
    S2,
    /// The reachability corpus, translated with shared positions as well.
    S2b,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S2b => "s2b",
        }
    }

    pub fn parse(s: &str) -> Option<Scenario> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Some(Scenario::S1),
            "s2" => Some(Scenario::S2),
            "s2b" => Some(Scenario::S2b),
            _ => None,
        }
    }
}

/// Deterministic corpus of `count` programs for a scenario.
pub fn gen_corpus(scenario: Scenario, seed: u64, count: usize) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| match scenario {
            Scenario::S1 => {
                let atoms = rng.gen_range(6..=14);
                let shape = ProgramShape { atoms, rules: atoms + rng.gen_range(0..=atoms), ..ProgramShape::small(atoms, 0) };
                random_tight_windowed(rng.gen(), shape, rng.gen_range(3..=5))
            }
            Scenario::S2 | Scenario::S2b => {
                if rng.gen_bool(0.5) {
                    let rows = rng.gen_range(2..=3);
                    let cols = rng.gen_range(2..=3);
                    reachability_program(rows * cols, &grid_arcs(rows, cols))
                } else {
                    let n = rng.gen_range(4..=8);
                    let arcs = sparse_arcs(&mut rng, n, n / 2, 2);
                    reachability_program(n, &arcs)
                }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::primal_graph;
    use crate::td::validate_td;

    #[test]
    fn generated_programs_have_requested_class() {
        for seed in 0..50 {
            let p = random_tight_program(seed, ProgramShape::small(8, 10));
            let c = classify(&p);
            assert!(c.is_tight && c.is_normal);
            assert!(classify(&random_hcf_program(seed, ProgramShape::small(8, 10))).is_hcf);
            let w = random_hcf_windowed(seed, ProgramShape::small(12, 12), 4);
            assert!(validate_td(&primal_graph(&w), &window_td(12, 4)).is_valid());
        }
    }

    #[test]
    fn corpora() {
        let s1 = gen_corpus(Scenario::S1, 7, 3);
        assert_eq!(s1.len(), 3);
        assert!(s1.iter().all(|p| classify(p).is_tight));
        assert!(gen_corpus(Scenario::S2, 1, 0).is_empty());
        let g = reachability_program(9, &grid_arcs(3, 3));
        let c = classify(&g);
        assert!(c.is_normal && !c.is_tight);
        assert_eq!(gen_corpus(Scenario::S2, 3, 4).iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            gen_corpus(Scenario::S2b, 3, 4).iter().map(|p| p.to_string()).collect::<Vec<_>>());
    }
}
