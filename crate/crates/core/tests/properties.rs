use std::collections::BTreeSet;

use proptest::prelude::*;

use twsat::asp::{classify, parse_program, primal_graph, Atom, Program};
use twsat::bijective::{translate_bijective_split, BijectiveOptions};
use twsat::cnf::{certify_width, CnfFormula, OrderScope, VarKey, WidthRegime};
use twsat::gen::{random_hcf_program, random_tight_program, ProgramShape};
use twsat::hardness::{djp_bruteforce_solve, djp_parse, djp_to_program, djp_write, random_djp, DjpSizes};
use twsat::models::{count_models, free_inclusion, projected_models, Inclusion};
use twsat::oracles::{answer_sets, answer_sets_proving_with, answer_sets_reduct, DEFAULT_ATOM_CAP};
use twsat::ordered::{translate_ordered, OrderedOptions};
use twsat::par::Execution;
use twsat::td::{assign_rules, decompose_heuristic, make_nice, read_pace, validate_td, write_pace, Heuristic};
use twsat::td::TreeDecomposition;

fn heuristic() -> impl Strategy<Value = Heuristic> {
    prop_oneof![Just(Heuristic::MinFill), Just(Heuristic::MinDegree)]
}

fn hcf() -> impl Strategy<Value = Program> {
    (any::<u64>(), 1usize..7, 1usize..9).prop_map(|(s, a, r)| random_hcf_program(s, ProgramShape::small(a, r)))
}

fn tight() -> impl Strategy<Value = Program> {
    (any::<u64>(), 1usize..7, 1usize..9).prop_map(|(s, a, r)| random_tight_program(s, ProgramShape::small(a, r)))
}

fn decompose(p: &Program, h: Heuristic, seed: u64, nice: bool) -> TreeDecomposition {
    let td = decompose_heuristic(&primal_graph(p), h, seed);
    if nice {
        make_nice(&td).into_td()
    } else {
        td
    }
}

fn atom_sets(p: &Program, f: &CnfFormula) -> BTreeSet<BTreeSet<String>> {
    let (models, complete) = projected_models(f, f.projection(), 1 << 14);
    assert!(complete);
    let atoms: Vec<Atom> = f
        .projection()
        .iter()
        .map(|&v| match f.key(v) {
            VarKey::Atom(a) => a,
            k => panic!("non-atom {k:?} in projection"),
        })
        .collect();
    models
        .iter()
        .map(|vals| atoms.iter().zip(vals).filter(|(_, &b)| b).map(|(&a, _)| p.name(a).to_string()).collect())
        .collect()
}

fn answer_set_names(p: &Program) -> BTreeSet<BTreeSet<String>> {
    answer_sets(p, DEFAULT_ATOM_CAP).unwrap().iter().map(|m| m.names(p).into_iter().map(String::from).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn program_text_round_trips(p in hcf()) {
        let q = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(q.to_string(), p.to_string());
    }

    #[test]
    fn heuristic_decompositions_are_valid(p in hcf(), h in heuristic(), seed in any::<u64>()) {
        let g = primal_graph(&p);
        let td = decompose_heuristic(&g, h, seed);
        prop_assert!(validate_td(&g, &td).is_valid());
        let nice = make_nice(&td);
        prop_assert!(nice.audit().is_ok());
        prop_assert!(validate_td(&g, nice.td()).is_valid());
        prop_assert_eq!(nice.td().width(), td.width());
        let back = read_pace(&write_pace(&td), Some(td.root() + 1)).unwrap();
        prop_assert_eq!(back.bags(), td.bags());
    }

    #[test]
    fn ordered_projection_matches_answer_sets(
        p in hcf(), h in heuristic(), seed in any::<u64>(), nice in any::<bool>(), global in any::<bool>()
    ) {
        let td = decompose(&p, h, seed, nice);
        let scope = if global { OrderScope::Global } else { OrderScope::Local };
        let t = translate_ordered(&p, &td, &assign_rules(&p, &td).unwrap(), &OrderedOptions { scope, ..Default::default() }).unwrap();
        prop_assert_eq!(atom_sets(&p, &t.cnf), answer_set_names(&p));
        if !global {
            prop_assert!(certify_width(&t.cnf, &t.witness, td.width(), WidthRegime::KLogK).is_ok());
        }
    }

    #[test]
    fn strengthening_only_removes_models(p in hcf(), h in heuristic(), seed in any::<u64>()) {
        let td = decompose(&p, h, seed, false);
        let assign = assign_rules(&p, &td).unwrap();
        let plain = translate_ordered(&p, &td, &assign, &OrderedOptions::default()).unwrap().cnf;
        let strong = translate_ordered(&p, &td, &assign, &OrderedOptions { strengthen: true, ..Default::default() }).unwrap().cnf;
        prop_assert_eq!(free_inclusion(&strong, &plain), Inclusion::Holds);
        prop_assert_eq!(atom_sets(&p, &strong), atom_sets(&p, &plain));
    }

    #[test]
    fn bijective_counts_answer_sets(p in tight(), h in heuristic(), seed in any::<u64>()) {
        prop_assume!(classify(&p).is_tight);
        let td = decompose(&p, h, seed, seed % 2 == 0);
        let t = translate_bijective_split(&p, &td, &assign_rules(&p, &td).unwrap(), &BijectiveOptions::default()).unwrap();
        let want = answer_sets_reduct(&p, DEFAULT_ATOM_CAP).unwrap().len();
        prop_assert_eq!(count_models(&t.cnf, &[]), want.into());
        prop_assert!(certify_width(&t.cnf, &t.witness, td.width(), WidthRegime::KSquared).is_ok());
    }

    #[test]
    fn answer_set_characterizations_agree(p in hcf()) {
        let reduct = answer_sets_reduct(&p, DEFAULT_ATOM_CAP).unwrap();
        prop_assert_eq!(&answer_sets_proving_with(&p, DEFAULT_ATOM_CAP, Execution::Sequential).unwrap(), &reduct);
        prop_assert_eq!(&answer_sets_proving_with(&p, DEFAULT_ATOM_CAP, Execution::Parallel).unwrap(), &reduct);
    }

    #[test]
    fn hardness_program_is_consistent_iff_paths_exist(
        seed in any::<u64>(), vertices in 2usize..6, arcs in 0usize..7, pairs in 1usize..3
    ) {
        let inst = random_djp(seed, DjpSizes { vertices, arcs, pairs });
        prop_assert_eq!(djp_parse(&djp_write(&inst)).unwrap(), inst.clone());
        let red = djp_to_program(&inst, None, seed);
        prop_assume!(red.program.num_atoms() <= DEFAULT_ATOM_CAP);
        let solvable = djp_bruteforce_solve(&inst).unwrap().is_some();
        prop_assert_eq!(!answer_sets(&red.program, DEFAULT_ATOM_CAP).unwrap().is_empty(), solvable);
    }
}
