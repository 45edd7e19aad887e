//! Treewidth-aware translations from head-cycle-free disjunctive programs to CNF.

pub mod asp;
pub mod graph;
pub mod td;
pub mod cnf;
pub mod par;
pub mod models;
pub mod oracles;
pub mod reduction;
pub mod ordered;
pub mod bijective;
pub mod baselines;
pub mod hardness;
pub mod gen;
pub mod bench;
