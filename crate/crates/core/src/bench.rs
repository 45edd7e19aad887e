//! Width measurements of translations over generated corpora.

use std::time::Instant;

use serde::Serialize;

use crate::asp::{primal_graph, Program};
use crate::baselines::{clark_completion, global_translation};
use crate::bijective::{translate_bijective_split, BijectiveOptions};
use crate::cnf::CnfFormula;
use crate::gen::{gen_corpus, Scenario};
use crate::ordered::{translate_ordered, OrderedOptions};
use crate::par::Execution;
use crate::td::{assign_rules, decompose_heuristic, Heuristic};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BenchTranslation {
    /// No translation: the input's own width.
    #[serde(rename = "-")]
    Identity,
    #[serde(rename = "ordered")]
    Ordered,
    #[serde(rename = "bijective")]
    Bijective,
    #[serde(rename = "completion")]
    Completion,
    #[serde(rename = "global")]
    Global,
}

impl BenchTranslation {
    pub fn label(self) -> &'static str {
        match self {
            BenchTranslation::Identity => "-",
            BenchTranslation::Ordered => "ordered",
            BenchTranslation::Bijective => "bijective",
            BenchTranslation::Completion => "completion",
            BenchTranslation::Global => "global",
        }
    }

    pub fn for_scenario(s: Scenario) -> Vec<BenchTranslation> {
        use BenchTranslation::*;
        match s {
            Scenario::S1 => vec![Identity, Ordered, Bijective, Completion, Global],
            Scenario::S2 => vec![Identity, Ordered, Bijective],
            Scenario::S2b => vec![Identity, Ordered, Global],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub id: usize,
    pub input_width: usize,
    pub output_width: Option<usize>,
    pub vars: usize,
    pub clauses: usize,
    pub ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WidthReport {
    pub schema: u32,
    pub scenario: Scenario,
    pub translation: BenchTranslation,
    pub count: usize,
    pub min: Option<usize>,
    pub max: Option<usize>,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub stddev: Option<f64>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy, Debug)]
pub struct BenchOptions {
    pub heuristic: Heuristic,
    pub seed: u64,
    /// Record wall time per row; off gives byte-identical reports.
    pub timing: bool,
    pub exec: Execution,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { heuristic: Heuristic::MinFill, seed: 0, timing: true, exec: Execution::default() }
    }
}

/// Summary statistics of the successful rows.
pub fn summarize(
    scenario: Scenario,
    translation: BenchTranslation,
    mut rows: Vec<Row>,
) -> WidthReport {
    rows.sort_by_key(|r| r.id);
    let mut w: Vec<usize> = rows.iter().filter_map(|r| r.output_width).collect();
    w.sort_unstable();
    let (mean, median, stddev) = if w.is_empty() {
        (None, None, None)
    } else {
        let n = w.len() as f64;
        let mean = w.iter().sum::<usize>() as f64 / n;
        let median = if w.len() % 2 == 1 {
            w[w.len() / 2] as f64
        } else {
            (w[w.len() / 2 - 1] + w[w.len() / 2]) as f64 / 2.0
        };
        let var = w.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n;
        (Some(mean), Some(median), Some(var.sqrt()))
    };
    WidthReport {
        schema: SCHEMA,
        scenario,
        translation,
        count: rows.len(),
        min: w.first().copied(),
        max: w.last().copied(),
        mean,
        median,
        stddev,
        rows,
    }
}

fn measure(id: usize, p: &Program, tr: BenchTranslation, opts: &BenchOptions) -> Row {
    let start = Instant::now();
    let td = decompose_heuristic(&primal_graph(p), opts.heuristic, opts.seed);
    let input_width = td.width();
    let mut row = Row { id, input_width, output_width: None, vars: 0, clauses: 0, ms: None, error: None };
    let cnf: Result<Option<CnfFormula>, String> = (|| {
        let assign = assign_rules(p, &td).map_err(|e| e.to_string())?;
        let f = match tr {
            BenchTranslation::Identity => return Ok(None),
            BenchTranslation::Ordered => {
                let o = OrderedOptions { seed: opts.seed, ..Default::default() };
                translate_ordered(p, &td, &assign, &o).map_err(|e| e.to_string())?.cnf
            }
            BenchTranslation::Bijective => {
                let o = BijectiveOptions { seed: opts.seed, ..Default::default() };
                translate_bijective_split(p, &td, &assign, &o).map_err(|e| e.to_string())?.cnf
            }
            BenchTranslation::Completion => clark_completion(p).map_err(|e| e.to_string())?,
            BenchTranslation::Global => {
                let o = OrderedOptions { seed: opts.seed, ..Default::default() };
                global_translation(p, &o).map_err(|e| e.to_string())?.cnf
            }
        };
        Ok(Some(f))
    })();
    match cnf {
        Ok(None) => {
            row.output_width = Some(input_width);
            row.vars = p.num_atoms();
            row.clauses = p.rules().len();
        }
        Ok(Some(f)) => {
            row.output_width = Some(decompose_heuristic(&f.primal_graph(), opts.heuristic, opts.seed).width());
            row.vars = f.num_vars();
            row.clauses = f.num_clauses();
        }
        Err(e) => row.error = Some(e),
    }
    if opts.timing {
        row.ms = Some((start.elapsed().as_secs_f64() * 1000.0 * 1000.0).round() / 1000.0);
    }
    row
}

/// One report per translation over `corpus`.
pub fn bench_widths(
    scenario: Scenario,
    corpus: &[Program],
    translations: &[BenchTranslation],
    opts: &BenchOptions,
) -> Vec<WidthReport> {
    translations
        .iter()
        .map(|&tr| {
            let items: Vec<(usize, &Program)> = corpus.iter().enumerate().collect();
            let rows = opts.exec.map(items, |(id, p)| measure(id, p, tr, opts));
            summarize(scenario, tr, rows)
        })
        .collect()
}

/// Generates the scenario's corpus and measures its default translations.
pub fn bench_scenario(scenario: Scenario, count: usize, corpus_seed: u64, opts: &BenchOptions) -> Vec<WidthReport> {
    let corpus = gen_corpus(scenario, corpus_seed, count);
    bench_widths(scenario, &corpus, &BenchTranslation::for_scenario(scenario), opts)
}

/// A warning when local positions give a larger mean width than shared ones.
pub fn local_vs_global_warning(reports: &[WidthReport]) -> Option<String> {
    let mean = |t: BenchTranslation| reports.iter().find(|r| r.translation == t).and_then(|r| r.mean);
    let (local, global) = (mean(BenchTranslation::Ordered)?, mean(BenchTranslation::Global)?);
    (local > global).then(|| format!("mean width with local positions ({local:.2}) exceeds shared positions ({global:.2})"))
}
