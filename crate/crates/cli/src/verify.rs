//! Self-check suites behind `treewilf verify`.

use std::collections::HashMap;
use std::fmt;

use clap::ValueEnum;
use rayon::prelude::*;
use treewilf_core::elim::certificate;
use treewilf_core::grammar::{self, Grammar};
use treewilf_core::oracle;
use treewilf_core::systems::{self, Weights};
use treewilf_core::wilf::{self, ClassifyOptions};
use treewilf_core::{av_series, en_series, enumerate_binary_patterns, series, Alphabet, PatternSet, Tree};

use crate::inputs::parse_word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Oracle,
    Grammar,
    Partition,
    Mirror,
    Systems,
    #[value(alias = "eq12")]
    Divisibility,
    Crosscheck,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

pub struct VerifyConfig {
    pub max_leaves: usize,
    pub max_nodes: usize,
    pub patterns: Option<String>,
    pub max_len: usize,
    pub order: usize,
    pub workers: Option<usize>,
}

pub struct Outcome {
    pub suite: Suite,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(suite: Suite, failures: &[String], checked: usize, what: &str) -> Self {
        let detail = match failures.first() {
            None => format!("{checked} {what} checked"),
            Some(first) => format!("{} of {checked} {what} failed; first: {first}", failures.len()),
        };
        Outcome { suite, passed: failures.is_empty(), detail }
    }
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> anyhow::Result<Vec<Outcome>> {
    let suites = match suite {
        Suite::All => vec![
            Suite::Oracle,
            Suite::Grammar,
            Suite::Partition,
            Suite::Mirror,
            Suite::Systems,
            Suite::Divisibility,
            Suite::Crosscheck,
        ],
        s => vec![s],
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build()?;
    pool.install(|| {
        suites
            .into_iter()
            .map(|s| {
                let start = std::time::Instant::now();
                let out = match s {
                    Suite::Oracle => oracle_suite(cfg),
                    Suite::Grammar => grammar_suite(cfg),
                    Suite::Partition => partition_suite(cfg),
                    Suite::Mirror => mirror_suite(cfg),
                    Suite::Systems => systems_suite(cfg),
                    Suite::Divisibility => divisibility_suite(cfg),
                    Suite::Crosscheck => crosscheck_suite(cfg),
                    Suite::All => unreachable!(),
                };
                eprintln!("[verify] {s} finished in {:.1}s", start.elapsed().as_secs_f64());
                out
            })
            .collect()
    })
}

fn binary_patterns(max_leaves: usize) -> Vec<Tree> {
    (2..=max_leaves).flat_map(enumerate_binary_patterns).collect()
}

fn mixed_alphabet() -> Alphabet {
    Alphabet::parse("x:0,m:2,t:3").expect("valid alphabet")
}

/// Pattern sets for the grammar and partition suites: the explicit
/// `--pattern` list, or a default family over both alphabets.
fn pattern_sets(cfg: &VerifyConfig, max_height: usize) -> anyhow::Result<Vec<PatternSet>> {
    if let Some(list) = &cfg.patterns {
        let binary = Alphabet::binary();
        let words: Vec<&str> = list.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
        let alphabet = if words.iter().all(|w| Tree::parse(w, &binary).is_ok()) { binary } else { mixed_alphabet() };
        let trees = words.iter().map(|w| parse_word(w, &alphabet)).collect::<anyhow::Result<Vec<_>>>()?;
        return Ok(vec![PatternSet::new(alphabet, trees)?]);
    }
    let mut sets = vec![PatternSet::empty(Alphabet::binary())];
    let small: Vec<Tree> = binary_patterns(cfg.max_leaves).into_iter().filter(|p| p.height() <= max_height).collect();
    for p in &small {
        sets.push(PatternSet::single(Alphabet::binary(), p.clone())?);
    }
    for pair in small.windows(2).step_by(3) {
        sets.push(PatternSet::new(Alphabet::binary(), pair.to_vec())?);
    }
    let mixed = mixed_alphabet();
    for words in ["txxx", "mxx", "mtxxxx", "txmxxx,mmxxx", "ttxxxxx"] {
        sets.push(PatternSet::parse(mixed.clone(), words)?);
    }
    Ok(sets)
}

fn describe(set: &PatternSet) -> String {
    let words: Vec<String> = set.patterns().iter().map(Tree::polish).collect();
    format!("{{{}}}", words.join(","))
}

fn oracle_suite(cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    let patterns = binary_patterns(cfg.max_leaves);
    let binary = Alphabet::binary();
    let trees: Vec<Tree> = oracle::enumerate_trees(&binary, cfg.max_nodes).collect();
    let order = 2 * cfg.max_nodes + 1;
    let results: Vec<anyhow::Result<Vec<String>>> = patterns
        .par_iter()
        .map(|p| {
            let mut hist: HashMap<(usize, usize), u64> = HashMap::new();
            for t in &trees {
                *hist.entry((t.vertex_count(), t.count_occurrences(p))).or_insert(0) += 1;
            }
            let en = en_series(p, order)?;
            let av = av_series(p, order)?;
            let mut bad = Vec::new();
            if !en.is_nonnegative() || !av.is_nonnegative() {
                bad.push(format!("{p}: negative coefficient"));
            }
            for n in 0..=order {
                let occurrences = hist.iter().filter(|((m, _), _)| *m == n).map(|((_, k), _)| *k).max().unwrap_or(0);
                for k in 0..=occurrences.max(1) {
                    let want = hist.get(&(n, k)).copied().unwrap_or(0);
                    if en.coeff(n, k) != want.into() {
                        bad.push(format!("{p}: En coefficient x^{n} y^{k} is {}, oracle {want}", en.coeff(n, k)));
                    }
                }
                let want = hist.get(&(n, 0)).copied().unwrap_or(0);
                if *av.coeff(n) != want.into() {
                    bad.push(format!("{p}: Av coefficient x^{n} is {}, oracle {want}", av.coeff(n)));
                }
            }
            if en.terms().any(|(n, k, _)| !hist.contains_key(&(n, k))) {
                bad.push(format!("{p}: En has a term the oracle never saw"));
            }
            Ok(bad)
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        failures.extend(r?);
    }

    // Avoidance over the mixed alphabet.
    let mixed = mixed_alphabet();
    let max_mixed = cfg.max_nodes.min(5);
    let mut checked = patterns.len();
    for words in ["txxx", "mxx", "tmxxxx", "mtxxxx,txmxxx", "mmxxx"] {
        let set = PatternSet::parse(mixed.clone(), words)?;
        let want = oracle::count_avoiders(&mixed, &set, max_mixed);
        let got = series::solve_target(&systems::avoidance_system(&set)?, 3 * max_mixed + 1)?;
        let got = got.as_uni().expect("univariate");
        for (&n, &c) in &want {
            if n <= 2 * max_mixed + 1 && *got.coeff(n) != c.into() {
                failures.push(format!("{}: Av coefficient x^{n} is {}, oracle {c}", describe(&set), got.coeff(n)));
            }
        }
        checked += 1;
    }
    Ok(Outcome::new(Suite::Oracle, &failures, checked, "pattern sets"))
}

fn grammar_suite(cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    let sets = pattern_sets(cfg, 3)?;
    let max_internal = cfg.max_len.saturating_sub(1) / 2;
    let results: Vec<Vec<String>> = sets
        .par_iter()
        .map(|set| {
            let g = Grammar::build(set);
            let mut bad = Vec::new();
            if !g.is_proper() {
                bad.push(format!("{}: grammar is not proper", describe(set)));
            }
            for t in oracle::enumerate_trees(set.alphabet(), max_internal) {
                if t.vertex_count() > cfg.max_len {
                    continue;
                }
                let word = t.polish();
                let want = u64::from(t.avoids(set));
                let got = g.count_derivations(&word);
                if got != want {
                    bad.push(format!("{}: {word} has {got} derivations, expected {want}", describe(set)));
                }
                // A proper prefix of a word is never a word.
                let prefix: String = word.chars().take(word.chars().count() - 1).collect();
                if !prefix.is_empty() && g.count_derivations(&prefix) != 0 {
                    bad.push(format!("{}: non-word {prefix} is derivable", describe(set)));
                }
            }
            bad
        })
        .collect();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Ok(Outcome::new(Suite::Grammar, &failures, sets.len(), "pattern sets"))
}

fn partition_suite(cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    let sets = pattern_sets(cfg, 3)?;
    let max_internal = cfg.max_nodes.min(7);
    let results: Vec<Vec<String>> = sets
        .par_iter()
        .map(|set| {
            let ld = grammar::build_ld(set);
            let mut blocks: HashMap<Tree, usize> = HashMap::new();
            let mut bad = Vec::new();
            for w in oracle::enumerate_trees(set.alphabet(), max_internal) {
                let class = grammar::membership_class(&w, set);
                match (w.avoids(set), &class) {
                    (true, Some(v)) => {
                        if !ld.contains(v) || !v.is_rooted_subtree_of(&w) {
                            bad.push(format!("{}: class {v} of {w} is not a prefix in L_d", describe(set)));
                        }
                        *blocks.entry(v.clone()).or_insert(0) += 1;
                    }
                    (true, None) => bad.push(format!("{}: avoider {w} has no class", describe(set))),
                    (false, Some(v)) => bad.push(format!("{}: non-avoider {w} was put in M_{v}", describe(set))),
                    (false, None) => {}
                }
                if class != grammar::membership_class_by_definition(&w, &ld).filter(|_| w.avoids(set)) {
                    bad.push(format!("{}: {w} disagrees with the definition of M_v", describe(set)));
                }
            }
            for v in &ld {
                if v.internal_count() <= max_internal && !blocks.contains_key(v) {
                    bad.push(format!("{}: block M_{v} is empty", describe(set)));
                }
            }
            bad
        })
        .collect();
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Ok(Outcome::new(Suite::Partition, &failures, sets.len(), "pattern sets"))
}

fn mirror_suite(cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    let patterns = binary_patterns(cfg.max_leaves);
    let order = 2 * cfg.max_nodes + 1;
    let results: Vec<anyhow::Result<Option<String>>> = patterns
        .par_iter()
        .map(|p| {
            let m = p.mirror();
            if m.mirror() != *p {
                return Ok(Some(format!("{p}: mirror is not an involution")));
            }
            if av_series(p, order)? != av_series(&m, order)? || en_series(p, order)? != en_series(&m, order)? {
                return Ok(Some(format!("{p} and its mirror {m} have different series")));
            }
            Ok(None)
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        failures.extend(r?);
    }
    let opts = ClassifyOptions { mirror_reduction: false, verify_mirror: true, ..Default::default() };
    for n in 2..=cfg.max_leaves {
        let report = wilf::classify(n, order.max(2 * n), wilf::Mode::Enumeration, &opts)?;
        for p in enumerate_binary_patterns(n) {
            let (a, b) = (report.class_of(&p.polish()), report.class_of(&p.mirror().polish()));
            if a.map(|c| &c.key) != b.map(|c| &c.key) {
                failures.push(format!("{p}: classify separates it from its mirror"));
            }
        }
    }
    Ok(Outcome::new(Suite::Mirror, &failures, patterns.len(), "patterns"))
}

fn systems_suite(cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    const ORDER: usize = 40;
    let patterns = binary_patterns(cfg.max_leaves);
    let binary = Alphabet::binary();
    let results: Vec<anyhow::Result<Vec<String>>> = patterns
        .par_iter()
        .map(|p| {
            let set = PatternSet::single(binary.clone(), p.clone())?;
            let g = Grammar::build(&set);
            let mut bad = Vec::new();
            let stamp = series::solve_target(&systems::stamp_system(&set), ORDER)?;
            let cs = series::solve_target(&systems::cs_system(&g, &Weights::leaf(&binary))?, ORDER)?;
            if stamp != cs {
                bad.push(format!("{p}: stamp and cs systems disagree in z"));
            }
            let stamp_x =
                series::solve_target(&systems::stamp_system_weighted(&set, &Weights::vertex(&binary))?, ORDER)?;
            let cs_x = series::solve_target(&systems::cs_system(&g, &Weights::vertex(&binary))?, ORDER)?;
            let av = series::TruncatedSeries::Uni(av_series(p, ORDER)?);
            if stamp_x != av || cs_x != av {
                bad.push(format!("{p}: vertex-weighted systems disagree with the avoidance series"));
            }
            if [&stamp, &cs, &stamp_x, &cs_x].iter().any(|s| !s.is_nonnegative()) {
                bad.push(format!("{p}: negative coefficient"));
            }
            Ok(bad)
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        failures.extend(r?);
    }
    Ok(Outcome::new(Suite::Systems, &failures, patterns.len(), "patterns"))
}

fn divisibility_suite(cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    let check = certificate::check(cfg.order)?;
    let detail = format!(
        "order {}: quartic divides quintic: {}, quartic annihilates: {}, quintic annihilates: {}",
        check.order, check.divides, check.quartic_annihilates, check.quintic_annihilates
    );
    Ok(Outcome { suite: Suite::Divisibility, passed: check.passed(), detail })
}

fn crosscheck_suite(cfg: &VerifyConfig) -> anyhow::Result<Outcome> {
    let opts = ClassifyOptions::default();
    let mut failures = Vec::new();
    let ns: Vec<usize> = (2..=cfg.max_leaves).collect();
    for &n in &ns {
        if !wilf::cross_check_en_vs_av(n, cfg.order.max(2 * n), &opts)? {
            failures.push(format!("n={n}: enumeration and avoidance partitions differ"));
        }
    }
    Ok(Outcome::new(Suite::Crosscheck, &failures, ns.len(), "leaf counts"))
}
