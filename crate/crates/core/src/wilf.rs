//! Sweeps over all binary patterns with a fixed number of leaves, grouping
//! them by exact equality of their truncated avoidance or enumeration
//! series.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elim::certificate;
use crate::error::{Error, Result};
use crate::series::{solve_target, TruncatedSeries};
use crate::systems::{avoidance_system, compact_enumeration_system};
use crate::trees::{enumerate_binary_patterns, Alphabet, PatternSet, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Key: `Av_t(x)`.
    Avoidance,
    /// Key: `En_t(x, y)`.
    Enumeration,
}

impl Mode {
    pub fn short(self) -> &'static str {
        match self {
            Mode::Avoidance => "av",
            Mode::Enumeration => "en",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "av" | "avoidance" => Ok(Mode::Avoidance),
            "en" | "enumeration" => Ok(Mode::Enumeration),
            other => Err(Error::Invalid(format!("unknown mode `{other}` (expected av or en)"))),
        }
    }
}

/// Called with `(done, total)` after each series is solved.
pub type ProgressFn = Arc<dyn Fn(usize, usize) + Send + Sync>;

#[derive(Clone)]
pub struct ClassifyOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Solve one pattern of each mirror pair and copy the result.
    pub mirror_reduction: bool,
    /// Solve both patterns of each mirror pair and fail if they differ.
    pub verify_mirror: bool,
    pub progress: Option<ProgressFn>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { workers: None, mirror_reduction: true, verify_mirror: false, progress: None }
    }
}

impl fmt::Debug for ClassifyOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClassifyOptions")
            .field("workers", &self.workers)
            .field("mirror_reduction", &self.mirror_reduction)
            .field("verify_mirror", &self.verify_mirror)
            .field("progress", &self.progress.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilfClass {
    /// Hex SHA-256 of the canonical serialization of the truncated series.
    pub key: String,
    /// Polish words, sorted.
    pub members: Vec<String>,
    /// The series up to a small degree.
    pub representative: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CountBound {
    /// The number of distinct truncated series; the true class count may be
    /// larger.
    Lower,
    /// Upgraded by a shipped certificate.
    Exact { certificate: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub workers: usize,
    /// Number of series actually solved.
    pub solved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n_leaves: usize,
    pub mode: Mode,
    pub order: usize,
    pub classes: Vec<WilfClass>,
    pub class_count: usize,
    pub bound: CountBound,
    /// Left out of [`ClassificationReport::to_json`] unless asked for, so
    /// reports of identical runs are byte-identical.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl ClassificationReport {
    pub fn to_json(&self, with_timing: bool) -> String {
        let mut r = self.clone();
        if !with_timing {
            r.timing = None;
        }
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "n,K,mode,class_count,wall_seconds";

    pub fn csv_row(&self) -> String {
        let wall = self.timing.as_ref().map_or(String::new(), |t| format!("{:.3}", t.wall_seconds));
        format!("{},{},{},{},{}", self.n_leaves, self.order, self.mode, self.class_count, wall)
    }

    /// `n=<n> mode=<mode> K=<K> classes=<count>`.
    pub fn summary_line(&self) -> String {
        format!("n={} mode={} K={} classes={}", self.n_leaves, self.mode, self.order, self.class_count)
    }

    /// The classes as a set of member sets.
    pub fn partition(&self) -> BTreeSet<Vec<String>> {
        self.classes.iter().map(|c| c.members.clone()).collect()
    }

    /// Class containing `pattern`.
    pub fn class_of(&self, pattern: &str) -> Option<&WilfClass> {
        self.classes.iter().find(|c| c.members.iter().any(|m| m == pattern))
    }
}

/// Degree up to which the representative series is printed.
fn prefix_degree(n_leaves: usize) -> usize {
    2 * n_leaves + 5
}

fn solve_key(pattern: &Tree, order: usize, mode: Mode) -> Result<TruncatedSeries> {
    let system = match mode {
        Mode::Avoidance => avoidance_system(&PatternSet::single(Alphabet::binary(), pattern.clone())?)?,
        Mode::Enumeration => compact_enumeration_system(pattern)?,
    };
    solve_target(&system, order)
}

fn check_request(n_leaves: usize, order: usize) -> Result<()> {
    if n_leaves < 2 {
        return Err(Error::Invalid(format!("need at least 2 leaves, got {n_leaves}")));
    }
    if order < 2 * n_leaves {
        return Err(Error::Invalid(format!("order {order} is below 2n = {}", 2 * n_leaves)));
    }
    Ok(())
}

/// Per-order grouping state. Only one full serialization per class is kept.
#[derive(Default)]
struct Grouping {
    /// hash -> indices into `classes` with that hash
    by_hash: HashMap<String, Vec<usize>>,
    classes: Vec<(String, String, String, Vec<String>)>,
}

impl Grouping {
    fn insert(&mut self, canonical: String, hash: String, prefix: impl FnOnce() -> String, members: Vec<String>) {
        let bucket = self.by_hash.entry(hash.clone()).or_default();
        for &i in bucket.iter() {
            if self.classes[i].0 == canonical {
                self.classes[i].3.extend(members);
                return;
            }
        }
        // A second series under one hash gets a disambiguated key.
        let key = if bucket.is_empty() { hash } else { format!("{hash}-{}", bucket.len()) };
        bucket.push(self.classes.len());
        self.classes.push((canonical, key, prefix(), members));
    }

    fn into_classes(self) -> Vec<WilfClass> {
        let mut classes: Vec<WilfClass> = self
            .classes
            .into_iter()
            .map(|(_, key, representative, mut members)| {
                members.sort();
                WilfClass { key, members, representative }
            })
            .collect();
        classes.sort_by(|a, b| a.members[0].cmp(&b.members[0]));
        classes
    }
}

struct Solved {
    /// `(canonical serialization, hash)` per requested order.
    keys: Vec<(String, String)>,
    series: TruncatedSeries,
    members: Vec<String>,
}

/// Core sweep shared by [`classify`] and [`stabilization_scan`]: solves each
/// pattern once at the largest order and groups at every requested order.
fn sweep(
    n_leaves: usize,
    orders: &[usize],
    mode: Mode,
    options: &ClassifyOptions,
) -> Result<(Vec<Vec<WilfClass>>, usize)> {
    let max_order = *orders.iter().max().expect("at least one order");
    let patterns = enumerate_binary_patterns(n_leaves);
    // Work items: a pattern and the mirror images that share its result.
    let mut jobs: Vec<(Tree, Vec<String>)> = Vec::new();
    let mut checks: Vec<(Tree, Tree)> = Vec::new();
    for p in &patterns {
        let m = p.mirror();
        if options.mirror_reduction {
            match p.cmp(&m) {
                std::cmp::Ordering::Less => jobs.push((p.clone(), vec![p.polish(), m.polish()])),
                std::cmp::Ordering::Equal => jobs.push((p.clone(), vec![p.polish()])),
                std::cmp::Ordering::Greater => {}
            }
        } else {
            jobs.push((p.clone(), vec![p.polish()]));
        }
        if options.verify_mirror && p < &m {
            checks.push((p.clone(), m));
        }
    }
    let total = jobs.len() + checks.len();
    let done = AtomicUsize::new(0);
    let tick = || {
        let d = done.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(progress) = &options.progress {
            progress(d, total);
        }
    };

    let run = || -> Result<Vec<Vec<WilfClass>>> {
        checks.par_iter().try_for_each(|(p, m)| {
            let a = solve_key(p, max_order, mode)?;
            let b = solve_key(m, max_order, mode)?;
            tick();
            if a != b {
                return Err(Error::Invalid(format!("mirror images {p} and {m} have different series")));
            }
            Ok(())
        })?;
        let mut groupings: Vec<Grouping> = orders.iter().map(|_| Grouping::default()).collect();
        const CHUNK: usize = 64;
        for chunk in jobs.chunks(CHUNK) {
            let solved: Vec<Solved> = chunk
                .par_iter()
                .map(|(p, members)| {
                    let series = solve_key(p, max_order, mode)?;
                    let keys = orders
                        .iter()
                        .map(|&k| {
                            let t = series.truncate(k);
                            (t.canonical_json(), t.key_hash())
                        })
                        .collect();
                    tick();
                    Ok(Solved { keys, series, members: members.clone() })
                })
                .collect::<Result<_>>()?;
            for s in solved {
                for (i, (canonical, hash)) in s.keys.into_iter().enumerate() {
                    let prefix = || s.series.prefix_text(prefix_degree(n_leaves).min(orders[i]));
                    groupings[i].insert(canonical, hash, prefix, s.members.clone());
                }
            }
        }
        Ok(groupings.into_iter().map(Grouping::into_classes).collect())
    };
    let classes = match options.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Invalid(format!("cannot start {w} workers: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok((classes, total))
}

/// Groups all `Catalan(n - 1)` binary patterns with `n_leaves` leaves by
/// their series truncated at `order`.
pub fn classify(n_leaves: usize, order: usize, mode: Mode, options: &ClassifyOptions) -> Result<ClassificationReport> {
    check_request(n_leaves, order)?;
    let start = Instant::now();
    let (mut all, solved) = sweep(n_leaves, &[order], mode, options)?;
    let classes = all.pop().expect("one order requested");
    let class_count = classes.len();
    let bound = certified_bound(n_leaves, mode, class_count)?;
    let workers = options.workers.unwrap_or_else(rayon::current_num_threads);
    Ok(ClassificationReport {
        n_leaves,
        mode,
        order,
        classes,
        class_count,
        bound,
        timing: Some(Timing { wall_seconds: start.elapsed().as_secs_f64(), workers, solved }),
    })
}

/// Number of distinct avoidance series of 8-leaf patterns, proven to be the
/// number of Wilf classes by the shipped divisibility certificate.
pub const CERTIFIED_A8: usize = 43;

fn certified_bound(n_leaves: usize, mode: Mode, class_count: usize) -> Result<CountBound> {
    if n_leaves == 8 && mode == Mode::Avoidance && class_count == CERTIFIED_A8 && certificate::check(100)?.passed() {
        return Ok(CountBound::Exact {
            certificate: "the quintic annihilating polynomial is divisible by the quartic one".into(),
        });
    }
    Ok(CountBound::Lower)
}

/// Class counts at each order of `orders`, from one sweep at the largest.
pub fn stabilization_scan(
    n_leaves: usize,
    orders: &[usize],
    mode: Mode,
    options: &ClassifyOptions,
) -> Result<BTreeMap<usize, usize>> {
    let Some(&first) = orders.first() else {
        return Err(Error::Invalid("no orders given".into()));
    };
    if orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("orders must be strictly ascending".into()));
    }
    check_request(n_leaves, first)?;
    let (classes, _) = sweep(n_leaves, orders, mode, options)?;
    Ok(orders.iter().zip(classes).map(|(&k, c)| (k, c.len())).collect())
}

/// True iff the avoidance and enumeration partitions coincide at `order`.
pub fn cross_check_en_vs_av(n_leaves: usize, order: usize, options: &ClassifyOptions) -> Result<bool> {
    let av = classify(n_leaves, order, Mode::Avoidance, options)?;
    let en = classify(n_leaves, order, Mode::Enumeration, options)?;
    Ok(av.partition() == en.partition())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps() {
        let opts = ClassifyOptions::default();
        let counts: Vec<usize> =
            (2..=6).map(|n| classify(n, 40, Mode::Avoidance, &opts).unwrap().class_count).collect();
        assert_eq!(counts, [1, 1, 2, 3, 7]);
        let r = classify(4, 40, Mode::Avoidance, &opts).unwrap();
        assert_eq!(r.summary_line(), "n=4 mode=av K=40 classes=2");
        assert_eq!(r.bound, CountBound::Lower);
        assert_eq!(r.classes.iter().map(|c| c.members.len()).sum::<usize>(), 5);
    }

    #[test]
    fn mirror_reduction_does_not_change_reports() {
        let fast = classify(6, 30, Mode::Enumeration, &ClassifyOptions::default()).unwrap();
        let slow = classify(
            6,
            30,
            Mode::Enumeration,
            &ClassifyOptions { mirror_reduction: false, verify_mirror: true, workers: Some(2), ..Default::default() },
        )
        .unwrap();
        assert_eq!(fast.to_json(false), slow.to_json(false));
        for class in &fast.classes {
            for m in &class.members {
                let t = Tree::parse(m, &Alphabet::binary()).unwrap();
                assert!(class.members.contains(&t.mirror().polish()));
            }
        }
    }

    #[test]
    fn scan_and_cross_check() {
        let opts = ClassifyOptions::default();
        let scan = stabilization_scan(5, &[10, 20, 40], Mode::Avoidance, &opts).unwrap();
        assert_eq!(scan.into_values().collect::<Vec<_>>(), [1, 3, 3]);
        assert!(cross_check_en_vs_av(6, 60, &opts).unwrap());
        assert!(stabilization_scan(5, &[20, 10], Mode::Avoidance, &opts).is_err());
        assert!(classify(5, 9, Mode::Avoidance, &opts).is_err());
        assert!(classify(1, 9, Mode::Avoidance, &opts).is_err());
    }

    #[test]
    fn modes_parse() {
        assert_eq!("av".parse::<Mode>().unwrap(), Mode::Avoidance);
        assert_eq!("enumeration".parse::<Mode>().unwrap(), Mode::Enumeration);
        assert!("xx".parse::<Mode>().is_err());
    }
}
