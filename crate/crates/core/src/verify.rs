//! Pairwise verification of distance preservation.
//!
//! Exhaustive jobs enumerate every unordered pair `(x, y)` with `x < y`
//! lexicographically. The pair space is cut into fixed row chunks that do
//! not depend on the worker count, and partial results are merged in chunk
//! order, so reports are identical for any number of workers.
//!
//! Sampled and stratified jobs draw pairs from ChaCha8 streams: chunk `c`
//! of a job seeded with `s` uses stream `c` of the generator seeded with
//! `s`. The same seed always yields the same pairs.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::packed::{lane_distance, pack_row, PackedRows};
use crate::pa::PermutationArray;
use crate::tables::MappingTable;
use crate::word::{domain_size, write_word, DistanceMode, IndexSet, TernaryWord};

/// Default refusal threshold for exhaustive jobs.
pub const DEFAULT_CEILING: u128 = 5_000_000_000;
/// Violations kept in a report; the total is always counted.
pub const DEFAULT_VIOLATION_LIMIT: usize = 1000;
/// Identifier of the sampling generator, recorded in reports.
pub const RNG_NAME: &str = "chacha8";

const SAMPLE_CHUNK: u64 = 1 << 16;
const ROW_CHUNK: usize = 32;
const MATERIALIZE_FOR_SAMPLING: usize = 13;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    /// `count` uniformly drawn pairs with `x != y`; repeats allowed.
    Sampled { count: u64, seed: u64 },
    /// `quotas[d - 1]` pairs at input distance exactly `d`.
    Stratified { quotas: Vec<u64>, seed: u64 },
}

impl Strategy {
    /// Spreads `total` pairs evenly over input distances `1..=n`, earlier
    /// buckets taking the remainder.
    pub fn stratified_even(total: u64, n: usize, seed: u64) -> Self {
        let n64 = n.max(1) as u64;
        let quotas = (0..n64)
            .map(|d| total / n64 + u64::from(d < total % n64))
            .collect();
        Strategy::Stratified { quotas, seed }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Strategy::Exhaustive => None,
            Strategy::Sampled { seed, .. } | Strategy::Stratified { seed, .. } => Some(*seed),
        }
    }

    fn describe(&self) -> String {
        match self {
            Strategy::Exhaustive => "exhaustive".into(),
            Strategy::Sampled { count, .. } => format!("sampled({count})"),
            Strategy::Stratified { quotas, .. } => {
                let q: Vec<String> = quotas.iter().map(u64::to_string).collect();
                format!("stratified({})", q.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationJob {
    pub mapping: Mapping,
    pub mode: DistanceMode,
    pub strategy: Strategy,
    /// Output coordinates deleted before comparing distances.
    pub projection: Option<IndexSet>,
    pub ceiling: u128,
    pub violation_limit: usize,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl VerificationJob {
    pub fn new(mapping: Mapping, mode: DistanceMode) -> Self {
        Self {
            mapping,
            mode,
            strategy: Strategy::Exhaustive,
            projection: None,
            ceiling: DEFAULT_CEILING,
            violation_limit: DEFAULT_VIOLATION_LIMIT,
            workers: None,
        }
    }

    pub fn strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn projection(mut self, removed: IndexSet) -> Self {
        self.projection = Some(removed);
        self
    }

    pub fn ceiling(mut self, ceiling: u128) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn violation_limit(mut self, limit: usize) -> Self {
        self.violation_limit = limit;
        self
    }

    /// Number of unordered pairs an exhaustive run would check.
    pub fn exhaustive_pairs(&self) -> u128 {
        let n = u32::try_from(self.mapping.n()).unwrap_or(u32::MAX);
        let count = 3u128.checked_pow(n).unwrap_or(u128::MAX);
        count.saturating_mul(count.saturating_sub(1)) / 2
    }

    fn validate(&self) -> Result<()> {
        if self.mode == DistanceMode::Increase && self.mapping.k() == 0 {
            return Err(Error::InvalidJob("increase mode requires k >= 1".into()));
        }
        if let Some(p) = &self.projection {
            p.check_within(self.mapping.width())?;
        }
        match &self.strategy {
            Strategy::Exhaustive => {
                let pairs = self.exhaustive_pairs();
                if pairs > self.ceiling {
                    return Err(Error::TooManyPairs {
                        pairs,
                        ceiling: self.ceiling,
                    });
                }
            }
            Strategy::Sampled { count, .. } => {
                if *count == 0 {
                    return Err(Error::InvalidJob("sample count must be at least 1".into()));
                }
                if self.mapping.n() == 0 {
                    return Err(Error::InvalidJob("domain has a single word".into()));
                }
            }
            Strategy::Stratified { quotas, .. } => {
                if quotas.len() != self.mapping.n() {
                    return Err(Error::InvalidJob(format!(
                        "expected {} distance quotas, got {}",
                        self.mapping.n(),
                        quotas.len()
                    )));
                }
                if quotas.iter().sum::<u64>() == 0 {
                    return Err(Error::InvalidJob("stratified quotas are all zero".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub x: String,
    pub y: String,
    pub input_distance: usize,
    pub output_distance: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PassSampled,
}

/// Outcome of a verification job. Serializes as a JSON object with the
/// job echo first; `wall_ms` is present only after [`Self::with_timing`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub mapping: String,
    pub n: usize,
    pub k: usize,
    pub mode: String,
    pub strategy: String,
    pub seed: Option<u64>,
    pub rng: Option<&'static str>,
    pub projection: Option<String>,
    pub pairs_checked: u64,
    /// Smallest observed `output distance - input distance`.
    pub min_slack: Option<i64>,
    pub violations_total: u64,
    pub violations: Vec<Violation>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
    #[serde(skip)]
    pub wall: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    pub fn with_timing(mut self) -> Self {
        self.wall_ms = Some(self.wall.as_millis() as u64);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Per-chunk accumulator; merged in chunk order.
#[derive(Default)]
struct Tally {
    pairs: u64,
    min_slack: Option<i64>,
    total: u64,
    found: Vec<(usize, usize, usize, usize)>,
}

impl Tally {
    #[inline(always)]
    fn record(&mut self, mode: DistanceMode, limit: usize, x: usize, y: usize, din: u32, dout: u32) {
        self.pairs += 1;
        let slack = dout as i64 - din as i64;
        self.min_slack = Some(self.min_slack.map_or(slack, |m| m.min(slack)));
        if !mode.admits(din as usize, dout as usize) {
            self.total += 1;
            if self.found.len() < limit {
                self.found.push((x, y, din as usize, dout as usize));
            }
        }
    }

    fn merge(mut self, other: Tally, limit: usize) -> Tally {
        self.pairs += other.pairs;
        self.min_slack = match (self.min_slack, other.min_slack) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.total += other.total;
        let room = limit.saturating_sub(self.found.len());
        self.found.extend(other.found.into_iter().take(room));
        self
    }
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidJob(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs a verification job.
pub fn verify(job: &VerificationJob) -> Result<VerificationReport> {
    job.validate()?;
    let start = Instant::now();
    let width = job.mapping.width();
    let keep = job
        .projection
        .as_ref()
        .map(|p| p.kept_positions(width))
        .unwrap_or_else(|| (0..width).collect());
    let limit = job.violation_limit;

    let tally = match &job.strategy {
        Strategy::Exhaustive => {
            let table = job.mapping.materialize()?;
            in_pool(job.workers, || exhaustive(&table, &keep, job.mode, limit))?
        }
        Strategy::Sampled { count, seed } => {
            let mapping = sampling_view(&job.mapping)?;
            in_pool(job.workers, || {
                sampled(&mapping, &keep, job.mode, limit, *count, *seed)
            })?
        }
        Strategy::Stratified { quotas, seed } => {
            let mapping = sampling_view(&job.mapping)?;
            in_pool(job.workers, || {
                stratified(&mapping, &keep, job.mode, limit, quotas, *seed)
            })?
        }
    };

    let n = job.mapping.n();
    let mut found = tally.found;
    if job.strategy != Strategy::Exhaustive {
        found.sort_unstable();
        found.dedup();
    }
    let violations = found
        .into_iter()
        .map(|(x, y, din, dout)| Violation {
            x: TernaryWord::from_index(n, x).to_string(),
            y: TernaryWord::from_index(n, y).to_string(),
            input_distance: din,
            output_distance: dout,
        })
        .collect::<Vec<_>>();
    let verdict = if tally.total > 0 {
        Verdict::Fail
    } else if job.strategy == Strategy::Exhaustive {
        Verdict::Pass
    } else {
        Verdict::PassSampled
    };
    Ok(VerificationReport {
        mapping: job.mapping.label().to_string(),
        n,
        k: job.mapping.k(),
        mode: job.mode.to_string(),
        strategy: job.strategy.describe(),
        seed: job.strategy.seed(),
        rng: job.strategy.seed().map(|_| RNG_NAME),
        projection: job.projection.as_ref().map(|p| p.to_string()),
        pairs_checked: tally.pairs,
        min_slack: tally.min_slack,
        violations_total: tally.total,
        violations,
        verdict,
        wall_ms: None,
        wall: start.elapsed(),
    })
}

/// Exhaustive check of a table with its outputs projected by `removed`.
pub fn verify_projected(
    t: &Arc<MappingTable>,
    removed: &IndexSet,
    mode: DistanceMode,
) -> Result<VerificationReport> {
    let job = VerificationJob::new(Mapping::from_table(Arc::clone(t)), mode)
        .projection(removed.clone());
    verify(&job)
}

fn exhaustive(table: &MappingTable, keep: &[usize], mode: DistanceMode, limit: usize) -> Tally {
    let rows = table.len();
    let n = table.n();
    if rows < 2 {
        return Tally::default();
    }
    let outputs = PackedRows::from_flat(table.flat(), table.width(), keep);
    let mut all_words = vec![0u8; rows * n];
    for (i, w) in all_words.chunks_mut(n.max(1)).enumerate().take(rows) {
        write_word(i, w);
    }
    let words = PackedRows::full(&all_words, n);

    let chunks = rows.div_ceil(ROW_CHUNK);
    let parts: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut t = Tally::default();
            let end = ((c + 1) * ROW_CHUNK).min(rows);
            for i in c * ROW_CHUNK..end {
                let (wi, oi) = (words.row(i), outputs.row(i));
                for j in i + 1..rows {
                    let din = lane_distance(wi, words.row(j));
                    let dout = lane_distance(oi, outputs.row(j));
                    t.record(mode, limit, i, j, din, dout);
                }
            }
            t
        })
        .collect();
    parts
        .into_iter()
        .fold(Tally::default(), |acc, t| acc.merge(t, limit))
}

/// Small domains are materialized once; large ones are evaluated per word.
fn sampling_view(m: &Mapping) -> Result<Mapping> {
    if m.n() <= MATERIALIZE_FOR_SAMPLING {
        m.materialized()
    } else {
        Ok(m.clone())
    }
}

/// Output side of a sampled job: packed rows when the mapping fits in
/// memory, per-word evaluation otherwise.
enum Outputs<'a> {
    Packed(PackedRows),
    Lazy(&'a Mapping),
}

impl<'a> Outputs<'a> {
    fn new(m: &'a Mapping, keep: &[usize]) -> Self {
        match m.as_table() {
            Some(t) => Outputs::Packed(PackedRows::from_flat(t.flat(), t.width(), keep)),
            None => Outputs::Lazy(m),
        }
    }
}

struct PairProbe<'a> {
    outputs: &'a Outputs<'a>,
    keep: &'a [usize],
    out: Vec<u8>,
    lanes: [Vec<u64>; 2],
}

impl<'a> PairProbe<'a> {
    fn new(outputs: &'a Outputs<'a>, keep: &'a [usize]) -> Self {
        let stride = keep.len().div_ceil(8).max(1);
        Self {
            outputs,
            keep,
            out: Vec::new(),
            lanes: [vec![0; stride], vec![0; stride]],
        }
    }

    fn output_distance(&mut self, xi: usize, x: &[u8], yi: usize, y: &[u8]) -> u32 {
        match self.outputs {
            Outputs::Packed(rows) => rows.distance(xi, yi),
            Outputs::Lazy(m) => {
                for (slot, w) in [x, y].into_iter().enumerate() {
                    m.eval_into(w, &mut self.out);
                    pack_row(&self.out, self.keep, &mut self.lanes[slot]);
                }
                lane_distance(&self.lanes[0], &self.lanes[1])
            }
        }
    }
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sampled(
    m: &Mapping,
    keep: &[usize],
    mode: DistanceMode,
    limit: usize,
    count: u64,
    seed: u64,
) -> Tally {
    let n = m.n();
    let domain = domain_size(n).expect("sampled domain fits usize");
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let outputs = Outputs::new(m, keep);
    let parts: Vec<Tally> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let mut probe = PairProbe::new(&outputs, keep);
            let (mut x, mut y) = (vec![0u8; n], vec![0u8; n]);
            let mut t = Tally::default();
            let todo = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
            for _ in 0..todo {
                let xi = rng.gen_range(0..domain);
                let yi = loop {
                    let v = rng.gen_range(0..domain);
                    if v != xi {
                        break v;
                    }
                };
                write_word(xi, &mut x);
                write_word(yi, &mut y);
                let din = x.iter().zip(&y).filter(|(a, b)| a != b).count() as u32;
                let dout = probe.output_distance(xi, &x, yi, &y);
                t.record(mode, limit, xi.min(yi), xi.max(yi), din, dout);
            }
            t
        })
        .collect();
    parts
        .into_iter()
        .fold(Tally::default(), |acc, t| acc.merge(t, usize::MAX))
}

fn stratified(
    m: &Mapping,
    keep: &[usize],
    mode: DistanceMode,
    limit: usize,
    quotas: &[u64],
    seed: u64,
) -> Tally {
    let n = m.n();
    let domain = domain_size(n).expect("stratified domain fits usize");
    let work: Vec<(usize, u64)> = quotas
        .iter()
        .enumerate()
        .flat_map(|(b, &q)| (0..q.div_ceil(SAMPLE_CHUNK)).map(move |c| (b + 1, c)))
        .collect();
    let outputs = Outputs::new(m, keep);
    let parts: Vec<Tally> = work
        .into_par_iter()
        .map(|(d, c)| {
            let mut rng = chunk_rng(seed, ((d as u64) << 40) | c);
            let mut probe = PairProbe::new(&outputs, keep);
            let (mut x, mut y) = (vec![0u8; n], vec![0u8; n]);
            let mut positions: Vec<usize> = (0..n).collect();
            let mut t = Tally::default();
            let quota = quotas[d - 1];
            let todo = SAMPLE_CHUNK.min(quota - c * SAMPLE_CHUNK);
            for _ in 0..todo {
                let xi = rng.gen_range(0..domain);
                write_word(xi, &mut x);
                y.copy_from_slice(&x);
                for p in 0..d {
                    let q = rng.gen_range(p..n);
                    positions.swap(p, q);
                    let pos = positions[p];
                    y[pos] = (y[pos] + rng.gen_range(1..3u8)) % 3;
                }
                let yi = crate::word::word_index(&y);
                let dout = probe.output_distance(xi, &x, yi, &y);
                t.record(mode, limit, xi.min(yi), xi.max(yi), d as u32, dout);
            }
            t
        })
        .collect();
    parts
        .into_iter()
        .fold(Tally::default(), |acc, t| acc.merge(t, usize::MAX))
}

/// Outcome of a permutation-array distance check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaReport {
    pub n: usize,
    pub size: usize,
    pub required_distance: usize,
    pub pairs_checked: u64,
    pub min_distance: Option<usize>,
    /// Member index pairs (0-based) closer than the required distance.
    pub violations_total: u64,
    pub violations: Vec<(usize, usize, usize)>,
    pub verdict: Verdict,
}

impl PaReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Pairs checked, minimum distance, violation count and kept violations
/// for one member against all later members.
type PaPart = (u64, Option<usize>, u64, Vec<(usize, usize, usize)>);

/// Exhaustive pairwise minimum distance of a permutation array.
pub fn verify_pa(pa: &PermutationArray, d: usize) -> PaReport {
    let n = pa.n();
    let flat: Vec<u8> = pa.members().iter().flat_map(|p| p.values().iter().copied()).collect();
    let packed = PackedRows::full(&flat, n);
    let size = pa.len();
    let parts: Vec<PaPart> = (0..size)
        .into_par_iter()
        .map(|i| {
            let mut min = None::<usize>;
            let mut bad = Vec::new();
            let mut total = 0;
            for j in i + 1..size {
                let dist = packed.distance(i, j) as usize;
                min = Some(min.map_or(dist, |m| m.min(dist)));
                if dist < d {
                    total += 1;
                    if bad.len() < DEFAULT_VIOLATION_LIMIT {
                        bad.push((i, j, dist));
                    }
                }
            }
            ((size - i - 1) as u64, min, total, bad)
        })
        .collect();
    let mut report = PaReport {
        n,
        size,
        required_distance: d,
        pairs_checked: 0,
        min_distance: None,
        violations_total: 0,
        violations: Vec::new(),
        verdict: Verdict::Pass,
    };
    for (pairs, min, total, bad) in parts {
        report.pairs_checked += pairs;
        report.min_distance = match (report.min_distance, min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        report.violations_total += total;
        let room = DEFAULT_VIOLATION_LIMIT.saturating_sub(report.violations.len());
        report.violations.extend(bad.into_iter().take(room));
    }
    if report.violations_total > 0 {
        report.verdict = Verdict::Fail;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::shipped;
    use crate::word::Permutation;

    fn f() -> Mapping {
        Mapping::from(shipped("F").unwrap())
    }

    #[test]
    fn f_is_increasing() {
        let r = verify(&VerificationJob::new(f(), DistanceMode::Increase)).unwrap();
        assert_eq!(r.pairs_checked, 351);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.min_slack.unwrap() >= 1);
    }

    #[test]
    fn counterexample_reported() {
        let mut rows = shipped("F").unwrap().flat().to_vec();
        let idx = crate::word::word_index(&[1, 1, 1]);
        rows[idx * 5..idx * 5 + 5].copy_from_slice(&[2, 1, 3, 4, 5]);
        let t = MappingTable::from_rows("bad", 3, 2, rows).unwrap();
        let r = verify(&VerificationJob::new(Mapping::from(t), DistanceMode::Preserve)).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.violations.contains(&Violation {
            x: "000".into(),
            y: "111".into(),
            input_distance: 3,
            output_distance: 2
        }));
        let mut sorted = r.violations.clone();
        sorted.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));
        assert_eq!(sorted, r.violations);
    }

    #[test]
    fn projected_checks() {
        let g = shipped("G").unwrap();
        assert!(verify_projected(&g, &IndexSet::new([7]), DistanceMode::Preserve)
            .unwrap()
            .passed());
        let r = shipped("R").unwrap();
        assert!(verify_projected(&r, &IndexSet::new([4, 5]), DistanceMode::Preserve)
            .unwrap()
            .passed());
        let full = verify_projected(&r, &IndexSet::all(5), DistanceMode::Preserve).unwrap();
        assert_eq!(full.verdict, Verdict::Fail);
        assert_eq!(full.violations_total, full.pairs_checked);
    }

    #[test]
    fn refuses_over_ceiling() {
        let job = VerificationJob::new(f(), DistanceMode::Increase).ceiling(100);
        assert_eq!(
            verify(&job).unwrap_err(),
            Error::TooManyPairs {
                pairs: 351,
                ceiling: 100
            }
        );
    }

    #[test]
    fn job_validation() {
        let k0 = MappingTable::from_rows("k0", 1, 2, vec![1, 2, 3, 2, 3, 1, 3, 1, 2]).unwrap();
        let bad = VerificationJob::new(Mapping::from(k0), DistanceMode::Increase)
            .strategy(Strategy::Sampled { count: 0, seed: 1 });
        assert!(matches!(verify(&bad), Err(Error::InvalidJob(_))));
        let bad = VerificationJob::new(f(), DistanceMode::Preserve)
            .strategy(Strategy::Stratified { quotas: vec![1, 2], seed: 1 });
        assert!(matches!(verify(&bad), Err(Error::InvalidJob(_))));
        let bad = VerificationJob::new(f(), DistanceMode::Preserve).projection(IndexSet::new([6]));
        assert!(verify(&bad).is_err());
    }

    #[test]
    fn sampled_is_reproducible() {
        let job = VerificationJob::new(f(), DistanceMode::Increase)
            .strategy(Strategy::Sampled { count: 200_000, seed: 7 });
        let a = verify(&job).unwrap();
        let b = verify(&job.clone().workers(1)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.pairs_checked, 200_000);
        assert_eq!(a.verdict, Verdict::PassSampled);
        assert_eq!(a.seed, Some(7));
    }

    #[test]
    fn stratified_hits_every_bucket() {
        let job = VerificationJob::new(f(), DistanceMode::Increase)
            .strategy(Strategy::stratified_even(10, 3, 3));
        let r = verify(&job).unwrap();
        assert_eq!(r.pairs_checked, 10);
        assert_eq!(r.strategy, "stratified(4,3,3)");
        assert!(r.passed());
    }

    #[test]
    fn report_field_order() {
        let r = verify(&VerificationJob::new(f(), DistanceMode::Increase)).unwrap();
        let json = r.to_json();
        let keys = [
            "mapping", "n", "k", "mode", "strategy", "seed", "pairs_checked", "min_slack",
            "violations", "verdict",
        ];
        let pos: Vec<usize> = keys
            .iter()
            .map(|k| json.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert!(!json.contains("wall_ms"));
        assert!(r.with_timing().to_json().contains("wall_ms"));
    }

    #[test]
    fn single_word_domain_has_no_pairs() {
        let t = MappingTable::from_rows("one", 0, 2, vec![2, 1]).unwrap();
        let r = verify(&VerificationJob::new(Mapping::from(t), DistanceMode::Increase)).unwrap();
        assert_eq!((r.pairs_checked, r.min_slack, r.verdict), (0, None, Verdict::Pass));
    }

    #[test]
    fn pa_checks() {
        let single = PermutationArray::new(vec![Permutation::identity(4)]).unwrap();
        let r = verify_pa(&single, 4);
        assert!(r.passed());
        assert_eq!(r.pairs_checked, 0);
        assert_eq!(r.min_distance, None);

        let pa = PermutationArray::new(vec![
            Permutation::new(vec![1, 2, 3]).unwrap(),
            Permutation::new(vec![2, 1, 3]).unwrap(),
        ])
        .unwrap();
        let r = verify_pa(&pa, 3);
        assert!(!r.passed());
        assert_eq!(r.min_distance, Some(2));
        assert!(verify_pa(&pa, 2).passed());
    }
}
