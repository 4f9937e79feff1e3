//! Backtracking search for mapping tables satisfying a [`ConstraintSet`].
//!
//! Rows are assigned in a fixed domain order. Every candidate permutation
//! is filtered once against the row-local constraints; the pairwise
//! projected-distance constraint is enforced by forward checking, so each
//! assignment prunes the live candidates of every later row.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::packed::{lane_distance, PackedRows};
use crate::tables::{ConstraintSet, MappingTable};
use crate::word::{distance_unchecked, domain_size, write_word, DistanceMode};

pub const DEFAULT_BUDGET: u64 = 100_000_000;
/// Largest output length whose permutations are enumerated.
pub const MAX_WIDTH: usize = 9;
/// Largest domain length accepted.
pub const MAX_N: usize = 7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Order {
    #[default]
    Lexicographic,
    /// Shuffled with the problem seed.
    Shuffled,
}

#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub n: usize,
    pub k: usize,
    pub constraints: ConstraintSet,
    pub domain_order: Order,
    pub candidate_order: Order,
    pub budget: u64,
    pub seed: u64,
    pub name: String,
}

impl SearchProblem {
    pub fn new(n: usize, k: usize, constraints: ConstraintSet) -> Self {
        Self {
            n,
            k,
            constraints,
            domain_order: Order::Lexicographic,
            candidate_order: Order::Lexicographic,
            budget: DEFAULT_BUDGET,
            seed: 0,
            name: "found".into(),
        }
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Shuffles both orders with `seed`.
    pub fn shuffled(mut self, seed: u64) -> Self {
        self.domain_order = Order::Shuffled;
        self.candidate_order = Order::Shuffled;
        self.seed = seed;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// False when `(n+k)! < 3^n`, so no injective table exists.
    pub fn pigeonhole_ok(&self) -> bool {
        let fact: u128 = (1..=self.n + self.k).map(|v| v as u128).product();
        fact >= 3u128.pow(self.n as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(MappingTable),
    /// Budget reached before a decision.
    Exhausted,
    /// The search space is empty.
    Infeasible(String),
}

impl SearchOutcome {
    pub fn table(&self) -> Option<&MappingTable> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expansions: u64,
    pub backtracks: u64,
    /// Most rows simultaneously assigned.
    pub deepest_row: usize,
    pub candidates: usize,
    pub wall: Duration,
}

#[derive(Clone, Debug)]
pub struct SearchRun {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
    pub seed: u64,
}

enum Flow {
    Found,
    Failed,
    OutOfBudget,
}

struct Solver {
    width: usize,
    cands: Vec<u8>,
    proj: PackedRows,
    /// Required projected distance between rows `i` and `j` (search order).
    need: Vec<u8>,
    rows: usize,
    order: Vec<u32>,
    words: usize,
    live: Vec<u64>,
    counts: Vec<u32>,
    trail: Vec<(u32, u32)>,
    assigned: Vec<u32>,
    budget: u64,
    stats: SearchStats,
    pinned_first: Option<u32>,
}

impl Solver {
    #[inline]
    fn is_live(&self, row: usize, c: u32) -> bool {
        self.live[row * self.words + (c as usize >> 6)] >> (c & 63) & 1 == 1
    }

    fn kill(&mut self, row: usize, c: u32) {
        self.live[row * self.words + (c as usize >> 6)] &= !(1u64 << (c & 63));
        self.counts[row] -= 1;
        self.trail.push((row as u32, c));
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (row, c) = self.trail.pop().expect("trail entry");
            self.live[row as usize * self.words + (c as usize >> 6)] |= 1u64 << (c & 63);
            self.counts[row as usize] += 1;
        }
    }

    /// Removes candidates of later rows that clash with `c` at `row`.
    fn propagate(&mut self, row: usize, c: u32) -> bool {
        let pc = self.proj.row(c as usize).to_vec();
        for t in row + 1..self.rows {
            let need = self.need[row * self.rows + t] as u32;
            for w in 0..self.words {
                let mut bits = self.live[t * self.words + w];
                while bits != 0 {
                    let b = (w as u32) * 64 + bits.trailing_zeros();
                    bits &= bits - 1;
                    let clash =
                        b == c || lane_distance(&pc, self.proj.row(b as usize)) < need;
                    if clash {
                        self.kill(t, b);
                    }
                }
            }
            if self.counts[t] == 0 {
                return false;
            }
        }
        true
    }

    fn dfs(&mut self, row: usize) -> Flow {
        self.stats.deepest_row = self.stats.deepest_row.max(row);
        if row == self.rows {
            return Flow::Found;
        }
        let choices: Vec<u32> = match (row, self.pinned_first) {
            (0, Some(c)) => vec![c],
            _ => self.order.iter().copied().filter(|&c| self.is_live(row, c)).collect(),
        };
        for c in choices {
            if self.stats.expansions >= self.budget {
                return Flow::OutOfBudget;
            }
            self.stats.expansions += 1;
            let mark = self.trail.len();
            self.assigned[row] = c;
            if self.propagate(row, c) {
                match self.dfs(row + 1) {
                    Flow::Failed => {}
                    other => return other,
                }
            }
            self.undo(mark);
            self.stats.backtracks += 1;
        }
        Flow::Failed
    }
}

fn permutations(width: usize) -> Vec<u8> {
    let mut p: Vec<u8> = (1..=width as u8).collect();
    let mut out = Vec::new();
    loop {
        out.extend_from_slice(&p);
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Runs a single deterministic search.
pub fn search(p: &SearchProblem) -> Result<SearchRun> {
    let start = Instant::now();
    let width = p.n + p.k;
    if p.n > MAX_N || width > MAX_WIDTH {
        return Err(Error::InvalidJob(format!(
            "search supports n <= {MAX_N} and n+k <= {MAX_WIDTH}"
        )));
    }
    p.constraints.validate(width)?;
    let done = |outcome, stats: SearchStats| SearchRun {
        outcome,
        stats: SearchStats {
            wall: start.elapsed(),
            ..stats
        },
        seed: p.seed,
    };
    if !p.pigeonhole_ok() {
        return Ok(done(
            SearchOutcome::Infeasible(format!(
                "pigeonhole: ({width})! < 3^{} leaves no injective table",
                p.n
            )),
            SearchStats::default(),
        ));
    }

    let all = permutations(width);
    let cands: Vec<u8> = all
        .chunks(width.max(1))
        .filter(|row| p.constraints.row_ok(row))
        .flatten()
        .copied()
        .collect();
    let count = cands.len() / width.max(1);
    let rows = domain_size(p.n).expect("small domain");
    let mut stats = SearchStats {
        candidates: count,
        ..SearchStats::default()
    };
    if count < rows {
        return Ok(done(
            SearchOutcome::Infeasible(format!(
                "{count} admissible permutations for {rows} rows"
            )),
            stats,
        ));
    }

    let (removed, mode) = match &p.constraints.projected {
        Some(pd) => (pd.removed.clone(), pd.mode),
        None => (Default::default(), DistanceMode::Preserve),
    };
    let keep = removed.kept_positions(width);
    let proj = PackedRows::from_flat(&cands, width, &keep);

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut domain: Vec<usize> = (0..rows).collect();
    if p.domain_order == Order::Shuffled {
        domain.shuffle(&mut rng);
    }
    let mut order: Vec<u32> = (0..count as u32).collect();
    if p.candidate_order == Order::Shuffled {
        order.shuffle(&mut rng);
    }
    let words: Vec<Vec<u8>> = domain
        .iter()
        .map(|&i| {
            let mut w = vec![0u8; p.n];
            write_word(i, &mut w);
            w
        })
        .collect();
    let strict = u8::from(p.constraints.projected.is_some() && mode == DistanceMode::Increase);
    let mut need = vec![0u8; rows * rows];
    for i in 0..rows {
        for j in 0..rows {
            if i != j {
                let d = distance_unchecked(&words[i], &words[j]) as u8;
                need[i * rows + j] = if p.constraints.projected.is_some() { d + strict } else { 0 };
            }
        }
    }

    let nwords = count.div_ceil(64);
    let mut live = vec![0u64; rows * nwords];
    for r in 0..rows {
        for c in 0..count {
            live[r * nwords + c / 64] |= 1 << (c % 64);
        }
    }
    let pinned_first = p
        .constraints
        .is_relabel_invariant()
        .then(|| order.iter().copied().min().expect("candidates"));

    let mut solver = Solver {
        width,
        cands,
        proj,
        need,
        rows,
        order,
        words: nwords,
        live,
        counts: vec![count as u32; rows],
        trail: Vec::new(),
        assigned: vec![0; rows],
        budget: p.budget,
        stats: std::mem::take(&mut stats),
        pinned_first,
    };
    let flow = solver.dfs(0);
    let stats = std::mem::take(&mut solver.stats);
    let outcome = match flow {
        Flow::Found => {
            let mut flat = vec![0u8; rows * width];
            for (pos, &word) in domain.iter().enumerate() {
                let c = solver.assigned[pos] as usize;
                flat[word * width..(word + 1) * width]
                    .copy_from_slice(&solver.cands[c * solver.width..(c + 1) * solver.width]);
            }
            SearchOutcome::Found(MappingTable::from_rows(p.name.clone(), p.n, p.k, flat)?)
        }
        Flow::Failed => SearchOutcome::Infeasible("search tree exhausted".into()),
        Flow::OutOfBudget => SearchOutcome::Exhausted,
    };
    Ok(done(outcome, stats))
}

/// Runs independently seeded searches in parallel. The successful run with
/// the earliest seed in `seeds` wins; otherwise the first run is returned.
pub fn portfolio(p: &SearchProblem, seeds: &[u64]) -> Result<SearchRun> {
    let runs: Vec<Result<SearchRun>> = seeds
        .par_iter()
        .map(|&s| search(&p.clone().shuffled(s)))
        .collect();
    let mut first = None;
    for run in runs {
        let run = run?;
        if matches!(run.outcome, SearchOutcome::Found(_) | SearchOutcome::Infeasible(_)) {
            return Ok(run);
        }
        first.get_or_insert(run);
    }
    first.ok_or_else(|| Error::InvalidJob("portfolio needs at least one seed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::{builtin_constraints, check_constraints};

    #[test]
    fn lexicographic_permutations() {
        let p = permutations(3);
        assert_eq!(p, vec![1, 2, 3, 1, 3, 2, 2, 1, 3, 2, 3, 1, 3, 1, 2, 3, 2, 1]);
        assert_eq!(permutations(5).len(), 120 * 5);
    }

    #[test]
    fn finds_r_like_table() {
        let c = builtin_constraints("R").unwrap();
        let run = search(&SearchProblem::new(3, 2, c.clone())).unwrap();
        let t = run.outcome.table().expect("satisfiable");
        assert!(check_constraints(t, &c).unwrap().passed());
        assert_eq!(run.stats.deepest_row, 27);
        assert!(run.stats.expansions <= DEFAULT_BUDGET);
    }

    #[test]
    fn pigeonhole_infeasible() {
        let run = search(&SearchProblem::new(1, 0, ConstraintSet::new())).unwrap();
        assert!(matches!(run.outcome, SearchOutcome::Infeasible(_)));
        assert!(run.stats.deepest_row < 3);
    }

    #[test]
    fn three_rows_into_s3() {
        let c = ConstraintSet::new().projected([], DistanceMode::Preserve);
        let run = search(&SearchProblem::new(1, 2, c.clone())).unwrap();
        let t = run.outcome.table().unwrap();
        assert_eq!(t.len(), 3);
        assert!(check_constraints(t, &c).unwrap().passed());
    }

    #[test]
    fn exhausts_budget() {
        let c = builtin_constraints("G").unwrap();
        let run = search(&SearchProblem::new(5, 2, c).budget(50)).unwrap();
        assert!(matches!(run.outcome, SearchOutcome::Exhausted) || run.outcome.table().is_some());
        assert!(run.stats.expansions <= 50);
    }

    #[test]
    fn tree_exhaustion_is_infeasible() {
        // A single kept coordinate never reaches distance 2.
        let c = ConstraintSet::new().projected([2, 3], DistanceMode::Increase);
        let run = search(&SearchProblem::new(1, 2, c)).unwrap();
        assert_eq!(
            run.outcome,
            SearchOutcome::Infeasible("search tree exhausted".into())
        );
        assert!(run.stats.deepest_row < 3);
    }

    #[test]
    fn deterministic_and_seeded() {
        let c = builtin_constraints("S").unwrap();
        let p = SearchProblem::new(3, 2, c.clone()).shuffled(11);
        let a = search(&p).unwrap();
        let b = search(&p).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.stats.expansions, b.stats.expansions);
        let t = a.outcome.table().unwrap();
        assert!(check_constraints(t, &c).unwrap().passed());
        let best = portfolio(&SearchProblem::new(3, 2, c), &[1, 2, 3]).unwrap();
        assert_eq!(best.seed, 1);
    }

    #[test]
    fn rejects_oversized() {
        assert!(search(&SearchProblem::new(8, 2, ConstraintSet::new())).is_err());
        let bad = ConstraintSet::new().member(9, [1]);
        assert!(search(&SearchProblem::new(3, 2, bad)).is_err());
    }
}
