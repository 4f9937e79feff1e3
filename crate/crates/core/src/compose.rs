//! Overwrite-concatenate-swap compositions.
//!
//! A composite splits its input word into a left part and a right part,
//! maps each through a building-block table, shifts the right image by a
//! constant, and assembles the output coordinate by coordinate. Each output
//! coordinate copies one coordinate of one side, except that a designated
//! pivot value is overwritten with a donor coordinate taken from the other
//! side. A final value relabeling (disjoint swaps) gives the result.
//!
//! The four standard instances are [`compose_p91`], [`compose_u`],
//! [`compose_v`] and [`compose_p130`].

use std::ops::RangeInclusive;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::tables::{builtin_constraints, check_constraints, shipped, MappingTable};
use crate::word::{is_permutation, swap_table, write_word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Replace `pivot` with coordinate `donor_index` (1-based) of the `donor`
/// side's image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub pivot: u8,
    pub donor: Side,
    pub donor_index: usize,
}

/// Output coordinates `outputs` (1-based) copy coordinate `i + offset` of
/// the `source` side, subject to `substitutions`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacementRule {
    pub outputs: RangeInclusive<usize>,
    pub source: Side,
    pub offset: isize,
    pub substitutions: Vec<Substitution>,
}

impl PlacementRule {
    pub fn new(outputs: RangeInclusive<usize>, source: Side, offset: isize) -> Self {
        Self {
            outputs,
            source,
            offset,
            substitutions: Vec::new(),
        }
    }

    pub fn substitute(mut self, pivot: u8, donor: Side, donor_index: usize) -> Self {
        self.substitutions.push(Substitution {
            pivot,
            donor,
            donor_index,
        });
        self
    }

    fn source_index(&self, i: usize) -> Option<usize> {
        let s = i as isize + self.offset;
        (s >= 1).then_some(s as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlaySpec {
    pub name: String,
    pub left_len: usize,
    pub right_len: usize,
    /// Added to every value of the right image.
    pub shift: u8,
    pub out_len: usize,
    pub rules: Vec<PlacementRule>,
    pub swaps: Vec<(u8, u8)>,
}

impl OverlaySpec {
    /// Checks the rules against segment widths: every output coordinate is
    /// written by exactly one rule and every referenced coordinate exists.
    pub fn validate(&self, left_width: usize, right_width: usize) -> Result<()> {
        let refuse = |msg: String| Err(Error::CompositionRefused(format!("{}: {msg}", self.name)));
        let width_of = |s: Side| match s {
            Side::Left => left_width,
            Side::Right => right_width,
        };
        let mut writers = vec![0usize; self.out_len + 1];
        for rule in &self.rules {
            for i in rule.outputs.clone() {
                if i == 0 || i > self.out_len {
                    return refuse(format!("output index {i} out of range"));
                }
                writers[i] += 1;
                match rule.source_index(i) {
                    Some(s) if s <= width_of(rule.source) => {}
                    _ => return refuse(format!("output {i} reads outside its source")),
                }
            }
            for sub in &rule.substitutions {
                if sub.donor_index == 0 || sub.donor_index > width_of(sub.donor) {
                    return refuse(format!("donor index {} out of range", sub.donor_index));
                }
            }
        }
        if let Some(i) = (1..=self.out_len).find(|&i| writers[i] != 1) {
            return refuse(format!("output {i} written by {} rules", writers[i]));
        }
        swap_table(&self.swaps, self.out_len)?;
        Ok(())
    }
}

/// Intermediate arrays of one evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stages {
    /// Left image.
    pub phi: Vec<u8>,
    /// Right image after the shift.
    pub gamma: Vec<u8>,
    /// Assembled array before the swaps.
    pub rho: Vec<u8>,
    /// Final output.
    pub pi: Vec<u8>,
}

/// A validated overlay bound to its two building blocks.
#[derive(Clone, Debug)]
pub struct Composite {
    spec: OverlaySpec,
    left: Arc<MappingTable>,
    right: Arc<MappingTable>,
    relabel: [u8; 256],
}

impl Composite {
    /// Binds and validates, then evaluates every input once to confirm the
    /// assembled array is always a permutation.
    pub fn new(spec: OverlaySpec, left: Arc<MappingTable>, right: Arc<MappingTable>) -> Result<Self> {
        if left.n() != spec.left_len || right.n() != spec.right_len {
            return Err(Error::CompositionRefused(format!(
                "{}: building blocks have domain lengths {} and {}, expected {} and {}",
                spec.name,
                left.n(),
                right.n(),
                spec.left_len,
                spec.right_len
            )));
        }
        if spec.out_len < spec.left_len + spec.right_len {
            return Err(Error::CompositionRefused(format!(
                "{}: output length {} is shorter than the input",
                spec.name, spec.out_len
            )));
        }
        spec.validate(left.width(), right.width())?;
        let relabel = swap_table(&spec.swaps, spec.out_len)?;
        let composite = Self {
            spec,
            left,
            right,
            relabel,
        };
        composite.check_totality()?;
        Ok(composite)
    }

    fn check_totality(&self) -> Result<()> {
        let (l, r) = (self.left.len(), self.right.len());
        let bad = (0..l).into_par_iter().find_map_first(|i| {
            let mut rho = Vec::with_capacity(self.spec.out_len);
            (0..r).find_map(|j| {
                self.assemble(self.left.row(i), self.right.row(j), &mut rho);
                (!is_permutation(&rho)).then(|| (i, j, rho.clone()))
            })
        });
        match bad {
            None => Ok(()),
            Some((i, j, rho)) => {
                let mut word = vec![0u8; self.n()];
                write_word(i * r + j, &mut word);
                let word: String = word.iter().map(|t| char::from(b'0' + t)).collect();
                Err(Error::CompositionRefused(format!(
                    "{}: input {word} assembles to non-permutation {rho:?}",
                    self.spec.name
                )))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn spec(&self) -> &OverlaySpec {
        &self.spec
    }

    pub fn left(&self) -> &Arc<MappingTable> {
        &self.left
    }

    pub fn right(&self) -> &Arc<MappingTable> {
        &self.right
    }

    pub fn n(&self) -> usize {
        self.spec.left_len + self.spec.right_len
    }

    pub fn k(&self) -> usize {
        self.spec.out_len - self.n()
    }

    /// Builds `rho` from the raw (unshifted) building-block rows.
    #[inline]
    fn assemble(&self, phi: &[u8], raw_gamma: &[u8], rho: &mut Vec<u8>) {
        let shift = self.spec.shift;
        let read = |side: Side, idx: usize| match side {
            Side::Left => phi[idx - 1],
            Side::Right => raw_gamma[idx - 1] + shift,
        };
        rho.clear();
        rho.resize(self.spec.out_len, 0);
        for rule in &self.spec.rules {
            for i in rule.outputs.clone() {
                let src = (i as isize + rule.offset) as usize;
                let v = read(rule.source, src);
                rho[i - 1] = rule
                    .substitutions
                    .iter()
                    .find(|s| s.pivot == v)
                    .map_or(v, |s| read(s.donor, s.donor_index));
            }
        }
    }

    pub fn eval_into(&self, trits: &[u8], out: &mut Vec<u8>) {
        let (x_left, x_right) = trits.split_at(self.spec.left_len);
        self.assemble(self.left.row_for(x_left), self.right.row_for(x_right), out);
        for v in out.iter_mut() {
            *v = self.relabel[*v as usize];
        }
    }

    /// Evaluates and keeps every intermediate array.
    pub fn trace(&self, trits: &[u8]) -> Stages {
        let (x_left, x_right) = trits.split_at(self.spec.left_len);
        let phi = self.left.row_for(x_left).to_vec();
        let raw = self.right.row_for(x_right);
        let gamma = raw.iter().map(|v| v + self.spec.shift).collect();
        let mut rho = Vec::new();
        self.assemble(&phi, raw, &mut rho);
        let pi = rho.iter().map(|&v| self.relabel[v as usize]).collect();
        Stages {
            phi,
            gamma,
            rho,
            pi,
        }
    }

    /// Which side and 1-based coordinate output `i` is copied from.
    pub fn source_of(&self, i: usize) -> Option<(Side, usize)> {
        self.spec
            .rules
            .iter()
            .find(|r| r.outputs.contains(&i))
            .and_then(|r| r.source_index(i).map(|s| (r.source, s)))
    }
}

/// Runs the building block's named constraint set, refusing on failure.
fn require(table: &MappingTable, constraint_name: &str) -> Result<()> {
    let report = check_constraints(table, &builtin_constraints(constraint_name)?).map_err(|e| {
        Error::CompositionRefused(format!(
            "building block {} cannot carry {constraint_name} constraints: {e}",
            table.name()
        ))
    })?;
    if report.passed() {
        Ok(())
    } else {
        Err(Error::CompositionRefused(format!(
            "building block {} fails its {constraint_name} constraints: {} violations, first: {}",
            table.name(),
            report.violations.len(),
            report.violations[0]
        )))
    }
}

fn build(spec: OverlaySpec, left: Arc<MappingTable>, right: Arc<MappingTable>) -> Result<Mapping> {
    Ok(Mapping::from_composite(Composite::new(spec, left, right)?))
}

/// `Z_3^9 -> S_10` from `G` (left, 5 trits) and `H4` (right, 4 trits).
pub fn p91_spec() -> OverlaySpec {
    use Side::*;
    OverlaySpec {
        name: "p91".into(),
        left_len: 5,
        right_len: 4,
        shift: 4,
        out_len: 10,
        rules: vec![
            PlacementRule::new(1..=3, Left, 0).substitute(6, Right, 5),
            PlacementRule::new(4..=6, Left, 0).substitute(7, Right, 6),
            PlacementRule::new(7..=9, Right, -6).substitute(5, Left, 7),
            PlacementRule::new(10..=10, Right, -6),
        ],
        swaps: vec![(1, 6), (2, 7)],
    }
}

/// `U: Z_3^6 -> S_8` from `R` and `S`.
pub fn u_spec() -> OverlaySpec {
    use Side::*;
    OverlaySpec {
        name: "U".into(),
        left_len: 3,
        right_len: 3,
        shift: 3,
        out_len: 8,
        rules: vec![
            PlacementRule::new(1..=4, Left, 0).substitute(5, Right, 5),
            PlacementRule::new(5..=8, Right, -4).substitute(4, Left, 5),
        ],
        swaps: vec![(1, 7), (5, 8)],
    }
}

/// `V: Z_3^7 -> S_9` from `R` and `T`.
pub fn v_spec() -> OverlaySpec {
    use Side::*;
    OverlaySpec {
        name: "V".into(),
        left_len: 3,
        right_len: 4,
        shift: 3,
        out_len: 9,
        rules: vec![
            PlacementRule::new(1..=4, Left, 0).substitute(5, Right, 6),
            PlacementRule::new(5..=9, Right, -4).substitute(4, Left, 5),
        ],
        swaps: vec![(2, 5)],
    }
}

/// `Z_3^13 -> S_13` from `U` and `V`.
pub fn p130_spec() -> OverlaySpec {
    use Side::*;
    OverlaySpec {
        name: "p130".into(),
        left_len: 6,
        right_len: 7,
        shift: 4,
        out_len: 13,
        rules: vec![
            PlacementRule::new(1..=3, Left, 0).substitute(7, Right, 4),
            PlacementRule::new(4..=6, Left, 1).substitute(8, Right, 9),
            PlacementRule::new(7..=9, Right, -6).substitute(5, Left, 4),
            PlacementRule::new(10..=13, Right, -5).substitute(6, Left, 8),
        ],
        swaps: vec![(1, 9), (2, 10)],
    }
}

pub fn compose_p91(g: Arc<MappingTable>, h4: Arc<MappingTable>) -> Result<Mapping> {
    require(&g, "G")?;
    require(&h4, "H")?;
    build(p91_spec(), g, h4)
}

pub fn compose_u(r: Arc<MappingTable>, s: Arc<MappingTable>) -> Result<Mapping> {
    require(&r, "R")?;
    require(&s, "S")?;
    build(u_spec(), r, s)
}

pub fn compose_v(r: Arc<MappingTable>, t: Arc<MappingTable>) -> Result<Mapping> {
    require(&r, "R")?;
    require(&t, "T")?;
    build(v_spec(), r, t)
}

/// Materializes `U` and `V` (3^6 and 3^7 words) and checks their
/// constraints before composing.
pub fn compose_p130(u: &Mapping, v: &Mapping) -> Result<Mapping> {
    let u = u.materialize()?;
    let v = v.materialize()?;
    require(&u, "U")?;
    require(&v, "V")?;
    build(p130_spec(), u, v)
}

/// The standard constructions over the shipped tables.
pub mod standard {
    use super::*;

    pub fn p91() -> Result<Mapping> {
        compose_p91(shipped("G")?, shipped("H4")?)
    }

    pub fn u() -> Result<Mapping> {
        compose_u(shipped("R")?, shipped("S")?)
    }

    pub fn v() -> Result<Mapping> {
        compose_v(shipped("R")?, shipped("T")?)
    }

    pub fn p130() -> Result<Mapping> {
        compose_p130(&u()?, &v()?)
    }
}
