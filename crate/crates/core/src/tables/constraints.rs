//! Declarative constraints on mapping tables and the exhaustive checker.

use std::fmt;

use rayon::prelude::*;

use super::MappingTable;
use crate::error::{Error, Result};
use crate::word::{distance_unchecked, DistanceMode, IndexSet, TernaryWord};

/// `value` must appear at one of `positions` in every output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub value: u8,
    pub positions: IndexSet,
}

/// Output position `position` must not hold any of `values`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exclusion {
    pub position: usize,
    pub values: Vec<u8>,
}

/// Distances between outputs with `removed` deleted must dominate input
/// distances (weakly or strictly per `mode`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedDpm {
    pub removed: IndexSet,
    pub mode: DistanceMode,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub membership: Vec<Membership>,
    pub exclusions: Vec<Exclusion>,
    pub projected: Option<ProjectedDpm>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn member(mut self, value: u8, positions: impl IntoIterator<Item = usize>) -> Self {
        self.membership.push(Membership {
            value,
            positions: IndexSet::new(positions),
        });
        self
    }

    pub fn exclude(mut self, position: usize, values: impl IntoIterator<Item = u8>) -> Self {
        self.exclusions.push(Exclusion {
            position,
            values: values.into_iter().collect(),
        });
        self
    }

    pub fn projected(mut self, removed: impl IntoIterator<Item = usize>, mode: DistanceMode) -> Self {
        self.projected = Some(ProjectedDpm {
            removed: IndexSet::new(removed),
            mode,
        });
        self
    }

    /// Checks that positions and values fit outputs of length `width`.
    pub fn validate(&self, width: usize) -> Result<()> {
        let value_ok = |v: u8| v >= 1 && (v as usize) <= width;
        for m in &self.membership {
            m.positions.check_within(width)?;
            if !value_ok(m.value) {
                return Err(Error::IndexOutOfRange {
                    index: m.value as usize,
                    len: width,
                });
            }
        }
        for e in &self.exclusions {
            if e.position == 0 || e.position > width {
                return Err(Error::IndexOutOfRange {
                    index: e.position,
                    len: width,
                });
            }
            if let Some(&v) = e.values.iter().find(|&&v| !value_ok(v)) {
                return Err(Error::IndexOutOfRange {
                    index: v as usize,
                    len: width,
                });
            }
        }
        if let Some(p) = &self.projected {
            p.removed.check_within(width)?;
        }
        Ok(())
    }

    /// True when the set constrains only pairwise distances, so any value
    /// relabeling of a solution is again a solution.
    pub fn is_relabel_invariant(&self) -> bool {
        self.membership.is_empty() && self.exclusions.is_empty()
    }

    /// Row-local check (membership and exclusions).
    pub fn row_ok(&self, row: &[u8]) -> bool {
        self.membership
            .iter()
            .all(|m| m.positions.iter().any(|p| row[p - 1] == m.value))
            && self
                .exclusions
                .iter()
                .all(|e| !e.values.contains(&row[e.position - 1]))
    }

    fn row_violations(&self, word: &TernaryWord, row: &[u8], out: &mut Vec<ConstraintViolation>) {
        for m in &self.membership {
            if !m.positions.iter().any(|p| row[p - 1] == m.value) {
                out.push(ConstraintViolation::Membership {
                    word: word.clone(),
                    value: m.value,
                    positions: m.positions.clone(),
                });
            }
        }
        for e in &self.exclusions {
            let v = row[e.position - 1];
            if e.values.contains(&v) {
                out.push(ConstraintViolation::Exclusion {
                    word: word.clone(),
                    position: e.position,
                    value: v,
                });
            }
        }
    }

    /// Text form understood by [`ConstraintFile::parse`] (without dimensions).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for m in &self.membership {
            s.push_str(&format!("member {} {}\n", m.value, join(m.positions.iter())));
        }
        for e in &self.exclusions {
            s.push_str(&format!("exclude {} {}\n", e.position, join(e.values.iter())));
        }
        if let Some(p) = &self.projected {
            s.push_str(&format!("project {} {}\n", join(p.removed.iter()), p.mode));
        }
        s
    }
}

fn join<T: fmt::Display>(it: impl Iterator<Item = T>) -> String {
    let parts: Vec<String> = it.map(|v| v.to_string()).collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(",")
    }
}

/// The conditions each named building block is required to satisfy.
///
/// `H` and `H4` both name the 4-trit table paired with `G`.
pub fn builtin_constraints(name: &str) -> Result<ConstraintSet> {
    use DistanceMode::{Increase, Preserve};
    let c = ConstraintSet::new();
    Ok(match name.to_ascii_uppercase().as_str() {
        "F" => c.exclude(5, [1, 2]).projected([], Increase),
        "G" => c.member(6, [1, 2, 3]).member(7, [4, 5, 6]).projected([7], Preserve),
        "H" | "H4" => c.member(1, [1, 2, 3]).projected([5, 6], Preserve),
        "R" => c.member(1, [1, 2, 3]).exclude(5, [5]).projected([4, 5], Preserve),
        "S" => c.member(2, [1, 2, 3]).exclude(5, [1]).projected([4, 5], Preserve),
        "T" => c.member(2, [1, 2, 3]).exclude(6, [1]).projected([5, 6], Preserve),
        "U" => c.member(7, [1, 2, 3]).member(8, [5, 6, 7]).projected([4, 8], Preserve),
        "V" => c.member(1, [1, 2, 3]).member(2, [5, 6, 7]).projected([4, 9], Preserve),
        _ => return Err(Error::UnknownName(name.into())),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintViolation {
    Membership {
        word: TernaryWord,
        value: u8,
        positions: IndexSet,
    },
    Exclusion {
        word: TernaryWord,
        position: usize,
        value: u8,
    },
    Projected {
        x: TernaryWord,
        y: TernaryWord,
        input_distance: usize,
        output_distance: usize,
    },
}

impl ConstraintViolation {
    fn sort_key(&self) -> (&TernaryWord, Option<&TernaryWord>, u8) {
        match self {
            ConstraintViolation::Membership { word, .. } => (word, None, 0),
            ConstraintViolation::Exclusion { word, .. } => (word, None, 1),
            ConstraintViolation::Projected { x, y, .. } => (x, Some(y), 2),
        }
    }
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintViolation::Membership {
                word,
                value,
                positions,
            } => write!(f, "{word}: value {value} not at positions {positions}"),
            ConstraintViolation::Exclusion {
                word,
                position,
                value,
            } => write!(f, "{word}: position {position} holds forbidden value {value}"),
            ConstraintViolation::Projected {
                x,
                y,
                input_distance,
                output_distance,
            } => write!(
                f,
                "{x}/{y}: input distance {input_distance}, projected output distance {output_distance}"
            ),
        }
    }
}

/// Outcome of an exhaustive constraint check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintReport {
    pub table: String,
    pub rows_checked: usize,
    pub pairs_checked: u64,
    pub violations: Vec<ConstraintViolation>,
}

impl ConstraintReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} rows, {} pairs, {} violations)",
            self.table,
            if self.passed() { "pass" } else { "fail" },
            self.rows_checked,
            self.pairs_checked,
            self.violations.len()
        )?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Checks every row and, when a projected constraint is present, every
/// unordered pair of rows. Violations come back sorted by domain word.
pub fn check_constraints(t: &MappingTable, c: &ConstraintSet) -> Result<ConstraintReport> {
    c.validate(t.width())?;
    let n = t.n();
    let rows = t.len();
    let keep = c
        .projected
        .as_ref()
        .map(|p| p.removed.kept_positions(t.width()))
        .unwrap_or_default();

    let chunks: Vec<(u64, Vec<ConstraintViolation>)> = (0..rows)
        .into_par_iter()
        .map(|i| {
            let x = TernaryWord::from_index(n, i);
            let row = t.row(i);
            let mut found = Vec::new();
            c.row_violations(&x, row, &mut found);
            let mut pairs = 0u64;
            if let Some(p) = &c.projected {
                let xp: Vec<u8> = keep.iter().map(|&q| row[q]).collect();
                let mut yp = vec![0u8; keep.len()];
                for j in i + 1..rows {
                    let y = TernaryWord::from_index(n, j);
                    let other = t.row(j);
                    for (slot, &q) in yp.iter_mut().zip(&keep) {
                        *slot = other[q];
                    }
                    let din = distance_unchecked(x.trits(), y.trits());
                    let dout = distance_unchecked(&xp, &yp);
                    pairs += 1;
                    if !p.mode.admits(din, dout) {
                        found.push(ConstraintViolation::Projected {
                            x: x.clone(),
                            y,
                            input_distance: din,
                            output_distance: dout,
                        });
                    }
                }
            }
            (pairs, found)
        })
        .collect();

    let pairs_checked = chunks.iter().map(|c| c.0).sum();
    let mut violations: Vec<_> = chunks.into_iter().flat_map(|c| c.1).collect();
    violations.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(ConstraintReport {
        table: t.name().to_string(),
        rows_checked: rows,
        pairs_checked,
        violations,
    })
}

/// A constraint file: dimensions plus a [`ConstraintSet`].
///
/// ```text
/// # comment
/// n 3
/// k 2
/// member 1 1,2,3
/// exclude 5 5
/// project 4,5 preserve
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintFile {
    pub n: usize,
    pub k: usize,
    pub constraints: ConstraintSet,
}

impl ConstraintFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut k = None;
        let mut constraints = ConstraintSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let bad = |message: &str| Error::Parse {
                line,
                message: format!("{message}: '{content}'"),
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            match fields.as_slice() {
                ["n", v] => n = Some(v.parse().map_err(|_| bad("bad n"))?),
                ["k", v] => k = Some(v.parse().map_err(|_| bad("bad k"))?),
                ["member", value, positions] => {
                    let value = value.parse().map_err(|_| bad("bad value"))?;
                    let positions = parse_list(positions).ok_or_else(|| bad("bad positions"))?;
                    constraints = constraints.member(value, positions);
                }
                ["exclude", position, values] => {
                    let position = position.parse().map_err(|_| bad("bad position"))?;
                    let values = parse_list(values).ok_or_else(|| bad("bad values"))?;
                    constraints = constraints.exclude(position, values);
                }
                ["project", removed, mode] => {
                    if constraints.projected.is_some() {
                        return Err(bad("duplicate project line"));
                    }
                    let removed: Vec<usize> =
                        parse_list(removed).ok_or_else(|| bad("bad index set"))?;
                    let mode = mode.parse().map_err(|_| bad("bad mode"))?;
                    constraints = constraints.projected(removed, mode);
                }
                _ => return Err(bad("unrecognised line")),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            message: format!("missing '{what}' line"),
        };
        let n = n.ok_or_else(|| missing("n"))?;
        let k = k.ok_or_else(|| missing("k"))?;
        constraints.validate(n + k)?;
        Ok(Self { n, k, constraints })
    }

    pub fn to_text(&self) -> String {
        format!("n {}\nk {}\n{}", self.n, self.k, self.constraints.to_text())
    }
}

/// Comma-separated list; `-` is the empty list.
fn parse_list<T: std::str::FromStr>(s: &str) -> Option<Vec<T>> {
    if s == "-" {
        return Some(Vec::new());
    }
    s.split(',').map(|p| p.trim().parse().ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::shipped;

    #[test]
    fn builtin_sets_match_stated_conditions() {
        let g = builtin_constraints("G").unwrap();
        assert!(g.membership.contains(&Membership {
            value: 6,
            positions: IndexSet::new([1, 2, 3])
        }));
        let r = builtin_constraints("R").unwrap();
        assert!(r.exclusions.contains(&Exclusion {
            position: 5,
            values: vec![5]
        }));
        let t = builtin_constraints("T").unwrap();
        assert_eq!(t.projected.unwrap().removed, IndexSet::new([5, 6]));
        assert_eq!(
            builtin_constraints("H").unwrap(),
            builtin_constraints("H4").unwrap()
        );
        assert!(builtin_constraints("P").is_err());
    }

    #[test]
    fn f_avoids_one_and_two_in_last_place() {
        let f = shipped("F").unwrap();
        let c = ConstraintSet::new().exclude(5, [1, 2]);
        let report = check_constraints(&f, &c).unwrap();
        assert!(report.passed());
        assert_eq!(report.rows_checked, 27);
    }

    #[test]
    fn shipped_tables_pass_their_constraints() {
        for (table, name) in [("F", "F"), ("G", "G"), ("H4", "H"), ("R", "R"), ("S", "S"), ("T", "T")] {
            let t = shipped(table).unwrap();
            let report = check_constraints(&t, &builtin_constraints(name).unwrap()).unwrap();
            assert!(report.passed(), "{report}");
        }
    }

    #[test]
    fn counterexample_is_witnessed() {
        let f = shipped("F").unwrap();
        let mut rows = f.flat().to_vec();
        rows[..5].copy_from_slice(&[1, 2, 3, 4, 5]);
        let idx = crate::word::word_index(&[1, 1, 1]);
        rows[idx * 5..idx * 5 + 5].copy_from_slice(&[2, 1, 3, 4, 5]);
        let t = MappingTable::from_rows("F'", 3, 2, rows).unwrap();
        let c = ConstraintSet::new().projected(std::iter::empty(), DistanceMode::Preserve);
        let report = check_constraints(&t, &c).unwrap();
        assert!(!report.passed());
        assert!(report.violations.contains(&ConstraintViolation::Projected {
            x: TernaryWord::new(vec![0, 0, 0]).unwrap(),
            y: TernaryWord::new(vec![1, 1, 1]).unwrap(),
            input_distance: 3,
            output_distance: 2,
        }));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let r = shipped("R").unwrap();
        assert!(check_constraints(&r, &builtin_constraints("G").unwrap()).is_err());
    }

    #[test]
    fn constraint_file_round_trip() {
        let text = "# R-like\nn 3\nk 2\nmember 1 1,2,3\nexclude 5 5\nproject 4,5 preserve\n";
        let file = ConstraintFile::parse(text).unwrap();
        assert_eq!(file.constraints, builtin_constraints("R").unwrap());
        assert_eq!(ConstraintFile::parse(&file.to_text()).unwrap(), file);
        assert!(ConstraintFile::parse("n 3\nmember 1 1\n").is_err());
        assert!(ConstraintFile::parse("n 3\nk 2\nmember 9 1\n").is_err());
        assert!(ConstraintFile::parse("n 3\nk 2\nfrob\n").is_err());
        let empty = ConstraintFile::parse("n 1\nk 2\nproject - dim\n").unwrap();
        assert_eq!(
            empty.constraints.projected.unwrap().mode,
            DistanceMode::Increase
        );
    }
}
