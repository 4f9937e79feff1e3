//! Lower bounds on permutation-array sizes from ternary code sizes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::{build_code, CodeSpec};
use crate::error::{Error, Result};

/// A lower bound on `A_3(n, d)` and where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct A3Entry {
    pub value: u128,
    pub provenance: String,
}

/// Known lower bounds on the largest ternary code of length `n` and
/// minimum distance `d`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct A3Table {
    entries: BTreeMap<(usize, usize), A3Entry>,
}

impl A3Table {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entries from the built-in codes, each sized by enumeration.
    pub fn builtin() -> Result<Self> {
        let mut t = Self::new();
        for (spec, name) in [
            (CodeSpec::Golay11, "golay11"),
            (CodeSpec::Hamming(2), "hamming(2)"),
            (CodeSpec::Hamming(3), "hamming(3)"),
        ] {
            let code = build_code(&spec)?;
            let d = code
                .realized_distance()
                .ok_or_else(|| Error::Bound(format!("{name} distance unchecked")))?;
            t.insert(code.n(), d, code.len() as u128, name);
        }
        Ok(t)
    }

    /// Keeps the larger value when `(n, d)` is already present.
    pub fn insert(&mut self, n: usize, d: usize, value: u128, provenance: &str) {
        let e = A3Entry {
            value,
            provenance: provenance.to_string(),
        };
        match self.entries.get(&(n, d)) {
            Some(old) if old.value >= value => {}
            _ => {
                self.entries.insert((n, d), e);
            }
        }
    }

    pub fn get(&self, n: usize, d: usize) -> Option<&A3Entry> {
        self.entries.get(&(n, d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &A3Entry)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    /// Parses `n,d,bound,provenance` rows; a leading `n,d,...` header and
    /// `#` comments are skipped.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut t = Self::new();
        t.merge_csv(text)?;
        Ok(t)
    }

    pub fn merge_csv(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') || (line == 1 && l.starts_with("n,")) {
                continue;
            }
            let parts: Vec<&str> = l.splitn(4, ',').map(str::trim).collect();
            let bad = |what: &str| Error::Parse {
                line,
                message: format!("{what} in '{l}'"),
            };
            if parts.len() < 3 {
                return Err(bad("expected n,d,bound,provenance"));
            }
            let n: usize = parts[0].parse().map_err(|_| bad("bad n"))?;
            let d: usize = parts[1].parse().map_err(|_| bad("bad d"))?;
            let v: u128 = parts[2].parse().map_err(|_| bad("bad bound"))?;
            let prov = parts.get(3).copied().filter(|p| !p.is_empty()).unwrap_or("file");
            if d == 0 || d > n || v == 0 {
                return Err(bad("entry outside 1 <= d <= n with positive bound"));
            }
            self.insert(n, d, v, prov);
        }
        self.check_monotone()
    }

    pub fn load_csv(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.merge_csv(&text)
    }

    /// Rejects tables where `entry(n, d) < entry(n, d + 1)`.
    pub fn check_monotone(&self) -> Result<()> {
        for (&(n, d), e) in &self.entries {
            if let Some(next) = self.entries.get(&(n, d + 1)) {
                if e.value < next.value {
                    return Err(Error::Bound(format!(
                        "A3({n},{d}) = {} is below A3({n},{}) = {}",
                        e.value,
                        d + 1,
                        next.value
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,d,bound,provenance\n");
        for (&(n, d), e) in &self.entries {
            s.push_str(&format!("{n},{d},{},{}\n", e.value, e.provenance));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Clause {
    /// `P(n,d) >= A3(n-2, d-1)` for `n >= 5`.
    A,
    /// `P(n,d) >= A3(n-1, d)` for `n >= 10`.
    B,
    /// `P(n,d) >= A3(n, d)` for `n >= 13`.
    C,
}

impl Clause {
    pub const ALL: [Clause; 3] = [Clause::A, Clause::B, Clause::C];

    pub fn min_n(self) -> usize {
        match self {
            Clause::A => 5,
            Clause::B => 10,
            Clause::C => 13,
        }
    }

    /// The `A3` entry this clause consults for `P(n, d)`.
    pub fn source(self, n: usize, d: usize) -> (usize, usize) {
        match self {
            Clause::A => (n - 2, d - 1),
            Clause::B => (n - 1, d),
            Clause::C => (n, d),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::A => "a)",
            Clause::B => "b)",
            Clause::C => "c)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Derived {
        value: u128,
        clause: Clause,
        /// `(n, d)` of the cited entry.
        entry: (usize, usize),
        provenance: String,
    },
    /// No clause applies with an available entry.
    NotDerivable(String),
}

impl Bound {
    pub fn value(&self) -> Option<u128> {
        match self {
            Bound::Derived { value, .. } => Some(*value),
            Bound::NotDerivable(_) => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Derived {
                value,
                clause,
                entry: (n, d),
                provenance,
            } => write!(f, "{value} via clause {clause} from A3({n},{d}) [{provenance}]"),
            Bound::NotDerivable(why) => write!(f, "no bound derivable: {why}"),
        }
    }
}

/// Best lower bound on `P(n, d)` over the applicable clauses. Ties go to
/// the clause citing the longest code.
pub fn bound(n: usize, d: usize, table: &A3Table) -> Result<Bound> {
    if d < 2 || d > n {
        return Err(Error::Bound(format!("need 2 <= d <= n, got n={n}, d={d}")));
    }
    let best = Clause::ALL
        .iter()
        .rev()
        .filter(|c| n >= c.min_n())
        .filter_map(|&c| {
            let (m, e) = c.source(n, d);
            table.get(m, e).map(|entry| (c, (m, e), entry))
        })
        .fold(None, |best: Option<(Clause, (usize, usize), &A3Entry)>, cand| match best {
            Some(b) if b.2.value >= cand.2.value => Some(b),
            _ => Some(cand),
        });
    Ok(match best {
        Some((clause, entry, e)) => Bound::Derived {
            value: e.value,
            clause,
            entry,
            provenance: e.provenance.clone(),
        },
        None => {
            let wanted: Vec<String> = Clause::ALL
                .iter()
                .filter(|c| n >= c.min_n())
                .map(|c| {
                    let (m, e) = c.source(n, d);
                    format!("A3({m},{e})")
                })
                .collect();
            Bound::NotDerivable(if wanted.is_empty() {
                format!("no clause applies for n={n} < 5")
            } else {
                format!("table lacks {}", wanted.join(", "))
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn literature() -> A3Table {
        A3Table::parse_csv(include_str!("../../data/a3_literature.csv")).unwrap()
    }

    #[test]
    fn published_examples() {
        let t = literature();
        let b = bound(16, 5, &t).unwrap();
        assert_eq!(b.value(), Some(19683));
        assert!(matches!(b, Bound::Derived { clause: Clause::C, .. }));
        let b = bound(16, 9, &t).unwrap();
        assert_eq!(b.value(), Some(243));
        assert!(matches!(b, Bound::Derived { clause: Clause::C, .. }));
    }

    #[test]
    fn golay_feeds_clause_a() {
        let t = A3Table::builtin().unwrap();
        assert_eq!(t.get(11, 5).unwrap().value, 729);
        let b = bound(13, 6, &t).unwrap();
        assert_eq!(
            b,
            Bound::Derived {
                value: 729,
                clause: Clause::A,
                entry: (11, 5),
                provenance: "golay11".into()
            }
        );
        assert_eq!(b.to_string(), "729 via clause a) from A3(11,5) [golay11]");
    }

    #[test]
    fn thresholds_respected() {
        let mut t = A3Table::new();
        t.insert(9, 4, 50, "x");
        t.insert(8, 3, 10, "x");
        // n = 9 < 10 rules out clause b) although A3(8,4) is present.
        t.insert(8, 4, 40, "x");
        assert_eq!(bound(9, 4, &t).unwrap().value(), None);
        let b = bound(10, 4, &t).unwrap();
        assert_eq!(b.value(), Some(50));
        assert!(matches!(b, Bound::Derived { clause: Clause::B, .. }));
        assert!(matches!(bound(4, 3, &t).unwrap(), Bound::NotDerivable(_)));
        assert!(bound(6, 1, &t).is_err());
        assert!(bound(6, 7, &t).is_err());
    }

    #[test]
    fn csv_round_trip_and_sanity() {
        let t = literature();
        assert_eq!(A3Table::parse_csv(&t.to_csv()).unwrap(), t);
        let e = A3Table::parse_csv("5,2,3,x\n5,3,9,x\n").unwrap_err();
        assert!(matches!(e, Error::Bound(_)));
        let e = A3Table::parse_csv("5,2\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }
}
