//! Explicit mapping tables: the six shipped building blocks and the
//! plain-text table format used to load and emit them.
//!
//! A table file starts with a header line `n k` followed by exactly `3^n`
//! rows of the form `t1 t2 ... tn : p1 p2 ... p(n+k)`. Rows may come in any
//! order; [`MappingTable::to_text`] always emits them lexicographically.

mod constraints;

pub use constraints::{
    builtin_constraints, check_constraints, ConstraintFile, ConstraintReport, ConstraintSet,
    ConstraintViolation, ProjectedDpm,
};

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result, TableProblem};
use crate::word::{domain_size, is_permutation, write_spaced, Permutation, TernaryWord};

/// A total map from `Z_3^n` to `S_{n+k}`, stored densely in lexicographic
/// order of the domain.
#[derive(Clone, PartialEq, Eq)]
pub struct MappingTable {
    name: String,
    n: usize,
    k: usize,
    rows: Vec<u8>,
}

impl std::fmt::Debug for MappingTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MappingTable")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("rows", &self.len())
            .finish()
    }
}

impl MappingTable {
    /// Builds a table from dense rows, checking every invariant.
    pub fn from_rows(name: impl Into<String>, n: usize, k: usize, rows: Vec<u8>) -> Result<Self> {
        let name = name.into();
        let width = n + k;
        let count = domain_size(n).ok_or(Error::TooLarge { n })?;
        if width > u8::MAX as usize {
            return Err(Error::Table {
                table: name,
                line: 1,
                problem: TableProblem::Header(format!("output length {width} exceeds 255")),
            });
        }
        if rows.len() != count * width {
            return Err(Error::Table {
                table: name,
                line: 0,
                problem: TableProblem::MissingRows {
                    expected: count,
                    found: rows.len().checked_div(width).unwrap_or(0),
                },
            });
        }
        let table = Self { name, n, k, rows };
        table.check_outputs(|idx| idx + 2)?;
        Ok(table)
    }

    /// Trusted constructor for tables produced by the crate's own constructions.
    pub(crate) fn from_rows_unchecked(name: String, n: usize, k: usize, rows: Vec<u8>) -> Self {
        debug_assert_eq!(rows.len(), domain_size(n).unwrap() * (n + k));
        Self { name, n, k, rows }
    }

    fn check_outputs(&self, line_of: impl Fn(usize) -> usize) -> Result<()> {
        let mut seen: HashMap<&[u8], usize> = HashMap::with_capacity(self.len());
        for idx in 0..self.len() {
            let row = self.row(idx);
            if !is_permutation(row) {
                return Err(self.problem(
                    line_of(idx),
                    TableProblem::NotPermutation(spaced(row)),
                ));
            }
            if let Some(&first) = seen.get(row) {
                return Err(self.problem(
                    line_of(idx),
                    TableProblem::DuplicateOutput {
                        output: spaced(row),
                        first: TernaryWord::from_index(self.n, first).to_string(),
                    },
                ));
            }
            seen.insert(row, idx);
        }
        Ok(())
    }

    fn problem(&self, line: usize, problem: TableProblem) -> Error {
        Error::Table {
            table: self.name.clone(),
            line,
            problem,
        }
    }

    /// Parses the table file format.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let name = name.into();
        let err = |line: usize, problem: TableProblem| Error::Table {
            table: name.clone(),
            line,
            problem,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| err(1, TableProblem::Header("empty input".into())))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(header_line, TableProblem::Header(header.into())))?;
        let [n, k] = dims[..] else {
            return Err(err(header_line, TableProblem::Header(header.into())));
        };
        let width = n + k;
        let count = match domain_size(n) {
            Some(c) if c <= 1 << 24 && width <= u8::MAX as usize => c,
            _ => return Err(err(header_line, TableProblem::Header(header.into()))),
        };

        let mut rows = vec![0u8; count * width];
        let mut line_of = vec![0usize; count];
        let mut found = 0usize;
        for (line, text) in lines {
            let (lhs, rhs) = text
                .split_once(':')
                .ok_or_else(|| err(line, TableProblem::Malformed(text.into())))?;
            let trits: Vec<u8> = parse_numbers(lhs)
                .filter(|t| t.len() == n && t.iter().all(|&v| v <= 2))
                .ok_or_else(|| err(line, TableProblem::Malformed(text.into())))?;
            let values: Vec<u8> = parse_numbers(rhs)
                .filter(|v| v.len() == width)
                .ok_or_else(|| err(line, TableProblem::Malformed(text.into())))?;
            let idx = crate::word::word_index(&trits);
            if line_of[idx] != 0 {
                let word = TernaryWord::new(trits).expect("validated trits");
                return Err(err(line, TableProblem::DuplicateWord(word.to_string())));
            }
            if !is_permutation(&values) {
                return Err(err(line, TableProblem::NotPermutation(spaced(&values))));
            }
            line_of[idx] = line;
            rows[idx * width..(idx + 1) * width].copy_from_slice(&values);
            found += 1;
        }
        if found != count {
            return Err(err(
                0,
                TableProblem::MissingRows {
                    expected: count,
                    found,
                },
            ));
        }
        let table = Self { name, n, k, rows };
        table.check_outputs(|idx| line_of[idx])?;
        Ok(table)
    }

    /// Reads and parses a table file; the table is named after the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self::parse(name, &text)
    }

    /// Canonical text form, rows in lexicographic order.
    pub fn to_text(&self) -> String {
        let width = self.width();
        let mut out = String::with_capacity(self.len() * (2 * width + 2 * self.n + 4) + 8);
        writeln!(out, "{} {}", self.n, self.k).unwrap();
        let mut word = vec![0u8; self.n];
        for idx in 0..self.len() {
            crate::word::write_word(idx, &mut word);
            write_spaced(&mut out, &word).unwrap();
            out.push_str(" : ");
            write_spaced(&mut out, self.row(idx)).unwrap();
            out.push('\n');
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Domain word length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Length increase.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Output permutation length `n + k`.
    pub fn width(&self) -> usize {
        self.n + self.k
    }

    /// Number of rows, `3^n`.
    pub fn len(&self) -> usize {
        if self.width() == 0 {
            domain_size(self.n).unwrap_or(0)
        } else {
            self.rows.len() / self.width()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Output row for the domain word with lexicographic rank `idx`.
    #[inline]
    pub fn row(&self, idx: usize) -> &[u8] {
        let w = self.width();
        &self.rows[idx * w..(idx + 1) * w]
    }

    /// Output row for a raw trit slice.
    #[inline]
    pub fn row_for(&self, trits: &[u8]) -> &[u8] {
        self.row(crate::word::word_index(trits))
    }

    /// All rows, flat.
    pub fn flat(&self) -> &[u8] {
        &self.rows
    }

    pub fn get(&self, word: &TernaryWord) -> Result<Permutation> {
        if word.len() != self.n {
            return Err(Error::LengthMismatch {
                left: word.len(),
                right: self.n,
            });
        }
        Ok(Permutation::from_raw_unchecked(
            self.row(word.index()).to_vec(),
        ))
    }

    /// `(word, output)` pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (TernaryWord, Permutation)> + '_ {
        (0..self.len()).map(move |i| {
            (
                TernaryWord::from_index(self.n, i),
                Permutation::from_raw_unchecked(self.row(i).to_vec()),
            )
        })
    }
}

fn parse_numbers(s: &str) -> Option<Vec<u8>> {
    s.split_whitespace().map(|t| t.parse().ok()).collect()
}

fn spaced(values: &[u8]) -> String {
    let mut s = String::new();
    write_spaced(&mut s, values).unwrap();
    s
}

/// Names of the shipped tables. `H4` is the 4-trit table that pairs with `G`.
pub const SHIPPED: [&str; 6] = ["F", "G", "H4", "R", "S", "T"];

fn shipped_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "F" => include_str!("../../data/F.tbl"),
        "G" => include_str!("../../data/G.tbl"),
        "H4" => include_str!("../../data/H4.tbl"),
        "R" => include_str!("../../data/R.tbl"),
        "S" => include_str!("../../data/S.tbl"),
        "T" => include_str!("../../data/T.tbl"),
        _ => return None,
    })
}

/// Canonical shipped name, accepting `H` for `H4`.
pub fn canonical_name(name: &str) -> Option<&'static str> {
    let name = if name.eq_ignore_ascii_case("h") {
        "H4"
    } else {
        name
    };
    SHIPPED.iter().copied().find(|s| s.eq_ignore_ascii_case(name))
}

/// One of the shipped tables, parsed once per process.
pub fn shipped(name: &str) -> Result<Arc<MappingTable>> {
    static CACHE: OnceLock<Vec<Arc<MappingTable>>> = OnceLock::new();
    let canonical = canonical_name(name).ok_or_else(|| Error::UnknownName(name.into()))?;
    let all = CACHE.get_or_init(|| {
        SHIPPED
            .iter()
            .map(|n| {
                Arc::new(
                    MappingTable::parse(*n, shipped_text(n).unwrap())
                        .expect("shipped table data is valid"),
                )
            })
            .collect()
    });
    let pos = SHIPPED.iter().position(|s| *s == canonical).unwrap();
    Ok(Arc::clone(&all[pos]))
}

/// Resolves a shipped table, preferring `<dir>/<name>.tbl` when a data
/// directory is given and the file exists there.
pub fn resolve(name: &str, data_dir: Option<&Path>) -> Result<Arc<MappingTable>> {
    if let (Some(dir), Some(canonical)) = (data_dir, canonical_name(name)) {
        let path = dir.join(format!("{canonical}.tbl"));
        if path.is_file() {
            return Ok(Arc::new(MappingTable::load(&path)?.with_name(canonical)));
        }
    }
    shipped(name)
}
