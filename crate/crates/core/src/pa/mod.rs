//! Ternary codes and permutation arrays built by mapping codewords.

mod bound;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::packed::PackedRows;
use crate::verify::verify_pa;
use crate::word::{Permutation, TernaryWord};

pub use bound::{bound, A3Entry, A3Table, Bound, Clause};

const GOLAY_GENERATOR: &str = include_str!("../../data/golay11.gen");

/// File codes with more pairs than this are trusted instead of checked.
pub const FILE_CHECK_PAIRS: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeOrigin {
    Repetition,
    Hamming(u32),
    Golay11,
    File(PathBuf),
}

impl fmt::Display for CodeOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeOrigin::Repetition => f.write_str("repetition"),
            CodeOrigin::Hamming(r) => write!(f, "hamming({r})"),
            CodeOrigin::Golay11 => f.write_str("golay11"),
            CodeOrigin::File(p) => write!(f, "file({})", p.display()),
        }
    }
}

/// Descriptor accepted by [`build_code`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeSpec {
    Repetition(usize),
    Hamming(u32),
    Golay11,
    File(PathBuf),
}

impl FromStr for CodeSpec {
    type Err = Error;

    /// `repetition:<n>`, `hamming:<r>`, `golay11` or `file:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Code(format!("unknown code descriptor '{s}'"));
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "golay11" | "golay" if arg.is_empty() => Ok(CodeSpec::Golay11),
            "repetition" => arg.parse().map(CodeSpec::Repetition).map_err(|_| bad()),
            "hamming" => arg.parse().map(CodeSpec::Hamming).map_err(|_| bad()),
            "file" if !arg.is_empty() => Ok(CodeSpec::File(arg.into())),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TernaryCode {
    n: usize,
    codewords: Vec<TernaryWord>,
    designed_distance: usize,
    origin: CodeOrigin,
    /// Realized minimum distance, when it was computed.
    realized: Option<usize>,
}

impl TernaryCode {
    /// Builds a code from distinct words of equal length, without a
    /// distance check.
    pub fn new(
        n: usize,
        mut codewords: Vec<TernaryWord>,
        designed_distance: usize,
        origin: CodeOrigin,
    ) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::Code("a code needs at least one codeword".into()));
        }
        if let Some(w) = codewords.iter().find(|w| w.len() != n) {
            return Err(Error::Code(format!("codeword {w} does not have length {n}")));
        }
        codewords.sort();
        if let Some(w) = codewords.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Code(format!("duplicate codeword {}", w[0])));
        }
        Ok(Self {
            n,
            codewords,
            designed_distance,
            origin,
            realized: None,
        })
    }

    /// Parses the `n d` header followed by one codeword per line.
    pub fn parse(text: &str, origin: CodeOrigin) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or(Error::Parse { line: 1, message: "missing 'n d' header".into() })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: hl, message: format!("bad header '{header}'") })?;
        let [n, d] = nums[..] else {
            return Err(Error::Parse { line: hl, message: format!("bad header '{header}'") });
        };
        let mut words = Vec::new();
        for (line, l) in lines {
            let trits: Vec<u8> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse { line, message: format!("bad codeword '{l}'") })?;
            if trits.len() != n {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {n} trits, found {}", trits.len()),
                });
            }
            let w = TernaryWord::new(trits).map_err(|e| Error::Parse { line, message: e.to_string() })?;
            words.push(w);
        }
        Self::new(n, words, d, origin)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codewords(&self) -> &[TernaryWord] {
        &self.codewords
    }

    pub fn designed_distance(&self) -> usize {
        self.designed_distance
    }

    pub fn origin(&self) -> &CodeOrigin {
        &self.origin
    }

    /// Realized minimum distance if it was checked; `None` when trusted.
    pub fn realized_distance(&self) -> Option<usize> {
        self.realized
    }

    /// Pairwise minimum distance over all codewords (`None` for one word).
    pub fn min_distance(&self) -> Option<usize> {
        let flat: Vec<u8> = self.codewords.iter().flat_map(|w| w.trits().iter().copied()).collect();
        let rows = PackedRows::full(&flat, self.n);
        let size = self.len();
        (0..size)
            .into_par_iter()
            .filter_map(|i| (i + 1..size).map(|j| rows.distance(i, j) as usize).min())
            .min()
    }

    /// Minimum nonzero weight; equals the minimum distance of a linear code.
    fn min_weight(&self) -> Option<usize> {
        self.codewords
            .par_iter()
            .map(|w| w.trits().iter().filter(|&&t| t != 0).count())
            .filter(|&wt| wt > 0)
            .min()
    }

    fn checked(mut self, realized: Option<usize>) -> Result<Self> {
        if let Some(r) = realized {
            if r < self.designed_distance {
                return Err(Error::Code(format!(
                    "{} has minimum distance {r}, below designed {}",
                    self.origin, self.designed_distance
                )));
            }
        }
        self.realized = realized;
        Ok(self)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.designed_distance);
        for w in &self.codewords {
            let t: Vec<String> = w.trits().iter().map(u8::to_string).collect();
            s.push_str(&t.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Every `F_3`-linear combination of the generator rows.
fn span(rows: &[Vec<u8>], n: usize) -> Vec<TernaryWord> {
    let k = rows.len();
    (0..3usize.pow(k as u32))
        .map(|mut m| {
            let mut w = vec![0u8; n];
            for row in rows.iter().rev() {
                let c = (m % 3) as u8;
                m /= 3;
                for (x, &g) in w.iter_mut().zip(row) {
                    *x = (*x + c * g) % 3;
                }
            }
            TernaryWord::new(w).expect("trits")
        })
        .collect()
}

fn golay11() -> Result<TernaryCode> {
    let mut lines = GOLAY_GENERATOR.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Code("empty generator".into()))?;
    let dims: Vec<usize> = header.split_whitespace().filter_map(|v| v.parse().ok()).collect();
    let [k, n] = dims[..] else {
        return Err(Error::Code("bad generator header".into()));
    };
    let rows: Vec<Vec<u8>> = lines
        .map(|l| l.split_whitespace().filter_map(|v| v.parse().ok()).collect())
        .collect();
    if rows.len() != k || rows.iter().any(|r: &Vec<u8>| r.len() != n) {
        return Err(Error::Code("generator shape mismatch".into()));
    }
    let code = TernaryCode::new(n, span(&rows, n), 5, CodeOrigin::Golay11)?;
    let d = code.min_weight();
    if d != Some(5) {
        return Err(Error::Code(format!("golay11 minimum distance {d:?}, expected 5")));
    }
    code.checked(d)
}

/// Systematic generator `[I | -A^T]` from the parity check `[A | I]` whose
/// columns are the projective points of `F_3^r`.
fn hamming(r: u32) -> Result<TernaryCode> {
    if !(2..=3).contains(&r) {
        return Err(Error::Code(format!("hamming({r}) unsupported; use r in 2..=3")));
    }
    let r = r as usize;
    let n = (3usize.pow(r as u32) - 1) / 2;
    let points: Vec<Vec<u8>> = (1..3usize.pow(r as u32))
        .map(|mut v| {
            let mut p = vec![0u8; r];
            for x in p.iter_mut().rev() {
                *x = (v % 3) as u8;
                v /= 3;
            }
            p
        })
        .filter(|p| p.iter().find(|&&x| x != 0) == Some(&1))
        .filter(|p| p.iter().filter(|&&x| x != 0).count() > 1)
        .collect();
    let info = n - r;
    debug_assert_eq!(points.len(), info);
    let rows: Vec<Vec<u8>> = points
        .iter()
        .enumerate()
        .map(|(i, col)| {
            let mut g = vec![0u8; n];
            g[i] = 1;
            for (j, &a) in col.iter().enumerate() {
                g[info + j] = (3 - a) % 3;
            }
            g
        })
        .collect();
    let code = TernaryCode::new(n, span(&rows, n), 3, CodeOrigin::Hamming(r as u32))?;
    let d = code.min_weight();
    code.checked(d)
}

pub fn build_code(spec: &CodeSpec) -> Result<TernaryCode> {
    match spec {
        CodeSpec::Repetition(n) => {
            if *n == 0 {
                return Err(Error::Code("repetition length must be positive".into()));
            }
            let words = (0..3u8).map(|t| TernaryWord::new(vec![t; *n]).expect("trits")).collect();
            TernaryCode::new(*n, words, *n, CodeOrigin::Repetition)?.checked(Some(*n))
        }
        CodeSpec::Hamming(r) => hamming(*r),
        CodeSpec::Golay11 => golay11(),
        CodeSpec::File(path) => load_code(path),
    }
}

fn load_code(path: &Path) -> Result<TernaryCode> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let code = TernaryCode::parse(&text, CodeOrigin::File(path.to_path_buf()))?;
    let pairs = (code.len() as u128).pow(2);
    if pairs <= FILE_CHECK_PAIRS {
        let d = code.min_distance();
        code.checked(d)
    } else {
        Ok(code)
    }
}

/// A set of distinct permutations of equal length.
#[derive(Clone, Debug)]
pub struct PermutationArray {
    n: usize,
    members: Vec<Permutation>,
    min_distance: OnceLock<Option<usize>>,
}

impl PartialEq for PermutationArray {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.members == other.members
    }
}

impl PermutationArray {
    /// Members keep their given order; duplicates are rejected.
    pub fn new(members: Vec<Permutation>) -> Result<Self> {
        let n = members
            .first()
            .map(Permutation::len)
            .ok_or_else(|| Error::Code("a permutation array needs a member".into()))?;
        if let Some(p) = members.iter().find(|p| p.len() != n) {
            return Err(Error::Code(format!("member {p} does not have length {n}")));
        }
        let mut sorted: Vec<&Permutation> = members.iter().collect();
        sorted.sort_by(|a, b| a.values().cmp(b.values()));
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Code(format!("duplicate member {}", w[0])));
        }
        Ok(Self {
            n,
            members,
            min_distance: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    /// Realized minimum pairwise distance, computed on first use.
    pub fn min_distance(&self) -> Option<usize> {
        *self.min_distance.get_or_init(|| verify_pa(self, 0).min_distance)
    }

    /// `n size min_distance` header, then one member per line.
    pub fn to_text(&self) -> String {
        let d = self.min_distance().map_or("-".to_string(), |d| d.to_string());
        let mut s = format!("{} {} {}\n", self.n, self.len(), d);
        for p in &self.members {
            s.push_str(&p.to_string());
            s.push('\n');
        }
        s
    }
}

/// Image of the code under `f`, in codeword order.
pub fn build_pa(code: &TernaryCode, f: &Mapping) -> Result<PermutationArray> {
    if code.n() != f.n() {
        return Err(Error::LengthMismatch {
            left: code.n(),
            right: f.n(),
        });
    }
    let members: Vec<Permutation> = code
        .codewords()
        .par_iter()
        .map(|w| f.eval(w))
        .collect::<Result<_>>()?;
    PermutationArray::new(members)
        .map_err(|e| Error::Code(format!("mapping {} is not injective on the code: {e}", f.label())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::shipped;

    #[test]
    fn repetition_code() {
        let c = build_code(&CodeSpec::Repetition(5)).unwrap();
        let words: Vec<String> = c.codewords().iter().map(|w| w.to_string()).collect();
        assert_eq!(words, ["00000", "11111", "22222"]);
        assert_eq!(c.designed_distance(), 5);
        assert_eq!(c.min_distance(), Some(5));
    }

    #[test]
    fn golay_code() {
        let c = build_code(&CodeSpec::Golay11).unwrap();
        assert_eq!((c.n(), c.len()), (11, 729));
        assert_eq!(c.realized_distance(), Some(5));
    }

    #[test]
    fn hamming_codes() {
        let c = build_code(&CodeSpec::Hamming(2)).unwrap();
        assert_eq!((c.n(), c.len()), (4, 9));
        assert_eq!(c.min_distance(), Some(3));
        let c = build_code(&CodeSpec::Hamming(3)).unwrap();
        assert_eq!((c.n(), c.len(), c.realized_distance()), (13, 59049, Some(3)));
        assert!(build_code(&CodeSpec::Hamming(1)).is_err());
    }

    #[test]
    fn descriptors() {
        assert_eq!("golay11".parse::<CodeSpec>().unwrap(), CodeSpec::Golay11);
        assert_eq!("repetition:9".parse::<CodeSpec>().unwrap(), CodeSpec::Repetition(9));
        assert_eq!("hamming:2".parse::<CodeSpec>().unwrap(), CodeSpec::Hamming(2));
        assert!("hamming:x".parse::<CodeSpec>().is_err());
        assert!("bogus".parse::<CodeSpec>().is_err());
    }

    #[test]
    fn code_file_format() {
        let c = TernaryCode::parse("3 3\n0 0 0\n1 1 1\n", CodeOrigin::Repetition).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(TernaryCode::parse(&c.to_text(), CodeOrigin::Repetition).unwrap().codewords(), c.codewords());
        let e = TernaryCode::parse("3 3\n0 0 0\n1 1\n", CodeOrigin::Repetition).unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, message: "expected 3 trits, found 2".into() });
        assert!(TernaryCode::parse("3 3\n0 0 0\n0 0 0\n", CodeOrigin::Repetition).is_err());
        assert!(TernaryCode::parse("3 3\n0 3 0\n", CodeOrigin::Repetition).is_err());
    }

    #[test]
    fn file_code_distance_checked() {
        let dir = std::env::temp_dir().join(format!("permmap-code-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.code");
        std::fs::write(&path, "3 3\n0 0 0\n0 1 1\n").unwrap();
        assert!(matches!(build_code(&CodeSpec::File(path.clone())), Err(Error::Code(_))));
        std::fs::write(&path, "3 2\n0 0 0\n0 1 1\n").unwrap();
        assert_eq!(build_code(&CodeSpec::File(path)).unwrap().realized_distance(), Some(2));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn pa_from_f() {
        let code = build_code(&CodeSpec::Repetition(3)).unwrap();
        let pa = build_pa(&code, &Mapping::from(shipped("F").unwrap())).unwrap();
        assert_eq!(pa.len(), 3);
        assert!(pa.min_distance().unwrap() >= 4);
        let text = pa.to_text();
        assert!(text.starts_with(&format!("5 3 {}\n", pa.min_distance().unwrap())));
        assert_eq!(text.lines().count(), 4);
        assert!(build_pa(&build_code(&CodeSpec::Repetition(4)).unwrap(), &Mapping::from(shipped("F").unwrap())).is_err());
    }

    #[test]
    fn pa_rejects_duplicates() {
        let p = Permutation::identity(3);
        assert!(PermutationArray::new(vec![p.clone(), p]).is_err());
        assert!(PermutationArray::new(vec![]).is_err());
    }
}
