//! The one-coordinate extension operator and the chains it generates.
//!
//! Given `f: Z_3^n -> S_{n+k}` and `φ = f(x)`, with `r` the position of the
//! pivot value `n+k-4` in `φ`, the extension `g` appends one trit `a`:
//!
//! * `a = 0`: append `n+k+1`.
//! * `a = 1`: write `n+k+1` at `r`, append `n+k-4`.
//! * `a = 2`: write `n+k+1` at position `n+k` and append the displaced
//!   value, except when `n` is even and the last trit of `x` is 2, in which
//!   case position `n+k-1` is used instead.

use thiserror::Error;

use crate::error::{Error, Result};
use crate::mapping::Mapping;
use crate::tables::MappingTable;
use crate::word::{domain_size, DistanceMode, TernaryWord};

/// Domains up to `3^MATERIALIZE_UP_TO` are stored as tables when extended;
/// larger ones are evaluated per word by walking the chain.
pub const MATERIALIZE_UP_TO: usize = 10;

/// Applies one extension step in place. `out` holds `f(x)` on entry
/// (length `n + k`) and `g(x|a)` on return (length `n + k + 1`).
///
/// `n` is the domain length of `f`; `last` is `x_n` (None when `n = 0`).
#[inline]
pub(crate) fn extend_row(out: &mut Vec<u8>, n: usize, k: usize, last: Option<u8>, a: u8) {
    let top = (n + k) as u8;
    let next = top + 1;
    match a {
        0 => out.push(next),
        1 => {
            let pivot = top - 4;
            let r = out
                .iter()
                .position(|&v| v == pivot)
                .expect("pivot value present in a permutation");
            out[r] = next;
            out.push(pivot);
        }
        _ => {
            let pos = if n % 2 == 1 || last.is_none_or(|t| t < 2) {
                n + k - 1
            } else {
                n + k - 2
            };
            let displaced = out[pos];
            out[pos] = next;
            out.push(displaced);
        }
    }
}

fn root_label(label: &str) -> &str {
    label
        .strip_prefix("extend:")
        .and_then(|rest| rest.rsplit_once(':').map(|(root, _)| root))
        .unwrap_or(label)
}

/// `H(f)`: a mapping on words one trit longer, with the same length increase.
pub fn extend_once(f: &Mapping) -> Result<Mapping> {
    let (n, k) = (f.n(), f.k());
    if n + k < 5 {
        return Err(Error::NoPivot { n, k });
    }
    if n + k + 1 > u8::MAX as usize {
        return Err(Error::TooLarge { n: n + 1 });
    }
    let label = format!("extend:{}:{}", root_label(f.label()), n + 1);
    if n < MATERIALIZE_UP_TO {
        let base = f.materialize()?;
        let count = domain_size(n).expect("small domain");
        let width = n + k + 1;
        let mut rows = Vec::with_capacity(3 * count * width);
        let mut buf = Vec::with_capacity(width);
        let mut word = vec![0u8; n];
        for idx in 0..count {
            crate::word::write_word(idx, &mut word);
            for a in 0..3 {
                buf.clear();
                buf.extend_from_slice(base.row(idx));
                extend_row(&mut buf, n, k, word.last().copied(), a);
                rows.extend_from_slice(&buf);
            }
        }
        let table = MappingTable::from_rows_unchecked(label, n + 1, k, rows);
        Ok(Mapping::from(table))
    } else {
        Ok(Mapping::extension_of(f.clone(), label))
    }
}

/// Iterates [`extend_once`] until the domain length is `target_n`.
pub fn extend_to(f: &Mapping, target_n: usize) -> Result<Mapping> {
    if target_n < f.n() {
        return Err(Error::InvalidJob(format!(
            "target length {target_n} is below the base length {}",
            f.n()
        )));
    }
    let mut g = f.clone();
    while g.n() < target_n {
        g = extend_once(&g)?;
    }
    Ok(g)
}

/// The two values the last output coordinate must avoid at domain length
/// `n`: `{n+k-4, n+k-3}`.
pub fn excluded_last_symbols(n: usize, k: usize) -> Option<(usize, usize)> {
    (n + k >= 5).then(|| (n + k - 4, n + k - 3))
}

/// Words whose image ends in one of the excluded last symbols.
pub fn exclusion_witnesses(f: &Mapping) -> Result<Vec<TernaryWord>> {
    let (n, k) = (f.n(), f.k());
    let (lo, hi) = excluded_last_symbols(n, k).ok_or(Error::NoPivot { n, k })?;
    let table = f.materialize()?;
    let last = n + k - 1;
    Ok((0..table.len())
        .filter(|&i| {
            let v = table.row(i)[last] as usize;
            v == lo || v == hi
        })
        .map(|i| TernaryWord::from_index(n, i))
        .collect())
}

/// Evidence that a base mapping meets the structural hypotheses for
/// starting a chain: odd length, a suitable length increase, and a last
/// coordinate avoiding `{m+k-4, m+k-3}` on the whole domain.
///
/// Class membership (DPM or DIM) of the base itself is not part of the
/// certificate; check it with [`crate::verify::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EligibilityCertificate {
    pub m: usize,
    pub k: usize,
    pub mode: DistanceMode,
    pub excluded_last_symbols: (usize, usize),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Refusal {
    #[error("base length m={m} is even")]
    EvenLength { m: usize },
    #[error("increasing mode needs k >= 1")]
    NoIncrease,
    #[error("m+k={0} leaves no pivot value")]
    NoPivot(usize),
    #[error("domain too large to enumerate")]
    TooLarge,
    #[error("{} words end in {excluded:?}", witnesses.len())]
    ExclusionViolated {
        excluded: (usize, usize),
        witnesses: Vec<TernaryWord>,
    },
}

impl From<Refusal> for Error {
    fn from(r: Refusal) -> Self {
        Error::Ineligible(r.to_string())
    }
}

/// Checks a base mapping exhaustively and issues a certificate or a
/// refusal naming the offending words.
pub fn certify_base(
    f: &Mapping,
    mode: DistanceMode,
) -> std::result::Result<EligibilityCertificate, Refusal> {
    let (m, k) = (f.n(), f.k());
    if m % 2 == 0 {
        return Err(Refusal::EvenLength { m });
    }
    if mode == DistanceMode::Increase && k == 0 {
        return Err(Refusal::NoIncrease);
    }
    let excluded = excluded_last_symbols(m, k).ok_or(Refusal::NoPivot(m + k))?;
    let witnesses = exclusion_witnesses(f).map_err(|_| Refusal::TooLarge)?;
    if !witnesses.is_empty() {
        return Err(Refusal::ExclusionViolated {
            excluded,
            witnesses,
        });
    }
    Ok(EligibilityCertificate {
        m,
        k,
        mode,
        excluded_last_symbols: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::shipped;
    use crate::word::distance_unchecked;

    fn f() -> Mapping {
        Mapping::from(shipped("F").unwrap())
    }

    fn word(t: &[u8]) -> TernaryWord {
        TernaryWord::new(t.to_vec()).unwrap()
    }

    /// Straight-line restatement of the three extension cases, written
    /// against 1-based positions and independent of `extend_row`.
    fn oracle(phi: &[u8], n: usize, k: usize, x: &[u8], a: u8) -> Vec<u8> {
        let nk = n + k;
        let mut g = vec![0u8; nk + 1];
        let set = |g: &mut Vec<u8>, pos: usize, v: usize| g[pos - 1] = v as u8;
        for i in 1..=nk {
            set(&mut g, i, phi[i - 1] as usize);
        }
        let r = (1..=nk).find(|&i| phi[i - 1] as usize == nk - 4).unwrap();
        match a {
            0 => set(&mut g, nk + 1, nk + 1),
            1 => {
                set(&mut g, r, nk + 1);
                set(&mut g, nk + 1, nk - 4);
            }
            _ => {
                let odd = n % 2 == 1;
                let xn = if n == 0 { 0 } else { x[n - 1] };
                if odd || xn < 2 {
                    set(&mut g, nk, nk + 1);
                    set(&mut g, nk + 1, phi[nk - 1] as usize);
                } else {
                    set(&mut g, nk - 1, nk + 1);
                    set(&mut g, nk + 1, phi[nk - 2] as usize);
                }
            }
        }
        g
    }

    #[test]
    fn single_step_examples() {
        let g = extend_once(&f()).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.k(), 2);
        assert_eq!(g.eval(&word(&[0, 0, 0, 0])).unwrap().values(), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(g.eval(&word(&[0, 0, 0, 1])).unwrap().values(), &[6, 2, 3, 4, 5, 1]);
        assert_eq!(g.eval(&word(&[0, 0, 0, 2])).unwrap().values(), &[1, 2, 3, 4, 6, 5]);
        assert_eq!(g.label(), "extend:F:4");
    }

    #[test]
    fn matches_oracle_across_chain() {
        let mut cur = f();
        for _ in 0..4 {
            let next = extend_once(&cur).unwrap();
            let (n, k) = (cur.n(), cur.k());
            let mut phi = Vec::new();
            let mut out = Vec::new();
            for x in TernaryWord::all(n) {
                cur.eval_into(x.trits(), &mut phi);
                for a in 0..3u8 {
                    let mut xa = x.trits().to_vec();
                    xa.push(a);
                    next.eval_into(&xa, &mut out);
                    assert_eq!(out, oracle(&phi, n, k, x.trits(), a), "x={x} a={a}");
                }
            }
            cur = next;
        }
    }

    #[test]
    fn at_most_one_changed_coordinate_and_siblings_far_apart() {
        let mut cur = f();
        for _ in 0..3 {
            let next = extend_once(&cur).unwrap();
            let nk = cur.width();
            let (mut phi, mut outs) = (Vec::new(), [Vec::new(), Vec::new(), Vec::new()]);
            for x in TernaryWord::all(cur.n()) {
                cur.eval_into(x.trits(), &mut phi);
                for a in 0..3u8 {
                    let mut xa = x.trits().to_vec();
                    xa.push(a);
                    next.eval_into(&xa, &mut outs[a as usize]);
                    assert!(distance_unchecked(&outs[a as usize][..nk], &phi) <= 1);
                }
                for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                    assert!(distance_unchecked(&outs[a], &outs[b]) >= 2);
                }
            }
            cur = next;
        }
    }

    #[test]
    fn extend_to_identity_and_errors() {
        let g = extend_to(&f(), 3).unwrap();
        assert!(std::sync::Arc::ptr_eq(
            g.as_table().unwrap(),
            f().as_table().unwrap()
        ));
        assert!(extend_to(&f(), 2).is_err());
        let tiny = MappingTable::from_rows("tiny", 1, 2, vec![1, 2, 3, 2, 1, 3, 3, 2, 1]).unwrap();
        assert_eq!(
            extend_once(&Mapping::from(tiny)).unwrap_err(),
            Error::NoPivot { n: 1, k: 2 }
        );
    }

    #[test]
    fn lazy_beyond_materialization_threshold() {
        let f10 = extend_to(&f(), 10).unwrap();
        assert_eq!(f10.kind(), crate::mapping::MappingKind::Table);
        let f11 = extend_once(&f10).unwrap();
        assert_eq!(f11.kind(), crate::mapping::MappingKind::Extension);
        assert_eq!(f11.label(), "extend:F:11");
        let table = f11.materialize().unwrap();
        let mut out = Vec::new();
        for idx in [0usize, 1, 17, 9999, 177_146] {
            f11.eval_index(idx, &mut out);
            assert_eq!(out.as_slice(), table.row(idx));
        }
    }

    #[test]
    fn exclusion_holds_at_odd_levels_only() {
        let f4 = extend_to(&f(), 4).unwrap();
        assert!(!exclusion_witnesses(&f4).unwrap().is_empty());
        let f5 = extend_to(&f(), 5).unwrap();
        assert!(exclusion_witnesses(&f5).unwrap().is_empty());
    }

    #[test]
    fn certify_f() {
        let cert = certify_base(&f(), DistanceMode::Increase).unwrap();
        assert_eq!(
            cert,
            EligibilityCertificate {
                m: 3,
                k: 2,
                mode: DistanceMode::Increase,
                excluded_last_symbols: (1, 2)
            }
        );
        let f4 = extend_to(&f(), 4).unwrap();
        assert_eq!(
            certify_base(&f4, DistanceMode::Increase),
            Err(Refusal::EvenLength { m: 4 })
        );
        let f5 = extend_to(&f(), 5).unwrap();
        let bad_mode = Mapping::from(shipped("R").unwrap());
        assert!(certify_base(&f5, DistanceMode::Preserve).is_ok());
        // R(0,0,1) = (1,4,3,5,2) ends in 2.
        match certify_base(&bad_mode, DistanceMode::Preserve) {
            Err(Refusal::ExclusionViolated { excluded, witnesses }) => {
                assert_eq!(excluded, (1, 2));
                assert!(!witnesses.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
