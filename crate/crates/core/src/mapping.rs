//! The `Mapping` abstraction: a total function from `Z_3^n` to `S_{n+k}`
//! backed by a table, a recursive extension, or a composition.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::compose::Composite;
use crate::error::{Error, Result};
use crate::recursion::extend_row;
use crate::tables::MappingTable;
use crate::word::{domain_size, write_word, Permutation, TernaryWord};

/// Largest domain length [`Mapping::materialize`] will enumerate.
pub const MATERIALIZE_MAX_N: usize = 15;

#[derive(Clone)]
pub struct Mapping {
    label: String,
    n: usize,
    k: usize,
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    Table(Arc<MappingTable>),
    /// `H(base)`, evaluated per word.
    Extension(Arc<Mapping>),
    Composite(Arc<Composite>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MappingKind {
    Table,
    Extension,
    Composite,
}

impl fmt::Debug for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mapping")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("kind", &self.kind())
            .finish()
    }
}

impl From<MappingTable> for Mapping {
    fn from(t: MappingTable) -> Self {
        Mapping::from_table(Arc::new(t))
    }
}

impl From<Arc<MappingTable>> for Mapping {
    fn from(t: Arc<MappingTable>) -> Self {
        Mapping::from_table(t)
    }
}

impl Mapping {
    pub fn from_table(table: Arc<MappingTable>) -> Self {
        Self {
            label: table.name().to_string(),
            n: table.n(),
            k: table.k(),
            repr: Repr::Table(table),
        }
    }

    pub(crate) fn extension_of(base: Mapping, label: String) -> Self {
        Self {
            label,
            n: base.n + 1,
            k: base.k,
            repr: Repr::Extension(Arc::new(base)),
        }
    }

    pub(crate) fn from_composite(composite: Composite) -> Self {
        Self {
            label: composite.name().to_string(),
            n: composite.n(),
            k: composite.k(),
            repr: Repr::Composite(Arc::new(composite)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
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

    /// Output permutation length.
    pub fn width(&self) -> usize {
        self.n + self.k
    }

    pub fn kind(&self) -> MappingKind {
        match self.repr {
            Repr::Table(_) => MappingKind::Table,
            Repr::Extension(_) => MappingKind::Extension,
            Repr::Composite(_) => MappingKind::Composite,
        }
    }

    pub fn as_table(&self) -> Option<&Arc<MappingTable>> {
        match &self.repr {
            Repr::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_composite(&self) -> Option<&Composite> {
        match &self.repr {
            Repr::Composite(c) => Some(c),
            _ => None,
        }
    }

    /// `3^n`, the number of domain words.
    pub fn domain_size(&self) -> Option<usize> {
        domain_size(self.n)
    }

    /// Evaluates on raw trits, replacing the contents of `out`.
    ///
    /// `trits.len()` must equal `n`.
    pub fn eval_into(&self, trits: &[u8], out: &mut Vec<u8>) {
        debug_assert_eq!(trits.len(), self.n);
        match &self.repr {
            Repr::Table(t) => {
                out.clear();
                out.extend_from_slice(t.row_for(trits));
            }
            Repr::Extension(base) => {
                let (x, last) = trits.split_at(base.n);
                base.eval_into(x, out);
                extend_row(out, base.n, base.k, x.last().copied(), last[0]);
            }
            Repr::Composite(c) => c.eval_into(trits, out),
        }
    }

    pub fn eval(&self, word: &TernaryWord) -> Result<Permutation> {
        if word.len() != self.n {
            return Err(Error::LengthMismatch {
                left: word.len(),
                right: self.n,
            });
        }
        let mut out = Vec::with_capacity(self.width() + 1);
        self.eval_into(word.trits(), &mut out);
        Ok(Permutation::from_raw_unchecked(out))
    }

    /// Output for the word of lexicographic rank `idx`.
    pub fn eval_index(&self, idx: usize, out: &mut Vec<u8>) {
        match &self.repr {
            Repr::Table(t) => {
                out.clear();
                out.extend_from_slice(t.row(idx));
            }
            _ => {
                let mut trits = [0u8; 64];
                let trits = &mut trits[..self.n];
                write_word(idx, trits);
                self.eval_into(trits, out);
            }
        }
    }

    /// Enumerates the whole domain into a table. Table-backed mappings are
    /// returned without copying.
    pub fn materialize(&self) -> Result<Arc<MappingTable>> {
        if let Repr::Table(t) = &self.repr {
            return Ok(Arc::clone(t));
        }
        if self.n > MATERIALIZE_MAX_N {
            return Err(Error::TooLarge { n: self.n });
        }
        let count = self.domain_size().ok_or(Error::TooLarge { n: self.n })?;
        let width = self.width();
        let mut rows = vec![0u8; count * width];
        const CHUNK: usize = 4096;
        rows.par_chunks_mut(CHUNK * width)
            .enumerate()
            .for_each(|(c, chunk)| {
                let mut buf = Vec::with_capacity(width + 1);
                for (j, dst) in chunk.chunks_mut(width).enumerate() {
                    self.eval_index(c * CHUNK + j, &mut buf);
                    dst.copy_from_slice(&buf);
                }
            });
        Ok(Arc::new(MappingTable::from_rows_unchecked(
            self.label.clone(),
            self.n,
            self.k,
            rows,
        )))
    }

    /// Materialized copy of this mapping as a table-backed mapping.
    pub fn materialized(&self) -> Result<Mapping> {
        Ok(Mapping {
            label: self.label.clone(),
            n: self.n,
            k: self.k,
            repr: Repr::Table(self.materialize()?),
        })
    }
}
