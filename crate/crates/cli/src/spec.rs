//! Textual mapping descriptors.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use permmap::compose::{compose_p130, compose_p91, compose_u, compose_v};
use permmap::tables::{canonical_name, resolve};
use permmap::{extend_to, Error, Mapping, MappingTable, Result};

/// Resolves table names against shipped data (or `data_dir` overrides) and
/// anything else as a file path.
pub struct Resolver {
    data_dir: Option<PathBuf>,
}

impl Resolver {
    pub fn from_env() -> Self {
        Self {
            data_dir: std::env::var_os("PERMMAP_DATA_DIR").map(PathBuf::from),
        }
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn table(&self, name: &str) -> Result<Arc<MappingTable>> {
        if canonical_name(name).is_some() {
            resolve(name, self.data_dir())
        } else {
            Ok(Arc::new(MappingTable::load(Path::new(name))?))
        }
    }

    /// `table:<name|path>`, `extend:<base>:<n>`, `p91`, `p130`, `u` or `v`.
    pub fn mapping(&self, spec: &str) -> Result<Mapping> {
        if let Some(rest) = spec.strip_prefix("table:") {
            return Ok(Mapping::from(self.table(rest)?));
        }
        if let Some(rest) = spec.strip_prefix("extend:") {
            let (base, n) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::UnknownName(spec.into()))?;
            let n: usize = n
                .parse()
                .map_err(|_| Error::UnknownName(format!("{spec}: bad target length")))?;
            return extend_to(&Mapping::from(self.table(base)?), n);
        }
        match spec.to_ascii_lowercase().as_str() {
            "p91" => compose_p91(self.table("G")?, self.table("H4")?),
            "u" => compose_u(self.table("R")?, self.table("S")?),
            "v" => compose_v(self.table("R")?, self.table("T")?),
            "p130" => {
                let u = compose_u(self.table("R")?, self.table("S")?)?;
                let v = compose_v(self.table("R")?, self.table("T")?)?;
                compose_p130(&u, &v)
            }
            _ => Err(Error::UnknownName(spec.into())),
        }
    }
}
