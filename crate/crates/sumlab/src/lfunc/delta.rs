//! Normalized Hecke eigenvalues of the discriminant cusp form, generated by
//! expanding the 24th power of the Euler product in exact integer
//! arithmetic, with an optional binary cache of the normalized values.
//!
//! The cube of the Euler product has the sparse expansion
//! `sum_{m>=0} (-1)^m (2m+1) q^{m(m+1)/2}`, so the 24th power is reached by
//! squaring the sparse series once (degree 6) and then folding the sparse
//! series in six more times. Every intermediate coefficient fits in `i128`
//! comfortably up to the table cap.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use super::LFuncError;

const DEFAULT_LIMIT: usize = 65_536;
const GROWTH_CAP: usize = 1 << 20;

/// Exact `tau(n)` for `n = 1..=limit` (index `n - 1`).
pub fn ramanujan_tau_table(limit: usize) -> Vec<i128> {
    let len = limit;
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    let mut m = 0usize;
    loop {
        let e = m * (m + 1) / 2;
        if e >= len {
            break;
        }
        let c = (2 * m + 1) as i128;
        sparse.push((e, if m % 2 == 0 { c } else { -c }));
        m += 1;
    }

    let mut cur = vec![0i128; len];
    for &(i, ci) in &sparse {
        for &(j, cj) in &sparse {
            if i + j >= len {
                break;
            }
            cur[i + j] += ci * cj;
        }
    }
    for _ in 0..6 {
        let mut next = vec![0i128; len];
        for &(i, ci) in &sparse {
            for (j, &v) in cur[..len - i].iter().enumerate() {
                if v != 0 {
                    next[i + j] += ci * v;
                }
            }
        }
        cur = next;
    }
    cur
}

fn normalized(tau: &[i128]) -> Vec<f64> {
    tau.iter()
        .enumerate()
        .map(|(i, &t)| t as f64 / ((i + 1) as f64).powf(5.5))
        .collect()
}

/// Table of `lambda(n) = tau(n) / n^{11/2}`, grown on demand and optionally
/// mirrored to a flat little-endian `f64` file.
pub struct LambdaTable {
    cache: Option<PathBuf>,
    data: RwLock<Vec<f64>>,
}

impl fmt::Debug for LambdaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LambdaTable")
            .field("len", &self.data.read().unwrap().len())
            .field("cache", &self.cache)
            .finish()
    }
}

impl Default for LambdaTable {
    fn default() -> Self {
        Self::new()
    }
}

impl LambdaTable {
    /// In-memory table; nothing is computed until first use.
    pub fn new() -> Self {
        LambdaTable {
            cache: None,
            data: RwLock::new(Vec::new()),
        }
    }

    /// Table backed by `path`: existing contents are loaded eagerly, and
    /// `persist` writes the current table back.
    pub fn with_cache(path: &Path) -> Result<Self, LFuncError> {
        let mut data = Vec::new();
        if path.exists() {
            let bytes = std::fs::read(path)?;
            if bytes.len() % 8 != 0 {
                return Err(LFuncError::Cache(format!(
                    "{} is not a flat f64 table (length {} bytes)",
                    path.display(),
                    bytes.len()
                )));
            }
            data = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            if !data.is_empty() && data[0] != 1.0 {
                return Err(LFuncError::Cache(format!(
                    "{} does not look like a normalized coefficient table (first entry {})",
                    path.display(),
                    data[0]
                )));
            }
        }
        Ok(LambdaTable {
            cache: Some(path.to_path_buf()),
            data: RwLock::new(data),
        })
    }

    pub fn cache_path(&self) -> Option<&Path> {
        self.cache.as_deref()
    }

    pub fn len(&self) -> usize {
        self.data.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Makes sure values for all `n <= limit` are available.
    pub fn ensure(&self, limit: usize) {
        if self.data.read().unwrap().len() >= limit {
            return;
        }
        let mut guard = self.data.write().unwrap();
        if guard.len() >= limit {
            return;
        }
        let target = limit
            .next_power_of_two()
            .clamp(DEFAULT_LIMIT, GROWTH_CAP.max(limit));
        *guard = normalized(&ramanujan_tau_table(target));
    }

    pub fn lambda(&self, n: u64) -> f64 {
        self.ensure(n as usize);
        self.data.read().unwrap()[(n - 1) as usize]
    }

    /// Writes the current table to the cache path.
    pub fn persist(&self) -> Result<(), LFuncError> {
        let path = self.cache.as_ref().ok_or_else(|| {
            LFuncError::Cache("table has no cache path to persist to".into())
        })?;
        let guard = self.data.read().unwrap();
        let mut bytes = Vec::with_capacity(guard.len() * 8);
        for v in guard.iter() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        std::fs::write(path, bytes)?;
        Ok(())
    }
}
