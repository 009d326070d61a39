//! On-disk result cache: one text file per entry plus a SHA-256 sidecar.
//!
//! Layout: `<dir>/<kind>_<key>.txt` and `<dir>/<kind>_<key>.txt.sha256`.
//! Writes are atomic (temp file + rename). A hit whose digest does not match
//! its payload is treated as a miss and recomputed.

use sha2::{Digest, Sha256};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Cache entry kinds, mirroring the artifact taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Hilbert,
    Phi,
    Psi,
    Kfield,
    Partition,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Hilbert => "hilbert",
            Kind::Phi => "phi",
            Kind::Psi => "psi",
            Kind::Kfield => "kfield",
            Kind::Partition => "partition",
        }
    }
}

/// Handle to an optional cache directory.
#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

fn digest_hex(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> io::Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Cache { dir })
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    fn path_for(&self, kind: Kind, key: &str) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}_{key}.txt", kind.tag())))
    }

    /// Fetch a payload whose digest sidecar matches; otherwise None.
    pub fn get(&self, kind: Kind, key: &str) -> Option<String> {
        let path = self.path_for(kind, key)?;
        let payload = fs::read_to_string(&path).ok()?;
        let sidecar = fs::read_to_string(sidecar_path(&path)).ok()?;
        if sidecar.trim() == digest_hex(&payload) {
            Some(payload)
        } else {
            None
        }
    }

    /// Store a payload and its digest sidecar atomically.
    pub fn put(&self, kind: Kind, key: &str, payload: &str) -> io::Result<()> {
        let Some(path) = self.path_for(kind, key) else {
            return Ok(());
        };
        write_atomic(&path, payload)?;
        write_atomic(&sidecar_path(&path), &format!("{}\n", digest_hex(payload)))
    }

    /// Fetch-or-compute helper.
    pub fn get_or<E>(
        &self,
        kind: Kind,
        key: &str,
        compute: impl FnOnce() -> Result<String, E>,
    ) -> Result<String, E> {
        if let Some(hit) = self.get(kind, key) {
            return Ok(hit);
        }
        let payload = compute()?;
        let _ = self.put(kind, key, &payload); // cache failure is non-fatal
        Ok(payload)
    }
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".sha256");
    PathBuf::from(s)
}

fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".tmp-{}-{:x}",
        std::process::id(),
        Sha256::digest(path.as_os_str().as_encoded_bytes())
            .iter()
            .fold(0u64, |a, &b| a.wrapping_mul(31).wrapping_add(b as u64))
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf())).unwrap();
        assert!(cache.get(Kind::Hilbert, "-23").is_none());
        cache.put(Kind::Hilbert, "-23", "payload\n").unwrap();
        assert_eq!(cache.get(Kind::Hilbert, "-23").unwrap(), "payload\n");
        // corrupt the payload: digest mismatch => miss
        let p = dir.path().join("hilbert_-23.txt");
        fs::write(&p, "tampered\n").unwrap();
        assert!(cache.get(Kind::Hilbert, "-23").is_none());
        // get_or recomputes and repairs
        let got: Result<String, std::convert::Infallible> =
            cache.get_or(Kind::Hilbert, "-23", || Ok("fresh\n".to_string()));
        assert_eq!(got.unwrap(), "fresh\n");
        assert_eq!(cache.get(Kind::Hilbert, "-23").unwrap(), "fresh\n");
    }

    #[test]
    fn disabled_cache_is_transparent() {
        let cache = Cache::new(None).unwrap();
        assert!(!cache.enabled());
        assert!(cache.get(Kind::Phi, "2").is_none());
        cache.put(Kind::Phi, "2", "x").unwrap();
        assert!(cache.get(Kind::Phi, "2").is_none());
    }
}
