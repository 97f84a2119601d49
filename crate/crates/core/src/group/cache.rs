//! On-disk cache of enumerated word balls, keyed by group content hash and radius.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ball::{enumerate_ball, Ball};
use super::presentation::GroupPresentation;
use crate::error::Result;

pub const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    group_hash: String,
    ball: Ball,
}

#[derive(Clone, Debug)]
pub struct BallCache {
    dir: PathBuf,
}

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(BallCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, group_hash: &str, radius: usize) -> PathBuf {
        let mut h = Sha256::new();
        h.update(format!("v{CACHE_VERSION};{group_hash};{radius}"));
        self.dir.join(format!("{}.json", hex::encode(h.finalize())))
    }

    /// Cached ball, or enumerate and store it. Unreadable or stale entries are recomputed.
    pub fn ball(&self, group: &GroupPresentation, radius: usize) -> Result<(Ball, bool)> {
        let hash = group.content_hash();
        let path = self.path_for(&hash, radius);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(f) = serde_json::from_str::<CacheFile>(&text) {
                if f.version == CACHE_VERSION && f.group_hash == hash && f.ball.radius == radius {
                    return Ok((f.ball, true));
                }
            }
        }
        let ball = enumerate_ball(group, radius);
        let file = CacheFile { version: CACHE_VERSION, group_hash: hash, ball };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(serde_json::to_string(&file)?.as_bytes())?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok((file.ball, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_lookup_hits() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path()).unwrap();
        let g = GroupPresentation::sanov();
        let (a, hit_a) = cache.ball(&g, 3).unwrap();
        let (b, hit_b) = cache.ball(&g, 3).unwrap();
        assert!(!hit_a && hit_b);
        assert_eq!(a, b);
    }
}
