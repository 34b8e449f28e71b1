//! Strategy tables and their file format.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic        8 bytes  "LIMPSTRT"
//! version      u32      currently 1
//! game hash    u64
//! abstraction  u64
//! iterations   u64
//! meta length  u32, then that many bytes of JSON (variant, schedule, notes)
//! records      u64 count, then per record sorted by key:
//!              u32 key length, key bytes (UTF-8),
//!              u32 action count, that many f64 probabilities
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::game::Game;
use crate::error::{Error, Result};
use crate::game::InfoSetKey;

const MAGIC: &[u8; 8] = b"LIMPSTRT";
const VERSION: u32 = 1;

/// Probability vectors must sum to one within this tolerance.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub game_hash: u64,
    pub abstraction_hash: u64,
    pub iterations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// Per-round thresholds applied after solving, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StrategyTable {
    pub meta: TableMeta,
    entries: BTreeMap<InfoSetKey, Vec<f64>>,
}

impl StrategyTable {
    pub fn new(meta: TableMeta) -> Self {
        StrategyTable { meta, entries: BTreeMap::new() }
    }

    /// Uniform strategy over every infoset of `game`.
    pub fn uniform<G: Game>(game: &G) -> Self {
        let mut t = StrategyTable::new(TableMeta {
            game_hash: game.game_hash(),
            abstraction_hash: game.abstraction_hash(),
            ..Default::default()
        });
        for i in 0..game.num_infosets() {
            let n = game.infoset_actions(i);
            if n > 0 {
                t.insert(game.infoset_key(i), vec![1.0 / n as f64; n]);
            }
        }
        t
    }

    pub fn insert(&mut self, key: InfoSetKey, probs: Vec<f64>) {
        self.entries.insert(key, probs);
    }

    pub fn get(&self, key: &InfoSetKey) -> Option<&[f64]> {
        self.entries.get(key).map(|v| v.as_slice())
    }

    pub fn require(&self, key: &InfoSetKey) -> Result<&[f64]> {
        self.get(key).ok_or_else(|| Error::MissingInfoset(key.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InfoSetKey, &Vec<f64>)> {
        self.entries.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&InfoSetKey, &mut Vec<f64>)> {
        self.entries.iter_mut()
    }

    /// Every vector non-negative and summing to one.
    pub fn validate(&self) -> Result<()> {
        for (k, v) in &self.entries {
            let sum: f64 = v.iter().sum();
            if v.iter().any(|&p| p < 0.0 || !p.is_finite()) || (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::Format(format!("infoset {k} is not a distribution: {v:?}")));
            }
        }
        Ok(())
    }

    pub fn check_hashes(&self, game_hash: u64, abstraction_hash: u64) -> Result<()> {
        if self.meta.game_hash != game_hash {
            return Err(Error::HashMismatch { what: "game spec", expected: game_hash, found: self.meta.game_hash });
        }
        if self.meta.abstraction_hash != abstraction_hash {
            return Err(Error::HashMismatch {
                what: "abstraction",
                expected: abstraction_hash,
                found: self.meta.abstraction_hash,
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&self.meta.game_hash.to_le_bytes())?;
        w.write_all(&self.meta.abstraction_hash.to_le_bytes())?;
        w.write_all(&self.meta.iterations.to_le_bytes())?;
        let meta = serde_json::to_vec(&self.meta)?;
        w.write_all(&(meta.len() as u32).to_le_bytes())?;
        w.write_all(&meta)?;
        w.write_all(&(self.entries.len() as u64).to_le_bytes())?;
        for (k, v) in &self.entries {
            let key = k.as_str().as_bytes();
            w.write_all(&(key.len() as u32).to_le_bytes())?;
            w.write_all(key)?;
            w.write_all(&(v.len() as u32).to_le_bytes())?;
            for p in v {
                w.write_all(&p.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a strategy table".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let game_hash = read_u64(&mut r)?;
        let abstraction_hash = read_u64(&mut r)?;
        let iterations = read_u64(&mut r)?;
        let meta_len = read_u32(&mut r)? as usize;
        let mut meta_bytes = vec![0u8; meta_len];
        r.read_exact(&mut meta_bytes)?;
        let mut meta: TableMeta = serde_json::from_slice(&meta_bytes)?;
        meta.game_hash = game_hash;
        meta.abstraction_hash = abstraction_hash;
        meta.iterations = iterations;
        let count = read_u64(&mut r)?;
        let mut table = StrategyTable::new(meta);
        for _ in 0..count {
            let len = read_u32(&mut r)? as usize;
            let mut key = vec![0u8; len];
            r.read_exact(&mut key)?;
            let key = String::from_utf8(key).map_err(|e| Error::Format(e.to_string()))?;
            let n = read_u32(&mut r)? as usize;
            let mut v = Vec::with_capacity(n);
            for _ in 0..n {
                let mut b = [0u8; 8];
                r.read_exact(&mut b)?;
                v.push(f64::from_le_bytes(b));
            }
            table.insert(InfoSetKey::from_raw(key), v);
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Player;

    fn sample() -> StrategyTable {
        let mut t = StrategyTable::new(TableMeta {
            game_hash: 7,
            abstraction_hash: 9,
            iterations: 1000,
            variant: Some("vanilla".into()),
            ..Default::default()
        });
        t.insert(InfoSetKey::new(Player::P2, "K", "", "r1"), vec![0.0, 1.0]);
        t.insert(InfoSetKey::new(Player::P1, "J", "", ""), vec![0.75, 0.25]);
        t
    }

    #[test]
    fn bytes_round_trip() {
        let t = sample();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        let back = StrategyTable::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        // records are sorted by key
        let keys: Vec<_> = back.iter().map(|(k, _)| k.as_str().to_string()).collect();
        assert_eq!(keys, vec!["P1|J||", "P2|K||r1"]);
    }

    #[test]
    fn rejects_garbage_and_hash_mismatch() {
        assert!(StrategyTable::read_from(&b"NOTATABLE..."[..]).is_err());
        let t = sample();
        assert!(t.check_hashes(7, 9).is_ok());
        assert!(matches!(t.check_hashes(7, 8), Err(Error::HashMismatch { what: "abstraction", .. })));
    }

    #[test]
    fn validate_catches_bad_vectors() {
        let mut t = sample();
        assert!(t.validate().is_ok());
        t.insert(InfoSetKey::from_raw("x"), vec![0.5, 0.6]);
        assert!(t.validate().is_err());
    }
}
