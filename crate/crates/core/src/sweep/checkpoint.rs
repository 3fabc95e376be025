//! Resumable sweep progress.
//!
//! The file is UTF-8 text:
//!
//! ```text
//! dichotomy-checkpoint <version>
//! sha256 <hex digest of the body>
//! <body: one JSON object>
//! ```
//!
//! The body records the configuration fingerprint and every completed
//! `(a_index, N)` unit with its K values. JSON numbers round-trip `f64`
//! exactly, so a resumed sweep reproduces the uninterrupted output bit for
//! bit. Files are written to a sibling temporary path and renamed into place.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &str = "dichotomy-checkpoint";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletedUnit {
    pub a_index: usize,
    pub n: usize,
    pub ks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub fingerprint: String,
    pub units: Vec<CompletedUnit>,
}

impl Checkpoint {
    pub fn from_map(fingerprint: String, done: &BTreeMap<(usize, usize), Vec<f64>>) -> Self {
        Checkpoint {
            fingerprint,
            units: done
                .iter()
                .map(|(&(a_index, n), ks)| CompletedUnit {
                    a_index,
                    n,
                    ks: ks.clone(),
                })
                .collect(),
        }
    }

    pub fn into_map(self) -> BTreeMap<(usize, usize), Vec<f64>> {
        self.units
            .into_iter()
            .map(|u| ((u.a_index, u.n), u.ks))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let body = serde_json::to_string(self).expect("checkpoint serializes");
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        format!("{MAGIC} {CHECKPOINT_VERSION}\nsha256 {digest}\n{body}\n")
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let fail = |message: String| Error::Checkpoint {
            path: path.to_path_buf(),
            message,
        };
        let mut lines = text.splitn(3, '\n');
        let header = lines.next().unwrap_or_default();
        let version = header
            .strip_prefix(MAGIC)
            .map(str::trim)
            .ok_or_else(|| fail("not a checkpoint file".into()))?;
        if version != CHECKPOINT_VERSION.to_string() {
            return Err(fail(format!(
                "version mismatch: file has {version}, expected {CHECKPOINT_VERSION}"
            )));
        }
        let digest = lines
            .next()
            .and_then(|l| l.strip_prefix("sha256 "))
            .ok_or_else(|| fail("missing checksum line".into()))?;
        let body = lines
            .next()
            .map(|b| b.strip_suffix('\n').unwrap_or(b))
            .ok_or_else(|| fail("missing body".into()))?;
        if hex::encode(Sha256::digest(body.as_bytes())) != digest.trim() {
            return Err(fail("checksum mismatch".into()));
        }
        serde_json::from_str(body).map_err(|e| fail(format!("corrupt body: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, self.to_text())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        let text = String::from_utf8(bytes).map_err(|_| Error::Checkpoint {
            path: path.to_path_buf(),
            message: "not valid UTF-8".into(),
        })?;
        Self::from_text(&text, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Checkpoint {
        Checkpoint {
            fingerprint: "abc".into(),
            units: vec![
                CompletedUnit {
                    a_index: 0,
                    n: 1000,
                    ks: vec![0.1, 1.0 / 3.0, -0.05],
                },
                CompletedUnit {
                    a_index: 3,
                    n: 2000,
                    ks: vec![0.987_654_321_012_345_6],
                },
            ],
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp");
        sample().write(&path).unwrap();
        assert_eq!(Checkpoint::read(&path).unwrap(), sample());
    }

    #[test]
    fn corrupted_byte_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp");
        sample().write(&path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        let last_digit = bytes.iter().rposition(|b| b.is_ascii_digit()).unwrap();
        bytes[last_digit] = if bytes[last_digit] == b'7' {
            b'8'
        } else {
            b'7'
        };
        fs::write(&path, bytes).unwrap();
        match Checkpoint::read(&path) {
            Err(Error::Checkpoint { message, .. }) => assert!(message.contains("checksum")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_reported() {
        let text = sample().to_text().replacen(" 1\n", " 99\n", 1);
        match Checkpoint::from_text(&text, Path::new("x")) {
            Err(Error::Checkpoint { message, .. }) => assert!(message.contains("version")),
            other => panic!("unexpected {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn text_round_trip(ks in proptest::collection::vec(-2.0f64..3.0, 0..50), n in 1usize..10_000_000) {
            let cp = Checkpoint {
                fingerprint: "f".into(),
                units: vec![CompletedUnit { a_index: 1, n, ks }],
            };
            let back = Checkpoint::from_text(&cp.to_text(), Path::new("x")).unwrap();
            prop_assert_eq!(back, cp);
        }
    }
}
