//! On-disk cache of graph catalogs and rank tables.
//!
//! Each entry is a file whose first line is `sha256:<hex>` over the payload
//! that follows. Entries are written to a temporary file and renamed into
//! place. Anything that fails the checksum or does not parse is deleted and
//! recomputed.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use cohft_core::fusion::FusionDatum;
use cohft_core::graphs::{enumerate, CanonicalForm, GraphError};
use cohft_core::io::{fusion_datum_to_json, GraphRecord};
use cohft_core::ranks::{RankQuery, RankTable};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

fn checksum(payload: &[u8]) -> String {
    hex::encode(Sha256::digest(payload))
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    fn path(&self, kind: &str, key: &str) -> PathBuf {
        self.root.join(kind).join(format!("{key}.json"))
    }

    /// Verified payload, or `None` (after removing the file) if it is
    /// missing or damaged.
    pub fn read(&self, kind: &str, key: &str) -> Option<Vec<u8>> {
        let path = self.path(kind, key);
        let bytes = fs::read(&path).ok()?;
        let verified = bytes
            .iter()
            .position(|&b| b == b'\n')
            .and_then(|nl| {
                let header = std::str::from_utf8(&bytes[..nl]).ok()?;
                let payload = &bytes[nl + 1..];
                (header.strip_prefix("sha256:")? == checksum(payload)).then(|| payload.to_vec())
            });
        if verified.is_none() {
            let _ = fs::remove_file(&path);
        }
        verified
    }

    pub fn write(&self, kind: &str, key: &str, payload: &[u8]) -> std::io::Result<()> {
        let path = self.path(kind, key);
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        writeln!(tmp, "sha256:{}", checksum(payload))?;
        tmp.write_all(payload)?;
        tmp.as_file().sync_all()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Canonical serialization of an enumeration.
    pub fn graph_payload(forms: &[CanonicalForm]) -> Vec<u8> {
        let records: Vec<GraphRecord> = forms.iter().map(GraphRecord::from_form).collect();
        serde_json::to_vec(&records).expect("serializable")
    }

    /// Cached or freshly enumerated graphs of type `(g, n)`. Cached records
    /// are recanonicalized before use.
    pub fn graphs(&self, g: u32, n: usize) -> Result<Vec<CanonicalForm>, GraphError> {
        let key = format!("g{g}_n{n}");
        if let Some(payload) = self.read("graphs", &key) {
            let parsed = serde_json::from_slice::<Vec<GraphRecord>>(&payload)
                .ok()
                .and_then(|recs| recs.iter().map(|r| r.to_form().ok()).collect::<Option<Vec<_>>>());
            match parsed {
                Some(forms) if forms.iter().all(|f| f.graph().genus() == g && f.graph().num_legs() == n) => {
                    return Ok(forms)
                }
                _ => {
                    let _ = fs::remove_file(self.path("graphs", &key));
                }
            }
        }
        let forms = enumerate(g, n)?;
        // a failed write only costs a recomputation next time
        let _ = self.write("graphs", &key, &Self::graph_payload(&forms));
        Ok(forms)
    }

    pub fn datum_key(datum: &FusionDatum) -> String {
        checksum(fusion_datum_to_json(datum).as_bytes())
    }

    pub fn rank_payload(table: &RankTable<'_>) -> Vec<u8> {
        let doc = RankDoc {
            entries: table
                .entries()
                .into_iter()
                .map(|(q, rank)| RankEntry { genus: q.genus(), modules: q.modules().to_vec(), rank })
                .collect(),
        };
        serde_json::to_vec(&doc).expect("serializable")
    }

    /// Seeds `table` from the cache entry of its datum, if valid.
    pub fn load_ranks(&self, table: &RankTable<'_>) {
        let key = Self::datum_key(table.datum());
        let Some(payload) = self.read("ranks", &key) else { return };
        let m = table.datum().len();
        let entries = serde_json::from_slice::<RankDoc>(&payload).ok().and_then(|doc| {
            doc.entries
                .into_iter()
                .map(|e| {
                    if e.modules.iter().any(|&x| x >= m) {
                        return None;
                    }
                    RankQuery::new(e.genus, &e.modules).ok().map(|q| (q, e.rank))
                })
                .collect::<Option<Vec<_>>>()
        });
        match entries {
            Some(entries) => table.seed(entries),
            None => {
                let _ = fs::remove_file(self.path("ranks", &key));
            }
        }
    }

    pub fn store_ranks(&self, table: &RankTable<'_>) -> std::io::Result<()> {
        self.write("ranks", &Self::datum_key(table.datum()), &Self::rank_payload(table))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RankEntry {
    genus: u32,
    modules: Vec<usize>,
    rank: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RankDoc {
    entries: Vec<RankEntry>,
}
