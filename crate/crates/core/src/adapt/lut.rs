use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::Fading;
use crate::codec::{Constellation, PuncturePattern};
use crate::error::{Error, Result};

/// One stored constellation design, keyed by (m, snr_db, mcs). The `m`
/// field uses 0 for the AWGN (m -> infinity) channel; generator polynomials
/// are written in octal-digit form (e.g. 5 and 7 for the [5, 7] code).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LutRecord {
    pub m: u32,
    pub snr_db: f64,
    pub mcs: u32,
    pub generators: Vec<u32>,
    pub puncture: Option<Vec<Vec<u8>>>,
    pub points: Vec<[f64; 2]>,
    pub bound: Option<f64>,
    pub provenance: String,
}

impl LutRecord {
    pub fn fading(&self) -> Fading {
        if self.m == 0 {
            Fading::Awgn
        } else {
            Fading::Nakagami(self.m)
        }
    }

    pub fn key(&self) -> (u32, u64, u32) {
        (self.m, self.snr_db.to_bits(), self.mcs)
    }

    pub fn constellation(&self) -> Result<Constellation> {
        Constellation::new(
            self.points
                .iter()
                .map(|p| Complex64::new(p[0], p[1]))
                .collect(),
        )
    }

    pub fn puncture_pattern(&self) -> Result<Option<PuncturePattern>> {
        match &self.puncture {
            None => Ok(None),
            Some(rows) => {
                let refs: Vec<&[u8]> = rows.iter().map(|r| r.as_slice()).collect();
                Ok(Some(PuncturePattern::from_rows(&refs)?))
            }
        }
    }

    pub fn generator_values(&self) -> Vec<u32> {
        self.generators.iter().map(|&g| octal_digits_to_value(g)).collect()
    }

    /// Check the stored points against the unit energy budget, with slack
    /// for the decimal rounding of published tables.
    pub fn validate_energy(&self, tolerance: f64) -> Result<()> {
        let c = self.constellation()?;
        let e = c.avg_energy();
        if e > 1.0 + tolerance {
            return Err(Error::InvalidConstellation(format!(
                "record ({}, {} dB, mcs {}) mean energy {e} exceeds 1 + {tolerance}",
                self.m, self.snr_db, self.mcs
            )));
        }
        Ok(())
    }
}

/// Interpret an integer written with octal digits, e.g. `133` as 0o133 = 91.
pub fn octal_digits_to_value(digits: u32) -> u32 {
    u32::from_str_radix(&digits.to_string(), 8).unwrap_or(digits)
}

/// Render a polynomial value in octal-digit form, e.g. 91 as 133.
pub fn value_to_octal_digits(value: u32) -> u32 {
    format!("{value:o}").parse().unwrap()
}

/// Versioned single-document store of [`LutRecord`]s, serialized as JSON
/// with full round-trip float precision. Writes replace any record with the
/// same key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LutStore {
    pub version: u32,
    pub records: Vec<LutRecord>,
}

impl Default for LutStore {
    fn default() -> Self {
        Self::new()
    }
}

impl LutStore {
    pub fn new() -> Self {
        Self {
            version: 1,
            records: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let store: LutStore = serde_json::from_str(&text)?;
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Insert or overwrite by key.
    pub fn upsert(&mut self, record: LutRecord) {
        match self.records.iter_mut().find(|r| r.key() == record.key()) {
            Some(slot) => *slot = record,
            None => self.records.push(record),
        }
    }

    pub fn get(&self, fading: Fading, snr_db: f64, mcs: u32) -> Option<&LutRecord> {
        let m = match fading {
            Fading::Awgn => 0,
            Fading::Nakagami(m) => m,
        };
        self.records
            .iter()
            .find(|r| r.m == m && r.snr_db == snr_db && r.mcs == mcs)
    }

    /// The record for (fading, mcs) whose SNR grid label is nearest in dB,
    /// ties toward the lower (more conservative) grid point.
    pub fn nearest(&self, fading: Fading, snr_db: f64, mcs: u32) -> Result<&LutRecord> {
        let m = match fading {
            Fading::Awgn => 0,
            Fading::Nakagami(m) => m,
        };
        self.records
            .iter()
            .filter(|r| r.m == m && r.mcs == mcs)
            .min_by(|a, b| {
                let da = (a.snr_db - snr_db).abs();
                let db = (b.snr_db - snr_db).abs();
                da.partial_cmp(&db)
                    .unwrap()
                    .then(a.snr_db.partial_cmp(&b.snr_db).unwrap())
            })
            .ok_or_else(|| {
                Error::MissingRecord(format!("no constellation for m={fading}, mcs {mcs}"))
            })
    }
}

/// Store a record into the document at `path` (created if absent).
pub fn store_lut(path: &Path, record: LutRecord) -> Result<()> {
    let mut store = if path.exists() {
        LutStore::load(path)?
    } else {
        LutStore::new()
    };
    store.upsert(record);
    store.save(path)
}

/// Load one record by exact key from the document at `path`.
pub fn load_lut(path: &Path, fading: Fading, snr_db: f64, mcs: u32) -> Result<LutRecord> {
    let store = LutStore::load(path)?;
    store
        .get(fading, snr_db, mcs)
        .cloned()
        .ok_or_else(|| {
            Error::MissingRecord(format!("no record for m={fading}, {snr_db} dB, mcs {mcs}"))
        })
}

/// Look up the stored design nearest to the operating point and return its
/// constellation.
pub fn select_constellation(
    fading: Fading,
    snr_db: f64,
    mcs: u32,
    store: &LutStore,
) -> Result<Constellation> {
    store.nearest(fading, snr_db, mcs)?.constellation()
}
