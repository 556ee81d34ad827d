use crate::adapt::lut::LutStore;
use crate::adapt::mcs::McsEntry;
use crate::bound::evaluate_bound;
use crate::channel::ChannelContext;
use crate::codec::Constellation;
use crate::error::{Error, Result};

/// Decimal-rounding slack for the published 4-decimal tables under the
/// unit-energy check.
pub const FIXTURE_ENERGY_TOLERANCE: f64 = 0.02;

const TABLE2_JSON: &str = include_str!("table2_fixtures.json");

/// MCS id used for records that belong to no specific scheme (the
/// conventional reference column).
pub const CONVENTIONAL_MCS_ID: u32 = 0;

/// The bundled read-only store of published 16-ary designs: four optimized
/// columns keyed by their design points plus the conventional reference
/// column under the (0, 0 dB, 0) sentinel key.
pub fn table2_store() -> LutStore {
    serde_json::from_str(TABLE2_JSON).expect("bundled fixture store parses")
}

/// Outcome of one fixture check.
#[derive(Debug, Clone)]
pub struct FixtureCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Validate the bundled fixtures: every column satisfies the unit-energy
/// budget and label structure, the conventional column equals the
/// +-1/sqrt(10), +-3/sqrt(10) grid to four decimals, and each optimized
/// column beats the conventional bound at its own design point.
pub fn verify_fixtures() -> Result<Vec<FixtureCheck>> {
    let store = table2_store();
    let mut checks = Vec::new();

    for record in &store.records {
        let name = format!("energy ({}, {} dB, mcs {})", record.m, record.snr_db, record.mcs);
        let energy = record.constellation()?.avg_energy();
        checks.push(FixtureCheck {
            passed: record.validate_energy(FIXTURE_ENERGY_TOLERANCE).is_ok(),
            detail: format!("mean energy {energy:.6} (limit 1.02)"),
            name,
        });
        let labels_ok = record.points.len() == 16 && record.points.len().is_power_of_two();
        checks.push(FixtureCheck {
            name: format!(
                "labels ({}, {} dB, mcs {})",
                record.m, record.snr_db, record.mcs
            ),
            passed: labels_ok,
            detail: format!("{} labeled points", record.points.len()),
        });
    }

    let conventional = store
        .records
        .iter()
        .find(|r| r.mcs == CONVENTIONAL_MCS_ID)
        .ok_or_else(|| Error::MissingRecord("conventional fixture column".into()))?;
    let reference = Constellation::conventional(16)?;
    let max_dev = conventional
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let want = reference.point(i);
            (p[0] - want.re).abs().max((p[1] - want.im).abs())
        })
        .fold(0.0f64, f64::max);
    checks.push(FixtureCheck {
        name: "conventional column equals unit-energy 16-QAM grid".into(),
        passed: max_dev <= 5e-5,
        detail: format!("max coordinate deviation {max_dev:.2e}"),
    });

    for record in store.records.iter().filter(|r| r.mcs != CONVENTIONAL_MCS_ID) {
        let mcs = McsEntry::by_id(record.mcs).ok_or_else(|| {
            Error::MissingRecord(format!("MCS {} for fixture record", record.mcs))
        })?;
        let trellis = mcs.supertrellis()?;
        let ctx = ChannelContext::from_avg_snr_db(record.fading(), record.snr_db, 1.0, 1.0)?;
        let optimized = evaluate_bound(&trellis, &record.constellation()?, &ctx)?;
        let baseline = evaluate_bound(
            &trellis,
            &Constellation::conventional(mcs.modulation_order)?,
            &ctx,
        )?;
        let passed = !optimized.divergent
            && !baseline.divergent
            && optimized.p_b_bound < baseline.p_b_bound;
        checks.push(FixtureCheck {
            name: format!(
                "bound ordering ({}, {} dB, mcs {})",
                record.m, record.snr_db, record.mcs
            ),
            passed,
            detail: format!(
                "optimized {:.6e} vs conventional {:.6e}",
                optimized.p_b_bound, baseline.p_b_bound
            ),
        });
    }

    Ok(checks)
}
