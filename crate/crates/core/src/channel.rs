//! Link-budget primitives: power unit conversions, log-distance path loss,
//! SINR in the milliwatt domain and RSSI-driven MCS selection.
//!
//! Everything here is a pure function over small value types.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power level in dBm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerDbm(pub f64);

/// Linear power in milliwatts. Always strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerMw(f64);

impl PowerDbm {
    pub const fn new(dbm: f64) -> Self {
        Self(dbm)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_mw(self) -> PowerMw {
        dbm_to_mw(self)
    }
}

impl fmt::Display for PowerDbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dBm", self.0)
    }
}

/// Adding a gain/loss expressed in dB.
impl Add<f64> for PowerDbm {
    type Output = PowerDbm;
    fn add(self, db: f64) -> PowerDbm {
        PowerDbm(self.0 + db)
    }
}

impl Sub<f64> for PowerDbm {
    type Output = PowerDbm;
    fn sub(self, db: f64) -> PowerDbm {
        PowerDbm(self.0 - db)
    }
}

/// Difference of two levels, in dB.
impl Sub for PowerDbm {
    type Output = f64;
    fn sub(self, rhs: PowerDbm) -> f64 {
        self.0 - rhs.0
    }
}

impl PowerMw {
    /// Returns `None` for non-positive or non-finite input.
    pub fn new(mw: f64) -> Option<Self> {
        (mw > 0.0 && mw.is_finite()).then_some(Self(mw))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_dbm(self) -> PowerDbm {
        mw_to_dbm(self)
    }
}

impl Add for PowerMw {
    type Output = PowerMw;
    fn add(self, rhs: PowerMw) -> PowerMw {
        PowerMw(self.0 + rhs.0)
    }
}

pub fn dbm_to_mw(p: PowerDbm) -> PowerMw {
    PowerMw(10f64.powf(p.0 / 10.0))
}

pub fn mw_to_dbm(p: PowerMw) -> PowerDbm {
    PowerDbm(10.0 * p.0.log10())
}

/// Log-distance path loss with an optional fixed penetration loss applied to
/// links that cross from one BSS into another (walls between apartments).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathLossModel {
    /// Loss at the 1 m reference distance.
    pub pl0_db: f64,
    pub exponent: f64,
    /// Distances below this are clamped up to it.
    pub min_distance_m: f64,
    /// Extra loss on inter-BSS links. Zero disables it.
    pub inter_bss_loss_db: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            pl0_db: 51.0,
            exponent: 4.5,
            min_distance_m: 1.0,
            inter_bss_loss_db: 15.0,
        }
    }
}

impl PathLossModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(Error::config(
                "path_loss.exponent",
                "must be a positive number",
            ));
        }
        if !(self.min_distance_m > 0.0 && self.min_distance_m.is_finite()) {
            return Err(Error::config(
                "path_loss.min_distance_m",
                "must be a positive number",
            ));
        }
        if !self.pl0_db.is_finite() {
            return Err(Error::config("path_loss.pl0_db", "must be finite"));
        }
        if !(self.inter_bss_loss_db >= 0.0 && self.inter_bss_loss_db.is_finite()) {
            return Err(Error::config(
                "path_loss.inter_bss_loss_db",
                "must be non-negative",
            ));
        }
        Ok(())
    }

    /// Loss of a link between nodes of different BSSs.
    pub fn cross_bss_loss_db(&self, d: f64) -> f64 {
        path_loss_db(self, d) + self.inter_bss_loss_db
    }
}

/// `pl0 + 10·n·log10(max(d, d_min))`. Does not include the inter-BSS term.
pub fn path_loss_db(model: &PathLossModel, d: f64) -> f64 {
    debug_assert!(d >= 0.0, "negative distance {d}");
    model.pl0_db + 10.0 * model.exponent * d.max(model.min_distance_m).log10()
}

/// Received power over an intra-BSS link of length `d`.
pub fn rssi(tx_power: PowerDbm, model: &PathLossModel, d: f64) -> PowerDbm {
    tx_power - path_loss_db(model, d)
}

/// Signal over noise plus the sum of interferers, computed in mW and returned in dB.
pub fn sinr_db(signal: PowerDbm, interferers: &[PowerDbm], noise: PowerDbm) -> f64 {
    let denom: f64 =
        noise.to_mw().value() + interferers.iter().map(|p| p.to_mw().value()).sum::<f64>();
    10.0 * (signal.to_mw().value() / denom).log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateEntry {
    pub mcs: u8,
    pub min_rssi_dbm: f64,
    pub rate_mbps: f64,
}

/// Outcome of a rate lookup. `mcs == None` marks an out-of-range link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSelection {
    pub mcs: Option<u8>,
    pub rate_mbps: f64,
}

impl RateSelection {
    pub const OUT_OF_RANGE: RateSelection = RateSelection {
        mcs: None,
        rate_mbps: 0.0,
    };
}

/// 802.11ax single-stream data subcarriers at 20 MHz.
const HE20_DATA_SUBCARRIERS: f64 = 234.0;
/// 12.8 us symbol plus 3.2 us guard interval.
const HE_SYMBOL_US: f64 = 16.0;

/// (coded bits per subcarrier, coding rate) for MCS 0..=11.
const HE_MODULATIONS: [(f64, f64); 12] = [
    (1.0, 1.0 / 2.0),
    (2.0, 1.0 / 2.0),
    (2.0, 3.0 / 4.0),
    (4.0, 1.0 / 2.0),
    (4.0, 3.0 / 4.0),
    (6.0, 2.0 / 3.0),
    (6.0, 3.0 / 4.0),
    (6.0, 5.0 / 6.0),
    (8.0, 3.0 / 4.0),
    (8.0, 5.0 / 6.0),
    (10.0, 3.0 / 4.0),
    (10.0, 5.0 / 6.0),
];

/// Minimum receiver sensitivity per MCS for a 20 MHz channel.
const HE20_MIN_SENSITIVITY_DBM: [f64; 12] = [
    -82.0, -79.0, -77.0, -74.0, -70.0, -66.0, -65.0, -64.0, -59.0, -57.0, -54.0, -52.0,
];

/// Ordered MCS table: thresholds and rates both strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RateEntry>", into = "Vec<RateEntry>")]
pub struct RateTable {
    entries: Vec<RateEntry>,
}

impl Default for RateTable {
    fn default() -> Self {
        let entries = HE_MODULATIONS
            .iter()
            .zip(HE20_MIN_SENSITIVITY_DBM)
            .enumerate()
            .map(|(mcs, (&(bits, rate), min_rssi))| RateEntry {
                mcs: mcs as u8,
                min_rssi_dbm: min_rssi,
                rate_mbps: HE20_DATA_SUBCARRIERS * bits * rate / HE_SYMBOL_US,
            })
            .collect();
        Self { entries }
    }
}

impl TryFrom<Vec<RateEntry>> for RateTable {
    type Error = Error;

    fn try_from(entries: Vec<RateEntry>) -> Result<Self> {
        Self::new(entries)
    }
}

impl From<RateTable> for Vec<RateEntry> {
    fn from(t: RateTable) -> Self {
        t.entries
    }
}

impl RateTable {
    pub fn new(entries: Vec<RateEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::config(
                "rate_table",
                "must contain at least one entry",
            ));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.mcs > 11 {
                return Err(Error::config(
                    format!("rate_table[{i}].mcs"),
                    "must be in 0..=11",
                ));
            }
            if !(e.rate_mbps > 0.0 && e.rate_mbps.is_finite() && e.min_rssi_dbm.is_finite()) {
                return Err(Error::config(
                    format!("rate_table[{i}]"),
                    "rate must be positive and threshold finite",
                ));
            }
        }
        for (i, w) in entries.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if !(a.mcs < b.mcs && a.min_rssi_dbm < b.min_rssi_dbm && a.rate_mbps < b.rate_mbps) {
                return Err(Error::config(
                    format!("rate_table[{}]", i + 1),
                    "entries must be strictly increasing in mcs, min_rssi_dbm and rate_mbps",
                ));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[RateEntry] {
        &self.entries
    }

    /// Highest rate in the table; the reward normalizer.
    pub fn max_rate_mbps(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.rate_mbps)
    }
}

/// Highest MCS whose threshold is at or below `rssi_at_sta`.
pub fn select_rate(table: &RateTable, rssi_at_sta: PowerDbm) -> RateSelection {
    table
        .entries
        .iter()
        .rev()
        .find(|e| e.min_rssi_dbm <= rssi_at_sta.0)
        .map_or(RateSelection::OUT_OF_RANGE, |e| RateSelection {
            mcs: Some(e.mcs),
            rate_mbps: e.rate_mbps,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn dbm_to_mw_examples() {
        assert_eq!(dbm_to_mw(PowerDbm(0.0)).value(), 1.0);
        assert!(rel_err(dbm_to_mw(PowerDbm(20.0)).value(), 100.0) < 1e-12);
        // 10^(-9.5) evaluated independently.
        assert!(
            rel_err(
                dbm_to_mw(PowerDbm(-95.0)).value(),
                3.162_277_660_168_379_5e-10
            ) < 1e-12
        );
    }

    #[test]
    fn mw_rejects_non_positive() {
        assert!(PowerMw::new(0.0).is_none());
        assert!(PowerMw::new(-1.0).is_none());
        assert!(PowerMw::new(f64::NAN).is_none());
        assert_eq!(PowerMw::new(2.0).unwrap().value(), 2.0);
    }

    #[test]
    fn path_loss_examples() {
        let m = PathLossModel {
            pl0_db: 40.0,
            exponent: 3.0,
            min_distance_m: 1.0,
            inter_bss_loss_db: 0.0,
        };
        assert_eq!(path_loss_db(&m, 1.0), 40.0);
        assert!((path_loss_db(&m, 10.0) - 70.0).abs() < 1e-12);
        assert_eq!(path_loss_db(&m, 0.0), path_loss_db(&m, 1.0));
        assert_eq!(path_loss_db(&m, 0.5), 40.0);
    }

    #[test]
    fn rssi_examples() {
        let m = PathLossModel {
            pl0_db: 40.0,
            exponent: 3.0,
            min_distance_m: 1.0,
            inter_bss_loss_db: 0.0,
        };
        assert!((rssi(PowerDbm(20.0), &m, 10.0).0 + 50.0).abs() < 1e-12);
        assert!((rssi(PowerDbm(5.0), &m, 10.0).0 + 65.0).abs() < 1e-12);
        assert_eq!(rssi(PowerDbm(20.0), &m, 0.0).0, 20.0 - 40.0);
    }

    #[test]
    fn sinr_examples() {
        let snr = sinr_db(PowerDbm(-50.0), &[], PowerDbm(-95.0));
        assert!((snr - 45.0).abs() < 1e-9);

        let equal = sinr_db(PowerDbm(-50.0), &[PowerDbm(-50.0)], PowerDbm(-200.0));
        assert!(equal.abs() < 1e-9);

        // 1e-5 / (2e-6 + 10^-9.5) mW, hand computed.
        let two = sinr_db(
            PowerDbm(-50.0),
            &[PowerDbm(-60.0), PowerDbm(-60.0)],
            PowerDbm(-95.0),
        );
        assert!((two - 6.989_013_417_772_25).abs() < 1e-9, "{two}");
    }

    #[test]
    fn default_rate_table_values() {
        let t = RateTable::default();
        let rates: Vec<f64> = t.entries().iter().map(|e| e.rate_mbps).collect();
        // 234 * bits * R / 16us, evaluated by hand.
        let expected = [
            7.3125, 14.625, 21.9375, 29.25, 43.875, 58.5, 65.8125, 73.125, 87.75, 97.5, 109.6875,
            121.875,
        ];
        assert_eq!(rates, expected);
        assert_eq!(t.max_rate_mbps(), 121.875);
        assert_eq!(t.entries()[0].min_rssi_dbm, -82.0);
        assert_eq!(t.entries()[11].min_rssi_dbm, -52.0);
    }

    #[test]
    fn select_rate_examples() {
        let t = RateTable::default();
        assert_eq!(select_rate(&t, PowerDbm(10.0)).mcs, Some(11));
        assert_eq!(
            select_rate(&t, PowerDbm(-82.5)),
            RateSelection::OUT_OF_RANGE
        );
        let mcs5 = t.entries()[5].min_rssi_dbm;
        assert_eq!(select_rate(&t, PowerDbm(mcs5)).mcs, Some(5));
        assert_eq!(select_rate(&t, PowerDbm(mcs5 - 1e-9)).mcs, Some(4));
    }

    #[test]
    fn rate_table_rejects_unsorted() {
        let mut e: Vec<RateEntry> = RateTable::default().entries().to_vec();
        e.swap(2, 3);
        assert!(RateTable::new(e).is_err());
        assert!(RateTable::new(vec![]).is_err());
        let dup = vec![
            RateEntry {
                mcs: 0,
                min_rssi_dbm: -80.0,
                rate_mbps: 5.0,
            },
            RateEntry {
                mcs: 1,
                min_rssi_dbm: -80.0,
                rate_mbps: 6.0,
            },
        ];
        assert!(RateTable::new(dup).is_err());
    }
}
