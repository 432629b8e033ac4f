//! Deterministic mechanisms and their 13-bit encoding.
//!
//! Bit layout, least significant first:
//!
//! | bits  | entry                                        |
//! |-------|----------------------------------------------|
//! | 0     | `sigma1`                                     |
//! | 1..=3 | `sigma2(null)`, `sigma2(low)`, `sigma2(high)` |
//! | 4..=12| `xhat(r1, r2)` at bit `4 + 3*r1 + r2`        |
//!
//! with reports ordered `null = 0, low = 1, high = 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Report;

/// Number of distinct deterministic mechanisms.
pub const MECHANISM_COUNT: u16 = 1 << 13;

/// A deterministic game form: testing recommendations and an assignment rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mechanism {
    pub sigma1: bool,
    /// Second-period recommendation indexed by the first report.
    pub sigma2: [bool; 3],
    /// Assignment indexed by `[r1][r2]`.
    pub xhat: [[bool; 3]; 3],
}

/// A testing policy `(sigma1, sigma2)` without assignments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TestingPolicy {
    pub sigma1: bool,
    pub sigma2: [bool; 3],
}

impl TestingPolicy {
    /// Entrywise order on the four recommendation bits.
    pub fn dominates(&self, other: &TestingPolicy) -> bool {
        (self.sigma1 || !other.sigma1)
            && (0..3).all(|i| self.sigma2[i] || !other.sigma2[i])
    }

    /// 4-bit index with the same layout as the low bits of a mechanism index.
    pub fn index(&self) -> u8 {
        let mut i = self.sigma1 as u8;
        for (j, &b) in self.sigma2.iter().enumerate() {
            i |= (b as u8) << (1 + j);
        }
        i
    }

    pub fn from_index(i: u8) -> TestingPolicy {
        assert!(i < 16, "testing policy index {i} out of range");
        TestingPolicy {
            sigma1: i & 1 == 1,
            sigma2: [i >> 1 & 1 == 1, i >> 2 & 1 == 1, i >> 3 & 1 == 1],
        }
    }

    pub fn all() -> impl Iterator<Item = TestingPolicy> {
        (0..16).map(TestingPolicy::from_index)
    }
}

impl fmt::Display for TestingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sigma1={} sigma2(null,low,high)=({},{},{})",
            self.sigma1 as u8, self.sigma2[0] as u8, self.sigma2[1] as u8, self.sigma2[2] as u8
        )
    }
}

impl Mechanism {
    pub fn sigma2(&self, r1: Report) -> bool {
        self.sigma2[r1.index()]
    }

    pub fn xhat(&self, r1: Report, r2: Report) -> bool {
        self.xhat[r1.index()][r2.index()]
    }

    pub fn set_xhat(&mut self, r1: Report, r2: Report, v: bool) {
        self.xhat[r1.index()][r2.index()] = v;
    }

    pub fn policy(&self) -> TestingPolicy {
        TestingPolicy {
            sigma1: self.sigma1,
            sigma2: self.sigma2,
        }
    }

    pub fn with_policy(policy: TestingPolicy, xhat: [[bool; 3]; 3]) -> Mechanism {
        Mechanism {
            sigma1: policy.sigma1,
            sigma2: policy.sigma2,
            xhat,
        }
    }

    /// Builds the assignment table from a rule over report pairs.
    pub fn xhat_from(f: impl Fn(Report, Report) -> bool) -> [[bool; 3]; 3] {
        let mut t = [[false; 3]; 3];
        for r1 in Report::ALL {
            for r2 in Report::ALL {
                t[r1.index()][r2.index()] = f(r1, r2);
            }
        }
        t
    }

    pub fn encode(&self) -> u16 {
        let mut i = self.policy().index() as u16;
        for r1 in 0..3 {
            for r2 in 0..3 {
                i |= (self.xhat[r1][r2] as u16) << (4 + 3 * r1 + r2);
            }
        }
        i
    }

    pub fn decode(index: u32) -> Result<Mechanism> {
        if index >= MECHANISM_COUNT as u32 {
            return Err(Error::IndexOutOfRange(index));
        }
        let bit = |b: u32| index >> b & 1 == 1;
        let mut xhat = [[false; 3]; 3];
        for (r1, row) in xhat.iter_mut().enumerate() {
            for (r2, cell) in row.iter_mut().enumerate() {
                *cell = bit((4 + 3 * r1 + r2) as u32);
            }
        }
        Ok(Mechanism {
            sigma1: bit(0),
            sigma2: [bit(1), bit(2), bit(3)],
            xhat,
        })
    }

    /// A requested second-period test with no report is assigned 0.
    pub fn is_forcing(&self) -> bool {
        Report::ALL
            .iter()
            .all(|&r1| !self.sigma2(r1) || !self.xhat(r1, Report::Null))
    }

    pub fn to_record(&self) -> MechanismRecord {
        let row = |r: [bool; 3]| r.map(|b| b as u8);
        MechanismRecord {
            sigma1: self.sigma1 as u8,
            sigma2: Sigma2Record {
                null: self.sigma2[0] as u8,
                low: self.sigma2[1] as u8,
                high: self.sigma2[2] as u8,
            },
            xhat: self.xhat.map(row),
        }
    }

    pub fn from_record(rec: &MechanismRecord) -> Result<Mechanism> {
        let bit = |v: u8, what: &str| match v {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::InvalidMechanism(format!("{what} = {v} is not 0 or 1"))),
        };
        let mut xhat = [[false; 3]; 3];
        for r1 in 0..3 {
            for r2 in 0..3 {
                xhat[r1][r2] = bit(rec.xhat[r1][r2], "xhat entry")?;
            }
        }
        Ok(Mechanism {
            sigma1: bit(rec.sigma1, "sigma1")?,
            sigma2: [
                bit(rec.sigma2.null, "sigma2.null")?,
                bit(rec.sigma2.low, "sigma2.low")?,
                bit(rec.sigma2.high, "sigma2.high")?,
            ],
            xhat,
        })
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "index {}", self.encode())?;
        writeln!(f, "{}", self.policy())?;
        writeln!(f, "xhat     r2=null r2=low r2=high")?;
        for r1 in Report::ALL {
            writeln!(
                f,
                "r1={:<5} {:>7} {:>6} {:>7}",
                r1.as_str(),
                self.xhat(r1, Report::Null) as u8,
                self.xhat(r1, Report::Low) as u8,
                self.xhat(r1, Report::High) as u8
            )?;
        }
        write!(f, "forcing: {}", self.is_forcing())
    }
}

/// JSON form: `{"sigma1": 0, "sigma2": {"null": 1, "low": 0, "high": 0}, "xhat": [[..], [..], [..]]}`
/// with `xhat[r1][r2]` rows and columns ordered null, low, high.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismRecord {
    pub sigma1: u8,
    pub sigma2: Sigma2Record,
    pub xhat: [[u8; 3]; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sigma2Record {
    pub null: u8,
    pub low: u8,
    pub high: u8,
}

impl Serialize for Mechanism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mechanism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = MechanismRecord::deserialize(d)?;
        Mechanism::from_record(&rec).map_err(serde::de::Error::custom)
    }
}

/// All 8192 mechanisms in ascending index order.
pub fn enumerate_all() -> impl Iterator<Item = Mechanism> + Clone {
    (0..MECHANISM_COUNT as u32).map(|i| Mechanism::decode(i).expect("in range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_index() {
        let m = Mechanism::decode(0).unwrap();
        assert_eq!(m, Mechanism::default());
        assert!(m.is_forcing());
    }

    #[test]
    fn out_of_range() {
        assert_eq!(Mechanism::decode(8192), Err(Error::IndexOutOfRange(8192)));
        assert!(Mechanism::decode(8191).is_ok());
    }

    #[test]
    fn hand_encoded_example() {
        // test after an empty first report, assign 1 exactly on a high second report
        let m = Mechanism {
            sigma1: false,
            sigma2: [true, false, false],
            xhat: Mechanism::xhat_from(|_, r2| r2 == Report::High),
        };
        // bit 1, then bits 4+2, 4+5, 4+8
        assert_eq!(m.encode(), 2 + 64 + 512 + 4096);
        assert_eq!(m.encode(), 4674);
    }

    #[test]
    fn roundtrip_all() {
        let all: Vec<u16> = enumerate_all().map(|m| m.encode()).collect();
        assert_eq!(all.len(), 8192);
        for (i, e) in all.iter().enumerate() {
            assert_eq!(*e as usize, i);
        }
    }

    #[test]
    fn forcing_predicate() {
        let mut m = Mechanism::default();
        m.sigma2 = [true, false, false];
        m.set_xhat(Report::Null, Report::Null, true);
        assert!(!m.is_forcing());
        m.set_xhat(Report::Null, Report::Null, false);
        m.set_xhat(Report::Low, Report::Null, true);
        assert!(m.is_forcing());
    }

    #[test]
    fn json_shape() {
        let m = Mechanism::decode(4674).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(
            json,
            r#"{"sigma1":0,"sigma2":{"null":1,"low":0,"high":0},"xhat":[[0,0,1],[0,0,1],[0,0,1]]}"#
        );
        let back: Mechanism = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Mechanism>(&json.replace("\"sigma1\":0", "\"sigma1\":2"))
            .is_err());
        assert!(serde_json::from_str::<Mechanism>(r#"{"sigma1":0}"#).is_err());
    }

    #[test]
    fn policy_order() {
        let rd1 = TestingPolicy { sigma1: false, sigma2: [true, false, true] };
        let base = TestingPolicy { sigma1: false, sigma2: [true, false, false] };
        assert!(rd1.dominates(&base));
        assert!(!base.dominates(&rd1));
        assert_eq!(TestingPolicy::all().count(), 16);
    }

    proptest! {
        #[test]
        fn bijection(i in 0u32..8192) {
            let m = Mechanism::decode(i).unwrap();
            prop_assert_eq!(m.encode() as u32, i);
            let rec = m.to_record();
            prop_assert_eq!(Mechanism::from_record(&rec).unwrap(), m);
        }
    }
}
