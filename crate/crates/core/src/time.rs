use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A point on the extended half line `[0, ∞]`, in seconds.
///
/// `INFINITY` stands for a run that never terminates. NaN and negative
/// values are rejected at construction, so the ordering is total.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedTime(f64);

impl ExtendedTime {
    pub const ZERO: ExtendedTime = ExtendedTime(0.0);
    pub const INFINITY: ExtendedTime = ExtendedTime(f64::INFINITY);

    pub fn new(seconds: f64) -> Result<Self> {
        if seconds.is_nan() || seconds < 0.0 || seconds == f64::NEG_INFINITY {
            return Err(Error::bad(format!("time must be in [0, inf], got {seconds}")));
        }
        // -0.0 and 0.0 compare equal but print differently
        Ok(ExtendedTime(if seconds == 0.0 { 0.0 } else { seconds }))
    }

    /// Panics on invalid input; for literals and values already validated.
    pub fn secs(seconds: f64) -> Self {
        Self::new(seconds).expect("invalid time literal")
    }

    pub fn seconds(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Eq for ExtendedTime {}

impl PartialOrd for ExtendedTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedTime {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<ExtendedTime> for f64 {
    fn from(t: ExtendedTime) -> f64 {
        t.0
    }
}

impl fmt::Display for ExtendedTime {
    /// Nanosecond precision, `inf` for the point at infinity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{:.9}", self.0)
        }
    }
}

impl FromStr for ExtendedTime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(ExtendedTime::INFINITY);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::bad(format!("not a time value: {s:?}")))?;
        ExtendedTime::new(v)
    }
}

impl Serialize for ExtendedTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        let t = match Repr::deserialize(deserializer)? {
            Repr::Num(v) => ExtendedTime::new(v),
            Repr::Str(s) => s.parse(),
        };
        t.map_err(serde::de::Error::custom)
    }
}

/// Formats a number of seconds the way run logs and reports expect.
pub fn fmt_seconds(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.9}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nan() {
        assert!(ExtendedTime::new(-1.0).is_err());
        assert!(ExtendedTime::new(f64::NAN).is_err());
        assert!(ExtendedTime::new(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn infinity_above_everything() {
        let big = ExtendedTime::secs(f64::MAX);
        assert!(ExtendedTime::INFINITY > big);
        assert!(ExtendedTime::ZERO < big);
        assert_eq!(ExtendedTime::secs(-0.0), ExtendedTime::ZERO);
    }

    #[test]
    fn text_round_trip() {
        assert_eq!("inf".parse::<ExtendedTime>().unwrap(), ExtendedTime::INFINITY);
        assert_eq!(ExtendedTime::secs(1.5).to_string(), "1.500000000");
        assert_eq!(ExtendedTime::INFINITY.to_string(), "inf");
        let json = serde_json::to_string(&ExtendedTime::INFINITY).unwrap();
        assert_eq!(json, "\"inf\"");
        let back: ExtendedTime = serde_json::from_str("2.5").unwrap();
        assert_eq!(back.seconds(), 2.5);
    }
}
