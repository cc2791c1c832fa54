//! Exact, non-negative rational stretch slack.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpsError {
    #[error("epsilon must be non-negative, got {0}/{1}")]
    Negative(i64, i64),
    #[error("epsilon denominator must be positive")]
    ZeroDenominator,
    #[error("expected an exact fraction \"p/q\", got {0:?}")]
    Malformed(String),
}

/// The slack `eps` of a `(1 + eps)` stretch bound, kept as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Eps(Ratio<u64>);

impl Eps {
    pub const ZERO: Eps = Eps(Ratio::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Self, EpsError> {
        if denom == 0 {
            return Err(EpsError::ZeroDenominator);
        }
        if (numer < 0) != (denom < 0) && numer != 0 {
            return Err(EpsError::Negative(numer, denom));
        }
        Ok(Eps(Ratio::new(numer.unsigned_abs(), denom.unsigned_abs())))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<u64> {
        self.0
    }

    /// `weight <= (1 + eps) * distance`, decided without rounding.
    pub fn admits(&self, weight: u64, distance: u64) -> bool {
        let (p, q) = (self.numer() as u128, self.denom() as u128);
        (weight as u128) * q <= (p + q) * (distance as u128)
    }

    /// Largest integer weight admitted for `distance`, i.e. `floor((1 + eps) * distance)`.
    pub fn budget(&self, distance: u64) -> u64 {
        let (p, q) = (self.numer() as u128, self.denom() as u128);
        let b = (p + q) * (distance as u128) / q;
        u64::try_from(b).unwrap_or(u64::MAX)
    }
}

impl Default for Eps {
    fn default() -> Self {
        Eps::ZERO
    }
}

impl fmt::Display for Eps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Eps {
    type Err = EpsError;

    /// Only the exact form `p/q` is accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || EpsError::Malformed(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(malformed)?;
        let p: i64 = p.trim().parse().map_err(|_| malformed())?;
        let q: i64 = q.trim().parse().map_err(|_| malformed())?;
        Eps::new(p, q)
    }
}

impl Serialize for Eps {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Eps {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_only() {
        assert_eq!("1/2".parse::<Eps>().unwrap(), Eps::new(1, 2).unwrap());
        assert_eq!("0/1".parse::<Eps>().unwrap(), Eps::ZERO);
        assert_eq!("2/4".parse::<Eps>().unwrap().to_string(), "1/2");
        assert!(matches!("0.5".parse::<Eps>(), Err(EpsError::Malformed(_))));
        assert!(matches!("1".parse::<Eps>(), Err(EpsError::Malformed(_))));
        assert!(matches!("-1/2".parse::<Eps>(), Err(EpsError::Negative(..))));
        assert!(matches!("1/0".parse::<Eps>(), Err(EpsError::ZeroDenominator)));
    }

    #[test]
    fn admits_is_exact_at_the_boundary() {
        let half = Eps::new(1, 2).unwrap();
        assert!(half.admits(3, 2));
        assert!(!half.admits(4, 2));
        assert!(Eps::ZERO.admits(5, 5));
        assert!(!Eps::ZERO.admits(6, 5));
        let third = Eps::new(1, 3).unwrap();
        assert!(third.admits(4, 3));
        assert!(!third.admits(5, 3));
        assert_eq!(third.budget(3), 4);
        assert_eq!(third.budget(2), 2);
    }
}
