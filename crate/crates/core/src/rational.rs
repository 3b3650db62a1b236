//! Exact nonnegative rationals for velocities and spectra.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Nonnegative rational kept in lowest terms. Zero is `0/1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// denominator must be nonzero
    pub fn new(num: u64, den: u64) -> Rational {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct ParseRationalError;

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected `p/q` or an integer")
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Rational, ParseRationalError> {
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (
                p.trim().parse().map_err(|_| ParseRationalError)?,
                q.trim().parse().map_err(|_| ParseRationalError)?,
            ),
            None => (s.trim().parse().map_err(|_| ParseRationalError)?, 1),
        };
        if den == 0 {
            return Err(ParseRationalError);
        }
        Ok(Rational::new(num, den))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_on_construction() {
        let r = Rational::new(20, 30);
        assert_eq!((r.numer(), r.denom()), (2, 3));
        assert_eq!(Rational::new(0, 7), Rational::ZERO);
        assert_eq!(Rational::new(21, 21), Rational::ONE);
    }

    #[test]
    #[should_panic]
    fn zero_denominator_panics() {
        let _ = Rational::new(1, 0);
    }

    #[test]
    fn ordering_uses_cross_multiplication() {
        let a = Rational::new(20, 21);
        let b = Rational::new(2, 3);
        assert!(a > b);
        assert!(b < Rational::ONE);
        assert!(Rational::ZERO < b);
        // near-overflow cross products still compare exactly
        let big = Rational::new(u64::MAX - 1, u64::MAX);
        assert!(big < Rational::ONE);
    }

    #[test]
    fn displays_as_fraction() {
        assert_eq!(Rational::new(20, 21).to_string(), "20/21");
        assert_eq!(Rational::ZERO.to_string(), "0/1");
        assert_eq!(Rational::new(10, 10).to_string(), "1/1");
    }

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!("20/21".parse(), Ok(Rational::new(20, 21)));
        assert_eq!("1".parse(), Ok(Rational::ONE));
        assert_eq!(" 4 / 6 ".parse(), Ok(Rational::new(2, 3)));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn serializes_as_string() {
        let json = serde_json::to_string(&Rational::new(20, 21)).unwrap();
        assert_eq!(json, "\"20/21\"");
    }
}
