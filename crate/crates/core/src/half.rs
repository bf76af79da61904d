use std::fmt;
use std::ops::Add;

/// A nonnegative multiple of one half, stored doubled.
///
/// Steiner tree edges weigh 1/2 and four-point hyperbolicity values are
/// half-integers in the hop metric; keeping them doubled avoids float equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfHops(u64);

impl HalfHops {
    pub const ZERO: HalfHops = HalfHops(0);

    pub const fn from_doubled(doubled: u64) -> Self {
        HalfHops(doubled)
    }

    pub const fn from_hops(hops: u64) -> Self {
        HalfHops(hops * 2)
    }

    pub const fn doubled(self) -> u64 {
        self.0
    }

    pub const fn is_integral(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Whole hops, rounding half values down.
    pub const fn floor_hops(self) -> u64 {
        self.0 / 2
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Parses "3", "3.5" or "3.0". Anything that is not a multiple of 1/2 is rejected.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('.') {
            None => s.parse::<u64>().ok().map(HalfHops::from_hops),
            Some((whole, frac)) => {
                let whole: u64 = if whole.is_empty() { 0 } else { whole.parse().ok()? };
                let frac = frac.trim_end_matches('0');
                let half = match frac {
                    "" => 0,
                    "5" => 1,
                    _ => return None,
                };
                Some(HalfHops(whole * 2 + half))
            }
        }
    }
}

impl Add for HalfHops {
    type Output = HalfHops;

    fn add(self, rhs: HalfHops) -> HalfHops {
        HalfHops(self.0 + rhs.0)
    }
}

impl fmt::Display for HalfHops {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parse_agree() {
        for d in 0..20 {
            let h = HalfHops::from_doubled(d);
            assert_eq!(HalfHops::parse(&h.to_string()), Some(h));
        }
        assert_eq!(HalfHops::parse("2.50"), Some(HalfHops::from_doubled(5)));
        assert_eq!(HalfHops::parse("1.25"), None);
        assert_eq!(HalfHops::parse("x"), None);
    }
}
