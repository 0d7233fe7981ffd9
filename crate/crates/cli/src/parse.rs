//! Argument grammars: integer lists with inclusive ranges, and interval specs.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

/// Comma-separated integers and inclusive ranges, e.g. `5,7,100-120`.
/// Values come out sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumList {
    text: String,
    values: Vec<u64>,
}

impl NumList {
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn max(&self) -> u64 {
        *self.values.last().expect("nonempty")
    }
}

fn int(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("not a nonnegative integer: {s:?}"))
}

impl FromStr for NumList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut values = Vec::new();
        for item in s.split(',') {
            match item.split_once('-') {
                Some((lo, hi)) => {
                    let (lo, hi) = (int(lo)?, int(hi)?);
                    if lo > hi {
                        return Err(format!("empty range {item:?}"));
                    }
                    if hi - lo >= 1 << 24 {
                        return Err(format!("range {item:?} is too long"));
                    }
                    values.extend(lo..=hi);
                }
                None => values.push(int(item)?),
            }
        }
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err("empty list".into());
        }
        Ok(NumList {
            text: s.to_string(),
            values,
        })
    }
}

impl fmt::Display for NumList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for NumList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

/// `L:N,...`: offset and length of each interval `{L+1, …, L+N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec {
    text: String,
    pairs: Vec<(u64, u64)>,
}

impl IntervalSpec {
    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }
}

impl FromStr for IntervalSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let pairs = s
            .split(',')
            .map(|item| {
                let (l, n) = item
                    .split_once(':')
                    .ok_or_else(|| format!("interval {item:?} is not of the form L:N"))?;
                Ok((int(l)?, int(n)?))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(IntervalSpec {
            text: s.to_string(),
            pairs,
        })
    }
}

impl Serialize for IntervalSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_expand_sort_and_dedup() {
        let l: NumList = "11,5-7,6".parse().unwrap();
        assert_eq!(l.values(), [5, 6, 7, 11]);
        assert_eq!(l.to_string(), "11,5-7,6");
        assert!("7-5".parse::<NumList>().is_err());
        assert!("x".parse::<NumList>().is_err());
    }

    #[test]
    fn interval_specs_parse() {
        let s: IntervalSpec = "0:1,10:3".parse().unwrap();
        assert_eq!(s.pairs(), [(0, 1), (10, 3)]);
        assert!("0-1".parse::<IntervalSpec>().is_err());
    }
}
