use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported string length. Exhaustive enumeration walks all `2^n`
/// states, which stops being practical beyond this.
pub const MAX_N: usize = 30;

/// A fixed-length binary string `x_1 .. x_n`.
///
/// Stored as a bitmask with `x_1` in the most significant of the `n` low bits,
/// so `format!("{g}")` prints the sites left to right.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Genotype {
    bits: u32,
    len: u8,
}

impl Genotype {
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_mask(0, len)
    }

    /// Builds a genotype from a raw mask. Bits above `len` must be clear.
    pub fn from_mask(bits: u32, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_N {
            return Err(Error::InvalidParams(format!(
                "genotype length {len} outside [1, {MAX_N}]"
            )));
        }
        if bits & !low_mask(len) != 0 {
            return Err(Error::InvalidParams(format!(
                "mask {bits:#x} has bits set above length {len}"
            )));
        }
        Ok(Genotype {
            bits,
            len: len as u8,
        })
    }

    pub(crate) fn from_mask_unchecked(bits: u32, len: usize) -> Self {
        debug_assert!((1..=MAX_N).contains(&len) && bits & !low_mask(len) == 0);
        Genotype {
            bits,
            len: len as u8,
        }
    }

    /// Builds a genotype from site values `x_1 .. x_n`, each 0 or 1.
    pub fn from_bits(values: &[u8]) -> Result<Self> {
        let len = values.len();
        if len == 0 || len > MAX_N {
            return Err(Error::InvalidParams(format!(
                "genotype length {len} outside [1, {MAX_N}]"
            )));
        }
        let mut bits = 0u32;
        for (site, &v) in values.iter().enumerate() {
            match v {
                0 => {}
                1 => bits |= 1 << (len - 1 - site),
                other => {
                    return Err(Error::InvalidParams(format!(
                        "site {site} holds {other}, expected 0 or 1"
                    )))
                }
            }
        }
        Ok(Self::from_mask_unchecked(bits, len))
    }

    #[inline]
    pub fn mask(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Value of 0-based site `site`.
    #[inline]
    pub fn get(&self, site: usize) -> u8 {
        ((self.bits >> (self.len() - 1 - site)) & 1) as u8
    }

    /// Returns a copy with 0-based site `site` flipped.
    #[inline]
    pub fn flipped(&self, site: usize) -> Self {
        Genotype {
            bits: self.bits ^ site_bit(site, self.len()),
            len: self.len,
        }
    }

    #[inline]
    pub(crate) fn flip_in_place(&mut self, site: usize) {
        self.bits ^= site_bit(site, self.len());
    }

    pub fn complement(&self) -> Self {
        Genotype {
            bits: !self.bits & low_mask(self.len()),
            len: self.len,
        }
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len()).map(|s| self.get(s)).collect()
    }

    /// Number of sites where `self` and `other` differ.
    pub fn differing_sites(&self, other: &Genotype) -> Result<u32> {
        check_len(self.len(), other.len())?;
        Ok((self.bits ^ other.bits).count_ones())
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.len())
    }
}

impl fmt::Debug for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genotype({self})")
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .bytes()
            .map(|b| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::InvalidParams(format!(
                    "genotype string {s:?} contains a non-binary character"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Genotype::from_bits(&values)
    }
}

#[inline]
pub(crate) fn low_mask(len: usize) -> u32 {
    if len >= 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

#[inline]
pub(crate) fn site_bit(site: usize, len: usize) -> u32 {
    1 << (len - 1 - site)
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}
