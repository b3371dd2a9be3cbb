use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Positive,
    Negative,
    Absent,
}

impl Literal {
    fn rank(self) -> u8 {
        match self {
            Literal::Absent => 0,
            Literal::Negative => 1,
            Literal::Positive => 2,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Literal::Absent => '-',
            Literal::Negative => '0',
            Literal::Positive => '1',
        }
    }
}

/// A product term over `width` inputs. Bit `i` of `care` says whether input
/// `X_i` appears; if so, bit `i` of `value` gives its polarity.
///
/// Cubes order lexicographically by their PLA string (`X_{n-1}` first,
/// `-` < `0` < `1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cube {
    width: u8,
    care: u32,
    value: u32,
}

impl Cube {
    pub fn new(width: u32, care: u32, value: u32) -> Self {
        debug_assert!(width <= 32);
        let full = full_mask(width);
        Cube {
            width: width as u8,
            care: care & full,
            value: value & care & full,
        }
    }

    pub fn universal(width: u32) -> Self {
        Cube::new(width, 0, 0)
    }

    pub fn minterm(width: u32, m: u32) -> Self {
        Cube::new(width, full_mask(width), m)
    }

    /// Smallest cube containing both cubes.
    pub fn supercube(&self, other: &Cube) -> Cube {
        let care = self.care & other.care & !(self.value ^ other.value);
        Cube::new(self.width(), care, self.value)
    }

    pub fn width(&self) -> u32 {
        self.width as u32
    }

    pub fn care(&self) -> u32 {
        self.care
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn literal(&self, bit: u32) -> Literal {
        if self.care >> bit & 1 == 0 {
            Literal::Absent
        } else if self.value >> bit & 1 == 1 {
            Literal::Positive
        } else {
            Literal::Negative
        }
    }

    pub fn literal_count(&self) -> u32 {
        self.care.count_ones()
    }

    /// Number of complemented literals.
    pub fn negative_count(&self) -> u32 {
        (self.care & !self.value).count_ones()
    }

    pub fn contains_minterm(&self, m: u32) -> bool {
        m & self.care == self.value
    }

    /// Whether every minterm of `other` lies in `self`.
    pub fn contains(&self, other: &Cube) -> bool {
        self.care & other.care == self.care && other.value & self.care == self.value
    }

    pub fn intersects(&self, other: &Cube) -> bool {
        (self.value ^ other.value) & self.care & other.care == 0
    }

    pub fn minterm_count(&self) -> u64 {
        1u64 << (self.width() - self.literal_count())
    }

    /// Iterates the minterms of the cube in increasing order.
    pub fn minterms(&self) -> impl Iterator<Item = u32> + '_ {
        let free = !self.care & full_mask(self.width());
        // enumerate subsets of `free` in increasing order
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let sub = next?;
            next = if sub == free { None } else { Some((sub | !free).wrapping_add(1) & free) };
            Some(self.value | sub)
        })
    }

    fn literals_msb_first(&self) -> impl Iterator<Item = Literal> + '_ {
        (0..self.width()).rev().map(|b| self.literal(b))
    }
}

pub(crate) fn full_mask(width: u32) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

impl Ord for Cube {
    fn cmp(&self, other: &Self) -> Ordering {
        self.width.cmp(&other.width).then_with(|| {
            self.literals_msb_first()
                .map(Literal::rank)
                .cmp(other.literals_msb_first().map(Literal::rank))
        })
    }
}

impl PartialOrd for Cube {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.literals_msb_first() {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Cube {
    type Err = Error;

    /// Parses `{0,1,-}` characters, most significant input first.
    fn from_str(s: &str) -> Result<Self> {
        let width = s.chars().count() as u32;
        if width == 0 || width > 16 {
            return Err(Error::InvalidParameter(format!("cube `{s}` must have 1..=16 literals")));
        }
        let (mut care, mut value) = (0u32, 0u32);
        for (i, ch) in s.chars().enumerate() {
            let bit = width - 1 - i as u32;
            match ch {
                '-' => {}
                '0' => care |= 1 << bit,
                '1' => {
                    care |= 1 << bit;
                    value |= 1 << bit;
                }
                other => {
                    return Err(Error::InvalidParameter(format!("invalid cube character `{other}` in `{s}`")))
                }
            }
        }
        Ok(Cube::new(width, care, value))
    }
}
