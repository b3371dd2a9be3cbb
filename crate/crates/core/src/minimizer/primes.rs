//! Prime implicant generation by iterated pairwise merging (Quine–McCluskey).

use super::cube::Cube;
use crate::error::{Error, Result};

pub const MAX_WIDTH: u32 = 16;

/// Dense membership set over `2^width` minterms.
pub(crate) struct MintermSet {
    bits: Vec<bool>,
}

impl MintermSet {
    pub(crate) fn new(width: u32, members: &[u32]) -> Self {
        let mut bits = vec![false; 1usize << width];
        for &m in members {
            bits[m as usize] = true;
        }
        MintermSet { bits }
    }

    pub(crate) fn contains(&self, m: u32) -> bool {
        self.bits.get(m as usize).copied().unwrap_or(false)
    }
}

pub(crate) fn check_sets(onset: &[u32], dcset: &[u32], width: u32) -> Result<()> {
    if width > MAX_WIDTH {
        return Err(Error::WidthLimit(width));
    }
    let limit = 1u64 << width;
    if let Some(&m) = onset.iter().chain(dcset).find(|&&m| m as u64 >= limit) {
        return Err(Error::CodeOutOfRange { code: m, bits: width });
    }
    let on = MintermSet::new(width, onset);
    if let Some(&m) = dcset.iter().find(|&&m| on.contains(m)) {
        return Err(Error::OverlappingSets(m));
    }
    Ok(())
}

/// All maximal cubes inside `onset ∪ dcset` that touch the onset, sorted.
///
/// Every ternary cube is visited once in base-3 order (digit 2 = absent), so a
/// cube's two halves are always visited before it.
pub fn prime_implicants(onset: &[u32], dcset: &[u32], width: u32) -> Result<Vec<Cube>> {
    check_sets(onset, dcset, width)?;
    const IMPLICANT: u8 = 1;
    const TOUCHES: u8 = 2;
    let n = width as usize;
    let pow3: Vec<usize> = (0..=n).map(|k| 3usize.pow(k as u32)).collect();
    let total = pow3[n];
    let full = super::cube::full_mask(width);
    let on = MintermSet::new(width, onset);
    let dc = MintermSet::new(width, dcset);

    let mut flags = vec![0u8; total];
    let mut cubes = vec![(0u32, 0u32); 0];
    let mut digits = vec![0u8; n];
    let (mut care, mut value) = (full, 0u32);
    for i in 0..total {
        let free = !care & full;
        flags[i] = if free == 0 {
            let mut f = 0;
            if on.contains(value) {
                f |= IMPLICANT | TOUCHES;
            } else if dc.contains(value) {
                f |= IMPLICANT;
            }
            f
        } else {
            let k = free.trailing_zeros() as usize;
            let (lo, hi) = (flags[i - 2 * pow3[k]], flags[i - pow3[k]]);
            (lo & hi & IMPLICANT) | ((lo | hi) & TOUCHES)
        };
        if flags[i] == IMPLICANT | TOUCHES {
            cubes.push((care, value));
        }
        // advance the base-3 counter
        for k in 0..n {
            let bit = 1u32 << k;
            match digits[k] {
                0 => {
                    digits[k] = 1;
                    value |= bit;
                    break;
                }
                1 => {
                    digits[k] = 2;
                    care &= !bit;
                    value &= !bit;
                    break;
                }
                _ => {
                    digits[k] = 0;
                    care |= bit;
                }
            }
        }
    }

    let index = |care: u32, value: u32| -> usize {
        (0..n)
            .map(|k| {
                let d = if care >> k & 1 == 0 { 2 } else { (value >> k & 1) as usize };
                d * pow3[k]
            })
            .sum()
    };
    let mut primes: Vec<Cube> = cubes
        .into_iter()
        .filter(|&(care, value)| {
            let i = index(care, value);
            (0..n).filter(|&k| care >> k & 1 == 1).all(|k| {
                let d = (value >> k & 1) as usize;
                flags[i + (2 - d) * pow3[k]] & IMPLICANT == 0
            })
        })
        .map(|(care, value)| Cube::new(width, care, value))
        .collect();
    primes.sort();
    Ok(primes)
}
