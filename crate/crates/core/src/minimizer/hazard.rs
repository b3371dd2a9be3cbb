//! Static-1 hazard removal by adding consensus primes.
//!
//! A single-input change between two onset minterms glitches unless one cube
//! holds both. For every such pair left uncovered, the cheapest prime
//! containing the pair is added.

use super::cover::SopCover;
use super::cube::Cube;
use super::primes::{prime_implicants, MintermSet};
use crate::error::Result;

/// Hamming-adjacent onset pairs `(a, b)`, `a < b`, not held by a single cube.
pub fn uncovered_adjacent_pairs(cubes: &[Cube], onset: &[u32], width: u32) -> Vec<(u32, u32)> {
    let on = MintermSet::new(width, onset);
    let mut sorted: Vec<u32> = onset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::new();
    for &a in &sorted {
        for bit in 0..width {
            let b = a ^ (1 << bit);
            if b > a && on.contains(b) && !cubes.iter().any(|c| c.contains_minterm(a) && c.contains_minterm(b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Adds consensus primes (of `onset ∪ dcset`) until every adjacent onset pair
/// shares a cube. Covers without such gaps are returned unchanged.
pub fn hazard_free_augment(cover: &SopCover, onset: &[u32], dcset: &[u32], width: u32) -> Result<SopCover> {
    let mut result = cover.clone();
    let gaps = uncovered_adjacent_pairs(&result.cubes, onset, width);
    if gaps.is_empty() {
        return Ok(result);
    }
    let primes = prime_implicants(onset, dcset, width)?;
    for (a, b) in gaps {
        if result.cubes.iter().any(|c| c.contains_minterm(a) && c.contains_minterm(b)) {
            continue;
        }
        let pair = Cube::minterm(width, a).supercube(&Cube::minterm(width, b));
        let best = primes
            .iter()
            .filter(|p| p.contains(&pair))
            .min_by(|x, y| x.literal_count().cmp(&y.literal_count()).then(x.cmp(y)))
            .copied()
            .expect("the pair lies inside onset, so some prime contains it");
        result.cubes.push(best);
    }
    Ok(result)
}
