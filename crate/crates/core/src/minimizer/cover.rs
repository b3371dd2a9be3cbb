//! Selecting a minimum set of prime implicants that covers an onset.
//!
//! Essential primes are taken first, dominated rows are dropped, and the
//! remaining cyclic core is solved by branch and bound. The objective is
//! lexicographic: fewest cubes, then fewest literals, then the smallest sorted
//! cube list, so results are reproducible.

use std::collections::BTreeSet;

use super::cube::Cube;
use crate::error::{Error, Result};

/// Node budget of the branch and bound before falling back to the best cover
/// found so far.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

/// A sum of products for one output bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SopCover {
    pub output: usize,
    pub cubes: Vec<Cube>,
    /// False when the solver stopped at the node budget or ran the greedy
    /// heuristic.
    pub exact: bool,
}

impl SopCover {
    pub fn empty(output: usize) -> Self {
        SopCover {
            output,
            cubes: Vec::new(),
            exact: true,
        }
    }

    pub fn with_output(mut self, output: usize) -> Self {
        self.output = output;
        self
    }

    pub fn evaluate(&self, m: u32) -> bool {
        self.cubes.iter().any(|c| c.contains_minterm(m))
    }

    pub fn literal_count(&self) -> u32 {
        self.cubes.iter().map(Cube::literal_count).sum()
    }
}

/// Row/column incidence of the covering problem.
struct Problem<'a> {
    primes: &'a [Cube],
    /// rows[r] = primes covering onset minterm r, ascending.
    rows: Vec<Vec<usize>>,
    /// cols[p] = rows covered by prime p.
    cols: Vec<Vec<usize>>,
}

impl<'a> Problem<'a> {
    fn new(primes: &'a [Cube], onset: &[u32]) -> Result<Self> {
        // onset is sorted and deduplicated
        let mut cols = vec![Vec::new(); primes.len()];
        let mut rows = vec![Vec::new(); onset.len()];
        for (p, cube) in primes.iter().enumerate() {
            if cube.minterm_count() as usize <= onset.len() {
                for m in cube.minterms() {
                    if let Ok(r) = onset.binary_search(&m) {
                        cols[p].push(r);
                    }
                }
            } else {
                cols[p].extend((0..onset.len()).filter(|&r| cube.contains_minterm(onset[r])));
            }
            for &r in &cols[p] {
                rows[r].push(p);
            }
        }
        if let Some(r) = rows.iter().position(Vec::is_empty) {
            return Err(Error::Uncoverable(onset[r]));
        }
        Ok(Problem { primes, rows, cols })
    }

    fn cost_key(&self, chosen: &[usize]) -> (usize, u32, Vec<Cube>) {
        let mut cubes: Vec<Cube> = chosen.iter().map(|&p| self.primes[p]).collect();
        cubes.sort();
        let lits = cubes.iter().map(Cube::literal_count).sum();
        (cubes.len(), lits, cubes)
    }
}

struct Search<'p, 'a> {
    problem: &'p Problem<'a>,
    /// Branch order of primes: fewest literals first, then cube order.
    prime_rank: Vec<usize>,
    best: Option<(usize, u32, Vec<Cube>)>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_, '_> {
    fn run(&mut self, uncovered: &mut Vec<bool>, remaining: usize, chosen: &mut Vec<usize>, lits: u32) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if remaining == 0 {
            let key = self.problem.cost_key(chosen);
            if self.best.as_ref().is_none_or(|b| key < *b) {
                self.best = Some(key);
            }
            return;
        }

        let (lb_count, lb_lits) = self.lower_bound(uncovered);
        if let Some((bc, bl, _)) = &self.best {
            if (chosen.len() + lb_count, lits + lb_lits) > (*bc, *bl) {
                return;
            }
        }

        // branch on the uncovered row with the fewest candidate primes
        let row = (0..uncovered.len())
            .filter(|&r| uncovered[r])
            .min_by_key(|&r| (self.problem.rows[r].len(), r))
            .expect("remaining > 0");
        let mut candidates = self.problem.rows[row].clone();
        candidates.sort_by_key(|&p| self.prime_rank[p]);

        for p in candidates {
            let newly: Vec<usize> = self.problem.cols[p].iter().copied().filter(|&r| uncovered[r]).collect();
            for &r in &newly {
                uncovered[r] = false;
            }
            chosen.push(p);
            let l = self.problem.primes[p].literal_count();
            self.run(uncovered, remaining - newly.len(), chosen, lits + l);
            chosen.pop();
            for &r in &newly {
                uncovered[r] = true;
            }
            if self.exhausted {
                return;
            }
        }
    }

    /// Greedy set of pairwise prime-disjoint uncovered rows: each needs its
    /// own prime, with at least the cheapest literal count among its options.
    fn lower_bound(&self, uncovered: &[bool]) -> (usize, u32) {
        let mut used = vec![false; self.problem.primes.len()];
        let (mut count, mut lits) = (0, 0);
        let mut order: Vec<usize> = (0..uncovered.len()).filter(|&r| uncovered[r]).collect();
        order.sort_by_key(|&r| (self.problem.rows[r].len(), r));
        for r in order {
            let row = &self.problem.rows[r];
            if row.iter().all(|&p| !used[p]) {
                for &p in row {
                    used[p] = true;
                }
                count += 1;
                lits += row.iter().map(|&p| self.problem.primes[p].literal_count()).min().unwrap_or(0);
            }
        }
        (count, lits)
    }
}

/// Exact minimum cover of `onset` by `primes`.
pub fn minimum_cover(primes: &[Cube], onset: &[u32]) -> Result<SopCover> {
    minimum_cover_with_budget(primes, onset, DEFAULT_NODE_BUDGET)
}

pub fn minimum_cover_with_budget(primes: &[Cube], onset: &[u32], budget: u64) -> Result<SopCover> {
    let onset: Vec<u32> = onset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if onset.is_empty() {
        return Ok(SopCover::empty(0));
    }
    let problem = Problem::new(primes, &onset)?;

    let mut uncovered = vec![true; onset.len()];
    let mut remaining = onset.len();
    let mut chosen = Vec::new();
    let mut lits = 0;

    // essential primes
    for r in 0..problem.rows.len() {
        if problem.rows[r].len() == 1 {
            let p = problem.rows[r][0];
            if !chosen.contains(&p) {
                chosen.push(p);
                lits += primes[p].literal_count();
                for &rr in &problem.cols[p] {
                    if uncovered[rr] {
                        uncovered[rr] = false;
                        remaining -= 1;
                    }
                }
            }
        }
    }

    // a row whose candidates include another row's candidates is implied by it
    let live: Vec<usize> = (0..problem.rows.len()).filter(|&r| uncovered[r]).collect();
    for &r in &live {
        let dominated = live.iter().any(|&s| {
            s != r
                && uncovered[s]
                && is_subset(&problem.rows[s], &problem.rows[r])
                && (problem.rows[s].len() < problem.rows[r].len() || s < r)
        });
        if dominated {
            uncovered[r] = false;
            remaining -= 1;
        }
    }

    let mut rank: Vec<usize> = (0..primes.len()).collect();
    rank.sort_by(|&a, &b| {
        primes[a]
            .literal_count()
            .cmp(&primes[b].literal_count())
            .then(primes[a].cmp(&primes[b]))
    });
    let mut prime_rank = vec![0; primes.len()];
    for (i, &p) in rank.iter().enumerate() {
        prime_rank[p] = i;
    }

    let mut search = Search {
        problem: &problem,
        prime_rank,
        best: None,
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.run(&mut uncovered, remaining, &mut chosen, lits);

    if search.best.is_none() {
        // budget ran out before any leaf; finish greedily
        return greedy_cover(primes, &onset);
    }
    let exact = !search.exhausted;
    let (_, _, cubes) = search.best.expect("checked above");
    Ok(SopCover { output: 0, cubes, exact })
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    // both ascending
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

/// Essential primes first, then repeatedly the prime covering the most
/// uncovered minterms (ties: fewer literals, then cube order).
pub fn greedy_cover(primes: &[Cube], onset: &[u32]) -> Result<SopCover> {
    let onset: Vec<u32> = onset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if onset.is_empty() {
        return Ok(SopCover::empty(0));
    }
    let problem = Problem::new(primes, &onset)?;
    let mut uncovered = vec![true; onset.len()];
    let mut chosen: BTreeSet<usize> = problem
        .rows
        .iter()
        .filter(|row| row.len() == 1)
        .map(|row| row[0])
        .collect();
    for &p in &chosen {
        for &r in &problem.cols[p] {
            uncovered[r] = false;
        }
    }
    let mut gain: Vec<usize> = (0..primes.len())
        .map(|p| problem.cols[p].iter().filter(|&&r| uncovered[r]).count())
        .collect();
    while uncovered.iter().any(|&u| u) {
        let p = (0..primes.len())
            .filter(|&p| gain[p] > 0)
            .max_by(|&a, &b| {
                gain[a]
                    .cmp(&gain[b])
                    .then(primes[b].literal_count().cmp(&primes[a].literal_count()))
                    .then(primes[b].cmp(&primes[a]))
            })
            .expect("every row is coverable");
        chosen.insert(p);
        for &r in &problem.cols[p] {
            if uncovered[r] {
                uncovered[r] = false;
                for &q in &problem.rows[r] {
                    gain[q] -= 1;
                }
            }
        }
    }
    let mut cubes: Vec<Cube> = chosen.into_iter().map(|p| primes[p]).collect();
    cubes.sort();
    Ok(SopCover {
        output: 0,
        cubes,
        exact: false,
    })
}
