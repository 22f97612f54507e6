//! Two-level minimization (Quine–McCluskey).
//!
//! Prime implicants are found by repeated merging of cubes that differ in one
//! cared bit. The cover is chosen exactly (essential primes, then
//! branch-and-bound over the cyclic core) up to [`EXACT_COVER_MAX_ARITY`]
//! inputs and greedily above it.

use std::collections::{BTreeSet, HashMap};

use super::dnf::Cube;
use super::{Dnf, Term};

pub const EXACT_COVER_MAX_ARITY: usize = 10;

/// Search nodes allowed for the exact cover before settling for the best
/// cover found so far.
const NODE_BUDGET: usize = 1 << 20;

/// Returns a prime-implicant cover with the same true set as `d`.
///
/// Terms are ordered by increasing literal count, then by cube bits.
pub fn minimize(d: &Dnf) -> Dnf {
    let n = d.arity();
    let minterms: Vec<u32> = d.to_table().true_rows().map(|r| r as u32).collect();
    if minterms.is_empty() {
        return Dnf::new(n, vec![]).expect("empty cover");
    }
    let primes = prime_implicants(n, &minterms);
    let chosen = if n <= EXACT_COVER_MAX_ARITY {
        exact_cover(&primes, &minterms)
    } else {
        greedy_cover(&primes, &minterms, &[])
    };
    let mut cubes: Vec<Cube> = chosen.into_iter().map(|i| primes[i]).collect();
    cubes.sort_by_key(|c| (c.literal_count(), c.care, c.value));
    Dnf::new(n, cubes.into_iter().map(|c| Term::from_cube(n, c)).collect()).expect("distinct primes")
}

pub(crate) fn prime_implicants(arity: usize, minterms: &[u32]) -> Vec<Cube> {
    let full = if arity == 32 { u32::MAX } else { (1u32 << arity) - 1 };
    let mut current: BTreeSet<Cube> = minterms.iter().map(|&m| Cube { value: m, care: full }).collect();
    let mut primes = Vec::new();
    while !current.is_empty() {
        // Cubes can only merge when they share a care mask and differ in one bit.
        let mut by_key: HashMap<(u32, u32), Vec<Cube>> = HashMap::new();
        for &c in &current {
            by_key.entry((c.care, c.value.count_ones())).or_default().push(c);
        }
        let mut merged_flag: HashMap<Cube, bool> = current.iter().map(|&c| (c, false)).collect();
        let mut next = BTreeSet::new();
        for (&(care, ones), group) in &by_key {
            let Some(upper) = by_key.get(&(care, ones + 1)) else {
                continue;
            };
            for &a in group {
                for &b in upper {
                    let diff = a.value ^ b.value;
                    if diff.count_ones() == 1 {
                        next.insert(Cube {
                            value: a.value & !diff,
                            care: care & !diff,
                        });
                        merged_flag.insert(a, true);
                        merged_flag.insert(b, true);
                    }
                }
            }
        }
        primes.extend(current.iter().filter(|c| !merged_flag[c]).copied());
        current = next;
    }
    primes.sort();
    primes
}

/// For each minterm, the indices of primes covering it.
fn coverage(primes: &[Cube], minterms: &[u32]) -> Vec<Vec<usize>> {
    minterms
        .iter()
        .map(|&m| {
            primes
                .iter()
                .enumerate()
                .filter(|(_, p)| p.contains(m))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

fn greedy_cover(primes: &[Cube], minterms: &[u32], preselected: &[usize]) -> Vec<usize> {
    let covers = coverage(primes, minterms);
    let mut covered: Vec<bool> = covers
        .iter()
        .map(|c| c.iter().any(|p| preselected.contains(p)))
        .collect();
    let mut chosen = preselected.to_vec();
    loop {
        let mut gain = vec![0usize; primes.len()];
        for (m, cs) in covers.iter().enumerate() {
            if !covered[m] {
                for &p in cs {
                    gain[p] += 1;
                }
            }
        }
        let Some((best, &g)) = gain
            .iter()
            .enumerate()
            .max_by_key(|&(i, &g)| (g, std::cmp::Reverse(primes[i].literal_count()), std::cmp::Reverse(i)))
        else {
            break;
        };
        if g == 0 {
            break;
        }
        chosen.push(best);
        for (m, cs) in covers.iter().enumerate() {
            if cs.contains(&best) {
                covered[m] = true;
            }
        }
    }
    chosen
}

struct CoverSearch<'a> {
    covers: &'a [Vec<usize>],
    /// Minterm indices covered by each prime.
    covered_by: Vec<Vec<usize>>,
    best: Vec<usize>,
    nodes: usize,
}

impl CoverSearch<'_> {
    fn search(&mut self, chosen: &mut Vec<usize>, hits: &mut [u32]) {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return;
        }
        // Most constrained uncovered minterm.
        let Some(pivot) = (0..self.covers.len())
            .filter(|&m| hits[m] == 0)
            .min_by_key(|&m| self.covers[m].len())
        else {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        };
        if chosen.len() + 1 >= self.best.len() {
            return;
        }
        let mut options = self.covers[pivot].clone();
        options.sort_by_key(|&p| std::cmp::Reverse(self.covered_by[p].iter().filter(|&&m| hits[m] == 0).count()));
        for p in options {
            chosen.push(p);
            for &m in &self.covered_by[p] {
                hits[m] += 1;
            }
            self.search(chosen, hits);
            for &m in &self.covered_by[p] {
                hits[m] -= 1;
            }
            chosen.pop();
        }
    }
}

fn exact_cover(primes: &[Cube], minterms: &[u32]) -> Vec<usize> {
    let covers = coverage(primes, minterms);
    let essential: Vec<usize> = {
        let mut e: Vec<usize> = covers.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
        e.sort_unstable();
        e.dedup();
        e
    };
    let mut covered_by = vec![Vec::new(); primes.len()];
    for (m, cs) in covers.iter().enumerate() {
        for &p in cs {
            covered_by[p].push(m);
        }
    }
    let mut hits = vec![0u32; minterms.len()];
    for &p in &essential {
        for &m in &covered_by[p] {
            hits[m] += 1;
        }
    }
    let greedy = greedy_cover(primes, minterms, &essential);
    let mut search = CoverSearch {
        covers: &covers,
        covered_by,
        best: greedy.clone(),
        nodes: 0,
    };
    let mut chosen = essential.clone();
    search.search(&mut chosen, &mut hits);
    if search.nodes > NODE_BUDGET {
        log::debug!("exact cover search exhausted its budget; using best cover found");
    }
    search.best
}
