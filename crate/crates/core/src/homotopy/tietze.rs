//! Tietze elimination on edge-path presentations and the bounded decision
//! procedure built on it.

use std::collections::BTreeSet;

use super::words::{
    abelianize, canonical_relator, cyclic_reduce, free_reduce, generator_of, inverse, Letter, Word,
};
use super::{GroupPresentation, HomotopyVerdict};

/// Limits on the work done by simplification and rewriting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TietzeBudget {
    /// Eliminations producing a relator longer than this are skipped.
    pub max_relator_len: usize,
    /// Rewriting steps allowed when deciding a word.
    pub max_steps: usize,
}

impl Default for TietzeBudget {
    fn default() -> Self {
        TietzeBudget {
            max_relator_len: 64,
            max_steps: 10_000,
        }
    }
}

/// A presentation after eliminating generators.
///
/// Generator indices are those of the original presentation; eliminated
/// generators carry a substitution word in the surviving ones.
#[derive(Debug, Clone)]
pub struct SimplifiedPresentation {
    pub substitution: Vec<Option<Word>>,
    pub relators: Vec<Word>,
    budget: TietzeBudget,
}

fn substitute(w: &[Letter], subs: &[Option<Word>]) -> Word {
    let mut out = Vec::with_capacity(w.len());
    for &l in w {
        match &subs[generator_of(l)] {
            Some(s) if l > 0 => out.extend_from_slice(s),
            Some(s) => out.extend(inverse(s)),
            None => out.push(l),
        }
    }
    free_reduce(&out)
}

fn dedup(relators: Vec<Word>) -> Vec<Word> {
    let set: BTreeSet<Word> = relators
        .iter()
        .map(|r| canonical_relator(r))
        .filter(|r| !r.is_empty())
        .collect();
    let mut out: Vec<Word> = set.into_iter().collect();
    out.sort_by_key(|r| r.len());
    out
}

/// Rank over ℚ of integer rows, by fraction-free elimination.
fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            if m[i][col] == 0 {
                continue;
            }
            let (a, b) = (m[rank][col], m[i][col]);
            let g = gcd(a, b);
            let (fa, fb) = (b / g, a / g);
            for j in col..ncols {
                m[i][j] = m[i][j] * fb - m[rank][j] * fa;
            }
            let rg = m[i].iter().fold(0, |acc, &x| gcd(acc, x));
            if rg > 1 {
                for x in m[i].iter_mut() {
                    *x /= rg;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl SimplifiedPresentation {
    pub fn from_presentation(pres: &GroupPresentation, budget: TietzeBudget) -> Self {
        let ng = pres.num_generators();
        let mut subs: Vec<Option<Word>> = vec![None; ng];
        let mut relators = dedup(pres.relators.iter().map(|r| cyclic_reduce(r)).collect());
        loop {
            // shortest relator with a generator occurring exactly once
            let mut pick = None;
            'outer: for (ri, r) in relators.iter().enumerate() {
                for (pos, &l) in r.iter().enumerate() {
                    let g = generator_of(l);
                    if r.iter().filter(|&&x| generator_of(x) == g).count() == 1 {
                        pick = Some((ri, pos));
                        break 'outer;
                    }
                }
            }
            let Some((ri, pos)) = pick else { break };
            let r = relators[ri].clone();
            let l = r[pos];
            // r = A l B = 1, so l = A⁻¹ B⁻¹
            let value: Word = free_reduce(
                &inverse(&r[..pos])
                    .into_iter()
                    .chain(inverse(&r[pos + 1..]))
                    .collect::<Vec<_>>(),
            );
            let g = generator_of(l);
            let gword = if l > 0 { value } else { inverse(&value) };
            let mut local = vec![None; ng];
            local[g] = Some(gword.clone());
            let next: Vec<Word> = relators
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != ri)
                .map(|(_, w)| cyclic_reduce(&substitute(w, &local)))
                .collect();
            if next.iter().any(|w| w.len() > budget.max_relator_len) {
                break;
            }
            for s in subs.iter_mut().flatten() {
                *s = substitute(s, &local);
            }
            subs[g] = Some(gword);
            relators = dedup(next);
        }
        SimplifiedPresentation {
            substitution: subs,
            relators,
            budget,
        }
    }

    /// Generators that survived elimination.
    pub fn surviving(&self) -> Vec<usize> {
        (0..self.substitution.len())
            .filter(|&g| self.substitution[g].is_none())
            .collect()
    }

    /// No generators left: the group is trivial.
    pub fn is_trivial(&self) -> bool {
        self.surviving().is_empty()
    }

    /// No relators left: the group is free on the surviving generators.
    pub fn is_free(&self) -> bool {
        self.relators.is_empty()
    }

    /// Rewrite a word of the original presentation in surviving generators.
    pub fn rewrite(&self, w: &[Letter]) -> Word {
        substitute(w, &self.substitution)
    }

    /// Decide whether `w` represents the identity.
    pub fn decide(&self, w: &[Letter]) -> HomotopyVerdict {
        let w = cyclic_reduce(&self.rewrite(w));
        if w.is_empty() {
            return HomotopyVerdict::Homotopic;
        }
        if self.is_free() {
            return HomotopyVerdict::NotHomotopic;
        }
        let ng = self.substitution.len();
        let mut rows: Vec<Vec<i64>> = self.relators.iter().map(|r| abelianize(r, ng)).collect();
        let rank = rational_rank(&rows);
        rows.push(abelianize(&w, ng));
        if rational_rank(&rows) > rank {
            return HomotopyVerdict::NotHomotopic;
        }
        self.dehn_rewrite(w)
    }

    /// Replace any piece longer than half of a relator rotation by the
    /// shorter complement until the word vanishes or no rule applies.
    fn dehn_rewrite(&self, mut w: Word) -> HomotopyVerdict {
        let mut rules: Vec<Word> = Vec::new();
        for r in &self.relators {
            for cand in [r.clone(), inverse(r)] {
                for k in 0..cand.len() {
                    rules.push(cand[k..].iter().chain(&cand[..k]).copied().collect());
                }
            }
        }
        for _ in 0..self.budget.max_steps {
            if w.is_empty() {
                return HomotopyVerdict::Homotopic;
            }
            let mut progressed = false;
            'rules: for rot in &rules {
                let n = rot.len();
                let take = n / 2 + 1;
                let piece = &rot[..take];
                if w.len() < take {
                    continue;
                }
                for start in 0..=w.len() - take {
                    if &w[start..start + take] == piece {
                        // piece = (rest)⁻¹ in the group
                        let mut next = w[..start].to_vec();
                        next.extend(inverse(&rot[take..]));
                        next.extend_from_slice(&w[start + take..]);
                        w = cyclic_reduce(&next);
                        progressed = true;
                        break 'rules;
                    }
                }
            }
            if !progressed {
                return HomotopyVerdict::Undecided;
            }
        }
        if w.is_empty() {
            HomotopyVerdict::Homotopic
        } else {
            HomotopyVerdict::Undecided
        }
    }
}
