use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{Disjointness, Poset, PosetError, PosetMorphism};
use crate::report::{Check, Report};

/// A finite group given by its multiplication table; `table[g][h] = g·h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        FiniteGroup {
            table: vec![vec![0]],
            identity: 0,
        }
    }

    /// The cyclic group ℤ_n with element `k` standing for `k`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup { table, identity: 0 }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        (0..self.order())
            .find(|&h| self.table[g][h] == self.identity)
            .expect("validated group has inverses")
    }

    /// Closure, identity, inverses and associativity.
    pub fn validate(&self) -> Result<(), PosetError> {
        let n = self.order();
        let bad = |m: String| Err(PosetError::TableInconsistent(m));
        if n == 0 || self.identity >= n {
            return bad("missing identity".into());
        }
        if self.table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return bad("table is not closed".into());
        }
        for g in 0..n {
            if self.table[self.identity][g] != g || self.table[g][self.identity] != g {
                return bad(format!("{} is not an identity for {g}", self.identity));
            }
            if !(0..n).any(|h| self.table[g][h] == self.identity) {
                return bad(format!("{g} has no inverse"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]] {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A finite group acting on a poset; `perms[g][o]` is `g·o`.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub poset: Arc<Poset>,
    pub group: FiniteGroup,
    pub perms: Vec<Vec<usize>>,
}

impl GroupAction {
    pub fn trivial(poset: Arc<Poset>) -> Self {
        let id = (0..poset.len()).collect();
        GroupAction {
            poset,
            group: FiniteGroup::trivial(),
            perms: vec![id],
        }
    }

    /// The group generated by `gens` under composition, with its table.
    ///
    /// Element 0 is the identity; the rest are in breadth-first discovery
    /// order from the generators.
    pub fn generated_by(
        poset: Arc<Poset>,
        gens: &[PosetMorphism],
        max_order: usize,
    ) -> Result<Self, PosetError> {
        let n = poset.len();
        for g in gens {
            if g.map.len() != n || g.target.len() != n {
                return Err(PosetError::BadMapLength {
                    expected: n,
                    got: g.map.len(),
                });
            }
        }
        let id: Vec<usize> = (0..n).collect();
        let mut elems = vec![id.clone()];
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut frontier = 0;
        while frontier < elems.len() {
            let cur = elems[frontier].clone();
            frontier += 1;
            for g in gens {
                let next: Vec<usize> = cur.iter().map(|&x| g.map[x]).collect();
                if !seen.contains_key(&next) {
                    if elems.len() >= max_order {
                        return Err(PosetError::TableInconsistent(format!(
                            "group exceeds {max_order} elements"
                        )));
                    }
                    seen.insert(next.clone(), elems.len());
                    elems.push(next);
                }
            }
        }
        let m = elems.len();
        let mut table = vec![vec![0; m]; m];
        for (a, pa) in elems.iter().enumerate() {
            for (b, pb) in elems.iter().enumerate() {
                // (a·b)(x) = a(b(x))
                let prod: Vec<usize> = pb.iter().map(|&x| pa[x]).collect();
                table[a][b] = *seen.get(&prod).ok_or_else(|| {
                    PosetError::TableInconsistent("generated set not closed".into())
                })?;
            }
        }
        Ok(GroupAction {
            poset,
            group: FiniteGroup { table, identity: 0 },
            perms: elems,
        })
    }

    pub fn act(&self, g: usize, o: usize) -> usize {
        self.perms[g][o]
    }

    pub fn orbit(&self, o: usize) -> BTreeSet<usize> {
        self.perms.iter().map(|p| p[o]).collect()
    }

    /// Automorphism property for every element, compatibility with the
    /// table, and invariance of the disjointness relation when given.
    pub fn validate(&self, disjoint: Option<&Disjointness>) -> Report<PosetError> {
        let mut report = Report::new();
        if let Err(e) = self.group.validate() {
            report.push_check(Check::exact("group table", false));
            report.push_violation(e);
            return report;
        }
        if self.perms.len() != self.group.order() {
            report.push_check(Check::exact("group table", false));
            report.push_violation(PosetError::TableInconsistent(format!(
                "{} permutations for a group of order {}",
                self.perms.len(),
                self.group.order()
            )));
            return report;
        }
        report.push_check(Check::exact("group table", true));
        let p = &self.poset;
        let n = p.len();
        let mut automorphic = true;
        for (g, perm) in self.perms.iter().enumerate() {
            let image: BTreeSet<usize> = perm.iter().copied().collect();
            if perm.len() != n || image.len() != n || image.iter().any(|&x| x >= n) {
                automorphic = false;
                report.push_violation(PosetError::NotAutomorphism {
                    element: g,
                    detail: "not a bijection".into(),
                });
                continue;
            }
            // a bijection mapping covers onto covers is an order automorphism
            let mapped: BTreeSet<(usize, usize)> =
                p.covers().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
            let covers: BTreeSet<(usize, usize)> = p.covers().iter().copied().collect();
            if mapped != covers {
                automorphic = false;
                let (a, b) = p
                    .covers()
                    .iter()
                    .copied()
                    .find(|&(a, b)| !covers.contains(&(perm[a], perm[b])))
                    .unwrap_or((0, 0));
                report.push_violation(PosetError::NotAutomorphism {
                    element: g,
                    detail: format!(
                        "cover ({}, {}) is not mapped to a cover",
                        p.label(a),
                        p.label(b)
                    ),
                });
            }
        }
        report.push_check(Check::exact("acts by automorphisms", automorphic));
        let mut hom = true;
        for g in 0..self.group.order() {
            for h in 0..self.group.order() {
                let gh = self.group.mul(g, h);
                if (0..n).any(|o| self.perms[gh][o] != self.perms[g][self.perms[h][o]]) {
                    hom = false;
                    report.push_violation(PosetError::TableInconsistent(format!(
                        "action of {gh} differs from action of {g} after {h}"
                    )));
                }
            }
        }
        report.push_check(Check::exact("action respects table", hom));
        if let Some(d) = disjoint {
            let mut inv = true;
            for g in 0..self.group.order() {
                for a in 0..n {
                    for b in 0..n {
                        if d.is_disjoint(a, b)
                            != d.is_disjoint(self.perms[g][a], self.perms[g][b])
                        {
                            inv = false;
                        }
                    }
                }
                if !inv {
                    report.push_violation(PosetError::NotAutomorphism {
                        element: g,
                        detail: "disjointness not preserved".into(),
                    });
                    break;
                }
            }
            report.push_check(Check::exact("disjointness invariant", inv));
        }
        report
    }
}
