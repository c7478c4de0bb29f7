//! Smith normal form over ℤ, with a sparse unit-pivot pass first.
//!
//! Relator matrices coming from nerve triangles are large but extremely
//! sparse with ±1 entries almost everywhere; eliminating unit pivots first
//! leaves a tiny dense remainder.

use std::collections::{BTreeMap, BTreeSet};

/// Nonzero invariant factors (all positive, each dividing the next) of the
/// integer matrix whose rows are given sparsely as `(column, value)` lists.
pub fn invariant_factors(rows: &[Vec<(usize, i64)>], ncols: usize) -> Vec<i64> {
    let mut rows: Vec<BTreeMap<usize, i128>> = rows
        .iter()
        .map(|r| {
            let mut m = BTreeMap::new();
            for &(c, v) in r {
                assert!(c < ncols, "column {c} out of range");
                *m.entry(c).or_insert(0i128) += v as i128;
            }
            m.retain(|_, v| *v != 0);
            m
        })
        .filter(|m| !m.is_empty())
        .collect();
    let mut alive = vec![true; rows.len()];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &c in r.keys() {
            col_rows[c].insert(i);
        }
    }
    let mut units = 0usize;
    loop {
        // pick the unit pivot with the smallest column (Markowitz-lite)
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            for (&c, &v) in r {
                if v.abs() == 1 {
                    let cost = (col_rows[c].len() - 1) * (r.len() - 1);
                    if best.is_none_or(|(_, _, b)| cost < b) {
                        best = Some((i, c, cost));
                    }
                }
            }
            if best.is_some_and(|(_, _, b)| b == 0) {
                break;
            }
        }
        let Some((pi, pc, _)) = best else { break };
        let pivot_row = rows[pi].clone();
        let pv = pivot_row[&pc];
        let others: Vec<usize> = col_rows[pc].iter().copied().filter(|&i| i != pi).collect();
        for i in others {
            let factor = rows[i][&pc] * pv; // pv = ±1, so v/pv = v*pv
            for (&c, &v) in &pivot_row {
                let e = rows[i].entry(c).or_insert(0);
                *e -= factor * v;
                if *e == 0 {
                    rows[i].remove(&c);
                    col_rows[c].remove(&i);
                } else {
                    col_rows[c].insert(i);
                }
            }
            if rows[i].is_empty() {
                alive[i] = false;
            }
        }
        for &c in pivot_row.keys() {
            col_rows[c].remove(&pi);
        }
        alive[pi] = false;
        rows[pi].clear();
        units += 1;
    }
    let rest: Vec<&BTreeMap<usize, i128>> = rows
        .iter()
        .zip(&alive)
        .filter(|(r, &a)| a && !r.is_empty())
        .map(|(r, _)| r)
        .collect();
    let cols: Vec<usize> = rest
        .iter()
        .flat_map(|r| r.keys().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut dense: Vec<Vec<i128>> = rest
        .iter()
        .map(|r| {
            let mut row = vec![0; cols.len()];
            for (&c, &v) in r.iter() {
                row[col_pos[&c]] = v;
            }
            row
        })
        .collect();
    let mut factors = vec![1i64; units];
    factors.extend(dense_invariant_factors(&mut dense).into_iter().map(|d| {
        i64::try_from(d).expect("invariant factor overflows i64")
    }));
    factors
}

/// Invariant factors of a dense matrix, destroying it.
pub fn dense_invariant_factors(m: &mut [Vec<i128>]) -> Vec<i128> {
    let nr = m.len();
    let nc = if nr == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero |entry| in the trailing block
        let mut piv: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(t) {
            for (j, &v) in row.iter().enumerate().skip(t) {
                if v != 0 && piv.is_none_or(|(pi, pj)| v.abs() < m[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut done = true;
            for i in t + 1..nr {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..nc {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    done = false;
                }
            }
            for j in t + 1..nc {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    done = false;
                }
            }
            if done {
                // divisibility of the trailing block
                let bad = (t + 1..nr)
                    .flat_map(|i| (t + 1..nc).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..nc {
                            m[t][j] += m[i][j];
                        }
                        continue;
                    }
                }
            }
            // move a smaller remainder into the pivot
            let mut piv: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if (i == t || j == t) && m[i][j] != 0 {
                        if piv.is_none_or(|(a, b)| m[i][j].abs() < m[a][b].abs()) {
                            piv = Some((i, j));
                        }
                    }
                }
            }
            let (a, b) = piv.expect("pivot row or column is nonzero");
            m.swap(t, a);
            for row in m.iter_mut() {
                row.swap(t, b);
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}
