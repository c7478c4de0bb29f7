//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circnet_core::algebra::{
    average_state_group, invariant_state, AlgElement, CMat, FinDimAlgebra, InvariantOptions,
    StarHom, State,
};
use circnet_core::cylinder::{
    build_cylinder_rep, cylinder_index, cylinder_poset, embed_into_pn, faithful_grid_rep,
    iso_pn_cn, GridPoset, IntervalPoset, MarkedCircle,
};
use circnet_core::gen::{
    planted_cylinder_bundle, random_cylinder_net, random_cylinder_system, random_grid_net,
    GenOptions,
};
use circnet_core::homotopy::{EdgePath, GroupPresentation, HomotopyVerdict, TietzeBudget};
use circnet_core::limits::{
    injectivity_transfer_check, limit_net, limit_norm_profile, NetSystem,
};
use circnet_core::net::{
    bundle_holonomy, probe_distance, state_from_holonomy, walk_transport, Net, NetMorphism,
};
use circnet_core::poset::{Poset, PosetMorphism};
use circnet_core::Exec;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- oracles

/// Elementary divisors of an integer matrix given by sparse rows: unit
/// pivots are eliminated sparsely, the rest goes through a dense Smith form.
fn elementary_divisors(mut rows: Vec<BTreeMap<usize, i64>>) -> Vec<i64> {
    let mut col_rows: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (r, row) in rows.iter().enumerate() {
        for &c in row.keys() {
            col_rows.entry(c).or_default().insert(r);
        }
    }
    let mut alive: BTreeSet<usize> = (0..rows.len()).filter(|&r| !rows[r].is_empty()).collect();
    let mut divisors = Vec::new();
    loop {
        let pivot = alive
            .iter()
            .filter_map(|&r| {
                rows[r]
                    .iter()
                    .find(|(_, v)| v.abs() == 1)
                    .map(|(&c, &v)| (rows[r].len(), r, c, v))
            })
            .min();
        let Some((_, r, c, v)) = pivot else { break };
        let pivot_row = rows[r].clone();
        let others: Vec<usize> = col_rows[&c].iter().copied().filter(|&x| x != r).collect();
        for r2 in others {
            let f = rows[r2][&c] * v;
            for (&cc, &pv) in &pivot_row {
                let e = rows[r2].entry(cc).or_insert(0);
                *e -= f * pv;
                if *e == 0 {
                    rows[r2].remove(&cc);
                    col_rows.get_mut(&cc).unwrap().remove(&r2);
                } else {
                    col_rows.entry(cc).or_default().insert(r2);
                }
            }
            if rows[r2].is_empty() {
                alive.remove(&r2);
            }
        }
        for &cc in pivot_row.keys() {
            col_rows.get_mut(&cc).unwrap().remove(&r);
        }
        rows[r].clear();
        alive.remove(&r);
        divisors.push(1);
    }
    let rest: Vec<usize> = alive.into_iter().collect();
    if rest.is_empty() {
        return divisors;
    }
    let cols: Vec<usize> = rest
        .iter()
        .flat_map(|&r| rows[r].keys().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let cpos: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut m = vec![vec![0i128; cols.len()]; rest.len()];
    for (i, &r) in rest.iter().enumerate() {
        for (&c, &v) in &rows[r] {
            m[i][cpos[&c]] = v as i128;
        }
    }
    divisors.extend(dense_smith(m).into_iter().map(|d| d as i64));
    divisors
}

fn dense_smith(mut m: Vec<Vec<i128>>) -> Vec<i128> {
    let (nr, nc) = (m.len(), m.first().map_or(0, Vec::len));
    let mut out = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        let best = (t..nr)
            .flat_map(|i| (t..nc).map(move |j| (i, j)))
            .filter(|&(i, j)| m[i][j] != 0)
            .min_by_key(|&(i, j)| m[i][j].abs());
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = false;
        while !clean {
            clean = true;
            for i in t + 1..nr {
                let q = m[i][t] / m[t][t];
                if q != 0 {
                    for j in t..nc {
                        m[i][j] -= q * m[t][j];
                    }
                }
                if m[i][t] != 0 {
                    clean = false;
                    m.swap(t, i);
                }
            }
            for j in t + 1..nc {
                let q = m[t][j] / m[t][t];
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if m[t][j] != 0 {
                    clean = false;
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                }
            }
            if clean {
                let bad = (t + 1..nr)
                    .flat_map(|i| (t + 1..nc).map(move |j| (i, j)))
                    .find(|&(i, j)| m[i][j] % m[t][t] != 0);
                if let Some((i, _)) = bad {
                    for j in t..nc {
                        let v = m[i][j];
                        m[t][j] += v;
                    }
                    clean = false;
                }
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

/// `(free rank, torsion)` of H₁ of the order complex, from boundary matrices.
fn h1_oracle(p: &Poset) -> (usize, Vec<i64>) {
    let n = p.len();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| x != y && p.leq_idx(x, y))
        .collect();
    let eidx: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let d1: Vec<BTreeMap<usize, i64>> = edges
        .iter()
        .map(|&(x, y)| [(x, -1), (y, 1)].into_iter().collect())
        .collect();
    let mut d2 = Vec::new();
    for &(x, y) in &edges {
        for z in 0..n {
            if z != y && p.leq_idx(y, z) {
                d2.push(
                    [(eidx[&(y, z)], 1), (eidx[&(x, z)], -1), (eidx[&(x, y)], 1)]
                        .into_iter()
                        .collect(),
                );
            }
        }
    }
    let r1 = elementary_divisors(d1).len();
    let div2 = elementary_divisors(d2);
    let free = edges.len() - r1 - div2.len();
    (free, div2.into_iter().filter(|&d| d > 1).collect())
}

/// Clockwise offset of `x` from `from`, in `[0, 1)`.
fn offset(from: Rational64, x: Rational64) -> Rational64 {
    let d = x - from;
    d - d.floor()
}

/// Length of the open arc `(s, e)`; `s == e` means the circle minus a point.
fn arc_len(s: Rational64, e: Rational64) -> Rational64 {
    if s == e {
        Rational64::from_integer(1)
    } else {
        offset(s, e)
    }
}

fn in_open(s: Rational64, e: Rational64, x: Rational64) -> bool {
    let d = offset(s, x);
    d > Rational64::from_integer(0) && d < arc_len(s, e)
}

fn in_closed(s: Rational64, e: Rational64, x: Rational64) -> bool {
    offset(s, x) <= arc_len(s, e)
}

/// Every arc `(x_i, x_k)` whose open interior holds `cl(o)` and whose
/// interior markers all lie in `cl(o)`.
fn rf_by_enumeration(markers: &[Rational64], s: Rational64, e: Rational64) -> Vec<(usize, usize)> {
    let n = markers.len();
    let mut hits = Vec::new();
    for i in 1..=n {
        for k in 1..=n {
            let (a, b) = (markers[i - 1], markers[k - 1]);
            let inside = in_open(a, b, s)
                && in_open(a, b, e)
                && offset(a, s) < offset(a, e)
                && s != e;
            let covered = markers
                .iter()
                .filter(|&&m| in_open(a, b, m))
                .all(|&m| in_closed(s, e, m));
            if inside && covered {
                hits.push((i, k));
            }
        }
    }
    hits
}

/// `ℓ_{i,k}` by counting marker gaps inside `(x_i, x_k)`.
fn length_by_gaps(markers: &[Rational64], i: usize, k: usize) -> usize {
    let n = markers.len();
    let (a, b) = (markers[i - 1], markers[k - 1]);
    let total = arc_len(a, b);
    (1..=n)
        .filter(|&j| {
            let (s, e) = (markers[j - 1], markers[j % n]);
            let start = offset(a, s);
            let end = if offset(a, e) == Rational64::from_integer(0) {
                Rational64::from_integer(1)
            } else {
                offset(a, e)
            };
            start < end && end <= total
        })
        .count()
}

fn all_cover_paths(p: &Poset, from: usize, to: usize) -> Vec<Vec<usize>> {
    if from == to {
        return vec![vec![to]];
    }
    let mut out = Vec::new();
    for &b in p.upper_covers(from) {
        if p.leq_idx(b, to) {
            for mut tail in all_cover_paths(p, b, to) {
                tail.insert(0, from);
                out.push(tail);
            }
        }
    }
    out
}

/// Columns of consecutive elements of a path in `C_N`, listing every step
/// between distinct columns.
fn transitions_of(n: usize, path: &[usize]) -> Vec<(usize, usize)> {
    path.windows(2)
        .map(|w| (w[0] / n + 1, w[1] / n + 1))
        .filter(|(a, b)| a != b)
        .collect()
}

fn shortest_cover_path(p: &Poset, from: usize, to: usize) -> Vec<usize> {
    let mut prev = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in p.upper_covers(x) {
            if p.leq_idx(y, to) && !prev.contains_key(&y) {
                prev.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[path.last().unwrap()]);
    }
    path.reverse();
    path
}

/// The conjugating unitary of the transport of a bundle of inner
/// automorphisms of `M_d` along a walk, multiplied out from cover data.
fn loop_unitary(net: &Net, walk: &[usize]) -> CMat {
    let p = net.poset();
    let d = net.fibre(walk[0]).block(0);
    let mut m = CMat::identity(d, d);
    for w in walk.windows(2) {
        let (x, y) = (w[0], w[1]);
        let (lo, hi, up) = if p.leq_idx(x, y) { (x, y, true) } else { (y, x, false) };
        let mut step = CMat::identity(d, d);
        for c in shortest_cover_path(p, lo, hi).windows(2) {
            step = &net.inclusion(c[0], c[1]).unwrap().conj()[0] * step;
        }
        m = if up { step * m } else { step.adjoint() * m };
    }
    m
}

fn eigenvalues(u: &CMat) -> Vec<Complex64> {
    u.clone().schur().eigenvalues().expect("complex Schur form").iter().copied().collect()
}

/// Whether `v` is unitarily conjugate to `e^{iθ} u` for some θ.
fn conjugate_up_to_phase(v: &CMat, u: &CMat, tol: f64) -> bool {
    let (ev, eu) = (eigenvalues(v), eigenvalues(u));
    ev.iter().any(|&l| {
        let phase = eu[0] / l;
        let mut used = vec![false; eu.len()];
        ev.iter().all(|&x| {
            let y = x * phase;
            match (0..eu.len()).find(|&j| !used[j] && (eu[j] - y).norm() < tol) {
                Some(j) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    })
}

fn trace_norm(m: &CMat) -> f64 {
    m.clone().symmetric_eigenvalues().iter().map(|x| x.abs()).sum()
}

/// `‖ω∘Ad(g) − ω‖₁` with `ω∘Ad(g)` having densities `g* ρ g`.
fn inner_invariance_residual(omega: &State, g: &AlgElement) -> f64 {
    omega
        .densities()
        .iter()
        .zip(&g.blocks)
        .map(|(rho, u)| trace_norm(&(u.adjoint() * rho * u - rho)))
        .sum()
}

fn random_small_algebra<R: Rng>(rng: &mut R, max_dim: usize) -> FinDimAlgebra {
    loop {
        let k = rng.random_range(1..=3);
        let blocks: Vec<usize> = (0..k).map(|_| rng.random_range(1..=4)).collect();
        if blocks.iter().map(|n| n * n).sum::<usize>() <= max_dim {
            return FinDimAlgebra::new(blocks).unwrap();
        }
    }
}

// ------------------------------------------------------------- criteria

fn c1() -> Outcome {
    for n in 2..=12 {
        let p = cylinder_poset(n).unwrap();
        if p.len() != n * n || p.maximal().len() != n || p.minimal().len() != n {
            return outcome(false, format!("N={n}: wrong element or extremal counts"));
        }
        for i in 1..=n {
            for l in 1..n {
                let left = if i == 1 { n } else { i - 1 };
                let want: BTreeSet<usize> =
                    [cylinder_index(n, i, l + 1), cylinder_index(n, left, l + 1)].into();
                let got: BTreeSet<usize> =
                    p.upper_covers(cylinder_index(n, i, l)).iter().copied().collect();
                if got != want {
                    return outcome(false, format!("N={n}: covers of ({i},{l})"));
                }
            }
        }
    }
    outcome(true, "N=2..12: N² elements, N maximal, N minimal, two covers below the top row")
}

fn c2() -> Outcome {
    for n in 4..=8 {
        let p = Arc::new(cylinder_poset(n).unwrap());
        let pres = GroupPresentation::new(p.clone(), 0).unwrap();
        let h1 = pres.h1_invariants();
        let (free, torsion) = h1_oracle(&p);
        if h1.free_rank != 1 || !h1.torsion.is_empty() || free != 1 || !torsion.is_empty() {
            return outcome(
                false,
                format!("N={n}: library {h1:?}, oracle free={free} torsion={torsion:?}"),
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for t in 0..25 {
        let k = rng.random_range(3..=9);
        let mut rel = vec![vec![false; k + 1]; k + 1];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
            row[k] = true;
        }
        for i in 0..k {
            for j in i + 1..k {
                rel[i][j] = rng.random_bool(0.35);
            }
        }
        for m in 0..=k {
            for i in 0..=k {
                for j in 0..=k {
                    if rel[i][m] && rel[m][j] {
                        rel[i][j] = true;
                    }
                }
            }
        }
        let labels = (0..=k).map(|i| format!("v{i}")).collect();
        let p = Arc::new(Poset::from_order(labels, |a, b| rel[a][b]).unwrap());
        let pres = GroupPresentation::new(p.clone(), rng.random_range(0..=k)).unwrap();
        let (free, torsion) = h1_oracle(&p);
        let trivial = pres.h1_invariants().is_trivial()
            && pres.simplify(TietzeBudget::default()).is_trivial();
        if !trivial || free != 0 || !torsion.is_empty() {
            return outcome(false, format!("directed poset #{t} not simply connected"));
        }
    }
    outcome(true, "H1(C_N) = Z for N=4..8, matching the boundary-matrix Smith form; 25 directed posets trivial")
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 3..=10 {
        let mut marks: BTreeSet<Rational64> = BTreeSet::new();
        while marks.len() < n {
            marks.insert(Rational64::new(rng.random_range(0..997), 997));
        }
        let markers: Vec<Rational64> = marks.into_iter().collect();
        let pn = IntervalPoset::new(MarkedCircle::new(markers.clone()).unwrap()).unwrap();
        let cn = Arc::new(cylinder_poset(n).unwrap());
        let (fwd, inv) = iso_pn_cn(&pn, &cn).unwrap();
        let m = pn.poset.len();
        let round = (0..m).all(|x| inv.apply(fwd.apply(x)) == x)
            && (0..cn.len()).all(|y| fwd.apply(inv.apply(y)) == y);
        let order = (0..m).all(|x| {
            (0..m).all(|y| pn.poset.leq_idx(x, y) == cn.leq_idx(fwd.apply(x), fwd.apply(y)))
        });
        let lengths = (1..=n).all(|i| {
            (1..=n).all(|k| {
                let want = if k > i { k - i } else { k + n - i };
                pn.length(i, k) == want && length_by_gaps(&markers, i, k) == want
            })
        });
        if !(round && order && lengths) {
            return outcome(
                false,
                format!("N={n}: round trip {round}, order {order}, lengths {lengths}"),
            );
        }
    }
    outcome(true, "N=3..10 random markers: order isomorphism, exact round trips, all lengths")
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for t in 0..24 {
        let n = 2 + t % 4;
        let opts = GenOptions {
            scalar_bottom: t % 3 == 0,
            ..GenOptions::default()
        };
        let net = Arc::new(random_cylinder_net(n, &opts, &mut rng).unwrap());
        let rep = match build_cylinder_rep(net) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("net #{t}: {e}")),
        };
        let r = rep.validate(8);
        worst = worst.max(r.max_residual());
        if !r.passed() || !rep.is_faithful() {
            return outcome(false, format!("net #{t}: {:?}", r.violations.first()));
        }
    }
    outcome(true, format!("24 random nets over C_2..C_5, probe depth 8, max residual {worst:.2e}, all faithful"))
}

fn c5() -> Outcome {
    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = Arc::new(random_cylinder_net(n, &GenOptions::default(), &mut rng).unwrap());
    let rep = build_cylinder_rep(net.clone()).unwrap();
    let p = net.poset().clone();
    let pairs: Vec<(usize, usize)> = p.strict_pairs();
    let mut worst: f64 = 0.0;
    let mut paths_seen = 0;
    for _ in 0..50 {
        let (o, a) = pairs[rng.random_range(0..pairs.len())];
        let paths = all_cover_paths(&p, o, a);
        let (i1, ik) = (o / n + 1, a / n + 1);
        let steps = (i1 + n - ik) % n;
        let want: Vec<(usize, usize)> = (0..steps)
            .map(|s| {
                let c = (i1 + n - 1 - s) % n + 1;
                (c, if c == 1 { n } else { c - 1 })
            })
            .collect();
        let first = rep.compose_path(&paths[0]).unwrap();
        for path in &paths {
            paths_seen += 1;
            if transitions_of(n, path) != want {
                return outcome(false, format!("transitions of {path:?} differ from {want:?}"));
            }
            let v = rep.compose_path(path).unwrap();
            worst = worst.max(probe_distance(&v, &first, rep.pi(o), 8));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("50 pairs in C_5, {paths_seen} cover paths, max disagreement {worst:.2e}, transitions exact"),
    )
}

fn quarter_grid() -> GridPoset {
    let c = MarkedCircle::uniform(4).unwrap().with_uniform_grid(16).unwrap();
    GridPoset::new(c, true).unwrap()
}

fn c6() -> Outcome {
    let g = quarter_grid();
    let markers: Vec<Rational64> = (0..4).map(|i| Rational64::new(i, 4)).collect();
    let pn = IntervalPoset::new(g.circle.clone()).unwrap();
    let rf = match g.quotient_map() {
        Ok(rf) => rf,
        Err(e) => return outcome(false, e.to_string()),
    };
    for (o, a) in g.arcs.iter().enumerate() {
        let hits = rf_by_enumeration(&markers, a.start, a.end);
        if hits != vec![rf[o]] {
            return outcome(false, format!("arc {a}: enumeration {hits:?}, library {:?}", rf[o]));
        }
    }
    let map: Vec<usize> = rf.iter().map(|&(i, k)| pn.index(i, k)).collect();
    let order = g
        .poset
        .strict_pairs()
        .into_iter()
        .all(|(x, y)| pn.poset.leq_idx(map[x], map[y]));
    let image: BTreeSet<usize> = map.iter().copied().collect();
    let onto = image.len() == pn.poset.len();
    let morphism = PosetMorphism::new(g.poset.clone(), pn.poset.clone(), map).is_ok();
    outcome(
        order && onto && morphism,
        format!("{} grid arcs in I_4: rf unique and equal to the enumeration, order preserving {order}, onto {onto}", g.arcs.len()),
    )
}

fn c7() -> Outcome {
    let g = quarter_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = GenOptions {
        stall: 0.7,
        max_block: 2,
        ..GenOptions::default()
    };
    let net = Arc::new(random_grid_net(&g, &opts, &mut rng).unwrap());
    let e = match embed_into_pn(&g, net.clone()) {
        Ok(e) => e,
        Err(err) => return outcome(false, err.to_string()),
    };
    let m = e.morphism.validate();
    let pn_ok = e.net.validate().passed();
    let rep = match faithful_grid_rep(&g, net.clone()) {
        Ok(r) => r,
        Err(err) => return outcome(false, err.to_string()),
    };
    let faithful = (0..net.poset().len()).all(|o| rep.pi(o).is_faithful());
    let embed_faithful = e.morphism.is_faithful();
    let pass = m.passed() && m.max_residual() <= 1e-12 && pn_ok && faithful && embed_faithful;
    outcome(
        pass,
        format!(
            "grid net on {} arcs: morphism residual {:.2e}, embedding faithful {embed_faithful}, pullback faithful on every fibre {faithful}",
            net.poset().len(),
            m.max_residual()
        ),
    )
}

/// Replace one comparable step `x → z` by `x → y → z` through an element
/// strictly between, or insert a backtrack when there is none.
fn deform(p: &Poset, walk: &[usize]) -> Vec<usize> {
    for k in 0..walk.len() - 1 {
        let (x, z) = (walk[k], walk[k + 1]);
        let (lo, hi) = if p.leq_idx(x, z) { (x, z) } else { (z, x) };
        if let Some(y) = (0..p.len()).find(|&y| p.lt_idx(lo, y) && p.lt_idx(y, hi)) {
            let mut out = walk[..=k].to_vec();
            out.push(y);
            out.extend_from_slice(&walk[k + 1..]);
            return out;
        }
    }
    let x = walk[0];
    let y = p.upper_covers(x).first().or(p.lower_covers(x).first()).copied().unwrap();
    let mut out = vec![x, y];
    out.extend_from_slice(walk);
    out
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut oracle_worst: f64 = 0.0;
    let mut homotopy_worst: f64 = 0.0;
    let mut relator_worst: f64 = 0.0;
    for t in 0..6 {
        let n = 3 + t % 3;
        let d = 2 + t % 2;
        let a = FinDimAlgebra::matrix(d);
        let u = a.random_unitary(&mut rng);
        let column = rng.random_range(1..=n);
        let net = Arc::new(planted_cylinder_bundle(n, &a, column, &u).unwrap());
        let base = rng.random_range(0..n * n);
        let pres = GroupPresentation::new(net.poset().clone(), base).unwrap();
        let hol = match bundle_holonomy(&net, &pres) {
            Ok(h) => h,
            Err(e) => return outcome(false, e.to_string()),
        };
        relator_worst = relator_worst.max(hol.relator_residual);
        let mut found = false;
        for (gi, h) in hol.generators.iter().enumerate() {
            let walk = pres.generator_loop(gi);
            let w = loop_unitary(&net, &walk);
            let oracle = StarHom::inner(&a, &AlgElement { blocks: vec![w.clone()] }).unwrap();
            oracle_worst = oracle_worst.max(h.distance(&oracle));
            // a loop around the cylinder picks up u or u* depending on orientation
            let v = &h.conj()[0];
            found |= conjugate_up_to_phase(v, &u.blocks[0], 1e-9)
                || conjugate_up_to_phase(v, &u.blocks[0].adjoint(), 1e-9);
            let other = deform(net.poset(), &walk);
            let p1 = EdgePath::from_chain(net.poset(), &walk).unwrap();
            let p2 = EdgePath::from_chain(net.poset(), &other).unwrap();
            if pres.homotopy_reduce(&p1, &p2, TietzeBudget::default()).unwrap()
                != HomotopyVerdict::Homotopic
            {
                return outcome(false, "deformed loop not certified homotopic");
            }
            let table = net.inclusion_table().unwrap();
            let t1 = walk_transport(&net, &table, &walk).unwrap();
            let t2 = walk_transport(&net, &table, &other).unwrap();
            homotopy_worst = homotopy_worst.max(t1.distance(&t2));
        }
        if !found {
            return outcome(false, format!("bundle #{t}: no generator conjugate to the plant"));
        }
    }
    let pass = oracle_worst <= 1e-12 && homotopy_worst <= 1e-12 && relator_worst <= 1e-12;
    outcome(
        pass,
        format!("6 planted bundles: plant recovered up to conjugacy and phase; loop oracle {oracle_worst:.2e}, relators {relator_worst:.2e}, homotopic loops {homotopy_worst:.2e}"),
    )
}

fn c9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for t in 0..20 {
        let a = random_small_algebra(&mut rng, 16);
        let g = a.random_unitary(&mut rng);
        let alpha = StarHom::inner(&a, &g).unwrap();
        let omega0 = State::random(&a, &mut rng);
        let omega = match invariant_state(&alpha, &omega0, InvariantOptions::default()) {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("automorphism #{t}: {e}")),
        };
        worst = worst.max(inner_invariance_residual(&omega, &g));
    }
    // the Pauli automorphisms of M_2 and cyclic block shifts of M_2^{⊕3}
    let m2 = FinDimAlgebra::matrix(2);
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let paulis = [
        [c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)],
        [c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)],
        [c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)],
        [c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)],
    ];
    let pauli_group: Vec<StarHom> = paulis
        .iter()
        .map(|e| {
            let m = DMatrix::from_row_slice(2, 2, e);
            StarHom::inner(&m2, &AlgElement { blocks: vec![m] }).unwrap()
        })
        .collect();
    let m222 = FinDimAlgebra::new(vec![2, 2, 2]).unwrap();
    let shifts: Vec<StarHom> = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
        .iter()
        .map(|p| StarHom::block_permutation(&m222, p).unwrap())
        .collect();
    let mut group_worst: f64 = 0.0;
    for (group, alg) in [(&pauli_group, &m2), (&shifts, &m222)] {
        let avg = average_state_group(group, &State::random(alg, &mut rng)).unwrap();
        for g in group {
            group_worst = group_worst.max(avg.pullback(g).unwrap().distance(&avg));
        }
    }
    let mut states_ok = true;
    for t in 0..6 {
        let n = 3 + t % 3;
        let a = FinDimAlgebra::matrix(2 + t % 2);
        let u = a.random_unitary(&mut rng);
        let net = Arc::new(planted_cylinder_bundle(n, &a, 1 + t % n, &u).unwrap());
        let pres = GroupPresentation::new(net.poset().clone(), 0).unwrap();
        let plant = StarHom::inner(&a, &u).unwrap();
        let fixed = invariant_state(&plant, &State::random(&a, &mut rng), InvariantOptions {
            tol: 1e-10,
            ..InvariantOptions::default()
        })
        .unwrap();
        for omega in [State::trace(&a), fixed] {
            match state_from_holonomy(net.clone(), &pres, &omega) {
                Ok(s) => states_ok &= s.validate().passed(),
                Err(_) => states_ok = false,
            }
        }
    }
    let pass = worst <= 1e-8 && group_worst <= 1e-12 && states_ok;
    outcome(
        pass,
        format!("20 inner automorphisms: max ‖ω∘α−ω‖₁ {worst:.2e}; group averages {group_worst:.2e}; holonomy net states valid {states_ok}"),
    )
}

/// `ℂ ⊕ ℂ → ℂ` killing the second summand, at a single point.
fn collapsing_system() -> NetSystem {
    let pt = Arc::new(Poset::new(vec!["o".to_string()], &[] as &[(String, String)]).unwrap());
    let index = Arc::new(Poset::new(vec!["1".into(), "2".into()], &[("1", "2")]).unwrap());
    let c2 = FinDimAlgebra::commutative(2);
    let c1 = FinDimAlgebra::matrix(1);
    let n1 = Arc::new(Net::constant(pt.clone(), &c2));
    let n2 = Arc::new(Net::constant(pt.clone(), &c1));
    let h = StarHom::standard(c2, c1, vec![vec![1, 0]]).unwrap();
    let m = NetMorphism::new(n1.clone(), n2.clone(), PosetMorphism::identity(pt), vec![h]).unwrap();
    NetSystem::new(index, vec![n1, n2], [((0, 1), m)].into()).unwrap()
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut stage_worst: f64 = 0.0;
    let mut iso_worst: f64 = 0.0;
    let mut profiles = 0;
    for t in 0..6 {
        let n = 2 + t % 3;
        let stages = 2 + t % 3;
        let sys = random_cylinder_system(n, stages, &GenOptions::default(), &mut rng).unwrap();
        if !sys.validate().passed() || !sys.is_monomorphic() {
            return outcome(false, format!("system #{t} invalid"));
        }
        let lim = limit_net(&sys).unwrap();
        let r = lim.check(&sys, 1e-12);
        stage_worst = stage_worst.max(r.max_residual());
        if !r.passed() {
            return outcome(false, format!("system #{t}: {:?}", r.violations.first()));
        }
        for _ in 0..10 {
            let a = rng.random_range(0..stages);
            let o = rng.random_range(0..n * n);
            let x = sys.nets[a].fibre(o).random_element(&mut rng);
            let p = limit_norm_profile(&sys, a, o, &x).unwrap();
            profiles += 1;
            if !p.nonincreasing {
                return outcome(false, format!("system #{t}: increasing profile"));
            }
        }
        let witnesses: Vec<_> = sys
            .nets
            .iter()
            .map(|net| build_cylinder_rep(net.clone()).unwrap())
            .collect();
        let r = injectivity_transfer_check(&sys, &witnesses, 100, 1e-12, &mut rng, Exec::default());
        iso_worst = iso_worst.max(r.max_residual());
        if !r.passed() {
            return outcome(false, format!("system #{t}: {:?}", r.violations.first()));
        }
    }
    let sys = collapsing_system();
    let mut collapsed = true;
    for _ in 0..10 {
        let x = sys.nets[0].fibre(0).random_element(&mut rng);
        let p = limit_norm_profile(&sys, 0, 0, &x).unwrap();
        profiles += 1;
        collapsed &= p.nonincreasing;
    }
    outcome(
        collapsed,
        format!("6 monomorphic systems of 2..4 stages: stage identities {stage_worst:.2e}, θ isometric on 100 samples each ({iso_worst:.2e}); {profiles} profiles nonincreasing"),
    )
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Outcome, Duration); 10] = [
        (c1, Duration::from_secs(1)),
        (c2, Duration::from_secs(10)),
        (c3, Duration::from_secs(1)),
        (c4, Duration::from_secs(60)),
        (c5, Duration::from_secs(10)),
        (c6, Duration::from_secs(1)),
        (c7, Duration::from_secs(60)),
        (c8, Duration::from_secs(60)),
        (c9, Duration::from_secs(60)),
        (c10, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (k, (run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2}: {}  {} [{:.2}s, budget {}s]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
