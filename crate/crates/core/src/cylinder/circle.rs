//! Exact arcs on the circle, marked circles, the interval poset `P_N` and
//! grid interval posets.

use std::fmt;
use std::sync::Arc as Shared;

use num_rational::Rational64;
use num_traits::{One, Zero};

use super::{cylinder_label, modn, CylinderError};
use crate::poset::{Poset, PosetMorphism};

/// A point of the circle in turns, reduced into `[0, 1)`.
pub type Turn = Rational64;

pub fn reduce(x: Turn) -> Turn {
    let f = x - x.floor();
    if f < Turn::zero() {
        f + Turn::one()
    } else {
        f
    }
}

/// Clockwise distance from `a` to `b`, in `[0, 1)`.
pub fn gap(a: Turn, b: Turn) -> Turn {
    reduce(b - a)
}

/// The open arc from `start` clockwise to `end`; `start == end` is the
/// circle minus that point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub start: Turn,
    pub end: Turn,
}

impl Arc {
    pub fn new(start: Turn, end: Turn) -> Self {
        Arc {
            start: reduce(start),
            end: reduce(end),
        }
    }

    pub fn len(&self) -> Turn {
        if self.start == self.end {
            Turn::one()
        } else {
            gap(self.start, self.end)
        }
    }

    pub fn contains(&self, x: Turn) -> bool {
        let d = gap(self.start, x);
        d > Turn::zero() && d < self.len()
    }

    /// Whether `x` lies in the closure.
    pub fn closure_contains(&self, x: Turn) -> bool {
        gap(self.start, x) <= self.len()
    }

    pub fn is_subset(&self, other: &Arc) -> bool {
        gap(other.start, self.start) + self.len() <= other.len()
    }

    /// Whether the closure lies inside the open arc `other`.
    pub fn closure_inside(&self, other: &Arc) -> bool {
        let d = gap(other.start, self.start);
        d > Turn::zero() && d + self.len() < other.len()
    }
}

fn fmt_turn(x: Turn) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_turn(self.start), fmt_turn(self.end))
    }
}

/// Parse `a/b` or an integer into a turn.
pub fn parse_turn(s: &str) -> Result<Turn, CylinderError> {
    let s = s.trim();
    let bad = || CylinderError::BadNumber(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Turn::new(n, d))
        }
        None => {
            if let Ok(n) = s.parse::<i64>() {
                return Ok(Turn::from_integer(n));
            }
            // decimals such as 0.25 are read exactly
            let (int, frac) = s.split_once('.').ok_or_else(bad)?;
            let digits = frac.len() as u32;
            if digits > 15 {
                return Err(bad());
            }
            let scale = 10i64.pow(digits);
            let neg = int.trim_start().starts_with('-');
            let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
            let part: i64 = frac.parse().map_err(|_| bad())?;
            let num = whole.abs() * scale + part;
            Ok(Turn::new(if neg { -num } else { num }, scale))
        }
    }
}

/// Parse an arc written `(a,b)` or `a,b`.
pub fn parse_arc(s: &str) -> Result<Arc, CylinderError> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let (a, b) = t
        .split_once(',')
        .ok_or_else(|| CylinderError::BadNumber(s.to_string()))?;
    Ok(Arc::new(parse_turn(a)?, parse_turn(b)?))
}

/// `N` marker points in clockwise order, with an optional grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedCircle {
    markers: Vec<Turn>,
    grid: Option<Vec<Turn>>,
    was_sorted: bool,
}

impl MarkedCircle {
    /// Markers are reduced into `[0, 1)` and sorted; see
    /// [`was_sorted`](Self::was_sorted).
    pub fn new(markers: Vec<Turn>) -> Result<Self, CylinderError> {
        if markers.len() < 2 {
            return Err(CylinderError::NTooSmall(markers.len()));
        }
        let reduced: Vec<Turn> = markers.into_iter().map(reduce).collect();
        let mut sorted = reduced.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CylinderError::RepeatedMarker);
        }
        Ok(MarkedCircle {
            was_sorted: sorted == reduced,
            markers: sorted,
            grid: None,
        })
    }

    /// `N` equally spaced markers starting at 0.
    pub fn uniform(n: usize) -> Result<Self, CylinderError> {
        Self::new((0..n).map(|i| Turn::new(i as i64, n.max(1) as i64)).collect())
    }

    /// Attach a grid; it must contain every marker and at least two points
    /// strictly inside each gap between consecutive markers.
    pub fn with_grid(mut self, grid: Vec<Turn>) -> Result<Self, CylinderError> {
        let mut g: Vec<Turn> = grid.into_iter().map(reduce).collect();
        g.sort();
        g.dedup();
        for &x in &self.markers {
            if g.binary_search(&x).is_err() {
                return Err(CylinderError::GridTooCoarse(format!(
                    "marker {} is not a grid point",
                    fmt_turn(x)
                )));
            }
        }
        let n = self.markers.len();
        for i in 0..n {
            let gap_arc = Arc::new(self.markers[i], self.markers[(i + 1) % n]);
            let inside = g.iter().filter(|&&x| gap_arc.contains(x)).count();
            if inside < 2 {
                return Err(CylinderError::GridTooCoarse(format!(
                    "{inside} grid points between markers {} and {}",
                    i + 1,
                    (i + 1) % n + 1
                )));
            }
        }
        self.grid = Some(g);
        Ok(self)
    }

    /// The grid of multiples of `1/m`.
    pub fn with_uniform_grid(self, m: usize) -> Result<Self, CylinderError> {
        let g = (0..m).map(|k| Turn::new(k as i64, m as i64)).collect();
        self.with_grid(g)
    }

    pub fn n(&self) -> usize {
        self.markers.len()
    }

    pub fn markers(&self) -> &[Turn] {
        &self.markers
    }

    /// Marker `x_i` for `i ∈ 1..=N`.
    pub fn marker(&self, i: usize) -> Turn {
        self.markers[i - 1]
    }

    pub fn grid(&self) -> Option<&[Turn]> {
        self.grid.as_deref()
    }

    /// False when the input had to be sorted.
    pub fn was_sorted(&self) -> bool {
        self.was_sorted
    }

    /// The arc `(x_i, x_k)`.
    pub fn interval(&self, i: usize, k: usize) -> Arc {
        Arc::new(self.marker(i), self.marker(k))
    }

    /// Some marker misses the closure of `o`.
    pub fn in_in(&self, o: &Arc) -> bool {
        self.markers.iter().any(|&x| !o.closure_contains(x))
    }

    /// The interval `(x_i, x_k)` whose open arc contains `cl(o)` and whose
    /// markers all lie in `cl(o)`: `x_i` is the nearest marker strictly
    /// before `o`, `x_k` the nearest strictly after.
    pub fn quotient_rf(&self, o: &Arc) -> Result<(usize, usize), CylinderError> {
        if !self.in_in(o) {
            return Err(CylinderError::NotInIN(o.to_string()));
        }
        let n = self.n();
        let before = (1..=n)
            .filter(|&i| self.marker(i) != o.start)
            .min_by_key(|&i| gap(self.marker(i), o.start))
            .expect("two markers");
        let after = (1..=n)
            .filter(|&k| self.marker(k) != o.end)
            .min_by_key(|&k| gap(o.end, self.marker(k)))
            .expect("two markers");
        let target = self.interval(before, after);
        let ok = o.closure_inside(&target)
            && self
                .markers
                .iter()
                .all(|&x| !target.contains(x) || o.closure_contains(x));
        if !ok {
            return Err(CylinderError::NoAdmissibleTarget(o.to_string()));
        }
        Ok((before, after))
    }
}

/// `(k − i)_N`.
pub fn interval_length(n: usize, i: usize, k: usize) -> usize {
    modn(k as i64 - i as i64, n)
}

pub fn pn_label(i: usize, k: usize) -> String {
    format!("(x{i},x{k})")
}

/// The poset `P_N` of marker intervals ordered by inclusion; element
/// `(x_i, x_k)` sits at index `(i−1)·N + (k−1)`.
#[derive(Debug, Clone)]
pub struct IntervalPoset {
    pub circle: MarkedCircle,
    pub poset: Shared<Poset>,
}

impl IntervalPoset {
    pub fn new(circle: MarkedCircle) -> Result<Self, CylinderError> {
        let n = circle.n();
        let mut labels = Vec::with_capacity(n * n);
        let mut arcs = Vec::with_capacity(n * n);
        for i in 1..=n {
            for k in 1..=n {
                labels.push(pn_label(i, k));
                arcs.push(circle.interval(i, k));
            }
        }
        let poset = Poset::from_order(labels, |a, b| arcs[a].is_subset(&arcs[b]))?;
        Ok(IntervalPoset {
            circle,
            poset: Shared::new(poset),
        })
    }

    pub fn n(&self) -> usize {
        self.circle.n()
    }

    pub fn index(&self, i: usize, k: usize) -> usize {
        (i - 1) * self.n() + (k - 1)
    }

    /// `(i, k)` of an element index.
    pub fn pair(&self, idx: usize) -> (usize, usize) {
        (idx / self.n() + 1, idx % self.n() + 1)
    }

    pub fn length(&self, i: usize, k: usize) -> usize {
        interval_length(self.n(), i, k)
    }

    /// The number of marker gaps `(x_j, x_{j+1})` inside `(x_i, x_k)`.
    pub fn length_by_count(&self, i: usize, k: usize) -> usize {
        let n = self.n();
        let o = self.circle.interval(i, k);
        (1..=n)
            .filter(|&j| self.circle.interval(j, j % n + 1).is_subset(&o))
            .count()
    }
}

/// `𝔣(x_i, x_k) = (i, ℓ_{i,k})` and its inverse `(i, ℓ) ↦ (x_i, x_{(i+ℓ)_N})`.
pub fn iso_pn_cn(
    pn: &IntervalPoset,
    cn: &Shared<Poset>,
) -> Result<(PosetMorphism, PosetMorphism), CylinderError> {
    let n = pn.n();
    let fwd = PosetMorphism::from_labels(pn.poset.clone(), cn.clone(), |lbl| {
        let idx = pn.poset.index_of(lbl).expect("own label");
        let (i, k) = pn.pair(idx);
        cylinder_label(i, interval_length(n, i, k))
    })?;
    let inv_map = (0..cn.len())
        .map(|c| {
            let (i, l) = super::parse_cylinder_label(cn.label(c))
                .ok_or_else(|| CylinderError::NotACylinder(cn.label(c).into()))?;
            Ok(pn.index(i, modn((i + l) as i64, n)))
        })
        .collect::<Result<Vec<_>, CylinderError>>()?;
    let inv = PosetMorphism::new(cn.clone(), pn.poset.clone(), inv_map)?;
    Ok((fwd, inv))
}

/// All grid arcs `(u, v)`, `u ≠ v`, optionally only those in `I_N`,
/// ordered by inclusion.
#[derive(Debug, Clone)]
pub struct GridPoset {
    pub circle: MarkedCircle,
    pub arcs: Vec<Arc>,
    pub poset: Shared<Poset>,
}

impl GridPoset {
    pub fn new(circle: MarkedCircle, only_in_in: bool) -> Result<Self, CylinderError> {
        let grid = circle
            .grid()
            .ok_or_else(|| CylinderError::GridTooCoarse("no grid".into()))?
            .to_vec();
        let mut arcs = Vec::new();
        for &u in &grid {
            for &v in &grid {
                let a = Arc::new(u, v);
                if u != v && (!only_in_in || circle.in_in(&a)) {
                    arcs.push(a);
                }
            }
        }
        let labels = arcs.iter().map(Arc::to_string).collect();
        let poset = Poset::from_order(labels, |a, b| arcs[a].is_subset(&arcs[b]))?;
        Ok(GridPoset {
            circle,
            arcs,
            poset: Shared::new(poset),
        })
    }

    /// Arc length in grid steps.
    pub fn steps(&self, o: usize) -> usize {
        let grid = self.circle.grid().expect("grid poset has a grid");
        let a = &self.arcs[o];
        grid.iter().filter(|&&x| a.contains(x)).count() + 1
    }

    /// `rf` on every element.
    pub fn quotient_map(&self) -> Result<Vec<(usize, usize)>, CylinderError> {
        self.arcs.iter().map(|a| self.circle.quotient_rf(a)).collect()
    }

    /// The elements `o` with `cl(o) ⊂ (x_i, x_k)`.
    pub fn truncated_set(&self, i: usize, k: usize) -> Vec<usize> {
        let target = self.circle.interval(i, k);
        (0..self.arcs.len())
            .filter(|&o| self.arcs[o].closure_inside(&target))
            .collect()
    }
}
