//! Words in a free group. Letter `g + 1` is generator `g`, `-(g + 1)` its
//! inverse.

pub type Letter = i32;
pub type Word = Vec<Letter>;

#[inline]
pub fn letter(generator: usize, inverse: bool) -> Letter {
    let l = generator as Letter + 1;
    if inverse {
        -l
    } else {
        l
    }
}

#[inline]
pub fn generator_of(l: Letter) -> usize {
    (l.unsigned_abs() - 1) as usize
}

/// Cancel adjacent `x x⁻¹` pairs.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free reduction followed by cancellation across the ends.
pub fn cyclic_reduce(w: &[Letter]) -> Word {
    let r = free_reduce(w);
    let mut lo = 0;
    let mut hi = r.len();
    while hi - lo >= 2 && r[lo] == -r[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    r[lo..hi].to_vec()
}

pub fn inverse(w: &[Letter]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

/// Canonical representative of the cyclic class of `w` and its inverse, used
/// to deduplicate relators.
pub fn canonical_relator(w: &[Letter]) -> Word {
    let r = cyclic_reduce(w);
    if r.is_empty() {
        return r;
    }
    let inv = inverse(&r);
    let mut best: Option<Word> = None;
    for cand in [&r, &inv] {
        for k in 0..cand.len() {
            let rot: Word = cand[k..].iter().chain(&cand[..k]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Exponent sum of every generator.
pub fn abelianize(w: &[Letter], ngens: usize) -> Vec<i64> {
    let mut v = vec![0i64; ngens];
    for &l in w {
        v[generator_of(l)] += l.signum() as i64;
    }
    v
}
