//! Fixed bijections on copy indices.

/// `ℕ × ℕ → ℕ`, `(x, y) ↦ (x + y)(x + y + 1)/2 + y`.
pub fn cantor_pair(x: u64, y: u64) -> u64 {
    let s = x + y;
    s * (s + 1) / 2 + y
}

pub fn cantor_unpair(z: u64) -> (u64, u64) {
    // largest w with w(w+1)/2 <= z
    let mut w = (((8 * z as u128 + 1) as f64).sqrt() as u64).saturating_sub(1) / 2;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

/// `{0..m−1} × ℕ → ℕ`, `(q, c) ↦ c·m + q`.
pub fn interleave(q: u64, c: u64, m: u64) -> u64 {
    debug_assert!(q < m);
    c * m + q
}

pub fn uninterleave(n: u64, m: u64) -> (u64, u64) {
    (n % m, n / m)
}
