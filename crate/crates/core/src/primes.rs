use std::sync::OnceLock;

/// All primes `≤ limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::with_capacity(estimate_count(limit));
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if let Some(start) = i.checked_mul(i) {
            for j in (start..=n).step_by(i) {
                composite[j] = true;
            }
        }
    }
    primes
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    (1.26 * x / x.ln().max(1.0)) as usize + 16
}

/// Primes up to one million, enough to trial-divide anything `≤ 10¹²`.
pub fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(1_000_000))
}

/// Largest `r` with `r² ≤ n`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Prime factorization by trial division with the small-prime table, as
/// `(prime, exponent)` pairs in ascending order. Valid for `n ≤ 10¹²`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
