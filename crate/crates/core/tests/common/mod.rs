//! Independent reference computations for the integration tests. Nothing
//! here calls into the library's quadrature or sieve code.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    if b <= a {
        return 0.0;
    }
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `Li₂(y)` by its power series, `|y| ≤ 1/2`.
pub fn dilog(y: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = y;
    for k in 1..400 {
        sum += pow / (k * k) as f64;
        pow *= y;
        if pow.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// `∫₂^v log(t−1)/t dt = (log v)²/2 + Li₂(1/v) − π²/12` for `v ≥ 2`.
pub fn shifted_log_closed(v: f64) -> f64 {
    if v <= 2.0 {
        return 0.0;
    }
    0.5 * v.ln().powi(2) + dilog(1.0 / v) - PI * PI / 12.0
}

/// `∫₂^b g(t) log(t−1) dt` with `t = 2 + v²` to remove the endpoint
/// singularity, by Simpson in `v`.
pub fn log_singular_simpson(g: impl Fn(f64) -> f64, b: f64, n: usize) -> f64 {
    if b <= 2.0 {
        return 0.0;
    }
    simpson(
        |v| {
            if v == 0.0 {
                0.0
            } else {
                let t = 2.0 + v * v;
                g(t) * (v * v).ln_1p() * 2.0 * v
            }
        },
        0.0,
        (b - 2.0).sqrt(),
        n,
    )
}

/// `F₀(s)` from its closed forms, evaluated with Simpson and the dilogarithm.
pub fn upper_f0_oracle(s: f64) -> f64 {
    if s <= 3.0 {
        return 1.0;
    }
    let mut v = 1.0 + shifted_log_closed(s - 1.0);
    if s > 5.0 {
        v += log_singular_simpson(
            |t| {
                let inner = simpson(|u| ((u - 1.0) / (t + 1.0)).ln() / u, t + 2.0, s - 1.0, 400);
                inner / t
            },
            s - 3.0,
            400,
        );
    }
    v
}

/// `f₀(s)` from its closed forms, evaluated with Simpson and the dilogarithm.
pub fn lower_f0_oracle(s: f64) -> f64 {
    if s <= 2.0 {
        return 0.0;
    }
    let mut v = (s - 1.0).ln();
    if s > 4.0 {
        v += simpson(|t| shifted_log_closed(t - 1.0) / t, 3.0, s - 1.0, 2000);
    }
    if s > 6.0 {
        v += log_singular_simpson(
            |t| {
                let inner = simpson(
                    |u| ((u - 1.0) / (t + 1.0)).ln() * (s / (u + 2.0)).ln() / u,
                    t + 2.0,
                    s - 2.0,
                    400,
                );
                inner / t
            },
            s - 4.0,
            400,
        );
    }
    v
}

/// `Ω(n)` by plain trial division.
pub fn omega_trial(mut n: u64) -> u8 {
    let mut c = 0;
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            n /= d;
            c += 1;
        }
        d += 1;
    }
    c + (n > 1) as u8
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && omega_trial(n) == 1
}

/// `Ω(n)` for all `n ≤ limit` (index 0 and 1 are 0).
pub fn omega_table(limit: u64) -> Vec<u8> {
    (0..=limit).map(|n| if n < 2 { 0 } else { omega_trial(n) }).collect()
}

pub fn brute_pi_1ab(omega: &[u8], x: u64, a: u8, b: u8) -> u64 {
    (2..=x)
        .filter(|&p| omega[p as usize] == 1)
        .filter(|&p| omega[(p + 2) as usize] <= a && omega[(p + 6) as usize] <= b)
        .count() as u64
}

pub fn brute_d_1ab(omega: &[u8], n: u64, a: u8, b: u8) -> u64 {
    (2..=n.saturating_sub(2))
        .filter(|&p| omega[p as usize] == 1)
        .filter(|&p| omega[(n - p) as usize] <= a && omega[(p + 6) as usize] <= b)
        .count() as u64
}

pub fn brute_pi_1r(omega: &[u8], x: u64, r: u8) -> u64 {
    (2..=x)
        .filter(|&p| omega[p as usize] == 1 && omega[(p + 2) as usize] <= r)
        .count() as u64
}

pub fn brute_d_sr(omega: &[u8], n: u64, s: u8, r: u8) -> u64 {
    (2..=n.saturating_sub(2))
        .filter(|&m| omega[m as usize] <= s && omega[(n - m) as usize] <= r)
        .count() as u64
}
