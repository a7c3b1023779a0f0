//! Exact number-theoretic inputs: von Mangoldt values, Bernoulli and Euler
//! numbers, and the Bernoulli polynomials at 3/4 that feed the singular term.
//!
//! Bernoulli and Euler numbers both come from the zigzag (up/down) numbers
//! `A(n)` of the Seidel–Entringer boustrophedon triangle: `A(2n) = |E_2n|`
//! and `A(2n-1)` are the tangent numbers, with
//! `B_2n = (-1)^(n-1) 2n A(2n-1) / (4^n (4^n - 1))`.

use std::sync::{OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Integer, Rational};

pub type ExactRational = Rational;

/// Sieve limit used by the default table.
pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;

/// Smallest-prime-factor table with on-demand segmented extension.
#[derive(Debug)]
pub struct MangoldtTable {
    inner: RwLock<Sieve>,
}

#[derive(Debug)]
struct Sieve {
    /// spf[n] is the smallest prime factor of n for 2 <= n < spf.len().
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    fn new(limit: u64) -> Self {
        let n = (limit as usize + 1).max(2);
        let mut spf = vec![0u32; n];
        let mut primes = Vec::new();
        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let m = i * p as usize;
                if p > spf[i] || m >= n {
                    break;
                }
                spf[m] = p;
            }
        }
        Sieve { spf, primes }
    }

    fn limit(&self) -> u64 {
        self.spf.len() as u64 - 1
    }

    /// Sieve the segment (limit, new_limit] using the base primes.
    fn extend(&mut self, new_limit: u64) {
        let lo = self.spf.len();
        let hi = new_limit as usize + 1;
        if hi <= lo {
            return;
        }
        let root = (new_limit as f64).sqrt() as u64 + 1;
        if root > self.limit() {
            // Base primes themselves are missing; a fresh sieve is simpler.
            *self = Sieve::new(new_limit);
            return;
        }
        let mut seg = vec![0u32; hi - lo];
        for &p in &self.primes {
            let p = p as usize;
            if p * p >= hi {
                break;
            }
            let start = lo.div_ceil(p).max(p) * p;
            let mut m = start;
            while m < hi {
                if seg[m - lo] == 0 {
                    seg[m - lo] = p as u32;
                }
                m += p;
            }
        }
        for (i, v) in seg.iter_mut().enumerate() {
            if *v == 0 {
                *v = (lo + i) as u32;
                self.primes.push((lo + i) as u32);
            }
        }
        self.spf.extend(seg);
    }
}

impl Default for MangoldtTable {
    fn default() -> Self {
        Self::new(DEFAULT_SIEVE_LIMIT)
    }
}

impl MangoldtTable {
    pub fn new(limit: u64) -> Self {
        MangoldtTable {
            inner: RwLock::new(Sieve::new(limit)),
        }
    }

    pub fn limit(&self) -> u64 {
        self.inner.read().unwrap().limit()
    }

    /// Extend the sieve so that lookups up to `limit` are table-backed.
    pub fn extend_to(&self, limit: u64) {
        if limit <= self.limit() || limit >= u32::MAX as u64 {
            return;
        }
        let mut guard = self.inner.write().unwrap();
        let target = limit.max(guard.limit() * 2);
        guard.extend(target.min(u32::MAX as u64 - 1));
    }

    /// `Some((p, k))` when `n = p^k`, so that `Λ(n) = log p`.
    pub fn lookup(&self, n: u64) -> Option<(u64, u32)> {
        if n < 2 {
            return None;
        }
        let guard = self.inner.read().unwrap();
        if n <= guard.limit() {
            let p = guard.spf[n as usize] as u64;
            return prime_power_of(n, p);
        }
        drop(guard);
        von_mangoldt_direct(n)
    }

    /// Σ_{n ≤ x} Λ(n) in f64 (Chebyshev's ψ), used for sanity checks.
    pub fn chebyshev_psi(&self, x: u64) -> f64 {
        self.extend_to(x);
        (2..=x)
            .filter_map(|n| self.lookup(n))
            .map(|(p, _)| (p as f64).ln())
            .sum()
    }
}

fn prime_power_of(n: u64, p: u64) -> Option<(u64, u32)> {
    let mut m = n;
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

fn von_mangoldt_direct(n: u64) -> Option<(u64, u32)> {
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return prime_power_of(n, d);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    Some((n, 1))
}

impl MangoldtTable {
    /// Process-wide table (2^16 sieved entries, trial division beyond).
    pub fn global() -> &'static MangoldtTable {
        static TABLE: OnceLock<MangoldtTable> = OnceLock::new();
        TABLE.get_or_init(|| MangoldtTable::new(1 << 16))
    }
}

/// `(p, k)` when `n = p^k` (`n ≥ 2`), otherwise `None`.
pub fn von_mangoldt(n: u64) -> Option<(u64, u32)> {
    MangoldtTable::global().lookup(n)
}

/// Zigzag numbers A(0..) with the last boustrophedon row kept for extension.
struct Zigzag {
    values: Vec<Integer>,
    row: Vec<Integer>,
}

impl Zigzag {
    fn new() -> Self {
        Zigzag {
            values: vec![Integer::from(1)],
            row: vec![Integer::from(1)],
        }
    }

    fn extend_to(&mut self, n: usize) {
        while self.values.len() <= n {
            // Entringer: E(m,0) = 0, E(m,k) = E(m,k-1) + E(m-1,m-k).
            let m = self.row.len();
            let mut next = Vec::with_capacity(m + 1);
            next.push(Integer::new());
            for k in 1..=m {
                let v = Integer::from(&next[k - 1] + &self.row[m - k]);
                next.push(v);
            }
            self.values.push(next[m].clone());
            self.row = next;
        }
    }
}

fn zigzag(n: usize) -> Integer {
    static ZZ: OnceLock<RwLock<Zigzag>> = OnceLock::new();
    let lock = ZZ.get_or_init(|| RwLock::new(Zigzag::new()));
    if let Some(v) = lock.read().unwrap().values.get(n) {
        return v.clone();
    }
    let mut g = lock.write().unwrap();
    g.extend_to(n);
    g.values[n].clone()
}

/// Euler number `E_k` (`E_0 = 1, E_2 = -1, E_4 = 5, …`); zero for odd `k`.
pub fn euler_number(k: u32) -> ExactRational {
    if k % 2 == 1 {
        return Rational::new();
    }
    let a = zigzag(k as usize);
    Rational::from(if (k / 2) % 2 == 1 { -a } else { a })
}

/// Bernoulli number `B_k` with `B_1 = -1/2`.
pub fn bernoulli_number(k: u32) -> ExactRational {
    match k {
        0 => Rational::from(1),
        1 => Rational::from((-1, 2)),
        k if k % 2 == 1 => Rational::new(),
        k => {
            let n = k / 2;
            let t = zigzag(k as usize - 1);
            let four_n = Integer::from(1) << (2 * n);
            let den = &four_n * Integer::from(&four_n - 1u32);
            let mut num = t * Integer::from(k);
            if n % 2 == 0 {
                num = -num;
            }
            Rational::from((num, den))
        }
    }
}

/// Exact `B_n(3/4) = Σ_k C(n,k) B_k (3/4)^(n-k)`.
pub fn bernoulli_poly_three_quarters(n: u32) -> ExactRational {
    static CACHE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    let lock = CACHE.get_or_init(|| RwLock::new(Vec::new()));
    if let Some(v) = lock.read().unwrap().get(n as usize) {
        return v.clone();
    }
    let mut g = lock.write().unwrap();
    while g.len() <= n as usize {
        let m = g.len() as u32;
        g.push(bernoulli_poly_eval(m, &Rational::from((3, 4))));
    }
    g[n as usize].clone()
}

fn bernoulli_poly_eval(n: u32, x: &Rational) -> Rational {
    // 4^n B_n(3/4) = Σ C(n,k) B_k 3^(n-k) 4^k keeps the sum integral in x.
    let mut acc = Rational::new();
    let mut binom = Integer::from(1);
    for k in 0..=n {
        if k > 0 {
            binom *= n - k + 1;
            binom /= k;
        }
        let b = bernoulli_number(k);
        if b.cmp0().is_ne() {
            let xp = x.pow_ref_rational(n - k);
            acc += b * xp * &binom;
        }
    }
    acc
}

trait RationalPow {
    fn pow_ref_rational(&self, e: u32) -> Rational;
}

impl RationalPow for Rational {
    fn pow_ref_rational(&self, e: u32) -> Rational {
        let (n, d) = self.clone().into_numer_denom();
        Rational::from((n.pow(e), d.pow(e)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    /// Classical recurrence Σ_{k<n+1} C(n+1,k) B_k = 0, computed independently.
    fn bernoulli_by_recurrence(max: usize) -> Vec<Rational> {
        let mut b = vec![Rational::from(1)];
        for m in 1..=max {
            let mut s = Rational::new();
            let mut binom = Integer::from(1);
            for (k, bk) in b.iter().enumerate() {
                if k > 0 {
                    binom *= (m + 1 - k + 1) as u32;
                    binom /= k as u32;
                }
                s += Rational::from(bk * &binom);
            }
            b.push(-s / Integer::from(m + 1));
        }
        b
    }

    #[test]
    fn mangoldt_examples() {
        assert_eq!(von_mangoldt(8), Some((2, 3)));
        assert_eq!(von_mangoldt(6), None);
        assert_eq!(von_mangoldt(7), Some((7, 1)));
        assert_eq!(von_mangoldt(1), None);
        assert_eq!(von_mangoldt(1_000_003), Some((1_000_003, 1)));
        assert_eq!(von_mangoldt(3u64.pow(19)), Some((3, 19)));
        assert_eq!(von_mangoldt(1_000_002), None);
    }

    #[test]
    fn segmented_extension_matches_fresh_sieve() {
        let t = MangoldtTable::new(1000);
        t.extend_to(5000);
        assert!(t.limit() >= 5000);
        let fresh = MangoldtTable::new(6000);
        for n in 2..5000 {
            assert_eq!(t.lookup(n), fresh.lookup(n), "n = {n}");
            assert_eq!(t.lookup(n), von_mangoldt_direct(n), "n = {n}");
        }
    }

    #[test]
    fn chebyshev_bounds() {
        let t = MangoldtTable::new(1000);
        for &x in &[1_000u64, 10_000, 100_000, 1_000_000] {
            let psi = t.chebyshev_psi(x);
            assert!(psi > 0.9 * x as f64 && psi < 1.04 * x as f64, "psi({x}) = {psi}");
        }
    }

    #[test]
    fn euler_numbers() {
        assert_eq!(euler_number(0), 1);
        assert_eq!(euler_number(2), -1);
        assert_eq!(euler_number(4), 5);
        assert_eq!(euler_number(6), -61);
        assert_eq!(euler_number(10), -50521);
        assert_eq!(euler_number(3), 0);
    }

    #[test]
    fn bernoulli_numbers() {
        assert_eq!(bernoulli_number(2), r(1, 6));
        assert_eq!(bernoulli_number(4), r(-1, 30));
        assert_eq!(bernoulli_number(12), r(-691, 2730));
        let rec = bernoulli_by_recurrence(60);
        for (k, b) in rec.iter().enumerate() {
            assert_eq!(&bernoulli_number(k as u32), b, "B_{k}");
        }
    }

    #[test]
    fn bernoulli_at_three_quarters() {
        assert_eq!(bernoulli_poly_three_quarters(0), 1);
        assert_eq!(bernoulli_poly_three_quarters(1), r(1, 4));
        assert_eq!(bernoulli_poly_three_quarters(2), r(-1, 48));
        assert_eq!(bernoulli_poly_three_quarters(3), r(-3, 64));
    }

    #[test]
    fn three_quarters_identity_with_euler_numbers() {
        // B_n(3/4) = (-1)^n [2^-n (2^(1-n) - 1) B_n - n E_(n-1) / 4^n].
        for n in 1..=20u32 {
            let two_n = Rational::from((1, Integer::from(1) << n));
            let half = Rational::from((2, Integer::from(1) << n)) - 1u32;
            let four_n = Rational::from((1, Integer::from(1) << (2 * n)));
            let mut rhs = two_n * half * bernoulli_number(n)
                - four_n * euler_number(n - 1) * Integer::from(n);
            if n % 2 == 1 {
                rhs = -rhs;
            }
            assert_eq!(bernoulli_poly_three_quarters(n), rhs, "n = {n}");
        }
    }

    /// Taylor coefficients by the trapezoid rule on a circle (Cauchy integral).
    fn taylor_coefficient(f: impl Fn(f64, f64) -> (f64, f64), n: usize, radius: f64) -> f64 {
        let m = 256;
        let mut acc = 0.0;
        for j in 0..m {
            let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let (x, y) = (radius * th.cos(), radius * th.sin());
            let (fr, fi) = f(x, y);
            // Re(f(z) z^-n) with z^-n = r^-n e^{-i n th}
            let (c, s) = ((n as f64 * th).cos(), (n as f64 * th).sin());
            acc += fr * c + fi * s;
        }
        acc / m as f64 / radius.powi(n as i32)
    }

    fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
        let d = b.0 * b.0 + b.1 * b.1;
        ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
    }

    #[test]
    fn quadrature_oracle_for_small_indices() {
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        // z/(e^z - 1) has radius of convergence 2π; sec z has π/2.
        let bern = |x: f64, y: f64| {
            let e = (x.exp() * y.cos() - 1.0, x.exp() * y.sin());
            cdiv((x, y), e)
        };
        let sec = |x: f64, y: f64| {
            let c = (x.cos() * y.cosh(), -x.sin() * y.sinh());
            cdiv((1.0, 0.0), c)
        };
        for n in (0..=12).step_by(2) {
            let b = taylor_coefficient(bern, n, 3.0) * fact(n);
            assert!((b - bernoulli_number(n as u32).to_f64()).abs() < 1e-9, "B_{n}");
            // sec z = Σ (-1)^k E_2k z^2k / (2k)!
            let sign = if n % 4 == 2 { -1.0 } else { 1.0 };
            let e = sign * taylor_coefficient(sec, n, 1.0) * fact(n);
            assert!((e - euler_number(n as u32).to_f64()).abs() < 1e-6 * (1.0 + e.abs()), "E_{n}");
        }
    }
}
