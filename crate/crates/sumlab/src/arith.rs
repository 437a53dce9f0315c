//! Multiplicative coefficient machinery: factorization, smallest-prime-factor
//! sieves, and bulk tables of Dirichlet-series data driven by local Euler
//! factors.
//!
//! A degree-`d` Euler factor at `p` is described by the coefficients of its
//! inverse, `prod_j (1 - alpha_j X) = sum_a m_a X^a`, handed in as the vector
//! `[m_0, ..., m_d]` with `m_0 = 1`. From that the builder recovers the
//! series coefficients `lambda(p^a)` (complete homogeneous in the
//! `alpha_j`), the inverse coefficients `mu(p^a) = m_a`, and the shifted
//! ratio coefficients
//!
//! ```text
//! c(n) = n^omega * sum_{d | n} mu(d) d^{-2 omega} lambda(n / d),
//! ```
//!
//! all extended multiplicatively to every `n` up to the table limit.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum ArithError {
    #[error("coefficient table limit must be at least 1")]
    EmptyTable,
    #[error("local factor at p={p} must start with 1, got {got:?}")]
    BadLocalFactor { p: u64, got: Vec<f64> },
}

/// Prime factorization `n = prod p_i^{a_i}` with the primes increasing.
/// `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        if *n % p == 0 {
            let mut a = 0;
            while *n % p == 0 {
                *n /= p;
                a += 1;
            }
            out.push((p, a));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    push(5, &mut n);
    // Wheel over residues coprime to 30.
    const WHEEL: [u64; 8] = [1, 7, 11, 13, 17, 19, 23, 29];
    let mut base = 0;
    'outer: loop {
        for r in WHEEL {
            let p = base + r;
            if p < 7 {
                continue;
            }
            if p * p > n {
                break 'outer;
            }
            push(p, &mut n);
        }
        base += 30;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `sieve[n]` is the smallest prime factor of `n` for `2 <= n <= limit`
/// (entries 0 and 1 are zero).
pub fn smallest_prime_factor_sieve(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Tables of `lambda`, `mu`, and `c` indexed by `n` up to a fixed limit.
pub struct CoefficientTables {
    lambda: Vec<f64>,
    mu: Vec<f64>,
    c: Vec<f64>,
    omega: f64,
}

impl CoefficientTables {
    /// Builds all three tables for `1 <= n <= limit`. `local_inverse(p)`
    /// returns the inverse Euler-factor coefficients at the prime `p`.
    pub fn build(
        limit: usize,
        omega: f64,
        local_inverse: &dyn Fn(u64) -> Vec<f64>,
    ) -> Result<Self, ArithError> {
        if limit == 0 {
            return Err(ArithError::EmptyTable);
        }
        let spf = smallest_prime_factor_sieve(limit);
        let mut lambda = vec![0.0; limit + 1];
        let mut mu = vec![0.0; limit + 1];
        let mut cfac = vec![0.0; limit + 1];
        lambda[1] = 1.0;
        mu[1] = 1.0;
        cfac[1] = 1.0;

        for p in 2..=limit {
            if spf[p] != p as u32 {
                continue;
            }
            let inv = local_inverse(p as u64);
            if inv.is_empty() || (inv[0] - 1.0).abs() > 1e-12 {
                return Err(ArithError::BadLocalFactor {
                    p: p as u64,
                    got: inv,
                });
            }
            let deg = inv.len() - 1;
            let p2w = (p as f64).powf(-2.0 * omega);
            let mut lam_pow = vec![1.0];
            let mut pk = p;
            let mut a = 1usize;
            loop {
                let mut lam = 0.0;
                for j in 1..=a.min(deg) {
                    lam -= inv[j] * lam_pow[a - j];
                }
                lam_pow.push(lam);
                lambda[pk] = lam;
                mu[pk] = if a <= deg { inv[a] } else { 0.0 };
                let mut cf = 0.0;
                let mut w = 1.0;
                for j in 0..=a.min(deg) {
                    cf += inv[j] * w * lam_pow[a - j];
                    w *= p2w;
                }
                cfac[pk] = cf;
                match pk.checked_mul(p) {
                    Some(next) if next <= limit => pk = next,
                    _ => break,
                }
                a += 1;
            }
        }

        for n in 2..=limit {
            let p = spf[n] as usize;
            let mut m = n;
            let mut ppow = 1usize;
            while m % p == 0 {
                m /= p;
                ppow *= p;
            }
            if m > 1 {
                lambda[n] = lambda[ppow] * lambda[m];
                mu[n] = mu[ppow] * mu[m];
                cfac[n] = cfac[ppow] * cfac[m];
            }
        }

        let mut c = cfac;
        for (n, v) in c.iter_mut().enumerate().skip(1) {
            *v *= (n as f64).powf(omega);
        }
        Ok(CoefficientTables { lambda, mu, c, omega })
    }

    pub fn limit(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn lambda(&self, n: u64) -> f64 {
        self.lambda[n as usize]
    }

    pub fn mu(&self, n: u64) -> f64 {
        self.mu[n as usize]
    }

    pub fn c(&self, n: u64) -> f64 {
        self.c[n as usize]
    }

    /// Slice of `c(n)` with `c_slice()[n]` valid for `1 <= n <= limit`.
    pub fn c_slice(&self) -> &[f64] {
        &self.c
    }

    pub fn lambda_slice(&self) -> &[f64] {
        &self.lambda
    }
}
