//! Prime, Mobius, and Mertens tables plus exact integer root helpers.
//!
//! These tables are built once and shared read-only by the counting and
//! sieving code. All arithmetic here is exact; in particular [`iroot`]
//! never relies on floating point at a boundary.

use crate::{Error, Result};

/// Primes up to a limit, from a plain sieve of Eratosthenes.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        let mut p = 2usize;
        while p <= n {
            if !composite[p] {
                primes.push(p as u64);
                let mut q = p * p;
                while q <= n {
                    composite[q] = true;
                    q += p;
                }
            }
            p += 1;
        }
        Ok(PrimeTable { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
}

/// Values of the Mobius function mu(n) for 1 <= n <= limit.
#[derive(Debug, Clone)]
pub struct MobiusTable {
    limit: u64,
    values: Vec<i8>, // index 0 unused
}

impl MobiusTable {
    /// Linear sieve: every composite is struck exactly once via its
    /// smallest prime factor, so construction is O(limit).
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 1 {
            return Err(Error::Precondition("mobius limit must be >= 1".into()));
        }
        let n = limit as usize;
        let mut values = Vec::new();
        values
            .try_reserve_exact(n + 1)
            .map_err(|_| Error::Capacity(format!("mobius table of {} entries", n + 1)))?;
        values.resize(n + 1, 0i8);
        let mut composite = Vec::new();
        composite
            .try_reserve_exact(n + 1)
            .map_err(|_| Error::Capacity(format!("sieve flags of {} entries", n + 1)))?;
        composite.resize(n + 1, false);
        values[1] = 1;
        let mut primes: Vec<usize> = Vec::new();
        for i in 2..=n {
            if !composite[i] {
                primes.push(i);
                values[i] = -1;
            }
            for &p in &primes {
                let ip = match i.checked_mul(p) {
                    Some(v) if v <= n => v,
                    _ => break,
                };
                composite[ip] = true;
                if i % p == 0 {
                    values[ip] = 0;
                    break;
                }
                values[ip] = -values[i];
            }
        }
        Ok(MobiusTable { limit, values })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// mu(n); panics if n is out of range (use [`MobiusTable::get`] for a checked access).
    #[inline]
    pub fn mu(&self, n: u64) -> i8 {
        self.values[n as usize]
    }

    pub fn get(&self, n: u64) -> Result<i8> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange(format!(
                "mu({n}) with table limit {}",
                self.limit
            )));
        }
        Ok(self.values[n as usize])
    }
}

/// Partial sums M(n) = sum_{j<=n} mu(j), stored as 64-bit signed integers.
#[derive(Debug, Clone)]
pub struct MertensTable {
    limit: u64,
    partial: Vec<i64>, // index 0 holds M(0) = 0
}

impl MertensTable {
    pub fn from_mobius(mobius: &MobiusTable) -> Result<Self> {
        let n = mobius.limit() as usize;
        let mut partial = Vec::new();
        partial
            .try_reserve_exact(n + 1)
            .map_err(|_| Error::Capacity(format!("mertens table of {} entries", n + 1)))?;
        partial.push(0i64);
        let mut acc = 0i64;
        for j in 1..=n {
            acc += mobius.mu(j as u64) as i64;
            partial.push(acc);
        }
        Ok(MertensTable {
            limit: mobius.limit(),
            partial,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

/// sieve_mobius(limit): table of mu(n) for n <= limit.
pub fn sieve_mobius(limit: u64) -> Result<MobiusTable> {
    MobiusTable::new(limit)
}

/// Mertens function M(x) from a precomputed table.
pub fn mertens(x: u64, table: &MertensTable) -> Result<i64> {
    if x == 0 || x > table.limit {
        return Err(Error::OutOfRange(format!(
            "M({x}) with table limit {}",
            table.limit
        )));
    }
    Ok(table.partial[x as usize])
}

/// Integer k-th root: the unique r with r^k <= x < (r+1)^k, k >= 2.
///
/// A floating-point guess seeds the search; the result is then fixed up
/// with exact integer comparisons so boundary cases (x an exact power,
/// x one below a power) are always right.
pub fn iroot(x: u128, k: u32) -> u128 {
    assert!(k >= 2, "iroot requires k >= 2");
    if x == 0 {
        return 0;
    }
    let guess = (x as f64).powf(1.0 / k as f64) as u128;
    let mut r = guess.saturating_sub(2);
    while pow_fits(r + 1, k, x) {
        r += 1;
    }
    r
}

/// True iff base^k <= x, evaluated without overflow.
fn pow_fits(base: u128, k: u32, x: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = match acc.checked_mul(base) {
            Some(v) => v,
            None => return false,
        };
        if acc > x {
            return false;
        }
    }
    acc <= x
}

/// iroot specialized to u64 inputs.
pub fn iroot64(x: u64, k: u32) -> u64 {
    iroot(x as u128, k) as u64
}

/// x^k as u128, checked.
pub fn upow(base: u64, k: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}
