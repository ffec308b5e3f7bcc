//! Exact evaluation of Q_k(x) and the scaled error R_k(x) / x^(1/2k).
//!
//! Q_k(x) counts the k-free integers up to x. The scanner and the CLI never
//! work with R_k(x) in floating point directly; instead they track the
//! 64-bit integer V*Q_k(x) - U*x for a fixed rational approximation U/V of
//! 1/zeta(k), and scale only at the last moment.

use crate::arith::{iroot64, mertens, upow, MertensTable, MobiusTable};
use crate::{Error, Result};
use rug::Float;

/// Rational approximation U/V of 1/zeta(k) used by the exact tracker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalDensity {
    pub k: u32,
    pub u: u64,
    pub v: u64,
}

/// For k = 2 and k = 3 these are fixed constants; both satisfy
/// |U/V - 1/zeta(k)| < 4e-29 (checked in tests against 200-bit zeta).
const U2: u64 = 43_911_266_001_254;
const V2: u64 = 72_231_137_363_897;
const U3: u64 = 93_721_645_826_352;
const V3: u64 = 112_658_751_341_045;

impl RationalDensity {
    /// Rational approximation of 1/zeta(k). For k >= 4 a continued-fraction
    /// convergent with V <= 2^50 is generated and its error bound (< 1e-28)
    /// re-checked before it is returned.
    pub fn for_k(k: u32) -> Result<RationalDensity> {
        match k {
            0 | 1 => Err(Error::Precondition("k must be >= 2".into())),
            2 => Ok(RationalDensity { k, u: U2, v: V2 }),
            3 => Ok(RationalDensity { k, u: U3, v: V3 }),
            _ => generated_density(k),
        }
    }

    /// |U/V - 1/zeta(k)| as a 200-bit float.
    pub fn approximation_error(&self) -> Float {
        let prec = 200;
        let inv_zeta = Float::with_val(prec, Float::zeta_u(self.k)).recip();
        let frac = Float::with_val(prec, self.u) / Float::with_val(prec, self.v);
        (frac - inv_zeta).abs()
    }
}

fn generated_density(k: u32) -> Result<RationalDensity> {
    let prec = 256;
    let target = Float::with_val(prec, Float::zeta_u(k)).recip();
    // continued-fraction convergents p/q of target, largest q <= 2^50;
    // recurrence p_n = a_n p_(n-1) + p_(n-2) seeded with (0,1) and (1,0)
    let cap: u64 = 1 << 50;
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut frac = target.clone();
    loop {
        let a = frac.clone().floor();
        let a_int = a
            .to_integer()
            .and_then(|i| i.to_u128())
            .ok_or_else(|| Error::Precision("continued fraction coefficient overflow".into()))?;
        let p2 = a_int
            .checked_mul(p1)
            .and_then(|v| v.checked_add(p0))
            .ok_or_else(|| Error::Precision("convergent overflow".into()))?;
        let q2 = a_int
            .checked_mul(q1)
            .and_then(|v| v.checked_add(q0))
            .ok_or_else(|| Error::Precision("convergent overflow".into()))?;
        if q2 > cap as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac -= a;
        if frac == 0 {
            break;
        }
        frac.recip_mut();
    }
    let density = RationalDensity {
        k,
        u: p1 as u64,
        v: q1 as u64,
    };
    let err = density.approximation_error();
    if err > Float::with_val(64, 1e-28) {
        return Err(Error::Precision(format!(
            "generated 1/zeta({k}) convergent error {err:e} exceeds 1e-28"
        )));
    }
    Ok(density)
}

/// Q_k(x) by the direct Mobius sum over a <= x^(1/k).
pub fn qk_direct(x: u64, k: u32, mobius: &MobiusTable) -> Result<u64> {
    if x == 0 {
        return Err(Error::Precondition("x must be positive".into()));
    }
    if k < 2 {
        return Err(Error::Precondition("k must be >= 2".into()));
    }
    let r = iroot64(x, k);
    if r > mobius.limit() {
        return Err(Error::OutOfRange(format!(
            "qk_direct needs mu up to {r}, table covers {}",
            mobius.limit()
        )));
    }
    let mut acc: i128 = 0;
    for a in 1..=r {
        let m = mobius.mu(a);
        if m != 0 {
            let ak = upow(a, k).expect("a^k <= x fits u128");
            let term = (x as u128 / ak) as i128;
            if m > 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    Ok(acc as u64)
}

/// Q_2(x) using Mertens-function acceleration:
/// sum_{a<=x_n} mu(a) floor(x/a^2) + sum_{j=1}^{n-1} M(x_j) - (n-1) M(x_n),
/// where x_j = floor(sqrt(x/j)) and 1 <= n <= (x/4)^(1/3).
pub fn q2_mertens(x: u64, n: u64, mobius: &MobiusTable, mertens_table: &MertensTable) -> Result<u64> {
    if x == 0 {
        return Err(Error::Precondition("x must be positive".into()));
    }
    if n == 0 || upow(n, 3).map_or(true, |n3| n3 * 4 > x as u128) {
        return Err(Error::Precondition(format!(
            "n = {n} outside 1 <= n <= (x/4)^(1/3) for x = {x}"
        )));
    }
    let x1 = iroot64(x, 2);
    if x1 > mertens_table.limit() {
        return Err(Error::OutOfRange(format!(
            "q2_mertens needs M up to {x1}, table covers {}",
            mertens_table.limit()
        )));
    }
    let xn = iroot64(x / n, 2);
    if xn > mobius.limit() {
        return Err(Error::OutOfRange(format!(
            "q2_mertens needs mu up to {xn}, table covers {}",
            mobius.limit()
        )));
    }
    let mut acc: i128 = 0;
    for a in 1..=xn {
        let m = mobius.mu(a);
        if m != 0 {
            let term = (x / (a * a)) as i128;
            acc += if m > 0 { term } else { -term };
        }
    }
    for j in 1..n {
        let xj = iroot64(x / j, 2);
        acc += mertens(xj, mertens_table)? as i128;
    }
    acc -= (n as i128 - 1) * mertens(xn, mertens_table)? as i128;
    Ok(acc as u64)
}

/// The n used for the Mertens-accelerated formula: max(1, floor(0.05 x^(1/3))).
/// Since floor(r/20) = floor(floor(r)/20) for real r, this is exact in integers.
pub fn default_n(x: u64) -> u64 {
    (iroot64(x, 3) / 20).max(1)
}

/// Exact tracker V*Q - U*x together with its double-precision scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledError {
    pub x: u64,
    pub tracker: i64,
    /// tracker / (V * x^(1/2k)); up to 10^18 the approximation error of this
    /// double relative to R_k(x)/x^(1/2k) is at most 9.7e-16 for k = 2.
    pub scaled: f64,
}

/// V*Q - U*x in exact integer arithmetic (128-bit intermediates).
/// Errors with [`Error::TrackerOverflow`] if the value leaves i64, which
/// means |R_k(x)|/x^(1/2k) reached the design envelope of 4.
pub fn tracker(x: u64, q: u64, density: &RationalDensity) -> Result<i64> {
    let t = density.v as i128 * q as i128 - density.u as i128 * x as i128;
    i64::try_from(t).map_err(|_| Error::TrackerOverflow { x })
}

/// Scale a tracker value by 1 / (V x^(1/2k)).
#[inline]
pub fn scale_tracker(x: u64, t: i64, density: &RationalDensity) -> f64 {
    t as f64 / (density.v as f64 * root_2k(x, density.k))
}

/// x^(1/(2k)) in double precision.
#[inline]
pub fn root_2k(x: u64, k: u32) -> f64 {
    (x as f64).powf(1.0 / (2.0 * k as f64))
}

/// Scaled error at x given Q (the caller picks Q by the extremum convention:
/// Q_k(x) after a point of increase for maxima, Q_k(x) - 1 before it for minima).
pub fn scaled_error(x: u64, q: u64, density: &RationalDensity) -> Result<ScaledError> {
    let t = tracker(x, q, density)?;
    Ok(ScaledError {
        x,
        tracker: t,
        scaled: scale_tracker(x, t, density),
    })
}

/// The same quantity in high precision, used to re-verify close calls.
pub fn scaled_error_exact(x: u64, q: u64, density: &RationalDensity, prec: u32) -> Float {
    let t = density.v as i128 * q as i128 - density.u as i128 * x as i128;
    let root = Float::with_val(prec, x).root(2 * density.k);
    Float::with_val(prec, t) / (Float::with_val(prec, density.v) * root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::sieve_mobius;

    fn tables(limit: u64) -> (MobiusTable, MertensTable) {
        let mob = sieve_mobius(limit).unwrap();
        let mer = MertensTable::from_mobius(&mob).unwrap();
        (mob, mer)
    }

    fn is_kfree_trial(n: u64, k: u32) -> bool {
        let mut n = n;
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                if e >= k {
                    return false;
                }
            }
            p += 1;
        }
        true
    }

    #[test]
    fn qk_direct_paper_values() {
        let (mob, _) = tables(1000);
        assert_eq!(qk_direct(43, 2, &mob).unwrap(), 29);
        assert_eq!(qk_direct(239, 3, &mob).unwrap(), 202);
        for k in 2..=6 {
            assert_eq!(qk_direct(1, k, &mob).unwrap(), 1);
        }
    }

    #[test]
    fn qk_direct_matches_trial_division() {
        let (mob, _) = tables(400);
        for k in [2u32, 3, 4, 5] {
            let mut count = 0u64;
            for x in 1..=3000u64 {
                if is_kfree_trial(x, k) {
                    count += 1;
                }
                assert_eq!(qk_direct(x, k, &mob).unwrap(), count, "x={x} k={k}");
            }
        }
    }

    #[test]
    fn q2_mertens_agrees_with_direct() {
        let (mob, mer) = tables(4000);
        for x in [1000u64, 4096, 30_000, 123_456, 1_000_000, 9_999_999] {
            let direct = qk_direct(x, 2, &mob).unwrap();
            // every admissible n
            let n_max = iroot64(x / 4, 3);
            let picks: Vec<u64> = if n_max <= 40 {
                (1..=n_max).collect()
            } else {
                vec![1, 2, 3, n_max / 2, n_max - 1, n_max, default_n(x)]
            };
            for n in picks {
                assert_eq!(
                    q2_mertens(x, n, &mob, &mer).unwrap(),
                    direct,
                    "x={x} n={n}"
                );
            }
        }
    }

    #[test]
    fn q2_mertens_trivial_and_errors() {
        let (mob, mer) = tables(100);
        assert_eq!(q2_mertens(4, 1, &mob, &mer).unwrap(), 3);
        assert!(q2_mertens(100, 0, &mob, &mer).is_err());
        assert!(q2_mertens(100, 3, &mob, &mer).is_err()); // 4*27 > 100
        assert!(q2_mertens(100, 2, &mob, &mer).is_ok()); // 4*8 <= 100
    }

    #[test]
    fn default_n_values() {
        assert_eq!(default_n(1_000_000), 5);
        assert_eq!(default_n(8_000), 1);
        assert_eq!(default_n(10u64.pow(12)), 500);
    }

    #[test]
    fn monotone_increments() {
        let (mob, _) = tables(200);
        for k in [2u32, 3] {
            let mut prev = qk_direct(1, k, &mob).unwrap();
            for x in 2..=5000u64 {
                let q = qk_direct(x, k, &mob).unwrap();
                assert!(q == prev || q == prev + 1);
                prev = q;
            }
        }
    }

    #[test]
    fn paper_rational_constants() {
        let d2 = RationalDensity::for_k(2).unwrap();
        assert_eq!((d2.u, d2.v), (43_911_266_001_254, 72_231_137_363_897));
        let d3 = RationalDensity::for_k(3).unwrap();
        assert_eq!((d3.u, d3.v), (93_721_645_826_352, 112_658_751_341_045));
        for k in [2u32, 3] {
            let err = RationalDensity::for_k(k).unwrap().approximation_error();
            assert!(err < Float::with_val(64, 1e-28), "k={k} err={err}");
        }
    }

    #[test]
    fn generated_rational_constants() {
        for k in [4u32, 5, 7, 10] {
            let d = RationalDensity::for_k(k).unwrap();
            assert!(d.v <= 1 << 50);
            assert!(d.approximation_error() < Float::with_val(64, 1e-28));
        }
    }

    #[test]
    fn scaled_error_examples() {
        let d2 = RationalDensity::for_k(2).unwrap();
        let s = scaled_error(43, 29, &d2).unwrap();
        assert!((s.scaled - 1.116_522_528_4).abs() < 1e-9, "{}", s.scaled);

        let d3 = RationalDensity::for_k(3).unwrap();
        let s = scaled_error(239, 202, &d3).unwrap();
        assert!((s.scaled - 1.274_166_398_1).abs() < 1e-9, "{}", s.scaled);

        // x = 1: tracker is V - U, scaled close to 1 - 1/zeta(2)
        let s = scaled_error(1, 1, &d2).unwrap();
        assert_eq!(s.tracker, (V2 - U2) as i64);
        assert!((s.scaled - (1.0 - 0.607_927_101_854_026_6)).abs() < 1e-12);
    }

    #[test]
    fn tracker_exact_vs_float_path() {
        let d2 = RationalDensity::for_k(2).unwrap();
        let (mob, _) = tables(1100);
        for x in [5u64, 43, 1000, 65_536, 999_983, 1_000_000] {
            let q = qk_direct(x, 2, &mob).unwrap();
            let fast = scaled_error(x, q, &d2).unwrap();
            let exact = scaled_error_exact(x, q, &d2, 160);
            let diff = (Float::with_val(160, fast.scaled) - &exact).abs();
            assert!(diff < 1e-13, "x={x} diff={diff}");
        }
    }
}
