//! High-precision building blocks: a complex type over MPFR floats,
//! Bernoulli numbers, and a Stirling-series log-gamma.
//!
//! MPFR has no complex layer (and this crate does not link MPC), so the
//! small amount of complex arithmetic the zeta code needs is spelled out
//! here over pairs of `rug::Float`.

use once_cell::sync::Lazy;
use rug::{Float, Integer, Rational};
use std::sync::Mutex;

/// Complex number as a pair of MPFR floats of equal precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl Cx {
    pub fn new(prec: u32, re: f64, im: f64) -> Self {
        Cx {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        Cx { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Cx {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Cx {
            re,
            im: Float::new(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        Cx {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: self.re.clone() + &o.re,
            im: self.im.clone() + &o.im,
        }
    }

    pub fn sub(&self, o: &Cx) -> Cx {
        Cx {
            re: self.re.clone() - &o.re,
            im: self.im.clone() - &o.im,
        }
    }

    pub fn neg(&self) -> Cx {
        Cx {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn mul(&self, o: &Cx) -> Cx {
        let re = self.re.clone() * &o.re - self.im.clone() * &o.im;
        let im = self.re.clone() * &o.im + self.im.clone() * &o.re;
        Cx { re, im }
    }

    pub fn mul_real(&self, r: &Float) -> Cx {
        Cx {
            re: self.re.clone() * r,
            im: self.im.clone() * r,
        }
    }

    pub fn div(&self, o: &Cx) -> Cx {
        let den: Float = o.re.clone().square() + o.im.clone().square();
        let re: Float = (self.re.clone() * &o.re + self.im.clone() * &o.im) / &den;
        let im: Float = (self.im.clone() * &o.re - self.re.clone() * &o.im) / &den;
        Cx { re, im }
    }

    pub fn recip(&self) -> Cx {
        let den: Float = self.re.clone().square() + self.im.clone().square();
        Cx {
            re: self.re.clone() / &den,
            im: -(self.im.clone() / &den),
        }
    }

    pub fn abs(&self) -> Float {
        let s: Float = self.re.clone().square() + self.im.clone().square();
        s.sqrt()
    }

    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    /// exp(a + bi) = e^a (cos b + i sin b)
    pub fn exp(&self) -> Cx {
        let prec = self.prec();
        let ea = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(prec));
        Cx {
            re: ea.clone() * c,
            im: ea * s,
        }
    }

    /// Principal branch log: ln|z| + i arg(z)
    pub fn ln(&self) -> Cx {
        Cx {
            re: self.abs().ln(),
            im: self.arg(),
        }
    }

    /// sin(a + bi) = sin a cosh b + i cos a sinh b
    pub fn sin(&self) -> Cx {
        let prec = self.prec();
        let (sa, ca) = self.re.clone().sin_cos(Float::new(prec));
        Cx {
            re: sa * self.im.clone().cosh(),
            im: ca * self.im.clone().sinh(),
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

static BERNOULLI: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| Mutex::new(vec![Rational::from(1)]));

/// Bernoulli number B_n (B_1 = -1/2 convention), computed by the defining
/// recurrence and cached for the life of the process.
pub fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len(); // computing B_m
        if m % 2 == 1 && m > 1 {
            cache.push(Rational::new());
            continue;
        }
        // sum_{j=0}^{m-1} C(m+1, j) B_j = -(m+1) B_m ... rearranged from
        // sum_{j=0}^{m} C(m+1, j) B_j = 0 for m >= 1.
        let mut acc = Rational::new();
        for (j, bj) in cache.iter().enumerate().take(m) {
            if bj.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let c = Integer::binomial_u(m as u32 + 1, j as u32);
            acc += Rational::from(bj * Integer::from(c));
        }
        acc /= -Rational::from((m as u32 + 1, 1u32));
        cache.push(acc);
    }
    cache[n].clone()
}

/// B_{2j} / (2j)! as a float at the given precision.
pub fn bernoulli_over_factorial(two_j: usize, prec: u32) -> Float {
    let b = bernoulli(two_j);
    let f = Integer::factorial(two_j as u32);
    let num = Float::with_val(prec, b.numer());
    let den = Float::with_val(prec, b.denom()) * Float::with_val(prec, Integer::from(f));
    num / den
}

/// pi at the given precision.
pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// Principal-branch log-gamma by the Stirling series, with argument
/// shifting: ln G(z) = ln G(z+m) - sum ln(z+i). Accurate to roughly the
/// working precision; callers give themselves headroom by choosing prec.
pub fn lngamma(z: &Cx) -> Cx {
    let prec = z.prec();
    let digits = prec as f64 * 0.30103;
    let terms = ((0.7 * digits).ceil() as usize).clamp(10, 80);
    let min_re = (0.6 * digits).max(12.0);

    // shift z right until Stirling converges comfortably
    let mut shift = 0u32;
    let re_f = z.re.to_f64();
    if re_f < min_re {
        shift = (min_re - re_f).ceil() as u32;
    }
    let zs = Cx {
        re: self::add_f64(&z.re, shift as f64),
        im: z.im.clone(),
    };

    // Stirling: (z - 1/2) ln z - z + ln(2 pi)/2 + sum_j B_2j / (2j(2j-1) z^(2j-1))
    let ln_z = zs.ln();
    let half = Float::with_val(prec, 0.5);
    let zm_half = Cx {
        re: zs.re.clone() - &half,
        im: zs.im.clone(),
    };
    let two_pi = pi(prec) * 2u32;
    let mut acc = zm_half.mul(&ln_z).sub(&zs);
    acc.re += two_pi.ln() / 2u32;

    let z_inv = zs.recip();
    let z_inv_sq = z_inv.mul(&z_inv);
    let mut zpow = z_inv.clone(); // z^-(2j-1)
    for j in 1..=terms {
        let b = bernoulli(2 * j);
        if b.cmp0() != std::cmp::Ordering::Equal {
            let coeff = Float::with_val(prec, &b) / Float::with_val(prec, (2 * j * (2 * j - 1)) as u64);
            acc = acc.add(&zpow.mul_real(&coeff));
        }
        zpow = zpow.mul(&z_inv_sq);
    }

    // undo the shift: ln G(z) = ln G(z + m) - sum_{i=0}^{m-1} ln(z + i)
    for i in 0..shift {
        let zi = Cx {
            re: self::add_f64(&z.re, i as f64),
            im: z.im.clone(),
        };
        acc = acc.sub(&zi.ln());
    }
    acc
}

fn add_f64(x: &Float, v: f64) -> Float {
    let mut y = x.clone();
    y += v;
    y
}
