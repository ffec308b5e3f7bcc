//! Complex Riemann zeta evaluation, zeros ingestion, derivatives at zeros,
//! and the residue terms zeta(rho_n/k) / (rho_n zeta'(rho_n)).
//!
//! Zeros are external data: a plain text file with one ordinate per line,
//! ascending, at least nine digits after the decimal point. A quality gate
//! (|zeta(1/2 + i gamma_n)| must be tiny) replaces trust in that file.
//!
//! The evaluator is Euler-Maclaurin with Bernoulli corrections and an
//! a-posteriori remainder bound; the truncation point N is raised until the
//! bound meets the target. For Re(s) < -1/2 the functional equation
//! zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s) is applied.

use crate::hp::{bernoulli_over_factorial, lngamma, pi, Cx};
use crate::{Error, Result};
use rug::ops::Pow;
use rug::{Float, Integer};
use std::io::BufRead;
use std::sync::RwLock;

/// One nontrivial zero rho_n = 1/2 + i gamma_n, indexed from 1.
#[derive(Debug, Clone)]
pub struct ZetaZero {
    pub index: usize,
    pub gamma: Float,
}

/// Ordered zero ordinates plus the number of decimals the source supplied.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    zeros: Vec<ZetaZero>,
    decimals: usize,
}

impl ZeroTable {
    /// Parse a zeros stream: one decimal ordinate per line, strictly
    /// ascending, >= 9 digits after the point.
    pub fn load<R: BufRead>(reader: R) -> Result<ZeroTable> {
        let mut zeros = Vec::new();
        let mut decimals = usize::MAX;
        let mut prev: Option<Float> = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let tok = line.trim();
            if tok.is_empty() {
                continue;
            }
            let frac = tok
                .split_once('.')
                .map(|(_, f)| f.len())
                .unwrap_or(0);
            if frac < 9 {
                return Err(Error::ZerosFormat(format!(
                    "line {}: ordinate has {} decimals, need at least 9",
                    lineno + 1,
                    frac
                )));
            }
            decimals = decimals.min(frac);
            // parse at a precision comfortably above the printed digits
            let prec = ((tok.len() as f64) * 3.33).ceil() as u32 + 16;
            let val = Float::parse(tok)
                .map(|p| Float::with_val(prec, p))
                .map_err(|e| {
                    Error::ZerosFormat(format!("line {}: {e}", lineno + 1))
                })?;
            if val.is_sign_negative() || !val.is_finite() {
                return Err(Error::ZerosFormat(format!(
                    "line {}: ordinate must be a positive finite number",
                    lineno + 1
                )));
            }
            if let Some(p) = &prev {
                if val <= *p {
                    return Err(Error::ZerosFormat(format!(
                        "line {}: ordinates must be strictly ascending",
                        lineno + 1
                    )));
                }
            }
            prev = Some(val.clone());
            zeros.push(ZetaZero {
                index: zeros.len() + 1,
                gamma: val,
            });
        }
        if zeros.is_empty() {
            return Err(Error::ZerosFormat("empty zeros stream".into()));
        }
        let g1 = zeros[0].gamma.to_f64();
        if !(14.0 < g1 && g1 < 15.0) {
            return Err(Error::ZerosFormat(format!(
                "first ordinate {g1} outside the sanity window (14, 15)"
            )));
        }
        Ok(ZeroTable { zeros, decimals })
    }

    pub fn load_path(path: &std::path::Path) -> Result<ZeroTable> {
        let f = std::fs::File::open(path)?;
        ZeroTable::load(std::io::BufReader::new(f))
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Decimals after the point guaranteed by every line of the source.
    pub fn decimals(&self) -> usize {
        self.decimals
    }

    /// 1-based access.
    pub fn gamma(&self, n: usize) -> Result<&Float> {
        self.zeros
            .get(n - 1)
            .map(|z| &z.gamma)
            .ok_or_else(|| Error::OutOfRange(format!("zero index {n} of {}", self.zeros.len())))
    }

    pub fn iter(&self) -> impl Iterator<Item = &ZetaZero> {
        self.zeros.iter()
    }

    /// Number of zeros with ordinate strictly below t.
    pub fn count_below(&self, t: f64) -> usize {
        self.zeros.partition_point(|z| z.gamma.to_f64() < t)
    }
}

/// Residue of G_k at i gamma_n / k: zeta(rho_n/k) / (rho_n zeta'(rho_n)),
/// surfaced in double precision with a propagated error estimate.
#[derive(Debug, Clone, Copy)]
pub struct ResidueTerm {
    pub n: usize,
    pub k: u32,
    pub value: (f64, f64),
    pub abs: f64,
    pub precision_estimate: f64,
}

/// Euler-Maclaurin zeta evaluator at a fixed working precision.
pub struct ZetaEngine {
    prec: u32,
    correction_terms: usize,
    ln_cache: RwLock<Vec<Float>>,
    coeff_cache: RwLock<Vec<Float>>, // B_{2j}/(2j)! at working precision
}

impl ZetaEngine {
    pub fn new(prec: u32) -> ZetaEngine {
        let correction_terms = ((prec as usize) / 6).clamp(15, 80);
        ZetaEngine {
            prec,
            correction_terms,
            ln_cache: RwLock::new(vec![Float::new(prec), Float::new(prec)]), // ln 0 unused, ln 1 = 0
            coeff_cache: RwLock::new(Vec::new()),
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    fn ensure_ln(&self, n: usize) {
        {
            let cache = self.ln_cache.read().unwrap();
            if cache.len() > n {
                return;
            }
        }
        let mut cache = self.ln_cache.write().unwrap();
        while cache.len() <= n {
            let v = cache.len();
            cache.push(Float::with_val(self.prec, v as u64).ln());
        }
    }

    fn ensure_coeff(&self, j: usize) {
        {
            let cache = self.coeff_cache.read().unwrap();
            if cache.len() > j {
                return;
            }
        }
        let mut cache = self.coeff_cache.write().unwrap();
        while cache.len() <= j {
            let v = cache.len();
            cache.push(bernoulli_over_factorial(2 * (v + 1), self.prec));
        }
    }

    /// zeta(s). Uses the reflection formula for Re(s) < -1/2.
    pub fn zeta(&self, s: &Cx) -> Result<Cx> {
        if s.im.to_f64() == 0.0 && s.re.to_f64() == 1.0 {
            return Err(Error::Precondition("zeta has a pole at s = 1".into()));
        }
        if s.re.to_f64() < -0.5 {
            return self.reflect(s);
        }
        let (z, _, _) = self.euler_maclaurin(s, false)?;
        Ok(z)
    }

    /// zeta(s) and zeta'(s) in one Euler-Maclaurin pass (direct region only).
    pub fn zeta_with_deriv(&self, s: &Cx) -> Result<(Cx, Cx)> {
        if s.re.to_f64() < -0.5 {
            return Err(Error::Precondition(
                "zeta_with_deriv requires Re(s) >= -1/2".into(),
            ));
        }
        let (z, d, _) = self.euler_maclaurin(s, true)?;
        Ok((z, d.expect("derivative requested")))
    }

    fn reflect(&self, s: &Cx) -> Result<Cx> {
        let prec = self.prec;
        let one_minus_s = Cx {
            re: Float::with_val(prec, 1) - &s.re,
            im: -s.im.clone(),
        };
        let (z1ms, _, _) = self.euler_maclaurin(&one_minus_s, false)?;
        Ok(self.chi(s).mul(&z1ms))
    }

    /// zeta(s) forced through the functional equation, regardless of Re(s).
    /// Used to cross-check the direct evaluation inside the critical strip.
    pub fn zeta_via_reflection(&self, s: &Cx) -> Result<Cx> {
        self.reflect(s)
    }

    /// chi(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s)
    fn chi(&self, s: &Cx) -> Cx {
        let prec = self.prec;
        let ln2 = Float::with_val(prec, 2).ln();
        let lnpi = pi(prec).ln();
        let one_minus_s = Cx {
            re: Float::with_val(prec, 1) - &s.re,
            im: -s.im.clone(),
        };
        // exp(s ln2 + (s-1) ln pi + lnGamma(1-s))
        let mut expo = s.mul_real(&ln2);
        let s_minus_1 = Cx {
            re: s.re.clone() - 1u32,
            im: s.im.clone(),
        };
        expo = expo.add(&s_minus_1.mul_real(&lnpi));
        expo = expo.add(&lngamma(&one_minus_s));
        let half_pi_s = s.mul_real(&(pi(prec) / 2u32));
        expo.exp().mul(&half_pi_s.sin())
    }

    /// Core Euler-Maclaurin evaluation with adaptive N:
    ///   zeta(s) = sum_{n<=N} n^-s + N^(1-s)/(s-1) - N^-s/2
    ///           + sum_{j<=J} B_2j/(2j)! (s)_{2j-1} N^(-s-2j+1) + R_J
    /// with |R_J| <= |(s+2J+1)/(sigma+2J+1)| * |next correction term|.
    fn euler_maclaurin(&self, s: &Cx, want_deriv: bool) -> Result<(Cx, Option<Cx>, Float)> {
        let prec = self.prec;
        let target = Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 8)));
        let t_abs = s.im.to_f64().abs();
        let sigma = s.re.to_f64();
        let j_terms = self.correction_terms;
        self.ensure_coeff(j_terms + 1);

        let mut n = ((t_abs + 2.0 * j_terms as f64) * 0.33).ceil().max(24.0) as usize;
        let mut head = Cx::zero(prec);
        let mut dhead = Cx::zero(prec);
        let mut summed = 0usize;

        for _round in 0..40 {
            self.ensure_ln(n);
            {
                let lns = self.ln_cache.read().unwrap();
                for m in (summed + 1)..=n {
                    // m^-s = exp(-s ln m)
                    let ln_m = &lns[m];
                    let term = Cx {
                        re: -(s.re.clone() * ln_m),
                        im: -(s.im.clone() * ln_m),
                    }
                    .exp();
                    if want_deriv {
                        dhead = dhead.sub(&term.mul_real(ln_m));
                    }
                    head = head.add(&term);
                }
            }
            summed = n;

            let (tail, dtail, bound) = self.em_tail(s, n, j_terms, want_deriv);
            if bound < target {
                let z = head.add(&tail);
                let d = if want_deriv {
                    Some(dhead.add(&dtail.expect("deriv tail")))
                } else {
                    None
                };
                return Ok((z, d, bound));
            }
            if n > (1 << 24) {
                return Err(Error::Precision(format!(
                    "euler-maclaurin did not converge at sigma={sigma}, |t|={t_abs}, N={n}"
                )));
            }
            n *= 2;
        }
        Err(Error::Precision("euler-maclaurin iteration cap".into()))
    }

    /// Integral, pole, and Bernoulli-correction terms at truncation N,
    /// together with the a-posteriori remainder bound.
    fn em_tail(
        &self,
        s: &Cx,
        n: usize,
        j_terms: usize,
        want_deriv: bool,
    ) -> (Cx, Option<Cx>, Float) {
        let prec = self.prec;
        let n_f = Float::with_val(prec, n as u64);
        let ln_n = n_f.clone().ln();

        // N^(1-s) = exp((1-s) ln N)
        let one_minus_s = Cx {
            re: Float::with_val(prec, 1) - &s.re,
            im: -s.im.clone(),
        };
        let n_pow_1ms = one_minus_s.mul_real(&ln_n).exp();
        let n_pow_ms = Cx {
            re: -(s.re.clone() * &ln_n),
            im: -(s.im.clone() * &ln_n),
        }
        .exp();

        let s_minus_1 = Cx {
            re: s.re.clone() - 1u32,
            im: s.im.clone(),
        };
        let integral = n_pow_1ms.div(&s_minus_1);
        let mut tail = integral.clone();
        let half = Float::with_val(prec, 0.5);
        tail = tail.sub(&n_pow_ms.mul_real(&half));

        let mut dtail = if want_deriv {
            // d/ds [N^(1-s)/(s-1)] = -N^(1-s) (lnN/(s-1) + 1/(s-1)^2)
            let mut d = integral.mul_real(&ln_n).neg();
            d = d.sub(&integral.div(&s_minus_1));
            // d/ds [-N^-s/2] = lnN N^-s / 2
            d = d.add(&n_pow_ms.mul_real(&(ln_n.clone() / 2u32)));
            Some(d)
        } else {
            None
        };

        // corrections: term_j = B_2j/(2j)! * P_j * N^(1-s) * N^(-2j)
        // with P_j = s(s+1)...(s+2j-2) built incrementally.
        let coeffs = self.coeff_cache.read().unwrap();
        let n_inv_sq = Float::with_val(prec, n as u64).recip().square();
        let mut p = s.clone(); // P_1 = s
        let mut h = s.recip(); // sum of 1/(s+i), i = 0..2j-2
        let mut npow = Float::with_val(prec, &n_inv_sq); // N^{-2j}
        let mut last_term_mag = Float::new(prec);
        for j in 1..=j_terms {
            let term = p.mul(&n_pow_1ms).mul_real(&(coeffs[j - 1].clone() * &npow));
            tail = tail.add(&term);
            if want_deriv {
                // d/ds term = term * (H_j - lnN), H_j = sum 1/(s+i)
                let factor = Cx {
                    re: h.re.clone() - &ln_n,
                    im: h.im.clone(),
                };
                let dt = term.mul(&factor);
                dtail = dtail.map(|d| d.add(&dt));
            }
            last_term_mag = term.abs();
            // advance P, H to order j+1
            let a = Cx {
                re: s.re.clone() + (2 * j as u32 - 1),
                im: s.im.clone(),
            };
            let b = Cx {
                re: s.re.clone() + (2 * j as u32),
                im: s.im.clone(),
            };
            h = h.add(&a.recip()).add(&b.recip());
            p = p.mul(&a).mul(&b);
            npow *= &n_inv_sq;
        }

        // remainder bound: |(s + 2J + 1)/(sigma + 2J + 1)| * |T_{J+1}|
        let next_term = p
            .mul(&n_pow_1ms)
            .mul_real(&(coeffs[j_terms].clone() * &npow))
            .abs();
        let s_shift = Cx {
            re: s.re.clone() + (2 * j_terms as u32 + 1),
            im: s.im.clone(),
        };
        let denom = s.re.clone() + (2 * j_terms as u32 + 1);
        let mut bound: Float = next_term * s_shift.abs() / denom;
        if want_deriv {
            // derivative remainder grows by roughly a lnN factor; fold in a
            // generous multiplier so the reported bound stays conservative
            let lnfac = Float::with_val(prec, 4) * (ln_n.clone() + 2u32);
            bound *= lnfac;
        }
        let _ = last_term_mag;
        (tail, dtail, bound)
    }

    /// zeta'(-2j) = (-1)^j (2j)! zeta(2j+1) / (2 (2pi)^(2j)), from the
    /// differentiated functional equation at the trivial zeros.
    pub fn zeta_deriv_neg_even(&self, j: u32) -> Float {
        let prec = self.prec;
        let fact = Float::with_val(prec, Integer::from(Integer::factorial(2 * j)));
        let z = Float::with_val(prec, Float::zeta_u(2 * j + 1));
        let two_pi_pow = (pi(prec) * 2u32).pow(2 * j as i32);
        let mut v = fact * z / (two_pi_pow * 2u32);
        if j % 2 == 1 {
            v = -v;
        }
        v
    }

    /// rho_n as a complex at engine precision.
    pub fn rho(&self, zeros: &ZeroTable, n: usize) -> Result<Cx> {
        let gamma = zeros.gamma(n)?;
        Ok(Cx {
            re: Float::with_val(self.prec, 0.5),
            im: Float::with_val(self.prec, gamma),
        })
    }

    /// zeta'(rho_n).
    pub fn zeta_deriv_at_zero(&self, zeros: &ZeroTable, n: usize) -> Result<Cx> {
        let rho = self.rho(zeros, n)?;
        let (_, d) = self.zeta_with_deriv(&rho)?;
        Ok(d)
    }

    /// |zeta(1/2 + i gamma_n)|, the zero-quality gate value.
    pub fn zero_residual(&self, zeros: &ZeroTable, n: usize) -> Result<Float> {
        let rho = self.rho(zeros, n)?;
        Ok(self.zeta(&rho)?.abs())
    }

    /// Residue term zeta(rho_n/k) / (rho_n zeta'(rho_n)).
    pub fn residue(&self, zeros: &ZeroTable, n: usize, k: u32) -> Result<ResidueTerm> {
        let rho = self.rho(zeros, n)?;
        let (zeta_at_rho, deriv) = self.zeta_with_deriv(&rho)?;
        let k_f = Float::with_val(self.prec, k);
        let rho_over_k = Cx {
            re: rho.re.clone() / &k_f,
            im: rho.im.clone() / &k_f,
        };
        let num = self.zeta(&rho_over_k)?;
        let den = rho.mul(&deriv);
        let value = num.div(&den);
        // the ordinate error delta contributes |zeta(rho)| / |rho zeta'(rho)|
        // (zeta(rho) should be ~zeta''*delta^2 but |zeta(rho)| itself measures
        // how far off the supplied ordinate is), plus the evaluator's own target
        let eval_eps = 2f64.powi(-(self.prec as i32 - 10));
        let est = zeta_at_rho.abs().to_f64() / den.abs().to_f64() + eval_eps;
        Ok(ResidueTerm {
            n,
            k,
            value: value.to_f64_pair(),
            abs: value.abs().to_f64(),
            precision_estimate: est,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine() -> ZetaEngine {
        ZetaEngine::new(192)
    }

    #[test]
    fn zeta_known_real_values() {
        let e = engine();
        // zeta(2) = pi^2/6
        let z = e.zeta(&Cx::new(192, 2.0, 0.0)).unwrap();
        let expect = pi(192).square() / 6u32;
        assert!((z.re.clone() - &expect).abs().to_f64() < 1e-45);
        assert!(z.im.to_f64().abs() < 1e-45);
        // zeta(0) = -1/2
        let z = e.zeta(&Cx::new(192, 0.0, 0.0)).unwrap();
        assert!((z.re.to_f64() + 0.5).abs() < 1e-40);
        // zeta(-2) = 0 (trivial zero, via reflection)
        let z = e.zeta(&Cx::new(192, -2.0, 0.0)).unwrap();
        assert!(z.abs().to_f64() < 1e-40, "{}", z.abs());
        // zeta(-1) = -1/12
        let z = e.zeta(&Cx::new(192, -1.0, 0.0)).unwrap();
        assert!((z.re.to_f64() + 1.0 / 12.0).abs() < 1e-40);
    }

    #[test]
    fn zeta_at_rho1_over_2_matches_independent_oracle() {
        // reference value from an independent multiprecision evaluation
        let e = engine();
        let g1 = 14.134725141734693790457251983562470270784257115699;
        let z = e
            .zeta(&Cx {
                re: Float::with_val(192, 0.25),
                im: Float::with_val(192, g1) / 2u32,
            })
            .unwrap();
        assert!((z.re.to_f64() - 1.031422124998018154896).abs() < 1e-12);
        assert!((z.im.to_f64() - 0.4525564282203487361706).abs() < 1e-12);
    }

    #[test]
    fn deriv_neg_even_values() {
        let e = engine();
        // zeta'(-2) = -zeta(3)/(4 pi^2)
        let d1 = e.zeta_deriv_neg_even(1);
        assert!((d1.to_f64() + 0.030448457058393270780).abs() < 1e-15);
        // sign alternation
        for j in 1..=5u32 {
            let d = e.zeta_deriv_neg_even(j);
            assert_eq!(d.is_sign_negative(), j % 2 == 1, "j={j}");
        }
    }

    #[test]
    fn functional_equation_self_consistency() {
        let e = engine();
        // direct EM vs chi(s) * zeta(1-s) inside the strip
        for &(sig, t) in &[(0.25, 3.0), (0.5, 14.0), (0.75, 21.3), (0.1, 7.7)] {
            let s = Cx::new(192, sig, t);
            let direct = e.zeta(&s).unwrap();
            let one_minus_s = Cx::new(192, 1.0 - sig, -t);
            let reflected = e.chi(&s).mul(&e.zeta(&one_minus_s).unwrap());
            let diff = direct.sub(&reflected).abs().to_f64();
            assert!(diff < 1e-12, "sigma={sig} t={t} diff={diff}");
        }
    }

    #[test]
    fn deriv_matches_finite_difference() {
        let e = engine();
        let s = Cx::new(192, 0.5, 14.134725141734694);
        let (_, d) = e.zeta_with_deriv(&s).unwrap();
        let h = 1e-7;
        let zp = e.zeta(&Cx::new(192, 0.5, s.im.to_f64() + h)).unwrap();
        let zm = e.zeta(&Cx::new(192, 0.5, s.im.to_f64() - h)).unwrap();
        // d/dt zeta(sigma + it) = i zeta'(s) so zeta' = (z(t+h)-z(t-h))/(2ih)
        let fd_re = (zp.im.to_f64() - zm.im.to_f64()) / (2.0 * h);
        let fd_im = -(zp.re.to_f64() - zm.re.to_f64()) / (2.0 * h);
        assert!((d.re.to_f64() - fd_re).abs() < 1e-6);
        assert!((d.im.to_f64() - fd_im).abs() < 1e-6);
        // independent reference for zeta'(rho_1)
        assert!((d.re.to_f64() - 0.7832965118670309286).abs() < 1e-12);
        assert!((d.im.to_f64() - 0.1246998297481710894).abs() < 1e-12);
    }

    #[test]
    fn load_zeros_validation() {
        let good = "14.134725141734693790\n21.022039638771554993\n";
        let t = ZeroTable::load(good.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.decimals(), 18);
        assert!((t.gamma(1).unwrap().to_f64() - 14.1347251417).abs() < 1e-9);

        assert!(ZeroTable::load("".as_bytes()).is_err());
        let out_of_order = "21.022039638771554993\n14.134725141734693790\n";
        assert!(ZeroTable::load(out_of_order.as_bytes()).is_err());
        let malformed = "14.134725141734693790\nnot-a-number\n";
        assert!(ZeroTable::load(malformed.as_bytes()).is_err());
        let low_precision = "14.1347\n";
        assert!(ZeroTable::load(low_precision.as_bytes()).is_err());
    }

    #[test]
    fn residue_is_finite_and_nonzero() {
        let zeros = ZeroTable::load(
            "14.134725141734693790457252\n21.022039638771554992628480\n".as_bytes(),
        )
        .unwrap();
        let e = engine();
        let r = e.residue(&zeros, 1, 2).unwrap();
        assert!(r.abs > 0.0 && r.abs.is_finite());
        // Stark's identity: B_2 = 2 (1 - g1/g2) |res| = 0.0657...
        let g1 = zeros.gamma(1).unwrap().to_f64();
        let g2 = zeros.gamma(2).unwrap().to_f64();
        let b2 = 2.0 * (1.0 - g1 / g2) * r.abs;
        assert!((b2 - 0.0657891).abs() < 1e-6, "{b2}");
    }
}
