//! Numeric kernels shared by every other module: the parameter set, Pochhammer
//! symbols, roots of unity, the Gauss series and terminating balanced `4F3` sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute part of the default comparison tolerance.
pub const ATOL: f64 = 1e-12;
/// Relative part of the default comparison tolerance.
pub const RTOL: f64 = 1e-10;

/// Relative truncation tolerance on the running sum of the Gauss series.
pub const SERIES_TOL: f64 = 1e-15;
/// Hard cap on the number of Gauss series terms.
pub const SERIES_TERM_CAP: usize = 10_000;
/// Largest argument the weight module feeds to the direct series.
pub const V_SPLIT: f64 = 0.5;

/// `|x - y| <= atol + rtol * max(|x|, |y|)`.
pub fn close(x: f64, y: f64, atol: f64, rtol: f64) -> bool {
    (x - y).abs() <= atol + rtol * x.abs().max(y.abs())
}

/// Complex version of [`close`].
pub fn close_c(x: Complex64, y: Complex64, atol: f64, rtol: f64) -> bool {
    (x - y).norm() <= atol + rtol * x.norm().max(y.norm())
}

/// The configuration `(m, ell, kappa)` with its derived constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Params {
    pub m: usize,
    pub ell: usize,
    pub kappa: f64,
    /// `(m - ell) / m`
    pub lambda1: f64,
    /// `ell / m`
    pub lambda2: f64,
    /// `1/2 - ell/m`
    pub delta: f64,
    #[serde(skip)]
    roots: Vec<Complex64>,
}

impl PartialEq for Params {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.ell == other.ell && self.kappa == other.kappa
    }
}

impl Params {
    pub fn new(m: usize, ell: usize, kappa: f64) -> Result<Self> {
        if m < 3 {
            return Err(Error::InvalidParams(format!("m = {m} must be >= 3")));
        }
        let ell_max = (m - 1) / 2;
        if ell < 1 || ell > ell_max {
            return Err(Error::InvalidParams(format!(
                "ell = {ell} must satisfy 1 <= ell <= floor((m-1)/2) = {ell_max}"
            )));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidParams(format!("kappa = {kappa} is not finite")));
        }
        let mf = m as f64;
        Ok(Params {
            m,
            ell,
            kappa,
            lambda1: (m - ell) as f64 / mf,
            lambda2: ell as f64 / mf,
            delta: 0.5 - ell as f64 / mf,
            roots: root_table(m),
        })
    }

    /// Same `(m, ell)` with a different `kappa`.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Params::new(self.m, self.ell, kappa)
    }

    /// Fails unless `|kappa| < 1/2`, the bound under which the weight is integrable.
    pub fn require_integrable(&self) -> Result<()> {
        if self.kappa.abs() < 0.5 {
            Ok(())
        } else {
            Err(Error::NotIntegrable(self.kappa))
        }
    }

    /// `|kappa| < ell/m`: the form and the weight are positive-definite.
    pub fn is_positive_regime(&self) -> bool {
        self.kappa.abs() < self.lambda2
    }

    /// `lambda_j` for family `j` in {1, 2}.
    pub fn lambda(&self, family: u8) -> f64 {
        if family == 1 {
            self.lambda1
        } else {
            self.lambda2
        }
    }

    /// `omega = exp(2 pi i / m)`.
    pub fn omega(&self) -> Complex64 {
        self.roots[1 % self.m]
    }

    /// `omega^k` for any integer `k`, read from the cached table.
    pub fn omega_pow(&self, k: i64) -> Complex64 {
        self.roots[k.rem_euclid(self.m as i64) as usize]
    }

    /// The table `omega^j`, `j = 0..m-1`.
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }
}

fn root_table(m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|j| {
            // exact values on the axes
            if (4 * j) % m != 0 {
                return Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            }
            match 4 * j / m {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            }
        })
        .collect()
}

/// Table of `omega^j` for `j = 0..m-1`.
pub fn root_of_unity_powers(params: &Params) -> Vec<Complex64> {
    params.roots.clone()
}

/// Rising factorial `a (a+1) ... (a+n-1)`, computed as a forward product.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Gauss hypergeometric series `2F1(a, b; c; v)` summed directly.
///
/// Accepts `v` in `[0, 1)`; callers keep `v <= V_SPLIT` for fast convergence and use
/// connection formulas beyond.
pub fn gauss_2f1(a: f64, b: f64, c: f64, v: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::DenominatorPole { param: c, index: (-c) as usize });
    }
    if !(0.0..1.0).contains(&v) {
        return Err(Error::Domain(format!("2F1 argument v = {v} not in [0, 1)")));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut small_run = 0;
    for k in 0..SERIES_TERM_CAP {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * v;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= SERIES_TOL * sum.abs() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence { terms: SERIES_TERM_CAP, last_term: term.abs() })
}

/// Sum a generalized hypergeometric series at unit argument that terminates because some
/// numerator parameter is a nonpositive integer. Summation runs exactly to that index.
pub fn terminating_pfq(num: &[f64], den: &[f64]) -> Result<f64> {
    let stop = num
        .iter()
        .filter(|&&a| is_nonpositive_integer(a))
        .map(|&a| (-a) as usize)
        .min()
        .ok_or(Error::NotTerminating)?;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..stop {
        let kf = k as f64;
        let mut ratio = 1.0 / (kf + 1.0);
        for &a in num {
            ratio *= a + kf;
        }
        for &b in den {
            if b + kf == 0.0 {
                return Err(Error::DenominatorPole { param: b, index: k });
            }
            ratio /= b + kf;
        }
        term *= ratio;
        sum += term;
    }
    Ok(sum)
}

/// Which of the two balanced `4F3` families in the Q-coefficient formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Balanced4F3 {
    /// `4F3(1-j, j-n, 1-kappa, 1+kappa; 2, lambda+1, -lambda-n+1; 1)`
    Coeff1,
    /// `4F3(-j, j-n, -kappa, kappa; 1, lambda, -lambda-n; 1)`
    Coeff2,
}

pub fn balanced_4f3(j: usize, n: usize, kappa: f64, lambda: f64, variant: Balanced4F3) -> Result<f64> {
    if j > n {
        return Err(Error::Domain(format!("4F3 index j = {j} exceeds n = {n}")));
    }
    let (jf, nf) = (j as f64, n as f64);
    match variant {
        Balanced4F3::Coeff1 => terminating_pfq(
            &[1.0 - jf, jf - nf, 1.0 - kappa, 1.0 + kappa],
            &[2.0, lambda + 1.0, -lambda - nf + 1.0],
        ),
        Balanced4F3::Coeff2 => terminating_pfq(
            &[-jf, jf - nf, -kappa, kappa],
            &[1.0, lambda, -lambda - nf],
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(0.5, 0), 1.0);
        assert_eq!(pochhammer(2.0, 3), 24.0);
        let lam2 = 1.0 / 3.0;
        assert!(close(pochhammer(lam2 + 1.0 / 6.0, 2), 0.75, ATOL, RTOL));
    }

    #[test]
    fn pochhammer_step() {
        for &a in &[-2.7, -0.5, 0.1, 1.0 / 3.0, 4.25] {
            for n in 0..30 {
                let lhs = pochhammer(a, n + 1);
                let rhs = pochhammer(a, n) * (a + n as f64);
                assert!(close(lhs, rhs, ATOL, RTOL), "a={a} n={n}");
            }
        }
    }

    #[test]
    fn gauss_series_values() {
        assert_eq!(gauss_2f1(0.3, -0.7, 1.2, 0.0).unwrap(), 1.0);
        // cos(delta phi) at kappa = 0
        let (delta, phi) = (0.2_f64, 1.0_f64);
        let v = (phi / 2.0).sin().powi(2);
        let got = gauss_2f1(delta, -delta, 0.5, v).unwrap();
        assert!(close(got, (delta * phi).cos(), 1e-14, 1e-13));
        // -ln(1-v)/v
        let got = gauss_2f1(1.0, 1.0, 2.0, 0.5).unwrap();
        let oracle: f64 = (1..=60).map(|k| 0.5_f64.powi(k - 1) / k as f64).sum();
        assert!(close(got, oracle, 1e-14, 1e-13));
        assert!(close(got, 1.386_294_361_119_890_6, 1e-14, 1e-13));
    }

    #[test]
    fn gauss_series_with_zero_parameter_is_one() {
        for &v in &[0.0, 0.1, 0.49, 0.9] {
            assert_eq!(gauss_2f1(0.7, 0.0, 1.3, v).unwrap(), 1.0);
        }
    }

    #[test]
    fn gauss_series_errors() {
        assert!(matches!(gauss_2f1(0.5, 0.5, -2.0, 0.1), Err(Error::DenominatorPole { .. })));
        assert!(matches!(gauss_2f1(0.5, 0.5, 1.0, 1.0), Err(Error::Domain(_))));
        // 1/(1-v)^{2} at v extremely close to 1 needs far more than the cap
        match gauss_2f1(2.0, 1.0, 1.0, 1.0 - 1e-9) {
            Err(Error::NonConvergence { last_term, .. }) => assert!(last_term > 0.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn balanced_values() {
        for n in 0..6 {
            assert_eq!(balanced_4f3(0, n, 0.3, 0.4, Balanced4F3::Coeff2).unwrap(), 1.0);
        }
        assert_eq!(balanced_4f3(1, 1, 0.25, 1.0 / 3.0, Balanced4F3::Coeff2).unwrap(), 1.0);
        // j = 1 makes the first numerator parameter zero: only the k = 0 term survives
        let got = balanced_4f3(1, 2, 0.25, 2.0 / 3.0, Balanced4F3::Coeff1).unwrap();
        assert_eq!(got, 1.0);
    }

    #[test]
    fn balanced_matches_direct_sum() {
        // independent term-by-term sum with Pochhammer products
        let (kappa, lambda) = (0.2, 2.0 / 3.0);
        for n in 1..10usize {
            for j in 1..=n {
                let (jf, nf) = (j as f64, n as f64);
                let mut oracle = 0.0;
                for k in 0..=n {
                    let num = pochhammer(1.0 - jf, k)
                        * pochhammer(jf - nf, k)
                        * pochhammer(1.0 - kappa, k)
                        * pochhammer(1.0 + kappa, k);
                    let den = pochhammer(2.0, k)
                        * pochhammer(lambda + 1.0, k)
                        * pochhammer(-lambda - nf + 1.0, k)
                        * pochhammer(1.0, k);
                    oracle += num / den;
                }
                let got = balanced_4f3(j, n, kappa, lambda, Balanced4F3::Coeff1).unwrap();
                assert!(close(got, oracle, 1e-13, 1e-12), "j={j} n={n}");
            }
        }
    }

    #[test]
    fn pfq_errors() {
        assert_eq!(terminating_pfq(&[0.5], &[1.0]), Err(Error::NotTerminating));
        assert!(matches!(
            terminating_pfq(&[-3.0], &[-1.0]),
            Err(Error::DenominatorPole { index: 1, .. })
        ));
    }

    #[test]
    fn roots_of_unity() {
        let p4 = Params::new(4, 1, 0.1).unwrap();
        let r = root_of_unity_powers(&p4);
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (a, b) in r.iter().zip(want) {
            assert!(close_c(*a, b, 1e-15, 0.0));
        }
        let p3 = Params::new(3, 1, 0.1).unwrap();
        let r = root_of_unity_powers(&p3);
        assert!(close_c(r[1], Complex64::from_polar(1.0, 2.0 * PI / 3.0), 1e-15, 0.0));
        assert!(close_c(r[2], Complex64::from_polar(1.0, 4.0 * PI / 3.0), 1e-15, 0.0));
        let p5 = Params::new(5, 2, 0.1).unwrap();
        assert!(close_c(p5.omega_pow(1) * p5.omega_pow(4), Complex64::new(1.0, 0.0), 1e-15, 0.0));
    }

    #[test]
    fn root_orthogonality() {
        for m in 3..=9 {
            let p = Params::new(m, 1, 0.0).unwrap();
            let mi = m as i64;
            assert!(close_c(p.omega().powu(m as u32), Complex64::new(1.0, 0.0), 1e-13, 0.0));
            for n in -3 * mi..=3 * mi {
                let s: Complex64 = (0..mi).map(|j| p.omega_pow(j * n)).sum();
                let want = if n % mi == 0 { m as f64 } else { 0.0 };
                assert!((s - want).norm() <= 1e-12, "m={m} n={n}");
            }
            for j in 0..m {
                for k in 0..j {
                    assert!((p.roots()[j] - p.roots()[k]).norm() > 1e-3);
                }
            }
        }
    }

    #[test]
    fn params_validation_and_invariants() {
        assert!(Params::new(2, 1, 0.0).is_err());
        assert!(Params::new(6, 3, 0.0).is_err());
        assert!(Params::new(5, 0, 0.0).is_err());
        assert!(Params::new(5, 2, f64::NAN).is_err());
        for m in 3..=9 {
            for ell in 1..=(m - 1) / 2 {
                let p = Params::new(m, ell, 0.1).unwrap();
                assert!(0.0 < p.lambda2 && p.lambda2 < 0.5 && 0.5 < p.lambda1 && p.lambda1 < 1.0);
                assert!(close(p.delta, p.lambda1 - 0.5, 1e-15, 0.0));
                assert!(close(p.delta, 0.5 - p.lambda2, 1e-15, 0.0));
                assert!(p.delta > 0.0 && p.delta < 0.5);
            }
        }
        let p = Params::new(3, 1, 0.6).unwrap();
        assert_eq!(p.require_integrable(), Err(Error::NotIntegrable(0.6)));
        assert!(!p.is_positive_regime());
        assert!(Params::new(3, 1, 0.3).unwrap().is_positive_regime());
    }
}
