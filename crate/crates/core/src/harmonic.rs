//! The harmonic basis: `Q` polynomials, the `P_k` building blocks, the `p_n` tower,
//! the exceptional-degree combinations and point values at `z = 1`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyalg::{sigma0, Component, ScalarPoly, VectorPoly};
use crate::scalars::{balanced_4f3, pochhammer, Balanced4F3, Params};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_family(family: u8) -> Result<()> {
    match family {
        1 | 2 => Ok(()),
        _ => Err(Error::InvalidLabel(format!("family {family} is not 1 or 2"))),
    }
}

/// `(Q^(1)_n, Q^(2)_n)` in `(w, wbar)`, by the coupled recurrence.
pub fn q_pair(n: usize, kappa: f64, lambda: f64) -> (ScalarPoly, ScalarPoly) {
    let mut q1 = ScalarPoly::constant(1.0);
    let mut q2 = ScalarPoly::constant(kappa / lambda);
    for k in 0..n {
        let c = re(kappa / (lambda + k as f64 + 1.0));
        // coupled term carries the argument swap (w, wbar) -> (wbar, w)
        let n1 = &q1.mul_monomial(1, 0, re(1.0)) + &q2.swap_vars().mul_monomial(0, 1, c);
        let n2 = &q1.swap_vars().mul_monomial(0, 1, c) + &q2.mul_monomial(1, 0, re(1.0));
        q1 = n1;
        q2 = n2;
    }
    (q1, q2)
}

/// `Q^(kind)_n(kappa, lambda; w, wbar)`.
pub fn q_poly(kind: u8, n: usize, kappa: f64, lambda: f64) -> Result<ScalarPoly> {
    check_family(kind)?;
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    let (q1, q2) = q_pair(n, kappa, lambda);
    Ok(if kind == 1 { q1 } else { q2 })
}

/// Closed-form coefficient of `w^{n-j} wbar^j` in `Q^(kind)_n`.
pub fn q_coeff_closed(kind: u8, n: usize, j: usize, kappa: f64, lambda: f64) -> Result<f64> {
    check_family(kind)?;
    if j > n {
        return Err(Error::Domain(format!("coefficient index j = {j} exceeds n = {n}")));
    }
    let (jf, nf) = (j as f64, n as f64);
    if kind == 1 {
        if j == 0 {
            return Ok(1.0);
        }
        let pre = kappa * kappa * (nf - jf + 1.0) / (lambda * (lambda + nf));
        Ok(pre * balanced_4f3(j, n, kappa, lambda, Balanced4F3::Coeff1)?)
    } else {
        Ok(kappa / (lambda + jf) * balanced_4f3(j, n, kappa, lambda, Balanced4F3::Coeff2)?)
    }
}

/// `Q^(kind)_n(kappa, lambda; 1, 1)` in closed form.
pub fn q_at_one(kind: u8, n: usize, kappa: f64, lambda: f64) -> Result<f64> {
    check_family(kind)?;
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    let plus = pochhammer(lambda + kappa, n + 1);
    let minus = pochhammer(lambda - kappa, n + 1);
    let sign = if kind == 1 { 1.0 } else { -1.0 };
    Ok((plus + sign * minus) / (2.0 * pochhammer(lambda, n + 1)))
}

/// `(main, mirror)` spin components for a family: family 1 leads with `t`.
fn family_components(family: u8) -> (Component, Component) {
    if family == 1 {
        (Component::T, Component::Tbar)
    } else {
        (Component::Tbar, Component::T)
    }
}

/// Exponent `m - ell` (family 1) or `ell` (family 2).
fn family_shift(family: u8, params: &Params) -> u32 {
    if family == 1 {
        (params.m - params.ell) as u32
    } else {
        params.ell as u32
    }
}

/// The building block `P^(family)_k`, of degree `m(k + lambda_family) + 1`.
pub fn big_p(family: u8, k: usize, params: &Params) -> Result<VectorPoly> {
    check_family(family)?;
    let lambda = params.lambda(family);
    let (q1, q2) = q_pair(k, params.kappa, lambda);
    let m = params.m as u32;
    let s = family_shift(family, params);
    let (main, mirror) = family_components(family);
    let mut out = VectorPoly::zero();
    for (a, b, c) in q1.substitute_powers(m).iter() {
        out.add_term(a + s + 1, b, main, c);
    }
    for (a, b, c) in q2.substitute_powers(m).iter() {
        out.add_term(a + 1, b + s, mirror, c);
    }
    Ok(out)
}

/// Position of `p_n` in the tower: `None` for the monomial range, otherwise `(k, r)` with
/// `p_n = z^r P_k`, `0 <= r < m`.
pub fn tower_position(family: u8, n: usize, params: &Params) -> Option<(usize, usize)> {
    let base = family_shift(family, params) as usize + 1;
    if n < base {
        None
    } else {
        Some(((n - base) / params.m, (n - base) % params.m))
    }
}

/// The harmonic `p^(family)_n`, leading term `z^n t` (family 1) or `z^n tbar` (family 2).
pub fn small_p(family: u8, n: usize, params: &Params) -> Result<VectorPoly> {
    check_family(family)?;
    if n == 0 {
        return Err(Error::Domain("harmonic index n must be >= 1".into()));
    }
    match tower_position(family, n, params) {
        None => Ok(VectorPoly::monomial(n as u32, 0, family_components(family).0, 1.0)),
        Some((k, r)) => Ok(big_p(family, k, params)?.mul_monomial(r as u32, 0, re(1.0))),
    }
}

/// Whether `n` is an exceptional degree for the family: `n = -ell` (family 1) or
/// `n = ell` (family 2) mod m.
pub fn is_exceptional(family: u8, n: usize, params: &Params) -> bool {
    let m = params.m;
    n >= 1
        && match family {
            1 => (n + params.ell).is_multiple_of(m),
            2 => n >= params.ell && (n - params.ell).is_multiple_of(m),
            _ => false,
        }
}

/// `f_n = p_n + (m kappa / n) sigma0 p_n` at an exceptional degree; `Dbar f_n = 0`.
pub fn f_basis(family: u8, n: usize, params: &Params) -> Result<VectorPoly> {
    check_family(family)?;
    if !is_exceptional(family, n, params) {
        return Err(Error::NotExceptional { family, n });
    }
    let p = small_p(family, n, params)?;
    let c = params.m as f64 * params.kappa / n as f64;
    Ok(&p + &sigma0(&p).scale_re(c))
}

/// `f_n` assembled as `P_k / z` with `n = deg P_k - 1`.
pub fn f_basis_from_big_p(family: u8, n: usize, params: &Params) -> Result<VectorPoly> {
    check_family(family)?;
    if !is_exceptional(family, n, params) {
        return Err(Error::NotExceptional { family, n });
    }
    let k = (n - family_shift(family, params) as usize) / params.m;
    let p = big_p(family, k, params)?;
    let mut out = VectorPoly::zero();
    for (a, b, comp, c) in p.iter() {
        debug_assert!(a >= 1);
        out.add_term(a - 1, b, comp, c);
    }
    Ok(out)
}

/// `p^(family)_n(1)` in closed form, as the `(t, tbar)` coefficient pair.
pub fn eval_at_one(family: u8, n: usize, params: &Params) -> Result<(Complex64, Complex64)> {
    check_family(family)?;
    if n == 0 {
        return Err(Error::Domain("harmonic index n must be >= 1".into()));
    }
    let lambda = params.lambda(family);
    // n = m (k + lambda) + r with 1 <= r <= m, k >= -1
    let k1 = (n - 1 + params.m - family_shift(family, params) as usize) / params.m;
    let a = pochhammer(lambda + params.kappa, k1) / pochhammer(lambda, k1);
    let b = pochhammer(lambda - params.kappa, k1) / pochhammer(lambda, k1);
    let (sum, diff) = (0.5 * (a + b), 0.5 * (a - b));
    Ok(if family == 1 { (re(sum), re(diff)) } else { (re(diff), re(sum)) })
}

/// Identifies a basis polynomial of a given degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmonicLabel {
    pub family: u8,
    pub n: usize,
    /// The `sigma0` image of `p_n`.
    pub mirrored: bool,
}

/// Every kind of basis element with a closed-form norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisLabel {
    /// `p_n` or `sigma0 p_n`.
    Harmonic(HarmonicLabel),
    /// `p_n + sigma0 p_n` at an exceptional degree.
    Sum { family: u8, n: usize },
    /// `p_n - sigma0 p_n` at an exceptional degree.
    Diff { family: u8, n: usize },
    /// `f_n` at an exceptional degree.
    F { family: u8, n: usize },
}

impl BasisLabel {
    pub fn p(family: u8, n: usize) -> Self {
        BasisLabel::Harmonic(HarmonicLabel { family, n, mirrored: false })
    }

    pub fn mirrored_p(family: u8, n: usize) -> Self {
        BasisLabel::Harmonic(HarmonicLabel { family, n, mirrored: true })
    }

    pub fn family(&self) -> u8 {
        match *self {
            BasisLabel::Harmonic(h) => h.family,
            BasisLabel::Sum { family, .. } | BasisLabel::Diff { family, .. } | BasisLabel::F { family, .. } => family,
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            BasisLabel::Harmonic(h) => h.n,
            BasisLabel::Sum { n, .. } | BasisLabel::Diff { n, .. } | BasisLabel::F { n, .. } => n,
        }
    }

    /// Build the polynomial this label names.
    pub fn build(&self, params: &Params) -> Result<VectorPoly> {
        match *self {
            BasisLabel::Harmonic(h) => {
                let p = small_p(h.family, h.n, params)?;
                Ok(if h.mirrored { sigma0(&p) } else { p })
            }
            BasisLabel::Sum { family, n } | BasisLabel::Diff { family, n } => {
                if !is_exceptional(family, n, params) {
                    return Err(Error::NotExceptional { family, n });
                }
                let p = small_p(family, n, params)?;
                let s = sigma0(&p);
                Ok(if matches!(self, BasisLabel::Sum { .. }) { &p + &s } else { &p - &s })
            }
            BasisLabel::F { family, n } => f_basis(family, n, params),
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisLabel::Harmonic(h) if h.mirrored => write!(f, "sigma0 p{}_{}", h.family, h.n),
            BasisLabel::Harmonic(h) => write!(f, "p{}_{}", h.family, h.n),
            BasisLabel::Sum { family, n } => write!(f, "p{family}_{n} + sigma0 p{family}_{n}"),
            BasisLabel::Diff { family, n } => write!(f, "p{family}_{n} - sigma0 p{family}_{n}"),
            BasisLabel::F { family, n } => write!(f, "f{family}_{n}"),
        }
    }
}

/// How exceptional degrees are presented in [`degree_basis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BasisStyle {
    /// `p1, sigma0 p1, p2, sigma0 p2` throughout.
    Raw,
    /// Exceptional families replaced by `p + sigma0 p`, `p - sigma0 p`.
    #[default]
    Orthogonal,
}

/// Labels of the four basis polynomials of degree `n >= 1`.
pub fn degree_labels(n: usize, params: &Params, style: BasisStyle) -> Vec<BasisLabel> {
    let mut out = Vec::with_capacity(4);
    for family in [1u8, 2] {
        if style == BasisStyle::Orthogonal && is_exceptional(family, n, params) {
            out.push(BasisLabel::Sum { family, n });
            out.push(BasisLabel::Diff { family, n });
        } else {
            out.push(BasisLabel::p(family, n));
            out.push(BasisLabel::mirrored_p(family, n));
        }
    }
    out
}

/// The four harmonic basis polynomials of degree `n >= 1` with their labels.
pub fn degree_basis_labeled(n: usize, params: &Params, style: BasisStyle) -> Result<Vec<(BasisLabel, VectorPoly)>> {
    if n == 0 {
        return Err(Error::Domain("degree_basis needs n >= 1".into()));
    }
    degree_labels(n, params, style)
        .into_iter()
        .map(|l| Ok((l, l.build(params)?)))
        .collect()
}

/// The four harmonic basis polynomials of degree `n >= 1`.
pub fn degree_basis(n: usize, params: &Params, style: BasisStyle) -> Result<Vec<VectorPoly>> {
    Ok(degree_basis_labeled(n, params, style)?.into_iter().map(|(_, p)| p).collect())
}
