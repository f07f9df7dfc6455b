//! Dunkl operators `D`, `Dbar`, the Laplacian and `exp(Laplacian / 2)` acting exactly on
//! vector polynomials.
//!
//! `D` is applied monomial by monomial: the difference quotient against each mirror
//! factors as a geometric sum, and summing over `j` keeps only the exponents in one
//! residue class mod `m`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polyalg::{apply_group, sigma0, Component, GroupElement, VectorPoly};
use crate::scalars::Params;

/// Minimum `|sin(theta - pi j / m)|` for the pointwise oracle.
pub const MIRROR_MARGIN: f64 = 1e-8;

/// Add the reflection part of `D` for one monomial `c z^a zbar^b`, landing in `target`.
/// `shift` is `+ell` for a `t` monomial and `-ell` for a `tbar` monomial.
fn add_reflection_terms(
    out: &mut VectorPoly,
    a: u32,
    b: u32,
    c: Complex64,
    shift: i64,
    target: Component,
    params: &Params,
) {
    if a == b || params.kappa == 0.0 {
        return;
    }
    let m = params.m as i64;
    let km = c * (params.kappa * params.m as f64);
    let (d, lo, sign, residue) = if a > b {
        (a - b, b, 1.0, (-shift).rem_euclid(m))
    } else {
        (b - a, a, -1.0, (i64::from(b - a) - shift).rem_euclid(m))
    };
    // i runs over 0..d with i = residue mod m
    let mut i = residue as u32;
    while i < d {
        out.add_term(lo + d - 1 - i, lo + i, target, km * sign);
        i += params.m as u32;
    }
}

/// `D f`, exact.
pub fn apply_d(f: &VectorPoly, params: &Params) -> VectorPoly {
    let ell = params.ell as i64;
    let mut out = VectorPoly::zero();
    for (a, b, comp, c) in f.iter() {
        if a > 0 {
            out.add_term(a - 1, b, comp, c * a as f64);
        }
        let (shift, target) = match comp {
            Component::T => (ell, Component::Tbar),
            Component::Tbar => (-ell, Component::T),
        };
        add_reflection_terms(&mut out, a, b, c, shift, target, params);
    }
    out
}

/// `Dbar f = sigma0 D sigma0 f`.
pub fn apply_dbar(f: &VectorPoly, params: &Params) -> VectorPoly {
    sigma0(&apply_d(&sigma0(f), params))
}

/// `T_z f = sum_j sigma_j f`.
pub fn t_z(f: &VectorPoly, params: &Params) -> VectorPoly {
    (0..params.m).fold(VectorPoly::zero(), |acc, j| {
        &acc + &apply_group(GroupElement::Reflection(j), f, params)
    })
}

/// `T_zbar f = sum_j omega^j sigma_j f`.
pub fn t_zbar(f: &VectorPoly, params: &Params) -> VectorPoly {
    (0..params.m).fold(VectorPoly::zero(), |acc, j| {
        let g = apply_group(GroupElement::Reflection(j), f, params);
        &acc + &g.scale(params.omega_pow(j as i64))
    })
}

/// `Laplacian f = 4 D Dbar f`.
pub fn laplacian(f: &VectorPoly, params: &Params) -> VectorPoly {
    apply_d(&apply_dbar(f, params), params).scale_re(4.0)
}

/// `exp(Laplacian / 2) f = sum_k Laplacian^k f / (2^k k!)`; terminates since the
/// Laplacian lowers degree by two.
pub fn exp_half_laplacian(f: &VectorPoly, params: &Params) -> VectorPoly {
    let mut sum = f.clone();
    let mut term = f.clone();
    let mut k = 0u32;
    loop {
        k += 1;
        term = laplacian(&term, params).scale_re(1.0 / (2.0 * k as f64));
        if term.is_zero() {
            return sum;
        }
        sum = &sum + &term;
    }
}

fn check_off_mirrors(z: Complex64, params: &Params) -> Result<()> {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::OnMirror { re: z.re, im: z.im });
    }
    let theta = z.arg();
    for j in 0..params.m {
        let s = (theta - std::f64::consts::PI * j as f64 / params.m as f64).sin();
        if s.abs() < MIRROR_MARGIN {
            return Err(Error::OnMirror { re: z.re, im: z.im });
        }
    }
    Ok(())
}

/// Sum over mirrors of the difference quotients in `D` (weight 1) or `Dbar` (weight
/// `omega^j`), without the `kappa` factor.
fn mirror_sum(f: &VectorPoly, z: Complex64, params: &Params, with_omega: bool) -> (Complex64, Complex64) {
    let ell = params.ell as i64;
    let (f1, f2) = f.evaluate(z);
    let mut s = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for j in 0..params.m as i64 {
        let w = z.conj() * params.omega_pow(j);
        let (g1, g2) = f.evaluate(w);
        let (up, down) = (params.omega_pow(ell * j), params.omega_pow(-ell * j));
        let denom = z - w;
        let weight = if with_omega { params.omega_pow(j) } else { Complex64::new(1.0, 0.0) };
        // t <- omega^{-ell j} f2, tbar <- omega^{ell j} f1
        s.0 += weight * down * (f2 - g2) / denom;
        s.1 += weight * up * (f1 - g1) / denom;
    }
    s
}

/// Numerical `(D f)(z)` straight from the defining difference quotients.
pub fn pointwise_d_oracle(f: &VectorPoly, z: Complex64, params: &Params) -> Result<(Complex64, Complex64)> {
    check_off_mirrors(z, params)?;
    let d1 = f.comp_t.d_dz().evaluate(z);
    let d2 = f.comp_tbar.d_dz().evaluate(z);
    let (s1, s2) = mirror_sum(f, z, params, false);
    Ok((d1 + s1 * params.kappa, d2 + s2 * params.kappa))
}

/// Numerical `(Dbar f)(z)` straight from the defining difference quotients.
pub fn pointwise_dbar_oracle(f: &VectorPoly, z: Complex64, params: &Params) -> Result<(Complex64, Complex64)> {
    check_off_mirrors(z, params)?;
    let d1 = f.comp_t.d_dzbar().evaluate(z);
    let d2 = f.comp_tbar.d_dzbar().evaluate(z);
    let (s1, s2) = mirror_sum(f, z, params, true);
    Ok((d1 - s1 * params.kappa, d2 - s2 * params.kappa))
}
