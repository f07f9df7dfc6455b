//! The matrix weight `K`.
//!
//! On the fundamental chamber `0 < theta < pi/m` the weight depends on
//! `phi = m theta` through `v = sin^2(phi/2)`. Near the far wall `v -> 1` loses
//! precision, so every evaluator has a split form taking `phi` and `psi = pi - phi`
//! separately; the public single-argument forms compute `psi` themselves.
//!
//! `K` is homogeneous of degree 0, so all signatures are angular.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mat2::{spin_basis_b, spin_basis_b_adjoint, CMat2, Mat2, RMat2};
use crate::polyalg::GroupElement;
use crate::scalars::{gamma, gauss_2f1, Params, V_SPLIT};
use crate::{Error, Result};

/// Angular distance below which a point counts as lying on a mirror line.
pub const WALL_MARGIN: f64 = 1e-10;

/// `v = sin^2(x/2)` for `x` in `[0, pi]`, accurate for small `x`.
fn half_angle_sq(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    s * s
}

/// `(f1, f2)` from the power series, valid for `v <= 1/2`. `w` must equal `1 - v`;
/// it is passed separately so that callers near `v = 1` keep full precision.
pub fn f_direct(kappa: f64, delta: f64, v: f64, w: f64) -> Result<(f64, f64)> {
    let f1 = v.powf(0.5 * kappa) * w.powf(-0.5 * kappa) * gauss_2f1(delta, -delta, 0.5 + kappa, v)?;
    let f2 = delta / (0.5 + kappa)
        * v.powf(0.5 * (kappa + 1.0))
        * w.powf(0.5 * (1.0 - kappa))
        * gauss_2f1(1.0 + delta, 1.0 - delta, 1.5 + kappa, v)?;
    Ok((f1, f2))
}

/// `(f1, f2)` at `(v, w = 1 - v)`, using the connection formulas when `v > 1/2`.
pub fn f_split(kappa: f64, delta: f64, v: f64, w: f64) -> Result<(f64, f64)> {
    if !(v > 0.0 && w > 0.0) {
        return Err(Error::Domain(format!("v = {v} not in (0, 1)")));
    }
    if v <= V_SPLIT {
        return f_direct(kappa, delta, v, w);
    }
    let (g1, g2) = f_direct(kappa, delta, w, v)?;
    let (h1, h2) = f_direct(-kappa, delta, w, v)?;
    let hk = h_const(kappa, delta);
    let s = s_const(kappa, delta);
    Ok((hk * h1 + s * g2, s * g1 - hk * h2))
}

fn check_v(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("v = {v} not in (0, 1)")))
    }
}

/// `f1(kappa, delta; v) = v^{kappa/2} (1-v)^{-kappa/2} 2F1(delta, -delta; 1/2+kappa; v)`.
pub fn f1(kappa: f64, delta: f64, v: f64) -> Result<f64> {
    check_v(v)?;
    Ok(f_split(kappa, delta, v, 1.0 - v)?.0)
}

/// `f2(kappa, delta; v) = delta/(1/2+kappa) v^{(kappa+1)/2} (1-v)^{(1-kappa)/2}
/// 2F1(1+delta, 1-delta; 3/2+kappa; v)`.
pub fn f2(kappa: f64, delta: f64, v: f64) -> Result<f64> {
    check_v(v)?;
    Ok(f_split(kappa, delta, v, 1.0 - v)?.1)
}

/// `H(kappa, delta) = Gamma(1/2+kappa)^2 / (Gamma(1/2+kappa+delta) Gamma(1/2+kappa-delta))`.
pub fn h_const(kappa: f64, delta: f64) -> f64 {
    let g = gamma(0.5 + kappa);
    g * g / (gamma(0.5 + kappa + delta) * gamma(0.5 + kappa - delta))
}

/// `sin(pi delta) / cos(pi kappa)`, the off-diagonal connection coefficient.
pub fn s_const(kappa: f64, delta: f64) -> f64 {
    (PI * delta).sin() / (PI * kappa).cos()
}

/// Normalizing constant `c = cos(kappa pi) / (2 pi cos(delta pi))`.
pub fn c_norm(params: &Params) -> f64 {
    (PI * params.kappa).cos() / (2.0 * PI * (PI * params.delta).cos())
}

/// Connection matrix `[[H(k), S], [-S, H(-k)]]`.
pub fn m_h(kappa: f64, delta: f64) -> RMat2 {
    let s = s_const(kappa, delta);
    Mat2::new(h_const(kappa, delta), s, -s, h_const(-kappa, delta))
}

/// The swap `[[0, 1], [1, 0]]`.
pub fn m_sigma() -> RMat2 {
    Mat2::new(0.0, 1.0, 1.0, 0.0)
}

/// `M_f(v) = [[f1(k), f2(k)], [-f2(-k), f1(-k)]]` in split form.
fn m_f_split(params: &Params, v: f64, w: f64) -> Result<RMat2> {
    let (a, b) = f_split(params.kappa, params.delta, v, w)?;
    let (c, d) = f_split(-params.kappa, params.delta, v, w)?;
    Ok(Mat2::new(a, b, -d, c))
}

/// `L(phi)` with `psi = pi - phi` supplied separately.
pub fn l_matrix_split(phi: f64, psi: f64, params: &Params) -> Result<RMat2> {
    let mf = m_f_split(params, half_angle_sq(phi), half_angle_sq(psi))?;
    Ok(mf * RMat2::rotation(params.delta * phi))
}

fn check_phi(phi: f64) -> Result<()> {
    if phi > 0.0 && phi < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("phi = {phi} not in (0, pi)")))
    }
}

/// Fundamental solution `L(phi) = M_f(v) M_delta(phi)`, `v = sin^2(phi/2)`. `det L = 1`.
pub fn l_matrix(phi: f64, params: &Params) -> Result<RMat2> {
    check_phi(phi)?;
    l_matrix_split(phi, PI - phi, params)
}

/// `K(phi) = c L^T diag(H(-k), H(k)) L` in the real spin basis, split form.
pub fn k_real_split(phi: f64, psi: f64, params: &Params) -> Result<RMat2> {
    let l = l_matrix_split(phi, psi, params)?;
    let (k, d) = (params.kappa, params.delta);
    let m0 = RMat2::diag(h_const(-k, d), h_const(k, d));
    Ok((l.transpose() * m0 * l).scale(c_norm(params)))
}

/// The real-basis weight on the fundamental chamber as a function of `phi = m theta`.
pub fn k_real(phi: f64, params: &Params) -> Result<RMat2> {
    check_phi(phi)?;
    k_real_split(phi, PI - phi, params)
}

/// Closed form of `det K_real`: `(1 - (sin(pi kappa) / sin(pi ell/m))^2) / (4 pi^2)`.
pub fn det_k_closed(params: &Params) -> f64 {
    let r = (PI * params.kappa).sin() / (PI * params.lambda2).sin();
    (1.0 - r * r) / (4.0 * PI * PI)
}

/// `(G1, G2)` at `(v, w = 1 - v)`.
pub fn g_pair_split(kappa: f64, delta: f64, v: f64, w: f64) -> Result<(f64, Complex64)> {
    let (a, b) = f_split(kappa, delta, v, w)?;
    let (c, d) = f_split(-kappa, delta, v, w)?;
    let (hp, hm) = (h_const(kappa, delta), h_const(-kappa, delta));
    let g1 = (a * a + b * b) * hm + (c * c + d * d) * hp;
    let u = Complex64::new(a, b);
    let x = Complex64::new(c, d);
    let g2 = u * u * hm - x * x * hp;
    Ok((g1, g2))
}

/// Complex-basis weight at `phi = m theta`, split form.
pub fn k_complex_split(phi: f64, psi: f64, params: &Params) -> Result<CMat2> {
    let (g1, g2) = g_pair_split(params.kappa, params.delta, half_angle_sq(phi), half_angle_sq(psi))?;
    let c = c_norm(params);
    let k11 = Complex64::new(c * g1, 0.0);
    let k12 = Complex64::from_polar(c, -2.0 * params.delta * phi) * g2;
    Ok(Mat2::new(k11, k12, k12.conj(), k11))
}

/// `K^C(theta)` on the fundamental chamber: Hermitian with equal diagonal entries,
/// `K^C = B K_real B*` with `B = [[1, i], [1, -i]]`.
pub fn k_complex(theta: f64, params: &Params) -> Result<CMat2> {
    let phi = params.m as f64 * theta;
    check_phi(phi)?;
    k_complex_split(phi, PI - phi, params)
}

/// The same kernel computed through the real basis, `B K_real B*`.
pub fn k_complex_via_real(theta: f64, params: &Params) -> Result<CMat2> {
    let kr = k_real(params.m as f64 * theta, params)?;
    Ok(spin_basis_b() * kr.to_complex() * spin_basis_b_adjoint())
}

/// A point off the mirror lines, resolved into a canonical chamber point and the group
/// element carrying it back: `group_element.apply_point(|z| e^{i canonical_angle}) = z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChamberPoint {
    pub z: Complex64,
    /// In `1..=2m`; chamber `c` is the sector `((c-1) pi/m, c pi/m)`.
    pub chamber_index: usize,
    pub canonical_angle: f64,
    /// `pi/m - canonical_angle`, kept separately for precision near the far wall.
    pub canonical_complement: f64,
    pub group_element: GroupElement,
}

impl ChamberPoint {
    pub fn new(z: Complex64, params: &Params) -> Result<Self> {
        let on_mirror = Error::OnMirror { re: z.re, im: z.im };
        if !z.re.is_finite() || !z.im.is_finite() || z.norm() == 0.0 {
            return Err(on_mirror);
        }
        let m = params.m;
        let width = PI / m as f64;
        let theta = z.arg().rem_euclid(2.0 * PI);
        let below = (theta / width).floor();
        let lo = theta - below * width;
        let hi = width - lo;
        if lo.min(hi) < WALL_MARGIN {
            return Err(on_mirror);
        }
        let c = below as usize + 1;
        let (group_element, canonical_angle, canonical_complement) = if c % 2 == 1 {
            (GroupElement::Rotation((c - 1) / 2), lo, hi)
        } else {
            (GroupElement::Reflection((c / 2) % m), hi, lo)
        };
        Ok(ChamberPoint { z, chamber_index: c, canonical_angle, canonical_complement, group_element })
    }
}

/// `K^C` at the canonical angle of a resolved point (split for precision).
pub fn k_canonical(cp: &ChamberPoint, params: &Params) -> Result<CMat2> {
    let mf = params.m as f64;
    k_complex_split(mf * cp.canonical_angle, mf * cp.canonical_complement, params)
}

/// `K^C` anywhere off the mirrors: `K(w.z) = R_w K(z) R_w*` with `R_w` the row-convention
/// spin matrix. Equivalently `K(z w) = R_w* K(z) R_w` for the right action `z w = w^{-1}.z`.
pub fn k_at(z: Complex64, params: &Params) -> Result<CMat2> {
    let cp = ChamberPoint::new(z, params)?;
    let r = cp.group_element.spin_matrix(params);
    Ok(r * k_canonical(&cp, params)? * r.adjoint())
}

/// Decay diagnostics for the wall conditions of `K_real`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryDiagnostics {
    pub psi: Vec<f64>,
    /// `|K_12(psi)|`, the first wall.
    pub k12: Vec<f64>,
    /// `|q(pi - psi)|`, the second wall.
    pub q: Vec<f64>,
    /// Log-log slope of `k12` against `psi`; `None` when the residual vanishes identically.
    pub k12_exponent: Option<f64>,
    pub q_exponent: Option<f64>,
    /// `1 - 2|kappa|`.
    pub expected_exponent: f64,
}

/// Residuals this small are rounding noise and carry no slope.
const IDENTICALLY_ZERO: f64 = 1e-13;

impl BoundaryDiagnostics {
    /// Both residual sequences strictly decrease as `psi` decreases (or vanish identically).
    pub fn is_monotone(&self) -> bool {
        let decreasing = |r: &[f64]| {
            let mut idx: Vec<usize> = (0..self.psi.len()).collect();
            idx.sort_by(|&a, &b| self.psi[b].total_cmp(&self.psi[a]));
            idx.windows(2).all(|p| r[p[1]] < r[p[0]])
        };
        let flat = |r: &[f64]| r.iter().all(|&x| x < IDENTICALLY_ZERO);
        (flat(&self.k12) || decreasing(&self.k12)) && (flat(&self.q) || decreasing(&self.q))
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || y.iter().any(|&v| v < IDENTICALLY_ZERO) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Some(sxy / sxx)
}

/// `q(phi) = (K11 - K22) sin(2 pi ell/m) - 2 K12 cos(2 pi ell/m)`, split form.
pub fn q_split(phi: f64, psi: f64, params: &Params) -> Result<f64> {
    let k = k_real_split(phi, psi, params)?;
    let a = 2.0 * PI * params.lambda2;
    Ok((k.get(0, 0) - k.get(1, 1)) * a.sin() - 2.0 * k.get(0, 1) * a.cos())
}

/// Evaluate `|K_12|` near `phi = 0` and `|q|` near `phi = pi` on `psi_grid` and fit
/// the decay exponents.
pub fn boundary_residuals(params: &Params, psi_grid: &[f64]) -> Result<BoundaryDiagnostics> {
    let mut k12 = Vec::with_capacity(psi_grid.len());
    let mut q = Vec::with_capacity(psi_grid.len());
    for &psi in psi_grid {
        if !(psi > 0.0 && psi < PI) {
            return Err(Error::Domain(format!("psi = {psi} not in (0, pi)")));
        }
        k12.push(k_real_split(psi, PI - psi, params)?.get(0, 1).abs());
        q.push(q_split(PI - psi, psi, params)?.abs());
    }
    Ok(BoundaryDiagnostics {
        psi: psi_grid.to_vec(),
        k12_exponent: loglog_slope(psi_grid, &k12),
        q_exponent: loglog_slope(psi_grid, &q),
        k12,
        q,
        expected_exponent: 1.0 - 2.0 * params.kappa.abs(),
    })
}

/// Dyadic grid `2^{-lo} .. 2^{-hi}`, decreasing.
pub fn dyadic_grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(-k)).collect()
}
