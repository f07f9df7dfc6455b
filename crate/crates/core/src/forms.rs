//! The algebraic pairing, the Gaussian and circle forms, closed-form norms and Gram
//! matrices.
//!
//! `<p, q>` applies `p1*(2 Dbar, 2 D)` and `p2*(2 Dbar, 2 D)` to `q` and reads the
//! constant `t` and `tbar` coefficients, with `<t, t> = <tbar, tbar> = 2`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dunkl::{apply_d, apply_dbar, exp_half_laplacian};
use crate::error::{Error, Result};
use crate::harmonic::{is_exceptional, tower_position, BasisLabel};
use crate::polyalg::{Component, VectorPoly};
use crate::scalars::{pochhammer, Params};

/// Relative size of a nonconstant remainder that flags an operator inconsistency.
pub const RESIDUAL_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Precomputed constants `D^j Dbar^k q_d` for every homogeneous part `q_d` of `q`.
#[derive(Debug, Clone)]
pub struct PairingTable {
    /// `(d, c)` where `c[k] = D^{d-k} Dbar^k q_d` as `(t, tbar)` coefficients.
    parts: Vec<(u32, Vec<(Complex64, Complex64)>)>,
}

impl PairingTable {
    pub fn new(q: &VectorPoly, params: &Params) -> Result<Self> {
        let mut parts = Vec::new();
        for (d, qd) in q.homogeneous_components() {
            let scale = qd.max_abs();
            let mut consts = Vec::with_capacity(d as usize + 1);
            let mut dbar_k = qd;
            for k in 0..=d {
                let mut g = dbar_k.clone();
                for _ in k..d {
                    g = apply_d(&g, params);
                }
                let residual = g
                    .iter()
                    .filter(|&(a, b, _, _)| a + b > 0)
                    .fold(0.0_f64, |acc, (_, _, _, c)| acc.max(c.norm()));
                if residual > RESIDUAL_TOL * scale.max(g.max_abs()) {
                    return Err(Error::PairingResidual(residual));
                }
                consts.push((g.coeff(0, 0, Component::T), g.coeff(0, 0, Component::Tbar)));
                if k < d {
                    dbar_k = apply_dbar(&dbar_k, params);
                }
            }
            parts.push((d, consts));
        }
        Ok(PairingTable { parts })
    }

    /// `<p, q>` for the `q` this table was built from.
    pub fn pair(&self, p: &VectorPoly) -> Complex64 {
        let mut sum = ZERO;
        for (d, consts) in &self.parts {
            let d = *d;
            let mut part = ZERO;
            for (a, b, comp, c) in p.iter() {
                if a + b != d {
                    continue;
                }
                // z^a zbar^b in p pairs with D^a Dbar^b q_d
                let (ct, ctb) = consts[b as usize];
                part += c.conj()
                    * match comp {
                        Component::T => ct,
                        Component::Tbar => ctb,
                    };
            }
            sum += part * (2.0 * 2f64.powi(d as i32));
        }
        sum
    }
}

/// The algebraic form `<p, q>`: conjugate-linear in `p`, linear in `q`.
pub fn pairing(p: &VectorPoly, q: &VectorPoly, params: &Params) -> Result<Complex64> {
    Ok(PairingTable::new(q, params)?.pair(p))
}

/// `<f, g>_G = <exp(L/2) f, exp(L/2) g>`.
pub fn gaussian_pairing(f: &VectorPoly, g: &VectorPoly, params: &Params) -> Result<Complex64> {
    pairing(&exp_half_laplacian(f, params), &exp_half_laplacian(g, params), params)
}

/// Total degree of a homogeneous polynomial, `None` if mixed or zero.
fn homogeneous_degree(f: &VectorPoly) -> Option<u32> {
    if f.is_homogeneous() {
        f.degree()
    } else {
        None
    }
}

/// `<f, g>_S = <f, g>_G / (2^n n!)` for homogeneous `f`, `g` with `deg f + deg g = 2n`.
pub fn circle_pairing(f: &VectorPoly, g: &VectorPoly, params: &Params) -> Result<Complex64> {
    let (df, dg) = match (homogeneous_degree(f), homogeneous_degree(g)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::CirclePairing("inputs must be nonzero and homogeneous".into())),
    };
    if (df + dg) % 2 != 0 {
        return Err(Error::CirclePairing(format!("total degree {} is odd", df + dg)));
    }
    let n = (df + dg) / 2;
    Ok(gaussian_pairing(f, g, params)? / circle_scale(n))
}

/// `2^n n!`.
pub fn circle_scale(n: u32) -> f64 {
    2f64.powi(n as i32) * pochhammer(1.0, n as usize)
}

/// `2^{n+1} n!`.
fn base_norm(n: usize) -> f64 {
    2f64.powi(n as i32 + 1) * pochhammer(1.0, n)
}

/// `(lambda - kappa)_a (lambda + kappa)_b / ((lambda)_a (lambda)_b)`.
fn poch_ratio(lambda: f64, kappa: f64, a: usize, b: usize) -> f64 {
    pochhammer(lambda - kappa, a) * pochhammer(lambda + kappa, b) / (pochhammer(lambda, a) * pochhammer(lambda, b))
}

/// `<p_n, p_n>` in closed form, including `n = 0` (`p_0 = t` or `tbar`).
fn p_norm(family: u8, n: usize, params: &Params) -> f64 {
    match tower_position(family, n, params) {
        None => base_norm(n),
        Some((k, _)) => base_norm(n) * poch_ratio(params.lambda(family), params.kappa, k + 1, k + 1),
    }
}

/// `k + 1` for an exceptional degree: `n = m(k+2) - ell` (family 1), `n = m(k+1) + ell`
/// (family 2), `k >= -1`.
fn exceptional_index(family: u8, n: usize, params: &Params) -> usize {
    if family == 1 {
        (n + params.ell) / params.m - 1
    } else {
        (n - params.ell) / params.m
    }
}

/// Closed-form `<b, b>` for a labelled basis element.
pub fn closed_norm(label: &BasisLabel, params: &Params) -> Result<f64> {
    let family = label.family();
    let n = label.degree();
    if family != 1 && family != 2 {
        return Err(Error::InvalidLabel(format!("family {family} is not 1 or 2")));
    }
    if n == 0 {
        return Err(Error::InvalidLabel("basis degree must be >= 1".into()));
    }
    let lambda = params.lambda(family);
    let kappa = params.kappa;
    match *label {
        BasisLabel::Harmonic(_) => Ok(p_norm(family, n, params)),
        BasisLabel::Sum { .. } | BasisLabel::Diff { .. } | BasisLabel::F { .. } => {
            if !is_exceptional(family, n, params) {
                return Err(Error::NotExceptional { family, n });
            }
            let k1 = exceptional_index(family, n, params);
            Ok(match label {
                BasisLabel::Sum { .. } => 2.0 * base_norm(n) * poch_ratio(lambda, kappa, k1 + 1, k1),
                BasisLabel::Diff { .. } => 2.0 * base_norm(n) * poch_ratio(lambda, kappa, k1, k1 + 1),
                _ => base_norm(n) * poch_ratio(lambda, kappa, k1 + 1, k1 + 1),
            })
        }
    }
}

/// Closed-form `<sigma0 p_n, p_n>` at an exceptional degree: `-2 m kappa <p_{n-1}, p_{n-1}>`.
pub fn closed_coupling(family: u8, n: usize, params: &Params) -> Result<f64> {
    if !is_exceptional(family, n, params) {
        return Err(Error::NotExceptional { family, n });
    }
    Ok(-2.0 * params.m as f64 * params.kappa * p_norm(family, n - 1, params))
}

/// Which form a Gram matrix is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Algebraic,
    Gaussian,
}

/// Dense matrix of pairwise form values `entries[i][j] = <b_i, b_j>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<Complex64>>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Largest `|G_ij - conj(G_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    /// `N_ij = G_ij / sqrt(|G_ii G_jj|)`; same inertia as `G`.
    pub fn normalized(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        let d: Vec<f64> = (0..n).map(|i| self.entries[i][i].norm().sqrt()).collect();
        (0..n)
            .map(|i| (0..n).map(|j| self.entries[i][j] / (d[i] * d[j])).collect())
            .collect()
    }

    /// Ascending eigenvalues of the Hermitian part of the normalized matrix.
    pub fn normalized_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let nm = self.normalized();
        let mat = DMatrix::from_fn(n, n, |i, j| 0.5 * (nm[i][j] + nm[j][i].conj()));
        let mut ev: Vec<f64> = mat.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// All eigenvalues strictly positive, with `margin` on the normalized scale.
    pub fn is_positive_definite(&self, margin: f64) -> bool {
        let diag_ok = (0..self.dim()).all(|i| self.entries[i][i].re > 0.0);
        diag_ok && self.normalized_eigenvalues().first().is_none_or(|&lo| lo > margin)
    }
}

fn gram_from_tables(polys: &[VectorPoly], tables: &[PairingTable]) -> Vec<Vec<Complex64>> {
    (0..polys.len())
        .into_par_iter()
        .map(|i| tables.iter().map(|t| t.pair(&polys[i])).collect())
        .collect()
}

/// Gram matrix of `polys` under the chosen form; entries are independent of scheduling.
pub fn gram(polys: &[VectorPoly], labels: Vec<String>, params: &Params, form: FormKind) -> Result<GramMatrix> {
    let prepared: Vec<VectorPoly> = match form {
        FormKind::Algebraic => polys.to_vec(),
        FormKind::Gaussian => polys.par_iter().map(|p| exp_half_laplacian(p, params)).collect(),
    };
    let tables = prepared
        .par_iter()
        .map(|q| PairingTable::new(q, params))
        .collect::<Result<Vec<_>>>()?;
    let entries = gram_from_tables(&prepared, &tables);
    let labels = if labels.len() == polys.len() {
        labels
    } else {
        (0..polys.len()).map(|i| format!("#{i}")).collect()
    };
    Ok(GramMatrix { labels, entries })
}

/// Gram matrix of labelled basis elements.
pub fn gram_of_labels(labels: &[BasisLabel], params: &Params, form: FormKind) -> Result<GramMatrix> {
    let polys = labels.iter().map(|l| l.build(params)).collect::<Result<Vec<_>>>()?;
    gram(&polys, labels.iter().map(|l| l.to_string()).collect(), params, form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonic::{degree_basis_labeled, degree_labels, small_p, BasisStyle};
    use crate::polyalg::{m_parity, parity_components, random_homogeneous, random_vector_poly, sigma0};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel_close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
    }

    fn sweep() -> Vec<Params> {
        let mut out = Vec::new();
        for m in 3..=7 {
            for ell in 1..=(m - 1) / 2 {
                let l = ell as f64 / m as f64;
                for kappa in [0.0, 0.5 * l, -0.5 * l, 0.9 * l, -0.9 * l] {
                    out.push(Params::new(m, ell, kappa).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn small_pairings() {
        let p = Params::new(3, 1, 0.2).unwrap();
        let (t, tb) = (VectorPoly::t(), VectorPoly::tbar());
        assert_eq!(pairing(&t, &t, &p).unwrap(), c(2.0, 0.0));
        assert_eq!(pairing(&t, &tb, &p).unwrap(), c(0.0, 0.0));
        assert_eq!(pairing(&tb, &tb, &p).unwrap(), c(2.0, 0.0));
        let zt = VectorPoly::monomial(1, 0, Component::T, 1.0);
        assert_eq!(pairing(&zt, &zt, &p).unwrap(), c(4.0, 0.0));
        assert_eq!(pairing(&zt, &t, &p).unwrap(), c(0.0, 0.0));
        assert_eq!(gaussian_pairing(&t, &t, &p).unwrap(), c(2.0, 0.0));
        assert!((circle_pairing(&t, &t, &p).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((circle_pairing(&zt, &zt, &p).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        let zz = VectorPoly::monomial(1, 1, Component::T, 1.0);
        let want = gaussian_pairing(&t, &zz, &p).unwrap() / 2.0;
        assert!((circle_pairing(&t, &zz, &p).unwrap() - want).norm() < 1e-15);
        let i = c(0.0, 1.0);
        let it = t.scale(i);
        assert_eq!(pairing(&it, &t, &p).unwrap(), c(0.0, -2.0));
        assert_eq!(pairing(&t, &it, &p).unwrap(), c(0.0, 2.0));
    }

    #[test]
    fn circle_pairing_errors() {
        let p = Params::new(3, 1, 0.2).unwrap();
        let zt = VectorPoly::monomial(1, 0, Component::T, 1.0);
        assert!(circle_pairing(&zt, &VectorPoly::t(), &p).is_err());
        let mixed = &zt + &VectorPoly::t();
        assert!(circle_pairing(&mixed, &mixed, &p).is_err());
        assert!(circle_pairing(&VectorPoly::zero(), &VectorPoly::t(), &p).is_err());
    }

    #[test]
    fn closed_norms_match_operator_pairing() {
        for p in sweep() {
            for n in 1..=2 * p.m + 2 {
                for style in [BasisStyle::Raw, BasisStyle::Orthogonal] {
                    for (label, f) in degree_basis_labeled(n, &p, style).unwrap() {
                        let want = closed_norm(&label, &p).unwrap();
                        let got = pairing(&f, &f, &p).unwrap();
                        assert!(got.im.abs() <= 1e-9 * want.abs());
                        assert!(rel_close(got.re, want, 1e-9), "{p:?} {label}: {} vs {want}", got.re);
                    }
                }
                for family in [1u8, 2] {
                    if is_exceptional(family, n, &p) {
                        let label = BasisLabel::F { family, n };
                        let f = label.build(&p).unwrap();
                        let want = closed_norm(&label, &p).unwrap();
                        assert!(rel_close(pairing(&f, &f, &p).unwrap().re, want, 1e-9));
                        let pn = small_p(family, n, &p).unwrap();
                        let got = pairing(&sigma0(&pn), &pn, &p).unwrap().re;
                        let want = closed_coupling(family, n, &p).unwrap();
                        assert!((got - want).abs() <= 1e-9 * closed_norm(&BasisLabel::p(family, n), &p).unwrap());
                        // f is orthogonal to sigma0 p
                        assert!(pairing(&sigma0(&pn), &f, &p).unwrap().norm() <= 1e-9 * want.abs().max(1.0) * n as f64);
                    }
                }
            }
        }
    }

    #[test]
    fn closed_norm_examples() {
        let p = Params::new(5, 2, 0.1).unwrap();
        for n in 1..=3 {
            let fact: f64 = (1..=n).map(|x| x as f64).product();
            assert_eq!(closed_norm(&BasisLabel::p(1, n), &p).unwrap(), 2f64.powi(n as i32 + 1) * fact);
        }
        let l2 = 0.4;
        let want = 2f64.powi(4) * 6.0 * (l2 * l2 - 0.01) / (l2 * l2);
        assert!(rel_close(closed_norm(&BasisLabel::p(2, 3), &p).unwrap(), want, 1e-14));
        assert!(closed_norm(&BasisLabel::Sum { family: 1, n: 4 }, &p).is_err());
        assert!(closed_norm(&BasisLabel::p(3, 1), &p).is_err());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn orthogonal_basis_gram_is_diagonal() {
        for p in sweep() {
            for n in 1..=2 * p.m + 2 {
                let labels = degree_labels(n, &p, BasisStyle::Orthogonal);
                let g = gram_of_labels(&labels, &p, FormKind::Algebraic).unwrap();
                let nm = g.normalized();
                for i in 0..4 {
                    let want = closed_norm(&labels[i], &p).unwrap();
                    assert!(rel_close(g.entries[i][i].re, want, 1e-9));
                    for j in 0..4 {
                        if i != j {
                            assert!(nm[i][j].norm() < 1e-9, "{p:?} n={n} ({i},{j})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn raw_basis_has_one_block_at_exceptional_degrees() {
        let p = Params::new(5, 2, 0.3).unwrap();
        let n = 3; // 3 + 2 = 0 mod 5
        let labels = degree_labels(n, &p, BasisStyle::Raw);
        let g = gram_of_labels(&labels, &p, FormKind::Algebraic).unwrap();
        let nm = g.normalized();
        let coupling = closed_coupling(1, n, &p).unwrap();
        assert!((g.entries[0][1].re - coupling).abs() < 1e-9 * coupling.abs());
        assert!((g.entries[1][0].re - coupling).abs() < 1e-9 * coupling.abs());
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            assert!(nm[i][j].norm() < 1e-10);
        }
    }

    #[test]
    fn hermitian_and_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for p in sweep().into_iter().step_by(3) {
            for _ in 0..3 {
                let f = random_vector_poly(&mut rng, 6);
                let g = random_vector_poly(&mut rng, 6);
                let a = pairing(&f, &g, &p).unwrap();
                let b = pairing(&g, &f, &p).unwrap();
                assert!((a - b.conj()).norm() <= 1e-11 * a.norm().max(1.0));
                // <z f, g>_G = <f, zbar g>_G
                let lhs = gaussian_pairing(&f.mul_z(), &g, &p).unwrap();
                let rhs = gaussian_pairing(&f, &g.mul_zbar(), &p).unwrap();
                assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0), "{p:?}");
            }
        }
    }

    #[test]
    fn harmonic_gaussian_equals_algebraic() {
        let p = Params::new(4, 1, 0.15).unwrap();
        for n in 1..=8 {
            for (_, f) in degree_basis_labeled(n, &p, BasisStyle::Orthogonal).unwrap() {
                let a = pairing(&f, &f, &p).unwrap();
                let g = gaussian_pairing(&f, &f, &p).unwrap();
                assert!((a - g).norm() <= 1e-12 * a.norm());
            }
        }
    }

    #[test]
    fn distinct_parities_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for p in sweep().into_iter().step_by(4) {
            let f = random_homogeneous(&mut rng, 5);
            let g = random_homogeneous(&mut rng, 5);
            let fs = parity_components(&f, &p);
            let gs = parity_components(&g, &p);
            for a in fs.iter().filter(|x| !x.is_zero()) {
                for b in gs.iter().filter(|x| !x.is_zero()) {
                    if m_parity(a, &p) != m_parity(b, &p) {
                        let v = gaussian_pairing(a, b, &p).unwrap();
                        assert!(v.norm() < 1e-9, "{p:?} {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn positivity_regime() {
        for m in 3..=7 {
            for ell in 1..=(m - 1) / 2 {
                let l = ell as f64 / m as f64;
                let mut labels = Vec::new();
                for n in 1..=2 * m + 2 {
                    labels.extend(degree_labels(n, &Params::new(m, ell, 0.0).unwrap(), BasisStyle::Raw));
                }
                for kappa in [0.0, 0.9 * l, -0.9 * l] {
                    let p = Params::new(m, ell, kappa).unwrap();
                    let g = gram_of_labels(&labels, &p, FormKind::Algebraic).unwrap();
                    assert!(g.hermitian_defect() <= 1e-11 * g.entries.iter().flatten().fold(1.0_f64, |a, x| a.max(x.norm())));
                    assert!(g.is_positive_definite(1e-10), "m={m} ell={ell} kappa={kappa}");
                }
                let p = Params::new(m, ell, (1.1 * l).min(0.49)).unwrap();
                let g = gram_of_labels(&labels, &p, FormKind::Algebraic).unwrap();
                assert!(!g.is_positive_definite(0.0));
                assert!((0..g.dim()).any(|i| g.entries[i][i].re < 0.0));
            }
        }
    }
}
