//! Numerical integration against the matrix weight.
//!
//! Both rules are tanh-sinh (double-exponential) rules that record, for every node,
//! its distance to each endpoint of the interval. The kernel blows up like
//! `dist^{-2|kappa|}` at the chamber walls; evaluating it from the recorded distance
//! rather than from `theta` keeps full relative precision for nodes within `1e-100`
//! of a wall, which is what makes the rule converge for `|kappa|` close to `1/2`.
//! The radial direction is never discretized: after splitting by degree it is the
//! exact moment [`radial_moment`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mat2::CMat2;
use crate::polyalg::{GroupElement, VectorPoly};
use crate::scalars::{gamma, Params};
use crate::weight::{f_split, g_pair_split, k_complex_split};
use crate::{Error, Result};

/// Angular nodes closer than this to a wall are dropped; `v ~ dist^2` must stay normal.
const MIN_WALL_DIST: f64 = 1e-150;

/// Cutoff for the `v`-rule. The integrand can be as singular as `v^{-0.95+}`, whose
/// tail below `1e-300` is still only `~1e-14`.
const MIN_V_DIST: f64 = 1e-300;

/// Default angular refinement: step `1/16` in the tanh-sinh parameter.
pub const DEFAULT_NODES: usize = 16;

/// Default level for the singular `v`-integrals.
pub const DEFAULT_LEVEL: u32 = 10;

/// One node of a tanh-sinh rule on `(0, len)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Distance to the left endpoint (the abscissa).
    pub lo: f64,
    /// Distance to the right endpoint.
    pub hi: f64,
    pub weight: f64,
}

/// Tanh-sinh nodes on `(0, len)` with parameter step `h`, ordered left to right.
fn tanh_sinh(len: f64, h: f64, min_dist: f64) -> Vec<Node> {
    let half_pi = 0.5 * PI;
    let mut nodes = Vec::new();
    // sinh(7) * pi/2 > 800: beyond this both tails are below 1e-300
    let kmax = (7.0 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = half_pi * t.sinh();
        // len / (1 + e^{-2u}) and len / (1 + e^{2u}) without cancellation
        let lo = len / (1.0 + (-2.0 * u).exp());
        let hi = len / (1.0 + (2.0 * u).exp());
        if lo < min_dist || hi < min_dist {
            continue;
        }
        let cu = u.cosh();
        let weight = h * len * half_pi * t.cosh() / (2.0 * cu * cu);
        nodes.push(Node { lo, hi, weight });
    }
    nodes
}

/// Angular rule on one fundamental chamber `(0, pi/m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularRule {
    pub m: usize,
    /// Refinement: the tanh-sinh step is `1/nodes`.
    pub nodes: usize,
    pub points: Vec<Node>,
}

impl AngularRule {
    pub fn new(m: usize, nodes: usize) -> Self {
        let nodes = nodes.max(1);
        AngularRule { m, nodes, points: tanh_sinh(PI / m as f64, 1.0 / nodes as f64, MIN_WALL_DIST) }
    }

    pub fn weight_sum(&self) -> f64 {
        self.points.iter().map(|n| n.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Rule on `(0, 1)` for integrands with integrable endpoint singularities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularRule {
    /// Step `2^{5 - level}`.
    pub level: u32,
    pub points: Vec<Node>,
}

impl SingularRule {
    pub fn new(level: u32) -> Self {
        let h = 2f64.powi(5 - level as i32);
        SingularRule { level, points: tanh_sinh(1.0, h, MIN_V_DIST) }
    }

    /// `int_0^1 f(v, 1 - v) dv` with both coordinates supplied to full precision.
    pub fn integrate<F: Fn(f64, f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let mut sum = 0.0;
        for n in &self.points {
            sum += n.weight * f(n.lo, n.hi)?;
        }
        Ok(sum)
    }

    /// `int_0^{1/2} f(v, 1 - v) dv`.
    pub fn integrate_lower_half<F: Fn(f64, f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let mut sum = 0.0;
        for n in &self.points {
            let v = 0.5 * n.lo;
            sum += 0.5 * n.weight * f(v, 0.5 + 0.5 * n.hi)?;
        }
        Ok(sum)
    }
}

/// `int_0^inf r^{d+1} e^{-r^2/2} dr = 2^{d/2} Gamma(d/2 + 1)`; exactly `2^n n!` for `d = 2n`.
pub fn radial_moment(d: u32) -> f64 {
    if d.is_multiple_of(2) {
        let n = d / 2;
        (1..=n).fold(1.0, |acc, k| acc * 2.0 * k as f64)
    } else {
        2f64.powf(0.5 * d as f64) * gamma(0.5 * d as f64 + 1.0)
    }
}

/// A unit-circle sample: the point, its quadrature weight, and `K^C` there.
#[derive(Debug, Clone, Copy)]
struct Sample {
    z: Complex64,
    weight: f64,
    k: CMat2,
}

/// The weight tabulated on every chamber of the unit circle.
#[derive(Debug, Clone)]
pub struct KernelTable {
    params: Params,
    samples: Vec<Sample>,
    /// Canonical-chamber samples `(e^{i theta}, weight, K^C(theta))` for the chamber sum.
    canonical: Vec<Sample>,
}

impl KernelTable {
    pub fn new(params: &Params, rule: &AngularRule) -> Result<Self> {
        params.require_integrable()?;
        if rule.m != params.m {
            return Err(Error::InvalidParams(format!("rule built for m = {}, params have m = {}", rule.m, params.m)));
        }
        let mf = params.m as f64;
        let canonical = rule
            .points
            .iter()
            .map(|n| {
                Ok(Sample {
                    z: Complex64::from_polar(1.0, n.lo),
                    weight: n.weight,
                    k: k_complex_split(mf * n.lo, mf * n.hi, params)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut samples = Vec::with_capacity(2 * params.m * canonical.len());
        for w in GroupElement::all(params.m) {
            let r = w.spin_matrix(params);
            let ra = r.adjoint();
            for s in &canonical {
                samples.push(Sample { z: w.apply_point(s.z, params), weight: s.weight, k: r * s.k * ra });
            }
        }
        Ok(KernelTable { params: params.clone(), samples, canonical })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// `int_circle g K f* dtheta` for polynomials, summed in node order.
    fn angular(&self, f: &VectorPoly, g: &VectorPoly) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for s in &self.samples {
            sum += s.weight * contract(g.evaluate(s.z), &s.k, f.evaluate(s.z));
        }
        sum
    }

    /// `<f, g>_G = int g K f* e^{-|z|^2/2} dm2`, radial parts exact.
    pub fn gaussian_pairing(&self, f: &VectorPoly, g: &VectorPoly) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (df, fd) in f.homogeneous_components() {
            for (dg, gd) in g.homogeneous_components() {
                sum += radial_moment(df + dg) * self.angular(&fd, &gd);
            }
        }
        sum
    }

    /// Gram matrix `G_ij = <b_i, b_j>_G`. Values are tabulated once per polynomial.
    pub fn gaussian_gram(&self, polys: &[VectorPoly]) -> Vec<Vec<Complex64>> {
        // per polynomial: list of (degree, values at every sample)
        type Tab = Vec<(u32, Vec<(Complex64, Complex64)>)>;
        let tabs: Vec<Tab> = polys
            .par_iter()
            .map(|p| {
                p.homogeneous_components()
                    .into_iter()
                    .map(|(d, q)| (d, self.samples.iter().map(|s| q.evaluate(s.z)).collect()))
                    .collect()
            })
            .collect();
        (0..polys.len())
            .into_par_iter()
            .map(|i| {
                (0..polys.len())
                    .map(|j| {
                        let mut sum = Complex64::new(0.0, 0.0);
                        for (df, fv) in &tabs[i] {
                            for (dg, gv) in &tabs[j] {
                                let mut ang = Complex64::new(0.0, 0.0);
                                for (k, s) in self.samples.iter().enumerate() {
                                    ang += s.weight * contract(gv[k], &s.k, fv[k]);
                                }
                                sum += radial_moment(df + dg) * ang;
                            }
                        }
                        sum
                    })
                    .collect()
            })
            .collect()
    }

    /// The chamber-sum form of `<f, g>_S`: every group translate of the fundamental
    /// chamber is pulled back to it, `sum_w int g(e^{i theta} w) R_w* K(theta) R_w
    /// f(e^{i theta} w)*` with `e^{i theta} w = w^{-1}.e^{i theta}`.
    pub fn circle_pairing(&self, f: &VectorPoly, g: &VectorPoly) -> Result<Complex64> {
        let (df, dg) = match (homogeneous_degree(f), homogeneous_degree(g)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::CirclePairing("inputs must be nonzero and homogeneous".into())),
        };
        if (df + dg) % 2 != 0 {
            return Err(Error::CirclePairing(format!("total degree {} is odd", df + dg)));
        }
        let p = &self.params;
        let mut sum = Complex64::new(0.0, 0.0);
        for w in GroupElement::all(p.m) {
            let r = w.spin_matrix(p);
            let winv = w.inverse(p.m);
            for s in &self.canonical {
                let zw = winv.apply_point(s.z, p);
                let k = r.adjoint() * s.k * r;
                sum += s.weight * contract(g.evaluate(zw), &k, f.evaluate(zw));
            }
        }
        Ok(sum)
    }
}

fn homogeneous_degree(f: &VectorPoly) -> Option<u32> {
    if f.is_homogeneous() {
        f.degree()
    } else {
        None
    }
}

/// `g K f*` with `g` a row and `f*` a column.
fn contract(g: (Complex64, Complex64), k: &CMat2, f: (Complex64, Complex64)) -> Complex64 {
    let (f1, f2) = (f.0.conj(), f.1.conj());
    g.0 * (k.get(0, 0) * f1 + k.get(0, 1) * f2) + g.1 * (k.get(1, 0) * f1 + k.get(1, 1) * f2)
}

/// `<f, g>_G` by quadrature.
pub fn gaussian_pairing_numeric(f: &VectorPoly, g: &VectorPoly, params: &Params, rule: &AngularRule) -> Result<Complex64> {
    Ok(KernelTable::new(params, rule)?.gaussian_pairing(f, g))
}

/// `<f, g>_S` by the chamber-sum formula.
pub fn circle_pairing_numeric(f: &VectorPoly, g: &VectorPoly, params: &Params, rule: &AngularRule) -> Result<Complex64> {
    KernelTable::new(params, rule)?.circle_pairing(f, g)
}

/// `int_0^1 G1(kappa, delta; v) (v(1-v))^{-1/2} dv`.
pub fn g1_integral(params: &Params, rule: &SingularRule) -> Result<f64> {
    params.require_integrable()?;
    rule.integrate(|v, w| g1_integrand(params, v, w))
}

/// Twice the integral over `(0, 1/2)`; equal to [`g1_integral`] by the `v <-> 1-v` symmetry.
pub fn g1_integral_doubled_half(params: &Params, rule: &SingularRule) -> Result<f64> {
    params.require_integrable()?;
    Ok(2.0 * rule.integrate_lower_half(|v, w| g1_integrand(params, v, w))?)
}

fn g1_integrand(params: &Params, v: f64, w: f64) -> Result<f64> {
    let (g1, _) = g_pair_split(params.kappa, params.delta, v, w)?;
    Ok(g1 / (v * w).sqrt())
}

/// Closed form `2 pi cos(delta pi) / cos(kappa pi)` of [`g1_integral`].
pub fn g1_integral_closed(params: &Params) -> f64 {
    2.0 * PI * (PI * params.delta).cos() / (PI * params.kappa).cos()
}

/// The two `kappa = 0` integrals `int f_i(0, delta; v) f_i(0, delta; 1-v) dv / sqrt(v(1-v))`.
pub fn f12_reflection_integrals(params: &Params, rule: &SingularRule) -> Result<(f64, f64)> {
    let d = params.delta;
    let first = rule.integrate(|v, w| Ok(f_split(0.0, d, v, w)?.0 * f_split(0.0, d, w, v)?.0 / (v * w).sqrt()))?;
    let second = rule.integrate(|v, w| Ok(f_split(0.0, d, v, w)?.1 * f_split(0.0, d, w, v)?.1 / (v * w).sqrt()))?;
    Ok((first, second))
}

/// Closed forms `(pi/2) cos(delta pi) +- sin(pi delta) / (2 delta)` of the reflection integrals.
pub fn f12_reflection_closed(params: &Params) -> (f64, f64) {
    let d = params.delta;
    let a = 0.5 * PI * (PI * d).cos();
    let b = (PI * d).sin() / (2.0 * d);
    (a + b, b - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{circle_pairing, gaussian_pairing};
    use crate::harmonic::{degree_basis, small_p, BasisStyle};
    use crate::polyalg::{m_parity, parity_components, random_homogeneous, Component};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn rules_integrate_constants_and_singularities() {
        for m in 3..=7 {
            let r = AngularRule::new(m, DEFAULT_NODES);
            assert!((r.weight_sum() - PI / m as f64).abs() < 1e-13);
            assert!(r.points.iter().all(|n| n.lo > 0.0 && n.hi > 0.0));
        }
        for level in 8..=10 {
            let s = SingularRule::new(level);
            let v = s.integrate(|v, w| Ok(1.0 / (v * w).sqrt())).unwrap();
            assert!((v - PI).abs() < 1e-12, "level {level}: {v}");
        }
    }

    #[test]
    fn radial_moments() {
        assert_eq!(radial_moment(0), 1.0);
        assert_eq!(radial_moment(2), 2.0);
        assert_eq!(radial_moment(4), 8.0);
        // int r^2 e^{-r^2/2} dr = sqrt(pi/2)
        assert!((radial_moment(1) - (0.5 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn normalization_of_t() {
        for &(m, ell, k) in &[(3, 1, 0.2), (3, 1, 0.45), (5, 2, -0.45), (7, 1, 0.12)] {
            let p = Params::new(m, ell, k).unwrap();
            let rule = AngularRule::new(m, DEFAULT_NODES);
            let t = VectorPoly::t();
            let g = gaussian_pairing_numeric(&t, &t, &p, &rule).unwrap();
            assert!((g - 2.0).norm() < 1e-8, "{m} {ell} {k}: {g}");
            let s = circle_pairing_numeric(&t, &t, &p, &rule).unwrap();
            assert!((s - 2.0).norm() < 1e-8);
        }
    }

    #[test]
    fn integral_matches_algebra_on_harmonics() {
        let p = Params::new(4, 1, 0.15).unwrap();
        let table = KernelTable::new(&p, &AngularRule::new(4, DEFAULT_NODES)).unwrap();
        let mut polys = vec![VectorPoly::t(), VectorPoly::tbar()];
        polys.extend((1..=6).flat_map(|n| degree_basis(n, &p, BasisStyle::Raw).unwrap()));
        let num = table.gaussian_gram(&polys);
        for (i, f) in polys.iter().enumerate() {
            for (j, g) in polys.iter().enumerate() {
                let alg = gaussian_pairing(f, g, &p).unwrap();
                assert!((num[i][j] - alg).norm() <= 1e-8 + 1e-6 * alg.norm(), "{i} {j}: {} vs {alg}", num[i][j]);
                assert!((table.gaussian_pairing(f, g) - num[i][j]).norm() < 1e-12 * (1.0 + alg.norm()));
            }
        }
    }

    #[test]
    fn chamber_sum_matches_circle_form() {
        let p = Params::new(5, 2, -0.3).unwrap();
        let table = KernelTable::new(&p, &AngularRule::new(5, DEFAULT_NODES)).unwrap();
        let zt = VectorPoly::monomial(1, 0, Component::T, Complex64::new(1.0, 0.0));
        let s = table.circle_pairing(&zt, &zt).unwrap();
        let alg = circle_pairing(&zt, &zt, &p).unwrap();
        assert!(rel_err(s, alg) < 1e-8, "{s} {alg}");
        for n in 1..=4 {
            let f = small_p(1, n, &p).unwrap();
            let g = small_p(2, n, &p).unwrap();
            for (a, b) in [(&f, &f), (&f, &g), (&g, &g)] {
                let s = table.circle_pairing(a, b).unwrap();
                let alg = circle_pairing(a, b, &p).unwrap();
                assert!((s - alg).norm() <= 1e-8 + 1e-6 * alg.norm());
            }
        }
        assert!(table.circle_pairing(&zt, &VectorPoly::t()).is_err());
    }

    #[test]
    fn distinct_parities_are_orthogonal() {
        let p = Params::new(5, 1, 0.1).unwrap();
        let table = KernelTable::new(&p, &AngularRule::new(5, DEFAULT_NODES)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_homogeneous(&mut rng, 3);
        let g = random_homogeneous(&mut rng, 3);
        let fp = parity_components(&f, &p);
        let gp = parity_components(&g, &p);
        for (r1, a) in fp.iter().enumerate() {
            for (r2, b) in gp.iter().enumerate() {
                if r1 != r2 && !a.is_zero() && !b.is_zero() {
                    assert_eq!(m_parity(a, &p), Some(r1));
                    assert!(table.gaussian_pairing(a, b).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn singular_integrals() {
        let rule = SingularRule::new(DEFAULT_LEVEL);
        for &(m, ell, k) in &[(3, 1, 0.0), (3, 1, 0.2), (7, 2, -0.45), (5, 1, 0.45)] {
            let p = Params::new(m, ell, k).unwrap();
            let full = g1_integral(&p, &rule).unwrap();
            assert!((full - g1_integral_closed(&p)).abs() < 1e-6 * g1_integral_closed(&p), "{full}");
            let half = g1_integral_doubled_half(&p, &rule).unwrap();
            assert!((full - half).abs() < 1e-8, "{m} {ell} {k}: {full} {half}");
        }
        let p = Params::new(10, 3, 0.0).unwrap();
        assert!((p.delta - 0.2).abs() < 1e-15);
        let (a, b) = f12_reflection_integrals(&p, &rule).unwrap();
        let (ea, eb) = f12_reflection_closed(&p);
        assert!((a - ea).abs() < 1e-8 && (b - eb).abs() < 1e-8);
        assert!((a + b - (PI * 0.2).sin() / 0.2).abs() < 1e-8);
    }

    #[test]
    fn refinement_is_converged() {
        let p = Params::new(3, 1, 0.27).unwrap();
        let f = small_p(1, 4, &p).unwrap();
        let a = gaussian_pairing_numeric(&f, &f, &p, &AngularRule::new(3, DEFAULT_NODES)).unwrap();
        let b = gaussian_pairing_numeric(&f, &f, &p, &AngularRule::new(3, 2 * DEFAULT_NODES)).unwrap();
        assert!(rel_err(a, b) < 1e-8);
    }
}
