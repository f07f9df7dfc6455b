//! The verification suite: every identity the library rests on, checked for one
//! parameter set and collected into a serializable report.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dunkl::{apply_d, apply_dbar, laplacian, pointwise_d_oracle, pointwise_dbar_oracle, t_z};
use crate::forms::{circle_scale, closed_coupling, closed_norm, gram, pairing, FormKind};
use crate::harmonic::{
    big_p, degree_labels, is_exceptional, q_at_one, q_coeff_closed, q_pair, BasisLabel, BasisStyle,
};
use crate::polyalg::{parity_components, random_homogeneous, random_vector_poly, sigma0, GroupElement, VectorPoly};
use crate::quadrature::{
    f12_reflection_closed, f12_reflection_integrals, g1_integral, g1_integral_closed, AngularRule, KernelTable,
    SingularRule, DEFAULT_LEVEL, DEFAULT_NODES,
};
use crate::scalars::Params;
use crate::weight::{
    boundary_residuals, det_k_closed, dyadic_grid, f_direct, f_split, h_const, k_at, k_real, s_const,
};
use crate::Result;

/// Everything that determines a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub m: usize,
    pub ell: usize,
    pub kappa: f64,
    /// Highest harmonic degree; `None` means `2m + 2`.
    pub degree: Option<usize>,
    pub nodes: usize,
    pub level: u32,
    pub seed: u64,
    /// Random polynomials for the operator checks.
    pub samples: usize,
    /// Random points per polynomial and for the equivariance check.
    pub points: usize,
    /// Replaces every tolerance when set.
    pub tol_override: Option<f64>,
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            m: 3,
            ell: 1,
            kappa: 0.2,
            degree: None,
            nodes: DEFAULT_NODES,
            level: DEFAULT_LEVEL,
            seed: 0,
            samples: 50,
            points: 20,
            tol_override: None,
            timings: false,
        }
    }
}

impl VerifyConfig {
    pub fn params(&self) -> Result<Params> {
        let p = Params::new(self.m, self.ell, self.kappa)?;
        p.require_integrable()?;
        Ok(p)
    }

    pub fn max_degree(&self) -> usize {
        self.degree.unwrap_or(2 * self.m + 2)
    }
}

/// How an error figure is compared with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Abs,
    Rel,
    /// `pass` is a yes/no property; `computed` carries the deciding quantity.
    Property,
}

/// One verified identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being checked, in words.
    pub anchor: String,
    pub computed: f64,
    pub expected: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub metric: Metric,
    /// The identity held within tolerance.
    pub pass: bool,
    /// The identity is known not to hold for these parameters; the check confirms that.
    pub expect_fail: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Check {
    /// The outcome matches the expectation.
    pub fn ok(&self) -> bool {
        self.pass != self.expect_fail
    }

    pub fn status(&self) -> &'static str {
        match (self.pass, self.expect_fail) {
            (true, false) => "PASS",
            (false, true) => "XFAIL",
            (false, false) => "FAIL",
            (true, true) => "XPASS",
        }
    }
}

/// Outcome of [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub lambda1: f64,
    pub lambda2: f64,
    pub delta: f64,
    /// `|kappa| < ell/m`.
    pub positive_regime: bool,
    pub checks: Vec<Check>,
    /// Every check came out as expected.
    pub pass: bool,
}

impl VerifyReport {
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{:<5} {:<32} err {:.3e} (tol {:.1e}) {}",
                    c.status(),
                    c.name,
                    match c.metric {
                        Metric::Abs => c.abs_err,
                        Metric::Rel => c.rel_err,
                        Metric::Property => c.computed,
                    },
                    c.tolerance,
                    c.anchor
                )
            })
            .collect()
    }
}

struct Builder<'a> {
    cfg: &'a VerifyConfig,
    checks: Vec<Check>,
}

impl Builder<'_> {
    fn tol(&self, t: f64) -> f64 {
        self.cfg.tol_override.unwrap_or(t)
    }

    /// Records a worst-case error figure (already relative for `Metric::Rel`).
    fn error(&mut self, name: &str, anchor: &str, err: f64, tol: f64, metric: Metric, start: Instant) {
        let tolerance = self.tol(tol);
        self.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            computed: err,
            expected: 0.0,
            abs_err: err,
            rel_err: err,
            tolerance,
            metric,
            pass: err.is_finite() && err <= tolerance,
            expect_fail: false,
            elapsed_ms: None,
        }, start);
    }

    /// Records a scalar compared with its closed form.
    #[allow(clippy::too_many_arguments)]
    fn value(&mut self, name: &str, anchor: &str, computed: f64, expected: f64, tol: f64, metric: Metric, start: Instant) {
        let tolerance = self.tol(tol);
        let abs_err = (computed - expected).abs();
        let rel_err = abs_err / expected.abs().max(f64::MIN_POSITIVE);
        let err = if metric == Metric::Rel { rel_err } else { abs_err };
        self.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            computed,
            expected,
            abs_err,
            rel_err,
            tolerance,
            metric,
            pass: err.is_finite() && err <= tolerance,
            expect_fail: false,
            elapsed_ms: None,
        }, start);
    }

    fn property(&mut self, name: &str, anchor: &str, computed: f64, pass: bool, expect_fail: bool, start: Instant) {
        self.push(Check {
            name: name.into(),
            anchor: anchor.into(),
            computed,
            expected: 0.0,
            abs_err: 0.0,
            rel_err: 0.0,
            tolerance: 0.0,
            metric: Metric::Property,
            pass,
            expect_fail,
            elapsed_ms: None,
        }, start);
    }

    fn push(&mut self, mut c: Check, start: Instant) {
        if self.cfg.timings {
            c.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        self.checks.push(c);
    }
}

/// Independent random stream per check, so checks can be reordered or skipped.
fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// A point with `r` in `[0.5, 1.5]` at angular distance at least `0.05` from every mirror.
pub fn random_off_mirror_point<R: Rng>(rng: &mut R, m: usize) -> Complex64 {
    let width = PI / m as f64;
    loop {
        let th: f64 = rng.random_range(0.0..2.0 * PI);
        let off = th.rem_euclid(width);
        if off.min(width - off) >= 0.05 {
            return Complex64::from_polar(rng.random_range(0.5..1.5), th);
        }
    }
}

fn poly_rel_diff(f: &VectorPoly, g: &VectorPoly) -> f64 {
    (f - g).max_abs() / (1.0 + f.max_abs().max(g.max_abs()))
}

fn rel_c(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Every labelled basis element through `max_degree`: raw, and at exceptional degrees
/// also the sum, difference and `f_n` combinations.
pub fn all_labels(params: &Params, max_degree: usize) -> Vec<BasisLabel> {
    let mut out = Vec::new();
    for n in 1..=max_degree {
        out.extend(degree_labels(n, params, BasisStyle::Raw));
        for family in [1u8, 2] {
            if is_exceptional(family, n, params) {
                out.push(BasisLabel::Sum { family, n });
                out.push(BasisLabel::Diff { family, n });
                out.push(BasisLabel::F { family, n });
            }
        }
    }
    out
}

/// The harmonic basis through `max_degree`: the constants `t`, `tbar`, then `p_n`,
/// `sigma0 p_n` for both families.
pub fn harmonic_basis(params: &Params, max_degree: usize) -> Result<Vec<VectorPoly>> {
    let mut polys = vec![VectorPoly::t(), VectorPoly::tbar()];
    for n in 1..=max_degree {
        for l in degree_labels(n, params, BasisStyle::Raw) {
            polys.push(l.build(params)?);
        }
    }
    Ok(polys)
}

/// Families of checks that can be run separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Operators,
    Harmonics,
    Forms,
    Weight,
    Integrals,
}

impl Group {
    pub const ALL: [Group; 5] = [Group::Operators, Group::Harmonics, Group::Forms, Group::Weight, Group::Integrals];
}

/// Run every check for one parameter set.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    run_groups(cfg, &Group::ALL)
}

/// Run the chosen check groups, in the fixed order of [`Group::ALL`].
pub fn run_groups(cfg: &VerifyConfig, groups: &[Group]) -> Result<VerifyReport> {
    let params = cfg.params()?;
    let mut b = Builder { cfg, checks: Vec::new() };
    let deg = cfg.max_degree();

    for g in Group::ALL.into_iter().filter(|g| groups.contains(g)) {
        match g {
            Group::Operators => operator_checks(&mut b, &params)?,
            Group::Harmonics => harmonic_checks(&mut b, &params, deg)?,
            Group::Forms => form_checks(&mut b, &params, deg)?,
            Group::Weight => weight_checks(&mut b, &params)?,
            Group::Integrals => integral_checks(&mut b, &params, deg)?,
        }
    }

    let pass = b.checks.iter().all(Check::ok);
    Ok(VerifyReport {
        config: cfg.clone(),
        lambda1: params.lambda1,
        lambda2: params.lambda2,
        delta: params.delta,
        positive_regime: params.is_positive_regime(),
        checks: b.checks,
        pass,
    })
}

fn operator_checks(b: &mut Builder, p: &Params) -> Result<()> {
    let start = Instant::now();
    let mut rng = rng_for(b.cfg.seed, 1);
    let polys: Vec<VectorPoly> = (0..b.cfg.samples).map(|_| random_vector_poly(&mut rng, 10)).collect();
    let pts: Vec<Vec<Complex64>> = (0..b.cfg.samples)
        .map(|_| (0..b.cfg.points).map(|_| random_off_mirror_point(&mut rng, p.m)).collect())
        .collect();
    let worst = polys
        .par_iter()
        .zip(&pts)
        .map(|(f, zs)| -> Result<f64> {
            let (df, dbf) = (apply_d(f, p), apply_dbar(f, p));
            let mut w = 0.0_f64;
            for &z in zs {
                let (o1, o2) = pointwise_d_oracle(f, z, p)?;
                let (c1, c2) = df.evaluate(z);
                let (q1, q2) = pointwise_dbar_oracle(f, z, p)?;
                let (e1, e2) = dbf.evaluate(z);
                w = w.max(rel_c(c1, o1)).max(rel_c(c2, o2)).max(rel_c(e1, q1)).max(rel_c(e2, q2));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    b.error("dunkl_vs_pointwise", "symbolic D, Dbar equal the difference-quotient definition", worst, 1e-10, Metric::Rel, start);

    let start = Instant::now();
    let worst = polys
        .par_iter()
        .map(|f| {
            let lhs = apply_d(&f.mul_z(), p);
            let rhs = &(&apply_d(f, p).mul_z() + f) + &t_z(f, p).scale_re(p.kappa);
            poly_rel_diff(&lhs, &rhs)
        })
        .reduce(|| 0.0, f64::max);
    b.error("product_rule", "D(z f) = (z D + 1) f + kappa T_z f", worst, 1e-11, Metric::Rel, start);
    Ok(())
}

fn harmonic_checks(b: &mut Builder, p: &Params, deg: usize) -> Result<()> {
    let start = Instant::now();
    let mut polys: Vec<VectorPoly> = Vec::new();
    for l in all_labels(p, deg) {
        let f = l.build(p)?;
        if let BasisLabel::Harmonic(h) = l {
            if !h.mirrored {
                polys.push(sigma0(&f));
            }
        }
        polys.push(f);
    }
    for family in [1u8, 2] {
        for k in 0.. {
            let q = big_p(family, k, p)?;
            if q.degree().unwrap_or(0) as usize > deg {
                break;
            }
            polys.push(sigma0(&q));
            polys.push(q);
        }
    }
    let worst = polys
        .par_iter()
        .map(|f| laplacian(f, p).max_abs() / f.max_abs())
        .reduce(|| 0.0, f64::max);
    b.error("harmonicity", "Laplacian annihilates every basis polynomial", worst, 1e-10, Metric::Rel, start);

    let start = Instant::now();
    let (mut coeff_err, mut one_err) = (0.0_f64, 0.0_f64);
    for lambda in [p.lambda1, p.lambda2] {
        for n in 0..=12 {
            let (q1, q2) = q_pair(n, p.kappa, lambda);
            for j in 0..=n {
                let (a, bb) = ((n - j) as u32, j as u32);
                for (kind, q) in [(1u8, &q1), (2u8, &q2)] {
                    let c = q_coeff_closed(kind, n, j, p.kappa, lambda)?;
                    coeff_err = coeff_err.max((q.coeff(a, bb).re - c).abs() / (1.0 + c.abs()));
                }
            }
            for (kind, q) in [(1u8, &q1), (2u8, &q2)] {
                let s: f64 = q.iter().map(|(_, _, c)| c.re).sum();
                let want = q_at_one(kind, n, p.kappa, lambda)?;
                one_err = one_err.max((s - want).abs() / (1.0 + want.abs()));
            }
        }
    }
    b.error("q_recurrence_vs_4f3", "recurrence coefficients equal the balanced 4F3 closed forms, n <= 12", coeff_err, 1e-10, Metric::Rel, start);
    b.error("q_value_at_one", "Q_n(1, 1) equals the Pochhammer closed form, n <= 12", one_err, 1e-11, Metric::Rel, start);
    Ok(())
}

#[allow(clippy::needless_range_loop)] // symmetric matrix indexing
fn form_checks(b: &mut Builder, p: &Params, deg: usize) -> Result<()> {
    let start = Instant::now();
    let labels = all_labels(p, deg);
    let worst = labels
        .par_iter()
        .map(|l| -> Result<f64> {
            let f = l.build(p)?;
            let got = pairing(&f, &f, p)?;
            let want = closed_norm(l, p)?;
            Ok((got - want).norm() / want.abs())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    b.error("norm_closed_forms", "<b, b> equals its Pochhammer closed form for every basis kind", worst, 1e-9, Metric::Rel, start);

    let start = Instant::now();
    let mut ratio = 0.0_f64;
    let mut min_eig = f64::INFINITY;
    let mut min_diag = f64::INFINITY;
    for n in 1..=deg {
        let labels = degree_labels(n, p, BasisStyle::Orthogonal);
        let polys = labels.iter().map(|l| l.build(p)).collect::<Result<Vec<_>>>()?;
        let g = gram(&polys, labels.iter().map(|l| l.to_string()).collect(), p, FormKind::Algebraic)?;
        let nm = g.normalized();
        for i in 0..g.dim() {
            // in units of the kappa = 0 norm 2^{n+1} n!
            min_diag = min_diag.min(g.entries[i][i].re / (2.0 * circle_scale(n as u32)));
            for j in 0..g.dim() {
                if i != j {
                    ratio = ratio.max(nm[i][j].norm());
                }
            }
        }
        if let Some(&lo) = g.normalized_eigenvalues().first() {
            min_eig = min_eig.min(lo);
        }
    }
    b.error("gram_diagonal", "orthogonal-style degree bases have diagonal Gram matrices", ratio, 1e-9, Metric::Rel, start);

    let start = Instant::now();
    let mut worst = 0.0_f64;
    for n in 1..=deg {
        for family in [1u8, 2] {
            if !is_exceptional(family, n, p) {
                continue;
            }
            let f = BasisLabel::p(family, n).build(p)?;
            let got = pairing(&sigma0(&f), &f, p)?;
            let want = closed_coupling(family, n, p)?;
            let scale = closed_norm(&BasisLabel::p(family, n), p)?.abs();
            worst = worst.max((got - want).norm() / scale);
        }
    }
    b.error("exceptional_coupling", "<sigma0 p_n, p_n> = -2 m kappa <p_{n-1}, p_{n-1}> at exceptional degrees", worst, 1e-9, Metric::Rel, start);

    let start = Instant::now();
    if p.is_positive_regime() {
        b.property("gram_positive_definite", "the form is positive-definite for |kappa| < ell/m", min_eig, min_eig > 0.0, false, start);
    } else {
        // outside the interval the identity fails; confirm through a negative norm
        b.property("gram_positive_definite", "the form is positive-definite for |kappa| < ell/m", min_diag, min_diag > 0.0, true, start);
    }
    Ok(())
}

fn weight_checks(b: &mut Builder, p: &Params) -> Result<()> {
    let (k, d) = (p.kappa, p.delta);
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for i in 0..200 {
        let v = 0.001 + 0.998 * i as f64 / 199.0;
        let (a1, a2) = f_split(k, d, v, 1.0 - v)?;
        let (b1, b2) = f_split(-k, d, v, 1.0 - v)?;
        worst = worst.max((a1 * b1 + a2 * b2 - 1.0).abs());
    }
    b.error("wronskian", "f1(k) f1(-k) + f2(k) f2(-k) = 1 on a 200-point grid", worst, 1e-12, Metric::Abs, start);

    let start = Instant::now();
    let (h, s) = (h_const(k, d), s_const(k, d));
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let v = 0.5 + 0.45 * (i as f64 + 0.5) / 50.0;
        let w = 1.0 - v;
        let lhs = f_direct(k, d, v, w)?;
        let (a1, a2) = f_direct(k, d, w, v)?;
        let (c1, c2) = f_direct(-k, d, w, v)?;
        worst = worst.max((lhs.0 - (h * c1 + s * a2)).abs()).max((lhs.1 - (s * a1 - h * c2)).abs());
    }
    b.error("connection_formulas", "f1, f2 at v equal the H, sin/cos combinations at 1 - v", worst, 1e-10, Metric::Abs, start);

    let start = Instant::now();
    let id = h * h_const(-k, d) + s * s;
    b.value("h_identity", "H(k) H(-k) + (sin pi delta / cos pi kappa)^2 = 1", id, 1.0, 1e-13, Metric::Abs, start);

    let start = Instant::now();
    let want = det_k_closed(p);
    let mut worst = 0.0_f64;
    let mut min_eig = f64::INFINITY;
    for i in 1..400 {
        let kr = k_real(PI * i as f64 / 400.0, p)?;
        worst = worst.max((kr.det() - want).abs());
        min_eig = min_eig.min(kr.sym_eigenvalues().0);
    }
    b.error("det_k_closed_form", "det K = (1 - (sin pi kappa / sin(pi ell/m))^2) / (4 pi^2) for every phi", worst, 1e-12, Metric::Abs, start);
    let start = Instant::now();
    let inside = p.is_positive_regime();
    b.property("weight_positive_definite", "K is positive-definite for |kappa| < ell/m", min_eig, min_eig > 0.0, !inside, start);

    let start = Instant::now();
    let mut rng = rng_for(b.cfg.seed, 2);
    let mut worst = 0.0_f64;
    for _ in 0..b.cfg.points {
        let z = random_off_mirror_point(&mut rng, p.m);
        let kz = k_at(z, p)?;
        let scale = kz.max_abs().max(1.0);
        for w in GroupElement::all(p.m) {
            let r = w.spin_matrix(p);
            let moved = k_at(w.apply_point(z, p), p)?;
            worst = worst.max((moved - r * kz * r.adjoint()).max_abs() / scale);
        }
    }
    b.error("equivariance", "K(w.z) = R_w K(z) R_w* for all 2m group elements", worst, 1e-11, Metric::Rel, start);

    let grid = dyadic_grid(6, 14);
    for kb in [0.1, 0.2] {
        let start = Instant::now();
        let q = p.with_kappa(kb)?;
        let diag = boundary_residuals(&q, &grid)?;
        let expected = diag.expected_exponent;
        for (name, exp) in [("k12", diag.k12_exponent), ("q", diag.q_exponent)] {
            let computed = exp.unwrap_or(f64::NAN);
            let abs_err = (computed - expected).abs();
            let tolerance = b.tol(0.05);
            b.push(Check {
                name: format!("boundary_{name}_decay_kappa_{kb}"),
                anchor: format!("{name} decays monotonically to the wall with exponent 1 - 2|kappa|"),
                computed,
                expected,
                abs_err,
                rel_err: abs_err / expected,
                tolerance,
                metric: Metric::Abs,
                pass: diag.is_monotone() && abs_err <= tolerance,
                expect_fail: false,
                elapsed_ms: None,
            }, start);
        }
    }
    Ok(())
}

#[allow(clippy::needless_range_loop)]
fn integral_checks(b: &mut Builder, p: &Params, deg: usize) -> Result<()> {
    let start = Instant::now();
    let table = KernelTable::new(p, &AngularRule::new(p.m, b.cfg.nodes))?;
    let t = VectorPoly::t();
    let tt = table.circle_pairing(&t, &t)?;
    b.value("normalization_t", "<t, t>_S = 2 by quadrature", tt.re, 2.0, 1e-8, Metric::Abs, start);

    let start = Instant::now();
    let rule = SingularRule::new(b.cfg.level);
    let g1 = g1_integral(p, &rule)?;
    b.value("g1_integral", "int G1 (v(1-v))^{-1/2} dv = 2 pi cos(delta pi) / cos(kappa pi)", g1, g1_integral_closed(p), 1e-6, Metric::Rel, start);
    let start = Instant::now();
    let (r1, r2) = f12_reflection_integrals(p, &rule)?;
    let (e1, e2) = f12_reflection_closed(p);
    b.value("reflection_integral_f1", "int f1(0; v) f1(0; 1-v) dv / sqrt(v(1-v)) closed form", r1, e1, 1e-8, Metric::Abs, start);
    b.value("reflection_integral_f2", "int f2(0; v) f2(0; 1-v) dv / sqrt(v(1-v)) closed form", r2, e2, 1e-8, Metric::Abs, start);

    let start = Instant::now();
    let polys = harmonic_basis(p, deg)?;
    let alg = gram(&polys, Vec::new(), p, FormKind::Gaussian)?;
    let num = table.gaussian_gram(&polys);
    let nrm: Vec<f64> = (0..polys.len()).map(|i| alg.entries[i][i].norm().sqrt()).collect();
    // normalized entries; true zeros are held to an absolute 1e-8 floor
    let err_of = |x: Complex64, y: Complex64, i: usize, j: usize| {
        let s = nrm[i] * nrm[j];
        (x - y).norm() / s / (y.norm() / s).max(1e-2)
    };
    let mut worst = 0.0_f64;
    for i in 0..polys.len() {
        for j in 0..polys.len() {
            worst = worst.max(err_of(num[i][j], alg.entries[i][j], i, j));
        }
    }
    b.error("gaussian_integral_vs_algebra", "int g K f* e^{-|z|^2/2} equals the algebraic Gaussian form", worst, 1e-6, Metric::Rel, start);

    let start = Instant::now();
    let degs: Vec<u32> = polys.iter().map(|f| f.degree().unwrap_or(0)).collect();
    let pairs: Vec<(usize, usize)> = (0..polys.len())
        .flat_map(|i| (0..polys.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| (degs[i] + degs[j]).is_multiple_of(2))
        .collect();
    let worst = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<f64> {
            let s = table.circle_pairing(&polys[i], &polys[j])? * circle_scale((degs[i] + degs[j]) / 2);
            Ok(err_of(s, alg.entries[i][j], i, j).max(err_of(s, num[i][j], i, j)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    b.error("circle_chamber_sum", "chamber-sum circle form times 2^n n! matches both Gaussian forms", worst, 1e-6, Metric::Rel, start);

    let start = Instant::now();
    let mut rng = rng_for(b.cfg.seed, 3);
    let mut worst = 0.0_f64;
    for d in 1..=3u32 {
        let f = random_homogeneous(&mut rng, d);
        let g = random_homogeneous(&mut rng, d);
        let (fp, gp) = (parity_components(&f, p), parity_components(&g, p));
        for (r1, x) in fp.iter().enumerate() {
            for (r2, y) in gp.iter().enumerate() {
                if r1 != r2 && !x.is_zero() && !y.is_zero() {
                    worst = worst.max(table.gaussian_pairing(x, y).norm()).max(pairing(x, y, p)?.norm());
                }
            }
        }
    }
    b.error("parity_orthogonality", "pairings between distinct m-parity classes vanish", worst, 1e-8, Metric::Abs, start);
    Ok(())
}
