//! Sparse polynomials in `(z, zbar)` and vector polynomials `f1 t + f2 tbar`, with the
//! dihedral group action, the star map and parity/degree bookkeeping.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::mat2::{CMat2, Mat2};
use crate::scalars::Params;

/// Coefficients at or below this magnitude are dropped on canonicalization.
pub const DROP_EPS: f64 = 1e-14;
/// Largest exponent any monomial may carry.
pub const MAX_EXPONENT: u32 = 1 << 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Exponent pair `(a, b)` of `z^a zbar^b`.
pub type Exps = (u32, u32);

/// Finite map `(a, b) -> c` representing `sum c z^a zbar^b`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalarPoly {
    terms: BTreeMap<Exps, Complex64>,
}

fn checked_exps(a: u32, b: u32) -> Exps {
    assert!(
        a <= MAX_EXPONENT && b <= MAX_EXPONENT,
        "polynomial exponent ({a}, {b}) exceeds {MAX_EXPONENT}"
    );
    (a, b)
}

impl ScalarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial(0, 0, c)
    }

    /// `c z^a zbar^b`.
    pub fn monomial(a: u32, b: u32, c: impl Into<Complex64>) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c.into());
        p
    }

    /// Build from `(a, b, c)` triples; repeated exponents accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, Complex64)>) -> Self {
        let mut p = Self::zero();
        for (a, b, c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    /// Accumulate `c z^a zbar^b`, keeping canonical form.
    pub fn add_term(&mut self, a: u32, b: u32, c: Complex64) {
        let key = checked_exps(a, b);
        let entry = self.terms.entry(key).or_insert(ZERO);
        *entry += c;
        if entry.norm() <= DROP_EPS {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> Complex64 {
        self.terms.get(&(a, b)).copied().unwrap_or(ZERO)
    }

    /// Terms in lexicographic `(a, b)` order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    /// Highest total degree `a + b`, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(a, b)| a + b).max()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.norm()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.iter().map(|(a, b, c)| (a, b, c * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Multiply by `c z^da zbar^db`.
    pub fn mul_monomial(&self, da: u32, db: u32, c: Complex64) -> Self {
        Self::from_terms(self.iter().map(|(a, b, x)| (a + da, b + db, x * c)))
    }

    /// `p*(z, zbar) = sum conj(c_ab) z^b zbar^a`.
    pub fn star(&self) -> Self {
        Self::from_terms(self.iter().map(|(a, b, c)| (b, a, c.conj())))
    }

    /// `p(zbar, z)`: exponents swapped, coefficients unchanged.
    pub fn swap_vars(&self) -> Self {
        Self::from_terms(self.iter().map(|(a, b, c)| (b, a, c)))
    }

    /// Substitute `w = z^k`, `wbar = zbar^k`.
    pub fn substitute_powers(&self, k: u32) -> Self {
        Self::from_terms(self.iter().map(|(a, b, c)| (a * k, b * k, c)))
    }

    /// Value at `z` with `zbar = conj(z)`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.iter().map(|(a, b, c)| c * z.powu(a) * zb.powu(b)).sum()
    }

    /// Termwise `d/dz`.
    pub fn d_dz(&self) -> Self {
        Self::from_terms(
            self.iter()
                .filter(|&(a, _, _)| a > 0)
                .map(|(a, b, c)| (a - 1, b, c * a as f64)),
        )
    }

    /// Termwise `d/dzbar`.
    pub fn d_dzbar(&self) -> Self {
        Self::from_terms(
            self.iter()
                .filter(|&(_, b, _)| b > 0)
                .map(|(a, b, c)| (a, b - 1, c * b as f64)),
        )
    }

    /// Sum of the terms of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        Self::from_terms(self.iter().filter(|&(a, b, _)| a + b == d))
    }
}

impl Add for &ScalarPoly {
    type Output = ScalarPoly;
    fn add(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut out = self.clone();
        for (a, b, c) in rhs.iter() {
            out.add_term(a, b, c);
        }
        out
    }
}

impl Sub for &ScalarPoly {
    type Output = ScalarPoly;
    fn sub(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut out = self.clone();
        for (a, b, c) in rhs.iter() {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl Neg for &ScalarPoly {
    type Output = ScalarPoly;
    fn neg(self) -> ScalarPoly {
        self.scale_re(-1.0)
    }
}

impl Mul for &ScalarPoly {
    type Output = ScalarPoly;
    fn mul(self, rhs: &ScalarPoly) -> ScalarPoly {
        let mut out = ScalarPoly::zero();
        for (a1, b1, c1) in self.iter() {
            for (a2, b2, c2) in rhs.iter() {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

/// Spin component: the coefficient of `t` or of `tbar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Component {
    #[serde(rename = "t")]
    T,
    #[serde(rename = "tbar")]
    Tbar,
}

/// One serialized term of a vector polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub a: u32,
    pub b: u32,
    pub component: Component,
    pub re: f64,
    pub im: f64,
}

/// `f = comp_t * t + comp_tbar * tbar`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Term>", from = "Vec<Term>")]
pub struct VectorPoly {
    pub comp_t: ScalarPoly,
    pub comp_tbar: ScalarPoly,
}

impl From<VectorPoly> for Vec<Term> {
    fn from(f: VectorPoly) -> Self {
        f.terms()
    }
}

impl From<Vec<Term>> for VectorPoly {
    fn from(terms: Vec<Term>) -> Self {
        let mut f = VectorPoly::zero();
        for t in terms {
            f.add_term(t.a, t.b, t.component, Complex64::new(t.re, t.im));
        }
        f
    }
}

impl VectorPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(comp_t: ScalarPoly, comp_tbar: ScalarPoly) -> Self {
        VectorPoly { comp_t, comp_tbar }
    }

    /// The constant `t`.
    pub fn t() -> Self {
        Self::monomial(0, 0, Component::T, 1.0)
    }

    /// The constant `tbar`.
    pub fn tbar() -> Self {
        Self::monomial(0, 0, Component::Tbar, 1.0)
    }

    pub fn monomial(a: u32, b: u32, component: Component, c: impl Into<Complex64>) -> Self {
        let mut f = Self::zero();
        f.add_term(a, b, component, c.into());
        f
    }

    pub fn component(&self, c: Component) -> &ScalarPoly {
        match c {
            Component::T => &self.comp_t,
            Component::Tbar => &self.comp_tbar,
        }
    }

    pub fn add_term(&mut self, a: u32, b: u32, component: Component, c: Complex64) {
        match component {
            Component::T => self.comp_t.add_term(a, b, c),
            Component::Tbar => self.comp_tbar.add_term(a, b, c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comp_t.is_zero() && self.comp_tbar.is_zero()
    }

    /// Iterate `(a, b, component, c)` over both components.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, Component, Complex64)> + '_ {
        self.comp_t
            .iter()
            .map(|(a, b, c)| (a, b, Component::T, c))
            .chain(self.comp_tbar.iter().map(|(a, b, c)| (a, b, Component::Tbar, c)))
    }

    /// Terms sorted by `(a, b, component)` with `t` before `tbar`.
    pub fn terms(&self) -> Vec<Term> {
        let mut out: Vec<Term> = self
            .iter()
            .map(|(a, b, component, c)| Term { a, b, component, re: c.re, im: c.im })
            .collect();
        out.sort_by_key(|t| (t.a, t.b, t.component));
        out
    }

    pub fn degree(&self) -> Option<u32> {
        self.comp_t.degree().max(self.comp_tbar.degree())
    }

    /// Lowest total degree present.
    pub fn min_degree(&self) -> Option<u32> {
        self.iter().map(|(a, b, _, _)| a + b).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        !self.is_zero() && self.degree() == self.min_degree()
    }

    pub fn max_abs(&self) -> f64 {
        self.comp_t.max_abs().max(self.comp_tbar.max_abs())
    }

    pub fn len(&self) -> usize {
        self.comp_t.len() + self.comp_tbar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coeff(&self, a: u32, b: u32, component: Component) -> Complex64 {
        self.component(component).coeff(a, b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        VectorPoly::new(self.comp_t.scale(s), self.comp_tbar.scale(s))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `p * f` for a scalar polynomial `p`.
    pub fn mul_scalar(&self, p: &ScalarPoly) -> Self {
        VectorPoly::new(p * &self.comp_t, p * &self.comp_tbar)
    }

    /// `c z^da zbar^db f`.
    pub fn mul_monomial(&self, da: u32, db: u32, c: Complex64) -> Self {
        VectorPoly::new(
            self.comp_t.mul_monomial(da, db, c),
            self.comp_tbar.mul_monomial(da, db, c),
        )
    }

    /// `z f`.
    pub fn mul_z(&self) -> Self {
        self.mul_monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    /// `zbar f`.
    pub fn mul_zbar(&self) -> Self {
        self.mul_monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    /// `(f1(z), f2(z))` with `zbar = conj(z)`.
    pub fn evaluate(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.comp_t.evaluate(z), self.comp_tbar.evaluate(z))
    }

    /// Partition by total degree, ascending.
    pub fn homogeneous_components(&self) -> Vec<(u32, VectorPoly)> {
        let mut parts: BTreeMap<u32, VectorPoly> = BTreeMap::new();
        for (a, b, comp, c) in self.iter() {
            parts.entry(a + b).or_default().add_term(a, b, comp, c);
        }
        parts.into_iter().collect()
    }

    pub fn homogeneous_part(&self, d: u32) -> VectorPoly {
        VectorPoly::new(self.comp_t.homogeneous_part(d), self.comp_tbar.homogeneous_part(d))
    }
}

impl Add for &VectorPoly {
    type Output = VectorPoly;
    fn add(self, rhs: &VectorPoly) -> VectorPoly {
        VectorPoly::new(&self.comp_t + &rhs.comp_t, &self.comp_tbar + &rhs.comp_tbar)
    }
}

impl Sub for &VectorPoly {
    type Output = VectorPoly;
    fn sub(self, rhs: &VectorPoly) -> VectorPoly {
        VectorPoly::new(&self.comp_t - &rhs.comp_t, &self.comp_tbar - &rhs.comp_tbar)
    }
}

impl Neg for &VectorPoly {
    type Output = VectorPoly;
    fn neg(self) -> VectorPoly {
        self.scale_re(-1.0)
    }
}

impl fmt::Display for VectorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for t in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let spin = match t.component {
                Component::T => "t",
                Component::Tbar => "tbar",
            };
            write!(f, "({}{:+}i) z^{} zbar^{} {}", t.re, t.im, t.a, t.b, spin)?;
        }
        Ok(())
    }
}

/// `sigma_0`: swap exponents `(a, b) -> (b, a)` and swap `t <-> tbar`.
pub fn sigma0(f: &VectorPoly) -> VectorPoly {
    VectorPoly::new(f.comp_tbar.swap_vars(), f.comp_t.swap_vars())
}

/// Conjugate-linear star map on scalar polynomials.
pub fn star(p: &ScalarPoly) -> ScalarPoly {
    p.star()
}

/// m-parity of a single monomial: `a - b + ell` for `t`, `a - b - ell` for `tbar`, mod m.
pub fn monomial_parity(a: u32, b: u32, component: Component, params: &Params) -> usize {
    let s = match component {
        Component::T => params.ell as i64,
        Component::Tbar => -(params.ell as i64),
    };
    (a as i64 - b as i64 + s).rem_euclid(params.m as i64) as usize
}

/// Common m-parity of all monomials of `f`; `None` if mixed or `f = 0`.
pub fn m_parity(f: &VectorPoly, params: &Params) -> Option<usize> {
    let mut parity = None;
    for (a, b, comp, _) in f.iter() {
        let r = monomial_parity(a, b, comp, params);
        match parity {
            None => parity = Some(r),
            Some(p) if p != r => return None,
            _ => {}
        }
    }
    parity
}

/// Split `f` into its pure m-parity parts, indexed by parity.
pub fn parity_components(f: &VectorPoly, params: &Params) -> Vec<VectorPoly> {
    let mut out = vec![VectorPoly::zero(); params.m];
    for (a, b, comp, c) in f.iter() {
        out[monomial_parity(a, b, comp, params)].add_term(a, b, comp, c);
    }
    out
}

/// `(g1, g2) -> (g1 + g2, i (g1 - g2))`, the coordinates in the real spin basis.
pub fn to_real_components(v: (Complex64, Complex64)) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    (v.0 + v.1, i * (v.0 - v.1))
}

/// Element of the dihedral group of order `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupElement {
    /// `sigma_j`: `z -> zbar omega^j`.
    Reflection(usize),
    /// `rho_j`: `z -> z omega^j`.
    Rotation(usize),
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement::Rotation(0)
    }

    /// All `2m` elements: rotations first, then reflections.
    pub fn all(m: usize) -> Vec<GroupElement> {
        (0..m)
            .map(GroupElement::Rotation)
            .chain((0..m).map(GroupElement::Reflection))
            .collect()
    }

    pub fn index(&self) -> usize {
        match *self {
            GroupElement::Reflection(j) | GroupElement::Rotation(j) => j,
        }
    }

    pub fn is_reflection(&self) -> bool {
        matches!(self, GroupElement::Reflection(_))
    }

    /// Operator composition: `self.compose(other, m)` acts as `other` first, then `self`.
    pub fn compose(&self, other: &GroupElement, m: usize) -> GroupElement {
        use GroupElement::*;
        let md = |x: i64| x.rem_euclid(m as i64) as usize;
        let (j, k) = (self.index() as i64, other.index() as i64);
        match (self, other) {
            (Rotation(_), Rotation(_)) => Rotation(md(j + k)),
            (Reflection(_), Reflection(_)) => Rotation(md(k - j)),
            (Reflection(_), Rotation(_)) => Reflection(md(j + k)),
            (Rotation(_), Reflection(_)) => Reflection(md(k - j)),
        }
    }

    pub fn inverse(&self, m: usize) -> GroupElement {
        match *self {
            GroupElement::Rotation(j) => GroupElement::Rotation((m - j % m) % m),
            r => r,
        }
    }

    /// The substitution point: `(w f)(z) = f(point(z)) * spin_matrix`.
    pub fn apply_point(&self, z: Complex64, params: &Params) -> Complex64 {
        match *self {
            GroupElement::Rotation(j) => z * params.omega_pow(j as i64),
            GroupElement::Reflection(j) => z.conj() * params.omega_pow(j as i64),
        }
    }

    /// Row-convention spin matrix `R_w`: the value vector of `w f` at `z` is
    /// `(f1, f2)(apply_point(z)) * R_w`.
    pub fn spin_matrix(&self, params: &Params) -> CMat2 {
        let zero = Complex64::new(0.0, 0.0);
        let l = params.ell as i64;
        match *self {
            GroupElement::Rotation(j) => {
                let j = j as i64;
                Mat2::new(params.omega_pow(l * j), zero, zero, params.omega_pow(-l * j))
            }
            GroupElement::Reflection(j) => {
                let j = j as i64;
                Mat2::new(zero, params.omega_pow(l * j), params.omega_pow(-l * j), zero)
            }
        }
    }

    /// The representation matrix `tau_ell(w)` (column convention), the transpose of
    /// [`spin_matrix`](Self::spin_matrix). For reflections this is
    /// `[[0, omega^{-j ell}], [omega^{j ell}, 0]]`.
    pub fn tau(&self, params: &Params) -> CMat2 {
        self.spin_matrix(params).transpose()
    }
}

/// Action of a group element on a vector polynomial.
pub fn apply_group(w: GroupElement, f: &VectorPoly, params: &Params) -> VectorPoly {
    let l = params.ell as i64;
    let mut out = VectorPoly::zero();
    for (a, b, comp, c) in f.iter() {
        let diff = a as i64 - b as i64;
        let spin_shift = match comp {
            Component::T => l,
            Component::Tbar => -l,
        };
        let j = w.index() as i64;
        let phase = params.omega_pow(j * (diff + spin_shift));
        match w {
            GroupElement::Rotation(_) => out.add_term(a, b, comp, c * phase),
            GroupElement::Reflection(_) => {
                let flipped = match comp {
                    Component::T => Component::Tbar,
                    Component::Tbar => Component::T,
                };
                out.add_term(b, a, flipped, c * phase)
            }
        }
    }
    out
}

/// Random vector polynomial with every monomial of degree `<= max_degree` in both
/// components, coefficients uniform on `[-1, 1] x [-1, 1]`.
pub fn random_vector_poly<R: Rng>(rng: &mut R, max_degree: u32) -> VectorPoly {
    let mut f = VectorPoly::zero();
    for d in 0..=max_degree {
        for a in 0..=d {
            for comp in [Component::T, Component::Tbar] {
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                f.add_term(a, d - a, comp, c);
            }
        }
    }
    f
}

/// Random homogeneous vector polynomial of degree `d`.
pub fn random_homogeneous<R: Rng>(rng: &mut R, d: u32) -> VectorPoly {
    random_vector_poly(rng, d).homogeneous_part(d)
}
