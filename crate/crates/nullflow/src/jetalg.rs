//! Exact differential polynomials in the jet variables u, u1, u2, ...
//!
//! Coefficients are arbitrary-precision rationals, or elements of Q(sqrt 2)
//! for the 4x4 Lie-algebra-valued matrices.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::JetError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Coefficient ring for [`JetPoly`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// True when printing needs a leading minus sign.
    fn is_negative(&self) -> bool;
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// `rat + irr * sqrt(2)` with rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSqrt2 {
    pub rat: Rational,
    pub irr: Rational,
}

impl QSqrt2 {
    pub fn new(rat: Rational, irr: Rational) -> Self {
        Self { rat, irr }
    }

    pub fn sqrt2() -> Self {
        Self::new(Zero::zero(), One::one())
    }

    /// `1/sqrt(2) = sqrt(2)/2`.
    pub fn inv_sqrt2() -> Self {
        Self::new(Zero::zero(), rat(1, 2))
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (Zero::is_zero(&self.rat), Zero::is_zero(&self.irr)) {
            (_, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "{}*sqrt2", self.irr),
            (false, false) => write!(f, "({} + {}*sqrt2)", self.rat, self.irr),
        }
    }
}

impl Coeff for QSqrt2 {
    fn zero() -> Self {
        Self::new(Zero::zero(), Zero::zero())
    }
    fn one() -> Self {
        Self::new(One::one(), Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.rat) && Zero::is_zero(&self.irr)
    }
    fn add(&self, o: &Self) -> Self {
        Self::new(&self.rat + &o.rat, &self.irr + &o.irr)
    }
    fn mul(&self, o: &Self) -> Self {
        let two = int(2);
        Self::new(&self.rat * &o.rat + two * &self.irr * &o.irr, &self.rat * &o.irr + &self.irr * &o.rat)
    }
    fn neg(&self) -> Self {
        Self::new(-&self.rat, -&self.irr)
    }
    fn from_rational(r: Rational) -> Self {
        Self::new(r, Zero::zero())
    }
    fn to_f64(&self) -> f64 {
        Coeff::to_f64(&self.rat) + Coeff::to_f64(&self.irr) * std::f64::consts::SQRT_2
    }
    fn is_negative(&self) -> bool {
        if Zero::is_zero(&self.irr) {
            Signed::is_negative(&self.rat)
        } else {
            Zero::is_zero(&self.rat) && Signed::is_negative(&self.irr)
        }
    }
}

/// Exponent vector indexed by jet order, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        Self(v)
    }

    pub fn from_exponents(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Self(e)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Highest jet index present, `None` for the constant monomial.
    pub fn order(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let n = self.0.len().max(o.0.len());
        Monomial::from_exponents((0..n).map(|i| self.exponent(i) + o.exponent(i)).collect())
    }

    fn with_exponent(&self, i: usize, e: u32) -> Monomial {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = e;
        Monomial::from_exponents(v)
    }
}

/// Printing order: higher jet indices first, then higher exponents.
impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        let n = self.0.len().max(o.0.len());
        for i in (0..n).rev() {
            match o.exponent(i).cmp(&self.exponent(i)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if i == 0 {
                write!(f, "u")?;
            } else {
                write!(f, "u{i}")?;
            }
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Polynomial in finitely many jet variables; zero coefficients never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoly<C: Coeff = Rational> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> Default for JetPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> JetPoly<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn rational(r: Rational) -> Self {
        Self::constant(C::from_rational(r))
    }

    pub fn int(n: i64) -> Self {
        Self::rational(int(n))
    }

    /// The jet variable u_(i).
    pub fn var(i: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(i), C::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
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

    /// Maximal jet index appearing, `None` for constants.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().filter_map(Monomial::order).max()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))))
    }

    pub fn scale_rational(&self, k: Rational) -> Self {
        self.scale(&C::from_rational(k))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1.mul(c2));
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Partial derivative with respect to u_(i).
    pub fn partial(&self, i: usize) -> Self {
        let mut r = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e > 0 {
                r.add_term(m.with_exponent(i, e - 1), c.mul(&C::from_rational(int(e as i64))));
            }
        }
        r
    }

    /// Total derivative D = sum_i u_(i+1) d/du_(i).
    pub fn total_derivative(&self) -> Self {
        let Some(k) = self.order() else {
            return Self::zero();
        };
        (0..=k).fold(Self::zero(), |acc, i| acc.add(&self.partial(i).mul(&Self::var(i + 1))))
    }

    pub fn total_derivative_n(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.total_derivative())
    }

    /// Variational derivative sum_i (-D)^i d/du_(i).
    pub fn euler(&self) -> Self {
        let Some(k) = self.order() else {
            return Self::zero();
        };
        let mut r = Self::zero();
        for i in 0..=k {
            let mut t = self.partial(i).total_derivative_n(i);
            if i % 2 == 1 {
                t = t.neg();
            }
            r = r.add(&t);
        }
        r
    }

    /// Time derivative when u_t is given by `ut`: sum_i d/du_(i) * D^i(ut).
    pub fn time_derivative(&self, ut: &Self) -> Self {
        let Some(k) = self.order() else {
            return Self::zero();
        };
        let mut r = Self::zero();
        let mut dut = ut.clone();
        for i in 0..=k {
            r = r.add(&self.partial(i).mul(&dut));
            dut = dut.total_derivative();
        }
        r
    }

    /// D^{-1}: the primitive vanishing at the zero jet.
    pub fn primitive(&self) -> Result<Self, JetError> {
        if !self.euler().is_zero() {
            return Err(JetError::NotATotalDivergence);
        }
        let mut rest = self.clone();
        let mut q = Self::zero();
        while let Some(k) = rest.order() {
            if k == 0 {
                return Err(JetError::NotATotalDivergence);
            }
            // rest = A u_k + B; integrate A in u_(k-1)
            let a = rest.partial(k);
            if a.order() == Some(k) {
                return Err(JetError::NotATotalDivergence);
            }
            let mut piece = Self::zero();
            for (m, c) in &a.terms {
                let e = m.exponent(k - 1);
                piece.add_term(m.with_exponent(k - 1, e + 1), c.mul(&C::from_rational(rat(1, e as i64 + 1))));
            }
            rest = rest.sub(&piece.total_derivative());
            q = q.add(&piece);
        }
        if rest.is_zero() {
            Ok(q)
        } else {
            Err(JetError::NotATotalDivergence)
        }
    }

    /// Numeric value on a jet `[u, u1, u2, ...]`.
    pub fn evaluate(&self, jet: &[f64]) -> Result<f64, JetError> {
        if let Some(k) = self.order() {
            if jet.len() < k + 1 {
                return Err(JetError::InsufficientJet { given: jet.len(), order: k });
            }
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| m.exponents().iter().enumerate().fold(c.to_f64(), |acc, (i, &e)| acc * jet[i].powi(e as i32)))
            .sum())
    }
}

impl JetPoly<Rational> {
    /// Embeds into Q(sqrt 2) coefficients.
    pub fn to_qsqrt2(&self) -> JetPoly<QSqrt2> {
        JetPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), QSqrt2::from_rational(c.clone()))))
    }
}

impl<C: Coeff> fmt::Display for JetPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let mag = if negative { c.neg() } else { c.clone() };
            if n == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let constant = m.order().is_none();
            if constant {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// 𝒟(p) = D^3 p - 4 u D p - 2 u1 p.
pub fn script_d<C: Coeff>(p: &JetPoly<C>) -> JetPoly<C> {
    let u = JetPoly::<C>::var(0);
    let u1 = JetPoly::<C>::var(1);
    let dp = p.total_derivative();
    p.total_derivative_n(3).sub(&u.mul(&dp).scale_rational(int(4))).sub(&u1.mul(p).scale_rational(int(2)))
}

fn lenard_cache() -> &'static Mutex<Vec<JetPoly>> {
    static CACHE: OnceLock<Mutex<Vec<JetPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![JetPoly::one(), JetPoly::var(0)]))
}

/// Lenard sequence p_0 = 1, p_1 = u, p_n = D^{-1} 𝒟 p_{n-1}.
pub fn lenard_p(n: usize) -> Result<JetPoly, JetError> {
    let mut cache = lenard_cache().lock().unwrap_or_else(|e| e.into_inner());
    while cache.len() <= n {
        let prev = cache.last().cloned().unwrap_or_else(JetPoly::one);
        let next = script_d(&prev).primitive()?;
        cache.push(next);
    }
    Ok(cache[n].clone())
}

/// Right-hand side of the n-th KdV equation u_t + D(p_{n+1}) = 0.
pub fn kdv_rhs(n: usize) -> Result<JetPoly, JetError> {
    Ok(lenard_p(n + 1)?.total_derivative())
}

/// Conserved density h_n = int_0^1 p_n(eps u) u d eps.
pub fn hamiltonian_density(n: usize) -> Result<JetPoly, JetError> {
    let p = lenard_p(n)?;
    let u = JetPoly::var(0);
    let mut h = JetPoly::zero();
    for (m, c) in p.terms() {
        let d = m.degree() as i64;
        let term = JetPoly::from_terms([(m.clone(), c * rat(1, d + 1))]).mul(&u);
        h = h.add(&term);
    }
    Ok(h)
}

/// The four coefficient sequences of the n-th LIEN flow.
#[derive(Debug, Clone, PartialEq)]
pub struct LienCoefficients {
    pub r: JetPoly,
    pub q: JetPoly,
    pub a: JetPoly,
    pub b: JetPoly,
}

pub fn lien_coefficients(n: usize) -> Result<LienCoefficients, JetError> {
    let two = JetPoly::int(2);
    let mut r = two.clone();
    let mut q = two;
    if n >= 1 {
        let p1 = lenard_p(1)?.scale_rational(int(2));
        r = p1.sub(&JetPoly::int(4));
        q = p1.add(&JetPoly::int(4));
    }
    for k in 2..=n {
        let pk = lenard_p(k)?.scale_rational(int(2));
        r = pk.add(&r.scale_rational(int(4)));
        q = pk.sub(&q.scale_rational(int(4)));
    }
    let a = r.add(&q);
    let b = r.sub(&q);
    Ok(LienCoefficients { r, q, a, b })
}

/// Components of the n-th LIEN velocity along (T, N, B).
#[derive(Debug, Clone, PartialEq)]
pub struct LienVelocity {
    pub tangent: JetPoly<QSqrt2>,
    pub normal: JetPoly<QSqrt2>,
    pub binormal: JetPoly<QSqrt2>,
}

/// Matrix of differential polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixJetPoly<C: Coeff = Rational> {
    rows: usize,
    cols: usize,
    entries: Vec<JetPoly<C>>,
}

impl<C: Coeff> MatrixJetPoly<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![JetPoly::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<JetPoly<C>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &JetPoly<C> {
        &self.entries[i * self.cols + j]
    }

    pub fn map(&self, f: impl Fn(&JetPoly<C>) -> JetPoly<C>) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut r = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = JetPoly::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
                }
                r.entries[i * o.cols + j] = acc;
            }
        }
        r
    }

    pub fn transpose(&self) -> Self {
        let mut r = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        r
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(JetPoly::is_zero)
    }

    /// Numeric matrix (row-major) on a jet.
    pub fn evaluate(&self, jet: &[f64]) -> Result<Vec<f64>, JetError> {
        self.entries.iter().map(|e| e.evaluate(jet)).collect()
    }
}

/// Gram matrix of the Cartan basis of R^{2,2}.
pub fn cartan_gram() -> MatrixJetPoly<QSqrt2> {
    let z = JetPoly::zero;
    let c = JetPoly::<QSqrt2>::int;
    MatrixJetPoly::from_rows(vec![
        vec![c(-1), z(), z(), z()],
        vec![z(), z(), z(), c(1)],
        vec![z(), z(), c(1), z()],
        vec![z(), c(1), z(), z()],
    ])
}

/// Membership in the Lie algebra: X^t g + g X = 0.
pub fn in_lie_algebra(x: &MatrixJetPoly<QSqrt2>) -> bool {
    let g = cartan_gram();
    x.transpose().mul(&g).add(&g.mul(x)).is_zero()
}

/// Velocity components of the n-th LIEN flow along (T, N, B).
pub fn lien_velocity(n: usize) -> Result<LienVelocity, JetError> {
    let LienCoefficients { a, b, .. } = lien_coefficients(n)?;
    let (a, b) = (a.to_qsqrt2(), b.to_qsqrt2());
    let u = JetPoly::<QSqrt2>::var(0);
    let s = QSqrt2::inv_sqrt2();
    let half = QSqrt2::from_rational(rat(1, 2));
    let tangent = a.add(&u.mul(&b)).sub(&b.total_derivative_n(2).scale(&half)).scale(&s);
    let normal = b.total_derivative().scale(&half);
    let binormal = b.scale(&s);
    Ok(LienVelocity { tangent, normal, binormal })
}

/// The matrices (𝔎, 𝔓_n) of the Lax formulation of the n-th flow.
pub fn lien_matrix_polys(n: usize) -> Result<(MatrixJetPoly<QSqrt2>, MatrixJetPoly<QSqrt2>), JetError> {
    let LienCoefficients { a, b, .. } = lien_coefficients(n)?;
    let (a, b) = (a.to_qsqrt2(), b.to_qsqrt2());
    let u = JetPoly::<QSqrt2>::var(0);
    let s = QSqrt2::inv_sqrt2();
    let half = QSqrt2::from_rational(rat(1, 2));
    let v = lien_velocity(n)?;
    let (x21, x31, x41) = (v.tangent, v.normal, v.binormal);
    let x22 = a.total_derivative().scale(&half).neg();
    let x32 = a.scale(&s);
    let x23 = b.add(&u.mul(&a)).sub(&a.total_derivative_n(2).scale(&half)).scale(&s);

    let z = JetPoly::<QSqrt2>::zero;
    let r2 = JetPoly::constant(QSqrt2::sqrt2());
    let ru = u.scale(&QSqrt2::sqrt2());
    let k = MatrixJetPoly::from_rows(vec![
        vec![z(), z(), z(), r2.clone()],
        vec![r2.clone(), z(), ru.clone(), z()],
        vec![z(), r2.clone(), z(), ru.neg()],
        vec![z(), z(), r2.neg(), z()],
    ]);
    let p = MatrixJetPoly::from_rows(vec![
        vec![z(), x41.clone(), x31.clone(), x21.clone()],
        vec![x21, x22.clone(), x23.clone(), z()],
        vec![x31, x32.clone(), z(), x23.neg()],
        vec![x41, z(), x32.neg(), x22.neg()],
    ]);
    Ok((k, p))
}

/// Largest n the symbolic flatness check is run for by default.
pub const ZERO_CURVATURE_MAX_DEFAULT: usize = 3;

/// Curvature velocity u_t induced by the n-th LIEN flow.
///
/// For n >= 1 this is -kdv_rhs(n). The n = 0 flow is the translation
/// d_t gamma = 2 gamma', so u_t = 2 u1.
pub fn lien_kdv_velocity(n: usize) -> Result<JetPoly, JetError> {
    if n == 0 {
        Ok(JetPoly::var(1).scale_rational(int(2)))
    } else {
        Ok(kdv_rhs(n)?.neg())
    }
}

/// d_t 𝔎 - D 𝔓_n - [𝔎, 𝔓_n] along [`lien_kdv_velocity`]; identically zero.
pub fn zero_curvature_check(n: usize) -> Result<MatrixJetPoly<QSqrt2>, JetError> {
    let (k, p) = lien_matrix_polys(n)?;
    let ut = lien_kdv_velocity(n)?.to_qsqrt2();
    let dtk = k.map(|e| e.time_derivative(&ut));
    let dsp = p.map(JetPoly::total_derivative);
    Ok(dtk.sub(&dsp).sub(&k.commutator(&p)))
}

/// The 2x2 Lax pair (K_lambda, P_lambda) of the KdV equation.
pub fn lax_pair_2x2(lambda: &Rational) -> (MatrixJetPoly, MatrixJetPoly) {
    let u = JetPoly::var(0);
    let u1 = JetPoly::var(1);
    let u2 = JetPoly::var(2);
    let l = JetPoly::rational(lambda.clone());
    let k = MatrixJetPoly::from_rows(vec![vec![JetPoly::zero(), u.add(&l)], vec![JetPoly::one(), JetPoly::zero()]]);
    let p12 = u2.neg().add(&u.pow(2).scale_rational(int(2))).sub(&u.mul(&l).scale_rational(int(2))).sub(&l.pow(2).scale_rational(int(4)));
    let p21 = u.scale_rational(int(2)).sub(&l.scale_rational(int(4)));
    let p = MatrixJetPoly::from_rows(vec![vec![u1.neg(), p12], vec![p21, u1]]);
    (k, p)
}

/// d_t K - D P - [K, P] for the 2x2 pair, with u_t given by `ut`.
pub fn lax_defect_2x2(lambda: &Rational, ut: &JetPoly) -> MatrixJetPoly {
    let (k, p) = lax_pair_2x2(lambda);
    let dtk = k.map(|e| e.time_derivative(ut));
    dtk.sub(&p.map(JetPoly::total_derivative)).sub(&k.commutator(&p))
}
