//! Truncated bivariate Taylor series in two small increments `(ds, dt)`.
//!
//! Used to get exact s- and t-derivatives of closed-form bendings without
//! finite differences. Truncation is rectangular: powers `ds^i dt^j` with
//! `i <= ns`, `j <= nt` are kept.

use std::ops::{Add, Mul, Neg, Sub};

use crate::specfun::{jacobi_sncndn, EllipticParameter};

#[derive(Debug, Clone, PartialEq)]
pub struct Taylor2 {
    ns: usize,
    nt: usize,
    c: Vec<f64>,
}

impl Taylor2 {
    pub fn constant(x: f64, ns: usize, nt: usize) -> Self {
        let mut c = vec![0.0; (ns + 1) * (nt + 1)];
        c[0] = x;
        Self { ns, nt, c }
    }

    /// `x0 + a ds + b dt`.
    pub fn linear(x0: f64, a: f64, b: f64, ns: usize, nt: usize) -> Self {
        let mut r = Self::constant(x0, ns, nt);
        if ns > 0 {
            r.set(1, 0, a);
        }
        if nt > 0 {
            r.set(0, 1, b);
        }
        r
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.nt + 1) + j
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.c[k] = v;
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i > self.ns || j > self.nt {
            0.0
        } else {
            self.c[self.idx(i, j)]
        }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Mixed partial derivative `d^i/ds^i d^j/dt^j` at the expansion point.
    pub fn derivative(&self, i: usize, j: usize) -> f64 {
        self.coeff(i, j) * factorial(i) * factorial(j)
    }

    /// Series of the partial derivative in s (order in s drops by one).
    pub fn d_ds(&self) -> Self {
        let mut r = Self::constant(0.0, self.ns, self.nt);
        for i in 0..self.ns {
            for j in 0..=self.nt {
                r.set(i, j, (i + 1) as f64 * self.c[self.idx(i + 1, j)]);
            }
        }
        r
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { ns: self.ns, nt: self.nt, c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn add_const(&self, k: f64) -> Self {
        let mut r = self.clone();
        r.c[0] += k;
        r
    }

    pub fn recip(&self) -> Self {
        let a0 = self.c[0];
        let mut r = Self::constant(0.0, self.ns, self.nt);
        for i in 0..=self.ns {
            for j in 0..=self.nt {
                if i == 0 && j == 0 {
                    r.c[0] = 1.0 / a0;
                    continue;
                }
                let mut acc = 0.0;
                for p in 0..=i {
                    for q in 0..=j {
                        if p == 0 && q == 0 {
                            continue;
                        }
                        acc += self.c[self.idx(p, q)] * r.c[r.idx(i - p, j - q)];
                    }
                }
                r.set(i, j, -acc / a0);
            }
        }
        r
    }

    /// Composes a univariate series `sum g_k x^k` (in the increment of the
    /// argument) with the non-constant part of `self`.
    pub fn compose(&self, g: &[f64]) -> Self {
        let mut delta = self.clone();
        delta.c[0] = 0.0;
        // Horner in delta
        let mut r = Self::constant(0.0, self.ns, self.nt);
        for &gk in g.iter().rev() {
            r = &(&r * &delta) + &Self::constant(gk, self.ns, self.nt);
        }
        r
    }

    pub fn order_s(&self) -> usize {
        self.ns
    }

    pub fn order_t(&self) -> usize {
        self.nt
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Add for &Taylor2 {
    type Output = Taylor2;
    fn add(self, o: &Taylor2) -> Taylor2 {
        Taylor2 { ns: self.ns, nt: self.nt, c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Taylor2 {
    type Output = Taylor2;
    fn sub(self, o: &Taylor2) -> Taylor2 {
        Taylor2 { ns: self.ns, nt: self.nt, c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Taylor2 {
    type Output = Taylor2;
    fn neg(self) -> Taylor2 {
        self.scale(-1.0)
    }
}

impl Mul for &Taylor2 {
    type Output = Taylor2;
    fn mul(self, o: &Taylor2) -> Taylor2 {
        let mut r = Taylor2::constant(0.0, self.ns, self.nt);
        for i in 0..=self.ns {
            for j in 0..=self.nt {
                let a = self.c[self.idx(i, j)];
                if a == 0.0 {
                    continue;
                }
                for p in 0..=self.ns - i {
                    for q in 0..=self.nt - j {
                        let k = r.idx(i + p, j + q);
                        r.c[k] += a * o.c[o.idx(p, q)];
                    }
                }
            }
        }
        r
    }
}

/// Univariate Taylor coefficients of (sn, cn, dn)(x0 + x) in x up to `order`.
pub fn sncndn_coefficients(x0: f64, mu: EllipticParameter, order: usize) -> [Vec<f64>; 3] {
    let m = mu.get();
    let v = jacobi_sncndn(x0, mu);
    let mut s = vec![v.sn];
    let mut c = vec![v.cn];
    let mut d = vec![v.dn];
    let conv = |a: &[f64], b: &[f64], k: usize| (0..=k).map(|i| a[i] * b[k - i]).sum::<f64>();
    for k in 0..order {
        let cd = conv(&c, &d, k);
        let sd = conv(&s, &d, k);
        let sc = conv(&s, &c, k);
        let kk = (k + 1) as f64;
        s.push(cd / kk);
        c.push(-sd / kk);
        d.push(-m * sc / kk);
    }
    [s, c, d]
}

/// sn, cn, dn of a bivariate series argument.
pub fn sncndn_series(arg: &Taylor2, mu: EllipticParameter) -> [Taylor2; 3] {
    let order = arg.order_s() + arg.order_t();
    let [s, c, d] = sncndn_coefficients(arg.value(), mu, order);
    [arg.compose(&s), arg.compose(&c), arg.compose(&d)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_reciprocal() {
        let x = Taylor2::linear(2.0, 1.0, 0.5, 4, 2);
        let one = &x * &x.recip();
        assert!((one.value() - 1.0).abs() < 1e-15);
        for i in 0..=4 {
            for j in 0..=2 {
                if i + j > 0 {
                    assert!(one.coeff(i, j).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn sn_derivatives_match_identities() {
        let mu = EllipticParameter::new(0.6).unwrap();
        let x = Taylor2::linear(0.8, 1.0, 0.0, 5, 0);
        let [s, c, d] = sncndn_series(&x, mu);
        let v = jacobi_sncndn(0.8, mu);
        assert!((s.derivative(1, 0) - v.cn * v.dn).abs() < 1e-14);
        assert!((c.derivative(1, 0) + v.sn * v.dn).abs() < 1e-14);
        assert!((d.derivative(1, 0) + 0.6 * v.sn * v.cn).abs() < 1e-14);
        // compare with finite differences of the closed form
        let h = 1e-3;
        let f = |x: f64| jacobi_sncndn(x, mu).sn;
        let fd3 = (f(0.8 + 2.0 * h) - 2.0 * f(0.8 + h) + 2.0 * f(0.8 - h) - f(0.8 - 2.0 * h)) / (2.0 * h * h * h);
        assert!((s.derivative(3, 0) - fd3).abs() < 1e-5);
    }
}
