//! Truncated Taylor series ("jets") for exact higher derivatives of
//! composed closed-form expressions.
//!
//! A jet of order `K` at `r0` holds `c_k` with `f(r0 + h) = Σ c_k h^k + O(h^{K+1})`,
//! so `f^{(k)}(r0) = k! c_k`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Self { c }
    }

    /// The identity function expanded at `r0`.
    pub fn variable(r0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = r0;
        if order > 0 {
            c[1] = 1.0;
        }
        Self { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        if k > self.order() {
            return f64::NAN;
        }
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * fact
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            c: self.c.iter().map(|v| v * a).collect(),
        }
    }

    pub fn add_const(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += a;
        out
    }

    pub fn recip(&self) -> Self {
        Jet::constant(1.0, self.order()).div(self)
    }

    pub fn div(&self, b: &Jet) -> Self {
        let k_max = self.order();
        let mut q = vec![0.0; k_max + 1];
        for k in 0..=k_max {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= b.c[j] * q[k - j];
            }
            q[k] = acc / b.c[0];
        }
        Self { c: q }
    }

    pub fn exp(&self) -> Self {
        let k_max = self.order();
        let mut e = vec![0.0; k_max + 1];
        e[0] = self.c[0].exp();
        for k in 1..=k_max {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Self { c: e }
    }

    pub fn ln(&self) -> Self {
        let k_max = self.order();
        let mut l = vec![0.0; k_max + 1];
        l[0] = self.c[0].ln();
        for k in 1..=k_max {
            let mut acc = self.c[k];
            for j in 1..k {
                acc -= j as f64 * l[j] * self.c[k - j] / k as f64;
            }
            l[k] = acc / self.c[0];
        }
        Self { c: l }
    }

    /// `self^alpha`; requires a positive value at the expansion point
    /// unless `alpha` is a nonnegative integer.
    pub fn powf(&self, alpha: f64) -> Self {
        let k_max = self.order();
        let a0 = self.c[0];
        if a0 == 0.0 {
            if alpha.fract() == 0.0 && alpha >= 0.0 {
                return self.powi(alpha as u32);
            }
            let mut c = vec![f64::NAN; k_max + 1];
            c[0] = 0.0;
            return Self { c };
        }
        let mut p = vec![0.0; k_max + 1];
        p[0] = a0.powf(alpha);
        for k in 1..=k_max {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((alpha + 1.0) * j as f64 - k as f64) * self.c[j] * p[k - j];
            }
            p[k] = acc / (k as f64 * a0);
        }
        Self { c: p }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let k_max = self.order();
        let mut c = vec![0.0; k_max + 1];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(k_max + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// Central-difference weights for the `k`-th derivative on the stencil
/// `-m..=m` (Fornberg's recursion), accurate to order `2m + 2 - 2⌈k/2⌉`.
pub fn central_weights(k: usize, m: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(m as i64)..=m as i64).map(|v| v as f64).collect();
    let np = nodes.len();
    // delta[d][j]: weight of node j for derivative d.
    let mut delta = vec![vec![0.0; np]; k + 1];
    let mut prev = vec![vec![0.0; np]; k + 1];
    prev[0][0] = 1.0;
    let mut c1 = 1.0;
    for n in 1..np {
        let mut c2 = 1.0;
        for d in 0..=k {
            delta[d].iter_mut().for_each(|v| *v = 0.0);
        }
        for nu in 0..n {
            let c3 = nodes[n] - nodes[nu];
            c2 *= c3;
            for d in 0..=k.min(n) {
                let lower = if d > 0 { prev[d - 1][nu] } else { 0.0 };
                delta[d][nu] = (nodes[n] * prev[d][nu] - d as f64 * lower) / c3;
            }
        }
        for d in 0..=k.min(n) {
            let lower = if d > 0 { prev[d - 1][n - 1] } else { 0.0 };
            delta[d][n] = c1 / c2 * (d as f64 * lower - nodes[n - 1] * prev[d][n - 1]);
        }
        c1 = c2;
        for d in 0..=k {
            for j in 0..np {
                prev[d][j] = delta[d][j];
            }
        }
    }
    prev[k].clone()
}

/// `k`-th derivative by 8th-order central differences with step `h`.
pub fn central_derivative(f: impl Fn(f64) -> f64, x: f64, k: usize, h: f64) -> f64 {
    let m = 3 + k.div_ceil(2);
    let w = central_weights(k, m);
    let mut acc = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let off = i as f64 - m as f64;
        acc += wi * f(x + off * h);
    }
    acc / h.powi(k as i32)
}
