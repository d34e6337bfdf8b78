//! Truncated Taylor series ("jets") in one variable.
//!
//! A `Jet` holds the coefficients c_k = f^(k)(x0)/k! of a function expanded
//! at `x0`, up to a fixed truncation order. Arithmetic on jets propagates
//! derivatives of composites without symbolic expansion, which matters for
//! the exp(-1/x)-type mollifiers whose closed-form derivatives explode
//! combinatorially.

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    /// Expansion point.
    pub x0: f64,
    /// Taylor coefficients c_0 .. c_n (inclusive), c_k = f^(k)(x0)/k!.
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(x0: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { x0, coeffs }
    }

    /// The identity function x evaluated at x0.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = x0;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { x0, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// k-th derivative value, k! * c_k.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeffs[k] * factorial(k)
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect();
        Jet { x0: self.x0, coeffs }
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect();
        Jet { x0: self.x0, coeffs }
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet {
            x0: self.x0,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn shift(&self, c: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Cauchy product, truncated at the shorter order.
    pub fn mul(&self, rhs: &Jet) -> Jet {
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![0.0; n + 1];
        for k in 0..=n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.coeffs[j] * rhs.coeffs[k - j];
            }
            coeffs[k] = acc;
        }
        Jet { x0: self.x0, coeffs }
    }

    /// 1/f, requires f(x0) != 0.
    pub fn recip(&self) -> Jet {
        let n = self.order();
        let mut w = vec![0.0; n + 1];
        let inv = 1.0 / self.coeffs[0];
        w[0] = inv;
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.coeffs[j] * w[k - j];
            }
            w[k] = -inv * acc;
        }
        Jet { x0: self.x0, coeffs: w }
    }

    /// exp(f). Standard recurrence k w_k = sum_{j=1..k} j c_j w_{k-j}.
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut w = vec![0.0; n + 1];
        w[0] = self.coeffs[0].exp();
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * w[k - j];
            }
            w[k] = acc / k as f64;
        }
        Jet { x0: self.x0, coeffs: w }
    }

    /// sin(f) and cos(f) computed jointly.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = self.coeffs[0].sin();
        c[0] = self.coeffs[0].cos();
        for k in 1..=n {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for j in 1..=k {
                let ju = j as f64 * self.coeffs[j];
                acc_s += ju * c[k - j];
                acc_c -= ju * s[k - j];
            }
            s[k] = acc_s / k as f64;
            c[k] = acc_c / k as f64;
        }
        (
            Jet { x0: self.x0, coeffs: s },
            Jet { x0: self.x0, coeffs: c },
        )
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// Jet of the n-th derivative: d_k = c_{k+n} (k+n)!/k!.
    pub fn derive(&self, n: usize) -> Jet {
        let m = self.order().saturating_sub(n);
        let mut coeffs = vec![0.0; m + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs[k + n] * falling_factorial(k + n, n);
        }
        Jet { x0: self.x0, coeffs }
    }

    /// Monomial x^m expanded at x0 (binomial theorem).
    pub fn monomial(x0: f64, m: usize, order: usize) -> Jet {
        let mut coeffs = vec![0.0; order + 1];
        for (k, c) in coeffs.iter_mut().enumerate().take(m.min(order) + 1) {
            *c = binomial(m, k) * x0.powi((m - k) as i32);
        }
        Jet { x0, coeffs }
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// n (n-1) ... (n-k+1)
fn falling_factorial(n: usize, k: usize) -> f64 {
    ((n - k + 1)..=n).map(|j| j as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    falling_factorial(n, k) / factorial(k)
}
