//! Compactly supported radial profiles and composite differentiation.
//!
//! Two profiles drive the whole construction:
//!
//! * `f` with f'(rho) = 1 exactly on [1, 3/2], supp f in [1/2, 2], and
//!   antiderivatives compactly supported up to order N. Realized as
//!   f = d^N/drho^N of ftilde, ftilde(rho) = rho^(N+1)/(N+1)! * chi(rho),
//!   where chi is a C^inf plateau bump equal to 1 on [1, 3/2].
//! * `g`, a C^inf bump supported exactly in [1, 3/2] with max value 1 at
//!   rho = 5/4.
//!
//! All derivatives and antiderivatives are evaluated by Taylor-mode jets of
//! the closed forms, never by numerical differentiation or quadrature.

use crate::error::{Error, Result};
use crate::jet::{factorial, Jet};

/// Smooth step on [0,1] built from sigma(y) = exp(-1/y): 0 for y <= 0,
/// 1 for y >= 1, strictly increasing in between.
fn smoothstep_jet(y: &Jet) -> Jet {
    let order = y.order();
    let yv = y.value();
    // Flat tails: below ~1e-6 the value is exp(-1e6), indistinguishable from 0.
    if yv <= 1e-6 {
        return Jet::constant(y.x0, 0.0, order);
    }
    if yv >= 1.0 - 1e-6 {
        return Jet::constant(y.x0, 1.0, order);
    }
    let sig = |u: &Jet| u.recip().scale(-1.0).exp();
    let a = sig(y);
    let b = sig(&y.scale(-1.0).shift(1.0));
    a.mul(&a.add(&b).recip())
}

/// Plateau bump chi: 1 on [1, 3/2], supported in [1/2, 2].
fn plateau_jet(rho: &Jet) -> Jet {
    let order = rho.order();
    let r = rho.value();
    if r <= 0.5 || r >= 2.0 {
        return Jet::constant(rho.x0, 0.0, order);
    }
    if r < 1.0 {
        // rising ramp on [1/2, 1]
        smoothstep_jet(&rho.scale(2.0).shift(-1.0))
    } else if r <= 1.5 {
        Jet::constant(rho.x0, 1.0, order)
    } else {
        // falling ramp on [3/2, 2]
        smoothstep_jet(&rho.scale(-2.0).shift(4.0))
    }
}

/// Unit bump on [1, 3/2]: exp(1 - 1/(1 - y^2)) with y = 4(rho - 5/4).
fn bump_jet(rho: &Jet) -> Jet {
    let order = rho.order();
    let y = rho.scale(4.0).shift(-5.0);
    let yv = y.value();
    if yv.abs() >= 1.0 - 1e-8 {
        return Jet::constant(rho.x0, 0.0, order);
    }
    let w = y.mul(&y).scale(-1.0).shift(1.0); // 1 - y^2
    w.recip().scale(-1.0).shift(1.0).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// f = ftilde^(N); negative orders down to -N are ftilde^(N-k).
    SmoothedRamp { n: u32 },
    /// The g bump; no antiderivative structure.
    Bump,
}

/// A compactly supported smooth 1D profile with exact derivatives and
/// (for `f`) antiderivatives of any order up to N.
#[derive(Clone, Debug)]
pub struct Profile {
    kind: Kind,
    /// Closed support interval on the rho axis.
    pub support: (f64, f64),
    /// Smoothing order N: antiderivatives f^(-k) exist for 0 <= k <= N.
    pub smoothing_order: u32,
}

/// f = d^N/drho^N [ rho^(N+1)/(N+1)! * chi(rho) ].
pub fn make_f(n: u32) -> Result<Profile> {
    if n < 1 {
        return Err(Error::Range(format!("profile order N must be >= 1, got {n}")));
    }
    Ok(Profile {
        kind: Kind::SmoothedRamp { n },
        support: (0.5, 2.0),
        smoothing_order: n,
    })
}

pub fn make_g() -> Profile {
    Profile {
        kind: Kind::Bump,
        support: (1.0, 1.5),
        smoothing_order: 0,
    }
}

impl Profile {
    /// Jet of ftilde at rho, carried to the requested order.
    fn base_jet(&self, rho: f64, order: usize) -> Jet {
        let var = Jet::variable(rho, order);
        match self.kind {
            Kind::SmoothedRamp { n } => {
                let m = Jet::monomial(rho, n as usize + 1, order)
                    .scale(1.0 / factorial(n as usize + 1));
                m.mul(&plateau_jet(&var))
            }
            Kind::Bump => bump_jet(&var),
        }
    }

    /// Value of the d-th derivative (d < 0: |d|-th antiderivative).
    ///
    /// Out-of-range orders (d < -N, or any d < 0 for `g`) are a programming
    /// error and panic.
    pub fn eval(&self, rho: f64, d: i32) -> f64 {
        let n = match self.kind {
            Kind::SmoothedRamp { n } => n as i32,
            Kind::Bump => 0,
        };
        assert!(d >= -n, "antiderivative order {} below capacity -{}", d, n);
        if rho <= self.support.0 || rho >= self.support.1 {
            return 0.0;
        }
        let j = (n + d) as usize;
        self.base_jet(rho, j).derivative(j)
    }

    /// Jet of the profile itself (order-0 function) at rho.
    pub fn jet(&self, rho: f64, order: usize) -> Jet {
        let n = match self.kind {
            Kind::SmoothedRamp { n } => n as usize,
            Kind::Bump => 0,
        };
        if rho <= self.support.0 || rho >= self.support.1 {
            return Jet::constant(rho, 0.0, order);
        }
        self.base_jet(rho, order + n).derive(n)
    }
}

/// Composite expressions over profiles, the shear phase zeta, trig, affine
/// maps, sums, and products. This fixed grammar covers every 1D formula the
/// field construction needs.
#[derive(Clone, Debug)]
pub enum Expr {
    Const(f64),
    /// The coordinate rho.
    Var,
    /// p(scale * rho)
    Profile { profile: Profile, scale: f64 },
    /// coeff / rho
    Zeta { coeff: f64 },
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Scale(f64, Box<Expr>),
    Shift(f64, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn contains_zeta(&self) -> bool {
        match self {
            Expr::Zeta { .. } => true,
            Expr::Const(_) | Expr::Var | Expr::Profile { .. } => false,
            Expr::Sin(e) | Expr::Cos(e) | Expr::Scale(_, e) | Expr::Shift(_, e) => {
                e.contains_zeta()
            }
            Expr::Add(a, b) | Expr::Mul(a, b) => a.contains_zeta() || b.contains_zeta(),
        }
    }
}

/// Taylor-expand a composite at `rho` to the given order.
pub fn taylor_eval(expr: &Expr, rho: f64, order: usize) -> Result<Jet> {
    if rho == 0.0 && expr.contains_zeta() {
        return Err(Error::Domain("zeta(rho) undefined at rho = 0".into()));
    }
    Ok(eval_jet(expr, rho, order))
}

fn eval_jet(expr: &Expr, rho: f64, order: usize) -> Jet {
    match expr {
        Expr::Const(c) => Jet::constant(rho, *c, order),
        Expr::Var => Jet::variable(rho, order),
        Expr::Profile { profile, scale } => {
            // q(rho) = p(scale*rho): q^(k) = scale^k p^(k)(scale*rho)
            let inner = profile.jet(scale * rho, order);
            let mut coeffs = inner.coeffs.clone();
            let mut pw = 1.0;
            for c in coeffs.iter_mut() {
                *c *= pw;
                pw *= scale;
            }
            Jet { x0: rho, coeffs }
        }
        Expr::Zeta { coeff } => Jet::variable(rho, order).recip().scale(*coeff),
        Expr::Sin(e) => eval_jet(e, rho, order).sin(),
        Expr::Cos(e) => eval_jet(e, rho, order).cos(),
        Expr::Scale(c, e) => eval_jet(e, rho, order).scale(*c),
        Expr::Shift(c, e) => eval_jet(e, rho, order).shift(*c),
        Expr::Add(a, b) => eval_jet(a, rho, order).add(&eval_jet(b, rho, order)),
        Expr::Mul(a, b) => eval_jet(a, rho, order).mul(&eval_jet(b, rho, order)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn f_prime_is_one_on_plateau() {
        let f = make_f(2).unwrap();
        for rho in [1.0 + 1e-9, 1.1, 1.25, 1.4, 1.5 - 1e-9] {
            assert_relative_eq!(f.eval(rho, 1), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn f_equals_rho_on_plateau() {
        let f = make_f(2).unwrap();
        assert_relative_eq!(f.eval(1.2, 0), 1.2, epsilon = 1e-12);
        assert_relative_eq!(f.eval(1.5 - 1e-12, 0), 1.5, epsilon = 1e-9);
    }

    #[test]
    fn f_vanishes_outside_support() {
        let f = make_f(3).unwrap();
        for d in -3..=4 {
            assert_eq!(f.eval(3.0, d), 0.0);
            assert_eq!(f.eval(0.4, d), 0.0);
            assert_eq!(f.eval(2.0, d), 0.0);
        }
    }

    #[test]
    fn g_bump_normalization() {
        let g = make_g();
        assert_eq!(g.eval(0.9, 0), 0.0);
        assert_relative_eq!(g.eval(1.25, 0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(g.eval(1.25, 1), 0.0, epsilon = 1e-14);
        assert!(g.eval(1.1, 0) > 0.0 && g.eval(1.1, 0) < 1.0);
    }

    /// Antiderivative telescope: integral of f^(-k) over the support is
    /// f^(-k-1) evaluated at the endpoints, which vanish for k < N.
    #[test]
    fn antiderivative_telescope() {
        let n = 4;
        let f = make_f(n).unwrap();
        for k in 0..n as i32 {
            // composite Simpson over [0.5, 2]
            let m = 4000;
            let h = 1.5 / m as f64;
            let mut acc = 0.0;
            for i in 0..m {
                let a = 0.5 + i as f64 * h;
                acc += h / 6.0
                    * (f.eval(a, -k) + 4.0 * f.eval(a + 0.5 * h, -k) + f.eval(a + h, -k));
            }
            assert!(
                acc.abs() < 1e-10,
                "antiderivative order {k} integrates to {acc:.3e}"
            );
        }
    }

    /// Central finite differences agree with jet coefficients for random
    /// composites (orders up to 6, step tuned per order).
    #[test]
    fn jet_vs_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = make_f(3).unwrap();
        let g = make_g();
        for trial in 0..100 {
            let mu = 1.0 + rng.gen_range(0.0..3.0);
            let c = rng.gen_range(0.1..2.0);
            let phi0 = rng.gen_range(0.0..6.0);
            let expr = match trial % 4 {
                0 => Expr::Sin(Box::new(Expr::Shift(
                    phi0,
                    Box::new(Expr::Zeta { coeff: c }),
                ))),
                1 => Expr::Mul(
                    Box::new(Expr::Profile { profile: g.clone(), scale: mu }),
                    Box::new(Expr::Cos(Box::new(Expr::Zeta { coeff: c }))),
                ),
                2 => Expr::Mul(
                    Box::new(Expr::Profile { profile: f.clone(), scale: 1.0 }),
                    Box::new(Expr::Shift(0.3, Box::new(Expr::Var))),
                ),
                _ => Expr::Add(
                    Box::new(Expr::Scale(1.7, Box::new(Expr::Sin(Box::new(Expr::Var))))),
                    Box::new(Expr::Zeta { coeff: c }),
                ),
            };
            let rho = rng.gen_range(0.7..1.8);
            let jet = taylor_eval(&expr, rho, 6).unwrap();
            for k in 1..=3usize {
                let h = 1e-5 * (10.0f64).powi(k as i32 - 1);
                let fd = central_diff(&expr, rho, k, h);
                let exact = jet.derivative(k);
                let scale = exact.abs().max(fd.abs()).max(1e-6);
                assert!(
                    (fd - exact).abs() / scale < 1e-5,
                    "trial {trial} order {k}: fd {fd:.6e} vs jet {exact:.6e}"
                );
            }
        }
    }

    fn central_diff(expr: &Expr, x: f64, k: usize, h: f64) -> f64 {
        let f = |t: f64| taylor_eval(expr, t, 0).unwrap().value();
        match k {
            1 => (f(x + h) - f(x - h)) / (2.0 * h),
            2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
            3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h))
                / (2.0 * h * h * h),
            _ => unreachable!(),
        }
    }

    /// Values stay continuous (and tiny) across the support endpoints.
    #[test]
    fn smooth_across_support_edges() {
        let f = make_f(2).unwrap();
        let g = make_g();
        for d in 0..=4 {
            for edge in [0.5, 2.0] {
                for delta in [1e-4, 1e-5, 1e-6] {
                    let inside = f.eval(edge + (1.25 - edge).signum() * delta, d);
                    assert!(
                        inside.abs() < 1e-12,
                        "f^({d}) near {edge}: {inside:.3e}"
                    );
                }
            }
            let inside = g.eval(1.0 + 1e-6, d);
            assert!(inside.abs() < 1e-12, "g^({d}) near 1: {inside:.3e}");
        }
    }

    #[test]
    fn taylor_eval_examples() {
        // sin(phi0 + zeta) at rho=1 with eps=mu=1, phi0=0: [sin 1, -cos 1]
        let expr = Expr::Sin(Box::new(Expr::Zeta { coeff: 1.0 }));
        let jet = taylor_eval(&expr, 1.0, 1).unwrap();
        assert_relative_eq!(jet.value(), 1.0f64.sin(), epsilon = 1e-14);
        assert_relative_eq!(jet.derivative(1), -(1.0f64.cos()), epsilon = 1e-14);

        let three = taylor_eval(&Expr::Const(3.0), 0.7, 4).unwrap();
        assert_eq!(three.coeffs, vec![3.0, 0.0, 0.0, 0.0, 0.0]);

        // g(mu rho) at mu=8, rho=5/32
        let g = make_g();
        let expr = Expr::Profile { profile: g, scale: 8.0 };
        let jet = taylor_eval(&expr, 5.0 / 32.0, 0).unwrap();
        assert_relative_eq!(jet.value(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zeta_at_origin_is_domain_error() {
        let expr = Expr::Sin(Box::new(Expr::Zeta { coeff: 1.0 }));
        assert!(taylor_eval(&expr, 0.0, 2).is_err());
    }
}
