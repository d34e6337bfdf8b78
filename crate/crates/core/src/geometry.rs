//! Cylindrical and shifted-polar (toroidal) coordinates.
//!
//! Cylindrical: x1 = r cos(theta), x2 = r sin(theta), x3 = z, with the
//! orthonormal frame e_theta = (-sin, cos, 0), e_r = (cos, sin, 0),
//! e_z = (0, 0, 1).
//!
//! Shifted polar in the rz-half-plane, centered at (r, z) = (1/nu, 0):
//! r = 1/nu + rho cos(phi), z = rho sin(phi). The chart is valid for
//! rho < 1/nu.

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylPoint {
    pub theta: f64,
    pub r: f64,
    pub z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorPoint {
    pub rho: f64,
    pub phi: f64,
}

impl CylPoint {
    pub fn from_cartesian(x: Vec3) -> CylPoint {
        CylPoint {
            theta: x[1].atan2(x[0]),
            r: x[0].hypot(x[1]),
            z: x[2],
        }
    }

    pub fn to_cartesian(&self) -> Vec3 {
        [
            self.r * self.theta.cos(),
            self.r * self.theta.sin(),
            self.z,
        ]
    }
}

impl TorPoint {
    pub fn new(rho: f64, phi: f64) -> TorPoint {
        TorPoint { rho, phi }
    }

    /// r coordinate of this chart point for the given nu.
    pub fn r(&self, nu: f64) -> f64 {
        1.0 / nu + self.rho * self.phi.cos()
    }

    pub fn z(&self) -> f64 {
        self.rho * self.phi.sin()
    }

    pub fn in_chart(&self, nu: f64) -> bool {
        self.rho < 1.0 / nu
    }
}

/// (r, z) -> (rho, phi); phi = 0 at rho = 0 by convention.
pub fn to_toroidal(r: f64, z: f64, nu: f64) -> TorPoint {
    let dr = r - 1.0 / nu;
    let rho = dr.hypot(z);
    let phi = if rho == 0.0 { 0.0 } else { z.atan2(dr) };
    TorPoint { rho, phi }
}

/// Same, erroring when the point leaves the valid chart.
pub fn to_toroidal_checked(r: f64, z: f64, nu: f64) -> Result<TorPoint> {
    let tp = to_toroidal(r, z, nu);
    if !tp.in_chart(nu) {
        return Err(Error::Chart { rho: tp.rho, nu_inv: 1.0 / nu });
    }
    Ok(tp)
}

pub fn from_toroidal(tp: TorPoint, nu: f64) -> (f64, f64) {
    (tp.r(nu), tp.z())
}

/// Orthonormal frame (e_theta, e_r, e_z) at a point off the axis.
pub fn frames(pt: &CylPoint) -> Result<[Vec3; 3]> {
    if pt.r <= 0.0 {
        return Err(Error::Axis);
    }
    let (sin_t, cos_t) = pt.theta.sin_cos();
    Ok([
        [-sin_t, cos_t, 0.0],
        [cos_t, sin_t, 0.0],
        [0.0, 0.0, 1.0],
    ])
}

/// Partial derivatives d^i/drho^i d^j/dphi^j F at one chart point, stored
/// by total order up to 2: [F, F_rho, F_phi, F_rhorho, F_rhophi, F_phiphi].
#[derive(Clone, Copy, Debug, Default)]
pub struct TorJet2 {
    pub v: f64,
    pub d_rho: f64,
    pub d_phi: f64,
    pub d_rho_rho: f64,
    pub d_rho_phi: f64,
    pub d_phi_phi: f64,
}

impl TorJet2 {
    pub fn constant(v: f64) -> TorJet2 {
        TorJet2 { v, ..Default::default() }
    }

    /// The coordinate rho as a chart function.
    pub fn rho_var(rho: f64) -> TorJet2 {
        TorJet2 { v: rho, d_rho: 1.0, ..Default::default() }
    }

    /// The coordinate phi as a chart function.
    pub fn phi_var(phi: f64) -> TorJet2 {
        TorJet2 { v: phi, d_phi: 1.0, ..Default::default() }
    }

    /// Lift a univariate jet in rho (Taylor coefficients) to a chart 2-jet.
    pub fn from_radial(j: &crate::jet::Jet) -> TorJet2 {
        TorJet2 {
            v: j.value(),
            d_rho: if j.order() >= 1 { j.derivative(1) } else { 0.0 },
            d_rho_rho: if j.order() >= 2 { j.derivative(2) } else { 0.0 },
            ..Default::default()
        }
    }

    pub fn add(&self, o: &TorJet2) -> TorJet2 {
        TorJet2 {
            v: self.v + o.v,
            d_rho: self.d_rho + o.d_rho,
            d_phi: self.d_phi + o.d_phi,
            d_rho_rho: self.d_rho_rho + o.d_rho_rho,
            d_rho_phi: self.d_rho_phi + o.d_rho_phi,
            d_phi_phi: self.d_phi_phi + o.d_phi_phi,
        }
    }

    pub fn scale(&self, c: f64) -> TorJet2 {
        TorJet2 {
            v: c * self.v,
            d_rho: c * self.d_rho,
            d_phi: c * self.d_phi,
            d_rho_rho: c * self.d_rho_rho,
            d_rho_phi: c * self.d_rho_phi,
            d_phi_phi: c * self.d_phi_phi,
        }
    }

    pub fn mul(&self, o: &TorJet2) -> TorJet2 {
        TorJet2 {
            v: self.v * o.v,
            d_rho: self.d_rho * o.v + self.v * o.d_rho,
            d_phi: self.d_phi * o.v + self.v * o.d_phi,
            d_rho_rho: self.d_rho_rho * o.v + 2.0 * self.d_rho * o.d_rho + self.v * o.d_rho_rho,
            d_rho_phi: self.d_rho_phi * o.v
                + self.d_rho * o.d_phi
                + self.d_phi * o.d_rho
                + self.v * o.d_rho_phi,
            d_phi_phi: self.d_phi_phi * o.v + 2.0 * self.d_phi * o.d_phi + self.v * o.d_phi_phi,
        }
    }

    pub fn recip(&self) -> TorJet2 {
        let a = self.v;
        let ia = 1.0 / a;
        let ia2 = ia * ia;
        let ia3 = ia2 * ia;
        TorJet2 {
            v: ia,
            d_rho: -self.d_rho * ia2,
            d_phi: -self.d_phi * ia2,
            d_rho_rho: (2.0 * self.d_rho * self.d_rho - a * self.d_rho_rho) * ia3,
            d_rho_phi: (2.0 * self.d_rho * self.d_phi - a * self.d_rho_phi) * ia3,
            d_phi_phi: (2.0 * self.d_phi * self.d_phi - a * self.d_phi_phi) * ia3,
        }
    }

    pub fn sin_cos(&self) -> (TorJet2, TorJet2) {
        let (s, c) = self.v.sin_cos();
        let sin = TorJet2 {
            v: s,
            d_rho: c * self.d_rho,
            d_phi: c * self.d_phi,
            d_rho_rho: -s * self.d_rho * self.d_rho + c * self.d_rho_rho,
            d_rho_phi: -s * self.d_rho * self.d_phi + c * self.d_rho_phi,
            d_phi_phi: -s * self.d_phi * self.d_phi + c * self.d_phi_phi,
        };
        let cos = TorJet2 {
            v: c,
            d_rho: -s * self.d_rho,
            d_phi: -s * self.d_phi,
            d_rho_rho: -c * self.d_rho * self.d_rho - s * self.d_rho_rho,
            d_rho_phi: -c * self.d_rho * self.d_phi - s * self.d_rho_phi,
            d_phi_phi: -c * self.d_phi * self.d_phi - s * self.d_phi_phi,
        };
        (sin, cos)
    }
}

/// First-order (r, z) derivatives from chart derivatives:
/// grad_{r,z} = (cos phi d_rho - sin phi /rho d_phi,
///               sin phi d_rho + cos phi /rho d_phi).
pub fn rz_gradient(j: &TorJet2, tp: &TorPoint) -> Result<(f64, f64)> {
    if tp.rho == 0.0 {
        return Err(Error::Domain("chart gradient undefined at rho = 0".into()));
    }
    let (sp, cp) = tp.phi.sin_cos();
    Ok((
        cp * j.d_rho - sp / tp.rho * j.d_phi,
        sp * j.d_rho + cp / tp.rho * j.d_phi,
    ))
}

/// Full second-order (r, z) derivatives of an axisymmetric scalar from its
/// chart 2-jet: (F_r, F_z, F_rr, F_rz, F_zz).
///
/// Uses d_r rho = cos phi, d_z rho = sin phi, d_r phi = -sin phi / rho,
/// d_z phi = cos phi / rho and their first derivatives.
pub fn rz_hessian(j: &TorJet2, tp: &TorPoint) -> Result<(f64, f64, f64, f64, f64)> {
    if tp.rho == 0.0 {
        return Err(Error::Domain("chart hessian undefined at rho = 0".into()));
    }
    let rho = tp.rho;
    let (sp, cp) = tp.phi.sin_cos();
    let f_r = cp * j.d_rho - sp / rho * j.d_phi;
    let f_z = sp * j.d_rho + cp / rho * j.d_phi;

    // second derivatives of the chart maps
    // rho_rr = sin^2/rho, rho_zz = cos^2/rho, rho_rz = -sin cos / rho
    // phi_rr = 2 sin cos / rho^2, phi_zz = -2 sin cos / rho^2,
    // phi_rz = (sin^2 - cos^2)/rho^2
    let rho_r = cp;
    let rho_z = sp;
    let phi_r = -sp / rho;
    let phi_z = cp / rho;
    let rho_rr = sp * sp / rho;
    let rho_zz = cp * cp / rho;
    let rho_rz = -sp * cp / rho;
    let phi_rr = 2.0 * sp * cp / (rho * rho);
    let phi_zz = -2.0 * sp * cp / (rho * rho);
    let phi_rz = (sp * sp - cp * cp) / (rho * rho);

    let second = |rho_a: f64, phi_a: f64, rho_b: f64, phi_b: f64, rho_ab: f64, phi_ab: f64| {
        j.d_rho_rho * rho_a * rho_b
            + j.d_rho_phi * (rho_a * phi_b + phi_a * rho_b)
            + j.d_phi_phi * phi_a * phi_b
            + j.d_rho * rho_ab
            + j.d_phi * phi_ab
    };
    let f_rr = second(rho_r, phi_r, rho_r, phi_r, rho_rr, phi_rr);
    let f_rz = second(rho_r, phi_r, rho_z, phi_z, rho_rz, phi_rz);
    let f_zz = second(rho_z, phi_z, rho_z, phi_z, rho_zz, phi_zz);
    Ok((f_r, f_z, f_rr, f_rz, f_zz))
}

/// Upper bound sum_{0 <= i+j <= k} rho^{-(k-i)} |d_rho^i d_phi^j F| for the
/// Cartesian gradient magnitude of order k, together with the exact
/// first-order magnitude when k = 1.
pub fn grad_bound_from_torus(
    partials: &dyn Fn(usize, usize) -> f64,
    tp: &TorPoint,
    k: usize,
) -> Result<(f64, Option<f64>)> {
    if tp.rho == 0.0 {
        return Err(Error::Domain("gradient bound undefined at rho = 0".into()));
    }
    let mut bound = 0.0;
    for i in 0..=k {
        for jj in 0..=(k - i) {
            if i + jj == 0 {
                continue;
            }
            bound += tp.rho.powi(-((k - i) as i32)) * partials(i, jj).abs();
        }
    }
    let exact = if k == 1 {
        let j = TorJet2 {
            v: partials(0, 0),
            d_rho: partials(1, 0),
            d_phi: partials(0, 1),
            ..Default::default()
        };
        let (gr, gz) = rz_gradient(&j, tp)?;
        Some(gr.hypot(gz))
    } else {
        None
    };
    Ok((bound, exact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chart_examples() {
        let nu = 8.0;
        let tp = to_toroidal(1.0 / nu, 0.0, nu);
        assert_eq!(tp.rho, 0.0);
        assert_eq!(tp.phi, 0.0);

        let mu = 64.0;
        let tp = to_toroidal(1.0 / nu + 0.5 / mu, 0.0, nu);
        assert_relative_eq!(tp.rho, 0.5 / mu, epsilon = 1e-16);
        assert_relative_eq!(tp.phi, 0.0, epsilon = 1e-16);

        let tp = to_toroidal(1.0 / nu, 1.25 / mu, nu);
        assert_relative_eq!(tp.rho, 1.25 / mu, epsilon = 1e-16);
        assert_relative_eq!(tp.phi, std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
    }

    #[test]
    fn frame_examples() {
        let f = frames(&CylPoint { theta: 0.0, r: 1.0, z: 0.0 }).unwrap();
        assert_eq!(f[0], [0.0, 1.0, 0.0]);
        assert_eq!(f[1], [1.0, 0.0, 0.0]);
        assert_eq!(f[2], [0.0, 0.0, 1.0]);

        let f = frames(&CylPoint {
            theta: std::f64::consts::FRAC_PI_2,
            r: 2.0,
            z: 0.0,
        })
        .unwrap();
        assert_relative_eq!(f[0][0], -1.0, epsilon = 1e-15);
        assert_relative_eq!(f[1][1], 1.0, epsilon = 1e-15);

        assert!(frames(&CylPoint { theta: 0.0, r: 0.0, z: 0.0 }).is_err());
    }

    #[test]
    fn frames_orthonormal_right_handed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let pt = CylPoint {
                theta: rng.gen_range(-10.0..10.0),
                r: rng.gen_range(0.01..5.0),
                z: 0.0,
            };
            let f = frames(&pt).unwrap();
            for a in 0..3 {
                let n: f64 = f[a].iter().map(|v| v * v).sum();
                assert_relative_eq!(n, 1.0, epsilon = 1e-14);
                for b in (a + 1)..3 {
                    let dot: f64 = (0..3).map(|i| f[a][i] * f[b][i]).sum();
                    assert_relative_eq!(dot, 0.0, epsilon = 1e-14);
                }
            }
            // e_theta x e_r = -e_z in this ordering; check handedness via
            // e_r x e_theta = e_z
            let cr = [
                f[1][1] * f[0][2] - f[1][2] * f[0][1],
                f[1][2] * f[0][0] - f[1][0] * f[0][2],
                f[1][0] * f[0][1] - f[1][1] * f[0][0],
            ];
            for i in 0..3 {
                assert_relative_eq!(cr[i], f[2][i], epsilon = 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn chart_round_trip(rho_frac in 1e-6..0.9f64, phi in -3.0..3.0f64, nu in 1.0..64.0f64) {
            let tp = TorPoint::new(rho_frac / nu, phi);
            let (r, z) = from_toroidal(tp, nu);
            let back = to_toroidal(r, z, nu);
            prop_assert!((back.rho - tp.rho).abs() <= 1e-13 * (1.0 / nu));
            // compare angles through the embedding to avoid wrap issues
            let (r2, z2) = from_toroidal(back, nu);
            prop_assert!((r2 - r).abs() <= 1e-13 * (1.0 / nu));
            prop_assert!((z2 - z).abs() <= 1e-13 * (1.0 / nu));
        }
    }

    #[test]
    fn frame_derivative_bound() {
        // |grad e_r| and |grad e_theta| <= C / r with C <= 1.5 at order 1
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = rng.gen_range(0.05..3.0);
            let theta = rng.gen_range(0.0..6.28);
            let h = 1e-6 * r;
            let grad_norm = |which: usize| -> f64 {
                // numerical gradient of the frame field along x and y
                let at = |x: f64, y: f64| {
                    let pt = CylPoint::from_cartesian([x, y, 0.0]);
                    frames(&pt).unwrap()[which]
                };
                let x0 = r * theta.cos();
                let y0 = r * theta.sin();
                let mut acc = 0.0;
                for (dx, dy) in [(h, 0.0), (0.0, h)] {
                    let fp = at(x0 + dx, y0 + dy);
                    let fm = at(x0 - dx, y0 - dy);
                    for i in 0..3 {
                        let d = (fp[i] - fm[i]) / (2.0 * h);
                        acc += d * d;
                    }
                }
                acc.sqrt()
            };
            for which in [0, 1] {
                assert!(
                    grad_norm(which) <= 1.5 / r,
                    "frame gradient exceeds 1.5/r at r = {r}"
                );
            }
        }
    }

    #[test]
    fn gradient_examples() {
        // F = rho: |grad| = 1
        let tp = TorPoint::new(0.7, 1.1);
        let partials = |i: usize, j: usize| match (i, j) {
            (0, 0) => tp.rho,
            (1, 0) => 1.0,
            _ => 0.0,
        };
        let (bound, exact) = grad_bound_from_torus(&partials, &tp, 1).unwrap();
        assert_relative_eq!(exact.unwrap(), 1.0, epsilon = 1e-14);
        assert!(bound >= 1.0);

        // F = phi at rho = 2: |grad| = 1/2
        let tp = TorPoint::new(2.0, 0.4);
        let partials = |i: usize, j: usize| match (i, j) {
            (0, 0) => tp.phi,
            (0, 1) => 1.0,
            _ => 0.0,
        };
        let (_, exact) = grad_bound_from_torus(&partials, &tp, 1).unwrap();
        assert_relative_eq!(exact.unwrap(), 0.5, epsilon = 1e-14);

        // F = sin(phi) at rho = 1: bound covers the exact |cos phi|
        let tp = TorPoint::new(1.0, 0.9);
        let partials = |i: usize, j: usize| match (i, j) {
            (0, 0) => tp.phi.sin(),
            (0, 1) => tp.phi.cos(),
            _ => 0.0,
        };
        let (bound, exact) = grad_bound_from_torus(&partials, &tp, 1).unwrap();
        assert_relative_eq!(exact.unwrap(), tp.phi.cos().abs(), epsilon = 1e-14);
        assert!(bound >= exact.unwrap());
    }

    /// |d_rho F| <= |grad_{r,z} F| for smooth test fields, via finite
    /// differences of F(r, z) = sin(a r + b z).
    #[test]
    fn rho_projection_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let nu = 4.0;
        for _ in 0..100 {
            let a = rng.gen_range(0.5..3.0);
            let b = rng.gen_range(0.5..3.0);
            let field = |r: f64, z: f64| (a * r + b * z).sin();
            let rho = rng.gen_range(0.05..0.2);
            let phi = rng.gen_range(0.0..6.28);
            let tp = TorPoint::new(rho, phi);
            let (r, z) = from_toroidal(tp, nu);
            let h = 1e-6;
            let (sp, cp) = phi.sin_cos();
            let d_rho = (field(r + h * cp, z + h * sp) - field(r - h * cp, z - h * sp)) / (2.0 * h);
            let d_r = (field(r + h, z) - field(r - h, z)) / (2.0 * h);
            let d_z = (field(r, z + h) - field(r, z - h)) / (2.0 * h);
            assert!(d_rho.abs() <= d_r.hypot(d_z) + 1e-8);
        }
    }

    /// Cross-check rz_hessian against finite differences of a composite.
    #[test]
    fn hessian_matches_finite_differences() {
        let field_tor = |rho: f64, phi: f64| (2.0 * rho).sin() * (phi.cos() + 0.3 * rho);
        let nu = 2.0;
        let tp = TorPoint::new(0.31, 0.8);
        // chart 2-jet by tiny central differences in (rho, phi)
        let h = 1e-5;
        let f = field_tor;
        let j = TorJet2 {
            v: f(tp.rho, tp.phi),
            d_rho: (f(tp.rho + h, tp.phi) - f(tp.rho - h, tp.phi)) / (2.0 * h),
            d_phi: (f(tp.rho, tp.phi + h) - f(tp.rho, tp.phi - h)) / (2.0 * h),
            d_rho_rho: (f(tp.rho + h, tp.phi) - 2.0 * f(tp.rho, tp.phi) + f(tp.rho - h, tp.phi))
                / (h * h),
            d_rho_phi: (f(tp.rho + h, tp.phi + h) - f(tp.rho + h, tp.phi - h)
                - f(tp.rho - h, tp.phi + h)
                + f(tp.rho - h, tp.phi - h))
                / (4.0 * h * h),
            d_phi_phi: (f(tp.rho, tp.phi + h) - 2.0 * f(tp.rho, tp.phi) + f(tp.rho, tp.phi - h))
                / (h * h),
        };
        let (fr, fz, frr, frz, fzz) = rz_hessian(&j, &tp).unwrap();
        // direct finite differences in (r, z)
        let frz_field = |r: f64, z: f64| {
            let t = to_toroidal(r, z, nu);
            field_tor(t.rho, t.phi)
        };
        let (r, z) = from_toroidal(tp, nu);
        let g = 1e-4;
        let fd_r = (frz_field(r + g, z) - frz_field(r - g, z)) / (2.0 * g);
        let fd_z = (frz_field(r, z + g) - frz_field(r, z - g)) / (2.0 * g);
        let fd_rr = (frz_field(r + g, z) - 2.0 * frz_field(r, z) + frz_field(r - g, z)) / (g * g);
        let fd_zz = (frz_field(r, z + g) - 2.0 * frz_field(r, z) + frz_field(r, z - g)) / (g * g);
        let fd_rz = (frz_field(r + g, z + g) - frz_field(r + g, z - g) - frz_field(r - g, z + g)
            + frz_field(r - g, z - g))
            / (4.0 * g * g);
        assert_relative_eq!(fr, fd_r, max_relative = 1e-5);
        assert_relative_eq!(fz, fd_z, max_relative = 1e-5);
        assert_relative_eq!(frr, fd_rr, max_relative = 1e-3);
        assert_relative_eq!(frz, fd_rz, max_relative = 1e-3);
        assert_relative_eq!(fzz, fd_zz, max_relative = 1e-3);
    }
}
