//! The explicit approximate solution: a stationary radial vortex in the
//! rz-plane carrying a passively transported swirl, plus its pressure,
//! vorticity, and the error field it leaves in the Navier-Stokes equations.
//!
//! Cylindrical components (A = eps^2 mu^(2/p - s) nu^(1/p)):
//!
//! ```text
//! u_r    = -A f'(mu rho) sin(phi)
//! u_z,p  =  A f'(mu rho) cos(phi)
//! u_z,c  =  A/mu * f(mu rho) / r          (divergence corrector)
//! u_th   =  A sin(phi - t A / rho) g(mu rho)              (s > 0)
//! u_th   =  pref * [sin(phi_t) Dc(rho) + cos(phi_t) Ds(rho)]  (s < 0)
//! ```
//!
//! where for s < 0 the initial swirl is the k0-fold rho-derivative of
//! sin(phi + zeta(rho)) g(mu rho), expanded once through the jet machinery
//! into Dc = d^k0[cos(zeta) g], Ds = d^k0[sin(zeta) g], and transported by
//! the exact angular flow phi -> phi - t A / rho (f' = 1 on the swirl
//! support, so the ring rotation rate is exactly A/rho there).

use crate::error::{Error, Result};
use crate::geometry::{frames, to_toroidal, CylPoint, TorJet2, TorPoint, Vec3};
use crate::params::ParameterSet;
use crate::profiles::{make_f, make_g, taylor_eval, Expr, Profile};
use rayon::prelude::*;
use std::sync::OnceLock;

/// Vector with cylindrical components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CylVec {
    pub theta: f64,
    pub r: f64,
    pub z: f64,
}

impl CylVec {
    pub fn norm(&self) -> f64 {
        (self.theta * self.theta + self.r * self.r + self.z * self.z).sqrt()
    }

    /// Cartesian components at azimuth theta.
    pub fn to_cartesian(&self, pt: &CylPoint) -> Result<Vec3> {
        let f = frames(pt)?;
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.theta * f[0][i] + self.r * f[1][i] + self.z * f[2][i];
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// s > 0: plain sine datum, mixed forward in time.
    Mixing,
    /// s < 0: premixed datum, un-mixed at t = t*.
    Premixed,
}

/// Which quantity to place on a sampled grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Velocity,
    ErrorField,
    Vorticity,
}

struct PressureTable {
    /// cumulative integral Q(y) = int_{1/2}^{y} f'(x)^2 / x dx on [0.5, 2]
    y0: f64,
    dy: f64,
    values: Vec<f64>,
}

const GL_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

pub struct ApproxSolution {
    pub params: ParameterSet,
    pub f: Profile,
    pub g: Profile,
    amplitude: f64,
    pub branch: Branch,
    /// eps^(-2 + k0 N) mu^(2/p - s - k0) nu^(1/p), the premixed prefactor.
    premix_pref: f64,
    pressure: OnceLock<PressureTable>,
}

impl ApproxSolution {
    pub fn new(params: &ParameterSet) -> Result<ApproxSolution> {
        let f = make_f(params.n)?;
        let g = make_g();
        let branch = if params.s > 0.0 { Branch::Mixing } else { Branch::Premixed };
        let pinv = params.p.inv();
        let k0 = params.k0 as f64;
        let premix_pref = params.eps.powf(-2.0 + k0 * params.n as f64)
            * params.mu.powf(2.0 * pinv - params.s - k0)
            * params.nu.powf(pinv);
        Ok(ApproxSolution {
            amplitude: params.amplitude(),
            params: params.clone(),
            f,
            g,
            branch,
            premix_pref,
            pressure: OnceLock::new(),
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Scale used by oracle tolerances: sup of the swirl datum.
    pub fn swirl_scale(&self) -> f64 {
        match self.branch {
            Branch::Mixing => self.amplitude,
            Branch::Premixed => {
                // dense scan of the datum magnitude
                let mu = self.params.mu;
                let mut max = 0.0f64;
                for i in 0..2000 {
                    let rho = (1.0 + 0.5 * (i as f64 + 0.5) / 2000.0) / mu;
                    for phi in [0.0, std::f64::consts::FRAC_PI_2] {
                        let v = self.eval_swirl(0.0, &TorPoint::new(rho, phi)).unwrap_or(0.0);
                        max = max.max(v.abs());
                    }
                }
                max
            }
        }
    }

    /// Support annulus in mu*rho units (open cover of supp f).
    pub fn support_window(&self) -> (f64, f64) {
        (0.45 / self.params.mu, 2.05 / self.params.mu)
    }

    /// Norm scans stay in the region where the torus geometry is
    /// non-degenerate. For mu >= 4 nu this is the whole support.
    pub fn r_floor(&self) -> f64 {
        0.5 / self.params.nu
    }

    /// Periodic box edge for spectral work: 4x the support diameter.
    pub fn periodic_box(&self) -> f64 {
        4.0 * 2.0 * (1.0 / self.params.nu + 2.0 / self.params.mu)
    }

    fn zeta_coeff(&self) -> f64 {
        self.params.zeta_coeff()
    }

    /// d^k0 [cos(zeta) g(mu .)] and d^k0 [sin(zeta) g(mu .)] with two extra
    /// orders for chart Hessians, via the composite jet machinery.
    fn premix_jets(&self, rho: f64) -> Result<(crate::jet::Jet, crate::jet::Jet)> {
        let k0 = self.params.k0 as usize;
        let g_expr = Expr::Profile { profile: self.g.clone(), scale: self.params.mu };
        let zeta = Expr::Zeta { coeff: self.zeta_coeff() };
        let dc = Expr::Mul(Box::new(Expr::Cos(Box::new(zeta.clone()))), Box::new(g_expr.clone()));
        let ds = Expr::Mul(Box::new(Expr::Sin(Box::new(zeta))), Box::new(g_expr));
        Ok((
            taylor_eval(&dc, rho, k0 + 2)?.derive(k0),
            taylor_eval(&ds, rho, k0 + 2)?.derive(k0),
        ))
    }

    /// Chart 2-jets of all four cylindrical pieces at (t, rho, phi).
    fn component_jets(&self, t: f64, tp: &TorPoint) -> Result<ComponentJets> {
        if tp.rho == 0.0 {
            return Err(Error::Domain("component jets undefined at rho = 0".into()));
        }
        let mu = self.params.mu;
        let x = mu * tp.rho;
        let a = self.amplitude;

        // radial profile jets, scaled to arguments mu*rho
        let f_jet = self.f.jet(x, 3);
        let scaled = |j: &crate::jet::Jet, k: usize| j.derivative(k) * mu.powi(k as i32);
        let f0 = TorJet2 {
            v: f_jet.value(),
            d_rho: scaled(&f_jet, 1),
            d_rho_rho: scaled(&f_jet, 2),
            ..Default::default()
        };
        let f1 = TorJet2 {
            v: scaled(&f_jet, 1) / mu,
            d_rho: scaled(&f_jet, 2) / mu,
            d_rho_rho: scaled(&f_jet, 3) / mu,
            ..Default::default()
        };
        // f1 holds f'(mu rho) with chart derivatives; the /mu keeps the
        // value f' rather than mu f'.

        let (sin_phi, cos_phi) = TorJet2::phi_var(tp.phi).sin_cos();

        let u_r = f1.mul(&sin_phi).scale(-a);
        let u_zp = f1.mul(&cos_phi).scale(a);

        // r(rho, phi) = 1/nu + rho cos phi
        let r_jet = TorJet2::rho_var(tp.rho)
            .mul(&cos_phi)
            .add(&TorJet2::constant(1.0 / self.params.nu));
        let u_zc = if (0.5..2.0).contains(&x) {
            if r_jet.v <= 0.0 {
                return Err(Error::Domain(format!(
                    "corrector undefined at r = {} <= 0",
                    r_jet.v
                )));
            }
            f0.mul(&r_jet.recip()).scale(a / mu)
        } else {
            TorJet2::default()
        };

        // transported phase w = phi - tA/rho (exact on the swirl support)
        let phase = TorJet2::phi_var(tp.phi).add(
            &TorJet2::rho_var(tp.rho).recip().scale(-t * a),
        );
        let (sin_w, cos_w) = phase.sin_cos();

        let u_theta = match self.branch {
            Branch::Mixing => {
                let g_jet = self.g.jet(x, 2);
                let g2 = TorJet2 {
                    v: g_jet.value(),
                    d_rho: scaled(&g_jet, 1),
                    d_rho_rho: scaled(&g_jet, 2),
                    ..Default::default()
                };
                sin_w.mul(&g2).scale(a)
            }
            Branch::Premixed => {
                if !(1.0..1.5).contains(&x) {
                    TorJet2::default()
                } else {
                    let (dc, ds) = self.premix_jets(tp.rho)?;
                    let dc2 = TorJet2::from_radial(&dc);
                    let ds2 = TorJet2::from_radial(&ds);
                    sin_w.mul(&dc2).add(&cos_w.mul(&ds2)).scale(self.premix_pref)
                }
            }
        };

        Ok(ComponentJets {
            theta: u_theta,
            r: u_r,
            zp: u_zp,
            zc: u_zc,
            r_value: r_jet.v,
        })
    }

    /// Stationary rz-components (u_r, u_z principal, u_z corrector).
    pub fn eval_ur_uz(&self, tp: &TorPoint) -> Result<(f64, f64, f64)> {
        if tp.rho == 0.0 {
            return Err(Error::Domain("rho = 0".into()));
        }
        let mu = self.params.mu;
        let x = mu * tp.rho;
        let (sp, cp) = tp.phi.sin_cos();
        let fp = self.f.eval(x, 1);
        let r = tp.r(self.params.nu);
        let u_r = -self.amplitude * fp * sp;
        let u_zp = self.amplitude * fp * cp;
        let u_zc = if self.f.eval(x, 0) == 0.0 {
            0.0
        } else {
            if r <= 0.0 {
                return Err(Error::Domain(format!("corrector undefined at r = {r} <= 0")));
            }
            self.amplitude / mu * self.f.eval(x, 0) / r
        };
        Ok((u_r, u_zp, u_zc))
    }

    /// Swirl component at time t.
    pub fn eval_swirl(&self, t: f64, tp: &TorPoint) -> Result<f64> {
        if tp.rho == 0.0 {
            return Err(Error::Domain("rho = 0".into()));
        }
        let x = self.params.mu * tp.rho;
        if !(1.0..=1.5).contains(&x) {
            return Ok(0.0);
        }
        let w = tp.phi - t * self.amplitude / tp.rho;
        match self.branch {
            Branch::Mixing => Ok(self.amplitude * w.sin() * self.g.eval(x, 0)),
            Branch::Premixed => {
                let (dc, ds) = self.premix_jets(tp.rho)?;
                Ok(self.premix_pref * (w.sin() * dc.value() + w.cos() * ds.value()))
            }
        }
    }

    /// Time derivative of the swirl (only time-dependent component).
    pub fn eval_swirl_dt(&self, t: f64, tp: &TorPoint) -> Result<f64> {
        if tp.rho == 0.0 {
            return Err(Error::Domain("rho = 0".into()));
        }
        let x = self.params.mu * tp.rho;
        if !(1.0..=1.5).contains(&x) {
            return Ok(0.0);
        }
        let w = tp.phi - t * self.amplitude / tp.rho;
        let wdot = -self.amplitude / tp.rho;
        match self.branch {
            Branch::Mixing => Ok(self.amplitude * w.cos() * wdot * self.g.eval(x, 0)),
            Branch::Premixed => {
                let (dc, ds) = self.premix_jets(tp.rho)?;
                Ok(self.premix_pref * wdot * (w.cos() * dc.value() - w.sin() * ds.value()))
            }
        }
    }

    /// Initial swirl datum (t = 0), used by the transport oracle.
    pub fn swirl_datum(&self, tp: &TorPoint) -> f64 {
        self.eval_swirl(0.0, tp).unwrap_or(0.0)
    }

    /// Pressure p(rho) = A^2 int_0^rho f'(mu tau)^2 / tau dtau, from a cached
    /// cumulative table in the scale-free variable y = mu rho.
    pub fn eval_pressure(&self, tp: &TorPoint) -> f64 {
        let table = self.pressure.get_or_init(|| self.build_pressure_table());
        let y = self.params.mu * tp.rho;
        let a2 = self.amplitude * self.amplitude;
        if y <= table.y0 {
            return 0.0;
        }
        let top = table.y0 + table.dy * (table.values.len() - 1) as f64;
        if y >= top {
            return a2 * table.values[table.values.len() - 1];
        }
        let idx = ((y - table.y0) / table.dy).floor() as usize;
        let y_lo = table.y0 + table.dy * idx as f64;
        a2 * (table.values[idx] + self.gl_segment(y_lo, y))
    }

    /// Exact radial pressure gradient dp/drho = A^2 f'(mu rho)^2 / rho.
    pub fn pressure_gradient(&self, tp: &TorPoint) -> f64 {
        let fp = self.f.eval(self.params.mu * tp.rho, 1);
        self.amplitude * self.amplitude * fp * fp / tp.rho
    }

    fn gl_segment(&self, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let y = c + h * node;
            let fp = self.f.eval(y, 1);
            acc += weight * fp * fp / y;
        }
        acc * h
    }

    fn build_pressure_table(&self) -> PressureTable {
        let y0 = 0.45;
        let n = 4096;
        let dy = (2.05 - y0) / n as f64;
        let mut values = vec![0.0; n + 1];
        for i in 1..=n {
            let a = y0 + dy * (i - 1) as f64;
            values[i] = values[i - 1] + self.gl_segment(a, a + dy);
        }
        PressureTable { y0, dy, values }
    }

    /// Eulerian error: the terms dropped when reducing 3D Euler to
    /// 2D Euler + transport.
    pub fn eulerian_error(&self, t: f64, tp: &TorPoint) -> Result<CylVec> {
        let jets = self.component_jets(t, tp)?;
        let rz = jets.rz_derivs(tp)?;
        let r = jets.r_value;
        let u_th = jets.theta.v;
        let u_r = jets.r.v;
        let u_zp = jets.zp.v;
        let u_zc = jets.zc.v;
        let uz_z = rz.zp.z + rz.zc.z;
        Ok(CylVec {
            theta: u_zc * rz.theta.z + u_th * u_r / r,
            r: u_zc * rz.r.z - u_th * u_th / r,
            z: u_r * rz.zc.r + u_zp * rz.zc.z + u_zc * uz_z,
        })
    }

    /// Viscous error -Laplace(u), axisymmetric vector Laplacian with the
    /// -u/r^2 terms on the theta and r components.
    pub fn viscous_error(&self, t: f64, tp: &TorPoint) -> Result<CylVec> {
        let jets = self.component_jets(t, tp)?;
        let rz = jets.rz_derivs(tp)?;
        let r = jets.r_value;
        let lap_scalar = |d: &RzJet2| d.rr + d.r / r + d.zz;
        let z_full = RzJet2 {
            r: rz.zp.r + rz.zc.r,
            z: rz.zp.z + rz.zc.z,
            rr: rz.zp.rr + rz.zc.rr,
            rz: rz.zp.rz + rz.zc.rz,
            zz: rz.zp.zz + rz.zc.zz,
        };
        Ok(CylVec {
            theta: -(lap_scalar(&rz.theta) - jets.theta.v / (r * r)),
            r: -(lap_scalar(&rz.r) - jets.r.v / (r * r)),
            z: -lap_scalar(&z_full),
        })
    }

    /// Error field E = E_e + E_v (cylindrical components).
    pub fn eval_error(&self, t: f64, tp: &TorPoint) -> Result<CylVec> {
        let e = self.eulerian_error(t, tp)?;
        let v = self.viscous_error(t, tp)?;
        Ok(CylVec {
            theta: e.theta + v.theta,
            r: e.r + v.r,
            z: e.z + v.z,
        })
    }

    /// Vorticity of the axisymmetric field:
    /// w_r = -dz u_th, w_th = dz u_r - dr u_z, w_z = dr u_th + u_th / r.
    pub fn vorticity(&self, t: f64, tp: &TorPoint) -> Result<CylVec> {
        let jets = self.component_jets(t, tp)?;
        let rz = jets.rz_derivs(tp)?;
        let r = jets.r_value;
        Ok(CylVec {
            theta: rz.r.z - (rz.zp.r + rz.zc.r),
            r: -rz.theta.z,
            z: rz.theta.r + jets.theta.v / r,
        })
    }

    /// Velocity with cylindrical components at a chart point.
    pub fn velocity(&self, t: f64, tp: &TorPoint) -> Result<CylVec> {
        let (u_r, u_zp, u_zc) = self.eval_ur_uz(tp)?;
        Ok(CylVec {
            theta: self.eval_swirl(t, tp)?,
            r: u_r,
            z: u_zp + u_zc,
        })
    }

    /// Exact divergence dr u_r + u_r / r + dz u_z; identically zero.
    pub fn divergence(&self, t: f64, tp: &TorPoint) -> Result<f64> {
        let jets = self.component_jets(t, tp)?;
        let rz = jets.rz_derivs(tp)?;
        Ok(rz.r.r + jets.r.v / jets.r_value + rz.zp.z + rz.zc.z)
    }

    /// Residuals of the stationary 2D Euler system for (u_r, u_z,p, p):
    /// ((u_r dr + u_zp dz) u_r + dr p, (u_r dr + u_zp dz) u_zp + dz p,
    ///  magnitude scale).
    pub fn euler_residual(&self, tp: &TorPoint) -> Result<(f64, f64, f64)> {
        let jets = self.component_jets(0.0, tp)?;
        let rz = jets.rz_derivs(tp)?;
        let u_r = jets.r.v;
        let u_zp = jets.zp.v;
        let dp = self.pressure_gradient(tp);
        let (sp, cp) = tp.phi.sin_cos();
        let res_r = u_r * rz.r.r + u_zp * rz.r.z + dp * cp;
        let res_z = u_r * rz.zp.r + u_zp * rz.zp.z + dp * sp;
        let scale = (u_r.hypot(u_zp) * (rz.r.r.hypot(rz.r.z) + rz.zp.r.hypot(rz.zp.z)))
            .max(dp.abs())
            .max(1e-300);
        Ok((res_r, res_z, scale))
    }

    /// Both sides of the angular transport identity
    /// (u_r dr + u_zp dz) G = A f'(mu rho) / rho * dphi G
    /// for a caller-supplied chart 2-jet of G.
    pub fn transport_identity(&self, g_jet: &TorJet2, tp: &TorPoint) -> Result<(f64, f64)> {
        let jets = self.component_jets(0.0, tp)?;
        let rz_g = {
            let (gr, gz) = crate::geometry::rz_gradient(g_jet, tp)?;
            (gr, gz)
        };
        let lhs = jets.r.v * rz_g.0 + jets.zp.v * rz_g.1;
        let fp = self.f.eval(self.params.mu * tp.rho, 1);
        let rhs = self.amplitude * fp / tp.rho * g_jet.d_phi;
        Ok((lhs, rhs))
    }

    /// Magnitude scale |grad u| at a point (for relative residuals).
    pub fn gradient_scale(&self, t: f64, tp: &TorPoint) -> Result<f64> {
        let g = self.gradient_tensor(t, tp)?;
        Ok(g.frobenius())
    }

    /// Full gradient tensor of the velocity in the cylindrical orthonormal
    /// frame (rows: direction of differentiation theta, r, z).
    pub fn gradient_tensor(&self, t: f64, tp: &TorPoint) -> Result<GradTensor> {
        let jets = self.component_jets(t, tp)?;
        let rz = jets.rz_derivs(tp)?;
        let r = jets.r_value;
        let u_th = jets.theta.v;
        let u_r = jets.r.v;
        let uz = Rz { r: rz.zp.r + rz.zc.r, z: rz.zp.z + rz.zc.z };
        Ok(GradTensor {
            // theta-row carries the frame rotation terms
            t: [[u_r / r, -u_th / r, 0.0],
                [rz.theta.r, rz.r.r, uz.r],
                [rz.theta.z, rz.r.z, uz.z]],
        })
    }

    /// Frobenius norm of the exact second gradient |grad^2 u|, assembled
    /// from chart 2-jets: the r- and z-slices are exact derivatives of the
    /// gradient tensor, the theta-slice is the frame rotation (1/r)(RT + TR^t)
    /// with R e_r = e_theta, R e_theta = -e_r.
    pub fn second_gradient_norm(&self, t: f64, tp: &TorPoint) -> Result<f64> {
        let jets = self.component_jets(t, tp)?;
        let rz = jets.rz_derivs(tp)?;
        let r = jets.r_value;
        let u_th = jets.theta.v;
        let u_r = jets.r.v;
        let uz = RzJet2 {
            r: rz.zp.r + rz.zc.r,
            z: rz.zp.z + rz.zc.z,
            rr: rz.zp.rr + rz.zc.rr,
            rz: rz.zp.rz + rz.zc.rz,
            zz: rz.zp.zz + rz.zc.zz,
        };
        let tc = [
            [u_r / r, -u_th / r, 0.0],
            [rz.theta.r, rz.r.r, uz.r],
            [rz.theta.z, rz.r.z, uz.z],
        ];
        let dr = [
            [rz.r.r / r - u_r / (r * r), -rz.theta.r / r + u_th / (r * r), 0.0],
            [rz.theta.rr, rz.r.rr, uz.rr],
            [rz.theta.rz, rz.r.rz, uz.rz],
        ];
        let dz = [
            [rz.r.z / r, -rz.theta.z / r, 0.0],
            [rz.theta.rz, rz.r.rz, uz.rz],
            [rz.theta.zz, rz.r.zz, uz.zz],
        ];
        let rot = |i: usize| -> [f64; 3] {
            match i {
                0 => [0.0, 1.0, 0.0],
                1 => [-1.0, 0.0, 0.0],
                _ => [0.0, 0.0, 0.0],
            }
        };
        let mut acc = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                acc += dr[a][b] * dr[a][b] + dz[a][b] * dz[a][b];
                let mut v = 0.0;
                for c in 0..3 {
                    v += rot(a)[c] * tc[c][b] + tc[a][c] * rot(b)[c];
                }
                let s = v / r;
                acc += s * s;
            }
        }
        Ok(acc.sqrt())
    }

    /// Dense-scan sup over the support of the velocity magnitude, gradient
    /// norm, or error magnitude. The scan skips the degenerate sliver
    /// r < 1/(2 nu), which is empty whenever mu >= 4 nu.
    pub fn sup_scan(&self, t: f64, quantity: ScanQuantity, n_rho: usize, n_phi: usize) -> f64 {
        let (lo, hi) = self.support_window();
        let r_floor = self.r_floor();
        let nu = self.params.nu;
        (0..n_rho)
            .into_par_iter()
            .map(|i| {
                let rho = lo + (hi - lo) * (i as f64 + 0.5) / n_rho as f64;
                let mut best = 0.0f64;
                for j in 0..n_phi {
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_phi as f64;
                    let tp = TorPoint::new(rho, phi);
                    if tp.r(nu) < r_floor {
                        continue;
                    }
                    let v = match quantity {
                        ScanQuantity::Velocity => {
                            self.velocity(t, &tp).map(|v| v.norm()).unwrap_or(0.0)
                        }
                        ScanQuantity::Gradient => {
                            self.gradient_scale(t, &tp).unwrap_or(0.0)
                        }
                        ScanQuantity::SecondGradient => {
                            self.second_gradient_norm(t, &tp).unwrap_or(0.0)
                        }
                        ScanQuantity::ErrorField => {
                            self.eval_error(t, &tp).map(|v| v.norm()).unwrap_or(0.0)
                        }
                        ScanQuantity::Vorticity => {
                            self.vorticity(t, &tp).map(|v| v.norm()).unwrap_or(0.0)
                        }
                        ScanQuantity::SwirlRhoDeriv => self
                            .component_jets(t, &tp)
                            .map(|j| j.theta.d_rho.abs())
                            .unwrap_or(0.0),
                    };
                    best = best.max(v);
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Sample onto an axisymmetric half-plane grid.
    pub fn sample(&self, t: f64, spec: &AxiGridSpec, quantity: Quantity) -> Result<AxiField> {
        if spec.nodes_per_mu_inv < 16 {
            return Err(Error::Resolution(format!(
                "grid must resolve >= 16 nodes per 1/mu, got {}",
                spec.nodes_per_mu_inv
            )));
        }
        let mu = self.params.mu;
        let nu = self.params.nu;
        let rho_max = 2.05 / mu;
        let r_lo = (1.0 / nu - rho_max).max(self.r_floor());
        let r_hi = 1.0 / nu + rho_max;
        let h = 1.0 / (mu * spec.nodes_per_mu_inv as f64);
        let nr = ((r_hi - r_lo) / h).ceil() as usize + 1;
        let nz = (2.0 * rho_max / h).ceil() as usize + 1;
        let z_lo = -rho_max;
        let values: Vec<CylVec> = (0..nr * nz)
            .into_par_iter()
            .map(|idx| {
                let i = idx / nz;
                let j = idx % nz;
                let r = r_lo + h * i as f64;
                let z = z_lo + h * j as f64;
                let tp = to_toroidal(r, z, nu);
                let window = self.support_window();
                if tp.rho <= window.0 || tp.rho >= window.1 || tp.rho == 0.0 {
                    return CylVec::default();
                }
                match quantity {
                    Quantity::Velocity => self.velocity(t, &tp).unwrap_or_default(),
                    Quantity::ErrorField => self.eval_error(t, &tp).unwrap_or_default(),
                    Quantity::Vorticity => self.vorticity(t, &tp).unwrap_or_default(),
                }
            })
            .collect();
        Ok(AxiField {
            r0: r_lo,
            z0: z_lo,
            dr: h,
            dz: h,
            nr,
            nz,
            time: t,
            values,
        })
    }

    /// Sample Cartesian components on a centered periodic grid.
    pub fn sample_cartesian(
        &self,
        t: f64,
        dims: [usize; 3],
        box_l: f64,
        quantity: Quantity,
    ) -> Result<[Vec<f64>; 3]> {
        let n = dims[0] * dims[1] * dims[2];
        let nu = self.params.nu;
        let window = self.support_window();
        let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let hx = box_l / dims[0] as f64;
        let hy = box_l / dims[1] as f64;
        let hz = box_l / dims[2] as f64;
        let plane = dims[0] * dims[1];
        let results: Vec<(usize, f64, f64, f64)> = (0..dims[2])
            .into_par_iter()
            .flat_map_iter(|kz| {
                let z = -0.5 * box_l + hz * kz as f64;
                let mut rows = Vec::new();
                for ky in 0..dims[1] {
                    let y = -0.5 * box_l + hy * ky as f64;
                    for kx in 0..dims[0] {
                        let x = -0.5 * box_l + hx * kx as f64;
                        let r = x.hypot(y);
                        let tp = to_toroidal(r, z, nu);
                        if tp.rho <= window.0 || tp.rho >= window.1 {
                            continue;
                        }
                        let cyl = match quantity {
                            Quantity::Velocity => self.velocity(t, &tp),
                            Quantity::ErrorField => self.eval_error(t, &tp),
                            Quantity::Vorticity => self.vorticity(t, &tp),
                        };
                        let Ok(cyl) = cyl else { continue };
                        let pt = CylPoint { theta: y.atan2(x), r, z };
                        let Ok(v) = cyl.to_cartesian(&pt) else { continue };
                        rows.push((kz * plane + ky * dims[0] + kx, v[0], v[1], v[2]));
                    }
                }
                rows
            })
            .collect();
        for (idx, vx, vy, vz) in results {
            out[0][idx] = vx;
            out[1][idx] = vy;
            out[2][idx] = vz;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ScanQuantity {
    Velocity,
    Gradient,
    SecondGradient,
    ErrorField,
    Vorticity,
    SwirlRhoDeriv,
}

struct ComponentJets {
    theta: TorJet2,
    r: TorJet2,
    zp: TorJet2,
    zc: TorJet2,
    r_value: f64,
}

/// First and second (r, z) derivatives of a scalar component.
#[derive(Clone, Copy, Debug, Default)]
pub struct RzJet2 {
    pub r: f64,
    pub z: f64,
    pub rr: f64,
    pub rz: f64,
    pub zz: f64,
}

struct Rz {
    r: f64,
    z: f64,
}

struct RzDerivs {
    theta: RzJet2,
    r: RzJet2,
    zp: RzJet2,
    zc: RzJet2,
}

impl ComponentJets {
    fn rz_derivs(&self, tp: &TorPoint) -> Result<RzDerivs> {
        let conv = |j: &TorJet2| -> Result<RzJet2> {
            let (r, z, rr, rz, zz) = crate::geometry::rz_hessian(j, tp)?;
            Ok(RzJet2 { r, z, rr, rz, zz })
        };
        Ok(RzDerivs {
            theta: conv(&self.theta)?,
            r: conv(&self.r)?,
            zp: conv(&self.zp)?,
            zc: conv(&self.zc)?,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GradTensor {
    /// t[a][b] = derivative along frame direction a of component b,
    /// basis order (theta, r, z).
    pub t: [[f64; 3]; 3],
}

impl GradTensor {
    pub fn frobenius(&self) -> f64 {
        self.t
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AxiGridSpec {
    pub nodes_per_mu_inv: usize,
}

/// Field sampled on a rectangular (r, z) half-plane lattice.
#[derive(Clone, Debug)]
pub struct AxiField {
    pub r0: f64,
    pub z0: f64,
    pub dr: f64,
    pub dz: f64,
    pub nr: usize,
    pub nz: usize,
    pub time: f64,
    /// Row-major over (i_r, i_z).
    pub values: Vec<CylVec>,
}

impl AxiField {
    pub fn at(&self, i: usize, j: usize) -> &CylVec {
        &self.values[i * self.nz + j]
    }

    pub fn r_at(&self, i: usize) -> f64 {
        self.r0 + self.dr * i as f64
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// L^q norm of the vector magnitude with measure 2 pi r dr dz
    /// (composite trapezoid).
    pub fn lebesgue(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nr {
            let wr = if i == 0 || i == self.nr - 1 { 0.5 } else { 1.0 };
            let r = self.r_at(i);
            for j in 0..self.nz {
                let wz = if j == 0 || j == self.nz - 1 { 0.5 } else { 1.0 };
                acc += wr * wz * self.at(i, j).norm().powf(q) * r;
            }
        }
        (acc * 2.0 * std::f64::consts::PI * self.dr * self.dz).powf(1.0 / q)
    }

    /// Same measure, single component selected by a closure.
    pub fn lebesgue_component(&self, q: f64, pick: impl Fn(&CylVec) -> f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nr {
            let wr = if i == 0 || i == self.nr - 1 { 0.5 } else { 1.0 };
            let r = self.r_at(i);
            for j in 0..self.nz {
                let wz = if j == 0 || j == self.nz - 1 { 0.5 } else { 1.0 };
                acc += wr * wz * pick(self.at(i, j)).abs().powf(q) * r;
            }
        }
        (acc * 2.0 * std::f64::consts::PI * self.dr * self.dz).powf(1.0 / q)
    }
}
