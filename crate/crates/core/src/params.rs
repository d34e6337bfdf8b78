//! Parameter ledger: admissibility of (s, p), derived scales, config I/O.
//!
//! Every quantity downstream (amplitudes, the critical time, box sizes,
//! resolution rules) is derived from a validated `ParameterSet`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Lebesgue-type exponent in [1, inf]; infinity is a distinguished value and
/// all formulas take 1/p = 0 there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Lp {
    Finite(f64),
    Infinity,
}

impl Lp {
    pub fn inv(self) -> f64 {
        match self {
            Lp::Finite(p) => 1.0 / p,
            Lp::Infinity => 0.0,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Lp::Finite(p) => Some(p),
            Lp::Infinity => None,
        }
    }

    pub fn parse(text: &str) -> Result<Lp> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Lp::Infinity);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::Config(format!("bad exponent '{text}'")))?;
        if !(v >= 1.0) {
            return Err(Error::Range(format!("exponent must be >= 1, got {v}")));
        }
        Ok(Lp::Finite(v))
    }
}

impl fmt::Display for Lp {
    fn fmt(&self, w: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lp::Finite(p) => write!(w, "{p}"),
            Lp::Infinity => write!(w, "inf"),
        }
    }
}

/// Raw inputs before validation. `b`, `n`, `k0` may be omitted; `validate`
/// fills them from the theory formulas / desk defaults.
#[derive(Clone, Debug, Default)]
pub struct RawParams {
    pub s: f64,
    pub p: Lp,
    pub q: Lp,
    pub eps: f64,
    pub mu: f64,
    pub b: Option<f64>,
    pub n: Option<u32>,
    pub k0: Option<u32>,
    /// Force the theory-scale b and N (numerically unusable; for inspection).
    pub theory_mode: bool,
}

impl Default for Lp {
    fn default() -> Self {
        Lp::Finite(2.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParameterSet {
    pub s: f64,
    pub p: Lp,
    pub q: Lp,
    pub eps: f64,
    pub mu: f64,
    pub b: f64,
    pub nu: f64,
    pub n: u32,
    pub k0: u32,
    pub t_star: f64,
    /// b and N both equal their theory values.
    pub theory_mode: bool,
    /// mu lies in the desk-scale window [16, 512].
    pub desk_range: bool,
    /// mu < 4 nu: the support annulus reaches the symmetry axis and 1/r
    /// factors degenerate; norm scans restrict to r >= 1/(2 nu).
    pub geometry_degenerate: bool,
}

/// Theory smoothing order N = max(ceil(100/|s|), 100). Far too large for any
/// numerical run; exposed for inspection only.
pub fn theory_n(s: f64) -> Result<u32> {
    if s == 0.0 {
        return Err(Error::Admissibility("s = 0 has no theory N".into()));
    }
    Ok(((100.0 / s.abs()).ceil() as u32).max(100))
}

/// b = (1/10)(-1 - s + 3/p).
pub fn theory_b(s: f64, p: Lp) -> f64 {
    0.1 * (-1.0 - s + 3.0 * p.inv())
}

pub fn validate(raw: &RawParams) -> Result<ParameterSet> {
    let RawParams { s, p, q, eps, mu, .. } = *raw;
    let gap = s - 3.0 * p.inv();
    if !(-3.0 < gap && gap < -1.0) {
        return Err(Error::Admissibility(format!(
            "s - 3/p = {gap} outside (-3, -1) for s = {s}, p = {p}"
        )));
    }
    if s == 0.0 {
        return Err(Error::Admissibility("s must be nonzero".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Range(format!("eps must be > 0, got {eps}")));
    }
    if !(mu >= 1.0) {
        return Err(Error::Range(format!("mu must be >= 1, got {mu}")));
    }
    let b = match (raw.theory_mode, raw.b) {
        (true, _) | (false, None) => theory_b(s, p),
        (false, Some(b)) => b,
    };
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::Range(format!("b must lie in (0,1), got {b}")));
    }
    let n = match (raw.theory_mode, raw.n) {
        (true, _) => theory_n(s)?,
        (false, Some(n)) => n,
        (false, None) => 2,
    };
    if n < 1 {
        return Err(Error::Range("N must be >= 1".into()));
    }
    let k0 = raw.k0.unwrap_or(6);
    if (k0 as f64) <= s.abs() + 3.0 {
        return Err(Error::Admissibility(format!(
            "k0 = {k0} must exceed |s| + 3 = {}",
            s.abs() + 3.0
        )));
    }
    let nu = mu.powf(1.0 - b);
    let t_star = eps.powf(-(n as f64) - 2.0) * mu.powf(-1.0 - 2.0 * p.inv() + s) * nu.powf(-p.inv());
    let theory_mode = raw.theory_mode
        || (b == theory_b(s, p) && raw.n.map(|n| Ok(n) == theory_n(s)).unwrap_or(false));
    Ok(ParameterSet {
        s,
        p,
        q,
        eps,
        mu,
        b,
        nu,
        n,
        k0,
        t_star,
        theory_mode,
        desk_range: (16.0..=512.0).contains(&mu),
        geometry_degenerate: mu < 4.0 * nu,
    })
}

impl ParameterSet {
    /// Swirl/vortex amplitude eps^2 mu^(2/p - s) nu^(1/p).
    pub fn amplitude(&self) -> f64 {
        self.eps * self.eps * self.mu.powf(2.0 * self.p.inv() - self.s) * self.nu.powf(self.p.inv())
    }

    /// Shear coefficient in zeta(rho) = eps^-N / (mu rho).
    pub fn zeta_coeff(&self) -> f64 {
        self.eps.powf(-(self.n as f64)) / self.mu
    }

    /// FNV-1a hash of the serialized set; cited by every pass/fail line.
    pub fn short_hash(&self) -> String {
        let text = self.to_config_string();
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in text.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }

    pub fn to_config_string(&self) -> String {
        format!(
            "[params]\ns = {:?}\np = {}\nq = {}\neps = {:?}\nmu = {:?}\nb = {:?}\nn = {}\nk0 = {}\n",
            self.s, self.p, self.q, self.eps, self.mu, self.b, self.n, self.k0
        )
    }
}

/// Key = value per line, section headers in brackets. Returns
/// (section.key -> value); keys outside any section get the "" section.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected key = value, got '{line}'", lineno + 1))
        })?;
        let full = if section.is_empty() {
            key.trim().to_string()
        } else {
            format!("{section}.{}", key.trim())
        };
        out.insert(full, value.trim().to_string());
    }
    Ok(out)
}

/// Read `RawParams` from a parsed config map (the `[params]` section).
pub fn raw_from_config(map: &BTreeMap<String, String>) -> Result<RawParams> {
    let get = |key: &str| map.get(&format!("params.{key}"));
    let parse_f64 = |key: &str| -> Result<Option<f64>> {
        get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad float for {key}: '{v}'")))
            })
            .transpose()
    };
    let parse_u32 = |key: &str| -> Result<Option<u32>> {
        get(key)
            .map(|v| {
                v.parse::<u32>()
                    .map_err(|_| Error::Config(format!("bad integer for {key}: '{v}'")))
            })
            .transpose()
    };
    Ok(RawParams {
        s: parse_f64("s")?.ok_or_else(|| Error::Config("missing params.s".into()))?,
        p: get("p").map(|v| Lp::parse(v)).transpose()?.unwrap_or_default(),
        q: get("q").map(|v| Lp::parse(v)).transpose()?.unwrap_or(Lp::Infinity),
        eps: parse_f64("eps")?.unwrap_or(0.5),
        mu: parse_f64("mu")?.unwrap_or(64.0),
        b: parse_f64("b")?,
        n: parse_u32("n")?,
        k0: parse_u32("k0")?,
        theory_mode: get("theory")
            .map(|v| v == "true" || v == "1")
            .unwrap_or(false),
    })
}
