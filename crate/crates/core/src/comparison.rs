//! Constant-curvature comparison quantities.
//!
//! Closed forms for the boundary length and area of a disk of radius `r` in
//! the plane of curvature `-k²`, the topology bound for metric balls, collar
//! widths, the Poincaré distance on the unit disk, round-annulus moduli, the
//! `f_c` / `eps0` construction, and the finite-type surface classes `F(a,l)`
//! and `S(a,l)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_finite_positive, param, Error, Result};

/// Curvature scale, slack and base radius for the ball topology bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonParams {
    pub k: f64,
    pub c: f64,
    pub r0: f64,
}

impl ComparisonParams {
    pub fn new(k: f64, c: f64, r0: f64) -> Result<Self> {
        ensure_finite_positive("k", k)?;
        ensure_finite_positive("c", c)?;
        ensure_finite_positive("r0", r0)?;
        Ok(Self { k, c, r0 })
    }

    /// The outer radius `r0 + c/k` at which the boundary length enters the bound.
    pub fn outer_radius(&self) -> f64 {
        self.r0 + self.c / self.k
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        param(format!("radius must be finite and non-negative, got {r}"))
    }
}

/// `(2π/k)·sinh(k·r)`: boundary length of a disk of radius `r` when `K ≡ -k²`.
pub fn comparison_boundary_length(k: f64, r: f64) -> Result<f64> {
    ensure_finite_positive("k", k)?;
    check_radius(r)?;
    Ok(2.0 * PI / k * (k * r).sinh())
}

/// `(2π/k²)·(cosh(k·r) − 1)`: area of a disk of radius `r` when `K ≡ -k²`.
pub fn comparison_area(k: f64, r: f64) -> Result<f64> {
    ensure_finite_positive("k", k)?;
    check_radius(r)?;
    // cosh x - 1 = 2 sinh²(x/2), accurate for small x
    let half = (0.5 * k * r).sinh();
    Ok(2.0 * PI / (k * k) * 2.0 * half * half)
}

/// Upper bound for the number of generators `n(r')` at some radius strictly
/// between `r0` and `r0 + c/k`, given the boundary length `ell_outer` of the
/// ball of radius `r0 + c/k`.
///
/// The raw real value is returned; a negative result means the measured
/// boundary length exceeds what the curvature bound allows.
pub fn topology_bound(params: &ComparisonParams, ell_outer: f64) -> Result<f64> {
    ensure_finite_positive("k", params.k)?;
    ensure_finite_positive("c", params.c)?;
    ensure_finite_positive("r0", params.r0)?;
    if !(ell_outer.is_finite() && ell_outer >= 0.0) {
        return param(format!("ell_outer must be finite and non-negative, got {ell_outer}"));
    }
    let ComparisonParams { k, c, r0 } = *params;
    Ok(((k * r0 + c).sinh() - k * ell_outer / (2.0 * PI)) / c.sinh())
}

/// Width `d0` of the collar about a simple closed geodesic of length `L`:
/// `cosh d0 = coth(L/2)`.
pub fn collar_width(length: f64) -> Result<f64> {
    if length.is_nan() || length <= 0.0 {
        return param(format!("geodesic length must be positive, got {length}"));
    }
    // coth(L/2) - 1 = 2 / (e^L - 1); acosh(1 + t) = log1p(t + sqrt(t (2 + t)))
    let t = 2.0 / length.exp_m1();
    Ok((t + (t * (2.0 + t)).sqrt()).ln_1p())
}

/// Poincaré distance on the unit disk for the metric `2|dz|/(1-|z|²)`.
pub fn disk_distance(z: Complex64, w: Complex64) -> Result<f64> {
    for (name, p) in [("z", z), ("w", w)] {
        if !(p.re.is_finite() && p.im.is_finite()) || p.norm() >= 1.0 {
            return Err(Error::Domain(format!("{name} = {p} is not inside the unit disk")));
        }
    }
    if z == w {
        return Ok(0.0);
    }
    let rho = ((z - w) / (Complex64::new(1.0, 0.0) - z.conj() * w)).norm();
    Ok(2.0 * rho.min(1.0).atanh())
}

/// Modulus `log(R)/2π` of the round annulus `{1 < |z| < R}`; infinite for `R = ∞`.
pub fn round_annulus_modulus(ratio: f64) -> Result<f64> {
    if ratio.is_nan() || ratio <= 1.0 {
        return Err(Error::Domain(format!("annulus radius ratio must exceed 1, got {ratio}")));
    }
    if ratio.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(ratio.ln() / (2.0 * PI))
}

/// `f_c(ε) = 2·tanh(ε/2)·cosh²((ε+c)/2)`, positive and increasing on `ε > 0`.
pub fn f_c(c: f64, eps: f64) -> f64 {
    let ch = (0.5 * (eps + c)).cosh();
    2.0 * (0.5 * eps).tanh() * ch * ch
}

/// Target value `c/(e^{l/c1} − 1)` inverted by [`eps0`].
pub fn eps0_target(c: f64, l: f64, c1: f64) -> Result<f64> {
    ensure_finite_positive("c", c)?;
    ensure_finite_positive("l", l)?;
    ensure_finite_positive("c1", c1)?;
    let target = c / (l / c1).exp_m1();
    if !target.is_finite() || target <= 0.0 {
        return param(format!("eps0 target c/(e^(l/c1)-1) is not a positive finite number: {target}"));
    }
    Ok(target)
}

/// `ε0 = f_c⁻¹(c/(e^{l/c1} − 1))`, by bisection on the increasing `f_c`.
pub fn eps0(c: f64, l: f64, c1: f64) -> Result<f64> {
    let target = eps0_target(c, l, c1)?;
    let mut hi = 1.0;
    while f_c(c, hi) < target {
        hi *= 2.0;
        if !hi.is_finite() {
            return param("eps0 bracket overflow");
        }
    }
    let mut lo = 0.0;
    // run until the bracket cannot shrink further in double precision
    for _ in 0..4096 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f_c(c, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = ((f_c(c, lo) - target).abs(), (f_c(c, hi) - target).abs());
    Ok(if rl <= rh { lo } else { hi })
}

/// Topological data of a finite-type surface for membership in `F(a,l)` and `S(a,l)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceClassSpec {
    pub genus: u32,
    /// Outer loops plus punctures.
    pub n_outer: u32,
    /// One entry per outer loop; punctures are recorded with length 0.
    pub outer_loop_lengths: Vec<f64>,
    /// Total length of the border, 0 when the border is empty.
    pub boundary_length: f64,
    pub a: u32,
    pub l: f64,
}

impl SurfaceClassSpec {
    /// `χ = 2 − 2g − n`.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * i64::from(self.genus) - i64::from(self.n_outer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SurfaceClass {
    pub in_f: bool,
    pub in_s: bool,
    pub chi: i64,
}

/// Membership of a surface in the classes `F(a,l)` and `S(a,l)`.
pub fn classify_surface(spec: &SurfaceClassSpec) -> Result<SurfaceClass> {
    ensure_finite_positive("l", spec.l)?;
    if spec.outer_loop_lengths.len() != spec.n_outer as usize {
        return param(format!(
            "n_outer = {} but {} outer loop lengths given",
            spec.n_outer,
            spec.outer_loop_lengths.len()
        ));
    }
    if spec
        .outer_loop_lengths
        .iter()
        .chain(std::iter::once(&spec.boundary_length))
        .any(|&x| !(x.is_finite() && x >= 0.0))
    {
        return param("lengths must be finite and non-negative");
    }
    let chi = spec.euler_characteristic();
    let long_loops = spec.outer_loop_lengths.iter().filter(|&&x| x > spec.l).count();

    let topology_ok = spec.genus == 0 && chi <= 0 && chi >= -i64::from(spec.a);
    let loops_ok = if chi == 0 { long_loops == 0 } else { long_loops <= 1 };
    let border_ok = spec.boundary_length <= spec.l;
    let in_f = topology_ok && loops_ok && border_ok;
    Ok(SurfaceClass {
        in_f,
        in_s: in_f && long_loops == 0,
        chi,
    })
}
