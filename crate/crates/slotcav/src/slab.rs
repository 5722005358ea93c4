//! Analytic symmetric-slab waveguide solver.
//!
//! Serves as an independent oracle for the finite-difference solver: the
//! guided-mode effective indices of a symmetric slab follow from a
//! transcendental dispersion relation with known root brackets, so they can
//! be computed to near machine precision by bisection.

use crate::constants::wavenumber;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Polarization {
    Te,
    Tm,
}

/// Symmetric slab: core of index `n_core` and thickness `d` in an infinite
/// cladding of index `n_clad`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabSpec {
    pub n_core: f64,
    pub n_clad: f64,
    pub thickness: f64,
    pub wavelength: f64,
    pub polarization: Polarization,
}

impl SlabSpec {
    pub fn new(
        n_core: f64,
        n_clad: f64,
        thickness: f64,
        wavelength: f64,
        polarization: Polarization,
    ) -> Result<Self> {
        if !(n_clad >= 1.0 && n_core >= n_clad) {
            return Err(Error::InvalidSpec(format!(
                "need n_core >= n_clad >= 1, got {n_core} / {n_clad}"
            )));
        }
        if !(thickness > 0.0 && wavelength > 0.0) {
            return Err(Error::InvalidSpec("thickness and wavelength must be positive".into()));
        }
        Ok(Self { n_core, n_clad, thickness, wavelength, polarization })
    }

    /// Normalized half-width R = (k0 d / 2) sqrt(n_core^2 - n_clad^2).
    fn r_param(&self) -> f64 {
        0.5 * wavenumber(self.wavelength)
            * self.thickness
            * (self.n_core * self.n_core - self.n_clad * self.n_clad).sqrt()
    }

    /// Normalized frequency V = 2R.
    pub fn v_param(&self) -> f64 {
        2.0 * self.r_param()
    }
}

/// Number of guided modes of the given polarization: floor(V/pi) + 1,
/// zero when there is no index contrast.
pub fn slab_mode_count(spec: &SlabSpec) -> usize {
    let v = spec.v_param();
    if v <= 0.0 {
        return 0;
    }
    (v / std::f64::consts::PI).floor() as usize + 1
}

/// Effective index of guided mode `mode_index` (0 = fundamental), found by
/// bisection on the dispersion relation to |dn_eff| < 1e-12.
///
/// With u = (k0 d / 2) sqrt(n_core^2 - n_eff^2) and
/// w = (k0 d / 2) sqrt(n_eff^2 - n_clad^2), the guided modes satisfy
///
/// * TE, even m: w = u tan(u);   TE, odd m: w = -u cot(u)
/// * TM: same with w scaled by (n_clad/n_core)^2
///
/// and mode m has u in (m pi/2, min((m+1) pi/2, R)).
pub fn slab_neff(spec: &SlabSpec, mode_index: usize) -> Result<f64> {
    let guided = slab_mode_count(spec);
    if mode_index >= guided {
        return Err(Error::ModeCutoff { mode_index, guided });
    }
    let r = spec.r_param();
    let lo_u = mode_index as f64 * std::f64::consts::FRAC_PI_2;
    let hi_u = ((mode_index + 1) as f64 * std::f64::consts::FRAC_PI_2).min(r);

    // f(u) = w_circle(u) - w_dispersion(u); f > 0 just above lo_u and f < 0
    // approaching the tan/cot pole or the circle edge.
    let scale = match spec.polarization {
        Polarization::Te => 1.0,
        Polarization::Tm => (spec.n_clad / spec.n_core).powi(2),
    };
    let even = mode_index % 2 == 0;
    let f = |u: f64| -> f64 {
        let w_circle = (r * r - u * u).max(0.0).sqrt();
        let w_disp = if even { u * u.tan() } else { -u / u.tan() };
        w_circle - scale * w_disp
    };

    // Open the bracket slightly: at lo_u the dispersion side is 0 (even) or
    // -inf (odd), at hi_u it diverges or the circle closes.
    let mut a = lo_u + 1e-13 * (1.0 + lo_u);
    let mut b = hi_u - 1e-13 * (1.0 + hi_u);
    if !(f(a) > 0.0) {
        // Degenerate sliver bracket; treat as cutoff.
        return Err(Error::ModeCutoff { mode_index, guided });
    }
    if f(b) > 0.0 {
        // Root sits against the upper edge (mode at the light line).
        b = hi_u;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    let u = 0.5 * (a + b);
    let k0_half_d = 0.5 * wavenumber(spec.wavelength) * spec.thickness;
    let n_eff_sq = spec.n_core * spec.n_core - (u / k0_half_d).powi(2);
    let n_eff = n_eff_sq.sqrt();

    // Residual of the dispersion relation, in normalized units.
    let w_circle = (r * r - u * u).max(0.0).sqrt();
    let w_disp = if even { u * u.tan() } else { -u / u.tan() };
    debug_assert!((w_circle - scale * w_disp).abs() < 1e-9 * (1.0 + w_disp.abs()));
    Ok(n_eff)
}

/// Residual of the dispersion relation at a candidate n_eff (diagnostic).
pub fn dispersion_residual(spec: &SlabSpec, n_eff: f64, mode_index: usize) -> f64 {
    let k0_half_d = 0.5 * wavenumber(spec.wavelength) * spec.thickness;
    let u = k0_half_d * (spec.n_core * spec.n_core - n_eff * n_eff).max(0.0).sqrt();
    let w = k0_half_d * (n_eff * n_eff - spec.n_clad * spec.n_clad).max(0.0).sqrt();
    let scale = match spec.polarization {
        Polarization::Te => 1.0,
        Polarization::Tm => (spec.n_clad / spec.n_core).powi(2),
    };
    let w_disp = if mode_index % 2 == 0 { u * u.tan() } else { -u / u.tan() };
    w - scale * w_disp
}
