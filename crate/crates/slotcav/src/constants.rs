//! Physical constants (CODATA 2018), SI units.

/// Speed of light in vacuum (m/s).
pub const C_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Vacuum permeability (H/m).
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Angular frequency (rad/s) of a free-space wavelength (m).
pub fn angular_frequency(wavelength: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_LIGHT / wavelength
}

/// Free-space wavenumber k0 = 2*pi/lambda (rad/m).
pub fn wavenumber(wavelength: f64) -> f64 {
    2.0 * std::f64::consts::PI / wavelength
}
