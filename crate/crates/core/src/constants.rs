//! Calibrated representation-formula constants (versioned).
//!
//! Each set was fitted by least squares against an independent oracle on a
//! five-member Gaussian family (see `wave::calib`), and is re-checked by the
//! test suite against a freshly computed fit.

/// Bump whenever a constant below changes.
pub const CONSTANTS_VERSION: u32 = 1;

/// n = 2: `z(1,0) = c₀ ∫₀¹ φ(r)(1−r²)^{−1/2} r dr` (oracle: torus spectral propagation).
pub const EVEN_C_N2: [f64; 1] = [1.0];

/// n = 4: `c₀ ∫ φ r³/√(1−r²) + c₁ ∫ φ′ r⁴/√(1−r²)` (oracle: Fourier–Hankel quadrature).
pub const EVEN_C_N4: [f64; 2] = [1.5, 0.5];

/// n = 3: `z(1,0) = b₀ φ(1)` (oracle: 1D reduction `r·u`).
pub const ODD_B_N3: [f64; 1] = [1.0];

/// n = 5: `z(1,0) = b₀ φ(1) + b₁ φ′(1)` (oracle: 1D reduction `3ru + r²u_r`).
pub const ODD_B_N5: [f64; 2] = [1.0, 1.0 / 3.0];

/// Residual limits for the calibration fits.
pub const CALIB_LIMIT_N2: f64 = 1e-6;
pub const CALIB_LIMIT_N3: f64 = 1e-6;
pub const CALIB_LIMIT_N4: f64 = 1e-4;
pub const CALIB_LIMIT_N5: f64 = 1e-4;

/// Exponents `a` of the calibration family `exp(−a r²)`.
pub const CALIB_FAMILY: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 3.0];
