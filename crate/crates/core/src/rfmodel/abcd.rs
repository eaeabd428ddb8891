//! Transmission (ABCD) two-port matrices and their cascade.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// 2x2 complex transmission matrix. `b` is in ohms, `c` in siemens,
/// `a` and `d` dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcdMatrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl AbcdMatrix {
    pub const IDENTITY: AbcdMatrix = AbcdMatrix {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };

    pub fn mul(&self, rhs: &AbcdMatrix) -> AbcdMatrix {
        AbcdMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

/// ABCD matrix of a lossless transmission line with electrical length
/// `beta_l_rad` and characteristic impedance `z0_ohm`.
pub fn tline_abcd(beta_l_rad: f64, z0_ohm: f64) -> Result<AbcdMatrix> {
    if !(z0_ohm > 0.0) {
        return Err(Error::invalid(format!(
            "characteristic impedance must be positive, got {z0_ohm}"
        )));
    }
    let (s, c) = beta_l_rad.sin_cos();
    Ok(AbcdMatrix {
        a: Complex64::new(c, 0.0),
        b: Complex64::new(0.0, z0_ohm * s),
        c: Complex64::new(0.0, s / z0_ohm),
        d: Complex64::new(c, 0.0),
    })
}

/// ABCD matrix of a shunt admittance.
pub fn shunt_abcd(y_siemens: Complex64) -> AbcdMatrix {
    AbcdMatrix {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: y_siemens,
        d: Complex64::new(1.0, 0.0),
    }
}

/// Left-to-right product of a chain of two-ports.
pub fn abcd_cascade(matrices: &[AbcdMatrix]) -> Result<AbcdMatrix> {
    let mut it = matrices.iter();
    let first = *it
        .next()
        .ok_or_else(|| Error::invalid("cascade of zero two-ports"))?;
    Ok(it.fold(first, |acc, m| acc.mul(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn assert_mat_eq(m: &AbcdMatrix, a: Complex64, b: Complex64, c: Complex64, d: Complex64) {
        // epsilon absorbs sin(pi/2 + pi/2) style rounding in entries that
        // should be exactly zero.
        assert_relative_eq!(m.a.re, a.re, max_relative = 1e-12, epsilon = 1e-13);
        assert_relative_eq!(m.a.im, a.im, max_relative = 1e-12, epsilon = 1e-13);
        assert_relative_eq!(m.b.re, b.re, max_relative = 1e-12, epsilon = 1e-13);
        assert_relative_eq!(m.b.im, b.im, max_relative = 1e-12, epsilon = 1e-13);
        assert_relative_eq!(m.c.re, c.re, max_relative = 1e-12, epsilon = 1e-13);
        assert_relative_eq!(m.c.im, c.im, max_relative = 1e-12, epsilon = 1e-13);
        assert_relative_eq!(m.d.re, d.re, max_relative = 1e-12, epsilon = 1e-13);
        assert_relative_eq!(m.d.im, d.im, max_relative = 1e-12, epsilon = 1e-13);
    }

    #[test]
    fn zero_length_line_is_identity() {
        let m = tline_abcd(0.0, 50.0).unwrap();
        assert_mat_eq(
            &m,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
    }

    #[test]
    fn quarter_wave_line() {
        let m = tline_abcd(std::f64::consts::FRAC_PI_2, 50.0).unwrap();
        assert_mat_eq(
            &m,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 50.0),
            Complex64::new(0.0, 1.0 / 50.0),
            Complex64::new(0.0, 0.0),
        );
    }

    #[test]
    fn general_line_matches_trig() {
        let m = tline_abcd(1.37, 50.0).unwrap();
        let (s, c) = 1.37f64.sin_cos();
        assert_mat_eq(
            &m,
            Complex64::new(c, 0.0),
            Complex64::new(0.0, 50.0 * s),
            Complex64::new(0.0, s / 50.0),
            Complex64::new(c, 0.0),
        );
    }

    #[test]
    fn tline_rejects_nonpositive_z0() {
        assert!(tline_abcd(1.0, 0.0).is_err());
        assert!(tline_abcd(1.0, -50.0).is_err());
    }

    #[test]
    fn shunt_entries() {
        let m = shunt_abcd(Complex64::new(0.0, 0.0));
        assert_mat_eq(
            &m,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        let m = shunt_abcd(Complex64::new(0.01, 0.005));
        assert_eq!(m.c, Complex64::new(0.01, 0.005));
        assert_eq!(m.a, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cascade_rules() {
        assert!(abcd_cascade(&[]).is_err());
        let y = Complex64::new(0.02, 0.0);
        let s = shunt_abcd(y);
        let m = abcd_cascade(&[s, AbcdMatrix::IDENTITY]).unwrap();
        assert_eq!(m.c, y);

        // Two quarter-wave lines make a half-wave line: -identity.
        let q = tline_abcd(std::f64::consts::FRAC_PI_2, 50.0).unwrap();
        let h = abcd_cascade(&[q, q]).unwrap();
        assert_mat_eq(
            &h,
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
        );
    }
}
