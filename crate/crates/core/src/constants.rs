//! SI physical constants (CODATA 2018).
use std::f64::consts::PI;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Exact in the SI: `h / (2 pi)`.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// The set of constants every kernel and phase routine reads from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// F/m
    pub eps0: f64,
    /// H/m
    pub mu0: f64,
    /// m/s
    pub c: f64,
    /// J s
    pub hbar: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        eps0: VACUUM_PERMITTIVITY,
        mu0: VACUUM_PERMEABILITY,
        c: SPEED_OF_LIGHT,
        hbar: HBAR,
    };

    /// 1 / (4 pi eps0)
    #[inline]
    pub fn coulomb(&self) -> f64 {
        1.0 / (4.0 * PI * self.eps0)
    }

    /// mu0 / (4 pi)
    #[inline]
    pub fn mu0_over_4pi(&self) -> f64 {
        self.mu0 / (4.0 * PI)
    }

    /// Relative deviation of c^2 eps0 mu0 from one.
    pub fn consistency_defect(&self) -> f64 {
        (self.c * self.c * self.eps0 * self.mu0 - 1.0).abs()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn si_constants_are_consistent() {
        let k = PhysicalConstants::SI;
        assert!(k.consistency_defect() < 1e-12);
        assert!(k.eps0 > 0.0 && k.mu0 > 0.0 && k.c > 0.0 && k.hbar > 0.0);
        assert!((k.coulomb() - 8.987_551_792e9).abs() / 8.987_551_792e9 < 1e-9);
    }
}
