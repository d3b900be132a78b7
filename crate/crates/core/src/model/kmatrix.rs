//! Boundary parameter sets and the scalar combinations derived from them.

use crate::C64;

/// Parameters of the reflection matrix pair (K^-, K^+).
///
/// `zeta, c1, c2` control the left boundary, the tilded set the right.
/// Square roots are taken on the principal branch; the provided presets
/// keep `1 + c1 c2` real and positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    pub zeta: C64,
    pub c1: C64,
    pub c2: C64,
    pub zeta_t: C64,
    pub c1_t: C64,
    pub c2_t: C64,
}

impl BoundaryParams {
    pub fn new(zeta: C64, c1: C64, c2: C64, zeta_t: C64, c1_t: C64, c2_t: C64) -> Self {
        BoundaryParams { zeta, c1, c2, zeta_t, c1_t, c2_t }
    }

    /// Diagonal boundary: all four off-diagonal couplings zero.
    pub fn diagonal(zeta: C64, zeta_t: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        BoundaryParams::new(zeta, z, z, zeta_t, z, z)
    }

    /// A generic real preset keeping `1 + c1 c2 > 0` on both boundaries.
    pub fn generic_preset() -> Self {
        BoundaryParams::new(
            C64::new(0.83, 0.0),
            C64::new(0.31, 0.0),
            C64::new(0.45, 0.0),
            C64::new(1.12, 0.0),
            C64::new(0.22, 0.0),
            C64::new(0.57, 0.0),
        )
    }

    /// Swap boundary roles: the dual matrix uses the tilded set.
    pub fn dual(&self) -> BoundaryParams {
        BoundaryParams {
            zeta: self.zeta_t,
            c1: self.c1_t,
            c2: self.c2_t,
            zeta_t: self.zeta,
            c1_t: self.c1,
            c2_t: self.c2,
        }
    }

    pub fn sqrt_1cc(&self) -> C64 {
        (C64::new(1.0, 0.0) + self.c1 * self.c2).sqrt()
    }

    pub fn sqrt_1cc_t(&self) -> C64 {
        (C64::new(1.0, 0.0) + self.c1_t * self.c2_t).sqrt()
    }

    pub fn h1(&self, u: C64) -> C64 {
        (self.sqrt_1cc() * u + self.zeta) * 2.0
    }

    pub fn h2(&self, u: C64) -> C64 {
        (self.sqrt_1cc() * u - self.zeta) * 2.0
    }

    pub fn h1_t(&self, u: C64) -> C64 {
        (self.sqrt_1cc_t() * u + self.zeta_t) * -2.0
    }

    pub fn h2_t(&self, u: C64) -> C64 {
        (self.sqrt_1cc_t() * u - self.zeta_t) * -2.0
    }

    /// `H_1 = h_1 h~_1`.
    pub fn hh1(&self, u: C64) -> C64 {
        self.h1(u) * self.h1_t(u)
    }

    /// `H_2 = h_2 h~_2`.
    pub fn hh2(&self, u: C64) -> C64 {
        self.h2(u) * self.h2_t(u)
    }

    /// Inhomogeneity strength
    /// `x = 8 sqrt((1+c1c2)(1+c~1c~2)) - 4(2 + c1c~2 + c2c~1)`;
    /// vanishes exactly in the diagonal limit.
    pub fn x(&self) -> C64 {
        self.sqrt_1cc() * self.sqrt_1cc_t() * 8.0
            - (C64::new(2.0, 0.0) + self.c1 * self.c2_t + self.c2 * self.c1_t) * 4.0
    }

    /// `2 + c1 c~2 + c2 c~1`, the combination driving open asymptotics.
    pub fn asym_combo(&self) -> C64 {
        C64::new(2.0, 0.0) + self.c1 * self.c2_t + self.c2 * self.c1_t
    }

    /// `1 + c1 c2 - 4 zeta^2`.
    pub fn qdet_combo(&self) -> C64 {
        C64::new(1.0, 0.0) + self.c1 * self.c2 - self.zeta * self.zeta * 4.0
    }

    /// `1 + c~1 c~2 - 4 zeta~^2`.
    pub fn qdet_combo_t(&self) -> C64 {
        C64::new(1.0, 0.0) + self.c1_t * self.c2_t - self.zeta_t * self.zeta_t * 4.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_product_factorizes() {
        let p = BoundaryParams::generic_preset();
        for &x in &[0.3, -1.2, 2.5] {
            let u = C64::new(x, 0.7);
            let lhs = p.h1(u) * p.h2(u);
            let rhs = ((C64::new(1.0, 0.0) + p.c1 * p.c2) * u * u - p.zeta * p.zeta) * 4.0;
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn x_vanishes_exactly_in_diagonal_limit() {
        let p = BoundaryParams::diagonal(C64::new(0.9, 0.0), C64::new(1.3, 0.0));
        assert_eq!(p.x(), C64::new(0.0, 0.0));
    }

    #[test]
    fn x_nonzero_for_generic_params() {
        let p = BoundaryParams::generic_preset();
        assert!(p.x().norm() > 1e-3);
    }
}
