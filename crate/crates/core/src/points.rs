//! Joukowski parametrization `x = (z + 1/z)/2` and the half-step shifts
//! `z -> q^(m/2) z`.

use rug::Complex;

use crate::numkit::{PrecisionCtx, QParam};

/// Number of half-steps `m` in `x^(m)`; negative values are check-shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftIndex(pub i64);

/// A point tracked through its parameter `z`.
///
/// The parameter is kept as `base * q^(steps/2)` so that chains of shifts
/// compose exactly: the rendered `z` depends only on the total step count.
#[derive(Clone, Debug)]
pub struct UnitizedPoint {
    base: Complex,
    steps: i64,
    z: Complex,
    x: Complex,
}

impl UnitizedPoint {
    /// Point with the given parameter; any nonzero `z` is allowed.
    pub fn from_z(z: Complex, ctx: &PrecisionCtx) -> Self {
        let z = ctx.complex(z);
        let x = joukowski(&z, ctx);
        Self { base: z.clone(), steps: 0, z, x }
    }

    pub fn z(&self) -> &Complex {
        &self.z
    }

    pub fn x(&self) -> &Complex {
        &self.x
    }

    /// Parameter before shifting.
    pub fn base(&self) -> &Complex {
        &self.base
    }

    /// Accumulated half-steps relative to `base`.
    pub fn steps(&self) -> i64 {
        self.steps
    }

    /// The same `x` reached through `1/z`.
    pub fn inverted(&self, ctx: &PrecisionCtx) -> Self {
        Self::from_z(ctx.complex(self.z.recip_ref()), ctx)
    }

    /// `|z - 1/z|`, which vanishes exactly at `x = +-1`.
    pub fn branch_gap(&self, ctx: &PrecisionCtx) -> rug::Float {
        let d = ctx.complex(&self.z - ctx.complex(self.z.recip_ref()));
        ctx.real(d.abs_ref())
    }
}

fn joukowski(z: &Complex, ctx: &PrecisionCtx) -> Complex {
    let mut x = ctx.complex(z + ctx.complex(z.recip_ref()));
    x >>= 1;
    x
}

/// Canonical parameter of `x`: `z = x + sqrt(x^2 - 1)` with `|z| >= 1`, the
/// square root behaving like `x` at infinity and taken from the upper side
/// on the segment `[-1, 1]`.
pub fn lift(x: &Complex, ctx: &PrecisionCtx) -> UnitizedPoint {
    let x = ctx.complex(x);
    let z = if x.imag().is_zero() {
        let xr = x.real().clone();
        let one = ctx.real(1);
        if xr > 1 {
            let s = (ctx.real(xr.square_ref()) - &one).sqrt();
            ctx.complex(xr + s)
        } else if xr < -1 {
            let s = (ctx.real(xr.square_ref()) - &one).sqrt();
            ctx.complex(xr - s)
        } else {
            let s = (one - ctx.real(xr.square_ref())).sqrt();
            ctx.complex((xr, s))
        }
    } else {
        let s = (ctx.complex(x.square_ref()) - 1u32).sqrt();
        let z1 = ctx.complex(&x + &s);
        let z2 = ctx.complex(&x - &s);
        let m1 = ctx.real(z1.abs_ref());
        let m2 = ctx.real(z2.abs_ref());
        if m1 >= m2 {
            z1
        } else {
            z2
        }
    };
    UnitizedPoint { base: z.clone(), steps: 0, x: joukowski(&z, ctx), z }
}

/// The point with parameter `q^(m/2) z`.
pub fn shift(p: &UnitizedPoint, m: ShiftIndex, q: &QParam, ctx: &PrecisionCtx) -> UnitizedPoint {
    if m.0 == 0 {
        return p.clone();
    }
    let steps = p.steps + m.0;
    let z = ctx.complex(&p.base * q.half_pow(steps, ctx));
    UnitizedPoint { base: p.base.clone(), steps, x: joukowski(&z, ctx), z }
}
