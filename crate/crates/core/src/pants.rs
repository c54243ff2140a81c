//! Pairs of pants with cusps: orthogonal self-distances of horocycles, the
//! length of the geodesics `beta^-1 alpha^k`, and the small-systole example
//! surfaces built from them.

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use crate::constants::collar_width;
use crate::error::{Error, Result};
use crate::moebius::{hyperbolic_distance, Point};
use crate::precision::PrecisionContext;

#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Cusp,
    Geodesic(Float),
}

impl Boundary {
    /// Length of the boundary component, zero for a cusp.
    pub fn length(&self, ctx: &PrecisionContext) -> Float {
        match self {
            Boundary::Cusp => ctx.float(0u32),
            Boundary::Geodesic(l) => Float::with_val(ctx.bits, l),
        }
    }
}

/// A pair of pants given by its three boundary components.
#[derive(Debug, Clone, PartialEq)]
pub struct PantsWithCusps {
    pub boundary: [Boundary; 3],
}

impl PantsWithCusps {
    pub fn new(boundary: [Boundary; 3]) -> Result<Self> {
        for b in &boundary {
            if let Boundary::Geodesic(l) = b {
                if !(*l > 0) {
                    return Err(Error::InvalidInput("geodesic boundary lengths must be positive".into()));
                }
            }
        }
        Ok(Self { boundary })
    }

    pub fn thrice_punctured_sphere() -> Self {
        Self {
            boundary: [Boundary::Cusp, Boundary::Cusp, Boundary::Cusp],
        }
    }

    /// Three geodesic boundaries of lengths `a`, `b`, `c`.
    pub fn geodesic(a: Float, b: Float, c: Float) -> Result<Self> {
        Self::new([Boundary::Geodesic(a), Boundary::Geodesic(b), Boundary::Geodesic(c)])
    }

    fn geodesic_lengths(&self) -> Result<[&Float; 3]> {
        match &self.boundary {
            [Boundary::Geodesic(a), Boundary::Geodesic(b), Boundary::Geodesic(c)] => Ok([a, b, c]),
            _ => Err(Error::InvalidInput("all three boundary components must be geodesics".into())),
        }
    }
}

/// `2(cosh(alpha/2) + cosh(beta/2))`: the largest level `h` for which the
/// formula below is meaningful.
pub fn horocycle_level_limit(p: &PantsWithCusps, ctx: &PrecisionContext) -> Result<Float> {
    if p.boundary[0] != Boundary::Cusp {
        return Err(Error::NoCusp);
    }
    let half_cosh = |b: &Boundary| (b.length(ctx) / 2u32).cosh();
    Ok((half_cosh(&p.boundary[1]) + half_cosh(&p.boundary[2])) * 2u32)
}

/// Shortest orthogonal geodesic arc from the horocycle of length `h` around
/// the first boundary entry (a cusp) to itself:
/// `2 log(2(cosh(alpha/2) + cosh(beta/2)) / h)`, a cusp entering as length 0.
pub fn horocycle_self_distance(p: &PantsWithCusps, h: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let limit = horocycle_level_limit(p, ctx)?;
    if !(*h > 0) {
        return Err(Error::InvalidLevels("h must be positive".into()));
    }
    if *h > limit {
        return Err(Error::LevelTooLarge {
            h: ctx.to_decimal(h),
            max: ctx.to_decimal(&limit),
        });
    }
    Ok((limit / h).ln() * 2u32)
}

/// Independent evaluation of [`horocycle_self_distance`] in the upper
/// half-plane.
///
/// The two other boundary geodesics are realised as the semicircles over
/// `[-e^(alpha/2), -e^(-alpha/2)]` and `[e^(-beta/2), e^(beta/2)]`, both
/// orthogonal to the unit circle, and the cusp sits at infinity. The
/// horocycle of length `h` is the horizontal line at the height where the
/// gap between the two semicircles has hyperbolic length `h`. The shortest
/// return arc runs down the imaginary axis to the mirror image of the
/// horocycle under inversion in the unit circle.
pub fn horocycle_self_distance_oracle(p: &PantsWithCusps, h: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if p.boundary[0] != Boundary::Cusp {
        return Err(Error::NoCusp);
    }
    let alpha = p.boundary[1].length(ctx);
    let beta = p.boundary[2].length(ctx);
    let e = |x: &Float, sign: i32| (Float::with_val(ctx.bits, x * sign) / 2u32).exp();
    let x_alpha = -e(&alpha, -1);
    let y_alpha = -e(&alpha, 1);
    let x_beta = e(&beta, -1);
    let y_beta = e(&beta, 1);
    for (u, v) in [(&x_alpha, &y_alpha), (&x_beta, &y_beta)] {
        // orthogonal to the unit circle iff the endpoints are inverse points
        let prod = Float::with_val(ctx.bits, u * v);
        let tol = Float::with_val(ctx.bits, 1u32) >> (ctx.bits as i32 - 8);
        if Float::with_val(ctx.bits, &prod - 1u32).abs() > tol {
            return Err(Error::InvalidInput("boundary geodesics are not orthogonal to the unit circle".into()));
        }
    }
    // Euclidean gap between the outer ends of the two semicircles, measured on
    // the horocycle at height Y, has hyperbolic length gap / Y = h.
    let gap = Float::with_val(ctx.bits, &x_beta + &y_beta) - &x_alpha - &y_alpha;
    let height = Float::with_val(ctx.bits, &gap / h);
    if height < 1 {
        return Err(Error::LevelTooLarge {
            h: ctx.to_decimal(h),
            max: ctx.to_decimal(&gap),
        });
    }
    let top = Point::new(ctx.float(0u32), height.clone())?;
    // inversion z -> 1/conj(z) fixes the unit circle and maps iY to i/Y
    let bottom = Point::new(ctx.float(0u32), height.recip())?;
    hyperbolic_distance(&top, &bottom, ctx)
}

/// `cosh(l/2)` for the geodesic `beta^-1 alpha^k` in the pants with boundary
/// lengths `(a, b, c)`:
/// `sinh(ka/2)/sinh(a/2) (cosh(c/2) + cosh(a/2)cosh(b/2)) + cosh(ka/2)cosh(b/2)`.
pub fn back_geodesic_half_cosh(p: &PantsWithCusps, k: u32, ctx: &PrecisionContext) -> Result<Float> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let [a, b, c] = p.geodesic_lengths()?;
    let half = |x: &Float, m: u32| Float::with_val(ctx.bits, x * m) / 2u32;
    let ratio = half(a, k).sinh() / half(a, 1).sinh();
    let inner = half(c, 1).cosh() + half(a, 1).cosh() * half(b, 1).cosh();
    Ok(ratio * inner + half(a, k).cosh() * half(b, 1).cosh())
}

pub fn back_geodesic_length(p: &PantsWithCusps, k: u32, ctx: &PrecisionContext) -> Result<Float> {
    Ok(back_geodesic_half_cosh(p, k, ctx)?.acosh() * 2u32)
}

/// Hyperbolic generators of the pants group with boundary lengths
/// `(a, b, c)`: `A` translates along the imaginary axis by `a`,
/// `tr B = 2 cosh(b/2)` and `tr AB = -2 cosh(c/2)`.
#[derive(Debug, Clone)]
pub struct PantsRepresentation {
    pub alpha: [Float; 4],
    pub beta: [Float; 4],
}

impl PantsRepresentation {
    pub fn new(p: &PantsWithCusps, ctx: &PrecisionContext) -> Result<Self> {
        let [a, b, c] = p.geodesic_lengths()?;
        let ea = (Float::with_val(ctx.bits, a) / 2u32).exp();
        let ea_inv = Float::with_val(ctx.bits, ea.recip_ref());
        let y = (Float::with_val(ctx.bits, b) / 2u32).cosh() * 2u32;
        let z = -(Float::with_val(ctx.bits, c) / 2u32).cosh() * 2u32;
        // p + s = y, e^(a/2) p + e^(-a/2) s = z
        let diff = Float::with_val(ctx.bits, &ea - &ea_inv);
        let p11 = (Float::with_val(ctx.bits, &z) - Float::with_val(ctx.bits, &ea_inv * &y)) / diff;
        let s22 = Float::with_val(ctx.bits, &y - &p11);
        let q12 = ctx.float(1u32);
        let r21 = Float::with_val(ctx.bits, &p11 * &s22) - 1u32;
        Ok(Self {
            alpha: [ea, ctx.float(0u32), ctx.float(0u32), ea_inv],
            beta: [p11, q12, r21, s22],
        })
    }

    /// Boundary lengths read back from the traces of `A`, `B` and `AB`.
    pub fn boundary_lengths(&self, ctx: &PrecisionContext) -> [Float; 3] {
        let len = |tr: Float| (tr.abs() / 2u32).acosh() * 2u32;
        let tr_a = Float::with_val(ctx.bits, &self.alpha[0] + &self.alpha[3]);
        let tr_b = Float::with_val(ctx.bits, &self.beta[0] + &self.beta[3]);
        let ab = mul(&self.alpha, &self.beta, ctx);
        let tr_ab = Float::with_val(ctx.bits, &ab[0] + &ab[3]);
        [len(tr_a), len(tr_b), len(tr_ab)]
    }

    /// Translation length of `B^-1 A^k`.
    pub fn back_geodesic_length(&self, k: u32, ctx: &PrecisionContext) -> Float {
        let [p, q, r, s] = &self.beta;
        let b_inv = [
            Float::with_val(ctx.bits, s),
            -Float::with_val(ctx.bits, q),
            -Float::with_val(ctx.bits, r),
            Float::with_val(ctx.bits, p),
        ];
        let ak = [
            Float::with_val(ctx.bits, (&self.alpha[0]).pow(k)),
            ctx.float(0u32),
            ctx.float(0u32),
            Float::with_val(ctx.bits, (&self.alpha[3]).pow(k)),
        ];
        let m = mul(&b_inv, &ak, ctx);
        let tr = Float::with_val(ctx.bits, &m[0] + &m[3]);
        (tr.abs() / 2u32).acosh() * 2u32
    }
}

fn mul(x: &[Float; 4], y: &[Float; 4], ctx: &PrecisionContext) -> [Float; 4] {
    let dot = |a: &Float, b: &Float, c: &Float, d: &Float| {
        Float::with_val(ctx.bits, a * b) + Float::with_val(ctx.bits, c * d)
    };
    [
        dot(&x[0], &y[0], &x[1], &y[2]),
        dot(&x[0], &y[1], &x[1], &y[3]),
        dot(&x[2], &y[0], &x[3], &y[2]),
        dot(&x[2], &y[1], &x[3], &y[3]),
    ]
}

/// `2 arcosh(k(cosh(x/2) + cosh(y/2)) + cosh(x/2))`.
pub fn degenerate_g2_length(k: u32, x: &Float, y: &Float, ctx: &PrecisionContext) -> Float {
    let ch = |v: &Float| (Float::with_val(ctx.bits, v) / 2u32).cosh();
    let c = (ch(x) + ch(y)) * k + ch(x);
    c.acosh() * 2u32
}

/// `2 arcosh(k(cosh(y/2) + 1) + 1)`. At `y = 0` this is `2 arcosh(2k + 1)`.
pub fn degenerate_g3_length(k: u32, y: &Float, ctx: &PrecisionContext) -> Float {
    let c = ((Float::with_val(ctx.bits, y) / 2u32).cosh() + 1u32) * k + 1u32;
    c.acosh() * 2u32
}

/// Lengths entering the example surface for one `k`.
#[derive(Debug, Clone)]
pub struct ExampleLengths {
    pub x: Float,
    pub y: Float,
    pub l_g1: Float,
    pub l_g2: Float,
    pub l_g3: Float,
    pub collar_2w: Float,
}

/// `y = 2 arsinh(1/sinh(k/16))`, `x = y / sqrt(2k + 1)`, then `g1` from the
/// pants `(x, x, x)`, `g2` and `g3` from the degenerate formulas
/// `cosh(l(g2)/2) = k(cosh(x/2) + cosh(y/2)) + cosh(x/2)` and
/// `cosh(l(g3)/2) = k(cosh(y/2) + 1) + 1`, and twice the collar width of `y`.
pub fn example_lengths(k: u32, ctx: &PrecisionContext) -> Result<ExampleLengths> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let y = (ctx.float(k) / 16u32).sinh().recip().asinh() * 2u32;
    let x = Float::with_val(ctx.bits, &y / ctx.float(2 * k + 1).sqrt());
    let pants = PantsWithCusps::geodesic(x.clone(), x.clone(), x.clone())?;
    let l_g1 = back_geodesic_length(&pants, k, ctx)?;
    let l_g2 = degenerate_g2_length(k, &x, &y, ctx);
    let l_g3 = degenerate_g3_length(k, &y, ctx);
    let collar_2w = collar_width(&y, ctx)? * 2u32;
    Ok(ExampleLengths {
        x,
        y,
        l_g1,
        l_g2,
        l_g3,
        collar_2w,
    })
}

pub const EXAMPLE_GUARD_BITS: u32 = 20;
pub const EXAMPLE_PRECISION_CAP: u32 = 1024;
pub const EXAMPLE_ASSERTED_FROM: u32 = 100;

#[derive(Debug, Clone, Serialize)]
pub struct ExampleSurfaceReport {
    pub k: u32,
    pub x: String,
    pub y: String,
    pub l_g1: String,
    pub l_g2: String,
    pub l_g3: String,
    pub collar_2w: String,
    /// `l(g1) < l(g3)`.
    pub bullet1: bool,
    /// `l(g1) < 2 w(y)`.
    pub bullet2: bool,
    /// `l(g3) < l(g2)`.
    pub g3_below_g2: bool,
    /// `l(g3) - l(g1)`.
    pub margin1: String,
    /// `2 w(y) - l(g1)`.
    pub margin2: String,
    /// `l(g2) - l(g3)`.
    pub margin3: String,
    /// The bullets are claimed for this `k`.
    pub asserted: bool,
    pub precision_bits: u32,
    pub guard_bits: u32,
}

impl ExampleSurfaceReport {
    /// Both bullets hold, or they are not claimed for this `k`.
    pub fn passes(&self) -> bool {
        !self.asserted || (self.bullet1 && self.bullet2)
    }
}

/// Rough bound on the absolute rounding error of the example lengths at the
/// given precision: a few dozen operations on quantities of size `scale`.
fn rounding_bound(scale: &Float, bits: u32) -> Float {
    Float::with_val(bits, scale.abs_ref()) >> (bits as i32 - 8)
}

fn certified(margin: &Float, scale: &Float, bits: u32) -> bool {
    let need = rounding_bound(scale, bits) << EXAMPLE_GUARD_BITS as i32;
    Float::with_val(bits, margin.abs_ref()) > need
}

/// Evaluate the example at `k`, raising the precision until every margin
/// exceeds its rounding error by [`EXAMPLE_GUARD_BITS`] bits.
pub fn build_example_surface(k: u32, ctx: &PrecisionContext) -> Result<ExampleSurfaceReport> {
    build_example_surface_capped(k, ctx, EXAMPLE_PRECISION_CAP)
}

pub fn build_example_surface_capped(k: u32, ctx: &PrecisionContext, cap: u32) -> Result<ExampleSurfaceReport> {
    let mut bits = ctx.bits.max(64);
    loop {
        let c = PrecisionContext::new(bits);
        let v = example_lengths(k, &c)?;
        let m1 = Float::with_val(bits, &v.l_g3 - &v.l_g1);
        let m2 = Float::with_val(bits, &v.collar_2w - &v.l_g1);
        let m3 = Float::with_val(bits, &v.l_g2 - &v.l_g3);
        let scale = Float::with_val(bits, &v.l_g2 + &v.collar_2w) + 1u32;
        if [&m1, &m2, &m3].iter().all(|m| certified(m, &scale, bits)) {
            let out = PrecisionContext::new(ctx.bits.min(bits));
            return Ok(ExampleSurfaceReport {
                k,
                x: out.to_decimal(&v.x),
                y: out.to_decimal(&v.y),
                l_g1: out.to_decimal(&v.l_g1),
                l_g2: out.to_decimal(&v.l_g2),
                l_g3: out.to_decimal(&v.l_g3),
                collar_2w: out.to_decimal(&v.collar_2w),
                bullet1: m1 > 0,
                bullet2: m2 > 0,
                g3_below_g2: m3 > 0,
                margin1: c.to_decimal(&m1),
                margin2: c.to_decimal(&m2),
                margin3: c.to_decimal(&m3),
                asserted: k >= EXAMPLE_ASSERTED_FROM,
                precision_bits: bits,
                guard_bits: EXAMPLE_GUARD_BITS,
            });
        }
        if bits >= cap {
            return Err(Error::PrecisionExhausted { cap });
        }
        bits = (bits * 2).min(cap);
    }
}
