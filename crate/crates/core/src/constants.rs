//! Thick/thin constants of a cusped hyperbolic surface.
//!
//! A surface is described either explicitly (longest embedded horocycle,
//! systole, orthogonal self-distances of horocycles) or topologically by
//! `(g, n)` and a systole floor, in which case the explicit quantities are
//! replaced by their universal bounds.
//!
//! The thresholds `D` and `K` are defined by inequalities that must hold for
//! *every* real `x` beyond them. Each has the shape
//!
//! ```text
//! phi(x) = coef * x^(1/m) - 2 arsinh(scale * x) - offset
//! ```
//!
//! and the sign of `phi'` changes at most twice (at `x1 <= x2`, bracketed
//! around `sqrt(m - 1) / scale`). This makes "holds for all `x >= N`" a
//! monotone predicate in `N`, which is searched on the integers by
//! exponential bracketing and bisection. Every sign is decided with
//! precision escalation.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

const MAX_SIGN_BITS: u32 = 16_384;

pub fn basmajian_bound(k: u64, d1: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if k < 2 {
        return Err(Error::InvalidInput("C(k) is defined for k >= 2".into()));
    }
    Ok(basmajian_bound_at(&Integer::from(k), d1, ctx))
}

fn basmajian_bound_at(k: &Integer, d1: &Float, ctx: &PrecisionContext) -> Float {
    ctx.float(k).asinh() * 2u32 + d1 + 1u32
}

/// `(eps/12) sqrt(i)`, valid for `0 < eps <= 1/2`.
pub fn thick_part_threshold(eps: &Float, intersections: u64, ctx: &PrecisionContext) -> Result<Float> {
    let half = ctx.float(0.5);
    if !(*eps > 0) || *eps > half {
        return Err(Error::EpsilonOutOfRange);
    }
    Ok(Float::with_val(ctx.bits, eps / 12u32) * ctx.float(intersections).sqrt())
}

/// `4(3g-3+n) log(4 pi (2g-2+n) / (3g-3+n))`.
pub fn bers_bound(g: u32, n: u32, ctx: &PrecisionContext) -> Result<Float> {
    let dim = 3 * i64::from(g) - 3 + i64::from(n);
    if dim < 1 {
        return Err(Error::NotApplicable(format!(
            "no pants decomposition bound for (g, n) = ({g}, {n})"
        )));
    }
    let euler = 2 * i64::from(g) - 2 + i64::from(n);
    let pi = Float::with_val(ctx.bits, rug::float::Constant::Pi);
    let ratio = pi * 4u32 * euler / dim;
    Ok(ratio.ln() * (4 * dim))
}

/// `12g + 5n - 11`, an upper bound for the longest embedded horocycle.
pub fn adams_bound(g: u32, n: u32) -> Result<u64> {
    if n < 1 || 2 * i64::from(g) - 2 + i64::from(n) <= 0 {
        return Err(Error::NotHyperbolicType { g, n });
    }
    Ok(12 * u64::from(g) + 5 * u64::from(n) - 11)
}

/// `2 / sqrt(coth(eps0) - 1)`: length of the horocycle bounding the cusp
/// part of the `eps0`-thin part.
pub fn thin_boundary_horocycle(eps0: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(*eps0 > 0) {
        return Err(Error::InvalidInput("eps0 must be positive".into()));
    }
    let coth = Float::with_val(ctx.bits, eps0.tanh_ref()).recip();
    Ok((coth - 1u32).sqrt().recip() * 2u32)
}

/// `2 log(4 cosh(L(g,n)/2) / h)`.
pub fn orthogonal_distance_bound(h: &Float, g: u32, n: u32, ctx: &PrecisionContext) -> Result<Float> {
    if !(*h > 0) {
        return Err(Error::InvalidInput("h must be positive".into()));
    }
    let bers = bers_bound(g, n, ctx)?;
    let c = Float::with_val(ctx.bits, &bers / 2u32).cosh() * 4u32;
    Ok((c / h).ln() * 2u32)
}

/// Half-width `arsinh(1 / sinh(gamma/2))` of the standard collar.
pub fn collar_width(gamma: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(*gamma > 0) {
        return Err(Error::InvalidInput("gamma must be positive".into()));
    }
    let s = Float::with_val(ctx.bits, gamma / 2u32).sinh();
    Ok(s.recip().asinh())
}

/// `phi(x) = coef * x^(1/root) - 2 arsinh(scale * x) - offset`.
#[derive(Debug, Clone)]
pub struct ThresholdInequality {
    pub coef: Float,
    pub root: u32,
    pub scale: Float,
    pub offset: Float,
}

impl ThresholdInequality {
    /// `(eps0/12) sqrt(x) > 2 arsinh(eps0 x / 2) + d + 2 eps0`.
    pub fn thin_part(eps0: &Float, d_eps0: &Float, ctx: &PrecisionContext) -> Self {
        Self {
            coef: Float::with_val(ctx.bits, eps0 / 12u32),
            root: 2,
            scale: Float::with_val(ctx.bits, eps0 / 2u32),
            offset: Float::with_val(ctx.bits, d_eps0 + Float::with_val(ctx.bits, eps0 * 2u32)),
        }
    }

    /// `(eps/h) k^(1/5) > 2 arsinh(k) + d + 1`.
    pub fn fifth_root(eps: &Float, h_max: &Float, d1: &Float, ctx: &PrecisionContext) -> Self {
        Self {
            coef: Float::with_val(ctx.bits, eps / h_max),
            root: 5,
            scale: ctx.float(1u32),
            offset: Float::with_val(ctx.bits, d1 + 1u32),
        }
    }

    /// `(eps/12) sqrt(k) > 2 arsinh(k) + d + 1`.
    pub fn square_root(eps: &Float, d1: &Float, ctx: &PrecisionContext) -> Self {
        Self {
            coef: Float::with_val(ctx.bits, eps / 12u32),
            root: 2,
            scale: ctx.float(1u32),
            offset: Float::with_val(ctx.bits, d1 + 1u32),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.coef > 0) || !(self.scale > 0) || !(self.offset > 0) || self.root < 2 {
            return Err(Error::InvalidInput(
                "threshold inequality needs positive coefficients".into(),
            ));
        }
        Ok(())
    }

    /// `(phi(x), magnitude of its terms)` at the given precision.
    fn eval(&self, x: &Float, bits: u32) -> (Float, Float) {
        let x = Float::with_val(bits, x);
        let growth = Float::with_val(bits, x.root_ref(self.root)) * &self.coef;
        let damp = (Float::with_val(bits, &x * &self.scale)).asinh() * 2u32;
        let offset = Float::with_val(bits, &self.offset);
        let scale = Float::with_val(bits, growth.abs_ref()) + &damp + offset.clone().abs();
        (growth - damp - offset, scale)
    }

    pub fn value(&self, x: &Float, ctx: &PrecisionContext) -> Float {
        self.eval(x, ctx.bits).0
    }

    /// Sign of `phi(x)`, re-evaluated with more bits until the value clears
    /// the rounding error of its terms.
    pub fn sign_at(&self, x: &Float, ctx: &PrecisionContext) -> Result<Ordering> {
        let mut bits = ctx.bits.max(x.prec() + 64);
        loop {
            let (v, scale) = self.eval(x, bits);
            let tol = scale >> (bits as i32 - 16);
            if Float::with_val(bits, v.abs_ref()) > tol {
                return Ok(v.cmp0().unwrap_or(Ordering::Equal));
            }
            if bits >= MAX_SIGN_BITS {
                return Err(Error::PrecisionExhausted { cap: MAX_SIGN_BITS });
            }
            bits *= 2;
        }
    }

    fn sign_at_integer(&self, n: &Integer, ctx: &PrecisionContext) -> Result<Ordering> {
        let bits = ctx.bits.max(n.significant_bits() + 64);
        self.sign_at(&Float::with_val(bits, n), ctx)
    }

    /// Log of `phi'`'s positive part over its negative part; `phi'` has the
    /// sign of this function. It decreases on `(0, x_m)` and increases on
    /// `(x_m, inf)` with `x_m = sqrt(root - 1) / scale`.
    fn derivative_log_ratio(&self, x: &Float, bits: u32) -> Float {
        let m = self.root;
        let x = Float::with_val(bits, x);
        let sx = Float::with_val(bits, &x * &self.scale);
        let lhs = (Float::with_val(bits, &self.coef / m)).ln()
            + (Float::with_val(bits, sx.square_ref()) + 1u32).ln() / 2u32;
        let exponent = Float::with_val(bits, m - 1) / m;
        let rhs = (Float::with_val(bits, &self.scale * 2u32)).ln() + x.ln() * exponent;
        lhs - rhs
    }

    /// Points where `phi'` changes sign: `phi' > 0` on `(0, x1)`, `< 0` on
    /// `(x1, x2)`, `> 0` on `(x2, inf)`. `None` when `phi' >= 0` everywhere.
    /// The returned `x2` is an upper bracket: `phi' > 0` for all `x >= x2`.
    pub fn critical_points(&self, ctx: &PrecisionContext) -> Option<(Float, Float)> {
        let bits = ctx.bits + 32;
        let xm = ctx.float(self.root - 1).sqrt() / &self.scale;
        let xm = Float::with_val(bits, xm);
        if self.derivative_log_ratio(&xm, bits) >= 0 {
            return None;
        }
        // right root
        let mut hi = Float::with_val(bits, &xm * 2u32);
        while self.derivative_log_ratio(&hi, bits) <= 0 {
            hi *= 2u32;
        }
        let x2 = bisect(&xm, &hi, bits, |x| self.derivative_log_ratio(x, bits) > 0);
        // left root
        let mut lo = Float::with_val(bits, &xm / 2u32);
        while self.derivative_log_ratio(&lo, bits) <= 0 {
            lo /= 2u32;
        }
        let x1 = bisect(&xm, &lo, bits, |x| self.derivative_log_ratio(x, bits) > 0);
        Some((x1, x2))
    }
}

/// Bisection between `bad` (predicate false) and `good` (predicate true);
/// returns the `good` side of the final bracket.
fn bisect(bad: &Float, good: &Float, bits: u32, pred: impl Fn(&Float) -> bool) -> Float {
    let mut bad = Float::with_val(bits, bad);
    let mut good = Float::with_val(bits, good);
    for _ in 0..bits + 8 {
        let mid = Float::with_val(bits, &bad + &good) / 2u32;
        if mid == bad || mid == good {
            break;
        }
        if pred(&mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Minimal integer `N >= floor` with `phi(x) > 0` for all real `x >= N`,
/// together with the evidence for that claim.
#[derive(Debug, Clone, Serialize)]
pub struct SearchCertificate {
    #[serde(serialize_with = "ser_integer")]
    pub value: Integer,
    #[serde(serialize_with = "ser_integer")]
    pub floor: Integer,
    /// Inequality holds at `value` and `phi` is increasing from `monotone_from`.
    pub holds_at_value: bool,
    /// Some `x >= value - 1` violates the inequality (or `value == floor`).
    pub fails_below: bool,
    pub floor_binding: bool,
    /// `phi' > 0` on `[monotone_from, inf)`.
    pub monotone_from: String,
    pub phi_at_value: String,
    pub phi_below: Option<String>,
    /// A point `>= value - 1` where the inequality fails.
    pub violation_witness: Option<String>,
    pub precision_bits: u32,
}

fn ser_integer<S: serde::Serializer>(v: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Options shared by the threshold searches.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub cap: Integer,
    pub ctx: PrecisionContext,
}

impl SearchOptions {
    pub fn with_cap_exponent(exponent: u32, ctx: PrecisionContext) -> Self {
        Self {
            cap: Integer::from(10).pow(exponent),
            ctx,
        }
    }
}

pub const DEFAULT_D_CAP_EXPONENT: u32 = 64;
pub const DEFAULT_K_CAP_EXPONENT: u32 = 300;

/// Find the least integer `N >= floor` such that the inequality holds for all
/// reals `x >= N`.
pub fn certified_threshold(
    ineq: &ThresholdInequality,
    floor: &Integer,
    opts: &SearchOptions,
) -> Result<SearchCertificate> {
    ineq.validate()?;
    let ctx = &opts.ctx;
    let critical = ineq.critical_points(ctx);
    // Below `gate` the predicate is false: the decreasing branch still has a
    // nonpositive point ahead of it.
    let gate = match &critical {
        Some((_, x2)) => {
            if ineq.sign_at(x2, ctx)? == Ordering::Greater {
                None
            } else {
                Some(Float::with_val(x2.prec(), x2.ceil_ref()).to_integer().expect("finite"))
            }
        }
        None => None,
    };
    let holds = |n: &Integer| -> Result<bool> {
        if let Some(g) = &gate {
            if n < g {
                return Ok(false);
            }
        }
        Ok(ineq.sign_at_integer(n, ctx)? == Ordering::Greater)
    };

    let mut lo = floor.clone();
    let value = if holds(&lo)? {
        lo
    } else {
        let mut hi = Integer::from(&lo * 2u32).max(Integer::from(2));
        loop {
            if hi > opts.cap {
                // the cap itself may still satisfy the predicate
                if holds(&opts.cap)? {
                    hi = opts.cap.clone();
                    break;
                }
                return Err(Error::NoSolutionBelowCap {
                    cap: opts.cap.to_string(),
                });
            }
            if holds(&hi)? {
                break;
            }
            lo = hi.clone();
            hi *= 2u32;
        }
        // invariant: !holds(lo), holds(hi)
        while Integer::from(&hi - &lo) > 1 {
            let mid = Integer::from(&lo + &hi) >> 1u32;
            if holds(&mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    let bits = ctx.bits.max(value.significant_bits() + 64);
    let value_f = Float::with_val(bits, &value);
    let phi_value = ineq.value(&value_f, &PrecisionContext::new(bits));
    let monotone_from = match &critical {
        Some((x1, x2)) => {
            if gate.is_some() {
                x2.clone()
            } else {
                // positive branch: increasing up to x1, positive afterwards
                Float::with_val(x1.prec(), x1)
            }
        }
        None => Float::with_val(ctx.bits, 0u32),
    };
    let floor_binding = &value == floor;
    let (phi_below, witness, fails_below) = if floor_binding {
        (None, None, true)
    } else {
        let below = Integer::from(&value - 1u32);
        let below_f = Float::with_val(bits, &below);
        let sign = ineq.sign_at_integer(&below, ctx)?;
        let phi_b = ineq.value(&below_f, &PrecisionContext::new(bits));
        if sign != Ordering::Greater {
            (Some(ctx.to_decimal(&phi_b)), Some(below.to_string()), true)
        } else {
            // the failure sits at the bottom of the decreasing branch
            let x2 = &critical.as_ref().expect("gate implies critical points").1;
            let fails = ineq.sign_at(x2, ctx)? != Ordering::Greater && *x2 >= below_f;
            (Some(ctx.to_decimal(&phi_b)), Some(ctx.to_decimal(x2)), fails)
        }
    };
    let holds_at_value = phi_value > 0
        && match &critical {
            Some(_) if gate.is_some() => value_f >= monotone_from,
            _ => true,
        };
    Ok(SearchCertificate {
        value,
        floor: floor.clone(),
        holds_at_value,
        fails_below,
        floor_binding,
        monotone_from: ctx.to_decimal(&monotone_from),
        phi_at_value: ctx.to_decimal(&phi_value),
        phi_below,
        violation_witness: witness,
        precision_bits: bits,
    })
}

/// Least `D >= 2` with `(eps0/12) sqrt(x) > 2 arsinh(eps0 x/2) + d + 2 eps0`
/// for all `x >= D`.
pub fn find_d(eps0: &Float, d_eps0: &Float, opts: &SearchOptions) -> Result<SearchCertificate> {
    let ineq = ThresholdInequality::thin_part(eps0, d_eps0, &opts.ctx);
    certified_threshold(&ineq, &Integer::from(2), opts)
}

/// Least `K >= D` with `2 arsinh(k) + d + 1 < (eps/h) k^(1/5)` for all `k >= K`.
pub fn find_k(
    eps: &Float,
    h_max: &Float,
    d1: &Float,
    floor_d: &Integer,
    opts: &SearchOptions,
) -> Result<SearchCertificate> {
    if *floor_d < 2 {
        return Err(Error::InvalidInput("floor_D must be at least 2".into()));
    }
    let ineq = ThresholdInequality::fifth_root(eps, h_max, d1, &opts.ctx);
    certified_threshold(&ineq, floor_d, opts)
}

/// Least `K >= 2` with `2 arsinh(k) + d + 1 < (eps/12) sqrt(k)` for all `k >= K`.
pub fn direct_k(eps: &Float, d1: &Float, opts: &SearchOptions) -> Result<SearchCertificate> {
    let ineq = ThresholdInequality::square_root(eps, d1, &opts.ctx);
    certified_threshold(&ineq, &Integer::from(2), opts)
}

/// Explicit geometric data of a surface.
#[derive(Debug, Clone)]
pub struct ExplicitSurface {
    /// Length of the longest embedded horocycle.
    pub h_max: Float,
    pub systole: Float,
    /// Shortest orthogonal self-distance of a length-one horocycle.
    pub d1: Float,
    /// Largest shortest orthogonal self-distance over the boundary
    /// components of the `eps0`-thin part.
    pub d_eps0: Float,
}

/// The class of surfaces of genus `g` with `n` cusps and systole at least
/// `systole_floor`.
#[derive(Debug, Clone)]
pub struct TopologicalClass {
    pub g: u32,
    pub n: u32,
    pub systole_floor: Float,
}

#[derive(Debug, Clone)]
pub enum SurfaceDescription {
    Explicit(ExplicitSurface),
    Topological(TopologicalClass),
}

impl SurfaceDescription {
    /// The thrice punctured sphere: `h = 4`, systole `2 arcosh 3`,
    /// `d1 = 2 log 4`, and `d_eps0` from the pants formula at the thin-part
    /// boundary horocycle.
    pub fn thrice_punctured_sphere(ctx: &PrecisionContext) -> Result<Self> {
        let h_max = ctx.float(adams_bound(0, 3)?);
        let systole = ctx.float(3u32).acosh() * 2u32;
        let d1 = ctx.float(4u32).ln() * 2u32;
        let (_, eps0) = thin_constants(&h_max, &systole, 5, ctx);
        let boundary = thin_boundary_horocycle(&eps0, ctx)?;
        let d_eps0 = (ctx.float(4u32) / boundary).ln() * 2u32;
        Ok(Self::Explicit(ExplicitSurface {
            h_max,
            systole,
            d1,
            d_eps0,
        }))
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Explicit(s) => {
                for (name, v) in [
                    ("h_max", &s.h_max),
                    ("systole", &s.systole),
                    ("d1", &s.d1),
                    ("d_eps0", &s.d_eps0),
                ] {
                    if !(*v > 0) {
                        return Err(Error::InvalidInput(format!("{name} must be positive")));
                    }
                }
                Ok(())
            }
            Self::Topological(t) => {
                if !(t.systole_floor > 0) {
                    return Err(Error::InvalidInput("systole floor must be positive".into()));
                }
                adams_bound(t.g, t.n).map(|_| ())
            }
        }
    }
}

fn thin_constants(h_max: &Float, systole: &Float, systole_divisor: u32, ctx: &PrecisionContext) -> (Float, Float) {
    let h0 = Float::with_val(ctx.bits, h_max * 30u32).recip();
    let a = Float::with_val(ctx.bits, &h0 / 5u32);
    let b = Float::with_val(ctx.bits, systole / systole_divisor);
    let eps0 = if a <= b { a } else { b };
    (h0, eps0)
}

/// `(h0, eps0)` with `h0 = 1/(30 h)`. The systole enters as `s/5` for an
/// explicit surface and as `s/2` for a topological class.
pub fn derive_thin_constants(s: &SurfaceDescription, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    s.validate()?;
    Ok(match s {
        SurfaceDescription::Explicit(e) => thin_constants(&e.h_max, &e.systole, 5, ctx),
        SurfaceDescription::Topological(t) => {
            let h = ctx.float(adams_bound(t.g, t.n)?);
            thin_constants(&h, &t.systole_floor, 2, ctx)
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BasmajianValue {
    pub k: u64,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectThreshold {
    pub eps: String,
    pub eps_expression: &'static str,
    pub certificate: SearchCertificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TopologicalBounds {
    pub g: u32,
    pub n: u32,
    pub systole_floor: String,
    #[serde(rename = "L_bers")]
    pub l_bers: String,
    pub h_adams: u64,
    pub d1_bound: String,
    pub thin_boundary_horocycle: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Expression {
    pub field: &'static str,
    pub definition: &'static str,
}

/// Every derived constant of a surface description.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    pub mode: &'static str,
    pub precision_bits: u32,
    pub h_max: String,
    pub systole: String,
    pub h0: String,
    pub eps0: String,
    pub eps0_systole_divisor: u32,
    pub d_eps0: String,
    pub d_used: String,
    #[serde(rename = "D")]
    pub d: SearchCertificate,
    pub eps: String,
    #[serde(rename = "K")]
    pub k: SearchCertificate,
    pub direct_k_thick: DirectThreshold,
    pub direct_k_pipeline: DirectThreshold,
    pub basmajian: Vec<BasmajianValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub topological: Option<TopologicalBounds>,
    pub expressions: Vec<Expression>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub ctx: PrecisionContext,
    pub d_cap_exponent: u32,
    pub k_cap_exponent: u32,
    pub basmajian_ks: Vec<u64>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            ctx: PrecisionContext::default(),
            d_cap_exponent: DEFAULT_D_CAP_EXPONENT,
            k_cap_exponent: DEFAULT_K_CAP_EXPONENT,
            basmajian_ks: Vec::new(),
        }
    }
}

/// Exact float values behind a [`ConstantsReport`], for callers that need to
/// recheck identities.
#[derive(Debug, Clone)]
pub struct PipelineValues {
    pub h_max: Float,
    pub systole: Float,
    pub h0: Float,
    pub eps0: Float,
    pub d_eps0: Float,
    pub d1: Float,
    pub eps: Float,
    pub eps_thick: Float,
}

pub fn run_pipeline(s: &SurfaceDescription, opts: &PipelineOptions) -> Result<(ConstantsReport, PipelineValues)> {
    let ctx = &opts.ctx;
    let (h0, eps0) = derive_thin_constants(s, ctx)?;
    let mut notes = Vec::new();
    let (mode, h_max, systole, d1, d_eps0, divisor, topo) = match s {
        SurfaceDescription::Explicit(e) => (
            "explicit",
            e.h_max.clone(),
            e.systole.clone(),
            e.d1.clone(),
            e.d_eps0.clone(),
            5,
            None,
        ),
        SurfaceDescription::Topological(t) => {
            let l_bers = bers_bound(t.g, t.n, ctx)?;
            let h_adams = adams_bound(t.g, t.n)?;
            let boundary = thin_boundary_horocycle(&eps0, ctx)?;
            let d_eps0 = orthogonal_distance_bound(&boundary, t.g, t.n, ctx)?;
            let d1 = orthogonal_distance_bound(&ctx.float(1u32), t.g, t.n, ctx)?;
            notes.push(
                "topological mode bounds the systole term of eps0 by s/2; explicit mode uses s/5".to_string(),
            );
            let bounds = TopologicalBounds {
                g: t.g,
                n: t.n,
                systole_floor: ctx.to_decimal(&t.systole_floor),
                l_bers: ctx.to_decimal(&l_bers),
                h_adams,
                d1_bound: ctx.to_decimal(&d1),
                thin_boundary_horocycle: ctx.to_decimal(&boundary),
            };
            (
                "topological",
                ctx.float(h_adams),
                t.systole_floor.clone(),
                d1,
                d_eps0,
                2,
                Some(bounds),
            )
        }
    };

    let d_opts = SearchOptions::with_cap_exponent(opts.d_cap_exponent, *ctx);
    let k_opts = SearchOptions::with_cap_exponent(opts.k_cap_exponent, *ctx);
    let d = find_d(&eps0, &d_eps0, &d_opts)?;
    let eps = Float::with_val(ctx.bits, &eps0 / Float::with_val(ctx.bits, Integer::from(&d.value * 10u32)));
    let k = find_k(&eps, &h_max, &d1, &d.value, &k_opts)?;

    let quarter = ctx.float(0.25);
    let half_systole = Float::with_val(ctx.bits, &systole / 2u32);
    let eps_thick = if quarter <= half_systole { quarter } else { half_systole };
    let direct_k_thick = DirectThreshold {
        eps: ctx.to_decimal(&eps_thick),
        eps_expression: "min(1/4, s/2)",
        certificate: direct_k(&eps_thick, &d1, &k_opts)?,
    };
    let direct_k_pipeline = DirectThreshold {
        eps: ctx.to_decimal(&eps),
        eps_expression: "eps0 / (10 D)",
        certificate: direct_k(&eps, &d1, &k_opts)?,
    };
    if k.floor_binding {
        notes.push("K equals its lower limit D; minimality below D is not asserted".to_string());
    }

    let basmajian = opts
        .basmajian_ks
        .iter()
        .map(|&k| {
            basmajian_bound(k, &d1, ctx).map(|v| BasmajianValue {
                k,
                value: ctx.to_decimal(&v),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let expressions = vec![
        Expression { field: "h0", definition: "1 / (30 h_max)" },
        Expression {
            field: "eps0",
            definition: if divisor == 5 { "min(h0/5, s/5)" } else { "min(h0/5, s/2)" },
        },
        Expression {
            field: "D",
            definition: "least D >= 2 with (eps0/12) sqrt(x) > 2 arsinh(eps0 x/2) + d_eps0 + 2 eps0 for all x >= D",
        },
        Expression { field: "eps", definition: "eps0 / (10 D)" },
        Expression {
            field: "K",
            definition: "least K >= D with 2 arsinh(k) + d_used + 1 < (eps/h_max) k^(1/5) for all k >= K",
        },
        Expression {
            field: "direct_k",
            definition: "least K >= 2 with 2 arsinh(k) + d_used + 1 < (eps/12) sqrt(k) for all k >= K",
        },
        Expression { field: "C(k)", definition: "2 arsinh(k) + d_used + 1" },
    ];

    let report = ConstantsReport {
        mode,
        precision_bits: ctx.bits,
        h_max: ctx.to_decimal(&h_max),
        systole: ctx.to_decimal(&systole),
        h0: ctx.to_decimal(&h0),
        eps0: ctx.to_decimal(&eps0),
        eps0_systole_divisor: divisor,
        d_eps0: ctx.to_decimal(&d_eps0),
        d_used: ctx.to_decimal(&d1),
        d,
        eps: ctx.to_decimal(&eps),
        k,
        direct_k_thick,
        direct_k_pipeline,
        basmajian,
        topological: topo,
        expressions,
        notes,
    };
    let values = PipelineValues {
        h_max,
        systole,
        h0,
        eps0,
        d_eps0,
        d1,
        eps,
        eps_thick,
    };
    Ok((report, values))
}

/// Round a float up to an integer (used by tests and callers that sample
/// beyond a threshold).
pub fn ceil_to_integer(x: &Float) -> Integer {
    Float::with_val(x.prec(), x.ceil_ref())
        .to_integer()
        .expect("finite float")
}
