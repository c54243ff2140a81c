//! Geodesic arcs inside a cusp neighbourhood.
//!
//! A strand enters the cusp neighbourhood bounded by a horocycle of length
//! `h`, winds around the cusp and leaves again. Its length `l`, the level `h`
//! and its winding number are tied together by `(2/h) sinh(l/2)`.

use rug::{Float, Integer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// A cusp neighbourhood bounded by a horocycle of length `h`, inside the
/// maximal embedded one of length `h_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspNeighborhood {
    pub h: Float,
    pub h_max: Float,
}

impl CuspNeighborhood {
    /// Accepts `0 < h <= h_max`; whether the boundary horocycle `h == h_max`
    /// is embedded is left to the caller.
    pub fn new(h: Float, h_max: Float) -> Result<Self> {
        if !(h > 0) || h > h_max {
            return Err(Error::InvalidLevels(format!(
                "need 0 < h <= h_max, got h = {}, h_max = {}",
                h.to_f64(),
                h_max.to_f64()
            )));
        }
        Ok(Self { h, h_max })
    }

    pub fn strand(&self, length: Float, ctx: &PrecisionContext) -> Result<Strand> {
        Strand::from_length(self.h.clone(), length, ctx)
    }
}

/// A strand at level `h` with its length and winding number.
#[derive(Debug, Clone, PartialEq)]
pub struct Strand {
    h: Float,
    length: Float,
    winding: u64,
}

impl Strand {
    pub fn from_length(h: Float, length: Float, ctx: &PrecisionContext) -> Result<Self> {
        let winding = winding_number(&h, &length, ctx)?;
        Ok(Self { h, length, winding })
    }

    pub fn h(&self) -> &Float {
        &self.h
    }

    pub fn length(&self) -> &Float {
        &self.length
    }

    pub fn winding(&self) -> u64 {
        self.winding
    }
}

/// `(2/h) sinh(l/2)`, the horizontal extent of a lifted strand measured in
/// units of the cusp translation.
pub fn winding_argument(h: &Float, length: &Float, ctx: &PrecisionContext) -> Float {
    let half = Float::with_val(ctx.bits, length / 2u32);
    half.sinh() * 2u32 / h
}

/// Winding number `floor((2/h) sinh(l/2))`.
///
/// The argument is evaluated with twice the working precision. When it lies
/// within `2^-(bits-10)` (relative) of an integer it is taken to be that
/// integer: the inputs are only known to the working precision, and the
/// boundary configuration is counted as the integer itself.
pub fn winding_number(h: &Float, length: &Float, ctx: &PrecisionContext) -> Result<u64> {
    if !(*h > 0) {
        return Err(Error::InvalidLevels("h must be positive".into()));
    }
    if *length < 0 {
        return Err(Error::InvalidInput("strand length must be non-negative".into()));
    }
    let wide = ctx.doubled();
    let x = winding_argument(&Float::with_val(wide.bits, h), &Float::with_val(wide.bits, length), &wide);
    let nearest = Float::with_val(wide.bits, x.round_ref());
    let gap = Float::with_val(wide.bits, &x - &nearest).abs();
    let mut band = Float::with_val(wide.bits, 1u32) >> (ctx.bits as i32 - 10);
    if x > 1 {
        band *= &x;
    }
    let floor = if gap <= band {
        nearest
    } else {
        Float::with_val(wide.bits, x.floor_ref())
    };
    let omega = floor
        .to_integer()
        .and_then(|i| i.to_u64())
        .ok_or_else(|| Error::InvalidInput("winding number out of range".into()))?;
    if omega == 0 {
        return Err(Error::NotAStrand);
    }
    Ok(omega)
}

pub fn strand_self_intersections(strand: &Strand) -> u64 {
    strand.winding - 1
}

/// Length window `[2 arsinh(h(w-1)/2), 2 arsinh(h w/2)]` for winding `w`.
pub fn strand_length_bounds(h: &Float, winding: u64, ctx: &PrecisionContext) -> Result<(Float, Float)> {
    if !(*h > 0) {
        return Err(Error::InvalidLevels("h must be positive".into()));
    }
    if winding == 0 {
        return Err(Error::InvalidInput("winding number must be at least 1".into()));
    }
    let bound = |w: u64| {
        let arg = Float::with_val(ctx.bits, h * w) / 2u32;
        arg.asinh() * 2u32
    };
    Ok((bound(winding - 1), bound(winding)))
}

/// `2 arcosh(h / h0)`: the length of the strand at level `h` that is tangent
/// to the horocycle of length `h0`. Longer strands enter the deeper
/// neighbourhood.
pub fn depth_threshold(h: &Float, h0: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(*h0 > 0) || h0 >= h {
        return Err(Error::InvalidLevels(format!(
            "need 0 < h0 < h, got h = {}, h0 = {}",
            h.to_f64(),
            h0.to_f64()
        )));
    }
    let ratio = Float::with_val(ctx.bits, h / h0);
    Ok(ratio.acosh() * 2u32)
}

/// `2 arsinh((1/h - 1)/6)`: how much longer a level-1 strand is than a
/// level-`h` strand with the same winding `w >= 1/h`, for `0 < h < 1/10`.
pub fn level_comparison_gap(h: &Float, winding: u64, ctx: &PrecisionContext) -> Result<Float> {
    let tenth = Float::with_val(ctx.bits, 1u32) / 10u32;
    if !(*h > 0) || *h >= tenth {
        return Err(Error::HypothesisViolated("need 0 < h < 1/10".into()));
    }
    let inv = Float::with_val(ctx.bits, 1u32) / h;
    if Float::with_val(ctx.bits, winding) < inv {
        return Err(Error::HypothesisViolated("need winding >= 1/h".into()));
    }
    let arg = (inv - 1u32) / 6u32;
    Ok(arg.asinh() * 2u32)
}

/// Upper bound `sum_i (2(n-i)+1) w_i - n` on the total intersection number
/// of `n >= 2` strands in one cusp, windings sorted ascending.
pub fn multi_strand_bound(windings: &[u64]) -> Result<Integer> {
    let n = windings.len();
    if n < 2 {
        return Err(Error::TooFewStrands);
    }
    if windings.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Unsorted);
    }
    if windings.contains(&0) {
        return Err(Error::InvalidInput("winding numbers must be at least 1".into()));
    }
    let mut total = Integer::new();
    for (idx, &w) in windings.iter().enumerate() {
        let i = idx as u64 + 1;
        total += Integer::from(2 * (n as u64 - i) + 1) * w;
    }
    Ok(total - n as u64)
}

/// Brute-force winding count in the half-plane picture.
///
/// The cusp sits at infinity with stabiliser `z -> z + 1`, so the horocycle of
/// length `h` is the line at height `1/h`. The strand lifts to the arc above
/// that line of the semicircle of radius `r = cosh(l/2)/h` centred at 0, whose
/// left foot is at `-q` with `q = sqrt(r^2 - 1/h^2)`. The count is the number
/// of `n >= 1` whose translate `-q + n` of the left foot still lies on the arc.
/// Translates are walked one at a time; no floor is taken.
pub fn translate_count(h: &Float, length: &Float, ctx: &PrecisionContext) -> Result<u64> {
    if !(*h > 0) {
        return Err(Error::InvalidLevels("h must be positive".into()));
    }
    let wide = ctx.doubled();
    let level = Float::with_val(wide.bits, h).recip();
    let r = Float::with_val(wide.bits, length / 2u32).cosh() * &level;
    let q = (Float::with_val(wide.bits, r.square_ref()) - level.square()).sqrt();
    let left = Float::with_val(wide.bits, -&q);
    // same closeness convention as `winding_number`
    let mut band = Float::with_val(wide.bits, 1u32) >> (ctx.bits as i32 - 10);
    if q > 1 {
        band *= &q;
    }
    let mut n = 0u64;
    loop {
        let foot = Float::with_val(wide.bits, &left + (n + 1));
        if foot > Float::with_val(wide.bits, &q + &band) {
            return Ok(n);
        }
        n += 1;
    }
}

/// A strand lifted to the half-plane: the part above the horocycle line
/// `Im z = 1/h` of the semicircle with the given centre and radius.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedStrand {
    pub center: Float,
    pub radius: Float,
    pub level: Float,
}

impl LiftedStrand {
    /// The strand at level `h` centred at `center` whose feet on the
    /// horocycle are `extent` apart.
    pub fn from_extent(h: &Float, center: Float, extent: &Float, ctx: &PrecisionContext) -> Result<Self> {
        if !(*h > 0) || !(*extent > 0) {
            return Err(Error::InvalidInput("need h > 0 and a positive extent".into()));
        }
        let level = Float::with_val(ctx.bits, h).recip();
        let half = Float::with_val(ctx.bits, extent / 2u32);
        let radius = (half.square() + Float::with_val(ctx.bits, level.square_ref())).sqrt();
        Ok(Self { center, radius, level })
    }

    /// Horizontal distance between the feet, in units of the cusp translation.
    pub fn extent(&self) -> Float {
        let q = Float::with_val(self.radius.prec(), self.radius.square_ref()) - Float::with_val(self.radius.prec(), self.level.square_ref());
        q.sqrt() * 2u32
    }

    /// Number of times the projected strand goes round the cusp: the number
    /// of fundamental intervals its shadow on the horocycle meets, so
    /// `ceil(extent)`.
    pub fn winding(&self) -> u64 {
        self.extent().ceil().to_integer().and_then(|i| i.to_u64()).unwrap_or(u64::MAX)
    }

    pub fn length(&self) -> Float {
        Float::with_val(self.radius.prec(), &self.radius / &self.level).acosh() * 2u32
    }

    fn translated(&self, n: i64) -> Self {
        Self {
            center: Float::with_val(self.center.prec(), &self.center + n),
            radius: self.radius.clone(),
            level: self.level.clone(),
        }
    }
}

/// Whether two lifted arcs cross transversally strictly above the horocycle.
fn arcs_cross(a: &LiftedStrand, b: &LiftedStrand) -> bool {
    let prec = a.radius.prec().max(b.radius.prec());
    let dc = Float::with_val(prec, &b.center - &a.center);
    let dist = Float::with_val(prec, dc.abs_ref());
    let sum = Float::with_val(prec, &a.radius + &b.radius);
    let diff = Float::with_val(prec, &a.radius - &b.radius).abs();
    // endpoints on the real line must interlace
    if !(dist > diff && dist < sum) {
        return false;
    }
    // crossing point: subtract the two circle equations
    let ra2 = Float::with_val(prec, a.radius.square_ref());
    let rb2 = Float::with_val(prec, b.radius.square_ref());
    let ca2 = Float::with_val(prec, a.center.square_ref());
    let cb2 = Float::with_val(prec, b.center.square_ref());
    let x = (ra2.clone() - rb2 + cb2 - ca2) / (dc * 2u32);
    let dx = Float::with_val(prec, &x - &a.center);
    let y2 = ra2 - dx.square();
    y2 > Float::with_val(prec, a.level.square_ref())
}

/// Crossings in the cusp neighbourhood between the projections of two lifted
/// strands, counted over all translates. With `same` set the two arguments
/// are one strand and each self-intersection is counted once.
pub fn lifted_crossings(a: &LiftedStrand, b: &LiftedStrand, same: bool) -> u64 {
    let prec = a.radius.prec().max(b.radius.prec());
    let reach = Float::with_val(prec, &a.radius + &b.radius) + Float::with_val(prec, &b.center - &a.center).abs() + 1u32;
    let bound = reach.ceil().to_f64() as i64;
    let lo = if same { 1 } else { -bound };
    (lo..=bound).filter(|&n| arcs_cross(a, &b.translated(n))).count() as u64
}

/// Total intersection number of a family of strands in one cusp: pairwise
/// crossings plus self-intersections.
pub fn lifted_family_crossings(strands: &[LiftedStrand]) -> u64 {
    let mut total = 0;
    for (i, a) in strands.iter().enumerate() {
        total += lifted_crossings(a, a, true);
        for b in &strands[i + 1..] {
            total += lifted_crossings(a, b, false);
        }
    }
    total
}

/// Summary of a strand query, used by the command line front end.
#[derive(Debug, Clone, Serialize)]
pub struct StrandReport {
    pub h: String,
    pub length: String,
    pub winding: u64,
    pub self_intersections: u64,
}

impl StrandReport {
    pub fn new(strand: &Strand, ctx: &PrecisionContext) -> Self {
        Self {
            h: ctx.to_decimal(strand.h()),
            length: ctx.to_decimal(strand.length()),
            winding: strand.winding(),
            self_intersections: strand_self_intersections(strand),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn f(x: f64) -> Float {
        Float::with_val(128, x)
    }

    fn two_arsinh(x: f64) -> Float {
        Float::with_val(128, x).asinh() * 2u32
    }

    #[test]
    fn winding_examples() {
        let ctx = ctx();
        assert_eq!(winding_number(&f(1.0), &two_arsinh(1.0), &ctx).unwrap(), 2);
        let s = Strand::from_length(f(1.0), two_arsinh(1.0), &ctx).unwrap();
        assert_eq!(strand_self_intersections(&s), 1);
        assert_eq!(winding_number(&f(1.0), &two_arsinh(0.6), &ctx).unwrap(), 1);
        assert_eq!(
            winding_number(&f(2.0), &two_arsinh(0.5), &ctx),
            Err(Error::NotAStrand)
        );
    }

    #[test]
    fn boundary_counts_as_integer() {
        let ctx = ctx();
        for w in 1..40u64 {
            let h = Float::with_val(128, 3u32) / 7u32;
            let (_, upper) = strand_length_bounds(&h, w, &ctx).unwrap();
            assert_eq!(winding_number(&h, &upper, &ctx).unwrap(), w);
        }
    }

    #[test]
    fn self_intersections_are_winding_minus_one() {
        let ctx = ctx();
        for w in [1u64, 2, 7] {
            let h = f(1.0);
            let (_, upper) = strand_length_bounds(&h, w, &ctx).unwrap();
            let s = Strand::from_length(h, upper, &ctx).unwrap();
            assert_eq!(strand_self_intersections(&s), w - 1);
        }
    }

    #[test]
    fn length_bound_examples() {
        let ctx = ctx();
        let (lo, hi) = strand_length_bounds(&f(1.0), 1, &ctx).unwrap();
        assert!(lo.is_zero());
        assert_eq!(hi, two_arsinh(0.5));
        let (lo, hi) = strand_length_bounds(&f(1.0), 4, &ctx).unwrap();
        assert_eq!(lo, two_arsinh(1.5));
        assert_eq!(hi, two_arsinh(2.0));
    }

    #[test]
    fn depth_threshold_examples() {
        let ctx = ctx();
        let t = depth_threshold(&f(1.0), &f(0.5), &ctx).unwrap();
        assert!((t.to_f64() - 2.633915793849633).abs() < 1e-14);
        let almost = Float::with_val(128, 1u32) - (Float::with_val(128, 1u32) >> 100);
        let t = depth_threshold(&f(1.0), &almost, &ctx).unwrap();
        assert!(t.to_f64() < 1e-14);
        assert!(matches!(depth_threshold(&f(1.0), &f(1.0), &ctx), Err(Error::InvalidLevels(_))));
        assert!(matches!(depth_threshold(&f(1.0), &f(2.0), &ctx), Err(Error::InvalidLevels(_))));
    }

    #[test]
    fn level_gap_examples() {
        let ctx = ctx();
        let h = Float::with_val(128, 1u32) / 15u32;
        let gap = level_comparison_gap(&h, 15, &ctx).unwrap();
        assert!((gap.to_f64() - 2.0 * (14.0f64 / 6.0).asinh()).abs() < 1e-14);
        assert!((gap.to_f64() - 3.16697801321).abs() < 1e-10);
        let tenth = Float::with_val(128, 1u32) / 10u32;
        assert!(matches!(
            level_comparison_gap(&tenth, 100, &ctx),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            level_comparison_gap(&h, 14, &ctx),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn multi_strand_examples() {
        assert_eq!(multi_strand_bound(&[1, 1]).unwrap(), 2);
        assert_eq!(multi_strand_bound(&[2, 5]).unwrap(), 9);
        assert_eq!(multi_strand_bound(&[1, 2, 3]).unwrap(), 5 + 6 + 3 - 3);
        assert_eq!(multi_strand_bound(&[3]), Err(Error::TooFewStrands));
        assert_eq!(multi_strand_bound(&[5, 2]), Err(Error::Unsorted));
    }

    #[test]
    fn translate_count_examples() {
        let ctx = ctx();
        assert_eq!(translate_count(&f(1.0), &two_arsinh(1.0), &ctx).unwrap(), 2);
        assert_eq!(translate_count(&f(1.0), &two_arsinh(0.6), &ctx).unwrap(), 1);
        assert_eq!(translate_count(&f(2.0), &two_arsinh(0.5), &ctx).unwrap(), 0);
        assert_eq!(translate_count(&f(0.5), &two_arsinh(3.3), &ctx).unwrap(), 13);
    }

    #[test]
    fn lifted_self_crossings_are_winding_minus_one() {
        let ctx = ctx();
        let h = f(0.7);
        for extent in [0.4, 1.3, 2.9, 5.01] {
            let s = LiftedStrand::from_extent(&h, f(0.25), &f(extent), &ctx).unwrap();
            assert_eq!(lifted_crossings(&s, &s, true), s.winding() - 1, "extent {extent}");
            // the lift's length reproduces the extent through the winding argument
            let back = winding_argument(&h, &s.length(), &ctx);
            assert!((back.to_f64() - extent).abs() < 1e-20);
        }
    }

    #[test]
    fn disjoint_short_strands_do_not_cross() {
        let ctx = ctx();
        let h = f(1.0);
        let a = LiftedStrand::from_extent(&h, f(0.2), &f(0.3), &ctx).unwrap();
        let b = LiftedStrand::from_extent(&h, f(0.7), &f(0.3), &ctx).unwrap();
        assert_eq!(lifted_crossings(&a, &b, false), 0);
        assert_eq!(lifted_family_crossings(&[a, b]), 0);
    }

    #[test]
    fn cusp_neighborhood_levels() {
        assert!(CuspNeighborhood::new(f(2.0), f(2.0)).is_ok());
        assert!(CuspNeighborhood::new(f(2.5), f(2.0)).is_err());
        assert!(CuspNeighborhood::new(f(0.0), f(2.0)).is_err());
    }
}
