//! Self-intersection numbers of closed geodesics on the thrice punctured
//! sphere `H / Gamma(2)`.
//!
//! Transverse self-intersection points of the closed geodesic of a primitive
//! hyperbolic `w` correspond to unordered pairs `{<w>g<w>, <w>g^-1<w>}` of
//! double cosets with `g` outside `<w>` whose translated axis `g.Axis(w)`
//! crosses `Axis(w)`. The engine enumerates candidates `g`, tests the
//! crossing exactly with integer arithmetic, and counts distinct canonical
//! double-coset keys.
//!
//! Candidates come either from the full Cayley ball of radius `R`
//! ([`SearchMode::Exhaustive`]), or from products `P_i P_j^-1` of prefixes of
//! `w` ([`SearchMode::Corridor`]). The second set suffices: the fundamental
//! domain below is dual to the Cayley tree, so two crossing axes pass through a
//! common tile, i.e. their tree axes share a vertex `w^m P_i = g w^m' P_j`.
//!
//! [`crossing_oracle`] is an independent floating point count obtained by
//! cutting one period of the geodesic along the ideal quadrilateral with
//! vertices `inf, -1, 0, 1`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use rug::Float;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moebius::{axes_cross, Axis};
use crate::precision::PrecisionContext;
use crate::words::{
    evaluate, inverse_word, letters_to_string, reduced_product, signed_matrix, CyclicWord, Letter,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    Corridor,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntersectionConfig {
    /// First ball radius examined; defaults to `max(1, 2|w| - 2)`.
    pub start_radius: Option<usize>,
    /// Largest radius examined; defaults to `start + 2`.
    pub max_radius: Option<usize>,
    pub mode: SearchMode,
}

impl IntersectionConfig {
    pub fn exhaustive(start_radius: usize, max_radius: usize) -> Self {
        Self {
            start_radius: Some(start_radius),
            max_radius: Some(max_radius),
            mode: SearchMode::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionResult {
    pub count: u64,
    pub radius_used: usize,
    /// The count agreed at `radius_used`, `radius_used + 1` and `radius_used + 2`.
    pub certified: bool,
    pub mode: SearchMode,
    /// Largest `(p, q)` window needed while canonicalising keys.
    pub key_window: usize,
    /// `(radius, count)` for every radius examined.
    pub counts: Vec<(usize, u64)>,
}

/// Canonical representative of `<w>g<w>` together with `<w>g^-1<w>`: the
/// shortest words `w^p g w^q` (and their inverses), least in the order
/// `a < A < b < B` among those.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoubleCosetKey {
    letters: Vec<Letter>,
}

impl DoubleCosetKey {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for DoubleCosetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&letters_to_string(&self.letters))
    }
}

impl Serialize for DoubleCosetKey {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn shortlex(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Powers `w^p` for `-max..=max`, indexed by `p + max`.
fn powers(w: &[Letter], max: usize) -> Vec<Vec<Letter>> {
    let inv = inverse_word(w);
    let mut out = Vec::with_capacity(2 * max + 1);
    for p in -(max as i64)..=(max as i64) {
        let unit = if p < 0 { &inv } else { &w.to_vec() };
        out.push(unit.repeat(p.unsigned_abs() as usize));
    }
    out
}

/// `g` lies in `<w>` exactly when it is a power of `w` as a reduced word
/// (`w` is cyclically reduced, so its powers are reduced).
fn in_cyclic_subgroup(g: &[Letter], w: &[Letter]) -> bool {
    let n = w.len();
    if g.is_empty() {
        return true;
    }
    if !g.len().is_multiple_of(n) {
        return false;
    }
    let m = g.len() / n;
    g == w.repeat(m).as_slice() || g == inverse_word(w).repeat(m).as_slice()
}

/// Canonical key of `<w>g<w>` and the `(p, q)` window that certified it.
///
/// `|w^p g w^q|` is the tree distance between a point moving along the axis
/// of `w` and one moving along its translate by `g`. That function of
/// `(p, q)` is convex and `|w|`-Lipschitz in each coordinate, so once every
/// point on the boundary ring of the window exceeds the interior minimum by
/// more than `|w|/2`, all minimisers lie inside the window.
pub fn double_coset_key_with_window(g: &[Letter], w: &CyclicWord) -> Result<(DoubleCosetKey, usize)> {
    if g.is_empty() {
        return Err(Error::InvalidWord("g must be nonempty".into()));
    }
    if reduced_product(&[g]).len() != g.len() {
        return Err(Error::InvalidWord(format!("{} is not reduced", letters_to_string(g))));
    }
    let wl = w.letters();
    let n = wl.len();
    if in_cyclic_subgroup(g, wl) {
        return Err(Error::InCyclicSubgroup);
    }
    let mut window = g.len().div_ceil(n) + 1;
    loop {
        let pw = powers(wl, window);
        let mut best: Option<Vec<Letter>> = None;
        let mut ring_min = usize::MAX;
        let side = 2 * window + 1;
        for i in 0..side {
            for j in 0..side {
                let word = reduced_product(&[&pw[i], g, &pw[j]]);
                if word.is_empty() {
                    return Err(Error::InCyclicSubgroup);
                }
                if i == 0 || j == 0 || i == side - 1 || j == side - 1 {
                    ring_min = ring_min.min(word.len());
                }
                match &best {
                    Some(b) if shortlex(&word, b).is_ge() => {}
                    _ => best = Some(word),
                }
            }
        }
        let best = best.expect("window is nonempty");
        if 2 * ring_min > 2 * best.len() + n {
            // Every minimiser is inside; collect them all for the inverse side.
            let mut inverse_best: Option<Vec<Letter>> = None;
            for i in 0..side {
                for j in 0..side {
                    let word = reduced_product(&[&pw[i], g, &pw[j]]);
                    if word.len() == best.len() {
                        let inv = inverse_word(&word);
                        match &inverse_best {
                            Some(b) if inv >= *b => {}
                            _ => inverse_best = Some(inv),
                        }
                    }
                }
            }
            let inverse_best = inverse_best.expect("minimiser present");
            let letters = best.min(inverse_best);
            return Ok((DoubleCosetKey { letters }, window));
        }
        window += 1;
    }
}

pub fn double_coset_key(g: &[Letter], w: &CyclicWord) -> Result<DoubleCosetKey> {
    double_coset_key_with_window(g, w).map(|(k, _)| k)
}

fn check_input(w: &CyclicWord) -> Result<Axis> {
    if !w.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let m = evaluate(w);
    if !m.is_hyperbolic() {
        return Err(Error::NotHyperbolic(w.to_string()));
    }
    m.axis()
}

/// Test one candidate; `Ok(None)` when its translated axis does not cross.
fn crossing_key(g: &[Letter], w: &CyclicWord, axis: &Axis) -> Result<Option<(DoubleCosetKey, usize)>> {
    let image = signed_matrix(g).to_element().push_axis(axis);
    if image == *axis {
        return Ok(None);
    }
    if !axes_cross(axis, &image)? {
        return Ok(None);
    }
    double_coset_key_with_window(g, w).map(Some)
}

fn corridor_keys(w: &CyclicWord, axis: &Axis) -> Result<Vec<(DoubleCosetKey, usize)>> {
    let wl = w.letters();
    let n = wl.len();
    let mut candidates = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let pi = &wl[..i];
                let pj_inv = inverse_word(&wl[..j]);
                candidates.insert(reduced_product(&[pi, &pj_inv]));
            }
        }
    }
    let found: Vec<Option<(DoubleCosetKey, usize)>> = candidates
        .into_par_iter()
        .map(|g| crossing_key(&g, w, axis))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// All reduced words of exactly `len` letters, in lexicographic order.
fn reduced_words(len: usize) -> Vec<Vec<Letter>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out: Vec<Vec<Letter>> = Letter::ALL.iter().map(|&l| vec![l]).collect();
    for _ in 1..len {
        let mut next = Vec::with_capacity(out.len() * 3);
        for word in &out {
            let last = *word.last().expect("nonempty");
            for l in Letter::ALL {
                if l != last.inverse() {
                    let mut v = word.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out
}

fn sphere_keys(w: &CyclicWord, axis: &Axis, radius: usize) -> Result<Vec<(DoubleCosetKey, usize)>> {
    let found: Vec<Option<(DoubleCosetKey, usize)>> = reduced_words(radius)
        .into_par_iter()
        .map(|g| {
            if in_cyclic_subgroup(&g, w.letters()) {
                Ok(None)
            } else {
                crossing_key(&g, w, axis)
            }
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Geometric self-intersection number of the closed geodesic of `w`.
pub fn self_intersection(w: &CyclicWord, config: &IntersectionConfig) -> Result<IntersectionResult> {
    let axis = check_input(w)?;
    let n = w.len();
    let start = config.start_radius.unwrap_or((2 * n).saturating_sub(2).max(1)).max(1);
    let max = config.max_radius.unwrap_or(start + 2).max(start);

    let mut keys: BTreeSet<DoubleCosetKey> = BTreeSet::new();
    let mut window = 0usize;
    let mut absorb = |found: Vec<(DoubleCosetKey, usize)>, keys: &mut BTreeSet<DoubleCosetKey>| {
        for (k, win) in found {
            window = window.max(win);
            keys.insert(k);
        }
    };
    let mut counts: Vec<(usize, u64)> = Vec::new();
    match config.mode {
        SearchMode::Corridor => {
            absorb(corridor_keys(w, &axis)?, &mut keys);
            for r in start..=max {
                let c = keys.iter().filter(|k| k.len() <= r).count() as u64;
                counts.push((r, c));
            }
        }
        SearchMode::Exhaustive => {
            for r in 1..=max {
                absorb(sphere_keys(w, &axis, r)?, &mut keys);
                if r >= start {
                    counts.push((r, keys.len() as u64));
                }
            }
        }
    }

    for (idx, &(r, c)) in counts.iter().enumerate() {
        if idx + 2 < counts.len() && counts[idx + 1].1 == c && counts[idx + 2].1 == c {
            return Ok(IntersectionResult {
                count: c,
                radius_used: r,
                certified: true,
                mode: config.mode,
                key_window: window,
                counts,
            });
        }
    }
    let &(r, c) = counts.last().expect("at least one radius");
    Ok(IntersectionResult {
        count: c,
        radius_used: r,
        certified: false,
        mode: config.mode,
        key_window: window,
        counts,
    })
}

/// The distinct crossing keys found by the corridor search, for inspection.
pub fn crossing_keys(w: &CyclicWord) -> Result<Vec<DoubleCosetKey>> {
    let axis = check_input(w)?;
    let set: BTreeSet<DoubleCosetKey> = corridor_keys(w, &axis)?.into_iter().map(|(k, _)| k).collect();
    Ok(set.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Numeric oracle

/// A geodesic of the upper half-plane with finite endpoints, oriented from
/// `back` to `front`.
#[derive(Debug, Clone)]
struct Chord {
    back: Float,
    front: Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pairing {
    A,
    AInv,
    B,
    BInv,
}

fn apply(p: Pairing, x: &Float) -> Float {
    let prec = x.prec();
    match p {
        Pairing::A => Float::with_val(prec, x + 2u32),
        Pairing::AInv => Float::with_val(prec, x - 2u32),
        // z / (2z + 1)
        Pairing::B => {
            let den = Float::with_val(prec, x * 2u32) + 1u32;
            Float::with_val(prec, x / &den)
        }
        // z / (1 - 2z)
        Pairing::BInv => {
            let den = 1u32 - Float::with_val(prec, x * 2u32);
            Float::with_val(prec, x / &den)
        }
    }
}

fn apply_point(p: Pairing, z: &(Float, Float)) -> (Float, Float) {
    let (x, y) = z;
    let prec = x.prec();
    match p {
        Pairing::A => (Float::with_val(prec, x + 2u32), y.clone()),
        Pairing::AInv => (Float::with_val(prec, x - 2u32), y.clone()),
        Pairing::B | Pairing::BInv => {
            // z / (s z + 1) with s = +-2
            let s: i32 = if p == Pairing::B { 2 } else { -2 };
            let re = Float::with_val(prec, x * s) + 1u32;
            let im = Float::with_val(prec, y * s);
            let den = Float::with_val(prec, re.square_ref()) + Float::with_val(prec, im.square_ref());
            // (x + iy)(re - i im) / den
            let nx = (Float::with_val(prec, x * &re) + Float::with_val(prec, y * &im)) / &den;
            let ny = (Float::with_val(prec, y * &re) - Float::with_val(prec, x * &im)) / &den;
            (nx, ny)
        }
    }
}

/// Squared distance from `(x, y)` to `(cx, 0)` minus `1/4`.
fn disk_excess(x: &Float, y: &Float, cx: f64) -> Float {
    let prec = x.prec();
    let dx = Float::with_val(prec, x - cx);
    dx.square() + Float::with_val(prec, y.square_ref()) - 0.25f64
}

/// Move a point into the closed fundamental domain.
fn reduce_point(mut z: (Float, Float), transforms: &mut Vec<Pairing>) -> Result<(Float, Float)> {
    for _ in 0..10_000 {
        if z.0 > 1 {
            let shifts = Float::with_val(z.0.prec(), (&z.0 + Float::with_val(z.0.prec(), 1u32)) / 2u32)
                .floor()
                .to_integer()
                .and_then(|i| i.to_u32())
                .unwrap_or(1)
                .max(1);
            for _ in 0..shifts {
                z = apply_point(Pairing::AInv, &z);
                transforms.push(Pairing::AInv);
            }
            continue;
        }
        if z.0 < -1 {
            z = apply_point(Pairing::A, &z);
            transforms.push(Pairing::A);
            continue;
        }
        if disk_excess(&z.0, &z.1, -0.5) < 0 {
            z = apply_point(Pairing::B, &z);
            transforms.push(Pairing::B);
            continue;
        }
        if disk_excess(&z.0, &z.1, 0.5) < 0 {
            z = apply_point(Pairing::BInv, &z);
            transforms.push(Pairing::BInv);
            continue;
        }
        return Ok(z);
    }
    Err(Error::InvalidInput("point reduction did not terminate".into()))
}

/// Side through which the chord leaves the domain, with the pairing that
/// carries the continuation back into it.
fn exit_pairing(front: &Float) -> Pairing {
    if *front > 1 {
        Pairing::AInv
    } else if *front > 0 {
        Pairing::BInv
    } else if *front > -1 {
        Pairing::B
    } else {
        Pairing::A
    }
}

fn close(a: &Float, b: &Float, tol: &Float) -> bool {
    let scale = Float::with_val(a.prec(), a.abs_ref()).max(&Float::with_val(a.prec(), 1u32));
    Float::with_val(a.prec(), a - b).abs() <= Float::with_val(a.prec(), tol * &scale)
}

/// Where two chords cross, if they do.
fn chord_crossing(c1: &Chord, c2: &Chord, tol: &Float) -> Result<Option<(Float, Float)>> {
    let prec = c1.back.prec();
    let (p1, q1) = ordered(&c1.back, &c1.front);
    let (p2, q2) = ordered(&c2.back, &c2.front);
    for a in [&p1, &q1] {
        for b in [&p2, &q2] {
            if close(a, b, tol) {
                return Err(Error::ToleranceBreach { bits: prec });
            }
        }
    }
    let inside = |x: &Float, lo: &Float, hi: &Float| x > lo && x < hi;
    let linked = inside(&p2, &p1, &q1) != inside(&q2, &p1, &q1);
    if !linked {
        return Ok(None);
    }
    let c1x = Float::with_val(prec, &p1 + &q1) / 2u32;
    let c2x = Float::with_val(prec, &p2 + &q2) / 2u32;
    let r1 = Float::with_val(prec, &q1 - &p1) / 2u32;
    let r2 = Float::with_val(prec, &q2 - &p2) / 2u32;
    // (x - c1)^2 - r1^2 = (x - c2)^2 - r2^2
    let num = Float::with_val(prec, r1.square_ref()) - Float::with_val(prec, r2.square_ref())
        + Float::with_val(prec, c2x.square_ref())
        - Float::with_val(prec, c1x.square_ref());
    let den = Float::with_val(prec, &c2x - &c1x) * 2u32;
    let x = num / den;
    let dx = Float::with_val(prec, &x - &c1x);
    let y2 = Float::with_val(prec, r1.square_ref()) - dx.square();
    if y2 <= 0 {
        return Err(Error::ToleranceBreach { bits: prec });
    }
    Ok(Some((x, y2.sqrt())))
}

fn ordered(a: &Float, b: &Float) -> (Float, Float) {
    if a < b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Half-open fundamental domain: the left side and left circle belong to it,
/// their images on the right do not.
///
/// Crossings of symmetric words often sit exactly on a side. A point within
/// the tolerance of a side is taken to lie on it and the half-open rule is
/// applied, so each such crossing is counted on exactly one of the two paired
/// sides.
fn in_domain(x: &Float, y: &Float, tol: &Float) -> bool {
    let prec = x.prec();
    let near = |v: &Float| Float::with_val(prec, v.abs_ref()) <= *tol;
    let left = Float::with_val(prec, x + 1u32);
    let right = Float::with_val(prec, x - 1u32);
    let el = disk_excess(x, y, -0.5);
    let er = disk_excess(x, y, 0.5);
    if near(&right) || near(&er) {
        return false;
    }
    if near(&left) || near(&el) {
        return true;
    }
    left > 0 && right < 0 && el > 0 && er > 0
}

/// Count self-crossings of the closed geodesic of `w` by cutting one period
/// into arcs across the fundamental domain.
pub fn crossing_oracle(w: &CyclicWord, ctx: &PrecisionContext) -> Result<u64> {
    let _ = check_input(w)?;
    let prec = ctx.bits;
    let tol = Float::with_val(prec, 1u32) >> (prec / 2) as i32;
    let m = evaluate(w);
    let [a, _, c, d] = m.entries();
    // fixed points of z -> (az + b)/(cz + d): c z^2 + (d - a) z - b = 0
    let (back, front) = fixed_points(a, c, d, prec)?;
    // top of the axis
    let mid = Float::with_val(prec, &back + &front) / 2u32;
    let rad = Float::with_val(prec, &front - &back).abs() / 2u32;
    let mut transforms = Vec::new();
    let _ = reduce_point((mid, rad), &mut transforms)?;
    let mut chord = Chord { back, front };
    for t in &transforms {
        chord = Chord {
            back: apply(*t, &chord.back),
            front: apply(*t, &chord.front),
        };
    }
    let start = chord.clone();
    let mut arcs = vec![chord.clone()];
    let limit = 4 * w.len() + 8;
    loop {
        let p = exit_pairing(&chord.front);
        chord = Chord {
            back: apply(p, &chord.back),
            front: apply(p, &chord.front),
        };
        if close(&chord.back, &start.back, &tol) && close(&chord.front, &start.front, &tol) {
            break;
        }
        arcs.push(chord.clone());
        if arcs.len() > limit {
            return Err(Error::ToleranceBreach { bits: prec });
        }
    }
    let mut count = 0u64;
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            if let Some((x, y)) = chord_crossing(&arcs[i], &arcs[j], &tol)? {
                if in_domain(&x, &y, &tol) {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// [`crossing_oracle`], doubling the precision on tolerance breaches.
pub fn crossing_oracle_adaptive(w: &CyclicWord, ctx: &PrecisionContext, max_bits: u32) -> Result<u64> {
    let mut bits = ctx.bits;
    loop {
        match crossing_oracle(w, &PrecisionContext::new(bits)) {
            Err(Error::ToleranceBreach { .. }) if bits * 2 <= max_bits => bits *= 2,
            Err(Error::ToleranceBreach { .. }) => return Err(Error::PrecisionExhausted { cap: max_bits }),
            other => return other,
        }
    }
}

/// Repelling and attracting fixed points of a hyperbolic element.
fn fixed_points(
    a: &rug::Integer,
    c: &rug::Integer,
    d: &rug::Integer,
    prec: u32,
) -> Result<(Float, Float)> {
    if *c == 0 {
        return Err(Error::InvalidInput("fixed point at infinity".into()));
    }
    let tr = Float::with_val(prec, rug::Integer::from(a + d));
    let disc = Float::with_val(prec, tr.square_ref()) - 4u32;
    let sq = disc.sqrt();
    let amd = Float::with_val(prec, rug::Integer::from(a - d));
    let two_c = Float::with_val(prec, rug::Integer::from(c * 2u32));
    let z1 = (Float::with_val(prec, &amd + &sq)) / &two_c;
    let z2 = (Float::with_val(prec, &amd - &sq)) / &two_c;
    // attracting fixed point has |cz + d| < 1
    let deriv = |z: &Float| {
        let v = Float::with_val(prec, z * Float::with_val(prec, c)) + Float::with_val(prec, d);
        v.abs()
    };
    if deriv(&z1) < deriv(&z2) {
        Ok((z2, z1))
    } else {
        Ok((z1, z2))
    }
}
