//! Length and self-intersection tables over all primitive hyperbolic classes
//! on the thrice punctured sphere up to a given word length.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::Serialize;

use crate::error::Result;
use crate::intersection::{self_intersection, IntersectionConfig};
use crate::precision::PrecisionContext;
use crate::words::{classify_word, enumerate, CyclicWord, WordFilter};

#[derive(Debug, Clone, Serialize)]
pub struct SurveyRow {
    pub word: String,
    pub trace: String,
    /// Empty for peripheral classes.
    pub length: Option<String>,
    /// Computed for primitive hyperbolic classes only.
    pub self_intersections: Option<u64>,
    pub certified: bool,
    #[serde(rename = "bacK")]
    pub back: Option<String>,
    #[serde(skip)]
    abs_trace: Integer,
    #[serde(skip)]
    canonical: CyclicWord,
}

impl SurveyRow {
    pub fn abs_trace(&self) -> &Integer {
        &self.abs_trace
    }

    pub fn canonical(&self) -> &CyclicWord {
        &self.canonical
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveySummary {
    pub k: u64,
    pub best_row: Option<SurveyRow>,
    /// Length of `best_row`: an upper bound for the shortest length among
    /// closed geodesics with at least `k` self-intersections.
    pub s_geq_k_upper: Option<String>,
    /// `2 arcosh(2k + 1)`, the length of `b a^k`.
    #[serde(rename = "candidate_bacK_length")]
    pub candidate_back_length: String,
    /// `b a^k` has at most `max_len` letters.
    pub candidate_in_range: bool,
    pub coverage_note: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SurveyConfig {
    pub max_len: usize,
    #[serde(serialize_with = "ser_filter")]
    pub filter: WordFilter,
    pub precision_bits: u32,
    pub start_radius: Option<usize>,
    pub max_radius: Option<usize>,
}

impl SurveyConfig {
    pub fn new(max_len: usize, ctx: &PrecisionContext) -> Self {
        Self {
            max_len,
            filter: WordFilter::HyperbolicPrimitive,
            precision_bits: ctx.bits,
            start_radius: None,
            max_radius: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Survey {
    pub config: SurveyConfig,
    pub rows: Vec<SurveyRow>,
    pub summaries: Vec<SurveySummary>,
}

fn ser_filter<S: serde::Serializer>(f: &WordFilter, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match f {
        WordFilter::All => "all",
        WordFilter::Hyperbolic => "hyperbolic",
        WordFilter::HyperbolicPrimitive => "hyperbolic-primitive",
    })
}

fn row_order(a: &SurveyRow, b: &SurveyRow) -> Ordering {
    a.abs_trace.cmp(&b.abs_trace).then_with(|| a.canonical.cmp(&b.canonical))
}

pub fn survey_row(w: &CyclicWord, config: &SurveyConfig) -> Result<SurveyRow> {
    let ctx = PrecisionContext::new(config.precision_bits);
    let class = classify_word(w, &ctx);
    let (count, certified) = if class.is_hyperbolic_primitive() {
        let icfg = IntersectionConfig {
            start_radius: config.start_radius,
            max_radius: config.max_radius,
            ..IntersectionConfig::default()
        };
        let inter = self_intersection(w, &icfg)?;
        (Some(inter.count), inter.certified)
    } else {
        (None, false)
    };
    Ok(SurveyRow {
        word: w.to_string(),
        trace: class.trace.to_string(),
        length: class.length.as_ref().map(|l| ctx.to_decimal(l)),
        self_intersections: count,
        certified,
        back: class.back_shape.map(|s| s.to_string()),
        abs_trace: Integer::from(class.trace.abs_ref()),
        canonical: w.clone(),
    })
}

/// `2 arcosh(2k + 1)`.
pub fn back_candidate_length(k: u64, ctx: &PrecisionContext) -> Float {
    ctx.float(2 * k + 1).acosh() * 2u32
}

/// Rows for every class of at most `max_len` letters accepted by the filter,
/// ordered by length and then by word, and one summary per requested `k`.
///
/// Work is spread over the current rayon pool; the output does not depend on
/// its size.
pub fn run_survey(config: &SurveyConfig, ks: &[u64]) -> Result<Survey> {
    let ctx = PrecisionContext::new(config.precision_bits);
    let words = enumerate(config.max_len, config.filter);
    let mut rows: Vec<SurveyRow> = words
        .par_iter()
        .map(|w| survey_row(w, config))
        .collect::<Result<_>>()?;
    rows.sort_by(row_order);
    let summaries = ks.iter().map(|&k| summarize(&rows, k, config.max_len, &ctx)).collect();
    Ok(Survey {
        config: *config,
        rows,
        summaries,
    })
}

pub fn summarize(rows: &[SurveyRow], k: u64, max_len: usize, ctx: &PrecisionContext) -> SurveySummary {
    let best = rows
        .iter()
        .filter(|r| r.certified && r.self_intersections.is_some_and(|i| i >= k))
        .min_by(|a, b| row_order(a, b))
        .cloned();
    let candidate_in_range = (k as usize).saturating_add(1) <= max_len;
    let uncertified = rows
        .iter()
        .filter(|r| r.self_intersections.is_some() && !r.certified)
        .count();
    let mut note = format!(
        "primitive hyperbolic classes with at most {max_len} letters; shorter classes with longer words are not covered"
    );
    if uncertified > 0 {
        note.push_str(&format!("; {uncertified} uncertified rows excluded"));
    }
    SurveySummary {
        k,
        s_geq_k_upper: best.as_ref().and_then(|r| r.length.clone()),
        best_row: best,
        candidate_back_length: ctx.to_decimal(&back_candidate_length(k, ctx)),
        candidate_in_range,
        coverage_note: note,
    }
}
