use std::io::Write;

use anyhow::anyhow;
use geoforge_core::constants::{
    run_pipeline, ConstantsReport, ExplicitSurface, PipelineOptions, SurfaceDescription, TopologicalClass,
};
use geoforge_core::intersection::{self_intersection, IntersectionConfig, IntersectionResult};
use geoforge_core::pants::{build_example_surface_capped, ExampleSurfaceReport};
use geoforge_core::strand::{depth_threshold, strand_length_bounds, Strand, StrandReport};
use geoforge_core::survey::{run_survey, Survey, SurveyConfig};
use geoforge_core::words::{classify_word, parse_letters, canonicalize, BackShape, WordFilter, WordKind};
use geoforge_core::PrecisionContext;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{print_json, to_json, Meta};
use crate::{parse_real, CmdResult, ConstantsArgs, ExampleArgs, Failure, FilterArg, Format, StrandArgs, SurveyArgs, WordArgs};

#[derive(Serialize)]
struct StrandWinding {
    operation: &'static str,
    formula: &'static str,
    #[serde(flatten)]
    strand: StrandReport,
}

#[derive(Serialize)]
struct StrandBounds {
    operation: &'static str,
    formula: &'static str,
    h: String,
    omega: u64,
    lower: String,
    upper: String,
}

#[derive(Serialize)]
struct StrandDepth {
    operation: &'static str,
    formula: &'static str,
    h: String,
    h0: String,
    threshold: String,
}

pub fn strand(a: &StrandArgs, ctx: &PrecisionContext, meta: &Meta) -> CmdResult {
    let h = parse_real("h", &a.h, ctx)?;
    if let Some(text) = &a.length {
        let length = parse_real("length", text, ctx)?;
        let s = Strand::from_length(h, length, ctx)?;
        print_json(
            meta,
            &StrandWinding {
                operation: "winding_number",
                formula: "omega = floor((2/h) sinh(l/2)), self-intersections = omega - 1",
                strand: StrandReport::new(&s, ctx),
            },
        )?;
    } else if let Some(omega) = a.omega {
        let (lo, hi) = strand_length_bounds(&h, omega, ctx)?;
        print_json(
            meta,
            &StrandBounds {
                operation: "length_bounds",
                formula: "2 arsinh(h (omega - 1) / 2) <= l <= 2 arsinh(h omega / 2)",
                h: ctx.to_decimal(&h),
                omega,
                lower: ctx.to_decimal(&lo),
                upper: ctx.to_decimal(&hi),
            },
        )?;
    } else if let Some(text) = &a.h0 {
        let h0 = parse_real("h0", text, ctx)?;
        let t = depth_threshold(&h, &h0, ctx)?;
        print_json(
            meta,
            &StrandDepth {
                operation: "depth_threshold",
                formula: "2 arcosh(h / h0)",
                h: ctx.to_decimal(&h),
                h0: ctx.to_decimal(&h0),
                threshold: ctx.to_decimal(&t),
            },
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Reference {
    direct_k_order_of_magnitude: &'static str,
    asserted: bool,
    note: &'static str,
}

#[derive(Serialize)]
struct ConstantsOut<'a> {
    surface: &'static str,
    report: &'a ConstantsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<Reference>,
}

pub fn constants(a: &ConstantsArgs, ctx: &PrecisionContext, meta: &Meta) -> CmdResult {
    let (surface, label) = if a.surface_y {
        (SurfaceDescription::thrice_punctured_sphere(ctx)?, "thrice-punctured-sphere")
    } else if let Some(g) = a.g {
        let n = a.n.ok_or_else(|| Failure::Usage(anyhow!("--g needs --n")))?;
        let s = a.s.as_deref().ok_or_else(|| Failure::Usage(anyhow!("--g needs --s")))?;
        let class = TopologicalClass {
            g,
            n,
            systole_floor: parse_real("s", s, ctx)?,
        };
        (SurfaceDescription::Topological(class), "topological")
    } else {
        let get = |name: &str, v: &Option<String>| {
            v.as_deref()
                .ok_or_else(|| Failure::Usage(anyhow!("explicit mode needs --{name}")))
                .and_then(|t| parse_real(name, t, ctx))
        };
        let e = ExplicitSurface {
            h_max: get("h-max", &a.h_max)?,
            systole: get("systole", &a.systole)?,
            d1: get("d1", &a.d1)?,
            d_eps0: get("d-eps0", &a.d_eps0)?,
        };
        (SurfaceDescription::Explicit(e), "explicit")
    };
    let opts = PipelineOptions {
        ctx: *ctx,
        d_cap_exponent: a.d_cap_exp,
        k_cap_exponent: a.k_cap_exp,
        basmajian_ks: a.ks.clone(),
    };
    let (report, _) = run_pipeline(&surface, &opts)?;
    let reference = a.surface_y.then_some(Reference {
        direct_k_order_of_magnitude: "1e35",
        asserted: false,
        note: "reference order of magnitude for K of this surface; not asserted, each variant is reported with its own certificate",
    });
    print_json(
        meta,
        &ConstantsOut {
            surface: label,
            report: &report,
            reference,
        },
    )?;
    Ok(())
}

fn word_filter(f: FilterArg) -> WordFilter {
    match f {
        FilterArg::All => WordFilter::All,
        FilterArg::Hyperbolic => WordFilter::Hyperbolic,
        FilterArg::HyperbolicPrimitive => WordFilter::HyperbolicPrimitive,
    }
}

pub fn survey(a: &SurveyArgs, ctx: &PrecisionContext, meta: &Meta) -> CmdResult {
    let config = SurveyConfig {
        max_len: a.max_len as usize,
        filter: word_filter(a.filter),
        precision_bits: ctx.bits,
        start_radius: a.start_radius,
        max_radius: a.max_radius,
    };
    let (result, threads): (geoforge_core::Result<Survey>, usize) = match a.threads {
        Some(0) => return Err(Failure::Usage(anyhow!("--threads must be at least 1"))),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Domain(anyhow!(e)))?;
            (pool.install(|| run_survey(&config, &a.ks)), n)
        }
        None => (run_survey(&config, &a.ks), rayon::current_num_threads()),
    };
    let survey = result?;
    let meta = meta.with_threads(threads);
    match a.format {
        Format::Json => print_json(&meta, &survey)?,
        Format::Csv => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for line in meta.comment_lines() {
                writeln!(out, "{line}")?;
            }
            let mut w = csv::Writer::from_writer(out);
            for row in &survey.rows {
                w.serialize(row).map_err(|e| Failure::Domain(anyhow!(e)))?;
            }
            w.flush()?;
            drop(w);
            #[derive(Serialize)]
            struct Summaries<'a> {
                config: &'a SurveyConfig,
                summaries: &'a [geoforge_core::survey::SurveySummary],
            }
            let body = Summaries {
                config: &survey.config,
                summaries: &survey.summaries,
            };
            let text = to_json(&meta, &body);
            match &a.summary_out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => eprintln!("{text}"),
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct WordOut {
    input: String,
    canonical: String,
    trace: String,
    kind: WordKind,
    primitive: bool,
    length: Option<String>,
    #[serde(rename = "bacK_shape")]
    back_shape: Option<BackShape>,
    self_intersection: Option<IntersectionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

pub fn word(a: &WordArgs, ctx: &PrecisionContext, meta: &Meta) -> CmdResult {
    let letters = parse_letters(&a.word).map_err(|e| Failure::Usage(e.into()))?;
    let w = canonicalize(&letters)?;
    let class = classify_word(&w, ctx);
    let (inter, note) = match (class.kind, class.primitive) {
        (WordKind::Peripheral, _) => (None, Some("peripheral class: no closed geodesic")),
        (WordKind::Hyperbolic, false) => (None, Some("not primitive: intersection number skipped")),
        (WordKind::Hyperbolic, true) => (Some(self_intersection(&w, &IntersectionConfig::default())?), None),
    };
    print_json(
        meta,
        &WordOut {
            input: a.word.clone(),
            canonical: w.to_string(),
            trace: class.trace.to_string(),
            kind: class.kind,
            primitive: class.primitive,
            length: class.length.as_ref().map(|l| ctx.to_decimal(l)),
            back_shape: class.back_shape,
            self_intersection: inter,
            note,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct ExampleOut<'a> {
    reports: &'a [ExampleSurfaceReport],
}

pub fn example(a: &ExampleArgs, ctx: &PrecisionContext, meta: &Meta) -> CmdResult {
    let reports: Vec<ExampleSurfaceReport> = a
        .ks
        .par_iter()
        .map(|&k| build_example_surface_capped(k, ctx, a.precision_cap.max(ctx.bits)))
        .collect::<geoforge_core::Result<_>>()?;
    print_json(meta, &ExampleOut { reports: &reports })?;
    let failing: Vec<u32> = reports.iter().filter(|r| !r.passes()).map(|r| r.k).collect();
    if !failing.is_empty() {
        return Err(Failure::Assertion(anyhow!(
            "claimed inequalities fail for k = {failing:?}"
        )));
    }
    Ok(())
}
