use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use geoforge_core::PrecisionContext;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct MetaInfo {
    pub tool: &'static str,
    pub version: &'static str,
    pub generated_unix: u64,
    pub precision_bits: u32,
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct Meta {
    info: Option<MetaInfo>,
}

impl Meta {
    pub fn new(disabled: bool, ctx: &PrecisionContext) -> Self {
        let info = (!disabled).then(|| MetaInfo {
            tool: "geoforge",
            version: env!("CARGO_PKG_VERSION"),
            generated_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            precision_bits: ctx.bits,
            threads: rayon::current_num_threads(),
        });
        Self { info }
    }

    pub fn with_threads(&self, threads: usize) -> Self {
        let mut m = self.clone();
        if let Some(i) = m.info.as_mut() {
            i.threads = threads;
        }
        m
    }

    pub fn info(&self) -> Option<&MetaInfo> {
        self.info.as_ref()
    }

    /// `# key=value` lines for CSV output.
    pub fn comment_lines(&self) -> Vec<String> {
        match &self.info {
            None => Vec::new(),
            Some(i) => vec![format!(
                "# tool={} version={} generated_unix={} precision_bits={} threads={}",
                i.tool, i.version, i.generated_unix, i.precision_bits, i.threads
            )],
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<&'a MetaInfo>,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Serialize>(meta: &Meta, body: &T) -> String {
    let env = Envelope {
        meta: meta.info(),
        body,
    };
    serde_json::to_string_pretty(&env).expect("report types serialize")
}

pub fn print_json<T: Serialize>(meta: &Meta, body: &T) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", to_json(meta, body))
}
