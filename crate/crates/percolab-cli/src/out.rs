//! Deterministic text output: JSON, CSV, plot data.
//!
//! Every float is serialized with 17 significant digits so reruns are
//! byte-identical and values round-trip through parsing exactly. No
//! timestamps, no locale, LF everywhere.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use percolab::percolate::TrialRow;

pub fn fmt_f64(x: f64) -> String {
    debug_assert!(x.is_finite());
    format!("{x:.16e}")
}

pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    U64(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn opt<T, F: FnOnce(T) -> Json>(v: Option<T>, f: F) -> Json {
        v.map_or(Json::Null, f)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::U64(u) => {
                let _ = write!(out, "{u}");
            }
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push(' ');
                    item.write(out, depth);
                }
                out.push_str(" ]");
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                let pad = "  ".repeat(depth + 1);
                for (i, (k, v)) in fields.iter().enumerate() {
                    out.push_str(&pad);
                    let _ = write!(out, "\"{k}\": ");
                    v.write(out, depth + 1);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&"  ".repeat(depth));
                out.push('}');
            }
        }
    }
}

/// Header plus rows, LF line endings, trailing newline.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> io::Result<()> {
    let mut text = String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)
}

pub const CENSUS_HEADER: &str = "trial,seed,n,p,L1,L2,num_components,gap_violations";

pub fn census_row(r: &TrialRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.trial,
        r.seed,
        r.n,
        fmt_f64(r.p),
        r.l1,
        r.l2,
        r.num_components,
        r.gap_violations
    )
}

pub const SPRINKLE_HEADER: &str =
    "trial,L1_over_yn,L2,gap_ok,spread_ok,spread_radius_used,merge_ok,unique_ok,theorem_ok";

pub fn sprinkle_row(r: &percolab::sprinkle::SprinkleRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.trial,
        fmt_f64(r.l1_over_yn),
        r.l2,
        r.gap_ok,
        r.spread_ok,
        r.spread_radius_used,
        r.merge_ok,
        r.unique_ok,
        r.theorem_ok
    )
}

/// Plot data: one block of (trial, L1/n) points, then a log-binned
/// component-size histogram pooled over all trials. Blocks are separated by
/// a blank line; `#` lines carry labels and the survival level y.
pub fn plot_data(census: &[TrialRow], size_bins: &[u64], y: f64) -> String {
    let mut s = String::new();
    s.push_str("# giant component census\n");
    s.push_str(&format!("# y = {}\n", fmt_f64(y)));
    s.push_str("# block 0: trial L1_over_n\n");
    for r in census {
        s.push_str(&format!("{} {}\n", r.trial, fmt_f64(r.l1 as f64 / r.n as f64)));
    }
    s.push('\n');
    s.push_str("# block 1: component size histogram, bins [2^k, 2^(k+1)), pooled over trials\n");
    s.push_str("# size_bin_low count\n");
    let top = size_bins.iter().rposition(|&c| c > 0);
    if let Some(top) = top {
        for (k, &count) in size_bins.iter().enumerate().take(top + 1) {
            s.push_str(&format!("{} {}\n", 1u64 << k, count));
        }
    }
    s
}
