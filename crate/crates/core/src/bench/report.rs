use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};

use super::CorpusReport;

/// Fixed-width histogram over `[lo, lo + width * counts.len())`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
    pub underflow: usize,
    pub overflow: usize,
}

impl Histogram {
    pub fn new(lo: f64, width: f64, bins: usize) -> Self {
        Self {
            lo,
            width,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn add(&mut self, value: f64) {
        if value < self.lo {
            self.underflow += 1;
            return;
        }
        let slot = ((value - self.lo) / self.width).floor() as usize;
        match self.counts.get_mut(slot) {
            Some(c) => *c += 1,
            None => self.overflow += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.underflow + self.overflow
    }
}

/// One CSV row per measured mesh.
pub fn write_csv<W: io::Write>(report: &CorpusReport, writer: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for r in &report.records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders the ratio histogram as a standalone SVG bar chart.
pub fn ratio_histogram_svg(report: &CorpusReport) -> String {
    histogram_svg(
        &report.ratio_histogram,
        "AMT / naive payload ratio",
        report.macro_avg_ratio,
    )
}

pub fn histogram_svg(h: &Histogram, title: &str, marker: Option<f64>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 360.0;
    const PAD: f64 = 40.0;
    let bins = h.counts.len().max(1);
    let peak = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let bar_w = (W - 2.0 * PAD) / bins as f64;
    let plot_h = H - 2.0 * PAD;
    let span = h.width * bins as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    for (i, &c) in h.counts.iter().enumerate() {
        let bh = c as f64 / peak * plot_h;
        let x = PAD + i as f64 * bar_w;
        let y = H - PAD - bh;
        let _ = writeln!(
            s,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{bh:.2}" fill="#4878a8"><title>[{:.3}, {:.3}): {c}</title></rect>"##,
            (bar_w - 1.0).max(0.5),
            h.lo + i as f64 * h.width,
            h.lo + (i + 1) as f64 * h.width,
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    for k in 0..=4 {
        let frac = k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{:.2}</text>"#,
            PAD + frac * (W - 2.0 * PAD),
            H - PAD + 16.0,
            h.lo + frac * span
        );
    }
    if let Some(m) = marker.filter(|m| *m >= h.lo && *m <= h.lo + span) {
        let x = PAD + (m - h.lo) / span * (W - 2.0 * PAD);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{PAD}" x2="{x:.2}" y2="{}" stroke="crimson" stroke-dasharray="4 3"/>"#,
            H - PAD
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" fill="crimson">mean {m:.4}</text>"#,
            x + 4.0,
            PAD + 12.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
