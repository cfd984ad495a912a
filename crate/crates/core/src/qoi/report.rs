use std::fmt::Write;

use super::scores::ScoresDoc;
use crate::error::Result;

pub fn to_csv(doc: &ScoresDoc) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| crate::error::Error::Invalid(e.to_string());
    w.write_record(["region_id", "rank", "S", "T", "C", "Q", "s_raw", "t_raw", "c_raw"])
        .map_err(io)?;
    for s in &doc.segments {
        w.write_record([
            s.region_id.clone(),
            s.rank.to_string(),
            s.s.to_string(),
            s.t.to_string(),
            s.c.to_string(),
            s.q.to_string(),
            s.s_raw.to_string(),
            s.t_raw.to_string(),
            s.c_raw.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::error::Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Fixed-width table for terminals.
pub fn to_table(doc: &ScoresDoc) -> String {
    let mut out = format!(
        "metric {}  weights {}  window [{}, {})\n",
        doc.metric, doc.weights, doc.window.from, doc.window.to
    );
    let _ = writeln!(out, "{:>4}  {:<12} {:>7} {:>7} {:>7} {:>8}", "rank", "region", "S", "T", "C", "Q");
    for s in &doc.segments {
        let _ = writeln!(
            out,
            "{:>4}  {:<12} {:>7.4} {:>7.4} {:>7.4} {:>8.4}",
            s.rank, s.region_id, s.s, s.t, s.c, s.q
        );
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Grouped bar chart of S, T and C per region, in rank order.
pub fn to_svg(doc: &ScoresDoc) -> String {
    const BAR: f64 = 14.0;
    const GAP: f64 = 18.0;
    const HEIGHT: f64 = 200.0;
    const LEFT: f64 = 40.0;
    const TOP: f64 = 30.0;
    let colors = [("S", "#1f77b4"), ("T", "#ff7f0e"), ("C", "#2ca02c")];
    let group = 3.0 * BAR + GAP;
    let width = LEFT + group * doc.segments.len().max(1) as f64 + 20.0;
    let total_h = TOP + HEIGHT + 60.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{total_h}" viewBox="0 0 {width} {total_h}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{LEFT}" y="16" font-size="12">{} weights {}</text>"#,
        escape(&doc.metric),
        doc.weights
    );
    let base = TOP + HEIGHT;
    let _ = writeln!(
        svg,
        r##"<line x1="{LEFT}" y1="{base}" x2="{}" y2="{base}" stroke="#333"/>"##,
        width - 10.0
    );
    for tick in [0.0, 0.5, 1.0] {
        let y = base - tick * HEIGHT;
        let _ = writeln!(svg, r#"<text x="4" y="{}">{tick:.1}</text>"#, y + 3.0);
    }
    for (i, seg) in doc.segments.iter().enumerate() {
        let x0 = LEFT + i as f64 * group + GAP / 2.0;
        for (k, ((name, color), v)) in colors.iter().zip([seg.s, seg.t, seg.c]).enumerate() {
            let h = v.clamp(0.0, 1.0) * HEIGHT;
            let _ = writeln!(
                svg,
                r#"<rect x="{:.1}" y="{:.3}" width="{BAR}" height="{:.3}" fill="{color}"><title>{} {name} {v}</title></rect>"#,
                x0 + k as f64 * BAR,
                base - h,
                h,
                escape(&seg.region_id)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            x0 + 1.5 * BAR,
            base + 14.0,
            escape(&seg.region_id)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">#{}</text>"#,
            x0 + 1.5 * BAR,
            base + 26.0,
            seg.rank
        );
    }
    for (k, (name, color)) in colors.iter().enumerate() {
        let x = LEFT + k as f64 * 40.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{name}</text>"#,
            total_h - 16.0,
            x + 13.0,
            total_h - 7.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qoi::{QualityScore, Weights, Window};

    fn doc() -> ScoresDoc {
        ScoresDoc {
            metric: "jsd".into(),
            weights: Weights::default(),
            window: Window { from: 0, to: 86400 },
            segments: vec![QualityScore {
                region_id: "A<1>".into(),
                s_raw: 0.2,
                t_raw: 0.01,
                c_raw: 3.0,
                s: 0.5,
                t: 1.0,
                c: 0.25,
                q: 1.75,
                rank: 1,
            }],
        }
    }

    #[test]
    fn csv_has_header_and_row() {
        let csv = to_csv(&doc()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "region_id,rank,S,T,C,Q,s_raw,t_raw,c_raw");
        assert_eq!(lines[1], "A<1>,1,0.5,1,0.25,1.75,0.2,0.01,3");
    }

    #[test]
    fn svg_has_three_bars_per_region() {
        let svg = to_svg(&doc());
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<title>").count(), 3);
        assert!(svg.contains("A&lt;1&gt;"));
    }
}
