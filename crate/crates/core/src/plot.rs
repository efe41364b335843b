//! SVG plot of the inner and outer confidence sets over the `(theta, s)` grid.
//!
//! Each grid point is one cell: dark for the inner set, light for points in
//! the outer set only, white for excluded points. Theta runs left to right
//! and s bottom to top.

use std::fmt::Write as _;

use crate::utility::UtilityGrid;

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

pub const INNER_FILL: &str = "#303030";
pub const OUTER_FILL: &str = "#c8c8c8";
pub const EXCLUDED_FILL: &str = "#ffffff";

/// Classification of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Inner,
    OuterOnly,
    Excluded,
}

impl Region {
    pub fn of(inner: bool, outer: bool) -> Self {
        if inner {
            Region::Inner
        } else if outer {
            Region::OuterOnly
        } else {
            Region::Excluded
        }
    }

    fn class(self) -> &'static str {
        match self {
            Region::Inner => "inner",
            Region::OuterOnly => "outer",
            Region::Excluded => "excluded",
        }
    }

    fn fill(self) -> &'static str {
        match self {
            Region::Inner => INNER_FILL,
            Region::OuterOnly => OUTER_FILL,
            Region::Excluded => EXCLUDED_FILL,
        }
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn region_svg(grid: &UtilityGrid, inner: &[bool], outer: &[bool], title: &str) -> String {
    let nt = grid.theta_axis().len();
    let ns = grid.s_axis().len();
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let cw = plot_w / nt as f64;
    let ch = plot_h / ns as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        esc(title)
    );
    let _ = writeln!(svg, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for k in 0..grid.len() {
        let (i, j) = grid.coords(k);
        let p = grid.point(k);
        let region = Region::of(inner[k], outer[k]);
        let x = LEFT + i as f64 * cw;
        let y = TOP + (ns - 1 - j) as f64 * ch;
        let _ = writeln!(
            svg,
            r#"<rect class="{}" x="{x:.3}" y="{y:.3}" width="{cw:.3}" height="{ch:.3}" fill="{}" data-theta="{}" data-s="{}"/>"#,
            region.class(),
            region.fill(),
            p.theta,
            p.s
        );
    }
    let _ = writeln!(svg, "</g>");

    // frame, ticks and labels
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let (t0, t1) = (grid.theta_axis()[0], grid.theta_axis()[nt - 1]);
    let (s0, s1) = (grid.s_axis()[0], grid.s_axis()[ns - 1]);
    let base = TOP + plot_h;
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{t0}</text>"#, LEFT + cw / 2.0, base + 16.0);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{t1}</text>"#,
        LEFT + plot_w - cw / 2.0,
        base + 16.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">θ (risk aversion)</text>"#,
        LEFT + plot_w / 2.0,
        base + 40.0
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{s0}</text>"#, LEFT - 6.0, base - ch / 2.0 + 4.0);
    if ns > 1 {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{s1}</text>"#, LEFT - 6.0, TOP + ch / 2.0 + 4.0);
    }
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">s (shift)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let lx = WIDTH - RIGHT + 16.0;
    for (n, (region, label)) in [
        (Region::Inner, "inner set"),
        (Region::OuterOnly, "outer set only"),
        (Region::Excluded, "excluded"),
    ]
    .iter()
    .enumerate()
    {
        let ly = TOP + 10.0 + n as f64 * 22.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{ly}" width="14" height="14" fill="{}" stroke="black"/>"#,
            region.fill()
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{label}</text>"#, lx + 20.0, ly + 11.0);
    }
    svg.push_str("</svg>\n");
    svg
}
