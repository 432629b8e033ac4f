//! Region heatmap as a plain SVG rectangle grid with a legend.

use std::fmt::Write as _;

use evidence_core::search::RegionReport;
use evidence_core::RegionLabel;

use crate::config::Grid;

const CELL: usize = 24;
const LEFT: usize = 70;
const TOP: usize = 20;
const LEGEND_W: usize = 230;

pub fn color(label: RegionLabel) -> &'static str {
    match label {
        RegionLabel::BothLow => "#4c72b0",
        RegionLabel::IntermediateCaseI => "#dd8452",
        RegionLabel::IntermediateCaseII => "#55a868",
        RegionLabel::IntermediateBoundary => "#8172b3",
        RegionLabel::HighHigh => "#c44e52",
        RegionLabel::PiZero => "#937860",
        RegionLabel::Uncovered => "#d9d9d9",
    }
}

const ORDER: [RegionLabel; 7] = [
    RegionLabel::BothLow,
    RegionLabel::IntermediateCaseI,
    RegionLabel::IntermediateCaseII,
    RegionLabel::IntermediateBoundary,
    RegionLabel::HighHigh,
    RegionLabel::PiZero,
    RegionLabel::Uncovered,
];

/// Columns follow kappa left to right, rows follow gamma bottom to top.
/// Cells where the closed form misses the brute-force optimum get a black outline.
pub fn heatmap(grid: &Grid, reports: &[RegionReport]) -> String {
    assert_eq!(reports.len(), grid.cells.len(), "one report per cell");
    let (rows, cols) = (grid.rows(), grid.cols());
    let plot_w = cols * CELL;
    let plot_h = rows * CELL;
    let width = LEFT + plot_w + 20 + LEGEND_W;
    let height = (TOP + plot_h + 50).max(TOP + 20 * (ORDER.len() + 2));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);

    let y_of = |row: usize| TOP + (rows - 1 - row) * CELL;
    for (i, rep) in reports.iter().enumerate() {
        let (row, col) = (i / cols, i % cols);
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}"><title>gamma={} kappa={} {}</title></rect>"#,
            LEFT + col * CELL,
            y_of(row),
            color(rep.label),
            grid.gammas[row],
            grid.kappas[col],
            rep.label
        );
    }
    for (i, _) in reports.iter().enumerate().filter(|(_, r)| r.is_mismatch()) {
        let (row, col) = (i / cols, i % cols);
        let _ = writeln!(
            s,
            r#"<rect class="mismatch" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="2"/>"#,
            LEFT + col * CELL + 1,
            y_of(row) + 1,
            CELL - 2,
            CELL - 2
        );
    }

    // axes: first and last tick on each
    let base = TOP + plot_h;
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + CELL / 2, base + 14, grid.kappas[0]);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w - CELL / 2,
        base + 14,
        grid.kappas[cols - 1]
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">kappa</text>"#, LEFT + plot_w / 2, base + 32);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, LEFT - 4, base - CELL / 2 + 4, grid.gammas[0]);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, LEFT - 4, TOP + CELL / 2 + 4, grid.gammas[rows - 1]);
    let _ = writeln!(s, r#"<text x="12" y="{}" text-anchor="middle" transform="rotate(-90 12 {})">gamma</text>"#, TOP + plot_h / 2, TOP + plot_h / 2);

    let lx = LEFT + plot_w + 20;
    for (i, label) in ORDER.iter().enumerate() {
        let y = TOP + i * 20;
        let _ = writeln!(s, r#"<rect x="{lx}" y="{y}" width="14" height="14" fill="{}"/>"#, color(*label));
        let _ = writeln!(s, r#"<text x="{}" y="{}">{label}</text>"#, lx + 20, y + 11);
    }
    let y = TOP + ORDER.len() * 20;
    let _ = writeln!(s, r#"<rect x="{lx}" y="{y}" width="14" height="14" fill="none" stroke="black" stroke-width="2"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="{}">closed form not optimal</text>"#, lx + 20, y + 11);
    s.push_str("</svg>\n");
    s
}
