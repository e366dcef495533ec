//! SVG rendering of a report. Output depends only on the report, so two
//! renderings of the same report are byte-identical.

use std::collections::BTreeSet;
use std::fmt::Write;

use ripsnet::deploy::{build_comm_graph, Point};
use ripsnet::NodeId;

use crate::report::Report;
use crate::scenario::Layer;

const SIZE: f64 = 600.0;
const PAD: f64 = 20.0;

fn xy(p: Point) -> (f64, f64) {
    // y grows upwards in the deployment, downwards in SVG
    (
        PAD + p.x * (SIZE - 2.0 * PAD),
        SIZE - PAD - p.y * (SIZE - 2.0 * PAD),
    )
}

fn scale(r: f64) -> f64 {
    r * (SIZE - 2.0 * PAD)
}

/// Renders nodes and edges plus the requested layers, always in the fixed
/// order coverage, edges, boundary, removed, survivor, flagged, nodes.
pub fn emit_svg(report: &Report, layers: &[Layer]) -> String {
    let on: BTreeSet<Layer> = layers.iter().copied().collect();
    let d = report.deployment();
    let g = build_comm_graph(&d);
    let pos = |v: NodeId| xy(d.position(v));
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    if on.contains(&Layer::Coverage) {
        let _ = writeln!(
            s,
            r##"<g id="coverage" fill="#7fb3d5" fill-opacity="0.25">"##
        );
        for v in g.nodes() {
            let (x, y) = pos(v);
            let _ = writeln!(
                s,
                r#"<circle class="coverage" cx="{x:.2}" cy="{y:.2}" r="{:.2}"/>"#,
                scale(d.r_s)
            );
        }
        s.push_str("</g>\n");
    }

    let _ = writeln!(s, r##"<g id="edges" stroke="#b0b0b0" stroke-width="0.8">"##);
    for (a, b) in g.edges() {
        let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
        let _ = writeln!(
            s,
            r#"<line class="edge" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#
        );
    }
    s.push_str("</g>\n");

    let dots = |s: &mut String, id: &str, color: &str, r: f64, nodes: &BTreeSet<NodeId>| {
        let _ = writeln!(s, r#"<g id="{id}" fill="{color}">"#);
        for &v in nodes {
            let (x, y) = pos(v);
            let _ = writeln!(
                s,
                r#"<circle class="{id}" cx="{x:.2}" cy="{y:.2}" r="{r}"/>"#
            );
        }
        s.push_str("</g>\n");
    };

    if on.contains(&Layer::Boundary) {
        let b: BTreeSet<NodeId> = report
            .localization
            .splits
            .iter()
            .flat_map(|sp| sp.repaired.iter().copied())
            .collect();
        dots(&mut s, "boundary", "#e67e22", 4.0, &b);
    }
    if on.contains(&Layer::Removed) {
        let r: BTreeSet<NodeId> = report
            .verdicts
            .iter()
            .flat_map(|v| v.removed.iter().copied())
            .collect();
        dots(&mut s, "removed", "#95a5a6", 4.0, &r);
    }
    if on.contains(&Layer::Survivor) {
        s.push_str(r##"<g id="survivor" fill="none" stroke="#c0392b" stroke-width="2.5">"##);
        s.push('\n');
        for sv in &report.localization.survivors {
            let pts: Vec<String> = sv
                .cycle
                .iter()
                .chain(sv.cycle.first())
                .map(|&v| {
                    let (x, y) = pos(v);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline class="survivor" data-partition="{}" points="{}"/>"#,
                sv.partition,
                pts.join(" ")
            );
        }
        s.push_str("</g>\n");
    }
    if on.contains(&Layer::Flagged) {
        s.push_str(r##"<g id="flagged" stroke="#8e44ad" stroke-width="3">"##);
        s.push('\n');
        for v in &report.verdicts {
            for &(a, b) in &v.flagged_pairs {
                let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
                let _ = writeln!(
                    s,
                    r#"<line class="flagged" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#
                );
            }
        }
        s.push_str("</g>\n");
    }

    let all: BTreeSet<NodeId> = g.nodes().collect();
    dots(&mut s, "nodes", "#2c3e50", 2.0, &all);
    s.push_str("</svg>\n");
    s
}
