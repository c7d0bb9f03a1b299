//! Gantt renderers for a day schedule: SVG 1.1 for files, fixed-width
//! text for terminals. Both are hand-rolled so output bytes depend only
//! on the input — identical scenarios and timelines render identically.

use meltline::scenario::Scenario;
use meltline::schedule::{EventKind, Timeline};

const LEFT: f64 = 110.0;
const PLOT_W: f64 = 780.0;
const TOP: f64 = 40.0;
const ROW_H: f64 = 30.0;
const BAR_H: f64 = 20.0;
const TEXT_CELLS: usize = 60;

const MELT_FILL: &str = "#4c78a8";
const CAST_FILL: &str = "#e08214";
const POUR_STROKE: &str = "#333333";

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// Resource rows in presentation order: furnaces first, tanks below,
/// both as declared in the scenario.
fn rows(scenario: &Scenario) -> Vec<&str> {
    scenario
        .furnaces
        .iter()
        .map(|f| f.id.as_str())
        .chain(scenario.tanks.iter().map(|t| t.id.as_str()))
        .collect()
}

/// Renders the timeline as a standalone SVG 1.1 document: one row per
/// resource, one rectangle per melt or cast (widths proportional to
/// minutes), and a vertical tick per pour.
pub fn render_svg(scenario: &Scenario, timeline: &Timeline) -> String {
    let rows = rows(scenario);
    let horizon = timeline.horizon_min;
    let scale = if horizon > 0.0 { PLOT_W / horizon } else { 0.0 };
    let x = |minute: f64| LEFT + minute * scale;

    let axis_y = TOP + rows.len() as f64 * ROW_H + 10.0;
    let height = axis_y + 30.0;
    let width = LEFT + PLOT_W + 20.0;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n"
    ));
    svg.push_str(&format!("  <rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"#ffffff\"/>\n"));
    svg.push_str(&format!(
        "  <text x=\"{LEFT:.0}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" fill=\"#222222\">{} day schedule, horizon {horizon:.0} min</text>\n",
        escape(&scenario.name)
    ));

    for (i, id) in rows.iter().enumerate() {
        let lane_y = TOP + i as f64 * ROW_H + (ROW_H - BAR_H) / 2.0;
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\" fill=\"#222222\">{}</text>\n",
            LEFT - 10.0,
            lane_y + BAR_H - 6.0,
            escape(id)
        ));
        svg.push_str(&format!(
            "  <rect x=\"{LEFT:.2}\" y=\"{lane_y:.2}\" width=\"{PLOT_W:.2}\" height=\"{BAR_H:.2}\" fill=\"#f0f0f0\"/>\n"
        ));
        for event in timeline.events.iter().filter(|e| e.resource_id == *id) {
            match event.kind {
                EventKind::Pour => {
                    let px = x(event.start_min);
                    svg.push_str(&format!(
                        "  <line x1=\"{px:.2}\" y1=\"{lane_y:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"{POUR_STROKE}\" stroke-width=\"1.5\"/>\n",
                        lane_y + BAR_H
                    ));
                }
                EventKind::Melt | EventKind::Cast => {
                    let fill = if event.kind == EventKind::Melt { MELT_FILL } else { CAST_FILL };
                    svg.push_str(&format!(
                        "  <rect x=\"{:.2}\" y=\"{lane_y:.2}\" width=\"{:.2}\" height=\"{BAR_H:.2}\" fill=\"{fill}\"><title>{} {} [{:.0}, {:.0}] min</title></rect>\n",
                        x(event.start_min),
                        (event.end_min - event.start_min) * scale,
                        escape(&event.resource_id),
                        event.kind,
                        event.start_min,
                        event.end_min
                    ));
                }
            }
        }
    }

    svg.push_str(&format!(
        "  <line x1=\"{LEFT:.2}\" y1=\"{axis_y:.2}\" x2=\"{:.2}\" y2=\"{axis_y:.2}\" stroke=\"#888888\" stroke-width=\"1\"/>\n",
        LEFT + PLOT_W
    ));
    for i in 0..=6 {
        let minute = horizon * i as f64 / 6.0;
        let tick_x = x(minute);
        svg.push_str(&format!(
            "  <line x1=\"{tick_x:.2}\" y1=\"{axis_y:.2}\" x2=\"{tick_x:.2}\" y2=\"{:.2}\" stroke=\"#888888\" stroke-width=\"1\"/>\n",
            axis_y + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{tick_x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"10\" fill=\"#555555\">{minute:.0}</text>\n",
            axis_y + 18.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders the timeline as a fixed-width text chart, one line per
/// resource: `M` melting, `C` casting, `|` a pour, `.` idle.
pub fn render_text(scenario: &Scenario, timeline: &Timeline) -> String {
    let rows = rows(scenario);
    let horizon = timeline.horizon_min;
    let label_w = rows.iter().map(|id| id.len()).max().unwrap_or(0).max(4);
    let cell = |minute: f64| -> usize {
        if horizon <= 0.0 {
            return 0;
        }
        ((minute / horizon) * TEXT_CELLS as f64).floor() as usize
    };

    let mut out = String::new();
    out.push('\n');
    out.push_str(&format!(
        "  {:<label_w$}  0{:>width$}\n",
        "",
        format!("{horizon:.0} min"),
        width = TEXT_CELLS - 1
    ));
    for id in rows {
        let mut cells = vec!['.'; TEXT_CELLS];
        for event in timeline.events.iter().filter(|e| e.resource_id == id) {
            match event.kind {
                EventKind::Pour => {}
                EventKind::Melt | EventKind::Cast => {
                    let glyph = if event.kind == EventKind::Melt { 'M' } else { 'C' };
                    let from = cell(event.start_min).min(TEXT_CELLS - 1);
                    let to = cell(event.end_min).clamp(from + 1, TEXT_CELLS);
                    for c in &mut cells[from..to] {
                        *c = glyph;
                    }
                }
            }
        }
        // Pours overlay the bars so the hand-off instants stay visible.
        for event in timeline.events.iter().filter(|e| e.resource_id == id && e.kind == EventKind::Pour) {
            let at = cell(event.start_min).min(TEXT_CELLS - 1);
            cells[at] = '|';
        }
        out.push_str(&format!("  {id:<label_w$}  {}\n", cells.iter().collect::<String>()));
    }
    out.push_str(&format!("  {:<label_w$}  M melt   C cast   | pour   . idle\n", ""));
    out
}
