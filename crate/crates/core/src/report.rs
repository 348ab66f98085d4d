//! Gantt charts, comparison tables and plot-data export.
//!
//! Everything here is a pure function of already computed schedules and
//! metrics; nothing re-derives scheduling decisions.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::Schedule;
use crate::error::{Error, Result};
use crate::metrics::{join_trace, Average, MetricsReport};
use crate::workload::Tick;

const IDLE_LABEL: &str = "--";

struct Bar<'a> {
    label: &'a str,
    start: Tick,
    end: Tick,
}

fn bars(schedule: &Schedule, merge_adjacent: bool) -> Vec<Bar<'_>> {
    let mut out: Vec<Bar<'_>> = Vec::with_capacity(schedule.slices.len());
    let mut clock = 0;
    for s in &schedule.slices {
        if s.start > clock {
            out.push(Bar { label: IDLE_LABEL, start: clock, end: s.start });
        }
        match out.last_mut() {
            Some(last) if merge_adjacent && last.label == s.pid.as_str() && last.end == s.start => last.end = s.end,
            _ => out.push(Bar { label: s.pid.as_str(), start: s.start, end: s.end }),
        }
        clock = s.end;
    }
    out
}

/// One-lane text timeline: a row of `|pid|` cells over a row of tick labels
/// aligned with the cell borders. Idle gaps appear as `--` cells.
///
/// With `merge_adjacent`, back-to-back slices of the same process are drawn
/// as a single bar. This is cosmetic; the schedule keeps every slice.
pub fn render_gantt_ascii(schedule: &Schedule, merge_adjacent: bool) -> String {
    let bars = bars(schedule, merge_adjacent);
    let Some(last) = bars.last() else {
        return String::new();
    };
    let mut chart = String::from("|");
    let mut ticks = String::new();
    for bar in &bars {
        let start = bar.start.to_string();
        let width = bar.label.len().max(start.len());
        let _ = write!(chart, "{:^width$}|", bar.label);
        let _ = write!(ticks, "{start:<width$} ");
    }
    ticks.push_str(&last.end.to_string());
    format!("{chart}\n{ticks}\n")
}

const SVG_TIMELINE_WIDTH: f64 = 800.0;
const SVG_MARGIN: f64 = 40.0;
const SVG_BAR_Y: f64 = 30.0;
const SVG_BAR_HEIGHT: f64 = 36.0;
const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7"];

fn svg_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG 1.1 Gantt chart with one `<rect>` per slice.
///
/// The timeline spans a fixed 800 units from tick 0 to the makespan.
pub fn render_gantt_svg(schedule: &Schedule) -> String {
    let makespan = schedule.makespan().max(1) as f64;
    let scale = SVG_TIMELINE_WIDTH / makespan;
    let width = SVG_TIMELINE_WIDTH + 2.0 * SVG_MARGIN;
    let height = SVG_BAR_Y + SVG_BAR_HEIGHT + 40.0;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let trace = join_trace(&schedule.quantum_trace);
    let title = if trace.is_empty() {
        schedule.config.policy.label().to_string()
    } else {
        format!("{} (TQ {trace})", schedule.config.policy.label())
    };
    let _ = writeln!(
        svg,
        r#"  <text x="{SVG_MARGIN:.3}" y="18" font-family="monospace" font-size="13">{}</text>"#,
        svg_escape(&title)
    );

    for slice in &schedule.slices {
        let color_idx = schedule.workload.iter().position(|p| p.pid == slice.pid).unwrap_or(0);
        let x = SVG_MARGIN + slice.start as f64 * scale;
        let w = slice.len() as f64 * scale;
        let _ = writeln!(
            svg,
            r##"  <rect x="{x:.3}" y="{SVG_BAR_Y:.3}" width="{w:.3}" height="{SVG_BAR_HEIGHT:.3}" fill="{}" stroke="#222" stroke-width="1"/>"##,
            PALETTE[color_idx % PALETTE.len()]
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.3}" y="{:.3}" font-family="monospace" font-size="11" text-anchor="middle">{}</text>"#,
            x + w / 2.0,
            SVG_BAR_Y + SVG_BAR_HEIGHT / 2.0 + 4.0,
            svg_escape(slice.pid.as_str())
        );
    }

    let mut boundaries: Vec<Tick> = schedule.slices.iter().flat_map(|s| [s.start, s.end]).collect();
    boundaries.dedup();
    for tick in boundaries {
        let _ = writeln!(
            svg,
            r#"  <text x="{:.3}" y="{:.3}" font-family="monospace" font-size="10" text-anchor="middle">{tick}</text>"#,
            SVG_MARGIN + tick as f64 * scale,
            SVG_BAR_Y + SVG_BAR_HEIGHT + 16.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// One line of an RR-vs-MMRR comparison table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub algorithm: String,
    #[serde(rename = "time_quantum")]
    pub quantum_trace: Vec<Tick>,
    #[serde(rename = "turnaround_time")]
    pub att: Average,
    #[serde(rename = "waiting_time")]
    pub awt: Average,
    #[serde(rename = "context_switch")]
    pub cs: usize,
}

impl ComparisonRow {
    pub fn from_report(algorithm: impl Into<String>, report: &MetricsReport) -> Self {
        ComparisonRow {
            algorithm: algorithm.into(),
            quantum_trace: report.quantum_trace.clone(),
            att: report.avg_turnaround,
            awt: report.avg_waiting,
            cs: report.context_switches,
        }
    }

    fn cells(&self) -> [String; 5] {
        let trace = if self.quantum_trace.is_empty() { "-".to_string() } else { join_trace(&self.quantum_trace) };
        [self.algorithm.clone(), trace, self.att.to_string(), self.awt.to_string(), self.cs.to_string()]
    }
}

pub const TABLE_HEADER: [&str; 5] = ["Algorithm", "Time Quantum", "Turnaround Time", "Waiting Time", "Context Switch"];
const CSV_TABLE_HEADER: [&str; 5] = ["algorithm", "time_quantum", "turnaround_time", "waiting_time", "context_switch"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Text,
    Csv,
    Json,
    Markdown,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(TableFormat::Text),
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            "markdown" | "md" => Ok(TableFormat::Markdown),
            other => Err(Error::Argument(format!("unknown table format `{other}`"))),
        }
    }
}

pub fn render_comparison_table(rows: &[ComparisonRow], format: TableFormat) -> String {
    match format {
        TableFormat::Text => {
            let cells: Vec<[String; 5]> = rows.iter().map(ComparisonRow::cells).collect();
            let mut widths = TABLE_HEADER.map(str::len);
            for row in &cells {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cols: [&str; 5]| {
                let mut s = cols.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ");
                s.truncate(s.trim_end().len());
                s.push('\n');
                s
            };
            let mut out = line(TABLE_HEADER);
            for row in &cells {
                out.push_str(&line([&row[0], &row[1], &row[2], &row[3], &row[4]]));
            }
            out
        }
        TableFormat::Markdown => {
            let mut out = format!("| {} |\n", TABLE_HEADER.join(" | "));
            out.push_str("|---|---|---:|---:|---:|\n");
            for row in rows {
                out.push_str(&format!("| {} |\n", row.cells().join(" | ")));
            }
            out
        }
        TableFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(CSV_TABLE_HEADER).expect("in-memory write");
            for row in rows {
                writer
                    .write_record([
                        row.algorithm.clone(),
                        join_trace(&row.quantum_trace),
                        row.att.to_string(),
                        row.awt.to_string(),
                        row.cs.to_string(),
                    ])
                    .expect("in-memory write");
            }
            String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        TableFormat::Json => {
            let mut out = serde_json::to_string_pretty(rows).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

/// Reads back CSV or JSON produced by [`render_comparison_table`].
pub fn parse_comparison_table(text: &str, format: TableFormat) -> Result<Vec<ComparisonRow>> {
    match format {
        TableFormat::Json => {
            serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line() as u64, message: e.to_string() })
        }
        TableFormat::Csv => {
            let mut reader = csv::Reader::from_reader(text.as_bytes());
            let mut rows = Vec::new();
            for record in reader.records() {
                let record = record
                    .map_err(|e| Error::Parse { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
                let line = record.position().map_or(0, |p| p.line());
                let bad = |what: &str| Error::Parse { line, message: format!("bad {what}") };
                if record.len() != 5 {
                    return Err(bad("column count"));
                }
                let quantum_trace = if record[1].trim().is_empty() {
                    Vec::new()
                } else {
                    record[1]
                        .split(',')
                        .map(|v| v.trim().parse::<Tick>().map_err(|_| bad("time quantum")))
                        .collect::<Result<_>>()?
                };
                rows.push(ComparisonRow {
                    algorithm: record[0].to_string(),
                    quantum_trace,
                    att: record[2].parse().map_err(|_| bad("turnaround time"))?,
                    awt: record[3].parse().map_err(|_| bad("waiting time"))?,
                    cs: record[4].trim().parse().map_err(|_| bad("context switch count"))?,
                });
            }
            Ok(rows)
        }
        TableFormat::Text | TableFormat::Markdown => {
            Err(Error::Argument("only csv and json comparison tables can be parsed".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlotMetric {
    #[serde(rename = "ATT")]
    Att,
    #[serde(rename = "AWT")]
    Awt,
    #[serde(rename = "CS")]
    Cs,
}

impl PlotMetric {
    pub fn label(self) -> &'static str {
        match self {
            PlotMetric::Att => "ATT",
            PlotMetric::Awt => "AWT",
            PlotMetric::Cs => "CS",
        }
    }
}

/// One `(case, algorithm, metric, value)` record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlotRecord {
    pub case: String,
    pub algorithm: String,
    pub metric: PlotMetric,
    pub value: Average,
}

/// Long-format records, three per comparison row, in input order.
pub fn plot_records(cases: &[(String, Vec<ComparisonRow>)]) -> Vec<PlotRecord> {
    let mut out = Vec::new();
    for (case, rows) in cases {
        for row in rows {
            for (metric, value) in [
                (PlotMetric::Att, row.att),
                (PlotMetric::Awt, row.awt),
                (PlotMetric::Cs, Average::integer(row.cs as i64)),
            ] {
                out.push(PlotRecord { case: case.clone(), algorithm: row.algorithm.clone(), metric, value });
            }
        }
    }
    out
}

/// CSV with header `case,algorithm,metric,value`.
pub fn export_plot_data(cases: &[(String, Vec<ComparisonRow>)]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["case", "algorithm", "metric", "value"]).expect("in-memory write");
    for r in plot_records(cases) {
        writer
            .write_record([r.case.as_str(), r.algorithm.as_str(), r.metric.label(), &r.value.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_simulation, SimConfig};
    use crate::metrics::aggregate;
    use crate::workload::ProcessSet;
    use proptest::prelude::*;

    fn illustration_mmrr() -> Schedule {
        let w = ProcessSet::from_triples(&[("P1", 0, 90), ("P2", 0, 96), ("P3", 0, 9), ("P4", 0, 37)]).unwrap();
        run_simulation(&w, &SimConfig::mmrr(25)).unwrap()
    }

    fn table5() -> ProcessSet {
        ProcessSet::from_triples(&[("P1", 0, 20), ("P2", 0, 40), ("P3", 0, 80), ("P4", 0, 160)]).unwrap()
    }

    fn labels_and_ticks(chart: &str) -> (Vec<String>, Vec<Tick>) {
        let mut lines = chart.lines();
        let bars = lines.next().unwrap();
        let ticks = lines.next().unwrap();
        let labels = bars.split('|').filter(|s| !s.is_empty()).map(|s| s.trim().to_string()).collect();
        let ticks = ticks.split_whitespace().map(|t| t.parse().unwrap()).collect();
        (labels, ticks)
    }

    #[test]
    fn ascii_illustration() {
        let chart = render_gantt_ascii(&illustration_mmrr(), false);
        let (labels, ticks) = labels_and_ticks(&chart);
        assert_eq!(labels, ["P3", "P4", "P1", "P2", "P1", "P2"]);
        assert_eq!(ticks, [0, 9, 46, 133, 220, 223, 232]);
    }

    #[test]
    fn ascii_tick_labels_sit_under_borders() {
        let chart = render_gantt_ascii(&illustration_mmrr(), false);
        let mut lines = chart.lines();
        let bars = lines.next().unwrap();
        let ticks = lines.next().unwrap();
        let borders: Vec<usize> = bars.match_indices('|').map(|(i, _)| i).collect();
        let starts: Vec<usize> = ticks
            .char_indices()
            .filter(|&(i, c)| c != ' ' && (i == 0 || ticks.as_bytes()[i - 1] == b' '))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(borders, starts);
    }

    #[test]
    fn ascii_single_slice() {
        let w = ProcessSet::from_triples(&[("P1", 0, 7)]).unwrap();
        let s = run_simulation(&w, &SimConfig::rr(20)).unwrap();
        assert_eq!(render_gantt_ascii(&s, false), "|P1|\n0  7\n");
    }

    #[test]
    fn ascii_merge_adjacent() {
        let s = run_simulation(&table5(), &SimConfig::mmrr(25)).unwrap();
        let (labels, ticks) = labels_and_ticks(&render_gantt_ascii(&s, false));
        assert_eq!(labels, ["P1", "P2", "P3", "P4", "P4"]);
        assert_eq!(ticks, [0, 20, 60, 140, 280, 300]);
        let (labels, ticks) = labels_and_ticks(&render_gantt_ascii(&s, true));
        assert_eq!(labels, ["P1", "P2", "P3", "P4"]);
        assert_eq!(ticks, [0, 20, 60, 140, 300]);
        // rendering does not touch the schedule
        assert_eq!(s.slices.len(), 5);
    }

    #[test]
    fn ascii_shows_idle_gap() {
        let w = ProcessSet::from_triples(&[("P1", 0, 5), ("P2", 40, 10)]).unwrap();
        let s = run_simulation(&w, &SimConfig::rr(20)).unwrap();
        let (labels, ticks) = labels_and_ticks(&render_gantt_ascii(&s, false));
        assert_eq!(labels, ["P1", "--", "P2"]);
        assert_eq!(ticks, [0, 5, 40, 50]);
    }

    fn rect_widths(svg: &str) -> Vec<f64> {
        svg.lines()
            .filter(|l| l.trim_start().starts_with("<rect"))
            .map(|l| {
                let at = l.find("width=\"").unwrap() + 7;
                let rest = &l[at..];
                rest[..rest.find('"').unwrap()].parse().unwrap()
            })
            .collect()
    }

    #[test]
    fn svg_structure_and_determinism() {
        let s = illustration_mmrr();
        let svg = render_gantt_svg(&s);
        assert_eq!(svg.matches("<rect").count(), s.slices.len());
        assert!(svg.contains("version=\"1.1\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg, render_gantt_svg(&s));
    }

    #[test]
    fn svg_rect_widths_scale_with_durations() {
        // makespan 232 with no idle time, so the rects fill the 800-unit timeline
        let s = illustration_mmrr();
        let widths = rect_widths(&render_gantt_svg(&s));
        let total: f64 = widths.iter().sum();
        assert!((total - 800.0).abs() < 1e-2, "{total}");
        let expected: Vec<f64> = s.slices.iter().map(|x| x.len() as f64 * 800.0 / 232.0).collect();
        for (w, e) in widths.iter().zip(&expected) {
            assert!((w - e).abs() < 1e-3);
        }

        let w = ProcessSet::from_triples(&[("P1", 0, 10), ("P2", 30, 10)]).unwrap();
        let s = run_simulation(&w, &SimConfig::rr(20)).unwrap();
        let total: f64 = rect_widths(&render_gantt_svg(&s)).iter().sum();
        assert!((total - 400.0).abs() < 1e-2, "{total}");
    }

    fn case3_rows() -> Vec<ComparisonRow> {
        let rr = aggregate(&run_simulation(&table5(), &SimConfig::rr(20)).unwrap()).unwrap();
        let mmrr = aggregate(&run_simulation(&table5(), &SimConfig::mmrr(25)).unwrap()).unwrap();
        vec![ComparisonRow::from_report("RR", &rr), ComparisonRow::from_report("MMRR", &mmrr)]
    }

    #[test]
    fn case3_text_table() {
        let table = render_comparison_table(&case3_rows(), TableFormat::Text);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("Algorithm  Time Quantum  Turnaround Time  Waiting Time  Context Switch"));
        let mmrr: Vec<&str> = lines[2].split_whitespace().collect();
        assert_eq!(mmrr, ["MMRR", "140,25", "130", "55", "4"]);
    }

    #[test]
    fn trace_cell_is_comma_joined() {
        let row = ComparisonRow {
            algorithm: "MMRR".into(),
            quantum_trace: vec![25, 47, 25, 25, 25],
            att: Average::new(383, 4),
            awt: Average::new(87, 2),
            cs: 7,
        };
        let md = render_comparison_table(std::slice::from_ref(&row), TableFormat::Markdown);
        assert!(md.contains("| MMRR | 25,47,25,25,25 | 95.75 | 43.5 | 7 |"), "{md}");
        let csv = render_comparison_table(&[row], TableFormat::Csv);
        assert_eq!(
            csv,
            "algorithm,time_quantum,turnaround_time,waiting_time,context_switch\nMMRR,\"25,47,25,25,25\",95.75,43.5,7\n"
        );
    }

    #[test]
    fn one_row_table() {
        let rows = &case3_rows()[..1];
        assert_eq!(render_comparison_table(rows, TableFormat::Text).lines().count(), 2);
        assert_eq!(render_comparison_table(rows, TableFormat::Csv).lines().count(), 2);
        assert_eq!(render_comparison_table(rows, TableFormat::Markdown).lines().count(), 3);
    }

    #[test]
    fn text_and_markdown_cannot_be_parsed() {
        assert!(parse_comparison_table("x", TableFormat::Text).is_err());
        assert!(parse_comparison_table("x", TableFormat::Markdown).is_err());
    }

    #[test]
    fn plot_data_records() {
        let rows = case3_rows();
        let cases: Vec<(String, Vec<ComparisonRow>)> = (1..=5).map(|i| (format!("case{i}"), rows.clone())).collect();
        assert_eq!(plot_records(&cases).len(), 30);
        let csv = export_plot_data(&cases);
        assert!(csv.starts_with("case,algorithm,metric,value\n"));
        assert!(csv.contains("case3,RR,ATT,155\n"));
        assert!(csv.contains("case3,MMRR,CS,4\n"));
        assert_eq!(csv.lines().count(), 31);
    }

    fn arb_row() -> impl Strategy<Value = ComparisonRow> {
        (
            "[A-Za-z][A-Za-z0-9 ,]{0,8}",
            prop::collection::vec(1u64..500, 0..6),
            -5000i64..5000,
            1i64..9,
            -5000i64..5000,
            1i64..9,
            0usize..100,
        )
            .prop_map(|(algorithm, quantum_trace, an, ad, wn, wd, cs)| ComparisonRow {
                algorithm,
                quantum_trace,
                att: Average::new(an, ad),
                awt: Average::new(wn, wd),
                cs,
            })
    }

    proptest! {
        #[test]
        fn prop_csv_and_json_round_trip(rows in prop::collection::vec(arb_row(), 1..5)) {
            for format in [TableFormat::Csv, TableFormat::Json] {
                let text = render_comparison_table(&rows, format);
                prop_assert_eq!(parse_comparison_table(&text, format).unwrap(), rows.clone());
            }
        }
    }
}
