use std::fmt::Write;

use serde::{Deserialize, Serialize};

/// Wall-clock milliseconds per phase of one frame.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    /// Light plus geometry injection, per cascade.
    pub injection_ms: Vec<f64>,
    pub propagation_ms: Vec<f64>,
    /// Per-pixel gathering.
    pub light_buffer_ms: f64,
    pub rsm_ms: f64,
    pub gbuffer_ms: f64,
}

impl PhaseTimings {
    pub fn new(cascades: usize) -> Self {
        Self {
            injection_ms: vec![0.0; cascades],
            propagation_ms: vec![0.0; cascades],
            ..Self::default()
        }
    }

    pub fn total_ms(&self) -> f64 {
        self.injection_ms.iter().sum::<f64>()
            + self.propagation_ms.iter().sum::<f64>()
            + self.light_buffer_ms
            + self.rsm_ms
            + self.gbuffer_ms
    }

    pub fn propagation_total_ms(&self) -> f64 {
        self.propagation_ms.iter().sum()
    }

    /// Per-field median over frames. Frames must share a cascade count.
    pub fn median(frames: &[PhaseTimings]) -> PhaseTimings {
        let Some(first) = frames.first() else {
            return PhaseTimings::default();
        };
        let col = |f: &dyn Fn(&PhaseTimings) -> f64| median(frames.iter().map(f).collect());
        PhaseTimings {
            injection_ms: (0..first.injection_ms.len())
                .map(|k| col(&|t| t.injection_ms[k]))
                .collect(),
            propagation_ms: (0..first.propagation_ms.len())
                .map(|k| col(&|t| t.propagation_ms[k]))
                .collect(),
            light_buffer_ms: col(&|t| t.light_buffer_ms),
            rsm_ms: col(&|t| t.rsm_ms),
            gbuffer_ms: col(&|t| t.gbuffer_ms),
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One basis in a timing report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub label: String,
    pub with_shadows: PhaseTimings,
    pub without_shadows: PhaseTimings,
}

fn joined(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.3}"))
        .collect::<Vec<_>>()
        .join(" / ")
}

/// Plain-text table with one block per shadow setting: injection and
/// propagation per cascade, then the light buffer.
pub fn timing_report(rows: &[TimingRow]) -> String {
    let cascades = rows
        .first()
        .map_or(3, |r| r.with_shadows.propagation_ms.len());
    let names = ["small", "medium", "big"];
    let header_cascades = if cascades == 3 {
        names.join("/")
    } else {
        (0..cascades).map(|k| k.to_string()).collect::<Vec<_>>().join("/")
    };
    let inj_h = format!("Injection (ms) Cascades {header_cascades}");
    let prop_h = format!("Propagation (ms) Cascades {header_cascades}");
    let label_w = rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(8);
    let cells = |t: &PhaseTimings| (joined(&t.injection_ms), joined(&t.propagation_ms));
    let inj_w = rows
        .iter()
        .flat_map(|r| [cells(&r.with_shadows).0.len(), cells(&r.without_shadows).0.len()])
        .max()
        .unwrap_or(0)
        .max(inj_h.len());
    let prop_w = rows
        .iter()
        .flat_map(|r| [cells(&r.with_shadows).1.len(), cells(&r.without_shadows).1.len()])
        .max()
        .unwrap_or(0)
        .max(prop_h.len());

    let mut out = String::new();
    let _ = writeln!(out, "{:label_w$}  {inj_h:inj_w$}  {prop_h:prop_w$}  Light Buffer (ms)", "");
    for (title, pick) in [
        ("Results with indirect shadows", true),
        ("Results without indirect shadows", false),
    ] {
        let _ = writeln!(out, "{title}");
        for r in rows {
            let t = if pick { &r.with_shadows } else { &r.without_shadows };
            let (inj, prop) = cells(t);
            let _ = writeln!(out, "{:label_w$}  {inj:inj_w$}  {prop:prop_w$}  {:.3}", r.label, t.light_buffer_ms);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(p: f64) -> PhaseTimings {
        PhaseTimings {
            injection_ms: vec![1.0, 2.0, 3.0],
            propagation_ms: vec![p, p + 0.5, p + 1.0],
            light_buffer_ms: 0.25,
            rsm_ms: 1.0,
            gbuffer_ms: 2.0,
        }
    }

    #[test]
    fn medians() {
        let m = PhaseTimings::median(&[t(3.0), t(1.0), t(2.0)]);
        assert_eq!(m.propagation_ms, vec![2.0, 2.5, 3.0]);
        let m = PhaseTimings::median(&[t(1.0), t(2.0)]);
        assert_eq!(m.propagation_ms[0], 1.5);
        assert_eq!(t(1.0).total_ms(), 6.0 + 4.5 + 3.25);
    }

    #[test]
    fn report_shape() {
        let rows: Vec<TimingRow> = ["SH2", "SRBF4", "SRBF8v2"]
            .iter()
            .enumerate()
            .map(|(i, l)| TimingRow {
                label: l.to_string(),
                with_shadows: t(i as f64 + 1.0),
                without_shadows: t(i as f64),
            })
            .collect();
        let report = timing_report(&rows);
        let lines: Vec<&str> = report.lines().collect();
        assert_eq!(lines.len(), 1 + 2 * (1 + 3));
        assert!(lines[0].contains("Injection (ms) Cascades small/medium/big"));
        assert_eq!(lines[1], "Results with indirect shadows");
        assert_eq!(lines[5], "Results without indirect shadows");
        let row = lines[4];
        assert!(row.starts_with("SRBF8v2"));
        assert!(row.contains("3.000 / 3.500 / 4.000"));
        // Seven timing values per row.
        let numbers = row.split_whitespace().filter(|w| w.parse::<f64>().is_ok()).count();
        assert_eq!(numbers, 7);
    }
}
