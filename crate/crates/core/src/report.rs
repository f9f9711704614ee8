//! Text exports: trace CSV, summary JSON, comparison report and plot data.
//!
//! Numbers are written with six significant digits. Traces and plot files use
//! SI units; the only derived column is the AEC in kWh/100km.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::scenario::{PhaseSchedule, Scenario};
use crate::sim::{compare, kwh_per_100km, CompareReport, SimError, SimTrace, Summary};

/// Formats `x` with six significant digits, `%g` style.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    // the exponent after rounding decides between fixed and scientific
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column names of [`trace_csv`], one `color_<id>` column per light.
pub fn trace_header(trace: &SimTrace) -> Vec<String> {
    let mut cols: Vec<String> = [
        "t_s", "s_m", "v_mps", "a_mps2", "j_mps3", "force_n", "warning",
    ]
    .iter()
    .map(|c| c.to_string())
    .collect();
    cols.extend(trace.light_ids.iter().map(|id| format!("color_{id}")));
    cols.extend(["iec_jpm", "aec_jpm", "aec_kwh_per_100km"].map(String::from));
    cols
}

pub fn trace_csv(trace: &SimTrace) -> String {
    let mut out = trace_header(trace).join(",");
    out.push('\n');
    for x in &trace.samples {
        let mut row = [x.t, x.s, x.v, x.a, x.j, x.force].map(sig6).join(",");
        row.push(',');
        row.push_str(x.warning.as_str());
        for c in &x.colors {
            row.push(',');
            row.push_str(c.as_str());
        }
        for v in [x.iec, x.aec, kwh_per_100km(x.aec)] {
            row.push(',');
            row.push_str(&sig6(v));
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Pairwise comparisons of every trace against every later one, in order.
pub fn pairwise(traces: &[SimTrace]) -> Result<Vec<CompareReport>, SimError> {
    let mut out = Vec::new();
    for (i, a) in traces.iter().enumerate() {
        for b in &traces[i + 1..] {
            out.push(compare(a, b)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryDocument<'a> {
    pub scenario: &'a str,
    pub runs: Vec<&'a Summary>,
    pub comparisons: &'a [CompareReport],
}

pub fn summary_json(traces: &[SimTrace], comparisons: &[CompareReport]) -> String {
    let doc = SummaryDocument {
        scenario: traces.first().map_or("", |t| t.scenario.as_str()),
        runs: traces.iter().map(|t| &t.summary).collect(),
        comparisons,
    };
    serde_json::to_string_pretty(&doc).expect("summary is plain data")
}

/// Human-readable report of the runs and their pairwise comparisons.
pub fn summary_text(traces: &[SimTrace], comparisons: &[CompareReport]) -> String {
    let mut out = String::new();
    if let Some(first) = traces.first() {
        let _ = writeln!(out, "scenario: {}", first.scenario);
    }
    let _ = writeln!(
        out,
        "{:<20} {:>5} {:>10} {:>14} {:>10}  crossings",
        "driver", "stops", "time_s", "aec_kwh/100km", "rms_jerk"
    );
    for t in traces {
        let s = &t.summary;
        let crossings: Vec<String> = s
            .crossings
            .iter()
            .map(|c| format!("{}@{}s:{}", c.id, sig6(c.t), c.color))
            .collect();
        let _ = writeln!(
            out,
            "{:<20} {:>5} {:>10} {:>14} {:>10}  {}",
            s.driver.as_str(),
            s.stops,
            sig6(s.travel_time),
            sig6(s.final_aec_kwh_per_100km),
            sig6(s.rms_jerk),
            crossings.join(" ")
        );
        if s.mpc_fallbacks > 0 {
            let _ = writeln!(out, "{:<20} mpc fallbacks: {}", "", s.mpc_fallbacks);
        }
    }
    for c in comparisons {
        let _ = writeln!(
            out,
            "{} -> {}: energy reduction {}%, stops {} -> {}, travel time {} s -> {} s",
            c.first.driver,
            c.second.driver,
            sig6(c.energy_reduction_pct),
            c.first.stops,
            c.second.stops,
            sig6(c.first.travel_time),
            sig6(c.second.travel_time)
        );
    }
    out
}

/// Green windows of `light` intersecting `[0, until]`.
pub fn green_windows(light: &PhaseSchedule, until: f64) -> Vec<(f64, f64)> {
    let mut start = light.offset - light.cycle * (light.offset / light.cycle).ceil();
    let mut out = Vec::new();
    while start < until {
        let end = start + light.green;
        if end > 0.0 {
            out.push((start.max(0.0), end.min(until)));
        }
        start += light.cycle;
    }
    out
}

/// One long-format CSV per figure family, keyed by file name.
///
/// | file | columns |
/// |---|---|
/// | `abscissa.csv` | driver, t_s, s_m |
/// | `velocity.csv` | driver, s_m, v_mps |
/// | `acceleration.csv` | driver, s_m, a_mps2 |
/// | `aec.csv` | driver, s_m, aec_kwh_per_100km |
/// | `light_windows.csv` | light, stop_line_m, green_from_s, green_to_s |
pub fn plot_data(scenario: &Scenario, traces: &[SimTrace]) -> Vec<(&'static str, String)> {
    let series = |header: &str, f: &dyn Fn(&crate::sim::Sample) -> (f64, f64)| {
        let mut out = format!("{header}\n");
        for t in traces {
            for x in &t.samples {
                let (a, b) = f(x);
                let _ = writeln!(out, "{},{},{}", t.driver, sig6(a), sig6(b));
            }
        }
        out
    };
    let until = traces
        .iter()
        .map(|t| t.summary.travel_time)
        .fold(0.0, f64::max);
    let mut windows = String::from("light,stop_line_m,green_from_s,green_to_s\n");
    for light in &scenario.lights {
        for (from, to) in green_windows(light, until) {
            let _ = writeln!(
                windows,
                "{},{},{},{}",
                light.id,
                sig6(light.stop_line),
                sig6(from),
                sig6(to)
            );
        }
    }
    vec![
        ("abscissa.csv", series("driver,t_s,s_m", &|x| (x.t, x.s))),
        ("velocity.csv", series("driver,s_m,v_mps", &|x| (x.s, x.v))),
        (
            "acceleration.csv",
            series("driver,s_m,a_mps2", &|x| (x.s, x.a)),
        ),
        (
            "aec.csv",
            series("driver,s_m,aec_kwh_per_100km", &|x| {
                (x.s, kwh_per_100km(x.aec))
            }),
        ),
        ("light_windows.csv", windows),
    ]
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, Default)]
pub struct Written {
    pub files: Vec<PathBuf>,
}

/// Writes `<driver>.csv` per trace, `summary.json`, `report.txt` and, when
/// `plots` is set, the plot data under `plots/`.
pub fn write_outputs(
    dir: &Path,
    scenario: &Scenario,
    traces: &[SimTrace],
    comparisons: &[CompareReport],
    plots: bool,
) -> io::Result<Written> {
    fs::create_dir_all(dir)?;
    let mut written = Written::default();
    let mut put = |path: PathBuf, body: &str| -> io::Result<()> {
        fs::write(&path, body)?;
        written.files.push(path);
        Ok(())
    };
    for t in traces {
        put(dir.join(format!("{}.csv", t.driver)), &trace_csv(t))?;
    }
    put(dir.join("summary.json"), &summary_json(traces, comparisons))?;
    put(dir.join("report.txt"), &summary_text(traces, comparisons))?;
    if plots {
        let sub = dir.join("plots");
        fs::create_dir_all(&sub)?;
        for (name, body) in plot_data(scenario, traces) {
            put(sub.join(name), &body)?;
        }
    }
    Ok(written)
}
