//! CSV trace format: one row per (trial, time, agent).
//!
//! Columns are `trial, time, agent`, one `mu_<state>` per state in state-space
//! order, then `m_<j>` forecast columns (present when forecasts were recorded;
//! blank past an agent's signal count) and `regret_weak, regret_true,
//! forecast_kl` (present when diagnostics were recorded). Agents are 1-based.
//! Numbers use the shortest representation that reads back bit-identically;
//! undefined diagnostics are written as `inf`.

use std::io::{Read, Write};
use std::path::Path;

use super::{invalid, Result, Scenario, ScenarioError};
use crate::sim::SimulationTrace;

const DIAGNOSTIC_COLUMNS: [&str; 3] = ["regret_weak", "regret_true", "forecast_kl"];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub trial: usize,
    pub time: usize,
    /// 1-based.
    pub agent: usize,
    pub beliefs: Vec<f64>,
    pub forecast: Vec<Option<f64>>,
    pub diagnostics: Option<[f64; 3]>,
}

fn header(scenario: &Scenario, trace: &SimulationTrace) -> Vec<String> {
    let mut cols: Vec<String> = ["trial", "time", "agent"].map(String::from).to_vec();
    cols.extend(scenario.space().names().iter().map(|s| format!("mu_{s}")));
    if trace.trials.first().is_some_and(|t| t.forecasts.is_some()) {
        let width = scenario
            .models()
            .agents()
            .iter()
            .map(|a| a.n_signals())
            .max()
            .unwrap_or(0);
        cols.extend((1..=width).map(|j| format!("m_{j}")));
    }
    if trace
        .trials
        .first()
        .is_some_and(|t| t.diagnostics.is_some())
    {
        cols.extend(DIAGNOSTIC_COLUMNS.map(String::from));
    }
    cols
}

/// Writes `trace` as CSV to any writer.
pub fn write_trace<W: Write>(scenario: &Scenario, trace: &SimulationTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let cols = header(scenario, trace);
    w.write_record(&cols)?;
    let width = cols.iter().filter(|c| c.starts_with("m_")).count();
    let mut record: Vec<String> = Vec::with_capacity(cols.len());
    for trial in &trace.trials {
        for (t, &time) in trial.times.iter().enumerate() {
            let state = &trial.beliefs[t];
            for k in 0..state.n_agents() {
                record.clear();
                record.push(trial.trial.to_string());
                record.push(time.to_string());
                record.push((k + 1).to_string());
                record.extend(state.agent(k).iter().map(f64::to_string));
                if let Some(f) = &trial.forecasts {
                    let m = &f[t][k];
                    record.extend(
                        (0..width).map(|j| m.get(j).map_or_else(String::new, f64::to_string)),
                    );
                }
                if let Some(d) = &trial.diagnostics {
                    let d = d[t][k];
                    record.extend(
                        [d.regret_weak, d.regret_true, d.forecast_kl].map(|x| x.to_string()),
                    );
                }
                w.write_record(&record)?;
            }
        }
    }
    w.flush().map_err(|source| ScenarioError::Io {
        path: "<csv>".into(),
        source,
    })?;
    Ok(())
}

/// Writes `trace` as CSV to `path`.
pub fn export_trace(
    scenario: &Scenario,
    trace: &SimulationTrace,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_trace(scenario, trace, std::io::BufWriter::new(file))
}

/// Reads a trace written by [`write_trace`]; returns the header and rows.
pub fn read_trace<R: Read>(input: R) -> Result<(Vec<String>, Vec<TraceRow>)> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header.get(..3) != Some(&["trial".to_string(), "time".into(), "agent".into()][..]) {
        return Err(invalid("trace", "header must start with trial,time,agent"));
    }
    let n_mu = header.iter().filter(|c| c.starts_with("mu_")).count();
    let n_m = header.iter().filter(|c| c.starts_with("m_")).count();
    let has_diag = header.iter().any(|c| c == DIAGNOSTIC_COLUMNS[0]);

    let int = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| invalid("trace", format!("`{s}`: {e}")))
    };
    let float = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| invalid("trace", format!("`{s}`: {e}")))
    };

    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| invalid("trace", "short record"));
        let beliefs = (3..3 + n_mu)
            .map(|i| float(field(i)?))
            .collect::<Result<Vec<_>>>()?;
        let forecast = (3 + n_mu..3 + n_mu + n_m)
            .map(|i| {
                let s = field(i)?;
                if s.is_empty() {
                    Ok(None)
                } else {
                    float(s).map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let diagnostics = if has_diag {
            let base = 3 + n_mu + n_m;
            Some([
                float(field(base)?)?,
                float(field(base + 1)?)?,
                float(field(base + 2)?)?,
            ])
        } else {
            None
        };
        rows.push(TraceRow {
            trial: int(field(0)?)?,
            time: int(field(1)?)?,
            agent: int(field(2)?)?,
            beliefs,
            forecast,
            diagnostics,
        });
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::fixtures;
    use crate::sim::{run, SimulationConfig, UpdateModel};

    #[test]
    fn priors_only_trace() {
        let s = fixtures::load("three_agent").unwrap();
        let mut cfg = SimulationConfig::new(UpdateModel::Diffusion, 1);
        cfg.record_stride = 2;
        let trace = run(&s, &cfg).unwrap();
        let mut buf = Vec::new();
        write_trace(&s, &trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trial,time,agent,mu_theta1,mu_theta2,mu_theta3");
        assert_eq!(lines.len(), 1 + 3);
    }

    #[test]
    fn roundtrip_is_exact() {
        let s = fixtures::load("fig6_caseB").unwrap();
        let mut cfg = SimulationConfig::new(UpdateModel::SelfAware, 30);
        cfg.trials = 2;
        cfg.record_forecasts = true;
        cfg.record_diagnostics = true;
        let trace = run(&s, &cfg).unwrap();
        let mut buf = Vec::new();
        write_trace(&s, &trace, &mut buf).unwrap();
        let (header, rows) = read_trace(buf.as_slice()).unwrap();
        assert_eq!(header.len(), 3 + 3 + 2 + 3);
        assert_eq!(rows.len(), 2 * 31 * 8);
        let row = rows
            .iter()
            .find(|r| r.trial == 1 && r.time == 30 && r.agent == 7)
            .unwrap();
        let trial = &trace.trials[1];
        assert_eq!(row.beliefs, trial.last().agent(6));
        let m: Vec<f64> = row.forecast.iter().map(|x| x.unwrap()).collect();
        assert_eq!(m, trial.forecasts.as_ref().unwrap()[30][6]);
        let d = trial.diagnostics.as_ref().unwrap()[30][6];
        assert_eq!(
            row.diagnostics.unwrap(),
            [d.regret_weak, d.regret_true, d.forecast_kl]
        );
    }
}
