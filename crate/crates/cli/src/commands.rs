use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use polariscope_core::abm::{run_ensemble, run_trajectory, EnsembleSummary, Sample, SimError};
use polariscope_core::logic_switch_advantage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::CliError;
use crate::spec::{RunSpec, SweepRun};

/// Version of the CSV and sidecar layouts.
pub const SCHEMA_VERSION: u32 = 1;

pub const PORTRAIT_HEADER: [&str; 4] = ["p", "chi", "s_p", "s_x"];
pub const EQUILIBRIA_HEADER: [&str; 4] = ["p_star", "stability", "basin_lo", "basin_hi"];
pub const ESCAPE_HEADER: [&str; 2] = ["chi", "escape_frequency"];
pub const INVADE_HEADER: [&str; 3] = ["chi", "p_g", "advantage"];
pub const TRAJECTORY_HEADER: [&str; 9] = [
    "event",
    "mean_p",
    "mean_p_g1",
    "mean_p_g2",
    "theta",
    "mean_w",
    "mean_w_g1",
    "mean_w_g2",
    "inequality",
];
pub const SUMMARY_HEADER: [&str; 5] = [
    "final_mean_p",
    "final_inequality",
    "final_mean_w",
    "final_mean_w_g1",
    "final_mean_w_g2",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Selection and sorting gradients on a (p, chi) grid.
    PhasePortrait,
    /// Fixed points of p at the configured chi.
    Equilibria,
    /// Fraction that must switch to p = 0 to leave the polarized basin.
    Escape,
    /// Advantage of the two-dimensional OR logic over group-only choice.
    Invade,
    /// One simulated replicate.
    Trajectory,
    /// Mean over replicates plus final-state summary.
    Ensemble,
    /// Escape frequency or ensemble summary across one parameter.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PhasePortrait => "phase-portrait",
            Command::Equilibria => "equilibria",
            Command::Escape => "escape",
            Command::Invade => "invade",
            Command::Trajectory => "trajectory",
            Command::Ensemble => "ensemble",
            Command::Sweep => "sweep",
        }
    }
}

/// Files written by one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub sidecar: PathBuf,
}

type Row = Vec<String>;

fn num(v: f64) -> String {
    format!("{v:?}")
}

struct Table {
    file: &'static str,
    header: Vec<String>,
    rows: Vec<Row>,
}

impl Table {
    fn new(file: &'static str, header: &[&str]) -> Self {
        Self {
            file,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

fn summary_row(s: &EnsembleSummary) -> Row {
    [
        s.final_mean_p.mean,
        s.final_inequality.mean,
        s.final_mean_w.mean,
        s.final_mean_w_g1.mean,
        s.final_mean_w_g2.mean,
    ]
    .map(num)
    .to_vec()
}

/// Run `command` and write its CSV files and JSON sidecar into `out`.
pub fn execute(command: Command, spec: &RunSpec, out: &Path) -> Result<Report, CliError> {
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut extra = serde_json::Map::new();
    let tables = match command {
        Command::PhasePortrait => {
            let mut t = Table::new("phase-portrait.csv", &PORTRAIT_HEADER);
            for g in spec.model()?.phase_portrait(spec.p_resolution, spec.chi_resolution)? {
                t.rows.push(vec![num(g.p), num(g.chi), num(g.s_p), num(g.s_x)]);
            }
            vec![t]
        }
        Command::Equilibria => {
            let mut t = Table::new("equilibria.csv", &EQUILIBRIA_HEADER);
            for e in spec.model()?.find_equilibria(spec.chi, spec.grid_n)? {
                t.rows.push(vec![num(e.p_star), e.stability.to_string(), num(e.basin.0), num(e.basin.1)]);
            }
            vec![t]
        }
        Command::Escape => {
            let mut t = Table::new("escape.csv", &ESCAPE_HEADER);
            let f = spec.model()?.escape_frequency_with_grid(spec.chi, spec.grid_n)?;
            t.rows.push(vec![num(spec.chi), num(f)]);
            vec![t]
        }
        Command::Invade => {
            let (econ, shape) = (spec.econ()?, spec.shape());
            let cells: Vec<(f64, f64)> = (0..spec.chi_resolution)
                .flat_map(|i| {
                    let chi = -1.0 + 2.0 * i as f64 / (spec.chi_resolution - 1) as f64;
                    (0..spec.p_resolution).map(move |j| (chi, j as f64 / (spec.p_resolution - 1) as f64))
                })
                .collect();
            let values = cells
                .par_iter()
                .map(|&(chi, p_g)| logic_switch_advantage(&econ, &shape, chi, p_g))
                .collect::<Result<Vec<f64>, _>>()?;
            let mut t = Table::new("invade.csv", &INVADE_HEADER);
            for ((chi, p_g), v) in cells.into_iter().zip(values) {
                t.rows.push(vec![num(chi), num(p_g), num(v)]);
            }
            vec![t]
        }
        Command::Trajectory => {
            let record = run_trajectory(&spec.sim_config()?, spec.replicate).map_err(|e| sim_error(e, command, out))?;
            let mut t = Table::new("trajectory.csv", &TRAJECTORY_HEADER);
            t.rows = record.samples.iter().map(sample_row).collect();
            vec![t]
        }
        Command::Ensemble => {
            let result = run_ensemble(&spec.sim_config()?).map_err(|e| sim_error(e, command, out))?;
            let mut t = Table::new("ensemble.csv", &TRAJECTORY_HEADER);
            t.rows = result.mean.samples.iter().map(sample_row).collect();
            let mut s = Table::new("ensemble_summary.csv", &SUMMARY_HEADER);
            s.rows.push(summary_row(&result.summary));
            extra.insert("summary".into(), serde_json::to_value(result.summary).expect("summary serializes"));
            vec![t, s]
        }
        Command::Sweep => vec![sweep(spec, out)?],
    };

    let mut outputs = Vec::new();
    for table in &tables {
        check_finite(table, spec, command, out)?;
        let path = out.join(table.file);
        write_csv(&path, table)?;
        outputs.push(path);
    }
    let sidecar = out.join(format!("{}.json", command.name()));
    let mut meta = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": spec.seed,
        "spec": spec,
        "outputs": tables.iter().map(|t| t.file).collect::<Vec<_>>(),
    });
    meta.as_object_mut().expect("object").extend(extra);
    write_json(&sidecar, &meta)?;
    Ok(Report { outputs, sidecar })
}

fn sweep(spec: &RunSpec, out: &Path) -> Result<Table, CliError> {
    let sweep = spec
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("the sweep command needs sweep.param, sweep.min and sweep.max".into()))?;
    let points = sweep
        .values()
        .into_iter()
        .map(|v| spec.with_param(&sweep.param, v).map(|s| (v, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut header = vec![sweep.param.as_str()];
    let table = match sweep.run {
        SweepRun::Escape => {
            header.push("escape_frequency");
            let mut t = Table::new("sweep.csv", &header);
            let values = points
                .par_iter()
                .map(|(_, s)| s.model()?.escape_frequency_with_grid(s.chi, s.grid_n).map_err(CliError::from))
                .collect::<Result<Vec<f64>, _>>()?;
            for ((v, _), f) in points.iter().zip(values) {
                t.rows.push(vec![num(*v), num(f)]);
            }
            t
        }
        SweepRun::Ensemble => {
            header.extend(SUMMARY_HEADER);
            let mut t = Table::new("sweep.csv", &header);
            for (v, s) in &points {
                let result = run_ensemble(&s.sim_config()?).map_err(|e| sim_error(e, Command::Sweep, out))?;
                let mut row = vec![num(*v)];
                row.extend(summary_row(&result.summary));
                t.rows.push(row);
            }
            t
        }
    };
    Ok(table)
}

fn sample_row(s: &Sample) -> Row {
    let mut row = vec![s.event.to_string()];
    row.extend(
        [s.mean_p, s.mean_p_g1, s.mean_p_g2, s.theta, s.mean_w, s.mean_w_g1, s.mean_w_g2, s.inequality].map(num),
    );
    row
}

fn sim_error(e: SimError, command: Command, out: &Path) -> CliError {
    match e {
        SimError::NonFinite {
            event,
            individual,
            value,
            snapshot,
        } => {
            let message = format!("utility {value} for individual {individual} at event {event}");
            dump_state(out, command, &message, &*snapshot)
        }
        other => other.into(),
    }
}

fn dump_state<T: Serialize + ?Sized>(out: &Path, command: Command, message: &str, state: &T) -> CliError {
    let dump = out.join(format!("{}.nonfinite.json", command.name()));
    let body = json!({ "message": message, "state": state });
    match write_json(&dump, &body) {
        Ok(()) => CliError::NonFinite {
            message: message.to_owned(),
            dump,
        },
        Err(e) => e,
    }
}

fn check_finite(table: &Table, spec: &RunSpec, command: Command, out: &Path) -> Result<(), CliError> {
    for (k, row) in table.rows.iter().enumerate() {
        for (name, cell) in table.header.iter().zip(row) {
            if matches!(cell.as_str(), "NaN" | "inf" | "-inf") {
                let message = format!("{name} = {cell} in row {k} of {}", table.file);
                return Err(dump_state(out, command, &message, &json!({ "spec": spec, "row": row })));
            }
        }
    }
    Ok(())
}

fn write_csv(path: &Path, table: &Table) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    let to_io = |e: csv::Error| CliError::Io {
        path: path.to_owned(),
        source: e.into(),
    };
    writer.write_record(&table.header).map_err(to_io)?;
    for row in &table.rows {
        writer.write_record(row).map_err(to_io)?;
    }
    writer.flush().map_err(CliError::io(path))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json serializes");
    text.push('\n');
    let mut file = File::create(path).map_err(CliError::io(path))?;
    file.write_all(text.as_bytes()).map_err(CliError::io(path))
}
