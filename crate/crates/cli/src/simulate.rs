use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use bgkpml::grid::{write_snapshot, SnapshotMeta};
use bgkpml::scenarios::{
    functional, probe_csv, run_pair, run_single, FunctionalKind, RunKind, ScenarioConfig, Trajectory,
};
use bgkpml::Error;
use clap::Args;
use log::{info, warn};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario config (TOML). Unset keys take the case preset.
    pub config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Run only the layered system; no functionals are computed.
    #[arg(long)]
    pub no_reference: bool,
    /// Times at which to write field snapshots.
    #[arg(long, value_delimiter = ',')]
    pub snap_times: Vec<f64>,
    /// Coefficient field written in snapshots (a1 to a6).
    #[arg(long, default_value = "a1")]
    pub snap_field: String,
}

#[derive(Debug, Serialize)]
struct BlowUpReport {
    time: f64,
    reason: String,
}

#[derive(Debug, Serialize)]
struct Summary {
    case: String,
    dt: f64,
    steps: usize,
    t_final: f64,
    pml_columns: usize,
    reference_nx: Option<usize>,
    /// Error functionals by name; `null` where undefined for the case.
    functionals: Option<serde_json::Map<String, serde_json::Value>>,
    blow_up: Option<BlowUpReport>,
}

fn field_index(name: &str) -> CliResult<usize> {
    match name.strip_prefix('a').and_then(|k| k.parse::<usize>().ok()) {
        Some(k @ 1..=6) => Ok(k - 1),
        _ => Err(CliError::Usage(format!("snapshot field must be a1..a6, got `{name}`"))),
    }
}

fn write_snapshots(out: &Path, traj: &Trajectory, field: &str, provenance: &str) -> CliResult<()> {
    let k = field_index(field)?;
    for snap in &traj.snapshots {
        let path = out.join(format!("snapshot_{field}_t{:.4}.csv", snap.requested));
        let meta = SnapshotMeta { field: field.to_string(), time: snap.time, grid: traj.grid };
        let file = fs::File::create(&path).map_err(CliError::file(&path))?;
        write_snapshot(
            BufWriter::new(file),
            &meta,
            &snap.state.outer_iter().nth(k).expect("six coefficient fields").to_owned(),
            provenance,
        )?;
        info!("wrote {}", path.display());
    }
    Ok(())
}

fn write_summary(out: &Path, summary: &Summary) -> CliResult<()> {
    let path = out.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(summary)?).map_err(CliError::file(&path))?;
    println!("{}", serde_json::to_string_pretty(summary)?);
    Ok(())
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.config).map_err(CliError::file(&args.config))?;
    let cfg = ScenarioConfig::from_toml_str(&text)?;
    field_index(&args.snap_field)?;
    fs::create_dir_all(&args.out).map_err(CliError::file(&args.out))?;
    let provenance = cfg.to_toml_string();
    let mut summary = Summary {
        case: cfg.scenario.case.to_string(),
        dt: cfg.dt()?,
        steps: 0,
        t_final: cfg.time.t_final,
        pml_columns: cfg.layer_columns(),
        reference_nx: (!args.no_reference).then(|| cfg.reference_grid().map(|g| g.nx)).transpose()?,
        functionals: None,
        blow_up: None,
    };

    let outcome = if args.no_reference {
        run_single(&cfg, RunKind::Pml, &args.snap_times).map(|t| (t, None))
    } else {
        run_pair(&cfg, &args.snap_times).map(|p| (p.pml.clone(), Some(p)))
    };
    let (traj, pair) = match outcome {
        Ok(v) => v,
        Err(Error::BlowUp { time, reason }) => {
            summary.blow_up = Some(BlowUpReport { time, reason: reason.clone() });
            write_summary(&args.out, &summary)?;
            return Err(Error::BlowUp { time, reason }.into());
        }
        Err(e) => return Err(e.into()),
    };
    summary.steps = traj.times.len() - 1;
    write_snapshots(&args.out, &traj, &args.snap_field, &provenance)?;

    if let Some(pair) = pair {
        let path = args.out.join("probe.csv");
        fs::write(&path, probe_csv(&pair)?).map_err(CliError::file(&path))?;
        let mut map = serde_json::Map::new();
        for kind in FunctionalKind::ALL {
            let value = match functional(&pair, kind) {
                Ok(v) => serde_json::json!(v),
                Err(e) => {
                    warn!("{kind} is undefined for this run: {e}");
                    serde_json::Value::Null
                }
            };
            map.insert(kind.name().to_string(), value);
        }
        summary.functionals = Some(map);
    }
    write_summary(&args.out, &summary)
}
