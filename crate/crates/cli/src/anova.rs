use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use bgkpml::anova::{tsi_table_csv, EvalCache};
use bgkpml::scenarios::{ScenarioConfig, StudyResult, StudySpec};
use bgkpml::Error;
use clap::{Args, ValueEnum};
use log::{error, info};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    /// Sum of the box coordinates; exercises the pipeline without solves.
    Additive,
}

#[derive(Debug, Args)]
pub struct AnovaArgs {
    /// Study spec (TOML).
    pub spec: PathBuf,
    /// Evaluation cache: read if present, rewritten after the sweep.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Worker threads for node evaluation (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Replace the solver by an analytic test function.
    #[arg(long, value_enum)]
    pub oracle: Option<Oracle>,
    /// Output directory; overrides `output.dir` of the study file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load_cache(path: Option<&Path>, spec: &StudySpec) -> CliResult<EvalCache> {
    let Some(path) = path.filter(|p| p.exists()) else {
        return Ok(EvalCache::new());
    };
    let file = fs::File::open(path).map_err(CliError::file(path))?;
    let cache = EvalCache::read(BufReader::new(file), &spec.rule()?)?;
    info!("resumed {} cached node values from {}", cache.len(), path.display());
    Ok(cache)
}

fn save_cache(path: &Path, cache: &EvalCache, spec: &StudySpec) -> CliResult<()> {
    let file = fs::File::create(path).map_err(CliError::file(path))?;
    cache.write(BufWriter::new(file), &spec.rule()?)?;
    Ok(())
}

fn base_config(spec: &StudySpec, spec_path: &Path) -> CliResult<ScenarioConfig> {
    let scenario = match &spec.scenario {
        Some(rel) => {
            let path = spec_path.parent().unwrap_or(Path::new(".")).join(rel);
            let text = fs::read_to_string(&path).map_err(CliError::file(&path))?;
            Some(ScenarioConfig::from_toml_str(&text)?)
        }
        None => None,
    };
    Ok(spec.base_config(scenario)?)
}

fn sweep(args: &AnovaArgs, spec: &StudySpec, cache: &EvalCache) -> CliResult<StudyResult> {
    let result = match args.oracle {
        Some(Oracle::Additive) => spec.run_with(|x: &[f64]| Ok(x.iter().sum()), cache),
        None => spec.run(base_config(spec, &args.spec)?, cache),
    };
    Ok(result?)
}

pub fn run(args: &AnovaArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.spec).map_err(CliError::file(&args.spec))?;
    let spec = StudySpec::from_toml_str(&text)?;
    let out =
        args.out.clone().or_else(|| spec.output.dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).map_err(CliError::file(&out))?;
    let cache = load_cache(args.resume.as_deref(), &spec)?;

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = args.workers {
            if n == 0 {
                return Err(CliError::Usage("--workers must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::Usage(e.to_string()))?
    };
    let outcome = pool.install(|| sweep(args, &spec, &cache));
    if let Some(path) = &args.resume {
        save_cache(path, &cache, &spec)?;
    }
    let result = match outcome {
        Err(CliError::Core(Error::PoisonedNodes { count, nodes })) => {
            for idx in &nodes {
                error!("node {idx:?} failed");
            }
            return Err(Error::PoisonedNodes { count, nodes }.into());
        }
        other => other?,
    };
    info!("{} nodes evaluated, {} from cache", result.evaluated, spec.rule()?.len() - result.evaluated);

    let names: Vec<String> = spec.swept().into_iter().map(String::from).collect();
    let label = format!("{}:{}", spec.functional, spec.rule()?.label());
    let tsi_path = out.join("tsi.csv");
    fs::write(&tsi_path, tsi_table_csv(&names, &[(label, result.tsi.clone())])).map_err(CliError::file(&tsi_path))?;
    let export = result.decomposition.export(&result.parameter_box)?;
    let json_path = out.join("decomposition.json");
    fs::write(&json_path, serde_json::to_string_pretty(&export)?).map_err(CliError::file(&json_path))?;
    for (name, t) in names.iter().zip(&result.tsi) {
        println!("{name}\t{t:.6}");
    }
    Ok(())
}
