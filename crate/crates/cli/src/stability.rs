use std::fs;
use std::path::PathBuf;

use bgkpml::model::ModelConstants;
use bgkpml::pml::PmlParams;
use bgkpml::stability::{
    c1_closed_form, c2_closed_form, energy_decay_margin, frank_cf, instability_region_scan, mu4_nu4, petrovskii_bound,
    ComplexPolynomial, KGrid,
};
use clap::Args;
use log::{info, warn};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha0t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda0t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha1t: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda1t: f64,
    /// Damping along x1.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma1: f64,
    /// Damping along x2.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Wavenumber grid: lower end, upper end and points per axis.
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub kmin: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub kmax: f64,
    #[arg(long, default_value_t = 41)]
    pub kn: usize,
    /// Wavenumber at which the continued fractions are expanded.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub k1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub k2: f64,
    /// Write the sign map of the instability denominator to this CSV.
    #[arg(long)]
    pub sign_map: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct RootReport {
    left: usize,
    right: usize,
    unresolved: usize,
    fractions: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct Report {
    params: PmlParams,
    sigma1: f64,
    sigma2: f64,
    energy_margin: f64,
    petrovskii_bound: f64,
    c1: Option<f64>,
    c2: Option<f64>,
    mu4: Option<RootReport>,
    nu4: Option<RootReport>,
    warnings: Vec<String>,
}

fn root_report(q: &ComplexPolynomial) -> Option<RootReport> {
    match frank_cf(q) {
        Ok(cf) if cf.is_defined() => Some(RootReport {
            left: cf.negative(),
            right: cf.positive(),
            unresolved: cf.unresolved(),
            fractions: cf.c.clone(),
        }),
        Ok(_) => None,
        Err(e) => {
            warn!("continued fraction undefined: {e}");
            None
        }
    }
}

pub fn run(args: &StabilityArgs) -> CliResult<()> {
    let params = PmlParams {
        alpha0: args.alpha0,
        lambda0: args.lambda0,
        alpha1: args.alpha1,
        lambda1: args.lambda1,
        alpha0t: args.alpha0t,
        lambda0t: args.lambda0t,
        alpha1t: args.alpha1t,
        lambda1t: args.lambda1t,
    };
    if !params.is_finite() {
        return Err(CliError::Usage("layer parameters must be finite".into()));
    }
    if args.kn == 0 || !args.kmin.is_finite() || !args.kmax.is_finite() || args.kmin > args.kmax {
        return Err(CliError::Usage("wavenumber grid needs kn >= 1 and kmin <= kmax".into()));
    }
    let consts = ModelConstants::new(args.rt, args.tau)?;
    let grid = KGrid { min: args.kmin, max: args.kmax, n: args.kn };
    let (mu4, nu4) = mu4_nu4(args.k1, args.k2, &params, args.sigma1);
    let mut warnings = params.stability_warnings(args.sigma1);
    if params.alpha0t <= -args.sigma2 {
        warnings.push(format!("alpha0t = {} does not exceed -sigma2 = {}", params.alpha0t, -args.sigma2));
    }
    for w in &warnings {
        warn!("{w}");
    }
    let report = Report {
        params,
        sigma1: args.sigma1,
        sigma2: args.sigma2,
        energy_margin: energy_decay_margin(&params, args.sigma1, args.sigma2, &consts, &grid)?,
        petrovskii_bound: petrovskii_bound(&params, args.sigma1, args.sigma2, &consts, &grid)?,
        c1: c1_closed_form(&params, args.sigma1).ok(),
        c2: c2_closed_form(args.k1, args.k2, &params, args.sigma1).ok(),
        mu4: root_report(&mu4),
        nu4: root_report(&nu4),
        warnings,
    };
    if let Some(path) = &args.sign_map {
        let scan = instability_region_scan(&params, args.sigma1, &grid)?;
        fs::write(path, scan.to_csv()).map_err(CliError::file(path))?;
        info!("wrote {}", path.display());
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
