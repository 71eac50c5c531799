//! Command-line frontend: model computations, Heisenberg queries, and
//! verification suites with deterministic CSV/JSON output.
//!
//! Exit codes: 0 success (and verification pass), 1 verification failure,
//! 2 usage error, 3 solver/numerical error.

use std::f64::consts::PI;
use std::fs;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distortion::{compose_fat_s, dom_region, make_beta, ModelFunction};
use crate::error::Result;
use crate::grid::parse_grid;
use crate::heisenberg::{
    beta_canvar_closed, CanonicalVariation, HeisenbergPoint, DEFAULT_SOLVE_TOL,
};
use crate::lq::{build_row_model, conjugate_time, VectorKappa, DEFAULT_HORIZON};
use crate::report::{csv_num, VerificationReport};
use crate::verify;

/// Environment variable holding the default Monte Carlo seed.
pub const SEED_ENV: &str = "GAUGECD_SEED";

#[derive(Parser)]
#[command(
    name = "gaugecd",
    version,
    about = "Distortion-coefficient models, Heisenberg geometry, and verification suites"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model functions and their distortion coefficients.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Heisenberg-group geometric queries.
    #[command(subcommand)]
    Heis(HeisCmd),
    /// Verification suites emitting reports.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Row,
    Riemannian,
    Sasakian,
    TwoColumns,
    Heisenberg,
    Fat,
}

#[derive(Args)]
struct FamilyArgs {
    /// Model family.
    #[arg(long, value_enum)]
    family: Family,
    /// Curvature parameters (comma separated); length ell for `row`,
    /// 1 for `riemannian`/`sasakian`, 2 for `two-columns`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    kappa: Option<Vec<f64>>,
    /// Row-model size (family `row`).
    #[arg(long)]
    ell: Option<usize>,
    /// Heisenberg degree (family `heisenberg`).
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Fat-structure ranks (family `fat`).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Fat-structure exponential rate C.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
    /// Fat-structure curvatures.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa_a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa_b: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    kappa_c: f64,
}

impl FamilyArgs {
    fn build(&self) -> Result<ModelFunction> {
        use crate::error::Error;
        let need_kappa = |len: usize| -> Result<Vec<f64>> {
            let k = self
                .kappa
                .clone()
                .ok_or_else(|| Error::InvalidInput("--kappa is required".into()))?;
            if k.len() != len {
                return Err(Error::InvalidInput(format!(
                    "--kappa must have {len} component(s) for this family"
                )));
            }
            Ok(k)
        };
        match self.family {
            Family::Row => {
                let ell = self
                    .ell
                    .ok_or_else(|| Error::InvalidInput("--ell is required for row".into()))?;
                let kappa = need_kappa(ell)?;
                ModelFunction::from_row_model(ell, &kappa, DEFAULT_HORIZON)
            }
            Family::Riemannian => {
                let kappa = need_kappa(1)?;
                ModelFunction::from_row_model(1, &kappa, DEFAULT_HORIZON)
            }
            Family::Sasakian => {
                let kappa = need_kappa(1)?;
                ModelFunction::from_row_model(2, &[kappa[0], 0.0], DEFAULT_HORIZON)
            }
            Family::TwoColumns => {
                let kappa = need_kappa(2)?;
                ModelFunction::from_row_model(2, &kappa, DEFAULT_HORIZON)
            }
            Family::Heisenberg => ModelFunction::heisenberg(self.d),
            Family::Fat => {
                let (n, k) = match (self.n, self.k) {
                    (Some(n), Some(k)) => (n, k),
                    _ => {
                        return Err(Error::InvalidInput(
                            "--n and --k are required for fat".into(),
                        ))
                    }
                };
                compose_fat_s(n, k, self.c, self.kappa_a, self.kappa_b, self.kappa_c)
            }
        }
    }
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Evaluate the model function s on a grid.
    S {
        #[command(flatten)]
        family: FamilyArgs,
        /// Argument grid a:b:n.
        #[arg(long, default_value = "0:6:61")]
        t_grid: String,
    },
    /// Evaluate the distortion coefficient beta_t(theta) on a t grid.
    Beta {
        #[command(flatten)]
        family: FamilyArgs,
        /// Gauge value theta.
        #[arg(long)]
        theta: f64,
        /// Midpoint-parameter grid a:b:n within [0, 1].
        #[arg(long, default_value = "0:1:21")]
        t_grid: String,
    },
    /// First conjugate time of a row model (prints `inf` when none).
    ConjugateTime {
        #[arg(long)]
        ell: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kappa: Vec<f64>,
    },
    /// Radial DOM boundary of the three-dimensional model family.
    Dom {
        /// Family parameter K.
        #[arg(long, allow_hyphen_values = true, name = "K")]
        k: f64,
        /// Number of first-quadrant directions.
        #[arg(long, default_value_t = 32)]
        directions: usize,
    },
}

#[derive(Args)]
struct HeisCommon {
    /// Canonical-variation parameter (0 = sub-Riemannian).
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Base point x,y,z.
    #[arg(long, default_value = "0,0,0", value_parser = parse_point, allow_hyphen_values = true)]
    from: HeisenbergPoint,
    /// Target point x,y,z.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    to: HeisenbergPoint,
}

#[derive(Subcommand)]
enum HeisCmd {
    /// Distance between two points.
    Distance {
        #[command(flatten)]
        common: HeisCommon,
    },
    /// Minimal initial covector of the connecting geodesic.
    Covector {
        #[command(flatten)]
        common: HeisCommon,
    },
    /// Gauge value of a pair.
    Gauge {
        #[command(flatten)]
        common: HeisCommon,
    },
    /// Measured (finite-difference Jacobian) distortion coefficient.
    BetaTrue {
        #[command(flatten)]
        common: HeisCommon,
        #[arg(long)]
        t: f64,
    },
    /// Closed-form distortion coefficient of the canonical variation.
    BetaClosed {
        #[command(flatten)]
        common: HeisCommon,
        #[arg(long)]
        t: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct VerifyCommon {
    /// RNG seed; defaults to $GAUGECD_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// RNG worker streams.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Report destination (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Deficit tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Sampling box lower corner x,y,z.
    #[arg(long, default_value = "0.5,0.5,-0.5", value_parser = parse_point, allow_hyphen_values = true)]
    box_min: HeisenbergPoint,
    /// Sampling box upper corner x,y,z.
    #[arg(long, default_value = "1.5,1.5,0.5", value_parser = parse_point, allow_hyphen_values = true)]
    box_max: HeisenbergPoint,
}

impl VerifyCommon {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            std::env::var(SEED_ENV)
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(0)
        })
    }

    fn mc(&self) -> verify::MonteCarloConfig {
        verify::MonteCarloConfig {
            seed: self.seed(),
            samples: self.samples,
            bounds: [
                (self.box_min.x, self.box_max.x),
                (self.box_min.y, self.box_max.y),
                (self.box_min.z, self.box_max.z),
            ],
            worker_count: self.workers,
        }
    }

    fn emit(&self, report: &VerificationReport, csv: String) -> std::io::Result<()> {
        let body = match self.format {
            OutputFormat::Json => report.to_json(),
            OutputFormat::Csv => csv,
        };
        match &self.out {
            Some(path) => fs::write(path, body),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Pointwise beta comparison sweep on a deterministic grid.
    Comparison {
        #[command(flatten)]
        common: VerifyCommon,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Points per axis of the deterministic grid in the box.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long, default_value = "0.1:1:10")]
        t_grid: String,
    },
    /// Entropy form of the measure-contraction inequality.
    Mcp {
        #[command(flatten)]
        common: VerifyCommon,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value = "0.1:0.9:9")]
        t_grid: String,
        /// Replace the model with the measured coefficient (bookkeeping
        /// oracle; deficit must be exactly zero).
        #[arg(long)]
        exact: bool,
    },
    /// Half Brunn-Minkowski volume inequality.
    Hbm {
        #[command(flatten)]
        common: VerifyCommon,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value = "0.25:1:4")]
        t_grid: String,
    },
    /// Bishop-Gromov monotonicity of normalized gauge-ball volumes.
    BishopGromov {
        #[command(flatten)]
        common: VerifyCommon,
        #[arg(long, default_value_t = 3.0)]
        rho: f64,
        /// Gauge radii a:b:n inside (0, 2 pi).
        #[arg(long, default_value = "1.5707963267948966:4.71238898038469:3")]
        r_grid: String,
    },
    /// Gauge diameter bound (no gauge reaches 2 pi).
    GaugeDiameter {
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Geodesic-dimension exponent fit.
    Geodim {
        #[command(flatten)]
        common: VerifyCommon,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value = "0.05:0.2:6")]
        t_grid: String,
        #[arg(long, default_value_t = 5.0)]
        expected_slope: f64,
    },
    /// Gauge limits along the canonical variation.
    Canvar {
        #[command(flatten)]
        common: VerifyCommon,
        #[arg(long, value_delimiter = ',', default_value = "1,0.3,0.1,0.03")]
        eps_down: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,3,10,30")]
        eps_up: Vec<f64>,
    },
}

fn parse_point(s: &str) -> std::result::Result<HeisenbergPoint, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("'{s}' must be x,y,z"));
    }
    let mut c = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        c[i] = p.trim().parse().map_err(|_| format!("bad coordinate '{p}'"))?;
    }
    Ok(HeisenbergPoint { x: c[0], y: c[1], z: c[2] })
}

/// Run the CLI; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    use crate::error::Error;
    let bad_grid = |e: String| Error::InvalidInput(e);
    match cli.cmd {
        Command::Model(cmd) => match cmd {
            ModelCmd::S { family, t_grid } => {
                let s = family.build()?;
                let grid = parse_grid(&t_grid).map_err(bad_grid)?;
                println!("t,s");
                for t in grid {
                    println!("{},{}", csv_num(t), csv_num((s.eval)(t)));
                }
                Ok(0)
            }
            ModelCmd::Beta { family, theta, t_grid } => {
                let beta = make_beta(family.build()?);
                let grid = parse_grid(&t_grid).map_err(bad_grid)?;
                println!("t,theta,beta");
                for t in grid {
                    println!(
                        "{},{},{}",
                        csv_num(t),
                        csv_num(theta),
                        csv_num(beta.eval(t, theta))
                    );
                }
                Ok(0)
            }
            ModelCmd::ConjugateTime { ell, kappa } => {
                let model = build_row_model(ell, &kappa)?;
                let tc = conjugate_time(&model, DEFAULT_HORIZON)?;
                println!("{}", csv_num(tc.value));
                Ok(0)
            }
            ModelCmd::Dom { k, directions } => {
                if directions < 2 {
                    return Err(Error::InvalidInput("--directions must be >= 2".into()));
                }
                let kbar = VectorKappa {
                    m: 2,
                    components: vec![
                        Box::new(move |th: &[f64]| th[0] * th[0] + k * th[1] * th[1]),
                        Box::new(|_| 0.0),
                    ],
                };
                let phis: Vec<f64> = (0..directions)
                    .map(|i| PI / 2.0 * i as f64 / (directions - 1) as f64)
                    .collect();
                let dirs: Vec<Vec<f64>> =
                    phis.iter().map(|p| vec![p.cos(), p.sin()]).collect();
                let ds = dom_region(2, &kbar, &dirs, DEFAULT_HORIZON)?;
                println!("phi,D_theta");
                for (phi, d) in phis.iter().zip(ds) {
                    println!("{},{}", csv_num(*phi), csv_num(d));
                }
                Ok(0)
            }
        },
        Command::Heis(cmd) => {
            let geo_of = |eps: f64| CanonicalVariation::new(eps);
            match cmd {
                HeisCmd::Distance { common } => {
                    let d = geo_of(common.eps)?.cc_distance(&common.from, &common.to)?;
                    println!("{}", csv_num(d));
                    Ok(0)
                }
                HeisCmd::Covector { common } => {
                    let sol = geo_of(common.eps)?
                        .solve_covector_pair(&common.from, &common.to, DEFAULT_SOLVE_TOL)?;
                    println!("px,py,pz,hamiltonian,ambiguous");
                    println!(
                        "{},{},{},{},{}",
                        csv_num(sol.covector.px),
                        csv_num(sol.covector.py),
                        csv_num(sol.covector.pz),
                        csv_num(sol.hamiltonian),
                        sol.ambiguous
                    );
                    Ok(0)
                }
                HeisCmd::Gauge { common } => {
                    let g = geo_of(common.eps)?.gauge_theta(&common.from, &common.to)?;
                    println!("{}", csv_num(g));
                    Ok(0)
                }
                HeisCmd::BetaTrue { common, t } => {
                    let b = geo_of(common.eps)?.true_beta(&common.from, &common.to, t)?;
                    println!("{}", csv_num(b));
                    Ok(0)
                }
                HeisCmd::BetaClosed { common, t } => {
                    let sol = geo_of(common.eps)?
                        .solve_covector_pair(&common.from, &common.to, DEFAULT_SOLVE_TOL)?;
                    let b = beta_canvar_closed(
                        common.eps,
                        t,
                        sol.covector.rho(),
                        sol.covector.pz,
                    );
                    println!("{}", csv_num(b));
                    Ok(0)
                }
            }
        }
        Command::Verify(cmd) => run_verify(cmd),
    }
}

fn run_verify(cmd: VerifyCmd) -> Result<i32> {
    use crate::error::Error;
    let bad_grid = |e: String| Error::InvalidInput(e);
    let (report, csv, common) = match cmd {
        VerifyCmd::Comparison { common, eps, grid, t_grid } => {
            let t_values = parse_grid(&t_grid).map_err(bad_grid)?;
            let mc = common.mc();
            let mut points = Vec::new();
            for i in 0..grid {
                for j in 0..grid {
                    for l in 0..grid {
                        let frac = |idx: usize| (idx as f64 + 0.5) / grid as f64;
                        let p = HeisenbergPoint {
                            x: mc.bounds[0].0 + (mc.bounds[0].1 - mc.bounds[0].0) * frac(i),
                            y: mc.bounds[1].0 + (mc.bounds[1].1 - mc.bounds[1].0) * frac(j),
                            z: mc.bounds[2].0 + (mc.bounds[2].1 - mc.bounds[2].0) * frac(l),
                        };
                        if eps > 0.0 || p.horizontal_radius() >= 1e-3 {
                            points.push(p);
                        }
                    }
                }
            }
            let report = verify::comparison_sweep(eps, &points, &t_values, common.tol)?;
            let csv = report.to_csv_filtered(
                "beta-comparison",
                &["eps", "t", "rho", "pz", "beta_true", "beta_model", "ratio"],
            );
            (report, csv, common)
        }
        VerifyCmd::Mcp { common, eps, t_grid, exact } => {
            let t_values = parse_grid(&t_grid).map_err(bad_grid)?;
            let report =
                verify::mcp_entropy_check(eps, &t_values, &common.mc(), exact, common.tol)?;
            let csv = report.to_csv(&["t", "sigma", "lhs", "rhs", "deficit"]);
            (report, csv, common)
        }
        VerifyCmd::Hbm { common, eps, t_grid } => {
            let t_values = parse_grid(&t_grid).map_err(bad_grid)?;
            let report =
                verify::half_brunn_minkowski_check(eps, &t_values, &common.mc(), common.tol)?;
            let csv = report.to_csv(&["t", "vol_A", "lhs", "rhs", "deficit"]);
            (report, csv, common)
        }
        VerifyCmd::BishopGromov { common, rho, r_grid } => {
            let r_values = parse_grid(&r_grid).map_err(bad_grid)?;
            let report = verify::bishop_gromov_check(rho, &r_values, &common.mc(), common.tol)?;
            let csv = report.to_csv(&["r1", "r2", "lhs", "rhs", "deficit"]);
            (report, csv, common)
        }
        VerifyCmd::GaugeDiameter { common } => {
            let report = verify::gauge_diameter_check(&common.mc(), common.tol)?;
            let csv = report.to_csv(&["admissible", "lhs", "rhs", "deficit"]);
            (report, csv, common)
        }
        VerifyCmd::Geodim { common, eps, t_grid, expected_slope } => {
            let t_values = parse_grid(&t_grid).map_err(bad_grid)?;
            let mc = common.mc();
            let report =
                verify::geodesic_dimension_fit(eps, mc.bounds, &t_values, expected_slope)?;
            let csv = report.to_csv(&["lhs", "rhs", "deficit"]);
            (report, csv, common)
        }
        VerifyCmd::Canvar { common, eps_down, eps_up } => {
            let report =
                verify::canvar_limits_check(&eps_down, &eps_up, &common.mc(), common.tol)?;
            let csv = report.to_csv(&["eps", "eps1", "eps2", "t", "rho", "pz", "lhs", "rhs", "deficit"]);
            (report, csv, common)
        }
    };
    common
        .emit(&report, csv)
        .map_err(|e| Error::InvalidInput(format!("cannot write report: {e}")))?;
    Ok(if report.pass { 0 } else { 1 })
}
