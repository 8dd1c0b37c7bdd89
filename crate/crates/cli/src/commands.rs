use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::{info, warn};
use serde::Serialize;

use robinstab::criteria::{build_report, ReportOptions, StabilityReport};
use robinstab::evolution::{
    discrete_equilibrium, evolve_2d, evolve_radial, principal_direction, random_perturbation, EvolveOptions,
    RadialOperator, RateFit, DEFAULT_BLOWUP,
};
use robinstab::geometry::RadialGeometry;
use robinstab::nonlinearity::{nonlinearity_registry, Nonlinearity};
use robinstab::pattern::{construct_pattern, PatternArtifact, PatternOptions, PatternResult, Window};
use robinstab::spectrum::{discretize, smallest_eigenvalue, DEFAULT_EIGEN_N};
use robinstab::stationary::{solve_stationary, RadialSolution, ScanOptions};
use robinstab::{Error, Result};

use crate::config::RunConfig;

/// Command failures, each with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration, bad input or a numerical error (exit 1).
    Config(String),
    /// No stationary solution in the scanned range (exit 2).
    NoSolution(String),
    /// Pattern construction failed (exit 3).
    Construction(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::NoSolution(_) => 2,
            Failure::Construction(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::NoSolution(m) | Failure::Construction(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvexityWindow { .. } | Error::Construction { .. } => Failure::Construction(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

pub type Outcome = std::result::Result<(), Failure>;

pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
}

impl Context {
    pub fn new(config: RunConfig, out: Option<PathBuf>) -> std::result::Result<Self, Failure> {
        let out = out
            .or_else(|| config.out.as_ref().map(|p| config.base.join(p)))
            .unwrap_or_else(|| PathBuf::from("out"));
        fs::create_dir_all(&out).map_err(|e| Failure::Config(format!("cannot create {}: {e}", out.display())))?;
        Ok(Self { config, out })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&self, name: &str, text: &str) -> Result<()> {
        fs::write(self.path(name), text)?;
        Ok(())
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// The problem described by a config: either a closed-form term with its
/// stationary solutions, or a pattern rebuilt from its artifact.
enum Problem {
    Closed {
        geometry: Arc<dyn RadialGeometry>,
        f: Arc<dyn Nonlinearity>,
        alpha: f64,
    },
    Constructed(Box<PatternResult>),
}

impl Problem {
    fn load(cfg: &RunConfig) -> Result<Self> {
        if cfg.is_constructed() {
            let path = cfg.artifact_path().expect("validated");
            let artifact = PatternArtifact::load(&path)
                .map_err(|e| Error::Config(format!("cannot load artifact {}: {e}", path.display())))?;
            if artifact.geometry != cfg.geometry {
                warn!("artifact geometry differs from the config; using the artifact");
            }
            return Ok(Problem::Constructed(Box::new(artifact.rebuild()?)));
        }
        let alpha = cfg
            .alpha
            .ok_or_else(|| Error::Config("alpha is required for closed-form nonlinearities".into()))?;
        Ok(Problem::Closed {
            geometry: cfg.geometry.build()?,
            f: nonlinearity_registry().build(&cfg.nonlinearity.name, &cfg.nonlinearity.params)?,
            alpha,
        })
    }

    fn geometry(&self) -> &dyn RadialGeometry {
        match self {
            Problem::Closed { geometry, .. } => geometry.as_ref(),
            Problem::Constructed(p) => p.geometry.as_ref(),
        }
    }

    fn nonlinearity(&self) -> Arc<dyn Nonlinearity> {
        match self {
            Problem::Closed { f, .. } => f.clone(),
            Problem::Constructed(p) => p.f.clone(),
        }
    }

    fn alpha(&self) -> f64 {
        match self {
            Problem::Closed { alpha, .. } => *alpha,
            Problem::Constructed(p) => p.alpha(),
        }
    }

    fn solutions(&self, cfg: &RunConfig) -> std::result::Result<Vec<RadialSolution>, Failure> {
        let sols = match self {
            Problem::Constructed(p) => vec![p.solution()],
            Problem::Closed { geometry, f, alpha } => {
                let s = &cfg.stationary;
                let opts = ScanOptions {
                    c_min: s.c_min,
                    c_max: s.c_max,
                    n_scan: s.n_scan,
                    n: s.n,
                    ..Default::default()
                };
                let set = solve_stationary(geometry.clone(), f.clone(), *alpha, &opts)?;
                info!("{} stationary solutions, {} diverged shots", set.solutions.len(), set.diverged);
                set.solutions
            }
        };
        if sols.is_empty() {
            return Err(Failure::NoSolution(format!(
                "no stationary solution with v(lo) in [{}, {}]",
                cfg.stationary.c_min, cfg.stationary.c_max
            )));
        }
        Ok(sols)
    }

    fn eigen_n(&self, cfg: &RunConfig) -> usize {
        match (cfg.eigen.n, self) {
            (Some(n), _) => n,
            (None, Problem::Constructed(p)) => p.params.n,
            (None, Problem::Closed { .. }) => DEFAULT_EIGEN_N,
        }
    }
}

fn reports(ctx: &Context) -> std::result::Result<Vec<StabilityReport>, Failure> {
    let problem = Problem::load(&ctx.config)?;
    let sols = problem.solutions(&ctx.config)?;
    let opts = ReportOptions {
        n_eigen: problem.eigen_n(&ctx.config),
        k_max: ctx.config.eigen.k_max,
        spectral: true,
    };
    let mut out = Vec::with_capacity(sols.len());
    for (k, s) in sols.iter().enumerate() {
        s.write_csv(&ctx.path(&format!("solution_{k}.csv")))?;
        out.push(build_report(s, &opts)?);
    }
    Ok(out)
}

fn report_text(reports: &[StabilityReport]) -> String {
    let mut s = String::new();
    for (k, r) in reports.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        s.push_str(&format!("== solution {k} ==\n"));
        s.push_str(&r.to_text());
    }
    s
}

pub fn analyze(ctx: &Context) -> Outcome {
    let reports = reports(ctx)?;
    ctx.write("report.json", &json(&reports)?)?;
    ctx.write("report.txt", &report_text(&reports))?;
    for (k, r) in reports.iter().enumerate() {
        info!("solution {k}: {:?}", r.classification);
    }
    Ok(())
}

pub fn report(ctx: &Context) -> Outcome {
    let reports = reports(ctx)?;
    let text = report_text(&reports);
    ctx.write("report.txt", &text)?;
    print!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct EigenSummary {
    solution: usize,
    c: f64,
    mode_k: usize,
    n: usize,
    lambda1: f64,
    residual: f64,
}

pub fn eigen(ctx: &Context) -> Outcome {
    let problem = Problem::load(&ctx.config)?;
    let sols = problem.solutions(&ctx.config)?;
    let n = problem.eigen_n(&ctx.config);
    let mut summary = Vec::new();
    for (j, s) in sols.iter().enumerate() {
        for k in 0..=ctx.config.eigen.k_max {
            let e = smallest_eigenvalue(&discretize(s, k, n)?)?;
            e.write_csv(&ctx.path(&format!("eigen_{j}_k{k}.csv")))?;
            summary.push(EigenSummary {
                solution: j,
                c: s.c,
                mode_k: k,
                n,
                lambda1: e.lambda1,
                residual: e.residual,
            });
        }
    }
    ctx.write("eigen.json", &json(&summary)?)?;
    Ok(())
}

pub fn construct(ctx: &Context) -> Outcome {
    let cfg = &ctx.config;
    let geometry = cfg.geometry.build()?;
    let p = &cfg.pattern;
    let window = p.window.map(|[r0, r3]| {
        let mid = 0.5 * (r0 + r3);
        Window::from_ends(mid, geometry.convexity_indicator(mid), r0, r3)
    });
    let opts = PatternOptions {
        beta: p.beta,
        n: p.n,
        window,
        l: p.l,
        b: p.b,
        m1: p.m1,
        m2: p.m2,
        k_max: p.k_max,
    };
    let result = construct_pattern(geometry, &opts)?;
    let c = &result.certificate;
    info!(
        "pattern: B = {}, l = {}, alpha = {:.6e}, lambda1 = {:?}",
        result.params.b, result.params.l, c.alpha, c.lambda1
    );
    ctx.write("pattern.json", &json(&result.artifact())?)?;
    ctx.write("certificate.json", &(result.certificate_json()? + "\n"))?;
    result.write_profile_csv(&ctx.path("profile.csv"))?;
    result.write_nonlinearity_csv(&ctx.path("nonlinearity.csv"))?;
    Ok(())
}

#[derive(Serialize)]
struct SimulateSummary {
    solution: usize,
    c: f64,
    alpha: f64,
    n: usize,
    n_theta: Option<usize>,
    stepper: String,
    dt: f64,
    steps: usize,
    perturbation: String,
    epsilon: f64,
    seed: u64,
    /// Principal eigenvalue of the discrete linearisation (perturbed mode).
    lambda_discrete: f64,
    truncated: bool,
    fit: Option<RateFit>,
    fit_error: Option<String>,
}

pub fn simulate(ctx: &Context) -> Outcome {
    let cfg = &ctx.config;
    let m = &cfg.simulate;
    let problem = Problem::load(cfg)?;
    let sols = problem.solutions(cfg)?;
    let sol = sols.get(m.solution).ok_or_else(|| {
        Failure::Config(format!(
            "simulate.solution = {} but only {} solutions exist",
            m.solution,
            sols.len()
        ))
    })?;
    let g = problem.geometry();
    let f = problem.nonlinearity();
    let alpha = problem.alpha();
    let op = RadialOperator::new(g, alpha, m.n)?;
    let guess: Vec<f64> = op.grid.iter().map(|&r| sol.sample(r).0).collect();
    let u_star = discrete_equilibrium(&op, f.as_ref(), &guess)?;
    let mode = principal_direction(g, f.as_ref(), alpha, &u_star, m.mode_k)?;
    let radial_perturbation: Vec<f64> = match m.perturbation.as_str() {
        "principal" => mode.eigenfunction.iter().map(|x| m.epsilon * x).collect(),
        "random" => random_perturbation(&op, m.epsilon, cfg.seed),
        _ => vec![0.0; m.n + 1],
    };
    let opts = EvolveOptions {
        t_final: m.t_final,
        dt: m.dt,
        stepper: m.stepper.clone(),
        samples: m.samples,
        blowup: DEFAULT_BLOWUP,
    };
    let run = if m.n_theta == 0 {
        let u0: Vec<f64> = u_star.iter().zip(&radial_perturbation).map(|(a, b)| a + b).collect();
        evolve_radial(g, f.as_ref(), alpha, &u0, Some(&u_star), &opts)?
    } else {
        let nt = m.n_theta;
        let mut u0 = Vec::with_capacity(nt * (m.n + 1));
        for j in 0..nt {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / nt as f64;
            let angular = (m.mode_k as f64 * theta).cos();
            for i in 0..=m.n {
                u0.push(u_star[i] + angular * radial_perturbation[i]);
            }
        }
        evolve_2d(g, f.as_ref(), alpha, &u0, m.n, nt, Some(&u_star), &opts)?
    };
    run.write_trajectory_csv(&ctx.path("trajectory.csv"))?;
    run.write_final_csv(&ctx.path("final.csv"))?;
    let (fit, fit_error) = match run.fit(m.tol_rate) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let summary = SimulateSummary {
        solution: m.solution,
        c: sol.c,
        alpha,
        n: m.n,
        n_theta: run.n_theta,
        stepper: m.stepper.clone(),
        dt: run.dt,
        steps: run.steps,
        perturbation: m.perturbation.clone(),
        epsilon: m.epsilon,
        seed: cfg.seed,
        lambda_discrete: mode.lambda1,
        truncated: run.truncated,
        fit,
        fit_error,
    };
    ctx.write("simulate.json", &json(&summary)?)?;
    Ok(())
}

/// Loads a config and resolves the output directory.
pub fn context(config: &Path, out: Option<PathBuf>) -> std::result::Result<Context, Failure> {
    Context::new(RunConfig::load(config)?, out)
}
