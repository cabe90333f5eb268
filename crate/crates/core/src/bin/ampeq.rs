use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use ampeq::amplitude::approximate;
use ampeq::config::RunConfig;
use ampeq::fbm::{self, generate_fbm, generate_qfbm, Spectrum};
use ampeq::harness::{
    convolution_moment_check, scaling_study, sup_distance, MomentConfig, ScalingConfig,
};
use ampeq::holder::{
    a3_exponent, check_lemma_a1, check_lemma_a2, check_lemma_a3, identity_refinement,
    young_bound_check, SampledFunction, ScalingCheck, YoungConfig,
};
use ampeq::spde::{
    aligned_dt, default_dt_fast, default_stride, fast_steps, generate_noise, solve_spde,
    write_field_series,
};
use ampeq::spectral::{Preset, SpectralSystem};
use ampeq::{Error, Result};

#[derive(Parser)]
#[command(name = "ampeq", version, about = "Amplitude equations for SPDEs with fractional noise")]
struct Cli {
    /// Worker threads (falls back to AMPEQ_JOBS, then all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one scalar fBm path.
    GenFbm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hurst: Option<String>,
        #[arg(long)]
        steps: Option<String>,
        #[arg(long)]
        dt: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        method: Option<String>,
    },
    /// Solve the SPDE and the reduced model on one noise path.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        hurst: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        t0: Option<String>,
        #[arg(long)]
        modes: Option<String>,
        #[arg(long)]
        noise_modes: Option<String>,
        #[arg(long)]
        rho: Option<String>,
        #[arg(long)]
        nu: Option<String>,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        stride: Option<String>,
    },
    /// Error of the reduced model over an eps grid.
    ScalingStudy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hurst: Option<String>,
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        replicas: Option<String>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        seed_base: Option<String>,
    },
    /// Hölder scalings, the convolution identity and the Young estimate.
    HolderCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lemma: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        eps_grid: Option<String>,
    },
    /// Second moments of the factorization process.
    ConvolutionMoments {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        hurst: Option<String>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        replicas: Option<String>,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Pass,
    Fail,
    BlowUp,
}

fn build(common: &Common, flags: &[(&str, &Option<String>)]) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(),
    };
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    Ok(cfg)
}

/// Rejects keys outside `optional` and `pairs`, then fills in `pairs`.
fn defaults(cfg: &mut RunConfig, optional: &[&str], pairs: &[(&str, &str)]) -> Result<()> {
    let keys: Vec<&str> = pairs.iter().map(|p| p.0).chain(optional.iter().copied()).collect();
    cfg.restrict(&keys)?;
    for (k, v) in pairs {
        cfg.set_default(k, v)?;
    }
    Ok(())
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_manifest(out: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    fs::write(out.join("manifest.txt"), cfg.to_manifest(command))?;
    Ok(())
}

fn spectrum(cfg: &RunConfig) -> Result<Spectrum> {
    Ok(Spectrum::PowerLaw(cfg.f64("rho")?))
}

fn gen_fbm(cfg: &mut RunConfig, out: &Path) -> Result<Outcome> {
    defaults(
        cfg,
        &[],
        &[("hurst", "0.5"), ("steps", "1024"), ("dt", "0.001"), ("seed", "0"), ("method", "circulant")],
    )?;
    let hurst = cfg.hurst()?;
    let path =
        generate_fbm(hurst, cfg.usize("steps")?, cfg.f64("dt")?, cfg.u64("seed")?, cfg.method()?)?;
    write_manifest(out, "gen-fbm", cfg)?;
    let mut bin = create(out, "fbm.bin")?;
    fbm::io::write_binary(&path, &mut bin)?;
    bin.flush()?;
    let mut csv = create(out, "fbm.csv")?;
    fbm::io::write_csv(&path, &mut csv)?;
    csv.flush()?;

    let incs: Vec<f64> = path.increments().collect();
    let empirical = incs.iter().map(|d| d * d).sum::<f64>() / incs.len() as f64;
    let analytic = path.dt.powf(2.0 * hurst.value());
    let line = format!(
        "increment variance: empirical {empirical:.6e}, analytic dt^(2H) {analytic:.6e}, ratio {:.4}",
        empirical / analytic
    );
    println!("{line}");
    fs::write(out.join("summary.txt"), format!("{line}\n"))?;
    Ok(Outcome::Pass)
}

fn simulate(cfg: &mut RunConfig, out: &Path) -> Result<Outcome> {
    defaults(
        cfg,
        &["dt_fast", "stride"],
        &[
            ("preset", "laplacian"),
            ("hurst", "0.5"),
            ("eps", "0.1"),
            ("t0", "1"),
            ("modes", "32"),
            ("noise_modes", "32"),
            ("rho", "2"),
            ("nu", "1"),
            ("seed", "0"),
            ("a0", "1"),
        ],
    )?;
    let eps = cfg.f64("eps")?;
    let t0 = cfg.f64("t0")?;
    let target = if cfg.contains("dt_fast") { cfg.f64("dt_fast")? } else { default_dt_fast(eps, t0) };
    let dt = aligned_dt(eps, t0, target);
    let steps = fast_steps(eps, t0, dt)?;
    if !cfg.contains("stride") {
        cfg.set("stride", &default_stride(steps).to_string())?;
    }
    cfg.set("dt_fast", &dt.to_string())?;
    let preset = cfg.preset()?;
    let sys = SpectralSystem::new(preset, cfg.usize("modes")?, cfg.f64("nu")?)?;
    let hurst = cfg.hurst()?;
    let seed = cfg.u64("seed")?;
    let noise = generate_noise(
        &sys,
        hurst,
        cfg.usize("noise_modes")?,
        &spectrum(cfg)?,
        steps,
        dt,
        seed,
    )?;
    let mut u0 = sys.zero_field();
    u0.set(preset.kernel_top() as i64, Complex64::new(eps * cfg.f64("a0")?, 0.0));
    let run = solve_spde(&sys, eps, t0, &u0, Arc::new(noise), cfg.usize("stride")?)?;
    write_manifest(out, "simulate", cfg)?;
    let mut traj = create(out, "trajectory.bin")?;
    run.write_trajectory(&mut traj)?;
    traj.flush()?;
    if let Some(b) = &run.blow_up {
        let line = format!("blow_up=true\nblow_up_time={}\nblow_up_norm={}\n", b.time, b.norm);
        fs::write(out.join("summary.txt"), line)?;
        eprintln!("SPDE blew up at t = {}", b.time);
        return Ok(Outcome::BlowUp);
    }
    let approx = approximate(&run, 1)?;
    let spacing = run.stride as f64 * dt;
    let mut psi = create(out, "psi.bin")?;
    write_field_series(&mut psi, hurst.value(), spacing, seed, &approx.psi)?;
    psi.flush()?;
    if approx.amplitude.blow_up.is_some() {
        fs::write(out.join("summary.txt"), "blow_up=true\n")?;
        eprintln!("amplitude equation blew up");
        return Ok(Outcome::BlowUp);
    }
    let first = approx.first_order(&sys, eps);
    let mut csv = create(out, "error.csv")?;
    writeln!(csv, "t,error,first_order_error")?;
    for (j, u) in run.trajectory.iter().enumerate() {
        writeln!(csv, "{},{},{}", run.snapshot_time(j), u.dist(&approx.psi[j]), u.dist(&first[j]))?;
    }
    csv.flush()?;
    let sup = sup_distance(&run.trajectory, &approx.psi);
    let sup_first = sup_distance(&run.trajectory, &first);
    let summary = format!("blow_up=false\nsup_error={sup}\nsup_first_order_error={sup_first}\n");
    fs::write(out.join("summary.txt"), &summary)?;
    print!("{summary}");
    Ok(Outcome::Pass)
}

fn scaling(cfg: &mut RunConfig, out: &Path) -> Result<Outcome> {
    defaults(
        cfg,
        &["dt_fast"],
        &[
            ("preset", "laplacian"),
            ("hurst", "0.5"),
            ("eps_grid", "0.2,0.141,0.1,0.071,0.05"),
            ("replicas", "100"),
            ("seed_base", "0"),
            ("t0", "1"),
            ("modes", "32"),
            ("noise_modes", "32"),
            ("rho", "2"),
            ("nu", "1"),
            ("a0", "1"),
        ],
    )?;
    let sc = ScalingConfig {
        preset: cfg.preset()?,
        modes: cfg.usize("modes")?,
        nu: cfg.f64("nu")?,
        hurst: cfg.hurst()?,
        eps_grid: cfg.list("eps_grid")?,
        replicas: cfg.usize("replicas")?,
        t0: cfg.f64("t0")?,
        dt_fast: if cfg.contains("dt_fast") { Some(cfg.f64("dt_fast")?) } else { None },
        noise_modes: cfg.usize("noise_modes")?,
        spectrum: spectrum(cfg)?,
        a0: cfg.f64("a0")?,
        seed_base: cfg.u64("seed_base")?,
    };
    let report = scaling_study(&sc)?;
    write_manifest(out, "scaling-study", cfg)?;
    let mut csv = create(out, "scaling_report.csv")?;
    report.write_csv(&mut csv)?;
    csv.flush()?;
    let mut summary = Vec::new();
    report.write_summary(&mut summary)?;
    fs::write(out.join("summary.txt"), &summary)?;
    print!("{}", String::from_utf8_lossy(&summary));
    Ok(if !report.valid {
        Outcome::BlowUp
    } else if report.pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn write_scaling_check(out: &Path, check: &ScalingCheck) -> Result<Outcome> {
    let mut csv = create(out, "holder_report.csv")?;
    check.write_csv(&mut csv)?;
    csv.flush()?;
    let mut summary = Vec::new();
    check.write_summary(&mut summary)?;
    fs::write(out.join("summary.txt"), &summary)?;
    print!("{}", String::from_utf8_lossy(&summary));
    Ok(if check.pass { Outcome::Pass } else { Outcome::Fail })
}

fn holder(cfg: &mut RunConfig, out: &Path) -> Result<Outcome> {
    if !cfg.contains("lemma") {
        cfg.set("lemma", "a1")?;
    }
    let lemma = cfg.raw("lemma")?.to_string();
    let grid = "0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625";
    match lemma.as_str() {
        "a1" | "a2" => {
            defaults(
                cfg,
                &[],
                &[("lemma", "a1"), ("alpha", "0.4"), ("eps_grid", grid), ("samples", "1048576")],
            )?;
            let alpha = cfg.f64("alpha")?;
            let n = cfg.usize("samples")?;
            let eps = cfg.list("eps_grid")?;
            write_manifest(out, "holder-check", cfg)?;
            let check = if lemma == "a1" {
                check_lemma_a1(&SampledFunction::from_fn(n, 1.0, f64::cos)?, alpha, &eps)?
            } else {
                check_lemma_a2(&SampledFunction::from_fn(n, 1.0, |t| t.powf(alpha))?, alpha, &eps)?
            };
            write_scaling_check(out, &check)
        }
        "a3" => {
            defaults(
                cfg,
                &[],
                &[
                    ("lemma", "a3"),
                    ("alpha", "0.6"),
                    ("gamma", "0.3"),
                    ("hurst", "0.35"),
                    ("zeta_margin", "0.9"),
                    ("eps_grid", grid),
                    ("samples", "1048576"),
                    ("seed", "11"),
                ],
            )?;
            let (alpha, gamma) = (cfg.f64("alpha")?, cfg.f64("gamma")?);
            let n = cfg.usize("samples")?;
            let path = generate_fbm(
                cfg.hurst()?,
                n,
                1.0 / n as f64,
                cfg.u64("seed")?,
                fbm::Method::CirculantEmbedding,
            )?;
            let f = SampledFunction::scalar(path.dt, path.values)?;
            let zeta = a3_exponent(alpha, gamma, cfg.f64("zeta_margin")?);
            let check = check_lemma_a3(&f, alpha, gamma, zeta, &cfg.list("eps_grid")?)?;
            write_manifest(out, "holder-check", cfg)?;
            write_scaling_check(out, &check)
        }
        "identity" => {
            defaults(
                cfg,
                &[],
                &[
                    ("lemma", "identity"),
                    ("hurst", "0.3"),
                    ("eps", "0.25"),
                    ("dt_fast", "0.001"),
                    ("halvings", "2"),
                    ("t0", "1"),
                    ("modes", "32"),
                    ("noise_modes", "32"),
                    ("rho", "2"),
                    ("seed", "5"),
                ],
            )?;
            let eps = cfg.f64("eps")?;
            let t0 = cfg.f64("t0")?;
            let halvings = cfg.usize("halvings")?;
            let coarse = aligned_dt(eps, t0, cfg.f64("dt_fast")?);
            let fine = coarse / (1usize << halvings) as f64;
            let steps = fast_steps(eps, t0, fine)?;
            let sys = SpectralSystem::new(Preset::LaplacianPeriodic, cfg.usize("modes")?, 1.0)?;
            let noise = generate_qfbm(
                cfg.hurst()?,
                cfg.usize("noise_modes")?,
                &spectrum(cfg)?,
                steps,
                fine,
                cfg.u64("seed")?,
            )?;
            let checks = identity_refinement(&sys, &noise, eps, halvings)?;
            write_manifest(out, "holder-check", cfg)?;
            let mut csv = create(out, "identity_report.csv")?;
            writeln!(csv, "dt_fast,sup_deviation,sup_rhs,relative")?;
            for c in &checks {
                writeln!(csv, "{},{},{},{}", c.dt_fast, c.sup_deviation, c.sup_rhs, c.relative())?;
            }
            csv.flush()?;
            let decreasing = checks.windows(2).all(|w| w[1].sup_deviation < w[0].sup_deviation);
            let pass = checks[0].relative() < 1e-2 && decreasing;
            let summary = format!(
                "relative_at_dt={}\nstrictly_decreasing={decreasing}\npass={pass}\n",
                checks[0].relative()
            );
            fs::write(out.join("summary.txt"), &summary)?;
            print!("{summary}");
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
        "young" => {
            defaults(
                cfg,
                &[],
                &[
                    ("lemma", "young"),
                    ("preset", "swift-hohenberg"),
                    ("hurst", "0.7"),
                    ("alpha", "0.6"),
                    ("gamma", "0.6"),
                    ("eps", "0.1"),
                    ("t0", "1"),
                    ("dt_fast", "0.01"),
                    ("modes", "32"),
                    ("noise_modes", "32"),
                    ("rho", "2"),
                    ("a0", "1"),
                    ("margin", "2"),
                    ("replicas", "100"),
                    ("seed", "0"),
                ],
            )?;
            let eps = cfg.f64("eps")?;
            let t0 = cfg.f64("t0")?;
            let holdout = cfg.usize("replicas")?;
            let yc = YoungConfig {
                hurst: cfg.hurst()?,
                eps,
                t0,
                dt_fast: aligned_dt(eps, t0, cfg.f64("dt_fast")?),
                noise_modes: cfg.usize("noise_modes")?,
                spectrum: spectrum(cfg)?,
                a0: cfg.f64("a0")?,
                alpha_p: cfg.f64("alpha")?,
                beta_p: cfg.f64("gamma")?,
                calibration: (holdout / 5).max(10),
                holdout,
                margin: cfg.f64("margin")?,
                seed: cfg.u64("seed")?,
            };
            // on the Laplacian the kernel is the constant mode and P_c F(a, a, dZ) vanishes
            let sys = SpectralSystem::new(cfg.preset()?, cfg.usize("modes")?, 1.0)?;
            let report = young_bound_check(&sys, &yc)?;
            write_manifest(out, "holder-check", cfg)?;
            let mut csv = create(out, "young_report.csv")?;
            writeln!(csv, "replica,ratio")?;
            for (i, r) in report.holdout_ratios.iter().enumerate() {
                writeln!(csv, "{i},{r}")?;
            }
            csv.flush()?;
            let summary = format!(
                "constant={}\ncalibration_max={}\nholdout_violations={}\npass={}\n",
                report.constant,
                report.calibration_max,
                report.holdout_violations,
                report.pass()
            );
            fs::write(out.join("summary.txt"), &summary)?;
            print!("{summary}");
            Ok(if report.pass() { Outcome::Pass } else { Outcome::Fail })
        }
        other => Err(Error::Config(format!("unknown lemma `{other}`"))),
    }
}

fn moments(cfg: &mut RunConfig, out: &Path) -> Result<Outcome> {
    defaults(
        cfg,
        &[],
        &[
            ("hurst", "0.75"),
            ("alpha", "0.2"),
            ("replicas", "10000"),
            ("lambda", "-1"),
            ("delta", "0.01"),
            ("seed", "0"),
        ],
    )?;
    let mc = MomentConfig {
        lambdas: cfg.list("lambda")?,
        delta: cfg.f64("delta")?,
        replicas: cfg.usize("replicas")?,
        seed: cfg.u64("seed")?,
        ..MomentConfig::desk_default(cfg.hurst()?, cfg.f64("alpha")?)
    };
    let report = convolution_moment_check(&mc)?;
    write_manifest(out, "convolution-moments", cfg)?;
    let mut csv = create(out, "moments.csv")?;
    report.write_csv(&mut csv)?;
    csv.flush()?;
    let mut summary = Vec::new();
    report.write_summary(&mut summary)?;
    fs::write(out.join("summary.txt"), &summary)?;
    print!("{}", String::from_utf8_lossy(&summary));
    Ok(if report.pass() { Outcome::Pass } else { Outcome::Fail })
}

fn jobs(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("AMPEQ_JOBS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .map(Some)
            .ok_or_else(|| Error::Config(format!("AMPEQ_JOBS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(n) = jobs(cli.jobs)? {
        if n == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot size the worker pool: {e}")))?;
    }
    let (common, mut cfg, cmd): (&Common, RunConfig, fn(&mut RunConfig, &Path) -> Result<Outcome>) =
        match &cli.command {
            Command::GenFbm { common, hurst, steps, dt, seed, method } => (
                common,
                build(
                    common,
                    &[("hurst", hurst), ("steps", steps), ("dt", dt), ("seed", seed), ("method", method)],
                )?,
                gen_fbm,
            ),
            Command::Simulate {
                common,
                preset,
                hurst,
                eps,
                t0,
                modes,
                noise_modes,
                rho,
                nu,
                seed,
                stride,
            } => (
                common,
                build(
                    common,
                    &[
                        ("preset", preset),
                        ("hurst", hurst),
                        ("eps", eps),
                        ("t0", t0),
                        ("modes", modes),
                        ("noise_modes", noise_modes),
                        ("rho", rho),
                        ("nu", nu),
                        ("seed", seed),
                        ("stride", stride),
                    ],
                )?,
                simulate,
            ),
            Command::ScalingStudy { common, hurst, eps_grid, replicas, preset, seed_base } => (
                common,
                build(
                    common,
                    &[
                        ("hurst", hurst),
                        ("eps_grid", eps_grid),
                        ("replicas", replicas),
                        ("preset", preset),
                        ("seed_base", seed_base),
                    ],
                )?,
                scaling,
            ),
            Command::HolderCheck { common, lemma, alpha, gamma, eps_grid } => (
                common,
                build(
                    common,
                    &[("lemma", lemma), ("alpha", alpha), ("gamma", gamma), ("eps_grid", eps_grid)],
                )?,
                holder,
            ),
            Command::ConvolutionMoments { common, hurst, alpha, replicas } => (
                common,
                build(common, &[("hurst", hurst), ("alpha", alpha), ("replicas", replicas)])?,
                moments,
            ),
        };
    fs::create_dir_all(&common.out)?;
    cmd(&mut cfg, &common.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Ok(Outcome::BlowUp) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
