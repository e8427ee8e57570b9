//! `wavemap`: command-line driver. Every subcommand prints JSON lines on
//! stdout and, when it writes files, a run manifest with their checksums.
//! Exit status: 0 pass (or no verdict), 2 fail verdict, 1 error.

mod config;
mod manifest;
mod merge;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use manifest::{manifest_path_for, Recorder};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wavemap_core::construct::{
    chi_integral, chi_mean_zero, chi_on_grid, corollary1_normalize_cached, delta_family, lemma1_sequence, log_cutoff, psi_exact, psi_smooth,
};
use wavemap_core::experiment::{
    appendix_ratio_suite, prop1_radial_run_opts, scaling_suite, theorem1_gap_run_opts, with_jobs, AppendixConfig, RunOptions,
};
use wavemap_core::field::{integrate, read_field, read_state, write_field, write_state, RadialProfile, ScalarField, TorusGrid};
use wavemap_core::norms::{besov_norm, fractional_integral_seminorm, sobolev_norm};
use wavemap_core::wave::calib::gaussian;
use wavemap_core::wave::radial2d::{z_cone, Cone, ENGINE_TOL};
use wavemap_core::wave::{kernel_solution_2d, kirchhoff_3d_origin, radial_even_representation, spectral_propagate};

#[derive(Parser, Debug)]
#[command(name = "wavemap", version, about = "Numerical laboratory for wave-map ill-posedness counterexamples")]
struct Cli {
    /// Worker threads for the sweeps (default: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sobolev / fractional / Besov norm of a field file.
    Norms {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Besov index (difference method); omit for the fractional-integral seminorm.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        homogeneous: bool,
        #[arg(long, value_enum, default_value_t = NormMethod::Fourier)]
        method: NormMethod,
    },
    /// Propagate a wave state to time `t`.
    Propagate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Point value of the free wave with `z(0) = 0`, `z_t(0) = φ(|x|)`.
    Pointvalue {
        #[arg(long, value_enum)]
        profile: ProfileKind,
        #[arg(long, value_enum, default_value_t = PointMethod::Kernel)]
        method: PointMethod,
        /// δ (psi-exact, psi-smooth, lemma1) or ε (log-cutoff).
        #[arg(long)]
        delta: Option<f64>,
        /// Gaussian exponent `a` in `exp(−a r²)`.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,0", allow_hyphen_values = true)]
        x: Vec<f64>,
    },
    /// Normalized counterexample data for a δ list.
    Lemma1 {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Samples of the radial profile along a ray.
        #[arg(long, default_value_t = 8192)]
        samples: usize,
        /// Half width of the sampled ray segment.
        #[arg(long, default_value_t = 2.0)]
        half_width: f64,
    },
    /// Mean-zero reference bump and κ.
    Chi {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Gap sweep, negative control or certificate run from a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
    /// Product/commutator ratio suite.
    Appendix {
        #[arg(long, default_value_t = AppendixConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = AppendixConfig::default().grid.l)]
        l: f64,
        #[arg(long, default_value_t = AppendixConfig::default().grid.n)]
        n: usize,
        #[arg(long, default_value_t = AppendixConfig::default().pairs)]
        pairs: usize,
        #[arg(long, default_value_t = AppendixConfig::default().window_functions)]
        window_functions: usize,
        #[arg(long, default_value = "appendix.json")]
        out: PathBuf,
    },
    /// Scaling suite of the rescaled waves.
    Scaling {
        #[arg(long, default_value_t = 8.0)]
        l: f64,
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value = "scaling.json")]
        out: PathBuf,
    },
    /// Merge gap reports into CSV and .dat plot tables.
    Report {
        reports: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long, default_value = "merged")]
        name: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormMethod {
    Fourier,
    Difference,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileKind {
    PsiExact,
    PsiSmooth,
    Gaussian,
    Lemma1,
    Chi,
    LogCutoff,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PointMethod {
    /// Polar quadrature of the 2D Poisson kernel.
    Kernel,
    /// Radial angular-kernel engine (n = 2).
    Radial,
    /// Radialized even-dimensional representation at (1, 0).
    Representation,
    /// Spherical means at (1, 0), n = 3.
    Kirchhoff,
}

/// Outcome of a subcommand.
enum Status {
    Done,
    Verdict(bool),
}

fn emit(v: serde_json::Value) {
    println!("{v}");
}

fn require_input(p: &Path) -> Result<()> {
    if !p.exists() {
        bail!("input file not found: {}", p.display());
    }
    Ok(())
}

fn ensure_parent(p: &Path) -> Result<()> {
    if let Some(d) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    Ok(())
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("CACHE_DIR").filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn need_delta(d: Option<f64>) -> Result<f64> {
    d.context("this profile needs --delta")
}

fn profile(kind: ProfileKind, delta: Option<f64>, a: f64, n: usize) -> Result<RadialProfile> {
    Ok(match kind {
        ProfileKind::PsiExact => psi_exact(delta_family(need_delta(delta)?)?),
        ProfileKind::PsiSmooth => psi_smooth(delta_family(need_delta(delta)?)?)?,
        ProfileKind::Gaussian => gaussian(a, n),
        ProfileKind::Lemma1 => wavemap_core::construct::lemma1_datum(n, need_delta(delta)?)?.phi,
        ProfileKind::Chi => chi_mean_zero(n)?.profile,
        ProfileKind::LogCutoff => log_cutoff(need_delta(delta)?)?,
    })
}

fn run(cli: Cli) -> Result<Status> {
    let jobs = cli.jobs;
    match cli.cmd {
        Cmd::Norms { input, s, p, q, homogeneous, method } => {
            require_input(&input)?;
            let f = read_field(&input).with_context(|| format!("reading field {}", input.display()))?;
            let rec = match method {
                NormMethod::Fourier => {
                    json!({"norm": sobolev_norm(&f, s, homogeneous)?, "method": "fourier", "shells_used": null, "tail_estimate": null})
                }
                NormMethod::Difference => {
                    let (r, name) = match q {
                        Some(q) => (besov_norm(&f, s, p, q)?, "besov"),
                        None => (fractional_integral_seminorm(&f, s, p)?, "fractional_integral"),
                    };
                    json!({"norm": r.norm, "method": name, "shells_used": r.shells_used, "tail_estimate": r.tail_estimate})
                }
            };
            emit(rec);
            Ok(Status::Done)
        }
        Cmd::Propagate { input, t, out } => {
            require_input(&input)?;
            let mut rec = Recorder::new("propagate", json!({"in": input, "t": t, "out": out}));
            rec.input(&input);
            let s0 = read_state(&input).with_context(|| format!("reading state {}", input.display()))?;
            let s1 = spectral_propagate(&s0, t);
            ensure_parent(&out)?;
            write_state(&out, &s1)?;
            rec.output(&out);
            rec.grid(s1.u.grid);
            let mpath = manifest_path_for(&out);
            rec.finish(&mpath)?;
            emit(json!({"t_from": s0.t, "t": s1.t, "out": out, "manifest": mpath}));
            Ok(Status::Done)
        }
        Cmd::Pointvalue { profile: kind, method, delta, a, n, t, x } => {
            let dim = match method {
                PointMethod::Kirchhoff => 3,
                _ => 2,
            };
            let n = if matches!(kind, ProfileKind::PsiExact | ProfileKind::PsiSmooth | ProfileKind::LogCutoff) { n } else { dim };
            let phi = profile(kind, delta, a, n)?;
            let at_origin_one = t == 1.0 && x.iter().all(|&c| c == 0.0);
            let (value, err_est): (f64, Option<f64>) = match method {
                PointMethod::Kernel => {
                    if x.len() != 2 {
                        bail!("--x needs two coordinates");
                    }
                    let pv = kernel_solution_2d(&phi, t, [x[0], x[1]])?;
                    (pv.value, Some(pv.err_est))
                }
                PointMethod::Radial => {
                    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let v = z_cone(&phi, &Cone::from_t(t, r), ENGINE_TOL)?;
                    (v, Some(ENGINE_TOL * v.abs().max(1.0)))
                }
                PointMethod::Representation | PointMethod::Kirchhoff => {
                    if !at_origin_one {
                        bail!("{method:?} evaluates only at t = 1, x = 0");
                    }
                    let v = match method {
                        PointMethod::Kirchhoff => kirchhoff_3d_origin(&phi)?,
                        _ => radial_even_representation(&phi, 2)?,
                    };
                    (v, None)
                }
            };
            emit(json!({"method": format!("{method:?}").to_lowercase(), "t": t, "x": x, "value": value, "err_est": err_est}));
            Ok(Status::Done)
        }
        Cmd::Lemma1 { n, deltas, out, samples, half_width } => {
            let grid = TorusGrid::new(1, half_width, samples)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut rec = Recorder::new("lemma1", json!({"n": n, "deltas": deltas, "samples": samples, "half_width": half_width}));
            rec.grid(grid);
            let cache = cache_dir();
            let seq = lemma1_sequence(n, &deltas)?;
            let mut records = Vec::new();
            for (k, d) in seq.iter().enumerate() {
                let t_j = if n == 2 { Some(corollary1_normalize_cached(d, cache.as_deref())?.t_j) } else { None };
                let vals = (0..grid.n).map(|i| d.phi.eval(grid.coord(i).abs())).collect();
                let path = out.join(format!("phi_{k}.field"));
                write_field(&path, &ScalarField::from_values(grid, vals)?)?;
                rec.output(&path);
                let r = json!({"delta": d.delta, "norm": d.norm, "z10": d.z_value_at_10, "t_j": t_j, "file": path});
                emit(r.clone());
                records.push(r);
            }
            let seq_path = out.join("sequence.json");
            std::fs::write(&seq_path, serde_json::to_string_pretty(&records)?)?;
            rec.output(&seq_path);
            rec.finish(&out.join("manifest.json"))?;
            Ok(Status::Done)
        }
        Cmd::Chi { n, out } => {
            let chi = chi_mean_zero(n)?;
            let grid = if n == 2 { TorusGrid::new(2, 16.0, 512)? } else { TorusGrid::new(3, 4.0, 64)? };
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut rec = Recorder::new("chi", json!({"n": n}));
            rec.grid(grid);
            let field = chi_on_grid(1.0, 1.0, grid)?;
            let fpath = out.join("chi.field");
            write_field(&fpath, &field)?;
            rec.output(&fpath);
            let info = json!({"n": n, "b": chi.b, "kappa": chi.kappa, "l2": chi.l2, "integral": chi_integral(&chi), "grid_integral": integrate(&field), "file": fpath});
            let jpath = out.join("chi.json");
            std::fs::write(&jpath, serde_json::to_string_pretty(&info)?)?;
            rec.output(&jpath);
            rec.finish(&out.join("manifest.json"))?;
            emit(info);
            Ok(Status::Done)
        }
        Cmd::Sweep { config, out } => {
            let cfg = config::load_sweep(&config)?;
            let opts = RunOptions { jobs, cache_dir: cache_dir() };
            let mut rec = Recorder::new("sweep", serde_json::to_value(&cfg.run)?);
            rec.input(&config);
            rec.grid(cfg.run.grid);
            rec.seed(cfg.run.seed);
            let report = match cfg.kind {
                config::SweepKind::Gap => theorem1_gap_run_opts(&cfg.run, &opts)?,
                config::SweepKind::Certificate => prop1_radial_run_opts(&cfg.run, &opts)?,
            };
            ensure_parent(&out)?;
            std::fs::write(&out, serde_json::to_string_pretty(&report)?)?;
            rec.output(&out);
            let mpath = manifest_path_for(&out);
            rec.finish(&mpath)?;
            for row in &report.rows {
                emit(json!({"row": row}));
            }
            emit(json!({"kind": report.kind, "verdict": report.verdict, "report": out, "manifest": mpath}));
            Ok(Status::Verdict(report.verdict.passed()))
        }
        Cmd::Appendix { seed, l, n, pairs, window_functions, out } => {
            let cfg = AppendixConfig { seed, grid: TorusGrid::new(2, l, n)?, pairs, window_functions, ..AppendixConfig::default() };
            let mut rec = Recorder::new("appendix", serde_json::to_value(&cfg)?);
            rec.grid(cfg.grid);
            rec.seed(seed);
            let report = with_jobs(jobs, || appendix_ratio_suite(&cfg))??;
            ensure_parent(&out)?;
            std::fs::write(&out, serde_json::to_string_pretty(&report)?)?;
            rec.output(&out);
            let csv_path = out.with_extension("csv");
            let mut w = csv::Writer::from_path(&csv_path)?;
            w.write_record(["name", "linf_level", "count", "excluded", "coarse_max", "fine_max", "coarse_mean", "drift", "stable"])?;
            let mut rows = vec![(String::new(), &report.product), (String::new(), &report.product_split)];
            rows.extend(report.composition.iter().map(|c| (c.linf_level.to_string(), &c.stats)));
            for (level, st) in rows {
                w.write_record([
                    st.name.clone(),
                    level,
                    st.count.to_string(),
                    st.excluded.to_string(),
                    st.coarse_max.to_string(),
                    st.fine_max.to_string(),
                    st.coarse_mean.to_string(),
                    st.drift.to_string(),
                    st.stable.to_string(),
                ])?;
            }
            w.flush()?;
            rec.output(&csv_path);
            let lb_path = out.with_file_name(format!("{}_lower_bound.csv", out.file_stem().unwrap_or_default().to_string_lossy()));
            let mut w = csv::Writer::from_path(&lb_path)?;
            w.write_record(["c_prime", "c_max_coarse", "c_max_fine"])?;
            for p in &report.lower_bound.points {
                w.write_record([p.c_prime.to_string(), p.c_max_coarse.to_string(), p.c_max_fine.to_string()])?;
            }
            w.flush()?;
            rec.output(&lb_path);
            let mpath = manifest_path_for(&out);
            rec.finish(&mpath)?;
            emit(json!({
                "leibniz_max_error": report.leibniz_max_error,
                "product_max": report.product.coarse_max,
                "product_split_max": report.product_split.coarse_max,
                "lower_bound_nonempty": report.lower_bound.nonempty,
                "fractional_window": report.fractional_window.coarse,
                "pass": report.pass,
                "report": out,
                "manifest": mpath,
            }));
            Ok(Status::Verdict(report.pass))
        }
        Cmd::Scaling { l, n, out } => {
            let grid = TorusGrid::new(2, l, n)?;
            let mut rec = Recorder::new("scaling", json!({"grid": grid}));
            rec.grid(grid);
            let chi = chi_mean_zero(2)?;
            let report = with_jobs(jobs, || scaling_suite(&chi, grid))??;
            ensure_parent(&out)?;
            std::fs::write(&out, serde_json::to_string_pretty(&report)?)?;
            rec.output(&out);
            let csv_path = out.with_extension("csv");
            let mut w = csv::Writer::from_path(&csv_path)?;
            w.write_record(["s", "R", "sup_norm", "fixed_time_norm", "energy", "linf_constant"])?;
            for row in &report.rows {
                for (k, r) in report.radii.iter().enumerate() {
                    w.write_record([
                        row.s.to_string(),
                        r.to_string(),
                        row.sup_norms[k].to_string(),
                        row.fixed_time_norms[k].to_string(),
                        row.energies[k].to_string(),
                        report.linf_constants[k].to_string(),
                    ])?;
                }
            }
            w.flush()?;
            rec.output(&csv_path);
            let mpath = manifest_path_for(&out);
            rec.finish(&mpath)?;
            for row in &report.rows {
                emit(json!({"s": row.s, "slope": row.slope, "expected": row.expected, "fixed_time_slope": row.fixed_time_slope, "energy_drift": row.energy_drift}));
            }
            emit(json!({"linf_variation": report.linf_variation, "pass": report.pass, "report": out, "manifest": mpath}));
            Ok(Status::Verdict(report.pass))
        }
        Cmd::Report { reports, out_dir, name } => {
            let loaded = merge::load_reports(&reports)?;
            let m = merge::merge(&loaded);
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let mut rec = Recorder::new("report", json!({"reports": reports, "name": name}));
            for p in &reports {
                rec.input(p);
            }
            let csv_path = out_dir.join(format!("{name}.csv"));
            let dat_path = out_dir.join(format!("{name}.dat"));
            merge::write_csv(&m, &csv_path)?;
            merge::write_dat(&m, &dat_path)?;
            rec.output(&csv_path);
            rec.output(&dat_path);
            let mpath = out_dir.join(format!("{name}.manifest.json"));
            rec.finish(&mpath)?;
            emit(json!({"reports": m.labels, "rows": m.deltas.len(), "csv": csv_path, "dat": dat_path, "manifest": mpath}));
            Ok(Status::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = e.print();
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(Status::Done) | Ok(Status::Verdict(true)) => ExitCode::SUCCESS,
        Ok(Status::Verdict(false)) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
