use clap::{Parser, Subcommand};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use twinbeam::config::SourceConfig;
use twinbeam::dynamics::{exit_coefficients, TripletInit};
use twinbeam::io::{self, sci};
use twinbeam::observables::DENSITY_BINS_PER_DECADE;
use twinbeam::oracles::{self, FockConfig};
use twinbeam::scenario::Scenario;
use twinbeam::sweep::{self, ExtremumKind, SweepOptions};
use twinbeam::{Error, Result};

#[derive(Parser)]
#[command(name = "twinbeam", version, about = "Twin-beam generation with pump depletion")]
struct Cli {
    /// Scenario file (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Pump power in W (repeatable, for `spectrum` and `modes`).
    #[arg(long = "power", global = true)]
    powers: Vec<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Power sweep of photon number, mode counts and coherence widths.
    Sweep,
    /// Spectra and correlation profiles at the given powers.
    Spectrum,
    /// Schmidt coefficients and mode-population histograms.
    Modes,
    /// Run the oracle comparisons and write a report.
    Oracle,
    /// Solve for the coupling constant and write it to coupling.json.
    Calibrate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::config_key("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::numeric(e.to_string()))?;
    }
    let config = match &cli.config {
        Some(p) => SourceConfig::load(p)?,
        None => SourceConfig::default(),
    };
    for &p in &cli.powers {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::config_key("--power", format!("must be a non-negative number, got {p}")));
        }
    }
    let out = cli
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Sweep => cmd_sweep(config, &out),
        Command::Spectrum => cmd_spectrum(config, &out, &cli.powers),
        Command::Modes => cmd_modes(config, &out, &cli.powers),
        Command::Oracle => cmd_oracle(&config, &out),
        Command::Calibrate => cmd_calibrate(config, &out),
    }
}

fn scenario_header(s: &Scenario, extra: &[(&str, String)]) -> String {
    let mut all = vec![
        ("resolved.cut_angle_deg", format!("{}", s.crystal.cut_angle.to_degrees())),
        ("resolved.coupling_k", sci(s.k)),
        ("resolved.spectral_modes", s.basis.spectral.len().to_string()),
        ("resolved.radial_modes", s.basis.radial.len().to_string()),
        ("resolved.azimuthal_modes", s.basis.azimuthal.coeffs.len().to_string()),
        ("resolved.retained_mass", sci(s.table.retained_mass)),
        ("resolved.omega_step_rad_s", sci(s.basis.spectral.grid.step)),
        ("resolved.k_step_rad_m", sci(s.basis.radial.grid.step)),
    ];
    all.extend(extra.iter().cloned());
    io::header(&s.config, &all)
}

fn cmd_sweep(config: SourceConfig, out: &Path) -> Result<ExitCode> {
    let opts = SweepOptions { temporal: config.sweep.temporal, transverse: config.sweep.transverse };
    let powers = sweep::log_grid(config.sweep.p_min, config.sweep.p_max, config.sweep.points)?;
    let s = Scenario::new(config)?;
    let records = sweep::run_sweep(&s, &powers, opts)?;
    io::write(out, "sweep.csv", &io::sweep_csv(&scenario_header(&s, &[]), &records))?;

    let p: Vec<f64> = records.iter().map(|r| r.power).collect();
    let series: [(&str, Vec<f64>, ExtremumKind); 3] = [
        ("k_dim_minima", records.iter().map(|r| r.k_dim).collect(), ExtremumKind::Minima),
        ("c_omega_maxima", records.iter().map(|r| r.c_omega.value).collect(), ExtremumKind::Maxima),
        ("spectrum_fwhm_minima", records.iter().map(|r| r.spectrum.value).collect(), ExtremumKind::Minima),
    ];
    let mut report = serde_json::Map::new();
    for (name, v, kind) in series {
        let t = sweep::detect_thresholds(&p, &v, kind)?;
        let ex: Vec<_> = t.extrema.iter().map(|e| json!({"index": e.index, "power_w": e.power, "value": e.value})).collect();
        report.insert(name.into(), json!({"extrema": ex, "p_th": t.p_th(), "p_th1": t.p_th1(), "p_th2": t.p_th2()}));
    }
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::numeric(e.to_string()))?;
    io::write(out, "thresholds.json", &(text + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn default_powers(powers: &[f64]) -> Vec<f64> {
    if powers.is_empty() {
        vec![1e-3, 0.2, 10.0]
    } else {
        powers.to_vec()
    }
}

fn cmd_spectrum(config: SourceConfig, out: &Path, powers: &[f64]) -> Result<ExitCode> {
    let s = Scenario::new(config)?;
    let stride = (s.basis.spectral.grid.n / 128).max(1);
    for (i, &p) in default_powers(powers).iter().enumerate() {
        let st = s.state(p);
        let h = scenario_header(&s, &[("power_w", sci(p))]);
        let tag = format!("p{i:02}");
        io::write(out, &format!("{tag}_spectrum.csv"), &io::profile_csv(&h, "intensity", &st.signal_spectrum()))?;
        io::write(out, &format!("{tag}_c_omega_slice.csv"), &io::profile_csv(&h, "c", &st.spectral_cross_slice()))?;
        io::write(out, &format!("{tag}_a_omega_slice.csv"), &io::profile_csv(&h, "a", &st.spectral_auto_slice()))?;
        io::write(out, &format!("{tag}_c_omega_map.csv"), &io::profile2d_csv(&h, "c", &st.spectral_crosscorrelation(stride)))?;
        io::write(out, &format!("{tag}_a_omega_map.csv"), &io::profile2d_csv(&h, "a", &st.spectral_autocorrelation(stride)))?;
        let t = st.temporal_correlations(&s.temporal);
        io::write(out, &format!("{tag}_pulse.csv"), &io::profile_csv(&h, "intensity", &t.pulse))?;
        io::write(out, &format!("{tag}_c_t_slice.csv"), &io::profile_csv(&h, "c", &t.cross_slice))?;
        io::write(out, &format!("{tag}_a_t_slice.csv"), &io::profile_csv(&h, "a", &t.auto_slice))?;
        let tr = st.transverse_correlations();
        io::write(out, &format!("{tag}_c_k_slice.csv"), &io::profile_csv(&h, "c", &tr.radial_slice))?;
        io::write(out, &format!("{tag}_ring.csv"), &io::profile_csv(&h, "intensity", &tr.ring))?;
        let az = st.azimuthal_correlation(s.azimuthal_window(), sweep::AZIMUTHAL_SAMPLES)?;
        io::write(out, &format!("{tag}_c_phi.csv"), &io::profile_csv(&h, "c", &az))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_modes(config: SourceConfig, out: &Path, powers: &[f64]) -> Result<ExitCode> {
    let s = Scenario::new(config)?;
    let h = scenario_header(&s, &[]);
    let coeff_rows = |c: &[f64]| c.iter().enumerate().map(|(i, l)| vec![i as f64, *l, l * l]).collect::<Vec<_>>();
    let cols = ["index", "lambda", "lambda_sq"];
    io::write(out, "spectral_coefficients.csv", &io::table_csv(&h, &cols, &coeff_rows(&s.basis.spectral.coeffs)))?;
    io::write(out, "radial_coefficients.csv", &io::table_csv(&h, &cols, &coeff_rows(&s.basis.radial.coeffs)))?;
    let az = &s.basis.azimuthal;
    let az_rows: Vec<Vec<f64>> = az.orders.iter().zip(&az.coeffs).map(|(m, l)| vec![*m as f64, *l, l * l]).collect();
    io::write(out, "azimuthal_coefficients.csv", &io::table_csv(&h, &["order", "lambda", "lambda_sq"], &az_rows))?;

    // All retained triplets, grouped by coefficient.
    let bins = s.config.grid.class_bins_per_decade.max(1) as f64;
    let mut classes: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    let tr = &s.table.transverse;
    for &lq in &s.table.spectral {
        for (l, n) in tr.lambda.iter().zip(&tr.count) {
            let lam = l * lq;
            let e = classes.entry((lam.log10() * bins).floor() as i64).or_insert((0.0, 0.0));
            e.0 += n;
            e.1 += n * lam * lam;
        }
    }
    let rows: Vec<Vec<f64>> = classes
        .values()
        .rev()
        .map(|&(n, m)| vec![(m / n).sqrt(), n, m])
        .collect();
    io::write(out, "triplet_classes.csv", &io::table_csv(&h, &["lambda", "count", "count_lambda_sq"], &rows))?;

    for (i, &p) in default_powers(powers).iter().enumerate() {
        let st = s.state(p);
        let hist = st.mode_population_histogram(DENSITY_BINS_PER_DECADE);
        // Mean V^2 per density bin stands in for the per-triplet scatter.
        let mut acc: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
        let b = DENSITY_BINS_PER_DECADE as f64;
        for &(l, v2, n) in &hist.scatter {
            let e = acc.entry((l.log10() * b).floor() as i64).or_insert((0.0, 0.0));
            e.0 += n;
            e.1 += n * v2;
        }
        let rows: Vec<Vec<f64>> = hist
            .density
            .iter()
            .zip(acc.values())
            .map(|(&(lo, hi, n), &(_, sv))| vec![lo, hi, n, sv / n])
            .collect();
        let hh = scenario_header(&s, &[("power_w", sci(p))]);
        io::write(
            out,
            &format!("p{i:02}_histogram.csv"),
            &io::table_csv(&hh, &["lambda_lo", "lambda_hi", "triplets", "mean_v_sq"], &rows),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(config: &SourceConfig, out: &Path) -> Result<ExitCode> {
    let h = io::header(config, &[]);
    let mut worst = oracles::ClosedFormErrors::default();
    let mut vacuum = 0f64;
    for init in oracles::random_inits(1, 100) {
        let t = oracles::rk4_classical(&init, &[init.z_end])?;
        let e = oracles::compare_closed_form(&init, &t);
        worst.amplitude = worst.amplitude.max(e.amplitude);
        worst.phase = worst.phase.max(e.phase);
        worst.uv = worst.uv.max(e.uv);
        worst.conservation = worst.conservation.max(e.conservation);
        worst.symplectic = worst.symplectic.max(e.symplectic);
        let z0 = twinbeam::dynamics::depletion_length(&init);
        let back = exit_coefficients(&init.with_z_end(2.0 * z0));
        vacuum = vacuum.max(back.v * back.v);
    }

    // A moderate init traced through two full periods.
    let init = TripletInit::new(10.0, twinbeam::dynamics::VACUUM, 1.0, 0.0)?;
    let z0 = twinbeam::dynamics::depletion_length(&init);
    let grid: Vec<f64> = (0..=400).map(|i| 4.0 * z0 * i as f64 / 400.0).collect();
    let traj = oracles::rk4_classical(&init, &grid)?;
    let v_return = traj.v[200].abs();
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| vec![traj.z[i], traj.ap[i], traj.as_[i], traj.ai[i], traj.phi[i], traj.u[i], traj.v[i]])
        .collect();
    io::write(out, "rk4_trajectory.csv", &io::table_csv(&h, &["z_m", "a_p", "a_s", "a_i", "phi", "u", "v"], &rows))?;

    let fc = FockConfig::default();
    let fock = oracles::fock_trilinear(&fc)?;
    let validity = oracles::approximation_validity(&fc, &fock)?;
    let rows: Vec<Vec<f64>> = (0..fock.z.len())
        .map(|i| {
            let gpa = twinbeam::dynamics::exit_weights(fc.alpha, fc.k, fock.z[i]).0;
            vec![fock.z[i], fock.n_p[i], fock.n_s[i], fock.n_i[i], fock.var_p[i], fock.var_s[i], gpa]
        })
        .collect();
    io::write(
        out,
        "fock_trajectory.csv",
        &io::table_csv(&h, &["z", "n_p", "n_s", "n_i", "var_p", "var_s", "n_s_approx"], &rows),
    )?;
    let fock_cons = fock
        .n_p
        .iter()
        .zip(&fock.n_s)
        .map(|(p, s)| (p + s - fock.n_p[0] - fock.n_s[0]).abs() / (fock.n_p[0] + fock.n_s[0]))
        .fold(0.0, f64::max);

    let checks = [
        ("closed_form_vs_rk4", worst.worst(), 1e-8),
        ("rk4_conservation", worst.conservation, 1e-10),
        ("rk4_symplectic", worst.symplectic, 1e-10),
        ("vacuum_return_closed_form", vacuum, 1e-8),
        ("vacuum_return_rk4", v_return, 1e-8),
        ("fock_norm_drift", fock.norm_drift, 1e-8),
        ("fock_conservation", fock_cons, 1e-8),
        ("approximation_validity", validity.max_rel_error, 0.15),
    ];
    let mut all = true;
    let mut report = serde_json::Map::new();
    for (name, value, tol) in checks {
        let pass = value < tol;
        all &= pass;
        report.insert(name.into(), json!({"value": value, "tolerance": tol, "pass": pass}));
    }
    report.insert(
        "fock_first_maximum".into(),
        json!({"z": validity.first_max_z, "n_s": validity.first_max, "half_z": validity.half_z}),
    );
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::numeric(e.to_string()))?;
    io::write(out, "oracle_report.json", &(text + "\n"))?;
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_calibrate(config: SourceConfig, out: &Path) -> Result<ExitCode> {
    let s = Scenario::new(config)?;
    let mut v = json!({ "k": s.k });
    if let twinbeam::config::Coupling::Anchor { power, fraction, .. } = s.config.coupling {
        let n = sweep::photon_number(&s, power, s.k, s.crystal.length);
        v["reference_power_w"] = json!(power);
        v["reference_fraction"] = json!(fraction);
        v["achieved_fraction"] = json!(s.conversion(n, power));
    }
    let text = serde_json::to_string_pretty(&v).map_err(|e| Error::numeric(e.to_string()))?;
    io::write(out, "coupling.json", &(text + "\n"))?;
    Ok(ExitCode::SUCCESS)
}
