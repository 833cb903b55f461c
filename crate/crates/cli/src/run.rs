//! Task implementations.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use scar_core::basis::{HilbertSpace, SectorBasis, StateVector, SymmetrySector};
use scar_core::control::{averaged_limit, pulsed_basis, pulsed_error, PulsedProtocol};
use scar_core::metrology::protocols::{mfi_sensing, spin1_sensing, spin1_sensing_from, MfiInitial, Spin1Reduction};
use scar_core::metrology::sweep::{grid, sweep, Params, SweepOptions, SweepOutcome, SweepRow};
use scar_core::metrology::{default_t_min, fit_scaling, log_time_grid, ErrorPoint, FitResult, SensingProtocol};
use scar_core::operators::{
    magnetization_terms, mfi_hamiltonian, pxp_basis, pxp_hamiltonian, rotation_u, spin1_hamiltonian, zero_count_terms, CouplingMap, Leakage, MfiParams, Spin1Params,
};
use scar_core::scars::{
    dicke_state, optimize_twist, rotated_scar_check, two_axis_twist, verify_annihilation, wineland_xi, DickeBasis, SymmetricSpin,
};
use scar_core::spectral::{align_degenerate, entanglement_entropy, full_spectrum, half_chain, level_spacing_ratio, spacing_histogram, DENSE_BUDGET};

use crate::config::*;
use crate::output::{num, nums, Artifacts, Cell, Table};
use crate::CliError;

pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub out: &'a Path,
    pub jobs: Option<usize>,
    pub quiet: bool,
}

impl Context<'_> {
    fn progress(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn unsupported(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {msg}"))
}

fn spin1(model: &ModelConfig) -> Result<&Spin1Model, CliError> {
    match model {
        ModelConfig::Spin1Dmi(m) => Ok(m),
        other => Err(unsupported("model.kind", format!("this task needs spin1-dmi, got {}", other.kind()))),
    }
}

pub fn spin1_params(m: &Spin1Model, seed: u64) -> Result<Spin1Params, CliError> {
    let b = m.boundary.to_core();
    let couplings = match m.couplings {
        CouplingKind::InverseSquare => CouplingMap::inverse_square(m.n, b, m.lambda)?,
        CouplingKind::NearestNeighbor => CouplingMap::nearest_neighbor(m.n, b, m.lambda)?,
        CouplingKind::Random => CouplingMap::random_inverse_square(m.n, b, m.lambda, seed)?,
        CouplingKind::Zero => CouplingMap::zero(m.n, b),
    };
    let mut p = Spin1Params::new(m.omega, m.phi, couplings);
    p.anisotropy = m.anisotropy;
    p.transverse = m.transverse;
    p.transverse_phase = m.eta;
    if m.disorder != 0.0 {
        // separate stream from the couplings
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00d1_5012_de12);
        p.disorder = (0..m.n).map(|_| rng.random_range(-m.disorder..=m.disorder)).collect();
    }
    Ok(p)
}

fn mfi_params(m: &MfiModel) -> MfiParams {
    MfiParams { omega: m.omega, longitudinal: m.longitudinal(), ising: m.lambda, eta: m.eta }
}

fn reduction(r: Reduction) -> Spin1Reduction {
    match r {
        Reduction::Auto => Spin1Reduction::Auto,
        Reduction::Full => Spin1Reduction::Full,
        Reduction::Parity => Spin1Reduction::Parity,
    }
}

/// Sensing protocol and the default time window for a model.
fn protocol_for(model: &ModelConfig, config: &RunConfig) -> Result<(SensingProtocol, f64, f64), CliError> {
    let p = &config.protocol;
    match model {
        ModelConfig::Spin1Dmi(m) => {
            let space = HilbertSpace::spin_one(m.n, m.boundary.to_core())?;
            let params = spin1_params(m, config.seed)?;
            let proto = spin1_sensing(&space, &params, reduction(p.reduction), p.total_time)?;
            let w = m.omega.abs().max(f64::MIN_POSITIVE);
            Ok((proto, 0.1 / w, 50.0 / w))
        }
        ModelConfig::Mfi(m) => {
            let space = HilbertSpace::spin_half(m.n, m.boundary.to_core())?;
            let initial = match p.initial {
                InitialState::PolarizedDown => MfiInitial::PolarizedDown,
                _ => MfiInitial::Neel,
            };
            let proto = mfi_sensing(&space, &mfi_params(m), initial, p.total_time)?;
            let t_min = default_t_min(&[m.omega, m.lambda, m.longitudinal()]);
            let t_max = 20.0 * m.lambda.abs().max(m.omega.abs()) / (m.omega * m.omega).max(f64::MIN_POSITIVE);
            Ok((proto, t_min, t_max))
        }
        ModelConfig::Pxp(_) => Err(unsupported("model.kind", "pxp supports the spectrum task only")),
    }
}

fn time_grid(config: &RunConfig, t_min: f64, t_max: f64) -> Result<Vec<f64>, CliError> {
    let p = &config.protocol;
    let lo = p.t_min.unwrap_or(t_min);
    let hi = p.t_max.unwrap_or(t_max);
    if lo >= hi {
        return Err(unsupported("protocol.t_max", format!("window [{lo}, {hi}] is empty")));
    }
    Ok(log_time_grid(lo, hi, p.per_decade)?)
}

fn status_name(s: scar_core::metrology::PointStatus) -> String {
    serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn error_row(e: &ErrorPoint) -> Vec<Cell> {
    vec![
        e.t.into(),
        e.delta_omega.into(),
        e.merit.into(),
        Cell::S(status_name(e.status)),
        e.theta.map(Cell::F).unwrap_or(Cell::S(String::new())),
        e.stencil_disagreement.into(),
    ]
}

const ERROR_COLUMNS: [&str; 6] = ["t", "delta_omega", "merit", "status", "theta", "stencil_disagreement"];

pub fn sense(ctx: &Context) -> Result<Artifacts, CliError> {
    let config = ctx.config;
    let (proto, t_min, t_max) = protocol_for(&config.model, config)?;
    let mut table = Table::new(&ERROR_COLUMNS);
    let results;
    let headline;
    if let Some(times) = &config.protocol.times {
        let mut session = proto.session()?;
        let points = session.curve(times)?;
        for e in &points {
            table.push(error_row(e));
        }
        let best = points.iter().min_by(|a, b| a.delta_omega.total_cmp(&b.delta_omega)).expect("times are non-empty");
        headline = format!("sense: {} times, best delta_omega {} at t = {}", points.len(), best.delta_omega, best.t);
        results = json!({ "points": points.len(), "best_t": best.t, "best_delta_omega": num(best.delta_omega) });
    } else {
        let grid = time_grid(config, t_min, t_max)?;
        let curve = proto.optimize_sensing_time(&grid, config.protocol.refine)?;
        for e in &curve.points {
            table.push(error_row(e));
        }
        headline = format!(
            "sense: t* = {}, delta_omega* = {}{}",
            curve.t_star,
            curve.delta_omega_star,
            if curve.diverged { " (still decreasing at t_max)" } else { "" }
        );
        results = json!({
            "t_star": curve.t_star,
            "delta_omega_star": num(curve.delta_omega_star),
            "diverged": curve.diverged,
            "t_min": grid[0],
            "t_max": grid[grid.len() - 1],
            "grid_points": grid.len(),
        });
    }
    Ok(Artifacts { tables: vec![("sense".into(), table)], results, headline })
}

fn checkpoint_name(config: &RunConfig) -> String {
    let mut h = DefaultHasher::new();
    serde_json::to_string(config).unwrap_or_default().hash(&mut h);
    format!("sweep.{:016x}.checkpoint.jsonl", h.finish())
}

fn fit_x(spec: &FitSpec, lookup: &dyn Fn(&str) -> Option<f64>, t_star: f64) -> Option<f64> {
    match spec.x.as_str() {
        "t_star" => Some(t_star),
        "abs_lambda_cos_phi" => Some((lookup("lambda")? * lookup("phi")?.cos()).abs()),
        name => lookup(name),
    }
}

fn fit_json(name: &str, f: &FitResult) -> Value {
    json!({
        "name": name,
        "model": f.model,
        "prefactor": num(f.prefactor),
        "exponent": num(f.exponent),
        "exponent_stderr": num(f.exponent_stderr),
        "residual_rms": num(f.residual_rms),
        "points": f.points,
    })
}

fn run_fits(specs: &[FitSpec], rows: &[(Box<dyn Fn(&str) -> Option<f64> + '_>, f64, f64)]) -> Result<Vec<(String, FitResult)>, CliError> {
    let mut out = Vec::new();
    for spec in specs {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (lookup, t_star, d_star) in rows {
            let y = match spec.y {
                FitTarget::TStar => *t_star,
                FitTarget::DeltaOmegaStar => *d_star,
            };
            if let Some(x) = fit_x(spec, lookup.as_ref(), *t_star) {
                if x.is_finite() && y.is_finite() {
                    xs.push(x);
                    ys.push(y);
                }
            }
        }
        out.push((spec.name.clone(), fit_scaling(&xs, &ys, spec.model)?));
    }
    Ok(out)
}

pub fn sweep_task(ctx: &Context) -> Result<Artifacts, CliError> {
    let config = ctx.config;
    let spec = config.sweep.as_ref().expect("checked by require_section");
    let axes: Vec<(&str, Vec<f64>)> = spec.axes.iter().map(|a| (a.name.as_str(), a.values.clone())).collect();
    let points = grid(&axes);
    ctx.progress(format!("sweep: {} points", points.len()));
    let checkpoint = ctx.out.join(checkpoint_name(config));
    std::fs::create_dir_all(ctx.out)?;
    let options = SweepOptions { jobs: ctx.jobs, checkpoint: Some(checkpoint.clone()) };
    let task = |index: usize, params: &Params| -> scar_core::Result<SweepOutcome> {
        let mut model = config.model.clone();
        for (k, v) in params {
            model.set(k, *v).map_err(scar_core::Error::InvalidParameter)?;
        }
        let (proto, t_min, t_max) = protocol_for(&model, config).map_err(|e| match e {
            CliError::Numerical(e) => e,
            other => scar_core::Error::InvalidParameter(other.to_string()),
        })?;
        let lo = config.protocol.t_min.unwrap_or(t_min);
        let hi = config.protocol.t_max.unwrap_or(t_max);
        let grid = log_time_grid(lo, hi, config.protocol.per_decade)?;
        let curve = proto.optimize_sensing_time(&grid, config.protocol.refine)?;
        if !ctx.quiet {
            eprintln!("  point {index}: {params:?} -> t* {} delta_omega* {}", curve.t_star, curve.delta_omega_star);
        }
        Ok(SweepOutcome {
            t_star: curve.t_star,
            delta_omega_star: curve.delta_omega_star,
            diverged: curve.diverged,
            seed: model.uses_seed().then_some(config.seed),
        })
    };
    let mut record = sweep(&points, &options, task)?;
    // a finished sweep needs no checkpoint
    std::fs::remove_file(&checkpoint)?;

    let mut header: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    header.extend(["t_star", "delta_omega_star", "diverged", "seed"].map(String::from));
    let mut table = Table::new(&header);
    for row in &record.rows {
        let mut cells: Vec<Cell> = row.params.iter().map(|(_, v)| Cell::F(*v)).collect();
        cells.extend([row.t_star.into(), row.delta_omega_star.into(), row.diverged.into(), row.seed.into()]);
        table.push(cells);
    }
    let ok: Vec<SweepRow> = record.ok_rows().cloned().collect();
    let rows: Vec<(Box<dyn Fn(&str) -> Option<f64> + '_>, f64, f64)> = ok
        .iter()
        .map(|r| {
            let lookup: Box<dyn Fn(&str) -> Option<f64> + '_> = Box::new(move |k: &str| r.param(k).or_else(|| config.model.get(k)));
            (lookup, r.t_star, r.delta_omega_star)
        })
        .collect();
    record.fits = run_fits(&spec.fits, &rows)?;
    let failures: Vec<Value> = record
        .rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| json!({ "index": r.index, "params": r.params, "error": e })))
        .collect();
    let headline = format!(
        "sweep: {} points, {} failed{}",
        record.rows.len(),
        failures.len(),
        record.fits.iter().map(|(n, f)| format!("; {n}: prefactor {:.4} exponent {:.4} rms {:.3e}", f.prefactor, f.exponent, f.residual_rms)).collect::<String>()
    );
    let results = json!({
        "points": record.rows.len(),
        "failures": failures,
        "fits": record.fits.iter().map(|(n, f)| fit_json(n, f)).collect::<Vec<_>>(),
    });
    Ok(Artifacts { tables: vec![("sweep".into(), table)], results, headline })
}

fn sector_from(c: &SectorConfig, num_sites: usize) -> SymmetrySector {
    let mut s = SymmetrySector::new();
    if let Some(k) = c.momentum {
        // negative momenta count back from N
        s = s.with_momentum(k.rem_euclid(num_sites.max(1) as i64) as usize);
    }
    if let Some(m) = c.magnetization {
        s = s.with_magnetization(m);
    }
    if let Some(r) = c.reflection {
        s = s.with_reflection(r);
    }
    if let Some(p) = c.number_parity {
        s = s.with_number_parity(p);
    }
    if let Some(t) = c.translation_step {
        s = s.with_translation_step(t);
    }
    s
}

pub fn spectrum(ctx: &Context) -> Result<Artifacts, CliError> {
    let config = ctx.config;
    let spec = config.spectrum.clone().unwrap_or_default();
    let empty_sector = spec.sector == SectorConfig::default();
    let (space, basis, h) = match &config.model {
        ModelConfig::Spin1Dmi(m) => {
            let space = HilbertSpace::spin_one(m.n, m.boundary.to_core())?;
            let basis = SectorBasis::new(&space, &sector_from(&spec.sector, m.n))?;
            let h = spin1_hamiltonian(&basis, &spin1_params(m, config.seed)?)?;
            (space, basis, h)
        }
        ModelConfig::Mfi(m) => {
            let space = HilbertSpace::spin_half(m.n, m.boundary.to_core())?;
            let basis = SectorBasis::new(&space, &sector_from(&spec.sector, m.n))?;
            let h = mfi_hamiltonian(&basis, &mfi_params(m))?;
            (space, basis, h)
        }
        ModelConfig::Pxp(m) => {
            if !empty_sector {
                return Err(unsupported("spectrum.sector", "pxp runs in the full constrained space"));
            }
            let space = HilbertSpace::spin_half(m.n, m.boundary.to_core())?;
            let basis = pxp_basis(&space)?;
            let h = pxp_hamiltonian(&basis, m.omega)?;
            (space, basis, h)
        }
    };
    ctx.progress(format!("spectrum: dimension {}", basis.dim()));
    let observable = match spec.observable {
        ObservableKind::None => None,
        ObservableKind::N0 => {
            spin1(&config.model).map_err(|_| unsupported("spectrum.observable", "n0 needs a spin1-dmi model"))?;
            Some(zero_count_terms(&space)?.to_sparse(&basis, Leakage::Forbid)?.mark_hermitian(0.0)?)
        }
        ObservableKind::Magnetization => {
            Some(magnetization_terms(&space)?.to_sparse(&basis, Leakage::Forbid)?.mark_hermitian(0.0)?)
        }
    };
    let with_vectors = observable.is_some() || spec.entropy;
    let mut result = full_spectrum(&h, config.model.kind(), DENSE_BUDGET, with_vectors)?;
    let mut values: Option<Vec<f64>> = None;
    if let Some(o) = &observable {
        let (aligned, scan) = align_degenerate(&result, o)?;
        result = aligned;
        values = Some(scan.iter().map(|p| p.value).collect());
    }
    let mut entropies: Option<Vec<f64>> = None;
    if spec.entropy {
        if space.num_sites() < 2 {
            return Err(unsupported("spectrum.entropy", "needs at least two sites"));
        }
        let cut = half_chain(&space);
        let mut s = Vec::with_capacity(result.len());
        for j in 0..result.len() {
            let v = basis.embed(&result.eigenvector(j).expect("vectors requested"))?;
            s.push(entanglement_entropy(&space, &v, &cut)?);
        }
        entropies = Some(s);
    }

    let mut header = vec!["index", "energy"];
    if observable.is_some() {
        header.push("value");
    }
    if spec.entropy {
        header.push("entropy");
    }
    let mut table = Table::new(&header);
    for (j, &e) in result.values.iter().enumerate() {
        let mut row = vec![Cell::from(j), Cell::from(e)];
        if let Some(v) = &values {
            row.push(v[j].into());
        }
        if let Some(s) = &entropies {
            row.push(s[j].into());
        }
        table.push(row);
    }

    let mut results = json!({ "dimension": basis.dim(), "sector": basis.sector().describe() });
    let mut headline = format!("spectrum: {} levels", result.len());
    if result.len() >= 3 {
        let r = level_spacing_ratio(&result.values)?;
        results["mean_r"] = num(r.mean);
        results["ratio_count"] = json!(r.count);
        results["zero_spacing_fraction"] = num(r.zero_fraction);
        headline += &format!(", <r> = {:.4} (zero spacings {:.3})", r.mean, r.zero_fraction);
    }
    if result.len() >= 50 {
        let hist = spacing_histogram(&result.values, spec.histogram_bins, spec.histogram_s_max)?;
        results["histogram"] = json!({
            "edges": nums(&hist.edges),
            "densities": nums(&hist.densities),
            "unfolding_degree": hist.unfolding.degree,
            "kept_levels": hist.unfolding.kept_levels,
        });
    }
    if let (ObservableKind::N0, Some(v)) = (spec.observable, &values) {
        let threshold = 1e-8 * space.num_sites() as f64;
        let scars: Vec<Value> = v
            .iter()
            .enumerate()
            .filter(|(_, x)| **x < threshold)
            .map(|(j, _)| {
                let mut s = json!({ "index": j, "energy": result.values[j] });
                if let Some(ent) = &entropies {
                    s["entropy"] = num(ent[j]);
                }
                s
            })
            .collect();
        headline += &format!(", {} states with N0 = 0", scars.len());
        let mut bulk: Vec<f64> = v.iter().filter(|x| **x >= threshold).map(|x| x / space.num_sites() as f64).collect();
        bulk.sort_by(f64::total_cmp);
        if !bulk.is_empty() {
            results["bulk_median_n0_per_site"] = num(bulk[bulk.len() / 2]);
        }
        results["zero_n0_states"] = Value::Array(scars);
    }
    Ok(Artifacts { tables: vec![("spectrum".into(), table)], results, headline })
}

pub fn scars(ctx: &Context) -> Result<Artifacts, CliError> {
    let config = ctx.config;
    let m = spin1(&config.model)?;
    let space = HilbertSpace::spin_one(m.n, m.boundary.to_core())?;
    let basis = SectorBasis::full(&space);
    let p = spin1_params(m, config.seed)?;
    let annihilation = verify_annihilation(&p.couplings, m.phi)?;
    let h = spin1_hamiltonian(&basis, &p)?;
    let tower = DickeBasis::full(&space)?;
    let rotated = m.transverse != 0.0;
    let u = if rotated { Some(rotation_u(&basis, m.omega, m.transverse, m.eta)?) } else { None };
    let scale = (m.omega * m.omega + m.transverse * m.transverse).sqrt();
    let n = m.n as f64;
    let cut = half_chain(&space);
    let mut table = Table::new(&["s", "magnetization", "energy", "residual", "entropy"]);
    let mut worst: f64 = 0.0;
    for s in 0..=m.n {
        let energy = scale * (s as f64 - n / 2.0);
        let (residual, state) = match &u {
            Some(u) => (rotated_scar_check(&tower, u, &h, s, energy)?, u.apply_state(tower.state(s))?),
            None => {
                let d = dicke_state(&space, s)?;
                let mut target = d.clone();
                target.scale(Complex64::new(energy, 0.0));
                (h.apply_state(&d)?.distance(&target), d)
            }
        };
        worst = worst.max(residual);
        let entropy = if m.n >= 2 { entanglement_entropy(&space, &state, &cut)? } else { 0.0 };
        table.push(vec![s.into(), (2 * s as i32 - m.n as i32).into(), energy.into(), residual.into(), entropy.into()]);
    }
    let headline = format!(
        "scars: max annihilation residual {annihilation:.3e}{}; {} tower states, max eigen-residual {worst:.3e}",
        if annihilation < 1e-12 { " < 1e-12" } else { "" },
        m.n + 1
    );
    let results = json!({
        "max_annihilation_residual": num(annihilation),
        "max_eigen_residual": num(worst),
        "rotated": rotated,
        "energy_scale": scale,
        "states": m.n + 1,
    });
    Ok(Artifacts { tables: vec![("scars".into(), table)], results, headline })
}

pub fn pulses(ctx: &Context) -> Result<Artifacts, CliError> {
    let config = ctx.config;
    let spec = config.pulses.as_ref().expect("checked by require_section");
    let m = spin1(&config.model)?;
    if m.anisotropy != 0.0 || m.transverse != 0.0 {
        return Err(unsupported("model", "pulse sequences support the DMI/XX interaction and disorder only"));
    }
    let space = HilbertSpace::spin_one(m.n, m.boundary.to_core())?;
    let basis = pulsed_basis(&space)?;
    let p = spin1_params(m, config.seed)?;
    let mut proto = PulsedProtocol::new(&basis, &p.couplings, m.phi, m.omega)?.with_total_time(config.protocol.total_time);
    if !p.disorder.is_empty() {
        proto = proto.with_disorder(&p.disorder)?;
    }
    ctx.progress(format!("pulses: dimension {}", basis.dim()));
    let mut table = Table::new(&["t", "m", "delta_omega", "averaged_limit"]);
    for &t in &spec.times {
        for &count in &spec.counts {
            let e = pulsed_error(&proto, t, count)?;
            table.push(vec![t.into(), count.into(), e.delta_omega.into(), averaged_limit(m.n, t, config.protocol.total_time).into()]);
        }
    }
    let results = json!({
        "dimension": basis.dim(),
        "family": "o-theta",
        "averaged_limit": "(pi/2)/sqrt(N t T)",
    });
    let headline = format!("pulses: {} rows", table.rows.len());
    Ok(Artifacts { tables: vec![("pulses".into(), table)], results, headline })
}

pub fn squeeze(ctx: &Context) -> Result<Artifacts, CliError> {
    let config = ctx.config;
    let spec = config.squeeze.as_ref().expect("checked by require_section");
    let mut table = Table::new(&["n", "chi", "xi", "axis_x", "axis_y", "axis_z"]);
    let (mut ns, mut xis) = (Vec::new(), Vec::new());
    for &n in &spec.sizes {
        let r = optimize_twist(&SymmetricSpin::new(n), 4.0 / n as f64, spec.scan_points)?;
        table.push(vec![n.into(), r.chi.into(), r.xi.into(), r.squeezed_axis[0].into(), r.squeezed_axis[1].into(), r.squeezed_axis[2].into()]);
        ns.push(n as f64);
        xis.push(r.xi);
    }
    let mut results = json!({});
    let mut headline = format!("squeeze: {} sizes", spec.sizes.len());
    if ns.len() >= 3 {
        let f = fit_scaling(&ns, &xis, scar_core::metrology::ScalingModel::PowerLaw { exponent: None })?;
        headline += &format!(", xi slope {:.4}", f.exponent);
        results["xi_fit"] = fit_json("xi", &f);
    }
    let mut tables = vec![("squeeze".to_string(), table)];
    if let Some(times) = &spec.full_space_times {
        let m = spin1(&config.model)?;
        let space = HilbertSpace::spin_one(m.n, m.boundary.to_core())?;
        let basis = SectorBasis::full(&space);
        let r = optimize_twist(&SymmetricSpin::new(m.n), 4.0 / m.n as f64, spec.scan_points)?;
        let plus: StateVector = scar_core::basis::plus_state(&space)?;
        let psi = two_axis_twist(&basis, r.chi, &plus)?;
        let xi = wineland_xi(&basis, &psi, r.chi)?.xi;
        let proto = spin1_sensing_from(&basis, &spin1_params(m, config.seed)?, psi, config.protocol.total_time)?;
        let mut full = Table::new(&["t", "delta_omega", "xi_sql", "ratio"]);
        let mut worst: f64 = 0.0;
        for &t in times {
            let e = proto.estimation_error(t)?.delta_omega;
            let target = xi / (m.n as f64 * t * config.protocol.total_time).sqrt();
            worst = worst.max((e / target - 1.0).abs());
            full.push(vec![t.into(), e.into(), target.into(), (e / target).into()]);
        }
        headline += &format!("; full space N={} xi {:.6}, max |dw/(xi dw_SQL) - 1| {:.2e}", m.n, xi, worst);
        results["full_space"] = json!({ "n": m.n, "chi": r.chi, "xi": xi, "max_relative_deviation": num(worst) });
        tables.push(("squeeze_full".to_string(), full));
    }
    Ok(Artifacts { tables, results, headline })
}

pub fn fit(ctx: &Context) -> Result<Artifacts, CliError> {
    let config = ctx.config;
    let spec = config.fit.as_ref().expect("checked by require_section");
    let mut reader = csv::Reader::from_path(&spec.input).map_err(|e| unsupported("fit.input", format!("{}: {e}", spec.input)))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| unsupported("fit.input", e))?
        .iter()
        .map(String::from)
        .collect();
    let column = |name: &str| header.iter().position(|h| h == name);
    let t_col = column("t_star").ok_or_else(|| unsupported("fit.input", "no t_star column"))?;
    let d_col = column("delta_omega_star").ok_or_else(|| unsupported("fit.input", "no delta_omega_star column"))?;
    for (i, f) in spec.fits.iter().enumerate() {
        let ok = match f.x.as_str() {
            "t_star" => true,
            "abs_lambda_cos_phi" => column("lambda").is_some() && column("phi").is_some(),
            name => column(name).is_some(),
        };
        if !ok {
            return Err(unsupported(&format!("fit.fits[{i}].x"), format!("column {:?} not found in {}", f.x, spec.input)));
        }
    }
    let mut parsed: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| unsupported("fit.input", e))?;
        let row: Vec<f64> = record.iter().map(|s| s.parse::<f64>().unwrap_or(f64::NAN)).collect();
        if row.len() != header.len() {
            return Err(unsupported("fit.input", format!("row {} has {} fields", line + 1, row.len())));
        }
        parsed.push(row);
    }
    let rows: Vec<(Box<dyn Fn(&str) -> Option<f64> + '_>, f64, f64)> = parsed
        .iter()
        .map(|r| {
            let lookup: Box<dyn Fn(&str) -> Option<f64> + '_> = Box::new(move |k: &str| column(k).map(|c| r[c]));
            (lookup, r[t_col], r[d_col])
        })
        .collect();
    let fits = run_fits(&spec.fits, &rows)?;
    let mut table = Table::new(&["name", "prefactor", "exponent", "exponent_stderr", "residual_rms", "points"]);
    for (n, f) in &fits {
        table.push(vec![n.as_str().into(), f.prefactor.into(), f.exponent.into(), f.exponent_stderr.into(), f.residual_rms.into(), f.points.into()]);
    }
    let headline = fits
        .iter()
        .map(|(n, f)| format!("fit {n}: prefactor {:.4} exponent {:.4} rms {:.3e}", f.prefactor, f.exponent, f.residual_rms))
        .collect::<Vec<_>>()
        .join("; ");
    let results = json!({ "rows": parsed.len(), "fits": fits.iter().map(|(n, f)| fit_json(n, f)).collect::<Vec<_>>() });
    Ok(Artifacts { tables: vec![("fit".into(), table)], results, headline })
}
