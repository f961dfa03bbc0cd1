use harmonet::bratteli::{
    arrow_matrices, energy_lower_bound, graph_to_bratteli, harmonic_exists, harmonic_sequence, level_harmonic_residuals, Assembly, LevelFunction,
};
use harmonet::input::read_transfer_spec;
use harmonet::models::{registry, FixtureParams};
use harmonet::network::{materialize_ball, try_materialize_ball, validate};
use harmonet::operators::{energy, VertexFunction};
use harmonet::potential::{dipole_with, gauss_green_split, monopole, multipole_with, Exhaustion, Truncation, Verdict};
use harmonet::transfer::{Direction, TransferSystem};
use harmonet::walk::{
    dipole_probabilistic, green_identities_report, green_truncated, hitting_matrix_d, monopole_probabilistic, transience_test, Classification, Growth, McParams,
};
use harmonet::VertexId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{abscissa, emit_csv, emit_json, emit_plot, RunConfig};
use crate::source::{parse_list, Source};
use crate::Failure;

const WALK_SAMPLES: u64 = 10_000;
const WALK_HORIZON: u64 = 10_000;
const TRANSIENCE_SAMPLES: u64 = 4_000;
const EXISTENCE_DEPTH: usize = 8;
const LEVELING_DEPTH: usize = 6;

/// Runs the command; `Ok(false)` is a negative verdict.
pub fn run(cli: &Cli) -> Result<bool, Failure> {
    let args = match &cli.command {
        Command::Validate(a) => to_value(a),
        Command::Harmonic(a) => to_value(a),
        Command::Dipole(a) => to_value(a),
        Command::Monopole(a) => to_value(a),
        Command::Multipole(a) => to_value(a),
        Command::Green(a) => to_value(a),
        Command::Hitting(a) => to_value(a),
        Command::Transience(a) => to_value(a),
        Command::Energy(a) => to_value(a),
        Command::GaussGreen(a) => to_value(a),
        Command::BratteliCheck(a) => to_value(a),
        Command::TransferCheck(a) => to_value(a),
        Command::Fixtures(a) => to_value(a),
    };
    let cfg = RunConfig { command: cli.command.name(), args, workers: cli.workers };
    match &cli.command {
        Command::Validate(a) => validate_cmd(&cfg, a),
        Command::Harmonic(a) => harmonic_cmd(&cfg, a),
        Command::Dipole(a) => dipole_cmd(&cfg, a, cli.workers),
        Command::Monopole(a) => monopole_cmd(&cfg, a, cli.workers),
        Command::Multipole(a) => multipole_cmd(&cfg, a),
        Command::Green(a) => green_cmd(&cfg, a),
        Command::Hitting(a) => hitting_cmd(&cfg, a, cli.workers),
        Command::Transience(a) => transience_cmd(&cfg, a, cli.workers),
        Command::Energy(a) => energy_cmd(&cfg, a),
        Command::GaussGreen(a) => gauss_green_cmd(&cfg, a),
        Command::BratteliCheck(a) => bratteli_check_cmd(&cfg, a),
        Command::TransferCheck(a) => transfer_check_cmd(&cfg, a),
        Command::Fixtures(a) => fixtures_cmd(&cfg, a),
    }
}

fn to_value<T: Serialize>(a: &T) -> Value {
    serde_json::to_value(a).unwrap_or(Value::Null)
}

fn ser<T: Serialize>(a: &T) -> Result<Value, Failure> {
    serde_json::to_value(a).map_err(|e| Failure::Io(e.to_string()))
}

fn mc_params(mc: &McArgs, samples: u64, horizon: u64, workers: Option<usize>) -> Result<McParams, Failure> {
    let seed = mc.seed.ok_or_else(|| Failure::Usage("Monte-Carlo runs need --seed".into()))?;
    let p = McParams::new(mc.samples.unwrap_or(samples), mc.horizon.unwrap_or(horizon), seed);
    Ok(match workers {
        Some(w) => p.workers(w),
        None => p,
    })
}

fn exhaustion(radii: &str) -> Result<Exhaustion, Failure> {
    let r: Vec<usize> = parse_list(radii, "radius")?;
    if r.is_empty() {
        return Err(Failure::Usage("--radii needs at least one radius".into()));
    }
    Ok(Exhaustion::with_radii(&r))
}

fn truncation(t: TruncationArg) -> Truncation {
    match t {
        TruncationArg::Grounded => Truncation::Grounded,
        TruncationArg::Free => Truncation::Free,
    }
}

fn function_plot(f: &VertexFunction) -> Vec<(f64, f64)> {
    f.iter().map(|(v, x)| (abscissa(v), x)).collect()
}

fn validate_cmd(cfg: &RunConfig, a: &ValidateArgs) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let center = src.vertex_or_origin(a.x.as_deref())?;
    let window = materialize_ball(src.net(), center, a.radius)?;
    let report = validate(src.net(), &window);
    let ok = report.is_valid();
    emit_json(cfg, a.output.out.as_deref(), json!({ "network": src.name, "center": center, "radius": a.radius, "valid": ok, "report": report }))?;
    Ok(ok)
}

fn harmonic_cmd(cfg: &RunConfig, a: &HarmonicArgs) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let d = src.diagram()?;
    let write_levels = |f: &LevelFunction| -> Result<(), Failure> {
        if let Some(path) = &a.csv {
            emit_csv(cfg, Some(path), &f.to_csv())?;
        }
        let plot: Vec<(f64, f64)> = f.levels.iter().enumerate().map(|(k, l)| ((f.start + k) as f64, l.iter().fold(0.0f64, |m, x| m.max(x.abs())))).collect();
        emit_plot(cfg, a.output.plot.as_deref(), &plot)
    };
    match &a.f1 {
        Some(f1) => {
            let f1: Vec<f64> = parse_list(f1, "f1")?;
            let f0: Vec<f64> = match &a.f0 {
                Some(s) => parse_list(s, "f0")?,
                None => vec![0.0; d.level_size(0)],
            };
            let assembly = match a.assembly {
                AssemblyArg::Conductance => Assembly::Conductance,
                AssemblyArg::Arrow => Assembly::Arrow,
            };
            let last = a.levels.unwrap_or(d.depth());
            let f = harmonic_sequence(d, &f0, &f1, last, assembly, a.tol)?;
            let residuals: Vec<Value> = level_harmonic_residuals(d, &f)?
                .into_iter()
                .filter(|(n, _)| *n >= d.harmonic_from() && *n < f.end())
                .map(|(n, r)| json!({ "level": n, "residual": r }))
                .collect();
            let ok = residuals.iter().all(|r| r["residual"].as_f64().is_some_and(|x| x <= a.tol));
            write_levels(&f)?;
            emit_json(cfg, a.output.out.as_deref(), json!({ "diagram": src.name, "harmonic": ok, "function": f, "residuals": residuals }))?;
            Ok(ok)
        }
        None => {
            let depth = a.levels.unwrap_or(EXISTENCE_DEPTH.min(d.depth()));
            let report = harmonic_exists(d, depth)?;
            if let Some(w) = &report.witness {
                write_levels(w)?;
            }
            let ok = report.exists;
            emit_json(cfg, a.output.out.as_deref(), json!({ "diagram": src.name, "existence": report }))?;
            Ok(ok)
        }
    }
}

fn dipole_cmd(cfg: &RunConfig, a: &DipoleArgs, workers: Option<usize>) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let (x, y) = (src.vertex(&a.x)?, src.vertex(&a.y)?);
    match a.method {
        Method::Potential => {
            let r = dipole_with(src.net(), x, y, &exhaustion(&a.radii)?, truncation(a.truncation))?;
            emit_plot(cfg, a.output.plot.as_deref(), &function_plot(&r.function))?;
            emit_json(cfg, a.output.out.as_deref(), r.to_json())?;
            Ok(true)
        }
        Method::Walk => {
            let params = mc_params(&a.mc, WALK_SAMPLES, WALK_HORIZON, workers)?;
            let eval = materialize_ball(src.net(), x, a.eval_radius)?;
            let p = dipole_probabilistic(src.net(), x, y, &eval, &params)?;
            emit_plot(cfg, a.output.plot.as_deref(), &function_plot(&p.via_d.function))?;
            emit_json(
                cfg,
                a.output.out.as_deref(),
                json!({
                    "via_d": p.via_d.to_json(),
                    "via_monopoles": p.via_monopoles.to_json(),
                    "alpha": p.alpha,
                    "beta": p.beta,
                    "d": p.d,
                    "difference_residual": p.difference_residual,
                }),
            )?;
            Ok(true)
        }
    }
}

fn monopole_cmd(cfg: &RunConfig, a: &MonopoleArgs, workers: Option<usize>) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let x = src.vertex(&a.x)?;
    match a.method {
        Method::Potential => {
            let r = monopole(src.net(), x, &exhaustion(&a.radii)?)?;
            emit_plot(cfg, a.output.plot.as_deref(), &function_plot(&r.function))?;
            emit_json(cfg, a.output.out.as_deref(), r.to_json())?;
            Ok(r.verdict != Verdict::RecurrentConsistent)
        }
        Method::Walk => {
            let params = mc_params(&a.mc, WALK_SAMPLES, WALK_HORIZON, workers)?;
            let eval = materialize_ball(src.net(), x, a.eval_radius)?;
            let m = monopole_probabilistic(src.net(), x, &eval, &params)?;
            emit_plot(cfg, a.output.plot.as_deref(), &function_plot(&m.function))?;
            emit_json(cfg, a.output.out.as_deref(), m.to_json())?;
            Ok(true)
        }
    }
}

fn parse_sink(src: &Source, text: &str) -> Result<(VertexId, f64), Failure> {
    let (v, w) = text.rsplit_once('=').ok_or_else(|| Failure::Usage(format!("sink {text:?} is not vertex=weight")))?;
    let w = w.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad sink weight in {text:?}")))?;
    Ok((src.vertex(v)?, w))
}

fn multipole_cmd(cfg: &RunConfig, a: &MultipoleArgs) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let x0 = src.vertex(&a.x0)?;
    let sinks = a.sinks.iter().map(|s| parse_sink(&src, s)).collect::<Result<Vec<_>, _>>()?;
    let r = multipole_with(src.net(), x0, &sinks, &exhaustion(&a.radii)?, truncation(a.truncation))?;
    emit_plot(cfg, a.output.plot.as_deref(), &function_plot(&r.function))?;
    emit_json(cfg, a.output.out.as_deref(), r.to_json())?;
    Ok(true)
}

fn green_cmd(cfg: &RunConfig, a: &GreenArgs) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let (x, y) = (src.vertex(&a.x)?, src.vertex(&a.y)?);
    let window = try_materialize_ball(src.net(), x, a.radius.unwrap_or(a.n + 1), a.max_vertices)?;
    let g = green_truncated(src.net(), x, y, &window, a.n)?;
    let plot: Vec<(f64, f64)> = g.partial_sums.iter().enumerate().map(|(k, s)| (k as f64, *s)).collect();
    emit_plot(cfg, a.output.plot.as_deref(), &plot)?;
    let ok = g.growth != Growth::Diverging;
    emit_json(cfg, a.output.out.as_deref(), ser(&g)?)?;
    Ok(ok)
}

fn hitting_cmd(cfg: &RunConfig, a: &HittingArgs, workers: Option<usize>) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let (x, y) = (src.vertex(&a.x)?, src.vertex(&a.y)?);
    let params = mc_params(&a.mc, WALK_SAMPLES, WALK_HORIZON, workers)?;
    let report = green_identities_report(src.net(), x, y, &params)?;
    let d = if a.d_matrix { Some(hitting_matrix_d(src.net(), x, y, &params)?) } else { None };
    emit_json(cfg, a.output.out.as_deref(), json!({ "identities": report, "d_matrix": d }))?;
    Ok(true)
}

fn transience_cmd(cfg: &RunConfig, a: &TransienceArgs, workers: Option<usize>) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let x = src.vertex_or_origin(a.x.as_deref())?;
    let params = mc_params(&a.mc, TRANSIENCE_SAMPLES, WALK_HORIZON, workers)?;
    let report = transience_test(src.net(), x, &params)?;
    let ok = report.classification != Classification::Recurrent;
    emit_json(cfg, a.output.out.as_deref(), ser(&report)?)?;
    Ok(ok)
}

fn energy_cmd(cfg: &RunConfig, a: &EnergyArgs) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let fx = src.fixture()?;
    let form = fx.form(&a.form).ok_or_else(|| {
        let names: Vec<&str> = fx.forms.iter().map(|f| f.name.as_str()).collect();
        Failure::Usage(format!("fixture {} has no form {:?}; forms: {}", fx.name, a.form, names.join(", ")))
    })?;
    let radii: Vec<usize> = parse_list(&a.radii, "radius")?;
    let mut rows = Vec::new();
    let mut plot = Vec::new();
    for &r in &radii {
        let window = materialize_ball(src.net(), fx.origin(), r)?;
        let e = energy(&form.on_window(&window)?);
        plot.push((r as f64, e));
        rows.push(json!({ "radius": r, "vertices": window.len(), "energy": e }));
    }
    let bound = match a.bound {
        Some(n) => {
            let d = src.diagram()?;
            let mut levels = Vec::with_capacity(n + 2);
            for k in 0..=n + 1 {
                let l = (0..d.level_size(k)).map(|i| form.at(VertexId::Pair(k as i64, i as i64))).collect::<Result<Vec<_>, _>>()?;
                levels.push(l);
            }
            Some(energy_lower_bound(d, &LevelFunction::new(0, levels), n)?)
        }
        None => None,
    };
    emit_plot(cfg, a.output.plot.as_deref(), &plot)?;
    emit_json(cfg, a.output.out.as_deref(), json!({ "fixture": fx.name, "form": form.name, "energy_by_radius": rows, "bound": bound }))?;
    Ok(true)
}

fn gauss_green_cmd(cfg: &RunConfig, a: &GaussGreenArgs) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    let ex = exhaustion(&a.radii)?;
    let root = src.origin()?;
    let big = *ex.radii.iter().max().unwrap();
    let window = materialize_ball(src.net(), root, big + 1)?;
    let mut rng = a.seed.map(ChaCha8Rng::seed_from_u64);
    let mut function = |name: &str| -> Result<VertexFunction, Failure> {
        if name == "random" {
            let rng = rng.as_mut().ok_or_else(|| Failure::Usage("random test functions need --seed".into()))?;
            let values = (0..window.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            return Ok(VertexFunction::new(window.clone(), values)?);
        }
        let fx = src.fixture()?;
        let form = fx.form(name).ok_or_else(|| Failure::Usage(format!("fixture {} has no form {name:?}", fx.name)))?;
        Ok(form.on_window(&window)?)
    };
    let u = function(&a.u)?;
    let v = match &a.v {
        Some(name) => function(name)?,
        None => u.clone(),
    };
    let report = gauss_green_split(src.net(), &u, &v, &ex.rooted(root))?;
    let plot: Vec<(f64, f64)> = report.raw.iter().map(|w| (w.radius as f64, w.boundary_sum)).collect();
    emit_plot(cfg, a.output.plot.as_deref(), &plot)?;
    emit_json(cfg, a.output.out.as_deref(), ser(&report)?)?;
    Ok(true)
}

fn bratteli_check_cmd(cfg: &RunConfig, a: &BratteliCheckArgs) -> Result<bool, Failure> {
    let src = Source::load(&a.source)?;
    if let Some(d) = &src.diagram {
        let depth = a.check_depth.unwrap_or(EXISTENCE_DEPTH.min(d.depth()));
        let report = harmonic_exists(d, depth)?;
        let mut arrow_error = 0.0f64;
        for n in 0..depth {
            arrow_error = arrow_error.max(arrow_matrices(d, n)?.row_sum_error());
        }
        let ok = report.exists && arrow_error <= 1e-12;
        emit_json(
            cfg,
            a.output.out.as_deref(),
            json!({
                "diagram": src.name,
                "sizes": &d.sizes()[..=depth],
                "arrow_row_sum_error": arrow_error,
                "existence": report,
            }),
        )?;
        return Ok(ok);
    }
    let root = src.vertex_or_origin(a.root.as_deref())?;
    let report = graph_to_bratteli(src.net(), root, a.check_depth.unwrap_or(LEVELING_DEPTH))?;
    let ok = report.success();
    let sizes: Vec<usize> = report.levels.iter().map(|l| l.len()).collect();
    emit_json(cfg, a.output.out.as_deref(), json!({ "network": src.name, "level_sizes": sizes, "leveling": report }))?;
    Ok(ok)
}

fn transfer_check_cmd(cfg: &RunConfig, a: &TransferCheckArgs) -> Result<bool, Failure> {
    let sys = match (&a.transfer, a.pascal_binomial) {
        (Some(path), _) => read_transfer_spec(path)?,
        (None, Some(depth)) => TransferSystem::pascal_binomial(depth)?,
        (None, None) => return Err(Failure::Usage("transfer-check needs --transfer or --pascal-binomial".into())),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut adjoint, mut r_norm, mut s_norm) = (0.0f64, 0.0f64, 0.0f64);
    for n in 0..sys.depth() {
        for _ in 0..a.vectors {
            let f: Vec<f64> = (0..sys.level_size(n + 1)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..sys.level_size(n)).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rf = sys.apply(Direction::R, n, &f)?;
            let sg = sys.apply(Direction::S, n, &g)?;
            let (lo, hi) = (sys.space(n), sys.space(n + 1));
            let scale = lo.norm(&g) * hi.norm(&f);
            adjoint = adjoint.max((lo.inner(&rf, &g) - hi.inner(&f, &sg)).abs() / scale.max(f64::MIN_POSITIVE));
            r_norm = r_norm.max(lo.norm(&rf) / hi.norm(&f));
            s_norm = s_norm.max(hi.norm(&sg) / lo.norm(&g));
        }
    }
    let c = sys.conductance();
    let checks = [
        ("adjoint", adjoint <= a.tol),
        ("r_contractive", r_norm <= 1.0 + a.tol),
        ("s_contractive", s_norm <= 1.0 + a.tol),
        ("dual_row_sums", sys.dual_row_sum_error() <= a.tol),
        ("mass", sys.mass_drift() <= a.tol),
        ("conductance_symmetry", c.symmetry_error <= a.tol),
        ("conductance_totals", c.total_error <= a.tol),
        ("q_identity", sys.q_identity_error() <= a.tol),
    ];
    let ok = checks.iter().all(|c| c.1);
    let passes: serde_json::Map<String, Value> = checks.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    emit_json(
        cfg,
        a.output.out.as_deref(),
        json!({
            "depth": sys.depth(),
            "sizes": (0..=sys.depth()).map(|n| sys.level_size(n)).collect::<Vec<_>>(),
            "adjoint_error": adjoint,
            "r_norm_ratio": r_norm,
            "s_norm_ratio": s_norm,
            "dual_row_sum_error": sys.dual_row_sum_error(),
            "mass_drift": sys.mass_drift(),
            "conductance_symmetry_error": c.symmetry_error,
            "conductance_total_error": c.total_error,
            "q_identity_error": sys.q_identity_error(),
            "reversibility_error": sys.reversibility_error(),
            "checks": passes,
        }),
    )?;
    Ok(ok)
}

fn fixtures_cmd(cfg: &RunConfig, a: &FixturesArgs) -> Result<bool, Failure> {
    let Some(name) = &a.name else {
        if !a.list {
            return Err(Failure::Usage("fixtures needs --list or --name".into()));
        }
        return emit_json(cfg, a.output.out.as_deref(), ser(&registry())?).map(|_| true);
    };
    let params = FixtureParams { lambda: a.lambda, depth: a.depth, dim: a.dim, matrix: None };
    let fx = harmonet::models::fixture_by_name(name, &params)?;
    if let Some(r) = a.csv {
        emit_csv(cfg, a.output.out.as_deref(), &fx.to_csv(r)?)?;
        return Ok(true);
    }
    let forms: Vec<Value> = fx.forms.iter().map(|f| json!({ "name": f.name, "kind": f.kind })).collect();
    emit_json(
        cfg,
        a.output.out.as_deref(),
        json!({
            "name": fx.name,
            "origin": fx.origin(),
            "sizes": fx.diagram.as_ref().map(|d| d.sizes().to_vec()),
            "forms": forms,
            "expected": fx.expected,
            "exact": fx.exact,
            "checks": fx.checks,
        }),
    )?;
    Ok(true)
}
