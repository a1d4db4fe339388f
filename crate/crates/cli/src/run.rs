use std::path::PathBuf;

use serde_json::{json, Value};
use varmotion::accept::{self, CRITERIA};
use varmotion::dirdep::{self, Dir, DirDepParams};
use varmotion::geo2d::{self, Geo2dParams};
use varmotion::mc::{mean_se, run_replicas};
use varmotion::planar::{self, PlanarParams};
use varmotion::telegraph::{self, TelegraphParams};
use varmotion::timevar::{self, Pchip, SigmaProfile};
use varmotion::velocitymap::{self, PowerVariant, VelocityModel};
use varmotion::{eulergen, Error};

use crate::args::*;
use crate::output::{self, meta, Cell, Table};
use crate::CliError;

/// What a command produced: text for stdout or a file, and the exit code.
pub struct Emit {
    pub text: String,
    pub out: Option<PathBuf>,
    pub code: i32,
}

type Res = Result<Emit, CliError>;

fn table(command: &str, parts: &[&dyn output::erased::Part], t: &Table, o: &Output) -> Res {
    Ok(Emit {
        text: output::render(&meta(command, parts), t, o.format),
        out: o.out.clone(),
        code: 0,
    })
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {x}")).into())
    }
}

fn at_least_one(name: &str, n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn check_seed(check: &Check) -> Result<Option<u64>, CliError> {
    match (check.replicas, check.seed) {
        (0, _) => Ok(None),
        (_, Some(seed)) => Ok(Some(seed)),
        (_, None) => Err(CliError::Usage("--seed is required when --replicas is positive".into())),
    }
}

fn midpoints(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn mc_cells(samples: Option<Vec<f64>>) -> [Cell; 2] {
    match samples {
        Some(xs) => {
            let (m, se) = mean_se(&xs);
            [Cell::F(m), Cell::F(se)]
        }
        None => [Cell::Empty, Cell::Empty],
    }
}

pub fn dispatch(cmd: Command) -> Res {
    match cmd {
        Command::Telegraph { action } => run_telegraph(action),
        Command::Motion1d { action } => run_motion1d(action),
        Command::Planar { action } => run_planar(action),
        Command::Dirdep { action } => run_dirdep(action),
        Command::Timevar { action } => run_timevar(action),
        Command::Geo2d { action } => run_geo2d(action),
        Command::Euler(a) => run_euler(a),
        Command::Accept(a) => run_accept(a),
    }
}

fn run_telegraph(action: TelegraphAction) -> Res {
    match action {
        TelegraphAction::Sample { motion, sampling, output } => {
            let params = TelegraphParams::new(motion.lambda, motion.c)?;
            positive("t", motion.t)?;
            let rows = run_replicas(sampling.replicas, sampling.seed, |rng| {
                let path = telegraph::sample_path(&params, motion.t, rng).expect("validated horizon");
                (path.position(motion.t), path.event_times.len())
            });
            let mut t = Table::new(&["replica", "z", "events"]);
            for (i, (z, k)) in rows.into_iter().enumerate() {
                t.push(vec![i.into(), z.into(), k.into()]);
            }
            table("telegraph sample", &[&motion, &sampling, &output], &t, &output)
        }
        TelegraphAction::Density(g) => {
            let params = TelegraphParams::new(g.motion.lambda, g.motion.c)?;
            positive("t", g.motion.t)?;
            at_least_one("grid", g.grid)?;
            let ct = params.c * g.motion.t;
            let mut t = Table::new(&["z", "f"]);
            for z in midpoints(-ct, ct, g.grid) {
                t.push(vec![z.into(), telegraph::density(&params, z, g.motion.t)?.into()]);
            }
            table("telegraph density", &[&g], &t, &g.output)
        }
        TelegraphAction::Cdf(g) => {
            let params = TelegraphParams::new(g.motion.lambda, g.motion.c)?;
            positive("t", g.motion.t)?;
            at_least_one("grid", g.grid)?;
            let ct = params.c * g.motion.t;
            let mut t = Table::new(&["z", "F"]);
            for z in linspace(-ct, ct, g.grid) {
                t.push(vec![z.into(), telegraph::cdf(&params, z, g.motion.t)?.into()]);
            }
            table("telegraph cdf", &[&g], &t, &g.output)
        }
        TelegraphAction::Moments { motion, n, check, output } => {
            let params = TelegraphParams::new(motion.lambda, motion.c)?;
            positive("t", motion.t)?;
            let seed = check_seed(&check)?;
            let samples = seed.map(|s| {
                run_replicas(check.replicas, s, |rng| telegraph::sample_endpoint(&params, motion.t, rng))
            });
            let mut t = Table::new(&["order", "analytic", "mc", "se"]);
            for k in 0..=n {
                let analytic = if k % 2 == 1 {
                    0.0
                } else {
                    telegraph::moment_even(&params, k / 2, motion.t)?
                };
                let powered = samples.as_ref().map(|xs| xs.iter().map(|x| x.powi(k as i32)).collect());
                let [m, se] = mc_cells(powered);
                t.push(vec![k.into(), analytic.into(), m, se]);
            }
            table("telegraph moments", &[&motion, &json!({ "n": n }), &check, &output], &t, &output)
        }
    }
}

fn build_model(c: f64, m: &ModelArgs) -> Result<VelocityModel, CliError> {
    Ok(match m.family {
        FamilyArg::Constant => VelocityModel::constant(c, m.x0)?,
        FamilyArg::Linear => VelocityModel::linear(c, m.x0)?,
        FamilyArg::Power => {
            let variant = match m.variant {
                VariantArg::Reflect => PowerVariant::Reflect,
                VariantArg::Absorb => PowerVariant::Absorb,
            };
            VelocityModel::power(c, m.x0, m.alpha, variant)?
        }
        FamilyArg::Logistic => VelocityModel::logistic(c, m.x0)?,
        FamilyArg::Symlogistic => VelocityModel::symlogistic(c, m.x0)?,
    })
}

/// Pathwise `X(t)` of the mapped motion with its absorption time, if any.
fn mapped_samples(model: &VelocityModel, params: &TelegraphParams, t: f64, n: usize, seed: u64) -> Vec<(f64, Option<f64>)> {
    run_replicas(n, seed, |rng| {
        let path = telegraph::sample_path(params, t, rng).expect("validated horizon");
        let mapped = model.transform_path(&path);
        (mapped.position(t), mapped.absorbed_at())
    })
}

fn run_motion1d(action: Motion1dAction) -> Res {
    match action {
        Motion1dAction::Sample { motion, model, sampling, output } => {
            let params = TelegraphParams::new(motion.lambda, motion.c)?;
            positive("t", motion.t)?;
            let vm = build_model(motion.c, &model)?;
            let mut t = Table::new(&["replica", "x", "absorbed_at"]);
            for (i, (x, tau)) in mapped_samples(&vm, &params, motion.t, sampling.replicas, sampling.seed)
                .into_iter()
                .enumerate()
            {
                t.push(vec![i.into(), x.into(), tau.into()]);
            }
            table("motion1d sample", &[&motion, &model, &sampling, &output], &t, &output)
        }
        Motion1dAction::Density { motion, model, grid, output } => {
            let params = TelegraphParams::new(motion.lambda, motion.c)?;
            at_least_one("grid", grid)?;
            let vm = build_model(motion.c, &model)?;
            let s = vm.support(&params, motion.t)?;
            let mut t = Table::new(&["x", "f"]);
            for x in midpoints(s.lower, s.upper, grid) {
                t.push(vec![x.into(), vm.density_x(&params, x, motion.t)?.into()]);
            }
            table("motion1d density", &[&motion, &model, &json!({ "grid": grid }), &output], &t, &output)
        }
        Motion1dAction::Support { motion, model, output } => {
            let params = TelegraphParams::new(motion.lambda, motion.c)?;
            let vm = build_model(motion.c, &model)?;
            let s = vm.support(&params, motion.t)?;
            let mut t = Table::new(&["lower", "upper", "atom_mass", "t_star"]);
            t.push(vec![s.lower.into(), s.upper.into(), s.atom_mass.into(), vm.t_star().into()]);
            table("motion1d support", &[&motion, &model, &output], &t, &output)
        }
        Motion1dAction::Moments { motion, model, n, terms, check, output } => {
            let params = TelegraphParams::new(motion.lambda, motion.c)?;
            positive("t", motion.t)?;
            let vm = build_model(motion.c, &model)?;
            let seed = check_seed(&check)?;
            let xs: Option<Vec<f64>> = seed.map(|s| {
                mapped_samples(&vm, &params, motion.t, check.replicas, s)
                    .into_iter()
                    .map(|(x, _)| x)
                    .collect()
            });
            let mut t = Table::new(&["order", "series", "series_last_term", "series_warning", "mc", "se"]);
            for k in 1..=n {
                let (series, last, warn) = if model.family == FamilyArg::Logistic {
                    let v = velocitymap::logistic_moment(f64::from(k), &params, model.x0, motion.t, terms)?;
                    (Cell::F(v.value), Cell::F(v.last_term), Cell::from(v.warning))
                } else {
                    (Cell::Empty, Cell::Empty, Cell::Empty)
                };
                let powered = xs.as_ref().map(|xs| xs.iter().map(|x| x.powi(k as i32)).collect());
                let [m, se] = mc_cells(powered);
                t.push(vec![k.into(), series, last, warn, m, se]);
            }
            let extra = json!({ "n": n, "terms": terms });
            table("motion1d moments", &[&motion, &model, &extra, &check, &output], &t, &output)
        }
    }
}

fn planar_setup(a: &PlanarArgs) -> Result<(PlanarParams, VelocityModel), CliError> {
    let params = PlanarParams::new(a.motion.lambda, a.motion.c, a.p)?;
    positive("t", a.motion.t)?;
    let model = match a.family {
        PlanarFamily::Constant => VelocityModel::constant(a.motion.c, a.x0)?,
        PlanarFamily::Symlogistic => VelocityModel::symlogistic(a.motion.c, a.x0)?,
    };
    Ok((params, model))
}

fn run_planar(action: PlanarAction) -> Res {
    match action {
        PlanarAction::Sample { planar: a, sampling, output } => {
            let (params, model) = planar_setup(&a)?;
            let ends = run_replicas(sampling.replicas, sampling.seed, |rng| {
                planar::sample_planar_endpoint(&params, a.motion.t, rng)
            });
            let mut t = Table::new(&["replica", "u", "v", "x", "y", "on_boundary", "side_one"]);
            for (i, e) in ends.into_iter().enumerate() {
                t.push(vec![
                    i.into(),
                    e.u.into(),
                    e.v.into(),
                    model.map_endpoint(e.u).into(),
                    model.map_endpoint(e.v).into(),
                    e.on_boundary().into(),
                    e.on_side_one().into(),
                ]);
            }
            table("planar sample", &[&a, &sampling, &output], &t, &output)
        }
        PlanarAction::Density { planar: a, grid, output } => {
            let (params, model) = planar_setup(&a)?;
            at_least_one("grid", grid)?;
            let ct = a.motion.c * a.motion.t;
            let axis = midpoints(model.w_inv(-ct), model.w_inv(ct), grid);
            let mut t = Table::new(&["x", "y", "f"]);
            for &x in &axis {
                for &y in &axis {
                    // Outside the rotated square the interior density is zero.
                    let f = planar::wrapped_density_xy(&model, &params, x, y, a.motion.t).unwrap_or(0.0);
                    t.push(vec![x.into(), y.into(), f.into()]);
                }
            }
            table("planar density", &[&a, &json!({ "grid": grid }), &output], &t, &output)
        }
        PlanarAction::Boundary { planar: a, check, output } => {
            let (params, _) = planar_setup(&a)?;
            let seed = check_seed(&check)?;
            let tt = a.motion.t;
            let ends = seed.map(|s| {
                run_replicas(check.replicas, s, |rng| planar::sample_planar_endpoint(&params, tt, rng))
            });
            type Event = fn(&planar::PlanarEndpoint) -> bool;
            let freq = |f: Event| {
                ends.as_ref()
                    .map(|es| es.iter().map(|e| if f(e) { 1.0 } else { 0.0 }).collect::<Vec<f64>>())
            };
            let mut t = Table::new(&["event", "analytic", "mc", "se"]);
            let rows: [(&str, f64, Event); 3] = [
                ("boundary", planar::boundary_probability(&params, tt), |e| e.on_boundary()),
                ("side_one", planar::side_probability(&params, tt), |e| e.on_side_one()),
                ("corner", 0.25 * (-params.lambda * tt).exp(), |e| e.at_corner() && e.used == 1),
            ];
            for (name, analytic, f) in rows {
                let [m, se] = mc_cells(freq(f));
                t.push(vec![name.into(), analytic.into(), m, se]);
            }
            table("planar boundary", &[&a, &check, &output], &t, &output)
        }
        PlanarAction::Support { planar: a, points, output } => {
            let (_, model) = planar_setup(&a)?;
            at_least_one("points", points)?;
            let sides = planar::support_boundary(&model, a.motion.t, points)?;
            let mut t = Table::new(&["side", "x", "y"]);
            for (k, side) in sides.iter().enumerate() {
                for &(x, y) in side {
                    t.push(vec![(k + 1).into(), x.into(), y.into()]);
                }
            }
            table("planar support", &[&a, &json!({ "points": points }), &output], &t, &output)
        }
    }
}

fn dir_name(d: Dir) -> &'static str {
    match d {
        Dir::D0 => "d0",
        Dir::D1 => "d1",
    }
}

fn run_dirdep(action: DirdepAction) -> Res {
    match action {
        DirdepAction::Sample { dirdep: a, start, sampling, output } => {
            let mut params = DirDepParams::new(a.motion.lambda, a.motion.c, a.x0)?;
            positive("t", a.motion.t)?;
            if let Some(s) = start {
                params = params.starting(if s == StartArg::D0 { Dir::D0 } else { Dir::D1 });
            }
            let xs = run_replicas(sampling.replicas, sampling.seed, |rng| {
                dirdep::sample_endpoint(&params, a.motion.t, rng)
            });
            let mut t = Table::new(&["replica", "x"]);
            for (i, x) in xs.into_iter().enumerate() {
                t.push(vec![i.into(), x.into()]);
            }
            table("dirdep sample", &[&a, &json!({ "start": start }), &sampling, &output], &t, &output)
        }
        DirdepAction::Mean { dirdep: a, grid, check, output } => {
            let params = DirDepParams::new(a.motion.lambda, a.motion.c, a.x0)?;
            positive("t", a.motion.t)?;
            at_least_one("grid", grid)?;
            let seed = check_seed(&check)?;
            let mut t = Table::new(&["t", "analytic", "mc", "se"]);
            for k in 1..=grid {
                let s = a.motion.t * k as f64 / grid as f64;
                let xs = seed.map(|sd| run_replicas(check.replicas, sd, |rng| dirdep::sample_endpoint(&params, s, rng)));
                let [m, se] = mc_cells(xs);
                t.push(vec![s.into(), dirdep::uncond_mean(&params, s).into(), m, se]);
            }
            table("dirdep mean", &[&a, &json!({ "grid": grid }), &check, &output], &t, &output)
        }
        DirdepAction::Condmean { dirdep: a, n, check, output } => {
            let params = DirDepParams::new(a.motion.lambda, a.motion.c, a.x0)?;
            positive("t", a.motion.t)?;
            let seed = check_seed(&check)?;
            let mut t = Table::new(&["n", "start", "analytic", "mc", "se"]);
            let mut case = 0u64;
            for start in [Dir::D0, Dir::D1] {
                for k in 0..=n {
                    let analytic = dirdep::cond_mean(&params, start, k, a.motion.t)?;
                    let xs = seed.map(|sd| {
                        run_replicas(check.replicas, sd.wrapping_add(case), |rng| {
                            dirdep::sample_conditional(&params, start, k as usize, a.motion.t, rng)
                        })
                    });
                    case += 1;
                    let [m, se] = mc_cells(xs);
                    t.push(vec![k.into(), dir_name(start).into(), analytic.into(), m, se]);
                }
            }
            table("dirdep condmean", &[&a, &json!({ "n": n }), &check, &output], &t, &output)
        }
        DirdepAction::Collapse { dirdep: a, band, sampling, output } => {
            if !(band > 0.0 && band < 0.5) {
                return Err(Error::Domain(format!("band must lie in (0, 0.5), got {band}")).into());
            }
            let r = dirdep::collapse_experiment(a.motion.c, a.motion.t, sampling.replicas, band, a.x0, sampling.seed)?;
            let mut t = Table::new(&["frac_near_0", "frac_near_1", "mean", "sd", "replicas"]);
            t.push(vec![r.frac_near_0.into(), r.frac_near_1.into(), r.mean.into(), r.sd.into(), r.replicas.into()]);
            table("dirdep collapse", &[&a, &json!({ "band": band }), &sampling, &output], &t, &output)
        }
    }
}

fn build_profile(a: &SigmaArgs) -> Result<SigmaProfile, CliError> {
    Ok(match a.sigma {
        SigmaKind::Const => SigmaProfile::Constant(a.sigma_a),
        SigmaKind::Linear => SigmaProfile::Linear(a.sigma_b),
        SigmaKind::Affine => SigmaProfile::Affine { a: a.sigma_a, b: a.sigma_b },
        SigmaKind::Table => {
            let path = a
                .table
                .as_ref()
                .ok_or_else(|| CliError::Usage("--sigma table needs --table <csv>".into()))?;
            let text = std::fs::read_to_string(path)?;
            SigmaProfile::Tabulated(Pchip::from_csv(&text)?)
        }
    })
}

fn run_timevar(action: TimevarAction) -> Res {
    match action {
        TimevarAction::Sample { sigma: a, sampling, output } => {
            let params = TelegraphParams::new(a.motion.lambda, a.motion.c)?;
            positive("t", a.motion.t)?;
            let profile = build_profile(&a)?;
            let xs = run_replicas(sampling.replicas, sampling.seed, |rng| {
                timevar::sample_endpoint(&profile, &params, a.motion.t, rng)
            });
            let mut t = Table::new(&["replica", "x"]);
            for (i, x) in xs.into_iter().enumerate() {
                t.push(vec![i.into(), x.into()]);
            }
            table("timevar sample", &[&a, &sampling, &output], &t, &output)
        }
        TimevarAction::Cov { sigma: a, s, output } => {
            let params = TelegraphParams::new(a.motion.lambda, a.motion.c)?;
            let profile = build_profile(&a)?;
            let s = s.unwrap_or(a.motion.t);
            let cov = timevar::covariance(&profile, &params, s, a.motion.t)?;
            let mut t = Table::new(&["s", "t", "covariance", "limit"]);
            t.push(vec![
                s.into(),
                a.motion.t.into(),
                cov.into(),
                timevar::limit_covariance(&profile, s, a.motion.t).into(),
            ]);
            table("timevar cov", &[&a, &json!({ "s": s }), &output], &t, &output)
        }
        TimevarAction::Limit { sigma: a, grid, output } => {
            positive("t", a.motion.t)?;
            at_least_one("grid", grid)?;
            let profile = build_profile(&a)?;
            let sd = profile.integral_sq(a.motion.t).sqrt();
            positive("limit variance", sd)?;
            let mut t = Table::new(&["x", "f"]);
            for x in linspace(-4.0 * sd, 4.0 * sd, grid) {
                t.push(vec![x.into(), timevar::limit_density(&profile, x, a.motion.t)?.into()]);
            }
            table("timevar limit", &[&a, &json!({ "grid": grid }), &output], &t, &output)
        }
    }
}

fn run_geo2d(action: Geo2dAction) -> Res {
    match action {
        Geo2dAction::Sample { geo, sampling, output } => {
            let params = Geo2dParams::new(geo.motion.lambda, geo.motion.c, geo.p, geo.x0, geo.y0)?;
            positive("t", geo.motion.t)?;
            let pairs = run_replicas(sampling.replicas, sampling.seed, |rng| {
                geo2d::sample_log_returns(&params, geo.motion.t, rng)
            });
            let mut t = Table::new(&["replica", "x", "y"]);
            for (i, (u, v)) in pairs.into_iter().enumerate() {
                t.push(vec![i.into(), (geo.x0 * u.exp()).into(), (geo.y0 * v.exp()).into()]);
            }
            table("geo2d sample", &[&geo, &sampling, &output], &t, &output)
        }
        Geo2dAction::Density { geo, grid, output } => {
            let params = Geo2dParams::new(geo.motion.lambda, geo.motion.c, geo.p, geo.x0, geo.y0)?;
            positive("t", geo.motion.t)?;
            at_least_one("grid", grid)?;
            let ct = geo.motion.c * geo.motion.t;
            let axis = midpoints(-ct, ct, grid);
            let mut t = Table::new(&["x", "y", "f"]);
            for &u in &axis {
                for &v in &axis {
                    let (x, y) = (geo.x0 * u.exp(), geo.y0 * v.exp());
                    // Zero outside the rotated square of log-returns.
                    let f = geo2d::joint_density(&params, x, y, geo.motion.t).unwrap_or(0.0);
                    t.push(vec![x.into(), y.into(), f.into()]);
                }
            }
            table("geo2d density", &[&geo, &json!({ "grid": grid }), &output], &t, &output)
        }
        Geo2dAction::Limit { geo, grid, span, output } => {
            positive("span", span)?;
            at_least_one("grid", grid)?;
            let axis = midpoints(-span, span, grid);
            let mut t = Table::new(&["x", "y", "f"]);
            for &u in &axis {
                for &v in &axis {
                    let (x, y) = (geo.x0 * u.exp(), geo.y0 * v.exp());
                    let f = geo2d::limit_density(geo.p, geo.x0, geo.y0, x, y, geo.motion.t)?;
                    t.push(vec![x.into(), y.into(), f.into()]);
                }
            }
            table("geo2d limit", &[&geo, &json!({ "grid": grid, "span": span }), &output], &t, &output)
        }
        Geo2dAction::Params { p, output } => {
            let d = geo2d::param_map(p)?;
            let mut t = Table::new(&["mu", "kappa", "sigma_sq", "eta_sq", "rho"]);
            t.push(vec![d.mu.into(), d.kappa.into(), d.sigma_sq.into(), d.eta_sq.into(), d.rho.into()]);
            table("geo2d params", &[&json!({ "p": p }), &output], &t, &output)
        }
    }
}

fn run_euler(a: EulerArgs) -> Res {
    let poly = eulergen::euler_poly(a.n, a.a, a.theta)?;
    let meta = meta("euler", &[&a]);
    let doc: Value = match a.x {
        Some(x) => json!({ "meta": meta, "x": x, "value": eulergen::eval_poly(&poly, x) }),
        None => json!({ "meta": meta, "coefficients": poly.coeffs }),
    };
    Ok(Emit {
        text: format!("{doc}\n"),
        out: a.out,
        code: 0,
    })
}

fn run_accept(a: AcceptArgs) -> Res {
    let reports = match a.suite {
        Suite::Primary => accept::run_primary(a.seed),
    };
    for &(id, title) in CRITERIA.iter() {
        let mine: Vec<_> = reports.iter().filter(|r| r.criterion == id).collect();
        let ok = mine.iter().all(|r| r.passed());
        eprintln!("criterion {id} {}: {title} ({} checks)", if ok { "PASS" } else { "FAIL" }, mine.len());
    }
    let all = reports.iter().all(|r| r.passed());
    let text = serde_json::to_string_pretty(&reports).map_err(|e| CliError::Io(e.into()))?;
    Ok(Emit {
        text: text + "\n",
        out: a.out,
        code: if all { 0 } else { 1 },
    })
}
