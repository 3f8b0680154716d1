use std::collections::hash_map::RandomState;
use std::fs::{self, File};
use std::hash::{BuildHasher, Hasher};
use std::io::BufWriter;
use std::path::Path;

use fatoulab::blaschke::{solve_tau, BlaschkeProduct};
use fatoulab::circle::{self, CircleMap};
use fatoulab::covering::{self, CoveringModel, RadialThresholds};
use fatoulab::harmonic::{self, DomainOracle, WalkParams};
use fatoulab::map_zoo::semiconjugacy_check;
use fatoulab::render::{self, GridSpec};
use fatoulab::{histogram, rng, Complex64};
use rand::Rng;
use serde_json::{json, Value};

use crate::cli::*;
use crate::error::{invalid, runtime, CliError};
use crate::maps;

type Res<T> = Result<T, CliError>;

fn check(ok: bool, msg: &str) -> Res<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}

fn check_alpha(alpha: f64) -> Res<()> {
    check(alpha > 0.0 && alpha < 0.5, "alpha must lie in (0, 1/2)")
}

/// The explicit seed, or a fresh one that the manifest records.
fn seed_or_generate(seed: Option<u64>) -> (u64, bool) {
    match seed {
        Some(s) => (s, false),
        None => (RandomState::new().build_hasher().finish(), true),
    }
}

struct Run {
    name: &'static str,
    inputs: Value,
    seed: Option<(u64, bool)>,
    outputs: Vec<(&'static str, String)>,
    result: Value,
}

pub fn run(cli: Cli) -> Res<String> {
    if let Some(t) = cli.threads {
        check(t > 0, "--threads must be positive")?;
        // A second initialisation in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let out = cli.out_dir.as_path();
    let run = match cli.command {
        Command::Tau(a) => tau(a)?,
        Command::VerifySemiconj(a) => semiconj(a)?,
        Command::BlaschkeEval(a) => blaschke_eval(a)?,
        Command::Harmonic(a) => harmonic(a, out)?,
        Command::ClassifyRadial(a) => classify_radial(a)?,
        Command::CircleStats(a) => circle_stats(a, out)?,
        Command::Spread(a) => spread(a)?,
        Command::Render(a) => render(a, out)?,
    };
    write_manifest(run, out)
}

fn write_manifest(run: Run, out: &Path) -> Res<String> {
    let manifest_name = format!("{}.manifest.json", run.name);
    let mut outputs = serde_json::Map::new();
    outputs.insert("manifest".into(), json!(manifest_name));
    for (k, v) in run.outputs {
        outputs.insert(k.into(), json!(v));
    }
    let (seed, generated) = match run.seed {
        Some((s, g)) => (json!(s), json!(g)),
        None => (Value::Null, json!(false)),
    };
    let manifest = json!({
        "tool": "fatoulab",
        "versions": { "fatoulab": fatoulab::VERSION, "cli": env!("CARGO_PKG_VERSION") },
        "subcommand": run.name,
        "inputs": run.inputs,
        "seed": seed,
        "seed_generated": generated,
        "outputs": outputs,
        "result": run.result,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(runtime)?;
    ensure_dir(out)?;
    let path = out.join(&manifest_name);
    fs::write(&path, format!("{text}\n"))
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(text)
}

fn ensure_dir(out: &Path) -> Res<()> {
    fs::create_dir_all(out).map_err(|e| runtime(format!("cannot create {}: {e}", out.display())))
}

fn create(out: &Path, name: &str) -> Res<BufWriter<File>> {
    ensure_dir(out)?;
    let path = out.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Res<Value> {
    serde_json::to_value(v).map_err(runtime)
}

fn tau(a: TauArgs) -> Res<Run> {
    check_alpha(a.alpha)?;
    check(a.tol > 0.0, "--tol must be positive")?;
    let sol = solve_tau(a.alpha, a.tol)?;
    let b = BlaschkeProduct::new(sol);
    let mut result = to_value(&sol)?;
    result["derivative_at_zero"] = json!(b.derivative_at_zero());
    Ok(Run {
        name: "tau",
        inputs: to_value(&a)?,
        seed: None,
        outputs: vec![],
        result,
    })
}

fn semiconj(a: SemiconjArgs) -> Res<Run> {
    check_alpha(a.alpha)?;
    check(a.samples > 0, "--samples must be positive")?;
    check(
        a.im_bound >= 0.0 && a.im_bound.is_finite(),
        "--im-bound must be finite and ≥ 0",
    )?;
    check(a.bound > 0.0, "--bound must be positive")?;
    let (seed, generated) = seed_or_generate(a.seed);
    let rep = semiconjugacy_check(a.alpha, a.samples, a.im_bound, seed)?;
    let mut result = to_value(&rep)?;
    result["pass"] = json!(rep.max_residual < a.bound);
    Ok(Run {
        name: "verify-semiconj",
        inputs: to_value(&a)?,
        seed: Some((seed, generated)),
        outputs: vec![],
        result,
    })
}

fn blaschke_eval(a: BlaschkeArgs) -> Res<Run> {
    check_alpha(a.alpha)?;
    check(a.err > 0.0, "--err must be positive")?;
    check(
        a.exclusion_radius > 0.0,
        "--exclusion-radius must be positive",
    )?;
    check(
        a.theta.iter().all(|t| t.is_finite()),
        "--theta values must be finite",
    )?;
    if let Some(n) = a.ks_samples {
        check(n > 0, "--ks-samples must be positive")?;
    }
    let b = BlaschkeProduct::from_alpha(a.alpha)?.with_exclusion_radius(a.exclusion_radius);
    let mut points = Vec::new();
    for &t in &a.theta {
        let (v, n) = b.eval_with_terms(Complex64::from_polar(1.0, t), a.err)?;
        points.push(json!({
            "theta": t,
            "value": [v.re, v.im],
            "modulus_deviation": (v.norm() - 1.0).abs(),
            "terms": n,
        }));
    }
    let mut result = json!({ "tau": b.solution.tau, "points": points });
    let mut seed = None;
    if let Some(n) = a.ks_samples {
        let (s, g) = seed_or_generate(a.seed);
        seed = Some((s, g));
        result["ks"] = to_value(&b.pushforward_ks(n, s, a.err)?)?;
    }
    Ok(Run {
        name: "blaschke-eval",
        inputs: to_value(&a)?,
        seed,
        outputs: vec![],
        result,
    })
}

fn harmonic(a: HarmonicArgs, out: &Path) -> Res<Run> {
    check(
        a.r > 1.0 && a.r.is_finite(),
        "--R must be a finite number above 1",
    )?;
    check(a.walks > 0, "--walks must be positive")?;
    check(a.bins > 0, "--bins must be positive")?;
    check(a.step_cap > 0, "--step-cap must be positive")?;
    if let Some(e) = a.epsilon {
        check(e > 0.0, "--epsilon must be positive")?;
    }
    let domain = match a.domain {
        DomainKind::Annulus => {
            check(
                a.rho > 1.0 / a.r && a.rho < a.r,
                "--rho must lie strictly between 1/R and R",
            )?;
            DomainOracle::annulus(1.0 / a.r, a.r)?
        }
        DomainKind::Champagne => {
            check(a.bubbles > 0, "--bubbles must be positive")?;
            check(a.bubble_radius > 0.0, "--bubble-radius must be positive")?;
            DomainOracle::champagne_ring(a.bubbles, a.ring, a.bubble_radius, a.phase)?
        }
    };
    let base = match a.domain {
        DomainKind::Annulus => Complex64::new(a.rho, 0.0),
        DomainKind::Champagne => Complex64::new(0.0, 0.0),
    };
    let annulus_only = |what: &str| -> Res<()> {
        check(
            a.domain == DomainKind::Annulus,
            &format!("--method {what} is only available for the annulus"),
        )
    };
    let pushforward_base = || -> Res<()> {
        check(
            a.rho == 1.0,
            "the covering pushforward starts at the base point 1; use --rho 1",
        )
    };
    let mut outputs = vec![];
    let mut seed = None;
    let result = match a.method {
        Method::ClosedForm => {
            annulus_only("closed-form")?;
            let p = covering::annulus_outer_mass(a.r, a.rho);
            json!({ "outer_mass": p, "inner_mass": 1.0 - p })
        }
        Method::Wos => {
            let (s, g) = seed_or_generate(a.seed);
            seed = Some((s, g));
            let mut params = WalkParams::new(a.walks, s, a.bins);
            params.epsilon_shell = a.epsilon;
            params.step_cap = a.step_cap;
            let res = harmonic::walk_on_spheres(&domain, base, &params)?;
            res.write_csv(create(out, "harmonic.csv")?)?;
            outputs.push(("csv", "harmonic.csv".to_string()));
            let support = harmonic::support_test(&res, a.min_bin_mass);
            let mut r = json!({
                "summary": to_value(&res.summary())?,
                "support": {
                    "pass": support.pass,
                    "min_bin_mass": support.min_bin_mass,
                    "smallest_mass": support.smallest_mass,
                    "failing_bins": support.failing.len(),
                },
            });
            if let Some(p) = domain.closed_form_outer_mass(base) {
                let emp = res.component_masses()[1];
                let tol = 4.0 * (p * (1.0 - p) / a.walks as f64).sqrt();
                r["closed_form"] = json!({
                    "outer_mass": p,
                    "error": (emp - p).abs(),
                    "tolerance": tol,
                    "pass": (emp - p).abs() < tol,
                });
            }
            r
        }
        Method::Pushforward => {
            annulus_only("pushforward")?;
            pushforward_base()?;
            let (s, g) = seed_or_generate(a.seed);
            seed = Some((s, g));
            let model = CoveringModel::annulus(a.r)?;
            let pf = model.pushforward_measure(a.walks as usize, a.bins, s)?;
            histogram::write_csv(create(out, "harmonic.csv")?, &pf.histograms)?;
            outputs.push(("csv", "harmonic.csv".to_string()));
            json!({ "component_masses": pf.masses })
        }
        Method::CrossValidate => {
            annulus_only("cross-validate")?;
            pushforward_base()?;
            let (s, g) = seed_or_generate(a.seed);
            seed = Some((s, g));
            let model = CoveringModel::annulus(a.r)?;
            let cv = harmonic::cross_validate(&domain, &model, a.walks, s, a.bins)?;
            cv.wos.write_csv(create(out, "harmonic_wos.csv")?)?;
            histogram::write_csv(
                create(out, "harmonic_pushforward.csv")?,
                &cv.pushforward.histograms,
            )?;
            outputs.push(("wos_csv", "harmonic_wos.csv".to_string()));
            outputs.push(("pushforward_csv", "harmonic_pushforward.csv".to_string()));
            json!({
                "tv_distance": cv.tv_distance,
                "threshold": cv.threshold,
                "pass": cv.pass,
                "wos_masses": cv.wos.component_masses(),
                "pushforward_masses": cv.pushforward.masses,
            })
        }
    };
    Ok(Run {
        name: "harmonic",
        inputs: to_value(&a)?,
        seed,
        outputs,
        result,
    })
}

fn classify_radial(a: RadialArgs) -> Res<Run> {
    check(
        a.r > 1.0 && a.r.is_finite(),
        "--R must be a finite number above 1",
    )?;
    check(
        a.xi.iter().all(|t| t.is_finite()),
        "--xi values must be finite",
    )?;
    let mut angles = a.xi.clone();
    if let Some(n) = a.equispaced {
        check(n > 0, "--equispaced must be positive")?;
        angles.extend((0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64));
    }
    check(!angles.is_empty(), "give --xi or --equispaced")?;
    let mut th = RadialThresholds::default();
    if let Some(s) = a.samples {
        check(s >= 4, "--samples must be at least 4")?;
        th.samples = s;
        th.escape_from = 3 * s / 4;
        th.oscillation_from = s / 2;
    }
    let model = CoveringModel::annulus(a.r)?;
    let mut points = Vec::new();
    for &t in &angles {
        let c = covering::radial_classify(&model, Complex64::from_polar(1.0, t), &th)?;
        let mut p = json!({
            "theta": t,
            "verdict": to_value(&c.verdict)?,
            "min_boundary_distance": c.min_boundary_distance,
            "last_boundary_distance": c.last_boundary_distance,
            "samples_used": c.samples_used,
        });
        if a.distances {
            p["distances"] = json!(c.distances);
        }
        points.push(p);
    }
    Ok(Run {
        name: "classify-radial",
        inputs: to_value(&a)?,
        seed: None,
        outputs: vec![],
        result: json!({ "thresholds": to_value(&th)?, "points": points }),
    })
}

fn circle_stats(a: CircleStatsArgs, out: &Path) -> Res<Run> {
    check(a.n > 0, "--n must be positive")?;
    check(a.ks_samples > 0, "--ks-samples must be positive")?;
    if let Some(t) = a.theta0 {
        check(t.is_finite(), "--theta0 must be finite")?;
    }
    let map = maps::circle_map(&a.map)?;
    let (seed, generated) = seed_or_generate(a.seed);
    let orbit = match (&map, a.theta0) {
        (CircleMap::Power(d), None) => circle::typical_power_orbit(*d, a.n, seed),
        (_, t) => {
            let t0 = t.unwrap_or_else(|| {
                rng::stream(rng::derive_seed(seed, 1), 0).gen_range(0.0..std::f64::consts::TAU)
            });
            circle::iterate(&map, t0, a.n)?
        }
    };
    circle::write_orbit_csv(create(out, "orbit.csv")?, &orbit)?;
    let inv = circle::invariance_test(&map, a.ks_samples, rng::derive_seed(seed, 2))?;
    let result = json!({
        "birkhoff_cos": circle::birkhoff_cos(&orbit),
        "uniform_mean": 0.0,
        "tolerance": 4.0 / (a.n as f64).sqrt(),
        "discrepancy": circle::discrepancy(&orbit)?,
        "invariance": to_value(&inv)?,
    });
    Ok(Run {
        name: "circle-stats",
        inputs: to_value(&a)?,
        seed: Some((seed, generated)),
        outputs: vec![("csv", "orbit.csv".to_string())],
        result,
    })
}

fn spread(a: SpreadArgs) -> Res<Run> {
    check(a.arc.len() == 2, "--arc takes start,length")?;
    let (start, len) = (a.arc[0], a.arc[1]);
    check(start.is_finite(), "arc start must be finite")?;
    check(
        len > 0.0 && len <= std::f64::consts::TAU,
        "arc length must lie in (0, 2π]",
    )?;
    check(a.n > 0, "--n must be positive")?;
    check(a.grid > 0, "--grid must be positive")?;
    let rep = match maps::circle_sequence(&a.map)? {
        Some(seq) => circle::arc_spread_sequence(&seq, (start, len), a.grid)?,
        None => circle::arc_spread(&maps::circle_map(&a.map)?, (start, len), a.n, a.grid)?,
    };
    let mut result = json!({
        "initial_arc": rep.initial_arc,
        "iterations": rep.iterations,
        "first_full_cover": rep.first_full_cover,
        "final_covered_fraction": rep.covered_fraction.last().copied().unwrap_or(0.0),
        "grid": rep.grid,
    });
    if a.trace {
        result["covered_fraction"] = json!(rep.covered_fraction);
    }
    Ok(Run {
        name: "spread",
        inputs: to_value(&a)?,
        seed: None,
        outputs: vec![],
        result,
    })
}

fn render(a: RenderArgs, out: &Path) -> Res<Run> {
    let map = maps::plane_map(&a.map)?;
    let text = fs::read_to_string(&a.config)
        .map_err(|e| invalid(format!("cannot read {}: {e}", a.config.display())))?;
    let spec: GridSpec = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("bad grid config {}: {e}", a.config.display())))?;
    spec.validate()?;
    let probe = match a.loop_circle.as_slice() {
        [] => None,
        [re, im, r] => {
            check(*r > 0.0, "loop radius must be positive")?;
            Some((Complex64::new(*re, *im), *r))
        }
        _ => return Err(invalid("--loop takes re,im,radius")),
    };
    if a.symmetry {
        check(
            a.map.starts_with("exp_baker:"),
            "--symmetry applies to exp_baker maps only",
        )?;
    }
    check(
        !a.image.is_empty() && Path::new(&a.image).file_name().is_some(),
        "--image must be a file name",
    )?;
    let grid = render::classify_grid(&map, &spec)?;
    ensure_dir(out)?;
    render::write_image(&grid, &out.join(&a.image))?;
    let c = grid.counts();
    let mut result = json!({
        "counts": {
            "attracted": c[0],
            "escaped_to_zero": c[1],
            "escaped_to_infinity": c[2],
            "singular": c[3],
            "undecided": c[4],
        },
    });
    if a.symmetry {
        let inv = render::inversion_check(&map, &grid)?;
        result["symmetry"] = json!({
            "conjugation_mismatches": render::conjugation_mismatches(&grid),
            "inversion": to_value(&inv)?,
        });
    }
    if let Some((center, r)) = probe {
        result["loop_certificate"] = to_value(&render::loop_probe(&grid, center, r)?)?;
    }
    let mut inputs = to_value(&a)?;
    inputs["grid"] = to_value(&spec)?;
    Ok(Run {
        name: "render",
        inputs,
        seed: None,
        outputs: vec![("image", a.image.clone())],
        result,
    })
}
