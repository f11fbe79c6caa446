use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use tcube::analysis::{analytic_eval, char_poly, dense_series_eval, named_series, t_eigen, TruncationPolicy};
use tcube::hypernet::{
    build_supply_chain, detect_cycle, evolve, evolve_closed_loop, nonlinear_step, synthesize_feedback, CycleReport,
    GameConfig, Hypergraph,
};
use tcube::io::{
    cubic_in, cubic_to_value, parse_value, to_pretty, trajectory_to_value, AnyCubic, AnyDense, AnySimulation,
    JsonScalar, SimulationDoc, SystemDoc,
};
use tcube::products::t_stp;
use tcube::systems::{
    s_system_check, simulate_continuous, simulate_discrete, simulate_nonlinear, Horizon, Time, Trajectory,
};
use tcube::{gamma, gamma_inverse, CubicMatrix, Error, Modular, ProductKind, Real, Ring};

use crate::error::{CliError, CliResult};
use crate::{check_not_input, Command, GameArgs, OutArgs, SeriesArg, SeriesOpts};

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Product { kind, a, b, out } => product(kind.into(), &a, &b, &out),
        Command::Func { series, alpha, kind, strict_gamma, opts, a, out } => {
            func(series, alpha, kind.into(), strict_gamma, &opts, &a, &out)
        }
        Command::Eig { a, out } => eig(&a, &out),
        Command::Charpoly { a, out } => charpoly(&a, &out),
        Command::Sim { systems, steps, t_final, dt, opts, csv, jobs, out } => {
            sim(&systems, SimHorizon { steps, t_final, dt }, &opts, csv.as_ref(), jobs, &out)
        }
        Command::GameEvolve { game, b, f, w0, steps, nonlinear, csv, jobs, out } => {
            game_evolve(&game, b.zip(f), &w0, steps, nonlinear, csv.as_ref(), jobs, &out)
        }
        Command::GameSynthesize { game, b, target, out } => game_synthesize(&game, &b, &target, &out),
        Command::GameCycle { game, w0, steps, out } => game_cycle(&game, &w0, steps, &out),
        Command::HyperDual { hypergraph, config, out } => hyper_dual(hypergraph.as_ref(), config.as_deref(), &out),
        Command::Validate { files, self_check, seed, samples } => validate(&files, self_check, seed, samples),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn read_value(path: &Path) -> CliResult<Value> {
    Ok(parse_value(&read_text(path)?, &path.display().to_string())?)
}

fn read_cubic(path: &Path) -> CliResult<AnyCubic> {
    Ok(AnyCubic::from_value(&read_value(path)?, &path.display().to_string())?)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

/// JSON result to `--out` or stdout.
fn emit(out: &OutArgs, value: &Value) -> CliResult<()> {
    let text = to_pretty(value);
    match &out.out {
        Some(path) => {
            log::info!("writing {}", path.display());
            write_text(path, &text)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Human-readable lines go to stdout only when stdout is not carrying JSON.
fn note(out: &OutArgs, line: &str) {
    if out.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

/// Adds operand names and dims to a shape error.
fn with_operands(e: Error, operands: &[(&Path, &AnyCubic)]) -> Error {
    match e {
        Error::Shape { op, detail } => {
            let names: Vec<String> = operands.iter().map(|(p, a)| format!("{} is {}", p.display(), a.dims())).collect();
            Error::Shape { op, detail: format!("{detail} ({})", names.join(", ")) }
        }
        other => other,
    }
}

fn product(kind: ProductKind, a_path: &PathBuf, b_path: &PathBuf, out: &OutArgs) -> CliResult<()> {
    check_not_input(out.out.as_ref(), &[a_path, b_path])?;
    let (a, b) = (read_cubic(a_path)?, read_cubic(b_path)?);
    let result = match (&a, &b) {
        (AnyCubic::Real(x), AnyCubic::Real(y)) => kind.apply(x, y).map(AnyCubic::Real),
        (AnyCubic::Mod(x), AnyCubic::Mod(y)) => kind.apply(x, y).map(AnyCubic::Mod),
        _ => Err(Error::DomainMismatch { op: "product", left: a.domain().to_string(), right: b.domain().to_string() }),
    }
    .map_err(|e| with_operands(e, &[(a_path, &a), (b_path, &b)]))?;
    log::info!("{kind} product {} by {} gives {}", a.dims(), b.dims(), result.dims());
    emit(out, &result.to_value())
}

fn func(
    series: SeriesArg,
    alpha: Option<f64>,
    kind: ProductKind,
    strict_gamma: bool,
    opts: &SeriesOpts,
    a_path: &PathBuf,
    out: &OutArgs,
) -> CliResult<()> {
    check_not_input(out.out.as_ref(), &[a_path])?;
    match (series, alpha) {
        (SeriesArg::Binomial, None) => return Err(CliError::Usage("--series binomial needs --alpha".into())),
        (s, Some(_)) if s != SeriesArg::Binomial => {
            return Err(CliError::Usage("--alpha only applies to --series binomial".into()))
        }
        _ => {}
    }
    let f = named_series(series.name(), alpha, opts.terms)?;
    let policy = TruncationPolicy { atol: opts.atol, max_terms: opts.terms };
    let a = read_cubic(a_path)?;
    let result = match &a {
        AnyCubic::Real(x) => {
            let r = analytic_eval(&f, x, kind, &policy).map_err(|e| with_operands(e, &[(a_path, &a)]))?;
            if strict_gamma {
                gamma_cross_check(&f, x, kind, &policy, &r)?;
            }
            AnyCubic::Real(r)
        }
        AnyCubic::Mod(x) => {
            if strict_gamma {
                return Err(Error::Unsupported("--strict-gamma needs real entries".into()).into());
            }
            AnyCubic::Mod(analytic_eval(&f, x, kind, &policy).map_err(|e| with_operands(e, &[(a_path, &a)]))?)
        }
    };
    emit(out, &result.to_value())
}

/// Evaluates `f(Γ(A))` densely and folds it back with the circulant check.
fn gamma_cross_check(
    f: &tcube::analysis::PowerSeries,
    a: &CubicMatrix<Real>,
    kind: ProductKind,
    policy: &TruncationPolicy,
    result: &CubicMatrix<Real>,
) -> CliResult<()> {
    if kind == ProductKind::DkStp {
        return Err(Error::Unsupported("--strict-gamma applies to tprod and tstp".into()).into());
    }
    let dense = dense_series_eval(f, &gamma(a), policy)?;
    let folded = gamma_inverse(&dense, result.dims(), true)?;
    let dev = folded.max_abs_diff(result);
    let tol = 1e-9 * result.frobenius_norm().max(1.0);
    log::info!("gamma path deviation {dev:e} (tolerance {tol:e})");
    if dev > tol {
        return Err(Error::Structure(format!("gamma path differs from the cubic result by {dev:e}")).into());
    }
    Ok(())
}

fn real_only(a: AnyCubic, path: &Path, what: &str) -> CliResult<CubicMatrix<Real>> {
    match a {
        AnyCubic::Real(x) => Ok(x),
        AnyCubic::Mod(x) => Err(Error::Unsupported(format!(
            "{what} needs real entries, {} is over {}",
            path.display(),
            x.ring().domain()
        ))
        .into()),
    }
}

fn eig(a_path: &PathBuf, out: &OutArgs) -> CliResult<()> {
    check_not_input(out.out.as_ref(), &[a_path])?;
    let a = real_only(read_cubic(a_path)?, a_path, "eig")?;
    let spec = t_eigen(&a)?;
    let eigenvalues: Vec<Value> = spec.eigenvalues.iter().map(|z| json!({ "re": z.re, "im": z.im })).collect();
    let eigenvectors: Vec<Value> =
        spec.eigenvectors.iter().map(|v| v.as_ref().map_or(Value::Null, cubic_to_value)).collect();
    emit(out, &json!({ "eigenvalues": eigenvalues, "eigenvectors": eigenvectors, "charpoly": spec.charpoly }))
}

fn charpoly(a_path: &PathBuf, out: &OutArgs) -> CliResult<()> {
    check_not_input(out.out.as_ref(), &[a_path])?;
    let a = real_only(read_cubic(a_path)?, a_path, "charpoly")?;
    let coeffs = char_poly(&gamma(&a))?;
    emit(out, &json!({ "order": "ascending", "coefficients": coeffs }))
}

#[derive(Debug, Clone, Copy)]
struct SimHorizon {
    steps: Option<usize>,
    t_final: Option<f64>,
    dt: f64,
}

impl SimHorizon {
    fn for_time(&self, time: Time, path: &Path) -> CliResult<Horizon> {
        match (time, self.steps, self.t_final) {
            (Time::Discrete, Some(steps), None) => Ok(Horizon::Steps(steps)),
            (Time::Continuous, None, Some(t_final)) => Ok(Horizon::Time { t_final, dt: self.dt }),
            (Time::Discrete, _, _) => {
                Err(CliError::Usage(format!("{} is discrete: give --steps and not --t-final", path.display())))
            }
            (Time::Continuous, _, _) => {
                Err(CliError::Usage(format!("{} is continuous: give --t-final and not --steps", path.display())))
            }
        }
    }
}

fn doc_time<R: Ring>(doc: &SimulationDoc<R>) -> Time {
    match &doc.system {
        SystemDoc::Linear(s) => s.time,
        SystemDoc::Nonlinear(s) => s.time,
    }
}

fn simulate_doc<R: JsonScalar>(
    doc: &SimulationDoc<R>,
    horizon: Horizon,
    policy: TruncationPolicy,
) -> tcube::Result<Trajectory<R>> {
    match (&doc.system, horizon) {
        (SystemDoc::Linear(spec), Horizon::Steps(steps)) => simulate_discrete(spec, &doc.x0, &doc.input, steps),
        (SystemDoc::Linear(spec), Horizon::Time { t_final, dt }) => {
            simulate_continuous(spec, &doc.x0, &doc.input, t_final, dt)
        }
        (SystemDoc::Nonlinear(spec), horizon) => {
            let mut spec = spec.clone();
            spec.policy = policy;
            simulate_nonlinear(&spec, &doc.x0, &doc.input, horizon)
        }
    }
}

/// One finished run: JSON trajectory and its CSV.
type RunOutput = (Value, String);

fn sim(
    paths: &[PathBuf],
    horizon: SimHorizon,
    opts: &SeriesOpts,
    csv: Option<&PathBuf>,
    jobs: usize,
    out: &OutArgs,
) -> CliResult<()> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if paths.len() > 1 && csv.is_some() {
        return Err(CliError::Usage("--csv takes a single system".into()));
    }
    let inputs: Vec<&PathBuf> = paths.iter().collect();
    check_not_input(out.out.as_ref(), &inputs)?;
    check_not_input(csv, &inputs)?;
    let policy = TruncationPolicy { atol: opts.atol, max_terms: opts.terms };
    let mut runs = Vec::with_capacity(paths.len());
    for path in paths {
        let doc = AnySimulation::from_value(&read_value(path)?, &path.display().to_string())?;
        let time = match &doc {
            AnySimulation::Real(d) => doc_time(d),
            AnySimulation::Mod(d) => doc_time(d),
        };
        runs.push((doc, horizon.for_time(time, path)?));
    }
    let results = parallel_map(&runs, jobs, |(doc, h)| -> tcube::Result<RunOutput> {
        match doc {
            AnySimulation::Real(d) => simulate_doc(d, *h, policy).map(|t| (trajectory_to_value(&t), t.to_csv())),
            AnySimulation::Mod(d) => simulate_doc(d, *h, policy).map(|t| (trajectory_to_value(&t), t.to_csv())),
        }
    });
    let mut finished: Vec<RunOutput> = results.into_iter().collect::<tcube::Result<_>>()?;
    for ((_, h), path) in runs.iter().zip(paths) {
        log::info!("simulated {} over {h:?}", path.display());
    }
    if let Some(csv) = csv {
        write_text(csv, &finished[0].1)?;
    }
    let value = if finished.len() == 1 {
        finished.swap_remove(0).0
    } else {
        Value::Array(finished.into_iter().map(|(v, _)| v).collect())
    };
    if csv.is_none() || out.out.is_some() {
        emit(out, &value)?;
    }
    Ok(())
}

/// Maps `f` over `items` on up to `jobs` scoped threads, keeping order.
fn parallel_map<T: Sync, U: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> U + Sync) -> Vec<U> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> =
            items.chunks(chunk).map(|c| scope.spawn(move || c.iter().map(f).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker thread panicked")).collect()
    })
}

fn load_config(spec: &str) -> CliResult<GameConfig> {
    let config = if spec == "default" {
        GameConfig::default()
    } else {
        let path = Path::new(spec);
        serde_json::from_str::<GameConfig>(&read_text(path)?)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
    };
    config.validate()?;
    Ok(config)
}

fn read_mod(ring: Modular, path: &Path) -> CliResult<CubicMatrix<Modular>> {
    Ok(cubic_in(ring, &read_value(path)?, &path.display().to_string())?)
}

fn read_profile(config: &GameConfig, ring: Modular, path: &Path) -> CliResult<CubicMatrix<Modular>> {
    let w = read_mod(ring, path)?;
    config.check_profile(&w).map_err(|e| match e {
        Error::Shape { op, detail } => Error::Shape { op, detail: format!("{}: {detail}", path.display()) },
        other => other,
    })?;
    Ok(w)
}

#[allow(clippy::too_many_arguments)]
fn game_evolve(
    game: &GameArgs,
    feedback: Option<(PathBuf, PathBuf)>,
    w0_paths: &[PathBuf],
    steps: usize,
    nonlinear: bool,
    csv: Option<&PathBuf>,
    jobs: usize,
    out: &OutArgs,
) -> CliResult<()> {
    if jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if w0_paths.len() > 1 && csv.is_some() {
        return Err(CliError::Usage("--csv takes a single initial profile".into()));
    }
    let mut inputs: Vec<&PathBuf> = w0_paths.iter().chain([&game.a]).collect();
    if let Some((b, f)) = &feedback {
        inputs.extend([b, f]);
    }
    check_not_input(out.out.as_ref(), &inputs)?;
    check_not_input(csv, &inputs)?;
    let config = load_config(&game.config)?;
    let ring = config.ring()?;
    let a = read_mod(ring, &game.a)?;
    let feedback = match &feedback {
        Some((b, f)) => Some((read_mod(ring, b)?, read_mod(ring, f)?)),
        None => None,
    };
    let w0s = w0_paths.iter().map(|p| read_profile(&config, ring, p)).collect::<CliResult<Vec<_>>>()?;
    let results = parallel_map(&w0s, jobs, |w0| -> tcube::Result<Trajectory<Modular>> {
        if nonlinear {
            let mut states = vec![w0.clone()];
            for _ in 0..steps {
                let next = nonlinear_step(states.last().unwrap(), &a)?;
                states.push(next);
            }
            Trajectory::new((0..=steps).map(|k| k as f64).collect(), states, None)
        } else if let Some((b, f)) = &feedback {
            evolve_closed_loop(&a, b, f, w0, steps)
        } else {
            evolve(&a, w0, steps)
        }
    });
    let trajectories = results.into_iter().collect::<tcube::Result<Vec<_>>>()?;
    if let Some(csv) = csv {
        write_text(csv, &trajectories[0].to_csv())?;
    }
    for (t, path) in trajectories.iter().zip(w0_paths) {
        let zero_at = t.states.iter().position(CubicMatrix::is_zero);
        log::info!("{}: {} steps, first zero profile at {zero_at:?}", path.display(), steps);
    }
    let value = match trajectories.as_slice() {
        [t] => trajectory_to_value(t),
        ts => Value::Array(ts.iter().map(trajectory_to_value).collect()),
    };
    if csv.is_none() || out.out.is_some() {
        emit(out, &value)?;
    }
    Ok(())
}

fn game_synthesize(game: &GameArgs, b_path: &PathBuf, target_path: &PathBuf, out: &OutArgs) -> CliResult<()> {
    check_not_input(out.out.as_ref(), &[&game.a, b_path, target_path])?;
    let config = load_config(&game.config)?;
    let ring = config.ring()?;
    let a = read_profile(&config, ring, &game.a)?;
    let b = read_mod(ring, b_path)?;
    let target = read_profile(&config, ring, target_path)?;
    let sol = synthesize_feedback(&a, &b, &target)?;
    let residual = a.add(&t_stp(&b, &sol.f)?)?.sub(&target)?;
    let nonzero = residual.data().iter().filter(|&&x| x != 0).count();
    note(out, &format!("rank {}, invariant factors [{}]", sol.rank, sol.invariant_factors.join(", ")));
    note(out, &format!("residual: {nonzero} nonzero entries of {} (mod {})", residual.data().len(), ring.modulus()));
    emit(out, &cubic_to_value(&sol.f))
}

fn game_cycle(game: &GameArgs, w0_path: &PathBuf, steps: usize, out: &OutArgs) -> CliResult<()> {
    check_not_input(out.out.as_ref(), &[&game.a, w0_path])?;
    let config = load_config(&game.config)?;
    let ring = config.ring()?;
    let a = read_mod(ring, &game.a)?;
    let w0 = read_profile(&config, ring, w0_path)?;
    let value = match detect_cycle(&a, &w0, steps)? {
        CycleReport::Found { preperiod, period } => json!({ "found": true, "preperiod": preperiod, "period": period }),
        CycleReport::Exhausted { steps } => json!({ "found": false, "steps": steps }),
    };
    emit(out, &value)
}

fn hyper_dual(path: Option<&PathBuf>, config: Option<&str>, out: &OutArgs) -> CliResult<()> {
    let dual = match (path, config) {
        (Some(path), None) => {
            check_not_input(out.out.as_ref(), &[path])?;
            let h = read_hypergraph(path)?;
            let report = h.validate();
            if !report.is_simple() {
                log::warn!("{}: {report}", path.display());
            }
            h.dual()?
        }
        (None, Some(config)) => build_supply_chain(&load_config(config)?)?.1,
        _ => return Err(CliError::Usage("give a hypergraph file or --config".into())),
    };
    emit(out, &serde_json::to_value(&dual).expect("hypergraphs serialize"))
}

fn read_hypergraph(path: &Path) -> CliResult<Hypergraph> {
    Ok(serde_json::from_str(&read_text(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?)
}

/// Recognizes a document by its keys and checks it.
fn describe(path: &Path, v: &Value) -> CliResult<String> {
    let what = path.display().to_string();
    let has = |k: &str| v.get(k).is_some();
    if has("slices") {
        let a = AnyCubic::from_value(v, &what)?;
        Ok(format!("cubic matrix {} over {}", a.dims(), a.domain()))
    } else if has("rows") && has("data") {
        AnyDense::from_value(v, &what)?;
        Ok("dense matrix".into())
    } else if has("vertices") {
        let h: Hypergraph = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
        let report = h.validate();
        if !report.is_valid() {
            return Err(Error::Structure(format!("{what}: {report}")).into());
        }
        Ok(format!("hypergraph, {} vertices, {} edges, {report}", h.n_vertices(), h.n_edges()))
    } else if has("x0") {
        match AnySimulation::from_value(v, &what)? {
            AnySimulation::Real(d) => check_system(&d)?,
            AnySimulation::Mod(d) => check_system(&d)?,
        }
        Ok("simulation document".into())
    } else if has("coeffs") {
        tcube::io::series_from_value(v, &what)?;
        Ok("power series".into())
    } else if has("n_manufacturers") {
        let c: GameConfig = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
        c.validate()?;
        Ok(format!("game config, {} chains", c.n_chains()))
    } else {
        Err(Error::Parse(format!("{what}: unrecognized document")).into())
    }
}

fn check_system<R: Ring>(doc: &SimulationDoc<R>) -> tcube::Result<()> {
    match &doc.system {
        SystemDoc::Linear(spec) => {
            spec.validate()?;
            doc.input.validate()
        }
        SystemDoc::Nonlinear(_) => doc.input.validate(),
    }
}

fn validate(files: &[PathBuf], self_check: bool, seed: u64, samples: usize) -> CliResult<()> {
    if files.is_empty() && !self_check {
        return Err(CliError::Usage("nothing to validate: give files or --self-check".into()));
    }
    let mut first_error = None;
    for path in files {
        match read_value(path).and_then(|v| describe(path, &v)) {
            Ok(desc) => println!("{}: ok, {desc}", path.display()),
            Err(e) => {
                println!("{}: FAILED, {e}", path.display());
                first_error.get_or_insert(e);
            }
        }
    }
    if self_check {
        let z12 = Modular::new(12)?;
        for kind in ProductKind::ALL {
            let exact = s_system_check(z12, kind, 2, 3, 2, samples, seed)?;
            let real = s_system_check(Real, kind, 2, 3, 2, samples, seed)?;
            for (domain, report) in [(z12.domain(), &exact), (Real.domain(), &real)] {
                println!(
                    "s-system axioms, {kind} over {domain}: {} ({} identity and {} action failures in {} samples, max rel error {:e})",
                    if report.passed { "pass" } else { "FAIL" },
                    report.identity_failures,
                    report.action_failures,
                    report.samples,
                    report.max_rel_error
                );
            }
            if !(exact.passed && real.passed) {
                first_error.get_or_insert(Error::Structure(format!("s-system axioms fail for {kind}")).into());
            }
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
