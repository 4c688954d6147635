//! The staged pipeline behind `bench run`.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rigidity_core::cones::{cutoff_params, split_radius, window_ladder};
use rigidity_core::degree::{graph_projection_degree, DegreeConfig, MapWithJacobian};
use rigidity_core::symplectic::{
    coisotropic_check, gen_pos_normalize, graph_window_check, ham_isotopy_from_map,
    symplectic_residual, IsotopyConfig, NormalizationData, NormalizeConfig, SymplecticSpace,
    TwistedGraph,
};

use crate::config::{Schedule, ScenarioConfig};
use crate::families::{self, Sequence};
use crate::report::{
    GateFailure, Hull, Ladder, Normalization, PerN, RTrend, RigidityReport, Section, Timing,
    Verdict, WindowRecord,
};
use crate::BenchError;

const NOTES: [&str; 5] = [
    "all inclusions, suprema and degrees are evaluated on finite samples; a pass is evidence, \
     not a certificate",
    "the infinite product sheaf of the limit is not built; nonempty limit fibers are enforced \
     by the degree gate and the hull-convergence gate instead",
    "N_r is located by sampling the window inclusion directly; lemma_pass records whether the \
     sufficient condition d(psi_n, psi) < Ar/(A+1) also holds",
    "the Hamiltonian isotopies are recovered from the translated input maps before the \
     linear charts; fiber hulls and degrees are computed on the normalized input maps, which \
     the recovered time-one maps match to within e_n",
    "the window radius is evaluated on the grid r, r/2, r/4; the trend is reported, not a limit",
];

/// Number of worker threads: `BENCH_THREADS` if set to a positive integer.
pub fn thread_count() -> Option<usize> {
    std::env::var("BENCH_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs every stage in order. A failed gate or an exhausted budget returns
/// the partial report inside the error.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RigidityReport, BenchError> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_count() {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::IoFailure(std::io::Error::other(e.to_string())))?;
    let seq = families::build(cfg)?;
    let mut run = Run::new(cfg.clone());
    let outcome = pool.install(|| stages(&mut run, &seq));
    let Run { mut report, .. } = run;
    match outcome {
        Ok(()) => {
            report.seal();
            Ok(report)
        }
        Err(Stop::Gate { step, detail }) => {
            report.gate_failure = Some(GateFailure { step: step.clone(), detail: detail.clone() });
            report.verdict = None;
            report.seal();
            Err(BenchError::GateFailure { step, detail, report: Box::new(report) })
        }
        Err(Stop::Budget { elapsed, limit, stage }) => {
            report.verdict = None;
            report.seal();
            Err(BenchError::NumericBudgetExceeded { elapsed, limit, stage, report: Box::new(report) })
        }
    }
}

enum Stop {
    Gate { step: String, detail: String },
    Budget { elapsed: f64, limit: f64, stage: String },
}

fn gate<T>(step: &str, detail: impl Into<String>) -> Result<T, Stop> {
    Err(Stop::Gate { step: step.into(), detail: detail.into() })
}

struct Run {
    report: RigidityReport,
    start: Instant,
    mark: Instant,
    rng: ChaCha8Rng,
}

impl Run {
    fn new(cfg: ScenarioConfig) -> Run {
        let rng = ChaCha8Rng::seed_from_u64(cfg.scenario.seed);
        let mut report = RigidityReport::new(cfg);
        report.notes = NOTES.iter().map(|s| s.to_string()).collect();
        let now = Instant::now();
        Run { report, start: now, mark: now, rng }
    }

    fn cfg(&self) -> &ScenarioConfig {
        &self.report.config
    }

    fn stage_done(&mut self, stage: &str) -> Result<(), Stop> {
        let now = Instant::now();
        self.report.timings.push(Timing {
            stage: stage.into(),
            seconds: (now - self.mark).as_secs_f64(),
        });
        self.mark = now;
        let elapsed = (now - self.start).as_secs_f64();
        let limit = self.cfg().budget.max_seconds;
        if elapsed > limit {
            return Err(Stop::Budget { elapsed, limit, stage: stage.into() });
        }
        Ok(())
    }

    /// Uniform samples of the ball of radius `radius` in `R^dim`.
    fn ball(&mut self, dim: usize, radius: f64, count: usize) -> Vec<Vec<f64>> {
        self.product(dim, radius, 0, 0.0, count)
    }

    /// Uniform samples of `B_a^{da} x B_b^{db}`.
    fn product(&mut self, da: usize, a: f64, db: usize, b: f64, count: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p: Vec<f64> = (0..da + db)
                .map(|i| {
                    let h = if i < da { a } else { b };
                    h * (2.0 * self.rng.random::<f64>() - 1.0)
                })
                .collect();
            if norm(&p[..da]) < a && norm(&p[da..]) < b.max(f64::MIN_POSITIVE) {
                out.push(p);
            }
        }
        out
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn translate(phi: &MapWithJacobian, shift: &[f64]) -> MapWithJacobian {
    let d = phi.dim();
    let neg: Vec<f64> = shift.iter().map(|s| -s).collect();
    MapWithJacobian::affine(DMatrix::identity(d, d), neg).compose(phi)
}

struct Normalized {
    data: NormalizationData,
    limit: MapWithJacobian,
    limit_centered: MapWithJacobian,
    /// Input maps translated by the same vector as the limit.
    centered: Vec<MapWithJacobian>,
    maps: Vec<MapWithJacobian>,
    r: f64,
}

fn stages(run: &mut Run, seq: &Sequence) -> Result<(), Stop> {
    let cfg = run.cfg().clone();
    let k = cfg.scenario.half_dim;
    let d = 2 * k;
    let count = cfg.scenario.sequence_length;

    // input-residual
    let pts = run.ball(d, cfg.window.r_cap, cfg.sampling.residual_points);
    let residuals: Vec<f64> = seq
        .maps
        .par_iter()
        .map(|m| symplectic_residual(m, &pts).unwrap_or(f64::INFINITY))
        .collect();
    run.report.per_n = (1..=count)
        .map(|n| PerN {
            n,
            error_bound: cfg.schedule.value(n),
            approx_error: None,
            residual: residuals[n - 1],
            window_pass: None,
            window_sup: None,
            lemma_pass: None,
            degree: None,
            hull_distance: None,
            fiber_missing: None,
        })
        .collect();
    let limit_residual = symplectic_residual(&seq.limit, &pts).unwrap_or(f64::INFINITY);
    let gate_tol = cfg.tolerances.residual_gate;
    if let Some(bad) = residuals.iter().position(|&r| !(r <= gate_tol)) {
        return gate(
            "input-residual",
            format!("map n = {} has symplectic residual {:e} > {:e}", bad + 1, residuals[bad], gate_tol),
        );
    }
    if !(limit_residual <= gate_tol) {
        return gate(
            "input-residual",
            format!("limit map has symplectic residual {limit_residual:e} > {gate_tol:e}"),
        );
    }
    run.stage_done("input-residual")?;

    let norm_data = normalization(run, seq)?;
    run.stage_done("normalization")?;

    approximation(run, &norm_data)?;
    run.stage_done("approximation")?;

    let n_r = window_bound(run, &norm_data)?;
    run.stage_done("window-bound")?;

    degree_gate(run, &norm_data, n_r)?;
    run.stage_done("degree-gate")?;

    ladder(run, &norm_data)?;
    run.stage_done("ladder")?;

    section(run, &norm_data)?;
    run.stage_done("section")?;

    hull_convergence(run, &norm_data, n_r)?;
    run.stage_done("hull-convergence")?;

    verdict(run, &norm_data)?;
    run.stage_done("verdict")?;
    Ok(())
}

fn normalization(run: &mut Run, seq: &Sequence) -> Result<Normalized, Stop> {
    let cfg = run.cfg().clone();
    let k = cfg.scenario.half_dim;
    let shift = seq.limit.eval(&vec![0.0; 2 * k]);
    let limit_centered = translate(&seq.limit, &shift);
    let ncfg = NormalizeConfig {
        grid_per_axis: cfg.sampling.normalize_grid(k),
        r_cap: cfg.window.r_cap,
        ..NormalizeConfig::default()
    };
    let data = match gen_pos_normalize(&limit_centered, &ncfg) {
        Ok(d) => d,
        Err(e) => return gate("normalization", e.to_string()),
    };
    let r = cfg.window.r.unwrap_or(cfg.window.r_fraction * data.r0);
    let (ru, rv) = data.chart_residuals();
    run.report.normalization = Some(Normalization {
        translation: shift.clone(),
        a: data.a,
        r0: data.r0,
        r,
        chart_residuals: [ru, rv],
    });
    if !(r > 0.0 && r < data.r0 / 4.0) {
        return gate(
            "normalization",
            format!("window radius r = {r} must satisfy 0 < r < r0/4 = {}", data.r0 / 4.0),
        );
    }
    let centered: Vec<MapWithJacobian> = seq.maps.iter().map(|m| translate(m, &shift)).collect();
    let maps = centered.iter().map(|m| data.psi(m)).collect();
    let limit = data.psi(&limit_centered);
    Ok(Normalized { data, limit, limit_centered, centered, maps, r })
}

fn check_schedule(s: &Schedule, count: usize, tail_ratio: f64) -> Result<(), String> {
    let e: Vec<f64> = (1..=count).map(|n| s.value(n)).collect();
    if let Some(i) = e.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(format!("e_{} = {} is not a positive number", i + 1, e[i]));
    }
    if let Some(i) = e.windows(2).position(|w| w[1] > w[0]) {
        return Err(format!("schedule increases at n = {}: {} > {}", i + 2, e[i + 1], e[i]));
    }
    if e[count - 1] > tail_ratio * e[0] {
        return Err(format!(
            "schedule does not decrease towards 0: e_N = {} > {} * e_1",
            e[count - 1],
            tail_ratio
        ));
    }
    Ok(())
}

fn approximation(run: &mut Run, norm_data: &Normalized) -> Result<(), Stop> {
    let cfg = run.cfg().clone();
    let d = 2 * cfg.scenario.half_dim;
    let count = cfg.scenario.sequence_length;
    if let Err(m) = check_schedule(&cfg.schedule, count, cfg.tolerances.schedule_tail_ratio) {
        return gate("approximation", m);
    }
    let r0 = norm_data.data.r0;
    let pts = run.ball(d, r0, cfg.sampling.approx_points);
    let flow_checks = cfg.sampling.flow_checks.min(pts.len());
    let icfg = IsotopyConfig::default();
    let results: Vec<Result<f64, String>> = norm_data
        .centered
        .par_iter()
        .enumerate()
        .map(|(i, psi)| {
            let e_n = cfg.schedule.value(i + 1);
            let iso = ham_isotopy_from_map(psi, r0, e_n, &icfg).map_err(|e| e.to_string())?;
            let mut worst: f64 = 0.0;
            for p in &pts {
                worst = worst.max(gap(&iso.isotopy_at(p, 1.0), &psi.eval(p)));
            }
            for p in &pts[..flow_checks] {
                worst = worst.max(gap(&iso.time_one(p), &psi.eval(p)));
            }
            Ok(worst)
        })
        .collect();
    for (row, res) in run.report.per_n.iter_mut().zip(&results) {
        row.approx_error = res.as_ref().ok().copied();
    }
    for (i, res) in results.iter().enumerate() {
        let e_n = cfg.schedule.value(i + 1);
        match res {
            Err(m) => return gate("approximation", format!("n = {}: {m}", i + 1)),
            Ok(err) if !(*err <= e_n) => {
                return gate(
                    "approximation",
                    format!("n = {}: sampled error {err:e} exceeds e_n = {e_n:e}", i + 1),
                )
            }
            _ => {}
        }
    }
    Ok(())
}

/// Whether the sampled window `B_r x B_{3Ar}` of the graph of `psi` has all
/// fibers in `B_{2Ar}`.
fn window_inclusion(psi: &MapWithJacobian, k: usize, a: f64, r: f64, per_axis: usize) -> bool {
    let d = 2 * k;
    let total = per_axis.pow(d as u32);
    for mut idx in 0..total {
        let mut p = vec![0.0; d];
        for (i, slot) in p.iter_mut().enumerate() {
            let h = if i < k { r } else { 3.0 * a * r };
            let c = idx % per_axis;
            idx /= per_axis;
            *slot = -h + 2.0 * h * (c as f64 + 0.5) / per_axis as f64;
        }
        let img = psi.eval(&p);
        let base: Vec<f64> = p[..k].iter().chain(&img[..k]).copied().collect();
        let fiber: Vec<f64> = p[k..].iter().chain(&img[k..]).copied().collect();
        let (b, f) = (norm(&base), norm(&fiber));
        if b < r && f < 3.0 * a * r && f >= 2.0 * a * r {
            return false;
        }
    }
    true
}

fn least_tail(pass: &[bool]) -> Option<usize> {
    let mut n_r = None;
    for (i, ok) in pass.iter().enumerate().rev() {
        if !ok {
            break;
        }
        n_r = Some(i + 1);
    }
    n_r
}

fn window_bound(run: &mut Run, nd: &Normalized) -> Result<usize, Stop> {
    let cfg = run.cfg().clone();
    let k = cfg.scenario.half_dim;
    let (a, r0, r) = (nd.data.a, nd.data.r0, nd.r);
    let per_axis = cfg.sampling.window_per_axis(k);
    let samples = run.product(k, r0, k, a * r0, cfg.sampling.approx_points);
    let bound = a * r / (a + 1.0);
    let rows: Vec<(bool, f64, bool, Vec<bool>)> = nd
        .maps
        .par_iter()
        .map(|psi| {
            let pass = window_inclusion(psi, k, a, r, per_axis);
            let sup = samples
                .iter()
                .map(|p| gap(&psi.eval(p), &nd.limit.eval(p)))
                .fold(0.0, f64::max);
            let lemma = sup < bound
                && graph_window_check(
                    &nd.limit,
                    psi,
                    r0,
                    a,
                    r,
                    0.5 * (sup + bound),
                    cfg.sampling.approx_points,
                )
                .map(|w| w.holds())
                .unwrap_or(false);
            let trend = [0.5, 0.25]
                .iter()
                .map(|f| window_inclusion(psi, k, a, f * r, per_axis))
                .collect();
            (pass, sup, lemma, trend)
        })
        .collect();
    for (row, (pass, sup, lemma, _)) in run.report.per_n.iter_mut().zip(&rows) {
        row.window_pass = Some(*pass);
        row.window_sup = Some(*sup);
        row.lemma_pass = Some(*lemma);
    }
    let pass: Vec<bool> = rows.iter().map(|t| t.0).collect();
    let n_r = least_tail(&pass);
    run.report.n_r = n_r;
    run.report.r_trend = std::iter::once(RTrend { r, n_r })
        .chain([0.5, 0.25].iter().enumerate().map(|(j, f)| {
            let p: Vec<bool> = rows.iter().map(|t| t.3[j]).collect();
            RTrend { r: f * r, n_r: least_tail(&p) }
        }))
        .collect();
    match n_r {
        Some(n) => Ok(n),
        None => gate(
            "window-bound",
            format!("the window inclusion fails at the last map n = {}", pass.len()),
        ),
    }
}

fn degree_gate(run: &mut Run, nd: &Normalized, n_r: usize) -> Result<(), Stop> {
    let cfg = run.cfg().clone();
    let k = cfg.scenario.half_dim;
    let dcfg = DegreeConfig { seeds_per_axis: cfg.sampling.degree_seeds(k), ..DegreeConfig::default() };
    let (a, r) = (nd.data.a, nd.r);
    let pass: Vec<bool> = run.report.per_n.iter().map(|p| p.window_pass == Some(true)).collect();
    let degrees: Vec<Result<i64, String>> = nd
        .maps
        .par_iter()
        .zip(pass.par_iter())
        .map(|(psi, &ok)| {
            if !ok {
                return Err("window inclusion fails".to_string());
            }
            let graph = TwistedGraph::new(psi.clone(), &[]).map_err(|e| e.to_string())?;
            graph_projection_degree(&graph, r, a, &dcfg).map_err(|e| e.to_string())
        })
        .collect();
    for (row, d) in run.report.per_n.iter_mut().zip(&degrees) {
        row.degree = d.as_ref().ok().copied();
    }
    for (i, d) in degrees.iter().enumerate().skip(n_r - 1) {
        match d {
            Ok(1) => {}
            Ok(v) => return gate("degree-gate", format!("n = {}: degree {v}, expected 1", i + 1)),
            Err(m) => return gate("degree-gate", format!("n = {}: {m}", i + 1)),
        }
    }
    Ok(())
}

fn ladder(run: &mut Run, nd: &Normalized) -> Result<(), Stop> {
    let (a, r) = (nd.data.a, nd.r);
    let c1 = 1.0 / (3.0 * a * r);
    let c2 = 1.0 / (2.0 * a * r);
    let step = |e: rigidity_core::cones::ConesError| Stop::Gate {
        step: "ladder".into(),
        detail: e.to_string(),
    };
    let p = cutoff_params(c1, c2).map_err(step)?;
    let r1 = split_radius(c1, c2, r).map_err(step)?;
    if !(r1 > 0.0) {
        return gate("ladder", "split radius is zero");
    }
    let lad = window_ladder(r1, c1).map_err(step)?;
    let margin = lad.nesting_margin();
    run.report.ladder = Some(Ladder {
        c1,
        c2,
        c: p.c,
        eps: p.eps,
        r1,
        rho: lad.rho,
        windows: lad
            .windows
            .iter()
            .map(|w| WindowRecord {
                slice: [w.slice.0, w.slice.1],
                center: w.center,
                half_width: w.half_width,
                ball_radius: w.ball_radius,
                shrink: w.shrink,
            })
            .collect(),
        nesting_margin: margin,
    });
    if !(margin > 0.0) {
        return gate("ladder", format!("windows do not nest (margin {margin:e})"));
    }
    Ok(())
}

fn base_det(j: &DMatrix<f64>, k: usize) -> f64 {
    j.view((0, k), (k, k)).determinant()
}

fn section(run: &mut Run, nd: &Normalized) -> Result<(), Stop> {
    let cfg = run.cfg().clone();
    let k = cfg.scenario.half_dim;
    let (a, r) = (nd.data.a, nd.r);
    let det0 = base_det(&nd.limit.jacobian(&vec![0.0; 2 * k]), k);
    let pts = run.product(k, r, k, 3.0 * a * r, cfg.sampling.hull_points);
    let min_ratio = pts
        .iter()
        .map(|p| base_det(&nd.limit.jacobian(p), k).abs() / det0.abs())
        .fold(f64::INFINITY, f64::min);
    let pass = det0.abs() > 0.0 && min_ratio >= cfg.tolerances.section_floor;
    run.report.section = Some(Section { det_at_origin: det0, min_ratio, pass });
    if !pass {
        return gate(
            "section",
            format!("|det dx'/dxi| ratio {min_ratio:e} below {}", cfg.tolerances.section_floor),
        );
    }
    Ok(())
}

/// Twisted fiber points `(xi, -xi')` over the base point `(x, x')` with
/// fiber norm below `bound`.
fn fiber_points(psi: &MapWithJacobian, k: usize, base: &[f64], seeds: &[Vec<f64>], bound: f64) -> Vec<Vec<f64>> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    for seed in seeds {
        let mut xi = seed.clone();
        let mut converged = false;
        for _ in 0..60 {
            let p: Vec<f64> = base[..k].iter().chain(&xi).copied().collect();
            let img = psi.eval(&p);
            let f = nalgebra::DVector::from_fn(k, |i, _| img[i] - base[k + i]);
            if f.amax() < 1e-12 {
                converged = true;
                break;
            }
            let j = psi.jacobian(&p).view((0, k), (k, k)).clone_owned();
            let Some(step) = j.lu().solve(&f) else {
                break;
            };
            for (x, s) in xi.iter_mut().zip(step.iter()) {
                *x -= s;
            }
            if norm(&xi) > 4.0 * bound {
                break;
            }
        }
        if !converged {
            continue;
        }
        let p: Vec<f64> = base[..k].iter().chain(&xi).copied().collect();
        let img = psi.eval(&p);
        let pt: Vec<f64> = xi.iter().copied().chain(img[k..].iter().map(|v| -v)).collect();
        if norm(&pt) < bound && !found.iter().any(|q| gap(q, &pt) < 1e-8) {
            found.push(pt);
        }
    }
    found
}

fn hull_convergence(run: &mut Run, nd: &Normalized, n_r: usize) -> Result<(), Stop> {
    let cfg = run.cfg().clone();
    let k = cfg.scenario.half_dim;
    let (a, r) = (nd.data.a, nd.r);
    let bound = 3.0 * a * r;
    let bases = run.ball(2 * k, r, cfg.sampling.hull_points);
    let per_axis = cfg.sampling.fiber_seeds.max(1);
    let grid: Vec<Vec<f64>> = (0..per_axis.pow(k as u32))
        .map(|mut idx| {
            (0..k)
                .map(|_| {
                    let c = idx % per_axis;
                    idx /= per_axis;
                    -bound + 2.0 * bound * (c as f64 + 0.5) / per_axis as f64
                })
                .collect()
        })
        .collect();
    let mut limit_fibers = Vec::with_capacity(bases.len());
    for b in &bases {
        let pts = fiber_points(&nd.limit, k, b, &grid, bound);
        match pts.into_iter().min_by(|p, q| norm(p).total_cmp(&norm(q))) {
            Some(p) => limit_fibers.push(p),
            None => {
                return gate("hull-convergence", format!("limit graph has no fiber point over {b:?}"))
            }
        }
    }
    let rows: Vec<(Option<f64>, usize)> = nd
        .maps
        .par_iter()
        .map(|psi| {
            let mut worst: Option<f64> = None;
            let mut missing = 0;
            for (b, lf) in bases.iter().zip(&limit_fibers) {
                let mut seeds = vec![lf[..k].to_vec()];
                seeds.extend(grid.iter().cloned());
                let pts = fiber_points(psi, k, b, &seeds, bound);
                if pts.is_empty() {
                    missing += 1;
                    continue;
                }
                let d = pts.iter().map(|p| gap(p, lf)).fold(0.0, f64::max);
                worst = Some(worst.map_or(d, |w: f64| w.max(d)));
            }
            (worst, missing)
        })
        .collect();
    for (row, (dist, missing)) in run.report.per_n.iter_mut().zip(&rows) {
        row.hull_distance = *dist;
        row.fiber_missing = Some(*missing);
    }
    let tail = &rows[n_r - 1..];
    let mut monotone = true;
    let mut failure = None;
    for (i, (dist, missing)) in tail.iter().enumerate() {
        let n = n_r + i;
        if *missing > 0 || dist.is_none() {
            failure.get_or_insert(format!("n = {n}: no fiber point over {missing} base samples"));
            monotone = false;
        }
        if i > 0 {
            if let (Some(prev), Some(cur)) = (tail[i - 1].0, *dist) {
                if cur > prev + cfg.tolerances.monotone {
                    monotone = false;
                    failure.get_or_insert(format!("hull distance rises at n = {n}: {cur:e} > {prev:e}"));
                }
            }
        }
    }
    run.report.hull = Some(Hull {
        base_samples: bases.len(),
        monotone_from_n_r: monotone,
        first: tail.first().and_then(|t| t.0),
        last: tail.last().and_then(|t| t.0),
    });
    match failure {
        Some(m) => gate("hull-convergence", m),
        None => Ok(()),
    }
}

fn verdict(run: &mut Run, nd: &Normalized) -> Result<(), Stop> {
    let cfg = run.cfg().clone();
    let k = cfg.scenario.half_dim;
    let d = 2 * k;
    let radius = 1e-2 * nd.data.r0;
    let pts = run.ball(d, radius, cfg.sampling.plane_points.max(4 * d));
    let sigma = 0.5 * radius;
    let phi = &nd.limit_centered;
    let mut pp = DMatrix::<f64>::zeros(d, d);
    let mut gp = DMatrix::<f64>::zeros(2 * d, d);
    let mut samples = Vec::with_capacity(pts.len());
    for p in &pts {
        let img = phi.eval(p);
        let g: Vec<f64> = p[..k]
            .iter()
            .chain(&img[..k])
            .chain(&p[k..])
            .copied()
            .chain(img[k..].iter().map(|v| -v))
            .collect();
        let w = (-norm(p).powi(2) / (2.0 * sigma * sigma)).exp();
        let pv = nalgebra::DVector::from_column_slice(p);
        let gv = nalgebra::DVector::from_column_slice(&g);
        pp += &pv * pv.transpose() * w;
        gp += &gv * pv.transpose() * w;
        samples.push((pv, gv, w));
    }
    let Some(inv) = pp.try_inverse() else {
        return gate("verdict", "plane fit is singular");
    };
    let m = gp * inv;
    let (mut num, mut den) = (0.0, 0.0);
    for (pv, gv, w) in &samples {
        num += w * (gv - &m * pv).norm_squared();
        den += w;
    }
    let residual = (num / den).sqrt() / radius;
    let space = SymplecticSpace::new(d);
    let co = match coisotropic_check(&m, &space) {
        Ok(c) => c,
        Err(e) => return gate("verdict", e.to_string()),
    };
    let within = residual <= cfg.tolerances.plane_residual;
    if !within {
        run.report.notes.push(format!(
            "plane-fit residual {residual:e} exceeds {:e}; the limit graph is curved at the fit scale",
            cfg.tolerances.plane_residual
        ));
    }
    run.report.verdict = Some(Verdict {
        result: if co { "coisotropic" } else { "not coisotropic" }.into(),
        lagrangian: co && m.ncols() == d,
        plane: m.row_iter().map(|r| r.iter().copied().collect()).collect(),
        residual,
        residual_within_tolerance: within,
        fit_radius: radius,
    });
    Ok(())
}
