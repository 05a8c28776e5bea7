//! The five subcommands. Each one appends checks to a [`Report`] and hands
//! its tables to a [`Sink`]; the binary decides what to print and how to exit.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fuss_spectra_core::combinatorics::{catalan, fc_recurrence, fuss_catalan, FussCatalanTable};
use fuss_spectra_core::delta::{delta_compose, delta_invert, weak_compositions, JSets};
use fuss_spectra_core::limit::{mp_density_closed_form, DensityGrid, LimitLaw, TabulatedCdf};
use fuss_spectra_core::paths::{certify, enumerate_regular, unique_single_block, IndexPath};
use fuss_spectra_core::rmt::ecdf::uniform_grid;
use fuss_spectra_core::rmt::moments::trace_moments_of;
use fuss_spectra_core::rmt::{
    hermitian_eigenvalues, kolmogorov_distance, power_product, sample_matrix, truncate, EmpiricalCdf, EnsembleSpec,
    Family, MomentReport, Spectrum, TruncationInfo,
};
use fuss_spectra_core::series::{functional_equation_residual, inverse_binomial_series, s_transform_series};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{line_plot_svg, write_text, Table};
use crate::report::Report;

/// Where tables go: files under a directory, stdout, or nowhere.
#[derive(Debug, Clone)]
pub enum Sink {
    Dir(PathBuf),
    Stdout,
    Discard,
}

impl Sink {
    pub fn for_config(cfg: &RunConfig) -> Self {
        cfg.out.clone().map_or(Sink::Stdout, Sink::Dir)
    }

    fn dir(&self) -> Option<&Path> {
        match self {
            Sink::Dir(d) => Some(d),
            _ => None,
        }
    }

    pub fn text(&self, name: &str, text: &str, report: &mut Report) -> Result<()> {
        match self {
            Sink::Dir(dir) => report.artifacts.push(write_text(dir, name, text)?),
            Sink::Stdout => print!("{text}"),
            Sink::Discard => {}
        }
        Ok(())
    }

    pub fn table(&self, name: &str, table: &Table, report: &mut Report) -> Result<()> {
        self.text(name, &table.render(), report)
    }
}

/// Worker pool sized by `FUSS_SPECTRA_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("FUSS_SPECTRA_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("FUSS_SPECTRA_THREADS={v:?} is not a count"))?;
        builder = builder.num_threads(n.max(1));
    }
    Ok(builder.build()?)
}

fn fc_f64(m: u32, p: u32) -> f64 {
    fuss_catalan(m, p).to_f64().unwrap_or(f64::INFINITY)
}

// ---------------------------------------------------------------- moments

/// The `m,p,value` table for `p = 0..=p_max`.
pub fn moment_table(m: u32, p_max: u32) -> Table {
    let mut t = Table::new("m,p,value");
    for p in 0..=p_max {
        t.push(&[&m, &p, &fuss_catalan(m, p)]);
    }
    t
}

/// Exact identities for one `m`: closed form against the recurrence,
/// Catalan numbers at `m = 1`, the functional equation and the S-transform.
pub fn moment_checks(m: u32, p_max: u32, report: &mut Report) -> Result<()> {
    let table = FussCatalanTable::new(m, p_max);
    let mut mismatches = 0;
    for p in 1..=p_max {
        if fc_recurrence(m, p, &table)? != fuss_catalan(m, p) {
            mismatches += 1;
        }
    }
    report.holds(
        format!("moments.m{m}.recurrence"),
        format!("m={m} p_max={p_max} recurrence mismatches={mismatches}"),
        mismatches == 0,
    );
    if m == 1 {
        let ok = (0..=p_max).all(|p| fuss_catalan(1, p) == catalan(p));
        report.holds("moments.m1.catalan", format!("m=1 p_max={p_max} catalan={ok}"), ok);
    }
    let residual = functional_equation_residual(m, p_max as usize);
    report.holds(
        format!("moments.m{m}.functional_equation"),
        format!("m={m} order={p_max} residual_zero={}", residual.is_zero()),
        residual.is_zero(),
    );
    if p_max >= 1 {
        let s = s_transform_series(m, p_max as usize)?;
        let ok = s == inverse_binomial_series(m, p_max as usize - 1);
        report.holds(
            format!("moments.m{m}.s_transform"),
            format!("m={m} order={} s_transform=binomial:{ok}", p_max - 1),
            ok,
        );
    }
    Ok(())
}

pub fn cmd_moments(cfg: &RunConfig, sink: &Sink, report: &mut Report) -> Result<()> {
    sink.table(&format!("moments_m{}.csv", cfg.m), &moment_table(cfg.m, cfg.p_max), report)?;
    moment_checks(cfg.m, cfg.p_max, report)
}

// -------------------------------------------------------------- enumerate

/// Count, certificates, `J_k` structure and the Δ bijection for one `(m, p)`.
pub fn enumeration_checks(m: u32, p: u32, budget: usize, sink: &Sink, report: &mut Report) -> Result<()> {
    let (mu, pu) = (m as usize, p as usize);
    let found = enumerate_regular(mu, pu, budget)?;
    let expected = fuss_catalan(m, p);
    let count = found.count();
    report.holds(
        format!("enumerate.m{m}.p{p}.count"),
        format!("m={m} p={p} count={count} expected={expected}"),
        expected == count.into(),
    );

    let mut listing = String::new();
    let mut certs = Table::new("m,p,path_id,V,E,regular");
    let mut inconsistent = 0;
    let mut jset_failures = 0;
    for (id, path) in found.paths.iter().enumerate() {
        listing.push_str(&format!("{path}\n"));
        let c = certify(path)?;
        certs.push(&[&m, &p, &id, &c.vertices, &c.edges, &c.is_regular()]);
        if !c.is_fully_consistent() {
            inconsistent += 1;
        }
        if pu > 0 {
            let j = JSets::compute(path);
            let ok = j.all_nonempty() && j.pairwise_disjoint() && j.ordered() && j.spans_divisible(mu);
            if !ok {
                jset_failures += 1;
            }
        }
    }
    sink.text(&format!("paths_m{m}_p{p}.txt"), &listing, report)?;
    sink.table(&format!("certificates_m{m}_p{p}.csv"), &certs, report)?;
    report.holds(
        format!("enumerate.m{m}.p{p}.certificates"),
        format!("m={m} p={p} tree_certificate_failures={inconsistent}"),
        inconsistent == 0,
    );
    if pu == 0 {
        return Ok(());
    }
    report.holds(
        format!("enumerate.m{m}.p{p}.jsets"),
        format!("m={m} p={p} jset_failures={jset_failures}"),
        jset_failures == 0,
    );
    if pu == 1 {
        let ok = single_block_symmetry(mu);
        report.holds(
            format!("enumerate.m{m}.p1.symmetry"),
            format!("m={m} p=1 symmetric={ok}"),
            ok,
        );
    }

    // Δ: every composable tuple round-trips and the image is the enumerated set.
    let smaller: Vec<Vec<IndexPath>> = (0..pu)
        .map(|q| enumerate_regular(mu, q, budget).map(|e| e.paths))
        .collect::<fuss_spectra_core::Result<_>>()?;
    let mut image = BTreeSet::new();
    let mut round_trip_failures = 0;
    let mut tuples = 0usize;
    for sizes in weak_compositions(pu - 1, mu + 1) {
        for_each_tuple(&sizes, &smaller, &mut Vec::with_capacity(mu + 1), &mut |parts| {
            tuples += 1;
            let big = delta_compose(parts, mu)?;
            if delta_invert(&big)? != parts {
                round_trip_failures += 1;
            }
            image.insert(big.indices().to_vec());
            Ok(())
        })?;
    }
    let enumerated: BTreeSet<Vec<u32>> = found.paths.iter().map(|q| q.indices().to_vec()).collect();
    let inverse_failures = found
        .paths
        .iter()
        .filter(|q| !matches!(delta_invert(q).and_then(|parts| delta_compose(&parts, mu)), Ok(ref b) if b == *q))
        .count();
    let ok = round_trip_failures == 0 && inverse_failures == 0 && image == enumerated;
    report.holds(
        format!("enumerate.m{m}.p{p}.delta"),
        format!(
            "m={m} p={p} tuples={tuples} image={} enumerated={} round_trip_failures={}",
            image.len(),
            enumerated.len(),
            round_trip_failures + inverse_failures
        ),
        ok,
    );
    Ok(())
}

fn for_each_tuple(
    sizes: &[usize],
    pools: &[Vec<IndexPath>],
    current: &mut Vec<IndexPath>,
    visit: &mut dyn FnMut(&[IndexPath]) -> fuss_spectra_core::Result<()>,
) -> fuss_spectra_core::Result<()> {
    let Some((&first, rest)) = sizes.split_first() else {
        return visit(current);
    };
    for part in &pools[first] {
        current.push(part.clone());
        for_each_tuple(rest, pools, current, visit)?;
        current.pop();
    }
    Ok(())
}

/// For the `(m, 1)` path, positions `k < l` (after the first) carry the
/// same index exactly when `k + l = 2m`.
pub fn single_block_symmetry(m: usize) -> bool {
    let path = unique_single_block(m);
    let idx = path.indices();
    let len = 2 * m;
    (0..len).all(|k| (0..len).all(|l| k == l || ((idx[k] == idx[l]) == (k + l == len))))
}

pub fn cmd_enumerate(cfg: &RunConfig, sink: &Sink, report: &mut Report) -> Result<()> {
    enumeration_checks(cfg.m, cfg.p, cfg.budget, sink, report)
}

// --------------------------------------------------------------- simulate

/// Everything measured on one sampled matrix.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub trial: u64,
    pub moments: Vec<f64>,
    pub spectrum: Spectrum,
    /// Present when truncation was requested.
    pub truncation: Option<(TruncationInfo, f64)>,
}

/// What a simulation at one `N` should compute.
#[derive(Debug, Clone, Copy)]
pub struct TrialPlan {
    pub spec: EnsembleSpec,
    pub m: u32,
    pub p_max: u32,
    /// `α_N = N^{-alpha_exponent}`; `None` skips truncation.
    pub alpha_exponent: Option<f64>,
}

pub fn run_trial(plan: &TrialPlan, trial: u64) -> fuss_spectra_core::Result<TrialOutcome> {
    let x = sample_matrix(&plan.spec, trial)?;
    let w = power_product(&x, plan.m).w;
    let moments = trace_moments_of(&w, plan.p_max)?;
    let spectrum = hermitian_eigenvalues(&w)?;
    let truncation = match plan.alpha_exponent {
        None => None,
        Some(e) => {
            let alpha = (plan.spec.n as f64).powf(-e);
            let (xt, info) = truncate(&x, alpha)?;
            let distance = if info.zeroed == 0 {
                0.0
            } else {
                let st = hermitian_eigenvalues(&power_product(&xt, plan.m).w)?;
                kolmogorov_distance(&EmpiricalCdf::from_spectrum(&spectrum)?, &EmpiricalCdf::from_spectrum(&st)?, &[])
            };
            Some((info, distance))
        }
    };
    Ok(TrialOutcome {
        trial,
        moments,
        spectrum,
        truncation,
    })
}

/// Trials `0..trials` in parallel, returned in trial order.
pub fn run_trials(plan: &TrialPlan, trials: usize, pool: &rayon::ThreadPool) -> Result<Vec<TrialOutcome>> {
    let out = pool.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| run_trial(plan, t))
            .collect::<fuss_spectra_core::Result<Vec<_>>>()
    })?;
    Ok(out)
}

/// Kolmogorov distance of the pooled (trial-averaged) ESD and the mean of
/// the per-trial distances, both against the limit CDF.
pub fn esd_distances(outcomes: &[TrialOutcome], limit: &TabulatedCdf, edge: f64) -> Result<(f64, f64)> {
    let grid = uniform_grid(0.0, edge, 512);
    let pooled = EmpiricalCdf::pooled(outcomes.iter().map(|o| &o.spectrum))?;
    let pooled_distance = kolmogorov_distance(&pooled, limit, &grid);
    let mut sum = 0.0;
    for o in outcomes {
        sum += kolmogorov_distance(&EmpiricalCdf::from_spectrum(&o.spectrum)?, limit, &grid);
    }
    Ok((pooled_distance, sum / outcomes.len() as f64))
}

/// Intervals for [`TabulatedCdf`]; interpolation error is far below MC noise.
pub const LIMIT_CDF_INTERVALS: usize = 400;

/// Moment checks on one aggregated report: the first moment within three
/// standard errors of 1, and every `p` within `max(3 stderr, 5%)`.
pub fn moment_report_checks(family: Family, report: &MomentReport, checks: &mut Report) {
    let (m, n) = (report.m, report.n);
    for row in &report.rows {
        if row.p == 1 {
            checks.within(
                format!("simulate.{family}.m{m}.n{n}.first_moment"),
                format!("family={family} m={m} N={n} p=1 mean={:.6} stderr={:.2e}", row.mean, row.stderr),
                row.mean - 1.0,
                // Rademacher has |x| = 1, so the spread vanishes up to rounding.
                (3.0 * row.stderr).max(1e-12),
            );
        }
        checks.within(
            format!("simulate.{family}.m{m}.n{n}.p{}", row.p),
            format!(
                "family={family} m={m} N={n} p={} mean={:.6} reference={} stderr={:.2e}",
                row.p, row.mean, row.reference, row.stderr
            ),
            row.mean - row.reference,
            (3.0 * row.stderr).max(0.05 * row.reference),
        );
    }
}

pub fn cmd_simulate(cfg: &RunConfig, sink: &Sink, report: &mut Report) -> Result<()> {
    let pool = thread_pool()?;
    let (m, family) = (cfg.m, cfg.family);
    let law = LimitLaw::new(m)?;
    let limit = TabulatedCdf::new(&law, LIMIT_CDF_INTERVALS)?;
    let mut moments = Table::new("m,p,N,trials,mean,stderr,reference");
    let mut ks = Table::new("m,N,trials,ks_pooled,ks_mean_trial");
    let mut trunc = Table::new("N,trial,zeroed,rows,cols,esd_distance,bound");
    let mut pooled_by_n = Vec::new();
    for &n in &cfg.ns {
        let plan = TrialPlan {
            spec: EnsembleSpec::new(family, n, cfg.seed),
            m,
            p_max: cfg.p_max,
            alpha_exponent: Some(cfg.alpha_exponent),
        };
        let outcomes = run_trials(&plan, cfg.trials, &pool)?;

        let mut spectra = Table::new("trial,k,lambda");
        for o in &outcomes {
            for (k, lambda) in o.spectrum.eigenvalues().iter().enumerate() {
                spectra.push(&[&o.trial, &k, lambda]);
            }
        }
        sink.table(&format!("spectra_{family}_m{m}_n{n}.csv"), &spectra, report)?;

        let per_trial: Vec<Vec<f64>> = outcomes.iter().map(|o| o.moments.clone()).collect();
        let summary = MomentReport::from_trials(m, n, &per_trial)?;
        for r in &summary.rows {
            moments.push(&[&m, &r.p, &n, &cfg.trials, &r.mean, &r.stderr, &r.reference]);
        }
        moment_report_checks(family, &summary, report);

        let (pooled, mean_trial) = esd_distances(&outcomes, &limit, law.support_edge())?;
        ks.push(&[&m, &n, &cfg.trials, &pooled, &mean_trial]);
        pooled_by_n.push((n, pooled));

        let mut violations = 0;
        for o in &outcomes {
            let (info, distance) = o.truncation.expect("truncation requested");
            let bound = info.esd_distance_bound(m, n);
            if distance > bound {
                violations += 1;
            }
            trunc.push(&[&n, &o.trial, &info.zeroed, &info.rows, &info.cols, &distance, &bound]);
        }
        report.holds(
            format!("simulate.{family}.m{m}.n{n}.rank_bound"),
            format!("family={family} m={m} N={n} rank_bound_violations={violations}"),
            violations == 0,
        );
    }
    sink.table(&format!("moments_{family}_m{m}.csv"), &moments, report)?;
    sink.table(&format!("ks_{family}_m{m}.csv"), &ks, report)?;
    sink.table(&format!("truncation_{family}_m{m}.csv"), &trunc, report)?;
    if pooled_by_n.len() >= 2 {
        let mut sorted = pooled_by_n.clone();
        sorted.sort_by_key(|&(n, _)| n);
        let decreasing = sorted.windows(2).all(|w| w[1].1 < w[0].1);
        let listing: Vec<String> = sorted.iter().map(|(n, d)| format!("{n}:{d:.4}")).collect();
        report.holds(
            format!("simulate.{family}.m{m}.ks_decreasing"),
            format!("family={family} m={m} ks={} decreasing={decreasing}", listing.join(",")),
            decreasing,
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- density

/// `6.75`, `9.481481` and so on: at most six decimals, no trailing zeros.
pub fn format_edge(edge: f64) -> String {
    let s = format!("{edge:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Normalization, moments up to `p_max.min(6)` and, for `m = 1`, the
/// closed form on the grid.
pub fn density_checks(law: &LimitLaw, grid: &DensityGrid, p_max: u32, report: &mut Report) -> Result<()> {
    let m = law.m();
    let total = law.normalization()?;
    report.within(
        format!("density.m{m}.normalization"),
        format!("m={m} normalization={total:.12}"),
        total - 1.0,
        1e-6,
    );
    let p_top = p_max.min(6);
    let computed = law.density_moments(p_top)?;
    let worst = computed
        .iter()
        .enumerate()
        .map(|(p, v)| {
            let exact = fc_f64(m, p as u32);
            (v - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    report.within(
        format!("density.m{m}.moments"),
        format!("m={m} p_max={p_top} moment_rel_error={worst:.3e}"),
        worst,
        1e-4,
    );
    if m == 1 {
        let max_error = grid
            .abscissae
            .iter()
            .zip(&grid.densities)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &d)| (d - mp_density_closed_form(x)).abs())
            .fold(0.0, f64::max);
        report.within(
            "density.m1.closed_form",
            format!("m=1 closed_form_max_error={max_error:.3e}"),
            max_error,
            1e-6,
        );
    }
    Ok(())
}

pub fn density_outputs(law: &LimitLaw, points: usize, sink: &Sink, report: &mut Report) -> Result<DensityGrid> {
    let m = law.m();
    let grid = DensityGrid::new(law, &DensityGrid::standard_abscissae(law, points))?;
    let mut table = Table::new("m,x,density,cdf");
    for ((x, d), g) in grid.abscissae.iter().zip(&grid.densities).zip(&grid.cdf) {
        table.push(&[&m, x, d, g]);
    }
    sink.table(&format!("density_m{m}.csv"), &table, report)?;
    if let Some(dir) = sink.dir() {
        let points: Vec<(f64, f64)> = grid
            .abscissae
            .iter()
            .copied()
            .zip(grid.densities.iter().copied())
            .filter(|&(x, _)| x > 0.0)
            .collect();
        let edge = law.support_edge();
        let svg = line_plot_svg(
            &format!("limit density, m = {m}"),
            &points,
            edge,
            &format!("edge = {}", format_edge(edge)),
        );
        report.artifacts.push(write_text(dir, &format!("density_m{m}.svg"), &svg)?);
    }
    Ok(grid)
}

pub fn cmd_density(cfg: &RunConfig, sink: &Sink, report: &mut Report) -> Result<()> {
    let law = LimitLaw::new(cfg.m)?;
    let grid = density_outputs(&law, cfg.points, sink, report)?;
    density_checks(&law, &grid, cfg.p_max, report)
}

// --------------------------------------------------------------- validate

/// The pairs whose regular paths are enumerated by `validate`.
pub const ENUMERATION_PAIRS: [(u32, u32); 10] =
    [(1, 1), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1)];

/// Exact suites over the standard ranges, the density suite for `m ≤ 4`
/// and one Monte Carlo run with the configured `m`, family, `N` and trials.
pub fn cmd_validate(cfg: &RunConfig, sink: &Sink, report: &mut Report) -> Result<()> {
    let quiet = match sink {
        Sink::Dir(_) => sink.clone(),
        _ => Sink::Discard,
    };
    for m in 1..=5 {
        if let Sink::Dir(_) = quiet {
            quiet.table(&format!("moments_m{m}.csv"), &moment_table(m, 12), report)?;
        }
        moment_checks(m, 12, report)?;
    }
    for (m, p) in ENUMERATION_PAIRS {
        enumeration_checks(m, p, cfg.budget.max(16), &quiet, report)?;
    }
    for m in 5..=6 {
        let ok = single_block_symmetry(m);
        report.holds(format!("enumerate.m{m}.p1.symmetry"), format!("m={m} p=1 symmetric={ok}"), ok);
    }
    for m in 1..=4 {
        let law = LimitLaw::new(m)?;
        let grid = density_outputs(&law, cfg.points, &quiet, report)?;
        density_checks(&law, &grid, if m <= 3 { 6 } else { 4 }, report)?;
    }
    cmd_simulate(cfg, &quiet, report)
}
