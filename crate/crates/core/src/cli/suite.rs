//! The invariant battery behind `verify-suite`.
//!
//! Every trial draws from its own generator, seeded from the run seed and
//! the trial's coordinates, so aggregates do not depend on scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::report::{Check, Report};
use super::{CliResult, Outcome, RunConfig};
use crate::error::{Error, Result};
use crate::frame::{axis_table, check_normalization, pauli_axis_projectors, FrameFunction, HemisphereRule};
use crate::marginality::{
    certify_marginal_with, extend_to_composite, reconstruct_density, spanning_projectors, SpanningSet, Verdict,
};
use crate::measurement::{embed, pvm_from_unitary, Pvm};
use crate::operator::{
    haar_unitary, partial_trace_b_matrix, random_density, random_projector, rng_from_seed,
    trace_product, DensityMatrix,
};
use crate::tolerance::Tolerances;

/// Bound on `‖ρ̂ − ρ‖_F` for reconstructions of Born-backed functions.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
/// Bound on re-reconstructing a reconstruction.
pub const IDEMPOTENCE_TOL: f64 = 1e-10;
/// Bound on identities that hold up to rounding only.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteParams {
    pub dims: Vec<usize>,
    pub trials: usize,
    /// Added to every Born value in the normalization check.
    pub perturb: f64,
    /// Witness dimensions for the extension and partial-trace checks.
    pub dim_b: Vec<usize>,
    /// Random projectors tested per extension instance.
    pub projectors_per_instance: usize,
    pub parallel: bool,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self { dims: vec![2, 3, 4], trials: 200, perturb: 0.0, dim_b: vec![2, 3], projectors_per_instance: 10, parallel: false }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn trial_seed(seed: u64, group: u64, dim: usize, dim_b: usize, trial: usize) -> u64 {
    [group, dim as u64, dim_b as u64, trial as u64].iter().fold(mix(seed), |acc, &x| mix(acc ^ x))
}

fn run_trials<T, F>(trials: usize, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..trials).into_par_iter().map(f).collect()
    } else {
        (0..trials).map(f).collect()
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn count(flags: impl IntoIterator<Item = bool>) -> f64 {
    flags.into_iter().filter(|&b| b).count() as f64
}

/// Random composition of `dim` into positive parts.
fn random_partition<R: Rng>(dim: usize, rng: &mut R) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut left = dim;
    while left > 0 {
        let k = rng.random_range(1..=left);
        parts.push(k);
        left -= k;
    }
    parts
}

const GROUP_NORMALIZATION: u64 = 1;
const GROUP_SOUNDNESS: u64 = 2;
const GROUP_EXTENSION: u64 = 3;
const GROUP_PARTIAL_TRACE: u64 = 4;
const GROUP_COUNTEREXAMPLE: u64 = 5;

struct Ctx<'a> {
    seed: u64,
    params: &'a SuiteParams,
    tol: &'a Tolerances,
}

fn normalization(ctx: &Ctx, d: usize) -> Result<Vec<Check>> {
    let rows = run_trials(ctx.params.trials, ctx.params.parallel, |t| {
        let mut rng = rng_from_seed(trial_seed(ctx.seed, GROUP_NORMALIZATION, d, 0, t));
        let rho = random_density(d, &mut rng);
        let parts = random_partition(d, &mut rng);
        let m = pvm_from_unitary(&haar_unitary(d, &mut rng), &parts, ctx.tol)?;
        let f = FrameFunction::born_backed(rho, ctx.tol);
        let mut total = 0.0;
        for p in m.elements() {
            total += f.evaluate(p)? + ctx.params.perturb;
        }
        Ok((total - 1.0).abs())
    })?;
    Ok(vec![Check::at_most(format!("normalization[d={d}]"), max_of(rows), ctx.tol.frame)])
}

struct SoundnessRow {
    error: f64,
    residual: f64,
    idempotence: f64,
    not_marginal: bool,
    non_marginal: bool,
}

fn soundness(ctx: &Ctx, d: usize, s: &SpanningSet) -> Result<(Vec<Check>, f64)> {
    let dim_b = ctx.params.dim_b.first().copied().unwrap_or(2).min(crate::marginality::MAX_EXTENSION_DIM);
    let rows = run_trials(ctx.params.trials, ctx.params.parallel, |t| {
        let mut rng = rng_from_seed(trial_seed(ctx.seed, GROUP_SOUNDNESS, d, 0, t));
        let rho = random_density(d, &mut rng);
        let f = FrameFunction::born_backed(rho.clone(), ctx.tol);
        let cert = certify_marginal_with(&f, s, ctx.tol, dim_b)?;
        let again = DensityMatrix::new(cert.rho_hat.clone(), ctx.tol)?;
        let rec = reconstruct_density(&FrameFunction::born_backed(again, ctx.tol), s, ctx.tol)?;
        Ok(SoundnessRow {
            error: cert.rho_hat.distance(rho.matrix()),
            residual: cert.linear_residual,
            idempotence: rec.rho_hat.distance(&cert.rho_hat),
            not_marginal: cert.verdict != Verdict::Marginal,
            non_marginal: cert.verdict == Verdict::NonMarginal,
        })
    })?;
    let born_non_marginal = count(rows.iter().map(|r| r.non_marginal));
    let checks = vec![
        Check::at_most(format!("soundness.frobenius[d={d}]"), max_of(rows.iter().map(|r| r.error)), RECONSTRUCTION_TOL),
        Check::at_most(format!("soundness.linear_residual[d={d}]"), max_of(rows.iter().map(|r| r.residual)), ctx.tol.lin),
        Check::equals(format!("soundness.not_marginal[d={d}]"), count(rows.iter().map(|r| r.not_marginal)), 0.0),
        Check::at_most(
            format!("round_trip.idempotence[d={d}]"),
            max_of(rows.iter().map(|r| r.idempotence)),
            IDEMPOTENCE_TOL,
        ),
    ];
    Ok((checks, born_non_marginal))
}

fn extension(ctx: &Ctx, d: usize, db: usize) -> Result<Vec<Check>> {
    let k = ctx.params.projectors_per_instance;
    let rows = run_trials(ctx.params.trials, ctx.params.parallel, |t| {
        let mut rng = rng_from_seed(trial_seed(ctx.seed, GROUP_EXTENSION, d, db, t));
        let rho_f = random_density(d, &mut rng);
        let sigma = random_density(db, &mut rng);
        let rho_big = extend_to_composite(&rho_f, &sigma, ctx.tol)?;
        let trace_error = partial_trace_b_matrix(rho_big.matrix(), d, db)?.distance(rho_f.matrix());
        let f = FrameFunction::born_backed(rho_f, ctx.tol);
        let big = FrameFunction::born_backed(rho_big, ctx.tol);
        let mut worst: f64 = 0.0;
        for _ in 0..k {
            let rank = rng.random_range(1..d);
            let p = random_projector(d, rank, &mut rng);
            worst = worst.max((f.evaluate(&p)? - big.evaluate(&embed(&p, db, ctx.tol)?)?).abs());
        }
        Ok((trace_error, worst))
    })?;
    Ok(vec![
        Check::at_most(format!("extension.partial_trace[d={d},d_b={db}]"), max_of(rows.iter().map(|r| r.0)), EXACT_TOL),
        Check::at_most(format!("extension.marginal_values[d={d},d_b={db}]"), max_of(rows.iter().map(|r| r.1)), EXACT_TOL),
    ])
}

fn partial_trace_identity(ctx: &Ctx, d: usize, db: usize) -> Result<Vec<Check>> {
    let rows = run_trials(ctx.params.trials, ctx.params.parallel, |t| {
        let mut rng = rng_from_seed(trial_seed(ctx.seed, GROUP_PARTIAL_TRACE, d, db, t));
        let rank = rng.random_range(1..d);
        let p = random_projector(d, rank, &mut rng);
        let rho = random_density(d * db, &mut rng);
        let lhs = trace_product(embed(&p, db, ctx.tol)?.matrix(), rho.matrix());
        let rhs = trace_product(p.matrix(), &partial_trace_b_matrix(rho.matrix(), d, db)?);
        Ok((lhs - rhs).norm())
    })?;
    Ok(vec![Check::at_most(format!("partial_trace_identity[d={d},d_b={db}]"), max_of(rows), EXACT_TOL)])
}

struct CounterRow {
    hemisphere_residual: f64,
    table_residual: f64,
    bloch_deviation: f64,
    non_marginal: bool,
    outside_ball: bool,
}

/// Qubit functions with no density matrix: the hemisphere rules on random
/// PVMs, and random axis tables with at least two definite axes.
fn counterexamples(ctx: &Ctx, s: &SpanningSet) -> Result<(Vec<Check>, f64)> {
    let tol = ctx.tol;
    let axis_pvms: Vec<Pvm> =
        pauli_axis_projectors(tol).chunks(2).map(|pair| Pvm::new(pair.to_vec(), tol)).collect::<Result<_>>()?;
    let rules = [HemisphereRule::LexZxy, HemisphereRule::XzDefinite].map(|r| FrameFunction::deterministic_qubit(r, tol));
    let rows = run_trials(ctx.params.trials, ctx.params.parallel, |t| {
        let mut rng = rng_from_seed(trial_seed(ctx.seed, GROUP_COUNTEREXAMPLE, 2, 0, t));
        let m = pvm_from_unitary(&haar_unitary(2, &mut rng), &[1, 1], tol)?;
        let mut hemisphere_residual: f64 = 0.0;
        for f in &rules {
            hemisphere_residual = hemisphere_residual.max(check_normalization(f, &m)?);
        }

        let values = loop {
            let v: [f64; 3] = std::array::from_fn(|_| [0.0, 0.5, 1.0][rng.random_range(0..3)]);
            if v.iter().filter(|&&x| x != 0.5).count() >= 2 {
                break v;
            }
        };
        let f = axis_table(values, tol)?;
        let mut table_residual: f64 = 0.0;
        for m in &axis_pvms {
            table_residual = table_residual.max(check_normalization(&f, m)?);
        }
        let cert = certify_marginal_with(&f, s, tol, 2)?;
        let bloch = cert.bloch().ok_or(Error::UnsupportedDimension(cert.dim))?;
        let expected = values.map(|v| 2.0 * v - 1.0);
        let bloch_deviation = max_of(bloch.as_array().iter().zip(expected).map(|(a, b)| (a - b).abs()));
        Ok(CounterRow {
            hemisphere_residual,
            table_residual,
            bloch_deviation,
            non_marginal: cert.verdict == Verdict::NonMarginal,
            outside_ball: bloch.norm() > 1.0 + tol.bloch,
        })
    })?;
    let non_marginal = count(rows.iter().map(|r| r.non_marginal && r.outside_ball && r.table_residual == 0.0));
    let n = rows.len() as f64;
    let checks = vec![
        Check::equals("counterexample.hemisphere_normalization", max_of(rows.iter().map(|r| r.hemisphere_residual)), 0.0),
        Check::equals("counterexample.table_normalization", max_of(rows.iter().map(|r| r.table_residual)), 0.0),
        Check::at_most("counterexample.bloch_deviation", max_of(rows.iter().map(|r| r.bloch_deviation)), RECONSTRUCTION_TOL),
        Check::equals("counterexample.non_marginal", non_marginal, n),
    ];
    Ok((checks, non_marginal))
}

pub fn verify_suite(cfg: &RunConfig, params: &SuiteParams) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    for &d in &params.dims {
        if !(2..=crate::marginality::MAX_SPANNING_DIM).contains(&d) {
            return Err(Error::UnsupportedDimension(d).into());
        }
    }
    for &db in &params.dim_b {
        if !(2..=crate::marginality::MAX_EXTENSION_DIM).contains(&db) {
            return Err(Error::UnsupportedDimension(db).into());
        }
    }
    let ctx = Ctx { seed: cfg.seed, params, tol };
    let mut checks = Vec::new();
    let mut born_non_marginal = 0.0;
    let mut witnesses = 0.0;
    if params.trials > 0 {
        for &d in &params.dims {
            let s = spanning_projectors(d, tol)?;
            checks.extend(normalization(&ctx, d)?);
            let (c, n) = soundness(&ctx, d, &s)?;
            checks.extend(c);
            born_non_marginal += n;
            for &db in &params.dim_b {
                if d * db > tol.max_dim {
                    return Err(Error::DimensionOverflow { dim: d * db, max: tol.max_dim }.into());
                }
                checks.extend(extension(&ctx, d, db)?);
                checks.extend(partial_trace_identity(&ctx, d, db)?);
            }
            if d == 2 {
                let (c, n) = counterexamples(&ctx, &s)?;
                checks.extend(c);
                witnesses += n;
            }
        }
        checks.push(Check::equals("strict_inclusion.born_non_marginal", born_non_marginal, 0.0));
        if params.dims.contains(&2) {
            checks.push(Check::at_least("strict_inclusion.non_quantum_non_marginal", witnesses, 1.0));
        }
    }
    let results = json!({
        "checks_run": checks.len(),
        "born_non_marginal": born_non_marginal,
        "non_quantum_non_marginal": witnesses,
    });
    let echo = cfg.echo(serde_json::to_value(params).expect("params serialize"));
    Ok(Outcome::from_checks(Report::new("verify-suite", echo, results, checks), None))
}
