use std::path::Path;

use serde_json::{json, Value};

use super::report::{read_input, to_value, Check, Report};
use super::{exit, verdict_exit_code, CliResult, Outcome, RunConfig};
use crate::error::Error;
use crate::frame::{check_normalization, pauli_axis_projectors, FrameFunction, HemisphereRule};
use crate::json::{parse_frame, parse_pvm, pvm_to_string};
use crate::marginality::{
    certify_marginal_with, marginality_witness, reconstruct_density, spanning_projectors, Verdict,
};
use crate::measurement::{
    embed_pvm, intertwine_graph, measurement_family_mpsi, projector_key, pvm_from_unitary, IntertwineGraph, Pvm,
};
use crate::operator::{
    bloch_to_density, haar_unitary, min_eigenvalue, random_ket, random_unitary, rng_from_seed, BlochVector,
};
use crate::tolerance::Tolerances;

/// Bloch vector of the Born-backed control state in `demo-counterexample`.
pub const COUNTEREXAMPLE_CONTROL_BLOCH: [f64; 3] =
    [std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2];

fn check_dim(dim: usize, tol: &Tolerances) -> Result<(), Error> {
    if dim < 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if dim > tol.max_dim {
        return Err(Error::DimensionOverflow { dim, max: tol.max_dim });
    }
    Ok(())
}

fn load_frame(path: &Path, tol: &Tolerances, dim: Option<usize>) -> CliResult<FrameFunction> {
    let f = parse_frame(&read_input(path)?, tol)?;
    if let Some(d) = dim {
        if d != f.dim() {
            return Err(Error::DimensionMismatch { expected: d, got: f.dim() }.into());
        }
    }
    Ok(f)
}

pub fn gen_pvm(cfg: &RunConfig, dim: usize, ranks: &[usize]) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    check_dim(dim, tol)?;
    if ranks.iter().sum::<usize>() != dim || ranks.contains(&0) {
        return Err(Error::PartitionMismatch { partition: ranks.to_vec(), dim }.into());
    }
    let u = random_unitary(dim, cfg.seed);
    let m = pvm_from_unitary(&u, ranks, tol)?;
    let r = m.residuals();
    let checks = vec![
        Check::at_most("orthogonality_residual", r.orthogonality(), tol.pvm),
        Check::at_most("completeness_residual", r.completeness, tol.pvm),
    ];
    let results = json!({ "dim": dim, "ranks": m.ranks(), "labels": m.labels() });
    let report = Report::new("gen-pvm", cfg.echo(json!({ "dim": dim, "ranks": ranks })), results, checks);
    Ok(Outcome::from_checks(report, Some(pvm_to_string(&m))))
}

pub fn eval(cfg: &RunConfig, frame: &Path, pvm: &Path) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    let f = load_frame(frame, tol, None)?;
    let m = parse_pvm(&read_input(pvm)?, tol)?;
    if m.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: m.dim() }.into());
    }
    let mut values = Vec::with_capacity(m.len());
    let mut sum = 0.0;
    for (label, p) in m.labels().iter().zip(m.elements()) {
        let v = f.evaluate(p)?;
        sum += v;
        values.push(json!({ "label": label, "value": v }));
    }
    let results = json!({ "dim": f.dim(), "values": values, "sum": sum });
    let checks = vec![Check::at_most("normalization_residual", (sum - 1.0).abs(), tol.frame)];
    let params = json!({ "frame": frame, "pvm": pvm });
    Ok(Outcome::from_checks(Report::new("eval", cfg.echo(params), results, checks), None))
}

pub fn check_marginal(cfg: &RunConfig, frame: &Path, dim: Option<usize>, dim_b: usize) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    let f = load_frame(frame, tol, dim)?;
    let s = spanning_projectors(f.dim(), tol)?;
    let cert = certify_marginal_with(&f, &s, tol, dim_b)?;
    let checks = vec![
        Check::at_most("linear_residual", cert.linear_residual, tol.lin),
        Check::at_least("min_eigenvalue", cert.min_eig, -tol.psd),
    ];
    let witness = marginality_witness(&cert).ok().map(|w| w.to_string());
    let results = json!({
        "verdict": cert.verdict,
        "witness": witness,
        "certificate": to_value(&cert)?,
    });
    let params = json!({ "frame": frame, "dim": dim, "dim_b": dim_b });
    let report = Report::new("check-marginal", cfg.echo(params), results, checks);
    Ok(Outcome { report, artifact: Some(cert.to_json()), exit_code: verdict_exit_code(cert.verdict) })
}

pub fn reconstruct(cfg: &RunConfig, frame: &Path, dim: Option<usize>) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    let f = load_frame(frame, tol, dim)?;
    let s = spanning_projectors(f.dim(), tol)?;
    let rec = reconstruct_density(&f, &s, tol)?;
    let min_eig = min_eigenvalue(&rec.rho_hat, tol)?;
    let bloch = if f.dim() == 2 { Some(BlochVector::from_matrix(&rec.rho_hat)?) } else { None };
    let results = json!({
        "dim": f.dim(),
        "spanning_set_id": s.id(),
        "rho_hat": to_value(&rec.rho_hat)?,
        "min_eig": min_eig,
        "bloch": bloch,
        "bloch_norm": bloch.map(|b| b.norm()),
    });
    let checks = vec![Check::at_most("linear_residual", rec.linear_residual, tol.lin)];
    let artifact = serde_json::to_string_pretty(&results).expect("results serialize");
    let params = json!({ "frame": frame, "dim": dim });
    let report = Report::new("reconstruct", cfg.echo(params), results, checks);
    Ok(Outcome { report, artifact: Some(artifact), exit_code: exit::OK })
}

/// Normalization of `f` on the three axis PVMs and `trials` Haar qubit PVMs.
fn qubit_normalization(f: &FrameFunction, trials: usize, seed: u64, tol: &Tolerances) -> Result<(usize, f64), Error> {
    let axes = pauli_axis_projectors(tol);
    let mut pvms: Vec<Pvm> = axes.chunks(2).map(|pair| Pvm::new(pair.to_vec(), tol)).collect::<Result<_, _>>()?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..trials {
        pvms.push(pvm_from_unitary(&haar_unitary(2, &mut rng), &[1, 1], tol)?);
    }
    let mut worst: f64 = 0.0;
    for m in &pvms {
        worst = worst.max(check_normalization(f, m)?);
    }
    Ok((pvms.len(), worst))
}

pub fn demo_counterexample(cfg: &RunConfig, trials: usize, rho_backed: bool) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    let (f, normalization_tol) = if rho_backed {
        let [x, y, z] = COUNTEREXAMPLE_CONTROL_BLOCH;
        let rho = bloch_to_density(BlochVector::new(x, y, z), tol)?;
        (FrameFunction::born_backed(rho, tol), tol.frame)
    } else {
        // Deterministic values are 0, 1/2 or 1, so the sums are exact.
        (FrameFunction::deterministic_qubit(HemisphereRule::XzDefinite, tol), 0.0)
    };
    let (pvms_checked, residual) = qubit_normalization(&f, trials, cfg.seed, tol)?;

    let s = spanning_projectors(2, tol)?;
    let cert = certify_marginal_with(&f, &s, tol, 2)?;
    let bloch = cert.bloch().expect("qubit certificates carry a Bloch witness");
    let axis_values = ["+x", "-x", "+y", "-y", "+z", "-z"]
        .iter()
        .zip(s.projectors())
        .map(|(name, p)| Ok((name.to_string(), json!(f.evaluate(p)?))))
        .collect::<Result<serde_json::Map<String, Value>, Error>>()?;

    let mut checks = vec![Check::at_most("max_normalization_residual", residual, normalization_tol)];
    checks.push(if rho_backed {
        Check::at_most("bloch_norm", bloch.norm(), 1.0 + tol.bloch)
    } else {
        Check::at_least("bloch_norm", bloch.norm(), 1.0 + tol.bloch)
    });
    let expected = if rho_backed { Verdict::Marginal } else { Verdict::NonMarginal };
    checks.push(Check::equals("verdict_matches_expected", f64::from(u8::from(cert.verdict == expected)), 1.0));

    let witness = marginality_witness(&cert).ok().map(|w| w.to_string());
    let results = json!({
        "assignment": if rho_backed { "born" } else { HemisphereRule::XzDefinite.name() },
        "axis_values": axis_values,
        "pvms_checked": pvms_checked,
        "verdict": cert.verdict,
        "bloch": bloch,
        "bloch_norm": bloch.norm(),
        "witness": witness,
    });
    let params = json!({ "trials": trials, "rho_backed": rho_backed });
    let report = Report::new("demo-counterexample", cfg.echo(params), results, checks);
    Ok(Outcome::from_checks(report, Some(cert.to_json())))
}

fn degree_table(g: &IntertwineGraph) -> Vec<Value> {
    g.nodes
        .iter()
        .map(|n| json!({ "key": n.key, "rank": n.rank, "degree": n.degree, "distinct_degree": n.distinct_degree }))
        .collect()
}

pub fn demo_intertwine(cfg: &RunConfig, n_psi: usize) -> CliResult<Outcome> {
    let tol = cfg.tolerances();
    if n_psi == 0 {
        return Err(Error::EmptySet.into());
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut family = Vec::with_capacity(n_psi);
    let mut qubit = Vec::with_capacity(n_psi);
    for _ in 0..n_psi {
        let k = random_ket(2, &mut rng);
        family.push(measurement_family_mpsi([k[0], k[1]], tol)?);
        qubit.push(pvm_from_unitary(&haar_unitary(2, &mut rng), &[1, 1], tol)?);
    }
    let embedded = qubit.iter().map(|m| embed_pvm(m, 2, tol)).collect::<Result<Vec<_>, _>>()?;
    let composite_pvms: Vec<Pvm> = family.iter().chain(&embedded).cloned().collect();

    let composite = intertwine_graph(&composite_pvms, tol.key)?;
    let single = intertwine_graph(&qubit, tol.key)?;
    let pi_key = projector_key(&family[0].elements()[0], tol.key);
    let degree_pi = composite.degree(&pi_key);
    let others_max = composite.nodes.iter().filter(|n| n.key != pi_key).map(|n| n.degree).max().unwrap_or(0);

    let checks = vec![
        Check::equals("degree_pi", degree_pi as f64, n_psi as f64),
        Check::equals("composite_max_degree_excluding_pi", others_max as f64, 1.0),
        Check::equals("single_qubit_max_degree", single.summary().max_degree as f64, 1.0),
    ];
    let results = json!({
        "pi_key": pi_key,
        "composite": {
            "pvms": composite_pvms.len(),
            "summary": composite.summary(),
            "degree_table": degree_table(&composite),
        },
        "single_qubit": {
            "pvms": qubit.len(),
            "summary": single.summary(),
            "degree_table": degree_table(&single),
        },
    });
    let report = Report::new("demo-intertwine", cfg.echo(json!({ "n_psi": n_psi })), results, checks);
    Ok(Outcome::from_checks(report, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::Format;
    use crate::json::frame_to_string;
    use crate::operator::{DensityMatrix, C64};

    fn cfg(seed: u64) -> RunConfig {
        RunConfig::new(seed, &[], Format::Json, None).unwrap()
    }

    fn write_frame(dir: &Path, name: &str, f: &FrameFunction) -> std::path::PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, frame_to_string(f)).unwrap();
        path
    }

    #[test]
    fn gen_pvm_is_valid_and_reproducible() {
        let a = gen_pvm(&cfg(42), 4, &[1, 1, 2]).unwrap();
        let b = gen_pvm(&cfg(42), 4, &[1, 1, 2]).unwrap();
        assert_eq!(a.exit_code, 0);
        assert_eq!(a.artifact, b.artifact);
        assert!(a.report.checks.iter().all(|c| c.value <= 1e-12));
        let m = parse_pvm(a.artifact.as_deref().unwrap(), &Tolerances::default()).unwrap();
        assert_eq!(m.ranks(), vec![1, 1, 2]);
    }

    #[test]
    fn gen_pvm_rejects_bad_partition() {
        let err = gen_pvm(&cfg(0), 3, &[1, 1]).unwrap_err();
        assert_eq!(err.exit_code(), exit::INVALID);
        assert_eq!(err.kind(), "PartitionMismatch");
    }

    #[test]
    fn check_marginal_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let tol = Tolerances::default();
        let born = write_frame(
            dir.path(),
            "born.json",
            &FrameFunction::born_backed(DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &tol).unwrap(), &tol),
        );
        assert_eq!(check_marginal(&cfg(0), &born, Some(2), 2).unwrap().exit_code, 0);

        let det = write_frame(dir.path(), "det.json", &crate::frame::axis_table([1.0, 0.5, 1.0], &tol).unwrap());
        let out = check_marginal(&cfg(0), &det, Some(2), 2).unwrap();
        assert_eq!(out.exit_code, exit::NON_MARGINAL);
        assert_eq!(out.report.results["witness"], "Bloch norm 1.4142, excess 0.4142");

        let axes = pauli_axis_projectors(&tol);
        let partial =
            FrameFunction::tabulated(vec![(axes[0].clone(), 1.0), (axes[1].clone(), 0.0)], &tol).unwrap();
        let partial = write_frame(dir.path(), "partial.json", &partial);
        let err = check_marginal(&cfg(0), &partial, Some(2), 2).unwrap_err();
        assert_eq!((err.exit_code(), err.kind()), (exit::INVALID, "UndefinedProjector"));

        let err = check_marginal(&cfg(0), &born, Some(3), 2).unwrap_err();
        assert_eq!(err.kind(), "DimensionMismatch");
        let err = check_marginal(&cfg(0), &dir.path().join("absent.json"), None, 2).unwrap_err();
        assert_eq!(err.exit_code(), exit::IO);
    }

    #[test]
    fn counterexample_and_control() {
        let out = demo_counterexample(&cfg(5), 100, false).unwrap();
        assert_eq!(out.exit_code, 0, "{}", out.report.to_json());
        assert_eq!(out.report.results["verdict"], "non_marginal");
        assert_eq!(out.report.checks[0].value, 0.0);
        assert_eq!(out.report.results["pvms_checked"], 103);

        let control = demo_counterexample(&cfg(5), 100, true).unwrap();
        assert_eq!(control.exit_code, 0);
        assert_eq!(control.report.results["verdict"], "marginal");
    }

    #[test]
    fn counterexample_verdict_is_seed_independent() {
        let a = demo_counterexample(&cfg(1), 20, false).unwrap();
        let b = demo_counterexample(&cfg(99), 20, false).unwrap();
        assert_eq!(a.report.results["verdict"], b.report.results["verdict"]);
        assert_eq!(a.artifact, b.artifact);
    }

    #[test]
    fn intertwine_degrees() {
        let out = demo_intertwine(&cfg(3), 10).unwrap();
        assert_eq!(out.exit_code, 0, "{}", out.report.to_json());
        assert_eq!(out.report.checks[0].value, 10.0);
        let one = demo_intertwine(&cfg(3), 1).unwrap();
        assert_eq!(one.report.results["composite"]["summary"]["max_degree"], 1);
        assert_eq!(demo_intertwine(&cfg(3), 0).unwrap_err().exit_code(), exit::INVALID);
    }

    #[test]
    fn eval_reports_values_in_pvm_order() {
        let dir = tempfile::tempdir().unwrap();
        let tol = Tolerances::default();
        let frame = write_frame(dir.path(), "f.json", &FrameFunction::deterministic_qubit(HemisphereRule::LexZxy, &tol));
        let pvm = dir.path().join("m.json");
        std::fs::write(&pvm, gen_pvm(&cfg(8), 2, &[1, 1]).unwrap().artifact.unwrap()).unwrap();
        let out = eval(&cfg(0), &frame, &pvm).unwrap();
        assert_eq!(out.exit_code, 0);
        let values = out.report.results["values"].as_array().unwrap();
        assert_eq!(values.len(), 2);
        assert_eq!(out.report.results["sum"], 1.0);
    }

    #[test]
    fn reconstruct_reports_bloch_vector() {
        let dir = tempfile::tempdir().unwrap();
        let tol = Tolerances::default();
        let det = write_frame(dir.path(), "det.json", &crate::frame::axis_table([1.0, 0.5, 1.0], &tol).unwrap());
        let out = reconstruct(&cfg(0), &det, None).unwrap();
        let b = &out.report.results["bloch"];
        assert!((b["x"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(b["y"].as_f64().unwrap().abs() < 1e-12);
        assert!((out.report.results["bloch_norm"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }
}
