use proptest::prelude::*;

use gleason_lab::frame::{check_normalization, FrameFunction, HemisphereRule};
use gleason_lab::marginality::{certify_marginal, extend_to_composite, spanning_projectors, Verdict};
use gleason_lab::measurement::{embed, embed_pvm, projector_key, pvm_from_unitary, validate_pvm};
use gleason_lab::operator::{
    haar_unitary, min_eigenvalue, partial_trace_b, random_density, random_projector, rng_from_seed, BlochVector,
    ComplexMatrix, Projector,
};
use gleason_lab::Tolerances;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn partition(dim: usize, cuts: &[usize]) -> Vec<usize> {
    // Turn a set of cut points in 1..dim into consecutive part sizes.
    let mut points: Vec<usize> = cuts.iter().map(|c| 1 + c % (dim - 1)).collect();
    points.sort_unstable();
    points.dedup();
    let mut parts = Vec::new();
    let mut last = 0;
    for p in points.into_iter().chain([dim]) {
        parts.push(p - last);
        last = p;
    }
    parts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_projectors_validate(seed: u64, dim in 2usize..=4, rank_seed: usize) {
        let rank = rank_seed % (dim + 1);
        let p = random_projector(dim, rank, &mut rng_from_seed(seed));
        let m = p.matrix();
        prop_assert!(m.matmul(m).distance(m) <= tol().proj);
        prop_assert!(m.hermitian_residual() <= tol().herm);
        prop_assert_eq!(p.rank(), rank);
    }

    #[test]
    fn partial_trace_keeps_states(seed: u64, da in 2usize..=3, db in 2usize..=3) {
        let rho = random_density(da * db, &mut rng_from_seed(seed));
        let reduced = partial_trace_b(&rho, da, db, &tol()).unwrap();
        prop_assert!((reduced.matrix().trace().re - 1.0).abs() <= 1e-12);
        prop_assert!(min_eigenvalue(reduced.matrix(), &tol()).unwrap() >= -tol().psd);
    }

    #[test]
    fn generated_pvms_validate(seed: u64, dim in 2usize..=5, cuts in prop::collection::vec(any::<usize>(), 0..4)) {
        let parts = partition(dim, &cuts);
        let m = pvm_from_unitary(&haar_unitary(dim, &mut rng_from_seed(seed)), &parts, &tol()).unwrap();
        prop_assert_eq!(m.ranks(), parts);
        let again = validate_pvm(m.elements().to_vec(), &tol()).unwrap();
        prop_assert!(again.residuals().orthogonality() <= tol().pvm);
        prop_assert!(again.residuals().completeness <= tol().pvm);
    }

    #[test]
    fn embedding_preserves_sums(seed: u64, da in 2usize..=3, db in 2usize..=3) {
        let m = pvm_from_unitary(&haar_unitary(da, &mut rng_from_seed(seed)), &vec![1; da], &tol()).unwrap();
        let e = embed_pvm(&m, db, &tol()).unwrap();
        let total = e.elements().iter().fold(ComplexMatrix::zeros(da * db, da * db), |acc, p| acc.add(p.matrix()));
        prop_assert!(total.distance(&ComplexMatrix::identity(da * db)) <= 1e-12);
        let id = embed(&Projector::identity(da), db, &tol()).unwrap();
        prop_assert_eq!(id.matrix(), &ComplexMatrix::identity(da * db));
    }

    #[test]
    fn values_stay_in_unit_interval(seed: u64, dim in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let f = FrameFunction::born_backed(random_density(dim, &mut rng), &tol());
        for rank in 0..=dim {
            let v = f.evaluate(&random_projector(dim, rank, &mut rng)).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn hemisphere_rules_are_exactly_normalized(seed: u64) {
        let m = pvm_from_unitary(&haar_unitary(2, &mut rng_from_seed(seed)), &[1, 1], &tol()).unwrap();
        for rule in [HemisphereRule::LexZxy, HemisphereRule::XzDefinite] {
            let f = FrameFunction::deterministic_qubit(rule, &tol());
            prop_assert_eq!(check_normalization(&f, &m).unwrap(), 0.0);
        }
    }

    #[test]
    fn induced_born_matches_reduced_state(seed: u64, db in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(2 * db, &mut rng);
        let reduced = FrameFunction::born_backed(partial_trace_b(&rho, 2, db, &tol()).unwrap(), &tol());
        let induced = FrameFunction::induce(FrameFunction::born_backed(rho, &tol()), 2, db).unwrap();
        for _ in 0..5 {
            let p = random_projector(2, 1, &mut rng);
            prop_assert!((induced.evaluate(&p).unwrap() - reduced.evaluate(&p).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn extension_is_realizable(seed: u64, d in 2usize..=3, db in 2usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho_f = random_density(d, &mut rng);
        let big = extend_to_composite(&rho_f, &random_density(db, &mut rng), &tol()).unwrap();
        let induced = FrameFunction::induce(FrameFunction::born_backed(big, &tol()), d, db).unwrap();
        let direct = FrameFunction::born_backed(rho_f, &tol());
        for _ in 0..5 {
            let rank = 1 + (seed as usize) % (d - 1);
            let p = random_projector(d, rank, &mut rng);
            prop_assert!((induced.evaluate(&p).unwrap() - direct.evaluate(&p).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn table_keys_are_single_valued(seed: u64, v in 0.0f64..=1.0) {
        let p = random_projector(2, 1, &mut rng_from_seed(seed));
        let f = FrameFunction::tabulated(vec![(p.clone(), v), (p.complement(), 1.0 - v)], &tol()).unwrap();
        prop_assert_eq!(f.evaluate(&p).unwrap(), v);
        let clash = FrameFunction::tabulated(vec![(p.clone(), v), (p.clone(), (v + 0.5) % 1.0)], &tol());
        prop_assert!(clash.is_err());
        prop_assert_eq!(projector_key(&p, tol().key), projector_key(&p.clone(), tol().key));
    }

    #[test]
    fn bloch_matrices_of_unit_vectors_are_projectors(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        let n = (x * x + y * y + z * z).sqrt();
        prop_assume!(n > 1e-3);
        let b = BlochVector::new(x / n, y / n, z / n);
        let p = Projector::new(b.to_matrix(), &tol()).unwrap();
        prop_assert_eq!(p.rank(), 1);
    }
}

#[test]
fn every_hemisphere_rule_is_non_marginal() {
    let s = spanning_projectors(2, &tol()).unwrap();
    for rule in [HemisphereRule::LexZxy, HemisphereRule::XzDefinite] {
        let cert = certify_marginal(&FrameFunction::deterministic_qubit(rule, &tol()), &s, &tol()).unwrap();
        assert_eq!(cert.verdict, Verdict::NonMarginal);
        assert!(cert.bloch().unwrap().norm() > 1.0);
    }
}
