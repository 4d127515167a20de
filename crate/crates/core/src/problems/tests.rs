use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::pareto;

fn eval_named(name: &str, x: &[f64]) -> Vec<f64> {
    let task = TaskSpec::by_name(name).unwrap();
    evaluate(&task, None, &Genotype::Continuous(x.to_vec())).unwrap()
}

#[test]
fn catalog_matches_problem_table() {
    for (name, dims, m) in [
        ("dtlz1", 7, 3),
        ("dtlz2", 10, 3),
        ("zdt1", 30, 2),
        ("zdt4", 10, 2),
        ("zdt6", 10, 2),
        ("omni-test", 2, 2),
        ("vlmop1", 1, 2),
        ("vlmop2", 6, 2),
        ("vlmop3", 2, 3),
    ] {
        let task = TaskSpec::by_name(name).unwrap();
        assert_eq!(task.dims, dims, "{name} dims");
        assert_eq!(task.num_objectives, m, "{name} objectives");
        assert_eq!(task.reference_point.len(), m, "{name} reference point length");
    }
    assert!(TaskSpec::by_name("zdt5").is_err());
    for name in TaskSpec::all_names() {
        TaskSpec::by_name(name).unwrap();
    }
}

#[test]
fn zdt1_known_points() {
    let zero = eval_named("zdt1", &vec![0.0; 30]);
    assert!((zero[0] - 0.0).abs() < 1e-12 && (zero[1] - 1.0).abs() < 1e-12);
    let mut x = vec![0.0; 30];
    x[0] = 1.0;
    let one = eval_named("zdt1", &x);
    assert!((one[0] - 1.0).abs() < 1e-12 && one[1].abs() < 1e-12);
}

#[test]
fn dtlz2_known_points() {
    let mid = eval_named("dtlz2", &vec![0.5; 10]);
    assert!((mid[0] - 0.5).abs() < 1e-12);
    assert!((mid[1] - 0.5).abs() < 1e-12);
    assert!((mid[2] - 2f64.sqrt() / 2.0).abs() < 1e-12);

    let mut x = vec![0.5; 10];
    x[0] = 0.0;
    x[1] = 0.0;
    let axis = eval_named("dtlz2", &x);
    assert!((axis[0] - 1.0).abs() < 1e-12 && axis[1].abs() < 1e-12 && axis[2].abs() < 1e-12);
}

#[test]
fn out_of_bounds_is_domain_error() {
    let task = TaskSpec::by_name("zdt1").unwrap();
    let mut x = vec![0.5; 30];
    x[3] = 1.5;
    assert!(matches!(
        evaluate(&task, None, &Genotype::Continuous(x)),
        Err(Error::Domain(_))
    ));
}

#[test]
fn zdt_f1_depends_only_on_x1() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in ["zdt1", "zdt2", "zdt3", "zdt6"] {
        let task = TaskSpec::by_name(name).unwrap();
        let x1 = rng.random::<f64>();
        let mut base = vec![0.0; task.dims];
        base[0] = x1;
        let f_base = eval_named(name, &base);
        for _ in 0..5 {
            let mut x = vec![x1];
            x.extend((1..task.dims).map(|_| rng.random::<f64>()));
            assert_eq!(eval_named(name, &x)[0], f_base[0], "{name} f1 moved with tail");
        }
    }
}

/// Independently scripted transcription of the omni-test formula,
/// cross-checked against the evaluator.
#[test]
fn omni_test_second_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let x: Vec<f64> = (0..2).map(|_| rng.random::<f64>() * 6.0).collect();
        let got = eval_named("omni-test", &x);
        let mut sin_sum = 0.0;
        let mut cos_sum = 0.0;
        for &v in &x {
            sin_sum += (std::f64::consts::PI * v).sin();
            cos_sum += (std::f64::consts::PI * v).cos();
        }
        assert!((got[0] - sin_sum).abs() < 1e-12);
        assert!((got[1] - cos_sum).abs() < 1e-12);
    }
}

#[test]
fn true_front_zdt1_closed_form() {
    let task = TaskSpec::by_name("zdt1").unwrap();
    let front = true_pareto_front(&task, 3).unwrap();
    assert_eq!(front.len(), 3);
    assert_eq!(front[0], vec![0.0, 1.0]);
    assert!((front[1][0] - 0.5).abs() < 1e-12 || (front[1][1] - (1.0 - front[1][0].sqrt())).abs() < 1e-12);
    assert_eq!(front[2], vec![1.0, 0.0]);
}

#[test]
fn true_front_dtlz2_on_unit_sphere() {
    let task = TaskSpec::by_name("dtlz2").unwrap();
    for p in true_pareto_front(&task, 200).unwrap() {
        let norm: f64 = p.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn true_front_points_mutually_non_dominated() {
    for name in [
        "zdt1", "zdt2", "zdt3", "zdt4", "zdt6", "dtlz1", "dtlz2", "dtlz5", "dtlz7",
        "omni-test", "vlmop1", "vlmop2",
    ] {
        let task = TaskSpec::by_name(name).unwrap();
        let front = true_pareto_front(&task, 60).unwrap();
        for (i, a) in front.iter().enumerate() {
            for (j, b) in front.iter().enumerate() {
                if i != j {
                    assert!(
                        !pareto::dominates(a, b).unwrap(),
                        "{name}: front point {i} dominates {j}"
                    );
                }
            }
        }
    }
}

#[test]
fn true_front_unsupported_task() {
    let task = TaskSpec::by_name("vlmop3").unwrap();
    assert!(matches!(true_pareto_front(&task, 10), Err(Error::Unsupported(_))));
}

#[test]
fn front_preimages_weakly_non_dominated_by_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    // Spot-check: evaluate true-front preimages and compare against random
    // feasible points.
    for name in ["zdt1", "dtlz2"] {
        let task = TaskSpec::by_name(name).unwrap();
        let preimage = |f1: f64| -> Vec<f64> {
            let mut x = vec![0.0; task.dims];
            x[0] = f1;
            if name == "dtlz2" {
                for v in x.iter_mut().skip(2) {
                    *v = 0.5;
                }
            }
            x
        };
        let front_points: Vec<Vec<f64>> =
            [0.0, 0.3, 0.7, 1.0].iter().map(|&t| eval_named(name, &preimage(t))).collect();
        for _ in 0..10_000 {
            let x: Vec<f64> = (0..task.dims).map(|_| rng.random::<f64>()).collect();
            let y = eval_named(name, &x);
            for fp in &front_points {
                assert!(!pareto::dominates(&y, fp).unwrap(), "{name}: random point dominates front");
            }
        }
    }
}

#[test]
fn instance_generation_is_deterministic() {
    for kind in [InstanceKind::BiTsp, InstanceKind::BiCvrp, InstanceKind::BiKp, InstanceKind::Portfolio] {
        let n = kind.standard_sizes()[0];
        let a = generate_instance(kind, n, 1234, false).unwrap();
        let b = generate_instance(kind, n, 1234, false).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = generate_instance(kind, n, 1235, false).unwrap();
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }
}

#[test]
fn instance_size_guard() {
    assert!(generate_instance(InstanceKind::BiTsp, 17, 0, false).is_err());
    assert!(generate_instance(InstanceKind::BiTsp, 17, 0, true).is_ok());
}

#[test]
fn instance_invariants() {
    let inst = generate_instance(InstanceKind::BiCvrp, 20, 77, false).unwrap();
    let CombinatorialInstance::BiCvrp { customers, demands, capacity, .. } = &inst else {
        panic!()
    };
    assert!(customers.iter().all(|c| (0.0..=1.0).contains(&c[0]) && (0.0..=1.0).contains(&c[1])));
    assert!(demands.iter().all(|&d| d <= 9));
    assert_eq!(*capacity, 50.0);

    let inst = generate_instance(InstanceKind::BiKp, 50, 77, false).unwrap();
    let CombinatorialInstance::BiKp { capacity, .. } = &inst else { panic!() };
    assert_eq!(*capacity, 25.0);
}

#[test]
fn portfolio_covariance_admits_cholesky() {
    let inst = generate_instance(InstanceKind::Portfolio, 20, 31, false).unwrap();
    let CombinatorialInstance::Portfolio { covariance, n, .. } = &inst else { panic!() };
    // plain Cholesky factorization must succeed on a PSD matrix with jitter
    let n = *n;
    let mut l = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = covariance[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "diagonal pivot {i} not positive: {s}");
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            assert!((covariance[i][j] - covariance[j][i]).abs() < 1e-15, "asymmetric covariance");
        }
    }
}

#[test]
fn instance_json_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    for kind in [InstanceKind::BiTsp, InstanceKind::BiCvrp, InstanceKind::BiKp, InstanceKind::Portfolio] {
        let n = kind.standard_sizes()[0];
        let inst = generate_instance(kind, n, 999, false).unwrap();
        let path = dir.path().join("inst.json");
        inst.save(&path).unwrap();
        assert_eq!(CombinatorialInstance::load(&path).unwrap(), inst);
    }
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

#[test]
fn tsp_two_nodes_out_and_back() {
    let inst = generate_instance(InstanceKind::BiTsp, 2, 5, true).unwrap();
    let CombinatorialInstance::BiTsp { coords_a, coords_b, .. } = &inst else { panic!() };
    let f = mo_tsp_eval(&inst, &[0, 1]).unwrap();
    let d_a = ((coords_a[0][0] - coords_a[1][0]).powi(2) + (coords_a[0][1] - coords_a[1][1]).powi(2)).sqrt();
    let d_b = ((coords_b[0][0] - coords_b[1][0]).powi(2) + (coords_b[0][1] - coords_b[1][1]).powi(2)).sqrt();
    assert!((f[0] - 2.0 * d_a).abs() < 1e-12);
    assert!((f[1] - 2.0 * d_b).abs() < 1e-12);
}

#[test]
fn tsp_identical_coordinate_sets_give_equal_objectives() {
    let inst = generate_instance(InstanceKind::BiTsp, 20, 5, false).unwrap();
    let CombinatorialInstance::BiTsp { n, seed, coords_a, .. } = &inst else { panic!() };
    let same = CombinatorialInstance::BiTsp {
        n: *n,
        seed: *seed,
        coords_a: coords_a.clone(),
        coords_b: coords_a.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let f = mo_tsp_eval(&same, &random_perm(&mut rng, 20)).unwrap();
        assert_eq!(f[0], f[1]);
    }
}

#[test]
fn tsp_rotation_invariance() {
    let inst = generate_instance(InstanceKind::BiTsp, 20, 6, false).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let perm = random_perm(&mut rng, 20);
    let base = mo_tsp_eval(&inst, &perm).unwrap();
    for shift in 1..20 {
        let rotated: Vec<usize> = (0..20).map(|i| perm[(i + shift) % 20]).collect();
        let f = mo_tsp_eval(&inst, &rotated).unwrap();
        assert!((f[0] - base[0]).abs() < 1e-9 && (f[1] - base[1]).abs() < 1e-9);
    }
}

#[test]
fn tsp_malformed_permutation() {
    let inst = generate_instance(InstanceKind::BiTsp, 20, 6, false).unwrap();
    assert!(matches!(mo_tsp_eval(&inst, &[0; 20]), Err(Error::Domain(_))));
}

#[test]
fn kp_empty_prefix_and_full_fit() {
    let heavy = CombinatorialInstance::BiKp {
        n: 2,
        seed: 0,
        weights: vec![30.0, 40.0],
        values: vec![[1.0, 2.0], [3.0, 4.0]],
        capacity: 25.0,
    };
    assert_eq!(mo_kp_eval(&heavy, &[0, 1]).unwrap(), vec![-0.0, -0.0]);

    let light = CombinatorialInstance::BiKp {
        n: 3,
        seed: 0,
        weights: vec![1.0, 2.0, 3.0],
        values: vec![[1.0, 0.5], [2.0, 1.5], [3.0, 2.5]],
        capacity: 25.0,
    };
    assert_eq!(mo_kp_eval(&light, &[2, 0, 1]).unwrap(), vec![-6.0, -4.5]);
}

/// Direct prefix-scan oracle for the knapsack evaluation.
fn kp_oracle(weights: &[f64], values: &[[f64; 2]], capacity: f64, perm: &[usize]) -> Vec<f64> {
    let mut load = 0.0;
    let mut total = [0.0, 0.0];
    for &i in perm {
        load += weights[i];
        if load > capacity {
            break;
        }
        total[0] += values[i][0];
        total[1] += values[i][1];
    }
    vec![-total[0], -total[1]]
}

#[test]
fn kp_matches_prefix_oracle() {
    let inst = generate_instance(InstanceKind::BiKp, 50, 81, false).unwrap();
    let CombinatorialInstance::BiKp { weights, values, capacity, .. } = &inst else { panic!() };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let perm = random_perm(&mut rng, 50);
        assert_eq!(
            mo_kp_eval(&inst, &perm).unwrap(),
            kp_oracle(weights, values, *capacity, &perm)
        );
    }
}

#[test]
fn kp_prefix_load_never_exceeds_capacity() {
    let inst = generate_instance(InstanceKind::BiKp, 50, 82, false).unwrap();
    let CombinatorialInstance::BiKp { weights, capacity, .. } = &inst else { panic!() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let perm = random_perm(&mut rng, 50);
        // replicate the admitted prefix and check its load
        let mut load = 0.0;
        for &i in &perm {
            if load + weights[i] > *capacity {
                break;
            }
            load += weights[i];
        }
        assert!(load <= *capacity);
    }
}

#[test]
fn cvrp_single_route_when_total_demand_fits() {
    let inst = CombinatorialInstance::BiCvrp {
        n: 4,
        seed: 0,
        depot: [0.0, 0.0],
        customers: vec![[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]],
        demands: vec![9, 9, 9, 9],
        capacity: 50.0,
    };
    let f = mo_cvrp_eval(&inst, &[0, 1, 2, 3]).unwrap();
    assert_eq!(f[0], f[1], "single route: longest equals total");
}

#[test]
fn cvrp_zero_demands_single_route() {
    let inst = generate_instance(InstanceKind::BiCvrp, 20, 91, false).unwrap();
    let CombinatorialInstance::BiCvrp { n, seed, depot, customers, capacity, .. } = &inst else {
        panic!()
    };
    let zero = CombinatorialInstance::BiCvrp {
        n: *n,
        seed: *seed,
        depot: *depot,
        customers: customers.clone(),
        demands: vec![0; *n],
        capacity: *capacity,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = mo_cvrp_eval(&zero, &random_perm(&mut rng, 20)).unwrap();
    assert_eq!(f[0], f[1]);
}

/// Second, route-list-based implementation of the greedy capacity split.
fn cvrp_oracle(
    depot: [f64; 2],
    customers: &[[f64; 2]],
    demands: &[u32],
    capacity: f64,
    perm: &[usize],
) -> Vec<f64> {
    let mut routes: Vec<Vec<usize>> = vec![Vec::new()];
    let mut load = 0.0;
    for &c in perm {
        if load + demands[c] as f64 > capacity {
            routes.push(Vec::new());
            load = 0.0;
        }
        routes.last_mut().unwrap().push(c);
        load += demands[c] as f64;
    }
    let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut total = 0.0;
    let mut longest = 0.0f64;
    for route in routes.iter().filter(|r| !r.is_empty()) {
        let mut len = d(depot, customers[route[0]]);
        for w in route.windows(2) {
            len += d(customers[w[0]], customers[w[1]]);
        }
        len += d(customers[*route.last().unwrap()], depot);
        total += len;
        longest = longest.max(len);
    }
    vec![total, longest]
}

#[test]
fn cvrp_matches_independent_split_oracle() {
    let inst = generate_instance(InstanceKind::BiCvrp, 8, 92, true).unwrap();
    let CombinatorialInstance::BiCvrp { depot, customers, demands, capacity, .. } = &inst else {
        panic!()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let perm = random_perm(&mut rng, 8);
        let got = mo_cvrp_eval(&inst, &perm).unwrap();
        let want = cvrp_oracle(*depot, customers, demands, *capacity, &perm);
        assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
    }
}

#[test]
fn cvrp_route_loads_respect_capacity() {
    let inst = generate_instance(InstanceKind::BiCvrp, 20, 93, false).unwrap();
    let CombinatorialInstance::BiCvrp { demands, capacity, .. } = &inst else { panic!() };
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let perm = random_perm(&mut rng, 20);
        let mut load = 0.0;
        for &c in &perm {
            if load + demands[c] as f64 > *capacity {
                load = 0.0;
            }
            load += demands[c] as f64;
            assert!(load <= *capacity);
        }
    }
}

#[test]
fn portfolio_full_weight_on_one_asset() {
    let inst = generate_instance(InstanceKind::Portfolio, 20, 55, false).unwrap();
    let CombinatorialInstance::Portfolio { mean_returns, covariance, .. } = &inst else { panic!() };
    let mut w = vec![0.0; 20];
    w[7] = 1.0;
    let f = portfolio_eval(&inst, &w).unwrap();
    assert!((f[0] + mean_returns[7]).abs() < 1e-12);
    assert!((f[1] - covariance[7][7].sqrt()).abs() < 1e-12);
}

#[test]
fn portfolio_repair_renormalizes() {
    let w = portfolio_repair(&[0.2, 0.2], 0.001);
    assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    let uniform = portfolio_repair(&[0.0; 4], 0.001);
    assert!(uniform.iter().all(|&v| (v - 0.25).abs() < 1e-12));
}

#[test]
fn portfolio_repair_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let theta = PORTFOLIO_MIN_WEIGHT;
    for _ in 0..2000 {
        let n = rng.random_range(2..30usize);
        let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let repaired = portfolio_repair(&w, theta);
        let sum: f64 = repaired.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12, "sum {sum}");
        assert!(repaired.iter().all(|&v| v >= theta), "min below threshold: {repaired:?}");
    }
}

#[test]
fn evaluate_dispatch_requires_instance() {
    let task = TaskSpec::by_name("bi-tsp-20").unwrap();
    let g = Genotype::Permutation((0..20).collect());
    assert!(matches!(evaluate(&task, None, &g), Err(Error::Config(_))));
}
