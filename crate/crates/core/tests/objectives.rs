use geoswarm::geo::{GeoPoint, GeoRect};
use geoswarm::objectives::{
    self, facility_objective, product_mix_objective, FacilityInstance, ProductMixInstance,
};
use geoswarm::pso::{self, SwarmConfig};
use geoswarm_testkit::{grid_scan_facility, lp_vertex_optimum, random_points, SplitMix64};
use proptest::prelude::*;

fn textbook() -> ProductMixInstance {
    ProductMixInstance::new(
        vec![3.0, 5.0],
        vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
        vec![4.0, 12.0, 18.0],
    )
    .unwrap()
}

#[test]
fn textbook_lp_oracle_and_swarm() {
    let inst = textbook();
    let (x, opt) = lp_vertex_optimum(inst.profit(), inst.constraints(), inst.rhs()).unwrap();
    assert!((opt - 36.0).abs() < 1e-9);
    assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);

    let obj = product_mix_objective(&inst).unwrap();
    let out = pso::run(&SwarmConfig::for_objective(&obj).with_seed(0), &obj).unwrap();
    let profit = inst.objective_value(&out.best_position);
    assert!(profit >= 35.64, "profit {profit}");
    assert!(inst.max_violation(&out.best_position) < 1e-3);
}

fn lp_instance() -> impl Strategy<Value = ProductMixInstance> {
    (1usize..4, 1usize..4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(1.0..9.0f64, n),
            prop::collection::vec(prop::collection::vec(0.5..9.0f64, n), m),
            prop::collection::vec(1.0..9.0f64, m),
        )
            .prop_map(|(c, a, b)| ProductMixInstance::new(c, a, b).unwrap())
    })
}

proptest! {
    #[test]
    fn feasible_points_have_no_penalty(inst in lp_instance(), t in prop::collection::vec(0.0..1.0f64, 3)) {
        let obj = product_mix_objective(&inst).unwrap();
        // shrink a point of the search box until it satisfies every row
        let mut x: Vec<f64> = obj.bounds().iter().zip(&t).map(|((_, hi), t)| hi * t).collect();
        while inst.max_violation(&x) > 0.0 {
            x.iter_mut().for_each(|v| *v *= 0.5);
        }
        prop_assert_eq!(obj.evaluate(&x), -inst.objective_value(&x));
    }

    #[test]
    fn violations_raise_fitness_monotonically(inst in lp_instance(), d in 0usize..3, step in 0.01..5.0f64) {
        let obj = product_mix_objective(&inst).unwrap();
        let d = d % obj.dimension();
        let ub = obj.bounds()[d].1;
        let mut x = vec![0.0; obj.dimension()];
        // push one variable past its tightest cap, then further
        x[d] = ub + step;
        let f1 = obj.evaluate(&x) + inst.objective_value(&x);
        x[d] = ub + 2.0 * step;
        let f2 = obj.evaluate(&x) + inst.objective_value(&x);
        prop_assert!(f1 > 0.0);
        prop_assert!(f2 > f1);
        // negative values are penalised too
        let mut y = vec![0.0; obj.dimension()];
        y[d] = -step;
        prop_assert!(obj.evaluate(&y) > -inst.objective_value(&y));
    }

    #[test]
    fn facility_cost_ignores_facility_order(seed in any::<u64>(), k in 2usize..5) {
        let mut rng = SplitMix64(seed);
        let region = GeoRect::new(10.0, 10.0, 12.0, 12.0).unwrap();
        let customers: Vec<GeoPoint> = random_points(&mut rng, &region, 30).into_iter().map(|(_, p)| p).collect();
        let inst = FacilityInstance::new(customers, k, region).unwrap();
        let obj = facility_objective(&inst);
        let x: Vec<f64> = (0..k).flat_map(|_| [rng.range(10.0, 12.0), rng.range(10.0, 12.0)]).collect();
        let mut rotated = x.clone();
        rotated.rotate_left(2);
        prop_assert_eq!(obj.evaluate(&x), obj.evaluate(&rotated));
    }
}

#[test]
fn one_facility_per_customer_costs_nothing() {
    let mut rng = SplitMix64(8);
    let region = GeoRect::new(0.0, 0.0, 1.0, 1.0).unwrap();
    let customers: Vec<GeoPoint> = random_points(&mut rng, &region, 4)
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    let inst = FacilityInstance::new(customers.clone(), 5, region).unwrap();
    let mut x: Vec<f64> = customers.iter().flat_map(|c| [c.lon(), c.lat()]).collect();
    x.extend([0.5, 0.5]);
    assert_eq!(facility_objective(&inst).evaluate(&x), 0.0);
}

#[test]
fn symmetric_corners_pull_to_centre() {
    let d = 0.01;
    let customers: Vec<GeoPoint> = [(-d, -d), (d, -d), (d, d), (-d, d)]
        .iter()
        .map(|&(lon, lat)| GeoPoint::new(lon, lat).unwrap())
        .collect();
    let inst = FacilityInstance::new(
        customers,
        1,
        GeoRect::new(-0.05, -0.05, 0.05, 0.05).unwrap(),
    )
    .unwrap();
    let obj = facility_objective(&inst);
    let out = pso::run(&SwarmConfig::for_objective(&obj).with_seed(17), &obj).unwrap();
    assert!(
        out.best_position[0].abs() < 1e-3 && out.best_position[1].abs() < 1e-3,
        "{:?}",
        out.best_position
    );
}

#[test]
fn single_facility_close_to_grid_scan() {
    let mut rng = SplitMix64(99);
    for _ in 0..3 {
        let lon0 = rng.range(-120.0, 120.0);
        let lat0 = rng.range(-60.0, 60.0);
        let region = GeoRect::new(lon0, lat0, lon0 + 1.0, lat0 + 1.0).unwrap();
        let customers: Vec<GeoPoint> = random_points(&mut rng, &region, 50)
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        let (_, oracle) = grid_scan_facility(&customers, &region, 200);
        let inst = FacilityInstance::new(customers, 1, region).unwrap();
        let obj = facility_objective(&inst);
        let out = pso::run(
            &SwarmConfig::for_objective(&obj)
                .with_seed(1)
                .with_max_iterations(300),
            &obj,
        )
        .unwrap();
        assert!(
            out.best_fitness <= 1.005 * oracle,
            "{} vs {}",
            out.best_fitness,
            oracle
        );
    }
}

#[test]
fn rastrigin_is_solved_in_low_dimension() {
    let obj = objectives::rastrigin(2);
    let best = (0..5)
        .map(|s| {
            pso::run(&SwarmConfig::for_objective(&obj).with_seed(s), &obj)
                .unwrap()
                .best_fitness
        })
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1e-6, "{best}");
}
