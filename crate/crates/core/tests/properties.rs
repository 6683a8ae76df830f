//! Property and invariant checks across module boundaries.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use odsage::baselines::RidgeModel;
use odsage::eval::{build_report, scenario_masks, ScenarioSpec};
use odsage::features::{
    assemble_dataset, observed_demand, reliability_features, target, FeatureOptions, SampleSet,
};
use odsage::graphs::{
    build_graph_set, dtw_distance, fft_distance, temporal_distance_matrix, DistanceKind,
    GraphConfig, GraphSet, OdGraph, TemporalMethod,
};
use odsage::model::{
    aggregate, init_model, train, Aggregation, MGraphSage, Neighborhood, TrainConfig,
};
use odsage::network::{
    enumerate_od_pairs, node_id_encoding, IdEncoding, Network, PairMode, SyntheticLayout,
};
use odsage::simulator::{
    disruption_index, simulate, SimConfig, SimParams, TrainLog, TripEvent, TripLog,
};
use odsage::time::{is_weekday, midnight, ServiceCalendar, SLOTS_PER_DAY};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn layout(trunk: usize, branches: usize, extra: usize, seed: u64) -> SyntheticLayout {
    SyntheticLayout {
        n_stations: trunk + 2 * branches + extra,
        trunk_len: trunk,
        branches_per_side: branches,
        seed,
        ..SyntheticLayout::default()
    }
}

fn all_pairs_network(layout: &SyntheticLayout) -> Network {
    let net = layout.build().unwrap();
    let pairs = enumerate_od_pairs(&net, PairMode::AllPairs, None).unwrap();
    net.with_od_pairs(pairs).unwrap()
}

fn small_sim(days: usize, seed: u64) -> (Network, TripLog, TrainLog, ServiceCalendar) {
    let net = all_pairs_network(&layout(3, 1, 3, 5));
    let params = SimParams {
        n_days: days,
        ..SimParams::default()
    };
    let cfg = SimConfig::from_params(&params, &net, seed).unwrap();
    let (trips, trains) = simulate(&cfg, &net).unwrap();
    (net, trips, trains, cfg.calendar())
}

fn shared_sim() -> &'static (Network, TripLog, TrainLog, ServiceCalendar) {
    static SIM: OnceLock<(Network, TripLog, TrainLog, ServiceCalendar)> = OnceLock::new();
    SIM.get_or_init(|| small_sim(3, 11))
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let (mut va, mut vb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma).powi(2);
        vb += (y - mb).powi(2);
    }
    cov / (va * vb).sqrt()
}

// ---------------------------------------------------------------- network

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn all_pairs_has_s_times_s_minus_one_distinct_pairs(
        trunk in 2usize..6, branches in 1usize..3, extra in 0usize..12, seed in 0u64..100,
    ) {
        let net = layout(trunk, branches, extra, seed).build().unwrap();
        let s = net.n_stations();
        let pairs = enumerate_od_pairs(&net, PairMode::AllPairs, None).unwrap();
        prop_assert_eq!(pairs.len(), s * (s - 1));
        let distinct: HashSet<(usize, usize)> = pairs.iter().map(|p| (p.origin, p.destination)).collect();
        prop_assert_eq!(distinct.len(), pairs.len());
        for (i, p) in pairs.iter().enumerate() {
            prop_assert_eq!(p.index, i);
            prop_assert_ne!(p.origin, p.destination);
        }
    }

    #[test]
    fn signed_station_encoding_is_injective(trunk in 2usize..5, extra in 0usize..10) {
        let net = all_pairs_network(&layout(trunk, 1, extra, 3));
        let codes: HashSet<Vec<i8>> = net
            .od_pairs()
            .iter()
            .map(|od| node_id_encoding(od, &net, IdEncoding::SignedStation).iter().map(|v| *v as i8).collect())
            .collect();
        prop_assert_eq!(codes.len(), net.od_pairs().len());
    }

    #[test]
    fn top_k_is_a_deterministic_subset(
        trips in prop::collection::vec((0usize..7, 0usize..7), 0..300), k in 1usize..42,
    ) {
        let net = layout(3, 1, 2, 1).build().unwrap();
        prop_assume!(net.n_stations() == 7);
        let log = TripLog::new(
            trips
                .iter()
                .filter(|(o, d)| o != d)
                .enumerate()
                .map(|(i, &(o, d))| TripEvent { origin: o, destination: d, tap_in: i as i64, tap_out: i as i64 + 60 })
                .collect(),
        );
        let all: HashSet<(usize, usize)> = enumerate_od_pairs(&net, PairMode::AllPairs, None)
            .unwrap()
            .iter()
            .map(|p| (p.origin, p.destination))
            .collect();
        let a = enumerate_od_pairs(&net, PairMode::TopKByMeanDemand(k), Some(&log)).unwrap();
        let b = enumerate_od_pairs(&net, PairMode::TopKByMeanDemand(k), Some(&log)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), k);
        let count = |o: usize, d: usize| log.events().iter().filter(|t| t.origin == o && t.destination == d).count();
        for w in a.windows(2) {
            prop_assert!(count(w[0].origin, w[0].destination) >= count(w[1].origin, w[1].destination));
        }
        for p in &a {
            prop_assert!(all.contains(&(p.origin, p.destination)));
        }
    }
}

// ---------------------------------------------------------------- simulator

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn trips_fall_in_the_weekday_morning_window(seed in any::<u64>()) {
        let (_, trips, _, _) = small_sim(6, seed);
        prop_assert!(!trips.is_empty());
        for t in trips.events() {
            let date = chrono::DateTime::from_timestamp(t.tap_in, 0).unwrap().date_naive();
            prop_assert!(is_weekday(date));
            let secs = t.tap_in - midnight(date);
            prop_assert!((5 * 3600..12 * 3600).contains(&secs), "tap-in at {secs}s");
            prop_assert!(t.tap_out > t.tap_in);
        }
    }
}

#[test]
fn disruption_lowers_expected_demand() {
    let net = all_pairs_network(&layout(2, 1, 0, 9));
    let base = SimParams {
        n_days: 1000,
        episode_prob: 0.5,
        ..SimParams::default()
    };
    let mean_disrupted = |elasticity: f64| {
        let params = SimParams {
            reliability_elasticity: elasticity,
            ..base.clone()
        };
        let cfg = SimConfig::from_params(&params, &net, 21).unwrap();
        let (trips, trains) = simulate(&cfg, &net).unwrap();
        let cal = cfg.calendar();
        let s = net.n_stations();
        let mut counts = vec![0u64; cal.n_global_slots() * s];
        for t in trips.events() {
            let iv = cal.locate(t.tap_in).unwrap();
            counts[cal.global_slot(&iv).unwrap() * s + t.origin] += 1;
        }
        let (mut total, mut windows) = (0u64, 0u64);
        for g in 0..cal.n_global_slots() {
            let start = cal.from_global_slot(g).start();
            for st in 0..s {
                if disruption_index(&trains, st, start) > 0.5 {
                    total += counts[g * s + st];
                    windows += 1;
                }
            }
        }
        assert!(windows > 500, "only {windows} disrupted windows");
        total as f64 / windows as f64
    };
    let coupled = mean_disrupted(-0.8);
    let uncoupled = mean_disrupted(0.0);
    assert!(coupled < uncoupled, "{coupled} vs {uncoupled}");
}

#[test]
fn same_community_ods_are_more_correlated() {
    let net = all_pairs_network(&layout(6, 2, 6, 4));
    let params = SimParams {
        n_days: 80,
        demand_scale: 6.0,
        episode_prob: 0.0,
        ..SimParams::default()
    };
    let cfg = SimConfig::from_params(&params, &net, 8).unwrap();
    let (trips, _) = simulate(&cfg, &net).unwrap();
    let cal = cfg.calendar();
    let s = net.n_stations();
    let mut daily = vec![vec![0.0; cal.len()]; s * s];
    for t in trips.events() {
        let iv = cal.locate(t.tap_in).unwrap();
        daily[t.origin * s + t.destination][cal.day_index(iv.date).unwrap()] += 1.0;
    }
    let comm = &cfg.community;
    let intra: Vec<(usize, usize)> = net
        .od_pairs()
        .iter()
        .filter(|p| comm[p.origin] == comm[p.destination])
        .map(|p| (p.origin, p.destination))
        .collect();
    let cross: Vec<(usize, usize)> = net
        .od_pairs()
        .iter()
        .filter(|p| comm[p.origin] != comm[p.destination])
        .map(|p| (p.origin, p.destination))
        .collect();
    assert!(intra.len() >= 2, "layout has no multi-station community");
    let mean_corr = |pairs: &[((usize, usize), (usize, usize))]| {
        let v: Vec<f64> = pairs
            .iter()
            .map(|&((o1, d1), (o2, d2))| correlation(&daily[o1 * s + d1], &daily[o2 * s + d2]))
            .filter(|c| c.is_finite())
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let mut same = Vec::new();
    for (i, a) in intra.iter().enumerate() {
        for b in &intra[i + 1..] {
            if comm[a.0] == comm[b.0] && a.0 != b.0 {
                same.push((*a, *b));
            }
        }
    }
    let mut other = Vec::new();
    for (i, a) in cross.iter().enumerate().step_by(3) {
        for b in cross[i + 1..].iter().step_by(7) {
            if a.0 != b.0 {
                other.push((*a, *b));
            }
        }
    }
    assert!(!same.is_empty());
    let (c_same, c_other) = (mean_corr(&same), mean_corr(&other));
    assert!(c_same > c_other, "intra {c_same:.3} vs cross {c_other:.3}");
}

// ---------------------------------------------------------------- features

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn late_prediction_sees_the_complete_target(od_i in 0usize..72, day in 0usize..3, slot in 0usize..SLOTS_PER_DAY) {
        let (net, trips, _, cal) = shared_sim();
        let od = &net.od_pairs()[od_i % net.od_pairs().len()];
        let iv = cal.interval(day, slot);
        let horizon = iv.end() + 24 * 3600;
        let obs = observed_demand(trips, od, &iv, horizon).unwrap();
        prop_assert_eq!(obs.p, 0);
        prop_assert_eq!(obs.d, target(trips, od, &iv));
        prop_assert_eq!(obs.x, obs.d + obs.p);
    }

    #[test]
    fn reliability_features_are_well_formed(od_i in 0usize..72, minutes in 0i64..(7 * 60)) {
        let (net, _, trains, cal) = shared_sim();
        let od = &net.od_pairs()[od_i % net.od_pairs().len()];
        let t = midnight(cal.days()[1]) + 5 * 3600 + minutes * 60;
        let r = reliability_features(trains, od, t, net);
        for v in r {
            prop_assert!(v >= 0.0 && v.is_finite());
        }
        for k in [4, 5, 10, 11] {
            prop_assert!(r[k] <= 1.0);
        }
        for pair in r.chunks(2) {
            prop_assert!(pair[0] <= pair[1] + 1e-12, "mean {} above max {}", pair[0], pair[1]);
        }
    }
}

#[test]
fn feature_assembly_is_deterministic() {
    let (net, trips, trains, cal) = shared_sim();
    let opts = FeatureOptions::raw(IdEncoding::OnehotOd);
    let a = assemble_dataset(trips, trains, net, cal, &opts).unwrap();
    let b = assemble_dataset(trips, trains, net, cal, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.layout.column_names(), b.layout.column_names());
    let names = a.layout.column_names();
    assert_eq!(names.len(), a.layout.width());
    assert_eq!(names.iter().collect::<HashSet<_>>().len(), names.len());
}

// ---------------------------------------------------------------- graphs

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_distances_are_nonnegative_with_zero_self_distance(
        a in prop::collection::vec(-10.0f64..10.0, 1..40),
        b in prop::collection::vec(-10.0f64..10.0, 1..40),
    ) {
        prop_assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        prop_assert!(dtw_distance(&a, &b).unwrap() >= 0.0);
        prop_assert_eq!(dtw_distance(&a, &b).unwrap(), dtw_distance(&b, &a).unwrap());
        prop_assert_eq!(fft_distance(&a, &a).unwrap(), 0.0);
        let n = a.len().min(b.len());
        prop_assert!(fft_distance(&a[..n], &b[..n]).unwrap() >= 0.0);
    }

    #[test]
    fn temporal_matrices_are_symmetric(
        series in prop::collection::vec(prop::collection::vec(0.0f64..30.0, 12), 2..12),
    ) {
        for method in [TemporalMethod::Dtw, TemporalMethod::Fft] {
            let d = temporal_distance_matrix(&series, method).unwrap();
            prop_assert!(d.is_symmetric());
        }
    }
}

#[test]
fn four_graphs_share_the_vertex_set() {
    let (net, trips, _, cal) = shared_sim();
    let index = odsage::features::TripIndex::new(trips, cal);
    let days: BTreeSet<_> = cal.days().iter().copied().collect();
    let series = index.demand_series(net, &days);
    let (set, metas) = build_graph_set(net, &series, &GraphConfig::default()).unwrap();
    for (g, m) in set.graphs.iter().zip(&metas) {
        assert_eq!(g.n(), net.od_pairs().len());
        assert_eq!(m.n, g.n());
        assert!(g.edges().iter().all(|e| e.src < e.dst && e.dst < g.n()));
    }
}

// ---------------------------------------------------------------- model

fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> OdGraph {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|_| rng.random_bool(p))
        .collect();
    OdGraph::from_pairs(n, DistanceKind::Centroid, &pairs).unwrap()
}

fn random_graphs(n: usize, p: f64, rng: &mut ChaCha8Rng) -> GraphSet {
    GraphSet::new(std::array::from_fn(|_| random_graph(n, p, rng))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn aggregation_ignores_neighbour_order(seed in any::<u64>(), n in 1usize..10, k in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
        let lists: Vec<Vec<usize>> = (0..n).map(|_| (0..k).map(|_| rng.random_range(0..n)).collect()).collect();
        let mut shuffled = lists.clone();
        for l in &mut shuffled {
            l.shuffle(&mut rng);
        }
        let a = aggregate(h.view(), &Neighborhood::from_lists(&lists));
        let b = aggregate(h.view(), &Neighborhood::from_lists(&shuffled));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn far_vertices_do_not_reach_the_output(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 16;
        let graphs = random_graphs(n, 0.04, &mut rng);
        let model = MGraphSage::new(4, 3, seed);
        let x = Array2::from_shape_fn((n, 4), |_| rng.random_range(-1.0..1.0));
        let base = model.predict(x.view(), &graphs, Aggregation::Full, 0).unwrap();
        let dist = hops_in_union(&graphs, 0);
        prop_assume!(dist.iter().any(|&d| d >= 3 && d != usize::MAX));
        for u in (0..n).filter(|&u| dist[u] >= 3) {
            let mut x2 = x.clone();
            x2.row_mut(u).mapv_inplace(|v| v + 5.0);
            let out = model.predict(x2.view(), &graphs, Aggregation::Full, 0).unwrap();
            prop_assert_eq!(out[0].to_bits(), base[0].to_bits());
        }
    }
}

/// Hop distance from `src` when any of the four graphs may be used.
fn hops_in_union(graphs: &GraphSet, src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graphs.n()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for g in &graphs.graphs {
            for &u in g.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    dist
}

#[test]
fn trained_model_runs_on_a_larger_unseen_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, width) = (8, 6);
    let graphs = random_graphs(n, 0.4, &mut rng);
    let samples: Vec<SampleSet> = (0..6)
        .map(|i| {
            let features = Array2::from_shape_fn((n, width), |_| rng.random_range(-1.0..1.0));
            let targets = features.column(0).mapv(|v| 2.0 * v + 1.0);
            SampleSet {
                features,
                targets,
                interval: ServiceCalendar::weekdays_from(
                    chrono::NaiveDate::from_ymd_opt(2021, 2, 1).unwrap(),
                    1,
                )
                .interval(0, i + 8),
                prediction_time: 0,
            }
        })
        .collect();
    let refs: Vec<&SampleSet> = samples.iter().collect();
    let config = TrainConfig {
        hidden: 4,
        sample_sizes: [3, 3],
        epochs: 2,
        seed: 1,
        ..TrainConfig::default()
    };
    let mut model = init_model(&refs, &config).unwrap();
    train(&mut model, &refs, &graphs, &config).unwrap();

    let bigger = random_graphs(3 * n, 0.2, &mut rng);
    let x = Array2::from_shape_fn((3 * n, width), |_| rng.random_range(-1.0..1.0));
    for agg in [Aggregation::Full, Aggregation::Sampled([3, 3])] {
        let out = model.predict(x.view(), &bigger, agg, 2).unwrap();
        assert_eq!(out.len(), 3 * n);
        assert!(out.iter().all(|v| v.is_finite()));
    }
}

// ---------------------------------------------------------------- baselines / eval

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ridge_without_penalty_matches_least_squares(seed in any::<u64>(), rows in 8usize..40, cols in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((rows, cols), |_| rng.random_range(-2.0..2.0));
        let y = Array1::from_shape_fn(rows, |_| rng.random_range(-3.0..3.0));
        let model = RidgeModel::fit(x.view(), y.view(), 0.0).unwrap();

        let a = DMatrix::from_fn(rows, cols + 1, |i, j| if j < cols { x[[i, j]] } else { 1.0 });
        let b = DVector::from_iterator(rows, y.iter().copied());
        let sol = a.svd(true, true).solve(&b, 1e-12).unwrap();
        for j in 0..cols {
            prop_assert!((model.weights[j] - sol[j]).abs() < 1e-8, "w{j}: {} vs {}", model.weights[j], sol[j]);
        }
        prop_assert!((model.intercept - sol[cols]).abs() < 1e-8);
    }
}

#[test]
fn scenario_masks_ignore_predictions() {
    let (net, trips, trains, cal) = shared_sim();
    let ds = assemble_dataset(
        trips,
        trains,
        net,
        cal,
        &FeatureOptions::raw(IdEncoding::OnehotOd),
    )
    .unwrap();
    let samples: Vec<&SampleSet> = ds.samples.iter().collect();
    let specs = ScenarioSpec::standard();
    let masks = scenario_masks(trains, net, &samples, &specs);
    assert_eq!(masks, scenario_masks(trains, net, &samples, &specs));
    let truth: Vec<f64> = samples.iter().flat_map(|s| s.targets.to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noisy: Vec<f64> = truth
        .iter()
        .map(|t| t + rng.random_range(-2.0..2.0))
        .collect();
    let scenarios: Vec<(ScenarioSpec, Vec<bool>)> = specs.into_iter().zip(masks).collect();
    let r1 = build_report(
        &[("a".into(), truth.clone()), ("b".into(), noisy.clone())],
        &truth,
        &scenarios,
    )
    .unwrap();
    let r2 = build_report(
        &[("a".into(), noisy), ("b".into(), truth.clone())],
        &truth,
        &scenarios,
    )
    .unwrap();
    let counts = |r: &odsage::eval::EvalReport| {
        r.rows
            .iter()
            .map(|m| (m.scenario.clone(), m.n))
            .collect::<BTreeSet<_>>()
    };
    assert_eq!(counts(&r1), counts(&r2));
}
