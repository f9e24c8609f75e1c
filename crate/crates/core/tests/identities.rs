use ladderlab::local_times::{
    compute, compute_sparse, ladder_decomposition_total, verify_first_ladder_identities,
};
use ladderlab::rng::{path_stream, Domain};
use ladderlab::rwrsb::{cost_direct, cost_directional, cost_via_local_times};
use ladderlab::walk::{ladder_stats, simulate_to_ladder};
use ladderlab::{JumpLaw, PathRecord, SceneryLaw, SceneryRealization};

fn paths(law: &JumpLaw, ladders: usize, count: u64) -> impl Iterator<Item = PathRecord> + '_ {
    (0..count).filter_map(move |i| {
        let p =
            simulate_to_ladder(law, ladders, path_stream(11, Domain::Walk, i), 200_000).unwrap();
        (!p.truncated()).then_some(p)
    })
}

#[test]
fn first_ladder_identities_hold_exactly() {
    for law in [
        JumpLaw::simple_symmetric(),
        JumpLaw::zipf(0.7).unwrap(),
        JumpLaw::zipf(1.5).unwrap(),
    ] {
        let mut checked = 0;
        for p in paths(&law, 1, 2_000) {
            let r = verify_first_ladder_identities(&p).unwrap();
            assert!(r.passed(), "{:?}: {:?}", law.kind(), r.violations);
            checked += 1;
        }
        assert!(checked > 1_900);
    }
}

#[test]
fn windows_add_up() {
    let law = JumpLaw::zipf(1.5).unwrap();
    for p in paths(&law, 3, 300) {
        let n = p.len();
        let mid = n / 2;
        let whole = compute(&p, 0, n).unwrap();
        let merged = compute(&p, 0, mid)
            .unwrap()
            .merged(&compute(&p, mid, n).unwrap());
        let (lo, hi) = p.range();
        for k in lo..=hi + 1 {
            assert_eq!(whole.count(k), merged.count(k), "bond {k}");
            assert_eq!(whole.up(k), merged.up(k));
        }
        assert_eq!(
            whole.total_in(i64::MIN, i64::MAX),
            merged.total_in(i64::MIN, i64::MAX)
        );
    }
}

#[test]
fn dense_and_sparse_local_times_agree() {
    let law = JumpLaw::zipf(0.7).unwrap();
    for p in paths(&law, 2, 200) {
        let n = p.len();
        let a = compute(&p, 0, n).unwrap();
        let b = compute_sparse(&p, 0, n).unwrap();
        assert_eq!(a.total_nonpositive(), b.total_nonpositive());
        assert_eq!(a.total_positive(), b.total_positive());
        for r in a.runs() {
            assert_eq!(b.count(r.first), r.count());
            assert_eq!(b.count(r.last), r.count());
        }
    }
}

#[test]
fn ladder_decomposition_counts_excess_length() {
    let law = JumpLaw::zipf(1.5).unwrap();
    for p in paths(&law, 4, 300) {
        let stats = ladder_stats(&p).unwrap();
        for n in 1..=stats.count() {
            let total = ladder_decomposition_total(&p, &stats, n).unwrap();
            let excess =
                u128::from(stats.ladder_lengths[n - 1]) - stats.ladder_heights[n - 1] as u128;
            assert_eq!(total, excess, "ladder {n}");
        }
    }
}

#[test]
fn cost_routes_agree_on_integer_scenery() {
    let law = JumpLaw::simple_symmetric();
    for (i, p) in paths(&law, 3, 500).enumerate() {
        let seed = i as i64;
        let make = || {
            SceneryRealization::from_fns(
                move |k| ((k * 7 + seed).rem_euclid(13)) as f64,
                move |k| ((k * 5 - seed).rem_euclid(11)) as f64,
            )
        };
        let a = cost_direct(&p, &mut make()).unwrap();
        let b = cost_via_local_times(&p, &mut make()).unwrap();
        let c = cost_directional(&p, &mut make()).unwrap();
        assert_eq!(a.ladder_costs, b.ladder_costs);
        assert_eq!(a.ladder_costs, c.ladder_costs);
    }
}

#[test]
fn cost_routes_agree_on_float_scenery() {
    let law = JumpLaw::zipf(1.5).unwrap();
    let plus = SceneryLaw::pareto(1.5, 1.0).unwrap();
    let minus = SceneryLaw::pareto(0.7, 1.0).unwrap();
    for (i, p) in paths(&law, 3, 300).enumerate() {
        let make = || SceneryRealization::realize_indexed(plus.clone(), minus.clone(), 5, i as u64);
        let a = cost_direct(&p, &mut make()).unwrap();
        let b = cost_via_local_times(&p, &mut make()).unwrap();
        for (x, y) in a.ladder_costs.iter().zip(&b.ladder_costs) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
        }
    }
}
