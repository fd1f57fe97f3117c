use proptest::prelude::*;
use rand::SeedableRng;

use stitlab_core::processes::mecke::mecke_continuous_simulate;
use stitlab_core::processes::stit::stit_simulate;
use stitlab_core::processes::{read_trace_jsonl, write_trace_jsonl, StopRule};
use stitlab_core::rng::SimRng;
use stitlab_core::{ConvexPolygon, DirectionAtom, LineMeasure, Point};

fn polygon() -> impl Strategy<Value = ConvexPolygon> {
    (prop::collection::vec(0.0..std::f64::consts::TAU, 3..10), 0.1f64..5.0, -3.0f64..3.0, -3.0f64..3.0)
        .prop_filter_map("degenerate", |(mut a, r, cx, cy)| {
            a.sort_by(f64::total_cmp);
            ConvexPolygon::new(a.iter().map(|t| Point::new(cx + r * t.cos(), cy + r * t.sin())).collect()).ok()
        })
}

/// Width as the spread of vertex projections onto the line normal.
fn width_oracle(poly: &ConvexPolygon, theta: f64) -> f64 {
    let proj: Vec<f64> = poly
        .vertices()
        .iter()
        .map(|v| -v.x * theta.sin() + v.y * theta.cos())
        .collect();
    proj.iter().copied().fold(f64::MIN, f64::max) - proj.iter().copied().fold(f64::MAX, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn width_matches_projection_spread(poly in polygon(), theta in 0.0..std::f64::consts::PI) {
        let w = poly.width(theta);
        prop_assert!((w - width_oracle(&poly, theta)).abs() <= 1e-12 * poly.diameter());
    }

    #[test]
    fn isotropic_hitting_measure_is_mean_width(poly in polygon(), scale in 0.1f64..4.0) {
        let m = LineMeasure::isotropic(scale).unwrap();
        let steps = 20_000;
        let h = std::f64::consts::PI / steps as f64;
        let integral: f64 = (0..steps).map(|i| width_oracle(&poly, (i as f64 + 0.5) * h)).sum::<f64>() * h;
        let got = m.hitting_measure(&poly);
        prop_assert!((got - scale * integral).abs() <= 1e-6 * got, "{} vs {}", got, scale * integral);
    }

    #[test]
    fn direction_measure_sums_weighted_widths(poly in polygon(), t1 in 0.0..3.1f64, w1 in 0.1f64..3.0, w2 in 0.1f64..3.0) {
        let atoms = vec![DirectionAtom { theta: 0.0, weight: w1 }, DirectionAtom { theta: t1 + 0.02, weight: w2 }];
        let m = LineMeasure::directions(atoms).unwrap();
        let want = w1 * width_oracle(&poly, 0.0) + w2 * width_oracle(&poly, t1 + 0.02);
        prop_assert!((m.hitting_measure(&poly) - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn traces_round_trip(seed in any::<u64>(), jumps in 0usize..40) {
        let w = ConvexPolygon::unit_triangle();
        let m = LineMeasure::isotropic(2.0).unwrap();
        let trace = stit_simulate(&w, &m, StopRule::MaxJumps(jumps), seed, &mut SimRng::seed_from_u64(seed)).unwrap();
        let mut buf = Vec::new();
        write_trace_jsonl(&trace, &mut buf).unwrap();
        let back = read_trace_jsonl(buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &trace);
        prop_assert_eq!(back.final_cells().unwrap().len(), jumps + 1);
    }
}

#[test]
fn mecke_trace_round_trips_with_empty_slots() {
    let w = ConvexPolygon::unit_square();
    let m = LineMeasure::isotropic(1.0).unwrap();
    let (state, trace) = mecke_continuous_simulate(&w, &m, 1.5, 4, &mut SimRng::seed_from_u64(4)).unwrap();
    let mut buf = Vec::new();
    write_trace_jsonl(&trace, &mut buf).unwrap();
    let back = read_trace_jsonl(buf.as_slice()).unwrap();
    assert_eq!(back, trace);
    assert_eq!(back.final_cells().unwrap().len(), state.cell_count());
    let area: f64 = back.final_cells().unwrap().iter().map(|c| c.area()).sum();
    assert!((area - 1.0).abs() < 1e-12);
}
