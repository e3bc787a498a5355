mod common;

use depthedge::extract::{
    canny_depth_edges, depth_gradient, gt_from_panoptic, hysteresis, CannyConfig, PanopticMap,
};
use depthedge::{DepthMap, Grid};
use proptest::prelude::*;

/// Piecewise-constant depth made of vertical and horizontal steps plus a
/// slanted plane, with a few holes.
fn scene(h: usize, w: usize, steps: &[(bool, usize, f64)], holes: &[(usize, usize)]) -> DepthMap {
    let mut d = DepthMap::from_fn(h, w, |r, c| {
        let mut z = 10.0 + 0.3 * r as f64 + 0.1 * c as f64;
        for &(vertical, at, jump) in steps {
            let pos = if vertical { c } else { r };
            if pos > at {
                z += jump;
            }
        }
        z
    })
    .unwrap();
    for &(r, c) in holes {
        if r < h && c < w {
            d = DepthMap::new(
                d.values().clone(),
                Grid::from_fn(h, w, |rr, cc| d.is_valid(rr, cc) && (rr, cc) != (r, c)),
            )
            .unwrap();
        }
    }
    d
}

fn scene_strategy() -> impl Strategy<Value = DepthMap> {
    (
        6usize..20,
        6usize..20,
        prop::collection::vec((any::<bool>(), 0usize..20, -30.0f64..30.0), 0..4),
        prop::collection::vec((0usize..20, 0usize..20), 0..3),
    )
        .prop_map(|(h, w, steps, holes)| scene(h, w, &steps, &holes))
}

fn quantized_axis(theta: f64) -> (isize, isize) {
    // gradient direction snapped to one of the four neighbour axes
    let a = theta.rem_euclid(std::f64::consts::PI);
    let k = ((a / (std::f64::consts::PI / 4.0)).round() as usize) % 4;
    [(0, 1), (1, 1), (1, 0), (1, -1)][k]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn canny_output_is_thin(d in scene_strategy()) {
        let edges = canny_depth_edges(&d, &CannyConfig::new(4.0, 5.0)).unwrap();
        let g = depth_gradient(&d).unwrap();
        for (r, c) in edges.pixels() {
            let (dr, dc) = quantized_axis(*g.direction.get(r, c));
            if dr != 0 && dc != 0 {
                continue;
            }
            // neighbours count only when they sit on the same line, i.e. share
            // the quantized axis; at junctions another line may pass through
            let on_line = |rr: isize, cc: isize| {
                edges.mask().get_signed(rr, cc).copied().unwrap_or(false)
                    && quantized_axis(*g.direction.get(rr as usize, cc as usize)) == (dr, dc)
            };
            let fwd = on_line(r as isize + dr, c as isize + dc);
            let back = on_line(r as isize - dr, c as isize - dc);
            prop_assert!(!(fwd && back), "thick edge at ({}, {})", r, c);
        }
    }

    #[test]
    fn raising_th_high_never_adds(d in scene_strategy(), low in 0.5f64..6.0, a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let (h1, h2) = (low + a.min(b), low + a.max(b));
        let e1 = canny_depth_edges(&d, &CannyConfig::new(low, h1)).unwrap();
        let e2 = canny_depth_edges(&d, &CannyConfig::new(low, h2)).unwrap();
        for p in e2.pixels() {
            prop_assert!(e1.contains(p.0, p.1));
        }
    }

    #[test]
    fn lowering_th_low_never_removes(d in scene_strategy(), high in 1.0f64..8.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (l1, l2) = (high * a.min(b), high * a.max(b));
        let lo = canny_depth_edges(&d, &CannyConfig::new(l1, high)).unwrap();
        let hi = canny_depth_edges(&d, &CannyConfig::new(l2, high)).unwrap();
        for p in hi.pixels() {
            prop_assert!(lo.contains(p.0, p.1));
        }
    }

    #[test]
    fn zero_hysteresis_keeps_everything(h in 1usize..12, w in 1usize..12, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let score = Grid::from_fn(h, w, |_, _| rand::Rng::random_range(&mut r, 0.0..1.0));
        prop_assert_eq!(hysteresis(&score, 0.0, 0.0).unwrap().len(), h * w);
    }

    #[test]
    fn panoptic_relabel_invariance(
        h in 2usize..12,
        w in 2usize..12,
        seed in any::<u64>(),
        gaps in prop::collection::vec(1u32..50, 6),
    ) {
        let mut r = common::rng(seed);
        let seg = Grid::from_fn(h, w, |_, _| rand::Rng::random_range(&mut r, 0u32..6));
        let class = seg.map(|s| s % 3);
        // strictly increasing relabelling of segment ids
        let mut table = Vec::new();
        let mut acc = 0;
        for g in &gaps {
            acc += g;
            table.push(acc);
        }
        let relabeled = seg.map(|&s| table[s as usize]);
        let excluded = vec![(0, 1)];
        let a = gt_from_panoptic(&PanopticMap::new(seg, class.clone(), excluded.clone()).unwrap());
        let b = gt_from_panoptic(&PanopticMap::new(relabeled, class, excluded).unwrap());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn extraction_is_deterministic_across_thread_counts() {
    let maps: Vec<DepthMap> = (0..8)
        .map(|k| scene(24, 24, &[(true, 5 + k, 12.0), (false, 11, -9.0)], &[(3, k)]))
        .collect();
    let run = |t| {
        depthedge::par::with_threads(Some(t), || {
            depthedge::par::map_ordered(&maps, |d| canny_depth_edges(d, &CannyConfig::default()).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}
