mod common;

use depthedge::loss::{total_loss, EdbConfig, LossConfig};
use depthedge::DepthMap;

const H: f64 = 1e-3;

fn loss_at(pred: &DepthMap, inst: &common::LossInstance, cfg: &LossConfig, edb: &EdbConfig) -> f64 {
    total_loss(
        std::slice::from_ref(pred),
        std::slice::from_ref(&inst.gt_depth),
        std::slice::from_ref(&inst.gt_edges),
        cfg,
        edb,
    )
    .unwrap()
    .total
}

/// Max relative error between the analytic gradient and central finite
/// differences, over pixels with |analytic| > 1e-6.
pub fn gradient_check(seed: u64) -> (f64, usize) {
    let inst = common::loss_instance(seed, 16);
    let cfg = LossConfig {
        alpha: 0.1,
        num_scales: 1,
        ..LossConfig::default()
    };
    let edb = EdbConfig::default();
    let out = total_loss(
        std::slice::from_ref(&inst.pred),
        std::slice::from_ref(&inst.gt_depth),
        std::slice::from_ref(&inst.gt_edges),
        &cfg,
        &edb,
    )
    .unwrap();
    let grad = &out.grad_wrt_depth[0];
    let mut worst = 0.0f64;
    let mut checked = 0;
    for r in 0..16 {
        for c in 0..16 {
            let v = inst.pred.get(r, c).unwrap();
            let plus = loss_at(&inst.pred.with_value(r, c, v + H).unwrap(), &inst, &cfg, &edb);
            let minus = loss_at(&inst.pred.with_value(r, c, v - H).unwrap(), &inst, &cfg, &edb);
            let numeric = (plus - minus) / (2.0 * H);
            let analytic = *grad.get(r, c);
            if analytic.abs() > 1e-6 {
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs());
                worst = worst.max(rel);
                checked += 1;
            }
        }
    }
    (worst, checked)
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    for seed in 0..10 {
        let (worst, checked) = gradient_check(seed);
        assert!(checked > 50, "seed {seed}: only {checked} pixels checked");
        assert!(worst < 1e-3, "seed {seed}: max rel err {worst}");
    }
}

#[test]
fn multiscale_gradient_matches_finite_differences() {
    use depthedge::loss::{depth_pyramid, edge_pyramid};
    let inst = common::loss_instance(99, 16);
    let cfg = LossConfig {
        alpha: 1.0,
        num_scales: 2,
        ..LossConfig::default()
    };
    let edb = EdbConfig::default();
    let preds = depth_pyramid(&inst.pred, 2).unwrap();
    let gts = depth_pyramid(&inst.gt_depth, 2).unwrap();
    let edges = edge_pyramid(&inst.gt_edges, 2);
    let out = total_loss(&preds, &gts, &edges, &cfg, &edb).unwrap();
    let coarse = &preds[1];
    for r in 0..8 {
        for c in 0..8 {
            let v = coarse.get(r, c).unwrap();
            let eval = |x: f64| {
                let mut p = preds.clone();
                p[1] = coarse.with_value(r, c, x).unwrap();
                total_loss(&p, &gts, &edges, &cfg, &edb).unwrap().total
            };
            let numeric = (eval(v + H) - eval(v - H)) / (2.0 * H);
            let analytic = *out.grad_wrt_depth[1].get(r, c);
            if analytic.abs() > 1e-6 {
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs());
                assert!(rel < 1e-3, "({r},{c}) analytic {analytic} numeric {numeric}");
            }
        }
    }
}
