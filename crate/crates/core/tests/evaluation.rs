mod common;

use boxeval::camera::{intrinsics_matrix, project_box_keypoints, viewpoint_of, CameraFrame};
use boxeval::category::Category;
use boxeval::dataio::{generate_synthetic, NoiseSpec, PredictionFrame, SyntheticSpec};
use boxeval::geom::{iou_3d, Vec3};
use boxeval::metrics::{evaluate, pixel_projection_error, rotation_error, viewpoint_errors, EvalConfig, EvalReport};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn noisy_fixture(seed: u64) -> (Vec<boxeval::dataio::FrameRecord>, Vec<PredictionFrame>) {
    let (gt, mut preds) = generate_synthetic(&SyntheticSpec {
        seed,
        sequences: 18,
        frames_per_sequence: 6,
        instances_per_sequence: 3,
        noise: NoiseSpec {
            rotation_std_deg: 12.0,
            translation_std: 0.03,
            scale_std_frac: 0.15,
            yaw_offset_deg: 25.0,
            yaw_offset_fraction: 0.3,
            ..NoiseSpec::default()
        },
        ..SyntheticSpec::default()
    })
    .unwrap();
    // spread confidences so ranking is non-trivial
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for frame in &mut preds {
        for p in &mut frame.objects {
            p.confidence = (p.confidence * rand::Rng::gen_range(&mut rng, 0.5..1.0f64) * 1e3).round() / 1e3;
        }
    }
    (gt, preds)
}

fn aps(report: &EvalReport) -> Vec<f64> {
    report
        .categories
        .iter()
        .flat_map(|c| {
            [c.ap_iou, c.ap_azimuth, c.ap_elevation]
                .into_iter()
                .chain(c.curves.iou.iter().map(|p| p.ap))
                .chain(c.curves.azimuth.iter().map(|p| p.ap))
                .chain(c.curves.elevation.iter().map(|p| p.ap))
        })
        .collect()
}

#[test]
fn ground_truth_as_predictions_scores_perfectly() {
    let (gt, _) = generate_synthetic(&SyntheticSpec {
        instances_per_sequence: 4,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let preds: Vec<PredictionFrame> = gt.iter().map(PredictionFrame::from).collect();
    let report = evaluate(&gt, &preds, &EvalConfig::default()).unwrap();
    assert_eq!(report.categories.len(), 9);
    for c in &report.categories {
        assert_eq!([c.ap_iou, c.ap_azimuth, c.ap_elevation], [1.0; 3], "{}", c.category);
        assert_eq!(c.mean_pixel_error, Some(0.0));
        assert_eq!(c.mean_rotation_error, Some(0.0), "{}", c.category);
    }
}

#[test]
fn empty_prediction_stream() {
    let (gt, _) = noisy_fixture(1);
    let report = evaluate(&gt, &[], &EvalConfig::default()).unwrap();
    assert!(aps(&report).iter().all(|&ap| ap == 0.0));
    assert!(report.categories.iter().all(|c| c.num_matched == 0 && c.num_gt > 0));
}

#[test]
fn curves_are_monotone_in_threshold() {
    let (gt, preds) = noisy_fixture(2);
    let report = evaluate(&gt, &preds, &EvalConfig::default()).unwrap();
    for c in &report.categories {
        assert!(c.curves.iou.windows(2).all(|w| w[1].ap <= w[0].ap), "{}", c.category);
        assert!(c.curves.azimuth.windows(2).all(|w| w[1].ap >= w[0].ap), "{}", c.category);
        assert!(c.curves.elevation.windows(2).all(|w| w[1].ap >= w[0].ap), "{}", c.category);
    }
    for t in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let lo = evaluate(&gt, &preds, &EvalConfig { iou_threshold: t, ..EvalConfig::default() }).unwrap();
        let hi = evaluate(&gt, &preds, &EvalConfig { iou_threshold: t + 0.05, ..EvalConfig::default() }).unwrap();
        for (a, b) in lo.categories.iter().zip(&hi.categories) {
            assert!(b.ap_iou <= a.ap_iou);
        }
    }
}

#[test]
fn duplicated_predictions_never_raise_ap() {
    let (gt, preds) = noisy_fixture(3);
    let base = evaluate(&gt, &preds, &EvalConfig::default()).unwrap();
    let doubled: Vec<PredictionFrame> = preds
        .iter()
        .map(|f| PredictionFrame {
            objects: f.objects.iter().chain(&f.objects).cloned().collect(),
            ..f.clone()
        })
        .collect();
    let report = evaluate(&gt, &doubled, &EvalConfig::default()).unwrap();
    for (a, b) in aps(&base).iter().zip(aps(&report)) {
        assert!(b <= *a + 1e-15, "{b} > {a}");
    }
}

#[test]
fn shuffled_inputs_give_identical_reports() {
    let (mut gt, mut preds) = noisy_fixture(4);
    let base = evaluate(&gt, &preds, &EvalConfig::default()).unwrap().to_json();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..3 {
        gt.shuffle(&mut rng);
        preds.shuffle(&mut rng);
        for f in &mut preds {
            f.objects.shuffle(&mut rng);
        }
        assert_eq!(evaluate(&gt, &preds, &EvalConfig::default()).unwrap().to_json(), base);
    }
}

#[test]
fn worker_count_does_not_change_report() {
    let (gt, preds) = noisy_fixture(5);
    let reports: Vec<String> = [1, 2, 5]
        .into_iter()
        .map(|n| {
            let config = EvalConfig { worker_count: Some(n), ..EvalConfig::default() };
            evaluate(&gt, &preds, &config).unwrap().to_json()
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

#[test]
fn symmetry_search_never_lowers_iou() {
    let (gt, preds) = noisy_fixture(6);
    let plain = evaluate(&gt, &preds, &EvalConfig { symmetric_categories: Default::default(), ..EvalConfig::default() }).unwrap();
    let sym = evaluate(
        &gt,
        &preds,
        &EvalConfig { symmetric_categories: Category::ALL.into_iter().collect(), ..EvalConfig::default() },
    )
    .unwrap();
    for (p, s) in plain.categories.iter().zip(&sym.categories) {
        assert!(s.mean_iou.unwrap() >= p.mean_iou.unwrap(), "{}", p.category);
        assert!(s.ap_iou >= p.ap_iou);
    }
}

#[test]
fn metric_bounds_on_random_pairs() {
    let camera = CameraFrame::look_at(
        Vec3::new(1.0, 4.0, 20.0),
        Vec3::zeros(),
        Vec3::y(),
        intrinsics_matrix(800.0, 800.0, 320.0, 240.0),
        640,
        480,
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..1000 {
        let (a, b) = common::random_pair(&mut rng);
        let iou = iou_3d(&a, &b).iou;
        assert!((0.0..=1.0).contains(&iou));
        let rot = rotation_error(a.rotation(), b.rotation()).unwrap();
        assert!((0.0..=180.0).contains(&rot), "{rot}");
        let uv = |bx| project_box_keypoints(&camera, bx).unwrap().map(|k| [k.u, k.v]);
        let px = pixel_projection_error(&uv(&a), &uv(&b)).unwrap();
        assert!(px >= 0.0 && px.is_finite());
        let e = viewpoint_errors(&viewpoint_of(&camera, &a).unwrap(), &viewpoint_of(&camera, &b).unwrap());
        for v in [e.azimuth, e.elevation, e.polar, e.viewpoint] {
            assert!((0.0..=180.0).contains(&v), "{e:?}");
        }
        assert!((e.polar - e.elevation).abs() < 1e-12);
    }
}
