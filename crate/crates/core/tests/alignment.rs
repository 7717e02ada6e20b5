mod common;

use nalgebra::{Vector2, Vector3};
use rand::Rng;

use stemos::geo::{
    map_residuals, pnp_residuals, reprojection_residual, solve_map_alignment, solve_pnp, solve_rigid_3d3d, GeoError,
    MapProjection, RigidTransform,
};

fn near_init(r: &mut rand_chacha::ChaCha8Rng, truth: &RigidTransform) -> RigidTransform {
    // Within 10 degrees and 0.1 m of the truth.
    let axis = Vector3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)).normalize();
    let rot = RigidTransform::from_axis_angle(&(axis * 8f64.to_radians()), Vector3::new(0.05, -0.05, 0.05));
    rot.compose(truth)
}

#[test]
fn map_alignment_recovers_planar_pose_from_identity() {
    let mut r = common::rng(1);
    let proj = MapProjection { scale: 20.0, offset: [100.0, 50.0] };
    for _ in 0..50 {
        let truth = common::map_pose(&mut r);
        let points = common::cloud(&mut r, 30);
        let targets = common::map_targets(&points, &proj, &truth, None);
        let a = solve_map_alignment(&points, &targets, &proj, &RigidTransform::identity()).unwrap();
        assert!(a.transform.rotation_error(&truth) < 1e-6, "{}", a.transform.rotation_error(&truth));
        assert!(a.cost < 1e-12, "{}", a.cost);
        assert!((a.transform.translation.xy() - truth.translation.xy()).norm() < 1e-6);
        assert!(a.z_unobservable);
    }
}

#[test]
fn identity_targets_give_identity() {
    let mut r = common::rng(2);
    let points = common::cloud(&mut r, 10);
    let proj = MapProjection::default();
    let targets: Vec<Vector2<f64>> = points.iter().map(|p| p.xy()).collect();
    let a = solve_map_alignment(&points, &targets, &proj, &RigidTransform::identity()).unwrap();
    assert!(a.transform.rotation_error(&RigidTransform::identity()) < 1e-12);
    assert!(a.cost < 1e-20);
}

#[test]
fn map_alignment_rejects_stacked_points() {
    // One map location seen at several heights fixes neither yaw nor tilt.
    let points: Vec<Vector3<f64>> = (0..6).map(|i| Vector3::new(1.0, 2.0, f64::from(i))).collect();
    let targets: Vec<Vector2<f64>> = points.iter().map(|p| p.xy()).collect();
    let err = solve_map_alignment(&points, &targets, &MapProjection::default(), &RigidTransform::identity()).unwrap_err();
    assert!(matches!(err, GeoError::DegenerateConfiguration(_)));
}

#[test]
fn pnp_recovers_pose_from_nearby_init() {
    let mut r = common::rng(3);
    let k = common::camera();
    for _ in 0..50 {
        let truth = common::random_rotation(&mut r, 0.5).compose(&RigidTransform::from_translation(Vector3::new(0.2, -0.1, 0.3)));
        let pairs = common::render(&mut r, 20, &truth, &k, 0.0);
        let init = near_init(&mut r, &truth);
        let s = solve_pnp(&pairs, &k, &init).unwrap();
        assert!(s.transform.rotation_error(&truth) < 1e-6);
        assert!(s.rms < 1e-8, "{}", s.rms);
    }
}

#[test]
fn pnp_noise_stays_under_half_a_degree() {
    let mut r = common::rng(4);
    let k = common::camera();
    let mut rms = Vec::new();
    for _ in 0..100 {
        let truth = common::random_rotation(&mut r, 0.5);
        let pairs = common::render(&mut r, 50, &truth, &k, 0.5);
        let s = solve_pnp(&pairs, &k, &near_init(&mut r, &truth)).unwrap();
        assert!(s.transform.rotation_error(&truth).to_degrees() < 0.5);
        rms.push(s.rms);
    }
    // Per-point RMS of a 2D residual with 6 fitted parameters over 50 points.
    let expected = 0.5 * (2.0f64 - 6.0 / 50.0).sqrt();
    let mean = rms.iter().sum::<f64>() / rms.len() as f64;
    assert!((mean - expected).abs() < 0.05 * expected, "{mean} vs {expected}");
}

#[test]
fn residual_is_zero_at_truth_and_positive_off_it() {
    let mut r = common::rng(5);
    let k = common::camera();
    let truth = common::random_rotation(&mut r, 0.3);
    let pairs = common::render(&mut r, 12, &truth, &k, 0.0);
    assert!(reprojection_residual(&pairs, &k, &truth).unwrap().rms < 1e-9);
    let shifted = RigidTransform::from_translation(Vector3::new(5.0 / k.fx, 0.0, 0.0)).compose(&truth);
    assert!(reprojection_residual(&pairs, &k, &shifted).unwrap().rms > 0.1);
}

#[test]
fn jacobians_match_central_differences() {
    let mut r = common::rng(6);
    let proj = MapProjection { scale: 10.0, offset: [1.0, 2.0] };
    let k = common::camera();
    for _ in 0..30 {
        let t = common::map_pose(&mut r);
        let points = common::cloud(&mut r, 8);
        let targets = common::map_targets(&points, &proj, &common::map_pose(&mut r), None);
        let (_, j) = map_residuals(&points, &targets, &proj, &t);
        let fd = common::fd_jacobian(&t, 1e-6, |x| map_residuals(&points, &targets, &proj, x).0.iter().copied().collect());
        assert!(common::jacobian_error(&j, &fd) < 1e-5);

        let pose = common::random_rotation(&mut r, 0.4);
        let pairs = common::render(&mut r, 8, &pose, &k, 1.0);
        let (_, j) = pnp_residuals(&pairs, &k, &pose).unwrap();
        let fd = common::fd_jacobian(&pose, 1e-6, |x| pnp_residuals(&pairs, &k, x).unwrap().0.iter().copied().collect());
        assert!(common::jacobian_error(&j, &fd) < 1e-5);
    }
}

#[test]
fn image_to_map_chain_reproduces_map_coordinates() {
    // Camera pose from pixels, then the camera-frame reconstruction onto the map.
    let mut r = common::rng(7);
    let k = common::camera();
    let cam = common::random_rotation(&mut r, 0.3);
    let pairs = common::render(&mut r, 30, &cam, &k, 0.0);
    let pnp = solve_pnp(&pairs, &k, &near_init(&mut r, &cam)).unwrap();
    let in_camera: Vec<Vector3<f64>> = pairs.iter().map(|c| pnp.transform.apply(&Vector3::from(c.x))).collect();
    let scene_to_map = common::map_pose(&mut r);
    let proj = MapProjection { scale: 20.0, offset: [0.0, 0.0] };
    let world: Vec<Vector3<f64>> = pairs.iter().map(|c| Vector3::from(c.x)).collect();
    let targets = common::map_targets(&world, &proj, &scene_to_map, None);
    let init = scene_to_map.compose(&cam.inverse());
    let a = solve_map_alignment(&in_camera, &targets, &proj, &near_init(&mut r, &init)).unwrap();
    for (p, y) in in_camera.iter().zip(&targets) {
        assert!((proj.project(&a.transform.apply(p)) - y).norm() < 1e-6);
    }
}

#[test]
fn procrustes_recovers_random_transforms() {
    let mut r = common::rng(8);
    for _ in 0..50 {
        let truth = common::random_rotation(&mut r, 3.0).compose(&RigidTransform::from_translation(Vector3::new(1.0, -2.0, 0.5)));
        let pairs: Vec<_> = common::cloud(&mut r, 10).into_iter().map(|p| (p, truth.apply(&p))).collect();
        let fit = solve_rigid_3d3d(&pairs).unwrap();
        assert!(fit.transform.rotation_error(&truth) < 1e-9);
    }
}
