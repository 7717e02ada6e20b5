//! Registers a synthetic scan: camera pose from pixels, then the scan onto
//! a top-down map.

use nalgebra::{Vector2, Vector3};
use stemos::geo::{solve_map_alignment, solve_pnp, CameraIntrinsics, Correspondence3D2D, MapProjection, RigidTransform};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = CameraIntrinsics { fx: 500.0, fy: 500.0, cx: 320.0, cy: 240.0 };
    let camera = RigidTransform::from_axis_angle(&Vector3::new(0.1, -0.2, 0.05), Vector3::new(0.1, 0.0, 0.2));
    let scene: Vec<Vector3<f64>> = (0..12)
        .map(|i| {
            let f = f64::from(i);
            Vector3::new((f * 0.7).sin(), (f * 1.3).cos() * 0.8, 4.0 + (f * 0.5).sin())
        })
        .collect();
    let pairs: Vec<Correspondence3D2D> = scene
        .iter()
        .map(|x| {
            let c = camera.apply(x);
            Correspondence3D2D::new(*x, Vector2::new(k.fx * c.x / c.z + k.cx, k.fy * c.y / c.z + k.cy))
        })
        .collect();
    let init = RigidTransform::from_axis_angle(&Vector3::new(0.05, 0.05, 0.0), Vector3::zeros()).compose(&camera);
    let pnp = solve_pnp(&pairs, &k, &init)?;
    println!("pnp: rotation error {:.2e} rad, rms {:.2e} px, {} iterations", pnp.transform.rotation_error(&camera), pnp.rms, pnp.iterations);

    let to_map = RigidTransform::from_yaw(0.6, Vector3::new(2.0, -1.0, 0.0));
    let projection = MapProjection { scale: 20.0, offset: [100.0, 100.0] };
    let targets: Vec<Vector2<f64>> = scene.iter().map(|p| projection.project(&to_map.apply(p))).collect();
    let a = solve_map_alignment(&scene, &targets, &projection, &RigidTransform::identity())?;
    println!(
        "map: rotation error {:.2e} rad, cost {:.2e}, height observable: {}",
        a.transform.rotation_error(&to_map),
        a.cost,
        !a.z_unobservable
    );
    Ok(())
}
