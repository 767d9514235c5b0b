//! Project the nine box keypoints (center then corners) through a pinhole
//! camera and report the viewpoint of the object.

use boxeval::camera::{intrinsics_matrix, project_box_keypoints, viewpoint_of, CameraFrame};
use boxeval::geom::{rot_y, OrientedBox3, Vec3};

fn main() {
    let k = intrinsics_matrix(500.0, 500.0, 240.0, 320.0);
    let camera = CameraFrame::look_at(Vec3::new(2.0, 2.0, 3.0), Vec3::new(0.0, 0.2, 0.0), Vec3::y(), k, 480, 640).unwrap();
    let cup = OrientedBox3::new(rot_y(0.3), Vec3::new(0.0, 0.2, 0.0), Vec3::new(0.3, 0.4, 0.3)).unwrap();

    let points = project_box_keypoints(&camera, &cup).unwrap();
    for (i, p) in points.iter().enumerate() {
        println!("{i}: u {:.4}  v {:.4}  depth {:.3} m", p.u, p.v, p.depth);
    }
    let view = viewpoint_of(&camera, &cup).unwrap();
    println!("azimuth {:.2}°, elevation {:.2}°", view.azimuth, view.elevation);
}
