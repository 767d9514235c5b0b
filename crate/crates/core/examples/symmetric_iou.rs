//! A bottle predicted with the wrong yaw. Plain IoU punishes it; the symmetric
//! variant searches rotations about the up axis and recovers the overlap.

use boxeval::geom::{best_symmetric_rotation, iou_3d, rot_y, OrientedBox3, SymmetrySpec, Vec3};

fn main() {
    let gt = OrientedBox3::new(rot_y(0.1), Vec3::new(0.0, 0.12, 3.0), Vec3::new(0.08, 0.24, 0.08)).unwrap();
    let pred = gt.rotated_about_local_y(40f64.to_radians());

    println!("plain iou: {:.4}", iou_3d(&gt, &pred).iou);
    for n in [4, 12, 36, 100] {
        let sym = SymmetrySpec::new(n).unwrap();
        let (angle, r) = best_symmetric_rotation(&gt, &pred, &sym);
        println!("n = {n:>3}: iou {:.4} at {:>6.1}°", r.iou, angle.to_degrees());
    }
}
