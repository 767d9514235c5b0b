//! Exact IoU of two oriented boxes, plus the intersection polytope size.
//!
//! cargo run --example iou_pair

use boxeval::geom::{iou_3d, rot_y, rot_z, OrientedBox3, Vec3};

fn main() {
    let a = OrientedBox3::new(rot_y(0.2), Vec3::new(0.0, 0.5, 4.0), Vec3::new(1.0, 1.0, 2.0)).unwrap();
    let b = OrientedBox3::new(rot_z(0.4) * rot_y(0.5), Vec3::new(0.3, 0.6, 4.2), Vec3::new(1.2, 0.8, 1.8)).unwrap();

    let r = iou_3d(&a, &b);
    println!("volumes       {:.6} {:.6}", a.volume(), b.volume());
    println!("intersection  {:.6}", r.intersection_volume);
    println!("union         {:.6}", r.union_volume);
    println!("iou           {:.6}", r.iou);
    println!("polytope has {} vertices", r.intersection_points.len());

    // unit cube against itself shifted by half an edge
    let unit = OrientedBox3::unit();
    let half = OrientedBox3::axis_aligned(Vec3::new(0.5, 0.0, 0.0), Vec3::repeat(1.0)).unwrap();
    println!("half-shifted unit cube: {:.6} (1/3 expected)", iou_3d(&unit, &half).iou);
}
