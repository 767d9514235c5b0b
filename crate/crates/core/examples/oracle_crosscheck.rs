//! Compare the exact IoU with the Monte-Carlo estimate on a few random pairs.

use boxeval::geom::{iou_3d, rotation_from_quaternion, OrientedBox3, Vec3};
use boxeval::oracle::{mc_iou, McConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_box(rng: &mut ChaCha8Rng) -> OrientedBox3 {
    let q: [f64; 4] = rng.gen();
    let rotation = rotation_from_quaternion(q[0] + 0.1, q[1] - 0.5, q[2] - 0.5, q[3] - 0.5).unwrap();
    let center = Vec3::from_fn(|_, _| rng.gen_range(-0.3..0.3));
    let scale = Vec3::from_fn(|_, _| rng.gen_range(0.5..1.5));
    OrientedBox3::new(rotation, center, scale).unwrap()
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let config = McConfig::new(500_000, 3).unwrap();
    println!("{:>9} {:>9} {:>9} {:>6}", "exact", "oracle", "stderr", "z");
    for _ in 0..6 {
        let (a, b) = (random_box(&mut rng), random_box(&mut rng));
        let exact = iou_3d(&a, &b).iou;
        let est = mc_iou(&a, &b, &config);
        let z = (exact - est.iou) / est.standard_error;
        println!("{exact:>9.5} {:>9.5} {:>9.5} {z:>6.2}", est.iou, est.standard_error);
    }
}
