//! Spread of repeated annotations of one object, as produced by several
//! annotators labeling the same chair.

use boxeval::geom::{rotation_from_quaternion, OrientedBox3, Vec3};
use boxeval::metrics::annotation_variance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let angle = Normal::new(0.0, 0.03).unwrap();
    let offset = Normal::new(0.0, 0.02).unwrap();
    let size = Normal::new(0.0, 0.015).unwrap();

    let boxes: Vec<OrientedBox3> = (0..20)
        .map(|_| {
            let (x, y, z) = (angle.sample(&mut rng), angle.sample(&mut rng), angle.sample(&mut rng));
            let rotation = rotation_from_quaternion(1.0, x / 2.0, y / 2.0, z / 2.0).unwrap();
            let center = Vec3::new(0.0, 0.45, 2.0) + Vec3::from_fn(|_, _| offset.sample(&mut rng));
            let scale = Vec3::new(0.5, 0.9, 0.5).map(|s| s + size.sample(&mut rng));
            OrientedBox3::new(rotation, center, scale).unwrap()
        })
        .collect();

    println!("{}", annotation_variance(&boxes).unwrap());
}
