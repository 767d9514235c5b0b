//! Per-category counts and viewpoint histograms of a ground-truth stream.

use boxeval::cli::dataset_stats;
use boxeval::dataio::{generate_synthetic, SyntheticSpec};

fn main() {
    let (gt, _) = generate_synthetic(&SyntheticSpec { instances_per_sequence: 2, ..SyntheticSpec::default() }).unwrap();
    let stats = dataset_stats(&gt, 12).unwrap();
    print!("{}", stats.to_markdown());
}
