//! Write a small ground-truth / prediction pair to a temp directory, read it
//! back, and score it. The same files feed `boxeval evaluate`.

use std::io::Write;

use boxeval::dataio::{create_output, generate_synthetic, read_frames, read_predictions, write_frames, write_predictions, NoiseSpec, SyntheticSpec};
use boxeval::metrics::{evaluate, EvalConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SyntheticSpec {
        noise: NoiseSpec { rotation_std_deg: 5.0, translation_std: 0.01, ..NoiseSpec::default() },
        ..SyntheticSpec::default()
    };
    let (gt, preds) = generate_synthetic(&spec)?;

    let dir = std::env::temp_dir().join("boxeval-fixture");
    std::fs::create_dir_all(&dir)?;
    let gt_path = dir.join("gt.jsonl.gz");
    let pred_path = dir.join("pred.jsonl");
    let mut w = create_output(&gt_path)?;
    write_frames(&mut w, &gt)?;
    w.flush()?;
    drop(w);
    let mut w = create_output(&pred_path)?;
    write_predictions(&mut w, &preds)?;
    w.flush()?;
    drop(w);

    let report = evaluate(&read_frames(&gt_path)?, &read_predictions(&pred_path)?, &EvalConfig::default())?;
    println!("wrote {} and {}", gt_path.display(), pred_path.display());
    for c in &report.categories {
        println!("{:<11} AP@IoU {:.3}  AP@azimuth {:.3}", c.category.as_str(), c.ap_iou, c.ap_azimuth);
    }
    Ok(())
}
