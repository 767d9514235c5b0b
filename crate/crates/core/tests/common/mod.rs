//! Fixtures shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use boxeval::camera::{intrinsics_matrix, CameraFrame};
use boxeval::category::Category;
use boxeval::dataio::{serialize_frames, FrameRecord, ObjectAnnotation};
use boxeval::geom::{rotation_from_quaternion, Mat3, OrientedBox3, Vec3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, UnitSphere};
use serde_json::{json, Value};

pub fn random_rotation<R: Rng>(rng: &mut R) -> Mat3 {
    // normalized Gaussian quaternion: uniform on SO(3)
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    rotation_from_quaternion(q[0], q[1], q[2], q[3]).expect("non-zero quaternion")
}

pub fn random_box<R: Rng>(rng: &mut R) -> OrientedBox3 {
    let scale = Vec3::from_fn(|_, _| rng.gen_range(0.05..3.0));
    let center = Vec3::from_fn(|_, _| rng.gen_range(-2.0..2.0));
    OrientedBox3::new(random_rotation(rng), center, scale).unwrap()
}

/// Two random boxes whose centers are a uniformly random distance in
/// `[0, diag_a + diag_b]` apart, in a uniformly random direction. Roughly a
/// third of the pairs overlap.
pub fn random_pair<R: Rng>(rng: &mut R) -> (OrientedBox3, OrientedBox3) {
    let a = random_box(rng);
    let scale = Vec3::from_fn(|_, _| rng.gen_range(0.05..3.0));
    let probe = OrientedBox3::new(random_rotation(rng), Vec3::zeros(), scale).unwrap();
    let dir: [f64; 3] = UnitSphere.sample(rng);
    let dist = rng.gen_range(0.0..=a.diagonal() + probe.diagonal());
    let b = OrientedBox3::new(*probe.rotation(), a.center() + Vec3::from(dir) * dist, scale).unwrap();
    (a, b)
}

pub fn default_camera() -> CameraFrame {
    CameraFrame::look_at(
        Vec3::new(0.0, 2.0, 6.0),
        Vec3::zeros(),
        Vec3::y(),
        intrinsics_matrix(500.0, 500.0, 240.0, 320.0),
        480,
        640,
    )
    .unwrap()
}

/// A random frame whose objects all sit in front of the camera.
pub fn random_frame<R: Rng>(rng: &mut R, index: usize) -> FrameRecord {
    let target = Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let dir: [f64; 3] = UnitSphere.sample(rng);
    let mut dir = Vec3::from(dir);
    if dir.y.abs() > 0.9 {
        dir.y *= 0.5;
    }
    let eye = target + dir.normalize() * rng.gen_range(6.0..12.0);
    let (w, h) = (rng.gen_range(200..2000), rng.gen_range(200..2000));
    let k = intrinsics_matrix(
        rng.gen_range(100.0..2000.0),
        rng.gen_range(100.0..2000.0),
        rng.gen_range(1.0..w as f64 - 1.0),
        rng.gen_range(1.0..h as f64 - 1.0),
    );
    let camera = CameraFrame::look_at(eye, target, Vec3::y(), k, w, h).unwrap();
    let n = rng.gen_range(0..4);
    let objects = (0..n)
        .map(|i| {
            let scale = Vec3::from_fn(|_, _| rng.gen_range(0.05..1.5));
            let center = target + Vec3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let b = OrientedBox3::new(random_rotation(rng), center, scale).unwrap();
            let category = Category::ALL[rng.gen_range(0..9)];
            ObjectAnnotation::new(format!("{category}-{i}"), category, b, &camera).unwrap()
        })
        .collect();
    FrameRecord {
        frame_id: format!("video_{}/{index:05}", index / 10),
        camera,
        objects,
    }
}

/// A corrupted file: `lines` with the bad record on `line` (1-based), and the
/// field path the error must name.
pub struct Corruption {
    pub name: &'static str,
    pub text: String,
    pub line: usize,
    pub path: &'static str,
}

fn frame_values() -> Vec<Value> {
    let camera = default_camera();
    let frames: Vec<FrameRecord> = (0..5)
        .map(|i| {
            let objects = (0..2)
                .map(|j| {
                    let b = OrientedBox3::axis_aligned(Vec3::new(j as f64 - 0.5, 0.0, 0.0), Vec3::new(0.4, 0.6, 0.5))
                        .unwrap();
                    ObjectAnnotation::new(format!("obj{j}"), Category::Chair, b, &camera).unwrap()
                })
                .collect();
            FrameRecord {
                frame_id: format!("seq/{i:03}"),
                camera: camera.clone(),
                objects,
            }
        })
        .collect();
    String::from_utf8(serialize_frames(&frames))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Twenty files that each break one invariant on line 3.
pub fn corrupted_corpus() -> Vec<Corruption> {
    type Mutation = fn(&mut Value);
    let cases: [(&str, &str, Mutation); 19] = [
        ("missing frame_id", "frame_id", |v| {
            v.as_object_mut().unwrap().remove("frame_id");
        }),
        ("empty frame_id", "frame_id", |v| v["frame_id"] = json!("")),
        ("duplicate frame_id", "frame_id", |v| v["frame_id"] = json!("seq/000")),
        ("negative focal length", "camera.intrinsics", |v| v["camera"]["intrinsics"][0][0] = json!(-500.0)),
        ("principal point outside image", "camera.intrinsics", |v| v["camera"]["intrinsics"][1][2] = json!(5000.0)),
        ("skewed intrinsics", "camera.intrinsics", |v| v["camera"]["intrinsics"][0][1] = json!(3.0)),
        ("non-rigid camera pose", "camera.camera_to_world", |v| v["camera"]["camera_to_world"][0][0] = json!(2.0)),
        ("view not inverse of pose", "camera.view", |v| v["camera"]["view"][0][3] = json!(7.5)),
        ("projection disagrees with intrinsics", "camera.projection", |v| v["camera"]["projection"][0][0] = json!(9.0)),
        ("non-orthonormal rotation", "objects[0].box.rotation", |v| v["objects"][0]["box"]["rotation"][0][1] = json!(0.3)),
        ("reflection instead of rotation", "objects[0].box.rotation", |v| {
            v["objects"][0]["box"]["rotation"][2][2] = json!(-1.0)
        }),
        ("negative scale", "objects[1].box.scale", |v| v["objects"][1]["box"]["scale"][1] = json!(-0.6)),
        ("zero scale", "objects[0].box.scale", |v| v["objects"][0]["box"]["scale"][0] = json!(0.0)),
        ("rotation and quaternion", "objects[0].box", |v| v["objects"][0]["box"]["quaternion"] = json!([1, 0, 0, 0])),
        ("zero quaternion", "objects[0].box.quaternion", |v| {
            let b = v["objects"][0]["box"].as_object_mut().unwrap();
            b.remove("rotation");
            b.insert("quaternion".into(), json!([0, 0, 0, 0]));
        }),
        ("unknown category", "objects[0].category", |v| v["objects"][0]["category"] = json!("table")),
        ("3d keypoints off the box", "objects[0].keypoints_3d", |v| v["objects"][0]["keypoints_3d"][4][1] = json!(3.0)),
        ("2d keypoints off the projection", "objects[1].keypoints_2d", |v| {
            v["objects"][1]["keypoints_2d"][0][0] = json!(0.9)
        }),
        ("duplicate instance_id", "objects[1].instance_id", |v| v["objects"][1]["instance_id"] = json!("obj0")),
    ];
    let base = frame_values();
    let mut corpus: Vec<Corruption> = cases
        .into_iter()
        .map(|(name, path, mutate)| {
            let mut lines = base.clone();
            mutate(&mut lines[2]);
            Corruption {
                name,
                text: lines.iter().map(|l| l.to_string() + "\n").collect(),
                line: 3,
                path,
            }
        })
        .collect();
    // a box moved behind the camera cannot be projected; keypoints omitted so
    // the projection itself is what fails
    let mut lines = base.clone();
    let obj = lines[2]["objects"][0].as_object_mut().unwrap();
    obj.remove("keypoints_3d");
    obj.remove("keypoints_2d");
    obj.get_mut("box").unwrap()["translation"] = json!([0.0, 2.0, 9.0]);
    corpus.push(Corruption {
        name: "box behind the camera",
        text: lines.iter().map(|l| l.to_string() + "\n").collect(),
        line: 3,
        path: "objects[0].keypoints_2d",
    });
    corpus
}
