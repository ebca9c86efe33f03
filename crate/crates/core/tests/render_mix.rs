use std::fs;
use std::path::{Path, PathBuf};

use gestaug::baselines::{mix_dataset, LambdaLaw, MixConfig, MixMethod, MixedManifest, MIXED_FILE};
use gestaug::datasets::{ingest_dataset, DatasetProfile, LabelScheme};
use gestaug::pipeline::{
    augment_dataset, render_dataset, verify_manifest, AugmentConfig, Manifest, Rederive,
    RenderConfig, MANIFEST_FILE,
};
use gestaug::render::Viewpoint;
use gestaug::Image;

fn ingested(dir: &Path) -> PathBuf {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/shrec_tree");
    let out = dir.join("norm");
    let report = ingest_dataset(&src, &DatasetProfile::shrec17(), &out, 1).unwrap();
    assert_eq!(report.index.entries.len(), 3);
    out
}

fn render(index: &Path, out: &Path, view: Viewpoint<f64>, workers: usize) -> Manifest {
    let config = RenderConfig {
        view,
        workers,
        ..Default::default()
    };
    let report = render_dataset(index, &config, out).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    report.manifest
}

#[test]
fn rendering_is_deterministic_and_view_dependent() {
    let dir = tempfile::tempdir().unwrap();
    let index = ingested(dir.path());
    let a = render(&index, &dir.path().join("a"), Viewpoint::FrontAway, 1);
    let b = render(&index, &dir.path().join("b"), Viewpoint::FrontAway, 3);
    assert_eq!(a.entries.len(), 3);
    assert_eq!(a, b);
    assert_eq!(
        fs::read(dir.path().join("a").join(MANIFEST_FILE)).unwrap(),
        fs::read(dir.path().join("b").join(MANIFEST_FILE)).unwrap()
    );
    let top = render(&index, &dir.path().join("t"), Viewpoint::TopDown, 1);
    for (x, y) in a.entries.iter().zip(&top.entries) {
        assert_eq!(x.sample_id, y.sample_id);
        assert_ne!(x.content_digest, y.content_digest, "{}", x.sample_id);
    }
    let custom = Viewpoint::Custom {
        azimuth_deg: 0.0,
        elevation_deg: 0.0,
    };
    let c = render(&index, &dir.path().join("c"), custom, 1);
    let digests = |m: &Manifest| {
        m.entries
            .iter()
            .map(|e| e.content_digest.clone())
            .collect::<Vec<_>>()
    };
    assert_eq!(digests(&c), digests(&a));

    let img = Image::read_png(&dir.path().join("a").join(&a.entries[0].image_path)).unwrap();
    assert_eq!(img.dims(), (227, 227, 3));
    let report = verify_manifest(&a, &dir.path().join("a"), Rederive::None);
    assert!(report.violations.is_empty(), "{:?}", report.violations);
}

#[test]
fn missing_label_scheme_is_reported_per_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let index = ingested(dir.path());
    let config = RenderConfig {
        scheme: LabelScheme::Classes(21),
        ..Default::default()
    };
    let report = render_dataset(&index, &config, &dir.path().join("r")).unwrap();
    assert!(report.manifest.entries.is_empty());
    assert_eq!(report.failures.len(), 3);
}

#[test]
fn rendered_set_augments_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let index = ingested(dir.path());
    let rendered = dir.path().join("r");
    let manifest = render(&index, &rendered, Viewpoint::FrontAway, 1);
    let out = dir.path().join("aug");
    let config = AugmentConfig {
        global_seed: 5,
        workers: 2,
        ..Default::default()
    };
    let aug = augment_dataset(&manifest, &rendered, &out, &config).unwrap();
    assert_eq!(aug.entries.len(), 12);
    let report = verify_manifest(&aug, &out, Rederive::All);
    assert!(report.violations.is_empty(), "{:?}", report.violations);
}

fn mix(
    manifest: &Manifest,
    root: &Path,
    out: &Path,
    method: MixMethod,
    workers: usize,
) -> MixedManifest {
    let config = MixConfig {
        method,
        seed: 9,
        lambda: LambdaLaw::Uniform,
        workers,
    };
    mix_dataset(manifest, root, out, &config).unwrap()
}

#[test]
fn mixing_a_rendered_set() {
    let dir = tempfile::tempdir().unwrap();
    let index = ingested(dir.path());
    let rendered = dir.path().join("r");
    let manifest = render(&index, &rendered, Viewpoint::FrontAway, 1);
    for method in [MixMethod::Mixup, MixMethod::Cutmix] {
        let one = mix(&manifest, &rendered, &dir.path().join("m1"), method, 1);
        let many = mix(&manifest, &rendered, &dir.path().join("m4"), method, 4);
        assert_eq!(one, many);
        assert_eq!(
            fs::read(dir.path().join("m1").join(MIXED_FILE)).unwrap(),
            fs::read(dir.path().join("m4").join(MIXED_FILE)).unwrap()
        );
        let text = fs::read_to_string(dir.path().join("m1").join(MIXED_FILE)).unwrap();
        assert_eq!(
            MixedManifest::from_jsonl(&text, Path::new(MIXED_FILE)).unwrap(),
            one
        );
        assert_eq!(one.entries.len(), 3);
        for e in &one.entries {
            assert_ne!(e.parents.0, e.parents.1);
            assert!((0.0..=1.0).contains(&e.lambda));
            let p = e.soft_label.probabilities();
            assert_eq!(p.len(), 14);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(dir.path().join("m1").join(&e.image_path).is_file());
        }
    }
}

#[test]
fn mixing_rejects_out_of_range_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = Manifest {
        global_seed: 0,
        copies_per_sample: 0,
        chain: Default::default(),
        entries: Vec::new(),
    };
    let config = MixConfig {
        method: MixMethod::Mixup,
        seed: 0,
        lambda: LambdaLaw::Fixed(1.5),
        workers: 1,
    };
    assert!(mix_dataset(&manifest, dir.path(), &dir.path().join("o"), &config).is_err());
    assert!(!dir.path().join("o").exists());
}
