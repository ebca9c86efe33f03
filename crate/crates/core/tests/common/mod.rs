#![allow(dead_code)]

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use gestaug::digest::content_digest;
use gestaug::pipeline::{image_rel_path, Manifest, ManifestEntry};
use gestaug::{HardLabel, Image, Origin};

pub fn noise_image(w: usize, h: usize, c: usize, seed: u64) -> Image {
    let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
    Image::from_fn(w, h, c, |_, _, _| {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s >> 56) as u8
    })
    .unwrap()
}

/// Smooth periodic pattern; resampling round trips stay close on it.
pub fn smooth_image(w: usize, h: usize, c: usize, seed: u64) -> Image {
    let f = |k: u64| ((seed.wrapping_mul(2654435761).wrapping_add(k * 97)) % 1000) as f64 / 1000.0;
    let (a, b, p, q) = (f(1) * 3.0 + 1.0, f(2) * 3.0 + 1.0, f(3) * TAU, f(4) * TAU);
    Image::from_fn(w, h, c, |x, y, ch| {
        let u = x as f64 / w as f64 * TAU;
        let v = y as f64 / h as f64 * TAU;
        let val = 127.5 + 60.0 * (a * u + p + ch as f64).sin() + 60.0 * (b * v + q).cos();
        val.round().clamp(0.0, 255.0) as u8
    })
    .unwrap()
}

/// Write `n` synthetic originals under `root` and return their manifest.
pub fn synthetic_dataset(root: &Path, n: usize, w: usize, h: usize, c: usize) -> Manifest {
    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("synth/g{}/s{}/t{}", i % 14, i / 14 % 20, i);
        let img = smooth_image(w, h, c, i as u64);
        let rel = image_rel_path(&id, "").unwrap();
        let path = root.join(&rel);
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        let bytes = img.write_png(&path).unwrap();
        entries.push(ManifestEntry {
            sample_id: id,
            origin: Origin::Original,
            parent_id: None,
            label: HardLabel::new(i % 14, 14).unwrap(),
            split: Some(if i % 5 == 0 { "test" } else { "train" }.into()),
            image_path: rel,
            params: None,
            content_digest: content_digest(&bytes),
        });
    }
    let m = Manifest::originals(entries);
    m.write(&root.join("manifest.jsonl")).unwrap();
    m
}

pub fn count_pngs(dir: &Path) -> usize {
    let mut n = 0;
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "png") {
                n += 1;
            }
        }
    }
    n
}
