//! Synthetic marble corpus generator: a desk-scale stand-in corpus of
//! base-colour fields with Gaussian pixel noise, dark grain speckle and
//! dark random-walk vein strokes.
//!
//! The six base colours share saturation and value and differ only in hue,
//! and the pixel noise is correlated across channels, so intensity-plane
//! granulometries are blind to the colour class. Vein density levels differ
//! in stroke count and stroke width at a similar total stroke-pixel budget,
//! and every image carries class-independent single-pixel dark grain: the
//! grain floors the raw and opened low quantiles for all classes alike,
//! while closings erase it at size 1 and then size the wider veins, so the
//! closing block separates the vein classes far more sharply than any
//! static-coverage signal.

use std::path::{Path, PathBuf};

use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};

use marble_core::pnm::encode_p6;
use marble_core::quadtree::{DistanceMetric, color_distance};
use marble_core::raster::{Raster, Rgb, rgb_to_hsv};

use crate::error::{PipelineError, Result};
use crate::manifest::{COLOUR_CLASSES, CorpusManifest, ManifestEntry, VEIN_CLASSES};

/// One vein density level: how many strokes, how wide (cycled per stroke),
/// and the total number of stroke pixels to spend across them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VeinLevel {
    pub min_strokes: usize,
    pub max_strokes: usize,
    pub stroke_widths: Vec<usize>,
    pub pixel_budget: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub base_colours: [Rgb; COLOUR_CLASSES],
    pub vein_levels: [VeinLevel; VEIN_CLASSES],
    pub width: usize,
    pub height: usize,
    pub noise_sigma: f64,
    pub replicates: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(size: usize, replicates: usize, seed: u64) -> Self {
        // Hues 60 degrees apart at equal saturation and value.
        let base_colours = std::array::from_fn(|k| hsv_to_rgb(60.0 * k as f64, 0.45, 0.78));
        Self {
            base_colours,
            vein_levels: [
                VeinLevel {
                    min_strokes: 0,
                    max_strokes: 1,
                    stroke_widths: vec![1],
                    pixel_budget: 700,
                },
                VeinLevel {
                    min_strokes: 4,
                    max_strokes: 8,
                    stroke_widths: vec![3],
                    pixel_budget: 700,
                },
                VeinLevel {
                    min_strokes: 16,
                    max_strokes: 32,
                    stroke_widths: vec![5, 7],
                    pixel_budget: 1000,
                },
            ],
            width: size,
            height: size,
            noise_sigma: 4.0,
            replicates,
            seed,
        }
    }

    /// The base colours must stay farther apart than the merge threshold.
    pub fn validate(&self, metric: DistanceMetric, threshold: f64) -> Result<()> {
        for i in 0..COLOUR_CLASSES {
            for j in i + 1..COLOUR_CLASSES {
                let a = rgb_to_hsv::<f64>(
                    self.base_colours[i].r,
                    self.base_colours[i].g,
                    self.base_colours[i].b,
                );
                let b = rgb_to_hsv::<f64>(
                    self.base_colours[j].r,
                    self.base_colours[j].g,
                    self.base_colours[j].b,
                );
                let d = color_distance(&a, &b, metric);
                if d <= threshold {
                    return Err(PipelineError::data(format!(
                        "base colours {i} and {j} are {d:.3} apart, within the merge threshold {threshold}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Hexcone HSV -> RGB for colour palette construction.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let hp = (h / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - (hp.rem_euclid(2.0) - 1.0).abs());
    let (r1, g1, b1) = match hp as usize {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    Rgb::new(
        ((r1 + m) * 255.0).round() as u8,
        ((g1 + m) * 255.0).round() as u8,
        ((b1 + m) * 255.0).round() as u8,
    )
}

fn mix_seed(seed: u64, colour: usize, vein: usize, rep: usize) -> u64 {
    // splitmix64 over the packed coordinates.
    let mut z = seed
        ^ (colour as u64).wrapping_mul(0x9e3779b97f4a7c15)
        ^ (vein as u64).wrapping_mul(0xbf58476d1ce4e5b9)
        ^ (rep as u64).wrapping_mul(0x94d049bb133111eb);
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random();
    sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Renders one synthetic sample.
pub fn synth_image(
    spec: &SyntheticSpec,
    colour_class: usize,
    vein_class: usize,
    rep: usize,
) -> Raster {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(spec.seed, colour_class, vein_class, rep));
    let (w, h) = (spec.width, spec.height);
    let base = spec.base_colours[colour_class - 1];

    // Base field plus luminance noise: one Gaussian per pixel, added to all
    // three channels, so the V plane's noise distribution is identical for
    // every hue.
    let mut raster = Raster::filled(w, h, base).expect("positive size");
    for y in 0..h {
        for x in 0..w {
            let n = gaussian(&mut rng, spec.noise_sigma);
            let clamp = |v: f64| v.round().clamp(0.0, 255.0) as u8;
            let p = Rgb::new(
                clamp(base.r as f64 + n),
                clamp(base.g as f64 + n),
                clamp(base.b as f64 + n),
            );
            raster.set(x, y, p);
        }
    }

    let mut mask = vec![false; w * h];

    // Class-independent dark grain speckle with a deliberately wide density
    // spread: it floors the raw/opened low quantiles for every class.
    let grain = rng.random_range(150..=500usize) * w * h / 4096;
    for _ in 0..grain.max(1) {
        let x = rng.random_range(0..w);
        let y = rng.random_range(0..h);
        mask[y * w + x] = true;
    }

    // Dark random-walk strokes over the same mask, darkened once per pixel.
    let level = &spec.vein_levels[vein_class - 1];
    let count = if level.max_strokes == level.min_strokes {
        level.min_strokes
    } else {
        rng.random_range(level.min_strokes..=level.max_strokes)
    };
    if let Some(per_stroke) = level.pixel_budget.checked_div(count) {
        // Strokes start in distinct cells of a coarse grid so they rarely
        // cross; crossings locally widen a vein and blur the width classes.
        let grid = (count as f64).sqrt().ceil() as usize;
        let (cell_w, cell_h) = (w / grid, h / grid);
        for stroke in 0..count {
            let width = level.stroke_widths[stroke % level.stroke_widths.len()].max(1);
            let brush = (width - 1) as i32 / 2;
            let brush_area = std::f64::consts::PI * (brush as f64 + 0.5).powi(2);
            let steps = ((per_stroke as f64 - brush_area) / width as f64).max(1.0) as usize;
            let (cx, cy) = (stroke % grid, (stroke / grid) % grid);
            let mut x = (cx * cell_w + rng.random_range(0..cell_w.max(1))) as f64;
            let mut y = (cy * cell_h + rng.random_range(0..cell_h.max(1))) as f64;
            let mut heading: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            for _ in 0..steps {
                let (cx, cy) = (x.round() as i32, y.round() as i32);
                for dy in -brush..=brush {
                    for dx in -brush..=brush {
                        // Square brush trimmed to a disc.
                        if dx * dx + dy * dy > brush * brush + brush {
                            continue;
                        }
                        let px = cx + dx;
                        let py = cy + dy;
                        if px >= 0 && py >= 0 && (px as usize) < w && (py as usize) < h {
                            mask[py as usize * w + px as usize] = true;
                        }
                    }
                }
                heading += gaussian(&mut rng, 0.12);
                // Reflect at the borders so long walks keep wandering the
                // interior instead of sliding along an edge.
                if !(0.0..=(w - 1) as f64).contains(&(x + heading.cos())) {
                    heading = std::f64::consts::PI - heading;
                }
                if !(0.0..=(h - 1) as f64).contains(&(y + heading.sin())) {
                    heading = -heading;
                }
                x = (x + heading.cos()).clamp(0.0, (w - 1) as f64);
                y = (y + heading.sin()).clamp(0.0, (h - 1) as f64);
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            if mask[y * w + x] {
                let p = raster.get(x, y);
                raster.set(
                    x,
                    y,
                    Rgb::new(
                        (p.r as f64 * 0.25).round() as u8,
                        (p.g as f64 * 0.25).round() as u8,
                        (p.b as f64 * 0.25).round() as u8,
                    ),
                );
            }
        }
    }
    raster
}

/// Generates the full corpus under `out_dir`: `images/*.ppm` plus
/// `manifest.csv`. Fully seeded; identical spec gives byte-identical output.
pub fn generate(spec: &SyntheticSpec, out_dir: &Path) -> Result<CorpusManifest> {
    let images_dir = out_dir.join("images");
    std::fs::create_dir_all(&images_dir).map_err(|e| {
        PipelineError::runtime(format!("cannot create {}: {e}", images_dir.display()))
    })?;

    let mut entries = Vec::new();
    for colour in 1..=COLOUR_CLASSES {
        for vein in 1..=VEIN_CLASSES {
            for rep in 1..=spec.replicates {
                let id = format!("c{colour}v{vein}r{rep:02}");
                let rel_path = format!("images/{id}.ppm");
                let raster = synth_image(spec, colour, vein, rep);
                std::fs::write(out_dir.join(&rel_path), encode_p6(&raster))?;
                entries.push(ManifestEntry {
                    id,
                    path: rel_path,
                    colour_class: colour,
                    vein_class: vein,
                });
            }
        }
    }

    let manifest = CorpusManifest::from_entries(entries, out_dir.to_path_buf());
    std::fs::write(out_dir.join("manifest.csv"), manifest.to_csv())?;
    Ok(manifest)
}

/// Convenience for tests: manifest path of a generated corpus.
pub fn manifest_path(out_dir: &Path) -> PathBuf {
    out_dir.join("manifest.csv")
}
