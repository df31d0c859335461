//! Quadtree colour-homogeneity segmentation, area-ranked colour merging and
//! the 56-element homogeneity feature vector.
//!
//! A region is homogeneous when each RGB channel histogram is compatible with
//! a Gaussian fitted by moments, judged by a Pearson chi-square test over
//! integer-aligned bins (continuity-corrected expected counts, cells merged
//! until every bin expects at least five samples). The degrees of freedom are
//! `bins - 1`, the conservative end of the Chernoff-Lehmann range for
//! moment-estimated parameters.

use thiserror::Error;

use crate::components::{Connectivity, connected_components};
use crate::raster::{HsvTriple, Raster, Rgb, rgbf_to_hsv};
use crate::scalar::Real;
use crate::stats::{chi_square_sf, normal_cdf};

/// Regions smaller than this pass the homogeneity test automatically; the
/// chi-square statistic is meaningless at tiny sample sizes.
pub const MIN_TEST_AREA: usize = 16;

/// Number of ranked colour clusters carried by the HF vector.
pub const HF_COLOURS: usize = 5;
/// Homogeneity feature vector width.
pub const HF_LEN: usize = 56;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadtreeError {
    #[error("signature regions do not tile the {width}x{height} source")]
    InvalidTiling { width: usize, height: usize },
    #[error("signature has no homogeneous regions to merge")]
    EmptySignature,
}

/// A leaf of the quadtree decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRegion {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
    pub homogeneous: bool,
    /// Per-channel pixel mean of the region.
    pub mean_rgb: [f64; 3],
}

impl QuadRegion {
    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn hsv(&self) -> HsvTriple<f64> {
        rgbf_to_hsv(self.mean_rgb[0], self.mean_rgb[1], self.mean_rgb[2])
    }
}

/// The marble signature: the set of quadtree leaves, tiling the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    width: usize,
    height: usize,
    regions: Vec<QuadRegion>,
}

impl Signature {
    /// Validates the tiling invariant: every pixel covered exactly once.
    pub fn new(
        width: usize,
        height: usize,
        regions: Vec<QuadRegion>,
    ) -> Result<Self, QuadtreeError> {
        let mut covered = vec![false; width * height];
        let mut count = 0usize;
        for r in &regions {
            if r.x + r.w > width || r.y + r.h > height {
                return Err(QuadtreeError::InvalidTiling { width, height });
            }
            for y in r.y..r.y + r.h {
                for x in r.x..r.x + r.w {
                    let idx = y * width + x;
                    if covered[idx] {
                        return Err(QuadtreeError::InvalidTiling { width, height });
                    }
                    covered[idx] = true;
                    count += 1;
                }
            }
        }
        if count != width * height {
            return Err(QuadtreeError::InvalidTiling { width, height });
        }
        Ok(Self {
            width,
            height,
            regions,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn regions(&self) -> &[QuadRegion] {
        &self.regions
    }

    /// One record per region: x, y, w, h, homogeneous flag, mean R, G, B.
    pub fn to_region_table(&self) -> String {
        let mut out = String::from("x\ty\tw\th\thomogeneous\tmean_r\tmean_g\tmean_b\n");
        for r in &self.regions {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.x,
                r.y,
                r.w,
                r.h,
                if r.homogeneous { 1 } else { 0 },
                r.mean_rgb[0],
                r.mean_rgb[1],
                r.mean_rgb[2],
            ));
        }
        out
    }
}

type ChannelHist = [u32; 256];

fn histograms_of_region(
    raster: &Raster,
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> [ChannelHist; 3] {
    let mut hists = [[0u32; 256]; 3];
    for yy in y..y + h {
        for xx in x..x + w {
            let p = raster.get(xx, yy);
            hists[0][p.r as usize] += 1;
            hists[1][p.g as usize] += 1;
            hists[2][p.b as usize] += 1;
        }
    }
    hists
}

fn hist_mean_var(hist: &ChannelHist, n: usize) -> (f64, f64) {
    let mut sum = 0f64;
    let mut sum_sq = 0f64;
    for (v, &c) in hist.iter().enumerate() {
        let c = c as f64;
        sum += v as f64 * c;
        sum_sq += (v * v) as f64 * c;
    }
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    (mean, var)
}

/// Pearson goodness-of-fit of one channel histogram against the
/// moment-fitted Gaussian.
fn channel_is_gaussian(hist: &ChannelHist, n: usize, alpha: f64) -> bool {
    let (mean, var) = hist_mean_var(hist, n);
    if var == 0.0 {
        return true;
    }
    let sd = var.sqrt();

    // Expected count of an integer cell under the fitted Gaussian, with the
    // open tails folded into the end cells.
    let cell_expected = |v: usize| -> f64 {
        let lo = if v == 0 {
            0.0
        } else {
            normal_cdf((v as f64 - 0.5 - mean) / sd)
        };
        let hi = if v == 255 {
            1.0
        } else {
            normal_cdf((v as f64 + 0.5 - mean) / sd)
        };
        (hi - lo) * n as f64
    };

    // Merge consecutive cells until each bin expects at least 5 samples.
    let mut bins: Vec<(f64, f64)> = Vec::new(); // (expected, observed)
    let mut acc_e = 0.0f64;
    let mut acc_o = 0.0f64;
    for (v, &observed) in hist.iter().enumerate() {
        acc_e += cell_expected(v);
        acc_o += observed as f64;
        if acc_e >= 5.0 {
            bins.push((acc_e, acc_o));
            acc_e = 0.0;
            acc_o = 0.0;
        }
    }
    if acc_e > 0.0 || acc_o > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc_e;
                last.1 += acc_o;
            }
            None => bins.push((acc_e, acc_o)),
        }
    }
    if bins.len() < 2 {
        return true;
    }

    let statistic: f64 = bins.iter().map(|(e, o)| (o - e) * (o - e) / e).sum();
    let dof = (bins.len() - 1) as f64;
    chi_square_sf(statistic, dof) >= alpha
}

fn homogeneous_from_hists(hists: &[ChannelHist; 3], n: usize, alpha: f64) -> bool {
    if n < MIN_TEST_AREA {
        return true;
    }
    hists.iter().all(|h| channel_is_gaussian(h, n, alpha))
}

/// Tests whether an RGB sample set is compatible with a per-channel Gaussian
/// at significance `alpha`. Zero-variance channels and sets smaller than
/// [`MIN_TEST_AREA`] pass automatically.
pub fn gaussian_homogeneity_test(pixels: &[Rgb], alpha: f64) -> bool {
    assert!(
        !pixels.is_empty(),
        "homogeneity test needs at least one pixel"
    );
    let mut hists = [[0u32; 256]; 3];
    for p in pixels {
        hists[0][p.r as usize] += 1;
        hists[1][p.g as usize] += 1;
        hists[2][p.b as usize] += 1;
    }
    homogeneous_from_hists(&hists, pixels.len(), alpha)
}

fn hist_mean(hist: &ChannelHist, n: usize) -> f64 {
    hist.iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum::<f64>()
        / n as f64
}

/// Recursive four-way decomposition. A region is a leaf iff it passes the
/// homogeneity test or any child of the floor/ceil split would fall below
/// `min_area`. Leaves are returned in raster-scan order of their origin.
pub fn quadtree_decompose(raster: &Raster, min_area: usize, alpha: f64) -> Signature {
    let min_area = min_area.max(1);
    let mut regions = Vec::new();
    let mut stack = vec![(0usize, 0usize, raster.width(), raster.height())];

    while let Some((x, y, w, h)) = stack.pop() {
        let n = w * h;
        let hists = histograms_of_region(raster, x, y, w, h);
        let homogeneous = homogeneous_from_hists(&hists, n, alpha);

        let (w1, h1) = (w / 2, h / 2);
        if homogeneous || w1 * h1 < min_area {
            let mean_rgb = [
                hist_mean(&hists[0], n),
                hist_mean(&hists[1], n),
                hist_mean(&hists[2], n),
            ];
            regions.push(QuadRegion {
                x,
                y,
                w,
                h,
                homogeneous,
                mean_rgb,
            });
        } else {
            let (w2, h2) = (w - w1, h - h1);
            stack.push((x, y, w1, h1));
            stack.push((x + w1, y, w2, h1));
            stack.push((x, y + h1, w1, h2));
            stack.push((x + w1, y + h1, w2, h2));
        }
    }

    regions.sort_by_key(|r| (r.y, r.x));
    Signature {
        width: raster.width(),
        height: raster.height(),
        regions,
    }
}

/// Distance choice for colour merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMetric {
    Manhattan,
    Euclidean,
}

impl std::str::FromStr for DistanceMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "manhattan" => Ok(DistanceMetric::Manhattan),
            "euclidean" => Ok(DistanceMetric::Euclidean),
            other => Err(format!("unknown distance metric '{other}'")),
        }
    }
}

/// HSV distance with circular hue. The hue difference is normalized by 180
/// degrees so all three components contribute in [0, 1].
pub fn color_distance<T: Real>(a: &HsvTriple<T>, b: &HsvTriple<T>, metric: DistanceMetric) -> T {
    let raw = (a.h - b.h).abs();
    let dh = raw.min(T::of(360.0) - raw) / T::of(180.0);
    let ds = (a.s - b.s).abs();
    let dv = (a.v - b.v).abs();
    match metric {
        DistanceMetric::Manhattan => dh + ds + dv,
        DistanceMetric::Euclidean => (dh * dh + ds * ds + dv * dv).sqrt(),
    }
}

/// A merged colour cluster ranked by total area.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorCluster {
    pub rank: usize,
    /// The seed region's colour, rounded to 8 bits.
    pub rep_rgb: Rgb,
    pub total_area: usize,
    /// Connected fragments of the cluster's pixel mask (4-connectivity).
    pub fragment_count: usize,
    /// Arithmetic mean of the fragments' HSV values.
    pub hsv_mean: [f64; 3],
    /// Population standard deviation of the fragments' HSV values.
    pub hsv_std: [f64; 3],
    /// Indices into the signature's region list.
    pub members: Vec<usize>,
}

/// Greedy area-ranked merging: the largest unassigned homogeneous region
/// seeds a cluster and absorbs every unassigned region within `threshold`
/// of the seed (comparison is to the seed only, no transitive closure).
pub fn merge_regions(
    sig: &Signature,
    metric: DistanceMetric,
    threshold: f64,
) -> Result<Vec<ColorCluster>, QuadtreeError> {
    let mut order: Vec<usize> = (0..sig.regions.len())
        .filter(|&i| sig.regions[i].homogeneous)
        .collect();
    if order.is_empty() {
        return Err(QuadtreeError::EmptySignature);
    }
    // Area descending; ties by raster-scan order of the region origin.
    order.sort_by_key(|&i| {
        let r = &sig.regions[i];
        (std::cmp::Reverse(r.area()), r.y, r.x)
    });

    let hsv: Vec<HsvTriple<f64>> = sig.regions.iter().map(|r| r.hsv()).collect();
    let mut assigned = vec![false; sig.regions.len()];
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();

    for pos in 0..order.len() {
        let seed = order[pos];
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut members = vec![seed];
        for &candidate in &order[pos + 1..] {
            if assigned[candidate] {
                continue;
            }
            if color_distance(&hsv[seed], &hsv[candidate], metric) <= threshold {
                assigned[candidate] = true;
                members.push(candidate);
            }
        }
        groups.push((seed, members));
    }

    let mut clusters: Vec<ColorCluster> = groups
        .into_iter()
        .map(|(seed, members)| build_cluster(sig, seed, members))
        .collect();
    clusters.sort_by_key(|c| std::cmp::Reverse(c.total_area));
    for (rank, cluster) in clusters.iter_mut().enumerate() {
        cluster.rank = rank;
    }
    Ok(clusters)
}

fn build_cluster(sig: &Signature, seed: usize, members: Vec<usize>) -> ColorCluster {
    let (w, h) = (sig.width, sig.height);
    let mut mask = vec![0u8; w * h];
    let mut total_area = 0usize;
    for &m in &members {
        let r = &sig.regions[m];
        total_area += r.area();
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                mask[y * w + x] = 1;
            }
        }
    }

    let labels = connected_components(w, h, &mask, Connectivity::Four);
    let n_labels = labels.component_count() as usize;
    // Per-fragment accumulation of the signature colour (each pixel carries
    // its region's mean).
    let mut rgb_sum = vec![[0f64; 3]; n_labels];
    let mut px_count = vec![0usize; n_labels];
    for &m in &members {
        let r = &sig.regions[m];
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                let label = labels.label(x, y) as usize;
                for (sum, mean) in rgb_sum[label].iter_mut().zip(&r.mean_rgb) {
                    *sum += mean;
                }
                px_count[label] += 1;
            }
        }
    }

    let fragment_hsv: Vec<HsvTriple<f64>> = (0..n_labels)
        .filter(|&l| px_count[l] > 0)
        .map(|l| {
            let n = px_count[l] as f64;
            rgbf_to_hsv(rgb_sum[l][0] / n, rgb_sum[l][1] / n, rgb_sum[l][2] / n)
        })
        .collect();
    let fragment_count = fragment_hsv.len();

    let mut hsv_mean = [0f64; 3];
    for f in &fragment_hsv {
        hsv_mean[0] += f.h;
        hsv_mean[1] += f.s;
        hsv_mean[2] += f.v;
    }
    for m in &mut hsv_mean {
        *m /= fragment_count as f64;
    }
    let mut hsv_var = [0f64; 3];
    for f in &fragment_hsv {
        hsv_var[0] += (f.h - hsv_mean[0]).powi(2);
        hsv_var[1] += (f.s - hsv_mean[1]).powi(2);
        hsv_var[2] += (f.v - hsv_mean[2]).powi(2);
    }
    let hsv_std = [
        (hsv_var[0] / fragment_count as f64).sqrt(),
        (hsv_var[1] / fragment_count as f64).sqrt(),
        (hsv_var[2] / fragment_count as f64).sqrt(),
    ];

    let seed_rgb = sig.regions[seed].mean_rgb;
    let rep_rgb = Rgb::new(
        seed_rgb[0].round().clamp(0.0, 255.0) as u8,
        seed_rgb[1].round().clamp(0.0, 255.0) as u8,
        seed_rgb[2].round().clamp(0.0, 255.0) as u8,
    );

    ColorCluster {
        rank: 0,
        rep_rgb,
        total_area,
        fragment_count,
        hsv_mean,
        hsv_std,
        members,
    }
}

/// The 56-element homogeneity feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HfVector<T: Real> {
    pub values: [T; HF_LEN],
}

/// Fills the fixed HF layout from area-ranked clusters: five slots of
/// (area, fragments, R, G, B) per colour, then six HSV statistics per
/// colour, then the count of fragments in clusters ranked beyond five.
pub fn extract_hf<T: Real>(clusters: &[ColorCluster]) -> HfVector<T> {
    let mut values = [T::zero(); HF_LEN];
    for (k, cluster) in clusters.iter().take(HF_COLOURS).enumerate() {
        let base = 5 * k;
        values[base] = T::of_usize(cluster.total_area);
        values[base + 1] = T::of_usize(cluster.fragment_count);
        values[base + 2] = T::of_u8(cluster.rep_rgb.r);
        values[base + 3] = T::of_u8(cluster.rep_rgb.g);
        values[base + 4] = T::of_u8(cluster.rep_rgb.b);

        let stats = 25 + 6 * k;
        values[stats] = T::of(cluster.hsv_mean[0]);
        values[stats + 1] = T::of(cluster.hsv_mean[1]);
        values[stats + 2] = T::of(cluster.hsv_mean[2]);
        values[stats + 3] = T::of(cluster.hsv_std[0]);
        values[stats + 4] = T::of(cluster.hsv_std[1]);
        values[stats + 5] = T::of(cluster.hsv_std[2]);
    }
    let unranked: usize = clusters
        .iter()
        .skip(HF_COLOURS)
        .map(|c| c.fragment_count)
        .sum();
    values[HF_LEN - 1] = T::of_usize(unranked);
    HfVector { values }
}

/// Column names matching the HF layout.
pub fn hf_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(HF_LEN);
    for k in 0..HF_COLOURS {
        names.push(format!("c{k}_area"));
        names.push(format!("c{k}_fragments"));
        names.push(format!("c{k}_r"));
        names.push(format!("c{k}_g"));
        names.push(format!("c{k}_b"));
    }
    for k in 0..HF_COLOURS {
        for stat in ["h_mean", "s_mean", "v_mean", "h_std", "s_std", "v_std"] {
            names.push(format!("c{k}_{stat}"));
        }
    }
    names.push("unranked_fragments".to_string());
    names
}

/// Paints each homogeneous region with its mean colour; non-homogeneous
/// leaves are painted black.
pub fn render_signature(sig: &Signature) -> Raster {
    let mut raster = Raster::filled(sig.width, sig.height, Rgb::grey(0)).expect("non-empty");
    for r in &sig.regions {
        if !r.homogeneous {
            continue;
        }
        let colour = Rgb::new(
            r.mean_rgb[0].round().clamp(0.0, 255.0) as u8,
            r.mean_rgb[1].round().clamp(0.0, 255.0) as u8,
            r.mean_rgb[2].round().clamp(0.0, 255.0) as u8,
        );
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                raster.set(x, y, colour);
            }
        }
    }
    raster
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_region_is_homogeneous() {
        let pixels = vec![Rgb::new(9, 120, 250); 400];
        assert!(gaussian_homogeneity_test(&pixels, 0.05));
        // Tiny regions pass automatically.
        let noisy: Vec<Rgb> = (0..10).map(|i| Rgb::grey((i * 25) as u8)).collect();
        assert!(gaussian_homogeneity_test(&noisy, 0.05));
    }

    #[test]
    fn bimodal_region_is_rejected() {
        let mut pixels = vec![Rgb::grey(0); 512];
        pixels.extend(vec![Rgb::grey(255); 512]);
        assert!(!gaussian_homogeneity_test(&pixels, 0.05));
    }

    #[test]
    fn constant_raster_decomposes_to_one_region() {
        let raster = Raster::filled(64, 64, Rgb::new(40, 90, 160)).unwrap();
        let sig = quadtree_decompose(&raster, 64, 0.05);
        assert_eq!(sig.regions().len(), 1);
        assert!(sig.regions()[0].homogeneous);
        assert_eq!(sig.regions()[0].mean_rgb, [40.0, 90.0, 160.0]);
    }

    fn four_quadrant_raster(size: usize) -> Raster {
        let colours = [
            Rgb::new(200, 30, 30),
            Rgb::new(30, 200, 30),
            Rgb::new(30, 30, 200),
            Rgb::new(200, 200, 30),
        ];
        let half = size / 2;
        let mut raster = Raster::filled(size, size, Rgb::grey(0)).unwrap();
        for y in 0..size {
            for x in 0..size {
                let q = (y >= half) as usize * 2 + (x >= half) as usize;
                raster.set(x, y, colours[q]);
            }
        }
        raster
    }

    #[test]
    fn quadrants_split_once() {
        let raster = four_quadrant_raster(64);
        let sig = quadtree_decompose(&raster, 16, 0.05);
        assert_eq!(sig.regions().len(), 4);
        assert!(sig.regions().iter().all(|r| r.homogeneous));
        assert!(sig.regions().iter().all(|r| r.area() == 32 * 32));
    }

    #[test]
    fn tiling_validation() {
        let ok = Signature::new(
            2,
            1,
            vec![
                QuadRegion {
                    x: 0,
                    y: 0,
                    w: 1,
                    h: 1,
                    homogeneous: true,
                    mean_rgb: [0.0; 3],
                },
                QuadRegion {
                    x: 1,
                    y: 0,
                    w: 1,
                    h: 1,
                    homogeneous: true,
                    mean_rgb: [0.0; 3],
                },
            ],
        );
        assert!(ok.is_ok());

        let overlap = Signature::new(
            2,
            1,
            vec![
                QuadRegion {
                    x: 0,
                    y: 0,
                    w: 2,
                    h: 1,
                    homogeneous: true,
                    mean_rgb: [0.0; 3],
                },
                QuadRegion {
                    x: 1,
                    y: 0,
                    w: 1,
                    h: 1,
                    homogeneous: true,
                    mean_rgb: [0.0; 3],
                },
            ],
        );
        assert!(overlap.is_err());
    }

    #[test]
    fn distance_is_circular_in_hue() {
        let a = HsvTriple {
            h: 0.0f64,
            s: 1.0,
            v: 1.0,
        };
        let b = HsvTriple {
            h: 350.0f64,
            s: 1.0,
            v: 1.0,
        };
        let d = color_distance(&a, &b, DistanceMetric::Manhattan);
        assert!((d - 10.0 / 180.0).abs() < 1e-12);
        assert_eq!(color_distance(&a, &a, DistanceMetric::Euclidean), 0.0);
        assert_eq!(color_distance(&a, &a, DistanceMetric::Manhattan), 0.0);
    }

    fn region(x: usize, w: usize, mean: [f64; 3]) -> QuadRegion {
        QuadRegion {
            x,
            y: 0,
            w,
            h: 10,
            homogeneous: true,
            mean_rgb: mean,
        }
    }

    /// Greedy absorption compares to the seed only: B joins A, C (close to B
    /// but far from A) starts its own cluster.
    #[test]
    fn merge_is_seeded_not_transitive() {
        // Hues 0, 30 and 55 degrees at full saturation/value.
        let sig = Signature::new(
            16,
            10,
            vec![
                region(0, 10, [255.0, 0.0, 0.0]),
                region(10, 5, [255.0, 127.5, 0.0]),
                region(15, 1, [255.0, 233.75, 0.0]),
            ],
        )
        .unwrap();
        let clusters = merge_regions(&sig, DistanceMetric::Euclidean, 0.2).unwrap();
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].total_area, 150);
        assert_eq!(clusters[0].members.len(), 2);
        assert_eq!(clusters[1].total_area, 10);
        // Rep colour is the seed's.
        assert_eq!(clusters[0].rep_rgb, Rgb::new(255, 0, 0));
    }

    #[test]
    fn merge_of_identical_colours_is_one_cluster() {
        let sig = Signature::new(
            16,
            10,
            vec![
                region(0, 8, [10.0, 10.0, 10.0]),
                region(8, 8, [10.0, 10.0, 10.0]),
            ],
        )
        .unwrap();
        let clusters = merge_regions(&sig, DistanceMetric::Manhattan, 0.01).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].total_area, 160);
        // Adjacent regions fuse into a single fragment.
        assert_eq!(clusters[0].fragment_count, 1);
    }

    #[test]
    fn distant_colours_stay_apart() {
        let sig = Signature::new(
            16,
            10,
            vec![
                region(0, 8, [255.0, 0.0, 0.0]),
                region(8, 8, [0.0, 0.0, 255.0]),
            ],
        )
        .unwrap();
        let clusters = merge_regions(&sig, DistanceMetric::Euclidean, 0.2).unwrap();
        assert_eq!(clusters.len(), 2);
    }

    #[test]
    fn empty_signature_is_an_error() {
        let sig = Signature::new(
            4,
            4,
            vec![QuadRegion {
                x: 0,
                y: 0,
                w: 4,
                h: 4,
                homogeneous: false,
                mean_rgb: [0.0; 3],
            }],
        )
        .unwrap();
        assert_eq!(
            merge_regions(&sig, DistanceMetric::Euclidean, 0.1),
            Err(QuadtreeError::EmptySignature)
        );
    }

    #[test]
    fn hf_of_single_colour_image() {
        let raster = Raster::filled(32, 32, Rgb::new(120, 40, 200)).unwrap();
        let sig = quadtree_decompose(&raster, 16, 0.05);
        let clusters = merge_regions(&sig, DistanceMetric::Euclidean, 0.1).unwrap();
        let hf = extract_hf::<f64>(&clusters);
        assert_eq!(hf.values[0], 1024.0); // colour-0 area
        assert_eq!(hf.values[1], 1.0); // one fragment
        // Colours 1..4 empty, unranked count zero.
        assert!(hf.values[5..25].iter().all(|&v| v == 0.0));
        assert_eq!(hf.values[55], 0.0);
        // Single fragment: zero HSV deviations.
        assert_eq!(hf.values[28..31], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn unranked_fragments_accumulate() {
        // Seven clusters with fragment counts 1.. then 3 and 2 at ranks 5, 6.
        let clusters: Vec<ColorCluster> = (0..7)
            .map(|i| ColorCluster {
                rank: i,
                rep_rgb: Rgb::grey(0),
                total_area: 100 - i,
                fragment_count: match i {
                    5 => 3,
                    6 => 2,
                    _ => 1,
                },
                hsv_mean: [0.0; 3],
                hsv_std: [0.0; 3],
                members: vec![],
            })
            .collect();
        let hf = extract_hf::<f64>(&clusters);
        assert_eq!(hf.values[55], 5.0);
    }

    #[test]
    fn hf_names_match_layout() {
        let names = hf_feature_names();
        assert_eq!(names.len(), HF_LEN);
        assert_eq!(names[0], "c0_area");
        assert_eq!(names[2], "c0_r");
        assert_eq!(names[25], "c0_h_mean");
        assert_eq!(names[55], "unranked_fragments");
    }

    #[test]
    fn render_constant_signature_reproduces_input() {
        let raster = Raster::filled(16, 16, Rgb::new(77, 88, 99)).unwrap();
        let sig = quadtree_decompose(&raster, 4, 0.05);
        assert_eq!(render_signature(&sig), raster);
    }

    #[test]
    fn render_paints_non_homogeneous_black() {
        let sig = Signature::new(
            4,
            4,
            vec![QuadRegion {
                x: 0,
                y: 0,
                w: 4,
                h: 4,
                homogeneous: false,
                mean_rgb: [200.0; 3],
            }],
        )
        .unwrap();
        let rendered = render_signature(&sig);
        assert!(rendered.pixels().iter().all(|&p| p == Rgb::grey(0)));
    }

    #[test]
    fn region_table_lists_every_region() {
        let raster = four_quadrant_raster(32);
        let sig = quadtree_decompose(&raster, 16, 0.05);
        let table = sig.to_region_table();
        assert_eq!(table.lines().count(), 1 + sig.regions().len());
    }
}
