//! Flat grey-level morphology with digital hexagons.
//!
//! The hexagonal grid is emulated on the square raster with row-parity
//! offsets (odd rows shifted half a pixel right), so a structuring element
//! carries one displacement set per centre-row parity. A radius-r element is
//! the r-fold unit-hexagon dilation of the origin, which makes the family
//! nested and the opening family a granulometry. Borders are handled by edge
//! replication; for hexagonal balls that coincides with restricting the
//! neighbourhood to the image window, so openings and closings keep their
//! algebraic properties exactly.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use thiserror::Error;

use crate::raster::Plane;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphologyError {
    #[error("structuring element radius must be at least 1")]
    ZeroRadius,
}

/// Digital hexagon of a given radius.
///
/// `even`/`odd` hold the pixel displacements that cover the hexagonal ball
/// for centres on even and odd rows respectively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    radius: usize,
    even: Vec<(i32, i32)>,
    odd: Vec<(i32, i32)>,
}

impl StructuringElement {
    /// Builds the radius-`r` hexagon by iterating the unit 6-neighbourhood.
    pub fn hexagon(radius: usize) -> Result<Self, MorphologyError> {
        if radius == 0 {
            return Err(MorphologyError::ZeroRadius);
        }
        Ok(Self {
            radius,
            even: hex_ball(radius, 0),
            odd: hex_ball(radius, 1),
        })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Displacements for a centre on a row of the given parity.
    #[inline]
    pub fn offsets_for_row(&self, y: usize) -> &[(i32, i32)] {
        if y.is_multiple_of(2) {
            &self.even
        } else {
            &self.odd
        }
    }

    pub fn offsets_even(&self) -> &[(i32, i32)] {
        &self.even
    }

    pub fn offsets_odd(&self) -> &[(i32, i32)] {
        &self.odd
    }
}

/// Hexagonal ball of `radius` around the origin for a centre row of parity
/// `centre_parity`, as sorted pixel displacements.
fn hex_ball(radius: usize, centre_parity: i32) -> Vec<(i32, i32)> {
    let mut cells: BTreeSet<(i32, i32)> = BTreeSet::new();
    cells.insert((0, 0));
    for _ in 0..radius {
        let snapshot: Vec<(i32, i32)> = cells.iter().copied().collect();
        for (dx, dy) in snapshot {
            for n in unit_neighbours(dx, dy, centre_parity) {
                cells.insert(n);
            }
        }
    }
    cells.into_iter().collect()
}

/// The six hexagonal neighbours of a cell, given the parity of the centre row
/// the displacement is measured from.
fn unit_neighbours(dx: i32, dy: i32, centre_parity: i32) -> [(i32, i32); 6] {
    let row_parity = (centre_parity + dy).rem_euclid(2);
    let shift = if row_parity == 0 { -1 } else { 1 };
    [
        (dx - 1, dy),
        (dx + 1, dy),
        (dx, dy - 1),
        (dx, dy + 1),
        (dx + shift, dy - 1),
        (dx + shift, dy + 1),
    ]
}

fn morph(plane: &Plane, se: &StructuringElement, take_min: bool) -> Plane {
    let (w, h) = (plane.width(), plane.height());
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let offsets = se.offsets_for_row(y);
        for x in 0..w {
            let mut acc = if take_min { u8::MAX } else { u8::MIN };
            for &(dx, dy) in offsets {
                let v = plane.get_clamped(x as isize + dx as isize, y as isize + dy as isize);
                acc = if take_min { acc.min(v) } else { acc.max(v) };
            }
            out.push(acc);
        }
    }
    Plane::new(w, h, out).expect("same dimensions")
}

/// Grey-level erosion: pointwise minimum over the structuring element.
pub fn erode(plane: &Plane, se: &StructuringElement) -> Plane {
    morph(plane, se, true)
}

/// Grey-level dilation: pointwise maximum over the structuring element.
pub fn dilate(plane: &Plane, se: &StructuringElement) -> Plane {
    morph(plane, se, false)
}

fn unit_hexagon() -> &'static StructuringElement {
    static UNIT: OnceLock<StructuringElement> = OnceLock::new();
    UNIT.get_or_init(|| StructuringElement::hexagon(1).expect("radius 1"))
}

fn erode_steps(plane: &Plane, steps: usize) -> Plane {
    let mut out = plane.clone();
    for _ in 0..steps {
        out = erode(&out, unit_hexagon());
    }
    out
}

fn dilate_steps(plane: &Plane, steps: usize) -> Plane {
    let mut out = plane.clone();
    for _ in 0..steps {
        out = dilate(&out, unit_hexagon());
    }
    out
}

/// Morphological opening of size `r`: erosion then dilation with the same
/// hexagon. Computed as iterated unit steps, which is equivalent because
/// radius-r hexagons are r-fold unit dilations.
pub fn open(plane: &Plane, r: usize) -> Plane {
    dilate_steps(&erode_steps(plane, r), r)
}

/// Morphological closing of size `r`: dilation then erosion.
pub fn close(plane: &Plane, r: usize) -> Plane {
    erode_steps(&dilate_steps(plane, r), r)
}

/// Openings of sizes `1..=max_size`, sharing the incremental erosion chain.
pub fn opening_family(plane: &Plane, max_size: usize) -> Vec<Plane> {
    let mut out = Vec::with_capacity(max_size);
    let mut eroded = plane.clone();
    for r in 1..=max_size {
        eroded = erode(&eroded, unit_hexagon());
        out.push(dilate_steps(&eroded, r));
    }
    out
}

/// Closings of sizes `1..=max_size`, sharing the incremental dilation chain.
pub fn closing_family(plane: &Plane, max_size: usize) -> Vec<Plane> {
    let mut out = Vec::with_capacity(max_size);
    let mut dilated = plane.clone();
    for r in 1..=max_size {
        dilated = dilate(&dilated, unit_hexagon());
        out.push(erode_steps(&dilated, r));
    }
    out
}

/// Volume of a grey-level function: the sum of all intensities.
pub fn volume(plane: &Plane) -> u64 {
    plane.values().iter().map(|&v| v as u64).sum()
}

/// Nine-number summary of a plane: the minimum followed by the eight k/8
/// quantiles, where quantile k is the sorted value at index
/// `ceil(k*N/8) - 1`.
pub fn octils<T: crate::scalar::Real>(plane: &Plane) -> [T; 9] {
    let mut hist = [0u32; 256];
    for &v in plane.values() {
        hist[v as usize] += 1;
    }
    let n = plane.values().len();

    let mut out = [T::zero(); 9];
    let min = hist
        .iter()
        .position(|&c| c > 0)
        .expect("plane is non-empty");
    out[0] = T::of_u8(min as u8);

    let mut ranks = [0usize; 8];
    for (k, rank) in ranks.iter_mut().enumerate() {
        *rank = ((k + 1) * n).div_ceil(8);
    }
    let mut cum = 0usize;
    let mut next = 0usize;
    for (v, &count) in hist.iter().enumerate() {
        cum += count as usize;
        while next < 8 && ranks[next] <= cum {
            out[next + 1] = T::of_u8(v as u8);
            next += 1;
        }
        if next == 8 {
            break;
        }
    }
    out
}
