//! Connected-component labelling over equal-valued cells.

use crate::raster::Plane;

/// Pixel adjacency rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Dense component labels in first-encounter raster-scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    component_count: u32,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn component_count(&self) -> u32 {
        self.component_count
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        Self { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let grand = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = grand;
            a = grand;
        }
        a
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Keep the smaller root so first-encounter order survives merging.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass labelling of a value grid: two cells share a label iff they are
/// connected through equal values under `connectivity`. Labels are dense and
/// assigned in the raster-scan order of each component's first pixel.
pub fn connected_components<V: Eq>(
    width: usize,
    height: usize,
    values: &[V],
    connectivity: Connectivity,
) -> LabelMap {
    assert_eq!(values.len(), width * height, "grid length mismatch");

    let mut provisional = vec![u32::MAX; values.len()];
    let mut uf = UnionFind::new();

    for y in 0..height {
        for x in 0..width {
            let idx = y * width + x;
            // Already-visited neighbours: W, NW, N, NE.
            let mut earlier: [Option<usize>; 4] = [None; 4];
            if x > 0 {
                earlier[0] = Some(idx - 1);
            }
            if y > 0 {
                earlier[1] = Some(idx - width);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        earlier[2] = Some(idx - width - 1);
                    }
                    if x + 1 < width {
                        earlier[3] = Some(idx - width + 1);
                    }
                }
            }

            let mut label = None;
            for n in earlier.into_iter().flatten() {
                if values[n] == values[idx] {
                    let n_label = provisional[n];
                    match label {
                        None => label = Some(n_label),
                        Some(l) => uf.union(l, n_label),
                    }
                }
            }
            provisional[idx] = match label {
                Some(l) => l,
                None => uf.make(),
            };
        }
    }

    // Renumber roots densely by the raster-scan order of first occurrence.
    let mut remap = vec![u32::MAX; uf.parent.len()];
    let mut next = 0u32;
    let mut labels = vec![0u32; values.len()];
    for (idx, &p) in provisional.iter().enumerate() {
        let root = uf.find(p);
        if remap[root as usize] == u32::MAX {
            remap[root as usize] = next;
            next += 1;
        }
        labels[idx] = remap[root as usize];
    }

    LabelMap {
        width,
        height,
        labels,
        component_count: next,
    }
}

/// Labels an intensity plane.
pub fn label_plane(plane: &Plane, connectivity: Connectivity) -> LabelMap {
    connected_components(plane.width(), plane.height(), plane.values(), connectivity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_grid_is_one_component() {
        let map = connected_components(4, 3, &[7u8; 12], Connectivity::Four);
        assert_eq!(map.component_count(), 1);
        assert!(map.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn checkerboard_connectivity() {
        let grid = [0u8, 1, 1, 0];
        let four = connected_components(2, 2, &grid, Connectivity::Four);
        assert_eq!(four.component_count(), 4);
        let eight = connected_components(2, 2, &grid, Connectivity::Eight);
        assert_eq!(eight.component_count(), 2);
    }

    #[test]
    fn labels_follow_first_encounter_order() {
        // Component of the top-left pixel must be label 0, next new one 1, ...
        let grid = [5u8, 9, 5, 9, 5, 9];
        let map = connected_components(3, 2, &grid, Connectivity::Four);
        assert_eq!(map.label(0, 0), 0);
        assert_eq!(map.label(1, 0), 1);
        assert_eq!(map.label(2, 0), 2);
        assert_eq!(map.component_count(), 6);
    }

    #[test]
    fn u_shape_merges_across_scan() {
        // Two arms joined at the bottom: union-find must collapse to one label.
        let grid = [
            1, 0, 1, //
            1, 0, 1, //
            1, 1, 1, //
        ];
        let map = connected_components(3, 3, &grid, Connectivity::Four);
        assert_eq!(map.component_count(), 2);
        assert_eq!(map.label(0, 0), map.label(2, 0));
    }
}
