use thiserror::Error;

use crate::grammar::Aabb;

pub const DEFAULT_VOXEL_RES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoxelError {
    #[error("voxel resolution must be at least 1")]
    ZeroResolution,
    #[error("voxel resolutions differ: {0} vs {1}")]
    ResolutionMismatch(usize, usize),
}

/// Occupancy over `R³` cells tiling `[-1, 1]³`; cell `(i, j, k)` has bit
/// index `(i·R + j)·R + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoxelGrid {
    resolution: usize,
    bits: Vec<u64>,
}

impl VoxelGrid {
    pub fn empty(resolution: usize) -> Result<Self, VoxelError> {
        if resolution == 0 {
            return Err(VoxelError::ZeroResolution);
        }
        let cells = resolution.pow(3);
        Ok(Self {
            resolution,
            bits: vec![0; cells.div_ceil(64)],
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Center coordinate of cell `i` along one axis.
    pub fn cell_center(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * 2.0 / self.resolution as f64
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.resolution + j) * self.resolution + k
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize) {
        let n = self.index(i, j, k);
        self.bits[n / 64] |= 1 << (n % 64);
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        let n = self.index(i, j, k);
        self.bits[n / 64] >> (n % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn combine(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<usize, VoxelError> {
        if self.resolution != other.resolution {
            return Err(VoxelError::ResolutionMismatch(
                self.resolution,
                other.resolution,
            ));
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| f(*a, *b).count_ones() as usize)
            .sum())
    }

    pub fn intersection_count(&self, other: &Self) -> Result<usize, VoxelError> {
        self.combine(other, |a, b| a & b)
    }

    pub fn union_count(&self, other: &Self) -> Result<usize, VoxelError> {
        self.combine(other, |a, b| a | b)
    }
}

/// Marks every cell whose center lies inside some box (closed bounds).
pub fn voxelize(boxes: &[Aabb], resolution: usize) -> Result<VoxelGrid, VoxelError> {
    let mut grid = VoxelGrid::empty(resolution)?;
    for b in boxes {
        let (min, max) = (b.min(), b.max());
        let axis: Vec<Vec<usize>> = (0..3)
            .map(|a| {
                (0..resolution)
                    .filter(|&i| {
                        let c = grid.cell_center(i);
                        min[a] <= c && c <= max[a]
                    })
                    .collect()
            })
            .collect();
        for &i in &axis[0] {
            for &j in &axis[1] {
                for &k in &axis[2] {
                    grid.set(i, j, k);
                }
            }
        }
    }
    Ok(grid)
}

/// `|gt ∩ pred| / |gt|`, or 1 for an empty ground truth.
pub fn voxel_recall(gt: &VoxelGrid, pred: &VoxelGrid) -> Result<f64, VoxelError> {
    let inter = gt.intersection_count(pred)?;
    let total = gt.count();
    Ok(if total == 0 {
        1.0
    } else {
        inter as f64 / total as f64
    })
}

/// `|gt ∩ pred| / |gt ∪ pred|`, or 1 when both are empty.
pub fn voxel_iou(gt: &VoxelGrid, pred: &VoxelGrid) -> Result<f64, VoxelError> {
    let inter = gt.intersection_count(pred)?;
    let union = gt.union_count(pred)?;
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_empty() {
        assert_eq!(voxelize(&[Aabb::full()], 5).unwrap().count(), 125);
        assert_eq!(voxelize(&[], 5).unwrap().count(), 0);
        assert_eq!(voxelize(&[], 0), Err(VoxelError::ZeroResolution));
    }

    #[test]
    fn octant_at_four() {
        let octant = Aabb::new([0.0; 3], [1.0; 3]).unwrap();
        let g = voxelize(&[octant], 4).unwrap();
        assert_eq!(g.count(), 8);
        assert!(g.get(2, 3, 2) && !g.get(1, 3, 2));
    }

    #[test]
    fn ratios() {
        let a = voxelize(&[Aabb::new([-1.0; 3], [0.0; 3]).unwrap()], 4).unwrap();
        let full = voxelize(&[Aabb::full()], 4).unwrap();
        let empty = VoxelGrid::empty(4).unwrap();
        assert_eq!(voxel_recall(&a, &full).unwrap(), 1.0);
        assert_eq!(voxel_iou(&a, &a).unwrap(), 1.0);
        assert_eq!(voxel_iou(&a, &full).unwrap(), 0.125);
        assert_eq!(voxel_recall(&empty, &a).unwrap(), 1.0);
        assert_eq!(voxel_iou(&empty, &empty).unwrap(), 1.0);
        assert_eq!(
            voxel_iou(&a, &VoxelGrid::empty(8).unwrap()),
            Err(VoxelError::ResolutionMismatch(4, 8))
        );
    }
}
