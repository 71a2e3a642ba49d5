//! Voxel chains and the structural checks every voxelizer output must pass.

use std::collections::HashMap;
use std::fmt;

use crate::geometry::{round_point, Line, Segment, Voxel};
use crate::parametric::chain_length_bounds;

/// Largest admissible distance from a chain voxel's centre to the source
/// line: half the diagonal of a unit cube.
pub const MAX_CENTER_DISTANCE: f64 = 0.866_025_403_784_438_6 + 1e-9;

/// Ordered, duplicate-free voxel sequence approximating one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelChain {
    voxels: Vec<Voxel>,
    source: Segment,
}

impl VoxelChain {
    /// Wraps a voxel sequence without validating it; see [`check_chain`].
    pub fn from_parts(source: Segment, voxels: Vec<Voxel>) -> Self {
        VoxelChain { voxels, source }
    }

    pub fn voxels(&self) -> &[Voxel] {
        &self.voxels
    }

    pub fn source(&self) -> &Segment {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }

    pub fn first(&self) -> Option<Voxel> {
        self.voxels.first().copied()
    }

    pub fn last(&self) -> Option<Voxel> {
        self.voxels.last().copied()
    }

    pub fn into_voxels(self) -> Vec<Voxel> {
        self.voxels
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainDefect {
    Empty,
    EndpointOutOfRange,
    ConsecutiveDuplicate { index: usize },
    Disconnected { index: usize },
    WrongStart { expected: Voxel, found: Voxel },
    WrongEnd { expected: Voxel, found: Voxel },
    NonMonotone { index: usize, axis: usize },
    LengthOutOfBounds { len: usize, min: usize, max: usize },
    TooFarFromLine { index: usize, distance: f64 },
}

impl fmt::Display for ChainDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainDefect::Empty => write!(f, "chain is empty"),
            ChainDefect::EndpointOutOfRange => write!(f, "segment endpoint is not addressable"),
            ChainDefect::ConsecutiveDuplicate { index } => {
                write!(f, "voxel {index} repeats its predecessor")
            }
            ChainDefect::Disconnected { index } => {
                write!(f, "voxel {index} is not 26-adjacent to its predecessor")
            }
            ChainDefect::WrongStart { expected, found } => {
                write!(f, "chain starts at {found}, expected {expected}")
            }
            ChainDefect::WrongEnd { expected, found } => {
                write!(f, "chain ends at {found}, expected {expected}")
            }
            ChainDefect::NonMonotone { index, axis } => {
                write!(f, "axis {axis} reverses direction at voxel {index}")
            }
            ChainDefect::LengthOutOfBounds { len, min, max } => {
                write!(f, "chain length {len} outside [{min}, {max}]")
            }
            ChainDefect::TooFarFromLine { index, distance } => {
                write!(f, "voxel {index} is {distance} from the line")
            }
        }
    }
}

fn axes(v: Voxel) -> [i32; 3] {
    [v.x, v.y, v.z]
}

/// Checks connectivity, endpoints, per-axis monotonicity, absence of
/// consecutive duplicates, the length bounds and the centre-distance bound.
pub fn check_chain(chain: &VoxelChain) -> Result<(), ChainDefect> {
    let voxels = chain.voxels();
    let seg = chain.source();
    let (Some(&first), Some(&last)) = (voxels.first(), voxels.last()) else {
        return Err(ChainDefect::Empty);
    };

    let start = round_point(seg.start()).map_err(|_| ChainDefect::EndpointOutOfRange)?;
    let end = round_point(seg.end()).map_err(|_| ChainDefect::EndpointOutOfRange)?;
    if first != start {
        return Err(ChainDefect::WrongStart {
            expected: start,
            found: first,
        });
    }
    if last != end {
        return Err(ChainDefect::WrongEnd {
            expected: end,
            found: last,
        });
    }

    let dir = seg.direction().to_array();
    for (i, pair) in voxels.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            return Err(ChainDefect::ConsecutiveDuplicate { index: i + 1 });
        }
        if !a.is_adjacent(b) {
            return Err(ChainDefect::Disconnected { index: i + 1 });
        }
        for (axis, (&ca, &cb)) in axes(a).iter().zip(axes(b).iter()).enumerate() {
            let ok = if dir[axis] >= 0.0 { cb >= ca } else { cb <= ca };
            if !ok {
                return Err(ChainDefect::NonMonotone { index: i + 1, axis });
            }
        }
    }

    let (min, max) = chain_length_bounds(seg);
    if voxels.len() < min || voxels.len() > max {
        return Err(ChainDefect::LengthOutOfBounds {
            len: voxels.len(),
            min,
            max,
        });
    }

    if let Ok(line) = Line::through(seg) {
        for (index, v) in voxels.iter().enumerate() {
            let distance = line.distance(v.center());
            if distance > MAX_CENTER_DISTANCE {
                return Err(ChainDefect::TooFarFromLine { index, distance });
            }
        }
    }
    Ok(())
}

/// First interior voxel that does not have exactly two 26-adjacent voxels
/// in the chain (its predecessor and successor). Returns the voxel index and
/// the number of adjacent chain voxels found.
pub fn interior_violation(chain: &VoxelChain) -> Option<(usize, usize)> {
    let voxels = chain.voxels();
    if voxels.len() < 3 {
        return None;
    }
    let index: HashMap<Voxel, usize> = voxels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for (i, &v) in voxels.iter().enumerate().take(voxels.len() - 1).skip(1) {
        let mut neighbours = 0;
        let mut has_prev = false;
        let mut has_next = false;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let Some(n) = v.checked_add(Voxel::new(dx, dy, dz)) else {
                        continue;
                    };
                    if let Some(&j) = index.get(&n) {
                        neighbours += 1;
                        has_prev |= j + 1 == i;
                        has_next |= j == i + 1;
                    }
                }
            }
        }
        if neighbours != 2 || !has_prev || !has_next {
            return Some((i, neighbours));
        }
    }
    None
}

/// Number of voxels that could be dropped without breaking connectivity,
/// i.e. positions `i` where voxels `i - 1` and `i + 1` are already adjacent.
pub fn skippable_voxels(chain: &VoxelChain) -> usize {
    chain
        .voxels()
        .windows(3)
        .filter(|w| w[0].is_adjacent(w[2]))
        .count()
}

/// Removes consecutive repeats in place.
pub(crate) fn dedup_consecutive(voxels: &mut Vec<Voxel>) {
    voxels.dedup();
}
