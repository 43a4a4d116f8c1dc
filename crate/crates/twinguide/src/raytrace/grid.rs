//! Uniform-grid acceleration for ray/segment intersection.
//!
//! Scene boundaries hold a few hundred short segments; a voxel walk keeps the
//! per-bounce cost at a handful of segment tests while returning exactly the
//! same nearest hit (and tie set) a full linear scan would.

use crate::geometry::{Point2, Scene, Segment, Vec2};

/// One boundary segment tagged with the waveguide outline it belongs to.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BoundarySegment {
    pub seg: Segment,
    pub outline: u8,
}

/// Hits within the coincidence window of the nearest intersection, ordered by
/// segment index. Multiple entries mean the ray pierced overlapping walls
/// (twin outlines share space near the junctions).
#[derive(Debug, Clone)]
pub(crate) struct HitGroup {
    pub t: f64,
    pub segment_indices: Vec<u32>,
}

/// Two intersections closer than this along the ray count as one crossing.
pub(crate) const COINCIDENT_HIT_WINDOW: f64 = 1e-9;

const MIN_RAY_T: f64 = 1e-12;

pub(crate) struct SegmentGrid {
    pub segments: Vec<BoundarySegment>,
    lo: Point2,
    cell: f64,
    nx: i64,
    nz: i64,
    cells: Vec<Vec<u32>>,
}

/// Per-ray scratch space, reused across casts to avoid reallocation.
#[derive(Default)]
pub(crate) struct CastScratch {
    stamps: Vec<u32>,
    epoch: u32,
    hits: Vec<(f64, u32)>,
}

impl SegmentGrid {
    pub fn build(scene: &Scene) -> Self {
        let mut segments = Vec::new();
        for (w, outline) in scene.waveguides.iter().enumerate() {
            for seg in outline.segments() {
                segments.push(BoundarySegment {
                    seg,
                    outline: w as u8,
                });
            }
        }
        let (lo, hi) = scene.bbox();
        let cell = 1.5_f64;
        let nx = (((hi.x - lo.x) / cell).ceil() as i64).clamp(1, 1024);
        let nz = (((hi.z - lo.z) / cell).ceil() as i64).clamp(1, 1024);
        let mut cells = vec![Vec::new(); (nx * nz) as usize];
        for (idx, bs) in segments.iter().enumerate() {
            let (ax, az) = (bs.seg.a.x, bs.seg.a.z);
            let (bx, bz) = (bs.seg.b.x, bs.seg.b.z);
            let ix0 = (((ax.min(bx) - lo.x) / cell).floor() as i64).clamp(0, nx - 1);
            let ix1 = (((ax.max(bx) - lo.x) / cell).floor() as i64).clamp(0, nx - 1);
            let iz0 = (((az.min(bz) - lo.z) / cell).floor() as i64).clamp(0, nz - 1);
            let iz1 = (((az.max(bz) - lo.z) / cell).floor() as i64).clamp(0, nz - 1);
            for ix in ix0..=ix1 {
                for iz in iz0..=iz1 {
                    cells[(iz * nx + ix) as usize].push(idx as u32);
                }
            }
        }
        Self {
            segments,
            lo,
            cell,
            nx,
            nz,
            cells,
        }
    }

    pub fn scratch(&self) -> CastScratch {
        CastScratch {
            stamps: vec![0; self.segments.len()],
            epoch: 0,
            hits: Vec::with_capacity(16),
        }
    }

    /// Nearest forward intersection along `dir` from `origin`, together with
    /// every other segment hit within [`COINCIDENT_HIT_WINDOW`] of it.
    pub fn cast(&self, origin: Point2, dir: Vec2, scratch: &mut CastScratch) -> Option<HitGroup> {
        scratch.epoch = scratch.epoch.wrapping_add(1);
        if scratch.epoch == 0 {
            scratch.stamps.iter_mut().for_each(|s| *s = 0);
            scratch.epoch = 1;
        }
        scratch.hits.clear();
        let epoch = scratch.epoch;

        let mut best_t = f64::INFINITY;
        let test_cell = |cell_idx: usize, scratch: &mut CastScratch, best_t: &mut f64| {
            for &si in &self.cells[cell_idx] {
                let s = si as usize;
                if scratch.stamps[s] == epoch {
                    continue;
                }
                scratch.stamps[s] = epoch;
                if let Some(t) = ray_segment(origin, dir, &self.segments[s].seg) {
                    scratch.hits.push((t, si));
                    if t < *best_t {
                        *best_t = t;
                    }
                }
            }
        };

        // Voxel walk (Amanatides & Woo). The walk may start outside the grid
        // when a refracted ray escaped the boundary region; clamping the entry
        // cell is fine because boundary segments only live inside the bbox.
        let mut ix = (((origin.x - self.lo.x) / self.cell).floor() as i64).clamp(0, self.nx - 1);
        let mut iz = (((origin.z - self.lo.z) / self.cell).floor() as i64).clamp(0, self.nz - 1);
        let step_x: i64 = if dir.x > 0.0 { 1 } else { -1 };
        let step_z: i64 = if dir.z > 0.0 { 1 } else { -1 };
        let next_boundary = |i: i64, step: i64, lo: f64, d: f64, pos: f64| -> f64 {
            if d == 0.0 {
                return f64::INFINITY;
            }
            let edge = lo + (i + if step > 0 { 1 } else { 0 }) as f64 * self.cell;
            (edge - pos) / d
        };
        let mut t_max_x = next_boundary(ix, step_x, self.lo.x, dir.x, origin.x);
        let mut t_max_z = next_boundary(iz, step_z, self.lo.z, dir.z, origin.z);
        if t_max_x < 0.0 {
            t_max_x = f64::INFINITY;
        }
        if t_max_z < 0.0 {
            t_max_z = f64::INFINITY;
        }
        let t_delta_x = if dir.x != 0.0 {
            self.cell / dir.x.abs()
        } else {
            f64::INFINITY
        };
        let t_delta_z = if dir.z != 0.0 {
            self.cell / dir.z.abs()
        } else {
            f64::INFINITY
        };

        loop {
            test_cell((iz * self.nx + ix) as usize, scratch, &mut best_t);
            let t_entry_next = t_max_x.min(t_max_z);
            if t_entry_next > best_t + COINCIDENT_HIT_WINDOW {
                break;
            }
            if t_max_x <= t_max_z {
                ix += step_x;
                t_max_x += t_delta_x;
                if ix < 0 || ix >= self.nx {
                    break;
                }
            } else {
                iz += step_z;
                t_max_z += t_delta_z;
                if iz < 0 || iz >= self.nz {
                    break;
                }
            }
        }

        if best_t.is_infinite() {
            return None;
        }
        let mut indices: Vec<u32> = scratch
            .hits
            .iter()
            .filter(|(t, _)| *t <= best_t + COINCIDENT_HIT_WINDOW)
            .map(|&(_, si)| si)
            .collect();
        indices.sort_unstable();
        Some(HitGroup {
            t: best_t,
            segment_indices: indices,
        })
    }
}

/// Forward intersection parameter of a ray with a segment, if any.
pub(crate) fn ray_segment(origin: Point2, dir: Vec2, seg: &Segment) -> Option<f64> {
    let e = seg.b.sub(seg.a);
    let denom = dir.cross(e);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = seg.a.sub(origin);
    let t = w.cross(e) / denom;
    let u = w.cross(dir) / denom;
    if t > MIN_RAY_T && (0.0..=1.0).contains(&u) {
        Some(t)
    } else {
        None
    }
}
