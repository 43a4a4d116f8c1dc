//! Deterministic fan tracing through a scene.
//!
//! A split continues in place along its stronger branch; the weaker branch
//! becomes a secondary ray on a power-ordered queue shared by the whole
//! trace. Secondaries are traced strongest-first until the global budget is
//! spent, so truncation always preserves the dominant energy paths. There is
//! no randomness anywhere: identical scene and configuration give
//! bit-identical results regardless of worker count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::deformation::{DeformationState, StateLibrary};
use crate::error::{Error, Result};
use crate::geometry::svg::RenderPath;
use crate::geometry::{EmitterPose, PatternSpec, Point2, Scene, SceneBuilder, Vec2};
use crate::raytrace::fresnel::reflectance_from_cosines;
use crate::raytrace::grid::{ray_segment, CastScratch, SegmentGrid};

/// Origin advance after every boundary event, guarding against re-hitting the
/// surface the ray just left.
const EPS_ADVANCE: f64 = 1e-9;

/// A ray in flight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Point2,
    /// Unit direction.
    pub direction: Vec2,
    /// Fraction of the emitted ray power, in (0, 1].
    pub power: f64,
    /// 0 for primary rays; each split increments the weaker branch.
    pub generation: u32,
    pub wavelength_nm: f64,
}

/// Tracer configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Primary rays in the emitter fan.
    pub n_primary: usize,
    /// Full fan aperture, degrees.
    pub aperture_deg: f64,
    /// Secondary rays traced per trace, strongest first; splits beyond the
    /// budget are dropped lowest-power-first by the priority queue.
    pub max_secondary: usize,
    /// Rays below this power are terminated.
    pub power_floor: f64,
    /// Safety valve on boundary events per ray path.
    pub max_bounces: usize,
    /// Receiver arrivals at or above this power count toward NDR.
    pub detect_threshold: f64,
    pub wavelength_nm: f64,
    /// Capture per-ray polylines for SVG export.
    pub record_paths: bool,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            n_primary: 250,
            aperture_deg: 120.0,
            max_secondary: 100,
            power_floor: 1e-3,
            max_bounces: 200,
            detect_threshold: 1e-3,
            wavelength_nm: 860.0,
            record_paths: false,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_primary < 1 {
            return Err(Error::InvalidInput("n_primary must be at least 1".into()));
        }
        if !(self.aperture_deg > 0.0 && self.aperture_deg < 180.0) {
            return Err(Error::InvalidInput(format!(
                "aperture must be in (0, 180) degrees, got {}",
                self.aperture_deg
            )));
        }
        if !(self.power_floor > 0.0 && self.power_floor <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "power_floor must be in (0, 1], got {}",
                self.power_floor
            )));
        }
        if self.max_bounces == 0 {
            return Err(Error::InvalidInput("max_bounces must be positive".into()));
        }
        Ok(())
    }
}

/// Where every unit of emitted power ended up. The buckets sum to `emitted`
/// up to floating-point roundoff.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerLedger {
    pub emitted: f64,
    /// Power terminating on the receiver (any power level).
    pub detected: f64,
    /// Terminated below the power floor.
    pub floor_terminated: f64,
    /// Left the scene bounding box.
    pub escaped: f64,
    /// Stopped by the bounce cap.
    pub bounce_capped: f64,
    /// Secondary rays dropped after the per-primary budget was spent.
    pub budget_dropped: f64,
}

/// Result of one trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceResult {
    /// Number of detected rays: receiver terminations at or above the
    /// detection threshold.
    pub ndr: usize,
    /// Total power terminating on the receiver, regardless of threshold.
    pub detected_power: f64,
    pub ledger: PowerLedger,
    /// Ray polylines in canonical (primary index, spawn order) order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray_paths: Option<Vec<RenderPath>>,
}

/// Deterministic conical fan: `n_primary` rays spread uniformly (endpoints
/// included) over the full aperture around the emitter axis.
pub fn emit_fan(config: &TraceConfig, emitter: &EmitterPose) -> Vec<Ray> {
    let n = config.n_primary;
    let half = config.aperture_deg.to_radians() / 2.0;
    (0..n)
        .map(|i| {
            let angle = if n == 1 {
                0.0
            } else {
                -half + 2.0 * half * i as f64 / (n - 1) as f64
            };
            let (sin, cos) = angle.sin_cos();
            let d = emitter.direction;
            Ray {
                origin: emitter.origin,
                direction: Point2::new(d.x * cos - d.z * sin, d.x * sin + d.z * cos),
                power: 1.0,
                generation: 0,
                wavelength_nm: config.wavelength_nm,
            }
        })
        .collect()
}

struct Pending {
    power: f64,
    seq: u64,
    origin: Point2,
    dir: Vec2,
    /// Bit per outline: set when the ray is currently inside it.
    mask: u8,
    bounces: usize,
    generation: u32,
    path: Option<Vec<Point2>>,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.power == other.power && self.seq == other.seq
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max-heap: highest power first, oldest spawn breaking ties.
        self.power
            .total_cmp(&other.power)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Tracer<'a> {
    scene: &'a Scene,
    config: &'a TraceConfig,
    grid: SegmentGrid,
    scratch: CastScratch,
    bbox: (Point2, Point2),
    ledger: PowerLedger,
    ndr: usize,
    detected_power: f64,
    paths: Vec<RenderPath>,
}

enum PathEnd {
    Receiver,
    Escaped,
    Floor,
    BounceCapped,
}

/// Trace the configured fan through the scene.
///
/// Rays advance by exact ray/segment intersection (nearest forward hit, ties
/// to the lowest segment index). Media are tracked by an inside/outside bit
/// per outline, toggled at every wall crossing, so overlapping twin outlines
/// behave as a merged solid: walls interior to the union pass light straight
/// through.
pub fn trace(scene: &Scene, config: &TraceConfig) -> Result<TraceResult> {
    scene.validate()?;
    config.validate()?;

    let mut mask = 0u8;
    for (w, outline) in scene.waveguides.iter().enumerate() {
        if outline.contains(scene.emitter.origin) {
            mask |= 1 << w;
        }
    }
    if mask == 0 {
        return Err(Error::EmitterOutsideCore {
            x: scene.emitter.origin.x,
            z: scene.emitter.origin.z,
        });
    }

    let grid = SegmentGrid::build(scene);
    let scratch = grid.scratch();
    let mut tracer = Tracer {
        scene,
        config,
        scratch,
        bbox: scene.bbox(),
        ledger: PowerLedger {
            emitted: config.n_primary as f64,
            ..PowerLedger::default()
        },
        ndr: 0,
        detected_power: 0.0,
        paths: Vec::new(),
        grid,
    };

    // One queue for the whole fan: primaries carry full power and therefore
    // drain first in emission order; split descendants follow strongest-first
    // while the shared secondary budget lasts.
    let mut heap: BinaryHeap<Pending> = BinaryHeap::new();
    let mut seq = 0u64;
    for primary in emit_fan(config, &scene.emitter) {
        heap.push(Pending {
            power: primary.power,
            seq,
            origin: primary.origin,
            dir: primary.direction,
            mask,
            bounces: 0,
            generation: 0,
            path: config.record_paths.then(|| vec![primary.origin]),
        });
        seq += 1;
    }
    let mut secondaries_traced = 0usize;
    while let Some(ray) = heap.pop() {
        if ray.generation > 0 {
            if secondaries_traced >= config.max_secondary {
                tracer.ledger.budget_dropped += ray.power;
                continue;
            }
            secondaries_traced += 1;
        }
        tracer.follow(ray, &mut heap, &mut seq);
    }

    Ok(TraceResult {
        ndr: tracer.ndr,
        detected_power: tracer.detected_power,
        ledger: tracer.ledger,
        ray_paths: config.record_paths.then_some(tracer.paths),
    })
}

impl Tracer<'_> {
    /// Advance one ray to termination, pushing weaker split branches onto the
    /// shared queue.
    fn follow(&mut self, mut ray: Pending, heap: &mut BinaryHeap<Pending>, seq: &mut u64) {
        let core = self.scene.core_index;
        let exterior = self.scene.exterior_index;
        let index_of = |mask: u8| if mask != 0 { core } else { exterior };

        let end = loop {
            let boundary = self.grid.cast(ray.origin, ray.dir, &mut self.scratch);
            let receiver_t = if self.scene.receiver.length() >= 1e-12 {
                ray_segment(ray.origin, ray.dir, &self.scene.receiver)
            } else {
                None
            };

            // Receiver wins exact ties: arrival is a terminal event.
            if let Some(t_r) = receiver_t {
                if boundary.as_ref().map(|h| t_r <= h.t).unwrap_or(true) {
                    let hit = ray.origin.add(ray.dir.scale(t_r));
                    if let Some(path) = ray.path.as_mut() {
                        path.push(hit);
                    }
                    self.detected_power += ray.power;
                    self.ledger.detected += ray.power;
                    if ray.power >= self.config.detect_threshold {
                        self.ndr += 1;
                    }
                    break PathEnd::Receiver;
                }
            }

            let Some(hit) = boundary else {
                if let Some(path) = ray.path.as_mut() {
                    path.push(self.bbox_exit(ray.origin, ray.dir));
                }
                self.ledger.escaped += ray.power;
                break PathEnd::Escaped;
            };

            ray.bounces += 1;
            if ray.bounces > self.config.max_bounces {
                self.ledger.bounce_capped += ray.power;
                break PathEnd::BounceCapped;
            }

            let point = ray.origin.add(ray.dir.scale(hit.t));
            if let Some(path) = ray.path.as_mut() {
                path.push(point);
            }

            let mut mask_after = ray.mask;
            for &si in &hit.segment_indices {
                mask_after ^= 1 << self.grid.segments[si as usize].outline;
            }
            let n1 = index_of(ray.mask);
            let n2 = index_of(mask_after);

            if n1 == n2 {
                // Wall interior to the twin-outline union: no optical event.
                ray.mask = mask_after;
                ray.origin = point.add(ray.dir.scale(EPS_ADVANCE));
                continue;
            }

            let first_seg = &self.grid.segments[hit.segment_indices[0] as usize].seg;
            let mut normal = first_seg.normal();
            if ray.dir.dot(normal) > 0.0 {
                normal = normal.scale(-1.0);
            }
            let cos_i = (-ray.dir.dot(normal)).clamp(0.0, 1.0);
            let eta = n1 / n2;
            let sin_t_sq = eta * eta * (1.0 - cos_i * cos_i);

            if sin_t_sq >= 1.0 {
                // Total internal reflection: lossless, same medium, no split.
                ray.dir = reflect(ray.dir, normal, cos_i);
                ray.origin = point.add(ray.dir.scale(EPS_ADVANCE));
                continue;
            }

            let cos_t = (1.0 - sin_t_sq).sqrt();
            let reflectance = reflectance_from_cosines(n1, n2, cos_i, cos_t);
            let transmittance = 1.0 - reflectance;

            let dir_reflect = reflect(ray.dir, normal, cos_i);
            let dir_refract = ray
                .dir
                .scale(eta)
                .add(normal.scale(eta * cos_i - cos_t))
                .normalized();

            // The stronger branch continues in place; the weaker branch joins
            // the queue as a secondary ray. Ties continue forward.
            let reflected_continues = reflectance > transmittance;
            let (cont_power, cont_dir, cont_mask, weak_power, weak_dir, weak_mask) =
                if reflected_continues {
                    (
                        ray.power * reflectance,
                        dir_reflect,
                        ray.mask,
                        ray.power * transmittance,
                        dir_refract,
                        mask_after,
                    )
                } else {
                    (
                        ray.power * transmittance,
                        dir_refract,
                        mask_after,
                        ray.power * reflectance,
                        dir_reflect,
                        ray.mask,
                    )
                };

            if weak_power < self.config.power_floor {
                self.ledger.floor_terminated += weak_power;
            } else {
                *seq += 1;
                heap.push(Pending {
                    power: weak_power,
                    seq: *seq,
                    origin: point.add(weak_dir.scale(EPS_ADVANCE)),
                    dir: weak_dir,
                    mask: weak_mask,
                    bounces: ray.bounces,
                    generation: ray.generation + 1,
                    path: ray.path.clone(),
                });
            }

            if cont_power < self.config.power_floor {
                self.ledger.floor_terminated += cont_power;
                break PathEnd::Floor;
            }
            ray.power = cont_power;
            ray.dir = cont_dir;
            ray.mask = cont_mask;
            ray.origin = point.add(cont_dir.scale(EPS_ADVANCE));
        };

        if let Some(path) = ray.path {
            self.paths.push(RenderPath {
                points: path,
                power: ray.power,
                detected: matches!(end, PathEnd::Receiver),
            });
        }
    }

    fn bbox_exit(&self, origin: Point2, dir: Vec2) -> Point2 {
        let (lo, hi) = self.bbox;
        let mut t = f64::INFINITY;
        if dir.x > 1e-15 {
            t = t.min((hi.x - origin.x) / dir.x);
        } else if dir.x < -1e-15 {
            t = t.min((lo.x - origin.x) / dir.x);
        }
        if dir.z > 1e-15 {
            t = t.min((hi.z - origin.z) / dir.z);
        } else if dir.z < -1e-15 {
            t = t.min((lo.z - origin.z) / dir.z);
        }
        if !t.is_finite() {
            return origin;
        }
        origin.add(dir.scale(t.max(0.0)))
    }
}

fn reflect(dir: Vec2, normal: Vec2, cos_i: f64) -> Vec2 {
    dir.add(normal.scale(2.0 * cos_i)).normalized()
}

/// Build the optical scene for one deformation state.
pub fn scene_for_state(
    state: &DeformationState,
    pattern: &PatternSpec,
    builder: &SceneBuilder,
    sample_interval_mm: f64,
) -> Result<Scene> {
    let [c1, c2] = state.dense_centerlines(sample_interval_mm)?;
    builder.build_twin(&c1, &c2, pattern)
}

/// NDR across a state library, maximum compression first. The scene is
/// rebuilt per state from that state's interpolated centerlines.
pub fn ndr_vs_state(
    library: &StateLibrary,
    pattern: &PatternSpec,
    builder: &SceneBuilder,
    config: &TraceConfig,
) -> Result<Vec<usize>> {
    library
        .states()
        .iter()
        .map(|state| {
            let scene = scene_for_state(state, pattern, builder, library.sample_interval_mm)
                .map_err(|e| e.for_state(state.label.to_string()))?;
            let result = trace(&scene, config).map_err(|e| e.for_state(state.label.to_string()))?;
            Ok(result.ndr)
        })
        .collect()
}
