//! Synthetic deformation-state libraries for desk-scale testing.
//!
//! Each state is a pair of mirrored bow arcs of fixed arc length whose ends
//! are clamped flat, the way the waveguides anchor into the end housings:
//! compression straightens the guides, elongation deepens the bow and
//! concentrates curvature away from the junctions. Bow height varies linearly
//! across the states, and waveguide 2 is the exact z-mirror of waveguide 1.

use serde::{Deserialize, Serialize};

use crate::deformation::spline::adaptive_simpson;
use crate::deformation::{DeformationState, StateLabel, StateLibrary, DEFAULT_SAMPLE_INTERVAL_MM};
use crate::error::{Error, Result};
use crate::geometry::Point2;

/// Parameters of a synthetic library.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SynthSpec {
    /// Arc length of each waveguide centerline, held fixed across states.
    pub arc_span_mm: f64,
    /// Bow height (max |z|) at the rest state.
    pub rest_bow_mm: f64,
    /// Bow heights at maximum compression and maximum elongation.
    pub bow_range_mm: (f64, f64),
    /// Number of states; odd, so the middle state is the rest geometry.
    pub n_states: usize,
    /// Centerline sampling interval.
    pub sample_interval_mm: f64,
    /// Pressure assigned to the extreme states (± this value).
    pub pressure_span_kpa: f64,
}

impl Default for SynthSpec {
    /// Defaults chosen so the twin guides stay separated over the patterned
    /// mid-span in every state and the bend-loss trend dominates the optical
    /// response across the library.
    fn default() -> Self {
        Self {
            arc_span_mm: 50.0,
            rest_bow_mm: 4.5,
            bow_range_mm: (2.5, 6.5),
            n_states: 15,
            sample_interval_mm: DEFAULT_SAMPLE_INTERVAL_MM,
            pressure_span_kpa: 50.0,
        }
    }
}

/// Clamped bow profile over chord `c`: flat at both ends, apex `bow` at
/// mid-span.
fn profile(bow: f64, c: f64, x: f64) -> f64 {
    bow * 0.5 * (1.0 - (std::f64::consts::TAU * x / c).cos())
}

fn profile_slope(bow: f64, c: f64, x: f64) -> f64 {
    bow * 0.5 * (std::f64::consts::TAU / c) * (std::f64::consts::TAU * x / c).sin()
}

/// Arc length of the profile over its full chord.
fn profile_arc_length(bow: f64, c: f64) -> f64 {
    adaptive_simpson(&|x| profile_slope(bow, c, x).hypot(1.0), 0.0, c, 1e-10 * c)
}

/// Chord length such that the clamped bow of height `bow` has arc length `s`.
pub fn chord_for_bow(s: f64, bow: f64) -> f64 {
    if bow < 1e-12 {
        return s;
    }
    let (mut lo, mut hi) = (s * 0.05, s);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if profile_arc_length(bow, mid) > s {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Generate a synthetic twin-arc state library.
pub fn synthesize_states(spec: &SynthSpec) -> Result<StateLibrary> {
    let (bow_min, bow_max) = spec.bow_range_mm;
    if !(bow_min >= 0.0 && bow_min < spec.rest_bow_mm && spec.rest_bow_mm < bow_max) {
        return Err(Error::InvalidInput(format!(
            "bow range must satisfy 0 <= min < rest < max, got min {bow_min}, \
             rest {}, max {bow_max}",
            spec.rest_bow_mm
        )));
    }
    if spec.n_states < 3 || spec.n_states.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "n_states must be odd and at least 3, got {}",
            spec.n_states
        )));
    }
    if spec.arc_span_mm <= 0.0 || spec.sample_interval_mm <= 0.0 {
        return Err(Error::InvalidInput(
            "arc span and sample interval must be positive".into(),
        ));
    }
    if bow_max >= spec.arc_span_mm / 4.0 {
        return Err(Error::InvalidInput(format!(
            "bow {bow_max} mm is too deep for a {} mm arc",
            spec.arc_span_mm
        )));
    }

    let n = spec.n_states;
    let half = (n - 1) / 2;
    let chord_rest = chord_for_bow(spec.arc_span_mm, spec.rest_bow_mm);

    let mut states = Vec::with_capacity(n);
    for k in 0..n {
        let frac = k as f64 / (n - 1) as f64;
        let bow = bow_min + (bow_max - bow_min) * frac;
        // Keep the middle state bit-exact with the rest bow when the range is
        // symmetric around it.
        let bow = if k == half && (bow - spec.rest_bow_mm).abs() < 1e-9 {
            spec.rest_bow_mm
        } else {
            bow
        };
        let label = if k < half {
            StateLabel::Compression((half - k) as u32)
        } else if k == half {
            StateLabel::Rest
        } else {
            StateLabel::Elongation((k - half) as u32)
        };
        let upper = arc_points(spec.arc_span_mm, bow, spec.sample_interval_mm);
        let lower: Vec<Point2> = upper.iter().map(|p| p.mirrored()).collect();
        let chord = chord_for_bow(spec.arc_span_mm, bow);
        let pressure = -spec.pressure_span_kpa + 2.0 * spec.pressure_span_kpa * frac;
        states.push(DeformationState {
            label,
            pressure_kpa: pressure,
            waveguides: [upper, lower],
            // Arc-chord shortening relative to rest: elongation positive.
            tip_displacement_mm: chord_rest - chord,
        });
    }
    StateLibrary::new(states, spec.sample_interval_mm)
}

/// Points along the clamped bow from (0, 0) to (chord, 0), spaced uniformly
/// in arc length with both endpoints exact.
fn arc_points(s: f64, bow: f64, interval: f64) -> Vec<Point2> {
    let m = ((s / interval).round() as usize).max(6);
    if bow < 1e-12 {
        return (0..=m)
            .map(|k| Point2::new(s * k as f64 / m as f64, 0.0))
            .collect();
    }
    let c = chord_for_bow(s, bow);
    let speed = |x: f64| profile_slope(bow, c, x).hypot(1.0);
    let total = profile_arc_length(bow, c);
    let mut out = Vec::with_capacity(m + 1);
    out.push(Point2::new(0.0, 0.0));
    let mut x_prev = 0.0;
    let mut s_prev = 0.0;
    for k in 1..m {
        let target = total * k as f64 / m as f64;
        // Newton on the cumulative arc from the previous sample, bracketed
        // inside the remaining chord.
        let (mut lo, mut hi) = (x_prev, c);
        let mut x = x_prev + (target - s_prev) / speed(x_prev);
        x = x.clamp(lo, hi);
        for _ in 0..60 {
            let f = s_prev + adaptive_simpson(&speed, x_prev, x, 1e-11 * s.max(1.0)) - target;
            if f.abs() < 1e-10 {
                break;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let next = x - f / speed(x);
            x = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
        }
        s_prev = target;
        x_prev = x;
        out.push(Point2::new(x, profile(bow, c, x)));
    }
    out.push(Point2::new(c, 0.0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polyline_length;

    #[test]
    fn middle_state_is_rest_geometry() {
        let spec = SynthSpec {
            rest_bow_mm: 2.0,
            bow_range_mm: (0.0, 4.0),
            ..SynthSpec::default()
        };
        let lib = synthesize_states(&spec).unwrap();
        assert_eq!(lib.len(), 15);
        let mid = &lib.states()[7];
        assert_eq!(mid.label, StateLabel::Rest);
        assert!(mid.tip_displacement_mm.abs() < 1e-12);
        let apex = mid.waveguides[0]
            .iter()
            .map(|p| p.z)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((apex - 2.0).abs() < 1e-6);
    }

    #[test]
    fn flat_bow_is_straight_with_maximum_negative_tip() {
        let spec = SynthSpec {
            rest_bow_mm: 2.0,
            bow_range_mm: (0.0, 4.0),
            ..SynthSpec::default()
        };
        let lib = synthesize_states(&spec).unwrap();
        let first = &lib.states()[0];
        assert!(first.waveguides[0].iter().all(|p| p.z.abs() < 1e-12));
        // Chord equals arc length when flat, so the tip displacement is the
        // full rest shortening, and no state sits below it.
        let chord = polyline_length(&first.waveguides[0]);
        assert!((chord - spec.arc_span_mm).abs() < 1e-9);
        assert!(lib
            .states()
            .iter()
            .all(|s| s.tip_displacement_mm >= first.tip_displacement_mm));
        assert!(first.tip_displacement_mm < 0.0);
    }

    #[test]
    fn chords_strictly_decrease_with_bow() {
        // Independent oracle: integrate the analytic profile speed with
        // composite Simpson on a fine grid and confirm each state's arc
        // length matches the requested span; then verify the chords shrink
        // as the bow grows.
        let spec = SynthSpec {
            rest_bow_mm: 4.0,
            bow_range_mm: (2.0, 6.0),
            n_states: 3,
            ..SynthSpec::default()
        };
        let lib = synthesize_states(&spec).unwrap();
        let mut chords = Vec::new();
        for (i, state) in lib.states().iter().enumerate() {
            let bow = 2.0 + 2.0 * i as f64;
            let pts = &state.waveguides[0];
            let chord = pts[0].distance(*pts.last().unwrap());
            chords.push(chord);

            // Points must sit exactly on the analytic profile.
            for p in pts {
                assert!((p.z - profile(bow, chord, p.x)).abs() < 1e-9);
            }
            // Composite Simpson over 20000 panels, independent of the
            // adaptive quadrature used by the generator.
            let n = 20_000usize;
            let h = chord / n as f64;
            let speed = |x: f64| profile_slope(bow, chord, x).hypot(1.0);
            let mut arc = speed(0.0) + speed(chord);
            for j in 1..n {
                arc += speed(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            arc *= h / 3.0;
            assert!(
                (arc - spec.arc_span_mm).abs() < 1e-6,
                "state {i}: arc length {arc} vs {}",
                spec.arc_span_mm
            );
        }
        assert!(chords[0] > chords[1] && chords[1] > chords[2], "{chords:?}");
    }

    #[test]
    fn samples_are_equally_spaced_in_arc_length() {
        let lib = synthesize_states(&SynthSpec::default()).unwrap();
        let pts = &lib.states()[14].waveguides[0];
        let gaps: Vec<f64> = pts.windows(2).map(|w| w[0].distance(w[1])).collect();
        let mean: f64 = gaps.iter().sum::<f64>() / gaps.len() as f64;
        for g in &gaps {
            // Chord of an 0.5 mm arc step stays within a micron of the step.
            assert!((g - mean).abs() < 1e-3, "gap {g} vs mean {mean}");
        }
    }

    #[test]
    fn waveguides_mirror_exactly() {
        let lib = synthesize_states(&SynthSpec::default()).unwrap();
        for state in lib.states() {
            for (a, b) in state.waveguides[0].iter().zip(&state.waveguides[1]) {
                assert_eq!(a.x, b.x);
                assert_eq!(a.z, -b.z);
            }
        }
    }

    #[test]
    fn bow_heights_increase_with_state_index() {
        let lib = synthesize_states(&SynthSpec::default()).unwrap();
        let bows: Vec<f64> = lib
            .states()
            .iter()
            .map(|s| {
                s.waveguides[0]
                    .iter()
                    .map(|p| p.z.abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(bows.windows(2).all(|w| w[1] > w[0]), "{bows:?}");
    }

    #[test]
    fn ends_are_clamped_flat() {
        let lib = synthesize_states(&SynthSpec::default()).unwrap();
        for state in lib.states() {
            let pts = &state.waveguides[0];
            let end_slope = (pts[1].z - pts[0].z) / (pts[1].x - pts[0].x);
            assert!(end_slope.abs() < 0.02, "end slope {end_slope}");
        }
    }

    #[test]
    fn invalid_bow_ordering_rejected() {
        let spec = SynthSpec {
            rest_bow_mm: 5.0,
            bow_range_mm: (0.0, 4.0),
            ..SynthSpec::default()
        };
        assert!(synthesize_states(&spec).is_err());
        let spec = SynthSpec {
            n_states: 14,
            ..SynthSpec::default()
        };
        assert!(synthesize_states(&spec).is_err());
    }
}
