//! SVG rendering of scenes and traced ray paths, for documentation output.

use serde::{Deserialize, Serialize};

use crate::geometry::polyline::Point2;
use crate::geometry::scene::Scene;

/// Scale factor: 1 px = 0.05 mm.
const PX_PER_MM: f64 = 20.0;

/// A traced ray path ready for rendering: the polyline it followed and the
/// power it carried at termination.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenderPath {
    pub points: Vec<Point2>,
    pub power: f64,
    pub detected: bool,
}

/// Render the scene (and optional ray paths) as an SVG document.
pub fn render_scene(scene: &Scene, paths: &[RenderPath]) -> String {
    let (lo, hi) = scene.bbox();
    let w = (hi.x - lo.x) * PX_PER_MM;
    let h = (hi.z - lo.z) * PX_PER_MM;
    let px = |p: Point2| -> (f64, f64) { ((p.x - lo.x) * PX_PER_MM, (hi.z - p.z) * PX_PER_MM) };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.1}\" height=\"{h:.1}\" \
         viewBox=\"0 0 {w:.1} {h:.1}\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{w:.1}\" height=\"{h:.1}\" fill=\"white\"/>\n"
    ));

    for path in paths {
        let pts: Vec<String> = path
            .points
            .iter()
            .map(|&p| {
                let (x, y) = px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        // Stronger rays draw darker; detected rays in green, lost in blue.
        let opacity = (0.15 + 0.85 * path.power).min(1.0);
        let color = if path.detected { "#1a7f37" } else { "#3366cc" };
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
             stroke-width=\"0.6\" stroke-opacity=\"{opacity:.3}\"/>\n",
            pts.join(" ")
        ));
    }

    for wg in &scene.waveguides {
        let pts: Vec<String> = wg
            .vertices()
            .iter()
            .map(|&p| {
                let (x, y) = px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"/>\n",
            pts.join(" ")
        ));
    }

    let (ex, ey) = px(scene.emitter.origin);
    out.push_str(&format!(
        "<circle cx=\"{ex:.2}\" cy=\"{ey:.2}\" r=\"3\" fill=\"orange\"/>\n"
    ));
    let tip = scene.emitter.origin.add(scene.emitter.direction.scale(2.0));
    let (tx, ty) = px(tip);
    out.push_str(&format!(
        "<line x1=\"{ex:.2}\" y1=\"{ey:.2}\" x2=\"{tx:.2}\" y2=\"{ty:.2}\" \
         stroke=\"orange\" stroke-width=\"1.5\"/>\n"
    ));

    let (rax, ray_) = px(scene.receiver.a);
    let (rbx, rby) = px(scene.receiver.b);
    out.push_str(&format!(
        "<line x1=\"{rax:.2}\" y1=\"{ray_:.2}\" x2=\"{rbx:.2}\" y2=\"{rby:.2}\" \
         stroke=\"red\" stroke-width=\"2\"/>\n"
    ));

    out.push_str("</svg>\n");
    out
}
