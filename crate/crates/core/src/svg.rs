//! Deterministic SVG rendering of planar worlds, shadows and paths.
//!
//! The workspace disk maps onto a fixed 1000 × 1000 view box with the y axis
//! pointing up. Coordinates are printed with three decimals and elements are
//! emitted in a fixed order, so equal inputs give byte-identical files.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::error::{NavError, Result};
use crate::geometry::Point;
use crate::shadow::{shadow_aperture, GenerationMap};
use crate::world::World;

const VIEW: f64 = 1000.0;
const MARGIN: f64 = 20.0;
const ARC_PIECES: usize = 96;
const TRAJECTORY_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Everything drawn in one picture. Only `world` is required.
#[derive(Clone, Debug, Default)]
pub struct Scene<'a> {
    pub world: Option<&'a World>,
    pub destination: Option<&'a Point>,
    /// Shades every shadow region by generation when set together with the
    /// destination.
    pub generations: Option<&'a GenerationMap>,
    pub trajectories: Vec<Vec<[f64; 2]>>,
    /// Reference paths, drawn dashed.
    pub oracle_paths: Vec<Vec<[f64; 2]>>,
}

struct Frame {
    scale: f64,
}

impl Frame {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (VIEW / 2.0 + self.scale * p[0], VIEW / 2.0 - self.scale * p[1])
    }

    fn point(&self, out: &mut String, p: [f64; 2]) {
        let (x, y) = self.map(p);
        let _ = write!(out, "{x:.3},{y:.3}");
    }

    fn points(&self, pts: &[[f64; 2]]) -> String {
        let mut out = String::new();
        for (k, &p) in pts.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            self.point(&mut out, p);
        }
        out
    }
}

fn xy(p: &Point) -> [f64; 2] {
    [p[0], p[1]]
}

/// Fill colour of a shadow region by generation.
fn shadow_fill(generation: usize) -> &'static str {
    match generation {
        0 => "#f2c9c9",
        1 => "#d9e3f0",
        2 => "#b5c7e0",
        3 => "#91abd0",
        _ => "#6d8fc0",
    }
}

/// Outline of the shadow of an obstacle clipped to the workspace: the two
/// cone edges from the tangent points out to the workspace circle, the
/// workspace arc between them, and the arc of the sphere with diameter
/// `[x_d, c]` through the obstacle.
fn shadow_polygon(world: &World, xd: [f64; 2], c: [f64; 2], phi: f64) -> Vec<[f64; 2]> {
    let r0 = world.workspace_radius();
    let axis = (c[1] - xd[1]).atan2(c[0] - xd[0]);
    let d = (c[0] - xd[0]).hypot(c[1] - xd[1]);
    let tangent_len = d * phi.cos();
    // Distance along the ray from xd at angle a to the workspace circle.
    let exit = |a: f64| {
        let (dx, dy) = (a.cos(), a.sin());
        let b = xd[0] * dx + xd[1] * dy;
        let cc = xd[0] * xd[0] + xd[1] * xd[1] - r0 * r0;
        -b + (b * b - cc).max(0.0).sqrt()
    };
    let ray = |a: f64, s: f64| [xd[0] + s * a.cos(), xd[1] + s * a.sin()];
    let mut pts = Vec::new();
    let (lo, hi) = (axis - phi, axis + phi);
    pts.push(ray(lo, tangent_len));
    pts.push(ray(lo, exit(lo)));
    for k in 1..ARC_PIECES {
        let a = lo + (hi - lo) * k as f64 / ARC_PIECES as f64;
        pts.push(ray(a, exit(a)));
    }
    pts.push(ray(hi, exit(hi)));
    pts.push(ray(hi, tangent_len));
    // Back along the diameter circle, centre (xd + c)/2, through c.
    let m = [(xd[0] + c[0]) / 2.0, (xd[1] + c[1]) / 2.0];
    let half = d / 2.0;
    let start = (ray(hi, tangent_len)[1] - m[1]).atan2(ray(hi, tangent_len)[0] - m[0]);
    let end = (ray(lo, tangent_len)[1] - m[1]).atan2(ray(lo, tangent_len)[0] - m[0]);
    let mut sweep = (end - start).rem_euclid(TAU);
    if sweep > std::f64::consts::PI {
        sweep -= TAU;
    }
    for k in 1..ARC_PIECES {
        let a = start + sweep * k as f64 / ARC_PIECES as f64;
        pts.push([m[0] + half * a.cos(), m[1] + half * a.sin()]);
    }
    pts
}

/// Renders the scene. Fails for worlds that are not planar.
pub fn render(scene: &Scene<'_>) -> Result<String> {
    let world = scene.world.ok_or_else(|| NavError::Invalid("a world is required".into()))?;
    if world.dimension() != 2 {
        return Err(NavError::Invalid("SVG output is available for planar worlds only".into()));
    }
    let r0 = world.workspace_radius();
    let frame = Frame {
        scale: (VIEW / 2.0 - MARGIN) / r0,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {VIEW} {VIEW}\" width=\"{VIEW}\" height=\"{VIEW}\">"
    );
    let _ = writeln!(
        out,
        "<circle cx=\"500.000\" cy=\"500.000\" r=\"{:.3}\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"2\"/>",
        frame.scale * r0
    );
    if let (Some(gmap), Some(xd)) = (scene.generations, scene.destination) {
        // Highest generation first so lower generations end on top; hidden
        // obstacles (generation 0) first of all.
        let mut order: Vec<usize> = (0..world.len()).collect();
        order.sort_by_key(|&k| {
            let g = gmap.generations()[k];
            (if g == 0 { 0 } else { usize::MAX - g }, k)
        });
        for k in order {
            let o = &world.obstacles()[k];
            let phi = shadow_aperture(xd, o)?;
            let poly = shadow_polygon(world, xy(xd), xy(&o.center), phi);
            let _ = writeln!(
                out,
                "<polygon points=\"{}\" fill=\"{}\" stroke=\"none\"/>",
                frame.points(&poly),
                shadow_fill(gmap.generations()[k])
            );
        }
    }
    for o in world.obstacles() {
        let (cx, cy) = frame.map(xy(&o.center));
        let _ = writeln!(
            out,
            "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\" fill=\"#808080\" stroke=\"#000000\" stroke-width=\"1\"/>",
            frame.scale * o.radius
        );
    }
    for path in &scene.oracle_paths {
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>",
            frame.points(path)
        );
    }
    for (k, path) in scene.trajectories.iter().enumerate() {
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            frame.points(path),
            TRAJECTORY_COLORS[k % TRAJECTORY_COLORS.len()]
        );
    }
    if let Some(xd) = scene.destination {
        let (x, y) = frame.map(xy(xd));
        let _ = writeln!(
            out,
            "<path d=\"M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}\" stroke=\"#000000\" stroke-width=\"3\"/>",
            x - 8.0,
            y - 8.0,
            x + 8.0,
            y + 8.0,
            x - 8.0,
            y + 8.0,
            x + 8.0,
            y - 8.0
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
