//! Dimension-generic Euclidean primitives.
//!
//! Points and vectors are `nalgebra::DVector<f64>`; the dimension is a runtime
//! property so the same code serves planar and higher-dimensional worlds.

use nalgebra::DVector;

use crate::error::{NavError, Result};

pub type Vector = DVector<f64>;
pub type Point = DVector<f64>;

/// Default angular tolerance for boundary membership, in radians.
pub const ANGLE_TOL: f64 = 1e-9;

const UNIT_TOL: f64 = 1e-12;

/// Builds a vector from a slice of coordinates.
pub fn vector(coords: &[f64]) -> Vector {
    DVector::from_column_slice(coords)
}

/// Angle between two non-zero vectors, in `[0, π]`.
///
/// Evaluated as `2·atan2(‖â − b̂‖, ‖â + b̂‖)`, which equals
/// `acos(uᵀv / ‖u‖‖v‖)` but keeps full relative accuracy near 0 and π.
pub fn angle(u: &Vector, v: &Vector) -> Result<f64> {
    let nu = u.norm();
    let nv = v.norm();
    if !(nu > 0.0) || !(nv > 0.0) {
        return Err(NavError::domain("angle of a zero vector"));
    }
    Ok(unit_angle(&(u / nu), &(v / nv)))
}

pub(crate) fn unit_angle(a: &Vector, b: &Vector) -> f64 {
    let diff = (a - b).norm();
    let sum = (a + b).norm();
    2.0 * diff.atan2(sum)
}

fn check_unit(v: &Vector) -> Result<()> {
    if (v.norm() - 1.0).abs() > UNIT_TOL {
        return Err(NavError::domain(format!(
            "projection direction must be unit, got norm {}",
            v.norm()
        )));
    }
    Ok(())
}

/// `vvᵀx`: projection of `x` onto the line spanned by the unit vector `v`.
pub fn project_parallel(v: &Vector, x: &Vector) -> Result<Vector> {
    check_unit(v)?;
    Ok(v * v.dot(x))
}

/// `(I − vvᵀ)x`: projection of `x` onto the hyperplane orthogonal to `v`.
pub fn project_orthogonal(v: &Vector, x: &Vector) -> Result<Vector> {
    check_unit(v)?;
    Ok(x - v * v.dot(x))
}

/// Comparison used by [`cone_contains`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// Closed interior (boundary included).
    Le,
    /// Open interior.
    Lt,
    /// Surface.
    Eq,
    /// Open exterior.
    Gt,
    /// Closed exterior.
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cone {
    pub vertex: Point,
    pub axis: Vector,
    pub half_aperture: f64,
}

impl Cone {
    pub fn new(vertex: Point, axis: Vector, half_aperture: f64) -> Result<Self> {
        if !(axis.norm() > 0.0) {
            return Err(NavError::domain("cone axis must be non-zero"));
        }
        if !(half_aperture > 0.0 && half_aperture <= std::f64::consts::FRAC_PI_2) {
            return Err(NavError::domain(format!(
                "cone half-aperture {half_aperture} outside (0, π/2]"
            )));
        }
        Ok(Cone {
            vertex,
            axis,
            half_aperture,
        })
    }
}

/// Membership of `q` in the conic set with the given relation, with an
/// angular tolerance. The vertex belongs to the closed sets and the surface.
pub fn cone_contains(cone: &Cone, q: &Point, relation: Relation, tol: f64) -> bool {
    let offset = q - &cone.vertex;
    if offset.norm() == 0.0 {
        return matches!(relation, Relation::Le | Relation::Eq | Relation::Ge);
    }
    // The axis is non-zero by construction.
    let a = angle(&offset, &cone.axis).unwrap_or(0.0);
    let psi = cone.half_aperture;
    match relation {
        Relation::Le => a <= psi + tol,
        Relation::Lt => a < psi - tol,
        Relation::Eq => (a - psi).abs() <= tol,
        Relation::Gt => a > psi + tol,
        Relation::Ge => a >= psi - tol,
    }
}

/// Half-aperture `arcsin(r / ‖c − x‖)` of the cone with vertex `x` enclosing
/// the ball `B(center, radius)`.
pub fn enclosing_half_aperture(x: &Point, center: &Point, radius: f64) -> Result<f64> {
    let dist = (center - x).norm();
    if dist < radius {
        return Err(NavError::domain(format!(
            "point lies inside the ball (distance {dist} < radius {radius})"
        )));
    }
    Ok(clamped_asin(radius / dist))
}

/// Same as [`enclosing_half_aperture`] but saturating at π/2 for points on
/// the sphere to within `1e-12·radius` or numerically inside it. Near the
/// surface `arcsin` amplifies rounding of the distance by its square root.
pub(crate) fn enclosing_half_aperture_saturating(dist: f64, radius: f64) -> f64 {
    if dist <= radius * (1.0 + 1e-12) {
        std::f64::consts::FRAC_PI_2
    } else {
        clamped_asin(radius / dist)
    }
}

pub(crate) fn clamped_asin(s: f64) -> f64 {
    s.clamp(-1.0, 1.0).asin()
}

/// Whether `v` is parallel to the surface of a cone with the given axis and
/// half-aperture: `|vᵀa − ‖v‖‖a‖cos ψ| ≤ tol·‖v‖‖a‖`.
pub fn on_vector_cone(v: &Vector, axis: &Vector, psi: f64, tol: f64) -> Result<bool> {
    let nv = v.norm();
    let na = axis.norm();
    if !(nv > 0.0) || !(na > 0.0) {
        return Err(NavError::domain("vector cone test with a zero vector"));
    }
    Ok((v.dot(axis) - nv * na * psi.cos()).abs() <= tol * nv * na)
}

/// Parameter `t ∈ [0, 1]` of the first point of the segment `a + t(b − a)`
/// lying in the closed ball, if any.
pub fn segment_ball_entry(a: &Point, b: &Point, center: &Point, radius: f64) -> Option<f64> {
    let d = b - a;
    let f = a - center;
    let dd = d.dot(&d);
    let c = f.dot(&f) - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    if dd == 0.0 {
        return None;
    }
    let half_b = f.dot(&d);
    let disc = half_b * half_b - dd * c;
    if disc < 0.0 {
        return None;
    }
    let t = (-half_b - disc.sqrt()) / dd;
    (0.0..=1.0).contains(&t).then_some(t)
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let d = b - a;
    let dd = d.dot(&d);
    let t = if dd > 0.0 {
        ((p - a).dot(&d) / dd).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + d * t - p).norm()
}

/// Distance from `p` to the half-line `{origin + δ·dir, δ ≥ 0}`.
pub fn point_ray_distance(p: &Point, origin: &Point, dir: &Vector) -> f64 {
    let dd = dir.dot(dir);
    let t = if dd > 0.0 {
        ((p - origin).dot(dir) / dd).max(0.0)
    } else {
        0.0
    };
    (origin + dir * t - p).norm()
}

/// Unit vector orthogonal to the unit vector `axis`, taken from the
/// component of `hint` orthogonal to it, or a coordinate direction when
/// `hint` is (numerically) parallel.
pub(crate) fn orthogonal_unit(axis: &Vector, hint: &Vector) -> Vector {
    let perp = hint - axis * axis.dot(hint);
    let norm = perp.norm();
    if norm > 1e-12 * hint.norm().max(1.0) {
        return perp / norm;
    }
    // Coordinate axis least aligned with `axis`.
    let k = axis
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let mut e = Vector::zeros(axis.len());
    e[k] = 1.0;
    let perp = &e - axis * axis.dot(&e);
    let norm = perp.norm();
    perp / norm
}
