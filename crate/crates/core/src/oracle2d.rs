//! Reference shortest paths.
//!
//! For a single obstacle the shortest path around it is tangent, arc,
//! tangent in the plane through the start, the center and the destination,
//! which gives a closed form valid in any dimension. In the plane with
//! several disks the shortest path is found exactly by Dijkstra on the
//! visibility tangent graph: start, goal and every tangent point, joined by
//! collision-free tangent segments and by arcs between angularly adjacent
//! tangent points on each circle.

use std::f64::consts::{PI, TAU};

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::Serialize;

use crate::error::{NavError, Result};
use crate::geometry::{angle, point_segment_distance, vector, Point};
use crate::world::{ObstacleId, World};

/// Penetration depth below which a segment still counts as tangent.
const GRAZE_TOL: f64 = 1e-9;

/// Largest slack allowed when a trajectory appears shorter than the oracle.
pub const INTEGRATION_SLACK: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum NodeKind {
    Start,
    Goal,
    /// Point on the circle of `circle` at polar angle `angle` about its
    /// center.
    Tangent { circle: ObstacleId, angle: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Node {
    pub point: [f64; 2],
    pub kind: NodeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EdgeKind {
    Segment,
    Arc(ObstacleId),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    #[serde(skip)]
    circles: Vec<([f64; 2], f64)>,
}

impl TangentGraph {
    pub const START: usize = 0;
    pub const GOAL: usize = 1;

    fn add_node(&mut self, point: [f64; 2], kind: NodeKind) -> usize {
        self.nodes.push(Node { point, kind });
        self.nodes.len() - 1
    }
}

/// Shortest path through the tangent graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OraclePath {
    pub length: f64,
    /// Graph nodes visited from start to goal.
    pub nodes: Vec<Node>,
    /// Edge kinds between consecutive nodes.
    pub legs: Vec<EdgeKind>,
    #[serde(skip)]
    circles: Vec<([f64; 2], f64)>,
}

impl OraclePath {
    /// The path as points, with arcs subdivided so that no chord spans more
    /// than `max_angle` radians.
    pub fn polyline(&self, max_angle: f64) -> Vec<[f64; 2]> {
        let mut points = Vec::new();
        if let Some(first) = self.nodes.first() {
            points.push(first.point);
        }
        for (leg, pair) in self.legs.iter().zip(self.nodes.windows(2)) {
            if let (EdgeKind::Arc(id), NodeKind::Tangent { angle: a0, .. }, NodeKind::Tangent { angle: a1, .. }) =
                (leg, pair[0].kind, pair[1].kind)
            {
                let (center, radius) = self.circles[id.index()];
                let sweep = signed_short_sweep(a0, a1);
                let pieces = ((sweep.abs() / max_angle).ceil() as usize).max(1);
                for k in 1..pieces {
                    let a = a0 + sweep * k as f64 / pieces as f64;
                    points.push([center[0] + radius * a.cos(), center[1] + radius * a.sin()]);
                }
            }
            points.push(pair[1].point);
        }
        points
    }

    /// `{"length": …, "points": [[x, y], …]}` with arcs subdivided.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Polyline {
            length: f64,
            points: Vec<[f64; 2]>,
        }
        crate::io::to_json_string(&Polyline {
            length: self.length,
            points: self.polyline(PI / 90.0),
        })
    }
}

/// Sweep from `a0` to `a1` along the shorter way round, in `(−π, π]`.
fn signed_short_sweep(a0: f64, a1: f64) -> f64 {
    let mut d = (a1 - a0).rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}

/// Length of the shortest path from `x0` to `x_d` avoiding the single ball
/// `B(c, r)`, in any dimension.
///
/// When the segment crosses the ball the path is tangent, arc, tangent in
/// the plane through the three points: `√(d₀² − r²) + r·w + √(d_d² − r²)`
/// with `w = Ω − acos(r/d₀) − acos(r/d_d)` and `Ω` the angle at `c` between
/// `x0` and `x_d`. Fails when `x0` is on the half-line behind the ball, where
/// both ways round are equally short.
pub fn single_obstacle_optimal_length(x0: &Point, xd: &Point, c: &Point, r: f64) -> Result<f64> {
    let d0 = (x0 - c).norm();
    let dd = (xd - c).norm();
    if d0 < r || dd < r {
        return Err(NavError::domain("endpoint inside the obstacle"));
    }
    if point_segment_distance(c, x0, xd) >= r {
        return Ok((x0 - xd).norm());
    }
    let omega = angle(&(x0 - c), &(xd - c))?;
    if omega >= PI - 1e-12 {
        return Err(NavError::domain("start on the central half-line: two shortest paths"));
    }
    let wrap = omega - (r / d0).acos() - (r / dd).acos();
    Ok((d0 * d0 - r * r).sqrt() + r * wrap.max(0.0) + (dd * dd - r * r).sqrt())
}

fn to_xy(p: &Point) -> [f64; 2] {
    [p[0], p[1]]
}

fn on_circle(center: [f64; 2], radius: f64, a: f64) -> [f64; 2] {
    [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn segment_clearance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len_sq = dx * dx + dy * dy;
    let s = if len_sq > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - s * dx).hypot(p[1] - a[1] - s * dy)
}

/// Angles on the circle of the tangent points seen from `p`.
fn point_tangent_angles(p: [f64; 2], center: [f64; 2], radius: f64) -> Vec<f64> {
    let d = dist(p, center);
    let base = (p[1] - center[1]).atan2(p[0] - center[0]);
    if d <= radius * (1.0 + 1e-12) {
        // On the circle: the point is its own tangent point.
        return vec![base];
    }
    let spread = (radius / d).acos();
    vec![base + spread, base - spread]
}

/// Builds the visibility tangent graph of a planar world between `start`
/// and `goal`.
pub fn build_tangent_graph(world: &World, start: &Point, goal: &Point) -> Result<TangentGraph> {
    if world.dimension() != 2 {
        return Err(NavError::domain("the tangent graph is planar only"));
    }
    world.check_point(start, "start")?;
    world.check_point(goal, "goal")?;
    if !world.free_space_contains(start) || !world.free_space_contains(goal) {
        return Err(NavError::domain("start and goal must lie in free space"));
    }
    let circles: Vec<([f64; 2], f64)> = world.obstacles().iter().map(|o| (to_xy(&o.center), o.radius)).collect();
    let mut graph = TangentGraph {
        nodes: Vec::new(),
        edges: Vec::new(),
        circles: circles.clone(),
    };
    graph.add_node(to_xy(start), NodeKind::Start);
    graph.add_node(to_xy(goal), NodeKind::Goal);
    let r0 = world.workspace_radius();
    let segment_ok = |a: [f64; 2], b: [f64; 2]| {
        a[0].hypot(a[1]) <= r0
            && b[0].hypot(b[1]) <= r0
            && circles.iter().all(|&(c, r)| segment_clearance(c, a, b) >= r - GRAZE_TOL)
    };
    // Candidate segments: (endpoint node, endpoint node).
    let mut candidates: Vec<(usize, usize)> = vec![(TangentGraph::START, TangentGraph::GOAL)];
    let tangent = |graph: &mut TangentGraph, k: usize, a: f64| {
        let (c, r) = circles[k];
        graph.add_node(
            on_circle(c, r, a),
            NodeKind::Tangent {
                circle: ObstacleId::from_index(k),
                angle: a.rem_euclid(TAU),
            },
        )
    };
    for (k, &(c, r)) in circles.iter().enumerate() {
        for endpoint in [TangentGraph::START, TangentGraph::GOAL] {
            let p = graph.nodes[endpoint].point;
            for a in point_tangent_angles(p, c, r) {
                let node = tangent(&mut graph, k, a);
                candidates.push((endpoint, node));
            }
        }
    }
    for i in 0..circles.len() {
        for j in (i + 1)..circles.len() {
            let ((ci, ri), (cj, rj)) = (circles[i], circles[j]);
            let d = dist(ci, cj);
            let base = (cj[1] - ci[1]).atan2(cj[0] - ci[0]);
            // External tangents touch both circles at the same polar angle.
            if d > (ri - rj).abs() {
                let spread = ((ri - rj) / d).acos();
                for a in [base + spread, base - spread] {
                    let p = tangent(&mut graph, i, a);
                    let q = tangent(&mut graph, j, a);
                    candidates.push((p, q));
                }
            }
            // Internal tangents touch at opposite polar angles.
            if d > ri + rj {
                let spread = ((ri + rj) / d).acos();
                for a in [base + spread, base - spread] {
                    let p = tangent(&mut graph, i, a);
                    let q = tangent(&mut graph, j, a + PI);
                    candidates.push((p, q));
                }
            }
        }
    }
    for (a, b) in candidates {
        let (pa, pb) = (graph.nodes[a].point, graph.nodes[b].point);
        if segment_ok(pa, pb) {
            graph.edges.push(Edge {
                a,
                b,
                kind: EdgeKind::Segment,
                length: dist(pa, pb),
            });
        }
    }
    // Arcs between angular neighbours on each circle. Obstacles are disjoint
    // and inside the workspace, so arcs are always free.
    let mut on_each: Vec<Vec<(f64, usize)>> = vec![Vec::new(); circles.len()];
    for (idx, node) in graph.nodes.iter().enumerate() {
        if let NodeKind::Tangent { circle, angle } = node.kind {
            on_each[circle.index()].push((angle, idx));
        }
    }
    for (k, list) in on_each.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let count = list.len();
        if count < 2 {
            continue;
        }
        let r = circles[k].1;
        let pairs = if count == 2 { 1 } else { count };
        for s in 0..pairs {
            let (a0, n0) = list[s];
            let (a1, n1) = list[(s + 1) % count];
            let sweep = (a1 - a0).rem_euclid(TAU);
            graph.edges.push(Edge {
                a: n0,
                b: n1,
                kind: EdgeKind::Arc(ObstacleId::from_index(k)),
                length: r * sweep,
            });
            if count == 2 {
                // Both ways round between the only two nodes.
                graph.edges.push(Edge {
                    a: n1,
                    b: n0,
                    kind: EdgeKind::Arc(ObstacleId::from_index(k)),
                    length: r * (TAU - sweep),
                });
            }
        }
    }
    Ok(graph)
}

/// Dijkstra from the start node to the goal node.
pub fn shortest_path(graph: &TangentGraph) -> Result<OraclePath> {
    if graph.nodes.len() < 2 {
        return Err(NavError::NoPath);
    }
    let mut g: UnGraph<(), (f64, usize)> = UnGraph::with_capacity(graph.nodes.len(), graph.edges.len());
    for _ in &graph.nodes {
        g.add_node(());
    }
    for (e, edge) in graph.edges.iter().enumerate() {
        g.add_edge(NodeIndex::new(edge.a), NodeIndex::new(edge.b), (edge.length, e));
    }
    let goal = NodeIndex::new(TangentGraph::GOAL);
    // A zero heuristic turns A* into Dijkstra.
    let (length, route) = astar(&g, NodeIndex::new(TangentGraph::START), |n| n == goal, |e| e.weight().0, |_| 0.0)
        .ok_or(NavError::NoPath)?;
    let mut legs = Vec::with_capacity(route.len().saturating_sub(1));
    for pair in route.windows(2) {
        // Cheapest edge between the two nodes, as used by the search.
        let kind = g
            .edges_connecting(pair[0], pair[1])
            .min_by(|a, b| a.weight().0.total_cmp(&b.weight().0))
            .map(|e| graph.edges[e.weight().1].kind)
            .expect("consecutive route nodes are adjacent");
        legs.push(kind);
    }
    Ok(OraclePath {
        length,
        nodes: route.iter().map(|n| graph.nodes[n.index()].clone()).collect(),
        legs,
        circles: graph.circles.clone(),
    })
}

/// Shortest collision-free path length between two points of a planar world.
pub fn oracle_length(world: &World, start: &Point, goal: &Point) -> Result<f64> {
    Ok(shortest_path(&build_tangent_graph(world, start, goal)?)?.length)
}

/// Whether a trajectory matches the optimum: `trajectory ≤ oracle·(1 +
/// rel_tol)`. A trajectory shorter than the optimum by more than
/// [`INTEGRATION_SLACK`] signals an oracle or safety bug and is an error.
pub fn match_lengths(trajectory: f64, oracle: f64, rel_tol: f64) -> Result<bool> {
    if !(trajectory > 0.0 && oracle > 0.0) {
        return Err(NavError::domain("lengths must be positive"));
    }
    if trajectory < oracle * (1.0 - INTEGRATION_SLACK) {
        return Err(NavError::LowerBound { trajectory, oracle });
    }
    Ok(trajectory <= oracle * (1.0 + rel_tol))
}

/// Point on the circle of obstacle `k` at polar angle `a`.
pub fn circle_point(world: &World, k: ObstacleId, a: f64) -> Point {
    let o = world.obstacle(k);
    vector(&on_circle(to_xy(&o.center), o.radius, a))
}
