//! Feedback navigation towards a destination among spherical obstacles in
//! any dimension.
//!
//! The control law steers along the straight line to the destination and,
//! behind an obstacle, projects that direction onto the cone that just
//! grazes the obstacle, repeating for every obstacle the projected direction
//! runs into. Obstacles are ranked by how deeply they sit in each other's
//! shadows as seen from the destination, which decides the order in which
//! they are avoided.
//!
//! - [`world`]: worlds, their assumptions, random generation and files.
//! - [`shadow`]: shadow regions, generations and region queries.
//! - [`controller`]: cone projections and the feedback law.
//! - [`simulator`]: closed-loop integration with safety monitors.
//! - [`oracle2d`]: planar shortest paths through the tangent graph.
//! - [`batch`], [`scenarios`], [`svg`]: multi-start runs, ready-made worlds
//!   and pictures.
//! - [`cli`]: the `navsim` command line.

// Guards such as `!(x > 0.0)` deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod cli;
pub mod controller;
pub mod error;
pub mod geometry;
pub mod io;
pub mod oracle2d;
pub mod scenarios;
pub mod shadow;
pub mod simulator;
pub mod svg;
pub mod world;
