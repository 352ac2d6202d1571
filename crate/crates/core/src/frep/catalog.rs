//! Named constructive models. The shapes are illustrative: they follow the
//! construction style and operation counts of the classic examples rather
//! than any exact geometry.

use std::f64::consts::PI;

use super::{BinaryOp, FRepNode, Primitive};
use crate::error::{HfrepError, Result};
use crate::grid::BoundingBox;

#[derive(Debug, Clone)]
pub struct Model {
    pub name: &'static str,
    pub tree: FRepNode,
    pub bbox: BoundingBox,
    /// Declared number of set-theoretic operations, if the model has one.
    pub declared_ops: Option<usize>,
}

impl Model {
    pub fn dim(&self) -> usize {
        self.bbox.dim
    }
}

const NAMES: [&str; 8] = [
    "star",
    "bat",
    "robot",
    "heart",
    "treble-clef",
    "circle",
    "sphere",
    "sphere-slabs",
];

pub fn catalog_names() -> &'static [&'static str] {
    &NAMES
}

/// Looks a model up by name.
pub fn model(name: &str) -> Result<Model> {
    let square = BoundingBox::centered_square(1.0);
    let cube = BoundingBox::centered_cube(1.5);
    let (name, tree, bbox, declared_ops) = match name {
        "star" => ("star", star(), square, Some(7)),
        "bat" => ("bat", bat(), square, Some(14)),
        "robot" => ("robot", robot(), square, Some(39)),
        "heart" => ("heart", heart(), square, Some(0)),
        "treble-clef" => ("treble-clef", treble_clef(), square, None),
        "circle" => ("circle", circle(0.0, 0.0, 0.6), square, Some(0)),
        "sphere" => ("sphere", sphere(), cube, Some(0)),
        "sphere-slabs" => ("sphere-slabs", sphere_slabs(), cube, Some(2)),
        other => return Err(HfrepError::UnknownModel(other.to_string())),
    };
    Ok(Model { name, tree, bbox, declared_ops })
}

fn circle(x: f64, y: f64, r: f64) -> FRepNode {
    Primitive::circle([x, y], r).expect("catalog circle").into()
}

fn rect(x: f64, y: f64, hx: f64, hy: f64) -> FRepNode {
    Primitive::rectangle([x, y], [hx, hy]).expect("catalog rectangle").into()
}

fn tri(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> FRepNode {
    Primitive::triangle([a, b, c]).expect("catalog triangle").into()
}

fn op(kind: BinaryOp, a: FRepNode, b: FRepNode) -> FRepNode {
    FRepNode::binary(kind, a, b).expect("catalog operation")
}

fn union_all(items: Vec<FRepNode>) -> FRepNode {
    FRepNode::fold(BinaryOp::UnionR1, items).expect("non-empty catalog list")
}

fn subtract_all(base: FRepNode, holes: Vec<FRepNode>) -> FRepNode {
    holes.into_iter().fold(base, |acc, h| op(BinaryOp::SubtractR1, acc, h))
}

fn mirror(p: [f64; 2]) -> [f64; 2] {
    [-p[0], p[1]]
}

/// Seven spikes around a disc, joined by seven unions.
fn star() -> FRepNode {
    let mut parts = vec![circle(0.0, 0.0, 0.35)];
    for k in 0..7 {
        let theta = PI / 2.0 + 2.0 * PI * k as f64 / 7.0;
        let at = |angle: f64, r: f64| [r * angle.cos(), r * angle.sin()];
        parts.push(tri(
            at(theta, 0.9),
            at(theta - PI / 7.0, 0.3),
            at(theta + PI / 7.0, 0.3),
        ));
    }
    union_all(parts)
}

fn bat_wing(sign: f64) -> FRepNode {
    let s = |p: [f64; 2]| if sign < 0.0 { p } else { mirror(p) };
    let inner_top = [-0.1, 0.2];
    let tip = [-0.95, 0.4];
    let inner_bottom = [-0.1, -0.3];
    let wing = tri(s(inner_top), s(tip), s(inner_bottom));
    // scallops bite into the trailing edge from tip to inner bottom
    let (ex, ey) = (inner_bottom[0] - tip[0], inner_bottom[1] - tip[1]);
    let len = ex.hypot(ey);
    let normal = [ey / len, -ex / len];
    let holes = [0.2, 0.5, 0.8]
        .iter()
        .map(|&t| {
            let c = [
                tip[0] + t * ex + 0.06 * normal[0],
                tip[1] + t * ey + 0.06 * normal[1],
            ];
            let c = s(c);
            circle(c[0], c[1], 0.12)
        })
        .collect();
    subtract_all(wing, holes)
}

/// Body, head, ears, scalloped wings, tail and eyes: fourteen operations.
fn bat() -> FRepNode {
    let ear = |sign: f64| {
        let s = |p: [f64; 2]| if sign < 0.0 { p } else { mirror(p) };
        tri(s([-0.15, 0.38]), s([-0.04, 0.42]), s([-0.13, 0.6]))
    };
    let body = union_all(vec![
        circle(0.0, -0.05, 0.28),
        circle(0.0, 0.3, 0.18),
        ear(-1.0),
        ear(1.0),
        bat_wing(-1.0),
        bat_wing(1.0),
        tri([-0.08, -0.3], [0.08, -0.3], [0.0, -0.6]),
    ]);
    subtract_all(body, vec![circle(-0.07, 0.33, 0.035), circle(0.07, 0.33, 0.035)])
}

/// Blocky robot of circles and rectangles: 26 parts joined by 25 unions,
/// minus 14 details.
fn robot() -> FRepNode {
    let mut parts = vec![
        rect(0.0, 0.55, 0.2, 0.16),   // head
        rect(0.0, 0.36, 0.06, 0.05),  // neck
        rect(0.0, 0.05, 0.27, 0.28),  // torso
        rect(0.0, 0.78, 0.015, 0.08), // antenna stem
        circle(0.0, 0.87, 0.04),      // antenna ball
    ];
    for s in [-1.0, 1.0] {
        parts.extend([
            circle(s * 0.22, 0.55, 0.05),                  // ear
            circle(s * 0.31, 0.27, 0.07),                  // shoulder
            rect(s * 0.4, 0.17, 0.05, 0.11),               // upper arm
            circle(s * 0.4, 0.05, 0.055),                  // elbow
            rect(s * 0.4, -0.08, 0.045, 0.12),             // forearm
            circle(s * 0.4, -0.25, 0.075),                 // hand
        ]);
    }
    parts.push(rect(0.0, -0.28, 0.22, 0.06)); // hips
    for s in [-1.0, 1.0] {
        parts.extend([
            rect(s * 0.12, -0.42, 0.07, 0.1),  // thigh
            circle(s * 0.12, -0.54, 0.065),    // knee
            rect(s * 0.12, -0.67, 0.06, 0.11), // shin
            rect(s * 0.15, -0.82, 0.1, 0.045), // foot
        ]);
    }
    let holes = vec![
        circle(-0.08, 0.59, 0.035), // eyes
        circle(0.08, 0.59, 0.035),
        rect(0.0, 0.47, 0.09, 0.02), // mouth
        circle(-0.1, 0.15, 0.035),   // buttons
        circle(0.0, 0.15, 0.035),
        circle(0.1, 0.15, 0.035),
        circle(-0.4, -0.27, 0.03), // grips
        circle(0.4, -0.27, 0.03),
        circle(-0.12, -0.54, 0.025), // knee bolts
        circle(0.12, -0.54, 0.025),
        rect(-0.12, -0.08, 0.07, 0.02), // vents
        rect(0.12, -0.08, 0.07, 0.02),
        circle(-0.22, 0.55, 0.02), // ear holes
        circle(0.22, 0.55, 0.02),
    ];
    subtract_all(union_all(parts), holes)
}

fn heart() -> FRepNode {
    Primitive::heart([0.0, -0.1], 0.7).expect("catalog heart").into()
}

fn annulus(x: f64, y: f64, outer: f64, inner: f64) -> FRepNode {
    op(BinaryOp::SubtractR1, circle(x, y, outer), circle(x, y, inner))
}

/// Stylised treble clef: a stem, two rings, a hook and a dot. A thin,
/// curve-like outline suited to adaptive subdivision.
fn treble_clef() -> FRepNode {
    let stem = rect(0.03, 0.05, 0.035, 0.65);
    let lower = annulus(-0.02, -0.22, 0.27, 0.19);
    let upper = annulus(-0.05, 0.52, 0.15, 0.09);
    let hook = op(
        BinaryOp::IntersectR1,
        annulus(-0.1, -0.6, 0.16, 0.1),
        rect(-0.1, -0.72, 0.2, 0.12),
    );
    let dot = circle(-0.16, -0.66, 0.06);
    union_all(vec![stem, lower, upper, hook, dot])
}

fn sphere() -> FRepNode {
    Primitive::sphere([0.0; 3], 1.0).expect("catalog sphere").into()
}

/// Unit sphere cut by two orthogonal families of periodic slabs.
fn sphere_slabs() -> FRepNode {
    let nu = 2.0 * PI / 0.5;
    let slab = |axis| FRepNode::from(Primitive::slab(axis, nu, 0.0, 0.3).expect("catalog slab"));
    let lattice = op(BinaryOp::UnionRv(2), slab(0), slab(1));
    op(BinaryOp::IntersectRv(2), sphere(), lattice)
}
