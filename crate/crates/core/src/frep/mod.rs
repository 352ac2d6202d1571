//! Function representation: primitives and constructive trees whose value is
//! positive inside an object, zero on its boundary and negative outside.

pub mod catalog;
pub mod rfunc;
pub mod sexpr;

use crate::error::{invalid, Result};
use crate::grid::{BoundingBox, ContinuityClass, Point, ScalarGrid};

pub use catalog::{catalog_names, model, Model};
pub use rfunc::{
    intersect_min, r_intersect, r_subtract, r_union, rv_intersect, rv_subtract, rv_union,
    union_max,
};

/// Leaf shapes. Defining functions are algebraic, not distances.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    /// `r² - |p - c|²` in the xy plane.
    Circle { center: [f64; 2], radius: f64 },
    /// `r² - |p - c|²`.
    Sphere { center: [f64; 3], radius: f64 },
    /// Intersection of the two axis strips `h_i² - (p_i - c_i)²`.
    Rectangle { center: [f64; 2], half: [f64; 2] },
    Box { center: [f64; 3], half: [f64; 3] },
    /// Intersection of the three inner half-planes of the edges.
    Triangle { vertices: [[f64; 2]; 3] },
    /// `(x² + y² - 1)³ - x²y³` negated, in coordinates `(p - c) / scale`.
    Heart { center: [f64; 2], scale: f64 },
    /// Periodic slabs `sin(nu * p_axis + phi) + l` along one axis.
    Slab { axis: usize, nu: f64, phi: f64, l: f64 },
}

impl Primitive {
    pub fn circle(center: [f64; 2], radius: f64) -> Result<Self> {
        positive("circle radius", radius)?;
        finite(&center)?;
        Ok(Primitive::Circle { center, radius })
    }

    pub fn sphere(center: [f64; 3], radius: f64) -> Result<Self> {
        positive("sphere radius", radius)?;
        finite(&center)?;
        Ok(Primitive::Sphere { center, radius })
    }

    pub fn rectangle(center: [f64; 2], half: [f64; 2]) -> Result<Self> {
        finite(&center)?;
        for h in half {
            positive("rectangle half extent", h)?;
        }
        Ok(Primitive::Rectangle { center, half })
    }

    pub fn cuboid(center: [f64; 3], half: [f64; 3]) -> Result<Self> {
        finite(&center)?;
        for h in half {
            positive("box half extent", h)?;
        }
        Ok(Primitive::Box { center, half })
    }

    pub fn triangle(vertices: [[f64; 2]; 3]) -> Result<Self> {
        for v in &vertices {
            finite(v)?;
        }
        if signed_area(&vertices).abs() < 1e-14 {
            return Err(invalid("degenerate triangle"));
        }
        Ok(Primitive::Triangle { vertices })
    }

    pub fn heart(center: [f64; 2], scale: f64) -> Result<Self> {
        finite(&center)?;
        positive("heart scale", scale)?;
        Ok(Primitive::Heart { center, scale })
    }

    pub fn slab(axis: usize, nu: f64, phi: f64, l: f64) -> Result<Self> {
        if axis > 2 {
            return Err(invalid(format!("slab axis must be 0, 1 or 2, got {axis}")));
        }
        finite(&[nu, phi])?;
        if !(l > -1.0 && l < 1.0) {
            return Err(invalid(format!("slab threshold must lie in (-1, 1), got {l}")));
        }
        Ok(Primitive::Slab { axis, nu, phi, l })
    }

    pub fn eval(&self, p: &Point) -> f64 {
        let [x, y, z] = p.0;
        match *self {
            Primitive::Circle { center: [cx, cy], radius } => {
                let (dx, dy) = (x - cx, y - cy);
                radius * radius - dx * dx - dy * dy
            }
            Primitive::Sphere { center: [cx, cy, cz], radius } => {
                let (dx, dy, dz) = (x - cx, y - cy, z - cz);
                radius * radius - dx * dx - dy * dy - dz * dz
            }
            Primitive::Rectangle { center, half } => {
                let fx = half[0] * half[0] - (x - center[0]).powi(2);
                let fy = half[1] * half[1] - (y - center[1]).powi(2);
                rv_intersect(fx, fy, 2)
            }
            Primitive::Box { center, half } => {
                let f = |a: usize| half[a] * half[a] - (p.0[a] - center[a]).powi(2);
                rv_intersect(rv_intersect(f(0), f(1), 2), f(2), 2)
            }
            Primitive::Triangle { vertices } => {
                let orient = signed_area(&vertices).signum();
                let edge = |i: usize| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % 3];
                    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                    let len = ex.hypot(ey);
                    orient * (ex * (y - a[1]) - ey * (x - a[0])) / len
                };
                rv_intersect(rv_intersect(edge(0), edge(1), 2), edge(2), 2)
            }
            Primitive::Heart { center, scale } => {
                let u = (x - center[0]) / scale;
                let v = (y - center[1]) / scale;
                let q = u * u + v * v - 1.0;
                -(q * q * q - u * u * v * v * v)
            }
            Primitive::Slab { axis, nu, phi, l } => (nu * p.0[axis] + phi).sin() + l,
        }
    }

    pub fn continuity(&self) -> ContinuityClass {
        match self {
            Primitive::Rectangle { .. } | Primitive::Box { .. } | Primitive::Triangle { .. } => {
                ContinuityClass::C1
            }
            _ => ContinuityClass::CInf,
        }
    }

    /// Spatial dimension the primitive needs (2 or 3).
    pub fn dim(&self) -> usize {
        match self {
            Primitive::Sphere { .. } | Primitive::Box { .. } => 3,
            Primitive::Slab { axis, .. } if *axis == 2 => 3,
            _ => 2,
        }
    }
}

fn signed_area(v: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]))
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be positive and finite, got {v}")))
    }
}

fn finite(vals: &[f64]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid("primitive parameters must be finite"))
    }
}

/// Set-theoretic operation kinds. Subtraction is intersection with the
/// negated right operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    UnionR1,
    IntersectR1,
    SubtractR1,
    UnionRv(u32),
    IntersectRv(u32),
    SubtractRv(u32),
    UnionMax,
    IntersectMin,
}

impl BinaryOp {
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::UnionR1 => r_union(a, b),
            BinaryOp::IntersectR1 => r_intersect(a, b),
            BinaryOp::SubtractR1 => r_subtract(a, b),
            BinaryOp::UnionRv(n) => rv_union(a, b, n),
            BinaryOp::IntersectRv(n) => rv_intersect(a, b, n),
            BinaryOp::SubtractRv(n) => rv_subtract(a, b, n),
            BinaryOp::UnionMax => union_max(a, b),
            BinaryOp::IntersectMin => intersect_min(a, b),
        }
    }

    pub fn continuity(self) -> ContinuityClass {
        match self {
            BinaryOp::UnionRv(_) | BinaryOp::IntersectRv(_) | BinaryOp::SubtractRv(_) => {
                ContinuityClass::C1
            }
            _ => ContinuityClass::C0,
        }
    }

    fn order(self) -> Option<u32> {
        match self {
            BinaryOp::UnionRv(n) | BinaryOp::IntersectRv(n) | BinaryOp::SubtractRv(n) => Some(n),
            _ => None,
        }
    }
}

/// Constructive tree: primitives at the leaves, operations at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum FRepNode {
    Primitive(Primitive),
    /// Evaluates the child at `matrix * p + translation`, i.e. the affine map
    /// takes world points into the child's frame.
    Transform { matrix: [[f64; 3]; 3], translation: [f64; 3], child: Box<FRepNode> },
    Binary { op: BinaryOp, left: Box<FRepNode>, right: Box<FRepNode> },
}

impl From<Primitive> for FRepNode {
    fn from(p: Primitive) -> Self {
        FRepNode::Primitive(p)
    }
}

impl FRepNode {
    pub fn binary(op: BinaryOp, left: impl Into<FRepNode>, right: impl Into<FRepNode>) -> Result<Self> {
        if let Some(n) = op.order() {
            if n < 2 || n % 2 != 0 {
                return Err(invalid(format!("rv order must be a positive even integer, got {n}")));
            }
        }
        Ok(FRepNode::Binary { op, left: Box::new(left.into()), right: Box::new(right.into()) })
    }

    pub fn transform(matrix: [[f64; 3]; 3], translation: [f64; 3], child: impl Into<FRepNode>) -> Result<Self> {
        if !matrix.iter().flatten().chain(&translation).all(|v| v.is_finite()) {
            return Err(invalid("transform entries must be finite"));
        }
        Ok(FRepNode::Transform { matrix, translation, child: Box::new(child.into()) })
    }

    /// Folds `items` left to right with `op`.
    pub fn fold(op: BinaryOp, items: Vec<FRepNode>) -> Result<Self> {
        let mut it = items.into_iter();
        let first = it.next().ok_or_else(|| invalid("cannot fold an empty list"))?;
        it.try_fold(first, |acc, next| FRepNode::binary(op, acc, next))
    }

    pub fn eval(&self, p: &Point) -> f64 {
        match self {
            FRepNode::Primitive(prim) => prim.eval(p),
            FRepNode::Transform { matrix, translation, child } => {
                let mut q = *translation;
                for (r, row) in matrix.iter().enumerate() {
                    q[r] += row[0] * p.0[0] + row[1] * p.0[1] + row[2] * p.0[2];
                }
                child.eval(&Point(q))
            }
            FRepNode::Binary { op, left, right } => op.apply(left.eval(p), right.eval(p)),
        }
    }

    /// Central-difference gradient over the first `dim` axes.
    pub fn gradient(&self, p: &Point, dim: usize, step: f64) -> Point {
        let mut g = Point::ORIGIN;
        for a in 0..dim {
            let (mut lo, mut hi) = (*p, *p);
            lo.0[a] -= step;
            hi.0[a] += step;
            g.0[a] = (self.eval(&hi) - self.eval(&lo)) / (2.0 * step);
        }
        g
    }

    /// Nearest point of the zero level to `p`, found by alternating Newton
    /// steps onto the surface with tangential moves towards `p`. `None` when
    /// the iteration stalls on a flat spot or ends farther than `reach`.
    pub fn foot_point(&self, p: &Point, dim: usize, reach: f64) -> Option<Point> {
        self.foot_point_from(p, p, dim, reach)
    }

    /// [`foot_point`](Self::foot_point) with the iteration started at
    /// `start` instead of `p`, e.g. at an approximate nearest boundary point.
    pub fn foot_point_from(&self, p: &Point, start: &Point, dim: usize, reach: f64) -> Option<Point> {
        let step = 1e-6 * reach;
        let mut s = *start;
        for _ in 0..16 {
            for _ in 0..8 {
                let f = self.eval(&s);
                let g = self.gradient(&s, dim, step);
                let g2 = g.dot(&g);
                if !(g2 > 0.0) {
                    return None;
                }
                let dx = g * (f / g2);
                s = s - dx;
                if dx.norm() <= 1e-13 * reach {
                    break;
                }
            }
            let n = self.gradient(&s, dim, step).normalized();
            let v = *p - s;
            let t = v - n * v.dot(&n);
            if t.norm() <= 1e-12 * reach {
                break;
            }
            s = s + t;
        }
        let g = self.gradient(&s, dim, step).norm();
        let close = self.eval(&s).abs() <= 1e-9 * reach * g;
        (close && s.is_finite() && s.distance(p) <= reach).then_some(s)
    }

    /// Number of set-theoretic operations in the tree.
    pub fn op_count(&self) -> usize {
        match self {
            FRepNode::Primitive(_) => 0,
            FRepNode::Transform { child, .. } => child.op_count(),
            FRepNode::Binary { left, right, .. } => 1 + left.op_count() + right.op_count(),
        }
    }

    pub fn primitive_count(&self) -> usize {
        match self {
            FRepNode::Primitive(_) => 1,
            FRepNode::Transform { child, .. } => child.primitive_count(),
            FRepNode::Binary { left, right, .. } => left.primitive_count() + right.primitive_count(),
        }
    }

    /// Minimum continuity class over primitives and operations.
    pub fn continuity_class(&self) -> ContinuityClass {
        match self {
            FRepNode::Primitive(p) => p.continuity(),
            FRepNode::Transform { child, .. } => child.continuity_class(),
            FRepNode::Binary { op, left, right } => op
                .continuity()
                .min(left.continuity_class())
                .min(right.continuity_class()),
        }
    }
}

/// Samples the tree at every node of a grid.
pub fn sample_frep(tree: &FRepNode, dims: &[usize], bbox: BoundingBox) -> Result<ScalarGrid> {
    ScalarGrid::from_fn(dims, bbox, |p| tree.eval(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_circle() -> FRepNode {
        Primitive::circle([0.0, 0.0], 1.0).unwrap().into()
    }

    #[test]
    fn circle_values() {
        let c = unit_circle();
        assert_eq!(c.eval(&Point::new(0.0, 0.0)), 1.0);
        assert_eq!(c.eval(&Point::new(1.0, 0.0)), 0.0);
        assert!(c.eval(&Point::new(2.0, 0.0)) < 0.0);
    }

    #[test]
    fn primitive_signs() {
        let r = Primitive::rectangle([0.0, 0.0], [0.5, 0.25]).unwrap();
        assert!(r.eval(&Point::new(0.4, 0.2)) > 0.0);
        assert!(r.eval(&Point::new(0.6, 0.0)) < 0.0);
        assert!(r.eval(&Point::new(0.0, 0.3)) < 0.0);
        assert_eq!(r.eval(&Point::new(0.5, 0.1)), 0.0);

        let t = Primitive::triangle([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(t.eval(&Point::new(0.2, 0.2)) > 0.0);
        assert!(t.eval(&Point::new(0.6, 0.6)) < 0.0);
        assert!(t.eval(&Point::new(-0.1, 0.2)) < 0.0);

        let b = Primitive::cuboid([0.0; 3], [1.0, 2.0, 3.0]).unwrap();
        assert!(b.eval(&Point::new3(0.9, 1.9, 2.9)) > 0.0);
        assert!(b.eval(&Point::new3(0.9, 1.9, 3.1)) < 0.0);

        let s = Primitive::slab(0, 1.0, 0.0, 0.0).unwrap();
        assert!((s.eval(&Point::new(std::f64::consts::FRAC_PI_2, 0.0)) - 1.0).abs() < 1e-15);

        let h = Primitive::heart([0.0, 0.0], 1.0).unwrap();
        assert!(h.eval(&Point::new(0.0, 0.0)) > 0.0);
        assert!(h.eval(&Point::new(0.0, 2.0)) < 0.0);
    }

    #[test]
    fn invalid_primitives() {
        assert!(Primitive::circle([0.0, 0.0], 0.0).is_err());
        assert!(Primitive::triangle([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
        assert!(Primitive::slab(0, 1.0, 0.0, 1.0).is_err());
        assert!(Primitive::slab(3, 1.0, 0.0, 0.0).is_err());
        assert!(FRepNode::binary(BinaryOp::UnionRv(3), unit_circle(), unit_circle()).is_err());
    }

    #[test]
    fn subtract_is_intersect_with_negation() {
        let a = unit_circle();
        let b: FRepNode = Primitive::circle([0.5, 0.0], 0.7).unwrap().into();
        let sub = FRepNode::binary(BinaryOp::SubtractR1, a.clone(), b.clone()).unwrap();
        for i in 0..50 {
            let p = Point::new(-1.2 + 0.05 * i as f64, 0.1);
            assert_eq!(sub.eval(&p), r_intersect(a.eval(&p), -b.eval(&p)));
        }
    }

    #[test]
    fn continuity_classes() {
        let s = || FRepNode::from(Primitive::sphere([0.0; 3], 1.0).unwrap());
        assert_eq!(s().continuity_class(), ContinuityClass::CInf);
        let r1 = FRepNode::binary(BinaryOp::UnionR1, s(), s()).unwrap();
        assert_eq!(r1.continuity_class(), ContinuityClass::C0);
        let rv = FRepNode::binary(BinaryOp::UnionRv(2), s(), s()).unwrap();
        assert_eq!(rv.continuity_class(), ContinuityClass::C1);
        let t = FRepNode::transform([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [0.0; 3], rv).unwrap();
        assert_eq!(t.continuity_class(), ContinuityClass::C1);
        assert!(ContinuityClass::C0 < ContinuityClass::C1 && ContinuityClass::C1 < ContinuityClass::CInf);
    }

    #[test]
    fn transform_maps_world_into_child_frame() {
        // x' = 2x: the unit circle becomes an ellipse with x semi-axis 0.5
        let t = FRepNode::transform([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [0.0; 3], unit_circle()).unwrap();
        assert_eq!(t.eval(&Point::new(0.5, 0.0)), 0.0);
        assert_eq!(t.eval(&Point::new(0.0, 1.0)), 0.0);
    }

    #[test]
    fn whole_box_rectangle_samples_positive() {
        let r: FRepNode = Primitive::rectangle([0.0, 0.0], [1.5, 1.5]).unwrap().into();
        let g = sample_frep(&r, &[17, 17], BoundingBox::centered_square(1.0)).unwrap();
        assert!(g.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn circle_sign_changes_hug_the_analytic_circle() {
        let c: FRepNode = Primitive::circle([0.0, 0.0], 0.5).unwrap().into();
        let g = sample_frep(&c, &[65, 65], BoundingBox::centered_square(1.0)).unwrap();
        let h = g.spacing()[0];
        for j in 0..65 {
            for i in 0..64 {
                let (a, b) = (g.get(i, j, 0), g.get(i + 1, j, 0));
                if (a > 0.0) != (b > 0.0) {
                    let p = g.node_position(g.index(i, j, 0));
                    assert!((p.norm() - 0.5).abs() <= h * 2f64.sqrt());
                }
            }
        }
    }
}
