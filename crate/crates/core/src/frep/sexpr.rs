//! Text form of constructive trees.
//!
//! ```text
//! (subtract-r1 (circle 0.0 0.0 1.0) (rect 0.5 0.0 0.2 0.3))
//! (union-rv 2 (sphere 0 0 0 1) (box 1 0 0 0.5 0.5 0.5))
//! (transform 2 0 0 0 1 0 0 0 1  0 0 0 (circle 0 0 1))
//! ```
//!
//! Printing uses the shortest round-trip float form, so
//! `parse(&to_sexpr(t)) == t` for every tree.

use std::fmt::Write;

use super::{BinaryOp, FRepNode, Primitive};
use crate::error::{HfrepError, Result};

pub fn to_sexpr(tree: &FRepNode) -> String {
    let mut out = String::new();
    write_node(tree, &mut out);
    out
}

fn write_nums(out: &mut String, vals: &[f64]) {
    for v in vals {
        write!(out, " {v:?}").unwrap();
    }
}

fn write_node(node: &FRepNode, out: &mut String) {
    match node {
        FRepNode::Primitive(p) => {
            let (name, vals): (&str, Vec<f64>) = match *p {
                Primitive::Circle { center, radius } => ("circle", vec![center[0], center[1], radius]),
                Primitive::Sphere { center, radius } => {
                    ("sphere", vec![center[0], center[1], center[2], radius])
                }
                Primitive::Rectangle { center, half } => {
                    ("rect", vec![center[0], center[1], half[0], half[1]])
                }
                Primitive::Box { center, half } => (
                    "box",
                    vec![center[0], center[1], center[2], half[0], half[1], half[2]],
                ),
                Primitive::Triangle { vertices: v } => {
                    ("triangle", vec![v[0][0], v[0][1], v[1][0], v[1][1], v[2][0], v[2][1]])
                }
                Primitive::Heart { center, scale } => ("heart", vec![center[0], center[1], scale]),
                Primitive::Slab { axis, nu, phi, l } => {
                    write!(out, "(slab {axis}").unwrap();
                    write_nums(out, &[nu, phi, l]);
                    out.push(')');
                    return;
                }
            };
            write!(out, "({name}").unwrap();
            write_nums(out, &vals);
            out.push(')');
        }
        FRepNode::Transform { matrix, translation, child } => {
            out.push_str("(transform");
            write_nums(out, &matrix.concat());
            write_nums(out, translation);
            out.push(' ');
            write_node(child, out);
            out.push(')');
        }
        FRepNode::Binary { op, left, right } => {
            let name = op_name(*op);
            write!(out, "({name}").unwrap();
            match op {
                BinaryOp::UnionRv(n) | BinaryOp::IntersectRv(n) | BinaryOp::SubtractRv(n) => {
                    write!(out, " {n}").unwrap()
                }
                _ => {}
            }
            out.push(' ');
            write_node(left, out);
            out.push(' ');
            write_node(right, out);
            out.push(')');
        }
    }
}

fn op_name(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::UnionR1 => "union-r1",
        BinaryOp::IntersectR1 => "intersect-r1",
        BinaryOp::SubtractR1 => "subtract-r1",
        BinaryOp::UnionRv(_) => "union-rv",
        BinaryOp::IntersectRv(_) => "intersect-rv",
        BinaryOp::SubtractRv(_) => "subtract-rv",
        BinaryOp::UnionMax => "union-max",
        BinaryOp::IntersectMin => "intersect-min",
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(src: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    let flush = |atom: &mut String, tokens: &mut Vec<Token>| {
        if !atom.is_empty() {
            tokens.push(Token::Atom(std::mem::take(atom)));
        }
    };
    for c in src.chars() {
        match c {
            '(' | ')' => {
                flush(&mut atom, &mut tokens);
                tokens.push(if c == '(' { Token::Open } else { Token::Close });
            }
            c if c.is_whitespace() => flush(&mut atom, &mut tokens),
            c => atom.push(c),
        }
    }
    flush(&mut atom, &mut tokens);
    tokens
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

fn perr(msg: impl Into<String>) -> HfrepError {
    HfrepError::Parse(msg.into())
}

impl Parser {
    fn next(&mut self) -> Result<Token> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| perr("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn atom(&mut self) -> Result<String> {
        match self.next()? {
            Token::Atom(a) => Ok(a),
            t => Err(perr(format!("expected an atom, found {t:?}"))),
        }
    }

    fn num(&mut self) -> Result<f64> {
        let a = self.atom()?;
        a.parse().map_err(|_| perr(format!("bad number '{a}'")))
    }

    fn nums<const N: usize>(&mut self) -> Result<[f64; N]> {
        let mut out = [0.0; N];
        for v in &mut out {
            *v = self.num()?;
        }
        Ok(out)
    }

    fn uint(&mut self) -> Result<u32> {
        let a = self.atom()?;
        a.parse().map_err(|_| perr(format!("bad integer '{a}'")))
    }

    fn close(&mut self) -> Result<()> {
        match self.next()? {
            Token::Close => Ok(()),
            t => Err(perr(format!("expected ')', found {t:?}"))),
        }
    }

    fn node(&mut self) -> Result<FRepNode> {
        match self.next()? {
            Token::Open => {}
            t => return Err(perr(format!("expected '(', found {t:?}"))),
        }
        let head = self.atom()?;
        let node = match head.as_str() {
            "circle" => {
                let [x, y, r] = self.nums()?;
                Primitive::circle([x, y], r)?.into()
            }
            "sphere" => {
                let [x, y, z, r] = self.nums()?;
                Primitive::sphere([x, y, z], r)?.into()
            }
            "rect" => {
                let [x, y, hx, hy] = self.nums()?;
                Primitive::rectangle([x, y], [hx, hy])?.into()
            }
            "box" => {
                let [x, y, z, hx, hy, hz] = self.nums()?;
                Primitive::cuboid([x, y, z], [hx, hy, hz])?.into()
            }
            "triangle" => {
                let v: [f64; 6] = self.nums()?;
                Primitive::triangle([[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]])?.into()
            }
            "heart" => {
                let [x, y, s] = self.nums()?;
                Primitive::heart([x, y], s)?.into()
            }
            "slab" => {
                let axis = self.uint()? as usize;
                let [nu, phi, l] = self.nums()?;
                Primitive::slab(axis, nu, phi, l)?.into()
            }
            "transform" => {
                let m: [f64; 9] = self.nums()?;
                let t: [f64; 3] = self.nums()?;
                let child = self.node()?;
                let matrix = [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]];
                FRepNode::transform(matrix, t, child)?
            }
            name => {
                let op = match name {
                    "union-r1" => BinaryOp::UnionR1,
                    "intersect-r1" => BinaryOp::IntersectR1,
                    "subtract-r1" => BinaryOp::SubtractR1,
                    "union-rv" => BinaryOp::UnionRv(self.uint()?),
                    "intersect-rv" => BinaryOp::IntersectRv(self.uint()?),
                    "subtract-rv" => BinaryOp::SubtractRv(self.uint()?),
                    "union-max" => BinaryOp::UnionMax,
                    "intersect-min" => BinaryOp::IntersectMin,
                    other => return Err(perr(format!("unknown form '{other}'"))),
                };
                let left = self.node()?;
                let right = self.node()?;
                FRepNode::binary(op, left, right)?
            }
        };
        self.close()?;
        Ok(node)
    }
}

/// Parses a single tree.
pub fn parse(src: &str) -> Result<FRepNode> {
    let mut p = Parser { tokens: tokenize(src), pos: 0 };
    let node = p.node()?;
    if p.pos != p.tokens.len() {
        return Err(perr("trailing input after the tree"));
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frep::catalog::{catalog_names, model};
    use proptest::prelude::*;

    #[test]
    fn catalog_round_trips() {
        for name in catalog_names() {
            let tree = model(name).unwrap().tree;
            let text = to_sexpr(&tree);
            assert_eq!(parse(&text).unwrap(), tree, "{name}");
        }
    }

    #[test]
    fn parses_hand_written_forms() {
        let t = parse("(subtract-rv 2 (circle 0 0 1)\n  (rect 0.5 0 0.2 0.3))").unwrap();
        assert_eq!(t.op_count(), 1);
        let t = parse("(transform 2 0 0 0 1 0 0 0 1 0 0 0 (circle 0 0 1))").unwrap();
        assert!(matches!(t, FRepNode::Transform { .. }));
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "(circle 0 0)",
            "(circle 0 0 1",
            "(circle 0 0 -1)",
            "(blob 1)",
            "(union-rv 3 (circle 0 0 1) (circle 0 0 1))",
            "(circle 0 0 1) extra",
            "(circle a 0 1)",
        ] {
            assert!(parse(bad).is_err(), "{bad:?} should fail");
        }
    }

    fn leaf() -> impl Strategy<Value = FRepNode> {
        let c = -10.0..10.0f64;
        let r = 0.01..5.0f64;
        prop_oneof![
            (c.clone(), c.clone(), r.clone())
                .prop_map(|(x, y, r)| Primitive::circle([x, y], r).unwrap().into()),
            (c.clone(), c.clone(), c.clone(), r.clone())
                .prop_map(|(x, y, z, r)| Primitive::sphere([x, y, z], r).unwrap().into()),
            (c.clone(), c.clone(), r.clone(), r.clone())
                .prop_map(|(x, y, a, b)| Primitive::rectangle([x, y], [a, b]).unwrap().into()),
            (0usize..3, c.clone(), c.clone(), -0.99..0.99f64)
                .prop_map(|(a, nu, phi, l)| Primitive::slab(a, nu, phi, l).unwrap().into()),
        ]
    }

    fn tree() -> impl Strategy<Value = FRepNode> {
        leaf().prop_recursive(4, 32, 2, |inner| {
            let op = prop_oneof![
                Just(BinaryOp::UnionR1),
                Just(BinaryOp::IntersectR1),
                Just(BinaryOp::SubtractR1),
                (1u32..4).prop_map(|k| BinaryOp::UnionRv(2 * k)),
                (1u32..4).prop_map(|k| BinaryOp::IntersectRv(2 * k)),
                Just(BinaryOp::UnionMax),
                Just(BinaryOp::IntersectMin),
            ];
            prop_oneof![
                (op, inner.clone(), inner.clone())
                    .prop_map(|(op, a, b)| FRepNode::binary(op, a, b).unwrap()),
                (prop::array::uniform9(-3.0..3.0f64), prop::array::uniform3(-3.0..3.0f64), inner)
                    .prop_map(|(m, t, c)| {
                        let matrix = [[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]];
                        FRepNode::transform(matrix, t, c).unwrap()
                    }),
            ]
        })
    }

    proptest! {
        #[test]
        fn round_trip(t in tree()) {
            prop_assert_eq!(parse(&to_sexpr(&t)).unwrap(), t);
        }
    }
}
