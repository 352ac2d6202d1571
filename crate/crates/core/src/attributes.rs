//! Heterogeneous objects: attribute functions parameterised by the distance
//! value of the geometry, evaluated per partition of the object.

use crate::error::{invalid, HfrepError, Result};
use crate::frep::rv_intersect;
use crate::grid::Point;
use crate::pipeline::{HfrepField, HfrepParams, Route};

/// Deterministic noise in `[0, 1)`.
pub trait Htab: Sync {
    fn htab(&self, p: &Point) -> f64;
}

/// Seeded integer hash of lattice points, multilinearly interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LatticeHash {
    pub seed: u64,
}

impl LatticeHash {
    pub fn new(seed: u64) -> Self {
        LatticeHash { seed }
    }

    /// Hash of one lattice point, uniform in `[0, 1)`.
    pub fn lattice_value(&self, ijk: [i64; 3]) -> f64 {
        let mut h = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for c in ijk {
            h = splitmix(h ^ c as u64);
        }
        (h >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Htab for LatticeHash {
    fn htab(&self, p: &Point) -> f64 {
        let base = p.0.map(|c| c.floor());
        let t = [p.0[0] - base[0], p.0[1] - base[1], p.0[2] - base[2]];
        let b = base.map(|c| c as i64);
        let mut v = 0.0;
        for corner in 0..8 {
            let mut w = 1.0;
            let mut ijk = b;
            for a in 0..3 {
                if (corner >> a) & 1 == 1 {
                    ijk[a] += 1;
                    w *= t[a];
                } else {
                    w *= 1.0 - t[a];
                }
            }
            if w != 0.0 {
                v += w * self.lattice_value(ijk);
            }
        }
        // a convex blend of values below 1 can still round up to 1
        v.min(1.0 - f64::EPSILON / 2.0)
    }
}

/// Periodic slab components `sin(ν_i p_i + φ_i) + l_i` for the first
/// `nu.len()` axes. Thresholds must lie in `(-1, 1)`.
pub fn slabs(p: &Point, nu: &[f64], phi: &[f64], l: &[f64]) -> Result<Vec<f64>> {
    if nu.len() != phi.len() || nu.len() != l.len() || nu.len() > 3 {
        return Err(invalid("slab vectors must have equal length of at most 3"));
    }
    check_thresholds(l)?;
    Ok((0..nu.len()).map(|i| (nu[i] * p.0[i] + phi[i]).sin() + l[i]).collect())
}

fn check_thresholds(l: &[f64]) -> Result<()> {
    match l.iter().find(|v| !(**v > -1.0 && **v < 1.0)) {
        Some(v) => Err(invalid(format!("slab threshold must lie in (-1, 1), got {v}"))),
        None => Ok(()),
    }
}

/// Geometry value intersected with every slab component's solid.
pub fn microstructure(geometry: f64, components: &[f64]) -> f64 {
    components.iter().fold(geometry, |acc, &s| rv_intersect(acc, s, 2))
}

/// Procedural wood: the noise frequency grows with the distance value and
/// the output is the fractional part of the scaled noise.
pub fn wood(p: &Point, distance: f64, c: f64, base_frequency: f64, htab: &dyn Htab) -> f64 {
    let nu = base_frequency * distance;
    let g = htab.htab(&(*p * nu)) * c;
    g - g.floor()
}

/// One attribute: a colour, a wood scalar or slab components.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeFn {
    ConstantColor([f64; 3]),
    Wood { c: f64, base_frequency: f64, hash: LatticeHash },
    Slabs { nu: Vec<f64>, phi: Vec<f64>, l: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Color([f64; 3]),
    Scalar(f64),
    Vector(Vec<f64>),
}

impl AttributeValue {
    /// Display colour: wood scalars map to a light-to-dark brown ramp, slab
    /// vectors to white where every component is solid and grey elsewhere.
    pub fn to_rgb(&self) -> [f64; 3] {
        match self {
            AttributeValue::Color(c) => *c,
            AttributeValue::Scalar(s) => {
                let (light, dark) = ([0.87, 0.72, 0.53], [0.45, 0.27, 0.12]);
                std::array::from_fn(|k| light[k] + (dark[k] - light[k]) * s)
            }
            AttributeValue::Vector(v) => {
                if v.iter().all(|c| *c >= 0.0) {
                    [1.0; 3]
                } else {
                    [0.35; 3]
                }
            }
        }
    }
}

impl AttributeFn {
    pub fn constant(rgb: [f64; 3]) -> Result<Self> {
        if rgb.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(invalid("colour components must lie in [0, 1]"));
        }
        Ok(AttributeFn::ConstantColor(rgb))
    }

    pub fn wood(c: f64, base_frequency: f64, seed: u64) -> Result<Self> {
        if !(c > 1.0) || !c.is_finite() {
            return Err(invalid(format!("wood contrast c must exceed 1, got {c}")));
        }
        if !base_frequency.is_finite() {
            return Err(invalid("wood base frequency must be finite"));
        }
        Ok(AttributeFn::Wood { c, base_frequency, hash: LatticeHash::new(seed) })
    }

    pub fn slabs(nu: Vec<f64>, phi: Vec<f64>, l: Vec<f64>) -> Result<Self> {
        slabs(&Point::ORIGIN, &nu, &phi, &l)?;
        Ok(AttributeFn::Slabs { nu, phi, l })
    }

    /// Value at `p` for geometry distance `d`.
    pub fn eval(&self, d: f64, p: &Point) -> AttributeValue {
        match self {
            AttributeFn::ConstantColor(c) => AttributeValue::Color(*c),
            AttributeFn::Wood { c, base_frequency, hash } => {
                AttributeValue::Scalar(wood(p, d, *c, *base_frequency, hash))
            }
            AttributeFn::Slabs { nu, phi, l } => {
                AttributeValue::Vector((0..nu.len()).map(|i| (nu[i] * p.0[i] + phi[i]).sin() + l[i]).collect())
            }
        }
    }
}

/// Distance band `[lo, hi)` mapped to an attribute index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub attribute: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionScheme {
    Single(usize),
    /// Contiguous bands starting at distance 0; the last band also takes its
    /// upper edge.
    Bands(Vec<Band>),
}

impl PartitionScheme {
    pub fn bands(bands: Vec<Band>) -> Result<Self> {
        if bands.is_empty() {
            return Err(invalid("at least one band is needed"));
        }
        if bands[0].lo != 0.0 {
            return Err(invalid("bands must start at distance 0"));
        }
        for (k, b) in bands.iter().enumerate() {
            if !(b.hi > b.lo) {
                return Err(invalid(format!("band {k} is empty")));
            }
            if k > 0 && bands[k - 1].hi != b.lo {
                return Err(invalid(format!("band {k} does not start where band {} ends", k - 1)));
            }
        }
        Ok(PartitionScheme::Bands(bands))
    }

    /// Partition index (not attribute index) for a distance `d ≥ 0`.
    pub fn select(&self, d: f64) -> Option<usize> {
        match self {
            PartitionScheme::Single(_) => Some(0),
            PartitionScheme::Bands(b) => {
                let last = b.len() - 1;
                b.iter()
                    .position(|band| d >= band.lo && d < band.hi)
                    .or_else(|| (d == b[last].hi).then_some(last))
            }
        }
    }

    fn attribute_of(&self, partition: usize) -> usize {
        match self {
            PartitionScheme::Single(a) => *a,
            PartitionScheme::Bands(b) => b[partition].attribute,
        }
    }

    fn max_attribute(&self) -> usize {
        match self {
            PartitionScheme::Single(a) => *a,
            PartitionScheme::Bands(b) => b.iter().map(|x| x.attribute).max().unwrap_or(0),
        }
    }
}

/// Result of evaluating a heterogeneous object at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSample {
    pub distance: f64,
    /// `None` outside the object or beyond the last band.
    pub partition: Option<usize>,
    pub value: AttributeValue,
}

/// Geometry plus ordered attribute functions over a partition scheme.
#[derive(Debug, Clone)]
pub struct HeterogeneousObject {
    pub geometry: HfrepField,
    pub attributes: Vec<AttributeFn>,
    pub partitions: PartitionScheme,
    /// Returned outside the object.
    pub exterior: AttributeValue,
}

impl HeterogeneousObject {
    pub fn new(
        geometry: HfrepField,
        attributes: Vec<AttributeFn>,
        partitions: PartitionScheme,
        exterior: AttributeValue,
    ) -> Result<Self> {
        if partitions.max_attribute() >= attributes.len() {
            return Err(invalid("partition refers to a missing attribute"));
        }
        Ok(HeterogeneousObject { geometry, attributes, partitions, exterior })
    }

    /// Attribute at `p` given a precomputed geometry value `d`.
    pub fn evaluate_with_distance(&self, d: f64, p: &Point) -> AttributeSample {
        let partition = if d >= 0.0 { self.partitions.select(d) } else { None };
        let value = match partition {
            Some(k) => self.attributes[self.partitions.attribute_of(k)].eval(d, p),
            None => self.exterior.clone(),
        };
        AttributeSample { distance: d, partition, value }
    }
}

pub fn evaluate_attributes(obj: &HeterogeneousObject, p: &Point) -> Result<AttributeSample> {
    let d = obj.geometry.eval(p)?;
    Ok(obj.evaluate_with_distance(d, p))
}

/// Attribute scheme read from flat `key = value` text:
///
/// ```text
/// route = dt
/// res = 257
/// slope = 0.0001
/// exterior = 0.1 0.1 0.1
/// attribute = constant 1 0.8 0.2
/// attribute = wood 3 40 7          # c, base frequency, seed
/// attribute = slabs 12.6 12.6 0 0 0.3 0.3   # ν…, φ…, l…
/// partition = single 0
/// band = 0 0.05 0                  # lo, hi, attribute (repeatable)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeScheme {
    pub route: Route,
    pub res: usize,
    pub slope: Option<f64>,
    pub exterior: [f64; 3],
    pub attributes: Vec<AttributeFn>,
    pub partitions: PartitionScheme,
}

impl AttributeScheme {
    pub fn parse(text: &str) -> Result<Self> {
        let defaults = HfrepParams::default();
        let mut route = Route::Dt;
        let mut res = defaults.res;
        let mut slope = None;
        let mut exterior = [0.0; 3];
        let mut attributes = Vec::new();
        let mut single = None;
        let mut bands = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| HfrepError::Parse(format!("line {}: {m}", n + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
            let words: Vec<&str> = value.split_whitespace().collect();
            let nums = |ws: &[&str]| -> Result<Vec<f64>> {
                ws.iter().map(|w| w.parse::<f64>().map_err(|_| err(&format!("bad number '{w}'")))).collect()
            };
            match key.trim() {
                "route" => route = value.trim().parse().map_err(|e: HfrepError| err(&e.to_string()))?,
                "res" => res = value.trim().parse().map_err(|_| err("bad resolution"))?,
                "slope" => slope = Some(nums(&words)?.first().copied().ok_or_else(|| err("missing slope"))?),
                "exterior" => {
                    let v = nums(&words)?;
                    exterior = v.try_into().map_err(|_| err("exterior needs 3 components"))?;
                }
                "attribute" => {
                    let (kind, rest) = words.split_first().ok_or_else(|| err("missing attribute kind"))?;
                    let v = nums(rest)?;
                    let a = match *kind {
                        "constant" if v.len() == 3 => AttributeFn::constant([v[0], v[1], v[2]]),
                        "wood" if v.len() == 3 && v[2] >= 0.0 && v[2].fract() == 0.0 => {
                            AttributeFn::wood(v[0], v[1], v[2] as u64)
                        }
                        "slabs" if !v.is_empty() && v.len() % 3 == 0 => {
                            let k = v.len() / 3;
                            AttributeFn::slabs(v[..k].to_vec(), v[k..2 * k].to_vec(), v[2 * k..].to_vec())
                        }
                        _ => return Err(err(&format!("bad attribute '{}'", value.trim()))),
                    };
                    attributes.push(a.map_err(|e| err(&e.to_string()))?);
                }
                "partition" => match words.as_slice() {
                    ["single", a] => single = Some(a.parse().map_err(|_| err("bad attribute index"))?),
                    ["bands"] => {}
                    _ => return Err(err("partition is 'single <index>' or 'bands'")),
                },
                "band" => {
                    let v = nums(&words)?;
                    if v.len() != 3 || v[2] < 0.0 || v[2].fract() != 0.0 {
                        return Err(err("band needs lo hi attribute-index"));
                    }
                    bands.push(Band { lo: v[0], hi: v[1], attribute: v[2] as usize });
                }
                other => return Err(err(&format!("unknown key '{other}'"))),
            }
        }
        if attributes.is_empty() {
            return Err(HfrepError::Parse("scheme declares no attribute".into()));
        }
        let partitions = match (single, bands.is_empty()) {
            (Some(_), false) => return Err(HfrepError::Parse("use either a single partition or bands".into())),
            (Some(a), true) => PartitionScheme::Single(a),
            (None, true) => PartitionScheme::Single(0),
            (None, false) => PartitionScheme::bands(bands)?,
        };
        if partitions.max_attribute() >= attributes.len() {
            return Err(HfrepError::Parse("partition refers to a missing attribute".into()));
        }
        Ok(AttributeScheme { route, res, slope, exterior, attributes, partitions })
    }
}
