//! Planar primitives shared by the planning stages.
//!
//! Coordinates are meters throughout. Rings are stored without a repeated
//! closing vertex; every function treats them as implicitly closed.

use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Heading changes above this count as a turn vertex.
pub const TURN_TOLERANCE_RAD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

// Points serialize as `[x, y]` pairs to match the polygon file schema.
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PointVisitor;
        impl<'de> Visitor<'de> for PointVisitor {
            type Value = Point;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a [x, y] coordinate pair")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Point, A::Error> {
                let x = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(0, &self))?;
                let y = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(1, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(serde::de::Error::invalid_length(3, &self));
                }
                Ok(Point::new(x, y))
            }
        }
        deserializer.deserialize_tuple(2, PointVisitor)
    }
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect {
            min: Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn inflate(&self, by: f64) -> Rect {
        Rect {
            min: Point::new(self.min.x - by, self.min.y - by),
            max: Point::new(self.max.x + by, self.max.y + by),
        }
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }
}

/// Signed shoelace area of an implicitly closed ring. Positive when
/// counterclockwise.
pub fn ring_signed_area(ring: &[Point]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[(i + 1) % ring.len()];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

/// Even-odd point-in-ring test. Points exactly on an edge may land on either
/// side; callers that need boundary cells use area clipping instead.
pub fn point_in_ring(p: Point, ring: &[Point]) -> bool {
    let mut inside = false;
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn clip_halfplane(input: &[Point], inside: impl Fn(Point) -> bool, cross: impl Fn(Point, Point) -> Point) -> Vec<Point> {
    let mut out = Vec::with_capacity(input.len() + 4);
    let n = input.len();
    for i in 0..n {
        let cur = input[i];
        let next = input[(i + 1) % n];
        let cur_in = inside(cur);
        let next_in = inside(next);
        if cur_in {
            out.push(cur);
        }
        if cur_in != next_in {
            out.push(cross(cur, next));
        }
    }
    out
}

/// Area of `ring ∩ rect` via Sutherland–Hodgman clipping against the four
/// half-planes followed by the shoelace formula. Works for either ring
/// orientation; degenerate bridge edges introduced for non-convex subjects
/// cancel in the signed sum.
pub fn clip_area_to_rect(ring: &[Point], rect: &Rect) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let mut poly = ring.to_vec();
    let at_x = |x: f64| move |a: Point, b: Point| {
        let t = (x - a.x) / (b.x - a.x);
        Point::new(x, a.y + t * (b.y - a.y))
    };
    let at_y = |y: f64| move |a: Point, b: Point| {
        let t = (y - a.y) / (b.y - a.y);
        Point::new(a.x + t * (b.x - a.x), y)
    };
    let (x0, x1, y0, y1) = (rect.min.x, rect.max.x, rect.min.y, rect.max.y);
    poly = clip_halfplane(&poly, |p| p.x >= x0, at_x(x0));
    if poly.is_empty() {
        return 0.0;
    }
    poly = clip_halfplane(&poly, |p| p.x <= x1, at_x(x1));
    if poly.is_empty() {
        return 0.0;
    }
    poly = clip_halfplane(&poly, |p| p.y >= y0, at_y(y0));
    if poly.is_empty() {
        return 0.0;
    }
    poly = clip_halfplane(&poly, |p| p.y <= y1, at_y(y1));
    ring_signed_area(&poly).abs()
}

pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Counts interior vertices whose heading change exceeds `tol_rad`.
/// Zero-length segments are skipped rather than counted.
pub fn count_turns(points: &[Point], tol_rad: f64) -> usize {
    let mut turns = 0;
    let mut prev_dir: Option<(f64, f64)> = None;
    for w in points.windows(2) {
        let dx = w[1].x - w[0].x;
        let dy = w[1].y - w[0].y;
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        let dir = (dx / len, dy / len);
        if let Some((px, py)) = prev_dir {
            let dot = px * dir.0 + py * dir.1;
            let cross = px * dir.1 - py * dir.0;
            let angle = cross.abs().atan2(dot);
            if angle > tol_rad {
                turns += 1;
            }
        }
        prev_dir = Some(dir);
    }
    turns
}

/// Removes consecutive duplicate points.
pub fn dedup_consecutive(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

/// Chebyshev (L∞) distance from `p` to the segment `ab`.
///
/// The camera footprint is a square, so a point is inside a sweep swath
/// exactly when this distance is at most half the footprint width. The
/// distance along the segment is a convex piecewise-linear function of the
/// parameter, so its minimum sits at an endpoint, at a per-coordinate zero,
/// or where the two coordinate deviations are equal in magnitude.
pub fn linf_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ux = b.x - a.x;
    let uy = b.y - a.y;
    let rx = p.x - a.x;
    let ry = p.y - a.y;
    let eval = |t: f64| {
        let t = t.clamp(0.0, 1.0);
        (rx - t * ux).abs().max((ry - t * uy).abs())
    };
    let mut best = eval(0.0).min(eval(1.0));
    if ux != 0.0 {
        best = best.min(eval(rx / ux));
    }
    if uy != 0.0 {
        best = best.min(eval(ry / uy));
    }
    if ux != uy {
        best = best.min(eval((rx - ry) / (ux - uy)));
    }
    if ux + uy != 0.0 {
        best = best.min(eval((rx + ry) / (ux + uy)));
    }
    best
}
