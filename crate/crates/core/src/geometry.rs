//! Small planar and spatial helpers shared by the mesh and unfolding code.

use nalgebra::{Point2, Point3, Vector2, Vector3};

pub type P2 = Point2<f64>;
pub type P3 = Point3<f64>;
pub type V2 = Vector2<f64>;
pub type V3 = Vector3<f64>;

/// Angle between two vectors in `[0, π]`, computed with `atan2` so that
/// nearly parallel inputs keep full precision.
pub fn angle_between(a: &V3, b: &V3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

pub fn cross2(a: &V2, b: &V2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area of a polygon (positive when counterclockwise).
pub fn signed_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

/// Newell normal of a spatial polygon; its length is twice the area.
pub fn newell_normal(points: &[P3]) -> V3 {
    let mut n = V3::zeros();
    let k = points.len();
    for i in 0..k {
        let p = &points[i];
        let q = &points[(i + 1) % k];
        n.x += (p.y - q.y) * (p.z + q.z);
        n.y += (p.z - q.z) * (p.x + q.x);
        n.z += (p.x - q.x) * (p.y + q.y);
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox2 {
    pub min: P2,
    pub max: P2,
}

impl BBox2 {
    pub fn of(points: &[P2]) -> Self {
        let mut min = P2::new(f64::INFINITY, f64::INFINITY);
        let mut max = P2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        BBox2 { min, max }
    }

    pub fn union(&self, other: &BBox2) -> BBox2 {
        BBox2 {
            min: P2::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: P2::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn overlaps(&self, other: &BBox2) -> bool {
        self.min.x <= other.max.x && other.min.x <= self.max.x && self.min.y <= other.max.y && other.min.y <= self.max.y
    }

    pub fn diameter(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

/// Intersection of two convex counterclockwise polygons (Sutherland–Hodgman).
pub fn clip_convex(subject: &[P2], clip: &[P2]) -> Vec<P2> {
    let mut output: Vec<P2> = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % n];
        let edge = b - a;
        let input = std::mem::take(&mut output);
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let cur_in = cross2(&edge, &(cur - a));
            let prev_in = cross2(&edge, &(prev - a));
            if cur_in >= 0.0 {
                if prev_in < 0.0 {
                    output.push(segment_line_point(prev, cur, prev_in, cur_in));
                }
                output.push(cur);
            } else if prev_in >= 0.0 {
                output.push(segment_line_point(prev, cur, prev_in, cur_in));
            }
        }
    }
    output
}

fn segment_line_point(p: P2, q: P2, dp: f64, dq: f64) -> P2 {
    let t = dp / (dp - dq);
    p + (q - p) * t
}

/// Area of the intersection of two convex counterclockwise polygons.
pub fn convex_intersection_area(a: &[P2], b: &[P2]) -> f64 {
    signed_area(&clip_convex(a, b)).max(0.0)
}

/// Total measure of the union of angular intervals `[start, start + width]`
/// taken modulo 2π. Widths are clamped to a full turn.
pub fn angular_union(intervals: &[(f64, f64)]) -> f64 {
    use std::f64::consts::TAU;
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for &(start, width) in intervals {
        if width >= TAU {
            return TAU;
        }
        let s = start.rem_euclid(TAU);
        let e = s + width;
        if e <= TAU {
            pieces.push((s, e));
        } else {
            pieces.push((s, TAU));
            pieces.push((0.0, e - TAU));
        }
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (s, e) in pieces {
        match cur {
            Some((cs, ce)) if s <= ce => cur = Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += ce - cs;
                cur = Some((s, e));
            }
            None => cur = Some((s, e)),
        }
    }
    if let Some((cs, ce)) = cur {
        total += ce - cs;
    }
    total
}

/// Formats a float with `digits` significant digits, `%g` style: fixed
/// notation for moderate exponents, scientific otherwise, trailing zeros
/// trimmed. Negative zero prints as `0`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".to_string() } else { format!("{x}") };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let fixed = format!("{:.*}", decimals, x);
    let out = trim_zeros(&fixed);
    if out == "-0" {
        "0".to_string()
    } else {
        out
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    format_sig(x, digits).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn square(x0: f64, y0: f64, s: f64) -> Vec<P2> {
        vec![
            P2::new(x0, y0),
            P2::new(x0 + s, y0),
            P2::new(x0 + s, y0 + s),
            P2::new(x0, y0 + s),
        ]
    }

    #[test]
    fn clipping_overlapping_squares() {
        let a = square(0.0, 0.0, 2.0);
        let b = square(1.0, 1.0, 2.0);
        assert!((convex_intersection_area(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shared_edge_has_no_area() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(1.0, 0.0, 1.0);
        assert!(convex_intersection_area(&a, &b) < 1e-15);
        let c = square(5.0, 5.0, 1.0);
        assert_eq!(convex_intersection_area(&a, &c), 0.0);
    }

    #[test]
    fn angular_union_wraps() {
        let u = angular_union(&[(0.0, PI), (PI * 1.5, PI)]);
        assert!((u - 1.5 * PI).abs() < 1e-12);
        let w = angular_union(&[(0.0, PI), (PI * 0.5, 1.6 * PI)]);
        assert!((w - TAU).abs() < 1e-12);
        let v = angular_union(&[(0.1, 0.2), (0.2, 0.2)]);
        assert!((v - 0.3).abs() < 1e-12);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(123456.789, 4), "1.235e5");
        assert_eq!(format_sig(-2.5e-9, 12), "-2.5e-9");
    }

    #[test]
    fn angle_between_is_precise_for_small_angles() {
        let a = V3::new(1.0, 0.0, 0.0);
        let b = V3::new(1.0, 1e-12, 0.0);
        assert!((angle_between(&a, &b) - 1e-12).abs() < 1e-24);
    }
}
