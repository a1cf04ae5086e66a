//! Synthetic reference routes.
//!
//! The closed lap is a rounded rectangle: two 300 m straights joined by two
//! 30 m radius semicircles (about 788 m per lap), starting halfway along
//! the first straight and running counter-clockwise.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A straight or constant-curvature piece of a route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub length: f64,
    pub curvature: f64,
}

impl Piece {
    pub fn straight(length: f64) -> Self {
        Self { length, curvature: 0.0 }
    }

    pub fn arc(radius: f64, angle_deg: f64) -> Self {
        let curvature = angle_deg.signum() / radius;
        Self {
            length: radius * angle_deg.abs().to_radians(),
            curvature,
        }
    }
}

/// Samples a chain of pieces every `spacing` metres (piece ends included).
/// With `closed`, the final point is omitted since it coincides with the
/// first.
pub fn chain(pieces: &[Piece], start: (f64, f64, f64), spacing: f64, closed: bool) -> Vec<(f64, f64)> {
    let (mut x, mut y, mut heading) = start;
    let mut out = vec![(x, y)];
    for piece in pieces {
        let steps = (piece.length / spacing).ceil().max(1.0) as usize;
        let (x0, y0, h0) = (x, y, heading);
        for k in 1..=steps {
            let d = piece.length * k as f64 / steps as f64;
            if piece.curvature == 0.0 {
                x = x0 + d * h0.cos();
                y = y0 + d * h0.sin();
                heading = h0;
            } else {
                let r = 1.0 / piece.curvature;
                heading = h0 + d * piece.curvature;
                x = x0 + r * (heading.sin() - h0.sin());
                y = y0 - r * (heading.cos() - h0.cos());
            }
            out.push((x, y));
        }
    }
    if closed {
        out.pop();
    }
    out
}

pub fn straight(length: f64) -> Vec<(f64, f64)> {
    chain(&[Piece::straight(length)], (0.0, 0.0, 0.0), 0.5, false)
}

pub fn circle(radius: f64, step_deg: f64) -> Vec<(f64, f64)> {
    let n = (360.0 / step_deg).round() as usize;
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            (radius * a.cos(), radius * a.sin())
        })
        .collect()
}

/// Closed lap: straights of `straight_len` and semicircles of `radius`.
pub fn rounded_rectangle(straight_len: f64, radius: f64) -> Vec<(f64, f64)> {
    let pieces = [
        Piece::straight(straight_len / 2.0),
        Piece::arc(radius, 180.0),
        Piece::straight(straight_len),
        Piece::arc(radius, 180.0),
        Piece::straight(straight_len / 2.0),
    ];
    chain(&pieces, (0.0, 0.0, 0.0), 0.5, true)
}

/// The reference lap: 2 x 300 m straights, 2 x R30 semicircles.
pub fn reference_lap() -> Vec<(f64, f64)> {
    rounded_rectangle(300.0, 30.0)
}

/// Open S-bend: straight, 60° left at R40, 60° right at R40, straight.
pub fn chicane() -> Vec<(f64, f64)> {
    let pieces = [
        Piece::straight(60.0),
        Piece::arc(40.0, 60.0),
        Piece::arc(40.0, -60.0),
        Piece::straight(60.0),
    ];
    chain(&pieces, (0.0, 0.0, 0.0), 0.5, false)
}

/// Random open route of straights and arcs with total length near
/// `length`. Radii are between 20 and 120 m.
pub fn random_route(seed: u64, length: f64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces = Vec::new();
    let mut total = 0.0;
    while total < length {
        let remaining = length - total;
        let piece = if rng.random_bool(0.4) {
            Piece::straight(rng.random_range(10.0..60.0f64).min(remaining.max(5.0)))
        } else {
            let radius = rng.random_range(20.0..120.0);
            let max_angle = (remaining.max(5.0) / radius).to_degrees().min(90.0);
            let angle = rng.random_range(10.0f64.min(max_angle)..=max_angle);
            Piece::arc(radius, if rng.random_bool(0.5) { angle } else { -angle })
        };
        total += piece.length;
        pieces.push(piece);
    }
    chain(&pieces, (0.0, 0.0, 0.0), 0.5, false)
}
