use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unit-energy, Gray-labelled square QAM.
///
/// Point `i` sits at row `i / √M`, column `i % √M` of the lattice
/// `{−(√M−1), …, √M−1}²`, scaled by `√(3 / (2(M−1)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    m: u32,
    side: u32,
    scale: f64,
    points: Vec<Complex64>,
    labels: Vec<u32>,
}

fn gray(n: u32) -> u32 {
    n ^ (n >> 1)
}

impl Constellation {
    pub fn square_qam(m: u32) -> Result<Self> {
        let side = (m as f64).sqrt().round() as u32;
        if m < 4 || side * side != m {
            return Err(Error::domain(format!(
                "modulation order {m} is not a perfect square >= 4"
            )));
        }
        let scale = (3.0 / (2.0 * (m as f64 - 1.0))).sqrt();
        let bits = side.trailing_zeros();
        let offset = (side - 1) as f64;
        let mut points = Vec::with_capacity(m as usize);
        let mut labels = Vec::with_capacity(m as usize);
        for row in 0..side {
            for col in 0..side {
                points.push(Complex64::new(
                    scale * (2.0 * col as f64 - offset),
                    scale * (2.0 * row as f64 - offset),
                ));
                // Gray coding per axis only gives one-bit neighbours when √M is a power of two.
                labels.push(if side.is_power_of_two() {
                    (gray(row) << bits) | gray(col)
                } else {
                    row * side + col
                });
            }
        }
        Ok(Constellation {
            m,
            side,
            scale,
            points,
            labels,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn side(&self) -> u32 {
        self.side
    }
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Symbol index whose point is nearest to `y`, ties going to the lowest index.
    ///
    /// On the square lattice the nearest point separates into independent
    /// per-axis decisions, so this is `O(1)`.
    pub fn demodulate(&self, y: Complex64) -> usize {
        let row = self.axis_decision(y.im);
        let col = self.axis_decision(y.re);
        row * self.side as usize + col
    }

    fn axis_decision(&self, v: f64) -> usize {
        let pos = 0.5 * (v / self.scale + (self.side - 1) as f64);
        // round half down
        let idx = (pos - 0.5).ceil();
        idx.clamp(0.0, (self.side - 1) as f64) as usize
    }

    /// Exhaustive minimum-distance search; reference for [`demodulate`](Self::demodulate).
    pub fn demodulate_exhaustive(&self, y: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }
}
