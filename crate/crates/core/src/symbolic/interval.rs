//! Piecewise monotone maps of the unit interval: lap numbers, orbits and
//! Lyapunov (Pesin) entropy estimates.

use serde::Serialize;

use crate::error::{domain, validation, Error, Result};

/// Refinement stops with an error beyond this many monotone pieces.
pub const MAX_LAP_PIECES: usize = 1 << 22;

/// A self-map of `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum IntervalMap {
    /// `x ↦ a x (1 - x)` with `0 < a ≤ 4`.
    Logistic { a: f64 },
    /// `x ↦ 2 min(x, 1 - x)`.
    Tent,
    /// `x ↦ 2x mod 1`.
    Doubling,
    /// Continuous piecewise linear interpolation of `knots`, which run from
    /// `x = 0` to `x = 1` with values in `[0, 1]`.
    Piecewise { knots: Vec<(f64, f64)> },
}

/// Boundary between two monotone branches of a map.
#[derive(Debug, Clone, Copy)]
struct Cut {
    at: f64,
    continuous: bool,
}

impl IntervalMap {
    pub fn logistic(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 4.0) {
            return Err(domain(format!(
                "logistic parameter must lie in (0, 4], got {a}"
            )));
        }
        Ok(IntervalMap::Logistic { a })
    }

    pub fn piecewise(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(validation("a piecewise map needs at least two knots"));
        }
        if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(validation("knots must start at x = 0 and end at x = 1"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(validation("knot abscissae must be strictly increasing"));
        }
        if let Some(&(x, y)) = knots.iter().find(|k| !(0.0..=1.0).contains(&k.1)) {
            return Err(validation(format!(
                "knot ({x}, {y}) leaves the unit interval"
            )));
        }
        if knots.windows(2).any(|w| w[1].1 == w[0].1) {
            return Err(Error::Unsupported(
                "piecewise map has a flat segment".into(),
            ));
        }
        Ok(IntervalMap::Piecewise { knots })
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            IntervalMap::Logistic { a } => a * x * (1.0 - x),
            IntervalMap::Tent => 2.0 * x.min(1.0 - x),
            IntervalMap::Doubling => (2.0 * x).fract(),
            IntervalMap::Piecewise { knots } => {
                let i = knots
                    .partition_point(|k| k.0 <= x)
                    .clamp(1, knots.len() - 1);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// `f'(x)`, or `None` where `f` is not differentiable.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            IntervalMap::Logistic { a } => Some(a * (1.0 - 2.0 * x)),
            IntervalMap::Tent => match x {
                x if x < 0.5 => Some(2.0),
                x if x > 0.5 => Some(-2.0),
                _ => None,
            },
            IntervalMap::Doubling => (x != 0.5).then_some(2.0),
            IntervalMap::Piecewise { knots } => {
                if knots[1..knots.len() - 1].iter().any(|k| k.0 == x) {
                    return None;
                }
                let i = knots
                    .partition_point(|k| k.0 <= x)
                    .clamp(1, knots.len() - 1);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                Some((y1 - y0) / (x1 - x0))
            }
        }
    }

    /// Branch boundaries and the direction (+1/-1) of each branch.
    fn branches(&self) -> (Vec<Cut>, Vec<i8>) {
        match self {
            IntervalMap::Logistic { .. } | IntervalMap::Tent => (
                vec![Cut {
                    at: 0.5,
                    continuous: true,
                }],
                vec![1, -1],
            ),
            IntervalMap::Doubling => (
                vec![Cut {
                    at: 0.5,
                    continuous: false,
                }],
                vec![1, 1],
            ),
            IntervalMap::Piecewise { knots } => {
                let dirs: Vec<i8> = knots
                    .windows(2)
                    .map(|w| if w[1].1 > w[0].1 { 1 } else { -1 })
                    .collect();
                let mut cuts = Vec::new();
                let mut branch_dirs = vec![dirs[0]];
                for (i, w) in dirs.windows(2).enumerate() {
                    if w[0] != w[1] {
                        cuts.push(Cut {
                            at: knots[i + 1].0,
                            continuous: true,
                        });
                        branch_dirs.push(w[1]);
                    }
                }
                (cuts, branch_dirs)
            }
        }
    }

    /// `f` on branch `b`, extended continuously to the branch's closed ends.
    fn apply_on_branch(&self, b: usize, y: f64) -> f64 {
        match self {
            IntervalMap::Doubling => 2.0 * y - b as f64,
            _ => self.apply(y),
        }
    }

    /// `x_0, f(x_0), …` (`n` values).
    ///
    /// Tent-map orbits are computed through the conjugacy
    /// `x = (2/π) asin √y` with the logistic map at `a = 4`, because direct
    /// iteration of `2 min(x, 1 - x)` shifts out one mantissa bit per step and
    /// reaches 0 within about 55 steps. Doubling-map orbits are iterated
    /// directly and do collapse to 0 in floating point.
    pub fn orbit(&self, x0: f64, n: usize) -> Result<Vec<f64>> {
        if !(0.0..=1.0).contains(&x0) {
            return Err(domain(format!(
                "initial point must lie in [0, 1], got {x0}"
            )));
        }
        let mut out = Vec::with_capacity(n);
        if let IntervalMap::Tent = self {
            let half_pi = std::f64::consts::FRAC_PI_2;
            let mut y = (half_pi * x0).sin().powi(2);
            for _ in 0..n {
                out.push(y.sqrt().asin() / half_pi);
                y = 4.0 * y * (1.0 - y);
            }
            return Ok(out);
        }
        let mut x = x0;
        for _ in 0..n {
            out.push(x);
            x = self.apply(x);
        }
        Ok(out)
    }

    fn iterate(&self, x: f64, n: usize) -> f64 {
        (0..n).fold(x, |x, _| self.apply(x))
    }
}

/// `ℓ_n` and the estimate `(1/n) ln ℓ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LapCount {
    pub n: usize,
    pub laps: u64,
    pub estimate: f64,
}

/// A maximal interval on which `f^n` is continuous and monotone.
#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    /// `f^n` at the left and right end (one-sided limits).
    y_lo: f64,
    y_hi: f64,
    dir: i8,
    /// `f^n` is continuous across the left end of this piece.
    joined_left: bool,
}

/// Finds `x` in `(p.lo, p.hi)` with `f^n(x) = c`.
fn preimage(f: &IntervalMap, n: usize, p: &Piece, c: f64) -> f64 {
    let (mut lo, mut hi) = (p.lo, p.hi);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let below = f.iterate(mid, n) < c;
        if below == (p.dir > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Lap numbers `ℓ_1 … ℓ_{n_max}` of the iterates of `f`, counted exactly by
/// refining monotone pieces at preimages of the branch boundaries.
pub fn lap_number_entropy(f: &IntervalMap, n_max: usize) -> Result<Vec<LapCount>> {
    if n_max == 0 {
        return Err(domain("n_max must be ≥ 1"));
    }
    let (cuts, dirs) = f.branches();
    let branch_of = |y: f64| cuts.partition_point(|c| c.at <= y);
    let mut pieces = vec![Piece {
        lo: 0.0,
        hi: 1.0,
        y_lo: 0.0,
        y_hi: 1.0,
        dir: 1,
        joined_left: false,
    }];
    let mut out = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let mut next: Vec<Piece> = Vec::with_capacity(pieces.len() * 2);
        for p in &pieces {
            let (lo_y, hi_y) = if p.y_lo <= p.y_hi {
                (p.y_lo, p.y_hi)
            } else {
                (p.y_hi, p.y_lo)
            };
            let mut inner: Vec<&Cut> = cuts.iter().filter(|c| c.at > lo_y && c.at < hi_y).collect();
            if p.dir < 0 {
                inner.reverse();
            }
            let mut start = (p.lo, p.y_lo, p.joined_left);
            for c in inner {
                let x = preimage(f, n, p, c.at);
                if x <= start.0 || x >= p.hi {
                    return Err(Error::Unsupported(format!(
                        "lap refinement ran out of floating-point resolution at n = {}",
                        n + 1
                    )));
                }
                next.push(Piece {
                    lo: start.0,
                    hi: x,
                    y_lo: start.1,
                    y_hi: c.at,
                    dir: p.dir,
                    joined_left: start.2,
                });
                start = (x, c.at, c.continuous);
            }
            next.push(Piece {
                lo: start.0,
                hi: p.hi,
                y_lo: start.1,
                y_hi: p.y_hi,
                dir: p.dir,
                joined_left: start.2,
            });
        }
        // apply f branch-wise and merge monotone runs that are continuous across their joint
        let mut merged: Vec<Piece> = Vec::with_capacity(next.len());
        for p in next {
            let b = branch_of(0.5 * (p.y_lo + p.y_hi));
            let q = Piece {
                y_lo: f.apply_on_branch(b, p.y_lo),
                y_hi: f.apply_on_branch(b, p.y_hi),
                dir: p.dir * dirs[b],
                ..p
            };
            match merged.last_mut() {
                Some(last) if q.joined_left && last.dir == q.dir => {
                    last.hi = q.hi;
                    last.y_hi = q.y_hi;
                }
                _ => merged.push(q),
            }
        }
        if merged.len() > MAX_LAP_PIECES {
            return Err(Error::Unsupported(format!(
                "more than {MAX_LAP_PIECES} laps at n = {}",
                n + 1
            )));
        }
        pieces = merged;
        let laps = pieces.len() as u64;
        out.push(LapCount {
            n: n + 1,
            laps,
            estimate: (laps as f64).ln() / (n + 1) as f64,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    /// Positive part of `mean_log_derivative`.
    pub estimate: f64,
    /// `(1/N) Σ ln|f'(x_t)|` over the differentiable samples.
    pub mean_log_derivative: f64,
    pub samples: usize,
    /// Orbit points where `f` is not differentiable.
    pub skipped: usize,
}

/// Pesin estimate `max(0, (1/N) Σ ln|f'(x_t)|)` over `n` orbit points after
/// discarding `burn_in`. A vanishing derivative contributes `-∞`, which the
/// positive part clips to 0.
pub fn lyapunov_entropy_estimate_1d(
    f: &IntervalMap,
    x0: f64,
    n: usize,
    burn_in: usize,
) -> Result<LyapunovEstimate> {
    if n == 0 {
        return Err(domain("orbit length must be ≥ 1"));
    }
    let orbit = f.orbit(x0, burn_in + n)?;
    // Neumaier summation: long orbits of a constant |f'| must average to exactly ln|f'|
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    let mut samples = 0;
    let mut skipped = 0;
    let mut vanished = false;
    for &x in &orbit[burn_in..] {
        match f.derivative(x) {
            Some(0.0) => {
                vanished = true;
                samples += 1;
            }
            Some(d) => {
                let v = d.abs().ln();
                let t = sum + v;
                if sum.abs() >= v.abs() {
                    carry += (sum - t) + v;
                } else {
                    carry += (v - t) + sum;
                }
                sum = t;
                samples += 1;
            }
            None => skipped += 1,
        }
    }
    let sum = sum + carry;
    if samples == 0 {
        return Err(domain(
            "every orbit point is a non-differentiable point of the map",
        ));
    }
    let mean = if vanished {
        f64::NEG_INFINITY
    } else {
        sum / samples as f64
    };
    Ok(LyapunovEstimate {
        estimate: mean.max(0.0),
        mean_log_derivative: mean,
        samples,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn laps(f: &IntervalMap, n: usize) -> Vec<u64> {
        lap_number_entropy(f, n)
            .unwrap()
            .iter()
            .map(|l| l.laps)
            .collect()
    }

    #[test]
    fn doubling_lap_counts() {
        let expect: Vec<u64> = (1..=12).map(|n| 1 << n).collect();
        assert_eq!(laps(&IntervalMap::logistic(4.0).unwrap(), 12), expect);
        assert_eq!(laps(&IntervalMap::Tent, 12), expect);
        assert_eq!(laps(&IntervalMap::Doubling, 12), expect);
    }

    #[test]
    fn monotone_map_has_one_lap() {
        let f = IntervalMap::piecewise(vec![(0.0, 0.0), (0.3, 0.6), (1.0, 1.0)]).unwrap();
        assert_eq!(laps(&f, 6), vec![1; 6]);
        let est = lap_number_entropy(&f, 6).unwrap();
        assert!(est.iter().all(|l| l.estimate == 0.0));
    }

    #[test]
    fn low_parameter_logistic_stays_unimodal() {
        // for a < 2 the critical value a/4 lies left of the turning point
        assert_eq!(laps(&IntervalMap::logistic(1.5).unwrap(), 5), vec![2; 5]);
    }

    #[test]
    fn piecewise_tent_matches_tent() {
        let f = IntervalMap::piecewise(vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]).unwrap();
        assert_eq!(laps(&f, 10), laps(&IntervalMap::Tent, 10));
        assert!(matches!(
            IntervalMap::piecewise(vec![(0.0, 0.2), (0.5, 0.2), (1.0, 1.0)]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn lyapunov_examples() {
        let d = lyapunov_entropy_estimate_1d(&IntervalMap::Doubling, 0.1234, 1000, 10).unwrap();
        assert_eq!(d.estimate, LN_2);

        let l = lyapunov_entropy_estimate_1d(
            &IntervalMap::logistic(4.0).unwrap(),
            0.3,
            1_000_000,
            1000,
        )
        .unwrap();
        assert!((l.estimate - LN_2).abs() < 0.01);

        let stable =
            lyapunov_entropy_estimate_1d(&IntervalMap::logistic(2.5).unwrap(), 0.3, 1000, 100)
                .unwrap();
        assert_eq!(stable.estimate, 0.0);
        assert!(stable.mean_log_derivative < 0.0);
        let superstable =
            lyapunov_entropy_estimate_1d(&IntervalMap::logistic(2.0).unwrap(), 0.3, 1000, 100)
                .unwrap();
        assert_eq!(superstable.estimate, 0.0);
    }

    #[test]
    fn tent_orbit_does_not_collapse() {
        let o = IntervalMap::Tent.orbit(0.2345, 10_000).unwrap();
        assert!(o[9000..].iter().any(|&x| x > 0.1));
        // consecutive points obey the tent map up to rounding
        for w in o[..50].windows(2) {
            assert!((IntervalMap::Tent.apply(w[0]) - w[1]).abs() < 1e-6);
        }
        let t = lyapunov_entropy_estimate_1d(&IntervalMap::Tent, 0.2345, 10_000, 0).unwrap();
        assert_eq!(t.estimate, LN_2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(IntervalMap::logistic(4.5).is_err());
        assert!(IntervalMap::logistic(0.0).is_err());
        assert!(IntervalMap::Tent.orbit(1.5, 3).is_err());
        assert!(lap_number_entropy(&IntervalMap::Tent, 0).is_err());
    }
}
