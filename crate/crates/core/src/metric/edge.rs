//! Solutions of `−f'' + q f = λ f` on constant-`q` pieces.
//!
//! On a piece with `z = λ − q` the fundamental pair `c, s` (with
//! `c(0) = 1, c'(0) = 0, s(0) = 0, s'(0) = 1`) is trigonometric for `z > 0`,
//! hyperbolic for `z < 0` and affine for `z = 0`. Everything here works on
//! the closed forms, so zeros and integrals are exact up to rounding.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// `[c(t), s(t), c'(t), s'(t)]`; the determinant `c s' − c' s` is 1.
pub fn fundamental(z: f64, t: f64) -> [f64; 4] {
    if z > 0.0 {
        let k = z.sqrt();
        let (sn, cs) = (k * t).sin_cos();
        [cs, sn / k, -k * sn, cs]
    } else if z < 0.0 {
        let kappa = (-z).sqrt();
        let (sh, ch) = ((kappa * t).sinh(), (kappa * t).cosh());
        [ch, sh / kappa, kappa * sh, ch]
    } else {
        [1.0, t, 0.0, 1.0]
    }
}

/// Value and slope after travelling `t` from `(f, d)`.
pub fn propagate(z: f64, t: f64, f: f64, d: f64) -> (f64, f64) {
    let [c, s, cp, sp] = fundamental(z, t);
    (c * f + s * d, cp * f + sp * d)
}

/// One constant-`z` stretch of a solution: starts at `x0` on its edge with
/// value `f0` and slope `d0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x0: f64,
    pub len: f64,
    pub z: f64,
    pub f0: f64,
    pub d0: f64,
}

impl Segment {
    pub fn eval(&self, t: f64) -> (f64, f64) {
        propagate(self.z, t, self.f0, self.d0)
    }

    pub fn end(&self) -> (f64, f64) {
        self.eval(self.len)
    }

    pub fn is_zero(&self) -> bool {
        self.f0 == 0.0 && self.d0 == 0.0
    }

    /// Zeros in the open interval `(0, len)`, ascending, as local offsets.
    pub fn zeros(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.for_each_zero(|t| out.push(t));
        out
    }

    pub fn zero_count(&self) -> usize {
        let mut n = 0;
        self.for_each_zero(|_| n += 1);
        n
    }

    fn for_each_zero(&self, mut emit: impl FnMut(f64)) {
        let (f0, d0, len) = (self.f0, self.d0, self.len);
        if self.is_zero() {
            return;
        }
        if self.z > 0.0 {
            // f = A sin(kt + φ)
            let k = self.z.sqrt();
            let phi = f0.atan2(d0 / k);
            let first = (phi / PI).floor() as i64 + 1;
            let mut j = first;
            loop {
                let t = (j as f64 * PI - phi) / k;
                if t >= len {
                    break;
                }
                if t > 0.0 {
                    emit(t);
                }
                j += 1;
            }
        } else if self.z < 0.0 {
            // tanh(κt) = −f0 κ / d0
            let kappa = (-self.z).sqrt();
            if d0 != 0.0 {
                let r = -f0 * kappa / d0;
                if r > 0.0 && r < 1.0 {
                    let t = r.atanh() / kappa;
                    if t > 0.0 && t < len {
                        emit(t);
                    }
                }
            }
        } else if d0 != 0.0 {
            let t = -f0 / d0;
            if t > 0.0 && t < len {
                emit(t);
            }
        }
    }

    /// Interior points where `f' = 0` (only trigonometric pieces have them).
    pub fn critical_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.z > 0.0 && !self.is_zero() {
            let k = self.z.sqrt();
            let phi = self.f0.atan2(self.d0 / k);
            let mut j = ((phi - PI / 2.0) / PI).floor() as i64 + 1;
            loop {
                let t = (PI / 2.0 + j as f64 * PI - phi) / k;
                if t >= self.len {
                    break;
                }
                if t > 0.0 {
                    out.push(t);
                }
                j += 1;
            }
        } else if self.z < 0.0 && self.d0 != 0.0 {
            // f' = 0 where tanh(κt) = −d0 / (κ f0)
            let kappa = (-self.z).sqrt();
            if self.f0 != 0.0 {
                let r = -self.d0 / (kappa * self.f0);
                if r > 0.0 && r < 1.0 {
                    let t = r.atanh() / kappa;
                    if t > 0.0 && t < self.len {
                        out.push(t);
                    }
                }
            }
        }
        out
    }

    /// Upper bound on `|f|` over the piece (attained for trigonometric pieces
    /// with an interior extremum).
    pub fn sup(&self) -> f64 {
        let (f1, _) = self.end();
        let mut m = self.f0.abs().max(f1.abs());
        if self.z > 0.0 {
            let k = self.z.sqrt();
            if !self.critical_points().is_empty() {
                m = m.max(self.f0.hypot(self.d0 / k));
            }
        }
        m
    }

    /// `(∫ f², ∫ f'²)` over `[a, b] ⊂ [0, len]`.
    pub fn integrals(&self, a: f64, b: f64) -> (f64, f64) {
        let (fa, da) = self.eval(a);
        let w = b - a;
        if w <= 0.0 {
            return (0.0, 0.0);
        }
        let z = self.z;
        if z.abs() * w * w < 1e-2 {
            return gauss_legendre(w, |t| {
                let (f, d) = propagate(z, t, fa, da);
                (f * f, d * d)
            });
        }
        let (fb, db) = propagate(z, w, fa, da);
        // d/dt [t(f'² + z f²) − f f'] = 2 z f²
        let prim = |t: f64, f: f64, d: f64| t * (d * d + z * f * f) - f * d;
        let sq = (prim(w, fb, db) - prim(0.0, fa, da)) / (2.0 * z);
        let dsq = fb * db - fa * da + z * sq;
        (sq.max(0.0), dsq.max(0.0))
    }
}

// 10-point Gauss–Legendre on [0, 1]
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

fn gauss_legendre(w: f64, f: impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
    let mut acc = (0.0, 0.0);
    for (x, wt) in GL_X.iter().zip(GL_W) {
        for s in [-1.0, 1.0] {
            let t = 0.5 * w * (1.0 + s * x);
            let (a, b) = f(t);
            acc.0 += wt * a;
            acc.1 += wt * b;
        }
    }
    (0.5 * w * acc.0, 0.5 * w * acc.1)
}

/// A solution on one edge in its stored orientation, one [`Segment`] per
/// potential piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFunction {
    pub segments: Vec<Segment>,
}

impl EdgeFunction {
    /// Solution with value `f0` and slope `d0` at the start, for pieces given
    /// as `(length, z)`.
    pub fn from_initial(pieces: &[(f64, f64)], f0: f64, d0: f64) -> Self {
        let mut segments = Vec::with_capacity(pieces.len());
        let (mut f, mut d, mut x0) = (f0, d0, 0.0);
        for &(len, z) in pieces {
            let seg = Segment { x0, len, z, f0: f, d0: d };
            (f, d) = seg.end();
            x0 += len;
            segments.push(seg);
        }
        EdgeFunction { segments }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.len).sum()
    }

    pub fn start(&self) -> (f64, f64) {
        let s = &self.segments[0];
        (s.f0, s.d0)
    }

    pub fn end(&self) -> (f64, f64) {
        self.segments.last().expect("non-empty edge").end()
    }

    /// Value and slope at `x`, with `x` clamped to the edge.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let seg = self
            .segments
            .iter()
            .find(|s| x < s.x0 + s.len)
            .unwrap_or_else(|| self.segments.last().expect("non-empty edge"));
        seg.eval((x - seg.x0).clamp(0.0, seg.len))
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.segments {
            s.f0 *= a;
            s.d0 *= a;
        }
    }

    /// The same function in the opposite orientation: `g(x) = f(L − x)`.
    pub fn reversed(&self) -> Self {
        let total = self.length();
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| {
                let (f, d) = s.end();
                Segment {
                    x0: total - s.x0 - s.len,
                    len: s.len,
                    z: s.z,
                    f0: f,
                    d0: -d,
                }
            })
            .collect();
        EdgeFunction { segments }
    }

    /// Zeros in `(0, L)`, ascending; a zero on a breakpoint is reported once.
    pub fn zeros(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        let total = self.length();
        for (i, s) in self.segments.iter().enumerate() {
            for t in s.zeros() {
                out.push(s.x0 + t);
            }
            // a zero landing exactly on an interior breakpoint
            if i + 1 < self.segments.len() && s.end().0 == 0.0 && !s.is_zero() {
                out.push(s.x0 + s.len);
            }
        }
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * total);
        out
    }

    pub fn zero_count(&self) -> usize {
        self.zeros().len()
    }

    pub fn sup(&self) -> f64 {
        self.segments.iter().fold(0.0f64, |m, s| m.max(s.sup()))
    }

    /// `(∫ f², ∫ f'²)` over the edge.
    pub fn integrals(&self) -> (f64, f64) {
        self.segments.iter().fold((0.0, 0.0), |acc, s| {
            let (a, b) = s.integrals(0.0, s.len);
            (acc.0 + a, acc.1 + b)
        })
    }

    /// `∫ w f²` for a piecewise-constant weight given as sorted
    /// `(breakpoint, value)` pairs starting at 0.
    pub fn weighted_sq(&self, weight: &[(f64, f64)]) -> f64 {
        let total = self.length();
        let mut sum = 0.0;
        for (i, &(x, w)) in weight.iter().enumerate() {
            let end = weight.get(i + 1).map_or(total, |p| p.0);
            if w == 0.0 {
                continue;
            }
            for s in &self.segments {
                let a = x.max(s.x0);
                let b = end.min(s.x0 + s.len);
                if b > a {
                    sum += w * s.integrals(a - s.x0, b - s.x0).0;
                }
            }
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn wronskian_is_one() {
        for z in [-7.3, -0.2, 0.0, 0.4, 12.0, 400.0] {
            for t in [0.0, 0.1, 0.9, 2.5] {
                let [c, s, cp, sp] = fundamental(z, t);
                assert_abs_diff_eq!(c * sp - cp * s, 1.0, epsilon = 1e-9 * (1.0 + c.abs() * sp.abs()));
            }
        }
    }

    #[test]
    fn cosine_zeros() {
        // cos(3x) on [0, π]
        let f = EdgeFunction::from_initial(&[(PI, 9.0)], 1.0, 0.0);
        let zs = f.zeros();
        assert_eq!(zs.len(), 3);
        for (z, want) in zs.iter().zip([PI / 6.0, PI / 2.0, 5.0 * PI / 6.0]) {
            assert_abs_diff_eq!(*z, want, epsilon = 1e-14);
        }
    }

    #[test]
    fn sine_zeros_exclude_endpoints() {
        // sin(3πx) on [0, 1]
        let k = 3.0 * PI;
        let f = EdgeFunction::from_initial(&[(1.0, k * k)], 0.0, k);
        let zs = f.zeros();
        assert_eq!(zs.len(), 2);
        assert_abs_diff_eq!(zs[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(zs[1], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn constant_and_linear() {
        assert!(EdgeFunction::from_initial(&[(2.0, 0.0)], 1.0, 0.0).zeros().is_empty());
        let f = EdgeFunction::from_initial(&[(2.0, 0.0)], 1.0, -1.0);
        assert_eq!(f.zeros(), vec![1.0]);
        // cosh − 2 sinh vanishes at atanh(1/2)
        let f = EdgeFunction::from_initial(&[(3.0, -1.0)], 1.0, -2.0);
        assert_abs_diff_eq!(f.zeros()[0], 0.5f64.atanh(), epsilon = 1e-14);
    }

    #[test]
    fn piecewise_zero_matches_sampling() {
        let f = EdgeFunction::from_initial(&[(0.7, 30.0), (0.5, -4.0), (0.8, 55.0)], 0.3, 1.0);
        let zs = f.zeros();
        let n = 200_000;
        let mut changes = 0;
        let mut prev = f.eval(0.0).0;
        for i in 1..=n {
            let x = 2.0 * i as f64 / n as f64;
            let v = f.eval(x).0;
            if v * prev < 0.0 {
                changes += 1;
            }
            prev = v;
        }
        assert_eq!(zs.len(), changes);
        for z in zs {
            assert!(f.eval(z).0.abs() < 1e-12);
        }
    }

    #[test]
    fn reversal_agrees() {
        let f = EdgeFunction::from_initial(&[(0.4, 10.0), (0.9, -2.0), (0.3, 0.0)], 0.5, -0.8);
        let g = f.reversed();
        let l = f.length();
        for i in 0..=20 {
            let x = l * i as f64 / 20.0;
            let (a, da) = f.eval(x);
            let (b, db) = g.eval(l - x);
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            assert_abs_diff_eq!(da, -db, epsilon = 1e-10);
        }
    }

    #[test]
    fn critical_points_of_cosine() {
        let s = Segment { x0: 0.0, len: PI, z: 4.0, f0: 0.0, d0: 2.0 };
        let cps = s.critical_points();
        assert_eq!(cps.len(), 2);
        assert_abs_diff_eq!(cps[0], PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cps[1], 3.0 * PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.sup(), 1.0, epsilon = 1e-14);
    }

    fn quad(s: &Segment, a: f64, b: f64) -> (f64, f64) {
        // composite Simpson, independent of the closed forms
        let n = 20_000;
        let h = (b - a) / n as f64;
        let mut acc = (0.0, 0.0);
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let (f, d) = s.eval(a + i as f64 * h);
            acc.0 += w * f * f;
            acc.1 += w * d * d;
        }
        (acc.0 * h / 3.0, acc.1 * h / 3.0)
    }

    proptest! {
        #[test]
        fn integrals_match_quadrature(
            z in -20.0f64..80.0,
            len in 0.05f64..2.0,
            f0 in -1.0f64..1.0,
            d0 in -3.0f64..3.0,
            a in 0.0f64..0.5,
        ) {
            let s = Segment { x0: 0.0, len, z, f0, d0 };
            let (lo, hi) = (a * len, len);
            let (sq, dsq) = s.integrals(lo, hi);
            let (qsq, qdsq) = quad(&s, lo, hi);
            prop_assert!((sq - qsq).abs() < 1e-8 * (1.0 + qsq));
            prop_assert!((dsq - qdsq).abs() < 1e-8 * (1.0 + qdsq));
        }

        #[test]
        fn tiny_z_branch_matches(z in -1e-3f64..1e-3, f0 in -1.0f64..1.0, d0 in -1.0f64..1.0) {
            let s = Segment { x0: 0.0, len: 1.0, z, f0, d0 };
            let (sq, dsq) = s.integrals(0.0, 1.0);
            let (qsq, qdsq) = quad(&s, 0.0, 1.0);
            prop_assert!((sq - qsq).abs() < 1e-10);
            prop_assert!((dsq - qdsq).abs() < 1e-10);
        }
    }
}
