use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Even truncation `φ(d)`: one on `|d| ≤ inner`, zero beyond `outer`, joined by
/// the degree-9 smoothstep (so `φ ∈ C⁴`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub inner: f64,
    pub outer: f64,
}

impl Cutoff {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::invalid(format!(
                "cutoff needs 0 < inner < outer (got {inner}, {outer})"
            )));
        }
        Ok(Self { inner, outer })
    }

    /// `[φ, φ′, φ″, φ‴]` at `d`.
    pub fn jet(&self, d: f64) -> [f64; 4] {
        let r = d.abs();
        if r <= self.inner {
            return [1.0, 0.0, 0.0, 0.0];
        }
        if r >= self.outer {
            return [0.0; 4];
        }
        let w = self.outer - self.inner;
        let t = (r - self.inner) / w;
        let s = smoothstep(t);
        let sgn = if d < 0.0 { -1.0 } else { 1.0 };
        [
            1.0 - s[0],
            -sgn * s[1] / w,
            -s[2] / (w * w),
            -sgn * s[3] / (w * w * w),
        ]
    }

    pub fn value(&self, d: f64) -> f64 {
        self.jet(d)[0]
    }

    /// Whether any derivative of `φ` is nonzero at `d`.
    pub fn in_transition(&self, d: f64) -> bool {
        let r = d.abs();
        r > self.inner && r < self.outer
    }
}

/// `s(t) = t⁵(126 − 420t + 540t² − 315t³ + 70t⁴)` with `s′ = 630t⁴(1−t)⁴`.
fn smoothstep(t: f64) -> [f64; 4] {
    let u = 1.0 - t;
    let s = t.powi(5) * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))));
    let s1 = 630.0 * (t * u).powi(4);
    let s2 = 2520.0 * (t * u).powi(3) * (1.0 - 2.0 * t);
    let s3 = 2520.0 * (t * u).powi(2) * (3.0 * (1.0 - 2.0 * t).powi(2) - 2.0 * t * u);
    [s, s1, s2, s3]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let c = Cutoff::new(0.1, 0.3).unwrap();
        assert_eq!(c.jet(0.05), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.jet(-0.1), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.jet(0.35), [0.0; 4]);
        assert!((c.value(0.2) - 0.5).abs() < 1e-12);
        assert!((c.value(-0.2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_differences() {
        let c = Cutoff::new(0.1, 0.3).unwrap();
        let h = 1e-5;
        for &d in &[0.13, 0.2, 0.27, -0.15, -0.24] {
            let j = c.jet(d);
            for k in 0..3 {
                let fd = (c.jet(d + h)[k] - c.jet(d - h)[k]) / (2.0 * h);
                assert!((fd - j[k + 1]).abs() < 1e-5 * (1.0 + j[k + 1].abs()), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn joins_are_smooth() {
        let c = Cutoff::new(0.1, 0.3).unwrap();
        for &d in &[0.1 + 1e-9, 0.3 - 1e-9] {
            let j = c.jet(d);
            assert!(j[1].abs() < 1e-20 && j[2].abs() < 1e-14 && j[3].abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_order() {
        assert!(Cutoff::new(0.3, 0.1).is_err());
        assert!(Cutoff::new(0.0, 0.1).is_err());
    }
}
