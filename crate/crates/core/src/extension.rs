//! Reflection method: functions sampled on `[0, 1]` viewed as 2-periodic
//! functions on the whole line, odd about `x = 0` and `x = 1` (state
//! components) or even (the damping profile).

use alloc::vec::Vec;

use crate::Error;

/// Samples at `x_j = j/n`, `j = 0..=n`, with linear interpolation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, Error> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument("a grid function needs at least two nodes"));
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let n = n.max(1);
        let values = (0..=n).map(|j| f(j as f64 / n as f64)).collect();
        Self { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_| 0.0)
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Linear interpolation at `x`, clamped to `[0, 1]`.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.n();
        let pos = x.clamp(0.0, 1.0) * n as f64;
        let j = (libm::floor(pos) as usize).min(n - 1);
        let frac = pos - j as f64;
        let (lo, hi) = (self.values[j], self.values[j + 1]);
        if frac == 0.0 {
            lo
        } else {
            lo + frac * (hi - lo)
        }
    }

    /// Resamples onto a grid with `n` intervals.
    pub fn resample(&self, n: usize) -> Self {
        if n == self.n() {
            return self.clone();
        }
        Self::from_fn(n, |x| self.interpolate(x))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
    }

    /// Forces `values[0] = values[n] = 0`.
    pub fn pin_boundary(&mut self) {
        let n = self.n();
        self.values[0] = 0.0;
        self.values[n] = 0.0;
    }
}

/// Reduces `x` to `(x_base, sign)` with `x_base ∈ [0, 1]` under the odd
/// 2-periodic identification. Oddness is structural: `fold(-x)` is computed
/// from `fold(x)` by flipping the sign.
pub fn fold(x: f64) -> (f64, f64) {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let m = libm::fabs(x);
    let r = m - 2.0 * libm::floor(m * 0.5);
    if r <= 1.0 {
        (r, sign)
    } else {
        (2.0 - r, -sign)
    }
}

/// Integer analogue of [`fold`] for node index `i` on a grid of `n`
/// intervals: node `i·h` maps to node `base` with the returned sign.
#[inline]
pub fn fold_index(i: i64, n: usize) -> (usize, f64) {
    let n = n as i64;
    let sign = if i < 0 { -1.0 } else { 1.0 };
    let r = i.abs() % (2 * n);
    if r <= n {
        (r as usize, sign)
    } else {
        ((2 * n - r) as usize, -sign)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Parity {
    Odd,
    Even,
}

/// A grid function seen through its 2-periodic extension.
#[derive(Debug, Clone, Copy)]
pub struct PeriodicView<'a> {
    base: &'a GridFunction,
    parity: Parity,
}

impl<'a> PeriodicView<'a> {
    pub fn odd(base: &'a GridFunction) -> Self {
        Self { base, parity: Parity::Odd }
    }

    pub fn even(base: &'a GridFunction) -> Self {
        Self { base, parity: Parity::Even }
    }

    pub fn base(&self) -> &GridFunction {
        self.base
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (xb, sign) = fold(x);
        let v = self.base.interpolate(xb);
        match self.parity {
            Parity::Odd => sign * v,
            Parity::Even => v,
        }
    }

    /// Value at node index `i` (any integer) without interpolation.
    #[inline]
    pub fn at_node(&self, i: i64) -> f64 {
        let (j, sign) = fold_index(i, self.base.n());
        let v = self.base.values[j];
        match self.parity {
            Parity::Odd => sign * v,
            Parity::Even => v,
        }
    }
}

/// Evaluates the extension of `view` at `x`.
pub fn eval_extended(view: &PeriodicView<'_>, x: f64) -> f64 {
    view.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn fold_examples() {
        assert_eq!(fold(0.3), (0.3, 1.0));
        assert_eq!(fold(-0.25), (0.25, -1.0));
        assert_eq!(fold(1.5), (0.5, -1.0));
        let (xb, s) = fold(2.3);
        assert!((xb - 0.3).abs() < 1e-14);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn fold_index_matches_fold_on_nodes() {
        let n = 16;
        for i in -100i64..=100 {
            let (j, s) = fold_index(i, n);
            let (xb, s2) = fold(i as f64 / n as f64);
            assert!((j as f64 / n as f64 - xb).abs() < 1e-13, "i = {i}");
            // sign only matters where the base does not vanish
            if j != 0 && j != n {
                assert_eq!(s, s2, "i = {i}");
            }
        }
    }

    #[test]
    fn eval_examples() {
        let z0 = GridFunction::from_fn(400, |x| x * (1.0 - x));
        let v = PeriodicView::odd(&z0);
        assert!((v.eval(-0.25) + 0.1875).abs() < 1e-12);
        assert_eq!(v.eval(0.0), 0.0);

        let s = GridFunction::from_fn(512, |x| libm::sin(PI * x));
        let v = PeriodicView::odd(&s);
        assert!((v.eval(1.5) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_view_ignores_sign() {
        let a = GridFunction::from_fn(10, |x| 1.0 + x);
        let v = PeriodicView::even(&a);
        assert!((v.eval(-0.3) - 1.3).abs() < 1e-12);
        assert!((v.eval(1.2) - 1.8).abs() < 1e-12);
        assert_eq!(v.at_node(-3), v.at_node(3));
    }

    #[test]
    fn seam_continuity() {
        let f = GridFunction::from_fn(256, |x| libm::sin(PI * x));
        let v = PeriodicView::odd(&f);
        let lip = PI;
        for &eps in &[1e-2, 1e-3, 1e-4] {
            assert!((v.eval(eps) - v.eval(-eps)).abs() <= 2.0 * lip * eps + 1e-12);
            assert!((v.eval(1.0 + eps) - v.eval(1.0 - eps)).abs() <= 2.0 * lip * eps + 1e-12);
        }
    }

    #[test]
    fn interpolation_clamps_and_hits_nodes() {
        let f = GridFunction::new(alloc::vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.interpolate(0.5), 2.0);
        assert_eq!(f.interpolate(0.25), 1.0);
        assert_eq!(f.interpolate(1.0), 0.0);
        assert_eq!(f.interpolate(7.0), 0.0);
        assert!(GridFunction::new(alloc::vec![1.0]).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn base() -> GridFunction {
            GridFunction::from_fn(97, |x| {
                libm::sin(core::f64::consts::PI * x) + 0.3 * x * (1.0 - x) * libm::cos(7.0 * x)
            })
        }

        proptest! {
            #[test]
            fn odd_and_periodic(xs in prop::collection::vec(-10.0f64..10.0, 200)) {
                let b = base();
                let v = PeriodicView::odd(&b);
                for &x in &xs {
                    prop_assert_eq!(v.eval(-x), -v.eval(x));
                    prop_assert!((v.eval(x + 2.0) - v.eval(x)).abs() < 1e-12);
                    prop_assert!((v.eval(2.0 - x) + v.eval(x)).abs() < 1e-12);
                }
            }

            #[test]
            fn restriction_identity(x in 0.0f64..=1.0) {
                let b = base();
                prop_assert_eq!(PeriodicView::odd(&b).eval(x), b.interpolate(x));
            }
        }
    }
}
