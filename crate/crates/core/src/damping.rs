//! Scalar damping functions and the sector bounds of their modulation ratio.
//!
//! A damping function is odd, vanishes at the origin, satisfies `σ(s)·s > 0`
//! away from zero and has a positive slope `C₁` at the origin. Every kind is
//! evaluated at `|s|` and the sign is applied afterwards, so oddness holds
//! bit-for-bit.

use alloc::vec::Vec;

use crate::Error;

/// Classical unit saturation.
#[inline]
pub fn sat(s: f64) -> f64 {
    s.clamp(-1.0, 1.0)
}

/// The shape of a damping function.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DampingKind {
    /// `σ(s) = slope·s`.
    LinearGain { slope: f64 },
    /// `σ(s) = sat(s)`.
    Saturation,
    /// `σ(s) = sat(c_a·s − c_b·sin(ω s))`.
    SatComposite { c_a: f64, c_b: f64, omega: f64 },
    /// Piecewise-linear table on `s ≥ 0`, reflected oddly. Beyond the last
    /// breakpoint the last value is held.
    TabulatedOdd { points: Vec<(f64, f64)> },
}

/// A damping function together with its slope at the origin.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DampingSpec {
    pub kind: DampingKind,
    /// `σ'(0)`, the value `C₁` used as the ξ → 0 limit of `σ(ξ)/ξ`.
    pub slope_at_zero: f64,
    pub lipschitz_hint: Option<f64>,
}

impl DampingSpec {
    pub fn linear_gain(slope: f64) -> Self {
        Self {
            kind: DampingKind::LinearGain { slope },
            slope_at_zero: slope,
            lipschitz_hint: Some(libm::fabs(slope)),
        }
    }

    pub fn saturation() -> Self {
        Self {
            kind: DampingKind::Saturation,
            slope_at_zero: 1.0,
            lipschitz_hint: Some(1.0),
        }
    }

    pub fn sat_composite(c_a: f64, c_b: f64, omega: f64) -> Self {
        Self {
            kind: DampingKind::SatComposite { c_a, c_b, omega },
            slope_at_zero: c_a - c_b * omega,
            lipschitz_hint: Some(libm::fabs(c_a) + libm::fabs(c_b * omega)),
        }
    }

    /// Builds a tabulated damping from `(s, σ(s))` pairs with `s` strictly
    /// increasing from exactly `0` and `σ(0) = 0`.
    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self, Error> {
        if points.len() < 2 {
            return Err(Error::InvalidDamping("table needs at least two breakpoints"));
        }
        if points[0].0 != 0.0 {
            return Err(Error::InvalidDamping("table must start at s = 0"));
        }
        if points[0].1 != 0.0 {
            return Err(Error::InvalidDamping("table must satisfy σ(0) = 0"));
        }
        if points.iter().any(|&(s, v)| !s.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidDamping("table entries must be finite"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidDamping("table abscissae must be strictly increasing"));
        }
        let slope_at_zero = points[1].1 / points[1].0;
        let lipschitz = points
            .windows(2)
            .map(|w| libm::fabs((w[1].1 - w[0].1) / (w[1].0 - w[0].0)))
            .fold(0.0, f64::max);
        Ok(Self {
            kind: DampingKind::TabulatedOdd { points },
            slope_at_zero,
            lipschitz_hint: Some(lipschitz),
        })
    }

    /// True when `σ ≡ 0`, in which case the damped equation is the free wave.
    pub fn is_zero(&self) -> bool {
        match &self.kind {
            DampingKind::LinearGain { slope } => *slope == 0.0,
            DampingKind::SatComposite { c_a, c_b, .. } => *c_a == 0.0 && *c_b == 0.0,
            DampingKind::TabulatedOdd { points } => points.iter().all(|p| p.1 == 0.0),
            DampingKind::Saturation => false,
        }
    }

    /// Evaluates `σ(s)`.
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        let m = libm::fabs(s);
        let v = match &self.kind {
            DampingKind::LinearGain { slope } => slope * m,
            DampingKind::Saturation => sat(m),
            DampingKind::SatComposite { c_a, c_b, omega } => {
                sat(c_a * m - c_b * libm::sin(omega * m))
            }
            DampingKind::TabulatedOdd { points } => table_eval(points, m),
        };
        if s < 0.0 {
            -v
        } else {
            v
        }
    }

    /// `σ(w)/w`, extended by `C₁` at `w = 0`.
    #[inline]
    pub fn modulation_ratio(&self, w: f64) -> f64 {
        if w == 0.0 {
            self.slope_at_zero
        } else {
            self.eval(w) / w
        }
    }

    /// Maximum secant slope of `σ` over `[-radius, radius]` sampled on
    /// `n_samples` uniform points of `(0, radius]` (oddness covers the rest).
    pub fn local_lipschitz(&self, radius: f64, n_samples: usize) -> f64 {
        if let DampingKind::LinearGain { slope } = self.kind {
            return libm::fabs(slope);
        }
        let n = n_samples.max(1);
        let step = radius / n as f64;
        let mut prev_s = 0.0;
        let mut prev_v = 0.0;
        let mut lip: f64 = 0.0;
        for i in 1..=n {
            let s = step * i as f64;
            let v = self.eval(s);
            lip = lip.max(libm::fabs((v - prev_v) / (s - prev_s)));
            prev_s = s;
            prev_v = v;
        }
        lip.max(libm::fabs(self.slope_at_zero))
    }
}

fn table_eval(points: &[(f64, f64)], m: f64) -> f64 {
    let last = points[points.len() - 1];
    if m >= last.0 {
        return last.1;
    }
    // first breakpoint strictly above m
    let hi = points.partition_point(|p| p.0 <= m);
    let (s0, v0) = points[hi - 1];
    let (s1, v1) = points[hi];
    v0 + (v1 - v0) * (m - s0) / (s1 - s0)
}

/// How the profile `a(x)` enters the damping term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DampingForm {
    /// `√a·σ(√a·v)`, the form of the fixed-point map and of `B = [0, √a]ᵀ`.
    #[default]
    SqrtA,
    /// `σ(a·v)`.
    AInside,
}

impl DampingForm {
    /// Damping term at profile value `a ≥ 0` and velocity `v`.
    #[inline]
    pub fn term(self, spec: &DampingSpec, a: f64, v: f64) -> f64 {
        match self {
            DampingForm::SqrtA => {
                let r = libm::sqrt(a);
                r * spec.eval(r * v)
            }
            DampingForm::AInside => spec.eval(a * v),
        }
    }

    /// Largest argument passed to `σ` when `|v| ≤ radius` and `a ≤ a_inf`.
    pub fn argument_radius(self, a_inf: f64, radius: f64) -> f64 {
        match self {
            DampingForm::SqrtA => libm::sqrt(a_inf) * radius,
            DampingForm::AInside => a_inf * radius,
        }
    }

    /// Lipschitz constant in `v` of the damping term given the Lipschitz
    /// constant of `σ` on the reached range. Both forms scale by `a_inf`.
    pub fn term_lipschitz(self, a_inf: f64, sigma_lipschitz: f64) -> f64 {
        a_inf * sigma_lipschitz
    }
}

/// Outcome of checking a damping against the defining properties.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationReport {
    pub is_odd: bool,
    pub vanishes_at_zero: bool,
    pub sign_condition_holds: bool,
    /// Samples `(s, σ(s))` with `σ(s)·s ≤ 0`.
    pub sign_violation_samples: Vec<(f64, f64)>,
    pub slope_positive: bool,
    pub lipschitz_estimate: f64,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.is_odd && self.vanishes_at_zero && self.sign_condition_holds && self.slope_positive
    }
}

/// Samples `σ` on a uniform grid of `(0, range_radius]`.
pub fn validate_damping(
    spec: &DampingSpec,
    range_radius: f64,
    n_samples: usize,
) -> Result<ValidationReport, Error> {
    if n_samples < 100 {
        return Err(Error::TooFewSamples { got: n_samples, min: 100 });
    }
    if !(range_radius > 0.0) {
        return Err(Error::InvalidArgument("range_radius must be positive"));
    }
    let step = range_radius / n_samples as f64;
    let mut is_odd = true;
    let mut violations = Vec::new();
    let mut lip: f64 = 0.0;
    let (mut prev_s, mut prev_v) = (0.0, spec.eval(0.0));
    for i in 1..=n_samples {
        let s = step * i as f64;
        let v = spec.eval(s);
        if spec.eval(-s) != -v {
            is_odd = false;
        }
        if v * s <= 0.0 {
            violations.push((s, v));
        }
        lip = lip.max(libm::fabs((v - prev_v) / (s - prev_s)));
        prev_s = s;
        prev_v = v;
    }
    Ok(ValidationReport {
        is_odd,
        vanishes_at_zero: spec.eval(0.0) == 0.0,
        sign_condition_holds: violations.is_empty(),
        sign_violation_samples: violations,
        slope_positive: spec.slope_at_zero > 0.0,
        lipschitz_estimate: lip,
    })
}

/// Lower and upper bounds of `σ(ξ)/ξ` over the amplitude range reached by
/// trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SectorBounds {
    pub d0: f64,
    pub d1: f64,
    /// Half-width `2√a∞·R` of the scanned interval.
    pub half_width: f64,
}

/// Scans `σ(ξ)/ξ` over `[-2√a∞·R, 2√a∞·R]`. The ratio is even, so only the
/// positive half is sampled; the origin contributes `C₁`.
pub fn sector_bounds(
    spec: &DampingSpec,
    radius: f64,
    a_inf: f64,
    n_samples: usize,
) -> Result<SectorBounds, Error> {
    if !(radius > 0.0) || !(a_inf > 0.0) {
        return Err(Error::InvalidArgument("radius and a_inf must be positive"));
    }
    let half_width = 2.0 * libm::sqrt(a_inf) * radius;
    let n = n_samples.max(1);
    let mut d0 = spec.slope_at_zero;
    let mut d1 = spec.slope_at_zero;
    for i in 1..=n {
        let xi = half_width * i as f64 / n as f64;
        let r = spec.modulation_ratio(xi);
        d0 = d0.min(r);
        d1 = d1.max(r);
    }
    if !(d0 > 0.0) {
        return Err(Error::NonPositiveSector { d0, d1 });
    }
    Ok(SectorBounds { d0, d1, half_width })
}

/// Default sample count for [`sector_bounds`].
pub const SECTOR_SAMPLES: usize = 100_000;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn forms_agree_for_zero_and_unit_profile() {
        let s = DampingSpec::saturation();
        for v in [-3.0, -0.4, 0.0, 0.7, 2.5] {
            for a in [0.0, 1.0] {
                assert_eq!(DampingForm::SqrtA.term(&s, a, v), DampingForm::AInside.term(&s, a, v));
            }
        }
        assert_ne!(DampingForm::SqrtA.term(&s, 4.0, 0.3), DampingForm::AInside.term(&s, 4.0, 0.3));
    }

    #[test]
    fn saturation_values() {
        let s = DampingSpec::saturation();
        assert_eq!(s.eval(0.5), 0.5);
        assert_eq!(s.eval(3.0), 1.0);
        assert_eq!(s.eval(-3.0), -1.0);
        assert_eq!(s.eval(0.0), 0.0);
    }

    #[test]
    fn composite_value_at_one() {
        let s = DampingSpec::sat_composite(0.25, 1.0 / 30.0, 10.0);
        // sin(10) = -0.5440211108893698
        let expected = 0.25 + 0.544_021_110_889_369_8 / 30.0;
        assert!((s.eval(1.0) - expected).abs() < 1e-15);
        assert_eq!(s.eval(0.0), 0.0);
    }

    #[test]
    fn slope_at_zero_matches_symmetric_difference() {
        let specs = [
            DampingSpec::saturation(),
            DampingSpec::linear_gain(2.0),
            DampingSpec::sat_composite(0.25, 1.0 / 30.0, 10.0),
            DampingSpec::tabulated(vec![(0.0, 0.0), (0.5, 0.4), (2.0, 0.6)]).unwrap(),
        ];
        let eps = 1e-7;
        for s in &specs {
            let fd = (s.eval(eps) - s.eval(-eps)) / (2.0 * eps);
            let c1 = s.slope_at_zero;
            assert!((fd - c1).abs() <= 1e-6 * c1.abs(), "{:?}: {fd} vs {c1}", s.kind);
        }
    }

    #[test]
    fn validation_of_well_posed_dampings() {
        let r = validate_damping(&DampingSpec::saturation(), 5.0, 1000).unwrap();
        assert!(r.all_pass());
        assert!(r.sign_violation_samples.is_empty());

        let r = validate_damping(&DampingSpec::linear_gain(2.0), 1.0, 1000).unwrap();
        assert!(r.all_pass());
        assert!((r.lipschitz_estimate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nonmonotone_example_violates_sign_condition() {
        let spec = DampingSpec::sat_composite(0.25, 1.0 / 30.0, 10.0);
        let r = validate_damping(&spec, 5.0, 10_000).unwrap();
        assert!(!r.sign_condition_holds);
        assert!(!r.slope_positive);
        assert!(r.is_odd && r.vanishes_at_zero);
        assert!(r.sign_violation_samples.iter().any(|&(s, _)| s > 0.0 && s < 0.2));
        // dense oracle: ¼s − sin(10 s)/30 < 0 on (0, 0.1]
        for i in 1..=100 {
            let s = 1e-3 * i as f64;
            assert!(0.25 * s - libm::sin(10.0 * s) / 30.0 < 0.0);
        }
    }

    #[test]
    fn validation_rejects_undersampling() {
        let err = validate_damping(&DampingSpec::saturation(), 1.0, 99).unwrap_err();
        assert!(matches!(err, Error::TooFewSamples { got: 99, .. }));
    }

    #[test]
    fn modulation_ratio_examples() {
        let s = DampingSpec::saturation();
        assert_eq!(s.modulation_ratio(0.0), 1.0);
        assert_eq!(s.modulation_ratio(2.0), 0.5);
        let l = DampingSpec::linear_gain(3.0);
        assert!((l.modulation_ratio(-0.7) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_continuity_at_origin() {
        for spec in [
            DampingSpec::saturation(),
            DampingSpec::linear_gain(1.5),
            DampingSpec::sat_composite(0.25, 1.0 / 30.0, 10.0),
        ] {
            let c1 = spec.slope_at_zero.abs();
            assert!((spec.modulation_ratio(1e-3) - spec.slope_at_zero).abs() <= 1e-2 * c1);
            assert!((spec.modulation_ratio(1e-6) - spec.slope_at_zero).abs() <= 1e-4 * c1);
        }
    }

    #[test]
    fn sector_bounds_examples() {
        let sat = DampingSpec::saturation();
        let b = sector_bounds(&sat, 1.0, 1.0, SECTOR_SAMPLES).unwrap();
        assert_eq!(b.d0, 0.5);
        assert_eq!(b.d1, 1.0);

        let b = sector_bounds(&sat, 0.4, 1.0, SECTOR_SAMPLES).unwrap();
        assert_eq!((b.d0, b.d1), (1.0, 1.0));

        let lin = DampingSpec::linear_gain(2.5);
        let b = sector_bounds(&lin, 7.0, 3.0, 1000).unwrap();
        assert!((b.d0 - 2.5).abs() < 1e-14 && (b.d1 - 2.5).abs() < 1e-14);
    }

    #[test]
    fn sector_bounds_reject_sign_violation() {
        let spec = DampingSpec::sat_composite(0.25, 1.0 / 30.0, 10.0);
        let err = sector_bounds(&spec, 1.0, 1.0, 10_000).unwrap_err();
        assert!(matches!(err, Error::NonPositiveSector { .. }));
    }

    #[test]
    fn tabulated_reflects_and_validates() {
        let t = DampingSpec::tabulated(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.5)]).unwrap();
        assert_eq!(t.eval(0.5), 0.5);
        assert_eq!(t.eval(-1.5), -1.25);
        assert_eq!(t.eval(10.0), 1.5);
        assert!(DampingSpec::tabulated(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
        assert!(DampingSpec::tabulated(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(DampingSpec::tabulated(vec![(0.1, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn local_lipschitz_of_saturation() {
        let l = DampingSpec::saturation().local_lipschitz(10.0, 10_000);
        assert!((l - 1.0).abs() < 1e-12);
        let l = DampingSpec::linear_gain(-2.0).local_lipschitz(1.0, 10);
        assert_eq!(l, 2.0);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn any_spec() -> impl Strategy<Value = DampingSpec> {
            prop_oneof![
                (-5.0f64..5.0).prop_map(DampingSpec::linear_gain),
                Just(DampingSpec::saturation()),
                (0.0f64..1.0, 0.0f64..0.1, 0.0f64..20.0)
                    .prop_map(|(a, b, w)| DampingSpec::sat_composite(a, b, w)),
                Just(
                    DampingSpec::tabulated(alloc::vec![(0.0, 0.0), (0.3, 0.3), (1.0, 0.5)])
                        .unwrap()
                ),
            ]
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn oddness_is_exact(spec in any_spec(), s in prop::collection::vec(-50.0f64..50.0, 160)) {
                prop_assert_eq!(spec.eval(0.0), 0.0);
                for &x in &s {
                    prop_assert_eq!(spec.eval(x) + spec.eval(-x), 0.0);
                }
            }

            #[test]
            fn sector_contains_sampled_ratios(r in 0.05f64..3.0, a in 0.1f64..2.0) {
                let spec = DampingSpec::saturation();
                let b = sector_bounds(&spec, r, a, 2000).unwrap();
                for i in 0..=200 {
                    let xi = -b.half_width + 2.0 * b.half_width * i as f64 / 200.0;
                    let q = spec.modulation_ratio(xi);
                    prop_assert!(b.d0 <= q + 1e-15 && q <= b.d1 + 1e-15);
                }
            }

            #[test]
            fn sector_widens_with_radius(r in 0.05f64..3.0, extra in 0.0f64..3.0) {
                let spec = DampingSpec::saturation();
                let small = sector_bounds(&spec, r, 1.0, 4000).unwrap();
                let large = sector_bounds(&spec, r + extra, 1.0, 4000).unwrap();
                prop_assert!(large.d0 <= small.d0 + 1e-3 * small.d0);
                prop_assert!(large.d1 >= small.d1);
            }
        }
    }
}
