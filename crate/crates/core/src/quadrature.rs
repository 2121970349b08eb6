//! Globally adaptive 15-point Gauss-Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! error meets `max(abs_tol, rel_tol |value|)`. Ties are broken by interval
//! order so results are bit-for-bit reproducible.

use crate::error::{Error, Result};

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and work limit for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let ok_tol = |t: f64| t.is_finite() && t >= 0.0;
        if !ok_tol(abs_tol) || !ok_tol(rel_tol) || (abs_tol == 0.0 && rel_tol == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be finite, >= 0 and not both zero \
                 (abs_tol {abs_tol}, rel_tol {rel_tol})"
            )));
        }
        if max_subdivisions < 10 {
            return Err(Error::InvalidParameter(format!(
                "max_subdivisions must be >= 10, got {max_subdivisions}"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
        }
    }
}

/// Result of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::NonConvergence`] (carrying the best estimate) when
/// `quad.max_subdivisions` bisections do not reach tolerance, and with a
/// domain error when the bounds are reversed or not finite.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, quad: &QuadratureSpec) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::Domain {
            name: "b",
            value: b,
            expected: "finite bounds with a <= b",
        });
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_bound: 0.0,
            subdivisions: 0,
        });
    }

    let (value, error) = gauss_kronrod(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    let mut total = value;
    let mut total_err = error;
    let mut subdivisions = 0;

    while total_err > quad.target(total) {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::InvalidParameter(
                "integrand produced a non-finite value".into(),
            ));
        }
        if subdivisions >= quad.max_subdivisions {
            return Err(Error::NonConvergence {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        // First segment with the largest error wins ties.
        let worst = segments.iter().enumerate().fold(0, |best, (i, s)| {
            if s.error > segments[best].error {
                i
            } else {
                best
            }
        });
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval cannot be split further in double precision.
            return Err(Error::NonConvergence {
                estimate: total,
                error_bound: total_err,
                subdivisions,
            });
        }
        let (lv, le) = gauss_kronrod(&mut f, seg.a, mid);
        let (rv, re) = gauss_kronrod(&mut f, mid, seg.b);
        segments[worst] = Segment {
            a: seg.a,
            b: mid,
            value: lv,
            error: le,
        };
        segments.insert(
            worst + 1,
            Segment {
                a: mid,
                b: seg.b,
                value: rv,
                error: re,
            },
        );
        subdivisions += 1;
        // Re-sum in interval order so rounding does not depend on history.
        total = segments.iter().map(|s| s.value).sum();
        total_err = segments.iter().map(|s| s.error).sum();
    }

    Ok(Integral {
        value: total,
        error_bound: total_err,
        subdivisions,
    })
}
