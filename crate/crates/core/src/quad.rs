//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Every call owns its interval heap, so the routines are reentrant and can be
//! nested (the outage bounds integrate densities that are themselves defined
//! through integrals).

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

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

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadControl<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadControl<T> {
    fn default() -> Self {
        QuadControl {
            abs_tol: T::zero(),
            rel_tol: lit::<T>(1e-12).max(T::tol_floor() * lit(16.0)),
            max_intervals: 2000,
        }
    }
}

impl<T: Scalar> QuadControl<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        QuadControl {
            rel_tol: rel_tol.max(T::tol_floor() * lit(16.0)),
            ..Self::default()
        }
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: T,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Single 15-point Kronrod panel: (kronrod estimate, error estimate).
fn gk15<T: Scalar, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    let mut abs_sum = fc.abs() * lit(WGK[7]);
    let mut fvals = [T::zero(); 14];
    for j in 0..7 {
        let dx = radius * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fvals[2 * j] = f1;
        fvals[2 * j + 1] = f2;
        kronrod = kronrod + lit::<T>(WGK[j]) * (f1 + f2);
        abs_sum = abs_sum + lit::<T>(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = kronrod * half;
    let mut asc = lit::<T>(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        asc = asc + lit::<T>(WGK[j]) * ((fvals[2 * j] - mean).abs() + (fvals[2 * j + 1] - mean).abs());
    }
    let result = kronrod * radius;
    let resasc = asc * radius.abs();
    let mut err = ((kronrod - gauss) * radius).abs();
    if resasc != T::zero() && err != T::zero() {
        let scale = (lit::<T>(200.0) * err / resasc).powf(lit(1.5));
        err = resasc * scale.min(T::one());
    }
    let round = lit::<T>(50.0) * T::epsilon() * abs_sum * radius.abs();
    if round > err {
        err = round;
    }
    (result, err)
}

/// Fixed 15-point Kronrod rule on `[a, b]`, used where panels are known to be smooth.
pub fn kronrod15<T: Scalar, F: FnMut(T) -> T>(mut f: F, a: T, b: T) -> T {
    gk15(&mut f, a, b).0
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<T: Scalar, F: FnMut(T) -> T>(mut f: F, a: T, b: T, ctl: QuadControl<T>) -> Result<Integral<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Quadrature("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            abs_error: T::zero(),
        });
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    let mut total = value;
    let mut total_err = error;
    loop {
        if !total.is_finite() {
            return Err(Error::Quadrature("integrand produced a non-finite value".into()));
        }
        let target = ctl.abs_tol.max(ctl.rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if segments.len() >= ctl.max_intervals {
            return Err(Error::Quadrature(format!(
                "error estimate {:e} above tolerance {:e} after {} intervals",
                crate::scalar::to_f64(total_err),
                crate::scalar::to_f64(target),
                segments.len()
            )));
        }
        // Bisect the panel carrying the largest error.
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty segment list");
        let seg = segments.swap_remove(idx);
        let mid = lit::<T>(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval cannot be split further in this precision.
            return Err(Error::Quadrature("interval width reached machine precision".into()));
        }
        let (v1, e1) = gk15(&mut f, seg.a, mid);
        let (v2, e2) = gk15(&mut f, mid, seg.b);
        total = total - seg.value + v1 + v2;
        total_err = total_err - seg.error + e1 + e2;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        if total_err < T::zero() {
            total_err = segments.iter().map(|s| s.error).sum();
        }
    }
    // Re-sum to remove drift from the running updates.
    let value = segments.iter().map(|s| s.value).sum();
    let abs_error = segments.iter().map(|s| s.error).sum();
    Ok(Integral { value, abs_error })
}

/// Adaptive integral of `f` over `[a, ∞)` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<T: Scalar, F: FnMut(T) -> T>(mut f: F, a: T, ctl: QuadControl<T>) -> Result<Integral<T>> {
    let one = T::one();
    integrate(
        |t: T| {
            let s = one - t;
            if s <= T::zero() {
                return T::zero();
            }
            let x = a + t / s;
            let v = f(x) / (s * s);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        },
        T::zero(),
        one,
        ctl,
    )
}

/// Sum of adaptive integrals over consecutive panels `[pts[0], pts[1]], [pts[1], pts[2]], …`.
pub fn integrate_panels<T: Scalar, F: FnMut(T) -> T>(mut f: F, pts: &[T], ctl: QuadControl<T>) -> Result<Integral<T>> {
    let mut value = T::zero();
    let mut abs_error = T::zero();
    for w in pts.windows(2) {
        let r = integrate(&mut f, w[0], w[1], ctl)?;
        value = value + r.value;
        abs_error = abs_error + r.abs_error;
    }
    Ok(Integral { value, abs_error })
}
