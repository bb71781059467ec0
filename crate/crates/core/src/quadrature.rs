//! Globally adaptive Gauss–Kronrod (7/15) integration, with the usual
//! compactifying substitutions for half-line and whole-line integrals.

use crate::error::QuadratureError;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
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

/// Default absolute tolerance for moment integrals.
pub const MOMENT_TOLERANCE: f64 = 1e-9;
const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Piece, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let d = half * x;
        let pair = eval(center - d)? + eval(center + d)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Piece { a, b, value: kronrod * half, error: ((kronrod - gauss) * half).abs() })
}

/// `∫_a^b f` to absolute tolerance `tol`, bisecting the worst interval
/// until the summed error estimate is small enough.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature, QuadratureError> {
    let mut pieces = vec![gk15(&f, a, b)?];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        if total_err <= tol || pieces.len() >= MAX_INTERVALS {
            let value = pieces.iter().map(|p| p.value).sum();
            if total_err > tol {
                return Err(QuadratureError::NotConverged { tolerance: tol, estimate: total_err });
            }
            return Ok(Quadrature { value, error_estimate: total_err, intervals: pieces.len() });
        }
        let worst =
            pieces.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).map(|(i, _)| i).unwrap_or(0);
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        pieces.push(gk15(&f, p.a, mid)?);
        pieces.push(gk15(&f, mid, p.b)?);
    }
}

/// `∫_0^∞ f` via `t = u/(1−u)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<Quadrature, QuadratureError> {
    integrate(
        |u| {
            let w = 1.0 - u;
            let t = u / w;
            let jac = 1.0 / (w * w);
            let v = f(t);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// `∫_{−∞}^{∞} f` via `z = u/(1−u²)`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<Quadrature, QuadratureError> {
    integrate(
        |u| {
            let w = 1.0 - u * u;
            let z = u / w;
            let jac = (1.0 + u * u) / (w * w);
            let v = f(z);
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        },
        -1.0,
        1.0,
        tol,
    )
}
