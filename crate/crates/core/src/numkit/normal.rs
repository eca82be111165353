//! Standard normal distribution function, density and quantile.
//!
//! The distribution function follows Cody's rational Chebyshev
//! approximations for the error function, split into a central range, an
//! intermediate range and an asymptotic tail. The tail branches evaluate
//! `exp(-x^2/2)` as a product of two exponentials so that the lower tail keeps
//! full relative precision down to the underflow threshold.

use crate::error::{domain, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;
const SQRT_32: f64 = 5.656_854_249_492_380_195_2;

const A: [f64; 5] = [
    2.235_252_035_460_683_928_7,
    161.028_231_068_555_878_81,
    1_067.689_485_460_370_958_2,
    18_154.981_253_343_561_249,
    0.065_682_337_918_207_449_113,
];
const B: [f64; 4] = [
    47.202_581_904_688_241_87,
    976.098_551_737_776_693_22,
    10_260.932_208_618_978_205,
    45_507.789_335_026_729_956,
];
const C: [f64; 9] = [
    0.398_941_512_088_134_667_64,
    8.883_149_794_388_375_941_2,
    93.506_656_132_177_855_979,
    597.270_276_394_800_262_26,
    2_494.537_585_290_372_671_1,
    6_848.190_450_536_282_332_6,
    11_602.651_437_647_350_124,
    9_842.714_838_383_978_021_8,
    1.076_557_677_372_019_231_7e-8,
];
const D: [f64; 8] = [
    22.266_688_044_328_115_691,
    235.387_901_782_624_998_61,
    1_519.377_599_407_554_805,
    6_485.558_298_266_760_755,
    18_615.571_640_885_098_091,
    34_900.952_721_145_977_266,
    38_912.003_286_093_271_411,
    19_685.429_676_859_990_727,
];
const P: [f64; 6] = [
    0.215_898_534_057_956_99,
    0.127_401_161_160_247_363_9,
    0.022_235_277_870_649_807,
    0.001_421_619_193_227_893_466,
    2.911_287_495_116_879_2e-5,
    0.023_073_441_764_940_173_03,
];
const Q: [f64; 5] = [
    1.284_260_096_144_911_21,
    0.468_238_212_480_865_118,
    0.065_988_137_868_928_551_5,
    0.003_782_396_332_027_582_44,
    7.297_515_550_839_662_05e-5,
];

/// `exp(-y^2/2)` with the argument split at a multiple of 1/16 so the
/// large part of the exponent is exact.
#[inline]
fn gauss_factor(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq * 0.5).exp() * (-del * 0.5).exp()
}

/// Returns `(Phi(x), 1 - Phi(x))`, each with full relative precision.
pub fn std_normal_cdf_both(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    let y = x.abs();
    if y <= 0.674_489_75 {
        let (mut xnum, mut xden) = (0.0, 0.0);
        if y > f64::EPSILON * 0.5 {
            let xsq = x * x;
            xnum = A[4] * xsq;
            xden = xsq;
            for i in 0..3 {
                xnum = (xnum + A[i]) * xsq;
                xden = (xden + B[i]) * xsq;
            }
        }
        let temp = x * (xnum + A[3]) / (xden + B[3]);
        return (0.5 + temp, 0.5 - temp);
    }
    // Beyond roughly 38.5 the lower tail underflows.
    if y >= 38.5 {
        return if x > 0.0 { (1.0, 0.0) } else { (0.0, 1.0) };
    }
    let tail = if y <= SQRT_32 {
        let mut xnum = C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + C[i]) * y;
            xden = (xden + D[i]) * y;
        }
        let temp = (xnum + C[7]) / (xden + D[7]);
        gauss_factor(y) * temp
    } else {
        let xsq = 1.0 / (x * x);
        let mut xnum = P[5] * xsq;
        let mut xden = xsq;
        for i in 0..4 {
            xnum = (xnum + P[i]) * xsq;
            xden = (xden + Q[i]) * xsq;
        }
        let temp = xsq * (xnum + P[4]) / (xden + Q[4]);
        let temp = (FRAC_1_SQRT_2PI - temp) / y;
        gauss_factor(y) * temp
    };
    if x > 0.0 {
        (1.0 - tail, tail)
    } else {
        (tail, 1.0 - tail)
    }
}

/// Standard normal distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    std_normal_cdf_both(x).0
}

/// Upper tail `1 - Phi(x)` without cancellation.
pub fn std_normal_sf(x: f64) -> f64 {
    std_normal_cdf_both(x).1
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * gauss_factor(x.abs())
}

/// Natural log of the standard normal density.
pub fn std_normal_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

// Acklam's rational approximation, relative error below 1.2e-9.
const QA: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const QB: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const QC: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const QD: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.024_25;

fn initial_quantile(p: f64) -> f64 {
    if p < P_LOW {
        let r = (-2.0 * p.ln()).sqrt();
        (((((QC[0] * r + QC[1]) * r + QC[2]) * r + QC[3]) * r + QC[4]) * r + QC[5])
            / ((((QD[0] * r + QD[1]) * r + QD[2]) * r + QD[3]) * r + 1.0)
    } else {
        let r0 = p - 0.5;
        let r = r0 * r0;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * r0
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    }
}

/// Lower-half quantile, `p <= 0.5`.
fn lower_quantile(p: f64) -> f64 {
    let mut x = initial_quantile(p);
    for _ in 0..2 {
        let half_sq = 0.5 * x * x;
        // sqrt(2 pi) exp(x^2/2) overflows past |x| ~ 37.6; the initial
        // approximation is already at its relative floor there.
        if half_sq > 700.0 {
            break;
        }
        let e = std_normal_cdf(x) - p;
        let u = e * (half_sq + LN_SQRT_2PI).exp();
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-17 * x.abs() {
            break;
        }
    }
    x
}

/// Inverse of the standard normal distribution function on `(0, 1)`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("normal quantile requires 0 < p < 1, got {p}"));
    }
    Ok(quantile_unchecked(p))
}

/// Quantile without the domain check. `p` must lie in `(0, 1)`.
pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    if p == 0.5 {
        0.0
    } else if p < 0.5 {
        lower_quantile(p)
    } else {
        // 1 - p is exact for p in [0.5, 1].
        -lower_quantile(1.0 - p)
    }
}
