//! Numerical integration.
//!
//! Two integrators cover every integral in the crate:
//!
//! * [`gauss_kronrod`]: globally adaptive 10/21-point Gauss–Kronrod bisection
//!   with optional interior breakpoints, for smooth or oscillatory integrands
//!   on finite intervals.
//! * [`tanh_sinh`]: double-exponential quadrature for integrands with
//!   algebraic endpoint singularities. The integrand receives a [`Node`] that
//!   carries the distances to both endpoints computed without cancellation,
//!   so factors like `(1 - s)^(mu - 1)` stay accurate next to `s = 1`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn scale(self, c: f64) -> Estimate {
        Estimate {
            value: c * self.value,
            error: c.abs() * self.error,
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            error: self.error + o.error,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = 0.0;
    let mut kron = WGK[10] * fc;
    let mut abs = kron.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kron += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kron * h;
    let abs = abs * h.abs();
    let asc = asc * h.abs();
    let mut err = ((kron - gauss) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs);
    }
    Panel {
        a,
        b,
        value,
        error: err,
        abs,
    }
}

/// Adaptive Gauss–Kronrod over `[a, b]`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64, abs: f64) -> Result<Estimate> {
    gauss_kronrod_split(f, &[a, b], rel, abs)
}

/// Adaptive Gauss–Kronrod over `[pts[0], pts[last]]`, with the initial
/// partition given by `pts` (which must be nondecreasing). Kinks of the
/// integrand belong in `pts`.
pub fn gauss_kronrod_split<F: Fn(f64) -> f64>(f: F, pts: &[f64], rel: f64, abs: f64) -> Result<Estimate> {
    const MAX_PANELS: usize = 4000;
    if pts.len() < 2 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        if w[1] > w[0] {
            heap.push(qk21(&f, w[0], w[1]));
        }
    }
    let total = |heap: &BinaryHeap<Panel>| {
        heap.iter()
            .fold((0.0, 0.0, 0.0), |(v, e, s), p| (v + p.value, e + p.error, s + p.abs))
    };
    loop {
        let (value, error, resabs) = total(&heap);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { value, error });
        }
        let target = abs.max(rel * value.abs());
        if error <= target {
            return Ok(Estimate { value, error });
        }
        if heap.len() >= MAX_PANELS {
            if error <= 1e3 * f64::EPSILON * resabs {
                return Ok(Estimate { value, error });
            }
            return Err(Error::Quadrature { value, error });
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            let (value, error, _) = total(&heap);
            return Err(Error::Quadrature { value, error });
        }
        heap.push(qk21(&f, worst.a, m));
        heap.push(qk21(&f, m, worst.b));
    }
}

/// Abscissa handed to [`tanh_sinh`] integrands.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: f64,
    /// `x - a`, accurate even when `x` rounds to `a`.
    pub from_a: f64,
    /// `b - x`, accurate even when `x` rounds to `b`.
    pub from_b: f64,
}

struct Level {
    /// (complement 1 - tanh(tau), weight) for u = j * step, u > 0
    nodes: Vec<(f64, f64)>,
}

const MAX_LEVEL: usize = 9;
const U_MAX: f64 = 6.1;

fn tables() -> &'static Vec<Level> {
    static T: OnceLock<Vec<Level>> = OnceLock::new();
    T.get_or_init(|| {
        (0..=MAX_LEVEL)
            .map(|k| {
                let step = 0.5f64.powi(k as i32);
                let n = (U_MAX / step).floor() as usize;
                let nodes = (1..=n)
                    .filter(|j| k == 0 || j % 2 == 1)
                    .map(|j| {
                        let u = j as f64 * step;
                        let tau = FRAC_PI_2 * u.sinh();
                        let comp = 2.0 / (1.0 + (2.0 * tau).exp());
                        let ch = tau.cosh();
                        let w = FRAC_PI_2 * u.cosh() / (ch * ch);
                        (comp, w)
                    })
                    .collect();
                Level { nodes }
            })
            .collect()
    })
}

/// Tanh-sinh quadrature over `[a, b]`.
///
/// Nonfinite integrand values at the outermost nodes (an integrable
/// singularity evaluated too close to the endpoint) are dropped.
pub fn tanh_sinh<F: Fn(Node) -> f64>(f: F, a: f64, b: f64, rel: f64, abs: f64) -> Result<Estimate> {
    if b <= a {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let half = 0.5 * (b - a);
    let mid = Node {
        x: a + half,
        from_a: half,
        from_b: half,
    };
    let eval = |v: f64| if v.is_finite() { v } else { 0.0 };
    let level_sum = |lvl: &Level| -> f64 {
        let mut s = 0.0;
        for &(comp, w) in &lvl.nodes {
            if w == 0.0 {
                continue;
            }
            let near = half * comp;
            let far = 2.0 * half - near;
            let left = Node {
                x: a + near,
                from_a: near,
                from_b: far,
            };
            let right = Node {
                x: b - near,
                from_a: far,
                from_b: near,
            };
            s += w * (eval(f(left)) + eval(f(right)));
        }
        s
    };
    let t = tables();
    let mut sum = FRAC_PI_2 * f(mid) + level_sum(&t[0]);
    let mut prev = sum * half;
    let mut diffs = Vec::new();
    for (k, lvl) in t.iter().enumerate().skip(1) {
        sum += level_sum(lvl);
        let step = 0.5f64.powi(k as i32);
        let cur = sum * step * half;
        if !cur.is_finite() {
            return Err(Error::Quadrature {
                value: cur,
                error: f64::INFINITY,
            });
        }
        let d = (cur - prev).abs();
        diffs.push(d);
        prev = cur;
        if k >= 3 {
            let target = abs.max(rel * cur.abs());
            // Once converging, the error of the finer level is roughly the
            // square of the relative change; keep the last change as a
            // conservative estimate.
            if d <= target {
                return Ok(Estimate { value: cur, error: d });
            }
        }
    }
    let error = *diffs.last().unwrap_or(&f64::INFINITY);
    if error <= 1e3 * f64::EPSILON * prev.abs() {
        return Ok(Estimate { value: prev, error });
    }
    Err(Error::Quadrature { value: prev, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let e = gauss_kronrod(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((e.value - 0.0).abs() < 1e-13);
        let e = gauss_kronrod(|x| x.powi(6), -1.0, 1.0, 1e-14, 0.0).unwrap();
        assert!((e.value - 2.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let e = gauss_kronrod_split(f, &[0.0, 0.3, 1.0], 1e-13, 0.0).unwrap();
        assert!((e.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        let e = gauss_kronrod(|x| (50.0 * x).cos(), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((e.value - 50f64.sin() / 50.0).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_endpoint_singularities() {
        // Beta(0.1, 0.3)
        let e = tanh_sinh(|n| n.from_a.powf(-0.9) * n.from_b.powf(-0.7), 0.0, 1.0, 1e-13, 0.0).unwrap();
        let b = statrs::function::beta::beta(0.1, 0.3);
        assert!((e.value / b - 1.0).abs() < 1e-11, "{} vs {}", e.value, b);
    }

    #[test]
    fn tanh_sinh_smooth() {
        let e = tanh_sinh(|n| n.x.exp(), 1.0, 3.0, 1e-14, 0.0).unwrap();
        assert!((e.value - (3f64.exp() - 1f64.exp())).abs() < 1e-12);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(gauss_kronrod(|x| x, 1.0, 1.0, 1e-10, 0.0).unwrap().value, 0.0);
        assert_eq!(tanh_sinh(|n| n.x, 1.0, 1.0, 1e-10, 0.0).unwrap().value, 0.0);
    }
}
