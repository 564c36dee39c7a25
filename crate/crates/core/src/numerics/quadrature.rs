//! Gauss–Legendre nodes and adaptive Gauss–Kronrod integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::linalg::{Complex3Dyadic, Complex3Vector};
use super::NumericsError;

/// Values that can be accumulated by the integrators.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    /// Size used for error control (max-entry modulus).
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Mul<f64> for Complex3Vector {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Complex3Vector(self.0.map(|x| x * s))
    }
}

impl QuadValue for Complex3Vector {
    fn zero() -> Self {
        Complex3Vector::zero()
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

impl QuadValue for Complex3Dyadic {
    fn zero() -> Self {
        Complex3Dyadic::zero()
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>), NumericsError> {
    if n == 0 {
        return Err(NumericsError::InvalidArgument("Gauss–Legendre needs n ≥ 1".into()));
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    Ok((x, w))
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>, NumericsError> {
    let (x, w) = gauss_legendre(n)?;
    let (h, m) = (0.5 * (b - a), 0.5 * (b + a));
    Ok(x.iter().zip(&w).map(|(&xi, &wi)| (m + h * xi, h * wi)).collect())
}

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
pub fn gauss_kronrod_15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).magnitude())
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { abs_tol: 0.0, rel_tol: 1e-12, max_panels: 200_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub panels: usize,
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive G7K15 integration over the partition given by `breakpoints`
/// (sorted, at least two entries). Bisects the worst panel until the summed error
/// estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<T: QuadValue>(
    f: impl Fn(f64) -> T,
    breakpoints: &[f64],
    opts: &AdaptiveOptions,
) -> Result<QuadResult<T>, NumericsError> {
    if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(NumericsError::InvalidArgument("breakpoints must be strictly increasing".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    for w in breakpoints.windows(2) {
        let (v, e) = gauss_kronrod_15(&f, w[0], w[1]);
        total = total + v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, error: e });
    }
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= target {
            break;
        }
        if heap.len() >= opts.max_panels {
            return Err(NumericsError::ConvergenceFailure {
                message: format!("adaptive quadrature hit {} panels", heap.len()),
                partial: vec![total.magnitude(), err],
            });
        }
        let worst = heap.pop().expect("nonempty panel heap");
        if worst.error == 0.0 {
            heap.push(worst);
            break;
        }
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            // Interval exhausted at machine precision; keep what we have.
            heap.push(Panel { error: 0.0, ..worst });
            err -= worst.error;
            continue;
        }
        let (v1, e1) = gauss_kronrod_15(&f, worst.a, m);
        let (v2, e2) = gauss_kronrod_15(&f, m, worst.b);
        total = total - worst.value + v1 + v2;
        err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: worst.b, value: v2, error: e2 });
    }
    // Resum to shed accumulated cancellation from the incremental updates.
    let panels = heap.len();
    let mut value = T::zero();
    let mut error = 0.0;
    for p in heap.into_vec() {
        value = value + p.value;
        error += p.error;
    }
    if !value.magnitude().is_finite() {
        return Err(NumericsError::NonFinite("adaptive quadrature".into()));
    }
    Ok(QuadResult { value, error, panels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for n in [1, 2, 5, 12, 33, 80] {
            let (x, w) = gauss_legendre(n).unwrap();
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for p in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} p={p}");
            }
            assert!(x.windows(2).all(|v| v[1] > v[0]));
        }
    }

    #[test]
    fn kronrod_on_smooth_function() {
        let r = integrate_adaptive(|x: f64| x.exp(), &[0.0, 1.0], &AdaptiveOptions::default()).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_resolves_peak() {
        let eta = 1e-4;
        let f = |x: f64| eta / (x * x + eta * eta);
        let r = integrate_adaptive(f, &[-1.0, 0.3, 1.0], &AdaptiveOptions::default()).unwrap();
        let exact = 2.0 * (1.0 / eta).atan();
        assert!((r.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn complex_integrand() {
        let f = |x: f64| Complex64::new(0.0, 3.0 * x).exp();
        let r = integrate_adaptive(f, &[0.0, 2.0], &AdaptiveOptions::default()).unwrap();
        let exact = (Complex64::new(0.0, 6.0).exp() - 1.0) / Complex64::new(0.0, 3.0);
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        assert!(integrate_adaptive(|x: f64| x, &[1.0, 0.0], &AdaptiveOptions::default()).is_err());
    }
}
