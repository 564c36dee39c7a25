//! Spherical Bessel functions `j_n` and Hankel functions `h_n^{(1)}` of complex argument.
//!
//! `h_n` is generated by upward recurrence (stable for the outgoing solution).
//! `j_n` uses upward recurrence while `n ≤ |z|` and a backward continued-fraction
//! ratio sweep (Miller's method in ratio form) once the order exceeds `|z|`.

use num_complex::Complex64;

use super::NumericsError;

/// Tables of `j_n`, `j_n'`, `h_n`, `h_n'` for `n = 0..=order`.
#[derive(Debug, Clone)]
pub struct SphericalBessel {
    pub z: Complex64,
    pub j: Vec<Complex64>,
    pub dj: Vec<Complex64>,
    pub h: Option<(Vec<Complex64>, Vec<Complex64>)>,
}

impl SphericalBessel {
    /// Regular functions only; valid at `z = 0`.
    pub fn regular(order: usize, z: Complex64) -> Result<Self, NumericsError> {
        let j = spherical_j(order + 1, z)?;
        let dj = if z == Complex64::new(0.0, 0.0) {
            (0..=order).map(|n| Complex64::new(if n == 1 { 1.0 / 3.0 } else { 0.0 }, 0.0)).collect()
        } else {
            derivatives(&j, z)
        };
        Ok(Self { z, j: j[..=order].to_vec(), dj, h: None })
    }

    /// Regular and outgoing functions; `z` must be nonzero.
    pub fn full(order: usize, z: Complex64) -> Result<Self, NumericsError> {
        let mut s = Self::regular(order, z)?;
        let h = spherical_h(order + 1, z)?;
        let dh = derivatives(&h, z);
        s.h = Some((h[..=order].to_vec(), dh));
        Ok(s)
    }

    pub fn order(&self) -> usize {
        self.j.len() - 1
    }

    pub fn h(&self) -> &[Complex64] {
        &self.h.as_ref().expect("Hankel table not computed").0
    }

    pub fn dh(&self) -> &[Complex64] {
        &self.h.as_ref().expect("Hankel table not computed").1
    }
}

/// `(j_n, h_n, j_n', h_n')` at a single order.
pub fn spherical_bessel_jh(
    order: usize,
    z: Complex64,
) -> Result<(Complex64, Complex64, Complex64, Complex64), NumericsError> {
    let t = SphericalBessel::full(order, z)?;
    Ok((t.j[order], t.h()[order], t.dj[order], t.dh()[order]))
}

/// `f_0' = −f_1` and `f_n' = f_{n-1} − (n+1) f_n / z`, one order short of the input table.
fn derivatives(f: &[Complex64], z: Complex64) -> Vec<Complex64> {
    let mut d = Vec::with_capacity(f.len() - 1);
    d.push(-f[1]);
    for n in 1..f.len() - 1 {
        d.push(f[n - 1] - f[n] * (n as f64 + 1.0) / z);
    }
    d
}

fn spherical_j(order: usize, z: Complex64) -> Result<Vec<Complex64>, NumericsError> {
    let zero = Complex64::new(0.0, 0.0);
    let mut j = vec![zero; order + 1];
    if z.norm() < 1e-300 {
        j[0] = Complex64::new(1.0, 0.0);
        return Ok(j);
    }
    let az = z.norm();
    if az < 1e-4 {
        // Leading two series terms: z^n/(2n+1)!! · (1 − z²/(2(2n+3))).
        let mut pref = Complex64::new(1.0, 0.0);
        for (n, jn) in j.iter_mut().enumerate() {
            if n > 0 {
                pref = pref * z / (2 * n + 1) as f64;
            }
            *jn = pref * (1.0 - z * z / (2.0 * (2 * n + 3) as f64));
        }
        return check_finite(j, "j_n");
    }
    let (s, c) = (z.sin(), z.cos());
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    if (order as f64) <= az {
        j[0] = j0;
        if order >= 1 {
            j[1] = j1;
        }
        for n in 1..order {
            j[n + 1] = j[n] * ((2 * n + 1) as f64) / z - j[n - 1];
        }
        return check_finite(j, "j_n");
    }
    // Backward ratios r_n = j_n / j_{n-1} from r_n = z / (2n+1 − z r_{n+1}).
    let start = order + 20 + (az as usize) + (10.0 * (order as f64).sqrt()) as usize;
    let mut ratios = vec![zero; order + 1];
    let mut r = zero;
    for n in (1..=start).rev() {
        r = z / ((2 * n + 1) as f64 - z * r);
        if n <= order {
            ratios[n] = r;
        }
    }
    // Anchor on whichever of j_0, j_1 is better conditioned.
    j[0] = if j0.norm() >= 0.1 * j1.norm() { j0 } else { j1 / ratios[1] };
    for n in 1..=order {
        j[n] = j[n - 1] * ratios[n];
    }
    check_finite(j, "j_n")
}

fn spherical_h(order: usize, z: Complex64) -> Result<Vec<Complex64>, NumericsError> {
    if z.norm() == 0.0 {
        return Err(NumericsError::Domain("h_n(z) is singular at z = 0".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let e = (i * z).exp();
    let mut h = vec![Complex64::new(0.0, 0.0); order + 1];
    h[0] = -i * e / z;
    if order >= 1 {
        h[1] = -e * (z + i) / (z * z);
    }
    for n in 1..order {
        h[n + 1] = h[n] * ((2 * n + 1) as f64) / z - h[n - 1];
    }
    check_finite(h, "h_n")
}

fn check_finite(v: Vec<Complex64>, what: &str) -> Result<Vec<Complex64>, NumericsError> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(n) => Err(NumericsError::NonFinite(format!("{what} overflow at order {n}"))),
        None => Ok(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn wronskian_residual(n: usize, z: Complex64) -> f64 {
        let (j, h, dj, dh) = spherical_bessel_jh(n, z).unwrap();
        let w = j * dh - dj * h;
        let exact = c(0.0, 1.0) / (z * z);
        (w - exact).norm() / exact.norm()
    }

    #[test]
    fn order_zero_closed_form() {
        for z in [c(0.3, 0.0), c(2.0, 0.5), c(7.0, -1.0), c(1e-6, 0.0)] {
            let t = SphericalBessel::full(0, z).unwrap();
            assert!((t.j[0] - z.sin() / z).norm() < 1e-15 * (1.0 + (z.sin() / z).norm()));
        }
    }

    #[test]
    fn order_zero_derivatives() {
        let z = c(1.7, 0.4);
        let t = SphericalBessel::full(0, z).unwrap();
        let dj0 = (z * z.cos() - z.sin()) / (z * z);
        let i = c(0.0, 1.0);
        let dh0 = (i * z).exp() * (z + i) / (z * z) * c(1.0, 0.0);
        assert!((t.dj[0] - dj0).norm() < 1e-14);
        assert!((t.dh()[0] - dh0).norm() < 1e-14);
    }

    #[test]
    fn wronskian_example() {
        assert!(wronskian_residual(1, c(2.0, 0.5)) < 1e-12);
    }

    #[test]
    fn high_order_small_argument_is_finite() {
        let t = SphericalBessel::full(20, c(1.0, 0.0)).unwrap();
        assert!(t.j.iter().all(|x| x.is_finite()) && t.h().iter().all(|x| x.is_finite()));
        // j_20(1) = 1/41!! · (1 − 1/86 + …); 41!! = 13113070457687988603440625
        let approx = 1.0 / 1.311_307_045_768_798_9e25 * (1.0 - 1.0 / 86.0 + 1.0 / (8.0 * 43.0 * 45.0));
        assert!((t.j[20].re - approx).abs() < 1e-6 * approx);
    }

    #[test]
    fn hankel_rejects_zero() {
        assert!(matches!(spherical_bessel_jh(1, c(0.0, 0.0)), Err(NumericsError::Domain(_))));
        let t = SphericalBessel::regular(3, c(0.0, 0.0)).unwrap();
        assert_eq!(t.j[0], c(1.0, 0.0));
        assert_eq!(t.dj[1], c(1.0 / 3.0, 0.0));
    }

    #[test]
    fn upward_and_ratio_paths_agree_at_crossover() {
        // |z| = 10: orders ≤ 10 come from upward recurrence when order = 10,
        // from the ratio sweep when a larger table is requested.
        let z = c(10.0, 0.0);
        let up = SphericalBessel::regular(10, z).unwrap();
        let down = SphericalBessel::regular(30, z).unwrap();
        for n in 0..=10 {
            assert!((up.j[n] - down.j[n]).norm() < 1e-13 * (1.0 + up.j[n].norm()), "n={n}");
        }
    }

    #[test]
    fn wronskian_grid() {
        let mut worst: f64 = 0.0;
        for n in 0..=50 {
            for &r in &[0.1, 0.5, 1.0, 3.0, 10.0, 25.0, 50.0] {
                for k in 0..=6 {
                    let arg = k as f64 * std::f64::consts::FRAC_PI_2 / 6.0;
                    let z = Complex64::from_polar(r, arg);
                    worst = worst.max(wronskian_residual(n, z));
                }
            }
        }
        assert!(worst < 1e-10, "worst Wronskian residual {worst}");
    }
}
