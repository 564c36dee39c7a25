//! Two-region vector-spherical-wave series for a homogeneous sphere centred at the origin.
//!
//! Waves are `M = z C`, `N = a P + b B` with the radial factors of [`Radial`]. For each
//! region pair the series has the form `κ Σ_n [c^M_n M(r) M̄(r′) + c^N_n N(r) N̄(r′)]`,
//! where the bar conjugates only the angular part.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernels::{add_bilinear, DirectionPair, KernelSum, Legendre, Radial, Wave};
use super::GreenError;
use crate::numerics::bessel::SphericalBessel;
use crate::numerics::linalg::{norm3, scale3, Complex3Dyadic, Vec3};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ORDER_CEILING: usize = 400;
/// Largest `log10 |h_n|` admitted when sizing the coefficient table.
const HANKEL_LOG10_LIMIT: f64 = 290.0;
/// Relative size of the last doubling block that counts as converged.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Where a point sits relative to the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Inside,
    Outside,
}

/// Scattering coefficients, indexed by order `n` (entry 0 unused).
///
/// `a_*`: source and field outside. `t_*`: field inside, source outside.
/// `u_*`: field outside, source inside. `b_*`: source and field inside.
#[derive(Debug, Clone)]
pub struct SphereCoefficients {
    pub radius: f64,
    pub k0: f64,
    pub k1: Complex64,
    pub mu1: Complex64,
    pub a_m: Vec<Complex64>,
    pub a_n: Vec<Complex64>,
    pub t_m: Vec<Complex64>,
    pub t_n: Vec<Complex64>,
    pub u_m: Vec<Complex64>,
    pub u_n: Vec<Complex64>,
    pub b_m: Vec<Complex64>,
    pub b_n: Vec<Complex64>,
}

fn hankel_log10(order: usize, x: f64) -> f64 {
    // |h_n(x)| ≈ (2n−1)!!/x^{n+1} for n ≫ x.
    let mut acc = -(x.log10());
    for k in 1..=order {
        acc += ((2 * k - 1) as f64).log10() - x.log10();
    }
    acc
}

impl SphereCoefficients {
    pub fn new(radius: f64, k0: f64, k1: Complex64, mu1: Complex64) -> Result<Self, GreenError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GreenError::InvalidArgument(format!("sphere radius must be positive, got {radius}")));
        }
        let x0 = k0 * radius;
        let x1 = k1 * radius;
        let xmin = x0.min(x1.norm());
        let mut cap = 1;
        while cap < ORDER_CEILING && hankel_log10(cap + 1, xmin) < HANKEL_LOG10_LIMIT {
            cap += 1;
        }
        let out0 = SphericalBessel::full(cap, Complex64::new(x0, 0.0))?;
        let in1 = SphericalBessel::full(cap, x1)?;
        let c = k1 / (k0 * mu1);
        let mut s = Self {
            radius,
            k0,
            k1,
            mu1,
            a_m: vec![Complex64::default(); cap + 1],
            a_n: vec![Complex64::default(); cap + 1],
            t_m: vec![Complex64::default(); cap + 1],
            t_n: vec![Complex64::default(); cap + 1],
            u_m: vec![Complex64::default(); cap + 1],
            u_n: vec![Complex64::default(); cap + 1],
            b_m: vec![Complex64::default(); cap + 1],
            b_n: vec![Complex64::default(); cap + 1],
        };
        let x0c = Complex64::new(x0, 0.0);
        for n in 1..=cap {
            let (j0, h0) = (out0.j[n], out0.h()[n]);
            // ψ′ = (x j)′ = j + x j′, ξ′ likewise.
            let dpsi0 = j0 + x0c * out0.dj[n];
            let dxi0 = h0 + x0c * out0.dh()[n];
            let (j1, h1) = (in1.j[n], in1.h()[n]);
            let dpsi1 = j1 + x1 * in1.dj[n];
            let dxi1 = h1 + x1 * in1.dh()[n];

            let det_m = j1 * dxi0 - h0 * dpsi1 / mu1;
            s.a_m[n] = (j0 * dpsi1 / mu1 - j1 * dpsi0) / det_m;
            s.t_m[n] = (j0 * dxi0 - h0 * dpsi0) / det_m;
            s.u_m[n] = (j1 * dxi1 - h1 * dpsi1) / (mu1 * det_m);
            s.b_m[n] = (h0 * dxi1 / mu1 - dxi0 * h1) / det_m;

            let det_n = h0 * dpsi1 / x1 - c * j1 * dxi0 / x0c;
            s.a_n[n] = (c * j1 * dpsi0 / x0c - j0 * dpsi1 / x1) / det_n;
            s.t_n[n] = (h0 * dpsi0 - j0 * dxi0) / (x0c * det_n);
            let det_in = k0 * h0 * dpsi1 / x1 - (k1 / mu1) * j1 * dxi0 / x0c;
            s.u_n[n] = (k1 / mu1) * (dpsi1 * h1 - dxi1 * j1) / (x1 * det_in);
            s.b_n[n] = ((k1 / mu1) * h1 * dxi0 / x0c - k0 * h0 * dxi1 / x1) / det_in;

        }
        // Interior-interior coefficients grow like h_n², so each family keeps its own
        // finite prefix.
        for v in [
            &mut s.a_m,
            &mut s.a_n,
            &mut s.t_m,
            &mut s.t_n,
            &mut s.u_m,
            &mut s.u_n,
            &mut s.b_m,
            &mut s.b_n,
        ] {
            if let Some(bad) = v.iter().skip(1).position(|c| !c.is_finite()) {
                v.truncate(bad + 1);
            }
        }
        Ok(s)
    }

    /// Highest order available to every coefficient family.
    pub fn max_order(&self) -> usize {
        [&self.a_m, &self.a_n, &self.t_m, &self.t_n, &self.u_m, &self.u_n, &self.b_m, &self.b_n]
            .iter()
            .map(|v| v.len() - 1)
            .min()
            .unwrap_or(0)
    }

    /// Starting truncation order for the doubling schedule.
    pub fn initial_order(&self) -> usize {
        let x = (self.k1.norm() * self.radius).max(self.k0 * self.radius);
        let l = (x + 4.0 * x.cbrt() + 2.0).ceil() as usize + 4;
        l.min(self.max_order())
    }

    pub fn region(&self, p: Vec3) -> Result<Region, GreenError> {
        let r = norm3(p);
        if (r - self.radius).abs() <= 1e-9 * self.radius {
            return Err(GreenError::SurfaceAmbiguity { point: p });
        }
        Ok(if r < self.radius { Region::Inside } else { Region::Outside })
    }

    /// Series term for the given field/source region pair.
    pub fn pair(&self, field: Region, source: Region, r: Vec3, rp: Vec3) -> SeriesSpec<'_> {
        let k0 = Complex64::new(self.k0, 0.0);
        let (pref, cm, cn, left, right) = match (field, source) {
            (Region::Outside, Region::Outside) => (
                I * self.k0,
                &self.a_m,
                &self.a_n,
                RadialSource::Outgoing { k: k0, r },
                RadialSource::Outgoing { k: k0, r: rp },
            ),
            (Region::Inside, Region::Outside) => (
                I * self.k0,
                &self.t_m,
                &self.t_n,
                RadialSource::Regular { k: self.k1, r },
                RadialSource::Outgoing { k: k0, r: rp },
            ),
            (Region::Outside, Region::Inside) => (
                I * self.k1 * self.mu1,
                &self.u_m,
                &self.u_n,
                RadialSource::Outgoing { k: k0, r },
                RadialSource::Regular { k: self.k1, r: rp },
            ),
            (Region::Inside, Region::Inside) => (
                I * self.k1 * self.mu1,
                &self.b_m,
                &self.b_n,
                RadialSource::Regular { k: self.k1, r },
                RadialSource::Regular { k: self.k1, r: rp },
            ),
        };
        SeriesSpec { pref, coef_m: cm, coef_n: cn, left, right }
    }

    /// Series for the far-field amplitude along `u` of a source at `rp`.
    pub fn farfield_pair(&self, source: Region, u: Vec3, rp: Vec3) -> SeriesSpec<'_> {
        let k0 = Complex64::new(self.k0, 0.0);
        let left = RadialSource::FarField { k: self.k0, dir: u };
        match source {
            Region::Outside => SeriesSpec {
                pref: I * self.k0,
                coef_m: &self.a_m,
                coef_n: &self.a_n,
                left,
                right: RadialSource::Outgoing { k: k0, r: rp },
            },
            Region::Inside => SeriesSpec {
                pref: I * self.k1 * self.mu1,
                coef_m: &self.u_m,
                coef_n: &self.u_n,
                left,
                right: RadialSource::Regular { k: self.k1, r: rp },
            },
        }
    }
}

/// Radial table generator for one side of a bilinear series.
#[derive(Debug, Clone, Copy)]
pub enum RadialSource {
    Regular { k: Complex64, r: Vec3 },
    Outgoing { k: Complex64, r: Vec3 },
    /// `r → ∞` limit of the outgoing waves with `e^{ikr}/r` removed.
    FarField { k: f64, dir: Vec3 },
    /// Angular weights of the regular-wave expansion of a plane wave along `dir`.
    PlaneWave { dir: Vec3 },
}

impl RadialSource {
    pub fn direction(&self) -> Vec3 {
        let p = match *self {
            RadialSource::Regular { r, .. } | RadialSource::Outgoing { r, .. } => r,
            RadialSource::FarField { dir, .. } | RadialSource::PlaneWave { dir } => dir,
        };
        let n = norm3(p);
        if n == 0.0 {
            // Only n = 1 survives at the origin and it is direction independent.
            [0.0, 0.0, 1.0]
        } else {
            scale3(1.0 / n, p)
        }
    }

    /// Wavenumber entering the curl relations `∇×M = kN`, `∇×N = kM`.
    pub fn wavenumber(&self) -> Option<Complex64> {
        match *self {
            RadialSource::Regular { k, .. } | RadialSource::Outgoing { k, .. } => Some(k),
            _ => None,
        }
    }

    pub fn table(&self, order: usize) -> Result<Vec<Radial>, GreenError> {
        let mut out = vec![Radial::default(); order + 1];
        match *self {
            RadialSource::Regular { k, r } => {
                let x = k * norm3(r);
                if x == Complex64::new(0.0, 0.0) {
                    if order >= 1 {
                        out[1] = Radial {
                            z: Complex64::default(),
                            a: Complex64::new(2f64.sqrt() / 3.0, 0.0),
                            b: Complex64::new(2.0 / 3.0, 0.0),
                        };
                    }
                    return Ok(out);
                }
                let t = SphericalBessel::regular(order, x)?;
                fill(&mut out, &t.j, x);
            }
            RadialSource::Outgoing { k, r } => {
                let x = k * norm3(r);
                let t = SphericalBessel::full(order, x)?;
                fill(&mut out, t.h(), x);
            }
            RadialSource::FarField { k, .. } => {
                let mut p = Complex64::new(1.0, 0.0);
                for (n, slot) in out.iter_mut().enumerate() {
                    // p = (−i)^n
                    if n > 0 {
                        *slot = Radial { z: p * -I / k, a: Complex64::default(), b: p / k };
                    }
                    p *= -I;
                }
            }
            RadialSource::PlaneWave { .. } => {
                let mut p = Complex64::new(4.0 * PI, 0.0);
                for (n, slot) in out.iter_mut().enumerate() {
                    // p = 4π iⁿ
                    if n > 0 {
                        *slot = Radial { z: p, a: Complex64::default(), b: -I * p };
                    }
                    p *= I;
                }
            }
        }
        Ok(out)
    }
}

fn fill(out: &mut [Radial], f: &[Complex64], x: Complex64) {
    for n in 1..out.len() {
        let nf = n as f64;
        let nu = (nf * (nf + 1.0)).sqrt();
        out[n] = Radial { z: f[n], a: nu * f[n] / x, b: f[n - 1] - nf * f[n] / x };
    }
}

/// One bilinear series: `pref Σ_n [coef_m M_L ⊗ M̄_R + coef_n N_L ⊗ N̄_R]`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSpec<'a> {
    pub pref: Complex64,
    pub coef_m: &'a [Complex64],
    pub coef_n: &'a [Complex64],
    pub left: RadialSource,
    pub right: RadialSource,
}

/// Summed value and, when requested, `∇_r ×` and `× ∇̄_{r′}` of the series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex3Dyadic,
    pub curl_r: Complex3Dyadic,
    pub curl_rprime: Complex3Dyadic,
    pub order: usize,
}

impl SeriesSpec<'_> {
    /// Sums in doubling blocks from `start` until each requested part's last block is
    /// below `TAIL_TOLERANCE` relative to `max(|part|, floor)`.
    pub fn sum(&self, start: usize, curls: bool, floor: [f64; 3]) -> Result<SeriesValue, GreenError> {
        let cap = self.coef_m.len().min(self.coef_n.len()) - 1;
        let dirs = DirectionPair::new(self.left.direction(), self.right.direction());
        let kl = self.left.wavenumber();
        let kr = self.right.wavenumber();
        let parts = if curls { 3 } else { 1 };
        if curls && (kl.is_none() || kr.is_none()) {
            return Err(GreenError::InvalidArgument("curls need finite-point waves on both sides".into()));
        }

        let mut sums = [KernelSum::new(), KernelSum::new(), KernelSum::new()];
        let mut done = 0usize;
        let mut previous: Option<[Complex3Dyadic; 3]> = None;
        let mut target = (start.max(2) / 2).min(cap).max(1);
        loop {
            let lt = self.left.table(target)?;
            let rt = self.right.table(target)?;
            let leg = Legendre::new(dirs.mu, target);
            for n in done + 1..=target {
                let pairs = [(Wave::M, self.coef_m[n]), (Wave::N, self.coef_n[n])];
                for (w, c) in pairs {
                    let c = c * self.pref;
                    add_bilinear(&mut sums[0], &leg, n, c, (w, &lt[n]), (w, &rt[n]));
                    if curls {
                        let (kl, kr) = (kl.unwrap_or_default(), kr.unwrap_or_default());
                        add_bilinear(&mut sums[1], &leg, n, c * kl, (w.dual(), &lt[n]), (w, &rt[n]));
                        add_bilinear(&mut sums[2], &leg, n, -c * kr, (w, &lt[n]), (w.dual(), &rt[n]));
                    }
                }
            }
            done = target;
            let now = [
                sums[0].assemble(&dirs),
                if curls { sums[1].assemble(&dirs) } else { Complex3Dyadic::zero() },
                if curls { sums[2].assemble(&dirs) } else { Complex3Dyadic::zero() },
            ];
            if now.iter().any(|d| !d.is_finite()) {
                return Err(GreenError::Truncation { order: done, last_increment: f64::INFINITY });
            }
            if let Some(prev) = previous {
                let mut worst = 0.0f64;
                for p in 0..parts {
                    let inc = (now[p] - prev[p]).max_abs();
                    let scale = now[p].max_abs().max(floor[p]);
                    worst = worst.max(if scale > 0.0 { inc / scale } else { 0.0 });
                }
                if worst <= TAIL_TOLERANCE {
                    return Ok(SeriesValue { value: now[0], curl_r: now[1], curl_rprime: now[2], order: done });
                }
                if done >= cap {
                    return Err(GreenError::Truncation { order: done, last_increment: worst });
                }
            }
            previous = Some(now);
            target = (2 * target).min(cap);
            if target == done {
                // Cap reached before a comparison block was available.
                return Err(GreenError::Truncation { order: done, last_increment: f64::INFINITY });
            }
        }
    }
}

/// Radial factors evaluated at a single order, for tests and diagnostics.
pub fn radial_at(source: &RadialSource, order: usize) -> Result<Radial, GreenError> {
    Ok(source.table(order)?[order])
}
