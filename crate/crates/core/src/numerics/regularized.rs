//! Real-line integrals regularized by `e^{−δω}` and extrapolated to `δ → 0`.

use super::quadrature::{gauss_kronrod_15, integrate_adaptive, AdaptiveOptions, QuadValue};
use super::NumericsError;

#[derive(Debug, Clone)]
pub struct LineOptions {
    /// Extra panel boundaries (peaks, kinks) inside `(0, cutoff)`.
    pub breakpoints: Vec<f64>,
    /// Uniform panels laid over `[0, cutoff]` before adaptive refinement.
    pub initial_panels: usize,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for LineOptions {
    fn default() -> Self {
        Self { breakpoints: Vec::new(), initial_panels: 64, rel_tol: 1e-12, max_panels: 400_000 }
    }
}

#[derive(Debug, Clone)]
pub struct RegularizedIntegral<T> {
    pub value: T,
    /// Difference between the reported extrapolant and its predecessor.
    pub error: f64,
    /// Index into `extrapolants` of the reported value.
    pub selected: usize,
    pub per_delta: Vec<(f64, T)>,
    /// Neville extrapolants using the first 1, 2, … regulator values.
    pub extrapolants: Vec<T>,
}

/// `∫₀^cutoff f(ω) e^{−δω} dω` for each `δ`, extrapolated to `δ = 0`.
pub fn line_integrate_regularized<T: QuadValue>(
    f: impl Fn(f64) -> T,
    delta_values: &[f64],
    cutoff: f64,
    opts: &LineOptions,
) -> Result<RegularizedIntegral<T>, NumericsError> {
    line_integrate_regularized_with(|w, _| f(w), delta_values, cutoff, opts)
}

/// As [`line_integrate_regularized`], for integrands that carry their own
/// regulator (`f(ω, δ)`), e.g. poles displaced by `iδ`.
pub fn line_integrate_regularized_with<T: QuadValue>(
    f: impl Fn(f64, f64) -> T,
    delta_values: &[f64],
    cutoff: f64,
    opts: &LineOptions,
) -> Result<RegularizedIntegral<T>, NumericsError> {
    if delta_values.len() < 3 {
        return Err(NumericsError::InvalidArgument("need at least three regulator values".into()));
    }
    if delta_values.iter().any(|&d| !(d > 0.0)) || delta_values.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(NumericsError::InvalidArgument(
            "regulator values must be positive and strictly decreasing".into(),
        ));
    }
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(NumericsError::InvalidArgument("cutoff must be positive".into()));
    }
    let grid = partition(cutoff, opts);
    let mut per_delta = Vec::with_capacity(delta_values.len());
    for &delta in delta_values {
        let g = |w: f64| f(w, delta) * (-delta * w).exp();
        let scale: f64 = grid.windows(2).map(|p| gauss_kronrod_15(&g, p[0], p[1]).0.magnitude()).sum();
        let adaptive = AdaptiveOptions {
            abs_tol: opts.rel_tol * scale,
            rel_tol: opts.rel_tol,
            max_panels: opts.max_panels,
        };
        per_delta.push((delta, integrate_adaptive(g, &grid, &adaptive)?.value));
    }
    let deltas: Vec<f64> = per_delta.iter().map(|p| p.0).collect();
    let values: Vec<T> = per_delta.iter().map(|p| p.1).collect();
    let extrapolants = richardson_to_zero(&deltas, &values);
    let diffs: Vec<f64> =
        extrapolants.windows(2).map(|w| (w[1] - w[0]).magnitude()).collect();
    // The smallest regulators are the first to be polluted by the finite cutoff, so
    // the most stable extrapolant is reported rather than blindly the last one.
    let best = diffs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("at least two extrapolants");
    let selected = best + 1;
    let value = extrapolants[selected];
    let error = diffs[best];
    let growing = diffs.windows(2).all(|w| w[1] > w[0]);
    let out = RegularizedIntegral { value, error, selected, per_delta, extrapolants };
    if !value.magnitude().is_finite() || growing {
        return Err(NumericsError::ConvergenceFailure {
            message: format!("extrapolant differences grow monotonically: {diffs:?}"),
            partial: out.per_delta.iter().map(|p| p.1.magnitude()).collect(),
        });
    }
    Ok(out)
}

fn partition(cutoff: f64, opts: &LineOptions) -> Vec<f64> {
    let n = opts.initial_panels.max(1);
    let mut pts: Vec<f64> = (0..=n).map(|i| cutoff * i as f64 / n as f64).collect();
    pts.extend(opts.breakpoints.iter().copied().filter(|&b| b > 0.0 && b < cutoff));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * cutoff);
    pts
}

/// Neville extrapolation of `values(h)` to `h = 0`; entry `i` uses the first `i + 1` points.
pub fn richardson_to_zero<T: QuadValue>(h: &[f64], values: &[T]) -> Vec<T> {
    assert_eq!(h.len(), values.len());
    let mut table: Vec<T> = values.to_vec();
    let mut diag = vec![values[0]];
    // After pass m, table[i] holds the degree-m interpolant through points i..=i+m.
    for m in 1..h.len() {
        for i in 0..h.len() - m {
            let (hi, hj) = (h[i], h[i + m]);
            table[i] = (table[i + 1] * hi - table[i] * hj) * (1.0 / (hi - hj));
        }
        diag.push(table[0]);
    }
    diag
}
