//! One-dimensional quadrature rules.

/// Absolute tolerance used for every adaptive integral in the crate.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 50;

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Trapezoid weights for a uniform grid of `n + 1` nodes with spacing `h`.
pub fn trapezoid_weights(n_nodes: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n_nodes];
    if n_nodes > 0 {
        w[0] *= 0.5;
        w[n_nodes - 1] *= 0.5;
    }
    w
}

/// Composite trapezoid rule over uniformly spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (values[0] + values[n - 1]) + values[1..n - 1].iter().sum::<f64>()),
    }
}

/// Running integral of uniformly spaced samples with endpoint-derivative
/// correction (cubic Hermite per cell), exact for cubics.
pub fn cumulative_hermite(values: &[f64], derivs: &[f64], h: f64) -> Vec<f64> {
    assert_eq!(values.len(), derivs.len());
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..values.len() {
        acc += 0.5 * h * (values[i - 1] + values[i]) + h * h / 12.0 * (derivs[i - 1] - derivs[i]);
        out.push(acc);
    }
    out
}
