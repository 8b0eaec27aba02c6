//! Adaptive Simpson quadrature on [a, b] with optional interior breakpoints.

const MAX_DEPTH: u32 = 48;
const PANELS: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-14, rel: 1e-10 }
    }
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
    eps: f64,
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
    if depth == 0 || delta.abs() <= 15.0 * eps || !(lm > a && rm < b) {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

/// Integrate `f` over [a, b]. The interval is first cut into equal panels so
/// that narrow features are not missed by the initial Simpson estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let h = (b - a) / PANELS as f64;
    let mut nodes = [(0.0, 0.0); 2 * PANELS + 1];
    for (i, node) in nodes.iter_mut().enumerate() {
        let x = if i == 2 * PANELS { b } else { a + 0.5 * h * i as f64 };
        *node = (x, f(x));
    }
    let mut scale = 0.0;
    let mut wholes = [0.0; PANELS];
    for p in 0..PANELS {
        let (fa, fm, fb) = (nodes[2 * p].1, nodes[2 * p + 1].1, nodes[2 * p + 2].1);
        wholes[p] = h / 6.0 * (fa + 4.0 * fm + fb);
        scale += h / 6.0 * (fa.abs() + 4.0 * fm.abs() + fb.abs());
    }
    let eps = tol.abs.max(tol.rel * scale) / PANELS as f64;
    let mut total = 0.0;
    for p in 0..PANELS {
        total += recurse(
            &f,
            nodes[2 * p].0,
            nodes[2 * p + 2].0,
            nodes[2 * p].1,
            nodes[2 * p + 1].1,
            nodes[2 * p + 2].1,
            wholes[p],
            eps,
            MAX_DEPTH,
        );
    }
    total
}

/// Integrate over [a, b], restarting at every breakpoint inside the interval.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut lo = a;
    let mut total = 0.0;
    for &c in cuts.iter().chain(std::iter::once(&b)) {
        total += integrate(&f, lo, c, tol);
        lo = c;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_up_to_cubic_are_exact() {
        let v = integrate(|x| 1.0 + x - 2.0 * x * x + x * x * x, -1.0, 2.0, Tolerance::default());
        let exact = 3.0 + 1.5 - 6.0 + 3.75;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn smooth_and_kinked_integrands() {
        let v = integrate(f64::exp, 0.0, 1.0, Tolerance::new(1e-14, 1e-13));
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let k = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, Tolerance::new(1e-14, 1e-12));
        assert!((k - (0.045 + 0.245)).abs() < 1e-10);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let f = |x: f64| if x < 0.37 { 1.0 } else { 3.0 };
        let v = integrate_with_breaks(f, 0.0, 1.0, &[0.37], Tolerance::default());
        assert!((v - (0.37 + 3.0 * 0.63)).abs() < 1e-13);
    }

    #[test]
    fn empty_interval_is_zero() {
        assert_eq!(integrate(|_| 1.0, 1.0, 1.0, Tolerance::default()), 0.0);
        assert_eq!(integrate(|_| 1.0, 2.0, 1.0, Tolerance::default()), 0.0);
    }
}
