//! Adaptive Simpson quadrature, on finite intervals and on the whole line.

/// Integrates `f` over `[a, b]` with unit-width starting panels.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let panels = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == panels { b } else { lo + h };
            let (fa, fb) = (f(lo), f(hi));
            let (m, fm, whole) = simpson(f, lo, fa, hi, fb);
            refine(f, (lo, fa), (hi, fb), (m, fm), whole, tol / panels as f64, 48)
        })
        .sum()
}

/// Integrates `f` over the real line: `[-window, window]` directly and each
/// tail through `x = window + t / (1 - t)`, `t` in `[0, 1)`.
pub fn integrate_real_line(f: &dyn Fn(f64) -> f64, window: f64, tol: f64) -> f64 {
    let tail = |sign: f64| {
        move |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let u = 1.0 - t;
            f(sign * (window + t / u)) / (u * u)
        }
    };
    let right = tail(1.0);
    let left = tail(-1.0);
    integrate(f, -window, window, tol)
        + integrate(&right, 0.0, 1.0, tol)
        + integrate(&left, 0.0, 1.0, tol)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

fn refine(
    f: &dyn Fn(f64) -> f64,
    (a, fa): (f64, f64),
    (b, fb): (f64, f64),
    (m, fm): (f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, (a, fa), (m, fm), (lm, flm), left, tol / 2.0, depth - 1)
        + refine(f, (m, fm), (b, fb), (rm, frm), right, tol / 2.0, depth - 1)
}
