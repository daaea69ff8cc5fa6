#![allow(dead_code)]

use mislab_core::{Family, GaussianParams, MixtureSpec, ProposalSet, StudentTParams, TargetSpec};

/// Adaptive Simpson quadrature on a finite interval.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
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
        recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    // split into unit panels so narrow peaks are never skipped
    let panels = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = lo + h;
            let (fa, fb) = (f(lo), f(hi));
            let (m, fm, whole) = simpson(f, lo, fa, hi, fb);
            recurse(f, lo, fa, hi, fb, m, fm, whole, tol / panels as f64, 40)
        })
        .sum()
}

pub fn gauss(m: f64, v: f64) -> Family {
    GaussianParams::new(m, v).unwrap().into()
}

pub fn student(loc: f64, scale_sq: f64, dof: f64) -> Family {
    StudentTParams::new(loc, scale_sq, dof).unwrap().into()
}

/// Two-Gaussian target: equal weights at -3 and 5, unit variance, Z = 1.
pub fn example1_target() -> TargetSpec {
    TargetSpec::new(
        MixtureSpec::uniform([gauss(-3.0, 1.0), gauss(5.0, 1.0)]).unwrap(),
        1.0,
    )
    .unwrap()
}

/// Five-component Student-t target, equal weights, unit scale, 5 dof.
pub fn example2_target() -> TargetSpec {
    TargetSpec::new(
        MixtureSpec::uniform([-3.0, -1.0, 0.0, 3.0, 4.0].map(|a| student(a, 1.0, 5.0))).unwrap(),
        1.0,
    )
    .unwrap()
}

/// `n` equidistant locations on `[-8, 8]`, both ends included.
pub fn grid_locations(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -8.0 + 16.0 * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn example1_proposals() -> ProposalSet {
    ProposalSet::new(grid_locations(32).into_iter().map(|m| gauss(m, 3.0)).collect()).unwrap()
}

pub fn example2_proposals() -> ProposalSet {
    ProposalSet::new(
        grid_locations(32)
            .into_iter()
            .map(|m| student(m, 3.0, 4.0))
            .collect(),
    )
    .unwrap()
}
