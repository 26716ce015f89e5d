//! Derivative-free scalar search.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal function on `[lo, hi]`, stopping
/// once the bracket is narrower than `tol`. Endpoints are compared at the end
/// so a minimum on the boundary is found exactly.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold((mid, f64::INFINITY), |best, (x, fx)| if fx < best.1 { (x, fx) } else { best })
        .0
}

pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    golden_section_min(|x| -f(x), lo, hi, tol)
}

/// Result of [`maximize_on_window`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    /// `false` when the function is constant (or nowhere finite) on the grid.
    pub informative: bool,
}

/// Global maximization on `[lo, hi]`: a uniform grid of `grid_points` points
/// locates the best cell, golden-section search refines it to a bracket of
/// `rel_tol·(hi − lo)`, and, when a derivative is supplied, bisection on its
/// sign polishes the result to machine precision inside that bracket.
pub fn maximize_on_window<F, D>(
    f: F,
    derivative: Option<D>,
    lo: f64,
    hi: f64,
    grid_points: usize,
    rel_tol: f64,
) -> Maximum
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let grid_points = grid_points.max(3);
    let step = (hi - lo) / (grid_points - 1) as f64;
    let at = |i: usize| if i + 1 == grid_points { hi } else { lo + i as f64 * step };

    let mut best = (0, f64::NEG_INFINITY);
    let mut worst = f64::INFINITY;
    for i in 0..grid_points {
        let v = f(at(i));
        if v > best.1 {
            best = (i, v);
        }
        if v < worst {
            worst = v;
        }
    }
    let (i_best, v_best) = best;
    if !v_best.is_finite() || v_best - worst <= 1e-12 * (1.0 + v_best.abs()) {
        let mid = 0.5 * (lo + hi);
        return Maximum {
            x: mid,
            value: f(mid),
            informative: false,
        };
    }

    let a = at(i_best.saturating_sub(1));
    let b = at((i_best + 1).min(grid_points - 1));
    let tol = rel_tol * (hi - lo);
    let mut x = golden_section_max(&f, a, b, tol);

    if let Some(df) = derivative {
        // Near the peak, function values stop resolving x below ~sqrt(eps);
        // the derivative sign does not.
        let brackets = df_bracket(&df, x, 1e-6 * (hi - lo), a, b);
        if let Some((mut l, mut r)) = brackets {
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                if m <= l || m >= r {
                    break;
                }
                if df(m) > 0.0 {
                    l = m;
                } else {
                    r = m;
                }
            }
            let polished = 0.5 * (l + r);
            if f(polished) >= f(x) - 1e-12 * (1.0 + f(x).abs()) {
                x = polished;
            }
        }
    }
    Maximum {
        x,
        value: f(x),
        informative: true,
    }
}

fn df_bracket<D: Fn(f64) -> f64>(df: &D, x: f64, half_width: f64, a: f64, b: f64) -> Option<(f64, f64)> {
    let brackets = |l: f64, r: f64| {
        let (dl, dr) = (df(l), df(r));
        dl.is_finite() && dr.is_finite() && dl > 0.0 && dr < 0.0
    };
    let (l, r) = ((x - half_width).max(a), (x + half_width).min(b));
    if brackets(l, r) {
        Some((l, r))
    } else if brackets(a, b) {
        Some((a, b))
    } else {
        None
    }
}
