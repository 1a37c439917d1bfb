//! Adaptive Gauss-Kronrod quadrature and bracketed root finding.

// Gauss-Kronrod 7/15 abscissae on [0, 1] (symmetric), Kronrod weights and the
// Gauss weights belonging to the odd-indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Intervals are bisected until each piece meets its share of the tolerance
/// (proportional to its length) or its error estimate sinks to rounding
/// level. Pieces that hit the depth limit are accepted
/// as they are, which keeps integrable endpoint singularities finite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if b < a {
        return -integrate(f, b, a, tol);
    }
    let width = b - a;
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(&f, lo, hi);
        let share = tol * (hi - lo) / width;
        let roundoff = 64.0 * f64::EPSILON * value.abs();
        if err <= share.max(roundoff) || depth >= MAX_DEPTH || hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    total
}

/// Sum of [`integrate`] over consecutive pieces of a sorted list of breaks.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> f64 {
    if breaks.len() < 2 {
        return 0.0;
    }
    let width = breaks[breaks.len() - 1] - breaks[0];
    breaks
        .windows(2)
        .map(|w| {
            let piece_tol = if width > 0.0 { tol * (w[1] - w[0]) / width } else { tol };
            integrate(&f, w[0], w[1], piece_tol.max(f64::MIN_POSITIVE))
        })
        .sum()
}

/// Smallest `x` in `[lo, hi]` with `above(x)` true, assuming the predicate is
/// monotone (false then true) and `above(hi)` holds.
///
/// `g` is a continuous companion whose sign matches the predicate; it drives
/// Illinois-style secant steps, with a bisection step whenever the bracket
/// fails to halve.
pub fn first_crossing<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut g_lo = g(lo);
    let mut g_hi = g(hi);
    if g_lo > 0.0 {
        return lo;
    }
    let mut side = 0i8;
    while hi - lo > xtol {
        let width = hi - lo;
        let mut x = if g_hi > g_lo {
            lo - g_lo * (hi - lo) / (g_hi - g_lo)
        } else {
            0.5 * (lo + hi)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let gx = g(x);
        if gx > 0.0 {
            hi = x;
            g_hi = gx;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            g_lo = gx;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        }
        if hi - lo > 0.5 * width {
            let mid = 0.5 * (lo + hi);
            let gm = g(mid);
            if gm > 0.0 {
                hi = mid;
                g_hi = gm;
            } else {
                lo = mid;
                g_lo = gm;
            }
            side = 0;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-14);
        // x^4/4 - x^2 + x from -1 to 2
        assert!((v - ((4.0 - 4.0 + 2.0) - (0.25 - 1.0 - 1.0))).abs() < 1e-13);
    }

    #[test]
    fn smooth_and_singular_integrands() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
        let v = integrate(|x: f64| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, 1e-12);
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn pieces_handle_jumps() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 3.0 };
        let v = integrate_pieces(f, &[0.0, 0.3, 1.0], 1e-13);
        assert!((v - (0.3 + 2.1)).abs() < 1e-13);
    }

    #[test]
    fn crossing_of_smooth_and_flat_functions() {
        let x = first_crossing(|x| x * x - 2.0, 0.0, 2.0, 1e-13);
        assert!((x - 2f64.sqrt()).abs() < 1e-12);
        // flat on [1, 2]: the crossing of "g > 0" is the right end of the flat part
        let g = |x: f64| (x - 1.0).min(0.0) + (x - 2.0).max(0.0);
        let x = first_crossing(g, 0.0, 3.0, 1e-12);
        assert!((x - 2.0).abs() < 1e-11);
    }
}
