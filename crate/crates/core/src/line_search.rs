//! Golden-section minimization of a univariate function on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizes `f` on `[lower, upper]` until the bracket is narrower than `tol`.
///
/// Returns the best point evaluated and its value. `f` may return `+∞` for
/// points it rejects; such points never win.
pub fn golden_section<F>(mut f: F, lower: f64, upper: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lower.min(upper), lower.max(upper));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fd < fc { (d, fd) } else { (c, fc) };

    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    best
}
