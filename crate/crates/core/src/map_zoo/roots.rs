use super::MapError;

/// Bracketing bisection for a sign change of `f` on `[a, b]`.
///
/// Halves the bracket until its width is at most `tol` (or `f` vanishes at a
/// midpoint) and returns the midpoint of the final bracket.
pub fn bisect<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, MapError>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(MapError::InvalidInput(format!(
            "bracket [{a}, {b}] must be finite with b > a"
        )));
    }
    if !(tol > 0.0) {
        return Err(MapError::InvalidInput(format!(
            "tol = {tol} must be positive"
        )));
    }
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(MapError::NoSignChange { a, b });
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            // Bracket is down to adjacent doubles.
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}
