//! Double-double helpers for the exponent of Baker's map, whose value is
//! amplified by `exp` and would otherwise lose the last digits.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: e }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

fn add(a: Dd, b: Dd) -> Dd {
    let s = two_sum(a.hi, b.hi);
    let lo = s.lo + a.lo + b.lo;
    two_sum(s.hi, lo)
}

fn add_f(a: f64, b: Dd) -> Dd {
    add(Dd { hi: a, lo: 0.0 }, b)
}

fn mul_f(a: Dd, b: f64) -> Dd {
    let p = two_prod(a.hi, b);
    two_sum(p.hi, p.lo + a.lo * b)
}

fn div_f(a: f64, b: Dd) -> Dd {
    let q1 = a / b.hi;
    // r = a − q1·b
    let p = mul_f(b, q1);
    let r = add_f(
        a,
        Dd {
            hi: -p.hi,
            lo: -p.lo,
        },
    );
    let q2 = r.hi / b.hi;
    two_sum(q1, q2)
}

/// `exp(α(z − 1/z))`, or `Err(real part)` if the exponent exceeds `cap`.
pub(super) fn exp_baker(alpha: f64, z: Complex64, cap: f64) -> Result<Complex64, f64> {
    let (x, y) = (z.re, z.im);
    let n = add(two_prod(x, x), two_prod(y, y));
    let inv_re = div_f(x, n);
    let inv_im = div_f(-y, n);
    let u_re = add_f(
        x,
        Dd {
            hi: -inv_re.hi,
            lo: -inv_re.lo,
        },
    );
    let u_im = add_f(
        y,
        Dd {
            hi: -inv_im.hi,
            lo: -inv_im.lo,
        },
    );
    let w_re = mul_f(u_re, alpha);
    let w_im = mul_f(u_im, alpha);
    if w_re.hi > cap {
        return Err(w_re.hi);
    }
    let modulus = w_re.hi.exp() * (1.0 + w_re.lo);
    let (s, c) = w_im.hi.sin_cos();
    let cis = Complex64::new(c - w_im.lo * s, s + w_im.lo * c);
    Ok(modulus * cis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_plain_evaluation() {
        for &(x, y) in &[(0.3, 0.7), (-2.0, 5.0), (1.0, 0.0), (0.01, -0.02)] {
            let z = Complex64::new(x, y);
            let plain = (0.4 * (z - z.inv())).exp();
            let dd = exp_baker(0.4, z, 700.0).unwrap();
            assert!((plain - dd).norm() <= 1e-13 * plain.norm().max(1.0));
        }
    }

    #[test]
    fn fixed_point_is_exact() {
        assert_eq!(
            exp_baker(0.4, Complex64::new(1.0, 0.0), 700.0).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }
}
