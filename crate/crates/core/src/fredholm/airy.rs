//! Airy function `Ai` and its derivative.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `Ai(0)`.
#[allow(clippy::excessive_precision)]
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// `−Ai′(0)`.
pub const AIP0: f64 = 0.258_819_403_792_806_8;

/// Inputs beyond this magnitude are rejected by the public functions.
pub const AIRY_RANGE: f64 = 15.0;

/// Series below these magnitudes, asymptotics beyond. On the positive side
/// the series cancels against the growing `Bi` component, so it hands over
/// earlier.
const STITCH_POS: f64 = 5.0;
const STITCH_NEG: f64 = 7.0;

/// `(Ai(x), Ai′(x))` by the Maclaurin series.
pub(crate) fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = Σ t_k, g = Σ s_k; p_k, q_k are the termwise derivatives
    let (mut t, mut s) = (1.0, x);
    let (mut p, mut q) = (0.0, 1.0);
    let (mut f, mut g, mut fp, mut gp) = (1.0, x, 0.0, 1.0);
    for k in 0..200 {
        let kf = k as f64;
        t *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        s *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        p = if k == 0 {
            x * x / 2.0
        } else {
            p * x3 / (3.0 * kf * (3.0 * kf + 2.0))
        };
        q *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += t;
        g += s;
        fp += p;
        gp += q;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if t.abs() + s.abs() + p.abs() + q.abs() <= 1e-18 * scale {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

/// Coefficients `u_k` of the asymptotic expansions, with `v_k` alongside.
fn asymptotic_coefficients(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0];
    let mut v = vec![1.0];
    for k in 1..count {
        let kf = k as f64;
        let next = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(next);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * next);
    }
    (u, v)
}

/// Number of terms before the smallest one of `c_k / ζ^k`.
fn optimal_terms(u: &[f64], zeta: f64) -> usize {
    let mut best = (f64::INFINITY, 1);
    for (k, c) in u.iter().enumerate() {
        let term = c.abs() / zeta.powi(k as i32);
        if term < best.0 {
            best = (term, k + 1);
        } else if k > best.1 + 2 {
            break;
        }
    }
    best.1
}

/// `(Ai(x), Ai′(x))` by the large-`|x|` expansions.
pub(crate) fn airy_asymptotic(x: f64) -> (f64, f64) {
    let (u, v) = asymptotic_coefficients(60);
    let y = x.abs();
    let zeta = 2.0 / 3.0 * y.powf(1.5);
    let n = optimal_terms(&u, zeta);
    if x > 0.0 {
        let (mut su, mut sv) = (0.0, 0.0);
        for k in (0..n).rev() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            su += sign * u[k] / zeta.powi(k as i32);
            sv += sign * v[k] / zeta.powi(k as i32);
        }
        let e = (-zeta).exp() / (2.0 * PI.sqrt());
        (e / y.powf(0.25) * su, -e * y.powf(0.25) * sv)
    } else {
        // even and odd parts, alternating in pairs
        let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
        for k in 0..n {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let z = zeta.powi(k as i32);
            if k % 2 == 0 {
                ue += sign * u[k] / z;
                ve += sign * v[k] / z;
            } else {
                uo += sign * u[k] / z;
                vo += sign * v[k] / z;
            }
        }
        let phase = zeta + PI / 4.0;
        let (s, c) = phase.sin_cos();
        let ai = (s * ue - c * uo) / (PI.sqrt() * y.powf(0.25));
        let aip = -y.powf(0.25) / PI.sqrt() * (c * ve + s * vo);
        (ai, aip)
    }
}

/// `(Ai(x), Ai′(x))` for any finite `x`.
pub(crate) fn airy_pair(x: f64) -> (f64, f64) {
    if (-STITCH_NEG..=STITCH_POS).contains(&x) {
        airy_series(x)
    } else {
        airy_asymptotic(x)
    }
}

fn check_range(x: f64) -> Result<()> {
    if x.abs() <= AIRY_RANGE {
        Ok(())
    } else {
        Err(Error::Range(format!(
            "Airy argument {x} outside [-{AIRY_RANGE}, {AIRY_RANGE}]"
        )))
    }
}

pub fn airy_ai(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(airy_pair(x).0)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(airy_pair(x).1)
}

/// `∫_L^∞ Ai²` and `∫_L^∞ x·Ai²`.
pub(crate) fn airy_square_tails(l: f64) -> (f64, f64) {
    let (a, ap) = airy_pair(l);
    let i0 = ap * ap - l * a * a;
    let i1 = -(l * l * a * a - l * ap * ap + a * ap) / 3.0;
    (i0, i1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero() {
        let (a, ap) = airy_pair(0.0);
        assert_eq!(a, AI0);
        assert_eq!(ap, -AIP0);
        // 3^{−2/3}/Γ(2/3), Γ(2/3) = 1.3541179394264004
        assert!((AI0 - 3f64.powf(-2.0 / 3.0) / 1.354_117_939_426_400_4).abs() < 1e-15);
    }

    #[test]
    fn high_precision_values() {
        let table = [
            (-14.0, -0.265_983_482_784_078, 0.443_024_877_002_844),
            (-8.0, -0.052_705_050_356_386_2, 0.935_560_938_198_307),
            (-6.5, -0.238_020_301_997_116, -0.674_952_492_513_202),
            (5.0, 0.000_108_344_428_136_074, -0.000_247_413_890_868_462),
            (6.0, 9.947_694_360_252_89e-6, -2.476_520_039_703_5e-5),
            (7.3, 3.325_137_824_437_76e-7, -9.094_540_388_833_46e-7),
        ];
        for (x, a, ap) in table {
            let (ga, gp) = airy_pair(x);
            assert!((ga - a).abs() < 1e-10 && (gp - ap).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn tabulated_values() {
        let table = [
            (1.0, 0.135_292_416_312_881_4),
            (-1.0, 0.535_560_883_292_352_1),
            (2.0, 0.034_924_130_423_274_38),
            (-2.0, 0.227_407_428_201_685_6),
        ];
        for (x, v) in table {
            assert!((airy_ai(x).unwrap() - v).abs() < 1e-13, "Ai({x})");
        }
    }

    #[test]
    fn branches_agree_in_the_overlap() {
        for i in 0..=20 {
            let x = 0.05 * i as f64;
            for s in [5.0 + x, -7.0 - x] {
                let (a1, p1) = airy_series(s);
                let (a2, p2) = airy_asymptotic(s);
                assert!((a1 - a2).abs() < 1e-10, "Ai({s}): {a1} vs {a2}");
                assert!((p1 - p2).abs() < 1e-10, "Ai'({s}): {p1} vs {p2}");
            }
        }
    }

    #[test]
    fn asymptotic_leading_term_at_five() {
        let x: f64 = 5.0;
        let lead = (-(2.0 / 3.0) * x.powf(1.5)).exp() / (2.0 * PI.sqrt() * x.powf(0.25));
        let a = airy_ai(x).unwrap();
        assert!((a / lead - 1.0).abs() < 0.02);
    }

    #[test]
    fn satisfies_airy_equation() {
        let h = 2e-3;
        let mut x = -14.0;
        while x <= 14.0 {
            let f = |d: f64| airy_pair(x + d * h).0;
            let d2 = (-f(2.0) + 16.0 * f(1.0) - 30.0 * f(0.0) + 16.0 * f(-1.0) - f(-2.0)) / (12.0 * h * h);
            assert!((d2 - x * airy_pair(x).0).abs() < 1e-6, "x = {x}");
            x += 0.37;
        }
    }

    #[test]
    fn derivative_is_consistent() {
        for &x in &[-12.0, -6.5, -3.0, 0.4, 3.0, 7.5, 11.0] {
            let h = 1e-3;
            let f = |d: f64| airy_pair(x + d * h).0;
            let fd = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
            assert!((fd - airy_pair(x).1).abs() < 1e-8, "x = {x}");
        }
    }

    #[test]
    fn tail_integrals_differentiate_to_integrands() {
        for &l in &[-3.0, 0.0, 2.5, 6.0] {
            let h = 1e-4;
            let d = (airy_square_tails(l + h).0 - airy_square_tails(l - h).0) / (2.0 * h);
            let a = airy_pair(l).0;
            assert!((d + a * a).abs() < 1e-8);
            let d1 = (airy_square_tails(l + h).1 - airy_square_tails(l - h).1) / (2.0 * h);
            assert!((d1 + l * a * a).abs() < 1e-8);
        }
    }

    #[test]
    fn range_is_enforced() {
        assert!(airy_ai(15.5).is_err());
        assert!(airy_ai_prime(-16.0).is_err());
        assert!(airy_ai(-15.0).is_ok());
    }
}
