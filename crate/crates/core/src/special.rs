//! Legendre polynomials and spherical Bessel functions.

use crate::error::{Result, SolverError};
use crate::grid::C64;

/// Highest Legendre order for which the monomial coefficient table is built;
/// coefficients grow like `(1+√2)^n` and overflow `f64` eventually.
pub const LEGENDRE_COEFF_MAX: usize = 200;

/// `P_n(z)` by the three-term recurrence. `z` is clamped into `[-1, 1]`.
pub fn legendre_p(n: usize, z: f64) -> f64 {
    let z = z.clamp(-1.0, 1.0);
    let mut p_prev = 1.0;
    if n == 0 {
        return p_prev;
    }
    let mut p = z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * z * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    p
}

/// Monomial coefficients `l_{k,n}` with `P_n(z) = Σ_k l_{k,n} z^k`.
/// Row `n` of the result has length `n + 1`; entries of opposite parity
/// to `n` are exactly zero.
pub fn legendre_coeff_table(n_max: usize) -> Result<Vec<Vec<f64>>> {
    if n_max > LEGENDRE_COEFF_MAX {
        return Err(SolverError::LegendreOrderTooLarge {
            n: n_max,
            max: LEGENDRE_COEFF_MAX,
        });
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![1.0]);
    if n_max == 0 {
        return Ok(rows);
    }
    rows.push(vec![0.0, 1.0]);
    for n in 1..n_max {
        let nf = n as f64;
        let mut next = vec![0.0; n + 2];
        for k in 0..=n {
            next[k + 1] += (2.0 * nf + 1.0) * rows[n][k] / (nf + 1.0);
        }
        for k in 0..n {
            next[k] -= nf * rows[n - 1][k] / (nf + 1.0);
        }
        rows.push(next);
    }
    Ok(rows)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_p_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_p_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_p_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Spherical Bessel function `j_n(z)` of the first kind for complex `z`.
///
/// Strategy: ascending series for small `|z|`, upward recurrence in the
/// oscillatory regime `n ≤ |z|`, downward (Miller) recurrence otherwise.
/// Upward recurrence above the turning point amplifies the admixture of the
/// second solution, which is why the downward pass takes over there.
pub fn spherical_jn(n: usize, z: C64) -> C64 {
    spherical_jn_all(n, z)[n]
}

/// All orders `j_0(z) .. j_{n_max}(z)` in one pass.
pub fn spherical_jn_all(n_max: usize, z: C64) -> Vec<C64> {
    let az = z.norm();
    if az <= 0.5 {
        (0..=n_max).map(|n| jn_series(n, z)).collect()
    } else if (n_max as f64) <= az {
        jn_upward(n_max, z)
    } else {
        jn_downward(n_max, z)
    }
}

/// Ascending power series `j_n(z) = z^n/(2n+1)!! Σ_k (-z²/2)^k / (k! (2n+2k+1)!!)`.
pub(crate) fn jn_series(n: usize, z: C64) -> C64 {
    let mut lead = C64::new(1.0, 0.0);
    for i in 1..=n {
        lead *= z / (2.0 * i as f64 + 1.0);
        if lead.norm() == 0.0 {
            return lead;
        }
    }
    let half_z2 = -z * z * 0.5;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..400 {
        term *= half_z2 / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

pub(crate) fn jn_upward(n_max: usize, z: C64) -> Vec<C64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let j0 = z.sin() / z;
    out.push(j0);
    if n_max == 0 {
        return out;
    }
    let j1 = z.sin() / (z * z) - z.cos() / z;
    out.push(j1);
    for n in 1..n_max {
        let next = out[n] * ((2 * n + 1) as f64) / z - out[n - 1];
        out.push(next);
    }
    out
}

pub(crate) fn jn_downward(n_max: usize, z: C64) -> Vec<C64> {
    let base = 24 + (3.0 * ((2 * n_max + 2) as f64).sqrt()).ceil() as usize;
    let mut margin = base;
    let mut prev: Option<Vec<C64>> = None;
    for _ in 0..6 {
        let cur = miller_pass(n_max, z, n_max + margin);
        if let Some(p) = &prev {
            let a = p[n_max].norm();
            let b = cur[n_max].norm();
            let diff = (p[n_max] - cur[n_max]).norm();
            if diff <= 1e-13 * a.max(b) || a.max(b) < 1e-290 {
                return cur;
            }
        }
        prev = Some(cur);
        margin *= 2;
    }
    prev.unwrap()
}

fn miller_pass(n_max: usize, z: C64, start: usize) -> Vec<C64> {
    let mut buf = vec![C64::new(0.0, 0.0); start + 2];
    buf[start + 1] = C64::new(0.0, 0.0);
    buf[start] = C64::new(1e-30, 0.0);
    for k in (1..=start).rev() {
        let val = buf[k] * ((2 * k + 1) as f64) / z - buf[k + 1];
        buf[k - 1] = val;
        if val.norm() > 1e250 {
            for v in buf[k - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    // bring the buffer to O(1) with a real factor first: the complex
    // division below would overflow its |denominator|² for entries beyond
    // about 1e154
    let magnitude = buf[0].norm().max(buf[1].norm());
    if magnitude > 0.0 {
        let inv = 1.0 / magnitude;
        for v in buf.iter_mut() {
            *v *= inv;
        }
    }
    let s0 = z.sin() / z;
    let s1 = z.sin() / (z * z) - z.cos() / z;
    let scale = if s0.norm() >= 0.1 * s1.norm() {
        s0 / buf[0]
    } else {
        s1 / buf[1]
    };
    buf.truncate(n_max + 1);
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridFn};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn p0_is_one_and_pn_at_one_is_one() {
        assert_eq!(legendre_p(0, 0.3), 1.0);
        assert_eq!(legendre_p(2, 1.0), 1.0);
        assert_eq!(legendre_p(17, 1.0), 1.0);
    }

    #[test]
    fn p5_matches_explicit_polynomial() {
        // P5(z) = (63 z^5 - 70 z^3 + 15 z)/8 evaluated at 0.5
        let z: f64 = 0.5;
        let exact = (63.0 * z.powi(5) - 70.0 * z.powi(3) + 15.0 * z) / 8.0;
        assert!((legendre_p(5, 0.5) - exact).abs() < 1e-15);
        assert!((legendre_p(5, 0.5) - 0.08984375).abs() < 1e-15);
    }

    #[test]
    fn coefficient_table_rows() {
        let table = legendre_coeff_table(4).unwrap();
        assert_eq!(table[0], vec![1.0]);
        assert_eq!(table[2], vec![-0.5, 0.0, 1.5]);
        // parity: opposite-parity entries vanish
        for (n, row) in table.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if (n + k) % 2 == 1 {
                    assert_eq!(v, 0.0, "l_{{{k},{n}}} should vanish");
                }
            }
        }
        assert!(matches!(
            legendre_coeff_table(201),
            Err(SolverError::LegendreOrderTooLarge { .. })
        ));
    }

    #[test]
    fn orthogonality_under_the_composite_rule() {
        // ∫_{-1}^{1} P_n P_m = δ_nm 2/(2n+1), checked with the grid quadrature
        let grid = Grid::uniform(2.0, 20000).unwrap();
        for n in 0..=20usize {
            for m in n..=20usize {
                let f = GridFn::from_real_fn(grid.clone(), |u| {
                    legendre_p(n, u - 1.0) * legendre_p(m, u - 1.0)
                });
                let val = f.integral().unwrap().re;
                if n == m {
                    let exact = 2.0 / (2.0 * n as f64 + 1.0);
                    assert!((val - exact).abs() <= 1e-8, "norm failure at n = {n}");
                } else {
                    assert!(val.abs() <= 1e-8, "orthogonality failure at ({n},{m})");
                }
            }
        }
    }

    #[test]
    fn j0_limit_and_zero() {
        assert!((spherical_jn(0, c(0.0)) - c(1.0)).norm() < 1e-15);
        assert!(spherical_jn(0, c(std::f64::consts::PI)).norm() < 1e-15);
        // j_n(0) = 0 for n >= 1, no division by zero
        assert_eq!(spherical_jn(4, c(0.0)), c(0.0));
    }

    // independent ascending-series oracle, kept deliberately naive
    fn series_oracle(n: usize, z: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..60 {
            let mut t = 1.0;
            for i in 1..=k {
                t *= -z * z / 2.0 / i as f64;
            }
            let mut dfact = 1.0;
            let mut i = 2 * n + 2 * k + 1;
            while i > 1 {
                dfact *= i as f64;
                i -= 2;
            }
            sum += t / dfact;
        }
        sum * z.powi(n as i32)
    }

    #[test]
    fn j3_matches_series_oracle() {
        let expected = series_oracle(3, 2.5);
        let got = spherical_jn(3, c(2.5)).re;
        assert!(
            (got - expected).abs() <= 1e-12 * expected.abs(),
            "got {got}, oracle {expected}"
        );
    }

    #[test]
    fn upward_and_downward_agree_in_joint_region() {
        for &z in &[8.0, 15.0, 40.0] {
            let zc = c(z);
            let n = z as usize - 2; // both strategies valid below the turning point
            let up = jn_upward(n, zc);
            let down = jn_downward(n, zc);
            for k in 0..=n {
                let scale = up[k].norm().max(down[k].norm()).max(1e-30);
                assert!(
                    (up[k] - down[k]).norm() / scale <= 1e-10,
                    "disagreement at n={k}, z={z}"
                );
            }
        }
    }

    #[test]
    fn accuracy_against_oracle_across_regimes() {
        // spans series, upward and Miller branches
        for &(n, z) in &[
            (0usize, 0.3),
            (2, 0.49),
            (5, 1.0),
            (10, 3.0),
            (25, 10.0),
            (60, 30.0),
            (4, 100.0),
        ] {
            let got = spherical_jn(n, c(z)).re;
            // the naive series is reliable when n >= z (no cancellation);
            // below the turning point the upward closed-form pass is stable
            let expected = if n as f64 >= z {
                series_oracle(n, z)
            } else {
                let mut a = z.sin() / z;
                let mut b = z.sin() / (z * z) - z.cos() / z;
                for k in 1..n {
                    let next = (2.0 * k as f64 + 1.0) / z * b - a;
                    a = b;
                    b = next;
                }
                if n == 0 {
                    a
                } else {
                    b
                }
            };
            let tol = 1e-12 * expected.abs().max(1e-14);
            assert!(
                (got - expected).abs() <= tol,
                "n={n}, z={z}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn complex_argument_miller_is_finite_and_consistent() {
        let z = C64::new(6.0, 0.8);
        let down = jn_downward(12, z);
        let up = jn_upward(5, z);
        for k in 0..=5 {
            let scale = up[k].norm().max(1e-30);
            assert!((up[k] - down[k]).norm() / scale <= 1e-10);
        }
    }

    #[test]
    fn gauss_legendre_integrates_high_degree_exactly() {
        let (nodes, weights) = gauss_legendre(16);
        // degree 31 monomial on [-1,1]
        let val: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x.powi(30))
            .sum();
        assert!((val - 2.0 / 31.0).abs() < 1e-14);
        let odd: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x.powi(31))
            .sum();
        assert!(odd.abs() < 1e-14);
    }
}
