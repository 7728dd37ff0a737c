//! Entropy of linear automorphisms of the n-torus, `Σ (ln|Λ_i|)_+`.

use nalgebra::Complex;

use crate::error::{domain, validation, Error, Result};

/// Largest supported torus dimension.
pub const MAX_TORUS_DIM: usize = 4;

type C64 = Complex<f64>;

/// Coefficients `[c_0, c_1, ..., c_n = 1]` of `det(λI - M)`, computed exactly
/// with the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(m: &[Vec<i64>]) -> Result<Vec<i128>> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(validation("matrix must be square and non-empty"));
    }
    let a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut coeffs = vec![0i128; n + 1];
    coeffs[n] = 1;
    // M_0 = 0; M_k = A M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A M_k) / k
    let mut mk = vec![vec![0i128; n]; n];
    for k in 1..=n {
        let prev = mk;
        mk = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut s: i128 = (0..n).map(|l| a[i][l] * prev[l][j]).sum();
                        if i == j {
                            s += coeffs[n - k + 1];
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let tr: i128 = (0..n)
            .map(|i| (0..n).map(|l| a[i][l] * mk[l][i]).sum::<i128>())
            .sum();
        debug_assert_eq!(tr % k as i128, 0);
        coeffs[n - k] = -tr / k as i128;
    }
    Ok(coeffs)
}

fn eval(coeffs: &[f64], z: C64) -> (C64, C64) {
    // Horner for p and p'
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of a monic polynomial by Aberth–Ehrlich iteration.
fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<C64>> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            C64::from_polar(
                radius,
                0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    Ok(z)
}

fn trim(mut p: Vec<i128>) -> Vec<i128> {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    p
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Divides out the content and makes the leading coefficient positive.
fn primitive(p: Vec<i128>) -> Vec<i128> {
    let p = trim(p);
    let c = p.iter().fold(0, |g, &x| gcd(g, x));
    if c == 0 {
        return p;
    }
    let sign = if *p.last().unwrap() < 0 { -1 } else { 1 };
    p.into_iter().map(|x| sign * x / c).collect()
}

fn is_zero(p: &[i128]) -> bool {
    p.iter().all(|&c| c == 0)
}

/// `lc(b)^k · a mod b`, coefficients lowest degree first.
fn pseudo_remainder(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db];
    while r.len() > db && !is_zero(&r) {
        let dr = r.len() - 1;
        let lr = r[dr];
        r = r.iter().map(|&x| x * lb).collect();
        for (i, &bi) in b.iter().enumerate() {
            r[dr - db + i] -= lr * bi;
        }
        // the leading term cancels, so the degree drops
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[i128], b: &[i128]) -> Vec<i128> {
    let (mut a, mut b) = (primitive(a.to_vec()), primitive(b.to_vec()));
    while !is_zero(&b) {
        let r = if b.len() == 1 {
            vec![0]
        } else {
            primitive(pseudo_remainder(&a, &b))
        };
        a = b;
        b = r;
    }
    a
}

/// Exact quotient `a / b` of integer polynomials known to divide.
fn exact_quotient(a: &[i128], b: &[i128]) -> Vec<i128> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i128; a.len() - db];
    for k in (0..q.len()).rev() {
        let lead = r[k + db];
        debug_assert_eq!(lead % b[db], 0);
        q[k] = lead / b[db];
        for (i, &bi) in b.iter().enumerate() {
            r[k + i] -= q[k] * bi;
        }
    }
    debug_assert!(is_zero(&r));
    q
}

/// `Σ (ln|r|)_+` over the roots of `p`, multiplicities counted. Splits `p`
/// into its square-free part `p / gcd(p, p')`, whose roots are simple and
/// therefore well conditioned, and the remainder `gcd(p, p')`, which carries
/// the repeated roots with one multiplicity less.
fn expanding_log_sum(p: &[i128]) -> Result<f64> {
    let p = primitive(p.to_vec());
    if p.len() <= 1 {
        return Ok(0.0);
    }
    let derivative: Vec<i128> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as i128 * c)
        .collect();
    let g = poly_gcd(&p, &derivative);
    let square_free = exact_quotient(&p, &g);
    let lead = *square_free.last().unwrap() as f64;
    let monic: Vec<f64> = square_free.iter().map(|&c| c as f64 / lead).collect();
    let h: f64 = polynomial_roots(&monic)?
        .iter()
        .map(|z| z.norm().ln())
        // moduli within rounding of 1 contribute nothing
        .filter(|&l| l > 1e-12)
        .sum();
    Ok(h + expanding_log_sum(&g)?)
}

/// `Σ_i (ln|Λ_i|)_+` over the eigenvalues of an integer matrix with `|det M| = 1`.
pub fn toral_automorphism_entropy(m: &[Vec<i64>]) -> Result<f64> {
    let n = m.len();
    if n > MAX_TORUS_DIM {
        return Err(Error::Unsupported(format!(
            "torus dimension {n} exceeds {MAX_TORUS_DIM}"
        )));
    }
    let coeffs = characteristic_polynomial(m)?;
    let det = if n.is_multiple_of(2) {
        coeffs[0]
    } else {
        -coeffs[0]
    };
    if det.abs() != 1 {
        return Err(domain(format!(
            "|det M| must be 1 for a toral automorphism, got {det}"
        )));
    }
    expanding_log_sum(&coeffs)
}
