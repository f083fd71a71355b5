//! Independent oracles shared by the integration tests. These use plain
//! coefficient vectors and share no code with the library's series type.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Univariate series as a coefficient vector of length `order + 1`.
pub type Poly = Vec<BigRational>;

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().min(b.len());
    let mut out = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += &a[i] * &b[j];
        }
    }
    out
}

/// `1/a` by the recursion `b_k = -(a_1 b_{k-1} + ... + a_k b_0) / a_0`.
pub fn poly_inv(a: &Poly) -> Poly {
    let mut b = vec![BigRational::zero(); a.len()];
    b[0] = BigRational::one() / &a[0];
    for k in 1..a.len() {
        let mut s = BigRational::zero();
        for j in 1..=k {
            s += &a[j] * &b[k - j];
        }
        b[k] = -s / &a[0];
    }
    b
}

pub fn poly_pow(a: &Poly, e: u32) -> Poly {
    let mut out = vec![BigRational::zero(); a.len()];
    out[0] = BigRational::one();
    for _ in 0..e {
        out = poly_mul(&out, a);
    }
    out
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// `z / (1 - e^{-z})` to the given order.
pub fn todd_tangential(order: usize) -> Poly {
    // (1 - e^{-z})/z = sum_k (-1)^k z^k / (k+1)!
    let normal: Poly = (0..=order)
        .map(|k| {
            let s = if k % 2 == 0 { 1 } else { -1 };
            BigRational::new(s.into(), factorial(k as u32 + 1))
        })
        .collect();
    poly_inv(&normal)
}

/// `z / tanh z` to the given order.
pub fn l_tangential(order: usize) -> Poly {
    // cosh z and sinh z / z as plain Taylor vectors
    let cosh: Poly = (0..=order)
        .map(|k| if k % 2 == 0 { BigRational::new(1.into(), factorial(k as u32)) } else { BigRational::zero() })
        .collect();
    let sinhc: Poly = (0..=order)
        .map(|k| if k % 2 == 0 { BigRational::new(1.into(), factorial(k as u32 + 1)) } else { BigRational::zero() })
        .collect();
    poly_mul(&cosh, &poly_inv(&sinhc))
}

/// `(z/2) / sinh(z/2)` to the given order.
pub fn a_hat_tangential(order: usize) -> Poly {
    let sinhc: Poly = (0..=order)
        .map(|k| {
            if k % 2 == 0 {
                BigRational::new(1.into(), factorial(k as u32 + 1) * BigInt::from(2).pow(k as u32))
            } else {
                BigRational::zero()
            }
        })
        .collect();
    poly_inv(&sinhc)
}

/// `[z^n] Q(z)^{n+1}` for a tangential series `Q`.
pub fn cpn_from_tangential(tangential: &Poly, n: usize) -> BigRational {
    poly_pow(&tangential[..=n].to_vec(), n as u32 + 1)[n].clone()
}

/// Generalized binomial coefficient `binom(a, k)` for rational `a`.
pub fn binom(a: &BigRational, k: u32) -> BigRational {
    let mut out = BigRational::one();
    for i in 0..k {
        out = out * (a - BigRational::from_integer(i.into())) / BigRational::from_integer((i + 1).into());
    }
    out
}
