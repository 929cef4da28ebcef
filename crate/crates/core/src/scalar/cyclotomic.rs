//! Integer cyclotomic polynomials and reduction tables for the power basis
//! of Q(zeta_N) modulo Phi_N.

use num::bigint::BigInt;
use num::traits::{One, Zero};

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Exact division of integer polynomials, assuming the division is exact and
/// the divisor is monic up to sign of its leading coefficient (+-1).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    assert!(nd >= dd);
    let lead = den[dd].clone();
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = &rem[i + dd] / &lead;
        if !c.is_zero() {
            for j in 0..=dd {
                let t = &den[j] * &c;
                rem[i + j] -= t;
            }
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// Coefficients of the N-th cyclotomic polynomial, constant term first.
pub fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d of n
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            poly = poly_div_exact(&poly, &phi_d);
        }
    }
    poly
}

/// Precomputed data for one conductor.
#[derive(Debug)]
pub struct CycTable {
    pub conductor: u64,
    pub degree: usize,
    /// Phi_N, monic, length degree + 1, constant term first.
    pub phi: Vec<BigInt>,
    /// x^t mod Phi_N for t = 0 .. max(N, 2*degree - 1), each of length `degree`.
    pub powers: Vec<Vec<BigInt>>,
}

impl CycTable {
    pub fn new(conductor: u64) -> CycTable {
        assert!(conductor >= 1);
        let phi = cyclotomic_poly(conductor);
        let degree = phi.len() - 1;
        let max_pow = std::cmp::max(conductor as usize, 2 * degree).max(1);
        let mut powers: Vec<Vec<BigInt>> = Vec::with_capacity(max_pow);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        powers.push(cur.clone());
        for _ in 1..max_pow {
            // multiply by x, reduce the overflow term with x^degree = -(phi_0 + ... )
            let top = cur[degree - 1].clone();
            for i in (1..degree).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !top.is_zero() {
                for i in 0..degree {
                    let t = &phi[i] * &top;
                    cur[i] -= t;
                }
            }
            powers.push(cur.clone());
        }
        CycTable {
            conductor,
            degree,
            phi,
            powers,
        }
    }

    /// Reduce a coefficient vector of any length modulo Phi_N.
    pub fn reduce(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.degree];
        for (t, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if t < self.degree {
                out[t] += c;
            } else {
                let row = &self.powers[t];
                for i in 0..self.degree {
                    let v = &row[i] * c;
                    out[i] += v;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_poly(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(5), ints(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic_poly(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_poly(12), ints(&[1, 0, -1, 0, 1]));
        // Phi_105 famously has a coefficient -2
        let p105 = cyclotomic_poly(105);
        assert_eq!(p105.len() as u64 - 1, euler_phi(105));
        assert!(p105.iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(30), 8);
    }

    #[test]
    fn power_table_wraps() {
        let t = CycTable::new(6);
        // zeta_6^3 = -1
        let mut want = vec![BigInt::zero(); 2];
        want[0] = BigInt::from(-1);
        assert_eq!(t.powers[3], want);
        // zeta_6^6 = 1
        let mut one = vec![BigInt::zero(); 2];
        one[0] = BigInt::one();
        assert_eq!(t.reduce(&{
            let mut v = vec![BigInt::zero(); 7];
            v[6] = BigInt::one();
            v
        }), one);
    }
}
