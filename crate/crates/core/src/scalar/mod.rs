//! Scalars: exact cyclotomic field elements and dyadic-rounded complex values.
//!
//! Exact mode works in Q(zeta_N) represented on the power basis modulo the
//! N-th cyclotomic polynomial, so equality and zero tests are canonical and
//! decidable. Approximate mode keeps complex numbers as dyadic rationals
//! rounded to a configured precision, compared against a global tolerance.

mod cyclotomic;
mod parse;

pub use cyclotomic::{euler_phi, gcd_u64, lcm_u64};

use crate::error::{Error, Result};
use cyclotomic::CycTable;
use num::bigint::{BigInt, Sign};
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

#[derive(Debug)]
enum FieldRepr {
    Exact(CycTable),
    Approx {
        precision: u32,
        /// squared tolerance; equality means |a-b|^2 < tol_sq
        tol_sq: BigRational,
        tolerance: BigRational,
    },
}

/// A scalar domain: either Q(zeta_N) or complex numbers at fixed precision.
#[derive(Clone, Debug)]
pub struct ScalarField {
    repr: Arc<FieldRepr>,
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.repr, &*other.repr) {
            (FieldRepr::Exact(a), FieldRepr::Exact(b)) => a.conductor == b.conductor,
            (
                FieldRepr::Approx { precision: p1, tolerance: t1, .. },
                FieldRepr::Approx { precision: p2, tolerance: t2, .. },
            ) => p1 == p2 && t1 == t2,
            _ => false,
        }
    }
}
impl Eq for ScalarField {}

impl ScalarField {
    /// Exact field Q(zeta_N).
    pub fn exact(conductor: u64) -> Result<ScalarField> {
        if conductor == 0 {
            return Err(Error::InvalidParams("conductor must be >= 1".into()));
        }
        Ok(ScalarField {
            repr: Arc::new(FieldRepr::Exact(CycTable::new(conductor))),
        })
    }

    /// The rationals, Q(zeta_1).
    pub fn rationals() -> ScalarField {
        ScalarField::exact(1).unwrap()
    }

    /// Approximate complex field. `tolerance = None` picks 2^(-precision/2).
    pub fn approx(precision: u32, tolerance: Option<BigRational>) -> Result<ScalarField> {
        let tol = match tolerance {
            Some(t) => {
                if t <= BigRational::zero() {
                    return Err(Error::InvalidParams("tolerance must be positive".into()));
                }
                t
            }
            None => {
                let d = BigInt::one() << (precision / 2) as usize;
                BigRational::new(BigInt::one(), d)
            }
        };
        Ok(ScalarField {
            repr: Arc::new(FieldRepr::Approx {
                precision,
                tol_sq: &tol * &tol,
                tolerance: tol,
            }),
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(&*self.repr, FieldRepr::Exact(_))
    }

    pub fn conductor(&self) -> Option<u64> {
        match &*self.repr {
            FieldRepr::Exact(t) => Some(t.conductor),
            _ => None,
        }
    }

    /// Degree of Q(zeta_N) over Q, i.e. phi(N); None in approx mode.
    pub fn degree(&self) -> Option<usize> {
        match &*self.repr {
            FieldRepr::Exact(t) => Some(t.degree),
            _ => None,
        }
    }

    pub fn tolerance(&self) -> Option<&BigRational> {
        match &*self.repr {
            FieldRepr::Approx { tolerance, .. } => Some(tolerance),
            _ => None,
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match &*self.repr {
            FieldRepr::Approx { precision, .. } => Some(*precision),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        match &*self.repr {
            FieldRepr::Exact(t) => Scalar {
                field: self.clone(),
                payload: Payload::Exact(CycElem::zero(t.degree)),
            },
            FieldRepr::Approx { .. } => Scalar {
                field: self.clone(),
                payload: Payload::Approx {
                    re: BigRational::zero(),
                    im: BigRational::zero(),
                },
            },
        }
    }

    pub fn one(&self) -> Scalar {
        self.integer(1)
    }

    pub fn integer(&self, v: i64) -> Scalar {
        self.from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(&self, p: i64, q: i64) -> Result<Scalar> {
        if q == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.from_rational(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    pub fn from_rational(&self, r: BigRational) -> Scalar {
        match &*self.repr {
            FieldRepr::Exact(t) => {
                let mut num = vec![BigInt::zero(); t.degree];
                num[0] = r.numer().clone();
                Scalar {
                    field: self.clone(),
                    payload: Payload::Exact(CycElem::normalized(num, r.denom().clone())),
                }
            }
            FieldRepr::Approx { .. } => {
                let re = self.round_rational(r);
                Scalar {
                    field: self.clone(),
                    payload: Payload::Approx {
                        re,
                        im: BigRational::zero(),
                    },
                }
            }
        }
    }

    /// Complex value from rational real and imaginary parts (approx mode only).
    pub fn complex(&self, re: BigRational, im: BigRational) -> Result<Scalar> {
        match &*self.repr {
            FieldRepr::Exact(_) => Err(Error::NotRepresentable(
                "free complex value in exact mode".into(),
            )),
            FieldRepr::Approx { .. } => Ok(Scalar {
                field: self.clone(),
                payload: Payload::Approx {
                    re: self.round_rational(re),
                    im: self.round_rational(im),
                },
            }),
        }
    }

    /// zeta_order^power with (result)^order == 1.
    pub fn root_of_unity(&self, order: u64, power: i64) -> Result<Scalar> {
        if order == 0 {
            return Err(Error::InvalidParams("root order must be positive".into()));
        }
        let p = power.rem_euclid(order as i64) as u64;
        match &*self.repr {
            FieldRepr::Exact(t) => {
                if t.conductor % order != 0 {
                    return Err(Error::ConductorMismatch {
                        order,
                        conductor: t.conductor,
                    });
                }
                let exp = (t.conductor / order) * p;
                let mut num = t.powers[exp as usize].clone();
                // powers table rows are already reduced
                if num.len() < t.degree {
                    num.resize(t.degree, BigInt::zero());
                }
                Ok(Scalar {
                    field: self.clone(),
                    payload: Payload::Exact(CycElem::normalized(num, BigInt::one())),
                })
            }
            FieldRepr::Approx { precision, .. } => {
                let theta = 2.0 * std::f64::consts::PI * (p as f64) / (order as f64);
                let seed = (theta.cos(), theta.sin());
                let (re, im) = newton_root_of_unity(order, seed, *precision);
                Ok(Scalar {
                    field: self.clone(),
                    payload: Payload::Approx {
                        re: self.round_rational(re),
                        im: self.round_rational(im),
                    },
                })
            }
        }
    }

    /// The imaginary unit.
    pub fn imaginary_unit(&self) -> Result<Scalar> {
        match &*self.repr {
            FieldRepr::Exact(_) => self.root_of_unity(4, 1),
            FieldRepr::Approx { .. } => {
                self.complex(BigRational::zero(), BigRational::one())
            }
        }
    }

    /// Parse a scalar literal (see the grammar in the crate docs).
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        parse::parse_scalar(self, text)
    }

    fn round_rational(&self, r: BigRational) -> BigRational {
        match &*self.repr {
            FieldRepr::Approx { precision, .. } => round_dyadic(&r, *precision),
            _ => r,
        }
    }

    fn table(&self) -> &CycTable {
        match &*self.repr {
            FieldRepr::Exact(t) => t,
            _ => panic!("exact-mode operation on approx field"),
        }
    }
}

/// Round to the nearest multiple of 2^-precision.
fn round_dyadic(r: &BigRational, precision: u32) -> BigRational {
    let denom: BigInt = BigInt::one() << precision as usize;
    // floor(r * 2^p + 1/2)
    let scaled = r * BigRational::from_integer(denom.clone());
    let twice = &scaled + BigRational::new(BigInt::one(), BigInt::from(2));
    BigRational::new(twice.floor().to_integer(), denom)
}

/// Newton refinement of a k-th root of unity from an f64 seed.
fn newton_root_of_unity(order: u64, seed: (f64, f64), precision: u32) -> (BigRational, BigRational) {
    let to_rat = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    let work = precision + 32;
    let mut re = round_dyadic(&to_rat(seed.0), work);
    let mut im = round_dyadic(&to_rat(seed.1), work);
    if order == 1 {
        return (BigRational::one(), BigRational::zero());
    }
    if order == 2 {
        return (-BigRational::one(), BigRational::zero());
    }
    let target_sq = BigRational::new(BigInt::one(), BigInt::one() << (2 * precision as usize + 16));
    for _ in 0..64 {
        // w = z^(order-1), f = z*w - 1, f' = order*w
        let (mut wr, mut wi) = (BigRational::one(), BigRational::zero());
        for _ in 0..order - 1 {
            let nr = &wr * &re - &wi * &im;
            let ni = &wr * &im + &wi * &re;
            wr = round_dyadic(&nr, work);
            wi = round_dyadic(&ni, work);
        }
        let fr = &wr * &re - &wi * &im - BigRational::one();
        let fi = &wr * &im + &wi * &re;
        let err = &fr * &fr + &fi * &fi;
        if err < target_sq {
            break;
        }
        let ord = BigRational::from_integer(BigInt::from(order));
        let dr = &ord * &wr;
        let di = &ord * &wi;
        let dnorm = &dr * &dr + &di * &di;
        // z -= f / f'
        let qr = (&fr * &dr + &fi * &di) / &dnorm;
        let qi = (&fi * &dr - &fr * &di) / &dnorm;
        re = round_dyadic(&(&re - &qr), work);
        im = round_dyadic(&(&im - &qi), work);
    }
    (re, im)
}

/// Exact element: (sum num[i] zeta^i) / den with den > 0 and content 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct CycElem {
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

impl CycElem {
    fn zero(degree: usize) -> CycElem {
        CycElem {
            num: vec![BigInt::zero(); degree],
            den: BigInt::one(),
        }
    }

    fn normalized(num: Vec<BigInt>, den: BigInt) -> CycElem {
        let mut e = CycElem { num, den };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.sign() == Sign::Minus {
            self.den = -self.den.clone();
            for c in &mut self.num {
                *c = -c.clone();
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if !c.is_zero() {
                g = num::Integer::gcd(&g, c);
            }
            if g.is_one() {
                return;
            }
        }
        if !g.is_one() {
            self.den = &self.den / &g;
            for c in &mut self.num {
                *c = &*c / &g;
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }
}

#[derive(Clone, Debug)]
enum Payload {
    Exact(CycElem),
    Approx { re: BigRational, im: BigRational },
}

/// An immutable field element.
#[derive(Clone, Debug)]
pub struct Scalar {
    field: ScalarField,
    payload: Payload,
}

impl Scalar {
    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Exact(e) => e.is_zero(),
            Payload::Approx { re, im } => {
                let n = re * re + im * im;
                match &*self.field.repr {
                    FieldRepr::Approx { tol_sq, .. } => n < *tol_sq,
                    _ => unreachable!(),
                }
            }
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.payload {
            Payload::Exact(e) => {
                e.den.is_one()
                    && e.num[0].is_one()
                    && e.num[1..].iter().all(|c| c.is_zero())
            }
            Payload::Approx { .. } => *self == self.field.one(),
        }
    }

    /// Exact rational value, if this scalar is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match &self.payload {
            Payload::Exact(e) => {
                if e.num[1..].iter().all(|c| c.is_zero()) {
                    Some(BigRational::new(e.num[0].clone(), e.den.clone()))
                } else {
                    None
                }
            }
            Payload::Approx { re, im } => {
                if im.is_zero() {
                    Some(re.clone())
                } else {
                    None
                }
            }
        }
    }

    fn assert_same_field(&self, other: &Scalar) {
        assert!(
            self.field == other.field,
            "scalars belong to different fields"
        );
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.payload {
            Payload::Exact(e) => {
                let t = self.field.table();
                let inv = exact_inverse(e, t);
                Ok(Scalar {
                    field: self.field.clone(),
                    payload: Payload::Exact(inv),
                })
            }
            Payload::Approx { re, im } => {
                let n = re * re + im * im;
                let r = self.field.round_rational(re / &n);
                let i = self.field.round_rational(-(im / &n));
                Ok(Scalar {
                    field: self.field.clone(),
                    payload: Payload::Approx { re: r, im: i },
                })
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.assert_same_field(other);
        Ok(self * &other.inv()?)
    }

    /// Integer power; negative exponents require an invertible base.
    pub fn pow(&self, exp: i64) -> Result<Scalar> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = self.field.one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplicative order when this scalar is a root of unity.
    ///
    /// Exact mode: the roots of unity in Q(zeta_N) have order dividing
    /// lcm(2, N), so only those exponents are tried. Approx mode probes
    /// up to `limit`.
    pub fn root_of_unity_order(&self, limit: u64) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let bound = match &*self.field.repr {
            FieldRepr::Exact(t) => lcm_u64(2, t.conductor),
            FieldRepr::Approx { .. } => limit,
        };
        let one = self.field.one();
        let mut p = self.clone();
        for j in 1..=bound {
            if p == one {
                return Some(j);
            }
            p = &p * self;
        }
        None
    }

    /// Lossy complex approximation, used only for Newton seeds.
    pub fn to_f64_complex(&self) -> (f64, f64) {
        use num::ToPrimitive;
        match &self.payload {
            Payload::Approx { re, im } => (
                re.to_f64().unwrap_or(f64::NAN),
                im.to_f64().unwrap_or(f64::NAN),
            ),
            Payload::Exact(e) => {
                let n = self.field.table().conductor;
                let den = e.den.to_f64().unwrap_or(f64::NAN);
                let mut re = 0.0;
                let mut im = 0.0;
                for (i, c) in e.num.iter().enumerate() {
                    let cf = c.to_f64().unwrap_or(f64::NAN) / den;
                    let ang = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    re += cf * ang.cos();
                    im += cf * ang.sin();
                }
                (re, im)
            }
        }
    }

    /// Literal rendering that `ScalarField::parse` accepts back.
    pub fn render(&self) -> String {
        match &self.payload {
            Payload::Exact(e) => render_exact(e, self.field.table().conductor),
            Payload::Approx { re, im } => render_approx(re, im),
        }
    }
}

fn exact_inverse(e: &CycElem, t: &CycTable) -> CycElem {
    // extended Euclid in Q[x] against Phi_N
    let phi: Vec<BigRational> = t
        .phi
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let a: Vec<BigRational> = e
        .num
        .iter()
        .map(|c| BigRational::new(c.clone(), e.den.clone()))
        .collect();
    let (mut r0, mut r1) = (phi, trim(a));
    let mut t0: Vec<BigRational> = vec![];
    let mut t1: Vec<BigRational> = vec![BigRational::one()];
    while poly_deg(&r1) > 0 {
        let (q, r) = poly_divmod(&r0, &r1);
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1));
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = t2;
    }
    assert!(!r1.is_empty(), "inverse of zero");
    let c = r1[0].clone();
    let mut inv_num = vec![BigInt::zero(); t.degree];
    let mut den = BigInt::one();
    // t1 / c, cleared to a common denominator
    let coeffs: Vec<BigRational> = t1.iter().map(|x| x / &c).collect();
    for x in &coeffs {
        den = num::Integer::lcm(&den, x.denom());
    }
    for (i, x) in coeffs.iter().enumerate() {
        if i < t.degree {
            inv_num[i] = x.numer() * (&den / x.denom());
        }
    }
    CycElem::normalized(inv_num, den)
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.len() > 1 && v.last().map(|c| c.is_zero()) == Some(true) {
        v.pop();
    }
    v
}

fn poly_deg(v: &[BigRational]) -> usize {
    let mut d = 0;
    for (i, c) in v.iter().enumerate() {
        if !c.is_zero() {
            d = i;
        }
    }
    d
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    trim(out)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![BigRational::zero()];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(out)
}

fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let dd = poly_deg(den);
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    let nd = poly_deg(&rem);
    if nd < dd {
        return (vec![BigRational::zero()], trim(rem));
    }
    let mut quot = vec![BigRational::zero(); nd - dd + 1];
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
    (trim(quot), trim(rem))
}

fn render_coeff(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn render_exact(e: &CycElem, conductor: u64) -> String {
    let mut terms: Vec<(usize, BigRational)> = vec![];
    for (i, c) in e.num.iter().enumerate() {
        if !c.is_zero() {
            terms.push((i, BigRational::new(c.clone(), e.den.clone())));
        }
    }
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (pos, (i, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if pos == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let body = if *i == 0 {
            render_coeff(&a)
        } else {
            let z = if *i == 1 {
                format!("zeta({})", conductor)
            } else {
                format!("zeta({})^{}", conductor, i)
            };
            if a.is_one() {
                z
            } else {
                format!("{}*{}", render_coeff(&a), z)
            }
        };
        out.push_str(&body);
    }
    out
}

fn render_approx(re: &BigRational, im: &BigRational) -> String {
    if im.is_zero() {
        return render_coeff(re);
    }
    let im_part = if im.abs().is_one() {
        "i".to_string()
    } else {
        format!("{}*i", render_coeff(&im.abs()))
    };
    if re.is_zero() {
        if im.is_negative() {
            format!("-{}", im_part)
        } else {
            im_part
        }
    } else if im.is_negative() {
        format!("{} - {}", render_coeff(re), im_part)
    } else {
        format!("{} + {}", render_coeff(re), im_part)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.field != other.field {
            return false;
        }
        match (&self.payload, &other.payload) {
            (Payload::Exact(a), Payload::Exact(b)) => a == b,
            (Payload::Approx { re: r1, im: i1 }, Payload::Approx { re: r2, im: i2 }) => {
                let dr = r1 - r2;
                let di = i1 - i2;
                let n = &dr * &dr + &di * &di;
                match &*self.field.repr {
                    FieldRepr::Approx { tol_sq, .. } => n < *tol_sq,
                    _ => unreachable!(),
                }
            }
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar::$method(self, rhs)
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar::$method(&self, &rhs)
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.payload {
            Payload::Exact(e) => Scalar {
                field: self.field.clone(),
                payload: Payload::Exact(CycElem {
                    num: e.num.iter().map(|c| -c.clone()).collect(),
                    den: e.den.clone(),
                }),
            },
            Payload::Approx { re, im } => Scalar {
                field: self.field.clone(),
                payload: Payload::Approx {
                    re: -re.clone(),
                    im: -im.clone(),
                },
            },
        }
    }
}
impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Scalar {
    fn add(a: &Scalar, b: &Scalar) -> Scalar {
        a.assert_same_field(b);
        match (&a.payload, &b.payload) {
            (Payload::Exact(x), Payload::Exact(y)) => {
                let g = num::Integer::gcd(&x.den, &y.den);
                let den = &x.den / &g * &y.den;
                let mx = &y.den / &g;
                let my = &x.den / &g;
                let num = x
                    .num
                    .iter()
                    .zip(y.num.iter())
                    .map(|(p, q)| p * &mx + q * &my)
                    .collect();
                Scalar {
                    field: a.field.clone(),
                    payload: Payload::Exact(CycElem::normalized(num, den)),
                }
            }
            (Payload::Approx { re: r1, im: i1 }, Payload::Approx { re: r2, im: i2 }) => Scalar {
                field: a.field.clone(),
                payload: Payload::Approx {
                    re: a.field.round_rational(r1 + r2),
                    im: a.field.round_rational(i1 + i2),
                },
            },
            _ => unreachable!("mixed payloads in one field"),
        }
    }

    fn sub(a: &Scalar, b: &Scalar) -> Scalar {
        Scalar::add(a, &-b)
    }

    fn mul(a: &Scalar, b: &Scalar) -> Scalar {
        a.assert_same_field(b);
        match (&a.payload, &b.payload) {
            (Payload::Exact(x), Payload::Exact(y)) => {
                if x.is_zero() || y.is_zero() {
                    return a.field.zero();
                }
                let t = a.field.table();
                let d = t.degree;
                let mut conv = vec![BigInt::zero(); 2 * d - 1];
                for (i, p) in x.num.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    for (j, q) in y.num.iter().enumerate() {
                        if !q.is_zero() {
                            conv[i + j] += p * q;
                        }
                    }
                }
                let num = t.reduce(&conv);
                Scalar {
                    field: a.field.clone(),
                    payload: Payload::Exact(CycElem::normalized(num, &x.den * &y.den)),
                }
            }
            (Payload::Approx { re: r1, im: i1 }, Payload::Approx { re: r2, im: i2 }) => {
                let re = r1 * r2 - i1 * i2;
                let im = r1 * i2 + i1 * r2;
                Scalar {
                    field: a.field.clone(),
                    payload: Payload::Approx {
                        re: a.field.round_rational(re),
                        im: a.field.round_rational(im),
                    },
                }
            }
            _ => unreachable!("mixed payloads in one field"),
        }
    }
}

/// The four field operations as a single dispatchable op, mirroring the
/// external contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arithmetic(a: &Scalar, b: &Scalar, op: FieldOp) -> Result<Scalar> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    match op {
        FieldOp::Add => Ok(a + b),
        FieldOp::Sub => Ok(a - b),
        FieldOp::Mul => Ok(a * b),
        FieldOp::Div => a.div(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q5() -> ScalarField {
        ScalarField::exact(5).unwrap()
    }

    #[test]
    fn zeta_sum_is_minus_one() {
        let f = ScalarField::exact(3).unwrap();
        let z = f.root_of_unity(3, 1).unwrap();
        let z2 = f.root_of_unity(3, 2).unwrap();
        assert_eq!(&z + &z2, f.integer(-1));
    }

    #[test]
    fn division_identity() {
        let f = q5();
        let v = &f.one() + &f.root_of_unity(5, 1).unwrap();
        assert_eq!(v.div(&v).unwrap(), f.one());
    }

    #[test]
    fn zeta5_times_zeta5_pow4() {
        let f = q5();
        let z = f.root_of_unity(5, 1).unwrap();
        let z4 = f.root_of_unity(5, 4).unwrap();
        assert_eq!(&z * &z4, f.one());
    }

    #[test]
    fn root_of_unity_powers() {
        // (N=6, order=3, power=2) -> zeta_3^2, cube is 1
        let f = ScalarField::exact(6).unwrap();
        let z = f.root_of_unity(3, 2).unwrap();
        assert_eq!(z.pow(3).unwrap(), f.one());
        assert_ne!(z, f.one());
        // identity case
        assert_eq!(f.root_of_unity(1, 0).unwrap(), f.one());
        for d in [1u64, 2, 3, 6] {
            for j in 0..d {
                let w = f.root_of_unity(d, j as i64).unwrap();
                assert_eq!(w.pow(d as i64).unwrap(), f.one());
            }
        }
    }

    #[test]
    fn conductor_mismatch() {
        let f = q5();
        assert!(matches!(
            f.root_of_unity(12, 1),
            Err(Error::ConductorMismatch { .. })
        ));
    }

    #[test]
    fn inverse_of_cyclotomic_element() {
        let f = ScalarField::exact(12).unwrap();
        let z = f.root_of_unity(12, 1).unwrap();
        let v = &(&f.integer(3) * &z) + &f.rational(1, 2).unwrap();
        let w = v.inv().unwrap();
        assert_eq!(&v * &w, f.one());
    }

    #[test]
    fn order_detection() {
        let f = ScalarField::exact(10).unwrap();
        let z = f.root_of_unity(10, 3).unwrap();
        assert_eq!(z.root_of_unity_order(100), Some(10));
        assert_eq!(f.integer(-1).root_of_unity_order(100), Some(2));
        assert_eq!(f.integer(2).root_of_unity_order(100), None);
    }

    #[test]
    fn approx_roundtrip_arithmetic() {
        let f = ScalarField::approx(96, None).unwrap();
        let z = f.root_of_unity(7, 1).unwrap();
        assert_eq!(z.pow(7).unwrap(), f.one());
        let i = f.imaginary_unit().unwrap();
        assert_eq!(&i * &i, f.integer(-1));
        let x = f.rational(3, 7).unwrap();
        assert_eq!(x.div(&x).unwrap(), f.one());
    }

    #[test]
    fn render_parse_roundtrip_samples() {
        let f = ScalarField::exact(12).unwrap();
        let z = f.root_of_unity(12, 7).unwrap();
        let v = &(&f.rational(-3, 2).unwrap() * &z) + &f.rational(5, 7).unwrap();
        let s = v.render();
        assert_eq!(f.parse(&s).unwrap(), v);
    }
}
