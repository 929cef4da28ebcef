//! Pseudo-reflection tuples on the punctured sphere: the explicit
//! multiplicity-one builder, the defining kernel condition, and the shape
//! check for the monodromy at infinity.

use crate::error::{Error, Result};
use crate::linalg::{joint_kernel, SquareMatrix};
use crate::report::Report;
use crate::scalar::{Scalar, ScalarField};

/// Numerical data (lambda_1..lambda_n; eta_1, eta_2) for a sphere tuple.
#[derive(Clone, Debug)]
pub struct SphereLocalData {
    pub lambdas: Vec<Scalar>,
    pub eta1: Scalar,
    pub eta2: Scalar,
}

impl SphereLocalData {
    pub fn new(lambdas: Vec<Scalar>, eta1: Scalar, eta2: Scalar) -> Result<SphereLocalData> {
        let d = SphereLocalData { lambdas, eta1, eta2 };
        d.validate()?;
        Ok(d)
    }

    /// The invariants: everything nonzero, lambda_i != 1, lambda_i != eta_1,
    /// eta_1 != eta_2, and the product relation
    /// lambda_1...lambda_n = eta_1^(n-1) eta_2.
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::InvalidParams("need at least one special eigenvalue".into()));
        }
        let field = self.eta1.field();
        let one = field.one();
        if self.eta1.is_zero() || self.eta2.is_zero() {
            return Err(Error::Validation("eta values must be nonzero".into()));
        }
        if self.eta1 == self.eta2 {
            return Err(Error::Validation("eta_1 = eta_2".into()));
        }
        let mut prod = one.clone();
        for (i, l) in self.lambdas.iter().enumerate() {
            if l.is_zero() {
                return Err(Error::Validation(format!("lambda_{} is zero", i + 1)));
            }
            if *l == one {
                return Err(Error::Validation(format!("unit special eigenvalue lambda_{}", i + 1)));
            }
            if *l == self.eta1 {
                return Err(Error::Validation(format!("lambda_{} = eta_1", i + 1)));
            }
            prod = &prod * l;
        }
        let n = self.lambdas.len();
        let rhs = &self.eta1.pow(n as i64 - 1)? * &self.eta2;
        if prod != rhs {
            return Err(Error::Validation(
                "broken product relation lambda_1..lambda_n = eta_1^(n-1) eta_2".into(),
            ));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }
}

/// A multiplicity-one tuple (A_1, ..., A_n, A_inf) with A_inf = A_1...A_n.
#[derive(Clone, Debug)]
pub struct PochhammerTuple {
    pub matrices: Vec<SquareMatrix>,
    pub a_infinity: SquareMatrix,
    pub data: SphereLocalData,
}

impl PochhammerTuple {
    /// All n + 1 local monodromies, the infinity matrix last.
    pub fn local_monodromies(&self) -> Vec<SquareMatrix> {
        let mut v = self.matrices.clone();
        v.push(self.a_infinity.clone());
        v
    }
}

/// The explicit tuple: A_i is the identity outside column i, which carries
/// (lambda_j - eta_1) eta_1^{-1} above the diagonal entry lambda_i and
/// lambda_j - eta_1 below it. A_inf is computed, never supplied, and the
/// claimed shape is verified before returning.
pub fn build_dsp_tuple(data: &SphereLocalData) -> Result<PochhammerTuple> {
    data.validate()?;
    let n = data.n();
    let field = data.eta1.field().clone();
    let eta1_inv = data.eta1.inv()?;
    let mut matrices = Vec::with_capacity(n);
    for i in 0..n {
        let m = SquareMatrix::from_fn(&field, n, |row, col| {
            if col == i {
                if row < i {
                    &(&data.lambdas[row] - &data.eta1) * &eta1_inv
                } else if row == i {
                    data.lambdas[i].clone()
                } else {
                    &data.lambdas[row] - &data.eta1
                }
            } else if row == col {
                field.one()
            } else {
                field.zero()
            }
        });
        matrices.push(m);
    }
    let mut a_infinity = SquareMatrix::identity(&field, n);
    for m in &matrices {
        a_infinity = a_infinity.mul(m);
    }
    // postconditions: each A_i a pseudo-reflection with special eigenvalue
    // lambda_i; A_inf semisimple of shape eta_1^(n-1) + eta_2
    for (i, m) in matrices.iter().enumerate() {
        match m.is_pseudo_reflection()? {
            Some(d) if d.special == data.lambdas[i] => {}
            _ => {
                return Err(Error::Certification(format!(
                    "A_{} is not a pseudo-reflection with special eigenvalue lambda_{}",
                    i + 1,
                    i + 1
                )))
            }
        }
    }
    if !check_sphere_rigid_shape(&a_infinity, &data.eta1, &data.eta2)? {
        return Err(Error::Certification(
            "A_inf is not conjugate to eta_1 I_(n-1) + eta_2".into(),
        ));
    }
    let tuple = PochhammerTuple {
        matrices,
        a_infinity,
        data: data.clone(),
    };
    let (ok, report) = check_pochhammer_condition(&tuple.matrices)?;
    if !ok {
        return Err(Error::Certification(format!(
            "built tuple fails the kernel condition:\n{report}"
        )));
    }
    Ok(tuple)
}

/// The defining condition: sum of codim ker(M_i - I) equals the dimension
/// and the kernels intersect trivially.
pub fn check_pochhammer_condition(monodromies: &[SquareMatrix]) -> Result<(bool, Report)> {
    if monodromies.is_empty() {
        return Err(Error::InvalidParams("empty monodromy list".into()));
    }
    let m = monodromies[0].dim();
    let field = monodromies[0].field().clone();
    for mat in monodromies {
        if mat.dim() != m {
            return Err(Error::DimensionMismatch("monodromy dimensions differ".into()));
        }
    }
    let mut report = Report::new();
    let ident = SquareMatrix::identity(&field, m);
    let shifted: Vec<SquareMatrix> = monodromies.iter().map(|mat| mat.sub(&ident)).collect();
    let codim_sum: usize = shifted.iter().map(|s| s.rank()).sum();
    report.push_detail(
        "sum of codim ker(M_i - I) equals dim",
        codim_sum == m,
        format!("sum {codim_sum}, dim {m}"),
    );
    let joint = joint_kernel(&field, &shifted);
    report.push_detail(
        "intersection of ker(M_i - I) is trivial",
        joint.is_empty(),
        format!("joint kernel dimension {}", joint.len()),
    );
    Ok((report.passed(), report))
}

/// True iff A_inf certifies semisimple with spectrum
/// eta_1 (multiplicity n-1) and eta_2 (multiplicity 1).
pub fn check_sphere_rigid_shape(a_infinity: &SquareMatrix, eta1: &Scalar, eta2: &Scalar) -> Result<bool> {
    if eta1 == eta2 {
        return Err(Error::InvalidParams("eta_1 = eta_2".into()));
    }
    let n = a_infinity.dim();
    let spectrum = vec![(eta1.clone(), n - 1), (eta2.clone(), 1)];
    let (ok, _) = a_infinity.verify_semisimple_spectrum(&spectrum)?;
    Ok(ok)
}

/// Derive eta_2 from the product relation with the convention
/// eta_1^(n-1) = 1 for n = 1.
pub fn derive_eta2(lambdas: &[Scalar], eta1: &Scalar) -> Result<Scalar> {
    let field = eta1.field();
    let mut prod = field.one();
    for l in lambdas {
        prod = &prod * l;
    }
    prod.div(&eta1.pow(lambdas.len() as i64 - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarField;

    #[test]
    fn n2_matches_display() {
        // lambda = (-1, -zeta5^3), eta1 = -zeta5^2, eta2 = -zeta5
        let f = ScalarField::exact(5).unwrap();
        let l1 = f.integer(-1);
        let l2 = -f.root_of_unity(5, 3).unwrap();
        let eta1 = -f.root_of_unity(5, 2).unwrap();
        let eta2 = derive_eta2(&[l1.clone(), l2.clone()], &eta1).unwrap();
        assert_eq!(eta2, -f.root_of_unity(5, 1).unwrap());
        let data = SphereLocalData::new(vec![l1.clone(), l2.clone()], eta1.clone(), eta2).unwrap();
        let t = build_dsp_tuple(&data).unwrap();
        // A_1 = [[l1, 0], [l2 - eta1, 1]]
        assert_eq!(*t.matrices[0].at(0, 0), l1);
        assert!(t.matrices[0].at(0, 1).is_zero());
        assert_eq!(*t.matrices[0].at(1, 0), &l2 - &eta1);
        assert!(t.matrices[0].at(1, 1).is_one());
        // A_2 = [[1, (l1 - eta1) eta1^-1], [0, l2]]
        assert_eq!(
            *t.matrices[1].at(0, 1),
            (&l1 - &eta1).div(&eta1).unwrap()
        );
        assert_eq!(*t.matrices[1].at(1, 1), l2);
    }

    #[test]
    fn n1_degenerate() {
        let f = ScalarField::exact(4).unwrap();
        let l1 = f.root_of_unity(4, 1).unwrap();
        // eta2 = lambda_1 by the empty-product convention
        let eta2 = derive_eta2(&[l1.clone()], &f.integer(-1)).unwrap();
        assert_eq!(eta2, l1);
        let data = SphereLocalData::new(vec![l1.clone()], f.integer(-1), eta2).unwrap();
        let t = build_dsp_tuple(&data).unwrap();
        assert_eq!(t.matrices.len(), 1);
        assert_eq!(t.a_infinity, t.matrices[0]);
        assert_eq!(*t.a_infinity.at(0, 0), l1);
    }

    #[test]
    fn n3_with_unit_eta2() {
        // lambda = (-1,-1,-1), eta1 = i forces eta2 = 1; spectrum {i, i, 1}
        let f = ScalarField::exact(4).unwrap();
        let i = f.root_of_unity(4, 1).unwrap();
        let lams = vec![f.integer(-1), f.integer(-1), f.integer(-1)];
        let eta2 = derive_eta2(&lams, &i).unwrap();
        assert!(eta2.is_one());
        let data = SphereLocalData::new(lams, i.clone(), eta2.clone()).unwrap();
        let t = build_dsp_tuple(&data).unwrap();
        let (ok, _) = t
            .a_infinity
            .verify_semisimple_spectrum(&[(i, 2), (eta2, 1)])
            .unwrap();
        assert!(ok);
    }

    #[test]
    fn kernel_condition_cases() {
        let f = ScalarField::rationals();
        // single matrix without eigenvalue 1
        let m = SquareMatrix::from_literals(&f, &[&["2", "0"], &["0", "3"]]).unwrap();
        let (ok, _) = check_pochhammer_condition(&[m]).unwrap();
        assert!(ok);
        // identity matrices: codim sum 0
        let i2 = SquareMatrix::identity(&f, 2);
        let (ok, rep) = check_pochhammer_condition(&[i2.clone(), i2]).unwrap();
        assert!(!ok);
        assert!(rep.failed("sum of codim ker(M_i - I) equals dim"));
    }

    #[test]
    fn rigid_shape_cases() {
        let f = ScalarField::rationals();
        let e1 = f.integer(2);
        let e2 = f.integer(7);
        let good = SquareMatrix::from_literals(&f, &[&["2", "0", "0"], &["0", "2", "0"], &["0", "0", "7"]]).unwrap();
        assert!(check_sphere_rigid_shape(&good, &e1, &e2).unwrap());
        let bad = SquareMatrix::from_literals(&f, &[&["2", "0", "0"], &["0", "7", "0"], &["0", "0", "7"]]).unwrap();
        assert!(!check_sphere_rigid_shape(&bad, &e1, &e2).unwrap());
    }

    #[test]
    fn invariant_violations_named() {
        let f = ScalarField::rationals();
        let bad = SphereLocalData::new(vec![f.one()], f.integer(2), f.integer(1));
        assert!(matches!(bad, Err(Error::Validation(msg)) if msg.contains("unit special eigenvalue")));
        let bad = SphereLocalData::new(vec![f.integer(2)], f.integer(2), f.integer(2));
        assert!(bad.is_err());
        let bad = SphereLocalData::new(vec![f.integer(3)], f.integer(2), f.integer(5));
        assert!(matches!(bad, Err(Error::Validation(msg)) if msg.contains("product relation")));
    }

    #[test]
    fn determinant_identity() {
        let f = ScalarField::exact(12).unwrap();
        let lams = vec![f.integer(-1), f.root_of_unity(12, 5).unwrap(), f.root_of_unity(3, 1).unwrap()];
        let eta1 = f.root_of_unity(12, 7).unwrap();
        let eta2 = derive_eta2(&lams, &eta1).unwrap();
        let data = SphereLocalData::new(lams.clone(), eta1, eta2).unwrap();
        let t = build_dsp_tuple(&data).unwrap();
        let mut prod = f.one();
        for l in &lams {
            prod = &prod * l;
        }
        assert_eq!(t.a_infinity.det(), prod);
    }
}
