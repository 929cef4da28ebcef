//! Turbine fundamental-group presentations as executable data: parameter
//! validation with the Bezout pair, words in the generators, relation
//! verification on a matrix representation, and the distinguished loop words.

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::report::Report;
use crate::scalar::gcd_u64;
use std::collections::BTreeMap;
use std::fmt;

/// Which quotient of the turbine group the representation lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Turbine,
    /// adds the relation omega_inf^n = delta^s
    Curve,
}

/// Parameters (n, k, l) with the framing pair (r, s), rn = ks + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurbineParams {
    pub n: u64,
    pub k: u64,
    pub ell: usize,
    pub shaft: bool,
    pub variant: Variant,
    pub r: i64,
    pub s: i64,
}

impl TurbineParams {
    /// Canonical parameters: (r, s) pinned by 0 <= s < n.
    pub fn new(n: u64, k: u64, ell: usize, shaft: bool, variant: Variant) -> Result<TurbineParams> {
        let (r, s) = bezout_rs(n, k)?;
        if ell == 0 {
            return Err(Error::InvalidParams("l must be >= 1".into()));
        }
        Ok(TurbineParams {
            n,
            k,
            ell,
            shaft,
            variant,
            r,
            s,
        })
    }

    /// Explicit override of the Bezout pair; any (r, s) with rn = ks + 1 is
    /// accepted. Non-canonical pairs describe delta-twisted framings.
    pub fn with_pair(
        n: u64,
        k: u64,
        ell: usize,
        shaft: bool,
        variant: Variant,
        r: i64,
        s: i64,
    ) -> Result<TurbineParams> {
        let mut p = TurbineParams::new(n, k, ell, shaft, variant)?;
        if r * n as i64 != k as i64 * s + 1 {
            return Err(Error::InvalidParams(format!(
                "(r, s) = ({r}, {s}) does not satisfy r*{n} = {k}*s + 1"
            )));
        }
        p.r = r;
        p.s = s;
        Ok(p)
    }

    pub fn is_canonical_pair(&self) -> bool {
        0 <= self.s && (self.s as u64) < self.n
    }

    /// Rank of the representations this parameter set prescribes.
    pub fn rank(&self) -> usize {
        self.k as usize * self.ell + usize::from(self.shaft)
    }
}

/// The unique pair (r, s) with r*n = k*s + 1 and 0 <= s < n.
pub fn bezout_rs(n: u64, k: u64) -> Result<(i64, i64)> {
    if !(n > k && k >= 1) {
        return Err(Error::InvalidParams(format!("need n > k >= 1, got ({n}, {k})")));
    }
    if gcd_u64(n, k) != 1 {
        return Err(Error::InvalidParams(format!("gcd({n}, {k}) != 1")));
    }
    for s in 0..n as i64 {
        let t = k as i64 * s + 1;
        if t % n as i64 == 0 {
            return Ok((t / n as i64, s));
        }
    }
    unreachable!("coprimality guarantees a solution")
}

/// Generator alphabet of the turbine group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    /// alpha_i; index 0 is the shaft meridian
    Alpha(usize),
    Omega0,
    OmegaInf,
    Delta,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Alpha(i) => write!(f, "a{i}"),
            Generator::Omega0 => write!(f, "w0"),
            Generator::OmegaInf => write!(f, "winf"),
            Generator::Delta => write!(f, "d"),
        }
    }
}

/// Unreduced word: evaluation in a representation is the only semantics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupWord(pub Vec<(Generator, i64)>);

impl GroupWord {
    pub fn empty() -> GroupWord {
        GroupWord(vec![])
    }

    pub fn gen(g: Generator, exp: i64) -> GroupWord {
        if exp == 0 {
            GroupWord::empty()
        } else {
            GroupWord(vec![(g, exp)])
        }
    }

    pub fn then(mut self, other: &GroupWord) -> GroupWord {
        self.0.extend(other.0.iter().cloned());
        self
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, e)| if *e == 1 { format!("{g}") } else { format!("{g}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A matrix assignment for the generators.
#[derive(Clone, Debug)]
pub struct TurbineRepresentation {
    pub params: TurbineParams,
    pub dim: usize,
    images: BTreeMap<Generator, SquareMatrix>,
}

impl TurbineRepresentation {
    pub fn new(params: TurbineParams, images: BTreeMap<Generator, SquareMatrix>) -> Result<TurbineRepresentation> {
        let dim = images
            .values()
            .next()
            .ok_or_else(|| Error::InvalidParams("empty generator map".into()))?
            .dim();
        for m in images.values() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(
                    "generator images have unequal dimensions".into(),
                ));
            }
        }
        if images.contains_key(&Generator::Alpha(0)) && !params.shaft {
            return Err(Error::InvalidParams(
                "alpha_0 assigned on a representation without shaft".into(),
            ));
        }
        Ok(TurbineRepresentation { params, dim, images })
    }

    pub fn image(&self, g: Generator) -> Result<&SquareMatrix> {
        if let Generator::Alpha(0) = g {
            if !self.params.shaft {
                return Err(Error::UnassignedGenerator("a0 (no shaft)".into()));
            }
        }
        self.images
            .get(&g)
            .ok_or_else(|| Error::UnassignedGenerator(g.to_string()))
    }

    pub fn generators(&self) -> impl Iterator<Item = (&Generator, &SquareMatrix)> {
        self.images.iter()
    }

    /// Monodromy list at the boundary tori: omega_0, alpha_1..alpha_l,
    /// omega_inf. This is the input to the rigidity index.
    pub fn boundary_monodromies(&self) -> Result<Vec<SquareMatrix>> {
        let mut out = vec![self.image(Generator::Omega0)?.clone()];
        for i in 1..=self.params.ell {
            out.push(self.image(Generator::Alpha(i))?.clone());
        }
        out.push(self.image(Generator::OmegaInf)?.clone());
        Ok(out)
    }
}

/// Ordered product of generator images raised to exponents.
pub fn evaluate_word(rep: &TurbineRepresentation, w: &GroupWord) -> Result<SquareMatrix> {
    let mut acc = SquareMatrix::identity(
        rep.images.values().next().unwrap().field(),
        rep.dim,
    );
    for (g, e) in &w.0 {
        let m = rep.image(*g)?;
        acc = acc.mul(&m.pow(*e)?);
    }
    Ok(acc)
}

/// Check the presentation relations; failures are report entries.
///
/// R1: a1...al winf = w0. R2: d commutes with every generator image.
/// R3: a0 w0^k = d^r (shaft) / w0^k = d^r (no shaft).
/// R4 (curve variant): winf^n = d^s.
pub fn verify_presentation(rep: &TurbineRepresentation) -> Result<Report> {
    let mut report = Report::new();
    let p = &rep.params;
    let delta = rep.image(Generator::Delta)?;
    let omega0 = rep.image(Generator::Omega0)?;
    let omega_inf = rep.image(Generator::OmegaInf)?;

    let mut lhs = SquareMatrix::identity(delta.field(), rep.dim);
    for i in 1..=p.ell {
        lhs = lhs.mul(rep.image(Generator::Alpha(i))?);
    }
    lhs = lhs.mul(omega_inf);
    report.push("R1: a1..al winf = w0", lhs == *omega0);

    let mut central = true;
    for (_, m) in rep.generators() {
        if delta.mul(m) != m.mul(delta) {
            central = false;
        }
    }
    report.push("R2: delta central", central);

    let dr = delta.pow(p.r)?;
    if p.shaft {
        let a0 = rep.image(Generator::Alpha(0))?;
        let w0k = omega0.pow(p.k as i64)?;
        report.push("R3: a0 w0^k = d^r", a0.mul(&w0k) == dr);
    } else {
        report.push("R3: w0^k = d^r", omega0.pow(p.k as i64)? == dr);
    }

    if p.variant == Variant::Curve {
        report.push(
            "R4: winf^n = d^s",
            omega_inf.pow(p.n as i64)? == delta.pow(p.s)?,
        );
    }
    Ok(report)
}

/// Index of a transversal loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopIndex {
    /// the shaft loop g_0 = alpha_0
    Shaft,
    /// g_{j,i} = w0^{k-1-j} a_i w0^{1-k+j}
    Strand { j: usize, i: usize },
}

impl LoopIndex {
    /// Coordinate assigned to this loop: nu(0) = 0 and nu(j, i) = l*j + i,
    /// zero-based over the representation space.
    pub fn nu(&self, ell: usize, shaft: bool) -> usize {
        match self {
            LoopIndex::Shaft => 0,
            LoopIndex::Strand { j, i } => ell * j + i - 1 + usize::from(shaft),
        }
    }
}

impl fmt::Display for LoopIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoopIndex::Shaft => write!(f, "g0"),
            LoopIndex::Strand { j, i } => write!(f, "g({j},{i})"),
        }
    }
}

/// The distinguished words of a turbine group.
#[derive(Clone, Debug)]
pub struct DistinguishedWords {
    /// alpha_inf = d^r winf^{-k}
    pub alpha_inf_direct: GroupWord,
    /// alpha_inf as g_0 (g_{0,1}..g_{0,l}) ... (g_{k-1,1}..g_{k-1,l})
    pub alpha_inf_factored: GroupWord,
    /// the transversal loop family, in nu order
    pub loops: Vec<(LoopIndex, GroupWord)>,
}

/// alpha_inf words and the transversal loop family for the given parameters.
pub fn distinguished_words(params: &TurbineParams) -> DistinguishedWords {
    let k = params.k as usize;
    let ell = params.ell;
    let alpha_inf_direct = GroupWord::gen(Generator::Delta, params.r)
        .then(&GroupWord::gen(Generator::OmegaInf, -(params.k as i64)));

    let strand = |j: usize, i: usize| -> GroupWord {
        GroupWord::gen(Generator::Omega0, (k - 1 - j) as i64)
            .then(&GroupWord::gen(Generator::Alpha(i), 1))
            .then(&GroupWord::gen(Generator::Omega0, 1 - k as i64 + j as i64))
    };

    let mut loops = vec![];
    if params.shaft {
        loops.push((LoopIndex::Shaft, GroupWord::gen(Generator::Alpha(0), 1)));
    }
    let mut factored = if params.shaft {
        GroupWord::gen(Generator::Alpha(0), 1)
    } else {
        GroupWord::empty()
    };
    for j in 0..k {
        for i in 1..=ell {
            let w = strand(j, i);
            factored = factored.then(&w);
            loops.push((LoopIndex::Strand { j, i }, w));
        }
    }
    DistinguishedWords {
        alpha_inf_direct,
        alpha_inf_factored: factored,
        loops,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarField;

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout_rs(5, 2).unwrap(), (1, 2));
        assert_eq!(bezout_rs(4, 1).unwrap(), (1, 3));
        assert_eq!(bezout_rs(7, 3).unwrap(), (1, 2));
        assert!(bezout_rs(6, 2).is_err());
        for (n, k) in [(3u64, 2u64), (5, 2), (5, 3), (4, 3), (7, 5), (11, 4)] {
            let (r, s) = bezout_rs(n, k).unwrap();
            assert_eq!(r * n as i64 - k as i64 * s, 1);
            assert!(0 <= s && (s as u64) < n);
        }
    }

    fn cusp_rep() -> TurbineRepresentation {
        let f = ScalarField::exact(3).unwrap();
        let params = TurbineParams::new(3, 2, 1, false, Variant::Turbine).unwrap();
        let omega0 = SquareMatrix::from_literals(&f, &[&["0", "1"], &["1", "0"]]).unwrap();
        let a1 = SquareMatrix::from_literals(&f, &[&["1", "-1"], &["0", "-1"]]).unwrap();
        let omega_inf = a1.inverse().unwrap().mul(&omega0);
        let delta = SquareMatrix::identity(&f, 2);
        let mut map = BTreeMap::new();
        map.insert(Generator::Omega0, omega0);
        map.insert(Generator::Alpha(1), a1);
        map.insert(Generator::OmegaInf, omega_inf);
        map.insert(Generator::Delta, delta);
        TurbineRepresentation::new(params, map).unwrap()
    }

    #[test]
    fn word_evaluation() {
        let rep = cusp_rep();
        let f = rep.image(Generator::Delta).unwrap().field().clone();
        let id = evaluate_word(&rep, &GroupWord::empty()).unwrap();
        assert!(id.is_identity());
        // w0^2 with the permutation matrix is the identity
        let m = evaluate_word(&rep, &GroupWord::gen(Generator::Omega0, 2)).unwrap();
        assert!(m.is_identity());
        // delta^2 on scalar image
        let d2 = evaluate_word(&rep, &GroupWord::gen(Generator::Delta, 2)).unwrap();
        assert_eq!(d2.as_scalar().unwrap(), f.one());
        // alpha_0 rejected without shaft
        assert!(evaluate_word(&rep, &GroupWord::gen(Generator::Alpha(0), 1)).is_err());
    }

    #[test]
    fn cusp_presentation_passes() {
        let rep = cusp_rep();
        let report = verify_presentation(&rep).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn rank_one_trivial_rep() {
        let f = ScalarField::rationals();
        let params = TurbineParams::new(5, 2, 2, true, Variant::Curve).unwrap();
        let one = SquareMatrix::identity(&f, 1);
        let mut map = BTreeMap::new();
        for g in [
            Generator::Alpha(0),
            Generator::Alpha(1),
            Generator::Alpha(2),
            Generator::Omega0,
            Generator::OmegaInf,
            Generator::Delta,
        ] {
            map.insert(g, one.clone());
        }
        let rep = TurbineRepresentation::new(params, map).unwrap();
        assert!(verify_presentation(&rep).unwrap().passed());
    }

    #[test]
    fn distinguished_word_tables() {
        // k=1, l=1, no shaft: loop family = { a1 }
        let p = TurbineParams::new(4, 1, 1, false, Variant::Turbine).unwrap();
        let w = distinguished_words(&p);
        assert_eq!(w.loops.len(), 1);
        assert_eq!(w.loops[0].1, GroupWord(vec![(Generator::Alpha(1), 1)]));
        assert_eq!(
            w.alpha_inf_direct,
            GroupWord(vec![(Generator::Delta, 1), (Generator::OmegaInf, -1)])
        );

        // k=2, l=1, no shaft: loops { w0 a1 w0^-1, a1 }
        let p = TurbineParams::new(3, 2, 1, false, Variant::Turbine).unwrap();
        let w = distinguished_words(&p);
        assert_eq!(w.loops.len(), 2);
        assert_eq!(
            w.loops[0].1,
            GroupWord(vec![
                (Generator::Omega0, 1),
                (Generator::Alpha(1), 1),
                (Generator::Omega0, -1)
            ])
        );
        assert_eq!(w.loops[1].1, GroupWord(vec![(Generator::Alpha(1), 1)]));

        // k=2, l=2, shaft: 5 loops a0, w0 a1 w0^-1, w0 a2 w0^-1, a1, a2
        let p = TurbineParams::new(5, 2, 2, true, Variant::Turbine).unwrap();
        let w = distinguished_words(&p);
        assert_eq!(w.loops.len(), 5);
        assert_eq!(w.loops[0].0, LoopIndex::Shaft);
        assert_eq!(
            w.loops[1].1,
            GroupWord(vec![
                (Generator::Omega0, 1),
                (Generator::Alpha(1), 1),
                (Generator::Omega0, -1)
            ])
        );
        assert_eq!(w.loops[3].1, GroupWord(vec![(Generator::Alpha(1), 1)]));
        // nu ordering covers 0..=4
        let nus: Vec<usize> = w.loops.iter().map(|(ix, _)| ix.nu(2, true)).collect();
        assert_eq!(nus, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn word_rendering() {
        let w = GroupWord(vec![
            (Generator::Omega0, 1),
            (Generator::Alpha(1), 1),
            (Generator::Omega0, -1),
        ]);
        assert_eq!(w.to_string(), "w0 a1 w0^-1");
    }
}
