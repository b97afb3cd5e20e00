//! Representations of the endomorphism semigroup of a finite space: perfect
//! pairs, labelings and their orbits, induced representations, the `*`-checks,
//! commutants, and the census of irreducible representations.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Value};
use thiserror::Error;

use crate::amalgam::Morphism;
use crate::dendro::{isometry_group, Dendrogram};
use crate::endsemi::{classify_endo, EndoError};
use crate::groups::{self, irreducible_representations, GroupError, Perm, RepMatrices};
use crate::linalg::{exact_rank, float_rank, Matrix, Scalar, FLOAT_TOL};
use crate::rat::{Radius, Rat};
use crate::ultracore::{BallKind, LambdaSpec, UltraSpace};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RepError {
    /// The morphism or labeling belongs to a different space.
    #[error("operand does not live on the representation's space")]
    SpaceMismatch,
    /// The supplied stabilizer representation fails a check.
    #[error("not a unitary representation of the stabilizer: {0}")]
    NotARepresentation(String),
    /// Products of the sample leave the sample.
    #[error("sample is not closed under composition")]
    NotClosed,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Endo(#[from] EndoError),
}

/// A perfect ball type `(c, r)` or `(o, r)` attached to a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PerfectPair {
    pub kind: BallKind,
    pub radius: Radius,
}

impl PerfectPair {
    pub fn closed(r: Rat) -> PerfectPair {
        PerfectPair { kind: BallKind::Closed, radius: Radius::Finite(r) }
    }

    pub fn open(r: Radius) -> PerfectPair {
        PerfectPair { kind: BallKind::Open, radius: r }
    }
}

impl fmt::Display for PerfectPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.kind, self.radius)
    }
}

/// Closed pairs with `r ∈ Λ ∪ {0}`, `r < d`; open pairs with `r` a left
/// limit, `0 < r <= d`; and `(o, ∞)` when `Λ` is unbounded and `d = ∞`.
pub fn admissible_pairs(lambda: &LambdaSpec, d: Radius) -> Vec<PerfectPair> {
    let mut out: Vec<PerfectPair> = lambda
        .with_zero()
        .into_iter()
        .filter(|&r| Radius::Finite(r) < d)
        .map(PerfectPair::closed)
        .collect();
    let mut open: Vec<Rat> = lambda
        .left_limits
        .iter()
        .filter_map(|l| l.finite())
        .filter(|&r| r.is_positive() && Radius::Finite(r) <= d)
        .collect();
    open.sort();
    out.extend(open.into_iter().map(|r| PerfectPair::open(Radius::Finite(r))));
    if lambda.unbounded && d == Radius::Infinite {
        out.push(PerfectPair::open(Radius::Infinite));
    }
    out
}

/// The character `ζ(λ; ε, r)`: `[r >= λ]` for closed pairs, `[r > λ]` for open ones.
pub fn chi(lambda: Rat, pair: &PerfectPair) -> bool {
    match (pair.kind, pair.radius) {
        (_, Radius::Infinite) => true,
        (BallKind::Closed, Radius::Finite(r)) => r >= lambda,
        (BallKind::Open, Radius::Finite(r)) => r > lambda,
    }
}

pub type Labeling = Vec<PerfectPair>;

/// All labelings, in lexicographic order.
pub fn labelings(space: &UltraSpace, lambda: &LambdaSpec) -> Vec<Labeling> {
    let options: Vec<Vec<PerfectPair>> =
        (0..space.len()).map(|x| admissible_pairs(lambda, space.nearest_distance(x))).collect();
    let mut out: Vec<Labeling> = vec![Vec::new()];
    for opts in &options {
        out = out
            .iter()
            .flat_map(|prefix| {
                opts.iter().map(move |p| {
                    let mut l = prefix.clone();
                    l.push(*p);
                    l
                })
            })
            .collect();
    }
    out
}

/// `(κ·L)(κx) = L(x)`.
pub fn act(kappa: &[usize], l: &Labeling) -> Labeling {
    let mut out = l.clone();
    for (x, &k) in kappa.iter().enumerate() {
        out[k] = l[x];
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelingOrbit {
    /// Least labeling of the orbit.
    pub representative: Labeling,
    /// Orbit members, sorted; the representative comes first.
    pub members: Vec<Labeling>,
    /// Isometries fixing the representative.
    pub stabilizer: Vec<Perm>,
    /// For each member `L`, the first isometry (in group order) taking the representative to `L`.
    pub section: Vec<Perm>,
}

impl LabelingOrbit {
    pub fn index_of(&self, l: &Labeling) -> Option<usize> {
        self.members.binary_search(l).ok()
    }
}

/// Orbits of `Isom(X)` on labelings, ordered by representative.
pub fn orbit_decomposition(space: &UltraSpace, lambda: &LambdaSpec) -> Vec<LabelingOrbit> {
    let isom = isometry_group(space);
    let all = labelings(space, lambda);
    let mut seen: HashMap<Labeling, ()> = HashMap::new();
    let mut out = Vec::new();
    for l in all {
        if seen.contains_key(&l) {
            continue;
        }
        let mut members: Vec<Labeling> = isom.iter().map(|k| act(k, &l)).collect();
        members.sort();
        members.dedup();
        for m in &members {
            seen.insert(m.clone(), ());
        }
        let stabilizer: Vec<Perm> = isom.iter().filter(|k| act(k, &l) == l).cloned().collect();
        let section = members
            .iter()
            .map(|m| isom.iter().find(|k| act(k, &l) == *m).expect("member of the orbit").clone())
            .collect();
        out.push(LabelingOrbit { representative: l, members, stabilizer, section });
    }
    out
}

/// Dendrogram code of the space with each leaf tagged by its perfect pair.
pub fn labeling_code(space: &UltraSpace, l: &Labeling) -> String {
    let d = Dendrogram::build(space);
    d.code_with(d.root(), &|x| l[x].to_string()).to_string()
}

/// The representation induced from a unitary representation `ν` of the
/// stabilizer of a labeling orbit, extended to the near-units diagonally.
#[derive(Clone, Debug)]
pub struct FiniteRep<S> {
    space: UltraSpace,
    lambda: LambdaSpec,
    orbit: LabelingOrbit,
    isometries: Vec<Perm>,
    nu: Vec<Matrix<S>>,
    nu_dim: usize,
    group: Vec<Matrix<S>>,
}

pub fn induced_rep<S: Scalar>(
    space: &UltraSpace,
    lambda: &LambdaSpec,
    orbit: &LabelingOrbit,
    nu: Vec<Matrix<S>>,
) -> Result<FiniteRep<S>, RepError> {
    let gamma = &orbit.stabilizer;
    if nu.len() != gamma.len() {
        return Err(RepError::NotARepresentation(format!(
            "{} matrices for a stabilizer of order {}",
            nu.len(),
            gamma.len()
        )));
    }
    let dim = nu[0].rows();
    if nu.iter().any(|m| m.rows() != dim || m.cols() != dim) {
        return Err(RepError::NotARepresentation("matrices must be square of one size".into()));
    }
    let gindex: HashMap<&Perm, usize> = gamma.iter().enumerate().map(|(i, g)| (g, i)).collect();
    for (i, a) in gamma.iter().enumerate() {
        if !nu[i].adjoint().mul(&nu[i]).close(&Matrix::identity(dim), FLOAT_TOL) {
            return Err(RepError::NotARepresentation("a matrix is not unitary".into()));
        }
        for (j, b) in gamma.iter().enumerate() {
            let k = *gindex.get(&groups::compose(a, b)).ok_or(RepError::NotARepresentation(
                "stabilizer is not closed under composition".into(),
            ))?;
            if !nu[k].close(&nu[i].mul(&nu[j]), FLOAT_TOL) {
                return Err(RepError::NotARepresentation("not multiplicative".into()));
            }
        }
    }
    let isometries = isometry_group(space);
    let n = orbit.members.len();
    let group = isometries
        .iter()
        .map(|g| {
            let mut m = Matrix::zeros(n * dim, n * dim);
            for (a, l) in orbit.members.iter().enumerate() {
                let gl = act(g, l);
                let b = orbit.index_of(&gl).expect("orbit is invariant");
                let h = groups::compose(
                    &groups::inverse(&orbit.section[b]),
                    &groups::compose(g, &orbit.section[a]),
                );
                let block = &nu[gindex[&h]];
                for i in 0..dim {
                    for j in 0..dim {
                        m.set(b * dim + i, a * dim + j, block.get(i, j).clone());
                    }
                }
            }
            m
        })
        .collect();
    Ok(FiniteRep {
        space: space.clone(),
        lambda: lambda.clone(),
        orbit: orbit.clone(),
        isometries,
        nu,
        nu_dim: dim,
        group,
    })
}

impl<S: Scalar> FiniteRep<S> {
    pub fn dim(&self) -> usize {
        self.orbit.members.len() * self.nu_dim
    }

    pub fn nu_dim(&self) -> usize {
        self.nu_dim
    }

    pub fn space(&self) -> &UltraSpace {
        &self.space
    }

    pub fn lambda(&self) -> &LambdaSpec {
        &self.lambda
    }

    pub fn orbit(&self) -> &LabelingOrbit {
        &self.orbit
    }

    pub fn nu(&self) -> &[Matrix<S>] {
        &self.nu
    }

    pub fn isometry_matrix(&self, kappa: &[usize]) -> Option<&Matrix<S>> {
        self.isometries.iter().position(|g| g == kappa).map(|i| &self.group[i])
    }

    /// Diagonal action of the near-unit with values `lambdas`.
    pub fn near_unit_matrix(&self, lambdas: &[Rat]) -> Matrix<S> {
        let n = self.orbit.members.len();
        let mut m = Matrix::zeros(n * self.nu_dim, n * self.nu_dim);
        for (a, l) in self.orbit.members.iter().enumerate() {
            if lambdas.iter().zip(l).all(|(&lam, pair)| chi(lam, pair)) {
                for i in 0..self.nu_dim {
                    m.set(a * self.nu_dim + i, a * self.nu_dim + i, S::one());
                }
            }
        }
        m
    }

    /// Isometry times near-unit for near-automorphisms, zero otherwise.
    pub fn apply(&self, p: &Morphism) -> Result<Matrix<S>, RepError> {
        if p.source() != &self.space || p.target() != &self.space {
            return Err(RepError::SpaceMismatch);
        }
        match classify_endo(p) {
            Ok(na) => {
                let g = self.isometry_matrix(&na.kappa).expect("kappa is an isometry");
                Ok(g.mul(&self.near_unit_matrix(na.near_unit.lambdas())))
            }
            Err(EndoError::NotNearAutomorphism { .. }) => Ok(Matrix::zeros(self.dim(), self.dim())),
            Err(e) => Err(e.into()),
        }
    }

    /// Generators of the image algebra: all isometries and the near-units
    /// supported at a single point.
    pub fn generators(&self) -> Vec<Matrix<S>> {
        let mut gens = self.group.clone();
        for x in 0..self.space.len() {
            let dx = self.space.nearest_distance(x);
            for lam in self.lambda.with_zero() {
                if lam.is_zero() || Radius::Finite(lam) >= dx {
                    continue;
                }
                let mut lambdas = vec![Rat::ZERO; self.space.len()];
                lambdas[x] = lam;
                gens.push(self.near_unit_matrix(&lambdas));
            }
        }
        gens
    }
}

/// Dimension of `{M : MA = AM for every generator A}`.
pub fn commutant_dimension<S: Scalar>(gens: &[Matrix<S>]) -> usize {
    let Some(first) = gens.first() else { return 0 };
    let n = first.rows();
    let unknowns = n * n;
    if S::EXACT {
        let mut rows: Vec<Vec<(usize, BigRational)>> = Vec::new();
        for a in gens {
            for i in 0..n {
                for j in 0..n {
                    let mut row: HashMap<usize, BigRational> = HashMap::new();
                    for k in 0..n {
                        let akj = a.get(k, j);
                        if !akj.is_zero() {
                            *row.entry(i * n + k).or_insert_with(|| BigRational::from_integer(0.into())) +=
                                akj.to_big().expect("exact scalar");
                        }
                        let aik = a.get(i, k);
                        if !aik.is_zero() {
                            *row.entry(k * n + j).or_insert_with(|| BigRational::from_integer(0.into())) -=
                                aik.to_big().expect("exact scalar");
                        }
                    }
                    rows.push(row.into_iter().collect());
                }
            }
        }
        unknowns - exact_rank(&rows)
    } else {
        let mut normal = nalgebra::DMatrix::<Complex64>::zeros(unknowns, unknowns);
        for a in gens {
            for i in 0..n {
                for j in 0..n {
                    let mut row: HashMap<usize, Complex64> = HashMap::new();
                    for k in 0..n {
                        *row.entry(i * n + k).or_insert(Complex64::new(0.0, 0.0)) += a.get(k, j).to_c64();
                        *row.entry(k * n + j).or_insert(Complex64::new(0.0, 0.0)) -= a.get(i, k).to_c64();
                    }
                    let entries: Vec<(usize, Complex64)> = row.into_iter().filter(|(_, v)| v.norm() > 0.0).collect();
                    for &(p, vp) in &entries {
                        for &(q, vq) in &entries {
                            normal[(p, q)] += vp.conj() * vq;
                        }
                    }
                }
            }
        }
        unknowns - float_rank(&normal)
    }
}

/// Multiplication and adjoint tables of a finite set of endomorphisms closed
/// under composition and involution.
#[derive(Clone, Debug)]
pub struct EndTable {
    pub elements: Vec<Morphism>,
    /// `product[i][j]` is the index of "first `i`, then `j`".
    pub product: Vec<Vec<usize>>,
    pub adjoint: Vec<usize>,
    pub identity: usize,
}

impl EndTable {
    pub fn build(elements: Vec<Morphism>) -> Result<EndTable, RepError> {
        let index: HashMap<&Vec<Vec<Rat>>, usize> = elements.iter().enumerate().map(|(i, m)| (m.delta(), i)).collect();
        let lookup = |m: &Morphism| index.get(m.delta()).copied().ok_or(RepError::NotClosed);
        let mut product = Vec::with_capacity(elements.len());
        for p in &elements {
            let row = elements
                .iter()
                .map(|q| lookup(&p.compose(q).map_err(|_| RepError::SpaceMismatch)?))
                .collect::<Result<Vec<usize>, RepError>>()?;
            product.push(row);
        }
        let adjoint = elements.iter().map(|p| lookup(&p.involution())).collect::<Result<Vec<_>, _>>()?;
        let space = elements.first().ok_or(RepError::NotClosed)?.source().clone();
        let identity = lookup(&Morphism::identity(&space))?;
        Ok(EndTable { elements, product, adjoint, identity })
    }
}

/// Findings of the `*`-representation checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StarReport {
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

impl StarReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }
}

/// Unit, adjoint, contraction and multiplicativity over every pair of a closed table.
pub fn check_star_rep_table<S: Scalar>(rep: &FiniteRep<S>, table: &EndTable) -> Result<StarReport, RepError> {
    let mats: Vec<Matrix<S>> = table.elements.iter().map(|p| rep.apply(p)).collect::<Result<_, _>>()?;
    let zero: Vec<bool> = mats.iter().map(|m| m.is_zero()).collect();
    let mut report = StarReport::default();
    if !mats[table.identity].close(&Matrix::identity(rep.dim()), FLOAT_TOL) {
        report.fail("identity does not act as the unit".into());
    }
    for (i, m) in mats.iter().enumerate() {
        if !mats[table.adjoint[i]].close(&m.adjoint(), FLOAT_TOL) {
            report.fail(format!("adjoint fails for element {i}"));
        }
        if !zero[i] && !m.is_contraction() {
            report.fail(format!("element {i} acts with norm above one"));
        }
    }
    for i in 0..mats.len() {
        for j in 0..mats.len() {
            report.pairs_checked += 1;
            let k = table.product[i][j];
            let ok = if zero[i] || zero[j] {
                zero[k]
            } else {
                mats[k].close(&mats[j].mul(&mats[i]), FLOAT_TOL)
            };
            if !ok {
                report.fail(format!("product of elements {i} then {j} is not multiplicative"));
            }
        }
    }
    Ok(report)
}

/// The same checks over an arbitrary sample, composing on the fly.
pub fn check_star_rep<S: Scalar>(rep: &FiniteRep<S>, sample: &[Morphism]) -> Result<StarReport, RepError> {
    let mats: Vec<Matrix<S>> = sample.iter().map(|p| rep.apply(p)).collect::<Result<_, _>>()?;
    let mut report = StarReport::default();
    let id = rep.apply(&Morphism::identity(&rep.space))?;
    if !id.close(&Matrix::identity(rep.dim()), FLOAT_TOL) {
        report.fail("identity does not act as the unit".into());
    }
    for (i, (p, m)) in sample.iter().zip(&mats).enumerate() {
        if !rep.apply(&p.involution())?.close(&m.adjoint(), FLOAT_TOL) {
            report.fail(format!("adjoint fails for sample {i}"));
        }
        if !m.is_contraction() {
            report.fail(format!("sample {i} acts with norm above one"));
        }
    }
    for (i, p) in sample.iter().enumerate() {
        for (j, q) in sample.iter().enumerate() {
            report.pairs_checked += 1;
            let pq = p.compose(q).map_err(|_| RepError::SpaceMismatch)?;
            if !rep.apply(&pq)?.close(&mats[j].mul(&mats[i]), FLOAT_TOL) {
                report.fail(format!("product of samples {i} then {j} is not multiplicative"));
            }
        }
    }
    Ok(report)
}

/// A representation over exact rationals or complex floats.
#[derive(Clone, Debug)]
pub enum AnyRep {
    Exact(FiniteRep<Rat>),
    Float(FiniteRep<Complex64>),
}

impl AnyRep {
    pub fn dim(&self) -> usize {
        match self {
            AnyRep::Exact(r) => r.dim(),
            AnyRep::Float(r) => r.dim(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyRep::Exact(_))
    }

    pub fn commutant_dimension(&self) -> usize {
        match self {
            AnyRep::Exact(r) => commutant_dimension(&r.generators()),
            AnyRep::Float(r) => commutant_dimension(&r.generators()),
        }
    }

    pub fn check_table(&self, table: &EndTable) -> Result<StarReport, RepError> {
        match self {
            AnyRep::Exact(r) => check_star_rep_table(r, table),
            AnyRep::Float(r) => check_star_rep_table(r, table),
        }
    }

    pub fn check_sample(&self, sample: &[Morphism]) -> Result<StarReport, RepError> {
        match self {
            AnyRep::Exact(r) => check_star_rep(r, sample),
            AnyRep::Float(r) => check_star_rep(r, sample),
        }
    }

    /// The action of `p` as complex matrix entries.
    pub fn apply_complex(&self, p: &Morphism) -> Result<nalgebra::DMatrix<Complex64>, RepError> {
        match self {
            AnyRep::Exact(r) => Ok(r.apply(p)?.to_complex()),
            AnyRep::Float(r) => Ok(r.apply(p)?.to_complex()),
        }
    }
}

/// One irreducible representation: a labeling orbit and an irreducible
/// representation of its stabilizer.
#[derive(Clone, Debug)]
pub struct CensusEntry {
    pub orbit_code: String,
    pub representative: Labeling,
    pub orbit_size: usize,
    pub stabilizer_order: usize,
    pub stabilizer_kind: String,
    pub irrep_name: String,
    pub nu_character: Vec<Complex64>,
    pub dim: usize,
    pub rep: AnyRep,
}

impl CensusEntry {
    pub fn to_json(&self) -> Value {
        let round = |v: f64| if v.abs() < 1e-12 { 0.0 } else { (v * 1e12).round() / 1e12 };
        json!({
            "orbit_code": self.orbit_code,
            "representative": self.representative.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "orbit_size": self.orbit_size,
            "stabilizer_order": self.stabilizer_order,
            "stabilizer": self.stabilizer_kind,
            "irrep": self.irrep_name,
            "nu_character": self.nu_character.iter().map(|c| [round(c.re), round(c.im)]).collect::<Vec<_>>(),
            "dim": self.dim,
            "exact": self.rep.is_exact(),
        })
    }
}

/// Every pair (labeling orbit, irreducible representation of its stabilizer).
pub fn irrep_census(space: &UltraSpace, lambda: &LambdaSpec) -> Result<Vec<CensusEntry>, RepError> {
    let mut out = Vec::new();
    for orbit in orbit_decomposition(space, lambda) {
        let (kind, irreps) = irreducible_representations(&orbit.stabilizer)?;
        let code = labeling_code(space, &orbit.representative);
        for irrep in irreps {
            let nu_character = irrep.matrices.characters();
            let rep = match irrep.matrices {
                RepMatrices::Exact(m) => AnyRep::Exact(induced_rep(space, lambda, &orbit, m)?),
                RepMatrices::Float(m) => AnyRep::Float(induced_rep(space, lambda, &orbit, m)?),
            };
            out.push(CensusEntry {
                orbit_code: code.clone(),
                representative: orbit.representative.clone(),
                orbit_size: orbit.members.len(),
                stabilizer_order: orbit.stabilizer.len(),
                stabilizer_kind: kind.name(),
                irrep_name: irrep.name,
                nu_character,
                dim: rep.dim(),
                rep,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endsemi::enumerate_endomorphisms;

    fn pair(d: i64) -> UltraSpace {
        UltraSpace::from_ints(&[&[0, d], &[d, 0]]).unwrap()
    }

    #[test]
    fn admissible_pair_examples() {
        let l12 = LambdaSpec::from_ints(&[1, 2]);
        let two = Radius::Finite(Rat::int(2));
        assert_eq!(
            admissible_pairs(&l12, two),
            vec![PerfectPair::closed(Rat::ZERO), PerfectPair::closed(Rat::ONE)]
        );
        assert_eq!(
            admissible_pairs(&LambdaSpec::from_ints(&[1]), Radius::Finite(Rat::ONE)),
            vec![PerfectPair::closed(Rat::ZERO)]
        );
        let mut with_limit = l12.clone();
        with_limit.left_limits = vec![two];
        assert_eq!(
            admissible_pairs(&with_limit, two),
            vec![PerfectPair::closed(Rat::ZERO), PerfectPair::closed(Rat::ONE), PerfectPair::open(two)]
        );
        let unbounded = LambdaSpec::new(vec![Rat::ONE], false, true, vec![Radius::Infinite]).unwrap();
        assert_eq!(admissible_pairs(&unbounded, Radius::Infinite).last(), Some(&PerfectPair::open(Radius::Infinite)));
    }

    #[test]
    fn characters_of_pairs() {
        assert!(chi(Rat::ONE, &PerfectPair::closed(Rat::ONE)));
        assert!(!chi(Rat::ONE, &PerfectPair::open(Radius::Finite(Rat::ONE))));
        assert!(chi(Rat::ZERO, &PerfectPair::closed(Rat::ZERO)));
        assert!(!chi(Rat::ONE, &PerfectPair::closed(Rat::ZERO)));
    }

    #[test]
    fn orbits_of_two_point_space() {
        let orbits = orbit_decomposition(&pair(2), &LambdaSpec::from_ints(&[1, 2]));
        let shapes: Vec<(usize, usize)> = orbits.iter().map(|o| (o.members.len(), o.stabilizer.len())).collect();
        assert_eq!(shapes, vec![(1, 2), (2, 1), (1, 2)]);
    }

    #[test]
    fn sign_representation_on_symmetric_labeling() {
        let x = pair(2);
        let lambda = LambdaSpec::from_ints(&[1, 2]);
        let orbit = orbit_decomposition(&x, &lambda).remove(0);
        let nu = vec![Matrix::from_rows(vec![vec![Rat::ONE]]), Matrix::from_rows(vec![vec![Rat::int(-1)]])];
        let rep = induced_rep(&x, &lambda, &orbit, nu).unwrap();
        assert_eq!(rep.dim(), 1);
        assert_eq!(rep.isometry_matrix(&[1, 0]).unwrap().get(0, 0), &Rat::int(-1));
        let bad = vec![Matrix::from_rows(vec![vec![Rat::ONE]]), Matrix::from_rows(vec![vec![Rat::int(2)]])];
        assert!(matches!(induced_rep(&x, &lambda, &orbit, bad), Err(RepError::NotARepresentation(_))));
    }

    #[test]
    fn census_of_two_points() {
        let x = pair(2);
        let lambda = LambdaSpec::from_ints(&[1, 2]);
        let census = irrep_census(&x, &lambda).unwrap();
        let mut dims: Vec<usize> = census.iter().map(|e| e.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 1, 1, 2]);
        let table = EndTable::build(enumerate_endomorphisms(&x, &lambda)).unwrap();
        for e in &census {
            assert!(e.rep.check_table(&table).unwrap().ok());
            assert_eq!(e.rep.commutant_dimension(), 1);
        }
    }

    #[test]
    fn direct_sum_has_larger_commutant() {
        let x = pair(2);
        let lambda = LambdaSpec::from_ints(&[1, 2]);
        let census = irrep_census(&x, &lambda).unwrap();
        let AnyRep::Exact(r) = &census[0].rep else { panic!("expected exact") };
        let gens: Vec<Matrix<Rat>> = r.generators().iter().map(|g| Matrix::block_diag(g, g)).collect();
        assert_eq!(commutant_dimension(&gens), 4);
    }
}
