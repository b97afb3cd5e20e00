//! Endomorphisms of a finite ultrametric space: near-units, near-automorphisms,
//! decomposition of idempotents, and exhaustive enumeration for small cases.

use thiserror::Error;

use crate::amalgam::{AmalgamError, Morphism};
use crate::dendro::Dendrogram;
use crate::rat::{Radius, Rat};
use crate::ultracore::{LambdaSpec, UltraSpace};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EndoError {
    /// `λ_x` must be zero or a value, and smaller than the distance from `x` to the rest.
    #[error("value {value} is not admissible at point {label}")]
    InadmissibleLambda { point: usize, label: String, value: Rat },
    /// The two operands live on different spaces.
    #[error("operands live on different spaces")]
    SpaceMismatch,
    /// Source and target differ.
    #[error("not an endomorphism")]
    NotEndomorphism,
    /// The permutation is not an isometry of the space.
    #[error("permutation is not an isometry")]
    NotIsometry,
    /// No point of `p-X` is closer to `p+x` than `d_x`; `x` is the certificate.
    #[error("not a near-automorphism: point {label} has no image closer than its nearest neighbour")]
    NotNearAutomorphism { certificate: usize, label: String },
    /// `q ◊ q != q`.
    #[error("not an idempotent")]
    NotIdempotent,
    /// Near-automorphic idempotents are units and do not factor through a smaller space.
    #[error("idempotent is a near-automorphism")]
    IsNearAutomorphism,
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
}

/// The near-unit `z{λ}`: `p+x` and `p-x` at distance `λ_x`, all else as in `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearUnit {
    space: UltraSpace,
    lambdas: Vec<Rat>,
}

impl NearUnit {
    /// Checks `λ_x ∈ Λ ∪ {0}` (when a value set is given or attached) and `λ_x < d_x`.
    pub fn new(space: &UltraSpace, lambdas: Vec<Rat>, lambda: Option<&LambdaSpec>) -> Result<NearUnit, EndoError> {
        if lambdas.len() != space.len() {
            return Err(EndoError::SpaceMismatch);
        }
        let lambda = lambda.or(space.lambda.as_ref());
        for (x, &v) in lambdas.iter().enumerate() {
            let in_set = v.is_zero() || lambda.map_or(v.is_positive(), |l| l.contains(v));
            if !in_set || Radius::Finite(v) >= space.nearest_distance(x) {
                return Err(EndoError::InadmissibleLambda { point: x, label: space.labels[x].clone(), value: v });
            }
        }
        Ok(NearUnit { space: space.clone(), lambdas })
    }

    pub fn unit(space: &UltraSpace) -> NearUnit {
        NearUnit { space: space.clone(), lambdas: vec![Rat::ZERO; space.len()] }
    }

    pub fn lambdas(&self) -> &[Rat] {
        &self.lambdas
    }

    pub fn space(&self) -> &UltraSpace {
        &self.space
    }

    pub fn morphism(&self) -> Morphism {
        near_unit_morphism(self)
    }

    pub fn product(&self, other: &NearUnit) -> Result<NearUnit, EndoError> {
        near_unit_product(self, other)
    }
}

pub fn near_unit_morphism(z: &NearUnit) -> Morphism {
    let n = z.space.len();
    let delta = (0..n).map(|x| (0..n).map(|y| if x == y { z.lambdas[x] } else { z.space.d(x, y) }).collect()).collect();
    Morphism::from_delta(z.space.clone(), z.space.clone(), delta).expect("near-units are valid amalgams")
}

/// Near-units multiply by taking the larger value at each point.
pub fn near_unit_product(a: &NearUnit, b: &NearUnit) -> Result<NearUnit, EndoError> {
    if a.space != b.space {
        return Err(EndoError::SpaceMismatch);
    }
    let lambdas = a.lambdas.iter().zip(&b.lambdas).map(|(u, v)| *u.max(v)).collect();
    Ok(NearUnit { space: a.space.clone(), lambdas })
}

/// The morphism of an isometry `κ`: `d(p+x, p-y) = d(κx, y)`.
pub fn automorphism_morphism(space: &UltraSpace, kappa: &[usize]) -> Result<Morphism, EndoError> {
    let n = space.len();
    if kappa.len() != n || kappa.iter().any(|&k| k >= n) {
        return Err(EndoError::NotIsometry);
    }
    for a in 0..n {
        for b in 0..n {
            if space.d(kappa[a], kappa[b]) != space.d(a, b) {
                return Err(EndoError::NotIsometry);
            }
        }
    }
    let delta = (0..n).map(|x| (0..n).map(|y| space.d(kappa[x], y)).collect()).collect();
    Ok(Morphism::from_delta(space.clone(), space.clone(), delta)?)
}

/// A near-automorphism written as "first the near-unit, then the isometry".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearAutomorphism {
    /// `kappa[x]` is the image of `x`.
    pub kappa: Vec<usize>,
    pub near_unit: NearUnit,
}

impl NearAutomorphism {
    pub fn to_morphism(&self) -> Morphism {
        let iso = automorphism_morphism(&self.near_unit.space, &self.kappa).expect("kappa is an isometry");
        self.near_unit.morphism().compose(&iso).expect("same space")
    }
}

/// Decides whether `p` is a near-automorphism: every `p+x` has a point
/// `p-κ(x)` closer than `d_x`. Otherwise the first failing `x` is returned.
pub fn classify_endo(p: &Morphism) -> Result<NearAutomorphism, EndoError> {
    if !p.is_endomorphism() {
        return Err(EndoError::NotEndomorphism);
    }
    let x = p.source();
    let n = x.len();
    let mut kappa = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    for a in 0..n {
        let (m, y) = (0..n).map(|y| (p.d(a, y), y)).min().expect("space is nonempty");
        if Radius::Finite(m) >= x.nearest_distance(a) {
            return Err(EndoError::NotNearAutomorphism { certificate: a, label: x.labels[a].clone() });
        }
        kappa.push(y);
        lambdas.push(m);
    }
    let near_unit = NearUnit { space: x.clone(), lambdas };
    let out = NearAutomorphism { kappa, near_unit };
    debug_assert_eq!(&out.to_morphism(), p);
    Ok(out)
}

pub fn is_selfadjoint_idempotent(p: &Morphism) -> bool {
    p.is_endomorphism() && p.involution() == *p
}

pub fn is_idempotent(p: &Morphism) -> bool {
    p.is_endomorphism() && p.compose(p).as_ref() == Ok(p)
}

/// A factorisation `q = t* ◊ t` through a proper subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentFactor {
    /// Indices of `X` kept in the subspace, ascending.
    pub kept: Vec<usize>,
    pub subspace: UltraSpace,
    /// The morphism `t: X -> Y`.
    pub t: Morphism,
}

/// Splits an idempotent that is not a near-automorphism. The points removed
/// are those under the highest edge `[v, w]` (first child on ties) whose
/// lower part misses the domain of `q` on the tree.
pub fn idempotent_factor(q: &Morphism) -> Result<IdempotentFactor, EndoError> {
    if !q.is_endomorphism() {
        return Err(EndoError::NotEndomorphism);
    }
    if !is_idempotent(q) {
        return Err(EndoError::NotIdempotent);
    }
    if classify_endo(q).is_ok() {
        return Err(EndoError::IsNearAutomorphism);
    }
    let x = q.source();
    let entry: Vec<Rat> = (0..x.len()).map(|a| q.d(a, a)).collect();
    let tree = Dendrogram::build(x);
    let mut best: Option<(Rat, usize, Vec<usize>)> = None;
    for v in tree.branch_nodes() {
        let h = tree.node(v).height;
        for &w in &tree.node(v).children {
            let members = &tree.node(w).members;
            if members.iter().all(|&a| entry[a] >= h) {
                let better = match &best {
                    None => true,
                    Some((bh, bl, _)) => h > *bh || (h == *bh && members[0] < *bl),
                };
                if better {
                    best = Some((h, members[0], members.clone()));
                }
            }
        }
    }
    let (_, _, removed) = best.expect("a non-near-automorphic idempotent has a missing branch");
    let kept: Vec<usize> = (0..x.len()).filter(|a| !removed.contains(a)).collect();
    let subspace = x.restrict(&kept);
    let delta = (0..x.len()).map(|a| kept.iter().map(|&b| entry[a].max(x.d(a, b))).collect()).collect();
    let t = Morphism::from_delta(x.clone(), subspace.clone(), delta)?;
    debug_assert_eq!(&t.compose(&t.involution())?, q);
    Ok(IdempotentFactor { kept, subspace, t })
}

/// All morphisms `X -> Y` whose cross distances lie in `values`.
pub fn enumerate_morphisms(x: &UltraSpace, y: &UltraSpace, values: &[Rat]) -> Vec<Morphism> {
    let (nx, ny) = (x.len(), y.len());
    let mut delta = vec![vec![Rat::ZERO; ny]; nx];
    let mut out = Vec::new();
    fill(x, y, values, &mut delta, 0, &mut out);
    out.sort_by(|a, b| a.delta().cmp(b.delta()));
    out
}

fn fill(x: &UltraSpace, y: &UltraSpace, values: &[Rat], delta: &mut Vec<Vec<Rat>>, cell: usize, out: &mut Vec<Morphism>) {
    let (nx, ny) = (x.len(), y.len());
    if cell == nx * ny {
        if let Ok(m) = Morphism::from_delta(x.clone(), y.clone(), delta.clone()) {
            out.push(m);
        }
        return;
    }
    let (a, b) = (cell / ny, cell % ny);
    for &v in values {
        let column_ok = (0..a).all(|a2| {
            let (dx, d2) = (x.d(a, a2), delta[a2][b]);
            v <= dx.max(d2) && dx <= v.max(d2) && d2 <= v.max(dx)
        });
        let row_ok = (0..b).all(|b2| {
            let (dy, d2) = (y.d(b, b2), delta[a][b2]);
            v <= dy.max(d2) && dy <= v.max(d2) && d2 <= v.max(dy)
        });
        if column_ok && row_ok {
            delta[a][b] = v;
            fill(x, y, values, delta, cell + 1, out);
        }
    }
}

/// Every endomorphism of `X` whose amalgam has spectrum inside `Λ`.
pub fn enumerate_endomorphisms(x: &UltraSpace, lambda: &LambdaSpec) -> Vec<Morphism> {
    let mut values = vec![Rat::ZERO];
    values.extend(lambda.values.iter().copied());
    enumerate_morphisms(x, x, &values)
}
