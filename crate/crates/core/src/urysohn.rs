//! A concrete universal ultrametric space: finitely supported integer
//! functions on the value set, with distance the largest value where two
//! functions differ. Balls, shifts, one-point extension, embeddings of
//! finite spaces, the maps `Θ_j`, and stabilization of double cosets.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{morphism_from_configuration, AmalgamError, Morphism};
use crate::rat::Rat;
use crate::ultracore::{BallKind, LambdaSpec, UltraError, UltraSpace};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// The point is not in the source ball of a shift.
    #[error("point is not in the source ball")]
    NotInBall,
    /// Shifts run between balls of the same kind and radius.
    #[error("balls differ in kind or radius")]
    BallMismatch,
    /// A distance or support key is outside the value set.
    #[error("{0} is not in the value set")]
    SpectrumViolation(Rat),
    /// Prescribed distances contradict the existing points.
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    /// The double cosets did not settle on the product before the bound.
    #[error("no stabilization up to j = {0}")]
    NoStabilizationWithinBound(u64),
    /// `Θ_j` needs a nonempty fixed set.
    #[error("the fixed set of Θ is empty")]
    EmptyFixedSet,
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error(transparent)]
    Space(#[from] UltraError),
}

/// A finitely supported function from the value set to the integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NguyenPoint {
    support: BTreeMap<Rat, i64>,
}

impl NguyenPoint {
    pub fn zero() -> NguyenPoint {
        NguyenPoint::default()
    }

    pub fn from_pairs(pairs: &[(Rat, i64)]) -> NguyenPoint {
        NguyenPoint { support: pairs.iter().copied().filter(|&(_, v)| v != 0).collect() }
    }

    pub fn get(&self, level: Rat) -> i64 {
        self.support.get(&level).copied().unwrap_or(0)
    }

    pub fn with_value(&self, level: Rat, value: i64) -> NguyenPoint {
        let mut support = self.support.clone();
        if value == 0 {
            support.remove(&level);
        } else {
            support.insert(level, value);
        }
        NguyenPoint { support }
    }

    pub fn support(&self) -> &BTreeMap<Rat, i64> {
        &self.support
    }

    /// Restriction to levels `> r` (or `>= r` when `inclusive`).
    pub fn restrict(&self, r: Rat, inclusive: bool) -> BTreeMap<Rat, i64> {
        self.support
            .iter()
            .filter(|(k, _)| if inclusive { **k >= r } else { **k > r })
            .map(|(k, v)| (*k, *v))
            .collect()
    }

    pub fn check_lambda(&self, lambda: &LambdaSpec) -> Result<(), ModelError> {
        match self.support.keys().find(|k| !lambda.contains(**k)) {
            Some(k) => Err(ModelError::SpectrumViolation(*k)),
            None => Ok(()),
        }
    }

    fn from_restriction(nu: &BTreeMap<Rat, i64>) -> NguyenPoint {
        NguyenPoint { support: nu.clone() }
    }
}

impl Serialize for NguyenPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            support: Vec<(i64, i64, i64)>,
        }
        Wire { support: self.support.iter().map(|(k, v)| (k.numer(), k.denom(), *v)).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NguyenPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<NguyenPoint, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            support: Vec<(i64, i64, i64)>,
        }
        let w = Wire::deserialize(deserializer)?;
        let mut pairs = Vec::with_capacity(w.support.len());
        for (n, d, v) in w.support {
            let k = Rat::new(n, d).map_err(serde::de::Error::custom)?;
            if !k.is_positive() {
                return Err(serde::de::Error::custom("support levels must be positive"));
            }
            pairs.push((k, v));
        }
        Ok(NguyenPoint::from_pairs(&pairs))
    }
}

/// Largest level where the two functions differ, or zero when they are equal.
pub fn distance(a: &NguyenPoint, b: &NguyenPoint) -> Rat {
    let keys: BTreeSet<Rat> = a.support.keys().chain(b.support.keys()).copied().collect();
    keys.into_iter().rev().find(|&k| a.get(k) != b.get(k)).unwrap_or(Rat::ZERO)
}

/// A ball of the model: the closed ball of radius `r` fixes the values on
/// levels `> r`, the open ball fixes them on levels `>= r`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ball {
    pub kind: BallKind,
    pub radius: Rat,
    pub nu: BTreeMap<Rat, i64>,
}

impl Ball {
    pub fn around(w: &NguyenPoint, kind: BallKind, radius: Rat) -> Ball {
        Ball { kind, radius, nu: w.restrict(radius, kind == BallKind::Open) }
    }

    pub fn contains(&self, w: &NguyenPoint) -> bool {
        w.restrict(self.radius, self.kind == BallKind::Open) == self.nu
    }

    /// The point of the ball that vanishes on all free levels.
    pub fn center(&self) -> NguyenPoint {
        NguyenPoint::from_restriction(&self.nu)
    }
}

/// Moves `w` from `b1` to `b2` by overwriting the fixed levels.
pub fn shift(b1: &Ball, b2: &Ball, w: &NguyenPoint) -> Result<NguyenPoint, ModelError> {
    if b1.kind != b2.kind || b1.radius != b2.radius {
        return Err(ModelError::BallMismatch);
    }
    if !b1.contains(w) {
        return Err(ModelError::NotInBall);
    }
    let inclusive = b1.kind == BallKind::Open;
    let mut support: BTreeMap<Rat, i64> = w
        .support
        .iter()
        .filter(|(k, _)| if inclusive { **k < b1.radius } else { **k <= b1.radius })
        .map(|(k, v)| (*k, *v))
        .collect();
    support.extend(b2.nu.iter().map(|(k, v)| (*k, *v)));
    Ok(NguyenPoint { support })
}

/// Labelled points of the model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    #[serde(default)]
    pub labels: Vec<String>,
    pub points: Vec<NguyenPoint>,
}

impl Configuration {
    /// Points labelled `{prefix}0`, `{prefix}1`, ...
    pub fn new(prefix: &str, points: Vec<NguyenPoint>) -> Configuration {
        let labels = (0..points.len()).map(|i| format!("{prefix}{i}")).collect();
        Configuration { labels, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Fills in default labels when the wire form omitted them.
    pub fn with_default_labels(mut self, prefix: &str) -> Configuration {
        if self.labels.is_empty() {
            self.labels = (0..self.points.len()).map(|i| format!("{prefix}{i}")).collect();
        }
        self
    }

    pub fn to_space(&self) -> Result<UltraSpace, UltraError> {
        let d = self.points.iter().map(|a| self.points.iter().map(|b| distance(a, b)).collect()).collect();
        UltraSpace::new(self.labels.clone(), d)
    }
}

/// A point at the prescribed distances from `embedded`: copy a nearest point
/// above the minimal distance `s` and put a fresh value at level `s`.
pub fn urysohn_extend(embedded: &[NguyenPoint], dists: &[Rat], lambda: &LambdaSpec) -> Result<NguyenPoint, ModelError> {
    if embedded.len() != dists.len() {
        return Err(ModelError::InconsistentInput(format!(
            "{} points but {} distances",
            embedded.len(),
            dists.len()
        )));
    }
    if embedded.is_empty() {
        return Ok(NguyenPoint::zero());
    }
    for &r in dists {
        if !lambda.contains(r) {
            return Err(ModelError::SpectrumViolation(r));
        }
    }
    for i in 0..embedded.len() {
        for j in 0..embedded.len() {
            let dij = distance(&embedded[i], &embedded[j]);
            if dists[i] > dij.max(dists[j]) || dij > dists[i].max(dists[j]) {
                return Err(ModelError::InconsistentInput(format!(
                    "distances to points {i} and {j} break the ultrametric inequality"
                )));
            }
        }
    }
    let s = *dists.iter().min().expect("nonempty");
    let nearest = &embedded[dists.iter().position(|&r| r == s).expect("minimum is attained")];
    let above = nearest.restrict(s, false);
    let used: BTreeSet<i64> =
        embedded.iter().filter(|p| p.restrict(s, false) == above).map(|p| p.get(s)).collect();
    let fresh = (1..).find(|v| !used.contains(v)).expect("integers are unbounded");
    let out = NguyenPoint::from_restriction(&above).with_value(s, fresh);
    debug_assert!(embedded.iter().zip(dists).all(|(p, &r)| distance(p, &out) == r));
    Ok(out)
}

/// Embeds a finite space point by point.
pub fn embed_space(space: &UltraSpace, lambda: &LambdaSpec) -> Result<Vec<NguyenPoint>, ModelError> {
    let mut out: Vec<NguyenPoint> = Vec::with_capacity(space.len());
    for i in 0..space.len() {
        let dists: Vec<Rat> = (0..i).map(|j| space.d(i, j)).collect();
        out.push(urysohn_extend(&out, &dists, lambda)?);
    }
    Ok(out)
}

/// `count` points pairwise at distance `level`, the first being `x` itself.
pub fn ismagilov_family(x: &NguyenPoint, level: Rat, count: usize) -> Vec<NguyenPoint> {
    let base = x.get(level);
    (0..count as i64).map(|k| x.with_value(level, base + k)).collect()
}

/// Exchanges the values `a` and `b` at `level` among points whose values above
/// `level` equal `above`. Every such swap is an isometry of the model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermSwap {
    pub level: Rat,
    pub above: BTreeMap<Rat, i64>,
    pub a: i64,
    pub b: i64,
}

/// A product of germ swaps, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isometry {
    pub swaps: Vec<GermSwap>,
}

impl Isometry {
    pub fn apply(&self, w: &NguyenPoint) -> NguyenPoint {
        let mut cur = w.clone();
        for s in &self.swaps {
            if cur.restrict(s.level, false) == s.above {
                let v = cur.get(s.level);
                if v == s.a {
                    cur = cur.with_value(s.level, s.b);
                } else if v == s.b {
                    cur = cur.with_value(s.level, s.a);
                }
            }
        }
        cur
    }

    pub fn inverse(&self) -> Isometry {
        Isometry { swaps: self.swaps.iter().rev().cloned().collect() }
    }
}

/// The maps `Θ_j` fixing a finite set `Y`. A point `w` outside `Y` first meets
/// `T(Y)` at height `h = min d(w, Y)`; its value at `h` is renumbered by the
/// order-preserving bijection from the unoccupied integers onto `ℤ`, moved by
/// `j`, and mapped back.
#[derive(Clone, Debug)]
pub struct ThetaIndexer {
    fixed: Vec<NguyenPoint>,
}

impl ThetaIndexer {
    pub fn new(fixed: Vec<NguyenPoint>) -> Result<ThetaIndexer, ModelError> {
        if fixed.is_empty() {
            return Err(ModelError::EmptyFixedSet);
        }
        Ok(ThetaIndexer { fixed })
    }

    pub fn fixed(&self) -> &[NguyenPoint] {
        &self.fixed
    }

    pub fn apply(&self, j: i64, w: &NguyenPoint) -> NguyenPoint {
        let h = self.fixed.iter().map(|y| distance(w, y)).min().expect("fixed set is nonempty");
        if h.is_zero() {
            return w.clone();
        }
        let above = w.restrict(h, false);
        let mut occupied: Vec<i64> =
            self.fixed.iter().filter(|y| y.restrict(h, false) == above).map(|y| y.get(h)).collect();
        occupied.sort_unstable();
        occupied.dedup();
        let rank = rank_excluding(&occupied, w.get(h));
        w.with_value(h, unrank_excluding(&occupied, rank + j))
    }
}

/// `c - #{o in occupied : o < c}`: an order isomorphism `ℤ \ occupied -> ℤ`.
fn rank_excluding(occupied: &[i64], c: i64) -> i64 {
    c - occupied.iter().filter(|&&o| o < c).count() as i64
}

fn unrank_excluding(occupied: &[i64], k: i64) -> i64 {
    let mut n = k;
    for &o in occupied {
        if o <= n {
            n += 1;
        } else {
            break;
        }
    }
    n
}

pub fn theta_apply(fixed: &[NguyenPoint], j: i64, w: &NguyenPoint) -> Result<NguyenPoint, ModelError> {
    Ok(ThetaIndexer::new(fixed.to_vec())?.apply(j, w))
}

/// The morphism `X -> Z` of the double coset of an isometry `g`, given by the images `gX`.
pub fn double_coset(x: &Configuration, z: &Configuration, images: &[NguyenPoint]) -> Result<Morphism, ModelError> {
    Ok(morphism_from_configuration(x, z, images)?)
}

/// Outcome of [`theta_stabilization`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilization {
    /// Smallest `J` with the double coset equal to the limit for `J <= j <= j_max`.
    pub j: u64,
    pub limit: Morphism,
    /// Double coset of `g1 ∘ Θ_j ∘ g2` for `j = 1..=j_max`.
    pub sequence: Vec<Morphism>,
}

/// Follows the double cosets of `g1 ∘ Θ_j ∘ g2` (with `Θ_j` fixing `Y`) and
/// compares them with the product of the cosets of `g2` (from `X` to `Y`) and
/// `g1` (from `Y` to `Z`). Since `d(g1 Θ_j g2 x, z) = d(Θ_j g2 x, g1⁻¹ z)`,
/// `g2` is given by the images of `X` and `g1` by the preimages of `Z`.
pub fn theta_stabilization(
    x: &Configuration,
    y: &Configuration,
    z: &Configuration,
    g2_images: &[NguyenPoint],
    g1_preimages: &[NguyenPoint],
    j_max: u64,
) -> Result<Stabilization, ModelError> {
    let theta = ThetaIndexer::new(y.points.clone())?;
    let z_space = z.to_space()?;
    if g1_preimages.len() != z.len() {
        return Err(ModelError::InconsistentInput("one preimage per point of Z is required".into()));
    }
    for i in 0..z.len() {
        for j in 0..i {
            if distance(&g1_preimages[i], &g1_preimages[j]) != z_space.d(i, j) {
                return Err(AmalgamError::NotIsometric(i, j).into());
            }
        }
    }
    let first = double_coset(x, y, g2_images)?;
    let second_delta = y.points.iter().map(|p| g1_preimages.iter().map(|q| distance(p, q)).collect()).collect();
    let second = Morphism::from_delta(y.to_space()?, z_space.clone(), second_delta)?;
    let limit = first.compose(&second)?;
    let x_space = x.to_space()?;
    let mut sequence = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max as i64 {
        let moved: Vec<NguyenPoint> = g2_images.iter().map(|w| theta.apply(j, w)).collect();
        let delta = moved.iter().map(|w| g1_preimages.iter().map(|q| distance(w, q)).collect()).collect();
        sequence.push(Morphism::from_delta(x_space.clone(), z_space.clone(), delta)?);
    }
    match sequence.iter().rposition(|m| *m != limit) {
        Some(last) if last + 1 == sequence.len() => Err(ModelError::NoStabilizationWithinBound(j_max)),
        Some(last) => Ok(Stabilization { j: last as u64 + 2, limit, sequence }),
        None if sequence.is_empty() => Err(ModelError::NoStabilizationWithinBound(j_max)),
        None => Ok(Stabilization { j: 1, limit, sequence }),
    }
}
