//! Amalgams of ultrametric spaces, morphisms given by amalgams, and the
//! equivalent description by partial isomorphisms of trees.

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dendro::{highest_point, CanonCode, Dendrogram, TreePoint};
use crate::rat::Rat;
use crate::ultracore::{UltraError, UltraSpace};
use crate::urysohn::{self, Configuration, NguyenPoint};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    /// Gluing along an empty overlap is refused.
    #[error("no amalgam without a common subspace")]
    NoAmalgamWithoutOverlap,
    /// An overlap pair refers to a missing point.
    #[error("overlap pair ({0},{1}) is out of range")]
    OverlapIndex(usize, usize),
    /// The overlap does not pair points one-to-one.
    #[error("overlap is not a bijection")]
    OverlapNotInjective,
    /// The two copies of the overlap carry different distances.
    #[error("overlap is not isometric: d_X({x1},{x2}) != d_Y({y1},{y2})")]
    OverlapNotIsometric { x1: usize, x2: usize, y1: usize, y2: usize },
    /// The cross-distance matrix has the wrong shape.
    #[error("cross-distance matrix must be {rows}x{cols}")]
    DeltaShape { rows: usize, cols: usize },
    /// The cross distances do not define an ultrametric amalgam.
    #[error("cross distances violate the ultrametric inequality: {0}")]
    InvalidDelta(String),
    /// Composition needs the target of the first to be the source of the second.
    #[error("target of the first morphism differs from the source of the second")]
    TargetSourceMismatch,
    /// A configuration map does not preserve distances.
    #[error("map does not preserve distances between points {0} and {1}")]
    NotIsometric(usize, usize),
    /// Configuration sizes disagree.
    #[error("expected {expected} image points, got {got}")]
    ImageCount { expected: usize, got: usize },
    /// The trees of composed partial isomorphisms do not match.
    #[error("trees do not match for composition")]
    TreeMismatch,
    /// The generator pairs do not define a height-preserving partial isometry.
    #[error("not a partial isomorphism of trees: {0}")]
    NotAPartialIso(String),
    #[error(transparent)]
    Space(#[from] UltraError),
}

/// Result of gluing `X` and `Y` along a common subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub space: UltraSpace,
    /// Position of each point of `X` in the glued space.
    pub left: Vec<usize>,
    /// Position of each point of `Y` in the glued space.
    pub right: Vec<usize>,
}

/// Glues `x` and `y` along `overlap` (pairs `(x index, y index)`), putting
/// `d(a,b) = min_z max(d_X(a,z), d_Y(z,b))` across the two sides. The glued
/// space lists all points of `x` first, then the points of `y` outside the overlap.
pub fn amalgamate(x: &UltraSpace, y: &UltraSpace, overlap: &[(usize, usize)]) -> Result<Amalgam, AmalgamError> {
    if overlap.is_empty() {
        return Err(AmalgamError::NoAmalgamWithoutOverlap);
    }
    let mut partner_of_y: Vec<Option<usize>> = vec![None; y.len()];
    let mut used_x = vec![false; x.len()];
    for &(a, b) in overlap {
        if a >= x.len() || b >= y.len() {
            return Err(AmalgamError::OverlapIndex(a, b));
        }
        if used_x[a] || partner_of_y[b].is_some() {
            return Err(AmalgamError::OverlapNotInjective);
        }
        used_x[a] = true;
        partner_of_y[b] = Some(a);
    }
    for &(x1, y1) in overlap {
        for &(x2, y2) in overlap {
            if x.d(x1, x2) != y.d(y1, y2) {
                return Err(AmalgamError::OverlapNotIsometric { x1, x2, y1, y2 });
            }
        }
    }
    let mut right = vec![0; y.len()];
    let mut extra: Vec<usize> = Vec::new();
    for b in 0..y.len() {
        right[b] = match partner_of_y[b] {
            Some(a) => a,
            None => {
                extra.push(b);
                x.len() + extra.len() - 1
            }
        };
    }
    let cross = |a: usize, b: usize| -> Rat {
        overlap
            .iter()
            .map(|&(zx, zy)| x.d(a, zx).max(y.d(zy, b)))
            .min()
            .expect("overlap is nonempty")
    };
    let n = x.len() + extra.len();
    let mut labels = x.labels.clone();
    labels.extend(extra.iter().map(|&b| y.labels[b].clone()));
    let mut dist = vec![vec![Rat::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = match (i < x.len(), j < x.len()) {
                (true, true) => x.d(i, j),
                (false, false) => y.d(extra[i - x.len()], extra[j - x.len()]),
                (true, false) => cross(i, extra[j - x.len()]),
                (false, true) => cross(j, extra[i - x.len()]),
            };
        }
    }
    Ok(Amalgam { space: UltraSpace { labels, dist, lambda: None }, left: (0..x.len()).collect(), right })
}

/// A morphism `X -> Y`: an ultrametric space `P` covered by isometric copies
/// of `X` and `Y`, up to isometry of `P`. Stored in canonical form: `P`
/// lists the image of `X` in order, then the points of `Y` not hit by `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    source: UltraSpace,
    target: UltraSpace,
    delta: Vec<Vec<Rat>>,
    amalgam: UltraSpace,
    embed_plus: Vec<usize>,
    embed_minus: Vec<usize>,
}

impl Morphism {
    /// Builds the morphism with cross distances `delta[x][y] = d(p+(x), p-(y))`.
    pub fn from_delta(source: UltraSpace, target: UltraSpace, delta: Vec<Vec<Rat>>) -> Result<Morphism, AmalgamError> {
        let (nx, ny) = (source.len(), target.len());
        if delta.len() != nx || delta.iter().any(|r| r.len() != ny) {
            return Err(AmalgamError::DeltaShape { rows: nx, cols: ny });
        }
        check_cross_distances(&source, &target, &delta)?;
        let mut embed_minus = vec![0; ny];
        let mut extra = Vec::new();
        for (b, slot) in embed_minus.iter_mut().enumerate() {
            *slot = match (0..nx).find(|&a| delta[a][b].is_zero()) {
                Some(a) => a,
                None => {
                    extra.push(b);
                    nx + extra.len() - 1
                }
            };
        }
        let n = nx + extra.len();
        let mut labels: Vec<String> = (0..nx)
            .map(|a| match (0..ny).find(|&b| delta[a][b].is_zero()) {
                Some(b) => format!("+{}|-{}", source.labels[a], target.labels[b]),
                None => format!("+{}", source.labels[a]),
            })
            .collect();
        labels.extend(extra.iter().map(|&b| format!("-{}", target.labels[b])));
        let mut dist = vec![vec![Rat::ZERO; n]; n];
        for i in 0..n {
            for j in 0..n {
                dist[i][j] = match (i < nx, j < nx) {
                    (true, true) => source.d(i, j),
                    (false, false) => target.d(extra[i - nx], extra[j - nx]),
                    (true, false) => delta[i][extra[j - nx]],
                    (false, true) => delta[j][extra[i - nx]],
                };
            }
        }
        Ok(Morphism {
            amalgam: UltraSpace { labels, dist, lambda: None },
            embed_plus: (0..nx).collect(),
            embed_minus,
            source,
            target,
            delta,
        })
    }

    pub fn identity(x: &UltraSpace) -> Morphism {
        Morphism::from_delta(x.clone(), x.clone(), x.dist.clone()).expect("a space amalgamates with itself")
    }

    pub fn source(&self) -> &UltraSpace {
        &self.source
    }

    pub fn target(&self) -> &UltraSpace {
        &self.target
    }

    pub fn amalgam(&self) -> &UltraSpace {
        &self.amalgam
    }

    pub fn embed_plus(&self) -> &[usize] {
        &self.embed_plus
    }

    pub fn embed_minus(&self) -> &[usize] {
        &self.embed_minus
    }

    /// The cross-distance matrix `d(p+(x), p-(y))`.
    pub fn delta(&self) -> &Vec<Vec<Rat>> {
        &self.delta
    }

    pub fn d(&self, x: usize, y: usize) -> Rat {
        self.delta[x][y]
    }

    /// Composition "first `self`, then `next`": glue the two amalgams along
    /// the middle space and keep the images of the outer spaces.
    pub fn compose(&self, next: &Morphism) -> Result<Morphism, AmalgamError> {
        if self.target != next.source {
            return Err(AmalgamError::TargetSourceMismatch);
        }
        let overlap: Vec<(usize, usize)> =
            (0..self.target.len()).map(|y| (self.embed_minus[y], next.embed_plus[y])).collect();
        let glued = amalgamate(&self.amalgam, &next.amalgam, &overlap)?;
        let delta = (0..self.source.len())
            .map(|x| {
                (0..next.target.len())
                    .map(|z| glued.space.d(glued.left[self.embed_plus[x]], glued.right[next.embed_minus[z]]))
                    .collect()
            })
            .collect();
        Morphism::from_delta(self.source.clone(), next.target.clone(), delta)
    }

    /// Swaps the roles of source and target.
    pub fn involution(&self) -> Morphism {
        let delta = (0..self.target.len())
            .map(|y| (0..self.source.len()).map(|x| self.delta[x][y]).collect())
            .collect();
        Morphism::from_delta(self.target.clone(), self.source.clone(), delta).expect("transpose of a valid amalgam")
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    /// Dendrogram code of `P` with every leaf tagged by the labels mapped onto it.
    pub fn canonical_code(&self) -> CanonCode {
        let d = Dendrogram::build(&self.amalgam);
        d.code_with(d.root(), &|i| self.amalgam.labels[i].clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source,
            "target": self.target,
            "delta": self.delta,
            "amalgam": {
                "space": self.amalgam,
                "plus": self.embed_plus,
                "minus": self.embed_minus,
            },
        })
    }

    pub fn from_json(v: &Value) -> Result<Morphism, String> {
        #[derive(Deserialize)]
        struct Wire {
            source: UltraSpace,
            target: UltraSpace,
            delta: Vec<Vec<Rat>>,
        }
        let w: Wire = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        w.source.validate().map_err(|e| e.to_string())?;
        w.target.validate().map_err(|e| e.to_string())?;
        Morphism::from_delta(w.source, w.target, w.delta).map_err(|e| e.to_string())
    }
}

/// Checks that `X`, `Y` and the cross distances form an ultrametric
/// pseudometric on the disjoint union (zero cross distance glues points).
fn check_cross_distances(x: &UltraSpace, y: &UltraSpace, delta: &[Vec<Rat>]) -> Result<(), AmalgamError> {
    let (nx, ny) = (x.len(), y.len());
    for row in delta {
        if let Some(v) = row.iter().find(|v| v.is_negative()) {
            return Err(AmalgamError::InvalidDelta(format!("negative cross distance {v}")));
        }
    }
    for a in 0..nx {
        for b in 0..ny {
            let dab = delta[a][b];
            for a2 in 0..nx {
                let (dxx, d2) = (x.d(a, a2), delta[a2][b]);
                if dab > dxx.max(d2) || dxx > dab.max(d2) {
                    return Err(AmalgamError::InvalidDelta(format!(
                        "points {} and {} of the source against {} of the target",
                        x.labels[a], x.labels[a2], y.labels[b]
                    )));
                }
            }
            for b2 in 0..ny {
                let (dyy, d2) = (y.d(b, b2), delta[a][b2]);
                if dab > dyy.max(d2) || dyy > dab.max(d2) {
                    return Err(AmalgamError::InvalidDelta(format!(
                        "point {} of the source against {} and {} of the target",
                        x.labels[a], y.labels[b], y.labels[b2]
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The morphism `X -> Y` read off from a position of `gX` next to `Y` inside the
/// universal space: `P = Y ∪ gX` with coinciding points identified.
pub fn morphism_from_configuration(
    x: &Configuration,
    y: &Configuration,
    images: &[NguyenPoint],
) -> Result<Morphism, AmalgamError> {
    if images.len() != x.len() {
        return Err(AmalgamError::ImageCount { expected: x.len(), got: images.len() });
    }
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            if urysohn::distance(&x.points[i], &x.points[j]) != urysohn::distance(&images[i], &images[j]) {
                return Err(AmalgamError::NotIsometric(i, j));
            }
        }
    }
    let delta = images.iter().map(|g| y.points.iter().map(|p| urysohn::distance(g, p)).collect()).collect();
    Morphism::from_delta(x.to_space()?, y.to_space()?, delta)
}

/// A height-preserving isometry between ascending subtrees of `T(X)` and
/// `T(Y)`, stored by the minimal points of its domain and their images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialTreeIso {
    source: UltraSpace,
    target: UltraSpace,
    pairs: Vec<(TreePoint, TreePoint)>,
}

impl PartialTreeIso {
    /// Builds the partial isomorphism generated by `pairs`, checking that the
    /// ascending paths above the generators merge at the same heights on both sides.
    pub fn new(source: UltraSpace, target: UltraSpace, pairs: Vec<(TreePoint, TreePoint)>) -> Result<PartialTreeIso, AmalgamError> {
        let pairs: Vec<(TreePoint, TreePoint)> = pairs
            .into_iter()
            .map(|(p, q)| {
                (TreePoint::normalized(&source, p.base, p.height), TreePoint::normalized(&target, q.base, q.height))
            })
            .collect();
        if pairs.is_empty() {
            return Err(AmalgamError::NotAPartialIso("no generators".into()));
        }
        for (p, q) in &pairs {
            if p.height != q.height || p.base >= source.len() || q.base >= target.len() {
                return Err(AmalgamError::NotAPartialIso(format!("pair at heights {} and {}", p.height, q.height)));
            }
        }
        for (p1, q1) in &pairs {
            for (p2, q2) in &pairs {
                if highest_point(&source, p1, p2).height != highest_point(&target, q1, q2).height {
                    return Err(AmalgamError::NotAPartialIso("ascending paths merge at different heights".into()));
                }
            }
        }
        let mut minimal: Vec<(TreePoint, TreePoint)> = Vec::new();
        for (i, (p, q)) in pairs.iter().enumerate() {
            let dominated = pairs
                .iter()
                .enumerate()
                .any(|(j, (p2, _))| j != i && p.is_above(p2, &source) && (p != p2 || j < i));
            if !dominated {
                minimal.push((*p, *q));
            }
        }
        minimal.sort();
        Ok(PartialTreeIso { source, target, pairs: minimal })
    }

    pub fn source(&self) -> &UltraSpace {
        &self.source
    }

    pub fn target(&self) -> &UltraSpace {
        &self.target
    }

    /// Minimal points of the domain with their images, sorted.
    pub fn generators(&self) -> &[(TreePoint, TreePoint)] {
        &self.pairs
    }

    pub fn apply(&self, p: &TreePoint) -> Option<TreePoint> {
        let p = TreePoint::normalized(&self.source, p.base, p.height);
        self.pairs.iter().find(|(g, _)| p.is_above(g, &self.source)).map(|(_, img)| img.lift(&self.target, p.height))
    }

    pub fn preimage(&self, q: &TreePoint) -> Option<TreePoint> {
        let q = TreePoint::normalized(&self.target, q.base, q.height);
        self.pairs.iter().find(|(_, img)| q.is_above(img, &self.target)).map(|(g, _)| g.lift(&self.source, q.height))
    }

    pub fn inverse(&self) -> PartialTreeIso {
        let pairs = self.pairs.iter().map(|(p, q)| (*q, *p)).collect();
        PartialTreeIso::new(self.target.clone(), self.source.clone(), pairs).expect("inverse of a partial isomorphism")
    }
}

/// `psi ∘ phi`, defined on `phi⁻¹(im phi ∩ dom psi)`.
pub fn compose_partial(psi: &PartialTreeIso, phi: &PartialTreeIso) -> Result<PartialTreeIso, AmalgamError> {
    if phi.target != psi.source {
        return Err(AmalgamError::TreeMismatch);
    }
    let middle = &phi.target;
    let mut pairs = Vec::new();
    for (_, u) in &phi.pairs {
        for (v, _) in &psi.pairs {
            let w = highest_point(middle, u, v);
            let pre = phi.preimage(&w).expect("join lies in the image");
            let img = psi.apply(&w).expect("join lies in the domain");
            pairs.push((pre, img));
        }
    }
    PartialTreeIso::new(phi.source.clone(), psi.target.clone(), pairs)
}

/// The identity on `T(p+X) ∩ T(p-Y)` inside `T(P)`, read as a map `T(X) -> T(Y)`.
pub fn to_partial_iso(p: &Morphism) -> PartialTreeIso {
    let pairs = (0..p.source.len())
        .map(|x| {
            let (t, y) = (0..p.target.len()).map(|y| (p.delta[x][y], y)).min().expect("target is nonempty");
            (TreePoint::normalized(&p.source, x, t), TreePoint::normalized(&p.target, y, t))
        })
        .collect();
    PartialTreeIso::new(p.source.clone(), p.target.clone(), pairs).expect("a morphism yields a partial isomorphism")
}

/// Inverse of [`to_partial_iso`]: the ascending path of `x` enters the domain at
/// height `t_x` over some `y_x`, and then `d(p+x, p-y) = max(t_x, d(y_x, y))`.
pub fn from_partial_iso(phi: &PartialTreeIso) -> Result<Morphism, AmalgamError> {
    let (x, y) = (&phi.source, &phi.target);
    let delta = (0..x.len())
        .map(|a| {
            let (t, img) = phi
                .pairs
                .iter()
                .map(|(g, img)| (g.height.max(x.d(a, g.base)), img.base))
                .min()
                .expect("generators are nonempty");
            (0..y.len()).map(|b| t.max(y.d(img, b))).collect()
        })
        .collect();
    Morphism::from_delta(x.clone(), y.clone(), delta)
}
