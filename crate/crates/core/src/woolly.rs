//! Woolly subtrees of the tree of the model space, presented by finitely many
//! perfect balls, and height-preserving partial isomorphisms between them.
//!
//! A closed ball `B^c(w, r)` with `r ∈ Λ ∪ {0}` stands for the tree node at
//! height `r`; an open ball `B^o(w, r)` with `r ∈ Λ` stands for the down-germ at
//! the vertex `B^c(w, r)` pointing to the branch with value `w(r)`.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};
use thiserror::Error;

use crate::rat::Rat;
use crate::ultracore::{BallKind, LambdaSpec};
use crate::urysohn::{distance, shift, Ball, Isometry, ModelError, NguyenPoint, ThetaIndexer};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum WoollyError {
    /// A closure needs at least one generator.
    #[error("no generating balls")]
    EmptyGenerators,
    /// The ball is not a perfect ball of the model.
    #[error("ball {kind}-{radius} is not perfect for this value set")]
    NotPerfect { kind: BallKind, radius: Rat },
    /// A ball fixes values on levels outside the value set.
    #[error("ball data uses level {0}, which is not an admissible value above the radius")]
    NotInModel(Rat),
    /// The operands live over different value sets.
    #[error("operands use different value sets")]
    AmbientMismatch,
    /// The action is not known on some element of the domain.
    #[error("action is undetermined on the ball of radius {0}")]
    InsufficientData(Rat),
    /// A map fails to be a height-preserving isomorphism of woolly subtrees.
    #[error("not a partial isomorphism: {0}")]
    NotAPartialIso(String),
    /// A set of balls fails the closure conditions.
    #[error("not a woolly subtree: {0}")]
    NotWoolly(String),
    /// Points given for a partial action do not preserve distances.
    #[error("the given point images do not preserve distances")]
    InconsistentInput,
    /// The JSON input is malformed.
    #[error("bad input: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn node(level: Rat, w: &BTreeMap<Rat, i64>) -> Ball {
    Ball { kind: BallKind::Closed, radius: level, nu: w.iter().filter(|(k, _)| **k > level).map(|(k, v)| (*k, *v)).collect() }
}

fn germ(level: Rat, w: &BTreeMap<Rat, i64>) -> Ball {
    Ball { kind: BallKind::Open, radius: level, nu: w.iter().filter(|(k, _)| **k >= level).map(|(k, v)| (*k, *v)).collect() }
}

fn next_level(lambda: &LambdaSpec, r: Rat) -> Option<Rat> {
    lambda.values.iter().copied().find(|&l| l > r)
}

/// The parent node of a node, if it is not the root.
pub fn parent(lambda: &LambdaSpec, b: &Ball) -> Option<Ball> {
    next_level(lambda, b.radius).map(|l| node(l, &b.nu))
}

/// The germ at the parent node that points toward `b`.
pub fn germ_toward(lambda: &LambdaSpec, b: &Ball) -> Option<Ball> {
    next_level(lambda, b.radius).map(|l| germ(l, &b.nu))
}

/// The vertex a germ is attached to.
pub fn vertex_of(g: &Ball) -> Ball {
    node(g.radius, &g.nu)
}

pub fn root(lambda: &LambdaSpec) -> Ball {
    node(lambda.max_value(), &BTreeMap::new())
}

fn check_in_model(lambda: &LambdaSpec, b: &Ball) -> Result<(), WoollyError> {
    let perfect = match b.kind {
        BallKind::Closed => lambda.with_zero().contains(&b.radius),
        BallKind::Open => lambda.contains(b.radius) && lambda.is_left_limit(crate::Radius::Finite(b.radius)),
    };
    if !perfect {
        return Err(WoollyError::NotPerfect { kind: b.kind, radius: b.radius });
    }
    for &k in b.nu.keys() {
        let above = if b.kind == BallKind::Open { k >= b.radius } else { k > b.radius };
        if !above || !lambda.contains(k) {
            return Err(WoollyError::NotInModel(k));
        }
    }
    Ok(())
}

/// A finite woolly subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WoollySubtree {
    lambda: LambdaSpec,
    elements: BTreeSet<Ball>,
}

impl WoollySubtree {
    /// Checks the closure conditions on an explicit set of nodes and germs.
    pub fn from_elements(lambda: &LambdaSpec, elements: BTreeSet<Ball>) -> Result<WoollySubtree, WoollyError> {
        if !elements.contains(&root(lambda)) {
            return Err(WoollyError::NotWoolly("the root is missing".into()));
        }
        for b in &elements {
            match b.kind {
                BallKind::Closed => {
                    if !lambda.with_zero().contains(&b.radius) {
                        return Err(WoollyError::NotWoolly(format!("node at height {} is not a vertex level", b.radius)));
                    }
                    let up = [parent(lambda, b), germ_toward(lambda, b)];
                    if up.iter().flatten().any(|p| !elements.contains(p)) {
                        return Err(WoollyError::NotWoolly(format!("ascending path from height {} is incomplete", b.radius)));
                    }
                }
                BallKind::Open => {
                    if !lambda.contains(b.radius) {
                        return Err(WoollyError::NotWoolly(format!("germ at height {} is not at a vertex", b.radius)));
                    }
                    if !elements.contains(&vertex_of(b)) {
                        return Err(WoollyError::NotWoolly(format!("germ at height {} lacks its vertex", b.radius)));
                    }
                }
            }
        }
        Ok(WoollySubtree { lambda: lambda.clone(), elements })
    }

    pub fn lambda(&self) -> &LambdaSpec {
        &self.lambda
    }

    pub fn elements(&self) -> &BTreeSet<Ball> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, b: &Ball) -> bool {
        self.elements.contains(b)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Ball> {
        self.elements.iter().filter(|b| b.kind == BallKind::Closed)
    }

    pub fn germs(&self) -> impl Iterator<Item = &Ball> {
        self.elements.iter().filter(|b| b.kind == BallKind::Open)
    }

    pub fn is_subset(&self, other: &WoollySubtree) -> bool {
        self.elements.is_subset(&other.elements)
    }

    pub fn intersection(&self, other: &WoollySubtree) -> Result<WoollySubtree, WoollyError> {
        if self.lambda != other.lambda {
            return Err(WoollyError::AmbientMismatch);
        }
        WoollySubtree::from_elements(&self.lambda, self.elements.intersection(&other.elements).cloned().collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "balls": self.nodes().map(|b| json!({"radius": b.radius, "nu": nu_json(&b.nu)})).collect::<Vec<_>>(),
            "germs": self.germs().map(|g| {
                let v = vertex_of(g);
                json!({
                    "vertex": {"radius": v.radius, "nu": nu_json(&v.nu)},
                    "coordinate": g.nu.get(&g.radius).copied().unwrap_or(0),
                })
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(lambda: &LambdaSpec, v: &Value) -> Result<WoollySubtree, WoollyError> {
        let mut elements = BTreeSet::new();
        for b in v["balls"].as_array().ok_or_else(|| WoollyError::Parse("missing balls".into()))? {
            let (radius, nu) = radius_nu(b)?;
            elements.insert(Ball { kind: BallKind::Closed, radius, nu });
        }
        if let Some(gs) = v["germs"].as_array() {
            for g in gs {
                let (radius, mut nu) = radius_nu(&g["vertex"])?;
                let c = g["coordinate"].as_i64().ok_or_else(|| WoollyError::Parse("germ coordinate".into()))?;
                if c != 0 {
                    nu.insert(radius, c);
                }
                elements.insert(Ball { kind: BallKind::Open, radius, nu });
            }
        }
        WoollySubtree::from_elements(lambda, elements)
    }
}

fn nu_json(nu: &BTreeMap<Rat, i64>) -> Value {
    json!(nu.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>())
}

fn radius_nu(v: &Value) -> Result<(Rat, BTreeMap<Rat, i64>), WoollyError> {
    let radius: Rat = serde_json::from_value(v["radius"].clone()).map_err(|e| WoollyError::Parse(e.to_string()))?;
    let pairs: Vec<(Rat, i64)> = match &v["nu"] {
        Value::Null => Vec::new(),
        other => serde_json::from_value(other.clone()).map_err(|e| WoollyError::Parse(e.to_string()))?,
    };
    Ok((radius, pairs.into_iter().filter(|&(_, c)| c != 0).collect()))
}

/// Smallest woolly subtree containing the given perfect balls.
pub fn dilative_closure(lambda: &LambdaSpec, balls: &[Ball]) -> Result<WoollySubtree, WoollyError> {
    if balls.is_empty() {
        return Err(WoollyError::EmptyGenerators);
    }
    for b in balls {
        check_in_model(lambda, b)?;
    }
    close_elements(lambda, balls)
}

/// Smallest woolly subtree containing arbitrary nodes and germs, including
/// germs at vertices that are not left limits.
pub fn close_elements(lambda: &LambdaSpec, balls: &[Ball]) -> Result<WoollySubtree, WoollyError> {
    let mut elements = BTreeSet::new();
    elements.insert(root(lambda));
    for b in balls {
        let start = match b.kind {
            BallKind::Closed => b.clone(),
            BallKind::Open => {
                if !lambda.contains(b.radius) {
                    return Err(WoollyError::NotPerfect { kind: b.kind, radius: b.radius });
                }
                elements.insert(b.clone());
                vertex_of(b)
            }
        };
        let mut cur = Some(start);
        while let Some(n) = cur {
            if let Some(g) = germ_toward(lambda, &n) {
                elements.insert(g);
            }
            cur = parent(lambda, &n);
            elements.insert(n);
        }
    }
    WoollySubtree::from_elements(lambda, elements)
}

/// A height-preserving isomorphism from one woolly subtree onto another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaElement {
    lambda: LambdaSpec,
    map: BTreeMap<Ball, Ball>,
}

impl GammaElement {
    pub fn new(lambda: &LambdaSpec, map: BTreeMap<Ball, Ball>) -> Result<GammaElement, WoollyError> {
        let dom = WoollySubtree::from_elements(lambda, map.keys().cloned().collect())?;
        let image: BTreeSet<Ball> = map.values().cloned().collect();
        if image.len() != map.len() {
            return Err(WoollyError::NotAPartialIso("two elements share an image".into()));
        }
        WoollySubtree::from_elements(lambda, image)?;
        for (a, b) in &map {
            if a.kind != b.kind || a.radius != b.radius {
                return Err(WoollyError::NotAPartialIso(format!("height or type changes at {}", a.radius)));
            }
        }
        let get = |b: &Ball| map.get(b).cloned();
        for n in dom.nodes() {
            let m = &map[n];
            if parent(lambda, n).map(|p| get(&p)) != parent(lambda, m).map(Some)
                || germ_toward(lambda, n).map(|g| get(&g)) != germ_toward(lambda, m).map(Some)
            {
                return Err(WoollyError::NotAPartialIso(format!("ascending path breaks at height {}", n.radius)));
            }
        }
        for g in dom.germs() {
            if get(&vertex_of(g)) != Some(vertex_of(&map[g])) {
                return Err(WoollyError::NotAPartialIso(format!("germ at {} leaves its vertex", g.radius)));
            }
        }
        Ok(GammaElement { lambda: lambda.clone(), map })
    }

    pub fn identity(w: &WoollySubtree) -> GammaElement {
        GammaElement { lambda: w.lambda.clone(), map: w.elements.iter().map(|b| (b.clone(), b.clone())).collect() }
    }

    pub fn lambda(&self) -> &LambdaSpec {
        &self.lambda
    }

    pub fn pairs(&self) -> &BTreeMap<Ball, Ball> {
        &self.map
    }

    pub fn apply(&self, b: &Ball) -> Option<&Ball> {
        self.map.get(b)
    }

    pub fn domain(&self) -> WoollySubtree {
        WoollySubtree { lambda: self.lambda.clone(), elements: self.map.keys().cloned().collect() }
    }

    pub fn image(&self) -> WoollySubtree {
        WoollySubtree { lambda: self.lambda.clone(), elements: self.map.values().cloned().collect() }
    }

    /// The inverse partial map.
    pub fn adjoint(&self) -> GammaElement {
        GammaElement { lambda: self.lambda.clone(), map: self.map.iter().map(|(a, b)| (b.clone(), a.clone())).collect() }
    }

    pub fn is_identity_restriction(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }

    pub fn to_json(&self) -> Value {
        let ball = |b: &Ball| json!({"kind": b.kind.to_string(), "radius": b.radius, "nu": nu_json(&b.nu)});
        json!({"pairs": self.map.iter().map(|(a, b)| json!([ball(a), ball(b)])).collect::<Vec<_>>()})
    }
}

/// `b ∘ a`, defined on `a⁻¹(im a ∩ dom b)`.
pub fn compose_gamma(b: &GammaElement, a: &GammaElement) -> Result<GammaElement, WoollyError> {
    if a.lambda != b.lambda {
        return Err(WoollyError::AmbientMismatch);
    }
    let map: BTreeMap<Ball, Ball> =
        a.map.iter().filter_map(|(x, y)| b.map.get(y).map(|z| (x.clone(), z.clone()))).collect();
    let gens: Vec<Ball> = map.keys().cloned().collect();
    let closed = close_elements(&a.lambda, &gens)?;
    if closed.elements.len() != map.len() {
        return Err(WoollyError::NotAPartialIso("domain of the product is not closed".into()));
    }
    GammaElement::new(&a.lambda, map)
}

/// An isometry of the model, possibly known only on part of it.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelAction {
    /// A product of germ swaps, defined everywhere.
    Isometry(Isometry),
    /// Known only on finitely many points.
    Points { from: Vec<NguyenPoint>, to: Vec<NguyenPoint> },
    /// The shift from the first ball onto the second, known on the first ball.
    Shift(Ball, Ball),
    /// `Θ_j` fixing the given points, defined everywhere.
    Theta { fixed: Vec<NguyenPoint>, j: i64 },
}

impl ModelAction {
    fn image(&self, b: &Ball) -> Result<Ball, WoollyError> {
        let c = b.center();
        let moved = match self {
            ModelAction::Isometry(g) => g.apply(&c),
            ModelAction::Theta { fixed, j } => ThetaIndexer::new(fixed.clone())?.apply(*j, &c),
            ModelAction::Points { from, to } => {
                let i = from.iter().position(|p| b.contains(p)).ok_or(WoollyError::InsufficientData(b.radius))?;
                return Ok(Ball::around(&to[i], b.kind, b.radius));
            }
            ModelAction::Shift(b1, b2) => {
                let rep = if b.contains(&b1.center()) {
                    b1.center()
                } else if b1.contains(&c) {
                    c
                } else {
                    return Err(WoollyError::InsufficientData(b.radius));
                };
                return Ok(Ball::around(&shift(b1, b2, &rep)?, b.kind, b.radius));
            }
        };
        Ok(Ball::around(&moved, b.kind, b.radius))
    }

    fn check(&self) -> Result<(), WoollyError> {
        if let ModelAction::Points { from, to } = self {
            if from.len() != to.len() {
                return Err(WoollyError::InconsistentInput);
            }
            for i in 0..from.len() {
                for j in 0..i {
                    if distance(&from[i], &from[j]) != distance(&to[i], &to[j]) {
                        return Err(WoollyError::InconsistentInput);
                    }
                }
            }
        }
        Ok(())
    }
}

/// The partial isomorphism with domain `w` induced by `g`.
pub fn group_shadow(g: &ModelAction, w: &WoollySubtree) -> Result<GammaElement, WoollyError> {
    g.check()?;
    let map = w.elements.iter().map(|b| Ok((b.clone(), g.image(b)?))).collect::<Result<_, WoollyError>>()?;
    GammaElement::new(&w.lambda, map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    fn l12() -> LambdaSpec {
        LambdaSpec::from_ints(&[1, 2])
    }

    fn p(pairs: &[(i64, i64)]) -> NguyenPoint {
        NguyenPoint::from_pairs(&pairs.iter().map(|&(l, v)| (r(l), v)).collect::<Vec<_>>())
    }

    #[test]
    fn root_chain_alone() {
        let w = dilative_closure(&l12(), &[root(&l12())]).unwrap();
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn one_closed_ball() {
        let b = Ball::around(&p(&[(1, 3), (2, 1)]), BallKind::Closed, r(1));
        let w = dilative_closure(&l12(), &[b.clone()]).unwrap();
        assert!(w.contains(&b));
        assert!(w.contains(&root(&l12())));
        assert!(w.contains(&Ball::around(&p(&[(2, 1)]), BallKind::Open, r(2))));
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn two_disjoint_balls_share_ancestors() {
        let a = Ball::around(&p(&[(2, 1)]), BallKind::Closed, r(1));
        let b = Ball::around(&p(&[(2, 2)]), BallKind::Closed, r(1));
        let w = dilative_closure(&l12(), &[a, b]).unwrap();
        assert_eq!(w.nodes().count(), 3);
        assert_eq!(w.germs().count(), 2);
    }

    #[test]
    fn rejects_bad_generators() {
        assert_eq!(dilative_closure(&l12(), &[]), Err(WoollyError::EmptyGenerators));
        let open = Ball::around(&p(&[]), BallKind::Open, r(2));
        assert!(matches!(dilative_closure(&l12(), &[open.clone()]), Err(WoollyError::NotPerfect { .. })));
        let odd = Ball::around(&p(&[]), BallKind::Closed, Rat::frac(3, 2));
        assert!(matches!(dilative_closure(&l12(), &[odd]), Err(WoollyError::NotPerfect { .. })));
        let mut limit = l12();
        limit.left_limits = vec![crate::Radius::Finite(r(2))];
        let w = dilative_closure(&limit, &[open.clone()]).unwrap();
        assert!(w.contains(&open));
    }

    #[test]
    fn closure_is_idempotent() {
        let a = Ball::around(&p(&[(1, 1), (2, 1)]), BallKind::Closed, r(0));
        let w = dilative_closure(&l12(), &[a]).unwrap();
        let again = close_elements(&l12(), &w.elements().iter().cloned().collect::<Vec<_>>()).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn json_round_trip() {
        let a = Ball::around(&p(&[(1, 1), (2, -1)]), BallKind::Closed, r(0));
        let w = dilative_closure(&l12(), &[a]).unwrap();
        assert_eq!(WoollySubtree::from_json(&l12(), &w.to_json()).unwrap(), w);
    }

    #[test]
    fn identity_shadow_and_composition() {
        let a = Ball::around(&p(&[(2, 1)]), BallKind::Closed, r(1));
        let b = Ball::around(&p(&[(2, 2)]), BallKind::Closed, r(1));
        let wa = dilative_closure(&l12(), &[a]).unwrap();
        let wb = dilative_closure(&l12(), &[b]).unwrap();
        let id = group_shadow(&ModelAction::Isometry(Isometry::default()), &wa).unwrap();
        assert_eq!(id, GammaElement::identity(&wa));
        let prod = compose_gamma(&GammaElement::identity(&wb), &id).unwrap();
        assert_eq!(prod, GammaElement::identity(&wa.intersection(&wb).unwrap()));
    }

    #[test]
    fn shift_moves_the_chain() {
        let b1 = Ball::around(&p(&[(2, 1)]), BallKind::Closed, r(1));
        let b2 = Ball::around(&p(&[(2, 5)]), BallKind::Closed, r(1));
        let w = dilative_closure(&l12(), &[b1.clone()]).unwrap();
        let s = group_shadow(&ModelAction::Shift(b1.clone(), b2.clone()), &w).unwrap();
        assert_eq!(s.apply(&b1), Some(&b2));
        assert_eq!(s.image(), dilative_closure(&l12(), &[b2]).unwrap());
        let other = Ball::around(&p(&[(2, 7)]), BallKind::Closed, r(1));
        let w2 = dilative_closure(&l12(), &[other]).unwrap();
        assert_eq!(
            group_shadow(&ModelAction::Shift(b1, Ball::around(&p(&[(2, 5)]), BallKind::Closed, r(1))), &w2),
            Err(WoollyError::InsufficientData(r(1)))
        );
    }

    #[test]
    fn theta_relocates_a_free_branch() {
        let fixed = vec![p(&[(2, 1)])];
        let free = Ball::around(&p(&[(2, 3)]), BallKind::Closed, r(1));
        let w = dilative_closure(&l12(), &[free.clone()]).unwrap();
        let s = group_shadow(&ModelAction::Theta { fixed, j: 1 }, &w).unwrap();
        assert_eq!(s.apply(&free), Some(&Ball::around(&p(&[(2, 4)]), BallKind::Closed, r(1))));
    }

    #[test]
    fn shadows_compose_like_isometries() {
        let lam = LambdaSpec::from_ints(&[1, 2, 3]);
        let swap = |level: i64, above: &[(i64, i64)], a: i64, b: i64| crate::urysohn::GermSwap {
            level: r(level),
            above: above.iter().map(|&(l, v)| (r(l), v)).collect(),
            a,
            b,
        };
        let g1 = Isometry { swaps: vec![swap(3, &[], 0, 1), swap(1, &[(3, 1)], 0, 2)] };
        let g2 = Isometry { swaps: vec![swap(2, &[(3, 1)], 0, 4)] };
        let w1 = dilative_closure(&lam, &[Ball::around(&p(&[(1, 0)]), BallKind::Closed, r(0))]).unwrap();
        let w2 = dilative_closure(&lam, &[Ball::around(&p(&[(3, 1), (1, 2)]), BallKind::Closed, r(0))]).unwrap();
        let a = group_shadow(&ModelAction::Isometry(g1.clone()), &w1).unwrap();
        let b = group_shadow(&ModelAction::Isometry(g2.clone()), &w2).unwrap();
        let ab = compose_gamma(&b, &a).unwrap();
        let both = Isometry { swaps: g1.swaps.iter().chain(&g2.swaps).cloned().collect() };
        assert_eq!(ab, group_shadow(&ModelAction::Isometry(both), &ab.domain()).unwrap());
        assert!(ab.domain().len() > 1);
    }

    #[test]
    fn inconsistent_point_data() {
        let w = dilative_closure(&l12(), &[root(&l12())]).unwrap();
        let g = ModelAction::Points { from: vec![p(&[]), p(&[(1, 1)])], to: vec![p(&[]), p(&[(2, 1)])] };
        assert_eq!(group_shadow(&g, &w), Err(WoollyError::InconsistentInput));
    }
}
