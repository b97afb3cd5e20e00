//! Finite ultrametric spaces over exact rationals, their balls and level quotients.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rat::{Radius, Rat};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum UltraError {
    /// The distance matrix is not square or does not match the labels.
    #[error("distance matrix is {rows}x{cols} but there are {labels} labels")]
    Shape { rows: usize, cols: usize, labels: usize },
    /// The space has no points.
    #[error("a space needs at least one point")]
    Empty,
    /// `d(i,i)` is not zero.
    #[error("nonzero diagonal entry at point {label} (index {i})")]
    NonzeroDiagonal { i: usize, label: String },
    /// `d(i,j) != d(j,i)`.
    #[error("distance between {a} and {b} is not symmetric (indices {i},{j})")]
    NonSymmetric { i: usize, j: usize, a: String, b: String },
    /// Distinct points at zero or negative distance.
    #[error("distinct points {a} and {b} are at non-positive distance (indices {i},{j})")]
    NonPositive { i: usize, j: usize, a: String, b: String },
    /// `d(i,k) > max(d(i,j), d(j,k))` for the first such triple.
    #[error("ultrametric inequality fails for ({a},{b},{c}) (indices {i},{j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize, a: String, b: String, c: String },
    /// A distance is not a member of the attached value set.
    #[error("distance {0} is not in the value set")]
    SpectrumOutsideLambda(Rat),
    /// The value-set description is malformed.
    #[error("invalid value set: {0}")]
    InvalidLambda(String),
    /// A level quotient was requested at a negative height.
    #[error("level {0} is negative")]
    NegativeLevel(Rat),
    /// A point index is out of range.
    #[error("point index {0} is out of range")]
    IndexOutOfRange(usize),
}

/// Closed (`d <= r`) or open (`d < r`) ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BallKind {
    #[serde(rename = "c")]
    Closed,
    #[serde(rename = "o")]
    Open,
}

impl fmt::Display for BallKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BallKind::Closed => write!(f, "c"),
            BallKind::Open => write!(f, "o"),
        }
    }
}

/// The admissible set of nonzero distances, described by its finitely many
/// explicit values plus flags for the limit structure that a finite list
/// cannot show.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaSpec {
    pub values: Vec<Rat>,
    #[serde(default)]
    pub zero_is_limit: bool,
    #[serde(default)]
    pub unbounded: bool,
    /// Values approached from the left by other values; may contain `inf`.
    #[serde(default)]
    pub left_limits: Vec<Radius>,
}

impl LambdaSpec {
    pub fn new(
        values: Vec<Rat>,
        zero_is_limit: bool,
        unbounded: bool,
        left_limits: Vec<Radius>,
    ) -> Result<LambdaSpec, UltraError> {
        let spec = LambdaSpec { values, zero_is_limit, unbounded, left_limits };
        spec.validate()?;
        Ok(spec)
    }

    /// A plain discrete value set with no limit points.
    pub fn discrete(values: &[Rat]) -> LambdaSpec {
        let mut v = values.to_vec();
        v.sort();
        v.dedup();
        LambdaSpec { values: v, zero_is_limit: false, unbounded: false, left_limits: Vec::new() }
    }

    pub fn from_ints(values: &[i64]) -> LambdaSpec {
        LambdaSpec::discrete(&values.iter().map(|&v| Rat::int(v)).collect::<Vec<_>>())
    }

    pub fn validate(&self) -> Result<(), UltraError> {
        if self.values.is_empty() {
            return Err(UltraError::InvalidLambda("no values".into()));
        }
        for w in self.values.windows(2) {
            if w[0] >= w[1] {
                return Err(UltraError::InvalidLambda("values must be strictly ascending".into()));
            }
        }
        if !self.values[0].is_positive() {
            return Err(UltraError::InvalidLambda("values must be positive".into()));
        }
        for l in &self.left_limits {
            match l {
                Radius::Infinite if !self.unbounded => {
                    return Err(UltraError::InvalidLambda(
                        "infinity is a left limit only for unbounded sets".into(),
                    ))
                }
                Radius::Infinite => {}
                Radius::Finite(r) if !self.contains(*r) => {
                    return Err(UltraError::InvalidLambda(format!("left limit {r} is not a value")))
                }
                Radius::Finite(_) => {}
            }
        }
        Ok(())
    }

    pub fn contains(&self, r: Rat) -> bool {
        self.values.binary_search(&r).is_ok()
    }

    /// Values together with zero, unless zero is a limit point.
    pub fn with_zero(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(self.values.len() + 1);
        if !self.zero_is_limit {
            out.push(Rat::ZERO);
        }
        out.extend(self.values.iter().copied());
        out
    }

    pub fn is_left_limit(&self, r: Radius) -> bool {
        self.left_limits.contains(&r)
    }

    pub fn max_value(&self) -> Rat {
        *self.values.last().expect("validated value set is nonempty")
    }
}

/// A finite ultrametric space with labelled points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UltraSpace {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,
}

/// Two spaces are equal when labels and distances agree; the value set is metadata.
impl PartialEq for UltraSpace {
    fn eq(&self, other: &UltraSpace) -> bool {
        self.labels == other.labels && self.dist == other.dist
    }
}

impl Eq for UltraSpace {}

impl UltraSpace {
    /// Builds and validates a space.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rat>>) -> Result<UltraSpace, UltraError> {
        let space = UltraSpace { labels, dist, lambda: None };
        space.validate()?;
        Ok(space)
    }

    pub fn with_lambda(mut self, lambda: LambdaSpec) -> Result<UltraSpace, UltraError> {
        lambda.validate()?;
        self.lambda = Some(lambda);
        self.validate()?;
        Ok(self)
    }

    /// Builds a space from a distance function without validating it.
    pub fn from_fn_unchecked(labels: Vec<String>, f: impl Fn(usize, usize) -> Rat) -> UltraSpace {
        let n = labels.len();
        let dist = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        UltraSpace { labels, dist, lambda: None }
    }

    /// Labels `a`, `b`, ... (then `p26`, `p27`, ... past the alphabet).
    pub fn default_labels(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| {
                if i < 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("p{i}")
                }
            })
            .collect()
    }

    pub fn from_ints(dist: &[&[i64]]) -> Result<UltraSpace, UltraError> {
        let d = dist.iter().map(|row| row.iter().map(|&v| Rat::int(v)).collect()).collect();
        UltraSpace::new(UltraSpace::default_labels(dist.len()), d)
    }

    pub fn single_point(label: &str) -> UltraSpace {
        UltraSpace { labels: vec![label.to_string()], dist: vec![vec![Rat::ZERO]], lambda: None }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> Rat {
        self.dist[i][j]
    }

    pub fn validate(&self) -> Result<(), UltraError> {
        validate_ultrametric(self)
    }

    /// Set of nonzero distances.
    pub fn spectrum(&self) -> BTreeSet<Rat> {
        spectrum(self)
    }

    pub fn diameter(&self) -> Rat {
        self.dist.iter().flatten().copied().max().unwrap_or(Rat::ZERO)
    }

    /// Distance from `x` to the nearest other point; infinite for a one-point space.
    pub fn nearest_distance(&self, x: usize) -> Radius {
        (0..self.len())
            .filter(|&y| y != x)
            .map(|y| self.dist[x][y])
            .min()
            .map(Radius::Finite)
            .unwrap_or(Radius::Infinite)
    }

    /// The subspace on the given indices, in the given order.
    pub fn restrict(&self, idx: &[usize]) -> UltraSpace {
        UltraSpace {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            dist: idx.iter().map(|&i| idx.iter().map(|&j| self.dist[i][j]).collect()).collect(),
            lambda: self.lambda.clone(),
        }
    }

    pub fn ball_partition(&self, r: Rat, kind: BallKind) -> Vec<Vec<usize>> {
        ball_partition(self, r, kind)
    }

    pub fn level_quotient(&self, h: Rat) -> Result<UltraSpace, UltraError> {
        level_quotient(self, h)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// Checks shape, zero diagonal, symmetry, positivity and the ultrametric
/// inequality `d(i,k) <= max(d(i,j), d(j,k))`, reporting the first triple
/// that fails in lexicographic order.
pub fn validate_ultrametric(space: &UltraSpace) -> Result<(), UltraError> {
    let n = space.labels.len();
    if n == 0 {
        return Err(UltraError::Empty);
    }
    if space.dist.len() != n || space.dist.iter().any(|r| r.len() != n) {
        return Err(UltraError::Shape {
            rows: space.dist.len(),
            cols: space.dist.first().map_or(0, |r| r.len()),
            labels: n,
        });
    }
    let d = &space.dist;
    let label = |i: usize| space.labels[i].clone();
    for i in 0..n {
        if !d[i][i].is_zero() {
            return Err(UltraError::NonzeroDiagonal { i, label: label(i) });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if d[i][j] != d[j][i] {
                return Err(UltraError::NonSymmetric { i, j, a: label(i), b: label(j) });
            }
            if !d[i][j].is_positive() {
                return Err(UltraError::NonPositive { i, j, a: label(i), b: label(j) });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i][k] > d[i][j].max(d[j][k]) {
                    return Err(UltraError::TriangleViolation {
                        i,
                        j,
                        k,
                        a: label(i),
                        b: label(j),
                        c: label(k),
                    });
                }
            }
        }
    }
    if let Some(lambda) = &space.lambda {
        lambda.validate()?;
        if let Some(r) = spectrum(space).into_iter().find(|r| !lambda.contains(*r)) {
            return Err(UltraError::SpectrumOutsideLambda(r));
        }
    }
    Ok(())
}

pub fn spectrum(space: &UltraSpace) -> BTreeSet<Rat> {
    space.dist.iter().flatten().copied().filter(|r| !r.is_zero()).collect()
}

/// Partition into closed (`d <= r`) or open (`d < r`) balls, blocks ordered by least index.
pub fn ball_partition(space: &UltraSpace, r: Rat, kind: BallKind) -> Vec<Vec<usize>> {
    let n = space.len();
    let mut block_of: Vec<Option<usize>> = vec![None; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if block_of[i].is_some() {
            continue;
        }
        let b = blocks.len();
        let members: Vec<usize> = (i..n)
            .filter(|&j| {
                block_of[j].is_none()
                    && match kind {
                        BallKind::Closed => space.dist[i][j] <= r,
                        BallKind::Open => space.dist[i][j] < r,
                    }
            })
            .collect();
        for &j in &members {
            block_of[j] = Some(b);
        }
        blocks.push(members);
    }
    blocks
}

/// Collapses closed `h`-balls to points and lowers every distance by `h`.
/// Each block is labelled by its least-index member.
pub fn level_quotient(space: &UltraSpace, h: Rat) -> Result<UltraSpace, UltraError> {
    if h.is_negative() {
        return Err(UltraError::NegativeLevel(h));
    }
    let blocks = ball_partition(space, h, BallKind::Closed);
    let labels = blocks.iter().map(|b| space.labels[b[0]].clone()).collect();
    Ok(UltraSpace::from_fn_unchecked(labels, |a, b| {
        if a == b {
            Rat::ZERO
        } else {
            space.dist[blocks[a][0]][blocks[b][0]] - h
        }
    }))
}
