//! Euclidean embeddings of finite ultrametric spaces through their dendrograms,
//! exponential kernels `s^d`, and positive-semidefiniteness certificates.

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::dendro::{Dendrogram, NodeId};
use crate::linalg::{bareiss_psd, float_psd, PsdCertificate};
use crate::rat::Rat;
use crate::ultracore::UltraSpace;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum EmbedError {
    /// The kernel parameter must lie strictly between 0 and 1.
    #[error("s = {0} is outside (0, 1)")]
    SOutOfRange(Rat),
    /// The matrix handed to the PSD check is not symmetric.
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    /// The matrix is not square.
    #[error("matrix is not square")]
    NotSquare,
    /// An edge order is not a permutation of the dendrogram edges.
    #[error("edge order is not a permutation of {0} edges")]
    BadEdgeOrder(usize),
}

/// Which metric the embedding realises as squared Euclidean distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbedMetric {
    /// `‖ψx − ψy‖² = d(x, y)`.
    Original,
    /// `‖ψx − ψy‖² = d(x, y)²`, so Euclidean distance equals `d`.
    Squared,
}

/// One coordinate axis per dendrogram edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axis {
    pub child: NodeId,
    pub parent: NodeId,
    /// `‖f‖²`, half the height drop along the edge.
    pub weight: Rat,
}

/// Coordinates over mutually orthogonal axes with rational squared lengths.
/// Each point is a sparse list of `(axis, coefficient)` with coefficients in `{−1, 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingResult {
    pub metric: EmbedMetric,
    pub axes: Vec<Axis>,
    pub coordinates: Vec<Vec<(usize, i8)>>,
    pub squared_distances: Vec<Vec<Rat>>,
    pub labels: Vec<String>,
}

impl EmbeddingResult {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Dense coefficient vector of a point.
    pub fn dense(&self, x: usize) -> Vec<Rat> {
        let mut v = vec![Rat::ZERO; self.axes.len()];
        for &(a, c) in &self.coordinates[x] {
            v[a] = Rat::int(c as i64);
        }
        v
    }

    /// Inner product of two coefficient vectors.
    pub fn inner(&self, u: &[Rat], v: &[Rat]) -> Rat {
        u.iter().zip(v).zip(&self.axes).map(|((&a, &b), ax)| a * b * ax.weight).sum()
    }

    pub fn difference(&self, x: usize, y: usize) -> Vec<Rat> {
        self.dense(x).into_iter().zip(self.dense(y)).map(|(a, b)| a - b).collect()
    }

    pub fn squared_distance(&self, x: usize, y: usize) -> Rat {
        let d = self.difference(x, y);
        self.inner(&d, &d)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "metric": match self.metric { EmbedMetric::Original => "original", EmbedMetric::Squared => "squared" },
            "axes": self.axes.iter().map(|a| json!({"child": a.child.0, "parent": a.parent.0, "weight": a.weight})).collect::<Vec<_>>(),
            "points": self.labels.iter().zip(&self.coordinates).map(|(l, c)| json!({"label": l, "coordinates": c})).collect::<Vec<_>>(),
            "squared_distances": self.squared_distances,
        })
    }
}

fn target_space(space: &UltraSpace, metric: EmbedMetric) -> UltraSpace {
    match metric {
        EmbedMetric::Original => space.clone(),
        EmbedMetric::Squared => {
            UltraSpace::from_fn_unchecked(space.labels.clone(), |i, j| space.d(i, j) * space.d(i, j))
        }
    }
}

/// Embedding with axes in dendrogram edge order and the first point at the origin.
pub fn tree_embedding(space: &UltraSpace, metric: EmbedMetric) -> EmbeddingResult {
    let n = Dendrogram::build(space).edges().len();
    tree_embedding_ordered(space, metric, &(0..n).collect::<Vec<_>>()).expect("identity order")
}

/// Same embedding with the axes listed in the given permutation of the edges.
pub fn tree_embedding_ordered(
    space: &UltraSpace,
    metric: EmbedMetric,
    order: &[usize],
) -> Result<EmbeddingResult, EmbedError> {
    let m = target_space(space, metric);
    let tree = Dendrogram::build(&m);
    let edges = tree.edges();
    let mut seen = vec![false; edges.len()];
    if order.len() != edges.len() || order.iter().any(|&e| e >= edges.len() || std::mem::replace(&mut seen[e], true)) {
        return Err(EmbedError::BadEdgeOrder(edges.len()));
    }
    let axes: Vec<Axis> = order
        .iter()
        .map(|&e| {
            let (c, p) = edges[e];
            Axis { child: c, parent: p, weight: (tree.node(p).height - tree.node(c).height).half() }
        })
        .collect();
    let mut axis_of_child = vec![usize::MAX; tree.len()];
    for (a, ax) in axes.iter().enumerate() {
        axis_of_child[ax.child.0] = a;
    }
    let path = |x: usize| {
        let mut out = Vec::new();
        let mut v = tree.leaf(x);
        while tree.node(v).parent.is_some() {
            out.push(axis_of_child[v.0]);
            v = tree.node(v).parent.expect("checked");
        }
        out
    };
    let base = if space.is_empty() { Vec::new() } else { path(0) };
    let coordinates: Vec<Vec<(usize, i8)>> = (0..space.len())
        .map(|x| {
            let px = path(x);
            let mut c: Vec<(usize, i8)> = px
                .iter()
                .filter(|a| !base.contains(a))
                .map(|&a| (a, 1))
                .chain(base.iter().filter(|a| !px.contains(a)).map(|&a| (a, -1)))
                .collect();
            c.sort();
            c
        })
        .collect();
    let mut out = EmbeddingResult {
        metric,
        axes,
        coordinates,
        squared_distances: Vec::new(),
        labels: space.labels.clone(),
    };
    out.squared_distances =
        (0..space.len()).map(|x| (0..space.len()).map(|y| out.squared_distance(x, y)).collect()).collect();
    Ok(out)
}

/// Whether the embedding reproduces its target metric exactly.
pub fn embedding_is_exact(space: &UltraSpace, e: &EmbeddingResult) -> bool {
    let m = target_space(space, e.metric);
    (0..space.len()).all(|x| (0..space.len()).all(|y| e.squared_distances[x][y] == m.d(x, y)))
}

/// Gram matrix entries, exact when every entry is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub exact: Option<Vec<Vec<BigRational>>>,
    pub float: Vec<Vec<f64>>,
}

impl GramMatrix {
    pub fn from_exact(rows: Vec<Vec<BigRational>>) -> GramMatrix {
        let float = rows
            .iter()
            .map(|r| r.iter().map(|v| big_to_f64(v)).collect())
            .collect();
        GramMatrix { exact: Some(rows), float }
    }

    pub fn from_rats(rows: &[Vec<Rat>]) -> GramMatrix {
        GramMatrix::from_exact(rows.iter().map(|r| r.iter().map(|v| v.to_big()).collect()).collect())
    }

    pub fn from_float(rows: Vec<Vec<f64>>) -> GramMatrix {
        GramMatrix { exact: None, float: rows }
    }

    pub fn len(&self) -> usize {
        self.float.len()
    }

    pub fn is_empty(&self) -> bool {
        self.float.is_empty()
    }

    pub fn to_json(&self) -> Value {
        match &self.exact {
            Some(rows) => json!({
                "exact": true,
                "entries": rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            None => json!({"exact": false, "entries": self.float}),
        }
    }
}

fn big_to_f64(v: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

fn big_pow(s: &BigRational, e: u64) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= s;
    }
    out
}

/// `G[x][y] = s^{d(x,y)}`.
pub fn schoenberg_gram(space: &UltraSpace, s: Rat) -> Result<GramMatrix, EmbedError> {
    if !s.is_positive() || s >= Rat::ONE {
        return Err(EmbedError::SOutOfRange(s));
    }
    let n = space.len();
    let integral = (0..n).all(|i| (0..n).all(|j| space.d(i, j).is_integer()));
    if integral {
        let sb = s.to_big();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| big_pow(&sb, space.d(i, j).numer() as u64)).collect())
            .collect();
        Ok(GramMatrix::from_exact(rows))
    } else {
        let sf = s.to_f64();
        Ok(GramMatrix::from_float(
            (0..n).map(|i| (0..n).map(|j| sf.powf(space.d(i, j).to_f64())).collect()).collect(),
        ))
    }
}

/// Exact `LDLᵀ` when the entries are rational, otherwise the eigenvalue test.
pub fn psd_check(g: &GramMatrix) -> Result<PsdCertificate, EmbedError> {
    let n = g.float.len();
    if g.float.iter().any(|r| r.len() != n) {
        return Err(EmbedError::NotSquare);
    }
    match &g.exact {
        Some(rows) => {
            for i in 0..n {
                for j in 0..i {
                    if rows[i][j] != rows[j][i] {
                        return Err(EmbedError::NotSymmetric { i: j, j: i });
                    }
                }
            }
            Ok(bareiss_psd(rows))
        }
        None => {
            for i in 0..n {
                for j in 0..i {
                    let (a, b) = (g.float[i][j], g.float[j][i]);
                    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                        return Err(EmbedError::NotSymmetric { i: j, j: i });
                    }
                }
            }
            Ok(float_psd(&g.float))
        }
    }
}

pub fn certificate_json(c: &PsdCertificate) -> Value {
    json!({
        "psd": c.psd,
        "pivots": c.pivots.as_ref().map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
        "min_eigenvalue": c.min_eigenvalue,
        "norm": c.norm,
    })
}

/// Gram matrix of coordinates centred at their mean, scaled by `n²` to stay integral in the coefficients.
pub fn centered_gram(e: &EmbeddingResult) -> Vec<Vec<Rat>> {
    let n = e.coordinates.len() as i64;
    if n == 0 {
        return Vec::new();
    }
    let dense: Vec<Vec<Rat>> = (0..n as usize).map(|x| e.dense(x)).collect();
    let mut mean = vec![Rat::ZERO; e.dim()];
    for v in &dense {
        for (m, c) in mean.iter_mut().zip(v) {
            *m = *m + *c;
        }
    }
    let centred: Vec<Vec<Rat>> = dense
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(&c, &m)| c * Rat::int(n) - m).collect())
        .collect();
    centred.iter().map(|u| centred.iter().map(|v| e.inner(u, v)).collect()).collect()
}
