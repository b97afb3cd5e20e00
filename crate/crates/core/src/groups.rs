//! Permutations and stored irreducible representations of the small groups
//! that occur as stabilizers: cyclic groups up to order 6, the Klein group,
//! `S3`, `D4` and `S4`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{Matrix, Scalar, FLOAT_TOL};
use crate::rat::Rat;

/// `perm[x]` is the image of `x`.
pub type Perm = Vec<usize>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    /// No stored character table covers this group.
    #[error("no stored irreducible representations for a group of order {order}")]
    UnsupportedStabilizer { order: usize },
}

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `(a ∘ b)(x) = a(b(x))`.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

pub fn inverse(a: &[usize]) -> Perm {
    let mut out = vec![0; a.len()];
    for (x, &y) in a.iter().enumerate() {
        out[y] = x;
    }
    out
}

pub fn order(a: &[usize]) -> usize {
    let id = identity(a.len());
    let mut cur = a.to_vec();
    let mut k = 1;
    while cur != id {
        cur = compose(a, &cur);
        k += 1;
    }
    k
}

pub fn sign(a: &[usize]) -> i64 {
    let mut seen = vec![false; a.len()];
    let mut s = 1;
    for start in 0..a.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = a[x];
            len += 1;
        }
        if len % 2 == 0 {
            s = -s;
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Trivial,
    Cyclic(usize),
    Klein,
    S3,
    D4,
    S4,
}

impl GroupKind {
    pub fn name(&self) -> String {
        match self {
            GroupKind::Trivial => "1".into(),
            GroupKind::Cyclic(n) => format!("C{n}"),
            GroupKind::Klein => "C2xC2".into(),
            GroupKind::S3 => "S3".into(),
            GroupKind::D4 => "D4".into(),
            GroupKind::S4 => "S4".into(),
        }
    }
}

/// Matrices of a representation, one per group element.
#[derive(Clone, Debug, PartialEq)]
pub enum RepMatrices {
    Exact(Vec<Matrix<Rat>>),
    Float(Vec<Matrix<Complex64>>),
}

impl RepMatrices {
    pub fn dim(&self) -> usize {
        match self {
            RepMatrices::Exact(m) => m.first().map_or(0, |x| x.rows()),
            RepMatrices::Float(m) => m.first().map_or(0, |x| x.rows()),
        }
    }

    pub fn characters(&self) -> Vec<Complex64> {
        match self {
            RepMatrices::Exact(m) => m.iter().map(|x| x.trace().to_c64()).collect(),
            RepMatrices::Float(m) => m.iter().map(|x| x.trace()).collect(),
        }
    }

    fn reorder(&self, idx: &[usize]) -> RepMatrices {
        match self {
            RepMatrices::Exact(m) => RepMatrices::Exact(idx.iter().map(|&i| m[i].clone()).collect()),
            RepMatrices::Float(m) => RepMatrices::Float(idx.iter().map(|&i| m[i].clone()).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Irrep {
    pub name: String,
    pub matrices: RepMatrices,
}

impl Irrep {
    pub fn dim(&self) -> usize {
        self.matrices.dim()
    }
}

/// Images of the generators of a reference group in one irreducible representation.
enum GenImages {
    Exact(Vec<Matrix<Rat>>),
    Float(Vec<Matrix<Complex64>>),
}

struct Reference {
    kind: GroupKind,
    gens: Vec<Perm>,
    irreps: Vec<(String, GenImages)>,
}

fn r(n: i64) -> Rat {
    Rat::int(n)
}

fn exact(rows: &[&[i64]]) -> Matrix<Rat> {
    Matrix::from_rows(rows.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect())
}

fn scalar_exact(v: i64) -> Matrix<Rat> {
    exact(&[&[v]])
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{2πik/n}`, exact on the quarter turns.
fn root_of_unity(k: usize, n: usize) -> Complex64 {
    let k = k % n;
    if (4 * k) % n == 0 {
        return match 4 * k / n {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        };
    }
    let t = 2.0 * PI * k as f64 / n as f64;
    c(t.cos(), t.sin())
}

/// The two-dimensional irreducible representation of `S3` in an orthonormal
/// basis of the sum-zero plane.
fn s3_standard(p: &[usize]) -> Matrix<Complex64> {
    let s2 = 2.0_f64.sqrt();
    let s6 = 6.0_f64.sqrt();
    let u = [[1.0 / s2, -1.0 / s2, 0.0], [1.0 / s6, 1.0 / s6, -2.0 / s6]];
    let mut m = Matrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let v: f64 = (0..3).map(|k| u[i][p[k]] * u[j][k]).sum();
            m.set(i, j, c(v, 0.0));
        }
    }
    m
}

/// The action of a permutation of four letters on the three ways to split
/// them into pairs, each split indexed by the partner of 0.
fn pairing_action(p: &[usize]) -> Perm {
    let splits = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
    splits
        .iter()
        .map(|s| {
            let (a, b, cc, d) = (p[s[0]], p[s[1]], p[s[2]], p[s[3]]);
            let partner = if a == 0 {
                b
            } else if b == 0 {
                a
            } else if cc == 0 {
                d
            } else {
                cc
            };
            partner - 1
        })
        .collect()
}

/// The three-dimensional representation of `S4` on the sum-zero subspace of
/// `Q^4`, in a basis where every matrix is a signed permutation matrix.
fn s4_standard(p: &[usize]) -> Matrix<Rat> {
    let v: [[i64; 4]; 3] = [[1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];
    let mut m = Matrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let s: i64 = (0..4).map(|k| v[i][p[k]] * v[j][k]).sum();
            m.set(i, j, Rat::frac(s, 4));
        }
    }
    m
}

fn reference(kind: GroupKind) -> Reference {
    match kind {
        GroupKind::Trivial => Reference {
            kind,
            gens: vec![],
            irreps: vec![("trivial".into(), GenImages::Exact(vec![]))],
        },
        GroupKind::Cyclic(n) => {
            let gen: Perm = (0..n).map(|i| (i + 1) % n).collect();
            let irreps = (0..n)
                .map(|k| {
                    let name = format!("chi{k}");
                    if (2 * k) % n == 0 {
                        let v = if k == 0 { 1 } else { -1 };
                        (name, GenImages::Exact(vec![scalar_exact(v)]))
                    } else {
                        (name, GenImages::Float(vec![Matrix::from_rows(vec![vec![root_of_unity(k, n)]])]))
                    }
                })
                .collect();
            Reference { kind, gens: vec![gen], irreps }
        }
        GroupKind::Klein => {
            let gens = vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]];
            let irreps = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
                .iter()
                .map(|&(s, t)| (format!("({s},{t})"), GenImages::Exact(vec![scalar_exact(s), scalar_exact(t)])))
                .collect();
            Reference { kind, gens, irreps }
        }
        GroupKind::S3 => {
            let gens: Vec<Perm> = vec![vec![1, 2, 0], vec![1, 0, 2]];
            let standard = GenImages::Float(gens.iter().map(|g| s3_standard(g)).collect());
            Reference {
                kind,
                irreps: vec![
                    ("trivial".into(), GenImages::Exact(vec![scalar_exact(1), scalar_exact(1)])),
                    ("sign".into(), GenImages::Exact(vec![scalar_exact(1), scalar_exact(-1)])),
                    ("standard".into(), standard),
                ],
                gens,
            }
        }
        GroupKind::D4 => {
            let gens: Vec<Perm> = vec![vec![1, 2, 3, 0], vec![0, 3, 2, 1]];
            let mut irreps: Vec<(String, GenImages)> = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
                .iter()
                .map(|&(s, t)| (format!("({s},{t})"), GenImages::Exact(vec![scalar_exact(s), scalar_exact(t)])))
                .collect();
            irreps.push((
                "standard".into(),
                GenImages::Exact(vec![exact(&[&[0, -1], &[1, 0]]), exact(&[&[1, 0], &[0, -1]])]),
            ));
            Reference { kind, gens, irreps }
        }
        GroupKind::S4 => {
            let gens: Vec<Perm> = vec![vec![1, 2, 3, 0], vec![1, 0, 2, 3]];
            let sign_m = |g: &Perm| scalar_exact(sign(g));
            let standard: Vec<Matrix<Rat>> = gens.iter().map(|g| s4_standard(g)).collect();
            let twisted: Vec<Matrix<Rat>> =
                gens.iter().map(|g| s4_standard(g).scale(&Rat::int(sign(g)))).collect();
            Reference {
                kind,
                irreps: vec![
                    ("trivial".into(), GenImages::Exact(vec![scalar_exact(1), scalar_exact(1)])),
                    ("sign".into(), GenImages::Exact(gens.iter().map(sign_m).collect())),
                    (
                        "two".into(),
                        GenImages::Float(gens.iter().map(|g| s3_standard(&pairing_action(g))).collect()),
                    ),
                    ("standard".into(), GenImages::Exact(standard)),
                    ("standard*sign".into(), GenImages::Exact(twisted)),
                ],
                gens,
            }
        }
    }
}

/// Breadth-first listing of a group from generators, with every element
/// written as a product of generators (`parent ∘ gen`).
fn generate(degree: usize, gens: &[Perm]) -> (Vec<Perm>, Vec<Option<(usize, usize)>>) {
    let mut elems = vec![identity(degree)];
    let mut how: Vec<Option<(usize, usize)>> = vec![None];
    let mut index: HashMap<Perm, usize> = HashMap::new();
    index.insert(identity(degree), 0);
    let mut i = 0;
    while i < elems.len() {
        for (gi, g) in gens.iter().enumerate() {
            let next = compose(&elems[i], g);
            if !index.contains_key(&next) {
                index.insert(next.clone(), elems.len());
                elems.push(next);
                how.push(Some((i, gi)));
            }
        }
        i += 1;
    }
    (elems, how)
}

fn extend<S: Scalar>(how: &[Option<(usize, usize)>], images: &[Matrix<S>], dim: usize) -> Vec<Matrix<S>> {
    let mut out: Vec<Matrix<S>> = Vec::with_capacity(how.len());
    for h in how {
        out.push(match h {
            None => Matrix::identity(dim),
            Some((parent, g)) => out[*parent].mul(&images[*g]),
        });
    }
    out
}

fn is_homomorphism<S: Scalar>(elems: &[Perm], mats: &[Matrix<S>]) -> bool {
    let index: HashMap<&Perm, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    elems.iter().enumerate().all(|(i, a)| {
        elems.iter().enumerate().all(|(j, b)| {
            let k = index[&compose(a, b)];
            mats[k].close(&mats[i].mul(&mats[j]), FLOAT_TOL)
        })
    })
}

/// Finds generators of `elements` obeying the same relations as the
/// reference generators; returns, for each element, the matching reference element.
fn match_reference(elements: &[Perm], re: &[Perm], gens: &[Perm]) -> Option<Vec<usize>> {
    let degree = elements[0].len();
    let ref_index: HashMap<&Perm, usize> = re.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let orders: Vec<usize> = gens.iter().map(|g| order(g)).collect();
    let candidates: Vec<Vec<&Perm>> =
        orders.iter().map(|&o| elements.iter().filter(|e| order(e) == o).collect()).collect();
    let mut choice = vec![0usize; gens.len()];
    if candidates.iter().any(|c| c.is_empty()) {
        return None;
    }
    loop {
        let images: Vec<Perm> = choice.iter().enumerate().map(|(i, &k)| candidates[i][k].clone()).collect();
        if let Some(map) = try_iso(degree, re, &ref_index, gens, &images) {
            let mut out = vec![0; elements.len()];
            let mut ok = map.len() == elements.len();
            let g_index: HashMap<&Perm, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
            for (ri, g) in &map {
                match g_index.get(g) {
                    Some(&gi) => out[gi] = *ri,
                    None => ok = false,
                }
            }
            if ok {
                return Some(out);
            }
        }
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return None;
            }
            choice[pos] += 1;
            if choice[pos] < candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Extends `gens[i] -> images[i]` along the reference group; `None` if the
/// assignment is inconsistent or not injective.
fn try_iso(
    degree: usize,
    re: &[Perm],
    ref_index: &HashMap<&Perm, usize>,
    gens: &[Perm],
    images: &[Perm],
) -> Option<Vec<(usize, Perm)>> {
    let mut phi: Vec<Option<Perm>> = vec![None; re.len()];
    phi[ref_index[&identity(re[0].len())]] = Some(identity(degree));
    let mut queue = vec![ref_index[&identity(re[0].len())]];
    let mut head = 0;
    while head < queue.len() {
        let ri = queue[head];
        head += 1;
        for (g, h) in gens.iter().zip(images) {
            let next = ref_index[&compose(&re[ri], g)];
            let img = compose(phi[ri].as_ref().expect("visited"), h);
            match &phi[next] {
                Some(existing) if *existing != img => return None,
                Some(_) => {}
                None => {
                    phi[next] = Some(img);
                    queue.push(next);
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(re.len());
    for (i, p) in phi.into_iter().enumerate() {
        let p = p?;
        if !seen.insert(p.clone()) {
            return None;
        }
        out.push((i, p));
    }
    Some(out)
}

fn candidate_kinds(elements: &[Perm]) -> Vec<GroupKind> {
    let n = elements.len();
    let cyclic = elements.iter().any(|e| order(e) == n);
    match n {
        1 => vec![GroupKind::Trivial],
        2..=6 if cyclic => vec![GroupKind::Cyclic(n)],
        4 => vec![GroupKind::Klein],
        6 => vec![GroupKind::S3],
        8 => vec![GroupKind::D4],
        24 => vec![GroupKind::S4],
        _ => vec![],
    }
}

/// Identifies a permutation group and returns its irreducible
/// representations, with matrices listed in the order of `elements`.
pub fn irreducible_representations(elements: &[Perm]) -> Result<(GroupKind, Vec<Irrep>), GroupError> {
    let unsupported = GroupError::UnsupportedStabilizer { order: elements.len() };
    for kind in candidate_kinds(elements) {
        let refg = reference(kind);
        if kind == GroupKind::Trivial {
            return Ok((kind, vec![Irrep { name: "trivial".into(), matrices: RepMatrices::Exact(vec![Matrix::identity(1)]) }]));
        }
        let degree = refg.gens[0].len();
        let (re, how) = generate(degree, &refg.gens);
        let Some(to_ref) = match_reference(elements, &re, &refg.gens) else { continue };
        let irreps = refg
            .irreps
            .iter()
            .map(|(name, images)| {
                let mats = match images {
                    GenImages::Exact(m) => {
                        let all = extend(&how, m, m[0].rows());
                        debug_assert!(is_homomorphism(&re, &all));
                        RepMatrices::Exact(all)
                    }
                    GenImages::Float(m) => {
                        let all = extend(&how, m, m[0].rows());
                        debug_assert!(is_homomorphism(&re, &all));
                        RepMatrices::Float(all)
                    }
                };
                Irrep { name: name.clone(), matrices: mats.reorder(&to_ref) }
            })
            .collect();
        return Ok((refg.kind, irreps));
    }
    Err(unsupported)
}

/// Closure of a set of permutations under composition.
pub fn closure(degree: usize, gens: &[Perm]) -> Vec<Perm> {
    let mut elems = generate(degree, gens).0;
    elems.sort();
    elems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendro::permutations;

    fn check_all(elements: &[Perm], expected_dims: &[usize]) {
        let (_, irreps) = irreducible_representations(elements).unwrap();
        let dims: Vec<usize> = irreps.iter().map(|i| i.dim()).collect();
        assert_eq!(dims, expected_dims);
        let total: usize = dims.iter().map(|d| d * d).sum();
        assert_eq!(total, elements.len());
        for irrep in &irreps {
            match &irrep.matrices {
                RepMatrices::Exact(m) => assert!(is_homomorphism(elements, m)),
                RepMatrices::Float(m) => assert!(is_homomorphism(elements, m)),
            }
        }
        let chars: Vec<Vec<Complex64>> = irreps.iter().map(|i| i.matrices.characters()).collect();
        for a in 0..chars.len() {
            for b in 0..chars.len() {
                let ip: Complex64 = chars[a].iter().zip(&chars[b]).map(|(x, y)| x * y.conj()).sum::<Complex64>()
                    / elements.len() as f64;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-9, "orthogonality {a} {b}");
            }
        }
    }

    #[test]
    fn symmetric_groups() {
        check_all(&permutations(1), &[1]);
        check_all(&permutations(2), &[1, 1]);
        check_all(&permutations(3), &[1, 1, 2]);
        check_all(&permutations(4), &[1, 1, 2, 3, 3]);
    }

    #[test]
    fn cyclic_klein_and_dihedral() {
        for n in 2..=6 {
            let gen: Perm = (0..n).map(|i| (i + 1) % n).collect();
            check_all(&closure(n, &[gen]), &vec![1; n]);
        }
        check_all(&closure(4, &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]]), &[1, 1, 1, 1]);
        check_all(&closure(4, &[vec![1, 0, 2, 3], vec![2, 3, 0, 1]]), &[1, 1, 1, 1, 2]);
    }

    #[test]
    fn unsupported_group() {
        let a4 = closure(4, &[vec![1, 2, 0, 3], vec![0, 2, 3, 1]]);
        assert_eq!(a4.len(), 12);
        assert_eq!(irreducible_representations(&a4), Err(GroupError::UnsupportedStabilizer { order: 12 }));
    }

    #[test]
    fn permutation_basics() {
        let a = vec![1, 2, 0];
        assert_eq!(order(&a), 3);
        assert_eq!(compose(&a, &inverse(&a)), identity(3));
        assert_eq!(sign(&[1, 0, 2]), -1);
        assert_eq!(sign(&a), 1);
    }
}
