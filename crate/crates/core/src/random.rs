//! Seeded generators of spaces, model configurations, isometries and morphisms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amalgam::Morphism;
use crate::rat::Rat;
use crate::ultracore::{LambdaSpec, UltraSpace};
use crate::urysohn::{distance, Configuration, GermSwap, Isometry, NguyenPoint};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonempty subset of `{1, ..., max}`.
pub fn random_lambda(rng: &mut Rng64, max: i64) -> LambdaSpec {
    let mut values: Vec<i64> = (1..=max).filter(|_| rng.gen_bool(0.5)).collect();
    if values.is_empty() {
        values.push(rng.gen_range(1..=max));
    }
    LambdaSpec::from_ints(&values)
}

/// A random ultrametric on `n` points with distances in `lambda`, built by
/// merging random groups of clusters at non-decreasing heights.
pub fn random_space(rng: &mut Rng64, n: usize, lambda: &LambdaSpec) -> UltraSpace {
    let mut d = vec![vec![Rat::ZERO; n]; n];
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut level = 0;
    while clusters.len() > 1 {
        level = rng.gen_range(level..lambda.values.len());
        let h = lambda.values[level];
        clusters.shuffle(rng);
        let k = rng.gen_range(2..=clusters.len().min(4));
        let merged: Vec<usize> = clusters.drain(..k).flatten().collect();
        for &a in &merged {
            for &b in &merged {
                if a != b && d[a][b].is_zero() {
                    d[a][b] = h;
                }
            }
        }
        clusters.push(merged);
    }
    UltraSpace::from_fn_unchecked(UltraSpace::default_labels(n), |i, j| d[i][j])
}

/// A point of the model differing from `anchor` at a random level and below.
pub fn random_point_near(rng: &mut Rng64, lambda: &LambdaSpec, anchor: &NguyenPoint, spread: i64) -> NguyenPoint {
    let top = rng.gen_range(0..lambda.values.len());
    let mut w = anchor.clone();
    for &l in &lambda.values[..=top] {
        w = w.with_value(l, rng.gen_range(-spread..=spread));
    }
    w
}

/// `k` distinct model points, each new one near a random earlier one or near `anchors`.
pub fn random_points(rng: &mut Rng64, lambda: &LambdaSpec, k: usize, anchors: &[NguyenPoint], spread: i64) -> Vec<NguyenPoint> {
    let spread = spread.max(k as i64);
    let mut out: Vec<NguyenPoint> = Vec::with_capacity(k);
    let mut tries = 0;
    while out.len() < k {
        let pool: Vec<&NguyenPoint> = anchors.iter().chain(out.iter()).collect();
        let w = if pool.is_empty() {
            random_point_near(rng, lambda, &NguyenPoint::zero(), spread)
        } else if rng.gen_bool(0.25) && !anchors.is_empty() && tries < 1000 {
            anchors.choose(rng).expect("nonempty").clone()
        } else {
            let a = (*pool.choose(rng).expect("nonempty")).clone();
            random_point_near(rng, lambda, &a, spread)
        };
        tries += 1;
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// A product of a few germ swaps that act near the given points.
pub fn random_isometry(rng: &mut Rng64, lambda: &LambdaSpec, near: &[NguyenPoint], spread: i64) -> Isometry {
    let count = rng.gen_range(0..=4);
    let swaps = (0..count)
        .map(|_| {
            let level = *lambda.values.choose(rng).expect("nonempty value set");
            let above = match near.choose(rng) {
                Some(w) if rng.gen_bool(0.8) => w.restrict(level, false),
                _ => random_point_near(rng, lambda, &NguyenPoint::zero(), spread).restrict(level, false),
            };
            let a = rng.gen_range(-spread..=spread);
            let mut b = rng.gen_range(-spread..=spread);
            if b == a {
                b += 1;
            }
            GermSwap { level, above, a, b }
        })
        .collect();
    Isometry { swaps }
}

pub fn configuration_space(points: &[NguyenPoint]) -> UltraSpace {
    UltraSpace::from_fn_unchecked(UltraSpace::default_labels(points.len()), |i, j| distance(&points[i], &points[j]))
}

/// A morphism out of the space realised by `xs`: the target is a random
/// configuration near a random isometric copy of `xs`.
pub fn random_morphism_from(
    rng: &mut Rng64,
    lambda: &LambdaSpec,
    xs: &[NguyenPoint],
    max_target: usize,
    spread: i64,
) -> (Morphism, Vec<NguyenPoint>) {
    let g = random_isometry(rng, lambda, xs, spread);
    let moved: Vec<NguyenPoint> = xs.iter().map(|w| g.apply(w)).collect();
    let m = rng.gen_range(1..=max_target);
    let ys = random_points(rng, lambda, m, &moved, spread);
    let delta = moved.iter().map(|x| ys.iter().map(|y| distance(x, y)).collect()).collect();
    let p = Morphism::from_delta(configuration_space(xs), configuration_space(&ys), delta)
        .expect("distances of a model configuration form a morphism");
    (p, ys)
}

/// A random morphism between spaces of at most `max` points each.
pub fn random_morphism(rng: &mut Rng64, lambda: &LambdaSpec, max: usize, spread: i64) -> Morphism {
    let n = rng.gen_range(1..=max);
    let xs = random_points(rng, lambda, n, &[], spread);
    random_morphism_from(rng, lambda, &xs, max, spread).0
}

/// `count` consecutive composable morphisms.
pub fn random_chain(rng: &mut Rng64, lambda: &LambdaSpec, count: usize, max: usize, spread: i64) -> Vec<Morphism> {
    let n = rng.gen_range(1..=max);
    let mut xs = random_points(rng, lambda, n, &[], spread);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (p, ys) = random_morphism_from(rng, lambda, &xs, max, spread);
        out.push(p);
        xs = ys;
    }
    out
}

/// Two spaces sharing a nonempty isometric part: `(X, Y, overlap pairs)`.
pub fn random_amalgam_input(
    rng: &mut Rng64,
    lambda: &LambdaSpec,
    max: usize,
    spread: i64,
) -> (UltraSpace, UltraSpace, Vec<(usize, usize)>) {
    let k = rng.gen_range(1..=max);
    let common = random_points(rng, lambda, k, &[], spread);
    let xs = extend_shuffled(rng, lambda, &common, max, spread);
    let ys = extend_shuffled(rng, lambda, &common, max, spread);
    let overlap = common
        .iter()
        .map(|c| (xs.iter().position(|w| w == c).expect("kept"), ys.iter().position(|w| w == c).expect("kept")))
        .collect();
    (configuration_space(&xs), configuration_space(&ys), overlap)
}

fn extend_shuffled(rng: &mut Rng64, lambda: &LambdaSpec, common: &[NguyenPoint], max: usize, spread: i64) -> Vec<NguyenPoint> {
    let extra = rng.gen_range(0..=max - common.len());
    let mut all = common.to_vec();
    let fresh = random_points(rng, lambda, extra, common, spread);
    all.extend(fresh.into_iter().filter(|w| !common.contains(w)));
    all.shuffle(rng);
    all
}

/// Input of a stabilization experiment: `X, Y, Z`, the images of `X` under
/// `g2` and the preimages of `Z` under `g1`.
pub struct ThetaCase {
    pub x: Configuration,
    pub y: Configuration,
    pub z: Configuration,
    pub g2_images: Vec<NguyenPoint>,
    pub g1_preimages: Vec<NguyenPoint>,
}

pub fn random_theta_case(rng: &mut Rng64, lambda: &LambdaSpec, max: usize, spread: i64) -> ThetaCase {
    let pick = |rng: &mut Rng64| {
        let n = rng.gen_range(1..=max);
        random_points(rng, lambda, n, &[], spread)
    };
    let xs = pick(rng);
    let ys = pick(rng);
    let zs = pick(rng);
    let g2 = random_isometry(rng, lambda, &xs, spread);
    let g1 = random_isometry(rng, lambda, &zs, spread);
    ThetaCase {
        g2_images: xs.iter().map(|w| g2.apply(w)).collect(),
        g1_preimages: zs.iter().map(|w| g1.inverse().apply(w)).collect(),
        x: Configuration::new("x", xs),
        y: Configuration::new("y", ys),
        z: Configuration::new("z", zs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultracore::validate_ultrametric;

    #[test]
    fn generated_spaces_are_ultrametric() {
        let mut r = rng(3);
        for _ in 0..50 {
            let lambda = random_lambda(&mut r, 8);
            let n = r.gen_range(1..=12);
            let x = random_space(&mut r, n, &lambda);
            validate_ultrametric(&x).unwrap();
            assert!(x.spectrum().iter().all(|&v| lambda.contains(v)));
        }
    }

    #[test]
    fn same_seed_same_output() {
        let lambda = LambdaSpec::from_ints(&[1, 2, 3]);
        let a = random_chain(&mut rng(9), &lambda, 3, 4, 2);
        let b = random_chain(&mut rng(9), &lambda, 3, 4, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn chains_are_composable() {
        let mut r = rng(1);
        let lambda = LambdaSpec::from_ints(&[1, 2, 3]);
        for _ in 0..20 {
            let c = random_chain(&mut r, &lambda, 3, 4, 2);
            assert_eq!(c[0].target(), c[1].source());
            assert_eq!(c[1].target(), c[2].source());
        }
    }

    #[test]
    fn amalgam_inputs_agree_on_overlap() {
        let mut r = rng(2);
        let lambda = random_lambda(&mut r, 8);
        for _ in 0..20 {
            let (x, y, ov) = random_amalgam_input(&mut r, &lambda, 8, 2);
            assert!(!ov.is_empty() && x.len() <= 8 && y.len() <= 8);
            for &(a, b) in &ov {
                for &(c, d) in &ov {
                    assert_eq!(x.d(a, c), y.d(b, d));
                }
            }
        }
    }
}
