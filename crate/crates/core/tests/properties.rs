use proptest::prelude::*;
use rand::Rng;

use ultracat::amalgam::Morphism;
use ultracat::dendro::{canonical_code, isometry_group, permutations};
use ultracat::embed::{centered_gram, tree_embedding, tree_embedding_ordered, EmbedMetric};
use ultracat::endsemi::{classify_endo, enumerate_endomorphisms, idempotent_factor, is_idempotent};
use ultracat::random::{random_chain, random_isometry, random_lambda, random_points, random_space, rng};
use ultracat::ultracore::{validate_ultrametric, BallKind, LambdaSpec, UltraError, UltraSpace};
use ultracat::urysohn::Ball;
use ultracat::woolly::{close_elements, compose_gamma, dilative_closure, group_shadow, GammaElement, ModelAction};
use ultracat::Rat;

fn space_from(seed: u64, max_n: usize) -> UltraSpace {
    let mut r = rng(seed);
    let lambda = random_lambda(&mut r, 6);
    let n = r.gen_range(1..=max_n);
    random_space(&mut r, n, &lambda)
}

fn triples_ok(d: &[Vec<Rat>]) -> bool {
    let n = d.len();
    (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| d[i][k] <= d[i][j].max(d[j][k]))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn validator_agrees_with_triple_scan(seed in any::<u64>(), i in 0usize..8, j in 0usize..8, bump in 1i64..4) {
        let x = space_from(seed, 8);
        let n = x.len();
        let (i, j) = (i % n, j % n);
        let mut d: Vec<Vec<Rat>> = (0..n).map(|a| (0..n).map(|b| x.d(a, b)).collect()).collect();
        if i != j {
            d[i][j] = d[i][j] + Rat::int(bump);
            d[j][i] = d[i][j];
        }
        let y = UltraSpace::from_fn_unchecked(x.labels.clone(), |a, b| d[a][b]);
        match validate_ultrametric(&y) {
            Ok(()) => prop_assert!(triples_ok(&d)),
            Err(UltraError::TriangleViolation { .. }) => prop_assert!(!triples_ok(&d)),
            Err(e) => prop_assert!(false, "unexpected {e:?}"),
        }
    }

    #[test]
    fn canonical_code_ignores_labels(seed in any::<u64>(), pick in any::<usize>()) {
        let x = space_from(seed, 7);
        let perms = permutations(x.len());
        let p = &perms[pick % perms.len()];
        let y = UltraSpace::from_fn_unchecked(x.labels.clone(), |i, j| x.d(p[i], p[j]));
        prop_assert_eq!(canonical_code(&x), canonical_code(&y));
    }

    #[test]
    fn isometry_group_matches_brute_force(seed in any::<u64>()) {
        let x = space_from(seed, 8);
        let n = x.len();
        let brute = permutations(n)
            .into_iter()
            .filter(|p| (0..n).all(|i| (0..n).all(|j| x.d(i, j) == x.d(p[i], p[j]))))
            .count();
        prop_assert_eq!(isometry_group(&x).len(), brute);
    }

    #[test]
    fn identity_is_neutral_and_star_reverses(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = random_lambda(&mut r, 6);
        let c = random_chain(&mut r, &lambda, 2, 5, 2);
        let (p, q) = (&c[0], &c[1]);
        prop_assert_eq!(&Morphism::identity(p.source()).compose(p).unwrap(), p);
        prop_assert_eq!(&p.compose(&Morphism::identity(p.target())).unwrap(), p);
        let pq_star = p.compose(q).unwrap().involution();
        prop_assert_eq!(pq_star, q.involution().compose(&p.involution()).unwrap());
        prop_assert_eq!(&p.involution().involution(), p);
    }

    #[test]
    fn morphism_json_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = random_lambda(&mut r, 6);
        let p = random_chain(&mut r, &lambda, 1, 5, 2).remove(0);
        prop_assert_eq!(Morphism::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn centred_gram_is_classical_scaling(seed in any::<u64>(), squared in any::<bool>()) {
        let x = space_from(seed, 10);
        let n = x.len();
        let metric = if squared { EmbedMetric::Squared } else { EmbedMetric::Original };
        let e = tree_embedding(&x, metric);
        let g = centered_gram(&e);
        // n² · (−½ C D C) with C = I − 11ᵀ/n, expanded to stay in integers of n
        let d = &e.squared_distances;
        let nn = Rat::int(n as i64);
        let row: Vec<Rat> = (0..n).map(|i| d[i].iter().copied().sum()).collect();
        let total: Rat = row.iter().copied().sum();
        for i in 0..n {
            for j in 0..n {
                let want = (nn * row[i] + nn * row[j] - nn * nn * d[i][j] - total).half();
                prop_assert_eq!(g[i][j], want);
            }
        }
    }

    #[test]
    fn centred_gram_ignores_edge_order(seed in any::<u64>(), salt in any::<u64>()) {
        let x = space_from(seed, 8);
        let a = tree_embedding(&x, EmbedMetric::Original);
        let mut order: Vec<usize> = (0..a.dim()).collect();
        let mut r = rng(salt);
        rand::seq::SliceRandom::shuffle(&mut order[..], &mut r);
        let b = tree_embedding_ordered(&x, EmbedMetric::Original, &order).unwrap();
        prop_assert_eq!(centered_gram(&a), centered_gram(&b));
    }

    #[test]
    fn disjoint_subtrees_are_orthogonal(seed in any::<u64>()) {
        let x = space_from(seed, 10);
        let n = x.len();
        let e = tree_embedding(&x, EmbedMetric::Original);
        for a in 0..n {
            for b in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        let gap = x.d(a, u);
                        if x.d(a, b) < gap && x.d(u, v) < gap {
                            prop_assert_eq!(e.inner(&e.difference(a, b), &e.difference(u, v)), Rat::ZERO);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn proper_idempotents_factor_through_subspaces(seed in any::<u64>()) {
        let x = space_from(seed, 3);
        let lambda = LambdaSpec::discrete(&{
            let mut v: Vec<Rat> = x.spectrum().into_iter().collect();
            v.push(Rat::int(7));
            v
        });
        for p in enumerate_endomorphisms(&x, &lambda).iter().filter(|p| is_idempotent(p) && classify_endo(p).is_err()) {
            let f = idempotent_factor(p).unwrap();
            prop_assert_eq!(&f.t.compose(&f.t.involution()).unwrap(), p);
        }
    }

    #[test]
    fn closure_is_idempotent_and_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = LambdaSpec::from_ints(&[1, 2, 3]);
        let levels = lambda.with_zero();
        let pts = random_points(&mut r, &lambda, 4, &[], 2);
        let balls: Vec<Ball> = pts.iter().map(|w| Ball::around(w, BallKind::Closed, levels[r.gen_range(0..levels.len())])).collect();
        let small = dilative_closure(&lambda, &balls[..2]).unwrap();
        let big = dilative_closure(&lambda, &balls).unwrap();
        prop_assert!(small.is_subset(&big));
        let again = close_elements(&lambda, &big.elements().iter().cloned().collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(again, big);
    }

    #[test]
    fn shadows_are_partial_isometries(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lambda = LambdaSpec::from_ints(&[1, 2, 3]);
        let pts = random_points(&mut r, &lambda, 3, &[], 2);
        let balls: Vec<Ball> = pts.iter().map(|w| Ball::around(w, BallKind::Closed, Rat::ZERO)).collect();
        let w = dilative_closure(&lambda, &balls).unwrap();
        let g = group_shadow(&ModelAction::Isometry(random_isometry(&mut r, &lambda, &pts, 2)), &w).unwrap();
        let gs = g.adjoint();
        let e = compose_gamma(&gs, &g).unwrap();
        prop_assert!(e.is_identity_restriction());
        prop_assert_eq!(compose_gamma(&e, &e).unwrap(), e.clone());
        prop_assert_eq!(compose_gamma(&g, &e).unwrap(), g.clone());
        prop_assert_eq!(GammaElement::identity(&w), e);
    }

    #[test]
    fn rat_serde_round_trips(n in -1000i64..1000, d in 1i64..1000) {
        let q = Rat::frac(n, d);
        let s = serde_json::to_string(&q).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rat>(&s).unwrap(), q);
    }
}
