//! Built-in property suites, grouped by module, with timing limits.

use std::time::{Duration, Instant};

use rand::Rng;
use serde_json::{json, Value};

use crate::amalgam::{amalgamate, compose_partial, from_partial_iso, to_partial_iso, Morphism};
use crate::dendro::{are_isometric, canonical_code, isometry_group, permutations};
use crate::embed::{embedding_is_exact, psd_check, schoenberg_gram, tree_embedding, EmbedMetric};
use crate::endsemi::{classify_endo, enumerate_endomorphisms, idempotent_factor, is_idempotent, is_selfadjoint_idempotent};
use crate::random::{
    random_amalgam_input, random_chain, random_lambda, random_morphism, random_space, random_theta_case, rng,
};
use crate::rat::Rat;
use crate::reps::{irrep_census, EndTable};
use crate::ultracore::{validate_ultrametric, LambdaSpec, UltraError, UltraSpace};
use crate::urysohn::{distance, embed_space, ismagilov_family, theta_stabilization, Configuration, NguyenPoint};
use crate::woolly::{close_elements, compose_gamma, dilative_closure, group_shadow, ModelAction};

/// A deliberate defect, used to check that the suites notice it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Canonical dendrogram codes are compared after corrupting one of them.
    DendroCode,
    /// One cross distance of every composite is bumped before comparison.
    Composition,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Fault, String> {
        match s {
            "dendro-code" => Ok(Fault::DendroCode),
            "composition" => Ok(Fault::Composition),
            other => Err(format!("unknown fault {other:?}; expected dendro-code or composition")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Run only suites of this module.
    pub filter: Option<String>,
    pub fault: Option<Fault>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub module: &'static str,
    pub name: &'static str,
    /// Acceptance criterion number, if the suite is one.
    pub criterion: Option<u8>,
    pub passed: bool,
    /// The check found the statement false as given while its corrected
    /// form holds; reported as a failure but not treated as a regression.
    pub unattainable: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl SuiteResult {
    /// Failures other than a documented unattainable statement.
    pub fn blocking(&self) -> bool {
        !self.passed && !self.unattainable
    }

    pub fn line(&self) -> String {
        let tag = match self.criterion {
            Some(c) => format!("criterion {c:>2}"),
            None => "property    ".to_string(),
        };
        format!(
            "{} {tag} [{}] {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.module,
            self.name,
            self.detail
        )
    }

    /// Timing is left out so that reports are reproducible.
    pub fn to_json(&self) -> Value {
        json!({
            "module": self.module,
            "name": self.name,
            "criterion": self.criterion,
            "passed": self.passed,
            "unattainable": self.unattainable,
            "detail": self.detail,
            "limit_seconds": self.limit.as_secs(),
        })
    }
}

type Check = fn(&mut Ctx) -> Result<String, String>;

struct Suite {
    module: &'static str,
    name: &'static str,
    criterion: Option<u8>,
    limit_secs: u64,
    check: Check,
}

struct Ctx {
    seed: u64,
    fault: Option<Fault>,
    unattainable: Option<String>,
}

impl Ctx {
    fn rng(&self, salt: u64) -> crate::random::Rng64 {
        rng(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(salt))
    }

    fn compose(&self, p: &Morphism, q: &Morphism) -> Result<Morphism, String> {
        let r = p.compose(q).map_err(|e| e.to_string())?;
        if self.fault == Some(Fault::Composition) {
            let mut delta = r.delta().clone();
            delta[0][0] = delta[0][0] + Rat::ONE;
            return Ok(Morphism::from_delta(r.source().clone(), r.target().clone(), delta).unwrap_or(r));
        }
        Ok(r)
    }
}

const SUITES: &[Suite] = &[
    Suite { module: "ultracore", name: "first violating triple", criterion: None, limit_secs: 10, check: ultracore_triples },
    Suite { module: "dendro", name: "canonical codes", criterion: None, limit_secs: 10, check: dendro_codes },
    Suite { module: "amalgam", name: "amalgam closure", criterion: Some(1), limit_secs: 5, check: criterion_1 },
    Suite { module: "amalgam", name: "associativity", criterion: Some(2), limit_secs: 10, check: criterion_2 },
    Suite { module: "amalgam", name: "tree isomorphism functor", criterion: Some(3), limit_secs: 10, check: criterion_3 },
    Suite { module: "endsemi", name: "inverse law and idempotents", criterion: Some(4), limit_secs: 10, check: criterion_4 },
    Suite { module: "endsemi", name: "near-automorphism factorisation", criterion: None, limit_secs: 10, check: endsemi_factor },
    Suite { module: "reps", name: "representation laws", criterion: Some(5), limit_secs: 60, check: criterion_5 },
    Suite { module: "reps", name: "irreducibility and census", criterion: Some(6), limit_secs: 10, check: criterion_6 },
    Suite { module: "urysohn", name: "stabilization", criterion: Some(7), limit_secs: 30, check: criterion_7 },
    Suite { module: "embed", name: "embedding exactness", criterion: Some(8), limit_secs: 10, check: criterion_8 },
    Suite { module: "embed", name: "kernel positivity", criterion: Some(9), limit_secs: 30, check: criterion_9 },
    Suite { module: "urysohn", name: "model fidelity", criterion: Some(10), limit_secs: 10, check: criterion_10 },
    Suite { module: "woolly", name: "closure and composition", criterion: None, limit_secs: 10, check: woolly_laws },
];

pub const MODULES: &[&str] = &["ultracore", "dendro", "amalgam", "endsemi", "reps", "urysohn", "embed", "woolly"];

/// Runs the suites in a fixed order.
pub fn run(opts: &SelftestOptions) -> Vec<SuiteResult> {
    let mut ctx = Ctx { seed: opts.seed, fault: opts.fault, unattainable: None };
    SUITES
        .iter()
        .filter(|s| opts.filter.as_deref().is_none_or(|f| f == s.module))
        .map(|s| run_suite(s, &mut ctx))
        .collect()
}

/// Runs the acceptance criterion with the given number.
pub fn run_criterion(n: u8, opts: &SelftestOptions) -> Option<SuiteResult> {
    let mut ctx = Ctx { seed: opts.seed, fault: opts.fault, unattainable: None };
    SUITES.iter().find(|s| s.criterion == Some(n)).map(|s| run_suite(s, &mut ctx))
}

fn run_suite(s: &Suite, ctx: &mut Ctx) -> SuiteResult {
    let start = Instant::now();
    let outcome = (s.check)(ctx);
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(s.limit_secs);
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(e) => (false, e),
    };
    let mut unattainable = false;
    if let Some(why) = ctx.unattainable.take() {
        if passed {
            unattainable = true;
            passed = false;
            detail = format!("statement false as given: {why}; corrected form holds: {detail}");
        }
    }
    if elapsed > limit {
        passed = false;
        unattainable = false;
        detail = format!("{detail}; took {:.1} s, limit {} s", elapsed.as_secs_f64(), s.limit_secs);
    }
    SuiteResult { module: s.module, name: s.name, criterion: s.criterion, passed, unattainable, detail, elapsed, limit }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ultracore_triples(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(11);
    let mut caught = 0;
    for _ in 0..200 {
        let lambda = random_lambda(&mut r, 8);
        let n = r.gen_range(3..=8);
        let x = random_space(&mut r, n, &lambda);
        validate_ultrametric(&x).map_err(|e| format!("generated space rejected: {e}"))?;
        let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
        if i == j {
            continue;
        }
        let mut d = x.dist.clone();
        d[i][j] = d[i][j] + Rat::int(10);
        d[j][i] = d[i][j];
        let bad = UltraSpace::from_fn_unchecked(x.labels.clone(), |a, b| d[a][b]);
        let expected = (0..n)
            .flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
            .find(|&(a, b, c)| d[a][c] > d[a][b].max(d[b][c]));
        match (validate_ultrametric(&bad), expected) {
            (Err(UltraError::TriangleViolation { i, j, k, .. }), Some(t)) if (i, j, k) == t => caught += 1,
            (Ok(()), None) => {}
            (got, want) => return Err(format!("validator returned {got:?}, brute force found {want:?}")),
        }
    }
    Ok(format!("{caught} corrupted matrices reported at the first violating triple"))
}

fn dendro_codes(ctx: &mut Ctx) -> Result<String, String> {
    let tri = UltraSpace::from_ints(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]).map_err(|e| e.to_string())?;
    let mut code = canonical_code(&tri).to_string();
    if ctx.fault == Some(Fault::DendroCode) {
        code.push('!');
    }
    ensure(code == "2(*,1(*,*))", || format!("triangle code is {code}"))?;
    let mut r = ctx.rng(12);
    for _ in 0..100 {
        let lambda = random_lambda(&mut r, 4);
        let n = r.gen_range(1..=6);
        let x = random_space(&mut r, n, &lambda);
        let perms = permutations(n);
        let perm = &perms[r.gen_range(0..perms.len())];
        let y = UltraSpace::from_fn_unchecked(x.labels.clone(), |i, j| x.d(perm[i], perm[j]));
        ensure(canonical_code(&x) == canonical_code(&y), || "relabelled copy has a different code".into())?;
        let brute = perms.iter().filter(|p| (0..n).all(|i| (0..n).all(|j| x.d(i, j) == x.d(p[i], p[j])))).count();
        ensure(brute == isometry_group(&x).len(), || "isometry group size differs from brute force".into())?;
        let z = random_space(&mut r, n, &lambda);
        let iso = perms.iter().any(|p| (0..n).all(|i| (0..n).all(|j| x.d(i, j) == z.d(p[i], p[j]))));
        ensure(iso == are_isometric(&x, &z), || "isometry test disagrees with brute force".into())?;
    }
    Ok("100 random spaces: codes, isometry groups and isometry tests match brute force".into())
}

fn criterion_1(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(1);
    for t in 0..1000 {
        let lambda = random_lambda(&mut r, 8);
        let (x, y, overlap) = random_amalgam_input(&mut r, &lambda, 8, 3);
        let a = amalgamate(&x, &y, &overlap).map_err(|e| format!("case {t}: {e}"))?;
        validate_ultrametric(&a.space).map_err(|e| format!("case {t}: amalgam is not ultrametric: {e}"))?;
    }
    Ok("1000 amalgams are ultrametric".into())
}

fn criterion_2(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(2);
    for t in 0..500 {
        let lambda = random_lambda(&mut r, 8);
        let c = random_chain(&mut r, &lambda, 3, 5, 2);
        let left = ctx.compose(&ctx.compose(&c[0], &c[1])?, &c[2])?;
        let right = ctx.compose(&c[0], &ctx.compose(&c[1], &c[2])?)?;
        ensure(left.canonical_code() == right.canonical_code() && left == right, || {
            format!("triple {t}: groupings differ")
        })?;
    }
    Ok("500 triples associate".into())
}

fn criterion_3(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(3);
    for t in 0..500 {
        let lambda = random_lambda(&mut r, 8);
        let c = random_chain(&mut r, &lambda, 2, 6, 2);
        let direct = ctx.compose(&c[0], &c[1])?;
        let via_trees = compose_partial(&to_partial_iso(&c[1]), &to_partial_iso(&c[0]))
            .and_then(|phi| from_partial_iso(&phi))
            .map_err(|e| format!("pair {t}: {e}"))?;
        ensure(direct == via_trees, || format!("pair {t}: the two products differ"))?;
    }
    Ok("500 pairs agree".into())
}

fn criterion_4(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(4);
    for t in 0..500 {
        let lambda = random_lambda(&mut r, 8);
        let p = random_morphism(&mut r, &lambda, 6, 2);
        let back = ctx.compose(&ctx.compose(&p, &p.involution())?, &p)?;
        ensure(back == p, || format!("morphism {t}: p p* p differs from p"))?;
    }
    let x = UltraSpace::from_ints(&[&[0, 2], &[2, 0]]).map_err(|e| e.to_string())?;
    let end = enumerate_endomorphisms(&x, &LambdaSpec::from_ints(&[1, 2]));
    let idem: Vec<&Morphism> = end.iter().filter(|p| is_idempotent(p)).collect();
    let mut involutions = Vec::new();
    for p in &end {
        let selfadjoint = is_selfadjoint_idempotent(p);
        if is_idempotent(p) {
            ensure(selfadjoint, || "an idempotent is not self-adjoint".into())?;
        } else if selfadjoint {
            let p2 = ctx.compose(p, p)?;
            ensure(is_idempotent(&p2) && ctx.compose(&p2, p)? == *p, || {
                "a self-adjoint element is not an involution".into()
            })?;
            involutions.push(p);
        }
    }
    for p in &idem {
        for q in &idem {
            ensure(ctx.compose(p, q)? == ctx.compose(q, p)?, || "two idempotents do not commute".into())?;
        }
    }
    if let Some(p) = involutions.first() {
        ctx.unattainable = Some(format!(
            "{} self-adjoint elements of End(X) are not idempotent, e.g. the one with cross distances {}",
            involutions.len(),
            serde_json::to_string(p.delta()).unwrap_or_default()
        ));
    }
    Ok(format!(
        "500 morphisms satisfy p p* p = p; End(X) has {} elements; its {} idempotents are self-adjoint and commute; self-adjoint elements are involutions",
        end.len(),
        idem.len()
    ))
}

fn endsemi_factor(ctx: &mut Ctx) -> Result<String, String> {
    let lambda = LambdaSpec::from_ints(&[1, 2, 3]);
    let mut checked = 0;
    for x in small_spaces(&lambda) {
        for p in enumerate_endomorphisms(&x, &lambda) {
            if let Ok(na) = classify_endo(&p) {
                ensure(na.to_morphism() == p, || "near-automorphism does not reassemble".into())?;
            } else if is_idempotent(&p) {
                let f = idempotent_factor(&p).map_err(|e| e.to_string())?;
                ensure(ctx.compose(&f.t, &f.t.involution())? == p, || "idempotent does not factor".into())?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} endomorphisms classified and reassembled"))
}

/// Every space with at most three points and distances in `lambda`, up to isometry.
pub fn small_spaces(lambda: &LambdaSpec) -> Vec<UltraSpace> {
    let v = &lambda.values;
    let mut out = vec![UltraSpace::single_point("a")];
    for &d in v {
        out.push(UltraSpace::from_fn_unchecked(UltraSpace::default_labels(2), |i, j| if i == j { Rat::ZERO } else { d }));
    }
    for &a in v {
        for &b in v.iter().filter(|&&b| b >= a) {
            let m = [[Rat::ZERO, a, b], [a, Rat::ZERO, b], [b, b, Rat::ZERO]];
            out.push(UltraSpace::from_fn_unchecked(UltraSpace::default_labels(3), |i, j| m[i][j]));
        }
    }
    out
}

/// Nonempty subsets of `{1, 2, 3}`.
pub fn small_lambdas() -> Vec<LambdaSpec> {
    (1..8u8)
        .map(|mask| LambdaSpec::from_ints(&(0..3).filter(|b| mask >> b & 1 == 1).map(|b| b as i64 + 1).collect::<Vec<_>>()))
        .collect()
}

fn criterion_5(_ctx: &mut Ctx) -> Result<String, String> {
    let (mut reps, mut pairs) = (0, 0);
    for lambda in small_lambdas() {
        for x in small_spaces(&lambda) {
            let table = EndTable::build(enumerate_endomorphisms(&x, &lambda)).map_err(|e| e.to_string())?;
            for e in irrep_census(&x, &lambda).map_err(|e| e.to_string())? {
                let report = e.rep.check_table(&table).map_err(|e| e.to_string())?;
                ensure(report.ok(), || format!("{} / {}: {:?}", e.orbit_code, e.irrep_name, report.failures))?;
                reps += 1;
                pairs += report.pairs_checked;
            }
        }
    }
    Ok(format!("{reps} representations, {pairs} products checked"))
}

fn criterion_6(_ctx: &mut Ctx) -> Result<String, String> {
    let mut reps = 0;
    for lambda in small_lambdas() {
        for x in small_spaces(&lambda) {
            for e in irrep_census(&x, &lambda).map_err(|e| e.to_string())? {
                let c = e.rep.commutant_dimension();
                ensure(c == 1, || format!("{} / {} has commutant of dimension {c}", e.orbit_code, e.irrep_name))?;
                reps += 1;
            }
        }
    }
    let x = UltraSpace::from_ints(&[&[0, 2], &[2, 0]]).map_err(|e| e.to_string())?;
    let mut dims: Vec<usize> =
        irrep_census(&x, &LambdaSpec::from_ints(&[1, 2])).map_err(|e| e.to_string())?.iter().map(|e| e.dim).collect();
    dims.sort();
    ensure(dims == vec![1, 1, 1, 1, 2], || format!("two-point census has dimensions {dims:?}"))?;
    Ok(format!("{reps} irreducible; two-point census dimensions {dims:?}"))
}

fn criterion_7(ctx: &mut Ctx) -> Result<String, String> {
    let lambda = LambdaSpec::from_ints(&[1, 2, 3]);
    let mut r = ctx.rng(7);
    let mut worst = 0;
    for t in 0..100 {
        let c = random_theta_case(&mut r, &lambda, 3, 2);
        let s = theta_stabilization(&c.x, &c.y, &c.z, &c.g2_images, &c.g1_preimages, 64)
            .map_err(|e| format!("case {t}: {e}"))?;
        let first = Morphism::from_delta(
            c.x.to_space().map_err(|e| e.to_string())?,
            c.y.to_space().map_err(|e| e.to_string())?,
            c.g2_images.iter().map(|a| c.y.points.iter().map(|b| distance(a, b)).collect()).collect(),
        )
        .map_err(|e| e.to_string())?;
        let second = Morphism::from_delta(
            c.y.to_space().map_err(|e| e.to_string())?,
            c.z.to_space().map_err(|e| e.to_string())?,
            c.y.points.iter().map(|a| c.g1_preimages.iter().map(|b| distance(a, b)).collect()).collect(),
        )
        .map_err(|e| e.to_string())?;
        ensure(s.limit == ctx.compose(&first, &second)?, || format!("case {t}: limit differs from the product"))?;
        worst = worst.max(s.j);
    }
    let pt = |l: i64, v: i64| NguyenPoint::from_pairs(&[(Rat::int(l), v)]);
    let x = Configuration::new("x", vec![pt(1, 1)]);
    let y = Configuration::new("y", vec![NguyenPoint::zero()]);
    let z = Configuration::new("z", vec![pt(1, 2)]);
    let s = theta_stabilization(&x, &y, &z, &x.points, &z.points, 64).map_err(|e| e.to_string())?;
    ensure(s.j == 2 && s.limit.d(0, 0) == Rat::ONE, || format!("collision example: J = {}, limit {}", s.j, s.limit.d(0, 0)))?;
    Ok(format!("100 cases stabilize (largest J = {worst}); collision example J = 2"))
}

fn criterion_8(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(8);
    for t in 0..200 {
        let lambda = random_lambda(&mut r, 8);
        let n = r.gen_range(1..=32);
        let x = random_space(&mut r, n, &lambda);
        let e = tree_embedding(&x, EmbedMetric::Squared);
        ensure(embedding_is_exact(&x, &e), || format!("space {t}: squared distances differ from d²"))?;
    }
    Ok("200 spaces embedded exactly".into())
}

fn criterion_9(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(9);
    let mut certs = 0;
    for t in 0..100 {
        let lambda = random_lambda(&mut r, 8);
        let n = r.gen_range(1..=32);
        let x = random_space(&mut r, n, &lambda);
        for k in 1..=9 {
            let g = schoenberg_gram(&x, Rat::frac(k, 10)).map_err(|e| e.to_string())?;
            let c = psd_check(&g).map_err(|e| e.to_string())?;
            ensure(c.psd, || format!("space {t}, s = {k}/10: not PSD"))?;
            certs += 1;
        }
    }
    Ok(format!("{certs} Gram matrices certified"))
}

fn criterion_10(ctx: &mut Ctx) -> Result<String, String> {
    let mut r = ctx.rng(10);
    for t in 0..200 {
        let lambda = random_lambda(&mut r, 8);
        let n = r.gen_range(1..=16);
        let x = random_space(&mut r, n, &lambda);
        let pts = embed_space(&x, &lambda).map_err(|e| format!("space {t}: {e}"))?;
        ensure(
            (0..n).all(|i| (0..n).all(|j| distance(&pts[i], &pts[j]) == x.d(i, j))),
            || format!("space {t}: embedded distances differ"),
        )?;
        for &l in &lambda.values {
            let fam = ismagilov_family(&pts[0], l, 10);
            ensure(
                fam.len() == 10 && (0..10).all(|i| (0..i).all(|j| distance(&fam[i], &fam[j]) == l)),
                || format!("space {t}: no ten points at mutual distance {l}"),
            )?;
        }
    }
    Ok("200 spaces reproduced; witnesses at every level".into())
}

fn woolly_laws(ctx: &mut Ctx) -> Result<String, String> {
    use crate::random::{random_isometry, random_points};
    use crate::ultracore::BallKind;
    use crate::urysohn::Ball;
    let mut r = ctx.rng(13);
    let lambda = LambdaSpec::from_ints(&[1, 2, 3]);
    for t in 0..100 {
        let subtree = |r: &mut crate::random::Rng64| {
            let k = r.gen_range(1..=3);
            let pts = random_points(r, &lambda, k, &[], 2);
            let balls: Vec<Ball> = pts
                .iter()
                .map(|w| Ball::around(w, BallKind::Closed, lambda.with_zero()[r.gen_range(0..4)]))
                .collect();
            (dilative_closure(&lambda, &balls), pts)
        };
        let (w1, p1) = subtree(&mut r);
        let w1 = w1.map_err(|e| e.to_string())?;
        let again = close_elements(&lambda, &w1.elements().iter().cloned().collect::<Vec<_>>()).map_err(|e| e.to_string())?;
        ensure(again == w1, || format!("case {t}: closure is not idempotent"))?;
        let gs: Vec<_> = (0..3).map(|_| random_isometry(&mut r, &lambda, &p1, 2)).collect();
        let ws: Vec<_> = (0..3).map(|_| subtree(&mut r).0).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let el: Vec<_> = (0..3)
            .map(|i| group_shadow(&ModelAction::Isometry(gs[i].clone()), if i == 0 { &w1 } else { &ws[i] }))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let left = compose_gamma(&el[2], &compose_gamma(&el[1], &el[0]).map_err(|e| e.to_string())?);
        let right = compose_gamma(&compose_gamma(&el[2], &el[1]).map_err(|e| e.to_string())?, &el[0]);
        ensure(left == right, || format!("case {t}: composition is not associative"))?;
    }
    Ok("100 closures idempotent, 100 triples associate".into())
}

/// JSON report of a run.
pub fn report_json(results: &[SuiteResult], seed: u64) -> Value {
    json!({
        "seed": seed,
        "passed": results.iter().all(|r| r.passed),
        "suites": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_space_lists() {
        assert_eq!(small_lambdas().len(), 7);
        assert_eq!(small_spaces(&LambdaSpec::from_ints(&[1, 2])).len(), 1 + 2 + 3);
    }

    #[test]
    fn fault_is_reported_with_module() {
        let opts = SelftestOptions { seed: 0, filter: Some("dendro".into()), fault: Some(Fault::DendroCode) };
        let res = run(&opts);
        assert_eq!(res.len(), 1);
        assert!(!res[0].passed);
        assert!(res[0].line().contains("[dendro]"));
    }

    #[test]
    fn filter_selects_module() {
        let opts = SelftestOptions { seed: 0, filter: Some("ultracore".into()), fault: None };
        let res = run(&opts);
        assert!(res.iter().all(|r| r.module == "ultracore" && r.passed));
    }
}
