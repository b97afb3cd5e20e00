use std::fmt::{Debug, Display};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ultracat::amalgam::{amalgamate, Morphism};
use ultracat::dendro::{canonical_code, isometry_group, Dendrogram};
use ultracat::embed::{certificate_json, psd_check, schoenberg_gram, tree_embedding, EmbedMetric};
use ultracat::endsemi::{classify_endo, enumerate_endomorphisms, idempotent_factor, is_idempotent, EndoError};
use ultracat::reps::irrep_census;
use ultracat::selftest::{self, Fault, SelftestOptions};
use ultracat::ultracore::{BallKind, LambdaSpec, UltraSpace};
use ultracat::urysohn::{double_coset, theta_stabilization, Ball, Configuration, Isometry, NguyenPoint};
use ultracat::woolly::{dilative_closure, group_shadow, ModelAction};
use ultracat::Rat;

#[derive(Parser)]
#[command(name = "ultracat", version, about = "Finite ultrametric spaces, their amalgam category and its representations")]
struct Cli {
    /// Seed for randomized suites.
    #[arg(long, global = true, env = "ULTRACAT_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpaceInput {
    /// Space JSON file.
    #[arg(value_name = "SPACE")]
    path: Option<PathBuf>,
    /// Space JSON file (same as the positional argument).
    #[arg(long = "space", conflicts_with = "path")]
    space: Option<PathBuf>,
    /// Value set JSON file; overrides one embedded in the space.
    #[arg(long)]
    lambda: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a space is a finite ultrametric space.
    Validate(SpaceInput),
    /// Dendrogram and canonical code of a space.
    Tree {
        #[command(flatten)]
        input: SpaceInput,
        /// Print the indented text form instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Glue two spaces along identified points.
    Amalgam {
        x: PathBuf,
        y: PathBuf,
        /// Identified pairs as `i:j` indices, comma separated.
        #[arg(long, required = true)]
        overlap: String,
    },
    /// Product of two morphisms, the first applied first.
    Compose { first: PathBuf, second: PathBuf },
    /// Summarise End(X), or classify one endomorphism.
    Endo {
        #[command(flatten)]
        input: SpaceInput,
        /// Morphism JSON file to classify instead.
        #[arg(long)]
        morphism: Option<PathBuf>,
    },
    /// Irreducible representations of End(X).
    Census(SpaceInput),
    /// Euclidean embedding of a space.
    Embed {
        #[command(flatten)]
        input: SpaceInput,
        /// Realise d² instead of d as squared distance.
        #[arg(long)]
        squared: bool,
    },
    /// Kernel matrix `s^d` and its positivity certificate.
    Gram {
        #[command(flatten)]
        input: SpaceInput,
        /// Kernel parameter in (0, 1), e.g. `1/4` or `0.5`.
        #[arg(long)]
        s: String,
    },
    /// Morphism of the double coset of an isometry: `{"x":…, "z":…, "images":[…]}`.
    Coset { input: PathBuf },
    /// Stabilization of `g1 Θ_j g2`: `{"x","y","z","g2_images","g1_preimages"}`.
    Theta {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        j_max: u64,
    },
    /// Woolly closure of balls and, with an isometry, its shadow: `{"lambda","balls","isometry"?}`.
    Woolly { input: PathBuf },
    /// Run the built-in suites.
    Selftest {
        /// Only run suites of this module.
        #[arg(long)]
        filter: Option<String>,
        /// Inject a defect (`dendro-code` or `composition`).
        #[arg(long)]
        fault: Option<Fault>,
        /// Emit a JSON report instead of text lines.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Domain { module: &'static str, kind: String, message: String },
}

fn domain<E: Debug + Display>(module: &'static str) -> impl Fn(E) -> Failure {
    move |e| {
        let dbg = format!("{e:?}");
        let kind = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        Failure::Domain { module, kind, message: e.to_string() }
    }
}

fn usage<E: Display>(context: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Usage(format!("{}: {e}", context.display()))
}

enum Report {
    Json(Value),
    Text(String),
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(usage(path))?;
    serde_json::from_str(&text).map_err(usage(path))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, v: Value) -> Result<T, Failure> {
    serde_json::from_value(v).map_err(usage(path))
}

fn load_space(input: &SpaceInput) -> Result<(UltraSpace, Option<LambdaSpec>), Failure> {
    let path = input
        .space
        .as_ref()
        .or(input.path.as_ref())
        .ok_or_else(|| Failure::Usage("a space file is required".into()))?;
    let mut space: UltraSpace = parse(path, read_json(path)?)?;
    if let Some(lp) = &input.lambda {
        let lambda: LambdaSpec = parse(lp, read_json(lp)?)?;
        space = space.with_lambda(lambda).map_err(domain("ultracore"))?;
    } else {
        space.validate().map_err(domain("ultracore"))?;
    }
    let lambda = space.lambda.clone();
    Ok((space, lambda))
}

fn require_lambda(lambda: Option<LambdaSpec>) -> Result<LambdaSpec, Failure> {
    lambda.ok_or_else(|| Failure::Usage("a value set is required (--lambda or a \"lambda\" field)".into()))
}

fn parse_rat(s: &str) -> Result<Rat, Failure> {
    s.parse::<Rat>().map_err(|e| Failure::Usage(format!("{s:?} is not a number: {e}")))
}

fn run(cli: &Cli) -> Result<(Report, bool), Failure> {
    let ok = |v: Value| Ok((Report::Json(v), true));
    match &cli.command {
        Command::Validate(input) => {
            let (space, _) = load_space(input)?;
            ok(json!({
                "valid": true,
                "points": space.len(),
                "spectrum": space.spectrum().into_iter().collect::<Vec<_>>(),
            }))
        }
        Command::Tree { input, text } => {
            let (space, _) = load_space(input)?;
            let tree = Dendrogram::build(&space);
            if *text {
                return Ok((Report::Text(tree.to_text(&space)), true));
            }
            ok(json!({
                "code": canonical_code(&space).to_string(),
                "isometries": isometry_group(&space).len(),
                "tree": tree.to_json(&space),
            }))
        }
        Command::Amalgam { x, y, overlap } => {
            let xs: UltraSpace = parse(x, read_json(x)?)?;
            let ys: UltraSpace = parse(y, read_json(y)?)?;
            xs.validate().map_err(domain("ultracore"))?;
            ys.validate().map_err(domain("ultracore"))?;
            let pairs = overlap
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|p| {
                    let (a, b) = p.split_once(':').ok_or_else(|| Failure::Usage(format!("bad pair {p:?}")))?;
                    let n = |s: &str| s.trim().parse::<usize>().map_err(|e| Failure::Usage(format!("bad index {s:?}: {e}")));
                    Ok((n(a)?, n(b)?))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let a = amalgamate(&xs, &ys, &pairs).map_err(domain("amalgam"))?;
            ok(json!({"space": a.space, "left": a.left, "right": a.right}))
        }
        Command::Compose { first, second } => {
            let p = Morphism::from_json(&read_json(first)?).map_err(|e| Failure::Usage(e))?;
            let q = Morphism::from_json(&read_json(second)?).map_err(|e| Failure::Usage(e))?;
            let r = p.compose(&q).map_err(domain("amalgam"))?;
            ok(json!({"morphism": r.to_json(), "code": r.canonical_code().to_string()}))
        }
        Command::Endo { input, morphism } => {
            let (space, lambda) = load_space(input)?;
            if let Some(path) = morphism {
                let p = Morphism::from_json(&read_json(path)?).map_err(Failure::Usage)?;
                if p.source() != &space || p.target() != &space {
                    return Err(domain("endsemi")(EndoError::SpaceMismatch));
                }
                return ok(match classify_endo(&p) {
                    Ok(na) => json!({
                        "near_automorphism": true,
                        "kappa": na.kappa,
                        "lambdas": na.near_unit.lambdas(),
                        "idempotent": is_idempotent(&p),
                    }),
                    Err(EndoError::NotNearAutomorphism { certificate, label }) => {
                        let factor = idempotent_factor(&p).ok();
                        json!({
                            "near_automorphism": false,
                            "certificate": {"point": label, "index": certificate},
                            "idempotent": is_idempotent(&p),
                            "factor": factor.map(|f| json!({"kept": f.kept, "t": f.t.to_json()})),
                        })
                    }
                    Err(e) => return Err(domain("endsemi")(e)),
                });
            }
            let lambda = require_lambda(lambda)?;
            let end = enumerate_endomorphisms(&space, &lambda);
            let near = end.iter().filter(|p| classify_endo(p).is_ok()).count();
            let idem = end.iter().filter(|p| is_idempotent(p)).count();
            ok(json!({"elements": end.len(), "near_automorphisms": near, "idempotents": idem}))
        }
        Command::Census(input) => {
            let (space, lambda) = load_space(input)?;
            let lambda = require_lambda(lambda)?;
            let census = irrep_census(&space, &lambda).map_err(domain("reps"))?;
            ok(json!({
                "count": census.len(),
                "dims": census.iter().map(|e| e.dim).collect::<Vec<_>>(),
                "irreps": census.iter().map(|e| e.to_json()).collect::<Vec<_>>(),
            }))
        }
        Command::Embed { input, squared } => {
            let (space, _) = load_space(input)?;
            let metric = if *squared { EmbedMetric::Squared } else { EmbedMetric::Original };
            ok(tree_embedding(&space, metric).to_json())
        }
        Command::Gram { input, s } => {
            let (space, _) = load_space(input)?;
            let g = schoenberg_gram(&space, parse_rat(s)?).map_err(domain("embed"))?;
            let cert = psd_check(&g).map_err(domain("embed"))?;
            ok(json!({"gram": g.to_json(), "certificate": certificate_json(&cert)}))
        }
        Command::Coset { input } => {
            let v = read_json(input)?;
            let x: Configuration = parse(input, v["x"].clone())?;
            let z: Configuration = parse(input, v["z"].clone())?;
            let images: Vec<NguyenPoint> = parse(input, v["images"].clone())?;
            let m = double_coset(&x.with_default_labels("x"), &z.with_default_labels("z"), &images)
                .map_err(domain("urysohn"))?;
            ok(json!({"morphism": m.to_json(), "code": m.canonical_code().to_string()}))
        }
        Command::Theta { input, j_max } => {
            let v = read_json(input)?;
            let conf = |key: &str, prefix: &str| -> Result<Configuration, Failure> {
                Ok(parse::<Configuration>(input, v[key].clone())?.with_default_labels(prefix))
            };
            let (x, y, z) = (conf("x", "x")?, conf("y", "y")?, conf("z", "z")?);
            let g2: Vec<NguyenPoint> = parse(input, v["g2_images"].clone())?;
            let g1: Vec<NguyenPoint> = parse(input, v["g1_preimages"].clone())?;
            let s = theta_stabilization(&x, &y, &z, &g2, &g1, *j_max).map_err(domain("urysohn"))?;
            ok(json!({
                "j": s.j,
                "limit": s.limit.delta(),
                "sequence": s.sequence.iter().map(|m| m.delta()).collect::<Vec<_>>(),
            }))
        }
        Command::Woolly { input } => {
            let v = read_json(input)?;
            let lambda: LambdaSpec = parse(input, v["lambda"].clone())?;
            lambda.validate().map_err(domain("ultracore"))?;
            #[derive(serde::Deserialize)]
            struct BallWire {
                kind: BallKind,
                radius: Rat,
                center: NguyenPoint,
            }
            let wires: Vec<BallWire> = parse(input, v["balls"].clone())?;
            let balls: Vec<Ball> = wires.iter().map(|b| Ball::around(&b.center, b.kind, b.radius)).collect();
            let w = dilative_closure(&lambda, &balls).map_err(domain("woolly"))?;
            let shadow = match v.get("isometry") {
                Some(g) => {
                    let g: Isometry = parse(input, g.clone())?;
                    Some(group_shadow(&ModelAction::Isometry(g), &w).map_err(domain("woolly"))?.to_json())
                }
                None => None,
            };
            ok(json!({"subtree": w.to_json(), "shadow": shadow}))
        }
        Command::Selftest { filter, fault, json } => {
            if let Some(f) = filter {
                if !selftest::MODULES.contains(&f.as_str()) {
                    return Err(Failure::Usage(format!(
                        "unknown module {f:?}; expected one of {}",
                        selftest::MODULES.join(", ")
                    )));
                }
            }
            let opts = SelftestOptions { seed: cli.seed, filter: filter.clone(), fault: *fault };
            let results = selftest::run(&opts);
            let fine = !results.iter().any(|r| r.blocking());
            let report = if *json {
                Report::Json(selftest::report_json(&results, cli.seed))
            } else {
                let mut text: String = results.iter().map(|r| r.line() + "\n").collect();
                text.push_str(&format!(
                    "{} of {} suites passed\n",
                    results.iter().filter(|r| r.passed).count(),
                    results.len()
                ));
                Report::Text(text)
            };
            Ok((report, fine))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(usage(path)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|(report, fine)| {
        let text = match report {
            Report::Json(v) => serde_json::to_string_pretty(&v).expect("values serialize") + "\n",
            Report::Text(t) => t,
        };
        emit(&cli, &text).map(|_| fine)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain { module, kind, message }) => {
            let obj = json!({"error": {"module": module, "kind": kind, "message": message}});
            let text = serde_json::to_string_pretty(&obj).expect("values serialize") + "\n";
            if emit(&cli, &text).is_err() {
                print!("{text}");
            }
            ExitCode::from(1)
        }
    }
}
