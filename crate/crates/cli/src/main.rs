use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cusp_core::bieberbach::{analyze, catalog, catalog_names, theta_average, CheckedGroup, DEFAULT_MAX_ORDER};
use cusp_core::density::{run_experiment, write_csv, ExperimentConfig};
use cusp_core::json;
use cusp_core::lorentz::{embed_group, integralize, verify_embedding};
use cusp_core::selberg::{good_prime, verify_certificate, MatrixGroupInput};
use cusp_core::shapes::{rationalize, shape_distance, ShapeDescriptor};
use cusp_core::Error;

#[derive(Parser)]
#[command(
    name = "cuspshape",
    version,
    about = "Flat manifolds as cusp cross-sections of arithmetic hyperbolic orbifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List or show the built-in flat manifold groups
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Holonomy, translation lattice and torsion-freeness of a group file
    VerifyGroup {
        #[arg(short, long)]
        group: PathBuf,
    },
    /// Holonomy average of an exact form
    Average {
        #[arg(short, long)]
        group: PathBuf,
        #[arg(short, long)]
        form: PathBuf,
    },
    /// Round a real target metric to an exact invariant form
    Approximate {
        #[arg(short, long)]
        group: PathBuf,
        #[arg(short, long)]
        target: PathBuf,
        #[arg(short = 'd', long)]
        bound: u64,
    },
    /// Embed a group with an invariant form into the Lorentzian model
    Embed {
        #[arg(short, long)]
        group: PathBuf,
        #[arg(short, long)]
        form: PathBuf,
        #[arg(long)]
        integralize: bool,
        /// Print the verification report instead of the matrices
        #[arg(long)]
        report: bool,
    },
    /// Choose a congruence prime excluding torsion from the unipotent subgroup
    Selberg {
        #[arg(short, long)]
        lambda: PathBuf,
        #[arg(short = 'u', long)]
        gamma: PathBuf,
        /// Brute-force check of all words up to this length
        #[arg(long)]
        verify_words: Option<usize>,
        /// Print the full certificate as JSON
        #[arg(long)]
        json: bool,
    },
    /// Seeded approximation experiment written as CSV
    Density {
        /// Catalog name or group file
        #[arg(short, long)]
        group: String,
        #[arg(long)]
        samples: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        denoms: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        pipeline: bool,
        #[arg(long)]
        torus_manifold: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

/// Exit 1: bad input. Exit 2: an exact check came back false.
enum Failure {
    Validation(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn load_group(path: &Path) -> Result<Arc<CheckedGroup>, Failure> {
    let group = json::parse_group(&json::read_file(path)?)?;
    Ok(Arc::new(analyze(group, DEFAULT_MAX_ORDER)?))
}

fn resolve_group(name_or_path: &str) -> Result<Arc<CheckedGroup>, Failure> {
    if catalog_names().iter().any(|n| n == name_or_path) {
        Ok(Arc::new(analyze(catalog(name_or_path)?, DEFAULT_MAX_ORDER)?))
    } else if Path::new(name_or_path).exists() {
        load_group(Path::new(name_or_path))
    } else {
        Err(Error::UnknownName(name_or_path.into()).into())
    }
}

fn group_summary(g: &CheckedGroup) -> Value {
    json!({
        "dim": g.dim(),
        "name": g.name(),
        "holonomy_order": g.holonomy.order(),
        "lattice_basis": json::matrix_to_json(&g.lattice.transpose()),
        "torsion_free": g.torsion_free,
    })
}

fn catalog_cmd(action: CatalogAction) -> Outcome {
    match action {
        CatalogAction::List => {
            for n in catalog_names() {
                println!("{n}");
            }
            Ok(())
        }
        CatalogAction::Show { name } => {
            let g = catalog(&name)?;
            let checked = analyze(g.clone(), DEFAULT_MAX_ORDER)?;
            print_json(&json::group_to_json(&g));
            println!("holonomy order: {}", checked.holonomy.order());
            println!("torsion-free: {}", checked.torsion_free);
            Ok(())
        }
    }
}

fn verify_group_cmd(path: &Path) -> Outcome {
    let g = load_group(path)?;
    print_json(&group_summary(&g));
    if g.torsion_free {
        Ok(())
    } else {
        Err(Failure::Verification("group has torsion".into()))
    }
}

fn average_cmd(group: &Path, form: &Path) -> Outcome {
    let g = load_group(group)?;
    let f = json::parse_form(&json::read_file(form)?)?;
    print_json(&json::form_to_json(&theta_average(&f, &g.holonomy)?));
    Ok(())
}

fn approximate_cmd(group: &Path, target: &Path, bound: u64) -> Outcome {
    let g = load_group(group)?;
    let t = json::parse_real_form(&json::read_file(target)?)?;
    let shape = rationalize(&t, &g, bound)?;
    let averaged = t.theta_average(&g.holonomy)?;
    let mut out = json::form_to_json(shape.form());
    out["distance"] = json!(shape_distance(&averaged, shape.form())?);
    print_json(&out);
    Ok(())
}

fn embed_cmd(group: &Path, form: &Path, integral: bool, report: bool) -> Outcome {
    let g = load_group(group)?;
    let f = json::parse_form(&json::read_file(form)?)?;
    let shape = ShapeDescriptor::new(Arc::clone(&g), f)?;
    let mut e = embed_group(&g.group, &shape)?;
    if integral {
        e = integralize(&e)?.0;
    }
    let r = verify_embedding(&e);
    if report {
        print_json(&json::report_to_json(&r));
    } else {
        print_json(&json::embedding_to_json(&e));
    }
    if r.overall && (!integral || r.integral) {
        Ok(())
    } else {
        Err(Failure::Verification("embedding failed exact verification".into()))
    }
}

fn selberg_cmd(lambda: &Path, gamma: &Path, words: Option<usize>, as_json: bool) -> Outcome {
    let (n, lambda_gens) = json::parse_matrix_list(&json::read_file(lambda)?)?;
    let (m, gamma_gens) = json::parse_matrix_list(&json::read_file(gamma)?)?;
    if n != m {
        return Err(Error::DimensionMismatch { expected: n, found: m }.into());
    }
    let input = MatrixGroupInput::new(n, lambda_gens, gamma_gens)?;
    let cert = good_prime(&input)?;
    let verified = words.map(|k| verify_certificate(&input, &cert, k));
    if as_json {
        let mut v = json::certificate_to_json(&cert);
        if let Some(ok) = verified {
            v["verified"] = json!(ok);
        }
        print_json(&v);
    } else {
        println!("q={}", cert.prime);
        for (p, reasons) in &cert.bad_primes {
            let r: Vec<String> = reasons.iter().map(|r| r.to_string()).collect();
            println!("bad {p}: {}", r.join(", "));
        }
        if let Some(ok) = verified {
            println!("verified: {ok}");
        }
    }
    match verified {
        Some(false) => Err(Failure::Verification(
            "brute-force check found a torsion collision".into(),
        )),
        _ => Ok(()),
    }
}

fn density_cmd(
    group: &str,
    samples: usize,
    denoms: Vec<u64>,
    seed: u64,
    pipeline: bool,
    torus: bool,
    output: &Path,
) -> Outcome {
    let config = ExperimentConfig {
        group: resolve_group(group)?,
        sample_count: samples,
        denom_bounds: denoms,
        seed,
        run_pipeline: pipeline,
        torus_manifold_mode: torus,
    };
    let rows = run_experiment(&config)?;
    let file = File::create(output).map_err(|e| Failure::Validation(format!("{}: {e}", output.display())))?;
    write_csv(&rows, BufWriter::new(file))?;
    let failed = rows.iter().filter(|r| r.pipeline_ok == Some(false)).count();
    println!("{} rows written to {}", rows.len(), output.display());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{failed} rows failed the exact pipeline"
        )))
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Catalog { action } => catalog_cmd(action),
        Command::VerifyGroup { group } => verify_group_cmd(&group),
        Command::Average { group, form } => average_cmd(&group, &form),
        Command::Approximate { group, target, bound } => approximate_cmd(&group, &target, bound),
        Command::Embed {
            group,
            form,
            integralize,
            report,
        } => embed_cmd(&group, &form, integralize, report),
        Command::Selberg {
            lambda,
            gamma,
            verify_words,
            json,
        } => selberg_cmd(&lambda, &gamma, verify_words, json),
        Command::Density {
            group,
            samples,
            denoms,
            seed,
            pipeline,
            torus_manifold,
            output,
        } => density_cmd(&group, samples, denoms, seed, pipeline, torus_manifold, &output),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}
