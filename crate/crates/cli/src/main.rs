//! `opm4`: generate, check, decompose, classify and sweep 4×4 orthogonal
//! matrices built from permutation matrices.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage, parse or
//! constraint error, 3 input fails a precondition (not orthogonal, not in
//! the span of permutation matrices).

mod sweep;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opm4::classify::{classify_orthogonal, Tag};
use opm4::decompose::{in_perm_span, membership_of, opm_as_four_perms, split_six_permutative};
use opm4::families::{
    c_set_element, family_element, grover, opm_witness, rational_point_for, sporadic_opm, trig_family, CSet,
    FamilyId, ParamPoint, Sign, SporadicKind, TrigFamily,
};
use opm4::io::{classification_json, comb_json, four_perms_json, matrix_json, parse_matrix_json, scalar_json, AnyMat};
use opm4::patterns::pattern_of;
use opm4::perm::s4_partition;
use opm4::scalar::{FromScalar, DEFAULT_TOL};
use opm4::verify::{run_all, verify_group_chain, Chain};
use opm4::{Error, Mat4, Perm4, Scalar};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "opm4", version, about = "4x4 orthogonal permutative matrices")]
struct Cli {
    /// Comparison tolerance for floating-point matrices.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for sampled verification.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Keep decimal inputs in binary64 instead of snapping them to rationals.
    #[arg(long, global = true)]
    no_snap: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a family member as matrix JSON.
    Gen(GenArgs),
    /// Report orthogonality, permutativity, line sums, determinant and support.
    Check(InputArgs),
    /// Coefficients on permutation matrices, subspace membership and splits.
    Decompose(InputArgs),
    /// Structural classification of an orthogonal matrix.
    Classify(InputArgs),
    /// The six classes of pairwise H-orthogonal permutations, or a matrix split over them.
    Partition {
        /// Matrix JSON file to split ("-" for stdin).
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Tabulate a one-parameter family as CSV.
    Sweep(sweep::SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// X1..X4, Y1..Y4, Z1..Z4, C1, C2, X1theta, Y1theta, Z1theta, grover or sporadic.
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Second conic coordinate (written y in the Y and Z families).
    #[arg(long, alias = "y", allow_hyphen_values = true)]
    z: Option<String>,
    /// Rational parameter of the conic; used instead of --x/--z.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    branch: String,
    /// Row prefix, a permutation fixing 1 in cycle notation.
    #[arg(long, default_value = "id")]
    pbar: String,
    /// Angle for the trigonometric families, e.g. "pi/4" or "-0.3".
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// c2 for the C1/C2 sets.
    #[arg(long, allow_hyphen_values = true)]
    c2: Option<String>,
    /// Permutation of a sporadic matrix.
    #[arg(long, default_value = "id")]
    tau: String,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    sign: String,
    #[arg(long, value_enum, default_value_t = Form::Plain)]
    form: Form,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Plain,
    HalfJ,
}

#[derive(Args)]
struct InputArgs {
    /// Matrix JSON file, "-" for stdin.
    input: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Samples per sampled entry; 0 runs only the exhaustive entries.
    #[arg(long, default_value_t = opm4::verify::DEFAULT_SAMPLES)]
    samples: usize,
    /// Verify a single group chain (X, Y or Z).
    #[arg(long)]
    chain: Option<Chain>,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed invocation and its exit status.
pub enum Failure {
    Usage(String),
    Precondition(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotOrthogonal | Error::NotInSpan => Failure::Precondition(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

pub struct Ctx {
    pub tol: f64,
    pub seed: u64,
    pub snap: bool,
}

impl Ctx {
    pub fn scalar(&self, text: &str) -> Result<Scalar, Failure> {
        Ok(Scalar::parse_input(text, self.snap)?)
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn matrix_text(m: &Value) -> String {
    let rows: Vec<String> = m.as_array().expect("matrix").iter().map(|r| format!("  {r}")).collect();
    format!("[\n{}\n]\n", rows.join(",\n"))
}

fn read_matrix(ctx: &Ctx, path: &Path) -> Result<AnyMat, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    Ok(match parse_matrix_json(&text, ctx.snap)? {
        AnyMat::Approx(m) => AnyMat::Approx(m.with_tol(ctx.tol)),
        exact => exact,
    })
}

fn parse<T: std::str::FromStr<Err = Error>>(text: &str) -> Result<T, Failure> {
    Ok(text.parse()?)
}

fn param_point(ctx: &Ctx, fid: FamilyId, a: &GenArgs) -> Result<(Scalar, Scalar), Failure> {
    if let Some(r) = &a.r {
        let r = match ctx.scalar(r)? {
            Scalar::Exact(q) => q,
            Scalar::Approx(_) => return Err(Failure::Usage("--r must be rational".into())),
        };
        let p = rational_point_for(fid, &r, parse(&a.branch)?)?;
        return Ok((Scalar::Exact(p.x), Scalar::Exact(p.z)));
    }
    match (&a.x, &a.z) {
        (Some(x), Some(z)) => Ok((ctx.scalar(x)?, ctx.scalar(z)?)),
        _ => Err(Failure::Usage(format!("{fid} needs --x and --z (or --y), or --r"))),
    }
}

fn gen_family(ctx: &Ctx, fid: FamilyId, a: &GenArgs) -> Result<Value, Failure> {
    let pbar: Perm4 = parse(&a.pbar)?;
    Ok(match param_point(ctx, fid, a)? {
        (Scalar::Exact(x), Scalar::Exact(z)) => {
            matrix_json(&family_element(fid, &ParamPoint::new(x, z), &pbar, 0.0)?)
        }
        (x, z) => matrix_json(&family_element(fid, &ParamPoint::new(x.to_f64(), z.to_f64()), &pbar, ctx.tol)?),
    })
}

fn gen(ctx: &Ctx, a: &GenArgs) -> Outcome {
    let name = a.family.trim();
    let m = match name.to_ascii_lowercase().as_str() {
        "grover" => matrix_json(&grover::<opm4::Q>()),
        "sporadic" => {
            let tau: Perm4 = parse(&a.tau)?;
            let kind = match a.form {
                Form::Plain => SporadicKind::Plain,
                Form::HalfJ => SporadicKind::HalfJ,
            };
            matrix_json(&sporadic_opm::<opm4::Q>(&tau, parse(&a.sign)?, kind))
        }
        "x1theta" | "y1theta" | "z1theta" => {
            let which = trig_kind(name)?;
            let theta = a.theta.as_deref().ok_or_else(|| Failure::Usage("--theta is required".into()))?;
            matrix_json(&trig_family(sweep::parse_angle(theta)?, which)?)
        }
        "c1" | "c2" => {
            let which: CSet = parse(name)?;
            let c2 = a.c2.as_deref().ok_or_else(|| Failure::Usage("--c2 is required".into()))?;
            let branch: Sign = parse(&a.branch)?;
            match ctx.scalar(c2)? {
                Scalar::Exact(c) => matrix_json(&c_set_element(which, &c, branch)?),
                Scalar::Approx(c) => matrix_json(&c_set_element(which, &c, branch)?),
            }
        }
        _ => gen_family(ctx, parse(name)?, a)?,
    };
    emit(a.out.as_deref(), &matrix_text(&m))
}

pub fn trig_kind(name: &str) -> Result<TrigFamily, Failure> {
    match name.to_ascii_lowercase().as_str() {
        "x1theta" => Ok(TrigFamily::X1),
        "y1theta" => Ok(TrigFamily::Y1),
        "z1theta" => Ok(TrigFamily::Z1),
        _ => Err(Failure::Usage(format!("unknown trigonometric family {name:?}"))),
    }
}

fn check_json<F: FromScalar>(m: &Mat4<F>) -> Value {
    let (rows, cols) = m.row_col_sums();
    let pattern = pattern_of(m);
    json!({
        "exact": F::EXACT,
        "orthogonal": m.is_orthogonal(),
        "orthogonality_residual": m.orthogonality_residual(),
        "permutative": m.is_permutative(),
        "row_sums": rows.iter().map(scalar_json).collect::<Vec<_>>(),
        "col_sums": cols.iter().map(scalar_json).collect::<Vec<_>>(),
        "line_sum": m.common_line_sum().as_ref().map(scalar_json),
        "det": scalar_json(&m.det()),
        "in_span": in_perm_span(m).is_some(),
        "pattern": pattern.to_string(),
        "quadrangular": pattern.is_quadrangular(),
        "strongly_quadrangular": pattern.is_strongly_quadrangular(),
    })
}

fn decompose_json<F: FromScalar>(m: &Mat4<F>) -> Result<Value, Failure> {
    let c = in_perm_span(m).ok_or(Error::NotInSpan)?;
    let split: Vec<Value> = split_six_permutative(&c)
        .iter()
        .map(|(class, part)| json!({ "class": class.index, "matrix": matrix_json(part) }))
        .collect();
    let four = match opm_witness(m) {
        Some(w) if m.is_permutative() => Some(four_perms_json(&opm_as_four_perms(m, &w)?)),
        _ => None,
    };
    Ok(json!({
        "combination": comb_json(&c),
        "membership": membership_of(&c).members(),
        "six_split": split,
        "four_perms": four,
    }))
}

fn classify_json<F: FromScalar>(m: &Mat4<F>) -> Result<Value, Failure> {
    let c = classify_orthogonal(m);
    if c.tag() == Tag::NotOrthogonal {
        return Err(Failure::Precondition(format!("matrix is not orthogonal (residual {:e})", m.orthogonality_residual())));
    }
    Ok(classification_json(&c))
}

fn partition(ctx: &Ctx, matrix: Option<&Path>) -> Outcome {
    let v = match matrix {
        None => serde_json::to_value(s4_partition()).expect("classes serialize"),
        Some(p) => {
            let d = match read_matrix(ctx, p)? {
                AnyMat::Exact(m) => decompose_json(&m)?,
                AnyMat::Approx(m) => decompose_json(&m)?,
            };
            d["six_split"].clone()
        }
    };
    emit(None, &pretty(&v))
}

fn verify(ctx: &Ctx, a: &VerifyArgs) -> Outcome {
    let report = match a.chain {
        Some(c) => {
            let e = verify_group_chain(c, a.samples, ctx.seed)?;
            opm4::verify::SuiteReport { seed: ctx.seed, samples: a.samples, entries: vec![e] }
        }
        None => run_all(ctx.seed, a.samples),
    };
    let json = report.to_json();
    if let Some(p) = &a.out {
        fs::write(p, &json)?;
    }
    emit(None, &if a.json { json + "\n" } else { report.table() })?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: Cli) -> Outcome {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(Failure::Usage(format!("bad tolerance {}", cli.tol)));
    }
    let ctx = Ctx { tol: cli.tol, seed: cli.seed, snap: !cli.no_snap };
    match &cli.command {
        Command::Gen(a) => gen(&ctx, a),
        Command::Check(a) => {
            let v = match read_matrix(&ctx, &a.input)? {
                AnyMat::Exact(m) => check_json(&m),
                AnyMat::Approx(m) => check_json(&m),
            };
            emit(None, &pretty(&v))
        }
        Command::Decompose(a) => {
            let v = match read_matrix(&ctx, &a.input)? {
                AnyMat::Exact(m) => decompose_json(&m)?,
                AnyMat::Approx(m) => decompose_json(&m)?,
            };
            emit(None, &pretty(&v))
        }
        Command::Classify(a) => {
            let v = match read_matrix(&ctx, &a.input)? {
                AnyMat::Exact(m) => classify_json(&m)?,
                AnyMat::Approx(m) => classify_json(&m)?,
            };
            emit(None, &pretty(&v))
        }
        Command::Partition { matrix } => partition(&ctx, matrix.as_deref()),
        Command::Verify(a) => verify(&ctx, a),
        Command::Sweep(a) => sweep::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
