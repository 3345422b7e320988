//! CSV tabulation of the one-parameter families.

use std::f64::consts::PI;
use std::fs::File;
use std::io;
use std::path::PathBuf;

use clap::Args;
use opm4::families::{family_element, rational_point_for, trig_family, FamilyId, Sign};
use opm4::scalar::FromScalar;
use opm4::{Mat4, Perm4, Scalar};

use crate::{trig_kind, Ctx, Failure};

const MAX_ROWS: usize = 1_000_000;

#[derive(Args)]
pub struct SweepArgs {
    /// X1theta, Y1theta, Z1theta with --from/--to/--step, or X1..Z4 with --r.
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    step: Option<String>,
    /// Comma-separated rational parameters, e.g. "1,2,1/3".
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    branch: String,
    #[arg(long, default_value = "id")]
    pbar: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Angles such as `-pi`, `pi/4`, `3pi/4`, `2*π/3` or plain decimals.
pub fn parse_angle(text: &str) -> Result<f64, Failure> {
    let bad = || Failure::Usage(format!("bad angle {text:?}"));
    let t = text.trim().replace('π', "pi").replace(' ', "").to_ascii_lowercase();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(&t)),
    };
    let value = match body.find("pi") {
        Some(i) => {
            let coef = body[..i].trim_end_matches('*');
            let coef: f64 = if coef.is_empty() { 1.0 } else { coef.parse().map_err(|_| bad())? };
            let rest = &body[i + 2..];
            let div: f64 = match rest.strip_prefix('/') {
                Some(d) => d.parse().map_err(|_| bad())?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
            };
            coef * PI / div
        }
        None => body.parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(sign * value)
    } else {
        Err(bad())
    }
}

fn header() -> Vec<String> {
    let mut h = vec!["parameter".to_string()];
    h.extend((1..=4).flat_map(|i| (1..=4).map(move |j| format!("m{i}{j}"))));
    h.extend(["det", "orth_residual", "permutative"].map(String::from));
    h
}

fn cell<F: FromScalar>(v: &F) -> String {
    match v.to_scalar() {
        Scalar::Approx(x) => (x + 0.0).to_string(),
        exact => exact.to_string(),
    }
}

fn row<F: FromScalar>(parameter: String, m: &Mat4<F>) -> Vec<String> {
    let mut r = vec![parameter];
    r.extend(m.to_vec16().iter().map(cell));
    r.push(cell(&m.det()));
    r.push(m.orthogonality_residual().to_string());
    r.push(m.is_permutative().to_string());
    r
}

fn theta_rows(ctx: &Ctx, a: &SweepArgs) -> Result<Vec<Vec<String>>, Failure> {
    let which = trig_kind(&a.family)?;
    let need = |v: &Option<String>, name: &str| {
        v.as_deref().ok_or_else(|| Failure::Usage(format!("--{name} is required for {}", a.family))).and_then(parse_angle)
    };
    let (from, to, step) = (need(&a.from, "from")?, need(&a.to, "to")?, need(&a.step, "step")?);
    if step.is_nan() || step <= 0.0 || from > to {
        return Err(Failure::Usage(format!("bad range: from {from} to {to} step {step}")));
    }
    let span = (to - from) / step;
    if span >= MAX_ROWS as f64 {
        return Err(Failure::Usage(format!("range has more than {MAX_ROWS} rows")));
    }
    let n = (span + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|k| {
            let theta = (from + k as f64 * step).min(to);
            let m = trig_family(theta, which)?.with_tol(ctx.tol);
            Ok(row(theta.to_string(), &m))
        })
        .collect()
}

fn r_rows(ctx: &Ctx, a: &SweepArgs, list: &str) -> Result<Vec<Vec<String>>, Failure> {
    let fid: FamilyId = a.family.parse()?;
    let branch: Sign = a.branch.parse()?;
    let pbar: Perm4 = a.pbar.parse()?;
    let items: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(Failure::Usage("--r needs at least one value".into()));
    }
    items
        .iter()
        .map(|text| {
            let r = match ctx.scalar(text)? {
                Scalar::Exact(q) => q,
                Scalar::Approx(_) => return Err(Failure::Usage(format!("--r value {text:?} must be rational"))),
            };
            let p = rational_point_for(fid, &r, branch)?;
            Ok(row(r.to_string(), &family_element(fid, &p, &pbar, 0.0)?))
        })
        .collect()
}

pub fn run(ctx: &Ctx, a: &SweepArgs) -> Result<(), Failure> {
    let rows = match &a.r {
        Some(list) => r_rows(ctx, a, list)?,
        None => theta_rows(ctx, a)?,
    };
    let sink: Box<dyn io::Write> = match &a.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| Failure::Usage(e.to_string());
    w.write_record(header()).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
