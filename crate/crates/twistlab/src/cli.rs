//! The `twistlab` command line. [`run`] takes argv and output sinks so tests
//! can drive it in process.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use twistcore::catalog::{
    build, crosscheck, crosscheck_family, CheckLine, CrosscheckReport, FamilyId, FamilySpec,
};
use twistcore::certify::{certify_family, specialize, CertifyConfig, CheckStatus};
use twistcore::curves::{CubicCurve, CurvePoint};
use twistcore::exactmath::parse_rational;
use twistcore::twistforge::{
    assemble_rank2, assemble_rank3, conic_param_double, conic_param_single, twist_from_permutation,
    ConicPoint, Mobius, Provenance, TwistFamily,
};
use twistcore::BigRational;

use crate::density::{certified_density, enumerate_s, fit_exponent, HomogForm};
use crate::golden::compare_golden;
use crate::json::{
    certificate_json, crosscheck_json, family_from_str, family_to_string, params_json, q_str,
    specialized_json, to_pretty, ParamJson,
};
use crate::LabError;

/// Default for `--seed`.
pub const DEFAULT_SEED: u64 = 0x7457_6973_7421;

#[derive(Parser, Debug)]
#[command(
    name = "twistlab",
    version,
    about = "Quadratic twist families of elliptic curves with large rank over Q(u)"
)]
pub struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// Reproducibility seed. All computations are deterministic; accepted and ignored.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker thread cap for density and certification fan-out.
    #[arg(long, global = true, env = "TWISTLAB_THREADS")]
    pub threads: Option<usize>,
    /// Write the JSON payload to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Named families.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Rank-2 family from one root permutation `h(t) = (a t + b)/(c t + d)`.
    ForgeRank2(ForgeRank2Args),
    /// Rank-3 family from two root permutations and a point on the conic pair.
    ForgeRank3(ForgeRank3Args),
    /// Certify rank bounds for a family file.
    Certify(CertifyArgs),
    /// Specialize a family at `u = u0`.
    Specialize(SpecializeArgs),
    /// Count distinct squarefree twists over a grid of `(a, b)`.
    Density(DensityArgs),
    /// Compare a catalog family with its pipeline construction and golden file.
    Crosscheck(CrosscheckArgs),
}

#[derive(Subcommand, Debug)]
pub enum CatalogCmd {
    /// List family ids, degrees, claimed ranks and defaults.
    List,
    /// Build a family as JSON.
    Build {
        #[arg(long)]
        id: String,
        /// Parameter overrides, e.g. `a=1,b=2`.
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct ForgeRank2Args {
    /// `e2,e1,e0` for `y^2 = x^3 + e2 x^2 + e1 x + e0`.
    #[arg(long, allow_hyphen_values = true)]
    pub curve: String,
    /// `a,b,c,d` for `h(t) = (a t + b)/(c t + d)`.
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    /// `t0,s0` on `s^2 = k(t)` when `k` is quadratic.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(Args, Debug)]
pub struct ForgeRank3Args {
    #[arg(long, allow_hyphen_values = true)]
    pub curve: String,
    #[arg(long, allow_hyphen_values = true)]
    pub h1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub h2: String,
    /// `t0,r0,s0` with `r0^2 = k1(t0)` and `s0^2 = k2(t0)`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    #[arg(long, default_value_t = 25)]
    pub primes: usize,
    #[arg(long, default_value_t = 10)]
    pub bound: u32,
}

#[derive(Args, Debug)]
pub struct SpecializeArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub u0: String,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub grid: i64,
    #[arg(long, default_value_t = 1)]
    pub modulus: i64,
    /// Only `|D| < x-max` are kept: an integer, `10^N` or `1eN`; default `10^100`.
    #[arg(long)]
    pub x_max: Option<String>,
    /// Sieve-certify every counted twist.
    #[arg(long)]
    pub certify: bool,
    #[arg(long, default_value_t = 25)]
    pub primes: usize,
    #[arg(long, default_value_t = 10)]
    pub bound: u32,
}

#[derive(Args, Debug)]
pub struct CrosscheckArgs {
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    pub id: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "id")]
    pub params: Option<String>,
    #[arg(long)]
    pub family: Option<PathBuf>,
}

/// Result of a command before it is written out.
struct Outcome {
    json: String,
    text: String,
    code: i32,
}

impl Outcome {
    fn ok(json: String, text: String) -> Self {
        Outcome {
            json,
            text,
            code: 0,
        }
    }
}

/// Parses and executes `args` (including the program name). Returns the
/// process exit code: 0 success, 1 mathematical failure, 2 usage or IO error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                2
            } else {
                let _ = write!(stdout, "{rendered}");
                0
            };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(LabError::Io(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(o) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &o.json) {
                    let _ = writeln!(stderr, "error: io error: {}: {e}", path.display());
                    return 2;
                }
            }
            let body = if cli.json { &o.json } else { &o.text };
            let _ = write!(stdout, "{body}");
            if o.code != 0 {
                let _ = writeln!(stderr, "error: check failed (see report)");
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, LabError> {
    match &cli.command {
        Command::Catalog(CatalogCmd::List) => catalog_list(),
        Command::Catalog(CatalogCmd::Build { id, params }) => {
            let fam = build(&parse_spec(id, params.as_deref())?)?;
            Ok(family_outcome(&fam))
        }
        Command::ForgeRank2(a) => forge_rank2(a).map(|f| family_outcome(&f)),
        Command::ForgeRank3(a) => forge_rank3(a).map(|f| family_outcome(&f)),
        Command::Certify(a) => cmd_certify(a),
        Command::Specialize(a) => cmd_specialize(a),
        Command::Density(a) => cmd_density(a),
        Command::Crosscheck(a) => cmd_crosscheck(a),
    }
}

fn family_outcome(fam: &TwistFamily) -> Outcome {
    let s = family_to_string(fam);
    Outcome::ok(s.clone(), s)
}

fn usage(msg: impl Into<String>) -> LabError {
    LabError::Format(msg.into())
}

fn parse_q(s: &str) -> Result<BigRational, LabError> {
    parse_rational(s.trim()).map_err(|e| usage(e.to_string()))
}

fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<BigRational>, LabError> {
    let v: Vec<BigRational> = s.split(',').map(parse_q).collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(usage(format!(
            "{what} needs {n} comma-separated rationals, got {}",
            v.len()
        )));
    }
    Ok(v)
}

fn parse_params(s: &str) -> Result<Vec<(String, BigRational)>, LabError> {
    s.split(',')
        .filter(|kv| !kv.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("parameter {kv:?} is not name=value")))?;
            Ok((k.trim().to_string(), parse_q(v)?))
        })
        .collect()
}

fn parse_spec(id: &str, params: Option<&str>) -> Result<FamilySpec, LabError> {
    let id: FamilyId = id
        .parse()
        .map_err(|e: twistcore::Error| usage(e.to_string()))?;
    let overrides = params.map(parse_params).transpose()?.unwrap_or_default();
    FamilySpec::new(id, &overrides).map_err(|e| usage(e.to_string()))
}

fn read_family(path: &Path) -> Result<TwistFamily, LabError> {
    let s = std::fs::read_to_string(path)
        .map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    family_from_str(&s)
}

#[derive(Serialize)]
struct CatalogEntry {
    id: String,
    degree: usize,
    claimed_rank: u32,
    params: Vec<ParamJson>,
    hypotheses: String,
}

fn catalog_list() -> Result<Outcome, LabError> {
    let entries: Vec<CatalogEntry> = FamilyId::ALL
        .iter()
        .map(|&id| CatalogEntry {
            id: id.as_str().into(),
            degree: id.expected_degree(),
            claimed_rank: id.claimed_rank(),
            params: params_json(&FamilySpec::default_for(id).params),
            hypotheses: id.hypotheses().into(),
        })
        .collect();
    let mut text = String::new();
    for e in &entries {
        let ps: Vec<String> = e
            .params
            .iter()
            .map(|p| format!("{}={}", p.name, p.value))
            .collect();
        text.push_str(&format!(
            "{:<10} deg {:>2}  rank {}  [{}]  {}\n",
            e.id,
            e.degree,
            e.claimed_rank,
            ps.join(","),
            e.hypotheses
        ));
    }
    Ok(Outcome::ok(to_pretty(&entries), text))
}

fn forge_curve(s: &str) -> Result<CubicCurve<BigRational>, LabError> {
    let c = parse_list(s, 3, "--curve")?;
    Ok(CubicCurve::new(c[0].clone(), c[1].clone(), c[2].clone())?)
}

fn forge_mobius(s: &str, flag: &str) -> Result<Mobius, LabError> {
    let m = parse_list(s, 4, flag)?;
    Ok(Mobius::new(
        m[0].clone(),
        m[1].clone(),
        m[2].clone(),
        m[3].clone(),
    )?)
}

fn forge_provenance(curve: &CubicCurve<BigRational>, note: String) -> Provenance {
    Provenance {
        id: "forge".into(),
        source: "forge".into(),
        params: vec![
            ("e2".into(), curve.e2.clone()),
            ("e1".into(), curve.e1.clone()),
            ("e0".into(), curve.e0.clone()),
        ],
        t_of_u: None,
        note,
    }
}

fn forge_rank2(a: &ForgeRank2Args) -> Result<TwistFamily, LabError> {
    let curve = forge_curve(&a.curve)?;
    let f = curve.poly();
    let h = forge_mobius(&a.h, "--h")?;
    let tid = twist_from_permutation(&f, &h)?;
    let point = match &a.point {
        Some(p) => {
            let v = parse_list(p, 2, "--point")?;
            Some((v[0].clone(), v[1].clone()))
        }
        None => None,
    };
    let t = conic_param_single(&tid.k, point)?;
    let note = format!("h(t) = {}; k(t) = {}", h.to_ratfunc(), tid.k);
    Ok(assemble_rank2(
        &f,
        &tid,
        &t,
        forge_provenance(&curve, note),
    )?)
}

fn forge_rank3(a: &ForgeRank3Args) -> Result<TwistFamily, LabError> {
    let curve = forge_curve(&a.curve)?;
    let f = curve.poly();
    let h1 = forge_mobius(&a.h1, "--h1")?;
    let h2 = forge_mobius(&a.h2, "--h2")?;
    let tid1 = twist_from_permutation(&f, &h1)?;
    let tid2 = twist_from_permutation(&f, &h2)?;
    let p = parse_list(&a.point, 3, "--point")?;
    let pt = ConicPoint::new(p[0].clone(), p[1].clone(), p[2].clone());
    if !pt.lies_on(&tid1.k, &tid2.k) {
        return Err(twistcore::Error::Hypothesis(format!(
            "point is not on r^2 = {}, s^2 = {}",
            tid1.k, tid2.k
        ))
        .into());
    }
    let t = conic_param_double(&tid1.k, &tid2.k, &pt)?;
    let note = format!(
        "h1(t) = {}; h2(t) = {}; k1(t) = {}; k2(t) = {}",
        h1.to_ratfunc(),
        h2.to_ratfunc(),
        tid1.k,
        tid2.k
    );
    Ok(assemble_rank3(
        &f,
        &tid1,
        &tid2,
        &t,
        forge_provenance(&curve, note),
    )?)
}

fn cmd_certify(a: &CertifyArgs) -> Result<Outcome, LabError> {
    let fam = read_family(&a.family)?;
    let cfg = CertifyConfig {
        samples: a.samples,
        prime_budget: a.primes,
        relation_bound: a.bound,
    };
    let cert = certify_family(&fam, &cfg)?;
    let mut text = String::new();
    for c in &cert.checks {
        text.push_str(&format!(
            "{:<13} {:<22} {}\n",
            c.status.as_str(),
            c.name,
            c.witness
        ));
    }
    text.push_str(&format!(
        "{}: rank >= {}, rank <= {}, claimed {}\n",
        cert.id, cert.certified_lower, cert.genus_upper, cert.claimed_rank
    ));
    let mut o = Outcome::ok(to_pretty(&certificate_json(&cert)), text);
    let failed = cert.checks.iter().any(|c| c.status == CheckStatus::Fail);
    if failed || cert.certified_lower < cert.claimed_rank {
        o.code = 1;
        o.text.push_str(&format!(
            "FAIL certified_lower {} below claimed rank {}\n",
            cert.certified_lower, cert.claimed_rank
        ));
    }
    Ok(o)
}

fn cmd_specialize(a: &SpecializeArgs) -> Result<Outcome, LabError> {
    let fam = read_family(&a.family)?;
    let u0 = parse_q(&a.u0)?;
    let s = specialize(&fam, &u0)?;
    let mut text = format!(
        "u0 = {}\nD = {}\nE_D: {} y^2 = x^3 + ({}) x^2 + ({}) x + ({})\n",
        q_str(&s.u0),
        s.d,
        s.d,
        q_str(&fam.curve.e2),
        q_str(&fam.curve.e1),
        q_str(&fam.curve.e0)
    );
    for (i, p) in s.points.iter().enumerate() {
        match p {
            CurvePoint::Infinity => text.push_str(&format!("P{} = O\n", i + 1)),
            CurvePoint::Affine { x, y } => {
                text.push_str(&format!("P{} = ({}, {})\n", i + 1, q_str(x), q_str(y)))
            }
        }
    }
    Ok(Outcome::ok(to_pretty(&specialized_json(&s)), text))
}

/// Integer, `10^N` or `1eN`.
fn parse_x_max(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let exp = s.strip_prefix("10^").or_else(|| s.strip_prefix("1e"));
    match exp {
        Some(e) => Some(num_traits::pow(BigInt::from(10), e.parse::<usize>().ok()?)),
        None => s.parse().ok(),
    }
}

fn cmd_density(a: &DensityArgs) -> Result<Outcome, LabError> {
    if a.grid < 1 || a.modulus < 1 {
        return Err(usage("--grid and --modulus must be at least 1"));
    }
    let x_max: BigInt = match &a.x_max {
        Some(s) => {
            parse_x_max(s).ok_or_else(|| usage(format!("--x-max {s:?} is not an integer")))?
        }
        None => num_traits::pow(BigInt::from(10), 100),
    };
    if x_max < BigInt::from(1) {
        return Err(usage("--x-max must be at least 1"));
    }
    let fam = read_family(&a.family)?;
    let form = HomogForm::from_family(&fam)?;
    let mut report = enumerate_s(&form, &fam.provenance.id, a.grid, a.modulus, &x_max);
    let mut notes = String::new();
    match fit_exponent(&report) {
        Ok(fit) => report.fit = Some(fit),
        Err(e) => notes.push_str(&format!("fit: {e}\n")),
    }
    if a.certify {
        let cfg = CertifyConfig {
            samples: 0,
            prime_budget: a.primes,
            relation_bound: a.bound,
        };
        report = certified_density(&fam, &report, &cfg);
    }
    let mut text = format!(
        "{}: grid {}, M = {}, k = {}, {} coprime pairs, {} distinct D\n",
        report.family_id,
        report.grid,
        report.modulus,
        report.k,
        report.pairs_used,
        report.entries.len()
    );
    text.push_str("x  |S(x)|");
    if report.certified_counts.is_some() {
        text.push_str("  certified");
    }
    text.push('\n');
    for (i, (x, c)) in report.series().into_iter().enumerate() {
        text.push_str(&format!("{x}  {c}"));
        if let Some(cc) = &report.certified_counts {
            text.push_str(&format!("  {}", cc[i]));
        }
        text.push('\n');
    }
    if let Some(f) = &report.fit {
        text.push_str(&format!(
            "slope {:.4} in [{:.4}, {:.4}], predicted 1/k = {:.4}\n",
            f.slope, f.band[0], f.band[1], report.predicted_exponent
        ));
    }
    text.push_str(&notes);
    Ok(Outcome::ok(to_pretty(&report), text))
}

fn cmd_crosscheck(a: &CrosscheckArgs) -> Result<Outcome, LabError> {
    let (mut report, fam): (CrosscheckReport, Option<TwistFamily>) = match (&a.id, &a.family) {
        (Some(id), _) => {
            let spec = parse_spec(id, a.params.as_deref())?;
            (crosscheck(&spec), build(&spec).ok())
        }
        (None, Some(path)) => {
            let fam = read_family(path)?;
            if fam.provenance.id.parse::<FamilyId>().is_err() {
                return Err(usage(format!(
                    "crosscheck needs a catalog family, got id {:?}",
                    fam.provenance.id
                )));
            }
            (crosscheck_family(&fam), Some(fam))
        }
        (None, None) => return Err(usage("crosscheck needs --id or --family")),
    };
    if let Some(r) = fam.as_ref().and_then(compare_golden) {
        let (ok, detail) = match r {
            Ok(()) => (true, "matches data/v1".to_string()),
            Err(d) => (false, d),
        };
        report.lines.push(CheckLine {
            name: "golden".into(),
            ok,
            detail,
        });
    }
    let mut text = String::new();
    for l in &report.lines {
        text.push_str(&format!(
            "{} {:<24} {}\n",
            if l.ok { "ok  " } else { "FAIL" },
            l.name,
            l.detail
        ));
    }
    let passed = report.passed();
    text.push_str(&format!(
        "{}: {}\n",
        report.id,
        if passed { "passed" } else { "FAILED" }
    ));
    let mut o = Outcome::ok(to_pretty(&crosscheck_json(&report)), text);
    if !passed {
        o.code = 1;
    }
    Ok(o)
}
