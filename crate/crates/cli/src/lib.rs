//! Command-line front end for `k3orb`.
//!
//! Every subcommand reads one JSON input document (from `--input` or stdin,
//! except `table1` and `fixed-points`) and prints either text or, with
//! `--json`, a single JSON value. Exit codes: 0 ok, 2 parse error, 3 domain
//! error, 4 failed check.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_traits::One;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use k3orb::mukai::{K3Surface, MukaiVector};
use k3orb::orbifold::{
    moduli_dimension, orb_euler, orb_mukai_free_point, orb_mukai_structure_sheaf,
    orb_mukai_with_class_values, orb_pairing, solve_fixed_points, validate_identity,
    GroupFixedData, OrbMukaiVector,
};
use k3orb::scalar::{approx_f64, int, render_rational};
use k3orb::stability::{
    bridgeland_family_params, central_charge, check_charge_params, check_main_theorem,
    gieseker_slope_report, induced_central_charge, induced_hilbert_polynomial, is_stability_value,
    phase, ChargeParams,
};
use k3orb::wire::render_cyc;
use k3orb::{CycNum, GaussianRational, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

const TABLE1_EXPECTED: [(u64, i64); 7] = [(2, 8), (3, 6), (4, 4), (5, 4), (6, 2), (7, 3), (8, 2)];

#[derive(Debug, Parser)]
#[command(
    name = "k3orb",
    version,
    about = "Exact Mukai and orbifold Riemann-Roch computations on K3 surfaces and [K3/G]"
)]
pub struct Cli {
    /// Input document; standard input when omitted
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Append decimal approximations (display only)
    #[arg(long, global = true)]
    pub approx: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the fixed-point identity for the group data
    Validate,
    /// Solve the fixed-point equation for an element of the given order
    FixedPoints {
        #[arg(long)]
        order: u64,
    },
    /// Mukai pairing of two classes on X
    Pairing {
        #[arg(long = "class", num_args = 1, required = true)]
        class: Vec<String>,
    },
    /// Orbifold Mukai pairing and Euler characteristic of two classes
    OrbPairing {
        #[arg(long = "class", num_args = 1, required = true)]
        class: Vec<String>,
    },
    /// Hilbert polynomial and Gieseker/slope report of a class
    Hilbert {
        #[arg(long = "class", num_args = 1, required = true)]
        class: Vec<String>,
    },
    /// Expected dimension 2 - <v~^2> of the moduli space
    Dim {
        #[arg(long = "class", num_args = 1, required = true)]
        class: Vec<String>,
    },
    /// Central charge Z_{beta,omega} of a class
    Charge {
        #[arg(long = "class", num_args = 1, required = true)]
        class: Vec<String>,
        /// Use beta = b h (requires --t)
        #[arg(long, requires = "t", allow_hyphen_values = true)]
        b: Option<i64>,
        /// Use omega = t h (requires --b)
        #[arg(long, requires = "b")]
        t: Option<String>,
    },
    /// Evaluate the hypotheses of the main theorem for a class
    CheckTheorem {
        #[arg(long = "class", num_args = 1, required = true)]
        class: Vec<String>,
    },
    /// Fixed-point counts for orders 2..=8 against the known table
    Table1,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Domain(_) => "domain",
        }
    }

    fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_from!(
    k3orb::mukai::MukaiError,
    k3orb::orbifold::OrbifoldError,
    k3orb::stability::StabilityError
);

/// Cyclotomic value given either as a rational (`"p/q"` or integer) or as
/// `{"conductor": n, "coeffs": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum CycInput {
    Rational(#[serde(with = "k3orb::wire::rational")] Rational),
    Cyc(CycNum),
}

impl From<CycInput> for CycNum {
    fn from(c: CycInput) -> Self {
        match c {
            CycInput::Rational(q) => CycNum::from_scalar(q),
            CycInput::Cyc(z) => z,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassSpec {
    r: i64,
    c1: Vec<i64>,
    s: i64,
    /// One value per twisted sector.
    #[serde(default)]
    twisted: Option<Vec<CycInput>>,
    /// One value per conjugacy class, repeated over that class's sectors.
    #[serde(default)]
    class_values: Option<Vec<CycInput>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSpec {
    #[serde(with = "k3orb::wire::rational_vec")]
    beta: Vec<Rational>,
    #[serde(with = "k3orb::wire::rational_vec")]
    omega: Vec<Rational>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Assertions {
    #[serde(default)]
    h_generic: bool,
    #[serde(default)]
    omega_ample: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputDocument {
    surface: Option<K3Surface>,
    group: Option<GroupFixedData>,
    #[serde(default)]
    classes: BTreeMap<String, ClassSpec>,
    params: Option<ParamsSpec>,
    #[serde(default)]
    assertions: Assertions,
}

impl InputDocument {
    fn surface(&self) -> Result<&K3Surface, CliError> {
        self.surface
            .as_ref()
            .ok_or_else(|| CliError::Parse("input document has no \"surface\"".into()))
    }

    /// Group data, or the trivial group when none is given.
    fn group(&self) -> GroupFixedData {
        self.group.clone().unwrap_or_else(GroupFixedData::trivial)
    }

    /// Resolves a class name; `O` and `Op` are built in.
    fn class(&self, name: &str, data: &GroupFixedData) -> Result<OrbMukaiVector, CliError> {
        let rank = self.surface()?.picard_rank();
        if let Some(spec) = self.classes.get(name) {
            if spec.c1.len() != rank {
                return Err(CliError::Parse(format!(
                    "class {name:?}: c1 has length {}, Picard rank is {rank}",
                    spec.c1.len()
                )));
            }
            let v = MukaiVector::new(spec.r, spec.c1.clone(), spec.s);
            return match (&spec.twisted, &spec.class_values) {
                (Some(_), Some(_)) => Err(CliError::Parse(format!(
                    "class {name:?}: give either \"twisted\" or \"class_values\", not both"
                ))),
                (Some(t), None) => Ok(OrbMukaiVector::new(
                    v,
                    t.iter().cloned().map(CycNum::from).collect(),
                )),
                (None, Some(cv)) => {
                    let values: Vec<CycNum> = cv.iter().cloned().map(CycNum::from).collect();
                    Ok(orb_mukai_with_class_values(v, data, &values)?)
                }
                (None, None) => Ok(OrbMukaiVector::new(v, Vec::new())),
            };
        }
        match name {
            "O" => Ok(orb_mukai_structure_sheaf(data, rank)),
            "Op" => Ok(orb_mukai_free_point(data, rank)),
            _ => Err(CliError::Parse(format!("unknown class {name:?}"))),
        }
    }

    fn params(&self) -> Result<ChargeParams, CliError> {
        let p = self
            .params
            .as_ref()
            .ok_or_else(|| CliError::Parse("input document has no \"params\"".into()))?;
        Ok(ChargeParams::new(
            p.beta.clone(),
            p.omega.clone(),
            self.assertions.omega_ample,
        ))
    }
}

/// Result of a command: a JSON value, its text rendering, and whether the
/// command's check passed.
struct Output {
    json: Value,
    text: String,
    ok: bool,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Self {
            json,
            text,
            ok: true,
        }
    }
}

struct Renderer {
    approx: bool,
}

impl Renderer {
    fn rational(&self, q: &Rational) -> String {
        let exact = render_rational(q);
        if self.approx && !q.is_integer() {
            format!("{exact} ≈ {}", approx_f64(q))
        } else {
            exact
        }
    }

    fn rational_json(&self, q: &Rational) -> Value {
        Value::String(render_rational(q))
    }

    fn cyc(&self, z: &CycNum) -> String {
        let exact = render_cyc(z);
        match z.to_scalar() {
            Ok(q) => self.rational(&q),
            Err(_) if self.approx => {
                let (re, im) = z.approx(approx_f64);
                format!("{exact} ≈ {re} + {im}i")
            }
            Err(_) => exact,
        }
    }

    fn cyc_json(&self, z: &CycNum) -> Value {
        match z.to_scalar() {
            Ok(q) => self.rational_json(&q),
            Err(_) => serde_json::to_value(z).expect("cyclotomic serializes"),
        }
    }

    fn gaussian(&self, z: &GaussianRational) -> String {
        let exact = z.to_string();
        if self.approx {
            format!("{exact} ≈ {} + {}i", approx_f64(&z.re), approx_f64(&z.im))
        } else {
            exact
        }
    }

    /// Adds an `"approx"` sibling when requested.
    fn with_approx(&self, mut v: Value, approx: impl FnOnce() -> String) -> Value {
        if self.approx {
            if let Value::Object(map) = &mut v {
                map.insert("approx".into(), Value::String(format!("≈ {}", approx())));
            }
        }
        v
    }
}

fn read_document(cli: &Cli, stdin: &mut dyn Read) -> Result<InputDocument, CliError> {
    let mut text = String::new();
    match &cli.input {
        Some(path) => {
            text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
        }
        None => {
            stdin
                .read_to_string(&mut text)
                .map_err(|e| CliError::Parse(format!("cannot read standard input: {e}")))?;
        }
    }
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("invalid input document: {e}")))
}

fn two_classes(names: &[String]) -> Result<(&str, &str), CliError> {
    match names {
        [a, b] => Ok((a, b)),
        [a] => Ok((a, a)),
        _ => Err(CliError::Parse(format!(
            "expected one or two --class arguments, got {}",
            names.len()
        ))),
    }
}

fn one_class(names: &[String]) -> Result<&str, CliError> {
    match names {
        [a] => Ok(a),
        _ => Err(CliError::Parse(format!(
            "expected exactly one --class argument, got {}",
            names.len()
        ))),
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Output, CliError> {
    let r = Renderer { approx: cli.approx };
    match &cli.command {
        Command::Table1 => table1(&r),
        Command::FixedPoints { order } => {
            let sol = solve_fixed_points(*order)?;
            let json = r.with_approx(
                json!({"order": order, "value": r.rational_json(&sol.value), "integral": sol.integral}),
                || approx_f64(&sol.value).to_string(),
            );
            let text = format!(
                "f_{order} = {}{}",
                r.rational(&sol.value),
                if sol.integral {
                    ""
                } else {
                    " (not an integer)"
                }
            );
            Ok(Output::new(json, text))
        }
        command => {
            let doc = read_document(cli, stdin)?;
            with_document(command, &doc, &r)
        }
    }
}

fn table1(r: &Renderer) -> Result<Output, CliError> {
    let mut rows = Vec::new();
    let mut lines = vec![format!(
        "{:<3} {:<6} {:<9} {:<9} {}",
        "n", "f_n", "expected", "integral", "match"
    )];
    let mut ok = true;
    for (n, expected) in TABLE1_EXPECTED {
        let sol = solve_fixed_points(n)?;
        let matches = sol.value == int(expected);
        ok &= matches && sol.integral;
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        lines.push(format!(
            "{:<3} {:<6} {:<9} {:<9} {}",
            n,
            r.rational(&sol.value),
            expected,
            yes_no(sol.integral),
            yes_no(matches)
        ));
        rows.push(json!({
            "order": n,
            "value": r.rational_json(&sol.value),
            "expected": expected.to_string(),
            "integral": sol.integral,
            "match": matches,
        }));
    }
    Ok(Output {
        json: json!({"rows": rows, "ok": ok}),
        text: lines.join("\n"),
        ok,
    })
}

fn with_document(command: &Command, doc: &InputDocument, r: &Renderer) -> Result<Output, CliError> {
    let data = doc.group();
    match command {
        Command::Validate => {
            let id = validate_identity(&data)?;
            let ok = id.is_one();
            let json = r.with_approx(json!({"identity": r.rational_json(&id), "ok": ok}), || {
                approx_f64(&id).to_string()
            });
            let text = format!(
                "identity = {} ({})",
                r.rational(&id),
                if ok { "ok" } else { "FAILED: expected 1" }
            );
            Ok(Output { json, text, ok })
        }
        Command::Pairing { class } => {
            let x = doc.surface()?;
            let (a, b) = two_classes(class)?;
            let (va, vb) = (doc.class(a, &data)?.v, doc.class(b, &data)?.v);
            let p = x.mukai_pairing(&va, &vb)?;
            Ok(Output::new(
                json!({"pairing": p}),
                format!("<{a}, {b}> = {p}"),
            ))
        }
        Command::OrbPairing { class } => {
            let x = doc.surface()?;
            let (a, b) = two_classes(class)?;
            let (oa, ob) = (doc.class(a, &data)?, doc.class(b, &data)?);
            let p = orb_pairing(&oa, &ob, &data, x)?;
            let euler = orb_euler(&oa, &ob, &data, x).ok();
            let json = r.with_approx(json!({"pairing": r.cyc_json(&p), "euler": euler}), || {
                let (re, im) = p.approx(approx_f64);
                format!("{re} + {im}i")
            });
            let mut text = format!("<{a}, {b}>_orb = {}", r.cyc(&p));
            match euler {
                Some(chi) => text.push_str(&format!("\nchi({a}, {b}) = {chi}")),
                None => text.push_str("\nchi is not an integer"),
            }
            Ok(Output::new(json, text))
        }
        Command::Hilbert { class } => {
            let x = doc.surface()?;
            let name = one_class(class)?;
            let v = doc.class(name, &data)?.v;
            let p = x.hilbert_polynomial(&v)?;
            let report = gieseker_slope_report(&v, x)?;
            let mut json = json!({
                "polynomial": p,
                "report": report,
            });
            let coeffs = p.coeffs().map(|c| r.rational(c));
            let mut text = format!(
                "P(m) = ({}) m^2 + ({}) m + ({})\nrank {}, degree {}, slope {}, gcd(r,d) = {}, gcd(r,d,s) = {}\nslope/Gieseker notions agree: {}\nM = M^s by gcd(r,d,s) = 1: {}\nrank one: {}",
                coeffs[0],
                coeffs[1],
                coeffs[2],
                report.rank,
                report.degree,
                report.slope,
                report.gcd_rd,
                report.gcd_rds,
                report.collapse_of_stability_notions,
                report.fine_moduli_condition,
                report.rank_one_shortcut
            );
            if doc.group.is_some() {
                let induced = induced_hilbert_polynomial(&v, x, data.group_order)?;
                let c = induced.coeffs().map(|c| r.rational(c));
                text.push_str(&format!(
                    "\ninduced on [X/G]: ({}) m^2 + ({}) m + ({})",
                    c[0], c[1], c[2]
                ));
                json["induced_polynomial"] =
                    serde_json::to_value(&induced).expect("polynomial serializes");
            }
            Ok(Output::new(json, text))
        }
        Command::Dim { class } => {
            let x = doc.surface()?;
            let name = one_class(class)?;
            let a = doc.class(name, &data)?;
            let dim = moduli_dimension(&a, &data, x)?;
            Ok(Output::new(
                json!({"dim": dim}),
                format!("dim M({name}) = {dim}"),
            ))
        }
        Command::Charge { class, b, t } => {
            let x = doc.surface()?;
            let name = one_class(class)?;
            let a = doc.class(name, &data)?;
            let params = match (b, t) {
                (Some(b), Some(t)) => {
                    let t = k3orb::scalar::parse_rational(t).ok_or_else(|| {
                        CliError::Parse(format!("invalid rational {t:?} for --t"))
                    })?;
                    bridgeland_family_params(*b, t, &a.v, x, doc.assertions.omega_ample)?
                }
                _ => doc.params()?,
            };
            let valid = check_charge_params(&params, x);
            let z = if doc.group.is_some() {
                induced_central_charge(&params, &a, x)?
            } else {
                central_charge(&params, &a.v, x)?
            };
            let region = is_stability_value(&z);
            let ph = phase(&z).ok();
            let json = json!({
                "z": z,
                "stability_value": region,
                "phase": ph,
                "params_valid": valid,
                "beta": params.beta.iter().map(render_rational).collect::<Vec<_>>(),
                "omega": params.omega.iter().map(render_rational).collect::<Vec<_>>(),
            });
            let json = r.with_approx(json, || {
                format!("{} + {}i", approx_f64(&z.re), approx_f64(&z.im))
            });
            let mut text = format!("Z({name}) = {}", r.gaussian(&z));
            match &ph {
                Some(p) => {
                    text.push_str(&format!("\nphase: {:?}", p.kind));
                    if let Some(theta) = &p.theta {
                        text.push_str(&format!(", theta = {}", render_rational(theta)));
                    }
                    if let Some(tan) = &p.tangent {
                        text.push_str(&format!(", tan(pi theta) = {}", r.rational(tan)));
                    }
                }
                None => text.push_str("\nnot in the upper half plane or on the negative real axis"),
            }
            if !valid {
                text.push_str(
                    "\nparameters are not valid (need omega ample asserted and omega^2 > 2)",
                );
            }
            Ok(Output {
                json,
                text,
                ok: valid,
            })
        }
        Command::CheckTheorem { class } => {
            let x = doc.surface()?;
            let name = one_class(class)?;
            let a = doc.class(name, &data)?;
            let report = check_main_theorem(&a, &data, x, doc.assertions.h_generic)?;
            let flag = |b: bool| if b { "yes" } else { "no" };
            let text = format!(
                "r > 0: {}\nprimitive: {}\nd > 0: {}\ngcd(r,d) = 1: {}\ngcd(r,d,s) = 1: {}\nh generic (asserted): {}\nconclusion: {}\n{}\nnon-emptiness: unknown",
                flag(report.rank_positive),
                flag(report.primitive),
                flag(report.degree_positive),
                flag(report.gcd_rd_one),
                flag(report.gcd_rds_one),
                flag(report.generic_asserted),
                report.conclusion.name(),
                report.summary,
            );
            let json = serde_json::to_value(&report).expect("report serializes");
            Ok(Output::new(json, text))
        }
        Command::FixedPoints { .. } | Command::Table1 => unreachable!("handled without a document"),
    }
}

/// Runs the CLI with explicit streams; returns the process exit code.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_PARSE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(&cli, stdin) {
        Ok(out) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&out.json).expect("json value serializes")
            } else {
                out.text
            };
            let _ = writeln!(stdout, "{body}");
            if out.ok {
                EXIT_OK
            } else {
                EXIT_CHECK
            }
        }
        Err(e) => {
            if cli.json {
                let err = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
                let _ = writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string_pretty(&err).expect("json")
                );
            } else {
                let _ = writeln!(stderr, "error: {e}");
            }
            e.code()
        }
    }
}
