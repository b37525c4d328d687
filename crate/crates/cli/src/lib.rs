//! Command implementations behind the `polylrc` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use polylrc::construction::{
    build_matroid, derived_parameters, generate_family_with_n, generate_perfect_family, validate_spec,
    ConstructionSpec, ConstructionSummary,
};
use polylrc::entropy::entropy_oracle;
use polylrc::formats::{matrix_to_json, parse_code, parse_matrix, parse_spec, spec_to_json};
use polylrc::linear::LinearRankOracle;
use polylrc::lrc::{
    build_code_profile, build_profile, greedy_information_set, min_distance_via_cyclic_flats, singleton_bound,
    singleton_bound_real, LocalityClass, LocalityParams, LrcProfile,
};
use polylrc::polymatroid::{check_matroid, check_polymatroid, AxiomReport, CheckMode, EXHAUSTIVE_MAX};
use polylrc::representation::{represent, RepresentOptions, RepresentationResult};
use polylrc::{Error, Limits, RankOracle, Subset};

pub const DEFAULT_SEED: u64 = 2015;

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_LIMITS: i32 = 3;
pub const EXIT_INVALID_SPEC: i32 = 4;
pub const EXIT_ASSERTION: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "polylrc", version, about = "Polymatroid analysis and construction of locally repairable codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Exhaustive loops need n <= this; searches stop after 2^this items.
    #[arg(long = "limit-enum", global = true, default_value_t = 20)]
    pub limit_enum: usize,

    /// Most codewords a generator matrix may be expanded into.
    #[arg(long = "limit-expand", global = true, default_value_t = 1 << 20)]
    pub limit_expand: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Info,
    #[value(name = "1info")]
    OneInfo,
    All,
}

impl From<ClassArg> for LocalityClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Info => LocalityClass::InfoSymbol,
            ClassArg::OneInfo => LocalityClass::OneInfoSymbol,
            ClassArg::All => LocalityClass::AllSymbol,
        }
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct LocalityArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long, default_value_t = 2)]
    pub delta: usize,
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// Use the (r, δ)' repair condition.
    #[arg(long)]
    pub primed: bool,
}

impl LocalityArgs {
    fn params(&self) -> Result<LocalityParams, Error> {
        LocalityParams::new(self.r, self.delta, self.t, self.primed)
    }
}

#[derive(Args, Debug, Clone, Copy)]
pub struct RepresentArgs {
    /// Prime field size; defaults to the least prime >= 2^min(n, 30).
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 3)]
    pub attempts: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// LRC profile of a code or generator matrix.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        locality: LocalityArgs,
        #[arg(long, value_enum, default_value_t = ClassArg::All)]
        class: ClassArg,
        /// 1-based elements to check; defaults to E, or a greedy information set.
        #[arg(long, value_delimiter = ',')]
        target: Option<Vec<usize>>,
    },
    /// Validate a spec, build its matroid and derive its parameters.
    Construct { spec: PathBuf },
    /// Generate the perfect hub-and-block family and profile it.
    Family {
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        t: usize,
        /// Pad the instance to this many elements.
        #[arg(long)]
        n: Option<usize>,
        /// Also represent the matroid as a linear code.
        #[arg(long)]
        represent: bool,
        #[command(flatten)]
        rep: RepresentArgs,
    },
    /// Represent a spec's matroid by a generator matrix and verify it.
    Represent {
        spec: PathBuf,
        #[command(flatten)]
        rep: RepresentArgs,
        /// Also write the bare matrix JSON here.
        #[arg(long = "matrix-out")]
        matrix_out: Option<PathBuf>,
    },
    /// Generalized Singleton bound.
    Bound {
        n: usize,
        k: f64,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
    },
    /// Check polymatroid (or matroid) axioms of a code, matrix or spec.
    CheckAxioms {
        input: PathBuf,
        #[arg(long)]
        matroid: bool,
        /// Check this many random pairs instead of all subsets.
        #[arg(long)]
        sampled: Option<usize>,
    },
}

/// A finished command: the report text and the exit code it should end with.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub code: i32,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome {
            report,
            code: 0,
            message: None,
        }
    }

    fn check(report: String, passed: bool, what: &str) -> Self {
        Outcome {
            report,
            code: if passed { 0 } else { EXIT_ASSERTION },
            message: (!passed).then(|| what.to_string()),
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Format(_) | Error::InvalidCode(_) | Error::InvalidMatrix(_) => EXIT_PARSE,
        Error::ModeInfeasible { .. }
        | Error::EnumerationInfeasible { .. }
        | Error::ExpansionInfeasible { .. }
        | Error::TooManyBlocks { .. } => EXIT_LIMITS,
        Error::InvalidSpec(_) | Error::InvalidParams(_) => EXIT_INVALID_SPEC,
        Error::ClassMismatch { .. } | Error::AvailabilityMissing { .. } | Error::RepresentationFailed { .. } => {
            EXIT_ASSERTION
        }
        _ => EXIT_OTHER,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_OTHER,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: EXIT_OTHER,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn to_value(text: &str) -> Value {
    serde_json::from_str(text).expect("library JSON is valid")
}

/// What a JSON input file holds, judged by its keys.
enum Input {
    Code(polylrc::entropy::Code),
    Matrix(polylrc::linear::GeneratorMatrix),
    Spec(ConstructionSpec),
}

fn read_input(path: &Path) -> Result<Input, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    let has = |k: &str| value.get(k).is_some();
    if has("blocks") {
        Ok(Input::Spec(parse_spec(&text)?))
    } else if has("q") || has("rows") {
        Ok(Input::Matrix(parse_matrix(&text)?))
    } else if has("s") || has("words") {
        Ok(Input::Code(parse_code(&text)?))
    } else {
        Err(Error::Format("expected a code, matrix or spec object".into()).into())
    }
}

fn read_spec(path: &Path) -> Result<ConstructionSpec, Failure> {
    Ok(parse_spec(&read(path)?)?)
}

impl Cli {
    fn limits(&self) -> Result<Limits, Failure> {
        if self.limit_enum == 0 || self.limit_enum > 63 || self.limit_expand == 0 {
            return Err(Error::InvalidParams("limits must be positive, with --limit-enum at most 63".into()).into());
        }
        Ok(Limits {
            enumeration: self.limit_enum,
            expansion: self.limit_expand,
        })
    }
}

/// Runs one command and writes its report to `--out` (if given).
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let outcome = dispatch(cli)?;
    if let Some(path) = &cli.out {
        write(path, &outcome.report)?;
    }
    Ok(outcome)
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let limits = cli.limits()?;
    let text = cli.format == OutputFormat::Text;
    match &cli.command {
        Command::Analyze {
            input,
            locality,
            class,
            target,
        } => {
            let params = locality.params()?;
            let report = analyze(read_input(input)?, &params, (*class).into(), target.as_deref(), &limits)?;
            Ok(Outcome::ok(if text { analyze_text(&report) } else { json(&report) }))
        }
        Command::Construct { spec } => {
            let spec = read_spec(spec)?;
            let (summary, _) = construct(&spec)?;
            Ok(Outcome::ok(if text {
                summary_text(&spec, &summary)
            } else {
                json(&summary)
            }))
        }
        Command::Family {
            k,
            r,
            delta,
            t,
            n,
            represent: with_matrix,
            rep,
        } => {
            let report = family(*k, *r, *delta, *t, *n, with_matrix.then_some((rep, cli.seed)), &limits)?;
            let perfect = report.profile.perfect && report.summary.perfect == Some(true);
            let body = if text {
                let mut s = summary_text(&report.spec_parsed, &report.summary);
                s.push_str(&profile_text(&report.profile));
                s
            } else {
                json(&report)
            };
            Ok(Outcome::check(body, perfect, "generated instance is not perfect"))
        }
        Command::Represent { spec, rep, matrix_out } => {
            let spec = read_spec(spec)?;
            let (_, matroid) = construct(&spec)?;
            let result = represent(&matroid, &represent_options(rep, cli.seed))?;
            let matrix = matrix_to_json(&result.matrix);
            if let Some(path) = matrix_out {
                write(path, &(matrix.clone() + "\n"))?;
            }
            let report = RepresentReport {
                matrix: to_value(&matrix),
                report: &result,
            };
            Ok(Outcome::ok(if text { represent_text(&result) } else { json(&report) }))
        }
        Command::Bound { n, k, r, delta, t } => {
            if *r < 1 || *delta < 2 || *t < 1 || !k.is_finite() || *k < 0.0 {
                return Err(Error::InvalidParams("need k >= 0, r >= 1, delta >= 2, t >= 1".into()).into());
            }
            let b = if k.fract() == 0.0 {
                singleton_bound(*n, *k as i64, *r, *delta, *t)
            } else {
                singleton_bound_real(*n, *k, *r, *delta, *t)
            };
            Ok(Outcome::ok(format!("{b}\n")))
        }
        Command::CheckAxioms {
            input,
            matroid,
            sampled,
        } => {
            let mode = match sampled {
                Some(trials) => CheckMode::Sampled {
                    seed: cli.seed,
                    trials: *trials,
                },
                None => CheckMode::Exhaustive,
            };
            let report = match read_input(input)? {
                Input::Code(c) => check(&entropy_oracle(c), *matroid, mode)?,
                Input::Matrix(m) => check(&LinearRankOracle::new(m), *matroid, mode)?,
                Input::Spec(s) => check(&construct(&s)?.1, *matroid, mode)?,
            };
            let passed = report.passed();
            let body = if text { axioms_text(&report) } else { json(&report) };
            Ok(Outcome::check(body, passed, "axiom violations found"))
        }
    }
}

fn check<O: RankOracle>(oracle: &O, matroid: bool, mode: CheckMode) -> Result<AxiomReport, Failure> {
    if mode == CheckMode::Exhaustive && oracle.ground_size() > EXHAUSTIVE_MAX {
        return Err(Error::ModeInfeasible {
            n: oracle.ground_size(),
            max: EXHAUSTIVE_MAX,
        }
        .into());
    }
    Ok(if matroid {
        check_matroid(oracle, mode)?
    } else {
        check_polymatroid(oracle, mode)?
    })
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub source: &'static str,
    #[serde(flatten)]
    pub profile: LrcProfile,
    /// `d` from the cyclic flats, when they cover `E` and can be enumerated.
    pub d_cyclic_flats: Option<i64>,
}

fn default_target<O: RankOracle + ?Sized>(oracle: &O, class: LocalityClass) -> Subset {
    match class {
        LocalityClass::AllSymbol => oracle.ground(),
        _ => greedy_information_set(oracle),
    }
}

fn parse_target(labels: &[usize], n: usize) -> Result<Subset, Failure> {
    if let Some(&bad) = labels.iter().find(|&&e| e == 0 || e > n) {
        return Err(Error::InvalidParams(format!("target label {bad} outside 1..={n}")).into());
    }
    Ok(Subset::from_labels(labels.iter().copied()))
}

fn analyze_oracle<O: RankOracle + ?Sized>(
    oracle: &O,
    class: LocalityClass,
    target: Option<&[usize]>,
    limits: &Limits,
    profile: impl FnOnce(Subset) -> polylrc::Result<LrcProfile>,
) -> Result<(LrcProfile, Option<i64>), Failure> {
    let target = match target {
        Some(t) => parse_target(t, oracle.ground_size())?,
        None => default_target(oracle, class),
    };
    let prof = profile(target)?;
    let d_z = min_distance_via_cyclic_flats(oracle, limits).ok();
    Ok((prof, d_z))
}

fn analyze(
    input: Input,
    params: &LocalityParams,
    class: LocalityClass,
    target: Option<&[usize]>,
    limits: &Limits,
) -> Result<AnalyzeReport, Failure> {
    let (source, (profile, d_cyclic_flats)) = match input {
        Input::Code(code) => {
            let o = entropy_oracle(code);
            ("code", analyze_oracle(&o, class, target, limits, |t| {
                build_code_profile(&o, t, params, class, limits)
            })?)
        }
        Input::Matrix(m) => {
            let o = LinearRankOracle::new(m);
            ("matrix", analyze_oracle(&o, class, target, limits, |t| {
                build_profile(&o, t, params, class, limits)
            })?)
        }
        Input::Spec(s) => {
            let (_, m) = construct(&s)?;
            ("spec", analyze_oracle(&m, class, target, limits, |t| {
                build_profile(&m, t, params, class, limits)
            })?)
        }
    };
    Ok(AnalyzeReport {
        source,
        profile,
        d_cyclic_flats,
    })
}

/// Validates and builds the matroid of `spec`, returning its summary.
pub fn construct(spec: &ConstructionSpec) -> Result<(ConstructionSummary, polylrc::construction::ConstructedMatroid), Failure> {
    let report = validate_spec(spec);
    if !report.valid {
        return Err(Error::InvalidSpec(report).into());
    }
    let matroid = build_matroid(spec)?;
    Ok((derived_parameters(&matroid)?, matroid))
}

#[derive(Debug, Serialize)]
pub struct FamilyReport {
    pub spec: Value,
    #[serde(skip)]
    pub spec_parsed: ConstructionSpec,
    pub summary: ConstructionSummary,
    pub profile: LrcProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationResult>,
}

fn represent_options(rep: &RepresentArgs, seed: u64) -> RepresentOptions {
    RepresentOptions {
        q: rep.q,
        seed,
        max_attempts: rep.attempts,
    }
}

pub fn family(
    k: usize,
    r: usize,
    delta: usize,
    t: usize,
    n: Option<usize>,
    with_matrix: Option<(&RepresentArgs, u64)>,
    limits: &Limits,
) -> Result<FamilyReport, Failure> {
    let spec = match n {
        Some(n) => generate_family_with_n(k, r, delta, t, n)?,
        None => generate_perfect_family(k, r, delta, t)?,
    };
    let (summary, matroid) = construct(&spec)?;
    let params = LocalityParams::new(r, delta, t, false)?;
    let hubs = Subset::full(k);
    let profile = build_profile(&matroid, hubs, &params, LocalityClass::InfoSymbol, limits)?;
    let (matrix, representation) = match with_matrix {
        Some((rep, seed)) => {
            let res = represent(&matroid, &represent_options(rep, seed))?;
            (Some(to_value(&matrix_to_json(&res.matrix))), Some(res))
        }
        None => (None, None),
    };
    Ok(FamilyReport {
        spec: to_value(&spec_to_json(&spec)),
        spec_parsed: spec,
        summary,
        profile,
        matrix,
        representation,
    })
}

#[derive(Serialize)]
struct RepresentReport<'a> {
    matrix: Value,
    report: &'a RepresentationResult,
}

fn sets(xs: &[Subset]) -> String {
    xs.iter().map(Subset::to_string).collect::<Vec<_>>().join(", ")
}

fn analyze_text(r: &AnalyzeReport) -> String {
    let mut s = format!("source: {}\n", r.source);
    if let Some(d) = r.d_cyclic_flats {
        let _ = writeln!(s, "d via cyclic flats = {d}");
    }
    s.push_str(&profile_text(&r.profile));
    s
}

fn profile_text(p: &LrcProfile) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n = {}, k = {}, d = {}", p.n, p.k, p.d);
    let _ = writeln!(
        s,
        "{} locality on {} with (r={}, δ={}, t={}){}",
        p.class,
        p.target,
        p.params.r,
        p.params.delta,
        p.params.t,
        if p.params.primed { "'" } else { "" }
    );
    for a in &p.availability {
        let _ = writeln!(s, "  {}: {}", a.element + 1, sets(&a.sets));
    }
    let _ = writeln!(s, "bound = {}, perfect = {}", p.bound, p.perfect);
    s
}

/// Mirrors the item layout used for hub-and-block examples.
fn summary_text(spec: &ConstructionSpec, s: &ConstructionSummary) -> String {
    let mut out = format!("E = [{}], k = {}\n", s.n, s.k);
    for (i, b) in spec.blocks.iter().enumerate() {
        let _ = writeln!(out, "F_{} = {}, rank {}", i + 1, b.elements, b.rank);
    }
    let names: Vec<String> = s.z.iter().map(|f| f.name()).collect();
    let _ = writeln!(out, "(i)   Z = {{{}}}", names.join(", "));
    let _ = writeln!(
        out,
        "(ii)  K = {} {} an information set",
        s.information_set,
        if s.information_set_valid { "is" } else { "is not" }
    );
    for b in &s.blocks {
        let _ = writeln!(
            out,
            "(iii) F_{} {} a repair set with (r={}, δ={})-locality for every element",
            b.block,
            if b.repair_verified { "is" } else { "is not" },
            b.r,
            b.delta
        );
    }
    let max_eta = s.n as i64 - s.k as i64 + 1 - s.d;
    let _ = writeln!(out, "(iv)  d = {}-{}+1-{} = {}", s.n, s.k, max_eta, s.d);
    match s.locality {
        Some(l) => {
            let _ = writeln!(out, "(v)   K has (r={}, δ={}, t={})-locality", l.r, l.delta, l.t);
        }
        None => {
            let _ = writeln!(out, "(v)   K has no uniform block locality");
        }
    }
    if let (Some(b), Some(p)) = (s.bound, s.perfect) {
        let _ = writeln!(out, "bound = {b}, perfect = {p}");
    }
    out
}

fn represent_text(r: &RepresentationResult) -> String {
    let mut s = format!(
        "q = {}, seed = {}, attempts = {}\n",
        r.q, r.seed, r.attempts
    );
    let v = &r.verification;
    let _ = writeln!(
        s,
        "verification: {} over {} subsets, {}",
        if v.exhaustive { "exhaustive" } else { "structural" },
        v.checked,
        if v.passed { "passed" } else { "failed" }
    );
    if let Some(w) = &r.warning {
        let _ = writeln!(s, "warning: {w}");
    }
    for i in 0..r.matrix.rows() {
        let row: Vec<String> = r.matrix.row(i).iter().map(u64::to_string).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

fn axioms_text(r: &AxiomReport) -> String {
    let mut s = format!(
        "checked {} inequalities, {} violations\n",
        r.checked, r.violation_count
    );
    for v in &r.violations {
        let _ = writeln!(s, "  {}: {} values {:?}", v.axiom, sets(&v.witnesses), v.values);
    }
    s
}
