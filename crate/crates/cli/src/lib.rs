//! Command implementations for the `rtorsion` binary.
//!
//! Every command prints one canonical JSON document on stdout. Exit status is
//! 0 on success or equality, 1 on a verified inequality or invariant violation,
//! and 2 on usage or parse errors.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use rtorsion::complex::{compute_homology, is_homology_basis, reassemble, split_general, BasisFamily, ChainComplex};
use rtorsion::generators::{gen_chain_complex, gen_homology_bases, gen_ses, gen_symplectic, GenConfig, SymplecticKind};
use rtorsion::io::{
    document_to_json, instance_to_json, matrix_to_json, parse_document, rational_to_json, to_canonical_string,
    Document, Instance, SesFile,
};
use rtorsion::linalg::{is_skew_symmetric, Matrix, Rational};
use rtorsion::symplectic::{
    make_omega_compatible_bases, pfaffian, probe, split_symplectic, verify_main_theorem, SymplecticComplex,
};
use rtorsion::torsion::{long_exact_sequence, milnor_product_check, torsion, SesBases};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rtorsion", version, about = "Exact torsion of based and symplectic chain complexes")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a complex, symplectic complex, short exact sequence or matrix file.
    Check { path: PathBuf },
    /// Betti numbers and representative homology bases.
    Homology { path: PathBuf },
    /// Torsion in the attached chain and homology bases.
    Torsion { path: PathBuf },
    /// Split into an exact summand and a summand with zero boundary.
    Split { path: PathBuf },
    /// Pfaffian of a skew-symmetric matrix file.
    Pfaffian { path: PathBuf },
    /// Homology long exact sequence of a short exact sequence, with the product identity when bases are attached.
    Snake { path: PathBuf },
    /// Generate a random instance.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        /// Write the instance here and print a report instead of the instance.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the torsion of a symplectic complex with the pairing formula.
    Verify {
        /// Instance file; generated from the flags when omitted.
        path: Option<PathBuf>,
        /// Also evaluate the torsion in the attached chain bases; the exit status then refers to those bases.
        #[arg(long)]
        probe: bool,
        /// Verify this many generated instances with consecutive seeds.
        #[arg(long, conflicts_with_all = ["path", "probe"])]
        batch: Option<usize>,
        #[command(flatten)]
        gen: GenArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Chain,
    Dzero,
    Exact,
    Mixed,
    Ses,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = Kind::Mixed)]
    pub kind: Kind,
    /// Top degree.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Bound for randomly drawn chain dimensions.
    #[arg(long, default_value_t = 4)]
    pub max_dim: usize,
    /// Comma-separated chain dimensions.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Comma-separated Betti numbers.
    #[arg(long, value_delimiter = ',')]
    pub betti: Option<Vec<usize>>,
    /// Bound for numerators and denominators of random entries.
    #[arg(long, default_value_t = 5)]
    pub entry_bound: i64,
}

impl GenArgs {
    fn config(&self, seed: u64) -> GenConfig {
        let mut cfg = GenConfig::new(seed, self.n, self.max_dim);
        cfg.dims = self.dims.clone();
        cfg.betti_targets = self.betti.clone();
        cfg.entry_bound = self.entry_bound;
        cfg
    }

    fn symplectic_kind(&self) -> Result<SymplecticKind, CliError> {
        match self.kind {
            Kind::Dzero => Ok(SymplecticKind::DZero),
            Kind::Exact => Ok(SymplecticKind::Exact),
            Kind::Mixed => Ok(SymplecticKind::Mixed),
            other => Err(CliError::Usage(format!("kind {other:?} is not symplectic"))),
        }
    }
}

/// Result of running one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum CliError {
    /// Bad invocation or missing input.
    Usage(String),
    /// Unreadable or malformed input file.
    Parse(String),
    /// The input violates an invariant; reported with exit status 1.
    Violation(String),
}

fn violation(e: impl Display) -> CliError {
    CliError::Violation(e.to_string())
}

/// Command outputs and whether they count as success.
struct Outputs {
    values: Map<String, Value>,
    ok: bool,
}

struct Input {
    digest: String,
    doc: Document,
}

/// Parses `args` (without the program name) and runs the command.
pub fn run(args: &[String]) -> Outcome {
    let argv = std::iter::once("rtorsion".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == EXIT_OK { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    let start = Instant::now();
    let result = dispatch(&cli);
    let report = |digest: String, outputs: Map<String, Value>| {
        let r = json!({
            "command": args,
            "input_digest": digest,
            "outputs": outputs,
            "duration_ms": start.elapsed().as_millis() as u64,
        });
        to_canonical_string(&r) + "\n"
    };
    match result {
        Ok(Reply::Report(digest, out)) => Outcome {
            code: if out.ok { EXIT_OK } else { EXIT_FAILURE },
            stdout: report(digest, out.values),
            stderr: String::new(),
        },
        Ok(Reply::Raw(text)) => Outcome {
            code: EXIT_OK,
            stdout: text,
            stderr: String::new(),
        },
        Err((digest, CliError::Violation(msg))) => {
            let mut values = Map::new();
            values.insert("error".into(), Value::from(msg.clone()));
            Outcome {
                code: EXIT_FAILURE,
                stdout: report(digest, values),
                stderr: format!("error: {msg}\n"),
            }
        }
        Err((_, CliError::Usage(msg))) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("usage error: {msg}\n"),
        },
        Err((_, CliError::Parse(msg))) => Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("parse error: {msg}\n"),
        },
    }
}

enum Reply {
    Report(String, Outputs),
    /// Printed verbatim, as `gen` does with instances.
    Raw(String),
}

fn dispatch(cli: &Cli) -> Result<Reply, (String, CliError)> {
    let with_input = |path: &Path, f: fn(Document) -> Result<Outputs, CliError>| {
        let input = read_input(path).map_err(|e| (String::new(), e))?;
        let digest = input.digest;
        f(input.doc)
            .map(|o| Reply::Report(digest.clone(), o))
            .map_err(|e| (digest, e))
    };
    match &cli.command {
        Command::Check { path } => with_input(path, cmd_check),
        Command::Homology { path } => with_input(path, cmd_homology),
        Command::Torsion { path } => with_input(path, cmd_torsion),
        Command::Split { path } => with_input(path, cmd_split),
        Command::Pfaffian { path } => with_input(path, cmd_pfaffian),
        Command::Snake { path } => with_input(path, cmd_snake),
        Command::Gen { gen, out } => cmd_gen(gen, cli.seed, out.as_deref()).map_err(|e| (String::new(), e)),
        Command::Verify { path, probe, batch, gen } => cmd_verify(path.as_deref(), *probe, *batch, gen, cli.seed),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_input(path: &Path) -> Result<Input, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let doc = parse_document(text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(Input {
        digest: sha256_hex(&bytes),
        doc,
    })
}

fn verdict<E: Display>(r: Result<(), E>) -> Value {
    match r {
        Ok(()) => Value::from("ok"),
        Err(e) => Value::from(e.to_string()),
    }
}

fn is_ok(v: &Value) -> bool {
    v.as_str() == Some("ok")
}

fn rationals(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(rational_to_json).collect())
}

fn matrices(values: &[Matrix]) -> Value {
    Value::Array(values.iter().map(matrix_to_json).collect())
}

fn obj(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn expect_instance(doc: Document) -> Result<Instance, CliError> {
    match doc {
        Document::Instance(i) => Ok(i),
        Document::Ses(_) => Err(CliError::Usage("expected a complex, found a short exact sequence".into())),
        Document::Matrix(_) => Err(CliError::Usage("expected a complex, found a matrix".into())),
    }
}

fn expect_symplectic(inst: &Instance) -> Result<SymplecticComplex, CliError> {
    let s = inst
        .symplectic()
        .ok_or_else(|| CliError::Usage("the instance has no pairings".into()))?;
    s.validate().map_err(violation)?;
    Ok(s)
}

fn chain_bases_verdict(c: &ChainComplex, fam: &BasisFamily) -> Value {
    match (0..=c.n()).find(|&p| fam.degree(p).rank() != c.dim(p)) {
        None => Value::from("ok"),
        Some(p) => Value::from(format!("degree {p}: chain basis is singular")),
    }
}

fn homology_bases_verdict(c: &ChainComplex, fam: &BasisFamily) -> Value {
    let h = match compute_homology(c) {
        Ok(h) => h,
        Err(e) => return Value::from(e.to_string()),
    };
    match (0..=c.n()).find(|&p| !is_homology_basis(c, &h, p, fam.degree(p))) {
        None => Value::from("ok"),
        Some(p) => Value::from(format!("degree {p}: not a basis of homology")),
    }
}

fn cmd_check(doc: Document) -> Result<Outputs, CliError> {
    let mut values = Map::new();
    match doc {
        Document::Instance(inst) => {
            let c = &inst.complex;
            let chain = verdict(c.validate());
            let sound = is_ok(&chain);
            values.insert("kind".into(), Value::from(if inst.pairings.is_some() { "symplectic" } else { "chain" }));
            values.insert("chain".into(), chain);
            if let Some(s) = inst.symplectic() {
                values.insert("symplectic".into(), verdict(s.validate()));
            }
            if let Some(b) = &inst.chain_bases {
                values.insert("chain_bases".into(), chain_bases_verdict(c, b));
            }
            if let Some(b) = &inst.homology_bases {
                let v = if sound { homology_bases_verdict(c, b) } else { Value::from("skipped") };
                values.insert("homology_bases".into(), v);
            }
        }
        Document::Ses(f) => {
            values.insert("kind".into(), Value::from("ses"));
            let ses = verdict(f.ses.validate());
            let sound = is_ok(&ses);
            values.insert("ses".into(), ses);
            if let Some(b) = &f.bases {
                let s = &f.ses;
                for (name, c, chain, hom) in [
                    ("A", &s.a, &b.chain_a, &b.homology_a),
                    ("B", &s.b, &b.chain_b, &b.homology_b),
                    ("D", &s.d, &b.chain_d, &b.homology_d),
                ] {
                    values.insert(format!("chain_bases_{name}"), chain_bases_verdict(c, chain));
                    let v = if sound { homology_bases_verdict(c, hom) } else { Value::from("skipped") };
                    values.insert(format!("homology_bases_{name}"), v);
                }
            }
        }
        Document::Matrix(m) => {
            values.insert("kind".into(), Value::from("matrix"));
            values.insert("shape".into(), json!([m.rows(), m.cols()]));
            values.insert("skew_symmetric".into(), Value::from(is_skew_symmetric(&m)));
        }
    }
    let ok = values
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "kind" | "shape" | "skew_symmetric"))
        .all(|(_, v)| is_ok(v));
    values.insert("valid".into(), Value::from(ok));
    Ok(Outputs { values, ok })
}

fn cmd_homology(doc: Document) -> Result<Outputs, CliError> {
    let inst = expect_instance(doc)?;
    let c = &inst.complex;
    c.validate().map_err(violation)?;
    let h = compute_homology(c).map_err(violation)?;
    let ranks: Vec<usize> = h.degrees.iter().map(|d| d.boundaries.cols()).collect();
    let values = obj(vec![
        ("betti", json!(h.betti())),
        ("boundary_ranks", json!(ranks)),
        ("acyclic", Value::from(h.is_acyclic())),
        ("homology_bases", rtorsion::io::basis_family_to_json(&h.rep_bases())),
    ]);
    Ok(Outputs { values, ok: true })
}

fn cmd_torsion(doc: Document) -> Result<Outputs, CliError> {
    let inst = expect_instance(doc)?;
    let chain = inst
        .chain_bases
        .as_ref()
        .ok_or_else(|| CliError::Usage("torsion needs chain_bases".into()))?;
    let hom = inst
        .homology_bases
        .as_ref()
        .ok_or_else(|| CliError::Usage("torsion needs homology_bases".into()))?;
    inst.complex.validate().map_err(violation)?;
    let report = torsion(&inst.complex, chain, hom).map_err(violation)?;
    let values = obj(vec![
        ("torsion", rational_to_json(&report.value)),
        ("factors", rationals(&report.factors)),
    ]);
    Ok(Outputs { values, ok: true })
}

fn cmd_split(doc: Document) -> Result<Outputs, CliError> {
    let inst = expect_instance(doc)?;
    inst.complex.validate().map_err(violation)?;
    let mut values = Map::new();
    let ok = if inst.pairings.is_some() {
        let s = expect_symplectic(&inst)?;
        let compat = make_omega_compatible_bases(&s).map_err(violation)?;
        let split = split_symplectic(&s, &compat).map_err(violation)?;
        let exact_valid = split.exact.complex.validate().is_ok();
        let dzero_valid = split.dzero.complex.validate().is_ok();
        let exact_acyclic = compute_homology(&split.exact.complex.base).map_err(violation)?.is_acyclic();
        let dzero_zero = split.dzero.complex.base.is_boundary_zero();
        values.insert("exact".into(), instance_to_json(&Instance::from_symplectic(&split.exact.complex)));
        values.insert("dzero".into(), instance_to_json(&Instance::from_symplectic(&split.dzero.complex)));
        values.insert("exact_embedding".into(), matrices(&split.exact.embedding));
        values.insert("dzero_embedding".into(), matrices(&split.dzero.embedding));
        values.insert("orthogonal".into(), Value::from(split.is_orthogonal()));
        values.insert("exact_valid".into(), Value::from(exact_valid));
        values.insert("dzero_valid".into(), Value::from(dzero_valid));
        values.insert("exact_acyclic".into(), Value::from(exact_acyclic));
        values.insert("dzero_boundary_zero".into(), Value::from(dzero_zero));
        split.is_orthogonal() && exact_valid && dzero_valid && exact_acyclic && dzero_zero
    } else {
        let split = split_general(&inst.complex).map_err(violation)?;
        let exact_acyclic = compute_homology(&split.exact.complex).map_err(violation)?.is_acyclic();
        let dzero_zero = split.dzero.complex.is_boundary_zero();
        let reconstructs = reassemble(&split).map_err(violation)? == inst.complex;
        values.insert("exact".into(), instance_to_json(&Instance::plain(split.exact.complex.clone())));
        values.insert("dzero".into(), instance_to_json(&Instance::plain(split.dzero.complex.clone())));
        values.insert("exact_embedding".into(), matrices(&split.exact.embedding));
        values.insert("dzero_embedding".into(), matrices(&split.dzero.embedding));
        values.insert("exact_acyclic".into(), Value::from(exact_acyclic));
        values.insert("dzero_boundary_zero".into(), Value::from(dzero_zero));
        values.insert("reconstructs".into(), Value::from(reconstructs));
        exact_acyclic && dzero_zero && reconstructs
    };
    Ok(Outputs { values, ok })
}

fn cmd_pfaffian(doc: Document) -> Result<Outputs, CliError> {
    let m = match doc {
        Document::Matrix(m) => m,
        _ => return Err(CliError::Usage("pfaffian expects a matrix file".into())),
    };
    let pf = pfaffian(&m).map_err(violation)?;
    Ok(Outputs {
        values: obj(vec![("pfaffian", rational_to_json(&pf))]),
        ok: true,
    })
}

fn cmd_snake(doc: Document) -> Result<Outputs, CliError> {
    let f: SesFile = match doc {
        Document::Ses(f) => f,
        _ => return Err(CliError::Usage("snake expects a short exact sequence file".into())),
    };
    let s = &f.ses;
    s.validate().map_err(violation)?;
    let reps = |c: &ChainComplex| compute_homology(c).map(|h| h.rep_bases()).map_err(violation);
    let (ha, hb, hd) = match &f.bases {
        Some(b) => (b.homology_a.clone(), b.homology_b.clone(), b.homology_d.clone()),
        None => (reps(&s.a)?, reps(&s.b)?, reps(&s.d)?),
    };
    let les = long_exact_sequence(s, &ha, &hb, &hd).map_err(violation)?;
    let les_exact = les.is_exact();
    let les_instance = Instance {
        chain_bases: Some(les.bases.clone()),
        homology_bases: Some(BasisFamily::empty_for(&les.complex)),
        ..Instance::plain(les.complex.clone())
    };
    let mut values = obj(vec![
        ("les", instance_to_json(&les_instance)),
        ("les_exact", Value::from(les_exact)),
        ("exactness_defects", json!(les.exactness_defects())),
    ]);
    let mut ok = les_exact;
    if let Some(b) = &f.bases {
        let m = milnor_check(s, b)?;
        ok &= m.1;
        values.insert("product".into(), Value::Object(m.0));
    }
    Ok(Outputs { values, ok })
}

fn milnor_check(s: &rtorsion::torsion::ShortExactSequence, b: &SesBases) -> Result<(Map<String, Value>, bool), CliError> {
    let m = milnor_product_check(s, b).map_err(violation)?;
    let values = obj(vec![
        ("lhs", rational_to_json(&m.lhs)),
        ("rhs", rational_to_json(&m.rhs)),
        ("torsion_a", rational_to_json(&m.tor_a)),
        ("torsion_b", rational_to_json(&m.tor_b)),
        ("torsion_d", rational_to_json(&m.tor_d)),
        ("torsion_les", rational_to_json(&m.tor_les)),
        ("compatibility", rationals(&m.compatibility)),
        ("compatible", Value::from(m.compatible)),
        ("equal", Value::from(m.equal)),
        ("equal_up_to_sign", Value::from(m.equal_up_to_sign)),
    ]);
    Ok((values, m.equal))
}

/// Generates the document described by `gen` with the given seed.
pub fn generate(gen: &GenArgs, seed: u64) -> Result<Document, String> {
    let cfg = gen.config(seed);
    let doc = match gen.kind {
        Kind::Chain => {
            let (c, chain) = gen_chain_complex(&cfg).map_err(|e| e.to_string())?;
            let hom = gen_homology_bases(&cfg, &c).map_err(|e| e.to_string())?;
            Document::Instance(Instance {
                chain_bases: Some(chain),
                homology_bases: Some(hom),
                ..Instance::plain(c)
            })
        }
        Kind::Ses => {
            let g = gen_ses(&cfg).map_err(|e| e.to_string())?;
            Document::Ses(SesFile {
                ses: g.ses,
                bases: Some(g.bases),
            })
        }
        _ => {
            let kind = gen.symplectic_kind().map_err(|e| format!("{e:?}"))?;
            let s = gen_symplectic(&cfg, kind).map_err(|e| e.to_string())?;
            let hom = gen_homology_bases(&cfg, &s.base).map_err(|e| e.to_string())?;
            Document::Instance(Instance {
                homology_bases: Some(hom),
                ..Instance::from_symplectic(&s)
            })
        }
    };
    Ok(doc)
}

fn cmd_gen(gen: &GenArgs, seed: u64, out: Option<&Path>) -> Result<Reply, CliError> {
    let doc = generate(gen, seed).map_err(CliError::Usage)?;
    let text = to_canonical_string(&document_to_json(&doc)) + "\n";
    let Some(path) = out else {
        return Ok(Reply::Raw(text));
    };
    std::fs::write(path, &text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    let values = obj(vec![
        ("path", Value::from(path.display().to_string())),
        ("output_digest", Value::from(sha256_hex(text.as_bytes()))),
    ]);
    Ok(Reply::Report(String::new(), Outputs { values, ok: true }))
}

fn verify_values(inst: &Instance, with_probe: bool) -> Result<Outputs, CliError> {
    let s = expect_symplectic(inst)?;
    let hom = match &inst.homology_bases {
        Some(h) => h.clone(),
        None => compute_homology(&s.base).map_err(violation)?.rep_bases(),
    };
    let check = verify_main_theorem(&s, &hom).map_err(violation)?;
    let mut values = obj(vec![
        ("lhs", rational_to_json(&check.lhs)),
        ("rhs", rational_to_json(&check.rhs)),
        ("equal", Value::from(check.equal)),
        ("equal_up_to_sign", Value::from(check.equal_up_to_sign())),
        ("predicted_sign", rational_to_json(&check.predicted_sign)),
        ("flipped", Value::from(check.compatible_bases.flipped)),
    ]);
    let mut ok = check.equal;
    if with_probe {
        let chain = inst
            .chain_bases
            .as_ref()
            .ok_or_else(|| CliError::Usage("--probe needs chain_bases".into()))?;
        let p = probe(&s, chain, &hom).map_err(violation)?;
        let probe_values = obj(vec![
            ("torsion", rational_to_json(&p.torsion)),
            ("compatible_torsion", rational_to_json(&p.compatible_torsion)),
            ("rhs", rational_to_json(&p.rhs)),
            ("discrepancy", rational_to_json(&p.discrepancy)),
            ("equal", Value::from(p.equal)),
        ]);
        values.insert("probe".into(), Value::Object(probe_values));
        ok = p.equal;
    }
    Ok(Outputs { values, ok })
}

fn cmd_verify(
    path: Option<&Path>,
    with_probe: bool,
    batch: Option<usize>,
    gen: &GenArgs,
    seed: u64,
) -> Result<Reply, (String, CliError)> {
    let no_digest = |e| (String::new(), e);
    if let Some(count) = batch {
        gen.symplectic_kind().map_err(no_digest)?;
        return verify_batch(gen, seed, count).map_err(no_digest);
    }
    let (digest, inst) = match path {
        Some(p) => {
            let input = read_input(p).map_err(no_digest)?;
            (input.digest, expect_instance(input.doc).map_err(no_digest)?)
        }
        None => {
            gen.symplectic_kind().map_err(no_digest)?;
            let doc = generate(gen, seed).map_err(|e| no_digest(CliError::Usage(e)))?;
            let digest = sha256_hex(to_canonical_string(&document_to_json(&doc)).as_bytes());
            (digest, expect_instance(doc).map_err(no_digest)?)
        }
    };
    verify_values(&inst, with_probe)
        .map(|o| Reply::Report(digest.clone(), o))
        .map_err(|e| (digest, e))
}

fn verify_batch(gen: &GenArgs, seed: u64, count: usize) -> Result<Reply, CliError> {
    let results: Vec<(String, Value, bool, bool)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let mut entry = obj(vec![("seed", Value::from(s))]);
            let doc = match generate(gen, s) {
                Ok(d) => d,
                Err(e) => {
                    entry.insert("error".into(), Value::from(e));
                    return (String::new(), Value::Object(entry), false, false);
                }
            };
            let text = to_canonical_string(&document_to_json(&doc));
            let inst = expect_instance(doc).expect("symplectic kinds generate instances");
            match verify_values(&inst, false) {
                Ok(out) => {
                    let up_to_sign = out.values["equal_up_to_sign"].as_bool() == Some(true);
                    entry.extend(out.values);
                    (text, Value::Object(entry), out.ok, up_to_sign)
                }
                Err(e) => {
                    entry.insert("error".into(), Value::from(format!("{e:?}")));
                    (text, Value::Object(entry), false, false)
                }
            }
        })
        .collect();
    let mut hasher = Sha256::new();
    for (text, ..) in &results {
        hasher.update(text.as_bytes());
        hasher.update(b"\n");
    }
    let equal = results.iter().filter(|r| r.2).count();
    let up_to_sign = results.iter().filter(|r| r.3).count();
    let values = obj(vec![
        ("total", Value::from(count)),
        ("equal", Value::from(equal)),
        ("equal_up_to_sign", Value::from(up_to_sign)),
        ("instances", Value::Array(results.into_iter().map(|r| r.1).collect())),
    ]);
    Ok(Reply::Report(
        hex::encode(hasher.finalize()),
        Outputs {
            values,
            ok: equal == count,
        },
    ))
}
