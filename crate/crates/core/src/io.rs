//! Canonical JSON encoding of complexes, symplectic complexes, basis families
//! and short exact sequences.
//!
//! Rationals are strings `"a/b"` (with `b > 1`) or `"a"`; matrices are row-major
//! arrays of rows. Canonical output has sorted keys and no insignificant whitespace.

use std::fmt;

use num::{BigInt, One, Zero};
use serde_json::{Map, Value};

use crate::complex::{BasisFamily, ChainComplex};
use crate::linalg::{Matrix, Rational};
use crate::symplectic::SymplecticComplex;
use crate::torsion::{SesBases, ShortExactSequence};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Malformed JSON text.
    Syntax { line: usize, column: usize, message: String },
    /// Well-formed JSON with invalid content at the given field path.
    Field { path: String, message: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, column, message } => {
                write!(f, "line {line}, column {column}: {message}")
            }
            ParseError::Field { path, message } => write!(f, "at {path}: {message}"),
        }
    }
}

impl std::error::Error for ParseError {}

fn field_err(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        path: path.to_string(),
        message: message.into(),
    }
}

pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"a"` or `"a/b"` with integers `a` and `b > 0`; the result is normalized.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let bad = || format!("invalid rational {s:?}");
    let int = |t: &str| -> Result<BigInt, String> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<BigInt>().map_err(|_| bad())
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(int(s)?)),
        Some((a, b)) => {
            if b.starts_with('-') {
                return Err(format!("negative denominator in {s:?}"));
            }
            let den = int(b)?;
            if den.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Rational::new(int(a)?, den))
        }
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(rational_to_string(r))
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(rational_to_json).collect()))
            .collect(),
    )
}

/// Reads a matrix with `rows` rows; `cols` is checked when given and inferred otherwise
/// (a matrix with no rows has no columns unless `cols` says otherwise).
pub fn matrix_from_json(v: &Value, rows: usize, cols: Option<usize>, path: &str) -> Result<Matrix, ParseError> {
    let arr = v
        .as_array()
        .ok_or_else(|| field_err(path, "expected an array of rows"))?;
    if arr.len() != rows {
        return Err(field_err(path, format!("expected {rows} rows, found {}", arr.len())));
    }
    let width = match (cols, arr.first()) {
        (Some(c), _) => c,
        (None, Some(first)) => first.as_array().map_or(0, Vec::len),
        (None, None) => 0,
    };
    let mut data = Vec::with_capacity(rows * width);
    for (i, row) in arr.iter().enumerate() {
        let row_path = format!("{path}[{i}]");
        let entries = row
            .as_array()
            .ok_or_else(|| field_err(&row_path, "expected an array of rationals"))?;
        if entries.len() != width {
            return Err(field_err(
                &row_path,
                format!("expected {width} entries, found {}", entries.len()),
            ));
        }
        for (j, e) in entries.iter().enumerate() {
            let entry_path = format!("{row_path}[{j}]");
            let s = e
                .as_str()
                .ok_or_else(|| field_err(&entry_path, "expected a rational string"))?;
            data.push(parse_rational(s).map_err(|m| field_err(&entry_path, m))?);
        }
    }
    Ok(Matrix::from_vec(rows, width, data).expect("sized data"))
}

/// Basis families serialize as `{"p": Matrix}` keyed by degree.
pub fn basis_family_to_json(fam: &BasisFamily) -> Value {
    Value::Object(
        fam.0
            .iter()
            .enumerate()
            .map(|(p, m)| (p.to_string(), matrix_to_json(m)))
            .collect(),
    )
}

/// Reads a family with one matrix per degree; degree `p` has `dims[p]` rows and,
/// if `square`, `dims[p]` columns.
pub fn basis_family_from_json(v: &Value, dims: &[usize], square: bool, path: &str) -> Result<BasisFamily, ParseError> {
    let obj = v
        .as_object()
        .ok_or_else(|| field_err(path, "expected an object keyed by degree"))?;
    for key in obj.keys() {
        let ok = key.parse::<usize>().ok().filter(|&p| p < dims.len() && p.to_string() == *key);
        if ok.is_none() {
            return Err(field_err(&format!("{path}.{key}"), "unexpected degree key"));
        }
    }
    let mut out = Vec::with_capacity(dims.len());
    for (p, &d) in dims.iter().enumerate() {
        let key = p.to_string();
        let m = obj
            .get(&key)
            .ok_or_else(|| field_err(&format!("{path}.{key}"), "missing degree"))?;
        out.push(matrix_from_json(m, d, square.then_some(d), &format!("{path}.{key}"))?);
    }
    Ok(BasisFamily(out))
}

pub fn complex_to_json(c: &ChainComplex) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("n".into(), Value::from(c.n()));
    m.insert("dims".into(), Value::from(c.dims().to_vec()));
    m.insert(
        "boundaries".into(),
        Value::Array(c.boundaries().iter().map(matrix_to_json).collect()),
    );
    m
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, ParseError> {
    obj.get(key)
        .ok_or_else(|| field_err(&join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), ParseError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(field_err(&join(path, k), "unknown field")),
        None => Ok(()),
    }
}

const COMPLEX_KEYS: [&str; 3] = ["n", "dims", "boundaries"];

pub fn complex_from_json(obj: &Map<String, Value>, path: &str) -> Result<ChainComplex, ParseError> {
    let n_path = join(path, "n");
    let n = get(obj, "n", path)?
        .as_u64()
        .ok_or_else(|| field_err(&n_path, "expected a nonnegative integer"))? as usize;
    let dims_path = join(path, "dims");
    let dims: Vec<usize> = get(obj, "dims", path)?
        .as_array()
        .ok_or_else(|| field_err(&dims_path, "expected an array of dimensions"))?
        .iter()
        .enumerate()
        .map(|(i, d)| {
            d.as_u64()
                .map(|d| d as usize)
                .ok_or_else(|| field_err(&format!("{dims_path}[{i}]"), "expected a nonnegative integer"))
        })
        .collect::<Result<_, _>>()?;
    if dims.len() != n + 1 {
        return Err(field_err(&dims_path, format!("expected {} dimensions for n = {n}, found {}", n + 1, dims.len())));
    }
    let bd_path = join(path, "boundaries");
    let bds = get(obj, "boundaries", path)?
        .as_array()
        .ok_or_else(|| field_err(&bd_path, "expected an array of matrices"))?;
    if bds.len() != n {
        return Err(field_err(&bd_path, format!("expected {n} boundary matrices, found {}", bds.len())));
    }
    let boundaries = bds
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, dims[i], Some(dims[i + 1]), &format!("{bd_path}[{i}]")))
        .collect::<Result<_, _>>()?;
    Ok(ChainComplex::new(dims, boundaries))
}

/// A chain complex or symplectic complex with optional basis attachments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub complex: ChainComplex,
    /// Pairing matrices as stored in the file: all `n+1`, or only `Ω_0..Ω_{n/2}`.
    pub pairings: Option<Vec<Matrix>>,
    pub chain_bases: Option<BasisFamily>,
    pub homology_bases: Option<BasisFamily>,
}

impl Instance {
    pub fn plain(complex: ChainComplex) -> Self {
        Instance {
            complex,
            pairings: None,
            chain_bases: None,
            homology_bases: None,
        }
    }

    pub fn from_symplectic(s: &SymplecticComplex) -> Self {
        Instance {
            complex: s.base.clone(),
            pairings: Some(s.pairings.clone()),
            chain_bases: None,
            homology_bases: None,
        }
    }

    /// The symplectic complex, deriving upper pairings when only the lower half is stored.
    pub fn symplectic(&self) -> Option<SymplecticComplex> {
        let pairings = self.pairings.as_ref()?;
        let n = self.complex.n();
        if pairings.len() == n + 1 {
            Some(SymplecticComplex::new(self.complex.clone(), pairings.clone()))
        } else {
            Some(SymplecticComplex::from_lower_pairings(self.complex.clone(), pairings.clone()))
        }
    }
}

/// A short exact sequence file with optional bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SesFile {
    pub ses: ShortExactSequence,
    pub bases: Option<SesBases>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Instance(Instance),
    Ses(SesFile),
    /// A bare matrix, `{"format_version":"1","kind":"matrix","matrix":[...]}`.
    Matrix(Matrix),
}

fn parse_value(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_version(obj: &Map<String, Value>) -> Result<(), ParseError> {
    match get(obj, "format_version", "")?.as_str() {
        Some(FORMAT_VERSION) => Ok(()),
        Some(other) => Err(field_err("format_version", format!("unsupported version {other:?}"))),
        None => Err(field_err("format_version", "expected a string")),
    }
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let v = parse_value(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| field_err("$", "expected a JSON object"))?;
    check_version(obj)?;
    match obj.get("kind") {
        None => Ok(Document::Instance(instance_from_object(obj)?)),
        Some(Value::String(k)) if k == "ses" => Ok(Document::Ses(ses_from_object(obj)?)),
        Some(Value::String(k)) if k == "matrix" => {
            check_keys(obj, &["format_version", "kind", "matrix"], "")?;
            let m = get(obj, "matrix", "")?;
            let rows = m.as_array().map_or(0, Vec::len);
            Ok(Document::Matrix(matrix_from_json(m, rows, None, "matrix")?))
        }
        Some(_) => Err(field_err("kind", "expected \"ses\", \"matrix\" or no kind")),
    }
}

/// Parses a file that must hold a chain or symplectic complex.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    match parse_document(text)? {
        Document::Instance(i) => Ok(i),
        Document::Ses(_) => Err(field_err("kind", "expected a complex, found a short exact sequence")),
        Document::Matrix(_) => Err(field_err("kind", "expected a complex, found a matrix")),
    }
}

fn instance_from_object(obj: &Map<String, Value>) -> Result<Instance, ParseError> {
    let mut allowed = vec!["format_version", "pairings", "chain_bases", "homology_bases"];
    allowed.extend(COMPLEX_KEYS);
    check_keys(obj, &allowed, "")?;
    let complex = complex_from_json(obj, "")?;
    let n = complex.n();
    let dims = complex.dims().to_vec();
    let pairings = match obj.get("pairings") {
        None => None,
        Some(v) => {
            let arr = v
                .as_array()
                .ok_or_else(|| field_err("pairings", "expected an array of matrices"))?;
            if arr.len() != n + 1 && arr.len() != n / 2 + 1 {
                return Err(field_err(
                    "pairings",
                    format!("expected {} or {} matrices, found {}", n + 1, n / 2 + 1, arr.len()),
                ));
            }
            Some(
                arr.iter()
                    .enumerate()
                    .map(|(p, m)| matrix_from_json(m, dims[p], Some(dims[n - p]), &format!("pairings[{p}]")))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
    };
    let chain_bases = obj
        .get("chain_bases")
        .map(|v| basis_family_from_json(v, &dims, true, "chain_bases"))
        .transpose()?;
    let homology_bases = obj
        .get("homology_bases")
        .map(|v| basis_family_from_json(v, &dims, false, "homology_bases"))
        .transpose()?;
    Ok(Instance {
        complex,
        pairings,
        chain_bases,
        homology_bases,
    })
}

fn sub_object<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Map<String, Value>, ParseError> {
    get(obj, key, path)?
        .as_object()
        .ok_or_else(|| field_err(&join(path, key), "expected an object"))
}

fn maps_from_json(
    obj: &Map<String, Value>,
    key: &str,
    shape: impl Fn(usize) -> (usize, usize),
    count: usize,
) -> Result<Vec<Matrix>, ParseError> {
    let arr = get(obj, key, "")?
        .as_array()
        .ok_or_else(|| field_err(key, "expected an array of matrices"))?;
    if arr.len() != count {
        return Err(field_err(key, format!("expected {count} matrices, found {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(p, m)| {
            let (r, c) = shape(p);
            matrix_from_json(m, r, Some(c), &format!("{key}[{p}]"))
        })
        .collect()
}

fn ses_from_object(obj: &Map<String, Value>) -> Result<SesFile, ParseError> {
    check_keys(obj, &["format_version", "kind", "A", "B", "D", "inclusion", "projection", "bases"], "")?;
    let mut parts = Vec::new();
    for key in ["A", "B", "D"] {
        let sub = sub_object(obj, key, "")?;
        check_keys(sub, &COMPLEX_KEYS, key)?;
        parts.push(complex_from_json(sub, key)?);
    }
    let d = parts.pop().expect("three parts");
    let b = parts.pop().expect("three parts");
    let a = parts.pop().expect("three parts");
    if a.n() != b.n() || d.n() != b.n() {
        return Err(field_err("B.n", "A, B and D must have the same top degree"));
    }
    let count = b.n() + 1;
    let inclusion = maps_from_json(obj, "inclusion", |p| (b.dim(p), a.dim(p)), count)?;
    let projection = maps_from_json(obj, "projection", |p| (d.dim(p), b.dim(p)), count)?;
    let bases = match obj.get("bases") {
        None => None,
        Some(v) => {
            let bo = v.as_object().ok_or_else(|| field_err("bases", "expected an object"))?;
            check_keys(bo, &["A", "B", "D"], "bases")?;
            let mut fams = Vec::new();
            for (key, c) in [("A", &a), ("B", &b), ("D", &d)] {
                let path = format!("bases.{key}");
                let fo = sub_object(bo, key, "bases")?;
                check_keys(fo, &["chain", "homology"], &path)?;
                let chain = basis_family_from_json(get(fo, "chain", &path)?, c.dims(), true, &join(&path, "chain"))?;
                let hom = basis_family_from_json(get(fo, "homology", &path)?, c.dims(), false, &join(&path, "homology"))?;
                fams.push((chain, hom));
            }
            let (chain_d, homology_d) = fams.pop().expect("three families");
            let (chain_b, homology_b) = fams.pop().expect("three families");
            let (chain_a, homology_a) = fams.pop().expect("three families");
            Some(SesBases {
                chain_a,
                chain_b,
                chain_d,
                homology_a,
                homology_b,
                homology_d,
            })
        }
    };
    Ok(SesFile {
        ses: ShortExactSequence {
            a,
            b,
            d,
            inclusion,
            projection,
        },
        bases,
    })
}

pub fn instance_to_json(inst: &Instance) -> Value {
    let mut m = complex_to_json(&inst.complex);
    m.insert("format_version".into(), Value::from(FORMAT_VERSION));
    if let Some(p) = &inst.pairings {
        m.insert("pairings".into(), Value::Array(p.iter().map(matrix_to_json).collect()));
    }
    if let Some(b) = &inst.chain_bases {
        m.insert("chain_bases".into(), basis_family_to_json(b));
    }
    if let Some(b) = &inst.homology_bases {
        m.insert("homology_bases".into(), basis_family_to_json(b));
    }
    Value::Object(m)
}

pub fn ses_to_json(f: &SesFile) -> Value {
    let s = &f.ses;
    let mut m = Map::new();
    m.insert("format_version".into(), Value::from(FORMAT_VERSION));
    m.insert("kind".into(), Value::from("ses"));
    m.insert("A".into(), Value::Object(complex_to_json(&s.a)));
    m.insert("B".into(), Value::Object(complex_to_json(&s.b)));
    m.insert("D".into(), Value::Object(complex_to_json(&s.d)));
    m.insert("inclusion".into(), Value::Array(s.inclusion.iter().map(matrix_to_json).collect()));
    m.insert("projection".into(), Value::Array(s.projection.iter().map(matrix_to_json).collect()));
    if let Some(b) = &f.bases {
        let fam = |chain: &BasisFamily, hom: &BasisFamily| {
            let mut o = Map::new();
            o.insert("chain".into(), basis_family_to_json(chain));
            o.insert("homology".into(), basis_family_to_json(hom));
            Value::Object(o)
        };
        let mut bo = Map::new();
        bo.insert("A".into(), fam(&b.chain_a, &b.homology_a));
        bo.insert("B".into(), fam(&b.chain_b, &b.homology_b));
        bo.insert("D".into(), fam(&b.chain_d, &b.homology_d));
        m.insert("bases".into(), Value::Object(bo));
    }
    Value::Object(m)
}

pub fn document_to_json(d: &Document) -> Value {
    match d {
        Document::Instance(i) => instance_to_json(i),
        Document::Ses(s) => ses_to_json(s),
        Document::Matrix(m) => {
            let mut o = Map::new();
            o.insert("format_version".into(), Value::from(FORMAT_VERSION));
            o.insert("kind".into(), Value::from("matrix"));
            o.insert("matrix".into(), matrix_to_json(m));
            Value::Object(o)
        }
    }
}

/// Compact JSON with sorted keys.
pub fn to_canonical_string(v: &Value) -> String {
    // serde_json's default map is ordered by key, so plain compact output is canonical
    serde_json::to_string(v).expect("JSON values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frac, int};

    #[test]
    fn rational_strings() {
        assert_eq!(rational_to_string(&frac(-6, 4)), "-3/2");
        assert_eq!(rational_to_string(&int(7)), "7");
        assert_eq!(parse_rational("4/-6").ok(), None);
        assert_eq!(parse_rational("-4/6").unwrap(), frac(-2, 3));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("+3").is_err());
    }

    #[test]
    fn complex_round_trip() {
        let text = r#"{"boundaries":[[["2"]]],"dims":[1,1],"format_version":"1","n":1}"#;
        let doc = parse_document(text).unwrap();
        assert_eq!(to_canonical_string(&document_to_json(&doc)), text);
    }

    #[test]
    fn empty_shapes_round_trip() {
        let text = r#"{"boundaries":[[],[[],[]]],"dims":[0,2,0],"format_version":"1","homology_bases":{"0":[],"1":[["1","0"],["0","1"]],"2":[]},"n":2,"pairings":[[],[["0","1"],["-1","0"]]]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.complex.boundaries()[1].shape(), (2, 0));
        assert_eq!(inst.symplectic().unwrap().pairings.len(), 3);
        assert_eq!(to_canonical_string(&instance_to_json(&inst)), text);
    }

    #[test]
    fn matrix_document_round_trip() {
        let text = r#"{"format_version":"1","kind":"matrix","matrix":[["0","1"],["-1","0"]]}"#;
        let doc = parse_document(text).unwrap();
        assert!(matches!(&doc, Document::Matrix(m) if m.shape() == (2, 2)));
        assert_eq!(to_canonical_string(&document_to_json(&doc)), text);
        let ragged = r#"{"format_version":"1","kind":"matrix","matrix":[["0","1"],["-1"]]}"#;
        assert!(matches!(parse_document(ragged), Err(ParseError::Field { ref path, .. }) if path == "matrix[1]"));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = parse_document(r#"{"format_version":"1","n":1,"dims":[1,1],"boundaries":[[["x"]]]}"#).unwrap_err();
        assert_eq!(
            err,
            ParseError::Field {
                path: "boundaries[0][0][0]".into(),
                message: "invalid rational \"x\"".into()
            }
        );
        let err = parse_document(r#"{"format_version":"1","n":1,"dims":[1,1],"boundaries":[[["1","2"]]]}"#).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref path, .. } if path == "boundaries[0][0]"));
        let err = parse_document("{\"format_version\":\n\"1\"").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        let err = parse_document(r#"{"format_version":"2","n":0,"dims":[0],"boundaries":[]}"#).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref path, .. } if path == "format_version"));
    }
}
