//! Deterministic report output: every real printed with 17 significant
//! digits, a reproducibility manifest, and SHA-256 digests of canonical
//! input serializations.

use std::io;

use serde::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::eigen::SolverOptions;

/// Enough digits to round-trip any f64. Positional notation for decimal
/// exponents in −5..=16, scientific otherwise.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..=16).contains(&exp) {
        let decimals = (16 - exp).max(1) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// Serializes non-finite reals as the strings "inf", "-inf" and "nan",
/// which plain JSON numbers cannot express.
pub fn real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&format_real(*x))
    }
}

pub fn real_option<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => real(v, s),
        None => s.serialize_none(),
    }
}

/// Pretty JSON whose floats go through [`format_real`].
struct RealFormatter(PrettyFormatter<'static>);

impl Formatter for RealFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Single-line JSON with 17-digit floats.
struct CompactRealFormatter;

impl Formatter for CompactRealFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RealFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn to_json_line<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CompactRealFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

impl InputDigest {
    /// Digest of the compact JSON of `canonical`, which the caller must put
    /// in canonical order.
    pub fn of<T: Serialize + ?Sized>(name: impl Into<String>, canonical: &T) -> serde_json::Result<Self> {
        Ok(InputDigest {
            name: name.into(),
            sha256: sha256_hex(to_json_line(canonical)?.as_bytes()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub solver: SolverOptions,
    pub seed: u64,
    /// Only recorded on request, since it breaks byte-identical output.
    #[serde(serialize_with = "real_option")]
    pub wall_time_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, inputs: Vec<InputDigest>, solver: SolverOptions, seed: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            solver,
            seed,
            wall_time_seconds: None,
        }
    }
}

/// A report body with its manifest attached under `"manifest"`.
#[derive(Debug, Clone, Serialize)]
pub struct WithManifest<'a, T: Serialize> {
    #[serde(flatten)]
    pub body: &'a T,
    pub manifest: &'a RunManifest,
}

/// CSV text: a `# manifest: {...}` comment line, a header, then rows.
pub fn csv_with_manifest(
    manifest: &RunManifest,
    header: &[&str],
    rows: &[Vec<String>],
) -> serde_json::Result<String> {
    let mut out = format!("# manifest: {}\n{}\n", to_json_line(manifest)?, header.join(","));
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
