//! Run manifests and the on-disk result layout.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "r3";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub case_path: String,
    /// Digest of the case after the variant is applied.
    pub case_sha256: String,
    pub variant: u8,
    pub variant_label: String,
    pub config: serde_json::Value,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, case: &LoadedCase, config: serde_json::Value) -> Self {
        RunManifest {
            tool: TOOL.into(),
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            case_path: case.path.clone(),
            case_sha256: case.sha256.clone(),
            variant: case.variant,
            variant_label: case.label.clone(),
            config,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// SHA-256 over the manifest with the timestamp removed.
    pub fn hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        v.as_object_mut().expect("object").remove("timestamp");
        sha256_hex(&serde_json::to_vec(&v).expect("value serializes"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A case with its variant applied and provenance for the manifest.
pub struct LoadedCase {
    pub case: r3grid::NetworkCase,
    pub path: String,
    pub sha256: String,
    pub variant: u8,
    pub label: String,
    pub is_builtin_rts: bool,
}

pub fn load_case(path: Option<&Path>, variant: u8) -> Result<LoadedCase> {
    let (base, shown) = match path {
        Some(p) => (
            r3grid::load_case_file(p).with_context(|| format!("loading case {}", p.display()))?,
            p.display().to_string(),
        ),
        None => (r3grid::load_case(r3grid::rts24::RTS24_JSON)?, "builtin:rts24.json".to_string()),
    };
    let case = r3grid::build_variant(&base, variant)
        .with_context(|| format!("building variant {variant} of {shown}"))?;
    let sha256 = sha256_hex(r3grid::to_json(&case).as_bytes());
    let label = case
        .variant_label()
        .map_or_else(|| format!("Case {variant}"), str::to_string);
    Ok(LoadedCase {
        case,
        path: shown,
        sha256,
        variant,
        label,
        is_builtin_rts: path.is_none(),
    })
}

/// Header written at the top of every result file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: String,
    pub tool_version: String,
    pub manifest_hash: String,
    pub variant: u8,
    pub variant_label: String,
    #[serde(flatten)]
    pub body: T,
}

pub fn run_dir(out: &Path, variant: u8, command: &str) -> PathBuf {
    out.join(variant.to_string()).join(command)
}

/// Writes `result.json`, `manifest.json` and any extra files into `dir`.
pub fn write_run<T: Serialize>(
    dir: &Path,
    schema: &str,
    manifest: &RunManifest,
    body: T,
    extra: &[(&str, String)],
) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let env = Envelope {
        schema: schema.into(),
        tool_version: manifest.tool_version.clone(),
        manifest_hash: manifest.hash(),
        variant: manifest.variant,
        variant_label: manifest.variant_label.clone(),
        body,
    };
    write_json(&dir.join("result.json"), &env)?;
    write_json(&dir.join("manifest.json"), manifest)?;
    for (name, content) in extra {
        fs::write(dir.join(name), content).with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

/// Reads a result and checks it against the manifest stored beside it.
pub fn read_run<T: DeserializeOwned>(dir: &Path, schema: &str) -> Result<(Envelope<T>, RunManifest)> {
    let result_path = dir.join("result.json");
    let text = fs::read_to_string(&result_path).with_context(|| format!("reading {}", result_path.display()))?;
    let env: Envelope<T> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", result_path.display()))?;
    if env.schema != schema {
        bail!("{}: schema {} where {schema} was expected", result_path.display(), env.schema);
    }
    let manifest_path = dir.join("manifest.json");
    let manifest: RunManifest = serde_json::from_str(
        &fs::read_to_string(&manifest_path).with_context(|| format!("reading {}", manifest_path.display()))?,
    )
    .with_context(|| format!("parsing {}", manifest_path.display()))?;
    if manifest.hash() != env.manifest_hash {
        bail!("{}: manifest hash does not match {}", result_path.display(), manifest_path.display());
    }
    Ok((env, manifest))
}
