//! Merging config files and flags into a run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use deli_core::missing_data::AxisDomain;
use deli_core::neighborhood::SearchParams;
use deli_core::{AlphaMode, Mode, NeighbourhoodSpec, PerLine, Profile, RunConfig, Version};
use serde::{Deserialize, Serialize};

use crate::{usage, ClusterArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaModeArg {
    Literal,
    ExactVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Literal,
    Expand,
}

/// Contents of `--config`; every field is optional and overridden by flags.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub version: Option<u8>,
    pub cardinality: Option<usize>,
    pub alpha: Option<f64>,
    pub volume: Option<f64>,
    pub profile: Option<String>,
    pub profiles: Option<PathBuf>,
    pub alpha_mode: Option<AlphaModeArg>,
    pub mode: Option<ModeArg>,
    pub seed: Option<u64>,
    pub search_samples: Option<usize>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }

    /// Flags take precedence over file values.
    pub fn overlay(mut self, a: &ClusterArgs) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if a.$f.is_some() { self.$f = a.$f.clone(); } )* };
        }
        take!(version, cardinality, alpha, volume, profile, profiles, alpha_mode, mode, seed, search_samples, threads);
        self
    }
}

/// Per-line profiles from a JSON object `{ "id": "family:params" | null }`.
pub fn load_profile_map(path: &Path, ids: &[String]) -> anyhow::Result<Vec<Option<Profile>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map: BTreeMap<String, Option<String>> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    ids.iter()
        .map(|id| match map.get(id) {
            Some(Some(s)) => s
                .parse::<Profile>()
                .map(Some)
                .map_err(|e| usage(format!("profile for `{id}`: {e}"))),
            _ => Ok(None),
        })
        .collect()
}

/// Checks the flag combination before any data is loaded.
pub fn precheck(cfg: &FileConfig) -> anyhow::Result<()> {
    build(cfg, None).map(|_| ())
}

/// Resolves the effective configuration; `explicit_mode` reports whether the
/// user picked a mode.
pub fn build_run_config(cfg: &FileConfig, ids: &[String]) -> anyhow::Result<(RunConfig, bool)> {
    build(cfg, Some(ids))
}

fn build(cfg: &FileConfig, ids: Option<&[String]>) -> anyhow::Result<(RunConfig, bool)> {
    let version = match cfg.version.unwrap_or(1) {
        1 => Version::V1,
        2 => Version::V2,
        3 => Version::V3,
        v => return Err(usage(format!("unknown version {v}"))),
    };
    let cardinality = cfg
        .cardinality
        .ok_or_else(|| usage("the cardinality threshold (-c) is required"))?;
    let profiles = match (&cfg.profile, &cfg.profiles) {
        (Some(_), Some(_)) => return Err(usage("give either --profile or --profiles, not both")),
        (Some(s), None) => Some(PerLine::Constant(Some(
            s.parse::<Profile>().map_err(|e| usage(e.to_string()))?,
        ))),
        (None, Some(path)) => Some(match ids {
            Some(ids) => PerLine::Each(load_profile_map(path, ids)?),
            None => PerLine::Constant(None),
        }),
        (None, None) => None,
    };
    if version == Version::V2 && cfg.alpha.is_some() {
        return Err(usage("version 2 derives α from --volume; drop --alpha"));
    }
    if version != Version::V2 && cfg.volume.is_some() {
        return Err(usage(format!("--volume only applies to version 2, not {version}")));
    }
    let mut search = SearchParams::default();
    if let Some(k) = cfg.search_samples {
        search.samples = k;
    }
    let spec = NeighbourhoodSpec {
        version,
        cardinality,
        alpha: cfg.alpha.map(PerLine::Constant),
        volume: cfg.volume,
        profiles,
        alpha_mode: match cfg.alpha_mode {
            Some(AlphaModeArg::ExactVolume) => AlphaMode::ExactVolume,
            _ => AlphaMode::Literal,
        },
        search,
    };
    spec.validate(ids.map_or(0, <[String]>::len)).map_err(|e| usage(e.to_string()))?;
    let threads = cfg.threads.unwrap_or(1);
    if threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    let run = RunConfig {
        spec,
        mode: match cfg.mode {
            Some(ModeArg::Literal) => Mode::Literal,
            _ => Mode::Expand,
        },
        rng_seed: cfg.seed.unwrap_or(0),
        threads,
    };
    Ok((run, cfg.mode.is_some()))
}

/// Parses `K=uniform:LO,HI` or `K=LO,HI@family:params` (K is 1-based).
pub fn parse_axis(s: &str) -> Result<AxisDomain, String> {
    let (k, rest) = s.split_once('=').ok_or_else(|| format!("`{s}`: expected K=..."))?;
    let k: usize = k.trim().parse().map_err(|_| format!("`{s}`: axis must be a positive integer"))?;
    if k == 0 {
        return Err(format!("`{s}`: axes are numbered from 1"));
    }
    let (range, template) = if let Some(r) = rest.strip_prefix("uniform:") {
        (r, None)
    } else {
        match rest.split_once('@') {
            Some((r, t)) => (r, Some(t.parse::<Profile>().map_err(|e| format!("`{s}`: {e}"))?)),
            None => return Err(format!("`{s}`: expected uniform:LO,HI or LO,HI@family:params")),
        }
    };
    let (lo, hi) = range.split_once(',').ok_or_else(|| format!("`{s}`: expected LO,HI"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("`{s}`: bad lower bound"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("`{s}`: bad upper bound"))?;
    let d = match template {
        None => AxisDomain::uniform(k - 1, lo, hi),
        Some(t) => AxisDomain::new(k - 1, lo, hi, t),
    };
    d.map_err(|e| format!("`{s}`: {e}"))
}
