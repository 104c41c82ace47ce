use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baseline::AffineRanges;
use crate::error::{Error, Result};
use crate::fdda::{A0Policy, FddaRanges, Interval};
use crate::prlc::PrlcParams;

/// Augmentations the pipeline knows, in their default application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugKind {
    Flip,
    Vscale,
    Fdda,
    Prlc,
    Affine,
    Cutmix,
}

impl AugKind {
    pub const ALL: [AugKind; 6] = [
        AugKind::Flip,
        AugKind::Vscale,
        AugKind::Fdda,
        AugKind::Prlc,
        AugKind::Affine,
        AugKind::Cutmix,
    ];

    /// Sub-stream id; fixed so that enabling or disabling one augmentation
    /// never changes another's draws.
    pub fn stream_id(self) -> u64 {
        match self {
            AugKind::Flip => 1,
            AugKind::Vscale => 2,
            AugKind::Fdda => 3,
            AugKind::Prlc => 4,
            AugKind::Affine => 5,
            AugKind::Cutmix => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AugKind::Flip => "flip",
            AugKind::Vscale => "vscale",
            AugKind::Fdda => "fdda",
            AugKind::Prlc => "prlc",
            AugKind::Affine => "affine",
            AugKind::Cutmix => "cutmix",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Mshc,
    Duke,
}

impl Preset {
    pub fn fdda_ranges(self) -> FddaRanges {
        match self {
            Preset::Mshc => FddaRanges::mshc(),
            Preset::Duke => FddaRanges::duke(),
        }
    }
}

fn half() -> f64 {
    0.5
}

fn default_order() -> Vec<AugKind> {
    vec![AugKind::Flip, AugKind::Vscale, AugKind::Fdda, AugKind::Prlc]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlipSection {
    #[serde(default = "half")]
    pub probability: f64,
}

impl Default for FlipSection {
    fn default() -> Self {
        Self { probability: half() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VscaleSection {
    #[serde(default = "half")]
    pub probability: f64,
    #[serde(default = "VscaleSection::default_range")]
    pub range: Interval,
}

impl VscaleSection {
    fn default_range() -> Interval {
        Interval::new(0.9, 1.1).expect("ordered")
    }
}

impl Default for VscaleSection {
    fn default() -> Self {
        Self {
            probability: half(),
            range: Self::default_range(),
        }
    }
}

/// FDDA settings. Unset ranges come from the preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FddaSection {
    #[serde(default = "half")]
    pub probability: f64,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub a1: Option<Interval>,
    #[serde(default)]
    pub a2: Option<Interval>,
    #[serde(default)]
    pub higher: Option<Vec<Interval>>,
    #[serde(default)]
    pub a0_policy: Option<A0Policy>,
}

impl Default for FddaSection {
    fn default() -> Self {
        Self {
            probability: half(),
            order: None,
            a1: None,
            a2: None,
            higher: None,
            a0_policy: None,
        }
    }
}

impl FddaSection {
    pub fn ranges(&self, preset: Preset) -> FddaRanges {
        let mut r = preset.fdda_ranges();
        if let Some(o) = self.order {
            r.order = o;
        }
        if let Some(a1) = self.a1 {
            r.a1 = a1;
        }
        if let Some(a2) = self.a2 {
            r.a2 = a2;
        }
        if let Some(h) = &self.higher {
            r.higher = h.clone();
        }
        if let Some(p) = self.a0_policy {
            r.a0 = p;
        }
        if r.order < 2 {
            r.a2 = Interval::point(0.0);
        }
        if r.order < 1 {
            r.a1 = Interval::point(0.0);
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrlcSection {
    pub probability: f64,
    pub l: [usize; 2],
    pub w_min: usize,
    pub w_max: Option<usize>,
    pub max_restarts: usize,
}

impl Default for PrlcSection {
    fn default() -> Self {
        let p = PrlcParams::default();
        Self {
            probability: half(),
            l: p.l,
            w_min: p.w_min,
            w_max: p.w_max,
            max_restarts: p.max_restarts,
        }
    }
}

impl PrlcSection {
    pub fn params(&self) -> PrlcParams {
        PrlcParams {
            l: self.l,
            w_min: self.w_min,
            w_max: self.w_max,
            max_restarts: self.max_restarts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AffineSection {
    pub probability: f64,
    pub rotation_deg: Interval,
    pub translate_frac: f64,
    pub scale: Interval,
}

impl Default for AffineSection {
    fn default() -> Self {
        let r = AffineRanges::default();
        Self {
            probability: half(),
            rotation_deg: r.rotation_deg,
            translate_frac: r.translate_frac,
            scale: r.scale,
        }
    }
}

impl AffineSection {
    pub fn ranges(&self) -> AffineRanges {
        AffineRanges {
            rotation_deg: self.rotation_deg,
            translate_frac: self.translate_frac,
            scale: self.scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutmixSection {
    #[serde(default = "half")]
    pub probability: f64,
}

impl Default for CutmixSection {
    fn default() -> Self {
        Self { probability: half() }
    }
}

/// An augmentation run. Relative paths resolve against the config file's
/// directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub epochs: usize,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    /// Enabled augmentations, applied in this order.
    #[serde(default = "default_order")]
    pub order: Vec<AugKind>,
    #[serde(default)]
    pub preset: Preset,
    #[serde(default)]
    pub flip: FlipSection,
    #[serde(default)]
    pub vscale: VscaleSection,
    #[serde(default)]
    pub fdda: FddaSection,
    #[serde(default)]
    pub prlc: PrlcSection,
    #[serde(default)]
    pub affine: AffineSection,
    #[serde(default)]
    pub cutmix: CutmixSection,
}

fn one() -> usize {
    1
}

impl PipelineConfig {
    /// Minimal config with every augmentation at its defaults.
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            output: output.into(),
            seed: 0,
            epochs: 1,
            workers: 0,
            order: default_order(),
            preset: Preset::default(),
            flip: FlipSection::default(),
            vscale: VscaleSection::default(),
            fdda: FddaSection::default(),
            prlc: PrlcSection::default(),
            affine: AffineSection::default(),
            cutmix: CutmixSection::default(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    /// Parses `text`, reporting errors against `path` and resolving
    /// relative paths against its parent directory.
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let config_err = |reason: String| Error::Config {
            path: path.to_path_buf(),
            reason,
        };
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.input.is_relative() {
            cfg.input = base.join(&cfg.input);
        }
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        cfg.check().map_err(|e| match e {
            Error::InvalidValue(reason) => config_err(reason),
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn probability(&self, kind: AugKind) -> f64 {
        match kind {
            AugKind::Flip => self.flip.probability,
            AugKind::Vscale => self.vscale.probability,
            AugKind::Fdda => self.fdda.probability,
            AugKind::Prlc => self.prlc.probability,
            AugKind::Affine => self.affine.probability,
            AugKind::Cutmix => self.cutmix.probability,
        }
    }

    pub fn fdda_ranges(&self) -> FddaRanges {
        self.fdda.ranges(self.preset)
    }

    /// Checks values serde cannot: probabilities, duplicates, ranges.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidValue(msg));
        for kind in AugKind::ALL {
            let p = self.probability(kind);
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{}.probability = {p} is outside [0, 1]", kind.name()));
            }
        }
        let mut seen = BTreeSet::new();
        for kind in &self.order {
            if !seen.insert(*kind) {
                return bad(format!("order lists `{}` twice", kind.name()));
            }
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1".into());
        }
        if self.vscale.range.lo() <= 0.0 {
            return bad(format!("vscale.range must be positive, got {:?}", self.vscale.range));
        }
        let r = self.fdda_ranges();
        if r.order == 0 || r.higher.len() + 2 < r.order {
            return bad(format!(
                "fdda.order = {} needs ranges for every coefficient above 2 in fdda.higher",
                r.order
            ));
        }
        if let A0Policy::Uniform { lo, hi } = r.a0 {
            Interval::new(lo, hi)?;
        }
        self.prlc
            .params()
            .check()
            .map_err(|e| Error::InvalidValue(format!("prlc: {e}")))?;
        let a = &self.affine;
        if a.scale.lo() <= 0.0 || !(a.translate_frac >= 0.0) {
            return bad("affine.scale must be positive and affine.translate_frac non-negative".into());
        }
        Ok(())
    }
}
