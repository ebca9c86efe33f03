//! Versioned TOML run configuration.
//!
//! ```toml
//! version = 1
//! seed = 42
//! workers = 0
//!
//! [augment]
//! copies = 3
//! crop = true
//! rotate = true
//! zoom = true
//! brightness_contrast = true
//! fill = 0
//! pivot = "mid-gray"        # or "image-mean"
//! crop_resize = true
//! link_originals = false
//!
//! [render]
//! view = "front-away"       # top-down, side-left, custom:<azimuth>,<elevation>
//! scheme = "14g"
//! width = 227
//! height = 227
//! joint_radius = 2.0
//! draw_bones = true
//! margin = 0.1
//!
//! [ingest]
//! profile = "shrec17"       # dhg, normalized, or a path to a profile file
//! joint_count = 15          # normalized input only
//!
//! [baseline]
//! method = "mixup"          # or "cutmix"
//! lambda = "uniform"        # or a number in [0, 1]
//!
//! [bench]
//! workers = [1, 4]
//! ```
//!
//! Every key is optional except `version`.

use std::fs;
use std::path::{Path, PathBuf};

use gestaug::baselines::{LambdaLaw, MixMethod};
use gestaug::datasets::{DatasetProfile, LabelScheme};
use gestaug::pipeline::{AugmentConfig, RenderConfig, DEFAULT_COPIES};
use gestaug::render::{RenderSettings, Viewpoint};
use gestaug::transforms::{ChainConfig, PivotMode, Toggles};
use serde::Deserialize;

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;
pub const CONFIG_ENV: &str = "GESTAUG_CONFIG";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub augment: AugmentSection,
    #[serde(default)]
    pub render: RenderSection,
    #[serde(default)]
    pub ingest: IngestSection,
    #[serde(default)]
    pub baseline: BaselineSection,
    #[serde(default)]
    pub bench: BenchSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub copies: u32,
    pub crop: bool,
    pub rotate: bool,
    pub zoom: bool,
    pub brightness_contrast: bool,
    pub fill: u8,
    pub pivot: PivotMode,
    pub crop_resize: bool,
    pub link_originals: bool,
}

impl Default for AugmentSection {
    fn default() -> Self {
        let chain = ChainConfig::default();
        AugmentSection {
            copies: DEFAULT_COPIES,
            crop: chain.toggles.crop,
            rotate: chain.toggles.rotate,
            zoom: chain.toggles.zoom,
            brightness_contrast: chain.toggles.brightness_contrast,
            fill: chain.fill,
            pivot: chain.pivot,
            crop_resize: chain.crop_resize,
            link_originals: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSection {
    pub view: String,
    pub scheme: LabelScheme,
    pub width: usize,
    pub height: usize,
    pub joint_radius: f64,
    pub draw_bones: bool,
    pub margin: f64,
}

impl Default for RenderSection {
    fn default() -> Self {
        let s = RenderSettings::default();
        RenderSection {
            view: Viewpoint::<f64>::FrontAway.to_string(),
            scheme: LabelScheme::Gestures14,
            width: s.width,
            height: s.height,
            joint_radius: s.joint_radius,
            draw_bones: s.draw_bones,
            margin: s.margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    pub profile: String,
    pub joint_count: Option<usize>,
}

impl Default for IngestSection {
    fn default() -> Self {
        IngestSection {
            profile: "shrec17".into(),
            joint_count: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum LambdaSetting {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub method: MixMethod,
    pub lambda: LambdaSetting,
}

impl Default for BaselineSection {
    fn default() -> Self {
        BaselineSection {
            method: MixMethod::Mixup,
            lambda: LambdaSetting::Named("uniform".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub workers: Vec<usize>,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            workers: vec![1, 4],
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            seed: 0,
            workers: 0,
            augment: AugmentSection::default(),
            render: RenderSection::default(),
            ingest: IngestSection::default(),
            baseline: BaselineSection::default(),
            bench: BenchSection::default(),
        }
    }
}

/// Dataset layout selected for `ingest`.
#[derive(Debug, Clone, PartialEq)]
pub enum IngestSource {
    Native(DatasetProfile),
    Normalized { joint_count: Option<usize> },
}

impl RunConfig {
    pub fn parse(text: &str, source: &Path) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Probe {
            version: Option<u32>,
        }
        let bad = |m: String| CliError::config(format!("{}: {m}", source.display()));
        let probe: Probe = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        match probe.version {
            Some(CONFIG_VERSION) => {}
            Some(v) => {
                return Err(bad(format!(
                    "config version {v} not supported (expected {CONFIG_VERSION})"
                )))
            }
            None => return Err(bad("missing `version` key".into())),
        }
        let config: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        config.validate().map_err(|e| bad(e.message))?;
        Ok(config)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// `--config` wins, then the environment variable, then built-in defaults.
    pub fn locate(flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf).or_else(|| {
            std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
    }

    pub fn load(flag: Option<&Path>) -> Result<Self, CliError> {
        match Self::locate(flag) {
            Some(path) => Self::read(&path),
            None => Ok(Self::default()),
        }
    }

    /// Check everything downstream modules would reject, so errors surface
    /// before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        self.view()?;
        self.render_settings()
            .validate()
            .map_err(CliError::from_core_config)?;
        self.lambda()?;
        self.ingest_source()?;
        if self.bench.workers.is_empty() {
            return Err(CliError::config("bench.workers must not be empty"));
        }
        Ok(())
    }

    pub fn view(&self) -> Result<Viewpoint<f64>, CliError> {
        self.render.view.parse().map_err(CliError::from_core_config)
    }

    pub fn render_settings(&self) -> RenderSettings {
        RenderSettings {
            width: self.render.width,
            height: self.render.height,
            joint_radius: self.render.joint_radius,
            draw_bones: self.render.draw_bones,
            margin: self.render.margin,
        }
    }

    pub fn render_config(&self) -> Result<RenderConfig, CliError> {
        Ok(RenderConfig {
            view: self.view()?,
            settings: self.render_settings(),
            scheme: self.render.scheme,
            workers: self.workers,
        })
    }

    pub fn chain(&self) -> ChainConfig {
        let a = &self.augment;
        ChainConfig {
            toggles: Toggles {
                crop: a.crop,
                rotate: a.rotate,
                zoom: a.zoom,
                brightness_contrast: a.brightness_contrast,
            },
            fill: a.fill,
            pivot: a.pivot,
            crop_resize: a.crop_resize,
        }
    }

    pub fn augment_config(&self) -> AugmentConfig {
        AugmentConfig {
            global_seed: self.seed,
            copies: self.augment.copies,
            workers: self.workers,
            chain: self.chain(),
            link_originals: self.augment.link_originals,
        }
    }

    pub fn lambda(&self) -> Result<LambdaLaw, CliError> {
        match &self.baseline.lambda {
            LambdaSetting::Fixed(l) if (0.0..=1.0).contains(l) => Ok(LambdaLaw::Fixed(*l)),
            LambdaSetting::Fixed(l) => Err(CliError::config(format!("lambda {l} outside [0, 1]"))),
            LambdaSetting::Named(s) => parse_lambda(s),
        }
    }

    pub fn ingest_source(&self) -> Result<IngestSource, CliError> {
        let name = self.ingest.profile.as_str();
        if name == "normalized" {
            return Ok(IngestSource::Normalized {
                joint_count: self.ingest.joint_count,
            });
        }
        if let Some(p) = DatasetProfile::builtin(name) {
            return Ok(IngestSource::Native(p));
        }
        let path = Path::new(name);
        if !path.is_file() {
            return Err(CliError::config(format!(
                "unknown profile {name:?} (expected shrec17, dhg, normalized or a profile file)"
            )));
        }
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let profile: DatasetProfile = toml::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        if profile.joint_count == 0 || profile.labels.is_empty() {
            return Err(CliError::config(format!(
                "{}: profile needs a joint count and at least one label scheme",
                path.display()
            )));
        }
        Ok(IngestSource::Native(profile))
    }
}

pub fn parse_lambda(s: &str) -> Result<LambdaLaw, CliError> {
    if s == "uniform" {
        return Ok(LambdaLaw::Uniform);
    }
    match s.parse::<f64>() {
        Ok(l) if (0.0..=1.0).contains(&l) => Ok(LambdaLaw::Fixed(l)),
        _ => Err(CliError::config(format!(
            "lambda {s:?}: expected \"uniform\" or a number in [0, 1]"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        RunConfig::parse(text, Path::new("test.toml"))
    }

    #[test]
    fn minimal_config_is_all_defaults() {
        assert_eq!(parse("version = 1").unwrap(), RunConfig::default());
    }

    #[test]
    fn full_config() {
        let c = parse(
            r#"
            version = 1
            seed = 7
            workers = 2
            [augment]
            copies = 5
            rotate = false
            pivot = "image-mean"
            [render]
            view = "custom:30,10"
            scheme = "28g"
            width = 64
            height = 48
            [ingest]
            profile = "normalized"
            joint_count = 15
            [baseline]
            method = "cutmix"
            lambda = 0.25
            [bench]
            workers = [1, 2, 8]
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        let a = c.augment_config();
        assert_eq!(a.copies, 5);
        assert!(!a.chain.toggles.rotate && a.chain.toggles.crop);
        assert_eq!(a.chain.pivot, PivotMode::ImageMean);
        let r = c.render_config().unwrap();
        assert_eq!(r.scheme, LabelScheme::Gestures28);
        assert_eq!((r.settings.width, r.settings.height), (64, 48));
        assert_eq!(
            c.ingest_source().unwrap(),
            IngestSource::Normalized {
                joint_count: Some(15)
            }
        );
        assert_eq!(c.lambda().unwrap(), LambdaLaw::Fixed(0.25));
        assert_eq!(c.bench.workers, [1, 2, 8]);
    }

    #[test]
    fn version_is_required_and_checked() {
        assert!(parse("seed = 1").unwrap_err().message.contains("version"));
        assert!(parse("version = 2")
            .unwrap_err()
            .message
            .contains("version 2"));
    }

    #[test]
    fn invalid_values_are_rejected_at_parse_time() {
        for text in [
            "version = 1\nbogus = 3",
            "version = 1\n[render]\nview = \"sideways\"",
            "version = 1\n[render]\nmargin = 0.6",
            "version = 1\n[render]\nwidth = 0",
            "version = 1\n[baseline]\nlambda = 1.5",
            "version = 1\n[baseline]\nlambda = \"beta\"",
            "version = 1\n[ingest]\nprofile = \"nope\"",
            "version = 1\n[augment]\nfill = 300",
            "version = 1\n[bench]\nworkers = []",
        ] {
            let err = parse(text).unwrap_err();
            assert_eq!(err.code, crate::ExitCode::Config, "{text}");
        }
    }

    #[test]
    fn flag_beats_environment() {
        let flag = Path::new("flag.toml");
        assert_eq!(RunConfig::locate(Some(flag)).unwrap(), flag);
    }

    #[test]
    fn lambda_strings() {
        assert_eq!(parse_lambda("uniform").unwrap(), LambdaLaw::Uniform);
        assert_eq!(parse_lambda("0").unwrap(), LambdaLaw::Fixed(0.0));
        assert!(parse_lambda("-0.1").is_err());
        assert!(parse_lambda("NaN").is_err());
    }
}
