//! Flat `key = value` configuration.

use std::path::{Path, PathBuf};

use copaint_core::affect::InferenceWeights;
use copaint_core::canvas::Region;
use copaint_core::lexicon::{Lexicon, DEFAULT_MIN_CONCRETENESS};
use copaint_core::sketch::AssetLibrary;
use copaint_core::user_model::UpdateParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
}

/// Everything the engine leaves open. Paths are resolved relative to the
/// config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub inference_weights: InferenceWeights,
    pub update_params: UpdateParams,
    pub history_capacity: usize,
    pub stroke_budget: usize,
    /// `None` uses the bundled demo lexicon.
    pub lexicon_path: Option<PathBuf>,
    /// `None` uses the bundled clip-art library.
    pub asset_path: Option<PathBuf>,
    pub min_concreteness: f64,
    /// Where profiles are persisted; `None` keeps them in memory.
    pub profile_dir: Option<PathBuf>,
    /// Robot's painting area; `None` is the right half of each canvas.
    pub robot_region: Option<Region>,
    /// Base seed of abstract compositions.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            inference_weights: InferenceWeights::default(),
            update_params: UpdateParams::default(),
            history_capacity: 5,
            stroke_budget: 150,
            lexicon_path: None,
            asset_path: None,
            min_concreteness: DEFAULT_MIN_CONCRETENESS,
            profile_dir: None,
            robot_region: None,
            seed: 0,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::Value {
        key: key.to_string(),
        message: e.to_string(),
    })
}

fn parse_region(key: &str, value: &str) -> Result<Option<Region>, ConfigError> {
    if value == "right-half" {
        return Ok(None);
    }
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let [x, y, width, height] = parts[..] else {
        return Err(ConfigError::Value {
            key: key.to_string(),
            message: "expected `right-half` or `x,y,width,height`".into(),
        });
    };
    Ok(Some(Region {
        x: parse_value(key, x)?,
        y: parse_value(key, y)?,
        width: parse_value(key, width)?,
        height: parse_value(key, height)?,
    }))
}

impl Config {
    /// Parses the text form. Blank lines and `#` comments are ignored; every
    /// key is optional.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let path = || Some(base.join(value));
            match key {
                "inferenceWeights.intensity" => c.inference_weights.intensity = parse_value(key, value)?,
                "inferenceWeights.diagonal" => c.inference_weights.diagonal = parse_value(key, value)?,
                "updateParams.learningRate" => c.update_params.learning_rate = parse_value(key, value)?,
                "updateParams.ancestorDecay" => c.update_params.ancestor_decay = parse_value(key, value)?,
                "updateParams.kNeighbors" => c.update_params.k_neighbors = parse_value(key, value)?,
                "updateParams.stddevPenalty" => c.update_params.stddev_penalty = parse_value(key, value)?,
                "historyCapacity" => c.history_capacity = parse_value(key, value)?,
                "strokeBudget" => c.stroke_budget = parse_value(key, value)?,
                "lexiconPath" => c.lexicon_path = path(),
                "assetPath" => c.asset_path = path(),
                "minConcreteness" => c.min_concreteness = parse_value(key, value)?,
                "profileDir" => c.profile_dir = path(),
                "robotRegion" => c.robot_region = parse_region(key, value)?,
                "seed" => c.seed = parse_value(key, value)?,
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: &str| {
            Err(ConfigError::Value {
                key: key.to_string(),
                message: message.to_string(),
            })
        };
        if !self.inference_weights.is_valid() {
            return bad("inferenceWeights", "coefficients must lie in [0, 1]");
        }
        if let Err(e) = self.update_params.validate() {
            return bad("updateParams", &e.to_string());
        }
        if self.history_capacity == 0 {
            return bad("historyCapacity", "must be at least 1");
        }
        if !(1.0..=5.0).contains(&self.min_concreteness) {
            return bad("minConcreteness", "must lie in [1, 5]");
        }
        if let Some(r) = self.robot_region {
            if r.width == 0 || r.height == 0 {
                return bad("robotRegion", "must not be empty");
            }
        }
        Ok(())
    }

    /// Text form accepted by [`Config::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        put("inferenceWeights.intensity", self.inference_weights.intensity.to_string());
        put("inferenceWeights.diagonal", self.inference_weights.diagonal.to_string());
        put("updateParams.learningRate", self.update_params.learning_rate.to_string());
        put("updateParams.ancestorDecay", self.update_params.ancestor_decay.to_string());
        put("updateParams.kNeighbors", self.update_params.k_neighbors.to_string());
        put("updateParams.stddevPenalty", self.update_params.stddev_penalty.to_string());
        put("historyCapacity", self.history_capacity.to_string());
        put("strokeBudget", self.stroke_budget.to_string());
        if let Some(p) = &self.lexicon_path {
            put("lexiconPath", p.display().to_string());
        }
        if let Some(p) = &self.asset_path {
            put("assetPath", p.display().to_string());
        }
        put("minConcreteness", self.min_concreteness.to_string());
        if let Some(p) = &self.profile_dir {
            put("profileDir", p.display().to_string());
        }
        put(
            "robotRegion",
            match self.robot_region {
                Some(r) => format!("{},{},{},{}", r.x, r.y, r.width, r.height),
                None => "right-half".into(),
            },
        );
        put("seed", self.seed.to_string());
        out
    }

    pub fn load_lexicon(&self) -> Result<Lexicon, ConfigError> {
        let Some(path) = &self.lexicon_path else {
            return Ok(Lexicon::demo());
        };
        let bytes = read(path)?;
        Lexicon::from_csv(&bytes).map_err(|e| ConfigError::Value {
            key: "lexiconPath".into(),
            message: e.to_string(),
        })
    }

    pub fn load_assets(&self) -> Result<AssetLibrary, ConfigError> {
        let Some(path) = &self.asset_path else {
            return Ok(AssetLibrary::bundled());
        };
        let bytes = read(path)?;
        AssetLibrary::from_json(&bytes).map_err(|e| ConfigError::Value {
            key: "assetPath".into(),
            message: e.to_string(),
        })
    }
}

fn read(path: &Path) -> Result<Vec<u8>, ConfigError> {
    std::fs::read(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
