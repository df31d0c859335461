//! Pipeline configuration: flat `key = value` text, one key per line,
//! `#` comments. Unknown keys are rejected; every field has a default.

use std::path::Path;

use marble_core::lvq::LvqConfig;
use marble_core::raster::Channel;
use marble_core::{DistanceMetric, SubsetTable};

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub quadtree_min_area: usize,
    pub quadtree_alpha: f64,
    pub merge_metric: DistanceMetric,
    pub merge_threshold: f64,
    pub morphology_max_size: usize,
    pub morphology_channel: Channel,
    pub subsets: SubsetTable,
    pub lvq_initial_rate: f64,
    pub lvq_epochs: usize,
    pub lvq_prototypes_per_class: usize,
    pub sa_initial_temperature: Option<f64>,
    pub sa_cooling_factor: f64,
    pub sa_moves_per_temperature: Option<usize>,
    pub sa_final_temperature: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            quadtree_min_area: 64,
            quadtree_alpha: 0.05,
            merge_metric: DistanceMetric::Euclidean,
            merge_threshold: 0.15,
            morphology_max_size: 30,
            morphology_channel: Channel::V,
            subsets: SubsetTable::default(),
            lvq_initial_rate: 0.1,
            lvq_epochs: 50,
            lvq_prototypes_per_class: 1,
            sa_initial_temperature: None,
            sa_cooling_factor: 0.95,
            sa_moves_per_temperature: None,
            sa_final_temperature: 1e-3,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::data(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
            .map_err(|msg| PipelineError::data(format!("config {}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {line_no}: expected 'key = value'"))?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply(key, value)
                .map_err(|msg| format!("line {line_no}: {msg}"))?;
        }
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("bad value '{value}' for {key}"))
        }
        fn indices(value: &str) -> std::result::Result<Option<Vec<usize>>, String> {
            if value.is_empty() {
                return Ok(None);
            }
            value
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad index '{}'", t.trim()))
                })
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Some)
        }

        match key {
            "seed" => self.seed = num(key, value)?,
            "quadtree.min_area" => self.quadtree_min_area = num(key, value)?,
            "quadtree.alpha" => {
                let alpha: f64 = num(key, value)?;
                if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
                    return Err(format!("alpha {alpha} outside (0, 1)"));
                }
                self.quadtree_alpha = alpha;
            }
            "merge.metric" => self.merge_metric = value.parse()?,
            "merge.threshold" => {
                let t: f64 = num(key, value)?;
                if t < 0.0 {
                    return Err(format!("merge threshold {t} is negative"));
                }
                self.merge_threshold = t;
            }
            "morphology.max_size" => {
                let s: usize = num(key, value)?;
                if s == 0 {
                    return Err("morphology.max_size must be at least 1".into());
                }
                self.morphology_max_size = s;
            }
            "morphology.channel" => self.morphology_channel = value.parse()?,
            "subsets.hf_b" => self.subsets.hf_b = indices(value)?,
            "subsets.hf_c" => self.subsets.hf_c = indices(value)?,
            "lvq.initial_rate" => {
                let r: f64 = num(key, value)?;
                if !(0.0..1.0).contains(&r) {
                    return Err(format!("lvq rate {r} outside [0, 1)"));
                }
                self.lvq_initial_rate = r;
            }
            "lvq.epochs" => self.lvq_epochs = num(key, value)?,
            "lvq.prototypes_per_class" => {
                self.lvq_prototypes_per_class = num::<usize>(key, value)?.max(1)
            }
            "sa.initial_temperature" => {
                self.sa_initial_temperature = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    let t: f64 = num(key, value)?;
                    if t <= 0.0 {
                        return Err(format!("initial temperature {t} must be positive"));
                    }
                    Some(t)
                }
            }
            "sa.cooling_factor" => {
                let c: f64 = num(key, value)?;
                if !(0.0..1.0).contains(&c) || c == 0.0 {
                    return Err(format!("cooling factor {c} outside (0, 1)"));
                }
                self.sa_cooling_factor = c;
            }
            "sa.moves_per_temperature" => {
                self.sa_moves_per_temperature = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(num(key, value)?)
                }
            }
            "sa.final_temperature" => {
                let t: f64 = num(key, value)?;
                if t <= 0.0 {
                    return Err(format!("final temperature {t} must be positive"));
                }
                self.sa_final_temperature = t;
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn lvq_config(&self) -> LvqConfig {
        LvqConfig {
            initial_rate: self.lvq_initial_rate,
            epochs: self.lvq_epochs,
            seed: self.seed,
            prototypes_per_class: self.lvq_prototypes_per_class,
        }
    }

    pub fn sa_config(&self, k: usize) -> marble_core::SaConfig {
        marble_core::SaConfig {
            initial_temperature: self.sa_initial_temperature,
            cooling_factor: self.sa_cooling_factor,
            moves_per_temperature: self.sa_moves_per_temperature,
            final_temperature: self.sa_final_temperature,
            seed: self.seed,
            k,
        }
    }
}
