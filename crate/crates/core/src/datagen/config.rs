use serde::{Deserialize, Serialize};

use super::DatagenError;

/// Probabilities of the six structure augmentations plus per-feature caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub p_variable_group: f64,
    pub p_parentheses: f64,
    pub p_bracket_pair: f64,
    pub p_rfrag_ring_atom: f64,
    pub p_rfrag_ring: f64,
    pub p_funcgroup_ring: f64,
    pub max_variable_groups: usize,
    pub max_position_variations: usize,
    pub max_frequency_variations: usize,
    /// Weights of the frequency labels `n`, `m`, `p`, `w` and blank.
    pub frequency_label_weights: [f64; 5],
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            p_variable_group: 0.12,
            p_parentheses: 0.05,
            p_bracket_pair: 0.25,
            p_rfrag_ring_atom: 0.08,
            p_rfrag_ring: 0.3,
            p_funcgroup_ring: 0.15,
            max_variable_groups: 4,
            max_position_variations: 2,
            max_frequency_variations: 2,
            frequency_label_weights: [0.5, 0.15, 0.1, 0.1, 0.15],
        }
    }
}

/// Per-sample feature proportions to aim for. When set, each sample first
/// draws which features it must carry; operations are then gated on that draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureTargets {
    pub r_group: f64,
    pub m_section: f64,
    pub sg_section: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DescriptionConfig {
    pub p_prefix: f64,
    pub p_suffix: f64,
    pub p_noise: f64,
    /// Chance that labels with equal site valence share one definition.
    pub p_group_labels: f64,
    pub min_substituents: usize,
    pub max_substituents: usize,
    /// Accepted for compatibility; descriptions are never paraphrased.
    pub paraphrase_fraction: f64,
    pub line_chars: usize,
}

impl Default for DescriptionConfig {
    fn default() -> Self {
        DescriptionConfig {
            p_prefix: 0.7,
            p_suffix: 0.3,
            p_noise: 0.15,
            p_group_labels: 0.3,
            min_substituents: 1,
            max_substituents: 5,
            paraphrase_fraction: 0.0,
            line_chars: 60,
        }
    }
}

/// Ranges the draw style is sampled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub bond_length: [f64; 2],
    pub bond_width: [f64; 2],
    pub font_size: [f64; 2],
    pub n_fonts: usize,
    pub p_subscript: f64,
    pub p_explicit_carbon: f64,
    pub p_aromatic_circle: f64,
    pub p_atom_numbers: f64,
    pub p_description_beside: f64,
    pub margin: f64,
    pub max_canvas: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            bond_length: [28.0, 40.0],
            bond_width: [1.0, 2.5],
            font_size: [12.0, 18.0],
            n_fonts: 4,
            p_subscript: 0.7,
            p_explicit_carbon: 0.1,
            p_aromatic_circle: 0.3,
            p_atom_numbers: 0.05,
            p_description_beside: 0.3,
            margin: 20.0,
            max_canvas: 4000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OcrNoiseConfig {
    pub p_shift: f64,
    pub max_shift_px: i32,
    pub p_substitution: f64,
    pub p_insertion: f64,
    pub p_deletion: f64,
    pub p_transposition: f64,
    pub p_case: f64,
}

impl Default for OcrNoiseConfig {
    fn default() -> Self {
        OcrNoiseConfig {
            p_shift: 0.0,
            max_shift_px: 3,
            p_substitution: 0.0,
            p_insertion: 0.0,
            p_deletion: 0.0,
            p_transposition: 0.0,
            p_case: 0.0,
        }
    }
}

impl OcrNoiseConfig {
    pub fn uniform(p: f64, max_shift_px: i32) -> Self {
        OcrNoiseConfig {
            p_shift: p,
            max_shift_px,
            p_substitution: p,
            p_insertion: p,
            p_deletion: p,
            p_transposition: p,
            p_case: p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageNoiseConfig {
    pub p_shift: f64,
    pub max_shift_px: i32,
    pub p_scale: f64,
    pub scale_range: [f64; 2],
    pub p_downscale: f64,
    pub downscale_factor: [f64; 2],
    pub p_blur: f64,
    pub blur_sigma: [f64; 2],
    pub p_pepper: f64,
    pub pepper_patches: usize,
    pub pepper_density: f64,
    pub p_lines: f64,
    pub max_lines: usize,
}

impl Default for ImageNoiseConfig {
    fn default() -> Self {
        ImageNoiseConfig {
            p_shift: 0.0,
            max_shift_px: 10,
            p_scale: 0.0,
            scale_range: [0.8, 1.2],
            p_downscale: 0.0,
            downscale_factor: [0.4, 0.8],
            p_blur: 0.0,
            blur_sigma: [0.5, 1.2],
            p_pepper: 0.0,
            pepper_patches: 3,
            pepper_density: 0.1,
            p_lines: 0.0,
            max_lines: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    /// Number of diverse base molecules selected from the corpus.
    pub pool_size: usize,
    /// Base molecules tried per sample before giving up on its targets.
    pub max_tries: usize,
    pub augment: AugmentConfig,
    pub targets: Option<FeatureTargets>,
    pub description: DescriptionConfig,
    pub render: RenderConfig,
    pub ocr_noise: OcrNoiseConfig,
    pub image_noise: ImageNoiseConfig,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            pool_size: 256,
            max_tries: 16,
            augment: AugmentConfig::default(),
            targets: None,
            description: DescriptionConfig::default(),
            render: RenderConfig::default(),
            ocr_noise: OcrNoiseConfig::default(),
            image_noise: ImageNoiseConfig::default(),
        }
    }
}

fn check_p(name: &str, p: f64) -> Result<(), DatagenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(DatagenError::InvalidConfig(format!("{name} = {p} is not a probability")))
    }
}

fn check_range(name: &str, r: [f64; 2]) -> Result<(), DatagenError> {
    if r[0].is_finite() && r[1].is_finite() && 0.0 < r[0] && r[0] <= r[1] {
        Ok(())
    } else {
        Err(DatagenError::InvalidConfig(format!("{name} = {r:?} is not a positive range")))
    }
}

impl GenConfig {
    pub fn from_toml(text: &str) -> Result<GenConfig, DatagenError> {
        let cfg: GenConfig = toml::from_str(text).map_err(|e| DatagenError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        let a = &self.augment;
        for (n, p) in [
            ("p_variable_group", a.p_variable_group),
            ("p_parentheses", a.p_parentheses),
            ("p_bracket_pair", a.p_bracket_pair),
            ("p_rfrag_ring_atom", a.p_rfrag_ring_atom),
            ("p_rfrag_ring", a.p_rfrag_ring),
            ("p_funcgroup_ring", a.p_funcgroup_ring),
        ] {
            check_p(n, p)?;
        }
        if a.frequency_label_weights.iter().any(|w| !w.is_finite() || *w < 0.0)
            || a.frequency_label_weights.iter().sum::<f64>() <= 0.0
        {
            return Err(DatagenError::InvalidConfig("frequency_label_weights".into()));
        }
        if let Some(t) = &self.targets {
            check_p("targets.r_group", t.r_group)?;
            check_p("targets.m_section", t.m_section)?;
            check_p("targets.sg_section", t.sg_section)?;
            if t.m_section > t.r_group {
                return Err(DatagenError::InvalidConfig(
                    "targets.m_section cannot exceed targets.r_group: every m section carries an R-group".into(),
                ));
            }
        }
        let d = &self.description;
        for (n, p) in [
            ("p_prefix", d.p_prefix),
            ("p_suffix", d.p_suffix),
            ("p_noise", d.p_noise),
            ("p_group_labels", d.p_group_labels),
            ("paraphrase_fraction", d.paraphrase_fraction),
        ] {
            check_p(n, p)?;
        }
        if d.min_substituents == 0 || d.min_substituents > d.max_substituents {
            return Err(DatagenError::InvalidConfig("substituent count range".into()));
        }
        let r = &self.render;
        check_range("bond_length", r.bond_length)?;
        check_range("bond_width", r.bond_width)?;
        check_range("font_size", r.font_size)?;
        for (n, p) in [
            ("p_subscript", r.p_subscript),
            ("p_explicit_carbon", r.p_explicit_carbon),
            ("p_aromatic_circle", r.p_aromatic_circle),
            ("p_atom_numbers", r.p_atom_numbers),
            ("p_description_beside", r.p_description_beside),
        ] {
            check_p(n, p)?;
        }
        let o = &self.ocr_noise;
        for (n, p) in [
            ("ocr p_shift", o.p_shift),
            ("p_substitution", o.p_substitution),
            ("p_insertion", o.p_insertion),
            ("p_deletion", o.p_deletion),
            ("p_transposition", o.p_transposition),
            ("p_case", o.p_case),
        ] {
            check_p(n, p)?;
        }
        let i = &self.image_noise;
        for (n, p) in [
            ("image p_shift", i.p_shift),
            ("p_scale", i.p_scale),
            ("p_downscale", i.p_downscale),
            ("p_blur", i.p_blur),
            ("p_pepper", i.p_pepper),
            ("pepper_density", i.pepper_density),
            ("p_lines", i.p_lines),
        ] {
            check_p(n, p)?;
        }
        check_range("scale_range", i.scale_range)?;
        check_range("downscale_factor", i.downscale_factor)?;
        check_range("blur_sigma", i.blur_sigma)?;
        if self.pool_size == 0 || self.max_tries == 0 {
            return Err(DatagenError::InvalidConfig("pool_size and max_tries must be positive".into()));
        }
        Ok(())
    }
}
