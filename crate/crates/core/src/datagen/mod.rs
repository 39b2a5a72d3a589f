//! Synthetic Markush sample generation: base-molecule sampling, structure
//! augmentation, templated definitions, backbone drawing with OCR cells and
//! OCR/raster noise.

mod augment;
mod compose;
mod config;
mod describe;
mod drawing;
mod font;
mod lexicon;
mod noise;
mod render;
mod sampling;
mod stats;
mod templates;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemgraph::valence_errors;
use crate::cxsmiles::{markush_equal, parse_cxsmiles, write_cxsmiles, MarkushStructure};
use crate::markushrepr::{decode_text, encode_text, SubstituentTable};
use crate::records::{DatasetRecord, OcrCell};

pub use augment::{augment_to_markush, augment_with_wants, choose_parenthesized, FeatureWants, FREQUENCY_LABELS};
pub use compose::{compose, wrap_text, Composition, Placement};
pub use config::{
    AugmentConfig, DescriptionConfig, FeatureTargets, GenConfig, ImageNoiseConfig, OcrNoiseConfig, RenderConfig,
};
pub use describe::{generate_description, label_valences};
pub use drawing::{svg_text_contents, Drawing, Element, Segment, Shift, TextRun, FONT_FAMILIES};
pub use font::glyph;
pub use lexicon::{Abbreviation, FunctionalGroup, Lexicon, LexiconAtom, Substituent, DEFAULT_LEXICON};
pub use noise::{augment_image, augment_ocr_cells, augment_ocr_cells_traced, pepper_patch, AugmentedImage, ImageOps, OcrOps};
pub use render::{layout, render_backbone, render_backbone_svg, DrawStyle, MAX_LAYOUT_ATOMS};
pub use sampling::{parse_corpus, sample_base_molecules, CorpusEntry, DEFAULT_CORPUS};
pub use stats::{dataset_stats, record_stats, DatasetStats};
pub use templates::{fill, TemplateKind, TemplateSet};

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("no templates of kind {0}")]
    MissingTemplateKind(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("no substituent with attachment valence {0}")]
    NoSubstituent(u8),
    #[error("layout overflow: {0}")]
    LayoutOverflow(String),
    #[error("canvas overflow: {0}")]
    CanvasOverflow(String),
    #[error("sample {index}: {message}")]
    InvalidSample { index: usize, message: String },
}

/// Rewrites a description without changing the labels it defines. No
/// provider ships with the crate.
pub trait Paraphraser: Send + Sync {
    fn paraphrase(&self, text: &str, table: &SubstituentTable) -> Option<String>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub index: usize,
    pub base_id: String,
}

/// One generated sample. `ocr_cells` carry OCR noise; `drawing` is the
/// clean composed scene the SVG was written from.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub structure: MarkushStructure,
    pub cxsmiles: String,
    pub optimized: String,
    pub description: String,
    pub table: SubstituentTable,
    pub ocr_cells: Vec<OcrCell>,
    pub svg: Option<String>,
    pub drawing: Drawing,
    pub provenance: Provenance,
}

impl Sample {
    pub fn to_record(&self, image_path: Option<String>) -> DatasetRecord {
        DatasetRecord {
            id: self.id.clone(),
            cxsmiles: self.cxsmiles.clone(),
            optimized: self.optimized.clone(),
            description: self.description.clone(),
            table: self.table.clone(),
            ocr_cells: self.ocr_cells.clone(),
            image_path,
        }
    }

    /// Checks valence, CXSMILES round-trip, optimized round-trip, label
    /// coverage and cell geometry.
    pub fn check(&self) -> Result<(), String> {
        let ms = &self.structure;
        if let Some(issue) = valence_errors(&ms.graph).first() {
            return Err(format!("valence: atom {} {}", issue.atom, issue.reason));
        }
        let back = parse_cxsmiles(&self.cxsmiles).map_err(|e| format!("cxsmiles: {e}"))?;
        if !markush_equal(&back, ms) || write_cxsmiles(&back) != self.cxsmiles {
            return Err("cxsmiles round-trip".into());
        }
        let decoded = decode_text(&self.optimized);
        if !decoded.is_clean() {
            return Err(format!("optimized: {:?}", decoded.diagnostics));
        }
        if !markush_equal(&decoded.structure, ms) || !decoded.table.equivalent(&self.table) {
            return Err("optimized round-trip".into());
        }
        if let Some(label) = ms.labels().into_iter().find(|l| self.table.get(l).is_none()) {
            return Err(format!("label {label} missing from table"));
        }
        let (w, h) = (self.drawing.width as i32, self.drawing.height as i32);
        if let Some(cell) = self.drawing.cells().into_iter().find(|c| !c.within(w, h)) {
            return Err(format!("cell {cell:?} outside {w} x {h}"));
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
pub struct Generation {
    pub samples: Vec<Sample>,
    pub failures: Vec<(usize, DatagenError)>,
}

/// Everything that determines the generated dataset besides `n`.
pub struct Generator {
    pub config: GenConfig,
    pub lexicon: Lexicon,
    pub templates: TemplateSet,
    pub corpus: Vec<CorpusEntry>,
    pool: Vec<usize>,
    paraphraser: Option<Box<dyn Paraphraser>>,
}

const POOL_STREAM: u64 = u64::MAX;
const RASTER_STREAM: u64 = 1 << 63;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Generator {
    pub fn new(
        config: GenConfig,
        corpus: Vec<CorpusEntry>,
        lexicon: Lexicon,
        templates: TemplateSet,
    ) -> Result<Generator, DatagenError> {
        config.validate()?;
        for kind in TemplateKind::ALL {
            templates.require(kind)?;
        }
        let graphs: Vec<_> = corpus.iter().map(|e| e.graph.clone()).collect();
        let pool = sample_base_molecules(&graphs, config.pool_size, &mut stream_rng(config.seed, POOL_STREAM))?;
        Ok(Generator {
            config,
            lexicon,
            templates,
            corpus,
            pool,
            paraphraser: None,
        })
    }

    /// Built-in corpus, lexicon and templates.
    pub fn with_builtins(config: GenConfig) -> Result<Generator, DatagenError> {
        let corpus = parse_corpus(DEFAULT_CORPUS)?;
        Generator::new(config, corpus, Lexicon::default(), TemplateSet::builtin())
    }

    pub fn set_paraphraser(&mut self, p: Box<dyn Paraphraser>) {
        self.paraphraser = Some(p);
    }

    /// Indices into the corpus of the diverse base-molecule pool.
    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    /// Generates sample `index` from its own rng stream.
    pub fn sample(&self, index: usize) -> Result<Sample, DatagenError> {
        let cfg = &self.config;
        let mut rng = stream_rng(cfg.seed, index as u64);
        let wants = cfg
            .targets
            .map(|t| FeatureWants::draw(&t, &mut rng))
            .unwrap_or_default();
        let mut base = self.pool[index % self.pool.len()];
        let mut ms = MarkushStructure::default();
        for k in 0..cfg.max_tries {
            base = self.pool[(index + k) % self.pool.len()];
            ms = augment_with_wants(&self.corpus[base].graph, &cfg.augment, &self.lexicon, wants, &mut rng);
            if wants.satisfied_by(&ms) {
                break;
            }
        }
        let (mut description, table) =
            generate_description(&ms, &self.templates, &self.lexicon, &cfg.description, &mut rng)?;
        if let Some(p) = &self.paraphraser {
            if !description.is_empty() && rng.random_bool(cfg.description.paraphrase_fraction) {
                if let Some(text) = p.paraphrase(&description, &table) {
                    description = text;
                }
            }
        }
        let mut style = DrawStyle::sample(&cfg.render, &mut rng);
        style.parenthesized = choose_parenthesized(&ms, &cfg.augment, &mut rng);
        let backbone = render_backbone(&ms, &style, &mut rng)?;
        let composition = compose(
            backbone,
            &description,
            &cfg.render,
            cfg.description.line_chars,
            style.font_size,
            &mut rng,
        )?;
        let drawing = composition.drawing;
        let ocr_cells = augment_ocr_cells(&drawing.cells(), &cfg.ocr_noise, &mut rng);
        let sample = Sample {
            id: format!("synth-{index:06}"),
            cxsmiles: write_cxsmiles(&ms),
            optimized: encode_text(&ms, &table),
            description,
            table,
            ocr_cells,
            svg: Some(drawing.to_svg()),
            drawing,
            provenance: Provenance {
                seed: cfg.seed,
                index,
                base_id: self.corpus[base].id.clone(),
            },
            structure: ms,
        };
        sample
            .check()
            .map_err(|message| DatagenError::InvalidSample { index, message })?;
        Ok(sample)
    }

    /// Samples `0..n` in parallel; output order is the index order.
    pub fn generate(&self, n: usize) -> Generation {
        let results: Vec<(usize, Result<Sample, DatagenError>)> =
            (0..n).into_par_iter().map(|i| (i, self.sample(i))).collect();
        let mut out = Generation::default();
        for (i, r) in results {
            match r {
                Ok(s) => out.samples.push(s),
                Err(e) => out.failures.push((i, e)),
            }
        }
        out
    }

    /// Rasterizes a sample and applies the configured image noise; returned
    /// cells follow shift and scale.
    pub fn raster(&self, sample: &Sample) -> AugmentedImage {
        let mut rng = stream_rng(self.config.seed, RASTER_STREAM | sample.provenance.index as u64);
        augment_image(&sample.drawing.rasterize(), &sample.ocr_cells, &self.config.image_noise, &mut rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generator(targets: Option<FeatureTargets>) -> Generator {
        Generator::with_builtins(GenConfig {
            seed: 11,
            targets,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn samples_are_valid_and_deterministic() {
        let g = generator(None);
        let run = g.generate(40);
        assert!(run.failures.is_empty(), "{:?}", run.failures);
        assert_eq!(run.samples.len(), 40);
        let again = g.generate(40);
        assert_eq!(run.samples, again.samples);
        for s in &run.samples {
            s.check().unwrap();
            let svg = s.svg.as_ref().unwrap();
            let texts = svg_text_contents(svg);
            for c in s.drawing.cells() {
                assert!(texts.contains(&c.text), "{} not in svg", c.text);
            }
            let labels: Vec<String> = s.structure.variable_groups().into_iter().map(|v| v.label).collect();
            let n_label_cells = s.drawing.cells().iter().filter(|c| {
                let t = c.text.trim_start_matches('(').trim_end_matches(')');
                labels.iter().any(|l| l == t)
            }).count();
            assert_eq!(n_label_cells, labels.len(), "{}", s.cxsmiles);
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let g = generator(None);
        let parallel = g.generate(12);
        let serial: Vec<Sample> = (0..12).map(|i| g.sample(i).unwrap()).collect();
        assert_eq!(parallel.samples, serial);
    }

    #[test]
    fn targets_steer_proportions() {
        let g = generator(Some(FeatureTargets {
            r_group: 1.0,
            m_section: 0.0,
            sg_section: 1.0,
        }));
        let run = g.generate(30);
        let s = dataset_stats(run.samples.iter().map(|s| (&s.structure, &s.table)));
        assert_eq!(s.prop_r, Some(1.0));
        assert_eq!(s.prop_m, Some(0.0));
        assert!(s.prop_sg.unwrap() > 0.9);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let err = Generator::new(GenConfig::default(), Vec::new(), Lexicon::default(), TemplateSet::builtin()).err().unwrap();
        assert!(matches!(err, DatagenError::EmptyCorpus));
    }

    #[test]
    fn raster_follows_canvas() {
        let g = generator(None);
        let s = g.sample(3).unwrap();
        let r = g.raster(&s);
        assert_eq!(r.image.dimensions(), (s.drawing.width as u32, s.drawing.height as u32));
        assert_eq!(r.cells, s.ocr_cells);
    }
}
