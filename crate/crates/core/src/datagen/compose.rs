//! Collates the backbone drawing and the rendered description.

use rand::Rng;

use super::config::RenderConfig;
use super::drawing::{Drawing, Element, Segment, TextRun};
use super::DatagenError;

const LINE_SPACING: f64 = 1.4;

/// Greedy word wrap; words longer than `width` stay whole on their own line.
pub fn wrap_text(text: &str, width: usize) -> Vec<String> {
    let mut lines: Vec<String> = Vec::new();
    let mut current = String::new();
    for word in text.split_whitespace() {
        if !current.is_empty() && current.chars().count() + 1 + word.chars().count() > width.max(1) {
            lines.push(std::mem::take(&mut current));
        }
        if !current.is_empty() {
            current.push(' ');
        }
        current.push_str(word);
    }
    if !current.is_empty() {
        lines.push(current);
    }
    lines
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Below,
    Beside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub drawing: Drawing,
    pub placement: Option<Placement>,
    /// Integer translations applied to the backbone and the text block.
    pub backbone_offset: (i32, i32),
    pub text_offset: (i32, i32),
}

/// Renders `description` as wrapped lines below or beside the backbone.
/// An empty description leaves the backbone untouched.
pub fn compose<R: Rng>(
    backbone: Drawing,
    description: &str,
    cfg: &RenderConfig,
    line_chars: usize,
    font_size: f64,
    rng: &mut R,
) -> Result<Composition, DatagenError> {
    let lines = wrap_text(description, line_chars);
    if lines.is_empty() {
        return Ok(Composition {
            drawing: backbone,
            placement: None,
            backbone_offset: (0, 0),
            text_offset: (0, 0),
        });
    }
    let placement = if rng.random_bool(cfg.p_description_beside) {
        Placement::Beside
    } else {
        Placement::Below
    };
    let step = (LINE_SPACING * font_size).round();
    let mut runs: Vec<TextRun> = lines
        .into_iter()
        .enumerate()
        .map(|(k, text)| TextRun {
            x: 0.0,
            y: (font_size + k as f64 * step).round(),
            size: font_size,
            segments: vec![Segment::normal(text)],
        })
        .collect();
    let block_w = runs.iter().map(TextRun::width).fold(0.0, f64::max).ceil();
    let block_h = runs.last().map_or(0.0, |r| r.y + 0.3 * font_size).ceil();
    let margin = cfg.margin.round();

    let (bw, bh) = (backbone.width, backbone.height);
    let (width, height, b_off, t_off) = match placement {
        Placement::Below => {
            let width = bw.max(block_w + 2.0 * margin);
            let b_dx = ((width - bw) / 2.0).floor();
            (width, bh + block_h + margin, (b_dx, 0.0), (margin, bh))
        }
        Placement::Beside => {
            let height = bh.max(block_h + 2.0 * margin);
            let b_dy = ((height - bh) / 2.0).floor();
            let t_dy = ((height - block_h) / 2.0).floor();
            (bw + block_w + margin, height, (0.0, b_dy), (bw, t_dy))
        }
    };
    if width > cfg.max_canvas || height > cfg.max_canvas {
        return Err(DatagenError::CanvasOverflow(format!(
            "{width:.0} x {height:.0} exceeds {}",
            cfg.max_canvas
        )));
    }
    let mut drawing = backbone;
    drawing.translate(b_off.0, b_off.1);
    for run in &mut runs {
        run.x += t_off.0;
        run.y += t_off.1;
    }
    drawing.elements.extend(runs.into_iter().map(Element::Text));
    drawing.width = width.ceil();
    drawing.height = height.ceil();
    Ok(Composition {
        drawing,
        placement: Some(placement),
        backbone_offset: (b_off.0 as i32, b_off.1 as i32),
        text_offset: (t_off.0 as i32, t_off.1 as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxsmiles::parse_cxsmiles;
    use crate::datagen::render::{render_backbone, DrawStyle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn backbone() -> Drawing {
        let ms = parse_cxsmiles("c1ccccc1* |$;;;;;;R1$|").unwrap();
        render_backbone(&ms, &DrawStyle::default(), &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
    }

    #[test]
    fn wraps_on_word_boundaries() {
        assert_eq!(wrap_text("aa bb cc", 5), vec!["aa bb", "cc"]);
        assert_eq!(wrap_text("  ", 5), Vec::<String>::new());
        assert_eq!(wrap_text("abcdefgh x", 3), vec!["abcdefgh", "x"]);
    }

    #[test]
    fn empty_description_is_identity() {
        let b = backbone();
        let c = compose(b.clone(), "", &RenderConfig::default(), 40, 14.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(c.drawing, b);
    }

    #[test]
    fn cells_are_translated_consistently() {
        let b = backbone();
        let before = b.cells();
        let text = "wherein R1 is methyl, ethyl, propyl, butyl, pentyl, hexyl, heptyl, octyl or nonyl.";
        for beside in [0.0, 1.0] {
            let cfg = RenderConfig {
                p_description_beside: beside,
                ..Default::default()
            };
            let c = compose(b.clone(), text, &cfg, 30, 14.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
            let after = c.drawing.cells();
            let (dx, dy) = c.backbone_offset;
            for (old, new) in before.iter().zip(&after) {
                assert_eq!(new, &old.translated(dx, dy));
            }
            let lines: Vec<&str> = after[before.len()..].iter().map(|c| c.text.as_str()).collect();
            assert_eq!(lines.join(" "), text);
            for cell in &after {
                assert!(cell.within(c.drawing.width as i32, c.drawing.height as i32), "{cell:?}");
            }
        }
    }

    #[test]
    fn overflow() {
        let cfg = RenderConfig {
            max_canvas: 100.0,
            ..Default::default()
        };
        let err = compose(backbone(), "some words here", &cfg, 30, 14.0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, DatagenError::CanvasOverflow(_)));
    }
}
