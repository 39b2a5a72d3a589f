//! OCR-cell and raster augmentations.

use image::imageops::{self, FilterType};
use image::{GrayImage, Luma};
use rand::seq::IndexedRandom;
use rand::Rng;

use super::config::{ImageNoiseConfig, OcrNoiseConfig};
use super::drawing::stroke;
use crate::records::OcrCell;

const NOISE_CHARS: &[char] = &[
    'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J', 'K', 'L', 'M', 'N', 'O', 'P', 'Q', 'R', 'S', 'T', 'U', 'V', 'W',
    'X', 'Y', 'Z', 'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r', 's', 't',
    'u', 'v', 'w', 'x', 'y', 'z', '0', '1', '2', '3', '4', '5', '6', '7', '8', '9', '(', ')', '-', ',', '.',
];

/// Operations applied to one cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OcrOps {
    pub shift: bool,
    pub substitution: bool,
    pub insertion: bool,
    pub deletion: bool,
    pub transposition: bool,
    pub case: bool,
}

fn noise_char<R: Rng>(rng: &mut R) -> char {
    *NOISE_CHARS.choose(rng).expect("non-empty")
}

/// Same as [`augment_ocr_cells`], also reporting the operations applied to
/// each cell. An operation counts only when it changed something it could
/// act on (deletion keeps at least one character).
pub fn augment_ocr_cells_traced<R: Rng>(cells: &[OcrCell], cfg: &OcrNoiseConfig, rng: &mut R) -> (Vec<OcrCell>, Vec<OcrOps>) {
    let mut out = Vec::with_capacity(cells.len());
    let mut trace = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut ops = OcrOps::default();
        let mut cell = cell.clone();
        let mut chars: Vec<char> = cell.text.chars().collect();
        if rng.random_bool(cfg.p_shift) && cfg.max_shift_px > 0 {
            let m = cfg.max_shift_px;
            cell.bbox[0] += rng.random_range(-m..=m);
            cell.bbox[1] += rng.random_range(-m..=m);
            ops.shift = true;
        }
        if rng.random_bool(cfg.p_substitution) && !chars.is_empty() {
            let k = rng.random_range(0..chars.len());
            let old = chars[k];
            let mut c = noise_char(rng);
            while c == old {
                c = noise_char(rng);
            }
            chars[k] = c;
            ops.substitution = true;
        }
        if rng.random_bool(cfg.p_insertion) {
            let k = rng.random_range(0..=chars.len());
            chars.insert(k, noise_char(rng));
            ops.insertion = true;
        }
        if rng.random_bool(cfg.p_deletion) && chars.len() > 1 {
            let k = rng.random_range(0..chars.len());
            chars.remove(k);
            ops.deletion = true;
        }
        if rng.random_bool(cfg.p_transposition) && chars.len() > 1 {
            let k = rng.random_range(0..chars.len() - 1);
            chars.swap(k, k + 1);
            ops.transposition = true;
        }
        if rng.random_bool(cfg.p_case) {
            let cased: Vec<usize> = (0..chars.len()).filter(|&k| chars[k].is_alphabetic()).collect();
            if let Some(&k) = cased.choose(rng) {
                let c = chars[k];
                let flipped: Vec<char> = if c.is_uppercase() {
                    c.to_lowercase().collect()
                } else {
                    c.to_uppercase().collect()
                };
                if flipped.len() == 1 && flipped[0] != c {
                    chars[k] = flipped[0];
                    ops.case = true;
                }
            }
        }
        cell.text = chars.into_iter().collect();
        out.push(cell);
        trace.push(ops);
    }
    (out, trace)
}

/// Box shifts and character-level text noise, each per cell with its probability.
pub fn augment_ocr_cells<R: Rng>(cells: &[OcrCell], cfg: &OcrNoiseConfig, rng: &mut R) -> Vec<OcrCell> {
    augment_ocr_cells_traced(cells, cfg, rng).0
}

/// Record of the raster augmentations that fired.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImageOps {
    pub shift: Option<(i32, i32)>,
    pub scale: Option<f64>,
    pub downscale: Option<f64>,
    pub blur: Option<f32>,
    /// Patches as `[x, y, w, h]`.
    pub pepper: Vec<[u32; 4]>,
    pub lines: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedImage {
    pub image: GrayImage,
    pub cells: Vec<OcrCell>,
    pub ops: ImageOps,
}

fn shifted(img: &GrayImage, dx: i32, dy: i32) -> GrayImage {
    let (w, h) = img.dimensions();
    GrayImage::from_fn(w, h, |x, y| {
        let (sx, sy) = (x as i64 - dx as i64, y as i64 - dy as i64);
        if sx >= 0 && sy >= 0 && sx < w as i64 && sy < h as i64 {
            *img.get_pixel(sx as u32, sy as u32)
        } else {
            Luma([255])
        }
    })
}

fn scaled_cell(cell: &OcrCell, s: f64) -> OcrCell {
    let [x, y, w, h] = cell.bbox;
    let x0 = (x as f64 * s).floor();
    let y0 = (y as f64 * s).floor();
    let x1 = ((x + w) as f64 * s).ceil().max(x0 + 1.0);
    let y1 = ((y + h) as f64 * s).ceil().max(y0 + 1.0);
    OcrCell::new(cell.text.clone(), x0 as i32, y0 as i32, (x1 - x0) as i32, (y1 - y0) as i32)
}

fn range<R: Rng>(r: [f64; 2], rng: &mut R) -> f64 {
    if r[0] < r[1] {
        rng.random_range(r[0]..=r[1])
    } else {
        r[0]
    }
}

/// Darkens each pixel of the patch with probability `density`; returns the count.
pub fn pepper_patch<R: Rng>(img: &mut GrayImage, patch: [u32; 4], density: f64, rng: &mut R) -> usize {
    let [x0, y0, w, h] = patch;
    let mut n = 0;
    for y in y0..(y0 + h).min(img.height()) {
        for x in x0..(x0 + w).min(img.width()) {
            if rng.random_bool(density) {
                img.put_pixel(x, y, Luma([0]));
                n += 1;
            }
        }
    }
    n
}

/// Shift, scale, downscale, blur, pepper patches and random lines, in that
/// order. Shift and scale move the cell boxes with the content.
pub fn augment_image<R: Rng>(img: &GrayImage, cells: &[OcrCell], cfg: &ImageNoiseConfig, rng: &mut R) -> AugmentedImage {
    let mut out = img.clone();
    let mut cells = cells.to_vec();
    let mut ops = ImageOps::default();
    if rng.random_bool(cfg.p_shift) && cfg.max_shift_px > 0 {
        let m = cfg.max_shift_px;
        let (dx, dy) = (rng.random_range(-m..=m), rng.random_range(-m..=m));
        out = shifted(&out, dx, dy);
        cells = cells.iter().map(|c| c.translated(dx, dy)).collect();
        ops.shift = Some((dx, dy));
    }
    if rng.random_bool(cfg.p_scale) {
        let s = range(cfg.scale_range, rng);
        let (w, h) = out.dimensions();
        let nw = ((w as f64 * s).round() as u32).max(1);
        let nh = ((h as f64 * s).round() as u32).max(1);
        out = imageops::resize(&out, nw, nh, FilterType::Triangle);
        cells = cells.iter().map(|c| scaled_cell(c, s)).collect();
        ops.scale = Some(s);
    }
    if rng.random_bool(cfg.p_downscale) {
        let f = range(cfg.downscale_factor, rng);
        let (w, h) = out.dimensions();
        let small = imageops::resize(
            &out,
            ((w as f64 * f).round() as u32).max(1),
            ((h as f64 * f).round() as u32).max(1),
            FilterType::Triangle,
        );
        out = imageops::resize(&small, w, h, FilterType::Triangle);
        ops.downscale = Some(f);
    }
    if rng.random_bool(cfg.p_blur) {
        let sigma = range(cfg.blur_sigma, rng) as f32;
        out = imageops::blur(&out, sigma);
        ops.blur = Some(sigma);
    }
    if rng.random_bool(cfg.p_pepper) {
        let (w, h) = out.dimensions();
        for _ in 0..cfg.pepper_patches {
            let pw = rng.random_range((w / 10).max(1)..=(w / 4).max(1));
            let ph = rng.random_range((h / 10).max(1)..=(h / 4).max(1));
            let patch = [rng.random_range(0..=w - pw), rng.random_range(0..=h - ph), pw, ph];
            pepper_patch(&mut out, patch, cfg.pepper_density, rng);
            ops.pepper.push(patch);
        }
    }
    if rng.random_bool(cfg.p_lines) && cfg.max_lines > 0 {
        let (w, h) = (out.width() as f64, out.height() as f64);
        let n = rng.random_range(1..=cfg.max_lines);
        for _ in 0..n {
            let a = (rng.random_range(0.0..w), rng.random_range(0.0..h));
            let b = (rng.random_range(0.0..w), rng.random_range(0.0..h));
            stroke(&mut out, a, b, rng.random_range(1.0..2.5));
        }
        ops.lines = n;
    }
    AugmentedImage { image: out, cells, ops }
}
