//! Vector scene shared by the SVG writer and the rasterizer.

use std::fmt::Write as _;

use image::{GrayImage, Luma};

use super::font::glyph;
use crate::records::OcrCell;

pub const FONT_FAMILIES: [&str; 4] = ["Helvetica", "Arial", "Times New Roman", "Courier New"];

/// Advance of one character as a fraction of the font size.
const ADVANCE: f64 = 0.6;
const CAP_HEIGHT: f64 = 0.7;
const SCRIPT_SCALE: f64 = 0.7;
const ASCENT: f64 = 0.8;
const DESCENT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    Normal,
    Sub,
    Super,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub text: String,
    pub shift: Shift,
}

impl Segment {
    pub fn normal(text: impl Into<String>) -> Self {
        Segment {
            text: text.into(),
            shift: Shift::Normal,
        }
    }

    pub fn shifted(text: impl Into<String>, shift: Shift) -> Self {
        Segment {
            text: text.into(),
            shift,
        }
    }

    fn scale(&self) -> f64 {
        if self.shift == Shift::Normal {
            1.0
        } else {
            SCRIPT_SCALE
        }
    }

    fn rise(&self, size: f64) -> f64 {
        match self.shift {
            Shift::Normal => 0.0,
            Shift::Sub => 0.25 * size,
            Shift::Super => -0.4 * size,
        }
    }
}

/// A run of text drawn from a left baseline point; one run is one OCR cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TextRun {
    pub x: f64,
    pub y: f64,
    pub size: f64,
    pub segments: Vec<Segment>,
}

impl TextRun {
    pub fn text(&self) -> String {
        self.segments.iter().map(|s| s.text.as_str()).collect()
    }

    pub fn width(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.text.chars().count() as f64 * ADVANCE * self.size * s.scale())
            .sum()
    }

    /// Integer pixel box `[x, y, w, h]` enclosing every glyph.
    pub fn bbox(&self) -> [i32; 4] {
        let x0 = self.x.floor();
        let y0 = (self.y - ASCENT * self.size).floor();
        let x1 = (self.x + self.width()).ceil().max(x0 + 1.0);
        let y1 = (self.y + DESCENT * self.size).ceil().max(y0 + 1.0);
        [x0 as i32, y0 as i32, (x1 - x0) as i32, (y1 - y0) as i32]
    }

    pub fn cell(&self) -> OcrCell {
        let [x, y, w, h] = self.bbox();
        OcrCell::new(self.text(), x, y, w, h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Line { x1: f64, y1: f64, x2: f64, y2: f64, width: f64 },
    Circle { cx: f64, cy: f64, r: f64, width: f64 },
    Text(TextRun),
}

impl Element {
    pub fn translate(&mut self, dx: f64, dy: f64) {
        match self {
            Element::Line { x1, y1, x2, y2, .. } => {
                *x1 += dx;
                *x2 += dx;
                *y1 += dy;
                *y2 += dy;
            }
            Element::Circle { cx, cy, .. } => {
                *cx += dx;
                *cy += dy;
            }
            Element::Text(t) => {
                t.x += dx;
                t.y += dy;
            }
        }
    }

    /// (min x, min y, max x, max y)
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        match self {
            Element::Line { x1, y1, x2, y2, width } => (
                x1.min(*x2) - width,
                y1.min(*y2) - width,
                x1.max(*x2) + width,
                y1.max(*y2) + width,
            ),
            Element::Circle { cx, cy, r, width } => (cx - r - width, cy - r - width, cx + r + width, cy + r + width),
            Element::Text(t) => {
                let [x, y, w, h] = t.bbox();
                (x as f64, y as f64, (x + w) as f64, (y + h) as f64)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Drawing {
    pub width: f64,
    pub height: f64,
    pub font_family: String,
    pub elements: Vec<Element>,
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

impl Drawing {
    pub fn texts(&self) -> impl Iterator<Item = &TextRun> {
        self.elements.iter().filter_map(|e| match e {
            Element::Text(t) => Some(t),
            _ => None,
        })
    }

    /// One OCR cell per text run, in drawing order.
    pub fn cells(&self) -> Vec<OcrCell> {
        self.texts().map(TextRun::cell).collect()
    }

    pub fn translate(&mut self, dx: f64, dy: f64) {
        for e in &mut self.elements {
            e.translate(dx, dy);
        }
    }

    /// SVG 1.1 document with one `<text>` element per text run.
    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let (w, h) = (num(self.width), num(self.height));
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(s, r#"<g stroke="black" stroke-linecap="round" fill="none">"#);
        for e in &self.elements {
            match e {
                Element::Line { x1, y1, x2, y2, width } => {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="{}"/>"#,
                        num(*x1),
                        num(*y1),
                        num(*x2),
                        num(*y2),
                        num(*width)
                    );
                }
                Element::Circle { cx, cy, r, width } => {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{}" cy="{}" r="{}" stroke-width="{}"/>"#,
                        num(*cx),
                        num(*cy),
                        num(*r),
                        num(*width)
                    );
                }
                Element::Text(_) => {}
            }
        }
        let _ = writeln!(s, "</g>");
        let family = escape_xml(&self.font_family);
        for t in self.texts() {
            let _ = write!(
                s,
                r#"<text x="{}" y="{}" font-family="{family}" font-size="{}" fill="black">"#,
                num(t.x),
                num(t.y),
                num(t.size)
            );
            for seg in &t.segments {
                match seg.shift {
                    Shift::Normal => s.push_str(&escape_xml(&seg.text)),
                    shift => {
                        let dir = if shift == Shift::Sub { "sub" } else { "super" };
                        let _ = write!(
                            s,
                            r#"<tspan baseline-shift="{dir}" font-size="{}">{}</tspan>"#,
                            num(t.size * SCRIPT_SCALE),
                            escape_xml(&seg.text)
                        );
                    }
                }
            }
            s.push_str("</text>\n");
        }
        s.push_str("</svg>\n");
        s
    }

    /// Grayscale bitmap at one pixel per drawing unit.
    pub fn rasterize(&self) -> GrayImage {
        let w = self.width.ceil().max(1.0) as u32;
        let h = self.height.ceil().max(1.0) as u32;
        let mut img = GrayImage::from_pixel(w, h, Luma([255]));
        for e in &self.elements {
            match e {
                Element::Line { x1, y1, x2, y2, width } => stroke(&mut img, (*x1, *y1), (*x2, *y2), *width),
                Element::Circle { cx, cy, r, width } => {
                    let n = ((r * 0.8).ceil() as usize).max(12);
                    let pts: Vec<(f64, f64)> = (0..=n)
                        .map(|k| {
                            let a = k as f64 / n as f64 * std::f64::consts::TAU;
                            (cx + r * a.cos(), cy + r * a.sin())
                        })
                        .collect();
                    for pair in pts.windows(2) {
                        stroke(&mut img, pair[0], pair[1], *width);
                    }
                }
                Element::Text(t) => draw_text(&mut img, t),
            }
        }
        img
    }
}

/// Text content of every `<text>` element, tags stripped and entities decoded.
pub fn svg_text_contents(svg: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = svg;
    while let Some(start) = rest.find("<text") {
        let after = &rest[start..];
        let Some(open_end) = after.find('>') else { break };
        let Some(close) = after.find("</text>") else { break };
        let inner = &after[open_end + 1..close];
        let mut text = String::new();
        let mut in_tag = false;
        for c in inner.chars() {
            match c {
                '<' => in_tag = true,
                '>' => in_tag = false,
                c if !in_tag => text.push(c),
                _ => {}
            }
        }
        out.push(
            text.replace("&lt;", "<")
                .replace("&gt;", ">")
                .replace("&quot;", "\"")
                .replace("&amp;", "&"),
        );
        rest = &after[close + 7..];
    }
    out
}

pub(crate) fn stroke(img: &mut GrayImage, a: (f64, f64), b: (f64, f64), width: f64) {
    let r = (width / 2.0).max(0.5);
    let (w, h) = (img.width() as i64, img.height() as i64);
    let x0 = ((a.0.min(b.0) - r).floor() as i64).max(0);
    let x1 = ((a.0.max(b.0) + r).ceil() as i64).min(w - 1);
    let y0 = ((a.1.min(b.1) - r).floor() as i64).max(0);
    let y1 = ((a.1.max(b.1) + r).ceil() as i64).min(h - 1);
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((px - a.0) * dx + (py - a.1) * dy) / len2).clamp(0.0, 1.0)
            };
            let (cx, cy) = (a.0 + t * dx - px, a.1 + t * dy - py);
            if cx * cx + cy * cy <= r * r {
                img.put_pixel(x as u32, y as u32, Luma([0]));
            }
        }
    }
}

fn draw_text(img: &mut GrayImage, t: &TextRun) {
    let mut x = t.x;
    for seg in &t.segments {
        let size = t.size * seg.scale();
        let baseline = t.y + seg.rise(t.size);
        let body = 0.45 * size;
        let cap = CAP_HEIGHT * size;
        let width = (size / 12.0).max(1.0);
        for c in seg.text.chars() {
            let left = x + (ADVANCE * size - body) / 2.0;
            for poly in glyph(c) {
                let pts: Vec<(f64, f64)> = poly
                    .iter()
                    .map(|&(gx, gy)| (left + gx * body, baseline - cap + gy * cap))
                    .collect();
                if pts.len() == 1 {
                    stroke(img, pts[0], pts[0], width);
                }
                for pair in pts.windows(2) {
                    stroke(img, pair[0], pair[1], width);
                }
            }
            x += ADVANCE * size;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(x: f64, y: f64) -> TextRun {
        TextRun {
            x,
            y,
            size: 10.0,
            segments: vec![Segment::normal("R"), Segment::shifted("1", Shift::Sub)],
        }
    }

    #[test]
    fn text_box_and_cell() {
        let t = run(10.0, 20.0);
        assert_eq!(t.text(), "R1");
        assert_eq!(t.bbox(), [10, 12, 11, 11]);
        assert_eq!(t.cell().text, "R1");
    }

    #[test]
    fn svg_has_one_text_element_per_run() {
        let d = Drawing {
            width: 50.0,
            height: 40.0,
            font_family: "Arial".into(),
            elements: vec![
                Element::Line {
                    x1: 0.0,
                    y1: 0.0,
                    x2: 10.0,
                    y2: 10.0,
                    width: 1.0,
                },
                Element::Text(run(5.0, 20.0)),
            ],
        };
        let svg = d.to_svg();
        assert_eq!(svg.matches("<text").count(), 1);
        assert!(svg.contains(r#"R<tspan baseline-shift="sub" font-size="7">1</tspan></text>"#));
        assert!(svg.starts_with("<svg"));
        assert_eq!(d.to_svg(), svg);
        assert_eq!(svg_text_contents(&svg), vec!["R1"]);
    }

    #[test]
    fn raster_marks_ink() {
        let d = Drawing {
            width: 30.0,
            height: 30.0,
            font_family: "Arial".into(),
            elements: vec![Element::Line {
                x1: 5.0,
                y1: 15.0,
                x2: 25.0,
                y2: 15.0,
                width: 2.0,
            }],
        };
        let img = d.rasterize();
        assert_eq!(img.get_pixel(15, 15)[0], 0);
        assert_eq!(img.get_pixel(15, 5)[0], 255);
        let t = Drawing {
            elements: vec![Element::Text(run(2.0, 20.0))],
            ..d
        };
        assert!(t.rasterize().pixels().any(|p| p[0] == 0));
    }
}
