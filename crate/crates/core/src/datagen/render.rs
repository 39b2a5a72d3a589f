//! Template-based 2D layout and backbone drawing.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::chemgraph::{hydrogen_counts, kekulize, BondOrder, MolecularGraph};
use crate::cxsmiles::MarkushStructure;
use crate::records::OcrCell;

use super::config::RenderConfig;
use super::drawing::{Drawing, Element, Segment, Shift, TextRun, FONT_FAMILIES};
use super::DatagenError;

/// Largest structure the layout accepts.
pub const MAX_LAYOUT_ATOMS: usize = 96;
const RELAX_ITERATIONS: usize = 60;
const MIN_SEPARATION: f64 = 0.55;

type Point = (f64, f64);

/// Drawing parameters of one image.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawStyle {
    pub font_index: usize,
    pub bond_length: f64,
    pub bond_width: f64,
    pub font_size: f64,
    pub subscript_indices: bool,
    pub explicit_carbon: bool,
    pub aromatic_circles: bool,
    pub atom_numbers: bool,
    /// Atoms whose label is wrapped in parentheses.
    pub parenthesized: Vec<usize>,
    pub margin: f64,
    pub max_canvas: f64,
}

impl Default for DrawStyle {
    fn default() -> Self {
        DrawStyle {
            font_index: 0,
            bond_length: 32.0,
            bond_width: 1.5,
            font_size: 14.0,
            subscript_indices: true,
            explicit_carbon: false,
            aromatic_circles: false,
            atom_numbers: false,
            parenthesized: Vec::new(),
            margin: 20.0,
            max_canvas: 4000.0,
        }
    }
}

fn uniform<R: Rng>(r: [f64; 2], rng: &mut R) -> f64 {
    if r[0] < r[1] {
        rng.random_range(r[0]..=r[1])
    } else {
        r[0]
    }
}

impl DrawStyle {
    pub fn sample<R: Rng>(cfg: &RenderConfig, rng: &mut R) -> DrawStyle {
        DrawStyle {
            font_index: rng.random_range(0..cfg.n_fonts.clamp(1, FONT_FAMILIES.len())),
            bond_length: uniform(cfg.bond_length, rng),
            bond_width: uniform(cfg.bond_width, rng),
            font_size: uniform(cfg.font_size, rng),
            subscript_indices: rng.random_bool(cfg.p_subscript),
            explicit_carbon: rng.random_bool(cfg.p_explicit_carbon),
            aromatic_circles: rng.random_bool(cfg.p_aromatic_circle),
            atom_numbers: rng.random_bool(cfg.p_atom_numbers),
            parenthesized: Vec::new(),
            margin: cfg.margin,
            max_canvas: cfg.max_canvas,
        }
    }

    pub fn font_family(&self) -> &'static str {
        FONT_FAMILIES[self.font_index % FONT_FAMILIES.len()]
    }
}

fn add(a: Point, b: Point) -> Point {
    (a.0 + b.0, a.1 + b.1)
}

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

fn scale(a: Point, s: f64) -> Point {
    (a.0 * s, a.1 * s)
}

fn norm(a: Point) -> f64 {
    a.0.hypot(a.1)
}

fn unit(a: Point) -> Point {
    let n = norm(a);
    if n < 1e-9 {
        (1.0, 0.0)
    } else {
        scale(a, 1.0 / n)
    }
}

fn polar(angle: f64) -> Point {
    (angle.cos(), angle.sin())
}

fn angle_of(a: Point) -> f64 {
    a.1.atan2(a.0)
}

fn centroid(points: impl IntoIterator<Item = Point>) -> Point {
    let (mut s, mut n) = ((0.0, 0.0), 0.0);
    for p in points {
        s = add(s, p);
        n += 1.0;
    }
    if n == 0.0 {
        s
    } else {
        scale(s, 1.0 / n)
    }
}

struct Layout<'a> {
    graph: &'a MolecularGraph,
    adj: Vec<Vec<usize>>,
    rings: Vec<Vec<usize>>,
    rings_of: Vec<Vec<usize>>,
    pos: Vec<Option<Point>>,
}

impl Layout<'_> {
    fn min_distance_to_placed(&self, p: Point, skip: &[usize]) -> f64 {
        self.pos
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .filter_map(|(_, q)| q.map(|q| norm(sub(p, q))))
            .fold(f64::INFINITY, f64::min)
    }

    fn crowding(&self, p: Point, skip: usize) -> f64 {
        self.pos
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .filter_map(|(_, q)| q.map(|q| 1.0 / norm(sub(p, q)).powi(2).max(1e-6)))
            .sum()
    }

    /// Places the unplaced atoms of a ring as a regular polygon with unit
    /// sides, built on a placed edge, a placed anchor atom or the origin.
    fn place_ring(&mut self, ring: usize, origin: Point) -> Vec<usize> {
        let atoms = self.rings[ring].clone();
        let n = atoms.len();
        let radius = 1.0 / (2.0 * (PI / n as f64).sin());
        let placed: Vec<usize> = (0..n).filter(|&k| self.pos[atoms[k]].is_some()).collect();
        let edge = placed
            .iter()
            .copied()
            .find(|&k| self.pos[atoms[(k + 1) % n]].is_some());
        let (center, start_k, start_angle, step) = if let Some(k) = edge {
            let p = self.pos[atoms[k]].expect("placed");
            let q = self.pos[atoms[(k + 1) % n]].expect("placed");
            let mid = scale(add(p, q), 0.5);
            let normal = unit((-(q.1 - p.1), q.0 - p.0));
            let apothem = radius * (PI / n as f64).cos();
            let skip = [atoms[k], atoms[(k + 1) % n]];
            let c1 = add(mid, scale(normal, apothem));
            let c2 = sub(mid, scale(normal, apothem));
            let center = if self.min_distance_to_placed(c1, &skip) >= self.min_distance_to_placed(c2, &skip) {
                c1
            } else {
                c2
            };
            let a0 = angle_of(sub(p, center));
            let a1 = angle_of(sub(q, center));
            let mut step = a1 - a0;
            while step > PI {
                step -= TAU;
            }
            while step < -PI {
                step += TAU;
            }
            let step = TAU / n as f64 * step.signum();
            (center, k, a0, step)
        } else if let Some(&k) = placed.first() {
            let a = atoms[k];
            let p = self.pos[a].expect("placed");
            let outside: Vec<Point> = self.adj[a].iter().filter_map(|&w| self.pos[w]).collect();
            let dir = if outside.is_empty() {
                (0.0, -1.0)
            } else {
                unit(sub(p, centroid(outside)))
            };
            let center = add(p, scale(dir, radius));
            (center, k, angle_of(scale(dir, -1.0)), TAU / n as f64)
        } else {
            let start = -PI / 2.0 - PI / n as f64;
            (origin, 0, start, TAU / n as f64)
        };
        let mut newly = Vec::new();
        for j in 0..n {
            let k = (start_k + j) % n;
            let atom = atoms[k];
            if self.pos[atom].is_none() {
                self.pos[atom] = Some(add(center, scale(polar(start_angle + step * j as f64), radius)));
                newly.push(atom);
            }
        }
        newly
    }

    fn neighbor_directions(&self, u: usize, count: usize, straight: bool) -> Vec<Point> {
        let pu = self.pos[u].expect("expanded atoms are placed");
        let taken: Vec<f64> = self.adj[u]
            .iter()
            .filter_map(|&w| self.pos[w].map(|p| angle_of(sub(p, pu))))
            .collect();
        match taken.len() {
            0 => (0..count)
                .map(|j| polar(-PI / 6.0 + TAU * j as f64 / count as f64))
                .collect(),
            1 if count == 1 && !straight => {
                let a = taken[0];
                let options = [polar(a + TAU / 3.0), polar(a - TAU / 3.0)];
                let score = |d: Point| self.crowding(add(pu, d), u);
                let best = if score(options[1]) < score(options[0]) - 1e-9 {
                    options[1]
                } else {
                    options[0]
                };
                vec![best]
            }
            _ => {
                let mut sorted = taken.clone();
                sorted.sort_by(f64::total_cmp);
                let mut best = (0.0, sorted[0]);
                for k in 0..sorted.len() {
                    let from = sorted[k];
                    let to = if k + 1 < sorted.len() { sorted[k + 1] } else { sorted[0] + TAU };
                    if to - from > best.0 + 1e-9 {
                        best = (to - from, from);
                    }
                }
                let (gap, from) = best;
                (0..count)
                    .map(|j| polar(from + gap * (j + 1) as f64 / (count + 1) as f64))
                    .collect()
            }
        }
    }

    fn expand(&mut self, start: usize, origin: Point) {
        let mut queue = std::collections::VecDeque::new();
        if self.pos[start].is_none() {
            self.pos[start] = Some(origin);
        }
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for ring in self.rings_of[u].clone() {
                if self.rings[ring].iter().any(|&a| self.pos[a].is_none()) {
                    let newly = self.place_ring(ring, origin);
                    queue.extend(newly);
                }
            }
            let pending: Vec<usize> = self.adj[u].iter().copied().filter(|&v| self.pos[v].is_none()).collect();
            if pending.is_empty() {
                continue;
            }
            let straight = pending.len() == 1
                && self.graph.bonds().iter().any(|b| {
                    b.contains(u) && (b.order == BondOrder::Triple)
                });
            let dirs = self.neighbor_directions(u, pending.len(), straight);
            let pu = self.pos[u].expect("placed");
            for (v, d) in pending.into_iter().zip(dirs) {
                self.pos[v] = Some(add(pu, d));
                queue.push_back(v);
            }
        }
    }

    fn relax(&mut self, atoms: &[usize]) {
        let bonded: BTreeSet<(usize, usize)> = self
            .graph
            .bonds()
            .iter()
            .map(|b| (b.a.min(b.b), b.a.max(b.b)))
            .collect();
        for _ in 0..RELAX_ITERATIONS {
            let mut moved = false;
            for (x, &i) in atoms.iter().enumerate() {
                for &j in &atoms[x + 1..] {
                    if bonded.contains(&(i.min(j), i.max(j))) {
                        continue;
                    }
                    let (pi, pj) = (self.pos[i].expect("placed"), self.pos[j].expect("placed"));
                    let d = norm(sub(pj, pi));
                    if d >= MIN_SEPARATION {
                        continue;
                    }
                    let dir = if d < 1e-6 {
                        polar(((i * 7 + j * 13) % 12) as f64 * TAU / 12.0)
                    } else {
                        scale(sub(pj, pi), 1.0 / d)
                    };
                    let push = (MIN_SEPARATION - d) / 2.0;
                    self.pos[i] = Some(sub(pi, scale(dir, push)));
                    self.pos[j] = Some(add(pj, scale(dir, push)));
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
    }
}

/// Coordinates in bond-length units. Components sit side by side; each
/// position-variation fragment is drawn from the centre of its ring.
pub fn layout(ms: &MarkushStructure) -> Vec<Point> {
    let g = &ms.graph;
    let n = g.n_atoms();
    let mut adj = vec![Vec::new(); n];
    for b in g.bonds() {
        adj[b.a].push(b.b);
        adj[b.b].push(b.a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let rings = g.rings();
    let mut rings_of = vec![Vec::new(); n];
    for (k, ring) in rings.iter().enumerate() {
        for &a in ring {
            rings_of[a].push(k);
        }
    }
    let mut lay = Layout {
        graph: g,
        adj,
        rings,
        rings_of,
        pos: vec![None; n],
    };

    let components = g.components();
    let endpoint_of: Vec<Option<usize>> = components
        .iter()
        .map(|comp| {
            ms.position_variations
                .iter()
                .position(|pv| comp.contains(&pv.endpoint_atom) && !pv.candidate_atoms.iter().any(|c| comp.contains(c)))
        })
        .collect();

    let mut cursor = 0.0;
    for (comp, pv) in components.iter().zip(&endpoint_of) {
        if pv.is_some() {
            continue;
        }
        let start = comp
            .iter()
            .copied()
            .find(|&a| !lay.rings_of[a].is_empty())
            .unwrap_or(comp[0]);
        lay.expand(start, (0.0, 0.0));
        for &a in comp {
            if lay.pos[a].is_none() {
                lay.expand(a, (0.0, 0.0));
            }
        }
        lay.relax(comp);
        let xs = comp.iter().map(|&a| lay.pos[a].expect("placed").0);
        let ys = comp.iter().map(|&a| lay.pos[a].expect("placed").1);
        let (min_x, max_x) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        let (min_y, max_y) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
        let shift = (cursor - min_x, -(min_y + max_y) / 2.0);
        for &a in comp {
            lay.pos[a] = lay.pos[a].map(|p| add(p, shift));
        }
        cursor += max_x - min_x + 2.0;
    }

    for (comp, pv) in components.iter().zip(&endpoint_of) {
        let Some(k) = *pv else { continue };
        let pv = &ms.position_variations[k];
        let ring_pts: Vec<Point> = pv.candidate_atoms.iter().filter_map(|&c| lay.pos[c]).collect();
        let center = centroid(ring_pts.iter().copied());
        let reach = ring_pts.iter().map(|&p| norm(sub(p, center))).fold(0.0, f64::max) + 1.0;
        let mut best = (f64::NEG_INFINITY, (0.0, -1.0));
        for j in 0..24 {
            let d = polar(-PI / 2.0 + TAU * j as f64 / 24.0);
            let score = lay.min_distance_to_placed(add(center, scale(d, reach)), &[]);
            if score > best.0 + 1e-9 {
                best = (score, d);
            }
        }
        let dir = best.1;
        let e = pv.endpoint_atom;
        lay.pos[e] = Some(center);
        let first: Vec<usize> = lay.adj[e].clone();
        for (j, &r) in first.iter().enumerate() {
            let d = polar(angle_of(dir) + 0.5 * j as f64);
            lay.pos[r] = Some(add(center, scale(d, reach)));
        }
        for &r in &first {
            lay.expand(r, add(center, scale(dir, reach)));
        }
        for &a in comp {
            if lay.pos[a].is_none() {
                lay.expand(a, add(center, scale(dir, reach + 1.0)));
            }
        }
    }
    lay.pos.into_iter().map(|p| p.unwrap_or((0.0, 0.0))).collect()
}

fn split_index(label: &str) -> (&str, &str) {
    let cut = label.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if cut == 0 {
        (label, "")
    } else {
        label.split_at(cut)
    }
}

fn charge_text(charge: i8) -> String {
    match charge {
        0 => String::new(),
        1 => "+".into(),
        -1 => "-".into(),
        c if c > 0 => format!("{c}+"),
        c => format!("{}-", -c),
    }
}

fn capitalized(element: &str) -> String {
    let mut c = element.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn script(text: String, style: &DrawStyle, shift: Shift) -> Segment {
    if style.subscript_indices {
        Segment::shifted(text, shift)
    } else {
        Segment::normal(text)
    }
}

/// Label segments of one atom, `None` when the atom is drawn as a bare vertex.
fn atom_label(ms: &MarkushStructure, atom: usize, hs: &[u8], style: &DrawStyle, endpoints: &[usize]) -> Option<Vec<Segment>> {
    let g = &ms.graph;
    let a = g.atom(atom);
    let mut segs = if let Some(label) = &a.variable_label {
        let (stem, index) = split_index(label);
        let mut s = vec![Segment::normal(stem)];
        if !index.is_empty() {
            s.push(script(index.to_string(), style, Shift::Sub));
        }
        s
    } else if a.is_wildcard() {
        if endpoints.contains(&atom) {
            return None;
        }
        vec![Segment::normal("*")]
    } else {
        let carbon = a.element == "C";
        let isolated = g.degree(atom) == 0;
        let show = !carbon || style.explicit_carbon || a.formal_charge != 0 || a.isotope.is_some() || isolated;
        if !show {
            return None;
        }
        let mut s = Vec::new();
        if let Some(iso) = a.isotope {
            s.push(script(iso.to_string(), style, Shift::Super));
        }
        s.push(Segment::normal(capitalized(&a.element)));
        let h = hs[atom];
        let with_h = !carbon || style.explicit_carbon || a.formal_charge != 0;
        if h > 0 && with_h {
            s.push(Segment::normal("H"));
            if h > 1 {
                s.push(script(h.to_string(), style, Shift::Sub));
            }
        }
        if a.formal_charge != 0 {
            s.push(script(charge_text(a.formal_charge), style, Shift::Super));
        }
        s
    };
    if style.parenthesized.contains(&atom) {
        segs.insert(0, Segment::normal("("));
        segs.push(Segment::normal(")"));
    }
    Some(segs)
}

fn label_run(segments: Vec<Segment>, at: Point, size: f64) -> TextRun {
    let mut run = TextRun {
        x: 0.0,
        y: at.1 + 0.35 * size,
        size,
        segments,
    };
    let lead = if run.segments[0].text == "(" && run.segments.len() > 1 {
        1.5
    } else {
        0.5
    };
    run.x = at.0 - lead * 0.6 * size;
    run
}

fn line(a: Point, b: Point, width: f64) -> Element {
    Element::Line {
        x1: a.0,
        y1: a.1,
        x2: b.0,
        y2: b.1,
        width,
    }
}

/// Draws the backbone as a vector scene in pixel coordinates, translated so
/// that every element lies inside the margins.
pub fn render_backbone<R: Rng>(ms: &MarkushStructure, style: &DrawStyle, rng: &mut R) -> Result<Drawing, DatagenError> {
    let g = &ms.graph;
    if g.n_atoms() > MAX_LAYOUT_ATOMS {
        return Err(DatagenError::LayoutOverflow(format!(
            "{} atoms exceed the layout limit of {MAX_LAYOUT_ATOMS}",
            g.n_atoms()
        )));
    }
    let rotation = rng.random_range(0..12) as f64 * TAU / 12.0;
    let (sin, cos) = rotation.sin_cos();
    let len = style.bond_length;
    let pts: Vec<Point> = layout(ms)
        .into_iter()
        .map(|(x, y)| ((x * cos - y * sin) * len, (x * sin + y * cos) * len))
        .collect();
    let hs = hydrogen_counts(g);
    let endpoints: Vec<usize> = ms.position_variations.iter().map(|p| p.endpoint_atom).collect();
    let labels: Vec<Option<Vec<Segment>>> = (0..g.n_atoms())
        .map(|i| atom_label(ms, i, &hs, style, &endpoints))
        .collect();

    let width = style.bond_width;
    let mut elements = Vec::new();
    let rings = g.rings();
    let ring_center = |a: usize, b: usize| {
        rings
            .iter()
            .filter(|r| r.contains(&a) && r.contains(&b))
            .min_by_key(|r| r.len())
            .map(|r| centroid(r.iter().map(|&i| pts[i])))
    };
    let circle_rings: Vec<&Vec<usize>> = if style.aromatic_circles {
        rings
            .iter()
            .filter(|r| {
                (0..r.len()).all(|k| {
                    g.bond_between(r[k], r[(k + 1) % r.len()])
                        .is_some_and(|b| g.bonds()[b].order == BondOrder::Aromatic)
                })
            })
            .collect()
    } else {
        Vec::new()
    };
    let kekule = if circle_rings.is_empty() { kekulize(g) } else { None };

    let shrink = |atom: usize| {
        if labels[atom].is_some() {
            (0.55 * style.font_size).min(0.4 * len)
        } else {
            0.0
        }
    };
    for (k, b) in g.bonds().iter().enumerate() {
        let (pa, pb) = (pts[b.a], pts[b.b]);
        let d = unit(sub(pb, pa));
        let blen = norm(sub(pb, pa));
        let (sa, sb) = (shrink(b.a).min(blen * 0.45), shrink(b.b).min(blen * 0.45));
        let a = add(pa, scale(d, sa));
        let e = sub(pb, scale(d, sb));
        let order = match b.order {
            BondOrder::Aromatic => kekule.as_ref().map_or(BondOrder::Single, |o| o[k]),
            o => o,
        };
        let perp = (-d.1, d.0);
        match order {
            BondOrder::Single | BondOrder::Aromatic => elements.push(line(a, e, width)),
            BondOrder::Double => match ring_center(b.a, b.b) {
                Some(c) => {
                    elements.push(line(a, e, width));
                    let mid = scale(add(pa, pb), 0.5);
                    let inward = if (c.0 - mid.0) * perp.0 + (c.1 - mid.1) * perp.1 >= 0.0 {
                        perp
                    } else {
                        scale(perp, -1.0)
                    };
                    let off = scale(inward, 0.18 * len);
                    let trim = scale(d, 0.15 * len);
                    elements.push(line(add(add(a, off), trim), sub(add(e, off), trim), width));
                }
                None => {
                    let off = scale(perp, 0.09 * len);
                    elements.push(line(add(a, off), add(e, off), width));
                    elements.push(line(sub(a, off), sub(e, off), width));
                }
            },
            BondOrder::Triple => {
                let off = scale(perp, 0.15 * len);
                elements.push(line(a, e, width));
                elements.push(line(add(a, off), add(e, off), width));
                elements.push(line(sub(a, off), sub(e, off), width));
            }
        }
    }
    for ring in &circle_rings {
        let c = centroid(ring.iter().map(|&i| pts[i]));
        let inradius = len / (2.0 * (PI / ring.len() as f64).tan());
        elements.push(Element::Circle {
            cx: c.0,
            cy: c.1,
            r: 0.6 * inradius,
            width,
        });
    }

    for fv in &ms.frequency_variations {
        let inside: BTreeSet<usize> = fv.atoms.iter().copied().collect();
        let external: Vec<(usize, usize)> = g
            .bonds()
            .iter()
            .filter_map(|b| match (inside.contains(&b.a), inside.contains(&b.b)) {
                (true, false) => Some((b.a, b.b)),
                (false, true) => Some((b.b, b.a)),
                _ => None,
            })
            .collect();
        let half = 0.3 * len;
        let hook = 0.1 * len;
        let mut crossings: Vec<(Point, Point)> = external
            .iter()
            .map(|&(i, o)| {
                let d = unit(sub(pts[o], pts[i]));
                (scale(add(pts[i], pts[o]), 0.5), d)
            })
            .collect();
        if crossings.is_empty() {
            let xs: Vec<f64> = fv.atoms.iter().map(|&a| pts[a].0).collect();
            let cy = centroid(fv.atoms.iter().map(|&a| pts[a])).1;
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min) - 0.5 * len;
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.5 * len;
            crossings = vec![((lo, cy), (-1.0, 0.0)), ((hi, cy), (1.0, 0.0))];
        }
        for &(m, d) in &crossings {
            let perp = (-d.1, d.0);
            let p1 = add(m, scale(perp, half));
            let p2 = sub(m, scale(perp, half));
            elements.push(line(sub(p1, scale(d, hook)), p1, width));
            elements.push(line(p1, p2, width));
            elements.push(line(p2, sub(p2, scale(d, hook)), width));
        }
        if !fv.label.is_empty() {
            let &(m, d) = crossings.last().expect("at least one bracket");
            let perp = (-d.1, d.0);
            let ends = [add(m, scale(perp, half)), sub(m, scale(perp, half))];
            let low = if ends[0].1 >= ends[1].1 { ends[0] } else { ends[1] };
            elements.push(Element::Text(TextRun {
                x: low.0 + 0.15 * style.font_size,
                y: low.1 + 0.6 * style.font_size,
                size: 0.85 * style.font_size,
                segments: vec![Segment::normal(fv.label.clone())],
            }));
        }
    }

    for (i, label) in labels.into_iter().enumerate() {
        if let Some(segs) = label {
            elements.push(Element::Text(label_run(segs, pts[i], style.font_size)));
        }
    }
    if style.atom_numbers {
        for (i, &p) in pts.iter().enumerate() {
            if endpoints.contains(&i) {
                continue;
            }
            elements.push(Element::Text(TextRun {
                x: p.0 + 0.45 * style.font_size,
                y: p.1 - 0.45 * style.font_size,
                size: 0.6 * style.font_size,
                segments: vec![Segment::normal((i + 1).to_string())],
            }));
        }
    }

    let mut drawing = Drawing {
        width: 0.0,
        height: 0.0,
        font_family: style.font_family().to_string(),
        elements,
    };
    fit_canvas(&mut drawing, style.margin);
    if drawing.width > style.max_canvas || drawing.height > style.max_canvas {
        return Err(DatagenError::LayoutOverflow(format!(
            "{:.0} x {:.0} canvas exceeds {}",
            drawing.width, drawing.height, style.max_canvas
        )));
    }
    Ok(drawing)
}

/// Moves the scene to integer coordinates inside `margin` and sets the canvas size.
pub(crate) fn fit_canvas(d: &mut Drawing, margin: f64) {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for e in &d.elements {
        let (a, b, c, dd) = e.extent();
        x0 = x0.min(a);
        y0 = y0.min(b);
        x1 = x1.max(c);
        y1 = y1.max(dd);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let dx = (margin - x0).round();
    let dy = (margin - y0).round();
    d.translate(dx, dy);
    d.width = (x1 - x0 + 2.0 * margin).ceil();
    d.height = (y1 - y0 + 2.0 * margin).ceil();
}

/// SVG document and one OCR cell per text element.
pub fn render_backbone_svg<R: Rng>(
    ms: &MarkushStructure,
    style: &DrawStyle,
    rng: &mut R,
) -> Result<(String, Vec<OcrCell>), DatagenError> {
    let d = render_backbone(ms, style, rng)?;
    Ok((d.to_svg(), d.cells()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxsmiles::parse_cxsmiles;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn draw(cx: &str, style: &DrawStyle, seed: u64) -> Drawing {
        let ms = parse_cxsmiles(cx).unwrap();
        render_backbone(&ms, style, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    fn texts(d: &Drawing) -> Vec<String> {
        d.cells().into_iter().map(|c| c.text).collect()
    }

    #[test]
    fn single_carbon() {
        let on = DrawStyle {
            explicit_carbon: true,
            ..Default::default()
        };
        let d = draw("C", &on, 0);
        assert_eq!(texts(&d), vec!["CH4"]);
        assert!(d.cells()[0].within(d.width as i32, d.height as i32));
        assert_eq!(texts(&draw("C", &DrawStyle::default(), 0)), vec!["C"]);
    }

    #[test]
    fn hexagon_has_unit_sides() {
        let ms = parse_cxsmiles("C1CCCCC1").unwrap();
        let p = layout(&ms);
        for k in 0..6 {
            let d = norm(sub(p[k], p[(k + 1) % 6]));
            assert!((d - 1.0).abs() < 1e-6, "{d}");
        }
    }

    #[test]
    fn fused_rings_share_an_edge() {
        let ms = parse_cxsmiles("c1ccc2ccccc2c1").unwrap();
        let p = layout(&ms);
        for b in ms.graph.bonds() {
            let d = norm(sub(p[b.a], p[b.b]));
            assert!((d - 1.0).abs() < 1e-6, "{d}");
        }
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                assert!(norm(sub(p[i], p[j])) > 0.9);
            }
        }
    }

    #[test]
    fn chains_zigzag() {
        let ms = parse_cxsmiles("CCCCCC").unwrap();
        let p = layout(&ms);
        for k in 0..4 {
            let d = norm(sub(p[k], p[k + 2]));
            assert!((d - 3f64.sqrt()).abs() < 1e-6);
        }
        assert!(norm(sub(p[0], p[3])) > 2.5);
    }

    #[test]
    fn variable_labels_are_cells() {
        let cx = "C*C(C)C*.c1ccccc1*.*[*] |$;X;;;;Y2;;;;;;;G1;;G2$,m:13:6.7.8.9.10.11,Sg:n:2.3:n:ht|";
        let ms = parse_cxsmiles(cx).unwrap();
        for seed in 0..5 {
            let d = draw(cx, &DrawStyle::default(), seed);
            let t = texts(&d);
            let labels: Vec<String> = ms.variable_groups().into_iter().map(|v| v.label).collect();
            assert_eq!(t.iter().filter(|x| labels.contains(x)).count(), labels.len());
            assert!(t.contains(&"n".to_string()));
            assert!(!t.contains(&"*".to_string()));
            for c in d.cells() {
                assert!(c.within(d.width as i32, d.height as i32), "{c:?}");
            }
        }
    }

    #[test]
    fn deterministic_svg() {
        let cx = "CC(=O)Oc1ccccc1C(=O)O";
        let style = DrawStyle {
            aromatic_circles: true,
            atom_numbers: true,
            ..Default::default()
        };
        assert_eq!(draw(cx, &style, 4).to_svg(), draw(cx, &style, 4).to_svg());
        assert!(draw(cx, &style, 4).to_svg().contains("<circle"));
    }

    #[test]
    fn heteroatom_labels() {
        let t = texts(&draw("OCC[NH3+]", &DrawStyle::default(), 0));
        assert!(t.contains(&"OH".to_string()));
        assert!(t.contains(&"NH3+".to_string()));
        let style = DrawStyle {
            parenthesized: vec![0],
            ..Default::default()
        };
        assert!(texts(&draw("OCC", &style, 0)).contains(&"(OH)".to_string()));
    }

    #[test]
    fn oversized_structure_overflows() {
        let big = "C".repeat(MAX_LAYOUT_ATOMS + 1);
        let ms = parse_cxsmiles(&big).unwrap();
        let err = render_backbone(&ms, &DrawStyle::default(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, DatagenError::LayoutOverflow(_)));
    }
}
