//! Deterministic SVG pictures of rank-two arrangements.
//!
//! Geometry is computed with exact rationals; only the final pixel
//! coordinates are rounded, to six decimals, half to even.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dynkin::{DynkinDiagram, NodeSubset};
use crate::error::{FlopError, Result};
use crate::linalg::IntMatrix;
use crate::rational::{int, ratio};
use crate::restriction::{enhanced_arrangement, EnhancedArrangement, RestrictedClass};
use crate::wallcross::enumerate_chambers;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Axis-aligned box in `Θ_I` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub xmin: BigRational,
    pub xmax: BigRational,
    pub ymin: BigRational,
    pub ymax: BigRational,
}

impl Window {
    pub fn new(xmin: BigRational, xmax: BigRational, ymin: BigRational, ymax: BigRational) -> Result<Window> {
        if xmin >= xmax || ymin >= ymax {
            return Err(FlopError::InvalidInput("plot window is degenerate".into()));
        }
        Ok(Window { xmin, xmax, ymin, ymax })
    }

    pub fn square(lo: i64, hi: i64) -> Window {
        Window::new(int(lo), int(hi), int(lo), int(hi)).expect("lo < hi")
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin.clone(), self.ymin.clone()),
            Point::new(self.xmax.clone(), self.ymin.clone()),
            Point::new(self.xmax.clone(), self.ymax.clone()),
            Point::new(self.xmin.clone(), self.ymax.clone()),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct PlotSpec {
    pub window: Window,
    /// Output width and height in pixels.
    pub size: u32,
    pub stroke_scale: BigRational,
    pub labels: bool,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            window: Window::square(-2, 2),
            size: 480,
            stroke_scale: BigRational::one(),
            labels: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Point {
        Point { x, y }
    }
}

/// A clipped piece of the line `a x + b y = level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub normal: RestrictedClass,
    pub level: BigRational,
    pub ray: usize,
    pub from: Point,
    pub to: Point,
}

impl Segment {
    pub fn endpoints_on_line(&self) -> bool {
        let on =
            |p: &Point| &p.x * BigInt::from(self.normal.0[0]) + &p.y * BigInt::from(self.normal.0[1]) == self.level;
        on(&self.from) && on(&self.to)
    }
}

/// Decimal with `digits` fractional digits, rounded half to even.
pub fn format_decimal(r: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r * BigRational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = &scaled - BigRational::from_integer(floor.clone());
    let half = ratio(1, 2);
    let n = if frac > half || (frac == half && floor.is_odd()) {
        floor + 1
    } else {
        floor
    };
    let neg = n.is_negative();
    let (whole, rest) = n.abs().div_rem(&scale);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    let _ = write!(s, "{whole}");
    if digits > 0 {
        let _ = write!(s, ".{:0>width$}", rest.to_string(), width = digits);
    }
    s
}

/// Clips `a x + b y = c` to the window. `None` if the line misses it or only touches a corner.
pub fn clip_line(a: i64, b: i64, c: &BigRational, w: &Window) -> Option<(Point, Point)> {
    let (a_r, b_r) = (int(a), int(b));
    let mut pts: Vec<Point> = Vec::new();
    if !b_r.is_zero() {
        for x in [&w.xmin, &w.xmax] {
            let y = (c - &a_r * x) / &b_r;
            pts.push(Point::new(x.clone(), y));
        }
    }
    if !a_r.is_zero() {
        for y in [&w.ymin, &w.ymax] {
            let x = (c - &b_r * y) / &a_r;
            pts.push(Point::new(x, y.clone()));
        }
    }
    pts.retain(|p| w.contains(p));
    pts.sort();
    pts.dedup();
    if pts.len() < 2 {
        return None;
    }
    Some((pts[0].clone(), pts[pts.len() - 1].clone()))
}

fn require_rank(arr: &EnhancedArrangement, allowed: &[usize], what: &'static str, needed: &'static str) -> Result<()> {
    let rank = arr.coordinates.len();
    if allowed.contains(&rank) {
        Ok(())
    } else {
        Err(FlopError::UnsupportedRank { rank, needed, what })
    }
}

/// Lines of the finite arrangement inside the window.
pub fn finite_segments(arr: &EnhancedArrangement, w: &Window) -> Vec<Segment> {
    arr.rays
        .iter()
        .enumerate()
        .filter_map(|(k, ray)| {
            let (a, b) = (ray.primitive.0[0], ray.primitive.0[1]);
            clip_line(a, b, &BigRational::zero(), w).map(|(from, to)| Segment {
                normal: ray.primitive.clone(),
                level: BigRational::zero(),
                ray: k,
                from,
                to,
            })
        })
        .collect()
}

/// Levels `m/k` for every listed multiplicity `k`, as values of `β·θ` over the interval.
fn levels(mults: &[i64], lo: &BigRational, hi: &BigRational) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::new();
    for &k in mults {
        let kr = int(k);
        let first = (lo * &kr).ceil().to_integer();
        let last = (hi * &kr).floor().to_integer();
        let mut m = first;
        while m <= last {
            out.push(BigRational::new(m.clone(), BigInt::from(k)));
            m += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Lines `β·θ ∈ (1/k)ℤ` of the infinite arrangement inside the window.
pub fn infinite_segments(arr: &EnhancedArrangement, w: &Window) -> Vec<Segment> {
    let mut out = Vec::new();
    for (k, ray) in arr.rays.iter().enumerate() {
        let (a, b) = (ray.primitive.0[0], ray.primitive.0[1]);
        let values: Vec<BigRational> = w
            .corners()
            .iter()
            .map(|p| &p.x * BigInt::from(a) + &p.y * BigInt::from(b))
            .collect();
        let lo = values.iter().min().expect("four corners").clone();
        let hi = values.iter().max().expect("four corners").clone();
        for level in levels(&ray.multiplicities, &lo, &hi) {
            if let Some((from, to)) = clip_line(a, b, &level, w) {
                out.push(Segment {
                    normal: ray.primitive.clone(),
                    level,
                    ray: k,
                    from,
                    to,
                });
            }
        }
    }
    out
}

struct Canvas<'a> {
    spec: &'a PlotSpec,
    body: String,
}

impl<'a> Canvas<'a> {
    fn new(spec: &'a PlotSpec, title: &str) -> Canvas<'a> {
        let s = spec.size;
        let mut body = String::new();
        let _ = writeln!(body, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">"
        );
        let _ = writeln!(body, "<title>{}</title>", escape(title));
        let _ = writeln!(
            body,
            "<rect x=\"0\" y=\"0\" width=\"{s}\" height=\"{s}\" fill=\"white\"/>"
        );
        Canvas { spec, body }
    }

    fn px(&self, p: &Point) -> (String, String) {
        let w = &self.spec.window;
        let size = int(i64::from(self.spec.size));
        let x = (&p.x - &w.xmin) / (&w.xmax - &w.xmin) * &size;
        let y = (&w.ymax - &p.y) / (&w.ymax - &w.ymin) * &size;
        (format_decimal(&x, 6), format_decimal(&y, 6))
    }

    fn stroke(&self, base: i64, per: i64) -> String {
        format_decimal(&(&self.spec.stroke_scale * ratio(base, per)), 6)
    }

    fn line(&mut self, a: &Point, b: &Point, color: &str, width: &str, extra: &str) {
        let (x1, y1) = self.px(a);
        let (x2, y2) = self.px(b);
        let _ = writeln!(
            self.body,
            "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"{color}\" stroke-width=\"{width}\"{extra}/>"
        );
    }

    fn text(&mut self, p: &Point, dx: i32, dy: i32, color: &str, text: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(
            self.body,
            "<text x=\"{x}\" y=\"{y}\" dx=\"{dx}\" dy=\"{dy}\" fill=\"{color}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            escape(text)
        );
    }

    fn legend(&mut self, arr: &EnhancedArrangement) {
        if !self.spec.labels {
            return;
        }
        let _ = writeln!(self.body, "<g class=\"legend\">");
        for (k, ray) in arr.rays.iter().enumerate() {
            let mults: Vec<String> = ray.multiplicities.iter().map(i64::to_string).collect();
            let _ = writeln!(
                self.body,
                "<text x=\"6\" y=\"{}\" fill=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{} [{}]</text>",
                14 + 13 * k,
                PALETTE[k % PALETTE.len()],
                ray.primitive,
                mults.join(",")
            );
        }
        let _ = writeln!(self.body, "</g>");
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn title(arr: &EnhancedArrangement, what: &str) -> String {
    format!("{what} arrangement of {} with subset {}", arr.diagram, arr.subset)
}

fn draw_segments(c: &mut Canvas<'_>, segs: &[Segment], width: &str) {
    for s in segs {
        debug_assert!(s.endpoints_on_line());
        let color = PALETTE[s.ray % PALETTE.len()];
        let dash = if s.level.is_integer() {
            ""
        } else {
            " stroke-dasharray=\"4 3\""
        };
        c.line(&s.from, &s.to, color, width, dash);
    }
}

/// Lines through the origin, one per ray, with the top multiplicity written
/// beside rays that carry more than one.
pub fn render_finite(d: &DynkinDiagram, subset: &NodeSubset, spec: &PlotSpec) -> Result<String> {
    let arr = enhanced_arrangement(d, subset)?;
    require_rank(&arr, &[2], "finite arrangement plot", "exactly 2")?;
    render_finite_arrangement(&arr, spec)
}

pub fn render_finite_arrangement(arr: &EnhancedArrangement, spec: &PlotSpec) -> Result<String> {
    require_rank(arr, &[2], "finite arrangement plot", "exactly 2")?;
    let mut c = Canvas::new(spec, &title(arr, "finite"));
    let segs = finite_segments(arr, &spec.window);
    let width = c.stroke(2, 1);
    draw_segments(&mut c, &segs, &width);
    if spec.labels {
        for s in &segs {
            let top = arr.rays[s.ray].top_multiplicity();
            if top > 1 {
                c.text(&s.to, 4, 12, PALETTE[s.ray % PALETTE.len()], &top.to_string());
            }
        }
    }
    c.legend(arr);
    Ok(c.finish())
}

/// The translates `β·θ ∈ (1/k)ℤ`. Rank one is drawn as tick marks on a line.
pub fn render_infinite(d: &DynkinDiagram, subset: &NodeSubset, spec: &PlotSpec) -> Result<String> {
    let arr = enhanced_arrangement(d, subset)?;
    render_infinite_arrangement(&arr, spec)
}

pub fn render_infinite_arrangement(arr: &EnhancedArrangement, spec: &PlotSpec) -> Result<String> {
    require_rank(arr, &[1, 2], "infinite arrangement plot", "1 or 2")?;
    let mut c = Canvas::new(spec, &title(arr, "infinite"));
    let w = &spec.window;
    if arr.coordinates.len() == 1 {
        let mid = (&w.ymin + &w.ymax) / int(2);
        let axis_w = c.stroke(1, 1);
        c.line(
            &Point::new(w.xmin.clone(), mid.clone()),
            &Point::new(w.xmax.clone(), mid.clone()),
            "black",
            &axis_w,
            "",
        );
        let tick_h = (&w.ymax - &w.ymin) / int(20);
        let tick_w = c.stroke(3, 2);
        for (k, ray) in arr.rays.iter().enumerate() {
            let step = ray.primitive.0[0];
            // β = k·primitive; poles where k·primitive·θ ∈ ℤ, i.e. θ ∈ (1/(k·primitive))ℤ.
            let mults: Vec<i64> = ray.multiplicities.iter().map(|m| m * step).collect();
            for t in levels(&mults, &w.xmin, &w.xmax) {
                let color = PALETTE[k % PALETTE.len()];
                c.line(
                    &Point::new(t.clone(), &mid - &tick_h),
                    &Point::new(t.clone(), &mid + &tick_h),
                    color,
                    &tick_w,
                    "",
                );
                if spec.labels {
                    c.text(&Point::new(t.clone(), &mid - &tick_h), -6, 14, "black", &t.to_string());
                }
            }
        }
    } else {
        let segs = infinite_segments(arr, w);
        let width = c.stroke(1, 1);
        draw_segments(&mut c, &segs, &width);
    }
    c.legend(arr);
    Ok(c.finish())
}

/// Comparison maps of every chamber, in node coordinates.
pub fn fundamental_regions(d: &DynkinDiagram, subset: &NodeSubset, limit: usize) -> Result<Vec<IntMatrix>> {
    let rank = d.complement(subset).len();
    if rank != 2 {
        return Err(FlopError::UnsupportedRank {
            rank,
            needed: "exactly 2",
            what: "fundamental regions",
        });
    }
    let g = enumerate_chambers(d, subset, limit)?;
    Ok((0..g.len()).map(|c| g.comparison_map(c)).collect())
}

/// Image of the unit box under `n`, as its four corners.
pub fn region_polygon(n: &IntMatrix) -> [Point; 4] {
    let img = |x: i64, y: i64| {
        let v = n.apply(&[x, y]);
        Point::new(int(v[0]), int(v[1]))
    };
    [img(0, 0), img(1, 0), img(1, 1), img(0, 1)]
}

/// Indices of the regions whose open interior contains `p`.
pub fn regions_containing(regions: &[IntMatrix], p: &Point) -> Vec<usize> {
    regions
        .iter()
        .enumerate()
        .filter(|(_, n)| {
            let inv = n.inverse().expect("comparison maps are unimodular");
            let u = &p.x * BigInt::from(inv[(0, 0)]) + &p.y * BigInt::from(inv[(0, 1)]);
            let v = &p.x * BigInt::from(inv[(1, 0)]) + &p.y * BigInt::from(inv[(1, 1)]);
            let open = |t: &BigRational| t.is_positive() && *t < BigRational::one();
            open(&u) && open(&v)
        })
        .map(|(k, _)| k)
        .collect()
}

/// Sample points lying in the interiors of two or more regions.
pub fn tiling_overlaps(regions: &[IntMatrix], samples: &[Point]) -> Vec<(Point, Vec<usize>)> {
    samples
        .iter()
        .filter_map(|p| {
            let hits = regions_containing(regions, p);
            (hits.len() > 1).then(|| (p.clone(), hits))
        })
        .collect()
}

/// Unit-box images under every chamber's comparison map, over the infinite arrangement.
pub fn render_fundamental_regions(
    d: &DynkinDiagram,
    subset: &NodeSubset,
    spec: &PlotSpec,
    limit: usize,
) -> Result<String> {
    let regions = fundamental_regions(d, subset, limit)?;
    let arr = enhanced_arrangement(d, subset)?;
    let mut c = Canvas::new(
        spec,
        &format!("{} fundamental regions of {} with subset {}", regions.len(), d, subset),
    );
    for (k, n) in regions.iter().enumerate() {
        let pts: Vec<String> = region_polygon(n)
            .iter()
            .map(|p| {
                let (x, y) = c.px(p);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            c.body,
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"black\" stroke-width=\"{}\" data-chamber=\"{k}\"/>",
            pts.join(" "),
            PALETTE[k % PALETTE.len()],
            c.stroke(1, 2)
        );
    }
    let segs = infinite_segments(&arr, &spec.window);
    let width = c.stroke(1, 2);
    draw_segments(&mut c, &segs, &width);
    c.legend(&arr);
    Ok(c.finish())
}
