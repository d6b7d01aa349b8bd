//! Deterministic SVG rendering of point sets and construction trees.

use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::construction::{unflatten_top, Affine, ConstructionNode};
use crate::error::Result;
use crate::geometry::{PointSet, Rational};

const CANVAS: f64 = 800.0;
const PAD: f64 = 40.0;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Undo the top-level squash and draw three guide lines per internal node.
    pub unflattened: bool,
    /// Print point ids next to the glyphs.
    pub labels: bool,
}

fn f(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

struct Viewport {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Viewport {
    fn fit(coords: &[(f64, f64)]) -> Self {
        let (mut min_x, mut max_x, mut min_y, mut max_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in coords {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        if coords.is_empty() {
            (min_x, max_x, min_y, max_y) = (0.0, 1.0, 0.0, 1.0);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(f64::MIN_POSITIVE);
        let scale = (CANVAS - 2.0 * PAD) / span;
        // centre the shorter axis
        let extra_x = (span - (max_x - min_x)) / 2.0;
        let extra_y = (span - (max_y - min_y)) / 2.0;
        Viewport {
            min_x: min_x - extra_x,
            max_y: max_y + extra_y,
            scale,
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (PAD + (x - self.min_x) * self.scale, PAD + (self.max_y - y) * self.scale)
    }
}

/// Renders `s`; `node` is required for guide lines in unflattened mode.
pub fn render_svg(s: &PointSet, node: Option<&ConstructionNode>, opts: &RenderOptions) -> Result<String> {
    let (points, view_map) = match (opts.unflattened, node) {
        (true, Some(root)) => {
            let undo = Affine::flatten(&(Rational::from_integer(1.into()) / &root.flatten_factor));
            (unflatten_top(s, root)?, Some(undo))
        }
        _ => (s.clone(), None),
    };

    let mut guides = Vec::new();
    if let (Some(root), Some(undo)) = (node, &view_map) {
        root.walk(&mut |n| {
            if let Some(children) = n.children() {
                let (ox, oy) = undo.apply(&n.origin().0, &n.origin().1);
                for (i, child) in children.iter().enumerate() {
                    let (cx, cy) = undo.apply(&child.origin().0, &child.origin().1);
                    let removed = n.removed_subrays.contains(&(i as u8 + 1));
                    guides.push(((f(&ox), f(&oy)), (f(&cx), f(&cy)), removed));
                }
            }
        });
    }

    let coords: Vec<(f64, f64)> = points.points().iter().map(|p| (f(&p.x), f(&p.y))).collect();
    let mut extent = coords.clone();
    extent.extend(guides.iter().flat_map(|&(a, b, _)| [a, b]));
    let vp = Viewport::fit(&extent);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (a, b, removed) in &guides {
        let (x1, y1) = vp.map(*a);
        let (x2, y2) = vp.map(*b);
        let dash = if *removed { r#" stroke-dasharray="4 4""# } else { "" };
        writeln!(
            out,
            r##"<line class="ray" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#999" stroke-width="1"{dash}/>"##
        )
        .unwrap();
    }
    for (p, &c) in points.points().iter().zip(&coords) {
        let (cx, cy) = vp.map(c);
        writeln!(
            out,
            r#"<circle class="pt" cx="{cx:.3}" cy="{cy:.3}" r="3" fill="black"><title>{}</title></circle>"#,
            p.id
        )
        .unwrap();
        if opts.labels {
            writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-size="10">{}</text>"#,
                cx + 4.0,
                cy - 4.0,
                p.id
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
