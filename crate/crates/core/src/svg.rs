//! SVG 1.1 output for sliced tilings.

use std::fmt::Write;

use crate::zigzag::PlanePoint;

#[derive(Clone, Debug, PartialEq)]
pub struct ScenePolyline {
    /// Length of the word of the tile, which picks the stroke hue.
    pub word_length: usize,
    pub word: String,
    pub face: i64,
    pub points: Vec<PlanePoint>,
}

/// Polylines in slice coordinates drawn inside a viewport
/// `[xmin, xmax, ymin, ymax]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvgScene {
    pub viewport: [f64; 4],
    /// Width of the image in pixels; the height follows the aspect ratio.
    pub width: f64,
    pub polylines: Vec<ScenePolyline>,
}

fn hue(word_length: usize) -> usize {
    (word_length * 67) % 360
}

impl SvgScene {
    pub fn new(viewport: [f64; 4], width: f64) -> Self {
        SvgScene {
            viewport,
            width,
            polylines: Vec::new(),
        }
    }

    fn height(&self) -> f64 {
        let [xmin, xmax, ymin, ymax] = self.viewport;
        self.width * (ymax - ymin) / (xmax - xmin)
    }

    /// Screen coordinates, with `y` pointing down.
    fn to_screen(&self, p: PlanePoint) -> (f64, f64) {
        let [xmin, xmax, ymin, ymax] = self.viewport;
        let sx = (p[0] - xmin) / (xmax - xmin) * self.width;
        let sy = (ymax - p[1]) / (ymax - ymin) * self.height();
        (sx, sy)
    }

    /// Render the scene. Polylines with non-finite points are dropped.
    pub fn render(&self) -> String {
        let (w, h) = (self.width, self.height());
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">"
        );
        let _ = writeln!(
            out,
            "<defs><clipPath id=\"view\"><rect x=\"0\" y=\"0\" width=\"{w:.3}\" height=\"{h:.3}\"/></clipPath></defs>"
        );
        out.push_str("<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str("<g clip-path=\"url(#view)\" fill=\"none\" stroke-width=\"1\" stroke-linejoin=\"round\">\n");
        for line in &self.polylines {
            if !line.points.iter().all(|p| p[0].is_finite() && p[1].is_finite()) {
                continue;
            }
            let points: Vec<String> = line
                .points
                .iter()
                .map(|&p| {
                    let (x, y) = self.to_screen(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(
                out,
                "<polyline class=\"len-{}\" data-word=\"{}\" data-face=\"{}\" stroke=\"hsl({},70%,40%)\" points=\"{}\"/>",
                line.word_length,
                line.word,
                line.face,
                hue(line.word_length),
                points.join(" ")
            );
        }
        out.push_str("</g>\n</svg>\n");
        out
    }
}
