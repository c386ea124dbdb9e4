//! File formats: the JSON chain dialect and the SVG boundary drawing.
//!
//! Floats are written in shortest round-trip form and keys in declaration
//! order, so equal inputs give byte-identical files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chain::{link_length, ChainParams, LinkSpec, CLOSURE_TOL};
use crate::domain::{balanced_hexagon, boundary_polyline, HexameralDomain};
use crate::error::{GeometryError, Result};
use crate::hyperlink::{HyperbolicIndex, LinkState};
use crate::optimize::{ReductionReport, SearchResult, SearchSpec};
use crate::sl2::{FrameMatrix, PlaneVector, ProjectiveTangent, TangentElement};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    /// `[alpha, beta, gamma, delta]`
    pub frame: [f64; 4],
    /// `[a, b, c]`
    pub tangent: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRecord {
    pub tau: f64,
    pub j: i64,
}

/// Result section of a written file: a five-link search or a link
/// reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResultSection {
    Search(SearchResult),
    Reduction(ReductionReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub initial: StateRecord,
    pub links: Vec<LinkRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<SearchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ResultSection>,
}

impl ChainFile {
    pub fn from_chain(chain: &ChainParams<f64>) -> Self {
        Self {
            initial: StateRecord {
                frame: chain.initial.frame.entries(),
                tangent: chain.initial.tangent.rep().components(),
            },
            links: chain
                .links
                .iter()
                .map(|l| LinkRecord {
                    tau: l.tau,
                    j: l.j.value() as i64,
                })
                .collect(),
            area: None,
            density: None,
            link_length: None,
            spec: None,
            result: None,
        }
    }

    /// Chain file of a domain with `area`, `density` and `link_length`.
    pub fn from_domain(domain: &HexameralDomain<f64>) -> Self {
        let mut f = Self::from_chain(domain.chain());
        f.area = Some(domain.area());
        f.density = Some(domain.density());
        f.link_length = link_length(domain.chain(), CLOSURE_TOL).ok();
        f
    }

    /// Validated chain. Frames with `|det - 1| > 1e-9`, tangents that are
    /// zero or not finite, and `tau` outside `[0, 1)` are rejected.
    pub fn to_chain(&self) -> Result<ChainParams<f64>> {
        let [al, be, ga, de] = self.initial.frame;
        let frame = FrameMatrix::new(al, be, ga, de)?;
        let [a, b, c] = self.initial.tangent;
        let tangent = ProjectiveTangent::new(TangentElement::new(a, b, c))?;
        let links = self
            .links
            .iter()
            .enumerate()
            .map(|(i, l)| {
                if !(l.tau.is_finite() && (0.0..1.0).contains(&l.tau)) {
                    return Err(GeometryError::InvalidInput(format!(
                        "link {i}: tau {} not in [0, 1)",
                        l.tau
                    )));
                }
                Ok(LinkSpec::new(l.tau, HyperbolicIndex::new(l.j)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainParams::new(LinkState::new(frame, tangent), links))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeometryError::InvalidInput(format!("chain file: {e}")))
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("chain files serialize");
        s.push('\n');
        s
    }
}

/// Parses and validates a chain file.
pub fn read_chain(text: &str) -> Result<ChainParams<f64>> {
    ChainFile::parse(text)?.to_chain()
}

pub fn write_chain(chain: &ChainParams<f64>) -> String {
    ChainFile::from_chain(chain).to_json()
}

/// SVG 1.1 drawing of the boundary, the six multi-point markers at the
/// initial state and the balanced hexagon there, scaled into a
/// 1000-unit square viewBox with a 5% margin (y pointing up).
pub fn svg_document(domain: &HexameralDomain<f64>, per_link: usize) -> Result<String> {
    const SIZE: f64 = 1000.0;
    const MARGIN: f64 = 0.05 * SIZE;
    let poly = boundary_polyline(domain, per_link)?;
    let initial = domain.chain().initial;
    let markers = *initial.multipoint().points();
    let hexagon = balanced_hexagon(&initial)?;

    let all = poly.points.iter().chain(&markers).chain(&hexagon);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let extent = (x1 - x0).max(y1 - y0);
    if !(extent.is_finite() && extent > 0.0) {
        return Err(GeometryError::InvalidInput("drawing has no extent".into()));
    }
    let scale = (SIZE - 2.0 * MARGIN) / extent;
    // centre the bounding box in the drawable square
    let ox = MARGIN + 0.5 * (SIZE - 2.0 * MARGIN - scale * (x1 - x0));
    let oy = MARGIN + 0.5 * (SIZE - 2.0 * MARGIN - scale * (y1 - y0));
    let map = |p: &PlaneVector<f64>| (ox + scale * (p.x - x0), SIZE - oy - scale * (p.y - y0));
    let points = |ps: &mut dyn Iterator<Item = &PlaneVector<f64>>| {
        ps.map(|p| {
            let (x, y) = map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect::<Vec<_>>()
        .join(" ")
    };

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n",
    );
    let _ = writeln!(s, "  <desc>area {} density {}</desc>", domain.area(), domain.density());
    let _ = writeln!(
        s,
        "  <polygon id=\"hexagon\" fill=\"none\" stroke=\"#888888\" stroke-width=\"2\" points=\"{}\"/>",
        points(&mut hexagon.iter())
    );
    let _ = writeln!(
        s,
        "  <polygon id=\"boundary\" fill=\"none\" stroke=\"#000000\" stroke-width=\"3\" points=\"{}\"/>",
        points(&mut poly.points.iter())
    );
    for (j, p) in markers.iter().enumerate() {
        let (x, y) = map(p);
        let _ = writeln!(
            s,
            "  <circle id=\"u{j}\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"8\" fill=\"#c03030\"/>"
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{octagon_chain, smoothed_octagon};

    #[test]
    fn chain_round_trip_is_exact() {
        let c = octagon_chain::<f64>();
        let text = write_chain(&c);
        assert_eq!(write_chain(&c), text);
        let back = read_chain(&text).unwrap();
        assert_eq!(back.taus(), c.taus());
        assert!(back.initial.frame.max_abs_diff(&c.initial.frame) < 1e-15);
        assert!(back.initial.tangent.distance(&c.initial.tangent).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unimodular_frames() {
        let mut f = ChainFile::from_chain(&octagon_chain());
        f.initial.frame = [1.0 + 2e-9, 0.0, 0.0, 1.0];
        assert!(matches!(f.to_chain(), Err(GeometryError::NotUnimodular { .. })));
        f.initial.frame = [1.0 + 5e-10, 0.0, 0.0, 1.0];
        assert!(f.to_chain().is_ok());
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(ChainFile::parse("{\"initial\":{}}").is_err());
        let mut f = ChainFile::from_chain(&octagon_chain());
        f.links[1].j = 3;
        assert!(f.to_chain().is_err());
        let mut f = ChainFile::from_chain(&octagon_chain());
        f.links[0].tau = 1.0;
        assert!(f.to_chain().is_err());
        let mut f = ChainFile::from_chain(&octagon_chain());
        f.initial.tangent = [0.0; 3];
        assert!(f.to_chain().is_err());
    }

    #[test]
    fn export_extras() {
        let f = ChainFile::from_domain(&smoothed_octagon());
        assert_eq!(f.link_length, Some(4));
        let text = f.to_json();
        assert!(text.contains("\"density\""));
        assert_eq!(ChainFile::parse(&text).unwrap(), f);
    }

    #[test]
    fn svg_fits_the_view_box() {
        let s = svg_document(&smoothed_octagon(), 16).unwrap();
        assert!(s.contains("viewBox=\"0 0 1000 1000\""));
        assert_eq!(s.matches("<circle").count(), 6);
        let coords: Vec<f64> = s
            .lines()
            .filter(|l| l.contains("<polygon") || l.contains("<circle"))
            .flat_map(|l| {
                l.split('"')
                    .skip(1)
                    .step_by(2)
                    .flat_map(|v| v.split([' ', ',']))
                    .filter_map(|t| t.parse::<f64>().ok())
                    .collect::<Vec<_>>()
            })
            .filter(|&v| v != 8.0 && v != 2.0 && v != 3.0)
            .collect();
        assert!(coords.len() > 100);
        assert!(coords.iter().all(|v| (49.999..=950.001).contains(v)), "{coords:?}");
        assert!(coords.iter().any(|&v| v < 50.01) && coords.iter().any(|&v| v > 949.99));
    }
}
