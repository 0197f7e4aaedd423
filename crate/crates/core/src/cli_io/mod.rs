//! File formats, instance generation and SVG rendering used by the
//! command-line tool and the Python bindings.

pub mod generate;
pub mod svg;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::extension_solver::{ChordPath, Drawing, Solution, Verdict, Witness};
use crate::geometry_core::SimplePolygon;
use crate::instance_model::{Instance, InstanceError};
use crate::visibility::{common_visibility_of, visibility_polygon};

pub use generate::{generate, Family, GenError, GenSpec};
pub use svg::{render_svg, Highlight, SvgOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictTag {
    Yes,
    No,
}

/// The document `solve` writes and `verify` reads. A NO answer has no
/// chords and carries the witness instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawingDoc {
    pub chords: Vec<ChordPath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl DrawingDoc {
    pub fn from_solution(sol: &Solution) -> DrawingDoc {
        match &sol.verdict {
            Verdict::Yes(d) => DrawingDoc {
                chords: d.chords.clone(),
                verdict: Some(VerdictTag::Yes),
                witness: None,
            },
            Verdict::No(w) => DrawingDoc {
                chords: vec![],
                verdict: Some(VerdictTag::No),
                witness: Some(w.clone()),
            },
        }
    }

    pub fn drawing(&self) -> Drawing {
        Drawing {
            chords: self.chords.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("drawing serializes")
    }

    pub fn from_json(s: &str) -> Result<DrawingDoc, InstanceError> {
        parse_json(s)
    }
}

/// Parses JSON, reporting syntax and shape errors with line and column.
pub fn parse_json<T: DeserializeOwned>(s: &str) -> Result<T, InstanceError> {
    Ok(serde_json::from_str(s)?)
}

/// Pretty JSON for any serializable output record.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}

/// Visibility regions of both chord endpoints and their common pieces in
/// `poly`, as SVG highlights.
pub fn chord_visibility_highlights(inst: &Instance, poly: &SimplePolygon, edge: [usize; 2]) -> Vec<Highlight> {
    let mut out = Vec::new();
    let mut regions = Vec::new();
    for (k, fill) in [(0, "#2e86de"), (1, "#27ae60")] {
        if let Ok(r) = visibility_polygon(poly, inst.vertex_point(edge[k])) {
            out.push(Highlight {
                polygon: r.region.clone(),
                fill: fill.into(),
                label: format!("V({})", edge[k]),
            });
            regions.push(r);
        }
    }
    if let [a, b] = regions.as_slice() {
        for piece in common_visibility_of(poly, a, b) {
            out.push(Highlight {
                polygon: piece,
                fill: "#f39c12".into(),
                label: format!("V({}) ∩ V({})", edge[0], edge[1]),
            });
        }
    }
    out
}

/// SVG options for a solution: refinement layers, and for a NO answer the
/// witness chord with its endpoint visibility regions in the polygon the
/// solver stopped at.
pub fn solution_svg_options(inst: &Instance, sol: &Solution) -> SvgOptions {
    let layers = sol.state.log.iter().map(|r| (*r.after).clone()).collect();
    let (highlights, witness_edge) = match &sol.verdict {
        Verdict::Yes(_) => (vec![], None),
        Verdict::No(w) => (chord_visibility_highlights(inst, &sol.state.current, w.edge), Some(w.edge)),
    };
    SvgOptions {
        layers,
        highlights,
        witness_edge,
        width: None,
    }
}
