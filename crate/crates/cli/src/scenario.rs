//! Scenario files: a chain, a module, named frames and an optional
//! tolerance override, all given at the top level of the chain.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use proframe_core::{
    AlgebraElement, BlockShape, ComplexMatrix, Frame, ModuleElement, ModuleMatrix, ModuleSpace, Multiplier,
    SeminormChain, C64, MEMBERSHIP_TOL,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `[re, im]`.
pub type ComplexSpec = [f64; 2];
/// Row-major square block.
pub type BlockSpec = Vec<Vec<ComplexSpec>>;
/// One block per summand of the top-level algebra.
pub type ElementSpec = Vec<BlockSpec>;
/// Coordinates of a module element.
pub type VectorSpec = Vec<ElementSpec>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    pub blocks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub levels: Vec<LevelSpec>,
    #[serde(default)]
    pub connecting: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Vec<Vec<ElementSpec>>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub algebra: ChainSpec,
    pub module: ModuleSpec,
    #[serde(default)]
    pub frames: BTreeMap<String, Vec<VectorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
}

/// A fully validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub chain: Arc<SeminormChain>,
    pub space: Arc<ModuleSpace>,
    pub frames: BTreeMap<String, Frame>,
    pub tolerance: Option<f64>,
}

impl Scenario {
    pub fn frame(&self, name: Option<&str>) -> Result<(&str, &Frame), CliError> {
        match name {
            Some(name) => self
                .frames
                .get_key_value(name)
                .map(|(k, f)| (k.as_str(), f))
                .ok_or_else(|| CliError::Usage(format!("no frame named {name:?}"))),
            None if self.frames.len() == 1 => {
                let (k, f) = self.frames.iter().next().expect("one frame");
                Ok((k.as_str(), f))
            }
            None => Err(CliError::Usage(format!(
                "scenario has {} frames; pick one with --frame",
                self.frames.len()
            ))),
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    let spec: ScenarioSpec = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    build_scenario(&spec)
}

pub fn build_scenario(spec: &ScenarioSpec) -> Result<Scenario, CliError> {
    let chain = Arc::new(build_chain(&spec.algebra)?);
    let space = Arc::new(build_space(&chain, &spec.module)?);
    let mut frames = BTreeMap::new();
    for (name, vectors) in &spec.frames {
        frames.insert(name.clone(), build_frame(&space, &format!("frames.{name}"), vectors)?);
    }
    let tolerance = spec.tolerances.as_ref().and_then(|t| t.tol);
    if let Some(tol) = tolerance {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::validation("tolerances.tol", "must be positive and finite"));
        }
    }
    Ok(Scenario { chain, space, frames, tolerance })
}

fn build_chain(spec: &ChainSpec) -> Result<SeminormChain, CliError> {
    if spec.levels.is_empty() {
        return Err(CliError::validation("algebra.levels", "at least one level is required"));
    }
    let shapes = spec
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            BlockShape::new(l.blocks.clone()).map_err(|e| CliError::validation(format!("algebra.levels[{i}].blocks"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SeminormChain::new(shapes, spec.connecting.clone()).map_err(|e| CliError::validation("algebra.connecting", e))
}

fn build_element(shape: &BlockShape, path: &str, spec: &ElementSpec) -> Result<AlgebraElement, CliError> {
    if spec.len() != shape.num_blocks() {
        return Err(CliError::validation(
            path,
            format!("expected {} blocks, got {}", shape.num_blocks(), spec.len()),
        ));
    }
    let mut blocks = Vec::with_capacity(spec.len());
    for (b, (rows, &n)) in spec.iter().zip(shape.blocks()).enumerate() {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CliError::validation(format!("{path}[{b}]"), format!("block must be {n}x{n}")));
        }
        blocks.push(ComplexMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])));
    }
    AlgebraElement::new(shape.clone(), blocks).map_err(|e| CliError::validation(path, e))
}

fn build_space(chain: &Arc<SeminormChain>, spec: &ModuleSpec) -> Result<ModuleSpace, CliError> {
    if spec.rank == 0 {
        return Err(CliError::validation("module.rank", "rank must be at least 1"));
    }
    let Some(rows) = &spec.projection else {
        return ModuleSpace::free(Arc::clone(chain), spec.rank).map_err(|e| CliError::validation("module", e));
    };
    let d = spec.rank;
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::validation("module.projection", format!("projection must be {d}x{d}")));
    }
    let shape = chain.top_shape();
    let mut entries = Vec::with_capacity(d * d);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            entries.push(build_element(shape, &format!("module.projection[{i}][{j}]"), e)?);
        }
    }
    let p = ModuleMatrix::new(d, d, shape.clone(), entries).map_err(|e| CliError::validation("module.projection", e))?;
    ModuleSpace::projective(Arc::clone(chain), p, MEMBERSHIP_TOL)
        .map_err(|e| CliError::validation("module.projection", e))
}

fn build_frame(space: &Arc<ModuleSpace>, path: &str, vectors: &[VectorSpec]) -> Result<Frame, CliError> {
    if vectors.is_empty() {
        return Err(CliError::validation(path, "a frame needs at least one vector"));
    }
    let shape = space.chain().top_shape();
    let mut multipliers = Vec::with_capacity(vectors.len());
    for (n, v) in vectors.iter().enumerate() {
        let vpath = format!("{path}[{n}]");
        if v.len() != space.rank() {
            return Err(CliError::validation(
                vpath,
                format!("expected {} coordinates, got {}", space.rank(), v.len()),
            ));
        }
        let coords = v
            .iter()
            .enumerate()
            .map(|(j, e)| build_element(shape, &format!("{vpath}[{j}]"), e))
            .collect::<Result<Vec<_>, _>>()?;
        let xi = ModuleElement::from_top(Arc::clone(space), coords).map_err(|e| CliError::validation(&vpath, e))?;
        multipliers.push(Multiplier::from_element(xi));
    }
    Frame::new(Arc::clone(space), multipliers).map_err(|e| CliError::validation(path, e))
}

pub fn element_spec(a: &AlgebraElement) -> ElementSpec {
    a.blocks()
        .iter()
        .map(|m| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
        .collect()
}

pub fn vector_spec(xi: &ModuleElement) -> VectorSpec {
    xi.coords().iter().map(|c| element_spec(c.top())).collect()
}

pub fn frame_spec(frame: &Frame) -> Vec<VectorSpec> {
    frame.multipliers().iter().map(|h| vector_spec(h.as_element())).collect()
}

pub fn matrix_spec(m: &ModuleMatrix) -> Vec<Vec<ElementSpec>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| element_spec(m.get(i, j))).collect()).collect()
}

pub fn chain_spec(chain: &SeminormChain) -> ChainSpec {
    ChainSpec {
        levels: chain.levels().iter().map(|s| LevelSpec { blocks: s.blocks().to_vec() }).collect(),
        connecting: chain.connecting().to_vec(),
    }
}
