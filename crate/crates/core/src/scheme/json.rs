//! The on-disk scheme format. Scalars are decimal strings (`"3"`, `"-2/5"`),
//! field order is fixed, and optional fields are omitted when absent.

use std::fmt::Display;

use serde::{Deserialize, Serialize};

use super::{Component, Hyperplane, Point, SchemeConfig, SchemeError};
use crate::arith::Field;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeJson {
    pub n: u32,
    pub components: Vec<ComponentJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperplane: Option<Vec<String>>,
    /// Prescribed values, one per condition row, for interpolation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
}

/// One component. `support` is the point (empty for complexes);
/// `subspace_basis` holds the extra vectors of the component: subspace
/// directions, the jet direction, the second point of a line, or the
/// points of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    pub kind: String,
    #[serde(default)]
    pub support: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subspace_basis: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transverse: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<String>>>,
}

fn strings<E: Display>(v: &[E]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn many<E: Display>(vs: &[Vec<E>]) -> Vec<Vec<String>> {
    vs.iter().map(|v| strings(v)).collect()
}

fn points<E: Display + Clone>(ps: &[Point<E>]) -> Vec<Vec<String>> {
    ps.iter().map(|p| strings(p.coords())).collect()
}

impl ComponentJson {
    fn bare(kind: &str, support: Vec<String>) -> Self {
        Self {
            kind: kind.into(),
            support,
            subspace_basis: Vec::new(),
            plane: None,
            transverse: None,
            generators: None,
        }
    }

    pub fn from_component<E: Display + Clone>(c: &Component<E>) -> Self {
        let support = c.support().map(|p| strings(p.coords())).unwrap_or_default();
        let mut out = Self::bare(c.kind(), support);
        match c {
            Component::Simple { .. } | Component::Double { .. } => {}
            Component::DoubleInSubspace { directions, .. } => out.subspace_basis = many(directions),
            Component::Jet2 { direction, .. } => out.subspace_basis = vec![strings(direction)],
            Component::Line { through, .. } => out.subspace_basis = vec![strings(through.coords())],
            Component::Complex {
                generators,
                points: pts,
            } => {
                out.subspace_basis = points(pts);
                if !generators.is_empty() {
                    out.generators = Some(points(generators));
                }
            }
            Component::Ejected {
                plane,
                directions,
                transverse,
                ..
            } => {
                out.subspace_basis = many(directions);
                out.plane = Some(many(plane));
                out.transverse = Some(strings(transverse));
            }
        }
        out
    }

    pub fn to_component<F: Field>(&self, field: &F, n: u32, index: usize) -> Result<Component<F::Elem>, SchemeError> {
        let width = n as usize + 1;
        let invalid = |reason: String| SchemeError::Invalid { index, reason };
        let vector = |v: &[String]| -> Result<Vec<F::Elem>, SchemeError> {
            if v.len() != width {
                return Err(invalid(format!(
                    "vector of length {} in P^{n}, expected {width}",
                    v.len()
                )));
            }
            v.iter()
                .map(|s| field.parse(s).map_err(|e| invalid(e.to_string())))
                .collect()
        };
        let point = |v: &[String]| -> Result<Point<F::Elem>, SchemeError> {
            Point::new(field, vector(v)?).map_err(|e| invalid(e.to_string()))
        };
        let vectors =
            |vs: &[Vec<String>]| -> Result<Vec<Vec<F::Elem>>, SchemeError> { vs.iter().map(|v| vector(v)).collect() };
        let one_extra = |what: &str| -> Result<&Vec<String>, SchemeError> {
            match self.subspace_basis.as_slice() {
                [v] => Ok(v),
                other => Err(invalid(format!(
                    "{} needs exactly one {what} in subspace_basis, got {}",
                    self.kind,
                    other.len()
                ))),
            }
        };
        let no_extra = || -> Result<(), SchemeError> {
            if self.plane.is_some() || self.transverse.is_some() || self.generators.is_some() {
                return Err(invalid(format!("unexpected fields for kind {}", self.kind)));
            }
            Ok(())
        };
        let simple_like = || -> Result<(), SchemeError> {
            no_extra()?;
            if !self.subspace_basis.is_empty() {
                return Err(invalid(format!("{} takes no subspace_basis", self.kind)));
            }
            Ok(())
        };
        Ok(match self.kind.as_str() {
            "simple" => {
                simple_like()?;
                Component::Simple {
                    at: point(&self.support)?,
                }
            }
            "double" => {
                simple_like()?;
                Component::Double {
                    at: point(&self.support)?,
                }
            }
            "double_in_subspace" => {
                no_extra()?;
                Component::DoubleInSubspace {
                    at: point(&self.support)?,
                    directions: vectors(&self.subspace_basis)?,
                }
            }
            "jet2" => {
                no_extra()?;
                Component::Jet2 {
                    at: point(&self.support)?,
                    direction: vector(one_extra("direction")?)?,
                }
            }
            "line" => {
                no_extra()?;
                Component::Line {
                    at: point(&self.support)?,
                    through: point(one_extra("point")?)?,
                }
            }
            "complex" => {
                if self.plane.is_some() || self.transverse.is_some() {
                    return Err(invalid("unexpected fields for kind complex".into()));
                }
                if !self.support.is_empty() {
                    return Err(invalid("complex takes its points in subspace_basis".into()));
                }
                let generators = match &self.generators {
                    Some(g) => g.iter().map(|v| point(v)).collect::<Result<_, _>>()?,
                    None => Vec::new(),
                };
                Component::Complex {
                    generators,
                    points: self.subspace_basis.iter().map(|v| point(v)).collect::<Result<_, _>>()?,
                }
            }
            "ejected" => {
                if self.generators.is_some() {
                    return Err(invalid("unexpected generators for kind ejected".into()));
                }
                let plane = self
                    .plane
                    .as_ref()
                    .ok_or_else(|| invalid("ejected needs a plane".into()))?;
                let transverse = self
                    .transverse
                    .as_ref()
                    .ok_or_else(|| invalid("ejected needs a transverse direction".into()))?;
                Component::Ejected {
                    at: point(&self.support)?,
                    plane: vectors(plane)?,
                    directions: vectors(&self.subspace_basis)?,
                    transverse: vector(transverse)?,
                }
            }
            other => return Err(invalid(format!("unknown kind {other:?}"))),
        })
    }
}

impl SchemeJson {
    pub fn from_config<E: Display + Clone>(y: &SchemeConfig<E>) -> Self {
        Self {
            n: y.n,
            components: y.components.iter().map(ComponentJson::from_component).collect(),
            hyperplane: y.hyperplane.as_ref().map(|h| strings(h.coeffs())),
            values: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, SchemeError> {
        serde_json::from_str(text).map_err(|e| SchemeError::Json(e.to_string()))
    }

    /// Pretty-printed, with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Builds and validates the scheme, and parses `values` if present.
    #[allow(clippy::type_complexity)]
    pub fn to_config<F: Field>(&self, field: &F) -> Result<(SchemeConfig<F::Elem>, Option<Vec<F::Elem>>), SchemeError> {
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_component(field, self.n, i))
            .collect::<Result<Vec<_>, _>>()?;
        let hyperplane = match &self.hyperplane {
            None => None,
            Some(h) => {
                if h.len() != self.n as usize + 1 {
                    return Err(SchemeError::Arity {
                        expected: self.n as usize + 1,
                        got: h.len(),
                    });
                }
                let coeffs = h.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>, _>>()?;
                Some(Hyperplane::new(field, coeffs)?)
            }
        };
        let y = SchemeConfig {
            n: self.n,
            components,
            hyperplane,
        };
        y.validate(field)?;
        let values = match &self.values {
            None => None,
            Some(v) => Some(v.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>, _>>()?),
        };
        Ok((y, values))
    }
}
