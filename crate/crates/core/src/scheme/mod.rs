//! Zero-dimensional schemes built from points, double points, partial
//! double points, tangent jets, lines and complexes, together with the
//! hyperplane operations (trace/residual, specialization, ejection,
//! extension) that drive the Horace reductions.

mod json;

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithError, Field};
use crate::combinatorics::ab_split;
use crate::rank::Matrix;

pub use json::{ComponentJson, SchemeJson};

/// Retries allowed when a random draw lands in a degenerate position.
pub const MAX_RETRIES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("zero vector is not a projective point")]
    ZeroPoint,
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("component {index}: {reason}")]
    Invalid { index: usize, reason: String },
    #[error("component {index} is neither contained in nor cleanly cut by the hyperplane: {reason}")]
    NotSplit { index: usize, reason: String },
    #[error("ejection direction lies in the hyperplane")]
    DirectionInHyperplane,
    #[error("cannot eject: {0}")]
    NotEjectable(String),
    #[error("degenerate random draw after {MAX_RETRIES} retries: {0}")]
    Degenerate(&'static str),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("json: {0}")]
    Json(String),
}

/// A projective point, scaled so that its first nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Point<E>(Vec<E>);

impl<E: Clone> Point<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, coords: Vec<E>) -> Result<Self, SchemeError> {
        let lead = coords
            .iter()
            .find(|c| !field.is_zero(c))
            .ok_or(SchemeError::ZeroPoint)?;
        let inv = field.inv(lead)?;
        Ok(Self(coords.iter().map(|c| field.mul(c, &inv)).collect()))
    }

    pub fn coords(&self) -> &[E] {
        &self.0
    }

    /// Ambient projective dimension.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }
}

/// A hyperplane `sum h_i x_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hyperplane<E> {
    coeffs: Vec<E>,
    /// index of the last nonzero coefficient; dropped in hyperplane coordinates
    pivot: usize,
}

impl<E: Clone> Hyperplane<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, coeffs: Vec<E>) -> Result<Self, SchemeError> {
        let pivot = coeffs
            .iter()
            .rposition(|c| !field.is_zero(c))
            .ok_or(SchemeError::ZeroPoint)?;
        Ok(Self { coeffs, pivot })
    }

    /// `x_n = 0` in `P^n`.
    pub fn coordinate<F: Field<Elem = E>>(field: &F, n: u32) -> Self {
        let mut coeffs = vec![field.zero(); n as usize + 1];
        coeffs[n as usize] = field.one();
        Self {
            coeffs,
            pivot: n as usize,
        }
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn eval<F: Field<Elem = E>>(&self, field: &F, v: &[E]) -> E {
        field.dot(&self.coeffs, v)
    }

    pub fn contains<F: Field<Elem = E>>(&self, field: &F, v: &[E]) -> bool {
        field.is_zero(&self.eval(field, v))
    }

    /// Coordinates of a vector of the hyperplane in the basis
    /// `e_i - (h_i / h_k) e_k`, `i != k`: the pivot coordinate is dropped.
    pub fn to_local(&self, v: &[E]) -> Vec<E> {
        v.iter()
            .enumerate()
            .filter(|&(i, _)| i != self.pivot)
            .map(|(_, x)| x.clone())
            .collect()
    }

    /// Inverse of [`Hyperplane::to_local`].
    pub fn from_local<F: Field<Elem = E>>(&self, field: &F, local: &[E]) -> Vec<E> {
        let mut v = Vec::with_capacity(local.len() + 1);
        v.extend_from_slice(&local[..self.pivot]);
        v.push(field.zero());
        v.extend_from_slice(&local[self.pivot..]);
        let rest = self.eval(field, &v);
        let hk = &self.coeffs[self.pivot];
        v[self.pivot] = field.neg(&field.div(&rest, hk).expect("pivot coefficient is nonzero"));
        v
    }

    /// Projects an arbitrary vector onto the hyperplane along `e_k`.
    pub fn project<F: Field<Elem = E>>(&self, field: &F, v: &[E]) -> Vec<E> {
        self.from_local(field, &self.to_local(v))
    }

    /// `n - 1` directions inside the hyperplane which, together with `at`,
    /// span it.
    pub fn complement_of<F: Field<Elem = E>>(&self, field: &F, at: &[E]) -> Vec<Vec<E>> {
        let local = self.to_local(at);
        let lead = local.iter().position(|c| !field.is_zero(c)).expect("point is nonzero");
        (0..local.len())
            .filter(|&i| i != lead)
            .map(|i| {
                let mut e = vec![field.zero(); local.len()];
                e[i] = field.one();
                self.from_local(field, &e)
            })
            .collect()
    }
}

/// One piece of a zero-dimensional (or, for lines, one-dimensional) scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component<E> {
    /// A reduced point.
    Simple { at: Point<E> },
    /// First infinitesimal neighbourhood of a point in the ambient space.
    Double { at: Point<E> },
    /// First infinitesimal neighbourhood of `at` inside the linear space
    /// spanned by `at` and `directions`.
    DoubleInSubspace { at: Point<E>, directions: Vec<Vec<E>> },
    /// A point with one tangent direction (degree 2).
    Jet2 { at: Point<E>, direction: Vec<E> },
    /// The line through `at` and `through`.
    Line { at: Point<E>, through: Point<E> },
    /// Points of a hyperplane cut out by the lines joining `generators`
    /// pairwise; `generators` may be empty once the complex lives in a trace.
    Complex {
        generators: Vec<Point<E>>,
        points: Vec<Point<E>>,
    },
    /// Flat limit of a point-in-subspace of the hyperplane with a double
    /// point approaching along `transverse`. `plane` spans the hyperplane
    /// together with `at`; `directions` span the original subspace.
    Ejected {
        at: Point<E>,
        plane: Vec<Vec<E>>,
        directions: Vec<Vec<E>>,
        transverse: Vec<E>,
    },
}

impl<E> Component<E> {
    pub fn kind(&self) -> &'static str {
        match self {
            Component::Simple { .. } => "simple",
            Component::Double { .. } => "double",
            Component::DoubleInSubspace { .. } => "double_in_subspace",
            Component::Jet2 { .. } => "jet2",
            Component::Line { .. } => "line",
            Component::Complex { .. } => "complex",
            Component::Ejected { .. } => "ejected",
        }
    }

    pub fn support(&self) -> Option<&Point<E>> {
        match self {
            Component::Simple { at }
            | Component::Double { at }
            | Component::DoubleInSubspace { at, .. }
            | Component::Jet2 { at, .. }
            | Component::Line { at, .. }
            | Component::Ejected { at, .. } => Some(at),
            Component::Complex { .. } => None,
        }
    }

    /// Length of the scheme in `P^n`; `None` for lines.
    pub fn degree(&self, n: u32) -> Option<u64> {
        let n = n as u64;
        Some(match self {
            Component::Simple { .. } => 1,
            Component::Double { .. } => n + 1,
            Component::DoubleInSubspace { directions, .. } => directions.len() as u64 + 1,
            Component::Jet2 { .. } => 2,
            Component::Line { .. } => return None,
            Component::Complex { points, .. } => points.len() as u64,
            Component::Ejected { directions, .. } => n + directions.len() as u64 + 2,
        })
    }

    /// Number of linear conditions imposed on forms of degree `d`.
    pub fn condition_count(&self, n: u32, d: u32) -> u64 {
        self.degree(n).unwrap_or(d as u64 + 1)
    }
}

/// A finite union of components in `P^n`, optionally with a distinguished
/// hyperplane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeConfig<E> {
    pub n: u32,
    pub components: Vec<Component<E>>,
    pub hyperplane: Option<Hyperplane<E>>,
}

impl<E: Clone> SchemeConfig<E> {
    pub fn empty(n: u32) -> Self {
        Self {
            n,
            components: Vec::new(),
            hyperplane: None,
        }
    }

    /// Total length, or `None` when a line is present.
    pub fn degree(&self) -> Option<u64> {
        self.components.iter().map(|c| c.degree(self.n)).sum()
    }

    pub fn condition_count(&self, d: u32) -> u64 {
        self.components.iter().map(|c| c.condition_count(self.n, d)).sum()
    }

    /// Component kinds with multiplicities, in a stable order.
    pub fn census(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.components {
            *out.entry(c.kind().to_string()).or_insert(0) += 1;
        }
        out
    }

    pub fn hyperplane_or_default<F: Field<Elem = E>>(&self, field: &F) -> Hyperplane<E> {
        self.hyperplane
            .clone()
            .unwrap_or_else(|| Hyperplane::coordinate(field, self.n))
    }

    /// Checks arities, direction independence and distinct supports.
    pub fn validate<F: Field<Elem = E>>(&self, field: &F) -> Result<(), SchemeError>
    where
        E: PartialEq,
    {
        let width = self.n as usize + 1;
        let invalid = |index: usize, reason: String| SchemeError::Invalid { index, reason };
        if let Some(h) = &self.hyperplane {
            if h.coeffs.len() != width {
                return Err(SchemeError::Arity {
                    expected: width,
                    got: h.coeffs.len(),
                });
            }
        }
        let mut supports: Vec<&Point<E>> = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            let mut vectors: Vec<&[E]> = Vec::new();
            match c {
                Component::Simple { at } | Component::Double { at } => vectors.push(at.coords()),
                Component::DoubleInSubspace { at, directions } => {
                    vectors.push(at.coords());
                    vectors.extend(directions.iter().map(Vec::as_slice));
                }
                Component::Jet2 { at, direction } => {
                    vectors.push(at.coords());
                    vectors.push(direction);
                }
                Component::Line { at, through } => {
                    vectors.push(at.coords());
                    vectors.push(through.coords());
                }
                Component::Complex { points, .. } => {
                    for (j, p) in points.iter().enumerate() {
                        if p.0.len() != width {
                            return Err(invalid(i, format!("complex point {j} has wrong arity")));
                        }
                        if points[..j].contains(p) {
                            return Err(invalid(i, format!("complex point {j} is repeated")));
                        }
                    }
                    continue;
                }
                Component::Ejected {
                    at,
                    plane,
                    directions,
                    transverse,
                } => {
                    if plane.len() + 1 != self.n as usize {
                        return Err(invalid(i, "plane must have n-1 directions".into()));
                    }
                    vectors.push(at.coords());
                    vectors.extend(plane.iter().map(Vec::as_slice));
                    vectors.push(transverse);
                    let mut in_plane: Vec<&[E]> = vec![at.coords()];
                    in_plane.extend(plane.iter().map(Vec::as_slice));
                    let r0 = rank_of(field, &in_plane);
                    in_plane.extend(directions.iter().map(Vec::as_slice));
                    if rank_of(field, &in_plane) != r0 {
                        return Err(invalid(i, "subspace directions must lie in the plane".into()));
                    }
                    let mut l: Vec<&[E]> = vec![at.coords()];
                    l.extend(directions.iter().map(Vec::as_slice));
                    if rank_of(field, &l) != l.len() {
                        return Err(invalid(i, "subspace directions are dependent".into()));
                    }
                }
            }
            if let Some(bad) = vectors.iter().find(|v| v.len() != width) {
                return Err(invalid(i, format!("vector of length {} in P^{}", bad.len(), self.n)));
            }
            if rank_of(field, &vectors) != vectors.len() {
                return Err(invalid(i, "spanning vectors are linearly dependent".into()));
            }
            if !matches!(c, Component::Line { .. }) {
                let at = c.support().expect("non-complex components have a support");
                if supports.contains(&at) {
                    return Err(invalid(i, "support coincides with an earlier component".into()));
                }
                supports.push(at);
            }
        }
        Ok(())
    }
}

/// Rank of a small family of vectors of equal length.
pub fn rank_of<F: Field>(field: &F, vectors: &[&[F::Elem]]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let rows = vectors.iter().map(|v| v.to_vec()).collect();
    Matrix::from_rows(field.clone(), first.len(), rows)
        .expect("equal lengths")
        .rank()
}

pub fn random_vector<F: Field, R: Rng + ?Sized>(field: &F, len: usize, rng: &mut R) -> Vec<F::Elem> {
    (0..len).map(|_| field.random(rng)).collect()
}

/// A uniformly random point of `P^n`.
pub fn random_point<F: Field, R: Rng + ?Sized>(field: &F, n: u32, rng: &mut R) -> Result<Point<F::Elem>, SchemeError> {
    for _ in 0..MAX_RETRIES {
        if let Ok(p) = Point::new(field, random_vector(field, n as usize + 1, rng)) {
            return Ok(p);
        }
    }
    Err(SchemeError::Degenerate("zero point"))
}

/// A random point of the hyperplane.
pub fn random_point_on<F: Field, R: Rng + ?Sized>(
    field: &F,
    h: &Hyperplane<F::Elem>,
    rng: &mut R,
) -> Result<Point<F::Elem>, SchemeError> {
    for _ in 0..MAX_RETRIES {
        let local = random_vector(field, h.coeffs.len() - 1, rng);
        if let Ok(p) = Point::new(field, h.from_local(field, &local)) {
            return Ok(p);
        }
    }
    Err(SchemeError::Degenerate("zero point on hyperplane"))
}

/// A random point off the hyperplane.
pub fn random_point_off<F: Field, R: Rng + ?Sized>(
    field: &F,
    h: &Hyperplane<F::Elem>,
    rng: &mut R,
) -> Result<Point<F::Elem>, SchemeError> {
    for _ in 0..MAX_RETRIES {
        let p = random_point(field, (h.coeffs.len() - 1) as u32, rng)?;
        if !h.contains(field, p.coords()) {
            return Ok(p);
        }
    }
    Err(SchemeError::Degenerate("point off hyperplane"))
}

/// `count` random vectors independent from `at` and each other.
fn random_directions<F: Field, R: Rng + ?Sized>(
    field: &F,
    at: &Point<F::Elem>,
    count: usize,
    within: Option<&Hyperplane<F::Elem>>,
    rng: &mut R,
) -> Result<Vec<Vec<F::Elem>>, SchemeError> {
    let width = at.0.len();
    for _ in 0..MAX_RETRIES {
        let dirs: Vec<Vec<F::Elem>> = (0..count)
            .map(|_| {
                let v = random_vector(field, width, rng);
                match within {
                    Some(h) => h.project(field, &v),
                    None => v,
                }
            })
            .collect();
        let mut all: Vec<&[F::Elem]> = vec![at.coords()];
        all.extend(dirs.iter().map(Vec::as_slice));
        if rank_of(field, &all) == count + 1 {
            return Ok(dirs);
        }
    }
    Err(SchemeError::Degenerate("dependent directions"))
}

fn fresh_support<F: Field, R: Rng + ?Sized>(
    field: &F,
    n: u32,
    taken: &[&Point<F::Elem>],
    on: Option<&Hyperplane<F::Elem>>,
    rng: &mut R,
) -> Result<Point<F::Elem>, SchemeError> {
    for _ in 0..MAX_RETRIES {
        let p = match on {
            Some(h) => random_point_on(field, h, rng)?,
            None => random_point(field, n, rng)?,
        };
        if !taken.contains(&&p) {
            return Ok(p);
        }
    }
    Err(SchemeError::Degenerate("coincident supports"))
}

/// Appends `count` double points at fresh random supports, in the
/// hyperplane when `on` is given.
pub fn push_doubles<F: Field, R: Rng + ?Sized>(
    field: &F,
    y: &mut SchemeConfig<F::Elem>,
    count: usize,
    on: Option<&Hyperplane<F::Elem>>,
    rng: &mut R,
) -> Result<(), SchemeError> {
    for _ in 0..count {
        let at = fresh_support(field, y.n, &supports(y), on, rng)?;
        y.components.push(Component::Double { at });
    }
    Ok(())
}

/// Appends `count` simple points, in the hyperplane when `on` is given.
pub fn push_simples<F: Field, R: Rng + ?Sized>(
    field: &F,
    y: &mut SchemeConfig<F::Elem>,
    count: usize,
    on: Option<&Hyperplane<F::Elem>>,
    rng: &mut R,
) -> Result<(), SchemeError> {
    for _ in 0..count {
        let at = fresh_support(field, y.n, &supports(y), on, rng)?;
        y.components.push(Component::Simple { at });
    }
    Ok(())
}

/// Appends `count` degree-2 jets supported in `h` with random directions
/// transverse to it.
pub fn push_transverse_jets<F: Field, R: Rng + ?Sized>(
    field: &F,
    y: &mut SchemeConfig<F::Elem>,
    count: usize,
    h: &Hyperplane<F::Elem>,
    rng: &mut R,
) -> Result<(), SchemeError> {
    for _ in 0..count {
        let at = fresh_support(field, y.n, &supports(y), Some(h), rng)?;
        let direction = (0..MAX_RETRIES)
            .map(|_| random_vector(field, y.n as usize + 1, rng))
            .find(|v| !h.contains(field, v) && rank_of(field, &[at.coords(), v]) == 2)
            .ok_or(SchemeError::Degenerate("transverse direction"))?;
        y.components.push(Component::Jet2 { at, direction });
    }
    Ok(())
}

/// Appends the first infinitesimal neighbourhood of a random point in a
/// random linear space of projective dimension `degree - 1` through it
/// (contained in `within` when given). Degree 1 gives a simple point.
pub fn push_partial_double<F: Field, R: Rng + ?Sized>(
    field: &F,
    y: &mut SchemeConfig<F::Elem>,
    degree: usize,
    on: Option<&Hyperplane<F::Elem>>,
    within: Option<&Hyperplane<F::Elem>>,
    rng: &mut R,
) -> Result<(), SchemeError> {
    if degree == 0 {
        return Ok(());
    }
    let at = fresh_support(field, y.n, &supports(y), on, rng)?;
    if degree == 1 {
        y.components.push(Component::Simple { at });
        return Ok(());
    }
    let directions = random_directions(field, &at, degree - 1, within, rng)?;
    y.components.push(Component::DoubleInSubspace { at, directions });
    Ok(())
}

fn supports<E>(y: &SchemeConfig<E>) -> Vec<&Point<E>> {
    y.components.iter().filter_map(Component::support).collect()
}

/// `r` double points at random positions of `P^n`.
pub fn random_doubles<F: Field, R: Rng + ?Sized>(
    field: &F,
    n: u32,
    r: usize,
    rng: &mut R,
) -> Result<SchemeConfig<F::Elem>, SchemeError> {
    let mut y = SchemeConfig::empty(n);
    push_doubles(field, &mut y, r, None, rng)?;
    Ok(y)
}

/// The model scheme of degree `C(n+d, d)`: `A_{n,d}` double points and,
/// when `B_{n,d} > 0`, the double point of a further point `y` inside a
/// random linear space of dimension `B_{n,d} - 1` through `y`.
pub fn build_ynd<F: Field, R: Rng + ?Sized>(
    field: &F,
    n: u32,
    d: u32,
    rng: &mut R,
) -> Result<SchemeConfig<F::Elem>, SchemeError> {
    let split = ab_split(n, d);
    let mut y = random_doubles(field, n, split.a as usize, rng)?;
    push_partial_double(field, &mut y, split.b as usize, None, None, rng)?;
    Ok(y)
}

/// The lines joining the given supports pairwise, in lexicographic order
/// of index pairs.
pub fn lines_joining<E: Clone>(points: &[Point<E>]) -> Vec<Component<E>> {
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            out.push(Component::Line {
                at: points[i].clone(),
                through: points[j].clone(),
            });
        }
    }
    out
}

/// Scheme-theoretic union with a union of lines. At the level of
/// conditions this concatenates rows; dependencies are left to the rank
/// computation.
pub fn extend<E: Clone>(y: &SchemeConfig<E>, z: &SchemeConfig<E>) -> Result<SchemeConfig<E>, SchemeError> {
    if y.n != z.n {
        return Err(SchemeError::Usage(format!(
            "cannot extend a scheme of P^{} by one of P^{}",
            y.n, z.n
        )));
    }
    if let Some(i) = z.components.iter().position(|c| !matches!(c, Component::Line { .. })) {
        return Err(SchemeError::Invalid {
            index: i,
            reason: "extension expects line components".into(),
        });
    }
    let mut out = y.clone();
    out.components.extend(z.components.iter().cloned());
    Ok(out)
}

/// Builds an `s`-complex: the intersections with `h` of the lines joining
/// `s + 2` random points off `h`. `s = -1` gives `None`.
pub fn make_complex<F: Field, R: Rng + ?Sized>(
    field: &F,
    n: u32,
    s: i64,
    h: &Hyperplane<F::Elem>,
    rng: &mut R,
) -> Result<Option<Component<F::Elem>>, SchemeError> {
    if s == -1 {
        return Ok(None);
    }
    if s < -1 || s > n as i64 - 1 {
        return Err(SchemeError::Usage(format!("complex needs -1 <= s <= n-1, got s = {s}")));
    }
    let count = (s + 2) as usize;
    'retry: for _ in 0..MAX_RETRIES {
        let generators: Vec<Point<F::Elem>> = (0..count)
            .map(|_| random_point_off(field, h, rng))
            .collect::<Result<_, _>>()?;
        let refs: Vec<&[F::Elem]> = generators.iter().map(|p| p.coords()).collect();
        if rank_of(field, &refs) != count {
            continue;
        }
        let mut points = Vec::with_capacity(count * (count - 1) / 2);
        for i in 0..count {
            for j in i + 1..count {
                let (p, q) = (generators[i].coords(), generators[j].coords());
                let (hp, hq) = (h.eval(field, p), h.eval(field, q));
                let x: Vec<F::Elem> = p
                    .iter()
                    .zip(q)
                    .map(|(a, b)| field.sub(&field.mul(&hq, a), &field.mul(&hp, b)))
                    .collect();
                let Ok(x) = Point::new(field, x) else {
                    continue 'retry;
                };
                if points.contains(&x) {
                    continue 'retry;
                }
                points.push(x);
            }
        }
        let refs: Vec<&[F::Elem]> = points.iter().map(|p| p.coords()).collect();
        if rank_of(field, &refs) != (s + 1) as usize {
            continue;
        }
        return Ok(Some(Component::Complex { generators, points }));
    }
    Err(SchemeError::Degenerate("complex generators"))
}

/// Moves the supports of the listed components to random points of `h`.
pub fn specialize_into_h<F: Field, R: Rng + ?Sized>(
    field: &F,
    y: &SchemeConfig<F::Elem>,
    which: &[usize],
    h: &Hyperplane<F::Elem>,
    rng: &mut R,
) -> Result<SchemeConfig<F::Elem>, SchemeError> {
    let mut out = y.clone();
    out.hyperplane = Some(h.clone());
    for &i in which {
        if i >= out.components.len() {
            return Err(SchemeError::Usage(format!(
                "component index {i} out of range ({} components)",
                out.components.len()
            )));
        }
        let mut placed = false;
        for _ in 0..MAX_RETRIES {
            let taken: Vec<&Point<F::Elem>> = out
                .components
                .iter()
                .enumerate()
                .filter(|&(j, c)| j != i && !matches!(c, Component::Line { .. }))
                .filter_map(|(_, c)| c.support())
                .collect();
            let at = fresh_support(field, out.n, &taken, Some(h), rng)?;
            let independent = match &out.components[i] {
                Component::DoubleInSubspace { directions, .. } => {
                    let mut v: Vec<&[F::Elem]> = vec![at.coords()];
                    v.extend(directions.iter().map(Vec::as_slice));
                    rank_of(field, &v) == v.len()
                }
                Component::Jet2 { direction, .. } => rank_of(field, &[at.coords(), direction]) == 2,
                Component::Line { through, .. } => rank_of(field, &[at.coords(), through.coords()]) == 2,
                _ => true,
            };
            if !independent {
                continue;
            }
            match &mut out.components[i] {
                Component::Simple { at: a }
                | Component::Double { at: a }
                | Component::DoubleInSubspace { at: a, .. }
                | Component::Jet2 { at: a, .. }
                | Component::Line { at: a, .. } => *a = at,
                Component::Complex { .. } | Component::Ejected { .. } => {
                    return Err(SchemeError::Invalid {
                        index: i,
                        reason: "complexes and ejected components cannot be moved".into(),
                    })
                }
            }
            placed = true;
            break;
        }
        if !placed {
            return Err(SchemeError::Degenerate("specialized support"));
        }
    }
    Ok(out)
}

/// Replaces `x` (a point or a point-in-subspace lying in `h`) together
/// with a double point approaching along `direction` by their flat limit.
pub fn eject<F: Field>(
    field: &F,
    x: &Component<F::Elem>,
    h: &Hyperplane<F::Elem>,
    direction: &[F::Elem],
) -> Result<Component<F::Elem>, SchemeError> {
    if h.contains(field, direction) {
        return Err(SchemeError::DirectionInHyperplane);
    }
    let (at, directions) = match x {
        Component::Simple { at } => (at, Vec::new()),
        Component::DoubleInSubspace { at, directions } => (at, directions.clone()),
        other => {
            return Err(SchemeError::NotEjectable(format!(
                "{} components cannot be ejected",
                other.kind()
            )))
        }
    };
    if !h.contains(field, at.coords()) {
        return Err(SchemeError::NotEjectable("support is off the hyperplane".into()));
    }
    if directions.iter().any(|v| !h.contains(field, v)) {
        return Err(SchemeError::NotEjectable(
            "subspace is not contained in the hyperplane".into(),
        ));
    }
    Ok(Component::Ejected {
        at: at.clone(),
        plane: h.complement_of(field, at.coords()),
        directions,
        transverse: direction.to_vec(),
    })
}

/// Trace on a hyperplane (a scheme of `P^{n-1}` in hyperplane coordinates)
/// and residual (a scheme of `P^n`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceResidualPair<E> {
    pub trace: SchemeConfig<E>,
    pub residual: SchemeConfig<E>,
}

pub fn trace_residual<F: Field>(
    field: &F,
    y: &SchemeConfig<F::Elem>,
    h: &Hyperplane<F::Elem>,
) -> Result<TraceResidualPair<F::Elem>, SchemeError> {
    if y.n == 0 {
        return Err(SchemeError::Usage("P^0 has no hyperplanes".into()));
    }
    let mut trace = SchemeConfig::empty(y.n - 1);
    let mut residual = SchemeConfig::empty(y.n);
    residual.hyperplane = Some(h.clone());
    let local = |p: &Point<F::Elem>| Point::new(field, h.to_local(p.coords()));
    let on = |v: &[F::Elem]| h.contains(field, v);

    for (index, c) in y.components.iter().enumerate() {
        let not_split = |reason: &str| SchemeError::NotSplit {
            index,
            reason: reason.into(),
        };
        if let Some(at) = c.support() {
            if !on(at.coords()) && !matches!(c, Component::Line { .. }) {
                residual.components.push(c.clone());
                continue;
            }
        }
        match c {
            Component::Simple { at } => trace.components.push(Component::Simple { at: local(at)? }),
            Component::Double { at } => {
                trace.components.push(Component::Double { at: local(at)? });
                residual.components.push(Component::Simple { at: at.clone() });
            }
            Component::DoubleInSubspace { at, directions } => match directions.iter().position(|v| !on(v)) {
                None => trace.components.push(Component::DoubleInSubspace {
                    at: local(at)?,
                    directions: directions.iter().map(|v| h.to_local(v)).collect(),
                }),
                Some(j) => {
                    let hj = h.eval(field, &directions[j]);
                    let cut: Vec<Vec<F::Elem>> = directions
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != j)
                        .map(|(_, v)| {
                            let k = field.div(&h.eval(field, v), &hj).expect("nonzero");
                            let w: Vec<F::Elem> = v
                                .iter()
                                .zip(&directions[j])
                                .map(|(a, b)| field.sub(a, &field.mul(&k, b)))
                                .collect();
                            h.to_local(&w)
                        })
                        .collect();
                    let at_local = local(at)?;
                    trace.components.push(if cut.is_empty() {
                        Component::Simple { at: at_local }
                    } else {
                        Component::DoubleInSubspace {
                            at: at_local,
                            directions: cut,
                        }
                    });
                    residual.components.push(Component::Simple { at: at.clone() });
                }
            },
            Component::Jet2 { at, direction } => {
                if on(direction) {
                    trace.components.push(Component::Jet2 {
                        at: local(at)?,
                        direction: h.to_local(direction),
                    });
                } else {
                    trace.components.push(Component::Simple { at: local(at)? });
                    residual.components.push(Component::Simple { at: at.clone() });
                }
            }
            Component::Line { at, through } => {
                let (p, q) = (at.coords(), through.coords());
                if on(p) && on(q) {
                    trace.components.push(Component::Line {
                        at: local(at)?,
                        through: local(through)?,
                    });
                } else {
                    let (hp, hq) = (h.eval(field, p), h.eval(field, q));
                    let x: Vec<F::Elem> = p
                        .iter()
                        .zip(q)
                        .map(|(a, b)| field.sub(&field.mul(&hq, a), &field.mul(&hp, b)))
                        .collect();
                    let x = Point::new(field, x).map_err(|_| not_split("degenerate line"))?;
                    trace.components.push(Component::Simple { at: local(&x)? });
                    residual.components.push(c.clone());
                }
            }
            Component::Complex { generators, points } => {
                let (inside, outside): (Vec<_>, Vec<_>) = points.iter().cloned().partition(|p| on(p.coords()));
                if !inside.is_empty() {
                    trace.components.push(Component::Complex {
                        generators: Vec::new(),
                        points: inside.iter().map(local).collect::<Result<_, _>>()?,
                    });
                }
                if !outside.is_empty() {
                    residual.components.push(Component::Complex {
                        generators: generators.clone(),
                        points: outside,
                    });
                }
            }
            Component::Ejected {
                at,
                plane,
                directions,
                transverse,
            } => {
                if plane.iter().chain(directions).any(|v| !on(v)) {
                    return Err(not_split("ejected component does not match this hyperplane"));
                }
                if on(transverse) {
                    return Err(not_split("ejection direction lies in the hyperplane"));
                }
                trace.components.push(Component::Double { at: local(at)? });
                residual.components.push(if directions.is_empty() {
                    Component::Jet2 {
                        at: at.clone(),
                        direction: transverse.clone(),
                    }
                } else {
                    let mut dirs = directions.clone();
                    dirs.push(transverse.clone());
                    Component::DoubleInSubspace {
                        at: at.clone(),
                        directions: dirs,
                    }
                });
            }
        }
    }
    Ok(TraceResidualPair { trace, residual })
}

#[cfg(test)]
mod tests;
