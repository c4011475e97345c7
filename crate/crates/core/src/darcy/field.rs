use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Grid geometry shared by permeability and head fields.
///
/// A line of `n` cells has nodes `0..=n`, cell `i` sitting between nodes `i`
/// and `i + 1`. A grid has `nx * ny` interior (measured) nodes surrounded by
/// a ring of boundary nodes, so node columns run `0..nx + 2` and node rows
/// `0..ny + 2`. Each interior node touches four links: `ny * (nx + 1)`
/// x-oriented links followed by `(ny + 1) * nx` y-oriented links, for
/// `2N(N + 1)` permeabilities on an `N x N` grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Line(usize),
    Grid { nx: usize, ny: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Shape {
    pub fn square(n: usize) -> Self {
        Shape::Grid { nx: n, ny: n }
    }

    pub fn dims(&self) -> usize {
        match self {
            Shape::Line(_) => 1,
            Shape::Grid { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Shape::Line(0) => Err(Error::param("line must have at least one cell")),
            Shape::Grid { nx, ny } if nx == 0 || ny == 0 => {
                Err(Error::param("grid must have at least one interior node"))
            }
            _ => Ok(()),
        }
    }

    /// Number of permeability entries.
    pub fn link_count(&self) -> usize {
        match *self {
            Shape::Line(n) => n,
            Shape::Grid { nx, ny } => ny * (nx + 1) + (ny + 1) * nx,
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            Shape::Line(n) => n + 1,
            Shape::Grid { nx, ny } => (nx + 2) * (ny + 2),
        }
    }

    /// Links crossed walking from the left boundary to the right one.
    pub fn links_per_row(&self) -> usize {
        match *self {
            Shape::Line(n) => n,
            Shape::Grid { nx, .. } => nx + 1,
        }
    }

    pub fn as_vec(&self) -> Vec<usize> {
        match *self {
            Shape::Line(n) => vec![n],
            Shape::Grid { nx, ny } => vec![nx, ny],
        }
    }

    pub fn from_slice(dims: usize, shape: &[usize]) -> Result<Self> {
        let s = match (dims, shape) {
            (1, [n]) => Shape::Line(*n),
            (2, [nx, ny]) => Shape::Grid { nx: *nx, ny: *ny },
            _ => return Err(Error::shape(format!("dims {dims} does not match shape {shape:?}"))),
        };
        s.validate()?;
        Ok(s)
    }

    /// Node index of column `a`, row `b` (grids only).
    pub fn node(&self, a: usize, b: usize) -> usize {
        match *self {
            Shape::Line(_) => a,
            Shape::Grid { nx, .. } => b * (nx + 2) + a,
        }
    }

    /// Index of the x-link between node columns `i` and `i + 1` in interior row `j`.
    pub fn x_link(&self, i: usize, j: usize) -> usize {
        match *self {
            Shape::Line(_) => i,
            Shape::Grid { nx, .. } => j * (nx + 1) + i,
        }
    }

    /// Index of the y-link in interior column `i` between interior rows `j - 1` and `j`.
    pub fn y_link(&self, i: usize, j: usize) -> usize {
        match *self {
            Shape::Line(_) => panic!("lines have no y-links"),
            Shape::Grid { nx, ny } => ny * (nx + 1) + j * nx + i,
        }
    }

    pub fn axis(&self, link: usize) -> Axis {
        match *self {
            Shape::Line(_) => Axis::X,
            Shape::Grid { nx, ny } if link < ny * (nx + 1) => Axis::X,
            Shape::Grid { .. } => Axis::Y,
        }
    }

    /// Endpoints `(from, to)` of a link; its head difference is `h[to] - h[from]`.
    pub fn link_nodes(&self, link: usize) -> (usize, usize) {
        match *self {
            Shape::Line(_) => (link, link + 1),
            Shape::Grid { nx, ny } => {
                let nxl = ny * (nx + 1);
                if link < nxl {
                    let (j, i) = (link / (nx + 1), link % (nx + 1));
                    (self.node(i, j + 1), self.node(i + 1, j + 1))
                } else {
                    let l = link - nxl;
                    let (j, i) = (l / nx, l % nx);
                    (self.node(i + 1, j), self.node(i + 1, j + 1))
                }
            }
        }
    }

    /// Interior (unknown) nodes in row-major order.
    pub fn interior_nodes(&self) -> Vec<usize> {
        match *self {
            Shape::Line(n) => (1..n).collect(),
            Shape::Grid { nx, ny } => (1..=ny)
                .flat_map(|b| (1..=nx).map(move |a| (a, b)))
                .map(|(a, b)| self.node(a, b))
                .collect(),
        }
    }

    /// The links meeting at an interior node, each with the neighbouring node.
    pub fn node_links(&self, node: usize) -> Vec<(usize, usize, Axis)> {
        match *self {
            Shape::Line(_) => vec![(node - 1, node - 1, Axis::X), (node, node + 1, Axis::X)],
            Shape::Grid { nx, .. } => {
                let (a, b) = (node % (nx + 2), node / (nx + 2));
                let (i, j) = (a - 1, b - 1);
                vec![
                    (self.x_link(i, j), self.node(a - 1, b), Axis::X),
                    (self.x_link(i + 1, j), self.node(a + 1, b), Axis::X),
                    (self.y_link(i, j), self.node(a, b - 1), Axis::Y),
                    (self.y_link(i, j + 1), self.node(a, b + 1), Axis::Y),
                ]
            }
        }
    }

    /// x-coordinate (in links from the left boundary) of a node.
    pub(crate) fn node_column(&self, node: usize) -> usize {
        match *self {
            Shape::Line(_) => node,
            Shape::Grid { nx, .. } => node % (nx + 2),
        }
    }

    pub(crate) fn is_boundary(&self, node: usize) -> bool {
        match *self {
            Shape::Line(n) => node == 0 || node == n,
            Shape::Grid { nx, ny } => {
                let (a, b) = (node % (nx + 2), node / (nx + 2));
                a == 0 || b == 0 || a == nx + 1 || b == ny + 1
            }
        }
    }
}

/// Binary permeability field: cell `i` has `k_low + q[i] * (k_high - k_low)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "FieldRepr<S>",
    into = "FieldRepr<S>",
    bound(serialize = "S: Scalar + Serialize", deserialize = "S: Scalar + DeserializeOwned")
)]
pub struct PermeabilityField<S: Scalar> {
    pub shape: Shape,
    pub k_low: S,
    pub k_high: S,
    pub q: Vec<u8>,
}

impl<S: Scalar> PermeabilityField<S> {
    pub fn new(shape: Shape, k_low: S, k_high: S, q: Vec<u8>) -> Result<Self> {
        shape.validate()?;
        if !(k_low > S::zero()) || k_high < k_low {
            return Err(Error::param("need k_high >= k_low > 0"));
        }
        if q.len() != shape.link_count() {
            return Err(Error::shape(format!(
                "{} indicators for {} cells",
                q.len(),
                shape.link_count()
            )));
        }
        if q.iter().any(|&b| b > 1) {
            return Err(Error::param("indicators must be 0 or 1"));
        }
        Ok(Self { shape, k_low, k_high, q })
    }

    pub fn delta_k(&self) -> S {
        self.k_high.clone() - self.k_low.clone()
    }

    pub fn k(&self, i: usize) -> S {
        if self.q[i] == 1 {
            self.k_high.clone()
        } else {
            self.k_low.clone()
        }
    }

    pub fn k_values(&self) -> Vec<S> {
        (0..self.q.len()).map(|i| self.k(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn count_high(&self) -> usize {
        self.q.iter().filter(|&&b| b == 1).count()
    }
}

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct FieldRepr<S> {
    dims: usize,
    shape: Vec<usize>,
    k_L: S,
    k_H: S,
    q: Vec<u8>,
}

impl<S: Scalar> From<PermeabilityField<S>> for FieldRepr<S> {
    fn from(f: PermeabilityField<S>) -> Self {
        FieldRepr { dims: f.shape.dims(), shape: f.shape.as_vec(), k_L: f.k_low, k_H: f.k_high, q: f.q }
    }
}

impl<S: Scalar> TryFrom<FieldRepr<S>> for PermeabilityField<S> {
    type Error = Error;
    fn try_from(r: FieldRepr<S>) -> Result<Self> {
        PermeabilityField::new(Shape::from_slice(r.dims, &r.shape)?, r.k_L, r.k_H, r.q)
    }
}

/// Fixed heads on the left and right boundaries. On grids the top and bottom
/// boundary rows are held at the straight-line profile between the two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition<S> {
    pub left: Option<S>,
    pub right: Option<S>,
}

impl<S: Scalar> BoundaryCondition<S> {
    pub fn dirichlet(left: S, right: S) -> Self {
        Self { left: Some(left), right: Some(right) }
    }

    /// `h = 0` on the left, `h = -L` on the right, `L` the number of links
    /// across, so a uniform medium drops one unit of head per link.
    pub fn unit_gradient(shape: &Shape) -> Self {
        Self::dirichlet(S::zero(), -S::from_count(shape.links_per_row()))
    }

    pub(crate) fn fixed(&self) -> Result<(S, S)> {
        match (&self.left, &self.right) {
            (Some(l), Some(r)) => Ok((l.clone(), r.clone())),
            _ => Err(Error::IllPosed(
                "both the left and the right boundary need a fixed head".into(),
            )),
        }
    }

    /// Prescribed head at a boundary node.
    pub(crate) fn value_at(&self, shape: &Shape, node: usize) -> Result<S> {
        let (l, r) = self.fixed()?;
        let width = S::from_count(shape.links_per_row());
        let x = S::from_count(shape.node_column(node));
        Ok(l.clone() + (r - l) * x / width)
    }
}

/// Hydraulic heads on every node, boundary included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "HeadRepr<S>",
    into = "HeadRepr<S>",
    bound(serialize = "S: Scalar + Serialize", deserialize = "S: Scalar + DeserializeOwned")
)]
pub struct HeadField<S: Scalar> {
    pub shape: Shape,
    pub dx: S,
    pub dy: S,
    pub bc: BoundaryCondition<S>,
    pub h: Vec<S>,
}

impl<S: Scalar> HeadField<S> {
    pub fn new(shape: Shape, dx: S, dy: S, bc: BoundaryCondition<S>, h: Vec<S>) -> Result<Self> {
        shape.validate()?;
        if h.len() != shape.node_count() {
            return Err(Error::shape(format!("{} heads for {} nodes", h.len(), shape.node_count())));
        }
        if !(dx > S::zero() && dy > S::zero()) {
            return Err(Error::param("grid spacings must be positive"));
        }
        Ok(Self { shape, dx, dy, bc, h })
    }

    pub(crate) fn spacing_sq(&self, axis: Axis) -> S {
        match axis {
            Axis::X => self.dx.clone() * self.dx.clone(),
            Axis::Y => self.dy.clone() * self.dy.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HeadRepr<S> {
    dims: usize,
    shape: Vec<usize>,
    dx: S,
    dy: S,
    bc: BoundaryCondition<S>,
    h: Vec<S>,
}

impl<S: Scalar> From<HeadField<S>> for HeadRepr<S> {
    fn from(f: HeadField<S>) -> Self {
        HeadRepr { dims: f.shape.dims(), shape: f.shape.as_vec(), dx: f.dx, dy: f.dy, bc: f.bc, h: f.h }
    }
}

impl<S: Scalar> TryFrom<HeadRepr<S>> for HeadField<S> {
    type Error = Error;
    fn try_from(r: HeadRepr<S>) -> Result<Self> {
        HeadField::new(Shape::from_slice(r.dims, &r.shape)?, r.dx, r.dy, r.bc, r.h)
    }
}

/// Head drop across each link, in permeability order.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadDifferences<S> {
    pub shape: Shape,
    pub values: Vec<S>,
}

impl<S: Scalar> HeadDifferences<S> {
    pub fn axis(&self, link: usize) -> Axis {
        self.shape.axis(link)
    }
}
