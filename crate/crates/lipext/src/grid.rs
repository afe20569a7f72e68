//! Discretized bounded domains, node classification, scalar fields, and
//! epsilon-ball stencils.
//!
//! A [`GridDomain`] is a uniform grid in one or two dimensions whose nodes
//! are classified as interior, boundary, or exterior. Rectangular domains
//! classify the outermost layer as boundary; masked domains (disks, text
//! masks) classify a node in the closed domain as boundary when one of its
//! 8-neighbors is excluded. The node coordinates of node `(i, j)` are
//! `origin + h * (i, j)`, computed in that order.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Classification of a grid node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Boundary,
    Exterior,
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeClass::Interior => write!(f, "I"),
            NodeClass::Boundary => write!(f, "B"),
            NodeClass::Exterior => write!(f, "E"),
        }
    }
}

/// Recipe for building a [`GridDomain`].
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// `nodes` uniform points on `[0, 1]`.
    Interval { nodes: usize },
    /// `nodes × nodes` grid on `[0, 1]²`, boundary = outermost layer.
    Square { nodes: usize },
    /// Disk of radius 1/2 centered in `[0, 1]²`, built as a masked grid.
    Disk { nodes: usize },
    /// Text mask, one row per line: `'.'`/`'#'` inside, `' '` outside.
    Mask { text: String },
}

/// A bounded discretized domain with per-node classification.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDomain {
    dim: usize,
    shape: [usize; 2],
    spacing: f64,
    origin: [f64; 2],
    classes: Vec<NodeClass>,
    coords: Vec<[f64; 2]>,
    interior: Vec<u32>,
    boundary: Vec<u32>,
    interior_pos: Vec<u32>,
    boundary_pos: Vec<u32>,
}

const NO_POS: u32 = u32::MAX;

impl GridDomain {
    /// Rectangular domain: every node is in the closed domain and the
    /// outermost grid layer is the boundary.
    pub fn rectangle(dim: usize, shape: [usize; 2], spacing: f64, origin: [f64; 2]) -> Result<Self> {
        assert!(dim == 1 || dim == 2, "only 1-D and 2-D domains are supported");
        let [nx, ny] = shape;
        if nx < 3 || (dim == 2 && ny < 3) {
            return Err(Error::TooFewNodes(nx.min(if dim == 2 { ny } else { nx })));
        }
        assert!(spacing > 0.0 && spacing.is_finite());
        let ny = if dim == 1 { 1 } else { ny };
        let mut classes = vec![NodeClass::Interior; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let edge = i == 0 || i == nx - 1 || (dim == 2 && (j == 0 || j == ny - 1));
                if edge {
                    classes[j * nx + i] = NodeClass::Boundary;
                }
            }
        }
        Self::from_classes(dim, [nx, ny], spacing, origin, classes)
    }

    /// Masked domain from per-node inclusion. A node in the closed domain is
    /// boundary when some 8-neighbor (or the outside of the grid) is excluded.
    pub fn from_mask_cells(
        inside: &[bool],
        shape: [usize; 2],
        spacing: f64,
        origin: [f64; 2],
    ) -> Result<Self> {
        let [nx, ny] = shape;
        assert_eq!(inside.len(), nx * ny);
        if nx < 3 || ny < 3 {
            return Err(Error::TooFewNodes(nx.min(ny)));
        }
        let mut classes = vec![NodeClass::Exterior; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                if !inside[j * nx + i] {
                    continue;
                }
                let mut touches_outside = false;
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ni, nj) = (i as i64 + di, j as i64 + dj);
                        if ni < 0 || nj < 0 || ni >= nx as i64 || nj >= ny as i64 {
                            touches_outside = true;
                        } else if !inside[nj as usize * nx + ni as usize] {
                            touches_outside = true;
                        }
                    }
                }
                classes[j * nx + i] = if touches_outside {
                    NodeClass::Boundary
                } else {
                    NodeClass::Interior
                };
            }
        }
        Self::from_classes(2, [nx, ny], spacing, origin, classes)
    }

    /// Parses a text mask: one row per line, `'.'` or `'#'` for nodes in the
    /// closed domain, `' '` for excluded nodes. The first line is the top row.
    /// The longest axis is scaled to span `[0, 1]`.
    pub fn from_mask_text(text: &str) -> Result<Self> {
        let mut lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
        while matches!(lines.last(), Some(l) if l.trim().is_empty()) {
            lines.pop();
        }
        let ny = lines.len();
        let nx = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        if nx < 3 || ny < 3 {
            return Err(Error::MaskParse {
                line: 1,
                col: 1,
                msg: format!("mask must be at least 3x3 cells, got {}x{}", nx, ny),
            });
        }
        let mut inside = vec![false; nx * ny];
        for (row, line) in lines.iter().enumerate() {
            for (col, ch) in line.chars().enumerate() {
                // first text line is the top row: j decreases with row index
                let j = ny - 1 - row;
                match ch {
                    '.' | '#' => inside[j * nx + col] = true,
                    ' ' => {}
                    other => {
                        return Err(Error::MaskParse {
                            line: row + 1,
                            col: col + 1,
                            msg: format!("unexpected character {:?}", other),
                        })
                    }
                }
            }
        }
        let spacing = 1.0 / (nx.max(ny) as f64 - 1.0);
        Self::from_mask_cells(&inside, [nx, ny], spacing, [0.0, 0.0])
    }

    fn from_classes(
        dim: usize,
        shape: [usize; 2],
        spacing: f64,
        origin: [f64; 2],
        classes: Vec<NodeClass>,
    ) -> Result<Self> {
        let [nx, ny] = shape;
        let mut coords = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                coords.push([
                    origin[0] + spacing * i as f64,
                    origin[1] + spacing * j as f64,
                ]);
            }
        }
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        let mut interior_pos = vec![NO_POS; nx * ny];
        let mut boundary_pos = vec![NO_POS; nx * ny];
        for (id, class) in classes.iter().enumerate() {
            match class {
                NodeClass::Interior => {
                    interior_pos[id] = interior.len() as u32;
                    interior.push(id as u32);
                }
                NodeClass::Boundary => {
                    boundary_pos[id] = boundary.len() as u32;
                    boundary.push(id as u32);
                }
                NodeClass::Exterior => {}
            }
        }
        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        if interior.is_empty() {
            return Err(Error::EmptyInterior);
        }
        Ok(GridDomain {
            dim,
            shape: [nx, ny],
            spacing,
            origin,
            classes,
            coords,
            interior,
            boundary,
            interior_pos,
            boundary_pos,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn node_count(&self) -> usize {
        self.classes.len()
    }

    #[inline]
    pub fn id(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.shape[0] && j < self.shape[1]);
        j * self.shape[0] + i
    }

    #[inline]
    pub fn ij(&self, id: usize) -> [usize; 2] {
        [id % self.shape[0], id / self.shape[0]]
    }

    #[inline]
    pub fn class(&self, id: usize) -> NodeClass {
        self.classes[id]
    }

    #[inline]
    pub fn coord(&self, id: usize) -> [f64; 2] {
        self.coords[id]
    }

    /// Interior node ids in flat (lexicographic) order.
    pub fn interior(&self) -> &[u32] {
        &self.interior
    }

    /// Boundary node ids in flat (lexicographic) order.
    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    pub fn interior_pos(&self, id: usize) -> Option<usize> {
        match self.interior_pos[id] {
            NO_POS => None,
            p => Some(p as usize),
        }
    }

    pub fn boundary_pos(&self, id: usize) -> Option<usize> {
        match self.boundary_pos[id] {
            NO_POS => None,
            p => Some(p as usize),
        }
    }

    pub fn non_exterior(&self) -> impl Iterator<Item = usize> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != NodeClass::Exterior)
            .map(|(id, _)| id)
    }

    pub fn non_exterior_count(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    /// Diagonal of the bounding box of the non-exterior nodes.
    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for id in self.non_exterior() {
            let c = self.coords[id];
            for a in 0..2 {
                lo[a] = lo[a].min(c[a]);
                hi[a] = hi[a].max(c[a]);
            }
        }
        let dx = hi[0] - lo[0];
        let dy = hi[1] - lo[1];
        (dx * dx + dy * dy).sqrt()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let ca = self.coords[a];
        let cb = self.coords[b];
        let dx = ca[0] - cb[0];
        let dy = ca[1] - cb[1];
        (dx * dx + dy * dy).sqrt()
    }
}

/// Builds a domain from a [`DomainSpec`].
pub fn build_domain(spec: &DomainSpec) -> Result<Arc<GridDomain>> {
    let domain = match spec {
        DomainSpec::Interval { nodes } => {
            let n = *nodes;
            if n < 3 {
                return Err(Error::TooFewNodes(n));
            }
            GridDomain::rectangle(1, [n, 1], 1.0 / (n as f64 - 1.0), [0.0, 0.0])?
        }
        DomainSpec::Square { nodes } => {
            let n = *nodes;
            if n < 3 {
                return Err(Error::TooFewNodes(n));
            }
            GridDomain::rectangle(2, [n, n], 1.0 / (n as f64 - 1.0), [0.0, 0.0])?
        }
        DomainSpec::Disk { nodes } => {
            let n = *nodes;
            if n < 3 {
                return Err(Error::TooFewNodes(n));
            }
            let h = 1.0 / (n as f64 - 1.0);
            let r2 = 0.25 + 1e-12;
            let mut inside = vec![false; n * n];
            for j in 0..n {
                for i in 0..n {
                    let x = h * i as f64 - 0.5;
                    let y = h * j as f64 - 0.5;
                    inside[j * n + i] = x * x + y * y <= r2;
                }
            }
            GridDomain::from_mask_cells(&inside, [n, n], h, [0.0, 0.0])?
        }
        DomainSpec::Mask { text } => GridDomain::from_mask_text(text)?,
    };
    Ok(Arc::new(domain))
}

/// One double-precision value per node of a domain; exterior entries are
/// kept at zero and never read.
#[derive(Clone, Debug)]
pub struct ScalarField {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(domain: &Arc<GridDomain>) -> Self {
        ScalarField {
            domain: Arc::clone(domain),
            values: vec![0.0; domain.node_count()],
        }
    }

    pub fn constant(domain: &Arc<GridDomain>, c: f64) -> Self {
        let mut field = Self::zeros(domain);
        for id in domain.non_exterior() {
            field.values[id] = c;
        }
        field
    }

    /// Evaluates `f` at the coordinates of every non-exterior node.
    pub fn from_coord_fn(domain: &Arc<GridDomain>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let mut field = Self::zeros(domain);
        for id in domain.non_exterior() {
            field.values[id] = f(domain.coord(id));
        }
        field
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    #[inline]
    pub fn value(&self, id: usize) -> f64 {
        self.values[id]
    }

    #[inline]
    pub fn set(&mut self, id: usize, v: f64) {
        self.values[id] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Sup-norm difference over non-exterior nodes.
    pub fn sup_diff(&self, other: &ScalarField) -> f64 {
        assert_same_domain(&self.domain, &other.domain);
        self.domain
            .non_exterior()
            .map(|id| (self.values[id] - other.values[id]).abs())
            .fold(0.0, f64::max)
    }

    /// Nodewise combination of two fields on the same domain.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert_same_domain(&self.domain, &other.domain);
        let mut out = ScalarField::zeros(&self.domain);
        for id in self.domain.non_exterior() {
            out.values[id] = f(self.values[id], other.values[id]);
        }
        out
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        let mut out = ScalarField::zeros(&self.domain);
        for id in self.domain.non_exterior() {
            out.values[id] = f(self.values[id]);
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.domain.non_exterior().all(|id| self.values[id].is_finite())
    }
}

pub(crate) fn assert_same_domain(a: &Arc<GridDomain>, b: &Arc<GridDomain>) {
    assert!(
        Arc::ptr_eq(a, b) || a.as_ref() == b.as_ref(),
        "fields live on different domains"
    );
}

/// Boundary data `F`: one value per boundary node, stored in boundary order.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    domain: Arc<GridDomain>,
    values: Vec<f64>,
}

impl BoundaryData {
    /// Evaluates `f` at the coordinates of every boundary node.
    pub fn from_coord_fn(domain: &Arc<GridDomain>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = domain
            .boundary()
            .iter()
            .map(|&id| f(domain.coord(id as usize)))
            .collect();
        BoundaryData {
            domain: Arc::clone(domain),
            values,
        }
    }

    /// Values listed in boundary-node order.
    pub fn from_values(domain: &Arc<GridDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.boundary().len() {
            return Err(Error::InvalidConfig(format!(
                "expected {} boundary values, got {}",
                domain.boundary().len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "boundary values must be finite".into(),
            ));
        }
        Ok(BoundaryData {
            domain: Arc::clone(domain),
            values,
        })
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the `pos`-th boundary node.
    #[inline]
    pub fn value(&self, pos: usize) -> f64 {
        self.values[pos]
    }

    /// Value at a node id, if that node is boundary.
    pub fn at_node(&self, id: usize) -> Option<f64> {
        self.domain.boundary_pos(id).map(|p| self.values[p])
    }

    /// Iterates `(node id, value)` in boundary order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.domain
            .boundary()
            .iter()
            .zip(self.values.iter())
            .map(|(&id, &v)| (id as usize, v))
    }

    pub fn negated(&self) -> BoundaryData {
        BoundaryData {
            domain: Arc::clone(&self.domain),
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// The discrete ball neighborhood of radius `eps`: integer offsets `o` with
/// `0 < |o| * h <= eps`, instantiated per interior node with offsets leading
/// outside the closed domain removed. The center is excluded.
#[derive(Clone, Debug)]
pub struct BallStencil {
    domain: Arc<GridDomain>,
    eps: f64,
    offsets: Vec<[i32; 2]>,
    clipped: Vec<Vec<u32>>,
}

impl BallStencil {
    pub fn build(domain: &Arc<GridDomain>, eps: f64) -> Result<Self> {
        let h = domain.spacing();
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if eps < h * (1.0 - 1e-12) {
            return Err(Error::StencilTooSmall { eps, h });
        }
        if eps > domain.diameter() {
            return Err(Error::InvalidConfig(format!(
                "eps {} exceeds the domain diameter {}",
                eps,
                domain.diameter()
            )));
        }
        let r = eps / h;
        // relative slack so that eps = k*h keeps the radius-k offsets
        let r2 = r * r * (1.0 + 1e-12);
        let kmax = r.floor() as i32 + 1;
        let mut offsets = Vec::new();
        let j_range = if domain.dim() == 1 { 0..=0 } else { -kmax..=kmax };
        for dj in j_range {
            for di in -kmax..=kmax {
                if di == 0 && dj == 0 {
                    continue;
                }
                let n2 = (di * di + dj * dj) as f64;
                if n2 <= r2 {
                    offsets.push([di, dj]);
                }
            }
        }
        let [nx, ny] = domain.shape();
        let mut clipped = Vec::with_capacity(domain.interior().len());
        for &id in domain.interior() {
            let [i, j] = domain.ij(id as usize);
            let mut neigh = Vec::with_capacity(offsets.len());
            for &[di, dj] in &offsets {
                let ni = i as i64 + di as i64;
                let nj = j as i64 + dj as i64;
                if ni < 0 || nj < 0 || ni >= nx as i64 || nj >= ny as i64 {
                    continue;
                }
                let nid = nj as usize * nx + ni as usize;
                if domain.class(nid) != NodeClass::Exterior {
                    neigh.push(nid as u32);
                }
            }
            if neigh.is_empty() {
                return Err(Error::EmptyNeighborhood(id as usize));
            }
            clipped.push(neigh);
        }
        Ok(BallStencil {
            domain: Arc::clone(domain),
            eps,
            offsets,
            clipped,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    /// Unclipped integer offsets (symmetric under negation).
    pub fn offsets(&self) -> &[[i32; 2]] {
        &self.offsets
    }

    /// Clipped neighbor ids of an interior node.
    pub fn neighbors(&self, id: usize) -> &[u32] {
        let pos = self
            .domain
            .interior_pos(id)
            .expect("stencil neighborhoods exist only at interior nodes");
        &self.clipped[pos]
    }

    /// Min and max of `u` over the clipped punctured neighborhood of `id`.
    pub fn extrema(&self, u: &ScalarField, id: usize) -> (f64, f64) {
        assert_same_domain(self.domain(), u.domain());
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &nid in self.neighbors(id) {
            let v = u.value(nid as usize);
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }
}

/// Min and max of `u` over the clipped punctured ball neighborhood of an
/// interior node.
pub fn ball_extrema(u: &ScalarField, id: usize, stencil: &BallStencil) -> (f64, f64) {
    stencil.extrema(u, id)
}
