//! Field sources: closed-form evaluators or sampled grids, behind one interface
//! that hands out [`Jet2`]s.

use std::fmt;
use std::sync::Arc;

use crate::error::{MglError, Result};
use crate::grid::GridField;
use crate::jets::{fd_jet, Jet2, Third};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`. Infinite bounds are allowed
/// for entire fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const PLANE: Rect = Rect {
        x0: f64::NEG_INFINITY,
        x1: f64::INFINITY,
        y0: f64::NEG_INFINITY,
        y1: f64::INFINITY,
    };

    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) {
            return Err(MglError::Validation(format!(
                "empty rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn square(half: f64) -> Self {
        Self {
            x0: -half,
            x1: half,
            y0: -half,
            y1: half,
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    /// `n x n` nodes spanning the rectangle, y outer, x inner.
    pub fn lattice(&self, n: usize) -> Vec<[f64; 2]> {
        let hx = (self.x1 - self.x0) / (n - 1) as f64;
        let hy = (self.y1 - self.y0) / (n - 1) as f64;
        let mut pts = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                pts.push([self.x0 + i as f64 * hx, self.y0 + j as f64 * hy]);
            }
        }
        pts
    }
}

/// A closed-form field `R^2 -> R^ncomp` that can report exact jets.
///
/// Implementations must be deterministic: the same point yields a bitwise
/// identical jet.
pub trait Evaluator: Send + Sync {
    fn ncomp(&self) -> usize;

    fn domain(&self) -> Rect {
        Rect::PLANE
    }

    /// Jet of component `c` at `p`; `p` is already known to be in the domain.
    fn jet(&self, p: [f64; 2], c: usize) -> Jet2;

    /// Third derivatives, when the evaluator can provide them.
    fn third(&self, _p: [f64; 2], _c: usize) -> Option<Third> {
        None
    }
}

#[derive(Clone)]
pub enum FieldSource {
    Analytic(Arc<dyn Evaluator>),
    Grid(Arc<GridField>),
}

impl fmt::Debug for FieldSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSource::Analytic(e) => write!(f, "Analytic(ncomp={})", e.ncomp()),
            FieldSource::Grid(g) => write!(f, "Grid({}x{}x{})", g.nx(), g.ny(), g.ncomp()),
        }
    }
}

impl FieldSource {
    pub fn analytic(e: impl Evaluator + 'static) -> Self {
        FieldSource::Analytic(Arc::new(e))
    }

    pub fn grid(g: GridField) -> Self {
        FieldSource::Grid(Arc::new(g))
    }

    pub fn ncomp(&self) -> usize {
        match self {
            FieldSource::Analytic(e) => e.ncomp(),
            FieldSource::Grid(g) => g.ncomp(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self, FieldSource::Analytic(_))
    }

    fn check_component(&self, c: usize) -> Result<()> {
        if c >= self.ncomp() {
            return Err(MglError::ComponentOutOfRange {
                c,
                ncomp: self.ncomp(),
            });
        }
        Ok(())
    }

    /// Jet of component `c` at `p`. Grid sources require `p` to be a strict
    /// interior node.
    pub fn jet(&self, p: [f64; 2], c: usize) -> Result<Jet2> {
        match self {
            FieldSource::Analytic(e) => analytic_jet(e.as_ref(), p, c),
            FieldSource::Grid(g) => {
                self.check_component(c)?;
                let (i, j) = g
                    .locate(p)
                    .ok_or(MglError::DomainError { x: p[0], y: p[1] })?;
                fd_jet(g, i, j, c)
            }
        }
    }

    /// Jets of all components at `p`.
    pub fn jets(&self, p: [f64; 2]) -> Result<Vec<Jet2>> {
        (0..self.ncomp()).map(|c| self.jet(p, c)).collect()
    }

    pub fn third(&self, p: [f64; 2], c: usize) -> Result<Third> {
        self.check_component(c)?;
        match self {
            FieldSource::Analytic(e) => {
                check_domain(e.as_ref(), p)?;
                e.third(p, c).ok_or(MglError::MissingThirdDerivatives)
            }
            FieldSource::Grid(_) => Err(MglError::MissingThirdDerivatives),
        }
    }

    /// Field value only; grid sources accept any node including the boundary.
    pub fn value(&self, p: [f64; 2], c: usize) -> Result<f64> {
        self.check_component(c)?;
        match self {
            FieldSource::Analytic(e) => Ok(analytic_jet(e.as_ref(), p, c)?.value),
            FieldSource::Grid(g) => {
                let (i, j) = g
                    .locate(p)
                    .ok_or(MglError::DomainError { x: p[0], y: p[1] })?;
                Ok(g.get(i, j, c))
            }
        }
    }

    /// Sample points inside `region`: an `n x n` lattice for analytic sources,
    /// the strict-interior nodes falling inside `region` for grid sources.
    pub fn sample_points(&self, region: Rect, n: usize) -> Vec<[f64; 2]> {
        match self {
            FieldSource::Analytic(_) => region.lattice(n),
            FieldSource::Grid(g) => g
                .interior_nodes(2)
                .into_iter()
                .map(|(i, j)| g.node(i, j))
                .filter(|p| region.contains(*p))
                .collect(),
        }
    }
}

fn check_domain(e: &dyn Evaluator, p: [f64; 2]) -> Result<()> {
    if !e.domain().contains(p) || !p[0].is_finite() || !p[1].is_finite() {
        return Err(MglError::DomainError { x: p[0], y: p[1] });
    }
    Ok(())
}

/// Jet straight from a closed-form evaluator.
pub fn analytic_jet(e: &dyn Evaluator, p: [f64; 2], c: usize) -> Result<Jet2> {
    if c >= e.ncomp() {
        return Err(MglError::ComponentOutOfRange { c, ncomp: e.ncomp() });
    }
    check_domain(e, p)?;
    e.jet(p, c).checked("analytic evaluator")
}

/// Samples an evaluator on a grid covering `rect` with `n x n` nodes.
pub fn sample_grid(e: &dyn Evaluator, rect: Rect, n: usize) -> Result<GridField> {
    let hx = (rect.x1 - rect.x0) / (n - 1) as f64;
    let hy = (rect.y1 - rect.y0) / (n - 1) as f64;
    let ncomp = e.ncomp();
    for p in [[rect.x0, rect.y0], [rect.x1, rect.y1]] {
        check_domain(e, p)?;
    }
    GridField::from_fn(n, n, rect.x0, rect.y0, hx, hy, ncomp, |x, y, c| {
        e.jet([x, y], c).value
    })
}
