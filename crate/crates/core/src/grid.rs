//! Uniform rectangular grids of samples and the `mgl-grid v1` text format.
//!
//! The text format is
//!
//! ```text
//! # mgl-grid v1
//! nx ny ncomp
//! x0 y0 hx hy
//! <ncomp values>      (nx*ny lines, y outer, x inner)
//! ```
//!
//! Values are written with 17 significant digits so a write/read cycle is
//! bit-exact.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{MglError, Result};

pub const GRID_HEADER: &str = "# mgl-grid v1";

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    ncomp: usize,
    data: Vec<f64>,
}

impl GridField {
    pub fn new(
        nx: usize,
        ny: usize,
        x0: f64,
        y0: f64,
        hx: f64,
        hy: f64,
        ncomp: usize,
        data: Vec<f64>,
    ) -> Result<Self> {
        if nx < 5 || ny < 5 {
            return Err(MglError::Validation(format!(
                "grid must be at least 5x5, got {nx}x{ny}"
            )));
        }
        if ncomp == 0 {
            return Err(MglError::Validation("grid needs at least one component".into()));
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(MglError::Validation(format!(
                "grid spacings must be positive, got ({hx}, {hy})"
            )));
        }
        if !(x0.is_finite() && y0.is_finite()) {
            return Err(MglError::Validation("grid origin must be finite".into()));
        }
        if data.len() != nx * ny * ncomp {
            return Err(MglError::DimensionMismatch {
                left: data.len(),
                right: nx * ny * ncomp,
            });
        }
        Ok(Self {
            nx,
            ny,
            x0,
            y0,
            hx,
            hy,
            ncomp,
            data,
        })
    }

    /// Samples `f(x, y, component)` at every node.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        x0: f64,
        y0: f64,
        hx: f64,
        hy: f64,
        ncomp: usize,
        f: impl Fn(f64, f64, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(nx * ny * ncomp);
        for j in 0..ny {
            let y = y0 + j as f64 * hy;
            for i in 0..nx {
                let x = x0 + i as f64 * hx;
                for c in 0..ncomp {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(nx, ny, x0, y0, hx, hy, ncomp, data)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn ncomp(&self) -> usize {
        self.ncomp
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn origin(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, c: usize) -> usize {
        (j * self.nx + i) * self.ncomp + c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, c: usize) -> f64 {
        self.data[self.index(i, j, c)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, c: usize, v: f64) {
        let k = self.index(i, j, c);
        self.data[k] = v;
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy]
    }

    /// Index of the node at `p`, if `p` lies on a node (to within 1e-6 cells).
    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let fi = (p[0] - self.x0) / self.hx;
        let fj = (p[1] - self.y0) / self.hy;
        let (ri, rj) = (fi.round(), fj.round());
        if (fi - ri).abs() > 1e-6 || (fj - rj).abs() > 1e-6 {
            return None;
        }
        if ri < 0.0 || rj < 0.0 || ri as usize >= self.nx || rj as usize >= self.ny {
            return None;
        }
        Some((ri as usize, rj as usize))
    }

    pub fn is_interior(&self, i: usize, j: usize, margin: usize) -> bool {
        i >= margin && j >= margin && i + margin < self.nx && j + margin < self.ny
    }

    /// Node indices with at least `margin` cells to every edge.
    pub fn interior_nodes(&self, margin: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in margin..self.ny.saturating_sub(margin) {
            for i in margin..self.nx.saturating_sub(margin) {
                out.push((i, j));
            }
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::with_capacity(self.data.len() * 26 + 64);
        writeln!(s, "{GRID_HEADER}").unwrap();
        writeln!(s, "{} {} {}", self.nx, self.ny, self.ncomp).unwrap();
        writeln!(
            s,
            "{} {} {} {}",
            fmt17(self.x0),
            fmt17(self.y0),
            fmt17(self.hx),
            fmt17(self.hy)
        )
        .unwrap();
        for row in self.data.chunks(self.ncomp) {
            let mut first = true;
            for v in row {
                if !first {
                    s.push(' ');
                }
                first = false;
                s.push_str(&fmt17(*v));
            }
            s.push('\n');
        }
        w.write_all(s.as_bytes())?;
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((k, Ok(l))) => Ok((k + 1, l)),
                Some((k, Err(e))) => Err(MglError::Parse {
                    line: k + 1,
                    msg: e.to_string(),
                }),
                None => Err(MglError::Parse {
                    line: 0,
                    msg: format!("unexpected end of input, expected {what}"),
                }),
            }
        };
        let (ln, header) = next("header")?;
        if header.trim_end() != GRID_HEADER {
            return Err(MglError::Parse {
                line: ln,
                msg: format!("expected `{GRID_HEADER}`"),
            });
        }
        let (ln, dims) = next("dimensions")?;
        let dims: Vec<usize> = parse_fields(&dims, ln)?;
        if dims.len() != 3 {
            return Err(MglError::Parse {
                line: ln,
                msg: "expected `nx ny ncomp`".into(),
            });
        }
        let (nx, ny, ncomp) = (dims[0], dims[1], dims[2]);
        let (ln, geom) = next("geometry")?;
        let geom: Vec<f64> = parse_fields(&geom, ln)?;
        if geom.len() != 4 {
            return Err(MglError::Parse {
                line: ln,
                msg: "expected `x0 y0 hx hy`".into(),
            });
        }
        let mut data = Vec::with_capacity(nx * ny * ncomp);
        for _ in 0..nx * ny {
            let (ln, row) = next("data row")?;
            let vals: Vec<f64> = parse_fields(&row, ln)?;
            if vals.len() != ncomp {
                return Err(MglError::Parse {
                    line: ln,
                    msg: format!("expected {ncomp} values, found {}", vals.len()),
                });
            }
            data.extend(vals);
        }
        Self::new(nx, ny, geom[0], geom[1], geom[2], geom[3], ncomp, data)
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_fields<T: std::str::FromStr>(line: &str, ln: usize) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    line.split_whitespace()
        .map(|t| {
            t.parse::<T>().map_err(|e| MglError::Parse {
                line: ln,
                msg: format!("`{t}`: {e}"),
            })
        })
        .collect()
}
