//! Level sets `Im Z = 0` (Z real) and `Re Z = 0` (Z purely imaginary) over a
//! rectangle, by marching squares.
//!
//! Each crossing edge is bisected once before interpolating, saddle cells are
//! resolved by the mean of their corners, and cells that contain a pole are
//! flagged and never traced through. Axis rows where a part vanishes
//! identically contribute their grid edges directly.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::complex::ApComplex;
use crate::engine::{secondzeta, EvalOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// `Im Z = 0`.
    Real,
    /// `Re Z = 0`.
    Imaginary,
}

#[derive(Debug, Clone, Serialize)]
pub struct Polyline {
    pub kind: CurveKind,
    /// `(σ, t)` vertices.
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
    /// Number of ends (0, 1 or 2) that stop at a flagged pole cell.
    pub pole_ends: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct XRayCurves {
    pub region: Region,
    pub grid: (usize, usize),
    pub real_curves: Vec<Polyline>,
    pub imag_curves: Vec<Polyline>,
    /// Flagged cells `(i, j)`, lower-left corner indices.
    pub pole_cells: Vec<(usize, usize)>,
}

/// Default resolution.
pub const DEFAULT_GRID: (usize, usize) = (201, 201);

/// Graph node: an edge crossing or a grid vertex (for identically-zero rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Node {
    /// Horizontal edge from vertex (i, j) to (i+1, j).
    H(usize, usize),
    /// Vertical edge from vertex (i, j) to (i, j+1).
    V(usize, usize),
    Vertex(usize, usize),
}

struct Grid {
    region: Region,
    nx: usize,
    ny: usize,
    digits: u32,
    values: Vec<Option<ApComplex>>,
    pole_cell: Vec<bool>,
}

fn part(z: &ApComplex, kind: CurveKind) -> f64 {
    match kind {
        CurveKind::Real => z.im.to_f64(),
        CurveKind::Imaginary => z.re.to_f64(),
    }
}

impl Grid {
    fn sigma(&self, i: f64) -> f64 {
        let r = &self.region;
        r.sigma_min + (r.sigma_max - r.sigma_min) * i / (self.nx - 1) as f64
    }

    fn t(&self, j: f64) -> f64 {
        let r = &self.region;
        r.t_min + (r.t_max - r.t_min) * j / (self.ny - 1) as f64
    }

    fn value(&self, i: usize, j: usize) -> Option<&ApComplex> {
        self.values[j * self.nx + i].as_ref()
    }

    fn is_pole_cell(&self, i: usize, j: usize) -> bool {
        self.pole_cell[j * (self.nx - 1) + i]
    }

    /// Cells adjacent to an edge node.
    fn cells_of(&self, n: Node) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        match n {
            Node::H(i, j) => {
                if j > 0 {
                    out.push((i, j - 1));
                }
                if j + 1 < self.ny {
                    out.push((i, j));
                }
            }
            Node::V(i, j) => {
                if i > 0 {
                    out.push((i - 1, j));
                }
                if i + 1 < self.nx {
                    out.push((i, j));
                }
            }
            Node::Vertex(i, j) => {
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    if i >= di && j >= dj && i - di + 1 < self.nx && j - dj + 1 < self.ny {
                        out.push((i - di, j - dj));
                    }
                }
            }
        }
        out
    }

    fn eval(&self, sigma: f64, t: f64) -> Result<Option<ApComplex>> {
        let s = ApComplex::from_f64(64, sigma, t);
        match secondzeta(&s, self.digits, None, &EvalOptions::default()) {
            Ok(r) => Ok(Some(r.z)),
            Err(Error::Pole(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

fn positive(v: f64) -> bool {
    v >= 0.0
}

/// Trace both families of level curves of `Z` over `region` on an
/// `nx × ny` grid, evaluating `Z` to `digits` digits.
pub fn trace_xray(region: Region, grid: (usize, usize), digits: u32) -> Result<XRayCurves> {
    let (nx, ny) = grid;
    if nx < 2 || ny < 2 || !(region.sigma_max > region.sigma_min) || !(region.t_max > region.t_min) {
        return Err(Error::InvalidArgument("region needs positive extent and at least 2×2 points".into()));
    }
    let mut g = Grid {
        region,
        nx,
        ny,
        digits,
        values: Vec::new(),
        pole_cell: vec![false; (nx - 1) * (ny - 1)],
    };
    let coords: Vec<(f64, f64)> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| (g.sigma(i as f64), g.t(j as f64)))
        .collect();
    let values: Vec<Result<Option<ApComplex>>> = coords.par_iter().map(|&(s, t)| g.eval(s, t)).collect();
    g.values = values.into_iter().collect::<Result<_>>()?;
    if g.values.iter().all(Option::is_none) {
        return Err(Error::InvalidArgument("region lies inside the pole guard".into()));
    }
    flag_pole_cells(&mut g);

    let mut midpoint_cache: HashMap<Node, Option<ApComplex>> = HashMap::new();
    let real_curves = trace_family(&g, CurveKind::Real, &mut midpoint_cache)?;
    let imag_curves = trace_family(&g, CurveKind::Imaginary, &mut midpoint_cache)?;
    let pole_cells = (0..ny - 1)
        .flat_map(|j| (0..nx - 1).map(move |i| (i, j)))
        .filter(|&(i, j)| g.is_pole_cell(i, j))
        .collect();
    Ok(XRayCurves {
        region,
        grid,
        real_curves,
        imag_curves,
        pole_cells,
    })
}

fn flag_pole_cells(g: &mut Grid) {
    let (nx, ny) = (g.nx, g.ny);
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let missing = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
                .iter()
                .any(|&(a, b)| g.value(a, b).is_none());
            if missing {
                g.pole_cell[j * (nx - 1) + i] = true;
            }
        }
    }
    let r = g.region;
    if r.t_min > 0.0 || r.t_max < 0.0 {
        return;
    }
    let mut poles = vec![1.0];
    let mut p = -1.0;
    while p >= r.sigma_min - 1.0 {
        poles.push(p);
        p -= 2.0;
    }
    let ds = (r.sigma_max - r.sigma_min) / (nx - 1) as f64;
    let dt = (r.t_max - r.t_min) / (ny - 1) as f64;
    for p in poles {
        if p < r.sigma_min || p > r.sigma_max {
            continue;
        }
        let fi = (p - r.sigma_min) / ds;
        let fj = (0.0 - r.t_min) / dt;
        for i in cell_indices(fi, nx - 1) {
            for j in cell_indices(fj, ny - 1) {
                g.pole_cell[j * (nx - 1) + i] = true;
            }
        }
    }
}

/// Cells whose closed extent contains the fractional coordinate `f`.
fn cell_indices(f: f64, cells: usize) -> Vec<usize> {
    let k = f.floor();
    let mut out = Vec::new();
    if (f - k).abs() < 1e-9 && k >= 1.0 {
        out.push(k as usize - 1);
    }
    if k >= 0.0 && (k as usize) < cells {
        out.push(k as usize);
    }
    if (k as usize) == cells && (f - k).abs() < 1e-9 && cells > 0 {
        out.push(cells - 1);
    }
    out.dedup();
    out
}

fn trace_family(
    g: &Grid,
    kind: CurveKind,
    cache: &mut HashMap<Node, Option<ApComplex>>,
) -> Result<Vec<Polyline>> {
    let (nx, ny) = (g.nx, g.ny);
    let val = |i: usize, j: usize| g.value(i, j).map(|z| part(z, kind));
    let mut segments: Vec<(Node, Node)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if g.is_pole_cell(i, j) {
                continue;
            }
            let c = [
                val(i, j).expect("unflagged"),
                val(i + 1, j).expect("unflagged"),
                val(i + 1, j + 1).expect("unflagged"),
                val(i, j + 1).expect("unflagged"),
            ];
            let edges = [Node::H(i, j), Node::V(i + 1, j), Node::H(i, j + 1), Node::V(i, j)];
            let crossing: Vec<usize> = (0..4)
                .filter(|&e| positive(c[e]) != positive(c[(e + 1) % 4]))
                .collect();
            match crossing.len() {
                2 => segments.push((edges[crossing[0]], edges[crossing[1]])),
                4 => {
                    let centre = positive((c[0] + c[1] + c[2] + c[3]) / 4.0);
                    if centre == positive(c[0]) {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    // Rows or columns where the part vanishes identically (the real axis).
    for j in 0..ny {
        for i in 0..nx {
            let here = val(i, j);
            if here != Some(0.0) {
                continue;
            }
            if i + 1 < nx && val(i + 1, j) == Some(0.0) {
                let cells = g.cells_of(Node::H(i, j));
                if cells.iter().any(|&(a, b)| !g.is_pole_cell(a, b)) {
                    segments.push((Node::Vertex(i, j), Node::Vertex(i + 1, j)));
                }
            }
            if j + 1 < ny && val(i, j + 1) == Some(0.0) {
                let cells = g.cells_of(Node::V(i, j));
                if cells.iter().any(|&(a, b)| !g.is_pole_cell(a, b)) {
                    segments.push((Node::Vertex(i, j), Node::Vertex(i, j + 1)));
                }
            }
        }
    }

    // Crossing points, one bisection per edge.
    let mut nodes: Vec<Node> = segments.iter().flat_map(|&(a, b)| [a, b]).collect();
    nodes.sort();
    nodes.dedup();
    let missing: Vec<Node> = nodes
        .iter()
        .copied()
        .filter(|n| !matches!(n, Node::Vertex(..)) && !cache.contains_key(n))
        .collect();
    let mids: Vec<Result<(Node, Option<ApComplex>)>> = missing
        .par_iter()
        .map(|&n| {
            let (s, t) = match n {
                Node::H(i, j) => (g.sigma(i as f64 + 0.5), g.t(j as f64)),
                Node::V(i, j) => (g.sigma(i as f64), g.t(j as f64 + 0.5)),
                Node::Vertex(..) => unreachable!("filtered"),
            };
            Ok((n, g.eval(s, t)?))
        })
        .collect();
    for m in mids {
        let (n, v) = m?;
        cache.insert(n, v);
    }
    let point = |n: Node| -> (f64, f64) {
        let (a, b, pa, pb) = match n {
            Node::Vertex(i, j) => return (g.sigma(i as f64), g.t(j as f64)),
            Node::H(i, j) => (val(i, j).unwrap(), val(i + 1, j).unwrap(), (i as f64, j as f64), (i as f64 + 1.0, j as f64)),
            Node::V(i, j) => (val(i, j).unwrap(), val(i, j + 1).unwrap(), (i as f64, j as f64), (i as f64, j as f64 + 1.0)),
        };
        let mid = (0.5 * (pa.0 + pb.0), 0.5 * (pa.1 + pb.1));
        let (fa, fb, qa, qb) = match cache.get(&n).cloned().flatten().map(|z| part(&z, kind)) {
            Some(m) if positive(m) != positive(a) => (a, m, pa, mid),
            Some(m) => (m, b, mid, pb),
            None => (a, b, pa, pb),
        };
        let w = if fa == fb { 0.5 } else { fa / (fa - fb) };
        let w = w.clamp(0.0, 1.0);
        let fi = qa.0 + w * (qb.0 - qa.0);
        let fj = qa.1 + w * (qb.1 - qa.1);
        (g.sigma(fi), g.t(fj))
    };

    // Link segments into polylines.
    let mut adj: HashMap<Node, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(k);
        adj.entry(b).or_default().push(k);
    }
    let touches_pole = |n: Node| g.cells_of(n).iter().any(|&(i, j)| g.is_pole_cell(i, j));
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    // Open chains first (start at nodes of degree 1), then loops.
    let mut starts: Vec<Node> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(n, _)| *n).collect();
    starts.sort();
    let mut all: Vec<Node> = adj.keys().copied().collect();
    all.sort();
    starts.extend(all);
    for start in starts {
        let Some(&first) = adj[&start].iter().find(|&&k| !used[k]) else {
            continue;
        };
        let mut chain = vec![start];
        let mut cur = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == cur { b } else { a };
            chain.push(next);
            cur = next;
            match adj[&cur].iter().find(|&&k| !used[k]) {
                Some(&k) => seg = k,
                None => break,
            }
        }
        let closed = chain.len() > 2 && chain.first() == chain.last();
        let pole_ends = if closed {
            0
        } else {
            touches_pole(chain[0]) as u8 + touches_pole(*chain.last().unwrap()) as u8
        };
        lines.push(Polyline {
            kind,
            points: chain.into_iter().map(point).collect(),
            closed,
            pole_ends,
        });
    }
    Ok(lines)
}

impl XRayCurves {
    /// `curve_id,kind,sigma,t` rows; real curves first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("curve_id,kind,sigma,t\n");
        for (id, line) in self.real_curves.iter().chain(&self.imag_curves).enumerate() {
            let kind = match line.kind {
                CurveKind::Real => "real",
                CurveKind::Imaginary => "imaginary",
            };
            for (s, t) in &line.points {
                let _ = writeln!(out, "{id},{kind},{s:.12e},{t:.12e}");
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Residual `|part of Z|` at a curve vertex, for diagnostics.
pub fn vertex_residual(kind: CurveKind, sigma: f64, t: f64, digits: u32) -> Result<f64> {
    let s = ApComplex::new(Float::with_val(64, sigma), Float::with_val(64, t));
    let z = secondzeta(&s, digits, None, &EvalOptions::default())?.z;
    Ok(part(&z, kind).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_axis_right_of_the_pole() {
        let r = Region {
            sigma_min: 1.5,
            sigma_max: 3.0,
            t_min: 0.0,
            t_max: 5.0,
        };
        let x = trace_xray(r, (7, 6), 8).unwrap();
        let axis = x
            .real_curves
            .iter()
            .find(|l| l.points.iter().all(|p| p.1 == 0.0))
            .expect("axis curve");
        assert_eq!(axis.points.len(), 7);
        assert!(x.pole_cells.is_empty());
    }

    #[test]
    fn curves_stop_at_the_double_pole() {
        let r = Region {
            sigma_min: 0.55,
            sigma_max: 1.45,
            t_min: -0.45,
            t_max: 0.45,
        };
        let x = trace_xray(r, (10, 10), 8).unwrap();
        assert!(!x.pole_cells.is_empty());
        // Near s = 1 the double pole dominates: Im Z = 0 on the axis and the
        // vertical through 1, Re Z = 0 on the diagonals; all end at the pole.
        let ending = |v: &[Polyline]| v.iter().filter(|l| l.pole_ends > 0).count();
        assert!(ending(&x.real_curves) >= 2);
        assert!(ending(&x.imag_curves) >= 2);
        let csv = x.to_csv();
        assert!(csv.starts_with("curve_id,kind,sigma,t\n"));
    }
}
