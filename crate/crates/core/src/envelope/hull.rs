//! Convex hulls: quickhull in two and three dimensions, LP membership above.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lp::convex_combination_feasible;
use crate::error::{Error, Result};

/// Slack allowed by membership tests.
pub const HULL_TOL: f64 = 1e-9;

/// Half-space `normal · x <= offset` with a unit normal pointing outward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Facet {
    fn signed_distance(&self, x: &[f64]) -> f64 {
        self.normal.iter().zip(x).map(|(n, v)| n * v).sum::<f64>() - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HullModel {
    /// Explicit hull (d ≤ 3). `vertex_indices` refer to the input points.
    Facets {
        dim: usize,
        vertices: Vec<Vec<f64>>,
        vertex_indices: Vec<usize>,
        facets: Vec<Facet>,
    },
    /// Implicit hull of a point set, membership by linear programming.
    Points { dim: usize, points: Vec<Vec<f64>> },
}

impl HullModel {
    pub fn dim(&self) -> usize {
        match self {
            HullModel::Facets { dim, .. } | HullModel::Points { dim, .. } => *dim,
        }
    }

    /// Explicit hull for 2-D and 3-D data, LP representation otherwise or
    /// when the data is affinely degenerate.
    pub fn build(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or_else(|| {
            Error::Degenerate("cannot build a hull from zero points".into())
        })?;
        let explicit = match dim {
            2 => quickhull_2d(points),
            3 => hull_3d(points),
            _ => Err(Error::Degenerate("no explicit hull above three dimensions".into())),
        };
        match explicit {
            Ok(h) => Ok(h),
            Err(Error::Degenerate(_)) => Ok(HullModel::Points {
                dim,
                points: points.to_vec(),
            }),
            Err(e) => Err(e),
        }
    }

    /// Same hull as an LP point set (useful as a cross-check).
    pub fn as_points(&self) -> HullModel {
        match self {
            HullModel::Facets { dim, vertices, .. } => HullModel::Points {
                dim: *dim,
                points: vertices.clone(),
            },
            p => p.clone(),
        }
    }

    pub fn vertex_indices(&self) -> Option<&[usize]> {
        match self {
            HullModel::Facets { vertex_indices, .. } => Some(vertex_indices),
            HullModel::Points { .. } => None,
        }
    }
}

/// Membership test; boundary points count as inside.
pub fn hull_contains(hull: &HullModel, x: &[f64]) -> Result<bool> {
    if x.len() != hull.dim() {
        return Err(Error::Dimension {
            expected: hull.dim(),
            got: x.len(),
        });
    }
    Ok(match hull {
        HullModel::Facets { facets, .. } => facets.iter().all(|f| f.signed_distance(x) <= HULL_TOL),
        HullModel::Points { points, .. } => {
            let outside_box = (0..x.len()).any(|i| {
                let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[i]), hi.max(p[i]))
                });
                x[i] < lo - HULL_TOL || x[i] > hi + HULL_TOL
            });
            !outside_box && convex_combination_feasible(points, x, HULL_TOL)
        }
    })
}

fn check_dim(points: &[Vec<f64>], dim: usize) -> Result<()> {
    match points.iter().find(|p| p.len() != dim) {
        Some(p) => Err(Error::Dimension { expected: dim, got: p.len() }),
        None => Ok(()),
    }
}

fn extent(points: &[Vec<f64>]) -> f64 {
    let d = points[0].len();
    (0..d)
        .map(|i| {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[i]), hi.max(p[i])));
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Two-dimensional quickhull. Vertices are returned counter-clockwise;
/// points on hull edges are not vertices.
pub fn quickhull_2d(points: &[Vec<f64>]) -> Result<HullModel> {
    check_dim(points, 2)?;
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("{} points cannot span a plane", points.len())));
    }
    let eps = 1e-12 * extent(points).powi(2).max(f64::MIN_POSITIVE);
    let key = |i: usize| (points[i][0], points[i][1]);
    let (mut a, mut b) = (0, 0);
    for i in 1..points.len() {
        if key(i) < key(a) {
            a = i;
        }
        if key(i) > key(b) {
            b = i;
        }
    }
    let (left, right): (Vec<usize>, Vec<usize>) = {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for i in 0..points.len() {
            let c = cross2(&points[a], &points[b], &points[i]);
            if c > eps {
                l.push(i);
            } else if c < -eps {
                r.push(i);
            }
        }
        (l, r)
    };
    if left.is_empty() && right.is_empty() {
        return Err(Error::Degenerate("all points are collinear".into()));
    }

    // hull chain strictly to the right of the directed edge p -> q
    fn chain(points: &[Vec<f64>], p: usize, q: usize, cand: &[usize], eps: f64, out: &mut Vec<usize>) {
        let mut far = None;
        let mut best = eps;
        for &i in cand {
            let d = cross2(&points[q], &points[p], &points[i]);
            if d > best {
                best = d;
                far = Some(i);
            }
        }
        let Some(f) = far else { return };
        let outer_pf: Vec<usize> = cand
            .iter()
            .copied()
            .filter(|&i| cross2(&points[f], &points[p], &points[i]) > eps)
            .collect();
        let outer_fq: Vec<usize> = cand
            .iter()
            .copied()
            .filter(|&i| cross2(&points[q], &points[f], &points[i]) > eps)
            .collect();
        chain(points, p, f, &outer_pf, eps, out);
        out.push(f);
        chain(points, f, q, &outer_fq, eps, out);
    }

    // counter-clockwise: a, lower chain (right of a->b), b, upper chain
    let mut ring = vec![a];
    chain(points, a, b, &right, eps, &mut ring);
    ring.push(b);
    chain(points, b, a, &left, eps, &mut ring);

    let facets = (0..ring.len())
        .map(|k| {
            let p = &points[ring[k]];
            let q = &points[ring[(k + 1) % ring.len()]];
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len = dx.hypot(dy);
            let normal = vec![dy / len, -dx / len];
            let offset = normal[0] * p[0] + normal[1] * p[1];
            Facet { normal, offset }
        })
        .collect();
    Ok(HullModel::Facets {
        dim: 2,
        vertices: ring.iter().map(|&i| points[i].clone()).collect(),
        vertex_indices: ring,
        facets,
    })
}

fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: [f64; 3], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

struct Face {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(points: &[Vec<f64>], v: [usize; 3]) -> Self {
        let n = cross3(sub3(&points[v[1]], &points[v[0]]), sub3(&points[v[2]], &points[v[0]]));
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let normal = [n[0] / len, n[1] / len, n[2] / len];
        Face {
            v,
            normal,
            offset: dot3(normal, &points[v[0]]),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn dist(&self, p: &[f64]) -> f64 {
        dot3(self.normal, p) - self.offset
    }
}

/// Three-dimensional quickhull with triangular facets.
pub fn hull_3d(points: &[Vec<f64>]) -> Result<HullModel> {
    check_dim(points, 3)?;
    let n = points.len();
    if n < 4 {
        return Err(Error::Degenerate(format!("{n} points cannot span a volume")));
    }
    let scale = extent(points).max(f64::MIN_POSITIVE);
    let eps = 1e-10 * scale;

    // initial tetrahedron from extreme points
    let (mut i0, mut i1) = (0, 0);
    for i in 0..n {
        if points[i][0] < points[i0][0] {
            i0 = i;
        }
        if points[i][0] > points[i1][0] {
            i1 = i;
        }
    }
    if points[i1][0] - points[i0][0] <= eps {
        // pick the farthest pair from point 0 instead
        i1 = (0..n)
            .max_by(|&a, &b| {
                let da: f64 = sub3(&points[a], &points[i0]).iter().map(|v| v * v).sum();
                let db: f64 = sub3(&points[b], &points[i0]).iter().map(|v| v * v).sum();
                da.total_cmp(&db)
            })
            .unwrap();
    }
    let line = sub3(&points[i1], &points[i0]);
    let line_len = dot3(line, &line).sqrt();
    if line_len <= eps {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let i2 = (0..n)
        .max_by(|&a, &b| {
            let da = cross3(line, sub3(&points[a], &points[i0]));
            let db = cross3(line, sub3(&points[b], &points[i0]));
            dot3(da, &da).total_cmp(&dot3(db, &db))
        })
        .unwrap();
    let c = cross3(line, sub3(&points[i2], &points[i0]));
    if dot3(c, &c).sqrt() / line_len <= eps {
        return Err(Error::Degenerate("all points are collinear".into()));
    }
    let base = Face::new(points, [i0, i1, i2]);
    let i3 = (0..n)
        .max_by(|&a, &b| base.dist(&points[a]).abs().total_cmp(&base.dist(&points[b]).abs()))
        .unwrap();
    if base.dist(&points[i3]).abs() <= eps {
        return Err(Error::Degenerate("all points are coplanar".into()));
    }

    let mut faces: Vec<Face> = Vec::new();
    let tet = if base.dist(&points[i3]) > 0.0 {
        [[i0, i2, i1], [i0, i1, i3], [i1, i2, i3], [i2, i0, i3]]
    } else {
        [[i0, i1, i2], [i0, i3, i1], [i1, i3, i2], [i2, i3, i0]]
    };
    for v in tet {
        faces.push(Face::new(points, v));
    }
    // directed edge (a, b) -> face holding it in counter-clockwise order
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for (f, face) in faces.iter().enumerate() {
        for k in 0..3 {
            edges.insert((face.v[k], face.v[(k + 1) % 3]), f);
        }
    }
    let seeds = [i0, i1, i2, i3];
    for p in 0..n {
        if seeds.contains(&p) {
            continue;
        }
        if let Some(f) = faces.iter().position(|f| f.dist(&points[p]) > eps) {
            faces[f].outside.push(p);
        }
    }

    let mut pending: Vec<usize> = (0..faces.len()).collect();
    while let Some(fid) = pending.pop() {
        if !faces[fid].alive || faces[fid].outside.is_empty() {
            continue;
        }
        let eye = *faces[fid]
            .outside
            .iter()
            .max_by(|&&a, &&b| faces[fid].dist(&points[a]).total_cmp(&faces[fid].dist(&points[b])))
            .unwrap();
        let ep = &points[eye];

        // visible region grown from fid across shared edges
        let mut visible = vec![fid];
        let mut mark: HashMap<usize, bool> = HashMap::from([(fid, true)]);
        let mut stack = vec![fid];
        while let Some(f) = stack.pop() {
            for k in 0..3 {
                let (a, b) = (faces[f].v[k], faces[f].v[(k + 1) % 3]);
                let Some(&g) = edges.get(&(b, a)) else { continue };
                if mark.contains_key(&g) {
                    continue;
                }
                let vis = faces[g].dist(ep) > eps;
                mark.insert(g, vis);
                if vis {
                    visible.push(g);
                    stack.push(g);
                }
            }
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            for k in 0..3 {
                let (a, b) = (faces[f].v[k], faces[f].v[(k + 1) % 3]);
                let twin = edges.get(&(b, a)).copied();
                if twin.is_none_or(|g| !mark.get(&g).copied().unwrap_or(false)) {
                    horizon.push((a, b));
                }
            }
        }
        let mut orphans = Vec::new();
        for &f in &visible {
            faces[f].alive = false;
            orphans.append(&mut faces[f].outside);
            for k in 0..3 {
                edges.remove(&(faces[f].v[k], faces[f].v[(k + 1) % 3]));
            }
        }
        let first_new = faces.len();
        for (a, b) in horizon {
            let f = faces.len();
            faces.push(Face::new(points, [a, b, eye]));
            for k in 0..3 {
                let v = faces[f].v;
                edges.insert((v[k], v[(k + 1) % 3]), f);
            }
        }
        for p in orphans {
            if p == eye {
                continue;
            }
            if let Some(f) = (first_new..faces.len()).find(|&f| faces[f].dist(&points[p]) > eps) {
                faces[f].outside.push(p);
            }
        }
        pending.extend(first_new..faces.len());
    }

    let live: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    let mut vertex_indices: Vec<usize> = live.iter().flat_map(|f| f.v).collect();
    vertex_indices.sort_unstable();
    vertex_indices.dedup();
    Ok(HullModel::Facets {
        dim: 3,
        vertices: vertex_indices.iter().map(|&i| points[i].clone()).collect(),
        vertex_indices,
        facets: live
            .iter()
            .map(|f| Facet {
                normal: f.normal.to_vec(),
                offset: f.offset,
            })
            .collect(),
    })
}
