use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{check_dim, Point};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerances;

/// A simplicial facet: outward unit normal, offset, and `d` indices into
/// [`Hull::vertices`]. The facet lies in `{x : <normal, x> = offset}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Point,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

impl Facet {
    #[inline]
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        linalg::dot(self.normal.coords(), x) - self.offset
    }
}

/// Convex hull of a finite point set in `R^d` with simplicial facets.
#[derive(Clone, Debug, PartialEq)]
pub struct Hull {
    dim: usize,
    vertices: Vec<Point>,
    input_indices: Vec<usize>,
    facets: Vec<Facet>,
    contains_origin: bool,
}

/// Versioned on-disk form of a [`Hull`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HullDocument {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub vertices: Vec<Point>,
    #[serde(default)]
    pub input_indices: Vec<usize>,
    pub facets: Vec<Facet>,
}

impl HullDocument {
    pub const FORMAT: &'static str = "conehull.hull";
    pub const VERSION: u32 = 1;
}

impl Hull {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Extreme points, ordered by their index in the input.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Position of each vertex in the point list the hull was built from.
    pub fn input_indices(&self) -> &[usize] {
        &self.input_indices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn contains_origin(&self) -> bool {
        self.contains_origin
    }

    /// Smallest facet offset; the largest centered ball inside the hull has
    /// this radius when the origin is interior.
    pub fn min_offset(&self) -> f64 {
        self.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min)
    }

    pub fn to_document(&self) -> HullDocument {
        HullDocument {
            format: HullDocument::FORMAT.to_string(),
            version: HullDocument::VERSION,
            dim: self.dim,
            vertices: self.vertices.clone(),
            input_indices: self.input_indices.clone(),
            facets: self.facets.clone(),
        }
    }

    pub fn from_document(doc: HullDocument) -> Result<Self> {
        if doc.format != HullDocument::FORMAT || doc.version != HullDocument::VERSION {
            return Err(Error::InvalidParams(format!(
                "unsupported hull document {} v{}",
                doc.format, doc.version
            )));
        }
        for v in &doc.vertices {
            check_dim(v, doc.dim)?;
        }
        for f in &doc.facets {
            check_dim(&f.normal, doc.dim)?;
            if f.vertices.iter().any(|&i| i >= doc.vertices.len()) {
                return Err(Error::InvalidParams("facet vertex index out of range".into()));
            }
        }
        let input_indices = if doc.input_indices.len() == doc.vertices.len() {
            doc.input_indices
        } else {
            (0..doc.vertices.len()).collect()
        };
        let contains_origin = !doc.facets.is_empty() && doc.facets.iter().all(|f| f.offset > 0.0);
        Ok(Self {
            dim: doc.dim,
            vertices: doc.vertices,
            input_indices,
            facets: doc.facets,
            contains_origin,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("hull serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: HullDocument =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))?;
        Self::from_document(doc)
    }
}

/// Face counts `(f_0, ..., f_{d-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FVector {
    pub counts: Vec<usize>,
}

impl FVector {
    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// `sum (-1)^k f_k - (1 + (-1)^(d-1))`; zero for every polytope.
    pub fn euler_defect(&self) -> i64 {
        let d = self.counts.len();
        let alt: i64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum();
        let target = if d % 2 == 1 { 2 } else { 0 };
        alt - target
    }

    /// `d f_{d-1} - 2 f_{d-2}`; zero for simplicial polytopes with `d >= 2`.
    pub fn dehn_sommerville_defect(&self) -> i64 {
        let d = self.counts.len();
        if d < 2 {
            return 0;
        }
        d as i64 * self.counts[d - 1] as i64 - 2 * self.counts[d - 2] as i64
    }
}

/// Face counts of a simplicial hull, from deduplicated vertex subsets of the
/// facets.
pub fn f_vector(h: &Hull) -> Result<FVector> {
    let d = h.dim;
    for f in &h.facets {
        if f.vertices.len() != d {
            return Err(Error::NonSimplicial(f.vertices.len()));
        }
    }
    let mut counts = vec![0; d];
    counts[d - 1] = h.facets.len();
    let mut scratch = Vec::with_capacity(d);
    for (k, count) in counts.iter_mut().enumerate().take(d - 1) {
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for f in &h.facets {
            let mut verts = f.vertices.clone();
            verts.sort_unstable();
            for_each_subset(&verts, k + 1, &mut scratch, 0, &mut |s| {
                if !seen.contains(s) {
                    seen.insert(s.to_vec());
                }
            });
        }
        *count = seen.len();
    }
    Ok(FVector { counts })
}

fn for_each_subset(
    items: &[usize],
    size: usize,
    scratch: &mut Vec<usize>,
    start: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if scratch.len() == size {
        visit(scratch);
        return;
    }
    let need = size - scratch.len();
    for i in start..=items.len() - need {
        scratch.push(items[i]);
        for_each_subset(items, size, scratch, i + 1, visit);
        scratch.pop();
    }
}

struct WorkFacet {
    verts: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    /// `neighbors[t]` shares every vertex except `verts[t]`.
    neighbors: Vec<usize>,
    outside: Vec<usize>,
    alive: bool,
}

struct Builder<'a> {
    d: usize,
    pts: &'a [Point],
    interior: Vec<f64>,
    facets: Vec<WorkFacet>,
    stamp: Vec<u32>,
    visible: Vec<bool>,
    round: u32,
}

impl<'a> Builder<'a> {
    fn coords(&self, i: usize) -> &'a [f64] {
        self.pts[i].coords()
    }

    fn eps(&self, f: &WorkFacet, x: &[f64]) -> f64 {
        let linf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        1e-12 * (f.offset.abs() + linf * self.d as f64).max(1e-300)
    }

    fn distance(&self, f: &WorkFacet, x: &[f64]) -> f64 {
        linalg::dot(&f.normal, x) - f.offset
    }

    fn sees(&self, f: &WorkFacet, i: usize) -> Option<f64> {
        let x = self.coords(i);
        let dist = self.distance(f, x);
        (dist > self.eps(f, x)).then_some(dist)
    }

    /// Hyperplane through `verts`, oriented away from the interior point.
    /// Edges and offset are taken at the vertex nearest the origin, which
    /// keeps slender facets reaching far-out points accurate.
    fn plane(&self, verts: &[usize]) -> Result<(Vec<f64>, f64)> {
        let d = self.d;
        let base_idx = verts
            .iter()
            .copied()
            .min_by(|&a, &b| linalg::norm(self.coords(a)).total_cmp(&linalg::norm(self.coords(b))))
            .expect("facet has vertices");
        let base = self.coords(base_idx);
        let rows: Vec<Vec<f64>> =
            verts.iter().filter(|&&v| v != base_idx).map(|&v| linalg::sub(self.coords(v), base)).collect();
        let mut normal = linalg::cofactor_normal(&rows, d);
        let len = linalg::norm(&normal);
        let edge_scale: f64 = rows.iter().map(|r| linalg::norm(r)).product();
        if !(len > tolerances::DEGENERATE * edge_scale) || len == 0.0 {
            return Err(Error::DegenerateInput(format!(
                "facet normal {len:e} against edge scale {edge_scale:e}"
            )));
        }
        normal.iter_mut().for_each(|x| *x /= len);
        let mut offset = linalg::dot(&normal, base);
        if linalg::dot(&normal, &self.interior) > offset {
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        Ok((normal, offset))
    }

    fn push_facet(&mut self, verts: Vec<usize>, neighbors: Vec<usize>) -> Result<usize> {
        let (normal, offset) = self.plane(&verts)?;
        self.facets.push(WorkFacet {
            verts,
            normal,
            offset,
            neighbors,
            outside: Vec::new(),
            alive: true,
        });
        self.stamp.push(0);
        self.visible.push(false);
        Ok(self.facets.len() - 1)
    }

    fn add_point(&mut self, p: usize, start: usize, queue: &mut Vec<usize>) -> Result<()> {
        let d = self.d;
        self.round += 1;
        let round = self.round;
        let x = self.coords(p);

        let mut visible_list = vec![start];
        self.stamp[start] = round;
        self.visible[start] = true;
        let mut cursor = 0;
        while cursor < visible_list.len() {
            let f = visible_list[cursor];
            cursor += 1;
            for t in 0..d {
                let nb = self.facets[f].neighbors[t];
                if self.stamp[nb] == round {
                    continue;
                }
                self.stamp[nb] = round;
                let fac = &self.facets[nb];
                let vis = self.distance(fac, x) > self.eps(fac, x);
                self.visible[nb] = vis;
                if vis {
                    visible_list.push(nb);
                }
            }
        }

        let mut created: Vec<usize> = Vec::new();
        let mut horizon: Vec<usize> = Vec::new();
        let mut pending: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for &f in &visible_list {
            for t in 0..d {
                let nb = self.facets[f].neighbors[t];
                if self.visible[nb] && self.stamp[nb] == round {
                    continue;
                }
                let mut verts: Vec<usize> = self.facets[f]
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != t)
                    .map(|(_, &v)| v)
                    .collect();
                verts.push(p);
                let mut neighbors = vec![usize::MAX; d];
                neighbors[d - 1] = nb;
                let id = self.push_facet(verts, neighbors)?;
                let slot = self.facets[nb]
                    .neighbors
                    .iter()
                    .position(|&g| g == f)
                    .expect("adjacency is symmetric");
                self.facets[nb].neighbors[slot] = id;
                for s in 0..d - 1 {
                    let mut key: Vec<usize> = self.facets[id].verts[..d - 1]
                        .iter()
                        .enumerate()
                        .filter(|&(r, _)| r != s)
                        .map(|(_, &v)| v)
                        .collect();
                    key.sort_unstable();
                    match pending.remove(&key) {
                        Some((other, other_slot)) => {
                            self.facets[id].neighbors[s] = other;
                            self.facets[other].neighbors[other_slot] = id;
                        }
                        None => {
                            pending.insert(key, (id, s));
                        }
                    }
                }
                created.push(id);
                horizon.push(nb);
            }
        }
        if !pending.is_empty() {
            return Err(Error::DegenerateInput("horizon is not a closed ridge cycle".into()));
        }

        let mut orphans = Vec::new();
        for &f in &visible_list {
            self.facets[f].alive = false;
            self.visible[f] = false;
            orphans.append(&mut self.facets[f].outside);
        }
        for q in orphans {
            if q == p {
                continue;
            }
            let target = created
                .iter()
                .chain(horizon.iter())
                .copied()
                .find(|&g| self.sees(&self.facets[g], q).is_some());
            if let Some(g) = target {
                self.facets[g].outside.push(q);
            }
        }
        for &g in created.iter().chain(horizon.iter()) {
            if !self.facets[g].outside.is_empty() {
                queue.push(g);
            }
        }
        Ok(())
    }
}

/// Convex hull of `points` in `R^d` by beneath-beyond insertion with conflict
/// lists. Points on a facet hyperplane are not treated as extreme.
pub fn convex_hull(points: &[Point], d: usize) -> Result<Hull> {
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be positive".into()));
    }
    for p in points {
        check_dim(p, d)?;
    }
    if points.len() < d + 1 {
        return Err(Error::TooFewPoints { needed: d + 1, got: points.len() });
    }
    if d == 1 {
        return interval_hull(points);
    }

    let simplex = initial_simplex(points, d)?;
    let mut interior = vec![0.0; d];
    for &i in &simplex {
        linalg::axpy(1.0 / (d + 1) as f64, points[i].coords(), &mut interior);
    }
    let mut b = Builder {
        d,
        pts: points,
        interior,
        facets: Vec::new(),
        stamp: Vec::new(),
        visible: Vec::new(),
        round: 0,
    };
    // Facet `i` omits simplex vertex `i`; its neighbour across `verts[t]` is
    // the facet omitting that vertex.
    for omit in 0..=d {
        let verts: Vec<usize> =
            simplex.iter().enumerate().filter(|&(j, _)| j != omit).map(|(_, &v)| v).collect();
        let neighbors: Vec<usize> = (0..=d).filter(|&j| j != omit).collect();
        b.push_facet(verts, neighbors)?;
    }

    let in_simplex: HashSet<usize> = simplex.iter().copied().collect();
    for i in 0..points.len() {
        if in_simplex.contains(&i) {
            continue;
        }
        let best = (0..=d)
            .filter_map(|f| b.sees(&b.facets[f], i).map(|dist| (f, dist)))
            .max_by(|x, y| x.1.total_cmp(&y.1));
        if let Some((f, _)) = best {
            b.facets[f].outside.push(i);
        }
    }

    let mut queue: Vec<usize> = (0..=d).rev().collect();
    while let Some(f) = queue.pop() {
        if !b.facets[f].alive || b.facets[f].outside.is_empty() {
            continue;
        }
        let (pos, _) = b.facets[f]
            .outside
            .iter()
            .enumerate()
            .map(|(k, &i)| (k, b.distance(&b.facets[f], points[i].coords())))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty outside set");
        let p = b.facets[f].outside.swap_remove(pos);
        b.add_point(p, f, &mut queue)?;
    }

    finish(points, d, b.facets.into_iter().filter(|f| f.alive).map(|f| (f.verts, f.normal, f.offset)))
}

fn finish(
    points: &[Point],
    d: usize,
    raw: impl Iterator<Item = (Vec<usize>, Vec<f64>, f64)>,
) -> Result<Hull> {
    let raw: Vec<_> = raw.collect();
    let mut used: Vec<usize> = raw.iter().flat_map(|f| f.0.iter().copied()).collect();
    used.sort_unstable();
    used.dedup();
    let index: HashMap<usize, usize> = used.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let facets: Vec<Facet> = raw
        .into_iter()
        .map(|(verts, normal, offset)| Facet {
            normal: Point::new(normal),
            offset,
            vertices: verts.iter().map(|v| index[v]).collect(),
        })
        .collect();
    let contains_origin = facets.iter().all(|f| f.offset > 0.0);
    Ok(Hull {
        dim: d,
        vertices: used.iter().map(|&i| points[i].clone()).collect(),
        input_indices: used,
        facets,
        contains_origin,
    })
}

fn interval_hull(points: &[Point]) -> Result<Hull> {
    let key = |i: &usize| points[*i][0];
    let idx: Vec<usize> = (0..points.len()).collect();
    let lo = *idx.iter().min_by(|a, b| key(a).total_cmp(&key(b))).expect("non-empty");
    let hi = *idx.iter().max_by(|a, b| key(a).total_cmp(&key(b))).expect("non-empty");
    let (a, b) = (points[lo][0], points[hi][0]);
    if b - a <= tolerances::DEGENERATE * a.abs().max(b.abs()) {
        return Err(Error::DegenerateInput("all points coincide".into()));
    }
    finish(
        points,
        1,
        [(vec![lo], vec![-1.0], -a), (vec![hi], vec![1.0], b)].into_iter(),
    )
}

/// Greedy choice of `d + 1` affinely independent points, each maximizing the
/// distance to the affine span of those already chosen.
fn initial_simplex(points: &[Point], d: usize) -> Result<Vec<usize>> {
    let first = (0..points.len())
        .max_by(|&a, &b| points[a][0].total_cmp(&points[b][0]))
        .expect("non-empty");
    let origin = points[first].coords();
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut scale = 0.0;
    for step in 0..d {
        let mut best = (usize::MAX, -1.0, Vec::new());
        for (i, p) in points.iter().enumerate() {
            let mut r = linalg::sub(p.coords(), origin);
            for q in &basis {
                let c = linalg::dot(&r, q);
                linalg::axpy(-c, q, &mut r);
            }
            let len = linalg::norm(&r);
            if len > best.1 {
                best = (i, len, r);
            }
        }
        let (i, len, mut r) = best;
        if step == 0 {
            scale = len;
        }
        if !(len > tolerances::DEGENERATE * scale) {
            return Err(Error::DegenerateInput(format!(
                "points span only {step} dimensions"
            )));
        }
        // Second pass keeps the basis orthonormal to working precision.
        for q in &basis {
            let c = linalg::dot(&r, q);
            linalg::axpy(-c, q, &mut r);
        }
        let n = linalg::norm(&r);
        r.iter_mut().for_each(|x| *x /= n);
        basis.push(r);
        chosen.push(i);
    }
    Ok(chosen)
}
