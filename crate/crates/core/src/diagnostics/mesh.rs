use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use crate::surface::{
    Mask, Orientation, ParamPatch, PatchRole, PlanarRegion, SurfaceAssembly, TWO_PI,
};
use crate::{Error, Result, Vec3};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
}

struct Divisions {
    u: usize,
    v: usize,
    hole_ring: usize,
}

fn divisions(p: &ParamPatch, n: usize) -> Divisions {
    let ring = n;
    let neck_ring = (n / 2).max(8);
    let d = p.domain;
    let (u, v) = match p.role {
        PatchRole::Band { .. } => (
            ((n as f64 / 2.0) * d.width() / PI).ceil().max(4.0) as usize,
            ring,
        ),
        PatchRole::Transition { .. } | PatchRole::SouthCap { .. } => ((n / 8).max(2), ring),
        PatchRole::Flat { .. } => (0, 0),
        PatchRole::Neck { .. } => ((4.0 * d.width()).ceil().max(8.0) as usize, neck_ring),
        PatchRole::NeckAnnulus { .. } => (2, neck_ring),
        PatchRole::Fixture => ((n / 2).max(4), ring),
    };
    Divisions {
        u,
        v,
        hole_ring: neck_ring,
    }
}

fn circle(center: [f64; 2], radius: f64, n: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..n).map(move |j| {
        let a = TWO_PI * j as f64 / n as f64;
        (center[0] + radius * a.cos(), center[1] + radius * a.sin())
    })
}

fn planar_triangles(
    region: &PlanarRegion,
    outer_n: usize,
    hole_n: usize,
) -> Result<(Vec<(f64, f64)>, Vec<[usize; 3]>)> {
    let mut pts: Vec<(f64, f64)> =
        circle(region.outer.center, region.outer.radius, outer_n).collect();
    let mut hole_starts = Vec::new();
    for h in &region.holes {
        hole_starts.push(pts.len());
        pts.extend(circle(h.center, h.radius, hole_n));
    }
    let flat: Vec<f64> = pts.iter().flat_map(|&(x, y)| [x, y]).collect();
    let idx = earcutr::earcut(&flat, &hole_starts, 2)
        .map_err(|e| Error::Triangulation(format!("{e:?}")))?;
    let tris = idx
        .chunks_exact(3)
        .map(|c| {
            let (a, b, d) = (pts[c[0]], pts[c[1]], pts[c[2]]);
            let area = (b.0 - a.0) * (d.1 - a.1) - (b.1 - a.1) * (d.0 - a.0);
            if area >= 0.0 {
                [c[0], c[1], c[2]]
            } else {
                [c[0], c[2], c[1]]
            }
        })
        .collect();
    Ok((pts, tris))
}

fn patch_mesh(p: &ParamPatch, n: usize) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let div = divisions(p, n);
    let (params, mut tris) = match &p.mask {
        Mask::Planar(region) => planar_triangles(region, n, div.hole_ring)?,
        Mask::Full => {
            let d = p.domain;
            let mut params = Vec::with_capacity((div.u + 1) * (div.v + 1));
            for i in 0..=div.u {
                for j in 0..=div.v {
                    params.push((
                        d.u0 + d.width() * i as f64 / div.u as f64,
                        d.v0 + d.height() * j as f64 / div.v as f64,
                    ));
                }
            }
            let id = |i: usize, j: usize| i * (div.v + 1) + j;
            let mut tris = Vec::with_capacity(2 * div.u * div.v);
            for i in 0..div.u {
                for j in 0..div.v {
                    tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
            (params, tris)
        }
    };
    if p.orientation == Orientation::Negative {
        for t in &mut tris {
            t.swap(1, 2);
        }
    }
    Ok((
        params.into_iter().map(|(u, v)| p.point(u, v)).collect(),
        tris,
    ))
}

/// Triangulates every patch on its own grid, welds coincident vertices and
/// drops the triangles collapsed at poles. `resolution` is the number of
/// azimuthal segments on sheet circles.
pub fn triangulate(asm: &SurfaceAssembly, resolution: usize) -> Result<TriMesh> {
    let n = resolution.max(8);
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    for p in &asm.patches {
        let (v, t) = patch_mesh(p, n)?;
        let base = verts.len();
        verts.extend(v);
        tris.extend(t.into_iter().map(|t| t.map(|i| i + base)));
    }
    let diam = bbox_diameter(&verts);
    let min_edge = tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (verts[a] - verts[b]).norm())
        .filter(|&e| e > 1e-12 * diam)
        .fold(f64::INFINITY, f64::min);
    let tol = (1e-7 * diam).min(1e-2 * min_edge);
    let (vertices, remap) = weld(&verts, tol);
    let mut triangles = Vec::with_capacity(tris.len());
    for t in tris {
        let t = t.map(|i| remap[i]);
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
            triangles.push(t);
        }
    }
    let mesh = TriMesh {
        vertices,
        triangles,
    };
    for (i, t) in mesh.triangles.iter().enumerate() {
        let [a, b, c] = t.map(|k| mesh.vertices[k]);
        let area = 0.5 * (b - a).cross(&(c - a)).norm();
        let longest = (b - a).norm().max((c - b).norm()).max((a - c).norm());
        if !(area > 1e-14 * longest * longest) {
            return Err(Error::DegenerateTriangle { index: i });
        }
    }
    Ok(mesh)
}

fn bbox_diameter(v: &[Vec3]) -> f64 {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in v {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (hi - lo).norm()
}

fn weld(v: &[Vec3], tol: f64) -> (Vec<Vec3>, Vec<usize>) {
    let key = |p: &Vec3| {
        [
            (p.x / tol).floor() as i64,
            (p.y / tol).floor() as i64,
            (p.z / tol).floor() as i64,
        ]
    };
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut out: Vec<Vec3> = Vec::new();
    let mut remap = Vec::with_capacity(v.len());
    for p in v {
        let k = key(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &i in list {
                            if (out[i] - p).norm() <= tol {
                                found = Some(i);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        let i = found.unwrap_or_else(|| {
            out.push(*p);
            grid.entry(k).or_default().push(out.len() - 1);
            out.len() - 1
        });
        remap.push(i);
    }
    (out, remap)
}

impl TriMesh {
    fn edge_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut m = HashMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *m.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        m
    }

    fn used_vertices(&self) -> usize {
        let mut used = vec![false; self.vertices.len()];
        for t in &self.triangles {
            for &i in t {
                used[i] = true;
            }
        }
        used.iter().filter(|&&u| u).count()
    }

    /// Every edge must be shared by exactly two triangles.
    pub fn check_watertight(&self) -> Result<()> {
        let counts = self.edge_counts();
        let boundary_edges = counts.values().filter(|&&c| c == 1).count();
        let nonmanifold_edges = counts.values().filter(|&&c| c > 2).count();
        if boundary_edges + nonmanifold_edges > 0 {
            return Err(Error::NotWatertight {
                boundary_edges,
                nonmanifold_edges,
            });
        }
        Ok(())
    }

    /// Each directed edge occurs at most once.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .all(|e| seen.insert(e))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.used_vertices() as i64 - self.edge_counts().len() as i64 + self.triangles.len() as i64
    }

    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2])] {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra] = rb;
                }
            }
        }
        let mut roots = std::collections::HashSet::new();
        for t in &self.triangles {
            roots.insert(find(&mut parent, t[0]));
        }
        roots.len() <= 1
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|k| self.vertices[k]);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }

    /// Wavefront OBJ with 1-based indices and LF line endings.
    pub fn write_obj<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    pub fn to_obj_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_obj(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads the `v` and triangular `f` records of an OBJ file.
    pub fn read_obj<R: BufRead>(r: R) -> Result<TriMesh> {
        let mut m = TriMesh::default();
        let bad = |l: &str| Error::InvalidArgument(format!("malformed OBJ line: {l}"));
        for line in r.lines() {
            let line = line?;
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let c: Vec<f64> = it
                        .map(|x| x.parse().map_err(|_| bad(&line)))
                        .collect::<Result<_>>()?;
                    if c.len() != 3 {
                        return Err(bad(&line));
                    }
                    m.vertices.push(Vec3::new(c[0], c[1], c[2]));
                }
                Some("f") => {
                    let c: Vec<usize> = it
                        .map(|x| {
                            x.split('/')
                                .next()
                                .unwrap_or("")
                                .parse::<usize>()
                                .map_err(|_| bad(&line))
                        })
                        .collect::<Result<_>>()?;
                    if c.len() != 3 || c.iter().any(|&i| i == 0 || i > m.vertices.len()) {
                        return Err(bad(&line));
                    }
                    m.triangles.push([c[0] - 1, c[1] - 1, c[2] - 1]);
                }
                _ => {}
            }
        }
        Ok(m)
    }
}

/// Genus `(2 - chi) / 2` of a watertight mesh.
pub fn euler_genus(mesh: &TriMesh) -> Result<i64> {
    mesh.check_watertight()?;
    let chi = mesh.euler_characteristic();
    if (2 - chi) % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "odd Euler characteristic {chi}"
        )));
    }
    Ok((2 - chi) / 2)
}

pub fn is_connected(mesh: &TriMesh) -> bool {
    mesh.is_connected()
}
