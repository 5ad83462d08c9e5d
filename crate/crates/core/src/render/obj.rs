//! Wavefront OBJ subset: `v`, `vn`, `f`, `mtllib`, `usemtl` and `Kd`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use glam::DVec3;

use super::scene::{Material, Scene, Triangle};
use crate::error::{Error, Result};

/// Albedo for faces without a material.
pub const DEFAULT_ALBEDO: f64 = 0.8;

pub fn load_obj(path: &Path) -> Result<Scene> {
    let text = fs::read_to_string(path).map_err(|e| Error::SceneLoad {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_obj(&text, path, |name| {
        let mtl = dir.join(name);
        let text = fs::read_to_string(&mtl).map_err(|e| Error::SceneLoad {
            path: mtl.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        Ok((mtl, text))
    })
}

/// Parses OBJ text. `open_mtl` resolves an `mtllib` name to its path and
/// contents.
pub fn parse_obj(
    text: &str,
    path: &Path,
    mut open_mtl: impl FnMut(&str) -> Result<(PathBuf, String)>,
) -> Result<Scene> {
    let err = |line: usize, message: String| Error::SceneLoad {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut positions: Vec<DVec3> = Vec::new();
    let mut normals: Vec<DVec3> = Vec::new();
    let mut library: HashMap<String, DVec3> = HashMap::new();
    let mut materials: Vec<Material> = Vec::new();
    let mut material_ids: HashMap<String, usize> = HashMap::new();
    let mut current: Option<usize> = None;
    let mut default_material: Option<usize> = None;
    let mut triangles = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        let Some(keyword) = parts.next() else { continue };
        let args: Vec<&str> = parts.collect();
        match keyword {
            "v" | "vn" => {
                if args.len() < 3 {
                    return Err(err(line_no, format!("`{keyword}` needs three coordinates")));
                }
                let mut xyz = [0.0; 3];
                for (k, a) in args[..3].iter().enumerate() {
                    xyz[k] = a
                        .parse()
                        .map_err(|_| err(line_no, format!("bad number `{a}`")))?;
                }
                let p = DVec3::from(xyz);
                if !p.is_finite() {
                    return Err(err(line_no, "non-finite coordinate".into()));
                }
                if keyword == "v" {
                    positions.push(p);
                } else {
                    normals.push(p);
                }
            }
            "f" => {
                if args.len() < 3 {
                    return Err(err(line_no, "face needs at least three vertices".into()));
                }
                let mut verts = Vec::with_capacity(args.len());
                let mut normal_sum = DVec3::ZERO;
                for a in &args {
                    let mut fields = a.split('/');
                    let vi = resolve(fields.next().unwrap_or(""), positions.len())
                        .map_err(|m| err(line_no, m))?;
                    verts.push(positions[vi]);
                    if let Some(n) = fields.nth(1).filter(|s| !s.is_empty()) {
                        let ni = resolve(n, normals.len()).map_err(|m| err(line_no, m))?;
                        normal_sum += normals[ni];
                    }
                }
                let material = match current {
                    Some(m) => m,
                    None => *default_material.get_or_insert_with(|| {
                        materials.push(Material {
                            albedo: DVec3::splat(DEFAULT_ALBEDO),
                        });
                        materials.len() - 1
                    }),
                };
                for k in 1..verts.len() - 1 {
                    let mut tri = Triangle::new([verts[0], verts[k], verts[k + 1]], material)
                        .map_err(|_| err(line_no, "degenerate face".into()))?;
                    if tri.normal.dot(normal_sum) < 0.0 {
                        tri = Triangle::new([verts[0], verts[k + 1], verts[k]], material)
                            .expect("reversed winding of a valid triangle");
                    }
                    triangles.push(tri);
                }
            }
            "mtllib" => {
                for name in &args {
                    let (mtl_path, mtl_text) = open_mtl(name)?;
                    parse_mtl(&mtl_text, &mtl_path, &mut library)?;
                }
            }
            "usemtl" => {
                let name = args.first().copied().unwrap_or("");
                let albedo = *library
                    .get(name)
                    .ok_or_else(|| err(line_no, format!("unknown material `{name}`")))?;
                let id = *material_ids.entry(name.to_string()).or_insert_with(|| {
                    materials.push(Material { albedo });
                    materials.len() - 1
                });
                current = Some(id);
            }
            // Texture coordinates, groups, objects and smoothing are ignored.
            "vt" | "g" | "o" | "s" | "vp" | "l" => {}
            other => return Err(err(line_no, format!("unsupported statement `{other}`"))),
        }
    }
    Scene::new(triangles, materials).map_err(|e| err(0, e.to_string()))
}

/// 1-based or negative (relative) OBJ index to a 0-based index.
fn resolve(field: &str, len: usize) -> std::result::Result<usize, String> {
    let i: i64 = field
        .parse()
        .map_err(|_| format!("bad index `{field}`"))?;
    let idx = if i > 0 { i - 1 } else { len as i64 + i };
    if i == 0 || idx < 0 || idx >= len as i64 {
        return Err(format!("index {i} refers to a missing element ({len} defined)"));
    }
    Ok(idx as usize)
}

fn parse_mtl(text: &str, path: &Path, library: &mut HashMap<String, DVec3>) -> Result<()> {
    let err = |line: usize, message: String| Error::SceneLoad {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("newmtl") => {
                let name = parts.next().ok_or_else(|| err(i + 1, "newmtl needs a name".into()))?;
                library.insert(name.to_string(), DVec3::splat(DEFAULT_ALBEDO));
                current = Some(name.to_string());
            }
            Some("Kd") => {
                let name = current
                    .as_ref()
                    .ok_or_else(|| err(i + 1, "Kd before newmtl".into()))?;
                let v: Vec<f64> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err(i + 1, "bad Kd value".into()))?;
                let kd = match v.as_slice() {
                    [g] => DVec3::splat(*g),
                    [r, g, b, ..] => DVec3::new(*r, *g, *b),
                    _ => return Err(err(i + 1, "Kd needs a color".into())),
                };
                if kd.min_element() < 0.0 || kd.max_element() > 1.0 {
                    return Err(err(i + 1, "Kd outside [0, 1]".into()));
                }
                library.insert(name.clone(), kd);
            }
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scene> {
        parse_obj(text, Path::new("test.obj"), |name| {
            Ok((
                PathBuf::from(name),
                "newmtl red\nKd 0.9 0.1 0.1\nnewmtl grey\nKd 0.5\n".to_string(),
            ))
        })
    }

    #[test]
    fn single_triangle() {
        let s = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        assert_eq!(s.triangles().len(), 1);
        let n = s.triangles()[0].normal;
        assert!((n.length() - 1.0).abs() < 1e-12);
        assert_eq!(n, DVec3::Z);
        assert_eq!(s.albedo(0), DVec3::splat(DEFAULT_ALBEDO));
    }

    #[test]
    fn missing_vertex_reports_line() {
        match parse("v 0 0 0\nv 1 0 0\n\nf 1 2 7\n") {
            Err(Error::SceneLoad { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected a load error, got {other:?}"),
        }
        assert!(matches!(parse("v 0 0 zero\n"), Err(Error::SceneLoad { line: 1, .. })));
        assert!(matches!(parse("v 0 0 0\nf 0 1 1\n"), Err(Error::SceneLoad { line: 2, .. })));
    }

    #[test]
    fn quads_negative_indices_and_materials() {
        let text = "mtllib m.mtl\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nusemtl red\nf -4 -3 -2 -1\nusemtl grey\nf 1 3 4\n";
        let s = parse(text).unwrap();
        assert_eq!(s.triangles().len(), 3);
        assert_eq!(s.albedo(s.triangles()[0].material), DVec3::new(0.9, 0.1, 0.1));
        assert_eq!(s.albedo(s.triangles()[2].material), DVec3::splat(0.5));
        assert!(parse("usemtl nothing\n").is_err());
    }

    #[test]
    fn vertex_normals_orient_faces() {
        let s = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 -1\nf 1//1 2//1 3//1\n").unwrap();
        assert_eq!(s.triangles()[0].normal, -DVec3::Z);
    }

    #[test]
    fn bounds_contain_vertices() {
        let s = parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nv -2 5 3\nf 1 2 3\nf 1 2 4\n").unwrap();
        for t in s.triangles() {
            for v in t.vertices {
                assert!(s.bounds().contains(v));
            }
        }
    }
}
