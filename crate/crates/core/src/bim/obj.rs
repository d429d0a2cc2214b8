//! Wavefront OBJ export.

use std::fmt::Write as _;

use super::Model3D;

/// One named object per element, coordinates in feet with z up.
pub fn export_obj(model: &Model3D) -> Vec<u8> {
    let mut s = String::from("# sketchbim model\n# units: feet\n");
    let mut base = 1;
    for e in &model.elements {
        let _ = writeln!(s, "o {}", e.source_id);
        for v in &e.mesh.vertices {
            let _ = writeln!(s, "v {:.6} {:.6} {:.6}", v[0], v[1], v[2]);
        }
        for t in &e.mesh.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + base, t[1] + base, t[2] + base);
        }
        base += e.mesh.vertices.len();
    }
    s.into_bytes()
}
