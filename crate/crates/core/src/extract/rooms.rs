//! Rooms from the bounded faces of the noded wall graph.

use std::collections::BTreeSet;

use super::ExtractError;
use crate::geometry::min_caliper_width;
use crate::layout::SNAP_TOL;
use crate::planar::{PlanarGraph, MIN_ROOM_AREA};
use crate::{Room, Wall};

/// Faces narrower than this (minimum caliper width) are slivers.
pub const SLIVER_WIDTH: f64 = 2.0;

/// Bounded faces become rooms. Slivers merge into the neighbouring room that
/// shares the longest boundary by dropping the shared edges from the graph;
/// slivers bordering only the exterior are discarded. Walls are untouched.
pub fn extract_rooms(walls: &[Wall]) -> Result<(Vec<Room>, Vec<String>), ExtractError> {
    let mut g = PlanarGraph::from_walls(walls, SNAP_TOL);
    let mut notes = Vec::new();
    let mut discarded: BTreeSet<Vec<usize>> = BTreeSet::new();
    let key = |hs: &[usize]| {
        let mut k = hs.to_vec();
        k.sort_unstable();
        k
    };
    loop {
        let fs = g.faces();
        let sliver = fs
            .bounded()
            .filter(|(_, f)| !discarded.contains(&key(&f.halfedges)))
            .filter(|(_, f)| min_caliper_width(&f.polygon) < SLIVER_WIDTH)
            .min_by(|a, b| a.1.area.total_cmp(&b.1.area).then(a.0.cmp(&b.0)));
        let Some((f, face)) = sliver else { break };
        let bounded_nb = fs
            .neighbours(&g, f)
            .into_iter()
            .filter(|(n, _)| fs.faces[*n].area > 1e-9)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match bounded_nb {
            Some((n, _)) => {
                let shared: Vec<usize> = face
                    .halfedges
                    .iter()
                    .filter(|&&h| fs.face_of[h ^ 1] == Some(n))
                    .map(|&h| h / 2)
                    .collect();
                notes.push(format!("sliver of width {:.2} ft merged into its neighbour", min_caliper_width(&face.polygon)));
                g.remove_edges(shared);
            }
            None => {
                notes.push(format!("sliver of width {:.2} ft on the exterior dropped", min_caliper_width(&face.polygon)));
                discarded.insert(key(&face.halfedges));
            }
        }
    }
    let fs = g.faces();
    let rooms: Vec<Room> = fs
        .bounded()
        .filter(|(_, f)| f.area >= MIN_ROOM_AREA && !discarded.contains(&key(&f.halfedges)))
        .enumerate()
        .map(|(k, (_, f))| Room {
            id: format!("room{}", k + 1),
            polygon: f.polygon.clone(),
            wall_chain: f.walls.iter().map(|&w| walls[w].id.clone()).collect(),
        })
        .collect();
    if rooms.is_empty() {
        return Err(ExtractError::NoBoundedFace);
    }
    Ok((rooms, notes))
}
