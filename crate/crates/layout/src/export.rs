use crate::{LayoutError, Result, TriangleLayout};
use std::fmt::Write;

pub fn layout_json(layout: &TriangleLayout) -> String {
    serde_json::to_string_pretty(layout).expect("layouts always serialize")
}

pub fn parse_layout_json(text: &str) -> Result<TriangleLayout> {
    serde_json::from_str(text).map_err(|e| LayoutError::Parse(e.to_string()))
}

/// One row per qubit role: `triangle,layer,role,row,col`. Layers count from 1
/// at the root; shared vertices appear once per triangle that uses them.
pub fn layout_csv(layout: &TriangleLayout) -> String {
    let mut layer = vec![1usize; layout.len()];
    let mut out = String::from("triangle,layer,role,row,col\n");
    for (i, t) in layout.triangles.iter().enumerate() {
        if let Some((p, _)) = t.parent {
            if p < i {
                layer[i] = layer[p] + 1;
            }
        }
        for (role, q) in [("input", t.input), ("address", t.address), ("left", t.left), ("right", t.right)] {
            writeln!(out, "{i},{},{role},{},{}", layer[i], q.row, q.col).expect("writing to a String");
        }
    }
    out
}
