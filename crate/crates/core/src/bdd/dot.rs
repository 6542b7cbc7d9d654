use std::fmt::Write as _;

use super::{Bdd, NodeId, ROOT, T0, T1};

fn name(id: NodeId) -> String {
    match id {
        T0 => "t0".to_string(),
        T1 => "t1".to_string(),
        _ => format!("n{id}"),
    }
}

/// Solid edges are high children, dashed edges low children.
pub(super) fn render(bdd: &Bdd, show_t0: bool) -> String {
    let mut out = String::from("digraph bdd {\n  node [shape=ellipse];\n");
    for (level, ids) in bdd.levels().iter().enumerate() {
        let _ = write!(out, "  {{ rank=same;");
        for &id in ids {
            let _ = write!(out, " {};", name(id));
        }
        out.push_str(" }\n");
        for &id in ids {
            let label = if id == ROOT {
                "root".to_string()
            } else {
                let (parent, high) = bdd.node(id).parent.expect("internal nodes have a parent");
                let p = bdd.order().at(bdd.node(parent).level) + 1;
                if high {
                    format!("P{p}")
                } else {
                    format!("~P{p}")
                }
            };
            let _ = writeln!(out, "  {} [label=\"{label}\"]; // level {level}", name(id));
        }
    }
    out.push_str("  t1 [shape=box, label=\"1\"];\n");
    if show_t0 {
        out.push_str("  t0 [shape=box, label=\"0\"];\n");
    }
    for ids in bdd.levels() {
        for &id in ids {
            let node = bdd.node(id);
            for high in [true, false] {
                let Some(child) = node.child(high) else { continue };
                if child == T0 && !show_t0 {
                    continue;
                }
                let style = if high { "solid" } else { "dashed" };
                let _ = writeln!(out, "  {} -> {} [style={style}];", name(id), name(child));
            }
        }
    }
    out.push_str("}\n");
    out
}
