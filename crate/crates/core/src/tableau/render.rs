use std::fmt::Write as _;

use super::{Tableau, TreeNode};

/// Indented tree: the input formulae first, then one line per fork
/// alternative, with closed leaves marked `⊥`.
pub fn render_text(t: &Tableau) -> String {
    let mut out = String::new();
    for f in &t.input {
        let _ = writeln!(out, "{}", f.pretty());
    }
    if let Some(reason) = &t.nodes[0].closed {
        let _ = writeln!(out, "⊥  [{reason}]");
    }
    let children = &t.nodes[0].children;
    for (i, &c) in children.iter().enumerate() {
        write_node(&mut out, t, c, "", i + 1 == children.len());
    }
    let _ = writeln!(out);
    let mut k = 0;
    for b in &t.branches {
        if b.is_open() {
            k += 1;
            let _ = writeln!(out, "B{k} = {b}");
        }
    }
    if k == 0 {
        out.push_str("no open branches\n");
    }
    out
}

fn write_node(out: &mut String, t: &Tableau, id: usize, prefix: &str, last: bool) {
    let node: &TreeNode = &t.nodes[id];
    let connector = if last { "└─ " } else { "├─ " };
    let _ = write!(out, "{prefix}{connector}{}", node.label);
    if let Some(reason) = &node.closed {
        let _ = write!(out, "  ⊥ [{reason}]");
    }
    out.push('\n');
    let child_prefix = format!("{prefix}{}", if last { "   " } else { "│  " });
    for (i, &c) in node.children.iter().enumerate() {
        write_node(out, t, c, &child_prefix, i + 1 == node.children.len());
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz description: one node per tree node, one edge per fork.
pub fn render_dot(t: &Tableau) -> String {
    let mut out = String::from("digraph tableau {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (id, node) in t.nodes.iter().enumerate() {
        let label = if id == 0 {
            t.input
                .iter()
                .map(|f| f.pretty().to_string())
                .collect::<Vec<_>>()
                .join("\\l")
                + "\\l"
        } else {
            escape(&node.label)
        };
        let label = if id == 0 { escape_keep_breaks(&label) } else { label };
        match &node.closed {
            Some(reason) => {
                let _ = writeln!(
                    out,
                    "  n{id} [label=\"{label}\\n⊥\", tooltip=\"{}\", style=dashed];",
                    escape(reason)
                );
            }
            None => {
                let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
            }
        }
    }
    for (id, node) in t.nodes.iter().enumerate() {
        for c in &node.children {
            let _ = writeln!(out, "  n{id} -> n{c};");
        }
    }
    out.push_str("}\n");
    out
}

fn escape_keep_breaks(s: &str) -> String {
    s.replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use crate::formula::Formula;
    use crate::tableau::{build_tableau, render_dot, render_text};

    #[test]
    fn text_tree_marks_closed_leaf() {
        let t = build_tableau(&[
            Formula::atom("p"),
            Formula::implies(Formula::atom("p"), Formula::ought(Formula::atom("q"))),
        ])
        .unwrap();
        let s = render_text(&t);
        assert_eq!(
            s,
            "p\np → □q\n├─ ¬p  ⊥ [p, ¬p]\n└─ □q\n\nB1 = {p, □q}\n"
        );
    }

    #[test]
    fn dot_has_an_edge_per_fork() {
        let t = build_tableau(&[Formula::or(Formula::atom("p"), Formula::atom("q"))]).unwrap();
        let s = render_dot(&t);
        assert!(s.starts_with("digraph tableau {"));
        assert_eq!(s.matches("->").count(), 2);
    }
}
