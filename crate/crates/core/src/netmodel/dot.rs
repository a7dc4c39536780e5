use std::fmt::Write;

use super::{Annotations, ChannelSpec, Network, UsageBudget};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn channel_label(ch: &ChannelSpec) -> String {
    match ch {
        ChannelSpec::LossyOptical { eta } => format!("lossy eta={eta}"),
        ChannelSpec::Custom { q_cap, esq_upper } => {
            format!("custom q={q_cap} esq<={esq_upper}")
        }
    }
}

fn usage_label(u: &UsageBudget) -> String {
    match u {
        UsageBudget::Count(v) => format!("count {v}"),
        UsageBudget::Frequency(v) => format!("freq {v}"),
        UsageBudget::Rate(v) => format!("rate {v}"),
    }
}

/// Renders `net` as a Graphviz digraph with channel parameters on the edge
/// labels.
///
/// When `annotations` is given, each annotated edge gets its annotation
/// appended to the label, and edges are styled `solid` if their annotation
/// starts with `"used"` and `dashed` otherwise (including unannotated edges).
/// Without annotations no style is emitted. Output is deterministic.
pub fn export_dot(net: &Network, annotations: Option<&Annotations>) -> String {
    let mut out = String::new();
    out.push_str("digraph network {\n");
    out.push_str("  node [shape=circle];\n");
    for n in net.nodes() {
        if n == net.alice() || n == net.bob() {
            let role = if n == net.alice() { "alice" } else { "bob" };
            writeln!(
                out,
                "  {} [shape=doublecircle, xlabel={}];",
                quote(n.as_str()),
                quote(role)
            )
            .unwrap();
        } else {
            writeln!(out, "  {};", quote(n.as_str())).unwrap();
        }
    }
    for e in net.edges() {
        let mut label = format!(
            "{}\n{}\n{}",
            e.id,
            channel_label(&e.channel),
            usage_label(&e.usage)
        );
        let mut attrs = Vec::new();
        if let Some(ann) = annotations {
            let note = ann.get(&e.id);
            if let Some(note) = note {
                label.push('\n');
                label.push_str(note);
            }
            let used = note.is_some_and(|n| n.starts_with("used"));
            attrs.push(format!("style={}", if used { "solid" } else { "dashed" }));
        }
        attrs.insert(0, format!("label={}", quote(&label)));
        writeln!(
            out,
            "  {} -> {} [{}];",
            quote(e.tail.as_str()),
            quote(e.head.as_str()),
            attrs.join(", ")
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
