//! `--aux` syntax: `chain:1,2,3;4,5`, `star:root=1;root=4`, `chain`,
//! `star`, or `edges:1>2,2>3`. Components are separated by `;` and named
//! by vertex ids.

use crnlap::{AuxKind, AuxTree, LabeledDigraph, Scalar};
use serde_json::{json, Value};

use crate::error::CliError;

fn vertex<T: Scalar>(g: &LabeledDigraph<T>, id: &str) -> Result<usize, CliError> {
    g.index_of(id.trim())
        .ok_or_else(|| CliError::Usage(format!("--aux names unknown vertex `{}`", id.trim())))
}

pub fn parse_aux<T: Scalar>(g: &LabeledDigraph<T>, spec: &str) -> Result<AuxTree, CliError> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    let parts: Vec<&str> = body.split(';').map(str::trim).filter(|p| !p.is_empty()).collect();
    match (kind.trim(), parts.is_empty()) {
        ("chain", true) => Ok(AuxTree::canonical_chain(g)),
        ("star", true) => Ok(AuxTree::canonical_star(g)),
        ("chain", false) => {
            let orders = parts
                .iter()
                .map(|p| p.split(',').map(|id| vertex(g, id)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AuxTree::chain(g, &orders)?)
        }
        ("star", false) => {
            let roots = parts
                .iter()
                .map(|p| vertex(g, p.strip_prefix("root=").unwrap_or(p)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AuxTree::star(g, &roots)?)
        }
        ("edges", false) => {
            let edges = parts
                .iter()
                .flat_map(|p| p.split(','))
                .map(|pair| {
                    let (a, b) = pair
                        .split_once('>')
                        .ok_or_else(|| CliError::Usage(format!("edge `{pair}` must read `from>to`")))?;
                    Ok((vertex(g, a)?, vertex(g, b)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(AuxTree::from_edges(g, &edges)?)
        }
        _ => Err(CliError::Usage(format!(
            "--aux `{spec}` must start with `chain`, `star` or `edges:`"
        ))),
    }
}

/// Spec string that [`parse_aux`] maps back to the same tree.
pub fn aux_spec<T: Scalar>(g: &LabeledDigraph<T>, aux: &AuxTree) -> String {
    let comps = g.scc_partition();
    match aux.kind {
        AuxKind::Chain => {
            let orders = aux.chain_orders(g).expect("chain tree");
            let parts: Vec<String> = orders
                .iter()
                .filter(|o| o.len() > 1)
                .map(|o| o.iter().map(|&v| g.vertex_id(v)).collect::<Vec<_>>().join(","))
                .collect();
            format!("chain:{}", parts.join(";"))
        }
        AuxKind::Star => {
            let roots: Vec<String> = comps
                .iter()
                .map(|comp| {
                    let root = comp
                        .iter()
                        .copied()
                        .find(|&v| aux.edges.iter().all(|e| e.source != v))
                        .expect("star components have a root");
                    format!("root={}", g.vertex_id(root))
                })
                .collect();
            format!("star:{}", roots.join(";"))
        }
        AuxKind::General => {
            let pairs: Vec<String> = aux.id_pairs(g).iter().map(|(a, b)| format!("{a}>{b}")).collect();
            format!("edges:{}", pairs.join(","))
        }
    }
}

pub fn aux_json<T: Scalar>(g: &LabeledDigraph<T>, aux: &AuxTree) -> Value {
    let kind = match aux.kind {
        AuxKind::Chain => "chain",
        AuxKind::Star => "star",
        AuxKind::General => "general",
    };
    let edges: Vec<Value> = aux.id_pairs(g).into_iter().map(|(a, b)| json!([a, b])).collect();
    json!({ "kind": kind, "spec": aux_spec(g, aux), "edges": edges })
}
