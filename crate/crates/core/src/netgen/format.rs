//! Text format for networks.
//!
//! ```text
//! cvnet-graph v1
//! n 3
//! squeeze_db uniform 0
//! 0 1 1.0
//! 1 2 1.0
//! ```
//!
//! The header line is mandatory. `n` defaults to one more than the largest
//! edge endpoint and `squeeze_db` to `uniform 0`; per-node squeezing is
//! written `squeeze_db s_0 s_1 ...`. Edge lines are `i j [w]` with weight 1
//! when omitted. `#` starts a comment. Comments of the form
//! `# topology: <name>`, `# seed: <u64>` and `# param <key> = <value>`
//! restore the network metadata.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::{Network, NetworkMeta};
use crate::error::{CvnetError, Result};

pub const HEADER: &str = "cvnet-graph v1";

enum Squeeze {
    Uniform(f64),
    PerNode(Vec<f64>),
}

pub fn load_edgelist(path: impl AsRef<Path>) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    parse_network(&text)
}

pub fn parse_network(text: &str) -> Result<Network> {
    let mut header_seen = false;
    let mut n_decl: Option<usize> = None;
    let mut squeeze = Squeeze::Uniform(0.0);
    let mut meta = NetworkMeta::default();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen: HashMap<(usize, usize), (f64, usize)> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let perr = |msg: String| CvnetError::Parse { line: line_no, msg };
        let (content, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim())),
            None => (raw, None),
        };
        if let Some(c) = comment {
            read_meta_comment(c, &mut meta);
        }
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if !header_seen {
            if content != HEADER {
                return Err(perr(format!("expected header '{HEADER}', found '{content}'")));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "n" => {
                if fields.len() != 2 {
                    return Err(perr("expected 'n <count>'".into()));
                }
                let n: usize =
                    fields[1].parse().map_err(|_| perr(format!("bad node count '{}'", fields[1])))?;
                if n == 0 {
                    return Err(perr("node count must be positive".into()));
                }
                n_decl = Some(n);
            }
            "squeeze_db" => {
                let parse_f = |s: &str| -> Result<f64> {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| perr(format!("bad squeezing value '{s}'")))
                };
                squeeze = if fields.get(1) == Some(&"uniform") {
                    if fields.len() != 3 {
                        return Err(perr("expected 'squeeze_db uniform <s>'".into()));
                    }
                    Squeeze::Uniform(parse_f(fields[2])?)
                } else {
                    Squeeze::PerNode(fields[1..].iter().map(|s| parse_f(s)).collect::<Result<_>>()?)
                };
            }
            _ => {
                if !(2..=3).contains(&fields.len()) {
                    return Err(perr(format!("expected edge 'i j [w]', found '{content}'")));
                }
                let idx_of = |s: &str| -> Result<usize> {
                    s.parse().map_err(|_| perr(format!("bad node index '{s}'")))
                };
                let i = idx_of(fields[0])?;
                let j = idx_of(fields[1])?;
                let w = match fields.get(2) {
                    Some(s) => s
                        .parse::<f64>()
                        .ok()
                        .filter(|w| w.is_finite() && *w >= 0.0)
                        .ok_or_else(|| perr(format!("bad weight '{s}'")))?,
                    None => 1.0,
                };
                if i == j {
                    return Err(CvnetError::SelfLoop { line: line_no, node: i });
                }
                let key = (i.min(j), i.max(j));
                if let Some(&(first, _)) = seen.get(&key) {
                    if first != w {
                        return Err(CvnetError::AsymmetricWeight { line: line_no, i, j, first, second: w });
                    }
                    return Err(CvnetError::DuplicateEdge { line: line_no, i, j });
                }
                seen.insert(key, (w, line_no));
                edges.push((i, j, w));
            }
        }
    }
    if !header_seen {
        return Err(CvnetError::Parse { line: 1, msg: format!("missing header '{HEADER}'") });
    }
    let max_idx = edges.iter().map(|&(i, j, _)| i.max(j)).max();
    let n = match (n_decl, max_idx) {
        (Some(n), Some(m)) if m >= n => {
            let line = edges
                .iter()
                .find(|&&(i, j, _)| i.max(j) == m)
                .and_then(|&(i, j, _)| seen.get(&(i.min(j), i.max(j))).map(|&(_, l)| l))
                .unwrap_or(0);
            return Err(CvnetError::Parse { line, msg: format!("node index {m} out of range for n = {n}") });
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(CvnetError::Parse { line: 0, msg: "no 'n' line and no edges".into() }),
    };
    let squeeze_db = match squeeze {
        Squeeze::Uniform(s) => vec![s; n],
        Squeeze::PerNode(v) => v,
    };
    let mut adj = DMatrix::zeros(n, n);
    for (i, j, w) in edges {
        adj[(i, j)] = w;
        adj[(j, i)] = w;
    }
    Network::new(adj, squeeze_db, meta)
}

fn read_meta_comment(c: &str, meta: &mut NetworkMeta) {
    if let Some(t) = c.strip_prefix("topology:") {
        meta.topology = t.trim().to_string();
    } else if let Some(s) = c.strip_prefix("seed:") {
        meta.seed = s.trim().parse().ok();
    } else if let Some(p) = c.strip_prefix("param ") {
        if let Some((k, v)) = p.split_once('=') {
            if let Ok(v) = v.trim().parse() {
                meta.params.insert(k.trim().to_string(), v);
            }
        }
    }
}

pub fn write_network(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let meta = net.meta();
    if !meta.topology.is_empty() {
        let _ = writeln!(out, "# topology: {}", meta.topology);
    }
    if let Some(seed) = meta.seed {
        let _ = writeln!(out, "# seed: {seed}");
    }
    for (k, v) in &meta.params {
        let _ = writeln!(out, "# param {k} = {v}");
    }
    let _ = writeln!(out, "n {}", net.n());
    match net.uniform_squeeze_db() {
        Some(s) => {
            let _ = writeln!(out, "squeeze_db uniform {s}");
        }
        None => {
            let vals: Vec<String> = net.node_squeeze_db().iter().map(|s| s.to_string()).collect();
            let _ = writeln!(out, "squeeze_db {}", vals.join(" "));
        }
    }
    for (i, j, w) in net.edges() {
        let _ = writeln!(out, "{i} {j} {w}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{gen_er, gen_regular, Topology};
    use proptest::prelude::*;

    #[test]
    fn minimal_path_file() {
        let net = parse_network("cvnet-graph v1\n0 1 1.0\n1 2 1.0\n").unwrap();
        assert_eq!(net.adj(), gen_regular(Topology::Linear, 3, 1.0).unwrap().adj());
        assert_eq!(net.node_squeeze_db(), &[0.0; 3]);
    }

    #[test]
    fn isolated_nodes_from_header() {
        let net = parse_network("cvnet-graph v1\nn 5\n").unwrap();
        assert_eq!((net.n(), net.edge_count()), (5, 0));
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            parse_network("cvnet-graph v1\nn 3\n2 2 1.0\n"),
            Err(CvnetError::SelfLoop { line: 3, node: 2 })
        ));
        assert!(matches!(
            parse_network("cvnet-graph v1\n0 1 1\n1 0 1\n"),
            Err(CvnetError::DuplicateEdge { line: 3, .. })
        ));
        assert!(matches!(
            parse_network("cvnet-graph v1\n0 1 1\n1 0 2\n"),
            Err(CvnetError::AsymmetricWeight { line: 3, .. })
        ));
        assert!(matches!(parse_network("cvnet-graph v1\n0 x 1\n"), Err(CvnetError::Parse { line: 2, .. })));
        assert!(matches!(parse_network("0 1 1\n"), Err(CvnetError::Parse { line: 1, .. })));
        assert!(parse_network("cvnet-graph v1\nn 2\n0 5 1\n").is_err());
        assert!(parse_network("cvnet-graph v1\n0 1 -1\n").is_err());
        assert!(parse_network("cvnet-graph v1\nn 2\nsqueeze_db 1 2 3\n").is_err());
    }

    #[test]
    fn comments_and_per_node_squeezing() {
        let text = "# leading comment\ncvnet-graph v1\nn 3 # three nodes\nsqueeze_db 0 5 10\n0 2\n";
        let net = parse_network(text).unwrap();
        assert_eq!(net.node_squeeze_db(), &[0.0, 5.0, 10.0]);
        assert_eq!(net.weight(0, 2), 1.0);
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d5.graph");
        let net = gen_regular(Topology::Diamond, 5, 1.0).unwrap();
        std::fs::write(&path, write_network(&net)).unwrap();
        assert_eq!(load_edgelist(&path).unwrap(), net);
    }

    proptest! {
        #[test]
        fn write_parse_round_trip(n in 1usize..25, p in 0.0f64..1.0, g in 0.1f64..3.0, seed in any::<u64>(), s in -3.0f64..12.0) {
            let net = gen_er(n, p, g, seed).unwrap().with_uniform_squeezing(s).unwrap();
            prop_assert_eq!(parse_network(&write_network(&net)).unwrap(), net);
        }
    }
}
