use cvnet::netgen::{
    gen_as, gen_ba, gen_circulant, gen_diamond_chain, gen_diamond_interconnected, gen_er, gen_lattice,
    gen_pp, gen_regular, gen_ws, load_edgelist, LatticeVariant, Network, Topology,
};
use cvnet::CvnetError;

use crate::args::{Kind, Params, Source};
use crate::error::CliError;

fn need<T: Copy>(value: Option<T>, flag: &str, kind: Kind) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --topology {}", kind_name(kind))))
}

pub fn kind_name(kind: Kind) -> String {
    clap::ValueEnum::to_possible_value(&kind).map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn regular(kind: Kind) -> Option<Topology> {
    match kind {
        Kind::Linear => Some(Topology::Linear),
        Kind::Ring => Some(Topology::Ring),
        Kind::Star => Some(Topology::Star),
        Kind::Diamond => Some(Topology::Diamond),
        Kind::Complete => Some(Topology::Complete),
        _ => None,
    }
}

/// Generates `kind` with `nodes` nodes (ignored for lattices and diamond
/// chains) and applies the uniform initial squeezing.
pub fn generate(kind: Kind, nodes: Option<usize>, params: &Params, seed: u64) -> Result<Network, CliError> {
    let g = params.g;
    let nodes = || need(nodes, "nodes", kind);
    let net = match kind {
        Kind::Linear | Kind::Ring | Kind::Star | Kind::Diamond | Kind::Complete => {
            gen_regular(regular(kind).expect("regular kind"), nodes()?, g)?
        }
        Kind::Circulant => gen_circulant(nodes()?, need(params.q, "q", kind)?, g)?,
        Kind::Lattice => {
            let variant: LatticeVariant = params.variant.parse()?;
            gen_lattice(params.dim, need(params.side, "side", kind)?, g, variant)?
        }
        Kind::DiamondChain => {
            gen_diamond_chain(need(params.k, "k", kind)?, need(params.n_inner, "n-inner", kind)?, g)?
        }
        Kind::DiamondInterconnected => gen_diamond_interconnected(nodes()?, g)?,
        Kind::Er => gen_er(nodes()?, need(params.p, "p", kind)?, g, seed)?,
        Kind::Ba => gen_ba(nodes()?, need(params.k, "k", kind)?, g, seed)?,
        Kind::Ws => gen_ws(nodes()?, need(params.q, "q", kind)?, need(params.beta, "beta", kind)?, g, seed)?,
        Kind::Pp => gen_pp(nodes()?, need(params.sigma, "sigma", kind)?, g, seed)?,
        Kind::As => gen_as(nodes()?, g, seed)?,
    };
    with_squeezing(net, params.squeeze_db)
}

/// Generates the network of sweep size `size`: the side of a lattice, the
/// branch length of a diamond chain, the node count otherwise.
pub fn generate_sized(kind: Kind, size: usize, params: &Params, seed: u64) -> Result<Network, CliError> {
    let mut params = params.clone();
    match kind {
        Kind::Lattice => params.side = Some(size),
        Kind::DiamondChain => params.n_inner = Some(size),
        _ => {}
    }
    generate(kind, Some(size), &params, seed)
}

fn with_squeezing(net: Network, squeeze_db: f64) -> Result<Network, CliError> {
    if squeeze_db == 0.0 {
        Ok(net)
    } else {
        Ok(net.with_uniform_squeezing(squeeze_db)?)
    }
}

pub fn load(source: &Source, seed: u64) -> Result<Network, CliError> {
    match (&source.graph, source.params.topology) {
        (Some(path), _) => load_edgelist(path).map_err(|e| match e {
            CvnetError::Io(msg) => CliError::Usage(format!("{}: {msg}", path.display())),
            other => CliError::Usage(format!("{}: {other}", path.display())),
        }),
        (None, Some(kind)) => generate(kind, source.nodes, &source.params, seed),
        (None, None) => Err(CliError::Usage("give either --graph or --topology".into())),
    }
}

/// Canonical end-to-end pair of a family, if it has one.
pub fn far_pair(kind: Kind, net: &Network) -> Option<(usize, usize)> {
    let n = net.n();
    match kind {
        Kind::Linear | Kind::Ring | Kind::Star | Kind::Diamond | Kind::Complete => {
            Some(regular(kind)?.far_pair(n))
        }
        Kind::Circulant => Some((0, n / 2)),
        Kind::Lattice | Kind::DiamondChain | Kind::DiamondInterconnected => Some((0, n - 1)),
        _ => None,
    }
}
