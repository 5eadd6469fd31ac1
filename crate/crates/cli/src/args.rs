use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvnet::routing::Protocol;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "cvnet",
    version,
    about = "Continuous-variable graph-state networks: generation, squeezing cost, entanglement routing",
    long_about = "Continuous-variable graph-state networks: generation, squeezing cost, entanglement routing.\n\n\
        Outputs are CSV by default, preceded by `#` lines carrying the tool version, the config hash \
        and the master seed. `--format json` emits the same content as one JSON document.\n\n\
        Exit codes: 0 success, 2 usage or input error, 3 numerical failure."
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Master seed. Sample i of a stochastic run uses seed + i.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for surveys and sweeps [default: machine parallelism].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
}

impl Common {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Generate a network and write it in the cvnet-graph v1 format.
    Gen(GenArgs),
    /// Squeezing cost of a network, optionally per mode and against closed forms.
    Cost(CostArgs),
    /// Run routing protocols between two nodes.
    Route(RouteArgs),
    /// Run protocols from one node to every other node.
    Survey(SurveyArgs),
    /// Cost and end-to-end entanglement over a range of sizes and samples.
    Sweep(SweepArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Cost(_) => "cost",
            Command::Route(_) => "route",
            Command::Survey(_) => "survey",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Linear,
    Ring,
    Star,
    Diamond,
    Complete,
    /// Ring where each node links its q nearest neighbors (q/2 per side).
    Circulant,
    /// Hypercubic lattice; size set by --dim and --side.
    Lattice,
    /// k branches of --n-inner nodes between two hubs.
    DiamondChain,
    /// Diamond with consecutive centers linked.
    DiamondInterconnected,
    /// Erdős–Rényi, link probability --p.
    Er,
    /// Barabási–Albert, --k links per newcomer.
    Ba,
    /// Watts–Strogatz, --q neighbors, rewiring --beta.
    Ws,
    /// Duplication model, retention --sigma.
    Pp,
    /// Tiered AS-level Internet model.
    As,
}

impl Kind {
    pub fn is_stochastic(self) -> bool {
        matches!(self, Kind::Er | Kind::Ba | Kind::Ws | Kind::Pp | Kind::As)
    }
}

/// Generator parameters shared by every command that builds a network.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Params {
    /// Network family.
    #[arg(long, value_enum)]
    pub topology: Option<Kind>,
    /// Edge weight g of every CZ link.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Initial squeezing of every node in dB.
    #[arg(long = "squeeze-db", visible_alias = "s", default_value_t = 0.0)]
    pub squeeze_db: f64,
    /// BA links per newcomer; diamond-chain branch count.
    #[arg(long)]
    pub k: Option<usize>,
    /// ER link probability.
    #[arg(long)]
    pub p: Option<f64>,
    /// WS rewiring probability.
    #[arg(long)]
    pub beta: Option<f64>,
    /// WS and circulant neighbor count (even).
    #[arg(long)]
    pub q: Option<usize>,
    /// PP link retention probability.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Lattice dimension (1, 2 or 3).
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Lattice nodes per axis.
    #[arg(long)]
    pub side: Option<usize>,
    /// Lattice variant: square, tri_T or tri_Ttilde.
    #[arg(long, default_value = "square")]
    pub variant: String,
    /// Diamond-chain interior nodes per branch.
    #[arg(long)]
    pub n_inner: Option<usize>,
}

/// A network read from a file or generated inline.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Source {
    /// cvnet-graph v1 file to read instead of generating.
    #[arg(long, conflicts_with = "topology")]
    pub graph: Option<PathBuf>,
    /// Node count for generated networks.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// Node count.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Args, Serialize)]
pub struct CostArgs {
    #[command(flatten)]
    pub source: Source,
    /// Add one row per supermode.
    #[arg(long)]
    pub spectrum: bool,
    /// Add the closed-form or expected cost and the absolute difference.
    #[arg(long)]
    pub analytic: bool,
    /// Independent samples of a random topology.
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct RouteArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub alice: usize,
    #[arg(long)]
    pub bob: usize,
    /// Comma-separated protocols: routing, shortest, allp.
    #[arg(long, value_delimiter = ',', default_value = "routing,shortest,allp", value_parser = parse_protocol)]
    pub protocol: Vec<Protocol>,
    /// Write the final measurement plan here; with several protocols the
    /// protocol name is inserted before the extension.
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SurveyArgs {
    #[command(flatten)]
    pub source: Source,
    /// Alice's node index, or `auto` for the highest-degree node.
    #[arg(long, default_value = "auto")]
    pub alice: AliceChoice,
    /// Comma-separated protocols: routing, shortest, allp.
    #[arg(long, value_delimiter = ',', default_value = "routing,shortest,allp", value_parser = parse_protocol)]
    pub protocol: Vec<Protocol>,
    /// Leave the wall_ms column empty so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cost,
    Logneg,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Sizes as `start:stop:step` (inclusive) or a single value. The size is
    /// the node count, except the side for lattices and the interior nodes
    /// per branch for diamond chains.
    #[arg(long)]
    pub nodes: SizeRange,
    #[command(flatten)]
    pub params: Params,
    /// Independent samples per size for random topologies.
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    /// Quantities to report [default: both where the topology has a far
    /// pair, cost otherwise].
    #[arg(long, value_enum)]
    pub metric: Option<Metric>,
    /// Protocol used for the far-pair log-negativity.
    #[arg(long, default_value = "routing", value_parser = parse_protocol)]
    pub protocol: Protocol,
    /// Add the closed-form or expected cost.
    #[arg(long)]
    pub analytic: bool,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: cvnet::CvnetError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AliceChoice {
    Auto,
    Node(usize),
}

impl FromStr for AliceChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(AliceChoice::Auto);
        }
        s.parse().map(AliceChoice::Node).map_err(|_| format!("expected a node index or `auto`, got '{s}'"))
    }
}

/// Inclusive `start:stop:step` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeRange {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

impl SizeRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step).collect()
    }
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad range '{s}': '{t}' is not a non-negative integer"))
        };
        let range = match parts.as_slice() {
            [one] => {
                let v = num(one)?;
                SizeRange { start: v, stop: v, step: 1 }
            }
            [a, b] => SizeRange { start: num(a)?, stop: num(b)?, step: 1 },
            [a, b, c] => SizeRange { start: num(a)?, stop: num(b)?, step: num(c)? },
            _ => return Err(format!("bad range '{s}': expected start:stop:step")),
        };
        if range.step == 0 {
            return Err(format!("bad range '{s}': step must be positive"));
        }
        if range.start > range.stop {
            return Err(format!("bad range '{s}': start exceeds stop"));
        }
        Ok(range)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges() {
        assert_eq!("10:100:10".parse::<SizeRange>().unwrap().values().len(), 10);
        assert_eq!("5".parse::<SizeRange>().unwrap().values(), vec![5]);
        assert_eq!("3:5".parse::<SizeRange>().unwrap().values(), vec![3, 4, 5]);
        assert_eq!("10:20:7".parse::<SizeRange>().unwrap().values(), vec![10, 17]);
        for bad in ["", "a:b", "10:5:1", "1:5:0", "1:2:3:4", "-1:4"] {
            assert!(bad.parse::<SizeRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn alice_choice() {
        assert_eq!("auto".parse::<AliceChoice>().unwrap(), AliceChoice::Auto);
        assert_eq!("7".parse::<AliceChoice>().unwrap(), AliceChoice::Node(7));
        assert!("hub".parse::<AliceChoice>().is_err());
    }
}
