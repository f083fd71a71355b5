use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cobord", version, about = "Genera, formal group laws and Chern-Weil identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for every randomized suite.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl Cli {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Genus of CP^n for n = 1..N.
    Genus(GenusArgs),
    /// Formal group law tools.
    #[command(subcommand)]
    Fgl(FglCommand),
    /// Landweber regularity verdicts per prime.
    Landweber(LandweberArgs),
    /// Degree-wise dimensions of Tor_1.
    Tor1(TorArgs),
    /// Chern-Weil identity suites on generated bundle data.
    #[command(subcommand)]
    Cw(CwCommand),
}

#[derive(Args, Debug)]
pub struct GenusArgs {
    /// Built-in name (todd, l_genus, a_hat, one, elliptic, elliptic(d,e)),
    /// a comma-separated list of rational phi_1, phi_2, .., or a JSON file.
    #[arg(long)]
    pub phi: String,
    /// Largest n.
    #[arg(long)]
    pub cpn: u32,
    /// Also compute every value from the multiplicative sequence and
    /// compare.
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug)]
pub struct FglSource {
    /// JSON file with `ring`, `series` and `order`.
    #[arg(long, conflicts_with = "fgl")]
    pub input: Option<PathBuf>,
    /// Built-in law or JSON file (see `landweber --help`).
    #[arg(long)]
    pub fgl: Option<String>,
    /// Truncation order for built-in laws.
    #[arg(long, default_value_t = 6)]
    pub order: u32,
}

#[derive(Subcommand, Debug)]
pub enum FglCommand {
    /// Check unit, commutativity and associativity.
    Validate(FglSource),
    /// The logarithm (rational base only).
    Log(FglSource),
    /// The classifying map from the rational cobordism ring.
    Classify(ClassifyArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub source: FglSource,
    /// Classify the law of a genus instead (same syntax as `genus --phi`).
    #[arg(long, conflicts_with_all = ["input", "fgl"])]
    pub genus: Option<String>,
}

#[derive(Args, Debug)]
pub struct LandweberArgs {
    /// additive, additive-q, multiplicative, multiplicative-poly,
    /// multiplicative-q, universal, or a JSON file.
    #[arg(long)]
    pub fgl: String,
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    pub primes: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    pub stages: u32,
    /// Truncation order for built-in laws; defaults to the order the stages
    /// need.
    #[arg(long)]
    pub order: Option<u32>,
}

#[derive(Args, Debug)]
pub struct TorArgs {
    /// JSON module presentation.
    #[arg(long)]
    pub module: PathBuf,
    /// JSON ring map out of the module's ring.
    #[arg(long)]
    pub map: PathBuf,
    /// Degree window `lo..hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: String,
}

#[derive(Subcommand, Debug)]
pub enum CwCommand {
    /// Integrality, Whitney formula and closedness of Chern forms.
    Chern(CwArgs),
    /// Transgression forms and homotopy invariance of A(o).
    Transgression(CwArgs),
    /// Push-forward squares, composition and pull-back.
    Pushforward(CwArgs),
    /// Curvature axiom, cup and product identities, projection formula.
    Axioms(CwArgs),
    /// Every suite.
    All(CwArgs),
}

#[derive(Args, Debug)]
pub struct CwArgs {
    /// Shipped demo configuration.
    #[arg(long, conflicts_with = "config")]
    pub demo: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub fiber_n: Option<usize>,
    #[arg(long)]
    pub interval_n: Option<usize>,
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub identity_tol: Option<f64>,
}
