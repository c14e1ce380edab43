use clap::Parser;
use qmetric_cli::{run_cli, RawConfig};

fn main() {
    std::process::exit(run_cli(RawConfig::parse()));
}
