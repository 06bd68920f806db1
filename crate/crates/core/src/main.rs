use clap::Parser;

fn main() {
    let cli = twistlat::cli::Cli::parse();
    std::process::exit(twistlat::cli::run(&cli));
}
