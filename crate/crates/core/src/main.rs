use clap::Parser;

fn main() {
    let cli = kbst::cli::Cli::parse();
    std::process::exit(kbst::cli::run(cli));
}
