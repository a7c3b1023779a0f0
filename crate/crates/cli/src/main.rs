//! `seczeta`: evaluate the secondary zeta function and run the analysis
//! toolkit from the command line.

fn main() -> std::process::ExitCode {
    seczeta_cli::run()
}
