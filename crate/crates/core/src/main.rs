use clap::Parser;
use toricq::cli::{run, Cli, EXIT_IO_PARSE};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here too; those exit 0.
            let code = if err.use_stderr() { EXIT_IO_PARSE } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli));
}
