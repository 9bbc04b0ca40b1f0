use clap::Parser;
use gramheight_cli::config::{resolve, Cli};
use gramheight_cli::execute;

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    let code = match resolve(cli).and_then(|cfg| execute(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
