use clap::Parser;

use expdom::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    match cli::run(cli) {
        Ok(()) => {}
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "error": failure.message,
                        "exit_code": failure.code,
                    })
                );
            }
            std::process::exit(failure.code);
        }
    }
}
