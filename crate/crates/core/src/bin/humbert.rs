use std::io::Write;
use std::process::ExitCode;

use humbert::cli::{dispatch, parse_args, EXIT_OK};

fn main() -> ExitCode {
    let outcome = match parse_args(std::env::args_os()) {
        Ok(cfg) => {
            let o = dispatch(&cfg);
            if cfg.out.is_some() && o.code == EXIT_OK {
                return ExitCode::SUCCESS;
            }
            o
        }
        Err(o) => o,
    };
    let text = outcome.output.as_bytes();
    if outcome.code == EXIT_OK {
        let _ = std::io::stdout().write_all(text);
    } else {
        let _ = std::io::stderr().write_all(text);
    }
    ExitCode::from(outcome.code as u8)
}
