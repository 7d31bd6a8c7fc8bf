use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use graphflow::cli::{configure_threads, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    match run(&cli) {
        Ok(o) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(o.stdout.as_bytes());
            let _ = out.flush();
            ExitCode::from(o.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
