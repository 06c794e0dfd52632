use clap::Parser;
use jpta_cli::commands::{run, Cli};

fn main() {
    // An explicit worker count only changes scheduling, never output bytes;
    // every parallel reduction in the library is order-preserving.
    if let Ok(workers) = std::env::var("JPTA_WORKERS") {
        match workers.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("JPTA_WORKERS must be a positive integer, got '{workers}'");
                std::process::exit(2);
            }
        }
    }

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            let line = e.to_string();
            eprintln!("{}", line.lines().next().unwrap_or("invalid arguments"));
            std::process::exit(2);
        }
    };

    if let Err(e) = run(cli) {
        eprintln!("{}", e.message);
        std::process::exit(e.code);
    }
}
