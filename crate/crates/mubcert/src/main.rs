use clap::Parser;

use mubcert::cli::{run, Cli};

fn main() {
    // MUBCERT_THREADS caps internal parallelism; unset means library default.
    if let Ok(value) = std::env::var("MUBCERT_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
    let cli = Cli::parse();
    std::process::exit(run(cli));
}
