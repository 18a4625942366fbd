fn main() {
    // WILSONLINE_THREADS caps the worker pool; default is the available
    // parallelism.
    if let Ok(raw) = std::env::var("WILSONLINE_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: WILSONLINE_THREADS must be a positive integer, got {raw:?}");
                std::process::exit(2);
            }
        }
    }
    std::process::exit(wilsonline::cli::run());
}
