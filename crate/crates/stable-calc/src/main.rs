fn main() {
    std::process::exit(stable_calc::cli::cmd_dispatch(
        &std::env::args().collect::<Vec<_>>(),
    ));
}
