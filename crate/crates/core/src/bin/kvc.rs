fn main() {
    std::process::exit(kvc_core::cli_harness::run(std::env::args_os()));
}
