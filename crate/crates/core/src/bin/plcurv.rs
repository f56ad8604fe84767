fn main() {
    plcurv::cli::init_logging();
    let mut stdout = std::io::stdout().lock();
    let code = plcurv::cli::run(std::env::args_os(), &mut stdout);
    std::process::exit(code);
}
