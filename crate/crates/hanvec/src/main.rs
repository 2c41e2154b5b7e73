fn main() {
    // Die quietly when stdout closes early (e.g. piped into `head`),
    // matching the behavior of other line-oriented Unix tools.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(hanvec::cli::run(&args));
}
