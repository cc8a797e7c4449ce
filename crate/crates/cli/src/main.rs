use clap::Parser;

fn main() {
    // Die quietly when stdout closes early (e.g. piped into `head`) like
    // other Unix filters, instead of panicking on the broken pipe.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = chanpure_cli::Cli::parse();
    if let Err(e) = chanpure_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
