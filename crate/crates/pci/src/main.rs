use std::process::ExitCode;

fn main() -> ExitCode {
    // Die quietly when the reader of a pipe goes away (`pci lint | head`)
    // instead of panicking on the failed write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    pci::cli::run()
}
