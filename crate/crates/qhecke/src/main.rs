use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let run = qhecke::execute(std::env::args_os());
    if !run.stderr.is_empty() {
        eprint!("{}", run.stderr);
    }
    match &run.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &run.stdout) {
                eprintln!("error: {}: {}", path.display(), e);
                return ExitCode::from(4);
            }
        }
        None => {
            let _ = std::io::stdout().write_all(run.stdout.as_bytes());
        }
    }
    ExitCode::from(run.code as u8)
}
