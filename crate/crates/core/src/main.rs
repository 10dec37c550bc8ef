use std::io::Write;

fn main() {
    let mut out = std::io::BufWriter::new(std::io::stdout());
    let code = sudoku_rating::cli::run(std::env::args_os(), &mut out, &mut std::io::stderr());
    let flushed = out.flush();
    std::process::exit(if flushed.is_err() && code == 0 {
        1
    } else {
        code
    });
}
