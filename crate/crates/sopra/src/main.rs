//! `sopra validate|infer|decide|explain|query <file>`.

fn main() {
    let color = std::env::var("SOPRA_COLOR").is_ok_and(|v| v == "1");
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = sopra::cli::run(
        std::env::args_os(),
        color,
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    std::process::exit(code);
}
