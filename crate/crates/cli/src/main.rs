fn main() {
    let result = kr_workbench_cli::run(std::env::args());
    print!("{}", result.stdout);
    eprint!("{}", result.stderr);
    std::process::exit(result.code);
}
