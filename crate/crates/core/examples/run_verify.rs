fn main() {
    let level = if std::env::args().any(|a| a == "full") {
        nilspace_core::verify::Level::Full
    } else {
        nilspace_core::verify::Level::Quick
    };
    let results = nilspace_core::verify::run(level, 42, None);
    for r in &results {
        println!("{}", r.line());
    }
    if !results.iter().all(|r| r.passed) {
        std::process::exit(1);
    }
}
