//! Driving the command line interface from code: the same entry point the
//! `snlab` binary uses.
//!
//! Run with `cargo run --example command_line`.

fn main() {
    let runs: [&[&str]; 3] = [
        &["snlab", "zoo", "list", "--format", "csv"],
        &["snlab", "profile", "--space", "harmonic", "--k", "3", "--n-max", "5", "--format", "csv"],
        &["snlab", "zoom", "--space", "free-group", "--rank", "2", "--horizon", "4", "--format", "csv"],
    ];
    for args in runs {
        let code = snlab::cli::run(args.iter().copied());
        println!("exit code {code}\n");
    }
}
