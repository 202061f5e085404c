// SPDX-License-Identifier: Apache-2.0

fn main() {
    let code = gaussteady::cli::run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(i32::from(code));
}
