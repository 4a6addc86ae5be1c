// SPDX-License-Identifier: MIT OR Apache-2.0

#![forbid(unsafe_code)]

fn main() {
    let code = cpinfer::cli::main_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
