#![no_main]

use libfuzzer_sys::fuzz_target;

#[allow(dead_code)]
#[path = "../../crates/core/tests/parse_checks/mod.rs"]
mod parse_checks;

fuzz_target!(|data: &[u8]| parse_checks::config_override(data));
