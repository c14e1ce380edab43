#![no_main]

use libfuzzer_sys::fuzz_target;
use qmetric_cli::{CliError, ExperimentConfig, RawConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(raw) = RawConfig::from_json(text) else {
        return;
    };
    match ExperimentConfig::resolve(raw) {
        Ok(cfg) => {
            serde_json::to_string(&cfg).expect("resolved config encodes");
        }
        Err(e) => assert!(matches!(e, CliError::Usage(_)), "{e}"),
    }
});
