#![no_main]

use libfuzzer_sys::fuzz_target;
use tdcrack_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = ExperimentConfig::parse(text) else {
        return;
    };
    if config.validate().is_ok() {
        let again =
            ExperimentConfig::parse(&config.to_string()).expect("emitted config must parse");
        assert_eq!(again, config);
    }
});
