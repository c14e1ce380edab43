#![no_main]

use libfuzzer_sys::fuzz_target;
use qmetric::Trace;

fuzz_target!(|data: &[u8]| {
    let Ok(t) = serde_json::from_slice::<Trace>(data) else {
        return;
    };
    assert_eq!(t.weights().len(), t.shape().num_blocks());
    assert!(t.weights().iter().all(|w| w.is_finite() && *w > 0.0));
    assert!(t.density_norm_bound().is_finite());
    let text = serde_json::to_string(&t).expect("encodes");
    assert_eq!(serde_json::from_str::<Trace>(&text).expect("re-decodes"), t);
});
