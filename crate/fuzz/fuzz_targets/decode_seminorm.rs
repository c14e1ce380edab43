#![no_main]

use libfuzzer_sys::fuzz_target;
use qmetric::Seminorm;

fuzz_target!(|data: &[u8]| {
    // bound the rank check to small dimensions
    if data.len() > 4096 {
        return;
    }
    let Ok(l) = serde_json::from_slice::<Seminorm>(data) else {
        return;
    };
    assert!(l.shape().is_commutative());
    assert_eq!(l.dim(), l.shape().num_blocks());
    for c in l.functionals() {
        let sum: f64 = c.iter().sum();
        let mass: f64 = c.iter().map(|v| v.abs()).sum();
        assert!(sum.abs() <= 1e-12 * mass.max(1.0));
    }
    let text = serde_json::to_string(&l).expect("encodes");
    assert_eq!(serde_json::from_str::<Seminorm>(&text).expect("re-decodes"), l);
});
