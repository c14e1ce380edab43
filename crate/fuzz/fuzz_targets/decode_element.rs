#![no_main]

use libfuzzer_sys::fuzz_target;
use qmetric::Element;

fuzz_target!(|data: &[u8]| {
    let Ok(e) = serde_json::from_slice::<Element>(data) else {
        return;
    };
    assert_eq!(e.blocks().len(), e.shape().num_blocks());
    for (b, &n) in e.blocks().iter().zip(e.shape().block_dims()) {
        assert_eq!((b.nrows(), b.ncols()), (n, n));
        assert!(b.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
    let text = serde_json::to_string(&e).expect("encodes");
    assert_eq!(serde_json::from_str::<Element>(&text).expect("re-decodes"), e);
});
