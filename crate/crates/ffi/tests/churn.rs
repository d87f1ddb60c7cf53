use std::ffi::CString;

use mdpforge::examples;
use mdpforge_ffi::*;

#[test]
fn create_destroy_churn_leaks_nothing() {
    let text = CString::new(examples::MULTI_ROUND_NMDP).unwrap();
    let bad = CString::new("state s\naction a\ns & a >\n").unwrap();
    let baseline = mdpforge_handle_count();
    let mut live = Vec::new();
    for i in 0..10_000u64 {
        let mut h = 0;
        assert_eq!(unsafe { mdpforge_create_env(text.as_ptr(), i, &mut h) }, MDPFORGE_OK);
        let mut s = 0;
        assert_eq!(unsafe { mdpforge_reset(h, &mut s) }, MDPFORGE_OK);
        if i % 7 == 0 {
            let dot = mdpforge_render(h);
            unsafe { mdpforge_string_free(dot) };
        }
        if i % 3 == 0 {
            let mut ignored = 0;
            assert_ne!(unsafe { mdpforge_create_env(bad.as_ptr(), i, &mut ignored) }, MDPFORGE_OK);
        }
        live.push(h);
        if live.len() == 16 {
            for h in live.drain(..) {
                assert_eq!(mdpforge_destroy(h), MDPFORGE_OK);
                assert_eq!(mdpforge_destroy(h), MDPFORGE_ERR_STATE);
            }
        }
    }
    for h in live.drain(..) {
        assert_eq!(mdpforge_destroy(h), MDPFORGE_OK);
    }
    assert_eq!(mdpforge_handle_count(), baseline);
}
