use std::ffi::{c_char, CString};
use std::path::Path;
use std::ptr;

use boolgebra_ffi::*;

fn bench(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/benchmarks").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe { bg_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn read_optimize_and_verify() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(bg_aig_read(bench("orchestration21.aag").as_ptr(), &mut g), BgStatus::BgOk);
        assert_eq!(bg_aig_size(g), 21);
        assert_eq!(bg_aig_num_inputs(g), 9);
        assert_eq!(bg_aig_num_outputs(g), 6);
        let mut sizes = Vec::new();
        for op in [BgOp::BgRw, BgOp::BgRs, BgOp::BgRf] {
            let mut h = ptr::null_mut();
            assert_eq!(bg_standalone(g, op, &mut h), BgStatus::BgOk);
            assert_eq!(bg_equivalent(g, h, 0, 0), BgStatus::BgOk);
            sizes.push(bg_aig_size(h));
            bg_aig_free(h);
        }
        assert_eq!(sizes, vec![19, 20, 17]);
        let mut base = BgFlowResult::default();
        assert_eq!(bg_baselines(g, &mut base), BgStatus::BgOk);
        assert_eq!((base.rw_size, base.rs_size, base.rf_size), (19, 20, 17));
        let codes = vec![2u8; bg_decision_len(g)];
        let mut h = ptr::null_mut();
        assert_eq!(bg_orchestrate(g, codes.as_ptr(), codes.len(), &mut h), BgStatus::BgOk);
        assert_eq!(bg_aig_size(h), 17);
        bg_aig_free(h);
        bg_aig_free(g);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        let missing = CString::new("/nonexistent/x.aag").unwrap();
        assert_eq!(bg_aig_read(missing.as_ptr(), &mut g), BgStatus::BgErrIo);
        assert!(g.is_null());
        assert!(!last_error().is_empty());
        let junk = b"aag 1 2\n";
        assert_eq!(bg_aig_parse(junk.as_ptr(), junk.len(), &mut g), BgStatus::BgErrParse);
        assert_eq!(bg_aig_read(ptr::null(), &mut g), BgStatus::BgErrNull);
        assert_eq!(last_error(), "null pointer argument");
        assert_eq!(bg_aig_read(bench("c17.aag").as_ptr(), &mut g), BgStatus::BgOk);
        let bad = vec![7u8; bg_decision_len(g)];
        let mut h = ptr::null_mut();
        assert_eq!(bg_orchestrate(g, bad.as_ptr(), bad.len(), &mut h), BgStatus::BgErrConfig);
        let short = [0u8; 2];
        assert_eq!(bg_orchestrate(g, short.as_ptr(), short.len(), &mut h), BgStatus::BgErrConfig);
        let mut other = ptr::null_mut();
        assert_eq!(bg_aig_read(bench("adder4.aag").as_ptr(), &mut other), BgStatus::BgOk);
        assert_eq!(bg_equivalent(g, other, 0, 0), BgStatus::BgErrNotEquivalent);
        let mut m = ptr::null_mut();
        assert_eq!(bg_model_load(bench("c17.aag").as_ptr(), &mut m), BgStatus::BgErrModel);
        bg_aig_free(other);
        bg_aig_free(g);
        bg_aig_free(ptr::null_mut());
        assert_eq!(bg_aig_size(ptr::null()), 0);
    }
}

#[test]
fn flow_through_the_interface() {
    use boolgebra::predictor::{save_model, Lineage, Model, ModelConfig};
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    save_model(&Model::new(ModelConfig::tiny(1)).unwrap(), Lineage::default(), &path).unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(bg_model_load(cpath.as_ptr(), &mut m), BgStatus::BgOk);
        let mut g = ptr::null_mut();
        assert_eq!(bg_aig_read(bench("sop8.aag").as_ptr(), &mut g), BgStatus::BgOk);
        let mut res = BgFlowResult::default();
        let mut best = ptr::null_mut();
        assert_eq!(bg_flow(g, m, 40, 5, 3, &mut res, &mut best), BgStatus::BgOk);
        assert_eq!(res.original_size, bg_aig_size(g));
        assert_eq!(res.best_size, bg_aig_size(best));
        assert_eq!(res.rejected, 0);
        assert_eq!(bg_equivalent(g, best, 0, 0), BgStatus::BgOk);
        assert_eq!(bg_flow(g, m, 4, 5, 3, &mut res, ptr::null_mut()), BgStatus::BgErrConfig);
        let out = CString::new(dir.path().join("best.aag").to_str().unwrap()).unwrap();
        assert_eq!(bg_aig_write(best, out.as_ptr()), BgStatus::BgOk);
        bg_aig_free(best);
        bg_aig_free(g);
        bg_model_free(m);
    }
}
