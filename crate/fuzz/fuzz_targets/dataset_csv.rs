#![no_main]

use libfuzzer_sys::fuzz_target;
use tdcrack::forward::BoundaryDataSet;

fuzz_target!(|data: &[u8]| {
    let Ok(set) = BoundaryDataSet::read_csv(data) else {
        return;
    };
    let mut out = Vec::new();
    set.write_csv(&mut out).expect("write to memory");
    let again = BoundaryDataSet::read_csv(out.as_slice()).expect("written data must load");
    assert_eq!(again, set);
});
