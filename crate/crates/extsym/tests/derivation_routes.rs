use extsym::quadext::{catalog, CatalogDescriptor, Case};
use extsym::weakext::derivation_space_checked;

fn descriptors() -> Vec<CatalogDescriptor> {
    let mut out = Vec::new();
    for a0 in 0..=2 {
        out.push(CatalogDescriptor::new(Case::TwoA).with_a0(a0));
        for case in [Case::Four, Case::Five] {
            for k in 0..=2 {
                for l in 0..=2 {
                    for m in 0..=2 {
                        out.push(CatalogDescriptor::with_params(case, k, l, m, extsym::exactlin::int(1)).with_a0(a0));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn block_and_generic_derivations_agree() {
    let mut all = descriptors();
    for a0 in 0..=2 {
        for case in [Case::One, Case::TwoB, Case::Three] {
            all.push(CatalogDescriptor::new(case).with_a0(a0));
        }
    }
    for d in all {
        let e = catalog(&d).unwrap();
        assert_eq!(derivation_space_checked(&e).unwrap().routes_agree, Some(true), "{d}");
    }
}
