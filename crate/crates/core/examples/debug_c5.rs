use nilspace_core::filtration::FilteredGroup;
use nilspace_core::verify::{broken_chains, counting_catalog};

fn main() {
    let mut catalog: Vec<FilteredGroup> = Vec::new();
    for p in [2u64, 3] {
        for f in counting_catalog(&[p], 4, 27).unwrap() {
            catalog.push(f);
        }
        for f in broken_chains(p, 12).unwrap() {
            catalog.push(f);
        }
    }
    catalog.dedup();
    for f in &catalog {
        let algebraic = f.is_p_homogeneous();
        let mut all_restrict = true;
        let mut any = false;
        for n in [1usize, 2] {
            match nilspace_core::verify::restriction_test_debug(f, n, 400_000).unwrap() {
                Some(ok) => { any = true; all_restrict &= ok; }
                None => {}
            }
        }
        if any && algebraic != all_restrict {
            println!("DISAGREE alg={algebraic} restrict={all_restrict}: {f:?}");
        }
    }
}
