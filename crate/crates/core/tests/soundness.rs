//! Every YES drawing produced on generated instances passes the independent
//! validator, across all families and with outer bends.

use bendext::cli_io::generate::{generate, Family, GenSpec};
use bendext::geometry_core::Rational;
use bendext::extension_solver::{solve, Verdict};
use bendext::verifier::validate_drawing;

#[test]
fn generated_yes_drawings_validate() {
    let mut yes = 0;
    let mut no = 0;
    for seed in 0..40u64 {
        for family in Family::ALL {
            let n = 5 + (seed as usize * 7) % 16;
            let m = (seed as usize) % (n - 2);
            let mut spec = GenSpec::new(family, n, m, seed);
            if seed % 3 == 0 {
                spec = spec.with_outer_bends(Rational::new(1, 3));
            }
            let inst = match generate(&spec) {
                Ok(i) => i,
                Err(e) => panic!("{spec:?}: {e}"),
            };
            let sol = solve(&inst).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
            match &sol.verdict {
                Verdict::Yes(d) => {
                    let report = validate_drawing(&inst, d);
                    assert!(report.ok, "{spec:?}: {:?}", report.violations);
                    yes += 1;
                }
                Verdict::No(_) => no += 1,
            }
        }
    }
    assert!(yes > no, "yes={yes} no={no}");
}
