use psroth::checks::{all_passed, exact_identity_suite, function_identity_suite};

#[test]
fn exact_identities_pass() {
    let r = exact_identity_suite(7).unwrap();
    for c in &r {
        println!("{} {} {}", c.passed, c.name, c.detail);
    }
    assert!(all_passed(&r));
}

#[test]
fn function_identities_pass() {
    let r = function_identity_suite().unwrap();
    for c in &r {
        println!("{} {} {}", c.passed, c.name, c.detail);
    }
    assert!(all_passed(&r));
}
