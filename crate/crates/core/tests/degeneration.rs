use painleve_core::degeneration::*;

#[test]
fn confluenced_system_tends_to_d4() {
    let r = verify_system_confluence();
    println!("{}", r.summary());
    assert!(r.passed(), "{}", r.summary());
}

#[test]
fn subgroup_converges_to_d4_reflections() {
    for r in verify_group_convergence() {
        println!("{}", r.summary());
        assert!(r.passed(), "{}", r.summary());
    }
}

#[test]
fn confluenced_field_depends_on_eps_before_the_limit() {
    let field = substitute_confluence(&ConfluenceSubstitution::new()).unwrap();
    assert!(field.iter().any(|(_, e)| e.depends_on(painleve_core::algebra::Var::EPS)));
    let limit = epsilon_limit(&field).unwrap();
    assert!(limit.iter().all(|(_, e)| !e.depends_on(painleve_core::algebra::Var::EPS)));
}
