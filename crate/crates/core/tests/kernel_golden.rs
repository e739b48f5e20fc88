//! Hand-built cells the kernel must accept.

mod common;

#[test]
fn golden_cells_check() {
    for (label, outcome) in common::golden::kernel_golden() {
        assert!(outcome.is_ok(), "{label}: {}", outcome.unwrap_err());
    }
}

#[test]
fn swapped_unitor_endpoints_are_rejected() {
    use cattforge::kernel::check_head;
    use cattforge::pasting::{compose, id, pasting_context};
    use cattforge::syntax::{Ctx, Name, Tm, Ty};
    let n = Name::new;
    let ctx = Ctx::new(vec![
        (n("x"), Ty::obj()),
        (n("y"), Ty::obj()),
        (n("f"), Ty::arr(Ty::obj(), Tm::var(n("x")), Tm::var(n("y")))),
    ])
    .unwrap();
    let ps = pasting_context(&ctx).unwrap();
    // id_y alone does not use f, so it is neither full nor a boundary composite.
    let idy = id(&Tm::var(n("y")), &ctx).unwrap();
    let fy = compose(0, &[Tm::var(n("f")), idy.clone()], &ctx).unwrap();
    let bad = ps.coh(&idy, &fy).unwrap();
    assert!(check_head(bad.as_coh().unwrap().0).is_err());
}
