use pyo3::ffi::c_str;
use pyo3::prelude::*;

#[test]
fn module_runs_in_an_embedded_interpreter() {
    tropcert_py::register();
    Python::initialize();
    Python::attach(|py| {
        py.run(
            c_str!(
                r#"
import tropcert
s = tropcert.System.bundled("binomial")
r = tropcert.certify(s)
assert r.degree == 8, r.degree
c = r.certificates[0]
assert c.tropism == [4, -4, -1]
assert c.verify(s) == "exact-zero"
assert c.degree_by_hyperplane() == 8
assert tropcert.mixed_volume(tropcert.System.cyclic(4)) == 16
assert len(tropcert.solve(tropcert.System.parse("x^2 - 2; y*x - 1;"))) == 2
try:
    tropcert.System.bundled("nope")
    raise AssertionError
except ValueError:
    pass
"#
            ),
            None,
            None,
        )
        .unwrap_or_else(|e| panic!("{e}"));
    });
}
