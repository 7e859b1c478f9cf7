use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn run(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "pyrbfw").unwrap();
        pyrbfw::pyrbfw(&m).unwrap();
        let g = PyDict::new(py);
        g.set_item("pyrbfw", m).unwrap();
        py.run(code, Some(&g), None).unwrap_or_else(|e| panic!("{e}"));
    });
}

#[test]
fn special_functions_and_kernels() {
    run(c"
import math
assert abs(pyrbfw.bessel_j(0.5, 1.0) - math.sqrt(2 / math.pi) * math.sin(1.0)) < 1e-13
assert abs(pyrbfw.jn_zeros(0.0, 1)[0] - 2.404825557695773) < 1e-12
assert pyrbfw.convdiff_mu([2.0, 0.0], 1.0, 3.0) == 2.0
");
}

#[test]
fn b_transform_roundtrip() {
    run(c"
import math
g = lambda r: math.exp(-0.5 * r * r)
s = pyrbfw.b_forward(g, 2.0)
back = pyrbfw.b_inverse(s, pyrbfw.calibrate(2.0), [0.0, 1.0])
assert abs(back[0] - 1.0) < 1e-6 and abs(back[1] - g(1.0)) < 1e-6, back
");
}

#[test]
fn callable_errors_propagate() {
    run(c"
def bad(r):
    raise ValueError('boom')
try:
    pyrbfw.analyze(bad, 2.0, 1.0, 5)
except ValueError as e:
    assert 'boom' in str(e)
else:
    raise AssertionError('no error')
try:
    pyrbfw.analyze(lambda r: r, 2.0, -1.0, 5)
except pyrbfw.RbfwError:
    pass
else:
    raise AssertionError('negative radius accepted')
");
}
