use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module(code: &str) {
    Python::attach(|py| {
        let m = PyModule::new(py, "pyqcoin").unwrap();
        pyqcoin::pyqcoin(&m).unwrap();
        let globals = pyo3::types::PyDict::new(py);
        globals.set_item("q", m).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, Some(&globals), None).unwrap_or_else(|e| panic!("{e}"));
    });
}

#[test]
fn coin_round_trip() {
    with_module(
        "s = q.CoinScheme(3, seed=2)\n\
         c = s.mint()\n\
         ok, post = s.verify(c.state, seed=0)\n\
         assert ok and c.provenance == 'minted'\n\
         t = q.CoinScheme.from_bytes(s.to_bytes())\n\
         assert t.reveal_secret() == s.reveal_secret()\n",
    );
}

#[test]
fn errors_map_to_value_error() {
    with_module(
        "try:\n    q.theoretical_bound(0, 0, 0.5)\nexcept ValueError:\n    pass\nelse:\n    raise AssertionError\n\
         try:\n    q.QuantumState([1, 1])\nexcept ValueError:\n    pass\nelse:\n    raise AssertionError\n",
    );
}

#[test]
fn flows_and_bills() {
    with_module(
        "s = q.CoinScheme(2, seed=4)\n\
         psi = s.reveal_secret()\n\
         assert q.online_verify(s, psi, seed=1)['accepted']\n\
         b = q.blind_verify(s, psi, seed=1)\n\
         assert b['accepted'] and b['bank_gates'] <= 4\n\
         bs = q.BillScheme(4, 2, seed=1)\n\
         bill = bs.mint(seed=3)\n\
         assert bs.verify(bill, seed=2)[0]\n\
         fake = q.Bill(bill.k, q.QuantumState.haar_random(bs.label_width, seed=8))\n\
         assert isinstance(bs.verify(fake, seed=2)[0], bool)\n",
    );
}
