import pystrw


def test_term_roundtrip():
    t = pystrw.Term.parse(r"\x. x x")
    assert str(t) == r"\x.x x"
    assert t.size() == 4
    assert t.alpha_eq(pystrw.Term.parse(r"\y. y y"))


def test_reduce_and_is_sn():
    t = pystrw.Term.parse(r"(\x. x) (\y. y)")
    nf, steps, exhausted = t.reduce()
    assert str(nf) == r"\y.y"
    assert steps == 1 and not exhausted
    assert t.is_sn() == "yes"
    assert pystrw.Term.parse(r"(\x. x x) (\x. x x)").is_sn() == "no"


def test_infer_and_check():
    d = pystrw.infer_sn(pystrw.Term.parse(r"\x. x x"))
    assert d is not None
    assert d.check() is None
    assert d.measures()["size"] == 4
    assert d.weight(1) == 4
    assert pystrw.infer_sn(pystrw.Term.parse(r"(\x. x x) (\x. x x)")) is None


def test_derivation_json_roundtrip():
    d = pystrw.numeral_derivation(6, 1, 1)
    d2 = pystrw.Derivation.from_json(d.to_json())
    assert d2.check() is None
    assert d2.type() == d.type()


def test_numerals_and_bound():
    assert pystrw.decode_num(pystrw.encode_num(13)) == 13
    term, deriv = pystrw.succ_typing(1, 1, 1)
    assert deriv.check() is None
    rep = pystrw.bound_harness(term, deriv, [6])
    assert rep["pass"] and rep["output"] == 13
    assert rep["steps"] <= rep["bound"]


def test_typed_normalization():
    prog = pystrw.infer_sn(pystrw.Term.parse(r"(\x. x) (\y. \z. z y)"))
    nf, steps = prog.normalize()
    assert steps >= 1
    assert nf.check() is None
    # inference freshens binder names, so compare up to alpha
    assert nf.subject().alpha_eq(pystrw.Term.parse(r"\y. \z. z y"))


def test_sta_translation():
    d = pystrw.translate_sta(pystrw.sta_numeral_json(9, 2, 3))
    assert d.check() is None
    assert d.measures()["degree"] == 0
    assert str(d.subject()) == str(pystrw.encode_num(9))


def test_inter_view():
    assert pystrw.inter_eq("{a, b}", "{b, a}")
    assert not pystrw.inter_eq("{{a, b}, c}", "{a, {b, c}}")
    assert not pystrw.type_eq("{{a}, b}", "{a, b}")
    assert pystrw.print_inter("{a -o a, b}") == "(a -> a) /\\ b"
