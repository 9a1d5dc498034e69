#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "strw/derivation_json.hpp"
#include "strw/inference.hpp"
#include "strw/inter.hpp"
#include "strw/numerals.hpp"
#include "strw/sta.hpp"
#include "strw/transform.hpp"

namespace py = pybind11;
using namespace strw;

namespace {

// thin handles; the underlying pointers are immutable
struct PyTerm {
    TermPtr p;
};

struct PyDeriv {
    DerivPtr p;
};

py::object big_to_py(const BigInt& b) {
    return py::module_::import("builtins").attr("int")(b.str());
}

const char* verdict_name(SnVerdict v) {
    switch (v) {
        case SnVerdict::Yes: return "yes";
        case SnVerdict::No: return "no";
        case SnVerdict::Unknown: return "unknown";
    }
    return "unknown";
}

}  // namespace

PYBIND11_MODULE(pystrw, m) {
    m.doc() = "stratified type assignment workbench";

    py::class_<PyTerm>(m, "Term")
        .def_static("parse", [](const std::string& s) { return PyTerm{parse_term(s)}; })
        .def("__str__", [](const PyTerm& t) { return print_term(t.p); })
        .def("__repr__",
             [](const PyTerm& t) { return "Term(" + print_term(t.p) + ")"; })
        .def("size", [](const PyTerm& t) { return term_size(t.p); })
        .def("alpha_eq",
             [](const PyTerm& a, const PyTerm& b) { return alpha_eq(a.p, b.p); })
        .def("is_normal_form", [](const PyTerm& t) { return is_normal_form(t.p); })
        .def(
            "reduce",
            [](const PyTerm& t, long fuel) {
                ReduceResult r = reduce_to_nf(t.p, fuel);
                return py::make_tuple(PyTerm{r.term}, r.steps, r.fuel_exhausted);
            },
            py::arg("fuel") = 100000)
        .def(
            "is_sn",
            [](const PyTerm& t, long fuel) { return verdict_name(is_sn(t.p, fuel)); },
            py::arg("fuel") = 100000);

    py::class_<PyDeriv>(m, "Derivation")
        .def_static("from_json",
                    [](const std::string& s) {
                        return PyDeriv{derivation_from_json(nlohmann::json::parse(s))};
                    })
        .def("to_json", [](const PyDeriv& d) { return derivation_to_json(d.p).dump(); })
        .def("subject", [](const PyDeriv& d) { return PyTerm{d.p->conclusion.subject}; })
        .def("type", [](const PyDeriv& d) { return print_type(d.p->conclusion.type); })
        .def("context",
             [](const PyDeriv& d) {
                 py::dict out;
                 for (const auto& [x, ty] : d.p->conclusion.ctx)
                     out[py::str(x)] = print_type(ty);
                 return out;
             })
        .def("check",
             [](const PyDeriv& d) -> py::object {
                 auto v = check(d.p);
                 if (!v) return py::none();
                 return py::make_tuple(v->path, v->reason);
             })
        .def("measures",
             [](const PyDeriv& d) {
                 Measures ms = measures(d.p);
                 py::dict out;
                 out["size"] = ms.subject_size;
                 out["rank"] = ms.rank;
                 out["degree"] = ms.degree;
                 return out;
             })
        .def("weight",
             [](const PyDeriv& d, unsigned long r) {
                 return big_to_py(weight_at(d.p, r));
             })
        .def("normalize", [](const PyDeriv& d) {
            NormalizeResult nr = normalize_typed(d.p);
            return py::make_tuple(PyDeriv{nr.deriv}, nr.steps);
        });

    m.def(
        "infer_sn",
        [](const PyTerm& t, long fuel) -> py::object {
            InferResult r = infer_sn(t.p, fuel);
            if (!r) return py::none();
            return py::cast(PyDeriv{r.deriv});
        },
        py::arg("term"), py::arg("fuel") = kDefaultInferFuel);
    m.def(
        "infer_linear",
        [](const PyTerm& t, long fuel) -> py::object {
            InferResult r = infer_linear(t.p, fuel);
            if (!r) return py::none();
            return py::cast(PyDeriv{r.deriv});
        },
        py::arg("term"), py::arg("fuel") = kDefaultInferFuel);

    m.def("encode_num", [](unsigned long n) { return PyTerm{encode_num(n)}; });
    m.def("decode_num", [](const PyTerm& t) { return decode_num(t.p); });
    m.def("word_type", [](int h, int k) { return print_type(word_type(h, k)); });
    m.def("numeral_derivation", [](unsigned long n, int h, int k) {
        return PyDeriv{numeral_derivation(n, h, k).derivation};
    });
    m.def("succ_typing", [](int digit, int mm, int nn) {
        SuccTyping s = succ_typing(digit, mm, nn);
        return py::make_tuple(PyTerm{s.term}, PyDeriv{s.derivation});
    });
    m.def("iter_term", [](int k) { return PyTerm{iter_term(k)}; });
    m.def("iter_typing", [](int k, int digit, int mm, int nn) {
        return PyDeriv{iter_typing(k, digit, mm, nn)};
    });
    m.def("iter_succ_argument", [](int k, int digit, int mm, int nn) {
        return PyDeriv{iter_succ_argument(k, digit, mm, nn)};
    });
    m.def("bound_harness",
          [](const PyTerm& program, const PyDeriv& d,
             const std::vector<unsigned long>& inputs) {
              BoundReport rep = bound_harness(program.p, d.p, inputs);
              py::dict out;
              out["output"] = rep.output;
              out["steps"] = rep.steps;
              out["size"] = rep.size;
              out["degree"] = rep.degree;
              out["bound"] = big_to_py(rep.bound);
              out["pass"] = rep.pass;
              return out;
          });

    m.def("sta_numeral_json", [](unsigned long n, int h, int k) {
        return sta_to_json(sta_numeral_derivation(n, h, k)).dump();
    });
    m.def("translate_sta", [](const std::string& s) {
        return PyDeriv{translate_derivation(sta_from_json(nlohmann::json::parse(s)))};
    });

    m.def("type_eq", [](const std::string& a, const std::string& b) {
        return type_eq(parse_type(a), parse_type(b));
    });
    m.def("inter_eq", [](const std::string& a, const std::string& b) {
        return inter_eq(to_inter(parse_type(a)), to_inter(parse_type(b)));
    });
    m.def("print_inter",
          [](const std::string& a) { return print_inter(to_inter(parse_type(a))); });
}
