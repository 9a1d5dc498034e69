#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "strw/derivation_json.hpp"
#include "strw/inference.hpp"
#include "strw/inter.hpp"
#include "strw/numerals.hpp"
#include "strw/sta.hpp"
#include "strw/transform.hpp"

using namespace strw;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kFuel = 3;

bool g_json = false;

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void emit(const json& j, const std::string& human) {
    if (g_json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << human;
}

int run_check(const std::string& file) {
    DerivPtr d = derivation_from_json(load_file(file));
    if (auto v = check(d)) {
        json path = json::array();
        for (int i : v->path) path.push_back(i);
        emit({{"ok", false}, {"reason", v->reason}, {"path", path}},
             "violation: " + v->reason + "\n");
        return kFailed;
    }
    emit({{"ok", true}, {"type", print_type(d->conclusion.type)}},
         "ok: " + print_term(d->conclusion.subject) + " : " +
             print_type(d->conclusion.type) + "\n");
    return kOk;
}

// Renames generated type variables to a1, a2, ... for display.
TypePtr pretty_tyvars(TypePtr t) {
    int next = 1;
    for (const std::string& name : free_tyvars(t))
        if (name.rfind("_g", 0) == 0)
            t = subst_tyvar(t, name, mk_tyvar("a" + std::to_string(next++)));
    return t;
}

int run_infer(const std::string& term, long fuel, const std::string& out_file,
              bool linear) {
    TermPtr t = parse_term(term);
    InferResult r = linear ? infer_linear(t, fuel) : infer_sn(t, fuel);
    if (!r) {
        emit({{"ok", false}, {"reason", r.fail_reason}},
             "failed: " + r.fail_reason + "\n");
        return kFuel;
    }
    Measures m = measures(r.deriv);
    emit({{"ok", true},
          {"type", print_type(r.deriv->conclusion.type)},
          {"context", print_context(r.deriv->conclusion.ctx)},
          {"degree", m.degree},
          {"rank", m.rank}},
         print_term(t) + " : " +
             print_type(pretty_tyvars(r.deriv->conclusion.type)) + "\n");
    if (!out_file.empty()) {
        std::ofstream out(out_file);
        out << derivation_to_json(r.deriv).dump(2) << "\n";
    }
    return kOk;
}

int run_reduce(const std::string& term, long fuel, bool trace) {
    TermPtr t = parse_term(term);
    long steps = 0;
    while (!is_normal_form(t) && steps < fuel) {
        t = beta_step(t, redex_positions(t).front());
        ++steps;
        if (trace && !g_json)
            std::cout << steps << ": " << print_term(t) << "\n";
    }
    if (!is_normal_form(t)) {
        emit({{"ok", false}, {"reason", "fuel"}, {"steps", steps}},
             "fuel exhausted after " + std::to_string(steps) + " steps\n");
        return kFuel;
    }
    emit({{"ok", true}, {"normal_form", print_term(t)}, {"steps", steps}},
         print_term(t) + "  (" + std::to_string(steps) + " steps)\n");
    return kOk;
}

int run_measure(const std::string& file, std::vector<unsigned long> rs) {
    DerivPtr d = derivation_from_json(load_file(file));
    Measures m = measures(d);
    if (rs.empty()) rs = {1, 2, 3};
    json weights = json::object();
    std::string human;
    for (unsigned long r : rs) {
        weights[std::to_string(r)] = m.weight_at(r).str();
        human += "W(" + std::to_string(r) + ") = " + m.weight_at(r).str() + "\n";
    }
    emit({{"size", m.subject_size},
          {"rank", m.rank},
          {"degree", m.degree},
          {"weights", weights}},
         "size " + std::to_string(m.subject_size) + ", rank " +
             std::to_string(m.rank) + ", degree " + std::to_string(m.degree) +
             "\n" + human);
    return kOk;
}

int run_sn(const std::string& term, long fuel) {
    SnVerdict v = is_sn(parse_term(term), fuel);
    const char* name = v == SnVerdict::Yes   ? "yes"
                       : v == SnVerdict::No  ? "no"
                                             : "unknown";
    emit({{"verdict", name}}, std::string(name) + "\n");
    return v == SnVerdict::Unknown ? kFuel : kOk;
}

int run_translate(const std::string& from, const std::string& to,
                  const std::string& input) {
    if (from == "sta") {
        StaDerivPtr d = sta_from_json(load_file(input));
        if (auto v = check_sta(d)) {
            emit({{"ok", false}, {"reason", v->reason}},
                 "invalid input derivation: " + v->reason + "\n");
            return kFailed;
        }
        DerivPtr t = translate_derivation(d);
        emit(derivation_to_json(t),
             print_term(t->conclusion.subject) + " : " +
                 print_type(t->conclusion.type) + "\n");
        return kOk;
    }
    if (to == "inter") {
        InterPtr t = to_inter(parse_type(input));
        emit({{"inter", print_inter(t)}}, print_inter(t) + "\n");
        return kOk;
    }
    std::cerr << "translate needs --from sta or --to inter\n";
    return kUsage;
}

json report_json(const BoundReport& rep) {
    return {{"output", rep.output},   {"steps", rep.steps},
            {"size", rep.size},       {"degree", rep.degree},
            {"bound", rep.bound.str()}, {"pass", rep.pass}};
}

int finish_demo(const BoundReport& rep, const std::string& report_file) {
    if (!report_file.empty()) {
        std::ofstream out(report_file);
        out << report_json(rep).dump(2) << "\n";
    }
    emit(report_json(rep),
         "output: " + std::to_string(rep.output) + "\nsteps: " +
             std::to_string(rep.steps) + " (bound " + rep.bound.str() +
             ")\n" + (rep.pass ? "pass\n" : "FAIL\n"));
    return rep.pass ? kOk : kFailed;
}

int run_sweep(int max_size, long fuel) {
    std::cout << "term,size,is_sn,infer_ok,degree,steps,bound,bound_ok\n";
    for (const TermPtr& t : enumerate_closed_terms(max_size)) {
        SnVerdict v = is_sn(t, fuel);
        InferResult r = infer_sn(t, fuel);
        std::cout << '"' << print_term(t) << "\"," << term_size(t) << ','
                  << (v == SnVerdict::Yes  ? "yes"
                      : v == SnVerdict::No ? "no"
                                           : "unknown")
                  << ',' << (r ? "yes" : "no");
        if (r) {
            long degree = degree_of(r.deriv);
            ReduceResult red = reduce_to_nf(t, fuel);
            BigInt bound = boost::multiprecision::pow(
                BigInt(term_size(t)), static_cast<unsigned>(degree + 1));
            std::cout << ',' << degree << ',' << red.steps << ',' << bound
                      << ',' << (BigInt(red.steps) <= bound ? "yes" : "no");
        } else {
            std::cout << ",,,,";
        }
        std::cout << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stratified type assignment workbench"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "machine-readable output");

    std::string file, term, type_str, emit_file, report_file, from, to;
    long fuel = kDefaultInferFuel;
    bool trace = false, linear = false;
    std::vector<unsigned long> rs;
    int k = 3, digit = 0, h = 1, kk = 1, max_size = 7;
    unsigned long input = 0, nval = 0;

    CLI::App* c_check = app.add_subcommand("check", "validate a derivation file");
    c_check->add_option("file", file)->required();

    CLI::App* c_infer = app.add_subcommand("infer", "type a strongly normalizing term");
    c_infer->add_option("term", term)->required();
    c_infer->add_option("--fuel", fuel);
    c_infer->add_flag("--linear", linear, "force a linear conclusion type");
    c_infer->add_option("--emit-derivation", emit_file);

    CLI::App* c_reduce = app.add_subcommand("reduce", "normalize a term");
    c_reduce->add_option("term", term)->required();
    c_reduce->add_option("--fuel", fuel);
    c_reduce->add_flag("--trace", trace);

    CLI::App* c_measure = app.add_subcommand("measure", "measures of a derivation file");
    c_measure->add_option("file", file)->required();
    c_measure->add_option("--r", rs);

    CLI::App* c_sn = app.add_subcommand("sn", "strong normalization oracle");
    c_sn->add_option("term", term)->required();
    c_sn->add_option("--fuel", fuel);

    CLI::App* c_translate = app.add_subcommand("translate", "system embeddings");
    c_translate->add_option("input", type_str)->required();
    c_translate->add_option("--from", from)->check(CLI::IsMember({"sta"}));
    c_translate->add_option("--to", to)->check(CLI::IsMember({"inter"}));

    CLI::App* c_demo = app.add_subcommand("demo", "word arithmetic demos");
    c_demo->require_subcommand(1);
    CLI::App* d_iter = c_demo->add_subcommand("iter", "iterated successor");
    d_iter->add_option("--k", k);
    d_iter->add_option("--succ", digit)->check(CLI::Range(0, 1));
    d_iter->add_option("--input", input)->required();
    d_iter->add_option("--report", report_file);
    CLI::App* d_succ = c_demo->add_subcommand("succ", "one successor step");
    d_succ->add_option("--digit", digit)->check(CLI::Range(0, 1));
    d_succ->add_option("--input", input)->required();
    d_succ->add_option("--report", report_file);
    CLI::App* d_num = c_demo->add_subcommand("numeral", "a typed binary word");
    d_num->set_help_flag("--help");  // frees --h for the type parameter
    d_num->add_option("--n", nval)->required();
    d_num->add_option("--h", h);
    d_num->add_option("--k", kk);

    CLI::App* c_sweep = app.add_subcommand("sweep", "oracle-vs-inference table");
    c_sweep->add_option("--max-size", max_size);
    c_sweep->add_option("--fuel", fuel);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*c_check) return run_check(file);
        if (*c_infer) return run_infer(term, fuel, emit_file, linear);
        if (*c_reduce) return run_reduce(term, fuel, trace);
        if (*c_measure) return run_measure(file, rs);
        if (*c_sn) return run_sn(term, fuel);
        if (*c_translate) return run_translate(from, to, type_str);
        if (*c_sweep) return run_sweep(max_size, fuel);
        if (*d_iter) {
            SuccTyping s = succ_typing(digit, 1, 1);
            TermPtr prog_term = mk_app(iter_term(k), s.term);
            DerivPtr prog = d_lolle(iter_typing(k, digit, 1, 1),
                                    iter_succ_argument(k, digit, 1, 1));
            return finish_demo(bound_harness(prog_term, prog, {input}),
                               report_file);
        }
        if (*d_succ) {
            SuccTyping s = succ_typing(digit, 1, 1);
            return finish_demo(bound_harness(s.term, s.derivation, {input}),
                               report_file);
        }
        if (*d_num) {
            NumeralTyping t = numeral_derivation(nval, h, kk);
            emit({{"term", print_term(t.derivation->conclusion.subject)},
                  {"type", print_type(t.derivation->conclusion.type)},
                  {"degree", degree_of(t.derivation)}},
                 print_term(t.derivation->conclusion.subject) + " : " +
                     print_type(t.derivation->conclusion.type) + "\n");
            return kOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const TypeParseError& e) {
        std::cerr << "type parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const FuelExhausted& e) {
        std::cerr << e.what() << "\n";
        return kFuel;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
