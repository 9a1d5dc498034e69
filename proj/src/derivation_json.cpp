#include "strw/derivation_json.hpp"

namespace strw {

using nlohmann::json;

json derivation_to_json(const DerivPtr& d) {
    json node;
    node["rule"] = rule_name(d->rule);
    json ctx = json::array();
    for (const auto& [x, ty] : d->conclusion.ctx)
        ctx.push_back(json::array({x, print_type(ty)}));
    node["ctx"] = std::move(ctx);
    node["term"] = print_term(d->conclusion.subject);
    node["type"] = print_type(d->conclusion.type);
    json meta = json::object();
    switch (d->rule) {
        case Rule::Ax:
        case Rule::W:
            meta["var"] = d->meta.var;
            meta["lintype"] = print_type(d->meta.lintype);
            break;
        case Rule::LollI:
            meta["var"] = d->meta.var;
            break;
        case Rule::M:
            meta["domain_vars"] = d->meta.domain_vars;
            meta["range_var"] = d->meta.range_var;
            break;
        case Rule::ForallI:
            meta["tyvar"] = d->meta.tyvar;
            break;
        case Rule::ForallE:
            meta["tyvar"] = d->meta.tyvar;
            meta["instantiated_with"] = print_type(d->meta.instantiated_with);
            break;
        case Rule::LollE:
        case Rule::St:
            break;
    }
    node["meta"] = std::move(meta);
    json prems = json::array();
    for (const auto& p : d->premises) prems.push_back(derivation_to_json(p));
    node["premises"] = std::move(prems);
    return node;
}

namespace {

TypePtr load_type(const json& j) {
    TypePtr t = parse_type(j.get<std::string>());
    note_reserved_tyvars(t);
    return t;
}

}  // namespace

DerivPtr derivation_from_json(const json& j) {
    auto rule = rule_from_name(j.at("rule").get<std::string>());
    if (!rule) throw DerivError("unknown rule tag: " + j.at("rule").dump());
    Judgment concl;
    for (const auto& entry : j.at("ctx")) {
        std::string x = entry.at(0).get<std::string>();
        concl.ctx[x] = load_type(entry.at(1));
    }
    concl.subject = parse_term_internal(j.at("term").get<std::string>());
    concl.type = load_type(j.at("type"));
    Meta meta;
    const json& m = j.at("meta");
    if (m.contains("var")) meta.var = m.at("var").get<std::string>();
    if (m.contains("lintype")) meta.lintype = load_type(m.at("lintype"));
    if (m.contains("domain_vars"))
        meta.domain_vars = m.at("domain_vars").get<std::vector<std::string>>();
    if (m.contains("range_var")) meta.range_var = m.at("range_var").get<std::string>();
    if (m.contains("tyvar")) meta.tyvar = m.at("tyvar").get<std::string>();
    if (m.contains("instantiated_with"))
        meta.instantiated_with = load_type(m.at("instantiated_with"));
    std::vector<DerivPtr> prems;
    for (const auto& p : j.at("premises")) prems.push_back(derivation_from_json(p));
    return mk_node(*rule, std::move(concl), std::move(meta), std::move(prems));
}

}  // namespace strw
