#pragma once

#include "strw/type.hpp"

namespace strw {

// Non-associative intersection syntax: meets are n-ary (n >= 2), never on
// the right of an arrow, and compared with per-level set semantics.

struct InterType;
using InterPtr = std::shared_ptr<const InterType>;

struct InterType {
    enum class Kind { TyVar, Arrow, Forall, Meet };

    Kind kind;
    std::string name;             // TyVar; Forall binder
    InterPtr arg;                 // Arrow argument
    InterPtr res;                 // Arrow result / Forall body (strict)
    std::vector<InterPtr> comps;  // Meet components, >= 2
};

InterPtr mk_inter_tyvar(std::string name);
InterPtr mk_inter_arrow(InterPtr arg, InterPtr res);
InterPtr mk_inter_forall(std::string var, InterPtr body);
InterPtr mk_inter_meet(std::vector<InterPtr> comps);

// Singleton sets collapse to their component, since a meet needs at least
// two members; this makes the translation non-injective on such types.
InterPtr to_inter(const TypePtr& s);

// Equality modulo idempotency and commutativity per meet, without
// flattening nested meets into each other.
bool inter_eq(const InterPtr& a, const InterPtr& b);

std::string print_inter(const InterPtr& t);

}  // namespace strw
