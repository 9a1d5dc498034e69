#pragma once

#include <json.hpp>

#include "strw/derivation.hpp"

namespace strw {

// The soft type assignment system: linear types plus the "!" modality, and
// contraction only for variables sharing one type. Everything mirrors the
// stratified system so the embedding below is a plain recursion.

struct StaType;
using StaTypePtr = std::shared_ptr<const StaType>;

struct StaType {
    enum class Kind { TyVar, Arrow, Forall, Bang };

    Kind kind;
    std::string name;  // TyVar; Forall binder
    StaTypePtr arg;    // Arrow argument (modal) / Bang inner
    StaTypePtr res;    // Arrow result / Forall body (both linear)
};

StaTypePtr mk_sta_tyvar(std::string name);
StaTypePtr mk_sta_arrow(StaTypePtr arg, StaTypePtr res);
StaTypePtr mk_sta_forall(std::string var, StaTypePtr body);
StaTypePtr mk_sta_bang(StaTypePtr inner);

// Linear means no top-level bang.
bool is_sta_linear(const StaTypePtr& t);

// Grammar: mu := item ("-o" mu)? ; item := "!" item | "forall" a "." mu
//          | tyvar | "(" mu ")". "!" binds tightest, "-o" right-associative.
StaTypePtr parse_sta_type(std::string_view text);
std::string print_sta_type(const StaTypePtr& t);

bool sta_type_eq(const StaTypePtr& a, const StaTypePtr& b);
std::set<std::string> sta_free_tyvars(const StaTypePtr& t);
StaTypePtr sta_subst_tyvar(const StaTypePtr& t, const std::string& a,
                           const StaTypePtr& b);

enum class StaRule { Ax, W, LollI, LollE, M, Sp, ForallI, ForallE };

std::string sta_rule_name(StaRule r);
std::optional<StaRule> sta_rule_from_name(std::string_view s);

using StaContext = std::map<std::string, StaTypePtr>;

struct StaJudgment {
    StaContext ctx;
    TermPtr subject;
    StaTypePtr type;
};

struct StaMeta {
    std::string var;                       // Ax, W, LollI
    StaTypePtr lintype;                    // Ax, W
    std::vector<std::string> domain_vars;  // M
    std::string range_var;                 // M
    std::string tyvar;                     // ForallI, ForallE
    StaTypePtr instantiated_with;          // ForallE
};

struct StaDerivation;
using StaDerivPtr = std::shared_ptr<const StaDerivation>;

struct StaDerivation {
    StaRule rule;
    StaJudgment conclusion;
    StaMeta meta;
    std::vector<StaDerivPtr> premises;
};

StaDerivPtr mk_sta_node(StaRule rule, StaJudgment conclusion, StaMeta meta,
                        std::vector<StaDerivPtr> premises);

// Builders, valid by construction as for the stratified system.
StaDerivPtr sta_ax(const std::string& x, StaTypePtr u);
StaDerivPtr sta_w(StaDerivPtr prem, const std::string& x, StaTypePtr u);
StaDerivPtr sta_lolli(StaDerivPtr prem, const std::string& x);
StaDerivPtr sta_lolle(StaDerivPtr fun, StaDerivPtr arg);
StaDerivPtr sta_m(StaDerivPtr prem, std::vector<std::string> domain_vars,
                  const std::string& range_var);
StaDerivPtr sta_sp(StaDerivPtr prem);
StaDerivPtr sta_foralli(StaDerivPtr prem, const std::string& a);
StaDerivPtr sta_foralle(StaDerivPtr prem, StaTypePtr instantiated_with);

std::optional<Violation> check_sta(const StaDerivPtr& d);

struct StaMeasures {
    long subject_size = 0;
    long rank = 1;
    long degree = 0;  // maximal nesting of promotions
    StaDerivPtr deriv;

    BigInt weight_at(unsigned long r) const;
};

StaMeasures sta_measures(const StaDerivPtr& d);
BigInt sta_weight_at(const StaDerivPtr& d, unsigned long r);

// The embedding: bangs become singleton sets, promotions become
// single-premise stratifications, everything else maps rule for rule.
TypePtr translate_type(const StaTypePtr& t);
DerivPtr translate_derivation(const StaDerivPtr& d);

nlohmann::json sta_to_json(const StaDerivPtr& d);
StaDerivPtr sta_from_json(const nlohmann::json& j);

// forall a. !^h (a -o a) -o !^k (a -o a) -o a -o a
StaTypePtr sta_word_type(int h, int k);

// Closed typing of the binary Church word for n at sta_word_type(h, k);
// promotion-free, so its degree is 0.
StaDerivPtr sta_numeral_derivation(unsigned long n, int h, int k);

// Closed typing of the successor appending digit (0 or 1), at type
// sta_word_type(m, n) -o sta_word_type(m', n') with the digit's counter
// bumped by one.
StaDerivPtr sta_succ_derivation(int digit, int m, int n);

}  // namespace strw
