#pragma once

#include "strw/derivation.hpp"

namespace strw {

struct FuelExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr long kDefaultInferFuel = 100000;

struct InferResult {
    DerivPtr deriv;            // null on failure
    std::string fail_reason;   // "fuel" when the budget ran out

    explicit operator bool() const { return deriv != nullptr; }
};

// Builds a typing derivation for any strongly normalizing term by the three
// closure rules: head-variable spine, abstraction, head-redex expansion.
// The conclusion subject equals m and the context covers exactly FV(m).
InferResult infer_sn(const TermPtr& m, long fuel = kDefaultInferFuel);

// Same, but the conclusion type is guaranteed linear.
InferResult infer_linear(const TermPtr& m, long fuel = kDefaultInferFuel);

using Bindings = std::vector<std::pair<std::string, TermPtr>>;

struct InvSubResult {
    std::vector<DerivPtr> sigmas;  // Delta_i |- N_i : sigma_i, in binding order
    DerivPtr pi;                   // Gamma, x_i:sigma_i |- m : tau
};

// Undoes an explicit substitution: pi proves the judgment for m[N_i/x_i] and
// the result types each N_i separately plus m itself over the x_i. Throws
// DerivError when the decomposition does not match pi's subject and
// FuelExhausted when typing some N_i runs out of budget.
InvSubResult invert_substitution(const DerivPtr& pi, const TermPtr& m,
                                 const Bindings& bindings,
                                 long fuel = kDefaultInferFuel);

// From a derivation of m[n/x] to a derivation of (lambda x. m) n at the same
// type; recurses componentwise when the type is stratified.
DerivPtr subject_expand(const DerivPtr& theta, const TermPtr& m,
                        const std::string& x, const TermPtr& n,
                        long fuel = kDefaultInferFuel);

// Renames and contracts the free variables of d so its subject becomes
// exactly target; variables shared in target are merged with multiplexors.
DerivPtr rename_merge_to(const DerivPtr& d, const TermPtr& target);

}  // namespace strw
