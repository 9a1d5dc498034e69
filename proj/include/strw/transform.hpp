#pragma once

#include "strw/derivation.hpp"

namespace strw {

struct DetourReport {
    long forall_detours_removed = 0;
    long loll_detours_removed = 0;
};

// Debug accounting: every derivation-level substitution verifies the
// weighted inequality W(S) <= W(pi) + sum over free vars of W(sigma_i)
// at r = max of the ranks involved. Tests require violations == 0.
struct SubstStats {
    long calls = 0;
    long violations = 0;
};
SubstStats subst_stats();
void reset_subst_stats();

// Same idea for the strict weight decrease of a reduction step.
struct ReduceStats {
    long steps = 0;
    long weight_violations = 0;
};
ReduceStats reduce_stats();
void reset_reduce_stats();

// Substitutes sigmas[i] for vars[i] throughout pi; conclusion
// Gamma, Delta_1..Delta_n |- M[N_i/x_i] : tau.
DerivPtr subst_derivation(const std::vector<DerivPtr>& sigmas, const DerivPtr& pi,
                          const std::vector<std::string>& vars);

// Replaces type variable a by linear b throughout the tree.
DerivPtr subst_tyvar_deriv(const DerivPtr& d, const std::string& a, const TypePtr& b);

// The node at `at` must be a universal elimination directly over the
// matching introduction; the pair is erased by instantiating the variable.
DerivPtr eliminate_forall_detour(const DerivPtr& d, const std::vector<int>& at);

// The bottom `len` nodes of d must form a unary chain of W/M and
// quantifier rules; returns the same endpoints with quantifier rules
// applied before the renamings.
DerivPtr reorder_renaming_quantifier(const DerivPtr& d, size_t len);

// One beta step at the derivation level; same context, equal type.
std::pair<DerivPtr, DetourReport> subject_reduce(const DerivPtr& d,
                                                 const RedexPosition& at);

enum class PickStrategy { LeftmostOutermost, Random };

struct NormalizeTraceRow {
    long step = 0;
    long subject_size = 0;
    std::vector<BigInt> weights;  // one per requested r
};

struct NormalizeResult {
    DerivPtr deriv;
    long steps = 0;
    std::vector<NormalizeTraceRow> trace;
};

// Reduces until the subject is normal; termination comes from the
// strictly decreasing weight, so there is no fuel parameter.
NormalizeResult normalize_typed(const DerivPtr& d,
                                PickStrategy strategy = PickStrategy::LeftmostOutermost,
                                const std::vector<unsigned long>& trace_rs = {},
                                unsigned seed = 0);

}  // namespace strw
