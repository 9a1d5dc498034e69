#pragma once

#include "strw/transform.hpp"

namespace strw {

// Church binary words: num(n) = \s0 s1 x. s_i1 (... (s_im x)) with the most
// significant digit outermost.
TermPtr encode_num(unsigned long n);

struct NotANumeral : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Inverse of encode_num up to alpha; throws NotANumeral otherwise.
unsigned long decode_num(const TermPtr& m);

// forall a. {a -o a}^h -o {a -o a}^k -o a -o a, with ^ meaning nesting.
TypePtr word_type(int h, int k);

struct NumeralTyping {
    unsigned long n = 0;
    int h = 1;
    int k = 1;
    DerivPtr derivation;  // closed, degree 0, at word_type(h, k)
};

NumeralTyping numeral_derivation(unsigned long n, int h, int k);

struct SuccTyping {
    TermPtr term;
    DerivPtr derivation;  // word_type(m, n) -o word_type with digit bumped
};

// digit 0 appends a low zero (doubling), digit 1 appends a low one.
SuccTyping succ_typing(int digit, int m, int n);

// ITER_k = \f. \x. f (f ... (f x)), k applications.
TermPtr iter_term(int k);

// Closed typing of ITER_k at {V_1,...,V_k} -o word_type(m, n) -o word_type
// with the digit's counter bumped k times, where V_i is the i-th successor
// type; degree 0.
DerivPtr iter_typing(int k, int digit, int m, int n);

// The matching argument derivation: one stratification node over k successor
// typings, giving succ_digit all k component types.
DerivPtr iter_succ_argument(int k, int digit, int m, int n);

struct BoundReport {
    unsigned long output = 0;
    long steps = 0;
    long size = 0;    // size of the fully applied subject
    long degree = 0;  // degree of the application derivation
    BigInt bound;     // size^(degree+1)
    bool steps_ok = false;
    bool sizes_ok = false;  // every intermediate subject within the bound
    bool pass = false;
};

// Applies the program derivation to numeral derivations for the inputs
// (componentwise under stratified argument types), normalizes, and checks
// the step and size bounds exactly.
BoundReport bound_harness(const TermPtr& program,
                          const DerivPtr& prog_derivation,
                          const std::vector<unsigned long>& inputs);

}  // namespace strw
