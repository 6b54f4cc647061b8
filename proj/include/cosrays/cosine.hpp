#pragma once

#include <array>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "cosrays/address.hpp"

namespace cosrays {

using cplx = std::complex<double>;

// Vertical ray {base + i*dir*s : s >= 0} used to cut the plane into fundamental domains.
struct Cut {
    cplx base;
    double dir = 1.0; // +1 upward, -1 downward
};

struct CosineMap {
    cplx a;
    cplx b;
    std::optional<Cut> cut; // overrides the default rule when set
};

CosineMap make_map(cplx a, cplx b);
CosineMap cosh_map(); // a = b = 1/2, cut along the positive imaginary axis

cplx eval(const CosineMap& m, cplx z);           // throws past |Re z| ~ 700
cplx eval_unchecked(const CosineMap& m, cplx z); // may overflow to inf
cplx derivative(const CosineMap& m, cplx z);

struct SingularData {
    cplx v1;
    cplx v2;
    cplx crit_base;
};

// crit_base = (1/2) Log(b/a): the zero of the derivative.
SingularData singular_data(const CosineMap& m);
std::array<cplx, 2> critical_values(const CosineMap& m);

Cut cut_of(const CosineMap& m);
double dist_to_cut(const CosineMap& m, cplx w);

std::array<double, 6> k_terms(const CosineMap& m);
double k_constant(const CosineMap& m);

// Roots of a u^2 - w u + b = 0, larger modulus first.
std::pair<cplx, cplx> roots(const CosineMap& m, cplx w);

// Inverse branch onto F_s for w off the cut; no tract check.
cplx branch(const CosineMap& m, Symbol s, cplx w);

// Same, for |w| beyond double range: w = exp(log_abs) * e^{i arg}.
cplx branch_log(const CosineMap& m, Symbol s, double log_abs, double arg);

// Side of z: R iff the e^z term dominates.
Side side_of(const CosineMap& m, cplx z);

// Symbol of z for a general map; throws "boundary" near g^{-1}(cut).
Symbol domain_of(const CosineMap& m, cplx z);

struct NormalizedMap {
    CosineMap base;    // lambda * f
    cplx lambda;
    double K = 0;        // printed constant of the scaled map
    double K_source = 0; // printed constant of the unscaled map; bounds the tracts
    double R_tract = 0;
    double A = 0;
};

NormalizedMap disjoint_type_scale(const CosineMap& m);
double constant_A(const NormalizedMap& nm);

Symbol fundamental_domain_of(const NormalizedMap& nm, cplx z);
cplx inverse_branch(const NormalizedMap& nm, Symbol s, cplx w);

// Asymptotic remainder z - (ln w - log a + 2 pi i n) (or the L analogue),
// reduced to the nearest 2 pi i representative.
cplx branch_residual(const CosineMap& m, Symbol s, cplx w, cplx z);

std::vector<Symbol> address_of(const NormalizedMap& nm, cplx z, std::size_t depth, double z_err = 0.0);

} // namespace cosrays
