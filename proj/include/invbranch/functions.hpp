#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "invbranch/logspace.hpp"

namespace invbranch {

using cplx = std::complex<double>;

enum class FunctionKind { DyadicTower, Exp, Sinc, Polynomial };

/// Catalog entry for the target entire functions.
///
/// DyadicTower is f(z) = exp(g(z)) with g(z) = sum_{k>=1} (z/2^k)^(2^k); its
/// values overflow doubles almost everywhere, so consumers use the log-domain
/// operations (signed_log_re_g, zg_over_g) instead of eval_fn outside |z| <= 8.
/// Sinc is the entire extension of sin(z)/z with value 1 at z = 0.
struct EntireFunctionSpec {
    FunctionKind kind = FunctionKind::Exp;
    std::vector<cplx> coefficients;     // Polynomial only, c0 + c1 z + ...
    double truncation_tol_log = -60.0;  // DyadicTower series cutoff, log domain

    static EntireFunctionSpec dyadic_tower(double tol_log = -60.0);
    static EntireFunctionSpec exp_fn();
    static EntireFunctionSpec sinc();
    static EntireFunctionSpec polynomial(std::vector<cplx> coefficients);

    const char* name() const;
};

/// log of the series term (z/2^k)^(2^k):
/// log_magnitude = 2^k (ln|z| - k ln 2), argument = normalize(2^k arg z).
LogComplex term_log(int k, cplx z);

/// Smallest K with term_log(K, z).log_magnitude < tol_log and 2^K > 2|z|.
/// Beyond K the terms decay doubly exponentially, so the tail is below tol.
int truncation_index(cplx z, double tol_log);

/// Re g(z) in signed-log form.  Terms are normalized by the largest
/// log-magnitude M and summed in the linear domain, so the result is accurate
/// even when |Re g| ~ exp(2^(2^n)).  Returns nullopt (DEGENERATE) when the
/// normalized sum cancels below 1e-15; callers should re-sample nearby.
std::optional<SignedLogReal> signed_log_re_g(cplx z, double tol_log = -60.0);

/// z g'(z) / g(z) = sum 2^k w_k / sum w_k with w_k the max-normalized terms.
/// Returns nullopt (DIVISION_DEGENERATE) when |sum w_k| < 1e-12 sum |w_k|.
std::optional<cplx> zg_over_g(cplx z, double tol_log = -60.0);

struct EvalResult {
    cplx value{0.0, 0.0};
    cplx derivative{0.0, 0.0};
    bool overflow = false; // set when either modulus exceeds 1e300
};

/// Plain-domain f(z), f'(z).  DyadicTower is only evaluable for |z| <= 8
/// (all terms are then <= 16); larger |z| throws PRECONDITION.
EvalResult eval_fn(const EntireFunctionSpec& spec, cplx z);

/// Max-normalized tower sums, shared by the log-domain operations and by
/// log-plane lifting: g(z) = exp(log_scale) * normalized_sum and
/// z g'(z) = exp(log_scale) * weighted_sum.
struct TowerSums {
    double log_scale = kNegInf; // max term log-magnitude M
    cplx normalized_sum{0.0, 0.0};
    cplx weighted_sum{0.0, 0.0}; // sum 2^k w_k
    double abs_sum = 0.0;        // sum |w_k|
    int terms = 0;
};
TowerSums tower_sums(cplx z, double tol_log = -60.0);

} // namespace invbranch
