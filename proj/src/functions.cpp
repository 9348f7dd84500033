#include "invbranch/functions.hpp"
#include "invbranch/errors.hpp"

#include <cmath>

namespace invbranch {

EntireFunctionSpec EntireFunctionSpec::dyadic_tower(double tol_log) {
    if (tol_log >= 0.0) throw error(errc::precondition, "truncation tolerance must be negative (log domain)");
    EntireFunctionSpec s;
    s.kind = FunctionKind::DyadicTower;
    s.truncation_tol_log = tol_log;
    return s;
}

EntireFunctionSpec EntireFunctionSpec::exp_fn() {
    EntireFunctionSpec s;
    s.kind = FunctionKind::Exp;
    return s;
}

EntireFunctionSpec EntireFunctionSpec::sinc() {
    EntireFunctionSpec s;
    s.kind = FunctionKind::Sinc;
    return s;
}

EntireFunctionSpec EntireFunctionSpec::polynomial(std::vector<cplx> coefficients) {
    while (!coefficients.empty() && coefficients.back() == cplx(0.0, 0.0)) coefficients.pop_back();
    if (coefficients.size() < 2)
        throw error(errc::precondition, "polynomial must have degree >= 1 with nonzero leading coefficient");
    EntireFunctionSpec s;
    s.kind = FunctionKind::Polynomial;
    s.coefficients = std::move(coefficients);
    return s;
}

const char* EntireFunctionSpec::name() const {
    switch (kind) {
        case FunctionKind::DyadicTower: return "dyadic_tower";
        case FunctionKind::Exp: return "exp";
        case FunctionKind::Sinc: return "sinc";
        case FunctionKind::Polynomial: return "polynomial";
    }
    return "?";
}

LogComplex term_log(int k, cplx z) {
    if (z == cplx(0.0, 0.0)) return LogComplex::zero();
    const double p = std::ldexp(1.0, k); // 2^k
    const double logmag = p * (std::log(std::abs(z)) - k * M_LN2);
    const double arg = normalize_angle(p * std::arg(z));
    return {logmag, arg};
}

int truncation_index(cplx z, double tol_log) {
    const double az = std::abs(z);
    for (int k = 1;; ++k) {
        if (std::ldexp(1.0, k) > 2.0 * az && term_log(k, z).log_magnitude < tol_log) return k;
        if (k > 1060) return k; // unreachable for finite z; paranoia stop
    }
}

TowerSums tower_sums(cplx z, double tol_log) {
    TowerSums out;
    if (z == cplx(0.0, 0.0)) {
        out.terms = 1;
        return out;
    }
    const int K = truncation_index(z, tol_log);
    out.terms = K;

    double M = kNegInf;
    for (int k = 1; k <= K; ++k) M = std::max(M, term_log(k, z).log_magnitude);
    out.log_scale = M;

    cplx sum = 0.0, wsum = 0.0;
    double asum = 0.0;
    for (int k = 1; k <= K; ++k) {
        const LogComplex t = term_log(k, z);
        const double m = std::exp(t.log_magnitude - M);
        const cplx w = std::polar(m, t.argument);
        sum += w;
        wsum += std::ldexp(1.0, k) * w;
        asum += m;
    }
    out.normalized_sum = sum;
    out.weighted_sum = wsum;
    out.abs_sum = asum;
    return out;
}

std::optional<SignedLogReal> signed_log_re_g(cplx z, double tol_log) {
    if (z == cplx(0.0, 0.0)) return SignedLogReal::zero(); // g(0) = 0 exactly
    const TowerSums s = tower_sums(z, tol_log);
    const double re = s.normalized_sum.real();
    if (std::abs(re) < 1e-15) return std::nullopt; // cancellation near a level line
    return SignedLogReal::from_sign_log(re > 0 ? +1 : -1, s.log_scale + std::log(std::abs(re)));
}

std::optional<cplx> zg_over_g(cplx z, double tol_log) {
    const TowerSums s = tower_sums(z, tol_log);
    if (std::abs(s.normalized_sum) < 1e-12 * s.abs_sum || s.abs_sum == 0.0)
        return std::nullopt; // DIVISION_DEGENERATE (includes g(0) = 0)
    return s.weighted_sum / s.normalized_sum;
}

namespace {

EvalResult eval_tower_small(cplx z, double tol_log) {
    // All terms are <= 16 for |z| <= 8, so direct summation is exact enough.
    cplx g = 0.0, zgp = 0.0; // g and z g'
    const int K = truncation_index(z, tol_log);
    for (int k = 1; k <= K; ++k) {
        const cplx t = std::pow(z / std::ldexp(1.0, k), std::ldexp(1.0, k));
        g += t;
        zgp += std::ldexp(1.0, k) * t;
    }
    const cplx f = std::exp(g);
    EvalResult r;
    r.value = f;
    r.derivative = (z == cplx(0.0, 0.0)) ? cplx(0.0, 0.0) : f * zgp / z;
    return r;
}

cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

} // namespace

EvalResult eval_fn(const EntireFunctionSpec& spec, cplx z) {
    EvalResult r;
    switch (spec.kind) {
        case FunctionKind::Exp: {
            const cplx f = std::exp(z);
            r.value = f;
            r.derivative = f;
            break;
        }
        case FunctionKind::Sinc: {
            if (std::abs(z) < 1e-4) {
                const cplx z2 = z * z;
                r.value = 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
                r.derivative = -z / 3.0 + z * z2 / 30.0;
            } else {
                r.value = std::sin(z) / z;
                r.derivative = (z * std::cos(z) - std::sin(z)) / (z * z);
            }
            break;
        }
        case FunctionKind::Polynomial: {
            r.value = horner(spec.coefficients, z);
            std::vector<cplx> d(spec.coefficients.size() - 1);
            for (size_t i = 1; i < spec.coefficients.size(); ++i)
                d[i - 1] = double(i) * spec.coefficients[i];
            r.derivative = horner(d, z);
            break;
        }
        case FunctionKind::DyadicTower: {
            if (std::abs(z) > 8.0)
                throw error(errc::precondition,
                            "dyadic tower eval_fn requires |z| <= 8; use the log-domain operations");
            r = eval_tower_small(z, spec.truncation_tol_log);
            break;
        }
    }
    const double limit = 1e300;
    if (!(std::abs(r.value) <= limit) || !(std::abs(r.derivative) <= limit)) r.overflow = true;
    return r;
}

} // namespace invbranch
