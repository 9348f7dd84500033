#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace invbranch {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Normalize an angle to the principal range (-pi, pi].
double normalize_angle(double theta);

/// A nonzero complex value stored as (log |w|, arg w).  Holds magnitudes far
/// beyond double range, e.g. exp(2^(2^n)).  log_magnitude = -inf encodes the
/// canonical zero (argument 0).
struct LogComplex {
    double log_magnitude = kNegInf;
    double argument = 0.0;

    static LogComplex zero() { return {}; }
    static LogComplex from_value(std::complex<double> w);

    bool is_zero() const { return std::isinf(log_magnitude) && log_magnitude < 0; }

    /// Back to a plain complex; overflows to inf components when log_magnitude > ~709.
    std::complex<double> value() const;
};

/// A signed real stored as (sign, log |x|).  sign = 0 encodes zero with
/// log_abs = -inf.  Comparisons against thresholds like 2^(2^n) are done on
/// (sign, log_abs) pairs without ever forming the linear value.
struct SignedLogReal {
    int sign = 0;
    double log_abs = kNegInf;

    static SignedLogReal zero() { return {}; }
    static SignedLogReal from_value(double x);
    static SignedLogReal from_sign_log(int sign, double log_abs);

    double value() const; // may overflow to +-inf

    SignedLogReal negated() const { return {-sign, log_abs}; }
};

bool slr_less(const SignedLogReal& a, const SignedLogReal& b);
bool slr_equal(const SignedLogReal& a, const SignedLogReal& b);

inline bool operator<(const SignedLogReal& a, const SignedLogReal& b) { return slr_less(a, b); }
inline bool operator>(const SignedLogReal& a, const SignedLogReal& b) { return slr_less(b, a); }
inline bool operator<=(const SignedLogReal& a, const SignedLogReal& b) { return !slr_less(b, a); }
inline bool operator>=(const SignedLogReal& a, const SignedLogReal& b) { return !slr_less(a, b); }

/// The value s * 2^(2^n) as a SignedLogReal, i.e. (s, 2^n * ln 2).
SignedLogReal two_pow_two_pow(int n, int sign = +1);

/// Text form "log:<sign>:<ln-magnitude>" for values whose linear form may be
/// unrepresentable; plain decimal text is accepted as well.
SignedLogReal parse_signed_log(const std::string& text);
std::string format_signed_log(const SignedLogReal& v);

} // namespace invbranch
