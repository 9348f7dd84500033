#include "invbranch/logspace.hpp"
#include "invbranch/errors.hpp"

#include <charconv>
#include <cstdio>

namespace invbranch {

const char* errc_name(errc code) {
    switch (code) {
        case errc::precondition: return "PRECONDITION";
        case errc::on_curve: return "ON_CURVE";
        case errc::not_closed: return "NOT_CLOSED";
        case errc::no_seeds: return "NO_SEEDS";
        case errc::resolution_too_coarse: return "RESOLUTION_TOO_COARSE";
        case errc::touches_boundary: return "TOUCHES_BOUNDARY";
        case errc::zero_mass: return "ZERO_MASS";
        case errc::epsilon_range: return "EPSILON_RANGE";
        case errc::undersampled: return "UNDERSAMPLED";
        case errc::degenerate_saturation: return "DEGENERATE";
        case errc::parse_error: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

double normalize_angle(double theta) {
    if (!std::isfinite(theta)) return 0.0;
    double a = std::remainder(theta, 2.0 * M_PI); // [-pi, pi]
    if (a <= -M_PI) a = M_PI;                     // fold -pi onto +pi
    return a;
}

LogComplex LogComplex::from_value(std::complex<double> w) {
    if (w == std::complex<double>(0.0, 0.0)) return zero();
    return {std::log(std::abs(w)), std::arg(w)};
}

std::complex<double> LogComplex::value() const {
    if (is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(log_magnitude), argument);
}

SignedLogReal SignedLogReal::from_value(double x) {
    if (x == 0.0) return zero();
    return {x > 0 ? +1 : -1, std::log(std::abs(x))};
}

SignedLogReal SignedLogReal::from_sign_log(int sign, double log_abs) {
    if (sign == 0) return zero();
    return {sign > 0 ? +1 : -1, log_abs};
}

double SignedLogReal::value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
}

bool slr_less(const SignedLogReal& a, const SignedLogReal& b) {
    if (a.sign != b.sign) return a.sign < b.sign;
    if (a.sign > 0) return a.log_abs < b.log_abs;
    if (a.sign < 0) return a.log_abs > b.log_abs;
    return false; // both zero
}

bool slr_equal(const SignedLogReal& a, const SignedLogReal& b) {
    return !slr_less(a, b) && !slr_less(b, a);
}

SignedLogReal two_pow_two_pow(int n, int sign) {
    return SignedLogReal::from_sign_log(sign, std::ldexp(1.0, n) * M_LN2);
}

SignedLogReal parse_signed_log(const std::string& text) {
    if (text.rfind("log:", 0) == 0) {
        // log:<sign>:<ln-magnitude>
        std::string rest = text.substr(4);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw error(errc::parse_error, "expected log:<sign>:<ln-magnitude>, got '" + text + "'");
        int sign = 0;
        std::string sgn = rest.substr(0, colon);
        if (sgn == "1" || sgn == "+1")
            sign = +1;
        else if (sgn == "-1")
            sign = -1;
        else if (sgn == "0")
            sign = 0;
        else
            throw error(errc::parse_error, "bad sign '" + sgn + "' in '" + text + "'");
        std::string mag = rest.substr(colon + 1);
        try {
            double m = std::stod(mag);
            return SignedLogReal::from_sign_log(sign, m);
        } catch (const std::exception&) {
            throw error(errc::parse_error, "bad magnitude '" + mag + "' in '" + text + "'");
        }
    }
    try {
        size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size())
            throw error(errc::parse_error, "trailing characters in number '" + text + "'");
        return SignedLogReal::from_value(v);
    } catch (const error&) {
        throw;
    } catch (const std::exception&) {
        throw error(errc::parse_error, "bad numeric value '" + text + "'");
    }
}

std::string format_signed_log(const SignedLogReal& v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "log:%d:%.17g", v.sign, v.log_abs);
    return buf;
}

} // namespace invbranch
