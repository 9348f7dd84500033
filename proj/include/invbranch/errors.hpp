#pragma once

#include <stdexcept>
#include <string>

namespace invbranch {

enum class errc {
    precondition,
    on_curve,
    not_closed,
    no_seeds,
    resolution_too_coarse,
    touches_boundary,
    zero_mass,
    epsilon_range,
    undersampled,
    degenerate_saturation,
    parse_error,
};

const char* errc_name(errc code);

/// Exception carrying a typed error code; the CLI maps codes to exit statuses.
class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const { return code_; }

  private:
    errc code_;
};

} // namespace invbranch
