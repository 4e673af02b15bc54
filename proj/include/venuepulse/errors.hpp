#pragma once

#include <stdexcept>
#include <string>

namespace venuepulse {

// Machine-checkable failure categories used across the library. CLI commands
// map these onto process exit codes (see report.hpp).
enum class Errc {
    missing_field,
    negative_count,
    year_out_of_window,
    inconsistent_counts,
    duplicate_record,
    unknown_venue,
    empty_venue,
    zero_citation_mass,
    insufficient_years,
    unknown_indicator,
    unknown_category,
    undefined_point,
    length_mismatch,
    degenerate_input,
    venue_year_mismatch,
    schema_violation,
    io_failure,
    endpoint_unreachable,
    malformed_response,
    bad_config,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

}  // namespace venuepulse
