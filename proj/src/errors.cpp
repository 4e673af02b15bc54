#include "venuepulse/errors.hpp"

namespace venuepulse {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::missing_field: return "MissingField";
        case Errc::negative_count: return "NegativeCount";
        case Errc::year_out_of_window: return "YearOutOfWindow";
        case Errc::inconsistent_counts: return "InconsistentCounts";
        case Errc::duplicate_record: return "DuplicateRecord";
        case Errc::unknown_venue: return "UnknownVenue";
        case Errc::empty_venue: return "EmptyVenue";
        case Errc::zero_citation_mass: return "ZeroCitationMass";
        case Errc::insufficient_years: return "InsufficientYears";
        case Errc::unknown_indicator: return "UnknownIndicator";
        case Errc::unknown_category: return "UnknownCategory";
        case Errc::undefined_point: return "UndefinedPoint";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::degenerate_input: return "DegenerateInput";
        case Errc::venue_year_mismatch: return "VenueYearMismatch";
        case Errc::schema_violation: return "SchemaViolation";
        case Errc::io_failure: return "IoFailure";
        case Errc::endpoint_unreachable: return "EndpointUnreachable";
        case Errc::malformed_response: return "MalformedResponse";
        case Errc::bad_config: return "BadConfig";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace venuepulse
