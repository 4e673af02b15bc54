#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace venuepulse::csv {

// RFC-4180-style CSV: comma delimiter, double-quote escaping, quoted fields
// may contain commas, quotes and newlines. All text is treated as UTF-8.

// Quotes `field` if it contains a delimiter, quote or newline.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

class Reader {
  public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Returns the next row, or nullopt at end of input. A trailing newline
    // does not produce an empty final row.
    std::optional<std::vector<std::string>> next_row();

  private:
    std::istream& in_;
};

std::vector<std::vector<std::string>> read_all(std::istream& in);

}  // namespace venuepulse::csv
