#include "venuepulse/csv.hpp"

namespace venuepulse::csv {

std::string escape(std::string_view field) {
    bool needs_quoting = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quoting) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

std::optional<std::vector<std::string>> Reader::next_row() {
    int first = in_.peek();
    if (first == std::istream::traits_type::eof()) return std::nullopt;

    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool saw_any = false;

    for (;;) {
        int ci = in_.get();
        if (ci == std::istream::traits_type::eof()) {
            if (!saw_any && row.empty() && field.empty()) return std::nullopt;
            row.push_back(std::move(field));
            return row;
        }
        char c = static_cast<char>(ci);
        saw_any = true;
        if (quoted) {
            if (c == '"') {
                if (in_.peek() == '"') {
                    in_.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                quoted = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                break;
            case '\r':
                if (in_.peek() == '\n') in_.get();
                [[fallthrough]];
            case '\n':
                row.push_back(std::move(field));
                return row;
            default:
                field.push_back(c);
        }
    }
}

std::vector<std::vector<std::string>> read_all(std::istream& in) {
    Reader reader(in);
    std::vector<std::vector<std::string>> rows;
    while (auto row = reader.next_row()) rows.push_back(std::move(*row));
    return rows;
}

}  // namespace venuepulse::csv
