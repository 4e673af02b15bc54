#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace venuepulse {

// Curated list of flagship venues used to classify where follow-up citations
// land (top-conference vs. top-journal mass). Lookups are case-insensitive
// and alias-aware (e.g. "NIPS" resolves to "NeurIPS").
class TopVenueRegistry {
public:
    // Compiled-in venue list; mirrors data/registry.json.
    static TopVenueRegistry builtin();

    // Loads a registry from a JSON document of the shape
    //   {"conferences":[{"name":"...","aliases":["..."]}],
    //    "journals":[{"name":"..."}]}
    // Throws Error{Errc::bad_config} on unreadable files and
    // Error{Errc::schema_violation} on malformed documents.
    static TopVenueRegistry load(const std::filesystem::path& path);

    bool is_top_conference(std::string_view venue) const;
    bool is_top_journal(std::string_view venue) const;

    // Canonical spelling for a known venue or alias; nullopt when unknown.
    std::optional<std::string> canonicalize(std::string_view venue) const;

    const std::vector<std::string>& conferences() const { return conferences_; }
    const std::vector<std::string>& journals() const { return journals_; }

private:
    void add(std::string canonical, std::vector<std::string> aliases, bool journal);

    std::vector<std::string> conferences_;
    std::vector<std::string> journals_;
    // normalized alias -> canonical spelling
    std::map<std::string, std::string, std::less<>> alias_map_;
    std::map<std::string, bool, std::less<>> journal_flag_;  // canonical -> is journal
};

}  // namespace venuepulse
