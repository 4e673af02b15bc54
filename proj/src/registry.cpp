#include "venuepulse/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "json.hpp"
#include "venuepulse/errors.hpp"

namespace venuepulse {

namespace {

std::string fold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

}  // namespace

void TopVenueRegistry::add(std::string canonical, std::vector<std::string> aliases, bool journal) {
    alias_map_[fold(canonical)] = canonical;
    for (const auto& alias : aliases) alias_map_[fold(alias)] = canonical;
    journal_flag_[canonical] = journal;
    (journal ? journals_ : conferences_).push_back(std::move(canonical));
}

TopVenueRegistry TopVenueRegistry::builtin() {
    TopVenueRegistry r;
    r.add("AAAI", {}, false);
    r.add("IJCAI", {}, false);
    r.add("ICML", {}, false);
    r.add("NeurIPS", {"NIPS"}, false);
    r.add("ACL", {}, false);
    r.add("EMNLP", {}, false);
    r.add("CVPR", {}, false);
    r.add("ICCV", {}, false);
    r.add("ECCV", {}, false);
    r.add("KDD", {}, false);
    r.add("SIGIR", {}, false);
    r.add("WWW", {}, false);
    r.add("ICSE", {}, false);
    r.add("FSE", {}, false);
    r.add("ASE", {}, false);
    r.add("SOSP", {}, false);
    r.add("OSDI", {}, false);
    r.add("NSDI", {}, false);
    r.add("SIGCOMM", {}, false);
    r.add("INFOCOM", {}, false);
    r.add("MOBICOM", {}, false);
    r.add("CCS", {}, false);
    r.add("S&P", {"Oakland", "S&P (Oakland)"}, false);
    r.add("USENIX Security", {}, false);
    r.add("SIGMOD", {}, false);
    r.add("VLDB", {}, false);
    r.add("ICDE", {}, false);
    r.add("STOC", {}, false);
    r.add("FOCS", {}, false);
    r.add("SODA", {}, false);
    r.add("SIGGRAPH", {}, false);
    r.add("CHI", {}, false);
    r.add("Nature", {}, true);
    r.add("Science", {}, true);
    return r;
}

TopVenueRegistry TopVenueRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::bad_config, "cannot open registry file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::schema_violation, "registry JSON parse error: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("conferences") || !doc.contains("journals"))
        raise(Errc::schema_violation, "registry must contain 'conferences' and 'journals' arrays");

    TopVenueRegistry r;
    auto add_group = [&](const char* key, bool journal) {
        const auto& group = doc.at(key);
        if (!group.is_array())
            raise(Errc::schema_violation, std::string("registry '") + key + "' must be an array");
        for (const auto& entry : group) {
            if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
                raise(Errc::schema_violation,
                      std::string("registry '") + key + "' entries need a string 'name'");
            std::vector<std::string> aliases;
            if (entry.contains("aliases")) {
                if (!entry["aliases"].is_array())
                    raise(Errc::schema_violation, "registry 'aliases' must be an array");
                for (const auto& a : entry["aliases"]) {
                    if (!a.is_string())
                        raise(Errc::schema_violation, "registry aliases must be strings");
                    aliases.push_back(a.get<std::string>());
                }
            }
            r.add(entry["name"].get<std::string>(), std::move(aliases), journal);
        }
    };
    add_group("conferences", false);
    add_group("journals", true);
    return r;
}

std::optional<std::string> TopVenueRegistry::canonicalize(std::string_view venue) const {
    auto it = alias_map_.find(fold(venue));
    if (it == alias_map_.end()) return std::nullopt;
    return it->second;
}

bool TopVenueRegistry::is_top_conference(std::string_view venue) const {
    auto canon = canonicalize(venue);
    if (!canon) return false;
    return !journal_flag_.at(*canon);
}

bool TopVenueRegistry::is_top_journal(std::string_view venue) const {
    auto canon = canonicalize(venue);
    if (!canon) return false;
    return journal_flag_.at(*canon);
}

}  // namespace venuepulse
