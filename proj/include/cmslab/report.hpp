#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cmslab {

/// One checked identity. `anchor` names the statement being checked in words.
struct Report {
    std::string identity;
    std::string anchor;
    nlohmann::json parameters = nlohmann::json::object();
    bool pass = false;
    nlohmann::json witness = nullptr;
};

void to_json(nlohmann::json& j, const Report& r);

inline bool all_pass(const std::vector<Report>& rs) {
    for (const auto& r : rs)
        if (!r.pass) return false;
    return true;
}

}  // namespace cmslab
