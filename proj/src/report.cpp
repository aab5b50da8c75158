#include "cmslab/report.hpp"

namespace cmslab {

void to_json(nlohmann::json& j, const Report& r) {
    j = {{"identity", r.identity}, {"anchor", r.anchor}, {"parameters", r.parameters}, {"pass", r.pass},
         {"witness", r.witness}};
}

}  // namespace cmslab
