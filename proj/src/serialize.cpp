#include "volterra/serialize.hpp"

#include <cmath>

namespace volterra {

using nlohmann::json;

json to_json(const ValidationReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
    return {{"checks", checks}, {"all_pass", rep.all_pass()}};
}

json to_json(const CharacteristicReport& rep) {
    json points = json::array();
    for (const auto& pt : rep.points)
        points.push_back({{"j", pt.j},
                          {"det", pt.det_value},
                          {"rank", pt.rank},
                          {"class", to_string(pt.cls)},
                          {"multiplicity", pt.multiplicity}});
    return {{"points", points},
            {"singular_count", rep.singular_count},
            {"param_count", rep.param_count}};
}

json to_json(const AsymptoticResult& res) {
    json terms = json::array();
    for (const auto& [key, v] : res.xhat.terms) {
        json dirs = json::object();
        for (const auto& [name, d] : v.directions) dirs[name] = d;
        terms.push_back({{"j", key.first}, {"p", key.second}, {"vector", v.base}, {"param_dirs", dirs}});
    }
    json params = json::array();
    for (const FreeParam& fp : res.free_params)
        params.push_back(
            {{"name", fp.name}, {"j", fp.j}, {"direction", fp.direction}, {"tier", fp.tier}});
    json doc = {{"terms", terms}, {"params", params}, {"text", lp_to_string(res.xhat)}};
    if (std::isinf(res.residual_order))
        doc["residual_order"] = "exact";
    else
        doc["residual_order"] = res.residual_order;
    return doc;
}

}  // namespace volterra
