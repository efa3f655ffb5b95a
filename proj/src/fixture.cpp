#include "mpar/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace mpar {

namespace {

double parse_ttl(const nlohmann::json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
        throw parameter_error("ttl_hours must be a positive number or \"inf\"");
    }
    const double ttl = v.get<double>();
    if (!(ttl > 0.0)) throw parameter_error("ttl_hours must be positive");
    return ttl;
}

} // namespace

Fixture load_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open fixture: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parameter_error("fixture " + path + " is not valid JSON: " + e.what());
    }

    Fixture fx;
    fx.name = j.value("name", std::string("fixture"));
    fx.grid.period_hours = j.at("period_hours").get<double>();
    fx.grid.slots = j.at("slots").get<int>();
    fx.grid.validate();
    fx.locations = j.at("locations").get<int>();
    fx.delta = j.value("delta", 0.95);
    if (!(fx.delta > 0.0) || !(fx.delta < 1.0))
        throw parameter_error("delta must lie in (0,1)");
    fx.ttl_hours = j.contains("ttl_hours") ? parse_ttl(j.at("ttl_hours")) : kInf;

    struct Loaded {
        int id;
        MovementRecord rec;
    };
    std::vector<Loaded> loaded;
    for (const auto& rj : j.at("records")) {
        Loaded l;
        l.id = rj.at("node").get<int>();
        const int h = rj.at("h").get<int>();
        const int m = rj.at("m").get<int>();
        if (h != fx.grid.slots || m != fx.locations)
            throw dimension_error("record dimensions disagree with the fixture grid");
        l.rec = MovementRecord::zero(0, h, m);
        const auto& rows = rj.at("rates");
        if (static_cast<int>(rows.size()) != h)
            throw dimension_error("record row count mismatch");
        for (int k = 0; k < h; ++k) {
            if (static_cast<int>(rows[k].size()) != m)
                throw dimension_error("record column count mismatch");
            for (int c = 0; c < m; ++c) l.rec.at(k, c) = rows[k][c].get<double>();
        }
        loaded.push_back(std::move(l));
    }
    if (loaded.empty()) throw parameter_error("fixture has no records");
    std::sort(loaded.begin(), loaded.end(),
              [](const Loaded& a, const Loaded& b) { return a.id < b.id; });

    const int src_ext = j.at("source").get<int>();
    const int dst_ext = j.at("destination").get<int>();
    for (size_t i = 0; i < loaded.size(); ++i) {
        fx.external_ids.push_back(loaded[i].id);
        loaded[i].rec.owner = static_cast<NodeId>(i);
        loaded[i].rec.validate();
        fx.records.push_back(std::move(loaded[i].rec));
        if (loaded[i].id == src_ext) fx.source = static_cast<NodeId>(i);
        if (loaded[i].id == dst_ext) fx.destination = static_cast<NodeId>(i);
    }
    if (fx.source < 0 || fx.destination < 0)
        throw parameter_error("source/destination ids missing from the record set");
    if (fx.source == fx.destination)
        throw parameter_error("source must differ from destination");
    return fx;
}

std::string fixture_to_json(const Fixture& fx) {
    nlohmann::json records = nlohmann::json::array();
    for (size_t i = 0; i < fx.records.size(); ++i) {
        const MovementRecord& r = fx.records[i];
        nlohmann::json rows = nlohmann::json::array();
        for (int k = 0; k < r.slots; ++k) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < r.locations; ++j) row.push_back(r.at(k, j));
            rows.push_back(std::move(row));
        }
        records.push_back({{"node", fx.external_ids[i]},
                           {"h", r.slots},
                           {"m", r.locations},
                           {"rates", rows}});
    }
    nlohmann::json j{{"schema", 1},
                     {"name", fx.name},
                     {"period_hours", fx.grid.period_hours},
                     {"slots", fx.grid.slots},
                     {"locations", fx.locations},
                     {"delta", fx.delta},
                     {"source", fx.external_ids[static_cast<size_t>(fx.source)]},
                     {"destination", fx.external_ids[static_cast<size_t>(fx.destination)]},
                     {"records", records}};
    if (std::isinf(fx.ttl_hours))
        j["ttl_hours"] = "inf";
    else
        j["ttl_hours"] = fx.ttl_hours;
    return j.dump(2);
}

} // namespace mpar
