// Run configuration shared by the command-line tool and embedded in every
// output file.
#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscamp/errors.hpp"
#include "oscamp/maps.hpp"
#include "oscamp/oscillation.hpp"
#include "oscamp/real.hpp"

namespace oscamp {

struct RunConfig
{
    std::vector<std::string> weights{"1/4", "0", "3/4"};
    unsigned digits = default_digits;
    int g_order = 20;
    int phi_order = 10;
    int depth_phi = 12;
    int depth_g = 12;
    double window_start = -2.6931471805599453;  // -2 - log 2, informational
    int samples = 256;
    int harmonics = 4;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output;          // empty: stdout
    std::string format = "csv";  // csv | json

    template <class Real>
    PinningMap<Real> map() const
    {
        return PinningMap<Real>::from_strings(weights);
    }

    EngineOptions engine_options() const
    {
        EngineOptions o;
        o.g_order = g_order;
        o.phi_order = phi_order;
        o.depth_phi = depth_phi;
        o.depth_g = depth_g;
        o.samples = samples;
        o.harmonics = harmonics;
        o.threads = threads;
        return o;
    }
};

/// Weights written as JSON numbers or strings; numbers are read through their
/// shortest decimal form.
inline std::vector<std::string> weights_from_json(const nlohmann::json& j)
{
    if (!j.is_array()) throw invalid_argument_error("\"weights\" must be an array");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (v.is_string()) {
            out.push_back(v.get<std::string>());
        } else if (v.is_number_integer()) {
            out.push_back(std::to_string(v.get<long long>()));
        } else if (v.is_number()) {
            out.push_back(rational_from_double(v.get<double>()).str());
        } else {
            throw invalid_argument_error("weights must be numbers or numeric strings");
        }
    }
    return out;
}

inline void to_json(nlohmann::json& j, const RunConfig& c)
{
    j = nlohmann::json{{"weights", c.weights},   {"digits", c.digits},       {"g_order", c.g_order},
                       {"phi_order", c.phi_order}, {"depth_phi", c.depth_phi}, {"depth_g", c.depth_g},
                       {"window_start", c.window_start}, {"samples", c.samples}, {"harmonics", c.harmonics},
                       {"seed", c.seed},          {"threads", c.threads},     {"output", c.output},
                       {"format", c.format}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c)
{
    if (!j.is_object()) throw invalid_argument_error("configuration must be a JSON object");
    if (j.contains("weights")) c.weights = weights_from_json(j.at("weights"));
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("digits", c.digits);
    get("g_order", c.g_order);
    get("phi_order", c.phi_order);
    get("depth_phi", c.depth_phi);
    get("depth_g", c.depth_g);
    get("window_start", c.window_start);
    get("samples", c.samples);
    get("harmonics", c.harmonics);
    get("seed", c.seed);
    get("threads", c.threads);
    get("output", c.output);
    get("format", c.format);
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw invalid_argument_error("cannot open configuration file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw invalid_argument_error("configuration file '" + path + "': " + e.what());
    }
    RunConfig c;
    try {
        c = j.get<RunConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw invalid_argument_error("configuration file '" + path + "': " + e.what());
    }
    return c;
}

}  // namespace oscamp
