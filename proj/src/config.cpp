#include "deltafbs/config.hpp"

#include <fstream>

#include <json.hpp>

#include "deltafbs/errors.hpp"

namespace dfbs {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("machine config field '" + field + "': " + why);
}

Poly get_poly(const json& j, const std::string& field) {
    if (!j.contains(field) || !j[field].is_array() || j[field].empty())
        bad_field(field, "must be a non-empty coefficient array (ascending powers of s)");
    Poly p(j[field].size());
    for (size_t i = 0; i < j[field].size(); ++i) {
        if (!j[field][i].is_number()) bad_field(field, "coefficients must be numbers");
        p[static_cast<Eigen::Index>(i)] = j[field][i].get<double>();
    }
    return p;
}

RationalTF get_tf(const json& j, const std::string& name) {
    if (!j.contains(name) || !j[name].is_object()) bad_field(name, "must be a {num, den} object");
    try {
        return RationalTF(get_poly(j[name], "num"), get_poly(j[name], "den"));
    } catch (const DomainError& e) {
        bad_field(name, e.what());
    }
}

double get_num(const json& j, const std::string& field, double fallback, bool required = false) {
    if (!j.contains(field)) {
        if (required) bad_field(field, "missing");
        return fallback;
    }
    if (!j[field].is_number()) bad_field(field, "must be a number");
    return j[field].get<double>();
}

}  // namespace

MachineConfig default_machine() {
    MachineConfig mc;
    mc.blocks = ModelBlocks::synthetic_default();
    return mc;
}

MachineConfig load_machine_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open machine config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("machine config is not valid JSON: ") + e.what());
    }
    MachineConfig mc;
    if (j.contains("geometry")) {
        const json& g = j["geometry"];
        mc.geometry.forearm_length = get_num(g, "forearm_length", 300.0);
        mc.geometry.carriage_radius = get_num(g, "carriage_radius", 140.0);
        mc.geometry.effector_radius = get_num(g, "effector_radius", 40.0);
        if (g.contains("carriage_angles_deg")) {
            if (!g["carriage_angles_deg"].is_array() || g["carriage_angles_deg"].size() != 3)
                bad_field("geometry.carriage_angles_deg", "must be an array of 3 angles");
            for (int i = 0; i < 3; ++i)
                mc.geometry.carriage_angles[static_cast<size_t>(i)] =
                    g["carriage_angles_deg"][static_cast<size_t>(i)].get<double>() * M_PI / 180.0;
        }
        if (g.contains("build_volume")) {
            const json& bv = g["build_volume"];
            for (auto [name, target] : {std::pair{"x", &mc.geometry.build_x},
                                        std::pair{"y", &mc.geometry.build_y},
                                        std::pair{"z", &mc.geometry.build_z}}) {
                if (!bv.contains(name)) continue;
                if (!bv[name].is_array() || bv[name].size() != 2)
                    bad_field(std::string("geometry.build_volume.") + name, "must be [lo, hi]");
                (*target)[0] = bv[name][0].get<double>();
                (*target)[1] = bv[name][1].get<double>();
            }
        }
        try {
            mc.geometry.validate();
        } catch (const ConfigError& e) {
            bad_field("geometry", e.what());
        }
    }
    mc.sampling_time = get_num(j, "sampling_time", 1e-3);
    if (mc.sampling_time <= 0.0) bad_field("sampling_time", "must be positive");
    if (j.contains("discretization")) {
        std::string d = j["discretization"].get<std::string>();
        if (d == "zoh")
            mc.method = DiscretizationMethod::Zoh;
        else if (d == "tustin")
            mc.method = DiscretizationMethod::Tustin;
        else
            bad_field("discretization", "must be 'zoh' or 'tustin'");
    }
    if (j.contains("blocks")) {
        const json& b = j["blocks"];
        RationalTF g_qd = get_tf(b, "g_qd");
        RationalTF g_fq = get_tf(b, "g_fq");
        std::array<RationalTF, 3> flex;
        std::array<double, 3> masses;
        const char* names[3] = {"w_x", "w_y", "w_z"};
        for (int k = 0; k < 3; ++k) {
            flex[static_cast<size_t>(k)] = get_tf(b, names[k]);
            masses[static_cast<size_t>(k)] =
                get_num(b[names[k]], "mass", 0.0, /*required=*/true);
            if (masses[static_cast<size_t>(k)] < 0.0)
                bad_field(std::string("blocks.") + names[k] + ".mass", "must be nonnegative");
        }
        double omega0 = get_num(j, "frequency_scale", 2.0 * M_PI * 40.0);
        if (omega0 <= 0.0) bad_field("frequency_scale", "must be positive");
        try {
            mc.blocks = ModelBlocks::assemble(g_qd, g_fq, flex, masses, omega0);
        } catch (const ConfigError& e) {
            bad_field("blocks", e.what());
        }
    } else {
        mc.blocks = ModelBlocks::synthetic_default();
    }
    if (j.contains("inertial_distribution")) {
        const json& p = j["inertial_distribution"];
        if (!p.is_array() || p.size() != 3)
            bad_field("inertial_distribution", "must be an array of three 3x3 matrices");
        for (int c = 0; c < 3; ++c) {
            const json& M = p[static_cast<size_t>(c)];
            if (!M.is_array() || M.size() != 3)
                bad_field("inertial_distribution", "each entry must be a 3x3 matrix");
            for (int r = 0; r < 3; ++r)
                for (int k = 0; k < 3; ++k)
                    mc.distribution.P[static_cast<size_t>(c)](r, k) =
                        M[static_cast<size_t>(r)][static_cast<size_t>(k)].get<double>();
        }
    }
    return mc;
}

void write_default_machine_config(const std::string& path) {
    // Mirrors ModelBlocks::synthetic_default() in file form.
    json j;
    j["geometry"] = {{"forearm_length", 300.0},
                     {"carriage_radius", 140.0},
                     {"effector_radius", 40.0},
                     {"carriage_angles_deg", {90.0, 210.0, 330.0}},
                     {"build_volume",
                      {{"x", {-135.0, 135.0}}, {"y", {-135.0, 135.0}}, {"z", {0.0, 300.0}}}}};
    j["sampling_time"] = 1e-3;
    j["discretization"] = "zoh";
    j["frequency_scale"] = 2.0 * M_PI * 40.0;
    auto so = [](double wn, double zeta, double gain) {
        return json{{"num", {gain * wn * wn}}, {"den", {wn * wn, 2.0 * zeta * wn, 1.0}}};
    };
    double w40 = 2.0 * M_PI * 40.0, w35 = 2.0 * M_PI * 35.0, w50 = 2.0 * M_PI * 50.0;
    json blocks;
    blocks["g_qd"] = so(w40, 0.15, 1.0);
    blocks["g_fq"] = so(w40, 0.15, 1e-3);
    blocks["w_x"] = so(w35, 0.1, 1.0);
    blocks["w_x"]["mass"] = 0.3;
    blocks["w_y"] = so(w35, 0.1, 1.0);
    blocks["w_y"]["mass"] = 0.3;
    blocks["w_z"] = so(w50, 0.1, 1.0);
    blocks["w_z"]["mass"] = 0.3;
    j["blocks"] = blocks;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write machine config: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace dfbs
