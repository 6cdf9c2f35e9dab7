#include "config.hpp"

#include <fstream>
#include <set>

#include "oqs/errors.hpp"

namespace oqsim {

using nlohmann::json;
using oqs::config_error;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
    throw config_error(field + ": " + msg);
}

void check_keys(const json& obj, const std::string& section, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(section + "." + key, "unknown key");
}

double get_number(const json& obj, const std::string& section, const std::string& key,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(section + "." + key, "required");
        return fallback;
    }
    if (!obj[key].is_number()) fail(section + "." + key, "must be a number");
    return obj[key].get<double>();
}

std::size_t get_count(const json& obj, const std::string& section, const std::string& key,
                      std::size_t fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(section + "." + key, "required");
        return fallback;
    }
    if (!obj[key].is_number_unsigned()) fail(section + "." + key, "must be a nonnegative integer");
    return obj[key].get<std::size_t>();
}

std::string get_string(const json& obj, const std::string& section, const std::string& key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(section + "." + key, "must be a string");
    return obj[key].get<std::string>();
}

SystemSection parse_system(const json& s) {
    check_keys(s, "system", {"omega_s", "n_qubits", "initial", "omega_scan"});
    SystemSection out;
    out.omega_s = get_number(s, "system", "omega_s", 1.0);
    if (out.omega_s <= 0.0) fail("system.omega_s", "must be > 0");
    out.n_qubits = get_count(s, "system", "n_qubits", 1);
    if (out.n_qubits < 1) fail("system.n_qubits", "must be >= 1");
    out.initial = get_string(s, "system", "initial", "excited");
    if (out.initial != "excited" && out.initial != "superposition")
        fail("system.initial", "must be 'excited' or 'superposition'");
    if (s.contains("omega_scan")) {
        const json& sc = s["omega_scan"];
        if (!sc.is_object()) fail("system.omega_scan", "must be an object");
        check_keys(sc, "system.omega_scan", {"from", "to", "step"});
        ScanSpec scan;
        scan.from = get_number(sc, "system.omega_scan", "from", 0.0, true);
        scan.to = get_number(sc, "system.omega_scan", "to", 0.0, true);
        scan.step = get_number(sc, "system.omega_scan", "step", 0.0, true);
        if (scan.from <= 0.0) fail("system.omega_scan.from", "must be > 0");
        if (scan.to < scan.from) fail("system.omega_scan.to", "must be >= from");
        if (scan.step <= 0.0) fail("system.omega_scan.step", "must be > 0");
        out.omega_scan = scan;
    }
    return out;
}

BathSection parse_bath(const json& b) {
    check_keys(b, "bath",
               {"kind", "alpha", "omega_c", "file", "beta", "omega_min", "delta_omega", "d",
                "couplings"});
    BathSection out;
    out.kind = get_string(b, "bath", "kind", "ohmic");
    if (out.kind == "ohmic") {
        out.alpha = get_number(b, "bath", "alpha", 0.0, true);
        out.omega_c = get_number(b, "bath", "omega_c", 0.0, true);
        if (out.alpha <= 0.0) fail("bath.alpha", "must be > 0");
        if (out.omega_c <= 0.0) fail("bath.omega_c", "must be > 0");
    } else if (out.kind == "tabulated") {
        out.file = get_string(b, "bath", "file", "");
        if (out.file.empty()) fail("bath.file", "required for tabulated densities");
    } else {
        fail("bath.kind", "must be 'ohmic' or 'tabulated'");
    }
    out.beta = get_number(b, "bath", "beta", 0.0, true);
    if (out.beta < 0.0) fail("bath.beta", "must be >= 0");
    out.omega_min = get_number(b, "bath", "omega_min", 0.0, true);
    if (out.omega_min <= 0.0) fail("bath.omega_min", "must be > 0");
    out.delta_omega = get_number(b, "bath", "delta_omega", 0.0, true);
    if (out.delta_omega <= 0.0) fail("bath.delta_omega", "must be > 0");
    out.d = get_count(b, "bath", "d", 0, true);
    if (out.d < 1) fail("bath.d", "must be >= 1");
    out.couplings = get_string(b, "bath", "couplings", "naive");
    if (out.couplings != "naive" && out.couplings != "improved")
        fail("bath.couplings", "must be 'naive' or 'improved'");
    return out;
}

EvolutionSection parse_evolution(const json& e) {
    check_keys(e, "evolution",
               {"tau", "steps", "mode", "d_i", "trotter_n0", "backend", "trajectories",
                "snapshot_stride"});
    EvolutionSection out;
    out.tau = get_number(e, "evolution", "tau", 0.0, true);
    if (out.tau <= 0.0) fail("evolution.tau", "must be > 0");
    out.steps = get_count(e, "evolution", "steps", 0, true);
    if (out.steps < 1) fail("evolution.steps", "must be >= 1");
    out.mode = get_string(e, "evolution", "mode", "joint");
    if (out.mode != "joint" && out.mode != "sequential")
        fail("evolution.mode", "must be 'joint' or 'sequential'");
    out.d_i = get_count(e, "evolution", "d_i", 1);
    if (out.d_i < 1) fail("evolution.d_i", "must be >= 1");
    out.trotter_n0 = get_count(e, "evolution", "trotter_n0", 1024);
    if (out.trotter_n0 < 1) fail("evolution.trotter_n0", "must be >= 1");
    out.backend = get_string(e, "evolution", "backend", "density_matrix");
    if (out.backend != "density_matrix" && out.backend != "trajectories")
        fail("evolution.backend", "must be 'density_matrix' or 'trajectories'");
    out.trajectories = get_count(e, "evolution", "trajectories", 100);
    out.snapshot_stride = get_count(e, "evolution", "snapshot_stride", 1);
    if (out.snapshot_stride < 1) fail("evolution.snapshot_stride", "must be >= 1");
    return out;
}

NoiseSection parse_noise(const json& n) {
    check_keys(n, "noise",
               {"n_fluctuators", "gamma_min", "gamma_max", "v", "fluctuators", "duration", "dt",
                "realizations"});
    NoiseSection out;
    if (n.contains("fluctuators")) {
        if (!n["fluctuators"].is_array()) fail("noise.fluctuators", "must be an array of [v, gamma]");
        for (const auto& fl : n["fluctuators"]) {
            if (!fl.is_array() || fl.size() != 2 || !fl[0].is_number() || !fl[1].is_number())
                fail("noise.fluctuators", "entries must be [v, gamma] pairs");
            const double gamma = fl[1].get<double>();
            if (gamma < 0.0) fail("noise.fluctuators", "gamma must be >= 0");
            out.explicit_fluctuators.emplace_back(fl[0].get<double>(), gamma);
        }
    } else {
        out.n_fluctuators = get_count(n, "noise", "n_fluctuators", 0, true);
        if (out.n_fluctuators < 1) fail("noise.n_fluctuators", "must be >= 1");
        out.gamma_min = get_number(n, "noise", "gamma_min", 0.0, true);
        out.gamma_max = get_number(n, "noise", "gamma_max", 0.0, true);
        if (!(out.gamma_min > 0.0) || !(out.gamma_max > out.gamma_min))
            fail("noise.gamma_min", "need 0 < gamma_min < gamma_max");
        out.v = get_number(n, "noise", "v", 0.0, true);
    }
    out.duration = get_number(n, "noise", "duration", 0.0, true);
    if (out.duration <= 0.0) fail("noise.duration", "must be > 0");
    out.dt = get_number(n, "noise", "dt", 0.0, true);
    if (out.dt <= 0.0) fail("noise.dt", "must be > 0");
    out.realizations = get_count(n, "noise", "realizations", 1);
    if (out.realizations < 1) fail("noise.realizations", "must be >= 1");
    return out;
}

json parse_override_value(const std::string& text) {
    const json parsed = json::parse(text, nullptr, false);
    if (!parsed.is_discarded()) return parsed;
    return json(text); // bare string
}

void apply_override(json& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("override '" + spec + "': expected key=value");
    const std::string path = spec.substr(0, eq);
    const json value = parse_override_value(spec.substr(eq + 1));

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string part = path.substr(start, dot - start);
        if (part.empty()) throw config_error("override '" + spec + "': empty path segment");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (!node->is_object() && !node->is_null())
            throw config_error("override '" + spec + "': " + part + " is not a section");
        start = dot + 1;
    }
}

} // namespace

Config parse_config(json doc, const std::vector<std::string>& overrides) {
    if (!doc.is_object()) throw config_error("config root must be a JSON object");
    for (const auto& o : overrides) apply_override(doc, o);

    static const std::set<std::string> sections{"seed",  "system",  "bath",  "evolution",
                                                "noise", "readout", "output"};
    for (const auto& [key, _] : doc.items())
        if (!sections.count(key)) fail(key, "unknown section");

    Config cfg;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) fail("seed", "must be a nonnegative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("system")) {
        if (!doc["system"].is_object()) fail("system", "must be an object");
        cfg.system = parse_system(doc["system"]);
    }
    if (doc.contains("bath")) {
        if (!doc["bath"].is_object()) fail("bath", "must be an object");
        cfg.bath = parse_bath(doc["bath"]);
    }
    if (doc.contains("evolution")) {
        if (!doc["evolution"].is_object()) fail("evolution", "must be an object");
        cfg.evolution = parse_evolution(doc["evolution"]);
        if (cfg.evolution->mode == "sequential" && cfg.bath &&
            cfg.bath->d % cfg.evolution->d_i != 0)
            fail("evolution.d_i", "must divide bath.d in sequential mode");
    }
    if (doc.contains("noise")) {
        if (!doc["noise"].is_object()) fail("noise", "must be an object");
        cfg.noise = parse_noise(doc["noise"]);
    }
    if (doc.contains("readout")) {
        if (!doc["readout"].is_object()) fail("readout", "must be an object");
        check_keys(doc["readout"], "readout", {"shots"});
        cfg.readout.shots = get_count(doc["readout"], "readout", "shots", 0);
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_object()) fail("output", "must be an object");
        check_keys(doc["output"], "output", {"prefix"});
        cfg.output.prefix = get_string(doc["output"], "output", "prefix", "run");
    }
    cfg.effective = std::move(doc);
    return cfg;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw config_error("config file is not valid JSON: " + path);
    return parse_config(std::move(doc), overrides);
}

std::string config_hash(const json& doc) {
    const std::string canon = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace oqsim
