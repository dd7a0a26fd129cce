#include "colloidsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "colloidsim/errors.hpp"

namespace colloidsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

double parse_double(const ConfigEntry& e, const std::string& key) {
    const std::string t = trim(e.value);
    if (t.empty()) throw config_error("empty value for '" + key + "'", e.line, e.col);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v))
        throw config_error("expected a finite number for '" + key + "'", e.line, e.col);
    return v;
}

long long parse_int(const ConfigEntry& e, const std::string& key) {
    const std::string t = trim(e.value);
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw config_error("expected an integer for '" + key + "'", e.line, e.col);
    return v;
}

std::uint64_t parse_uint64(const ConfigEntry& e, const std::string& key) {
    const std::string t = trim(e.value);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || t[0] == '-')
        throw config_error("expected a non-negative integer for '" + key + "'", e.line, e.col);
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
    ConfigFile file;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string current;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const int col = static_cast<int>(line.find_first_not_of(" \t\r")) + 1;

        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error("malformed section header", line_no, col);
            const std::string name = trim(t.substr(1, t.size() - 2));
            if (!valid_name(name))
                throw config_error("bad section name '" + name + "'", line_no, col);
            if (file.sections.count(name))
                throw config_error("duplicate section '" + name + "'", line_no, col);
            file.sections[name];
            file.section_lines[name] = line_no;
            current = name;
            continue;
        }
        if (current.empty())
            throw config_error("entry before any [section] header", line_no, col);
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value'", line_no, col);
        const std::string key = trim(t.substr(0, eq));
        if (!valid_name(key))
            throw config_error("bad key '" + key + "'", line_no, col);
        auto& section = file.sections[current];
        if (section.count(key))
            throw config_error("duplicate key '" + key + "'", line_no, col);
        section[key] = ConfigEntry{trim(t.substr(eq + 1)), line_no, col};
    }
    return file;
}

ConfigFile ConfigFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open '" + path.string() + "'", 0, 0);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

std::uint64_t config_hash_of(const ConfigFile& file) {
    std::string canon;
    for (const auto& [section, entries] : file.sections) {
        for (const auto& [key, entry] : entries) {
            if (section == "plan" && key == "environment") continue;
            canon += section;
            canon += '.';
            canon += key;
            canon += '=';
            canon += entry.value;
            canon += '\n';
        }
    }
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

using Section = std::map<std::string, ConfigEntry>;

const ConfigEntry& require_key(const Section& sec, const std::string& section_name,
                               const std::string& key, int section_line) {
    auto it = sec.find(key);
    if (it == sec.end())
        throw config_error("section [" + section_name + "] is missing key '" + key + "'",
                           section_line, 1);
    return it->second;
}

void reject_unknown(const Section& sec, const std::string& section_name,
                    const std::set<std::string>& known) {
    for (const auto& [key, entry] : sec)
        if (!known.count(key))
            throw config_error("unknown key '" + key + "' in section [" + section_name + "]",
                               entry.line, entry.col);
}

SweepSpec read_sweep(const Section& sec, const std::string& name, int line, DriveTarget target) {
    reject_unknown(sec, name, {"v_start", "v_end", "v_step", "dwell"});
    SweepSpec spec;
    spec.v_start = parse_double(require_key(sec, name, "v_start", line), "v_start");
    spec.v_end = parse_double(require_key(sec, name, "v_end", line), "v_end");
    spec.v_step = parse_double(require_key(sec, name, "v_step", line), "v_step");
    spec.dwell = parse_double(require_key(sec, name, "dwell", line), "dwell");
    spec.target = target;
    try {
        spec.validate();
    } catch (const validation_error& e) {
        throw config_error(std::string(e.what()) + " in [" + name + "]", line, 1);
    }
    return spec;
}

DeviceParams read_device(const Section& sec, const std::string& name, int line,
                         const std::filesystem::path& base_dir) {
    if (sec.count("from")) {
        reject_unknown(sec, name, {"from"});
        const auto& entry = sec.at("from");
        std::filesystem::path p = trim(entry.value);
        if (p.is_relative()) p = base_dir / p;
        try {
            return load_device_defaults(p);
        } catch (const config_error&) {
            throw;
        } catch (const std::exception& e) {
            throw config_error("defaults file '" + p.string() + "': " + e.what(), entry.line,
                               entry.col);
        }
    }
    const std::set<std::string> keys = {"r_on",  "r_off", "v_th_pot",  "v_th_dep", "k_pot",
                                        "k_dep", "alpha", "tau_decay", "w_init"};
    reject_unknown(sec, name, keys);
    DeviceParams p;
    p.r_on = parse_double(require_key(sec, name, "r_on", line), "r_on");
    p.r_off = parse_double(require_key(sec, name, "r_off", line), "r_off");
    p.v_th_pot = parse_double(require_key(sec, name, "v_th_pot", line), "v_th_pot");
    p.v_th_dep = parse_double(require_key(sec, name, "v_th_dep", line), "v_th_dep");
    p.k_pot = parse_double(require_key(sec, name, "k_pot", line), "k_pot");
    p.k_dep = parse_double(require_key(sec, name, "k_dep", line), "k_dep");
    p.alpha = parse_double(require_key(sec, name, "alpha", line), "alpha");
    p.tau_decay = parse_double(require_key(sec, name, "tau_decay", line), "tau_decay");
    p.w_init = parse_double(require_key(sec, name, "w_init", line), "w_init");
    try {
        p.validate();
    } catch (const validation_error& e) {
        throw config_error(std::string(e.what()) + " in [" + name + "]", line, 1);
    }
    return p;
}

std::vector<int> read_int_list(const Section& sec, const std::string& key) {
    std::vector<int> out;
    if (!sec.count(key)) return out;
    const auto& entry = sec.at(key);
    for (const auto& item : split_list(entry.value)) {
        char* end = nullptr;
        const long long v = std::strtoll(item.c_str(), &end, 10);
        if (end != item.c_str() + item.size() || v < 0)
            throw config_error("expected cell indices in '" + key + "'", entry.line, entry.col);
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace

DeviceParams load_device_defaults(const std::filesystem::path& path) {
    ConfigFile file = ConfigFile::parse_file(path);
    for (const auto& [name, _] : file.sections)
        if (name != "device")
            throw config_error("unexpected section [" + name + "] in defaults file",
                               file.section_lines.at(name), 1);
    if (!file.sections.count("device"))
        throw config_error("defaults file needs a [device] section", 1, 1);
    return read_device(file.sections.at("device"), "device", file.section_lines.at("device"),
                       path.parent_path());
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    ConfigFile file = ConfigFile::parse_file(path);
    const std::filesystem::path base_dir = path.parent_path();

    const std::set<std::string> known_sections = {"plan",     "bell",     "food",
                                                  "bell_test", "device_a", "device_b",
                                                  "circuit",  "output",   "calibration",
                                                  "cascade"};
    for (const auto& [name, _] : file.sections)
        if (!known_sections.count(name))
            throw config_error("unknown section [" + name + "]", file.section_lines.at(name), 1);
    for (const std::string required :
         {"plan", "bell", "food", "bell_test", "device_a", "device_b", "circuit", "output"})
        if (!file.sections.count(required))
            throw config_error("missing required section [" + std::string(required) + "]", 1, 1);

    RunConfig cfg;
    auto line_of = [&](const std::string& s) { return file.section_lines.at(s); };

    {
        const auto& sec = file.sections.at("plan");
        reject_unknown(sec, "plan",
                       {"n_cycles", "probe_v", "salivation_threshold", "environment", "seed",
                        "noise_amplitude", "inter_cycle_idle_s"});
        const int line = line_of("plan");
        cfg.plan.n_cycles =
            static_cast<int>(parse_int(require_key(sec, "plan", "n_cycles", line), "n_cycles"));
        cfg.plan.probe_v = parse_double(require_key(sec, "plan", "probe_v", line), "probe_v");
        cfg.plan.salivation_threshold = parse_double(
            require_key(sec, "plan", "salivation_threshold", line), "salivation_threshold");
        const auto& env = require_key(sec, "plan", "environment", line);
        const std::string env_v = trim(env.value);
        if (env_v == "ambient") cfg.plan.environment = Environment::ambient;
        else if (env_v == "nitrogen") cfg.plan.environment = Environment::nitrogen;
        else throw config_error("environment must be 'ambient' or 'nitrogen'", env.line, env.col);
        cfg.plan.seed = parse_uint64(require_key(sec, "plan", "seed", line), "seed");
        if (sec.count("noise_amplitude"))
            cfg.plan.noise_amplitude = parse_double(sec.at("noise_amplitude"), "noise_amplitude");
        if (sec.count("inter_cycle_idle_s"))
            cfg.plan.inter_cycle_idle_s =
                parse_double(sec.at("inter_cycle_idle_s"), "inter_cycle_idle_s");
    }

    cfg.plan.bell =
        read_sweep(file.sections.at("bell"), "bell", line_of("bell"), DriveTarget::bell);
    cfg.plan.food =
        read_sweep(file.sections.at("food"), "food", line_of("food"), DriveTarget::food);
    cfg.plan.bell_test = read_sweep(file.sections.at("bell_test"), "bell_test",
                                    line_of("bell_test"), DriveTarget::bell);

    cfg.device_a = read_device(file.sections.at("device_a"), "device_a", line_of("device_a"),
                               base_dir);
    cfg.device_b = read_device(file.sections.at("device_b"), "device_b", line_of("device_b"),
                               base_dir);

    {
        const auto& sec = file.sections.at("circuit");
        reject_unknown(sec, "circuit", {"line_r", "line_l", "dt", "solver_tol",
                                        "max_newton_iters"});
        const int line = line_of("circuit");
        cfg.plan.line_r = parse_double(require_key(sec, "circuit", "line_r", line), "line_r");
        cfg.plan.line_l = parse_double(require_key(sec, "circuit", "line_l", line), "line_l");
        cfg.plan.dt = parse_double(require_key(sec, "circuit", "dt", line), "dt");
        cfg.plan.solver_tol =
            parse_double(require_key(sec, "circuit", "solver_tol", line), "solver_tol");
        cfg.plan.max_newton_iters = static_cast<int>(
            parse_int(require_key(sec, "circuit", "max_newton_iters", line), "max_newton_iters"));
    }

    {
        const auto& sec = file.sections.at("output");
        reject_unknown(sec, "output", {"directory", "formats"});
        const int line = line_of("output");
        cfg.output.directory = trim(require_key(sec, "output", "directory", line).value);
        const auto& formats = require_key(sec, "output", "formats", line);
        cfg.output.csv = false;
        cfg.output.svg = false;
        for (const auto& f : split_list(formats.value)) {
            if (f == "csv") cfg.output.csv = true;
            else if (f == "svg") cfg.output.svg = true;
            else throw config_error("unknown output format '" + f + "'", formats.line,
                                    formats.col);
        }
        if (!cfg.output.csv && !cfg.output.svg)
            throw config_error("output formats must include csv and/or svg", formats.line,
                               formats.col);
    }

    if (file.sections.count("calibration")) {
        const auto& sec = file.sections.at("calibration");
        const int line = line_of("calibration");
        CalibrationOptions cal;
        std::set<std::string> known = {"reference", "free_params", "max_evals", "n_restarts",
                                       "seed"};
        const auto& free_entry = require_key(sec, "calibration", "free_params", line);
        cal.fit.free_params = split_list(free_entry.value);
        if (cal.fit.free_params.empty())
            throw config_error("free_params must not be empty", free_entry.line, free_entry.col);
        for (const auto& name : cal.fit.free_params) known.insert("bound_" + name);
        reject_unknown(sec, "calibration", known);
        for (const auto& name : cal.fit.free_params) {
            const auto& b = require_key(sec, "calibration", "bound_" + name, line);
            const auto parts = split_list(b.value);
            if (parts.size() != 2)
                throw config_error("bound_" + name + " must be 'lo,hi'", b.line, b.col);
            ConfigEntry lo{parts[0], b.line, b.col}, hi{parts[1], b.line, b.col};
            cal.fit.bounds.emplace_back(parse_double(lo, "bound_" + name),
                                        parse_double(hi, "bound_" + name));
        }
        cal.fit.max_evals = static_cast<int>(
            parse_int(require_key(sec, "calibration", "max_evals", line), "max_evals"));
        cal.fit.n_restarts = static_cast<int>(
            parse_int(require_key(sec, "calibration", "n_restarts", line), "n_restarts"));
        cal.fit.seed = parse_uint64(require_key(sec, "calibration", "seed", line), "seed");
        std::filesystem::path ref = trim(require_key(sec, "calibration", "reference", line).value);
        if (ref.is_relative()) ref = base_dir / ref;
        cal.reference_path = ref;
        try {
            cal.fit.validate();
        } catch (const validation_error& e) {
            throw config_error(std::string(e.what()) + " in [calibration]", line, 1);
        }
        cfg.calibration = std::move(cal);
    }

    if (file.sections.count("cascade")) {
        const auto& sec = file.sections.at("cascade");
        const int line = line_of("cascade");
        reject_unknown(sec, "cascade",
                       {"cells", "rounds", "stim_v", "motor_threshold", "read_fraction",
                        "duration", "w_init_um", "w_init_cm", "edges", "external_s1",
                        "external_s2"});
        CascadeOptions cas;
        cas.cells = static_cast<int>(
            parse_int(require_key(sec, "cascade", "cells", line), "cells"));
        cas.rounds = static_cast<int>(
            parse_int(require_key(sec, "cascade", "rounds", line), "rounds"));
        cas.stim_v = parse_double(require_key(sec, "cascade", "stim_v", line), "stim_v");
        cas.motor_threshold =
            parse_double(require_key(sec, "cascade", "motor_threshold", line), "motor_threshold");
        cas.read_fraction =
            parse_double(require_key(sec, "cascade", "read_fraction", line), "read_fraction");
        cas.duration = parse_double(require_key(sec, "cascade", "duration", line), "duration");
        cas.w_init_um = parse_double(require_key(sec, "cascade", "w_init_um", line), "w_init_um");
        cas.w_init_cm = parse_double(require_key(sec, "cascade", "w_init_cm", line), "w_init_cm");
        if (cas.cells < 1) throw config_error("cascade needs at least one cell", line, 1);
        if (cas.rounds < 1) throw config_error("cascade needs at least one round", line, 1);
        if (sec.count("edges")) {
            const auto& entry = sec.at("edges");
            for (const auto& item : split_list(entry.value)) {
                // "u->v:s1" or "u->v:s2"
                const auto arrow = item.find("->");
                const auto colon = item.find(':');
                if (arrow == std::string::npos || colon == std::string::npos || colon < arrow)
                    throw config_error("edge '" + item + "' must look like 'u->v:s1'",
                                       entry.line, entry.col);
                CascadeEdge edge;
                edge.upstream = std::atoi(item.substr(0, arrow).c_str());
                edge.downstream = std::atoi(item.substr(arrow + 2, colon - arrow - 2).c_str());
                const std::string role = trim(item.substr(colon + 1));
                if (role == "s1") edge.role = EdgeRole::drives_s1;
                else if (role == "s2") edge.role = EdgeRole::drives_s2;
                else throw config_error("edge role must be s1 or s2", entry.line, entry.col);
                cas.edges.push_back(edge);
            }
        }
        cas.external_s1 = read_int_list(sec, "external_s1");
        cas.external_s2 = read_int_list(sec, "external_s2");
        cfg.cascade = std::move(cas);
    }

    cfg.config_hash = config_hash_of(file);
    try {
        cfg.plan.validate(cfg.device_a, cfg.device_b);
    } catch (const validation_error& e) {
        throw config_error(e.what(), 1, 1);
    }
    return cfg;
}

}  // namespace colloidsim
