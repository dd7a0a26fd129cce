#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "colloidsim/calibrate.hpp"
#include "colloidsim/network.hpp"

namespace colloidsim {

struct ConfigEntry {
    std::string value;
    int line = 0;
    int col = 0;
};

/// Raw parsed form of the structured plain-text config format: `[section]`
/// headers, `key = value` lines, `#` comments. Duplicate sections or keys are
/// rejected with their location.
struct ConfigFile {
    std::map<std::string, std::map<std::string, ConfigEntry>> sections;
    std::map<std::string, int> section_lines;

    static ConfigFile parse_string(const std::string& text);
    static ConfigFile parse_file(const std::filesystem::path& path);
};

struct OutputOptions {
    std::string directory = "out";
    bool csv = true;
    bool svg = false;
};

struct CalibrationOptions {
    FitConfig fit;
    std::filesystem::path reference_path;
};

struct CascadeOptions {
    int cells = 0;
    int rounds = 1;
    double stim_v = 6.0;
    double motor_threshold = 2e-5;
    double read_fraction = 0.3;
    double duration = 1.0;
    double w_init_um = 0.95;
    double w_init_cm = 0.05;
    std::vector<CascadeEdge> edges;
    std::vector<int> external_s1;
    std::vector<int> external_s2;
};

/// Whole-experiment configuration with exact-key validation: any unknown
/// section or key fails loudly with its line and column.
struct RunConfig {
    ExperimentPlan plan;
    DeviceParams device_a;
    DeviceParams device_b;
    OutputOptions output;
    std::optional<CalibrationOptions> calibration;
    std::optional<CascadeOptions> cascade;
    std::uint64_t config_hash = 0;

    static RunConfig load(const std::filesystem::path& path);
};

/// Reads a device defaults file: a `[device]` section carrying every
/// DeviceParams field.
DeviceParams load_device_defaults(const std::filesystem::path& path);

/// FNV-1a hash of the canonical key=value serialization. The environment
/// label is excluded so control runs that differ only in atmosphere hash
/// (and therefore serialize) identically.
std::uint64_t config_hash_of(const ConfigFile& file);

}  // namespace colloidsim
