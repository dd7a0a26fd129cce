#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "colloidsim/calibrate.hpp"
#include "colloidsim/network.hpp"
#include "colloidsim/protocol.hpp"

namespace colloidsim {

/// Attribution stamped into every output file as key=value comment lines.
struct RunMetadata {
    std::string tool_version;
    std::uint64_t config_hash = 0;
};

std::string format_number(double v);
std::string metadata_comments(const RunMetadata& meta);

/// cycles.csv: one row per cycle, wide schema.
std::string cycles_csv(const std::vector<CycleRecord>& records, const RunMetadata& meta);

/// Long-form per-phase serialization: cycle,phase,r_a_ohm,r_b_ohm.
std::string records_csv(const std::vector<CycleRecord>& records, const RunMetadata& meta);

/// bell_test.csv: the conditioned-reflex test outcome.
std::string bell_test_csv(const BellTestResult& result, double threshold,
                          const RunMetadata& meta);

/// trace.csv for one sweep: t_s,v_drive_v,i_a_a,i_b_a,r_a_ohm,r_b_ohm,w_a,w_b.
/// Devices absent from the netlist are reconstructed from their pre-sweep
/// slot by pure relaxation (current 0).
std::string trace_csv(const Trace& trace, const Waveform& drive, DeviceSlot off_a,
                      DeviceSlot off_b, double dt, const RunMetadata& meta);

/// firing.csv for cascade rounds: round,cell,s1,s2,m_fires,w_cm.
std::string firing_csv(const std::vector<FiringRecord>& records, const RunMetadata& meta);

/// Device defaults file text ([device] section, field-by-field comments).
std::string device_defaults_text(const DeviceParams& p, const RunMetadata& meta);

/// Fit summary file text ([fit] section plus the fitted [device] section).
std::string fit_result_text(const FitResult& fr, const RunMetadata& meta);

/// Reads the reference trajectory data file (MOhm columns); this is the one
/// place where MOhm -> ohm conversion happens.
ReferenceTrace load_reference_trace(const std::filesystem::path& path);

/// Reads a cycles.csv produced by this tool (for re-plotting).
std::vector<CycleRecord> load_cycles_csv(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace colloidsim
