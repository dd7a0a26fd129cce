#include "colloidsim/csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "colloidsim/errors.hpp"

namespace colloidsim {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string metadata_comments(const RunMetadata& meta) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.config_hash));
    std::string out;
    out += "# tool_version=" + meta.tool_version + "\n";
    out += "# config_hash=" + std::string(hash) + "\n";
    return out;
}

std::string cycles_csv(const std::vector<CycleRecord>& records, const RunMetadata& meta) {
    std::string out = metadata_comments(meta);
    out += "cycle,r_a_after_bell_ohm,r_b_after_bell_ohm,r_a_after_food_ohm,r_b_after_food_ohm\n";
    for (const auto& r : records) {
        out += std::to_string(r.cycle_idx) + ',' + format_number(r.r_a_after_bell) + ',' +
               format_number(r.r_b_after_bell) + ',' + format_number(r.r_a_after_food) + ',' +
               format_number(r.r_b_after_food) + '\n';
    }
    return out;
}

std::string records_csv(const std::vector<CycleRecord>& records, const RunMetadata& meta) {
    std::string out = metadata_comments(meta);
    out += "cycle,phase,r_a_ohm,r_b_ohm\n";
    for (const auto& r : records) {
        out += std::to_string(r.cycle_idx) + ",bell," + format_number(r.r_a_after_bell) + ',' +
               format_number(r.r_b_after_bell) + '\n';
        out += std::to_string(r.cycle_idx) + ",food," + format_number(r.r_a_after_food) + ',' +
               format_number(r.r_b_after_food) + '\n';
    }
    return out;
}

std::string bell_test_csv(const BellTestResult& result, double threshold,
                          const RunMetadata& meta) {
    std::string out = metadata_comments(meta);
    out += "r_b_ohm,salivation_threshold_ohm,salivation\n";
    out += format_number(result.r_b) + ',' + format_number(threshold) + ',' +
           (result.salivation ? "true" : "false") + '\n';
    return out;
}

namespace {

int find_device(const Trace& tr, const std::string& name) {
    for (std::size_t i = 0; i < tr.device_names.size(); ++i)
        if (tr.device_names[i] == name) return static_cast<int>(i);
    return -1;
}

int find_branch(const Trace& tr, const std::string& name) {
    for (std::size_t i = 0; i < tr.branch_names.size(); ++i)
        if (tr.branch_names[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

std::string trace_csv(const Trace& trace, const Waveform& drive, DeviceSlot off_a,
                      DeviceSlot off_b, double dt, const RunMetadata& meta) {
    const int slot_a = find_device(trace, "A");
    const int slot_b = find_device(trace, "B");
    const int br_a = find_branch(trace, "i(A)");
    const int br_b = find_branch(trace, "i(B)");

    std::string out = metadata_comments(meta);
    out += "t_s,v_drive_v,i_a_a,i_b_a,r_a_ohm,r_b_ohm,w_a,w_b\n";
    for (std::size_t row = 0; row < trace.rows(); ++row) {
        const double t = trace.time[row];
        double i_a = 0.0, i_b = 0.0, r_a, r_b, w_a, w_b;
        if (slot_a >= 0) {
            i_a = trace.branch_i[static_cast<std::size_t>(br_a)][row];
            w_a = trace.device_w[static_cast<std::size_t>(slot_a)][row];
            r_a = trace.device_r[static_cast<std::size_t>(slot_a)][row];
        } else {
            if (row > 0) off_a.state = step_state(off_a.params, off_a.state, 0.0, dt);
            w_a = off_a.state.w;
            r_a = resistance(off_a.params, w_a);
        }
        if (slot_b >= 0) {
            i_b = trace.branch_i[static_cast<std::size_t>(br_b)][row];
            w_b = trace.device_w[static_cast<std::size_t>(slot_b)][row];
            r_b = trace.device_r[static_cast<std::size_t>(slot_b)][row];
        } else {
            if (row > 0) off_b.state = step_state(off_b.params, off_b.state, 0.0, dt);
            w_b = off_b.state.w;
            r_b = resistance(off_b.params, w_b);
        }
        out += format_number(t) + ',' + format_number(drive.at(t)) + ',' + format_number(i_a) +
               ',' + format_number(i_b) + ',' + format_number(r_a) + ',' + format_number(r_b) +
               ',' + format_number(w_a) + ',' + format_number(w_b) + '\n';
    }
    return out;
}

std::string firing_csv(const std::vector<FiringRecord>& records, const RunMetadata& meta) {
    std::string out = metadata_comments(meta);
    out += "round,cell,s1,s2,m_fires,w_cm\n";
    for (const auto& r : records) {
        out += std::to_string(r.round) + ',' + std::to_string(r.cell) + ',' +
               (r.s1 ? "true" : "false") + ',' + (r.s2 ? "true" : "false") + ',' +
               (r.m_fires ? "true" : "false") + ',' + format_number(r.w_cm) + '\n';
    }
    return out;
}

std::string device_defaults_text(const DeviceParams& p, const RunMetadata& meta) {
    std::string out;
    out += "# colloidsim device defaults\n";
    out += metadata_comments(meta);
    out += "#\n";
    out += "# r_on       [ohm] low-resistance limit (fully potentiated sample)\n";
    out += "# r_off      [ohm] high-resistance limit (relaxed sample)\n";
    out += "# v_th_pot   [V]   potentiation threshold, positive drive\n";
    out += "# v_th_dep   [V]   depression threshold, negative drive\n";
    out += "# k_pot      [1/s] potentiation rate at one threshold of overdrive\n";
    out += "# k_dep      [1/s] depression rate at one threshold of overdrive\n";
    out += "# alpha      [-]   overdrive exponent\n";
    out += "# tau_decay  [s]   volatile relaxation constant (forgetting)\n";
    out += "# w_init     [-]   initial state in [0,1]\n";
    out += "[device]\n";
    out += "r_on = " + format_number(p.r_on) + "\n";
    out += "r_off = " + format_number(p.r_off) + "\n";
    out += "v_th_pot = " + format_number(p.v_th_pot) + "\n";
    out += "v_th_dep = " + format_number(p.v_th_dep) + "\n";
    out += "k_pot = " + format_number(p.k_pot) + "\n";
    out += "k_dep = " + format_number(p.k_dep) + "\n";
    out += "alpha = " + format_number(p.alpha) + "\n";
    out += "tau_decay = " + format_number(p.tau_decay) + "\n";
    out += "w_init = " + format_number(p.w_init) + "\n";
    return out;
}

std::string fit_result_text(const FitResult& fr, const RunMetadata& meta) {
    std::string out;
    out += "# colloidsim fit result\n";
    out += metadata_comments(meta);
    out += "[fit]\n";
    out += "loss = " + format_number(fr.loss) + "\n";
    out += "evals_used = " + std::to_string(fr.evals_used) + "\n";
    out += std::string("converged = ") + (fr.converged ? "true" : "false") + "\n";
    out += "\n";
    out += "[device]\n";
    out += "r_on = " + format_number(fr.params.r_on) + "\n";
    out += "r_off = " + format_number(fr.params.r_off) + "\n";
    out += "v_th_pot = " + format_number(fr.params.v_th_pot) + "\n";
    out += "v_th_dep = " + format_number(fr.params.v_th_dep) + "\n";
    out += "k_pot = " + format_number(fr.params.k_pot) + "\n";
    out += "k_dep = " + format_number(fr.params.k_dep) + "\n";
    out += "alpha = " + format_number(fr.params.alpha) + "\n";
    out += "tau_decay = " + format_number(fr.params.tau_decay) + "\n";
    out += "w_init = " + format_number(fr.params.w_init) + "\n";
    return out;
}

ReferenceTrace load_reference_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open reference file '" + path.string() + "'");

    ReferenceTrace ref;
    bool have_baseline = false, have_final = false, have_header = false;
    std::vector<std::pair<double, double>> rows;  // (bell, food) in MOhm
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.back() == '\r') {
            if (!line.empty()) line.pop_back();
            if (line.empty()) continue;
        }
        if (line[0] == '#') {
            // Metadata comments: "# key = value".
            std::string body = line.substr(1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) continue;
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
            };
            const std::string key = trim(body.substr(0, eq));
            const std::string value = trim(body.substr(eq + 1));
            if (key == "baseline_mohm") {
                ref.baseline_r_b = std::atof(value.c_str()) * 1e6;
                have_baseline = true;
            } else if (key == "final_mohm") {
                ref.final_r_b = std::atof(value.c_str()) * 1e6;
                have_final = true;
            }
            continue;
        }
        if (!have_header) {
            if (line != "cycle,after_bell_mohm,after_food_mohm")
                throw validation_error("reference file line " + std::to_string(line_no) +
                                       ": unexpected header '" + line + "'");
            have_header = true;
            continue;
        }
        int cycle = 0;
        double bell = 0.0, food = 0.0;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf", &cycle, &bell, &food) != 3)
            throw validation_error("reference file line " + std::to_string(line_no) +
                                   ": expected 'cycle,bell,food'");
        if (cycle != static_cast<int>(rows.size()) + 1)
            throw validation_error("reference file line " + std::to_string(line_no) +
                                   ": cycles must run 1..15 in order");
        rows.emplace_back(bell, food);
    }
    if (!have_baseline || !have_final)
        throw validation_error("reference file: missing baseline_mohm/final_mohm metadata");
    if (rows.size() != ref.after_bell.size())
        throw validation_error("reference file: expected exactly " +
                               std::to_string(ref.after_bell.size()) + " cycles");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ref.after_bell[i] = rows[i].first * 1e6;
        ref.after_food[i] = rows[i].second * 1e6;
    }
    ref.validate();
    return ref;
}

std::vector<CycleRecord> load_cycles_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open cycles file '" + path.string() + "'");
    std::vector<CycleRecord> records;
    std::string line;
    bool have_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            if (line !=
                "cycle,r_a_after_bell_ohm,r_b_after_bell_ohm,r_a_after_food_ohm,r_b_after_food_ohm")
                throw validation_error("cycles file line " + std::to_string(line_no) +
                                       ": unexpected header");
            have_header = true;
            continue;
        }
        CycleRecord r;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf", &r.cycle_idx, &r.r_a_after_bell,
                        &r.r_b_after_bell, &r.r_a_after_food, &r.r_b_after_food) != 5)
            throw validation_error("cycles file line " + std::to_string(line_no) +
                                   ": expected five columns");
        records.push_back(r);
    }
    if (records.empty()) throw validation_error("cycles file: no data rows");
    return records;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace colloidsim
