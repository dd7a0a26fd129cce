#include "colloidsim/netlist.hpp"

#include <vector>

#include "colloidsim/errors.hpp"

namespace colloidsim {

void Netlist::validate() const {
    if (node_count < 1)
        throw topology_error("netlist '" + name + "': needs at least one non-ground node");
    if (elements.empty())
        throw topology_error("netlist '" + name + "': no elements");

    bool ground_seen = false;
    int memristors = 0;
    for (const auto& e : elements) {
        if (e.node_pos < 0 || e.node_pos > node_count || e.node_neg < 0 || e.node_neg > node_count)
            throw topology_error("netlist '" + name + "': element " + e.name +
                                 " references an undeclared node");
        if (e.node_pos == e.node_neg)
            throw topology_error("netlist '" + name + "': element " + e.name +
                                 " is shorted to itself");
        if (e.node_pos == 0 || e.node_neg == 0) ground_seen = true;
        if ((e.kind == ElementKind::resistor || e.kind == ElementKind::inductor) &&
            !(e.value > 0.0))
            throw topology_error("netlist '" + name + "': element " + e.name +
                                 " needs a positive value");
        if (e.kind == ElementKind::memristor) {
            if (e.device_index < 0 || e.device_index >= device_count)
                throw topology_error("netlist '" + name + "': element " + e.name +
                                     " has an unmapped device slot");
            ++memristors;
        }
    }
    if (!ground_seen)
        throw topology_error("netlist '" + name + "': no element touches ground (node 0)");
    if (memristors != device_count)
        throw topology_error("netlist '" + name + "': device slot count mismatch");

    // Every non-ground node must reach ground. All supported elements conduct
    // DC (inductors included), so this is plain graph connectivity.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(node_count) + 1);
    for (const auto& e : elements) {
        adj[static_cast<std::size_t>(e.node_pos)].push_back(e.node_neg);
        adj[static_cast<std::size_t>(e.node_neg)].push_back(e.node_pos);
    }
    std::vector<char> seen(static_cast<std::size_t>(node_count) + 1, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        for (int m : adj[static_cast<std::size_t>(n)]) {
            if (!seen[static_cast<std::size_t>(m)]) {
                seen[static_cast<std::size_t>(m)] = 1;
                stack.push_back(m);
            }
        }
    }
    for (int n = 1; n <= node_count; ++n)
        if (!seen[static_cast<std::size_t>(n)])
            throw topology_error("netlist '" + name + "': node " + std::to_string(n) +
                                 " has no path to ground");
}

bool drive_includes_a(DriveTarget t) {
    return t == DriveTarget::bell || t == DriveTarget::probe_a;
}

bool drive_includes_b(DriveTarget t) {
    return t == DriveTarget::bell || t == DriveTarget::food || t == DriveTarget::probe_b;
}

Netlist build_pavlov_netlist(double line_r, double line_l, const DeviceParams& dev_a,
                             const DeviceParams& dev_b, DriveTarget drive) {
    dev_a.validate();
    dev_b.validate();
    if (!(line_r > 0.0) || !(line_l > 0.0))
        throw validation_error("build_pavlov_netlist: line_r and line_l must be positive");

    Netlist nl;
    switch (drive) {
        case DriveTarget::bell:
            // Stimulating A drives B through the series line.
            nl.name = "bell";
            nl.node_count = 4;
            nl.device_count = 2;
            nl.elements = {
                {ElementKind::voltage_source, "Vsrc", 1, 0, 0.0, -1},
                {ElementKind::memristor, "A", 1, 2, 0.0, 0},
                {ElementKind::resistor, "Rline", 2, 3, line_r, -1},
                {ElementKind::inductor, "Lline", 3, 4, line_l, -1},
                {ElementKind::memristor, "B", 4, 0, 0.0, 1},
            };
            break;
        case DriveTarget::food:
            nl.name = "food";
            nl.node_count = 1;
            nl.device_count = 1;
            nl.elements = {
                {ElementKind::voltage_source, "Vsrc", 1, 0, 0.0, -1},
                {ElementKind::memristor, "B", 1, 0, 0.0, 0},
            };
            break;
        case DriveTarget::probe_a:
            nl.name = "probe_a";
            nl.node_count = 1;
            nl.device_count = 1;
            nl.elements = {
                {ElementKind::voltage_source, "Vsrc", 1, 0, 0.0, -1},
                {ElementKind::memristor, "A", 1, 0, 0.0, 0},
            };
            break;
        case DriveTarget::probe_b:
            nl.name = "probe_b";
            nl.node_count = 1;
            nl.device_count = 1;
            nl.elements = {
                {ElementKind::voltage_source, "Vsrc", 1, 0, 0.0, -1},
                {ElementKind::memristor, "B", 1, 0, 0.0, 0},
            };
            break;
    }
    nl.validate();
    return nl;
}

}  // namespace colloidsim
