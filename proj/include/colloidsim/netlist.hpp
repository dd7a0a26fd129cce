#pragma once

#include <string>
#include <vector>

#include "colloidsim/device.hpp"

namespace colloidsim {

enum class ElementKind { resistor, inductor, voltage_source, memristor };

/// Two-terminal element between node_pos and node_neg (node 0 is ground).
/// Branch current convention everywhere: positive flows node_pos -> node_neg
/// through the element.
struct Element {
    ElementKind kind;
    std::string name;
    int node_pos = 0;
    int node_neg = 0;
    double value = 0.0;     // ohm for resistors, henry for inductors
    int device_index = -1;  // memristors: slot in the device span handed to transient()
};

struct Netlist {
    std::string name;
    int node_count = 0;  // non-ground nodes are 1..node_count
    std::vector<Element> elements;
    int device_count = 0;

    /// Structural checks: node ids in range, ground referenced, positive R/L
    /// values, memristor slots dense, and every node connected to ground.
    void validate() const;
};

/// Which experiment drive the netlist realizes.
enum class DriveTarget { bell, food, probe_a, probe_b };

/// Builds the two-sample bench topology for the requested drive:
///   bell     source across the series chain source-A-R-L-B-ground
///   food     source directly across sample B alone
///   probe_a  small-signal source across sample A alone
///   probe_b  small-signal source across sample B alone
/// Memristor device_index values are 0,1,... in element order; the caller
/// passes matching device slots to transient().
Netlist build_pavlov_netlist(double line_r, double line_l, const DeviceParams& dev_a,
                             const DeviceParams& dev_b, DriveTarget drive);

/// Number of memristor slots a DriveTarget's netlist expects, in order.
/// bell -> {A,B}; food -> {B}; probe_a -> {A}; probe_b -> {B}.
bool drive_includes_a(DriveTarget t);
bool drive_includes_b(DriveTarget t);

}  // namespace colloidsim
