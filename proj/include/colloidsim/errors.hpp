#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace colloidsim {

// Rejected physical parameters or arguments. Maps to CLI exit code 2.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Netlist structure problems: bad node references, singular systems, cyclic
// cascade graphs.
class topology_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Transient solve failed at a specific step. Maps to CLI exit code 3.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
          step_index(step) {}

    std::size_t step_index;
};

// Config file rejected; carries the offending location (1-based).
class config_error : public std::runtime_error {
public:
    config_error(const std::string& what, int line_no, int col_no)
        : std::runtime_error("line " + std::to_string(line_no) + ", col " +
                             std::to_string(col_no) + ": " + what),
          line(line_no), col(col_no) {}

    int line;
    int col;
};

}  // namespace colloidsim
