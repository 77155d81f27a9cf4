#pragma once

#include <string>
#include <vector>

#include "spinprop/shooting.hpp"

namespace spinprop {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validated run description loaded from a JSON file.  Unknown keys are
/// rejected at every nesting level.  Users supply the physical final labels
/// z'', s''; the conjugation into the boundary data happens here.
struct RunConfig {
    OperatorSpec hamiltonian;
    SpinSize size;
    double hbar = 1.0;

    cplx zp, sp, zpp, spp;

    bool has_scan = false;
    double T = 0.0;
    double t_min = 0.0, t_max = 0.0;
    int steps = 0;

    double tol_ode = 1e-10;
    double tol_newton = 1e-10;
    double tol_tail = 1e-12;

    int n_max = 40;
    std::vector<int> N_list;

    std::string out_path;
    enum class Format { csv, json };
    Format format = Format::csv;

    BoundaryData boundary(double time) const;
    std::vector<double> scan_times() const;

    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_file(const std::string& path);
};

}  // namespace spinprop
