#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "spinprop/config.hpp"
#include "spinprop/discrete.hpp"
#include "spinprop/reference.hpp"
#include "spinprop/semiclassical.hpp"

namespace {

using namespace spinprop;

constexpr int kExitSolver = 2;
constexpr int kExitConfig = 64;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt(int x) { return std::to_string(x); }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// column order is frozen; see README
Table result_table() {
    Table t;
    t.header = {"T",        "re_K",     "im_K",        "re_S",   "im_S",
                "re_G",     "im_G",     "lambda",      "abs_det_mbb", "residual",
                "iterations", "branch", "branch_jump", "magnitude_flag"};
    return t;
}

void push_result(Table& t, double T, const PropagatorResult& r) {
    t.rows.push_back({fmt(T), fmt(r.K.real()), fmt(r.K.imag()), fmt(r.S.real()), fmt(r.S.imag()),
                      fmt(r.G.real()), fmt(r.G.imag()), fmt(r.lambda), fmt(r.diag.abs_det_mbb),
                      fmt(r.diag.residual), fmt(r.diag.iterations), fmt(r.diag.branch),
                      fmt(r.diag.branch_jump ? 1 : 0), fmt(r.diag.magnitude_flag ? 1 : 0)});
}

void write_table(const Table& t, const RunConfig& cfg, const std::string& out_override) {
    std::string path = out_override.empty() ? cfg.out_path : out_override;
    std::ostringstream os;
    if (cfg.format == RunConfig::Format::csv) {
        for (size_t c = 0; c < t.header.size(); ++c)
            os << (c ? "," : "") << t.header[c];
        os << "\n";
        for (const auto& row : t.rows) {
            for (size_t c = 0; c < row.size(); ++c)
                os << (c ? "," : "") << row[c];
            os << "\n";
        }
    } else {
        // every cell is already a valid JSON number; emit objects verbatim
        os << "[";
        for (size_t r = 0; r < t.rows.size(); ++r) {
            os << (r ? ",\n " : "\n ") << "{";
            for (size_t c = 0; c < t.header.size(); ++c)
                os << (c ? "," : "") << "\"" << t.header[c] << "\":" << t.rows[r][c];
            os << "}";
        }
        os << "\n]\n";
    }
    if (path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write output file '" + path + "'");
        f << os.str();
    }
}

AssembleOptions assemble_options(const RunConfig& cfg) {
    AssembleOptions opt;
    opt.solve.tol = cfg.tol_newton;
    opt.solve.ode.rtol = cfg.tol_ode;
    opt.solve.ode.atol = cfg.tol_ode * 1e-2;
    return opt;
}

int cmd_propagate(const RunConfig& cfg, const std::string& out) {
    if (cfg.has_scan) {
        std::cerr << "propagate: config must carry a scalar time\n";
        return kExitConfig;
    }
    Assembler as(q_symbol(cfg.hamiltonian, cfg.size, cfg.hbar), assemble_options(cfg));
    PropagatorResult r = as.assemble(cfg.boundary(cfg.T));
    Table t = result_table();
    push_result(t, cfg.T, r);
    write_table(t, cfg, out);
    return 0;
}

int cmd_scan(const RunConfig& cfg, const std::string& out) {
    if (!cfg.has_scan) {
        std::cerr << "scan: config must carry a time grid\n";
        return kExitConfig;
    }
    std::vector<double> times = cfg.scan_times();
    Assembler as(q_symbol(cfg.hamiltonian, cfg.size, cfg.hbar), assemble_options(cfg));
    std::vector<PropagatorResult> results = as.scan(cfg.boundary(0.0), times);
    Table t = result_table();
    for (size_t k = 0; k < times.size(); ++k) push_result(t, times[k], results[k]);
    write_table(t, cfg, out);
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& out, int workers) {
    std::vector<double> times = cfg.has_scan ? cfg.scan_times() : std::vector<double>{cfg.T};
    Assembler as(q_symbol(cfg.hamiltonian, cfg.size, cfg.hbar), assemble_options(cfg));
    std::vector<PropagatorResult> sc = as.scan(cfg.boundary(0.0), times);

    HilbertConfig hc;
    hc.n_max = cfg.n_max;
    hc.size = cfg.size;
    hc.hbar = cfg.hbar;
    hc.tail_threshold = cfg.tol_tail;

    // exact rows are independent; dispatch them over a worker pool, keep the
    // output in scan order
    std::vector<cplx> exact(times.size());
    std::exception_ptr failure;
    std::mutex mtx;
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            size_t k = next.fetch_add(1);
            if (k >= times.size()) return;
            try {
                exact[k] = exact_propagator(cfg.hamiltonian, hc, cfg.boundary(times[k]));
            } catch (...) {
                std::lock_guard<std::mutex> lock(mtx);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(times.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    Table t;
    t.header = {"T", "re_K_sc", "im_K_sc", "re_K_exact", "im_K_exact", "abs_err", "rel_err"};
    for (size_t k = 0; k < times.size(); ++k) {
        double abs_err = std::abs(sc[k].K - exact[k]);
        double rel_err = abs_err / std::max(std::abs(exact[k]), 1e-300);
        t.rows.push_back({fmt(times[k]), fmt(sc[k].K.real()), fmt(sc[k].K.imag()),
                          fmt(exact[k].real()), fmt(exact[k].imag()), fmt(abs_err), fmt(rel_err)});
    }
    write_table(t, cfg, out);
    return 0;
}

int cmd_oracle(const RunConfig& cfg, const std::string& out) {
    if (cfg.has_scan) {
        std::cerr << "oracle: config must carry a scalar time\n";
        return kExitConfig;
    }
    if (cfg.N_list.empty()) {
        std::cerr << "oracle: config must carry oracle.N_list\n";
        return kExitConfig;
    }
    SymbolFunction sym = q_symbol(cfg.hamiltonian, cfg.size, cfg.hbar);
    AssembleOptions opt = assemble_options(cfg);
    TrajectorySolution sol = solve(sym, cfg.boundary(cfg.T), std::nullopt, opt.solve);
    Table t;
    t.header = {"N",        "re_det_discrete", "im_det_discrete",
                "re_delta_closed", "im_delta_closed", "rel_dev"};
    for (int N : cfg.N_list) {
        DeterminantComparison cmp = determinant_compare(sym, sol, N);
        t.rows.push_back({fmt(N), fmt(cmp.det_discrete.real()), fmt(cmp.det_discrete.imag()),
                          fmt(cmp.delta_closed.real()), fmt(cmp.delta_closed.imag()),
                          fmt(cmp.rel_dev)});
    }
    write_table(t, cfg, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherent-state propagator toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    double tol_ode = -1.0, tol_newton = -1.0;
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_path, "output path (overrides config)");
    app.add_option("--workers", workers, "worker pool size for independent rows");
    app.add_option("--tol-ode", tol_ode, "integrator tolerance override");
    app.add_option("--tol-newton", tol_newton, "shooting tolerance override");

    auto* propagate = app.add_subcommand("propagate", "single propagator evaluation");
    auto* scan = app.add_subcommand("scan", "propagator along a time grid");
    auto* verify = app.add_subcommand("verify", "semiclassical vs exact comparison");
    auto* oracle = app.add_subcommand("oracle", "time-sliced determinant comparison");
    for (auto* sub : {propagate, scan, verify, oracle}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    spinprop::RunConfig cfg;
    try {
        cfg = spinprop::RunConfig::from_file(config_path);
    } catch (const spinprop::config_error& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    if (tol_ode > 0.0) cfg.tol_ode = tol_ode;
    if (tol_newton > 0.0) cfg.tol_newton = tol_newton;
    if (workers < 1) {
        std::cerr << "--workers must be >= 1\n";
        return kExitConfig;
    }

    try {
        if (propagate->parsed()) return cmd_propagate(cfg, out_path);
        if (scan->parsed()) return cmd_scan(cfg, out_path);
        if (verify->parsed()) return cmd_verify(cfg, out_path, workers);
        if (oracle->parsed()) return cmd_oracle(cfg, out_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitSolver;
    }
    return kExitConfig;
}
