#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spinprop/discrete.hpp"
#include "spinprop/semiclassical.hpp"
#include "spinprop/states.hpp"

namespace py = pybind11;
using namespace spinprop;

namespace {

OperatorSpec spec_from_terms(const std::vector<py::dict>& terms) {
    OperatorSpec spec;
    for (const auto& d : terms) {
        OperatorTerm t;
        for (auto item : d) {
            std::string key = py::cast<std::string>(item.first);
            if (key == "coeff")
                t.coeff = py::cast<cplx>(item.second);
            else if (key == "m")
                t.m = py::cast<int>(item.second);
            else if (key == "n")
                t.n = py::cast<int>(item.second);
            else if (key == "p")
                t.p = py::cast<int>(item.second);
            else if (key == "q")
                t.q = py::cast<int>(item.second);
            else if (key == "r")
                t.r = py::cast<int>(item.second);
            else
                throw std::invalid_argument("unknown operator term key '" + key + "'");
        }
        spec.push_back(t);
    }
    validate_spec(spec);
    return spec;
}

BoundaryData make_bd(cplx zp, cplx sp, cplx zpp, cplx spp, SpinSize size, double hbar, double T) {
    BoundaryData bd;
    bd.zp = zp;
    bd.sp = sp;
    bd.zpp_conj = std::conj(zpp);
    bd.spp_conj = std::conj(spp);
    bd.size = size;
    bd.hbar = hbar;
    bd.T = T;
    return bd;
}

py::dict result_dict(const PropagatorResult& r) {
    py::dict d;
    d["K"] = r.K;
    d["S"] = r.S;
    d["G"] = r.G;
    d["lambda"] = r.lambda;
    d["prefactor"] = r.prefactor;
    d["residual"] = r.diag.residual;
    d["energy_drift"] = r.diag.energy_drift;
    d["iterations"] = r.diag.iterations;
    d["branch"] = r.diag.branch;
    d["branch_jump"] = r.diag.branch_jump;
    d["abs_det_mbb"] = r.diag.abs_det_mbb;
    d["magnitude_flag"] = r.diag.magnitude_flag;
    return d;
}

}  // namespace

PYBIND11_MODULE(_spinprop, m) {
    m.doc() = "semiclassical coherent-state propagator for one boson mode coupled to one spin";

    py::register_exception<solver_error>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<truncation_error>(m, "TruncationError", PyExc_RuntimeError);

    m.def(
        "propagate",
        [](const std::vector<py::dict>& terms, double j, cplx zp, cplx sp, cplx zpp, cplx spp,
           double T, double hbar) {
            SymbolFunction sym = q_symbol(spec_from_terms(terms), SpinSize::from_j(j), hbar);
            Assembler as(sym);
            return result_dict(as.assemble(make_bd(zp, sp, zpp, spp, sym.size(), hbar, T)));
        },
        py::arg("hamiltonian"), py::arg("j"), py::arg("zp"), py::arg("sp"), py::arg("zpp"),
        py::arg("spp"), py::arg("T"), py::arg("hbar") = 1.0,
        "Semiclassical propagator between coherent states (physical final labels).");

    m.def(
        "scan",
        [](const std::vector<py::dict>& terms, double j, cplx zp, cplx sp, cplx zpp, cplx spp,
           const std::vector<double>& times, double hbar) {
            SymbolFunction sym = q_symbol(spec_from_terms(terms), SpinSize::from_j(j), hbar);
            Assembler as(sym);
            std::vector<PropagatorResult> rows =
                as.scan(make_bd(zp, sp, zpp, spp, sym.size(), hbar, 0.0), times);
            py::list out;
            for (const auto& r : rows) out.append(result_dict(r));
            return out;
        },
        py::arg("hamiltonian"), py::arg("j"), py::arg("zp"), py::arg("sp"), py::arg("zpp"),
        py::arg("spp"), py::arg("times"), py::arg("hbar") = 1.0,
        "Semiclassical propagator along a non-decreasing time grid with shared branch tracking.");

    m.def(
        "exact",
        [](const std::vector<py::dict>& terms, double j, cplx zp, cplx sp, cplx zpp, cplx spp,
           double T, double hbar, int n_max) {
            HilbertConfig hc;
            hc.size = SpinSize::from_j(j);
            hc.hbar = hbar;
            hc.n_max = n_max;
            return exact_propagator(spec_from_terms(terms), hc,
                                    make_bd(zp, sp, zpp, spp, hc.size, hbar, T));
        },
        py::arg("hamiltonian"), py::arg("j"), py::arg("zp"), py::arg("sp"), py::arg("zpp"),
        py::arg("spp"), py::arg("T"), py::arg("hbar") = 1.0, py::arg("n_max") = 40,
        "Exact propagator on the truncated number basis.");

    m.def(
        "determinant_oracle",
        [](const std::vector<py::dict>& terms, double j, cplx zp, cplx sp, cplx zpp, cplx spp,
           double T, const std::vector<int>& N_list, double hbar) {
            SymbolFunction sym = q_symbol(spec_from_terms(terms), SpinSize::from_j(j), hbar);
            TrajectorySolution sol = solve(sym, make_bd(zp, sp, zpp, spp, sym.size(), hbar, T));
            py::list out;
            for (int N : N_list) {
                DeterminantComparison cmp = determinant_compare(sym, sol, N);
                py::dict d;
                d["N"] = N;
                d["det_discrete"] = cmp.det_discrete;
                d["delta_closed"] = cmp.delta_closed;
                d["delta_ode"] = cmp.delta_ode;
                d["rel_dev"] = cmp.rel_dev;
                out.append(d);
            }
            return out;
        },
        py::arg("hamiltonian"), py::arg("j"), py::arg("zp"), py::arg("sp"), py::arg("zpp"),
        py::arg("spp"), py::arg("T"), py::arg("N_list"), py::arg("hbar") = 1.0,
        "Time-sliced fluctuation determinants against the continuum value.");

    m.def("overlap_canonical", &overlap_canonical, py::arg("z1"), py::arg("z2"));
    m.def(
        "overlap_spin",
        [](cplx s1, cplx s2, double j) { return overlap_spin(s1, s2, SpinSize::from_j(j)); },
        py::arg("s1"), py::arg("s2"), py::arg("j"));
}
