// Copyright 2026 The wallsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings: wallsep._core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wallsep/dynamics.hpp"
#include "wallsep/exclusion.hpp"
#include "wallsep/harness.hpp"
#include "wallsep/ising.hpp"
#include "wallsep/lattice.hpp"
#include "wallsep/observables.hpp"
#include "wallsep/oracle.hpp"
#include "wallsep/rng.hpp"

namespace py = pybind11;
namespace ws = wallsep;

namespace {

ws::ScheduleKind parse_schedule(const std::string& s) {
    if (s == "discrete") return ws::ScheduleKind::DiscreteUniformSite;
    if (s == "continuous") return ws::ScheduleKind::ContinuousTime;
    throw std::invalid_argument("schedule must be 'discrete' or 'continuous'");
}

std::vector<int> heights_of(const ws::HeightField& h) { return {h.heights().begin(), h.heights().end()}; }

py::dict audit_dict(const ws::RateAuditReport& r) {
    py::dict d;
    d["states"] = r.states;
    d["ising_moves"] = r.ising_moves;
    d["wall_moves"] = r.wall_moves;
    d["mismatches"] = r.mismatches;
    d["rate_form_mismatches"] = r.rate_form_mismatches;
    d["monotonicity_failures"] = r.monotonicity_failures;
    d["clean"] = r.clean();
    return d;
}

ws::FitResult fit(const std::vector<std::pair<double, double>>& samples, bool power) {
    return power ? ws::exponent_fit(samples) : ws::log_fit(samples);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wall and free corner-flip interfaces, exclusion flux and exact oracles";
    m.attr("__version__") = ws::code_version();

    auto base = py::register_exception<ws::InvariantError>(m, "InvariantError", PyExc_ValueError);
    py::register_exception<ws::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ws::GuardError>(m, "GuardError", PyExc_RuntimeError);
    py::register_exception<ws::TruncationError>(m, "TruncationError", PyExc_RuntimeError);
    (void)base;

    py::class_<ws::HeightField>(m, "HeightField")
        .def(py::init<std::vector<int>, int, bool>(), py::arg("heights"), py::arg("offset") = 0, py::arg("walled") = false)
        .def_static("flat", &ws::HeightField::flat, py::arg("length"), py::arg("offset") = 0, py::arg("walled") = false)
        .def_property_readonly("heights", &heights_of)
        .def_property_readonly("offset", &ws::HeightField::offset)
        .def_property_readonly("walled", &ws::HeightField::walled)
        .def("__len__", &ws::HeightField::size)
        .def("__getitem__",
             [](const ws::HeightField& h, int x) {
                 if (x < 0 || x >= h.size()) throw py::index_error("site outside ring");
                 return h[x];
             })
        .def("laplacian", [](const ws::HeightField& h, int x) { return ws::laplacian(h, x); })
        .def("max_abs", &ws::HeightField::max_abs)
        .def("__eq__", [](const ws::HeightField& a, const ws::HeightField& b) { return a == b; })
        .def("__repr__", [](const ws::HeightField& h) {
            return "HeightField(L=" + std::to_string(h.size()) + ", walled=" + (h.walled() ? "True" : "False") + ")";
        });

    m.def("new_flat", &ws::new_flat, py::arg("length"), py::arg("offset") = 0, py::arg("walled") = false);
    m.def("height_to_occupation", [](const ws::HeightField& h) {
        const auto occ = ws::height_to_occupation(h);
        return std::vector<int>(occ.bits().begin(), occ.bits().end());
    });
    m.def(
        "occupation_to_height",
        [](const std::vector<int>& bits, int anchor, bool walled) {
            std::vector<std::uint8_t> b;
            for (int v : bits) {
                if (v != 0 && v != 1) throw ws::InvariantError("occupation values must be 0 or 1");
                b.push_back(static_cast<std::uint8_t>(v));
            }
            return ws::occupation_to_height(ws::OccupationField(std::move(b)), anchor, walled);
        },
        py::arg("bits"), py::arg("anchor") = 0, py::arg("walled") = false);

    m.def(
        "evolve",
        [](const ws::HeightField& h, double t, const std::string& schedule, std::uint64_t seed) {
            py::gil_scoped_release release;
            return ws::evolve(h, t, parse_schedule(schedule), ws::rule_of(h), seed).field;
        },
        py::arg("field"), py::arg("t"), py::arg("schedule") = "discrete", py::arg("seed") = 0,
        "Evolves a field for time t under its own rule (wall if walled).");
    m.def(
        "monotone_coupled_evolve",
        [](const ws::HeightField& xi, const ws::HeightField& zeta, double t, std::uint64_t seed) {
            const auto r = ws::monotone_coupled_evolve(xi, zeta, t, seed);
            return py::make_tuple(r.upper, r.lower);
        },
        py::arg("xi"), py::arg("zeta"), py::arg("t"), py::arg("seed") = 0);

    m.def("site_mean_square", &ws::site_mean_square);
    m.def("zero_fraction", &ws::zero_fraction);
    m.def("scaled_distribution", [](const ws::HeightField& h, double t) {
        const auto s = ws::scaled_distribution(h, t);
        py::dict d;
        std::vector<double> svals;
        for (std::size_t k = 0; k < s.mass.size(); ++k) svals.push_back(s.s_of(static_cast<int>(k)));
        d["s"] = svals;
        d["mass"] = s.mass;
        d["bin_width"] = s.bin_width();
        return d;
    });

    py::class_<ws::EnsembleAccumulator>(m, "EnsembleAccumulator")
        .def(py::init<>())
        .def("add", &ws::EnsembleAccumulator::add)
        .def("merge", &ws::EnsembleAccumulator::merge)
        .def_property_readonly("count", &ws::EnsembleAccumulator::count)
        .def_property_readonly("mean", &ws::EnsembleAccumulator::mean)
        .def_property_readonly("variance", &ws::EnsembleAccumulator::variance)
        .def("mean_ci", [](const ws::EnsembleAccumulator& a, double level) {
            const auto e = a.mean_ci(level);
            return py::make_tuple(e.lo, e.hi);
        }, py::arg("level") = 0.95);

    py::class_<ws::FitResult>(m, "FitResult")
        .def_readonly("a", &ws::FitResult::a)
        .def_readonly("b", &ws::FitResult::b)
        .def_readonly("rss", &ws::FitResult::rss)
        .def("predict", &ws::FitResult::predict);
    m.def("log_fit", [](const std::vector<std::pair<double, double>>& s) { return fit(s, false); });
    m.def("exponent_fit", [](const std::vector<std::pair<double, double>>& s) { return fit(s, true); });

    m.def("walk_pmf", [](double t, int M) { return M < 0 ? ws::walk_pmf(t).p : ws::walk_pmf(t, M).p; }, py::arg("t"),
          py::arg("M") = -1, "Probabilities for k = -M..M (M defaults to the walk radius).");
    m.def("walk_radius", &ws::walk_radius);
    m.def("v_term_exact", &ws::v_term_exact);
    m.def("flux_variance_exact", [](double t) { return ws::flux_variance_exact(t).variance; });
    m.def("flux_mean_exact", &ws::flux_mean_exact);
    m.def("product_flux_variance_exact", &ws::product_flux_variance_exact);
    m.def(
        "exact_ring_transient",
        [](int L, double t, int J_max) {
            const auto r = ws::exact_ring_transient(L, t, J_max);
            py::dict d;
            d["site_marginal"] = r.site_marginal;
            d["flux_pmf"] = r.flux_pmf;
            d["mean_J"] = r.mean_J;
            d["var_J"] = r.var_J;
            return d;
        },
        py::arg("L"), py::arg("t"), py::arg("J_max") = 10);

    m.def("height_flux_identity", [](int L, double t, std::uint64_t seed) {
        const auto r = ws::height_flux_identity_run(L, t, seed);
        return py::make_tuple(r.height_increment, r.flux);
    });
    m.def(
        "flux",
        [](int L, double t, std::uint64_t seed) {
            ws::ExclusionProcess p(ws::flat_occupation(L), seed, false);
            p.advance_to(t);
            return p.flux();
        },
        py::arg("L"), py::arg("t"), py::arg("seed") = 0, "J_t for the flat start on a ring of length L.");

    m.def("derive_seed", &ws::derive_seed);

    m.def("glauber_rate", [](const std::vector<int>& b, int W, int u, int v) {
        return ws::glauber_rate(ws::SpinWindow::from_interface(b, W), u, v);
    });
    m.def("exhaustive_pattern_audit", [](int h, int W) { return audit_dict(ws::exhaustive_pattern_audit(h, W)); },
          py::arg("max_height") = 4, py::arg("W") = 6);
    m.def("simulation_audit",
          [](std::size_t n, int W, std::uint64_t seed) { return audit_dict(ws::simulation_audit(n, W, seed)); },
          py::arg("samples") = 100, py::arg("W") = 12, py::arg("seed") = 0);

    m.def(
        "run",
        [](const std::map<std::string, std::string>& settings, bool write_files) {
            ws::ExperimentConfig c;
            for (const auto& [k, v] : settings) c.set(k, v);
            ws::RunResult r;
            {
                py::gil_scoped_release release;
                r = ws::run(c, write_files);
            }
            py::dict table;
            for (const auto& [name, rows] : r.table) {
                py::list out;
                for (const auto& row : rows) out.append(py::make_tuple(row.t, row.estimate, row.ci_low, row.ci_high, row.n));
                table[py::str(name)] = out;
            }
            return table;
        },
        py::arg("settings"), py::arg("write_files") = false,
        "Runs an experiment from key=value settings; returns {observable: [(t, estimate, lo, hi, n)]}.");
}
