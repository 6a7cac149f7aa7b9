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

// Command-line front end: run, oracle, audit-ising, selftest.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "wallsep/dynamics.hpp"
#include "wallsep/exclusion.hpp"
#include "wallsep/harness.hpp"
#include "wallsep/ising.hpp"
#include "wallsep/observables.hpp"
#include "wallsep/oracle.hpp"

namespace ws = wallsep;

namespace {

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::vector<std::pair<std::string, std::string>>& flags, bool quiet) {
    ws::ExperimentConfig c = config_path.empty() ? ws::ExperimentConfig{} : ws::load_config(config_path);
    for (const auto& [k, v] : flags) c.set(k, v);
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ws::ConfigError("--set expects key=value, got '" + s + "'");
        c.set(s.substr(0, eq), s.substr(eq + 1));
    }
    const ws::RunResult r = ws::run(c);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    if (!quiet) {
        for (const auto& [name, rows] : r.table) {
            std::cout << name << "\n";
            for (const auto& row : rows) {
                std::printf("  t=%-10s %-14s [%s, %s]  n=%llu\n", ws::format_number(row.t).c_str(),
                            ws::format_number(row.estimate).c_str(), ws::format_number(row.ci_low).c_str(),
                            ws::format_number(row.ci_high).c_str(), static_cast<unsigned long long>(row.n));
            }
        }
        std::printf("wrote %zu files to %s (%.2fs)\n", r.files.size() + 1, c.out.c_str(), r.wall_clock_seconds);
    }
    return 0;
}

void write_csv(const std::filesystem::path& p, const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << header << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << ws::format_number(r[i]);
        f << "\n";
    }
    std::cout << "wrote " << p.string() << "\n";
}

int cmd_oracle(const std::string& out, const std::vector<double>& flux_times) {
    namespace fs = std::filesystem;
    const fs::path dir(out);
    fs::create_directories(dir);
    {
        std::vector<std::vector<double>> rows;
        for (double t : {0.0, 1.0, 10.0, 50.0}) {
            const ws::WalkPmf w = ws::walk_pmf(t);
            for (int k = -w.M; k <= w.M; ++k) {
                if (w(k) > 1e-300) rows.push_back({t, static_cast<double>(k), w(k)});
            }
        }
        write_csv(dir / "walk_pmf.csv", "t,k,p", rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (double t : {0.0, 1.0, 10.0, 100.0, 400.0, 1600.0}) {
            const double v = ws::v_term_exact(t);
            rows.push_back({t, v, t > 0 ? v / std::sqrt(t) : 0.0});
        }
        write_csv(dir / "v_term.csv", "t,v_term,v_term_over_sqrt_t", rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (double t : flux_times) {
            const ws::FluxVarianceResult f = ws::flux_variance_exact(t);
            rows.push_back({t, ws::flux_mean_exact(t), f.variance, f.v_term, f.e_term, t > 0 ? f.variance / std::sqrt(t) : 0.0});
        }
        write_csv(dir / "flux_moments.csv", "t,mean,variance,v_term,e_term,variance_over_sqrt_t", rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (double t : {1.0, 10.0, 50.0}) {
            const int M = static_cast<int>(std::ceil(t + 12.0 * std::sqrt(t) + 20.0));
            const ws::PairSemigroup ps = ws::pair_distribution(0, 1, t, M, ws::PairGenerator::V);
            rows.push_back({t, ps.parity_class(0), ps.parity_class(1)});
        }
        write_csv(dir / "pair_parity.csv", "t,even,odd", rows);
    }
    {
        const ws::ExactRing r = ws::exact_ring_transient(6, 1.0, 8);
        std::vector<std::vector<double>> rows;
        for (int x = 0; x < r.L; ++x) rows.push_back({static_cast<double>(x), r.site_marginal[static_cast<std::size_t>(x)]});
        write_csv(dir / "ring_L6_t1_marginals.csv", "x,p_occupied", rows);
        write_csv(dir / "ring_L6_t1_flux.csv", "mean,variance,leaked", {{r.mean_J, r.var_J, r.leaked}});
    }
    return 0;
}

void report(const ws::RateAuditReport& r, const char* name) {
    std::printf("%-10s states=%zu spin_moves=%zu wall_moves=%zu mismatches=%zu rate_form=%zu monotonicity=%zu\n", name, r.states,
                r.ising_moves, r.wall_moves, r.mismatches, r.rate_form_mismatches, r.monotonicity_failures);
    for (const auto& d : r.details) std::printf("    %s\n", d.c_str());
}

int cmd_audit(std::size_t samples, int W, std::uint64_t seed, bool dump) {
    if (dump) std::cout << ws::to_string(ws::SpinWindow::initial(W));
    const auto a = ws::exhaustive_pattern_audit(4, 6);
    const auto b = ws::exhaustive_window_audit(5, 4);
    const auto c = ws::simulation_audit(samples, W, seed);
    report(a, "patterns");
    report(b, "windows");
    report(c, "simulated");
    return (a.clean() && b.clean() && c.clean()) ? 0 : 1;
}

struct Tally {
    int failed = 0;
    void check(bool ok, const std::string& what) {
        std::printf("%s  %s\n", ok ? "PASS" : "FAIL", what.c_str());
        if (!ok) ++failed;
    }
};

int cmd_selftest(int seeds) {
    Tally t;
    {
        bool ok = true;
        for (int s = 0; s < seeds && ok; ++s) {
            const auto seed = ws::derive_seed(99, static_cast<std::uint64_t>(s));
            const ws::HeightFluxRun r = ws::height_flux_identity_run(64, 32.0, seed);
            ok = r.identity_holds() && r.flux == r.stirring_flux && r.gradient_image_matches;
        }
        t.check(ok, "height increment = -2 J and stirring flux = counter flux (" + std::to_string(seeds) + " seeds)");
    }
    {
        bool ok = true;
        for (int s = 0; s < seeds && ok; ++s) {
            ws::ExclusionProcess p(ws::flat_occupation(64), ws::derive_seed(7, static_cast<std::uint64_t>(s)));
            p.advance_to(32.0);
            const auto d = ws::flux_decomposition(p.state().stirring, p.initial());
            ok = ws::duality_check(p.initial(), p.state().eta, p.state().stirring) && d.J() == p.flux() &&
                 std::llabs(d.H_prime - d.I) <= 1 && p.state().eta.particle_count() == 32;
        }
        t.check(ok, "duality, J = H - I, |H' - I| <= 1, particle conservation");
    }
    {
        bool ok = true;
        for (int s = 0; s < seeds && ok; ++s) {
            ws::MonotoneCoupling c(ws::HeightField::flat(64, 0, true), ws::HeightField::flat(64, 0, false),
                                   ws::ScheduleKind::ContinuousTime, ws::derive_seed(5, static_cast<std::uint64_t>(s)));
            bool ordered = true;
            c.advance_to(32.0, [&](int, ws::MarkDirection, int, int, const ws::HeightField& u, const ws::HeightField& l) {
                ordered = ordered && l[0] <= u[0];
            });
            ok = ordered && c.ordered() && c.upper().satisfies_invariants() && c.lower().satisfies_invariants();
        }
        t.check(ok, "monotone coupling keeps free <= wall, wall >= 0, gradient and parity invariants");
    }
    {
        bool ok = true;
        for (int k : {0, 1, 2, 5, 20}) {
            for (double x : {0.5, 1.0, 7.0, 30.0, 45.0, 200.0}) {
                const double ref = boost::math::cyl_bessel_i(k, x) * std::exp(-x);
                ok = ok && std::abs(ws::walk_pmf(x)(k) - ref) <= 1e-13 + 1e-10 * ref;
            }
        }
        t.check(ok, "walk pmf matches e^{-t} I_k(t) from Boost.Math");
    }
    t.check(std::abs(ws::v_term_exact(30.0) - ws::v_term_via_minimum(30.0)) < 1e-10, "V_t by tails equals E X^+ - E (Y min Z)^+");
    {
        const double a = ws::flux_variance_exact(1.0).variance;
        const double b = ws::flux_variance_direct(1.0);
        const ws::ExactRing r = ws::exact_ring_transient(12, 1.0, 8);
        t.check(std::abs(a - b) < 1e-8 && std::abs(a - r.var_J) < 1e-6,
                "flux variance: quadrature, pair covariances and L=12 ring agree at t=1");
    }
    {
        const auto a = ws::exhaustive_pattern_audit(4, 6);
        const auto b = ws::simulation_audit(200, 12, 3);
        t.check(a.clean() && b.clean(), "spin dynamics and wall process have the same moves and rates");
    }
    std::printf("%d failure(s)\n", t.failed);
    return t.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wallsep: interface near a wall, free interface and exclusion flux"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ws::code_version()));

    auto* run = app.add_subcommand("run", "Run an experiment and write CSVs plus manifest.json");
    std::string config_path;
    std::vector<std::string> sets;
    bool quiet = false;
    run->add_option("-c,--config", config_path, "key=value configuration file");
    run->add_option("--set", sets, "Override a configuration key (key=value), repeatable");
    run->add_flag("-q,--quiet", quiet, "Do not print the summary table");
    std::vector<std::pair<std::string, std::string>> flag_values;
    const std::vector<std::string> keys = {"process", "L", "t", "replicas", "seed", "init", "r", "rho", "observables", "out", "schedule", "window", "trajectory"};
    std::map<std::string, std::string> flag_store;
    for (const auto& k : keys) run->add_option("--" + k, flag_store[k], "Configuration key " + k);

    auto* oracle = app.add_subcommand("oracle", "Write exact reference values as CSV fixtures");
    std::string oracle_out = "oracle";
    std::vector<double> flux_times{1.0, 5.0, 20.0};
    oracle->add_option("-o,--out", oracle_out, "Output directory");
    oracle->add_option("--flux-t", flux_times, "Times for the exact flux moments");

    auto* audit = app.add_subcommand("audit-ising", "Compare spin-flip moves with wall-process moves");
    std::size_t samples = 1000;
    int W = 16;
    std::uint64_t seed = 1;
    bool dump = false;
    audit->add_option("--samples", samples, "Simulated states to audit");
    audit->add_option("--window", W, "Window half-width for simulated states");
    audit->add_option("--seed", seed, "Master seed");
    audit->add_flag("--dump", dump, "Print the initial window");

    auto* self = app.add_subcommand("selftest", "Invariant and oracle self-checks");
    int seeds = 200;
    self->add_option("--seeds", seeds, "Random trajectories per invariant");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) {
            for (const auto& k : keys) {
                if (run->count("--" + k) > 0) flag_values.emplace_back(k, flag_store[k]);
            }
            return cmd_run(config_path, sets, flag_values, quiet);
        }
        if (*oracle) return cmd_oracle(oracle_out, flux_times);
        if (*audit) return cmd_audit(samples, W, seed, dump);
        if (*self) return cmd_selftest(seeds);
    } catch (const ws::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const ws::GuardError& e) {
        std::cerr << "run aborted: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
