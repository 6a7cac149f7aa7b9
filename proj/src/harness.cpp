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

#include "wallsep/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wallsep/dynamics.hpp"
#include "wallsep/exclusion.hpp"
#include "wallsep/ising.hpp"
#include "wallsep/observables.hpp"

#ifndef WALLSEP_VERSION
#define WALLSEP_VERSION "0.0.0"
#endif

namespace wallsep {

const char* code_version() noexcept { return WALLSEP_VERSION; }

namespace {

const std::vector<std::pair<ProcessKind, std::string>> kProcessNames = {
    {ProcessKind::Wall, "wall"},
    {ProcessKind::Free, "free"},
    {ProcessKind::Exclusion, "exclusion"},
    {ProcessKind::CoupledMonotone, "coupled-monotone"},
    {ProcessKind::CoupledShared, "coupled-shared"},
    {ProcessKind::Ising, "ising"},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("invalid integer for " + key + ": '" + v + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw ConfigError("invalid number for " + key + ": '" + v + "'");
        return x;
    } catch (const std::logic_error&) {
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("invalid boolean for " + key + ": '" + v + "'");
}

}  // namespace

std::string to_string(ProcessKind p) {
    for (const auto& [k, name] : kProcessNames) {
        if (k == p) return name;
    }
    return "?";
}

ProcessKind parse_process(const std::string& s) {
    for (const auto& [k, name] : kProcessNames) {
        if (name == s) return k;
    }
    throw ConfigError("unknown process '" + s + "'");
}

std::string format_number(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in) {
    const std::string key = trim(key_in);
    const std::string v = trim(value_in);
    if (key == "process") {
        process = parse_process(v);
    } else if (key == "L") {
        L = parse_integer<int>(key, v);
    } else if (key == "t") {
        checkpoints.clear();
        for (const auto& item : split_list(v)) checkpoints.push_back(parse_real(key, item));
    } else if (key == "replicas") {
        replicas = parse_integer<std::uint64_t>(key, v);
    } else if (key == "seed") {
        seed = parse_integer<std::uint64_t>(key, v);
    } else if (key == "init") {
        if (v == "flat") {
            init = InitialKind::Flat;
        } else if (v == "product") {
            init = InitialKind::Product;
        } else {
            throw ConfigError("unknown initial condition '" + v + "'");
        }
    } else if (key == "r") {
        r = parse_integer<int>(key, v);
    } else if (key == "rho") {
        rho = parse_real(key, v);
    } else if (key == "observables") {
        observables = split_list(v);
    } else if (key == "out") {
        out = v;
    } else if (key == "schedule") {
        if (v != "discrete" && v != "continuous") throw ConfigError("schedule must be discrete or continuous");
        schedule = v;
    } else if (key == "window") {
        window = parse_integer<int>(key, v);
    } else if (key == "trajectory") {
        trajectory = parse_bool(key, v);
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

std::vector<std::string> available_observables(ProcessKind p) {
    switch (p) {
        case ProcessKind::Wall:
        case ProcessKind::Free:
            return {"height0", "height0_sq", "site_mean", "mean_square", "scaled_mean_square", "zero_fraction", "histogram"};
        case ProcessKind::Exclusion:
            return {"flux", "flux_variance", "flux_variance_scaled", "h_minus_hprime", "flux_series"};
        case ProcessKind::CoupledMonotone:
            return {"upper0", "lower0", "gap0", "ordered"};
        case ProcessKind::CoupledShared:
            return {"wall0", "free0", "violation"};
        case ProcessKind::Ising:
            return {"height0", "flips"};
    }
    return {};
}

std::vector<std::string> default_observables(ProcessKind p) {
    switch (p) {
        case ProcessKind::Wall: return {"height0", "scaled_mean_square", "zero_fraction"};
        case ProcessKind::Free: return {"height0", "scaled_mean_square"};
        case ProcessKind::Exclusion: return {"flux", "flux_variance_scaled"};
        default: return available_observables(p);
    }
}

std::vector<std::string> ExperimentConfig::validate() {
    std::vector<std::string> warnings;
    if (replicas == 0) throw ConfigError("replicas must be positive");
    if (checkpoints.empty()) throw ConfigError("at least one checkpoint time is required");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (!(checkpoints[i] >= 0) || !std::isfinite(checkpoints[i])) throw ConfigError("checkpoint times must be finite and non-negative");
        if (i && checkpoints[i] <= checkpoints[i - 1]) throw ConfigError("checkpoint times must be strictly increasing");
    }
    if (process != ProcessKind::Ising) {
        if (L < 4 || L % 2 != 0) throw ConfigError("L must be even and at least 4");
    } else if (window < 2) {
        throw ConfigError("window must be at least 2");
    }
    if (init == InitialKind::Flat && (r < 0 || r % 2 != 0)) throw ConfigError("flat(r) requires an even r >= 0");
    if (init == InitialKind::Product) {
        if (process != ProcessKind::Exclusion) throw ConfigError("product initial condition applies to the exclusion process only");
        if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0,1)");
    }
    if (schedule.empty()) {
        const bool disc = process == ProcessKind::Wall || process == ProcessKind::Free || process == ProcessKind::CoupledShared;
        schedule = disc ? "discrete" : "continuous";
    }
    if ((process == ProcessKind::Exclusion || process == ProcessKind::Ising) && schedule != "continuous") {
        throw ConfigError(to_string(process) + " runs in continuous time only");
    }
    if (process == ProcessKind::CoupledShared && schedule != "discrete") throw ConfigError("coupled-shared runs on the discrete schedule only");
    if (observables.empty()) observables = default_observables(process);
    const auto avail = available_observables(process);
    for (const auto& o : observables) {
        if (std::find(avail.begin(), avail.end(), o) == avail.end()) {
            throw ConfigError("observable '" + o + "' is not available for process " + to_string(process));
        }
    }
    if (process != ProcessKind::Ising) {
        const double tmax = checkpoints.back();
        if (tmax > static_cast<double>(L) * L / 100.0) {
            warnings.push_back("t_max = " + format_number(tmax) + " exceeds L^2/100 = " + format_number(static_cast<double>(L) * L / 100.0));
        }
    }
    if (out.empty()) throw ConfigError("output path must not be empty");
    return warnings;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
    std::string ts, obs;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) ts += (i ? "," : "") + format_number(checkpoints[i]);
    for (std::size_t i = 0; i < observables.size(); ++i) obs += (i ? "," : "") + observables[i];
    return {
        {"process", to_string(process)},
        {"L", std::to_string(L)},
        {"t", ts},
        {"replicas", std::to_string(replicas)},
        {"seed", std::to_string(seed)},
        {"init", init == InitialKind::Flat ? "flat" : "product"},
        {"r", std::to_string(r)},
        {"rho", format_number(rho)},
        {"observables", obs},
        {"out", out},
        {"schedule", schedule},
        {"window", std::to_string(window)},
        {"trajectory", trajectory ? "true" : "false"},
    };
}

ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        c.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open configuration file " + path);
    return parse_config(f);
}

int worker_count() {
    if (const char* env = std::getenv("WALLSEP_WORKERS")) {
        const std::string v = trim(env);
        int n = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
        if (ec == std::errc() && ptr == v.data() + v.size() && n > 0) return n;
        throw ConfigError("WALLSEP_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t n, int workers, const std::function<void(std::uint64_t)>& body) {
    if (workers <= 1 || n <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    const auto nw = static_cast<std::uint64_t>(workers) < n ? workers : static_cast<int>(n);
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!first) first = std::current_exception();
                    failed = true;
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

// ---------------------------------------------------------------------------

namespace {

enum class Reduce { Mean, Variance, VarianceScaled };

Reduce reduction_of(const std::string& obs) {
    if (obs == "flux_variance") return Reduce::Variance;
    if (obs == "flux_variance_scaled") return Reduce::VarianceScaled;
    return Reduce::Mean;
}

bool is_scalar(const std::string& obs) { return obs != "histogram" && obs != "flux_series"; }

struct FluxRow {
    double t;
    long long J, H, I;
};

struct ReplicaOut {
    std::vector<std::vector<double>> values;  // [observable][checkpoint]
    std::vector<HistogramAccumulator> hist;   // per checkpoint
    std::vector<FluxRow> flux_rows;
};

void guard_height(const HeightField& h, std::uint64_t replica, double t) {
    if (h.max_abs() > h.size() / 4) {
        throw GuardError("replica " + std::to_string(replica) + " at t=" + format_number(t) + ": max |height| " +
                         std::to_string(h.max_abs()) + " exceeds L/4 = " + std::to_string(h.size() / 4));
    }
}

class ReplicaRunner {
public:
    ReplicaRunner(const ExperimentConfig& c, std::vector<std::string> scalars)
        : c_(c), scalars_(std::move(scalars)) {
        want_hist_ = std::find(c.observables.begin(), c.observables.end(), "histogram") != c.observables.end();
        want_series_ = std::find(c.observables.begin(), c.observables.end(), "flux_series") != c.observables.end();
        want_stirring_ = want_series_ ||
                         std::find(c.observables.begin(), c.observables.end(), "h_minus_hprime") != c.observables.end();
    }

    ReplicaOut run(std::uint64_t replica, std::uint64_t seed) const {
        ReplicaOut out;
        out.values.assign(scalars_.size(), std::vector<double>(c_.checkpoints.size(), 0.0));
        if (want_hist_) out.hist.resize(c_.checkpoints.size());
        const ScheduleKind sched = c_.continuous() ? ScheduleKind::ContinuousTime : ScheduleKind::DiscreteUniformSite;
        const auto record = [&](std::size_t k, const auto& value_of) {
            for (std::size_t o = 0; o < scalars_.size(); ++o) out.values[o][k] = value_of(scalars_[o]);
        };
        switch (c_.process) {
            case ProcessKind::Wall:
            case ProcessKind::Free: {
                const bool walled = c_.process == ProcessKind::Wall;
                HeightProcess p(HeightField::flat(c_.L, c_.r, walled), walled ? UpdateRule::Wall : UpdateRule::Free, sched, seed);
                for (std::size_t k = 0; k < c_.checkpoints.size(); ++k) {
                    const double t = c_.checkpoints[k];
                    p.advance_to(t);
                    const HeightField& h = p.field();
                    guard_height(h, replica, t);
                    record(k, [&](const std::string& o) -> double {
                        if (o == "height0") return h[0];
                        if (o == "height0_sq") return static_cast<double>(h[0]) * h[0];
                        if (o == "site_mean") return site_mean(h);
                        if (o == "mean_square") return site_mean_square(h);
                        if (o == "scaled_mean_square") return t > 0 ? site_mean_square(h) / std::sqrt(t) : 0.0;
                        if (o == "zero_fraction") return zero_fraction(h);
                        return 0.0;
                    });
                    if (want_hist_) out.hist[k].add(h);
                }
                break;
            }
            case ProcessKind::Exclusion: {
                Rng init_rng(splitmix64_mix(seed ^ 0xA5A5A5A5A5A5A5A5ULL));
                OccupationField eta0 = c_.init == InitialKind::Flat ? flat_occupation(c_.L) : product_measure_init(c_.L, c_.rho, init_rng);
                ExclusionProcess p(eta0, seed, want_stirring_);
                for (std::size_t k = 0; k < c_.checkpoints.size(); ++k) {
                    const double t = c_.checkpoints[k];
                    p.advance_to(t);
                    FluxDecomposition d;
                    if (want_stirring_) {
                        const auto& st = p.state().stirring;
                        if (st.max_abs_displacement() > c_.L / 4) {
                            throw GuardError("replica " + std::to_string(replica) + " at t=" + format_number(t) +
                                             ": label displacement exceeds L/4");
                        }
                        d = flux_decomposition(st, p.initial());
                        if (want_series_) out.flux_rows.push_back({t, p.flux(), d.H, d.I});
                    } else if (std::llabs(p.flux()) > c_.L / 4) {
                        throw GuardError("replica " + std::to_string(replica) + " at t=" + format_number(t) + ": |J| exceeds L/4");
                    }
                    record(k, [&](const std::string& o) -> double {
                        if (o == "h_minus_hprime") return static_cast<double>(d.H - d.H_prime);
                        return static_cast<double>(p.flux());
                    });
                }
                break;
            }
            case ProcessKind::CoupledMonotone: {
                MonotoneCoupling p(HeightField::flat(c_.L, c_.r, true), HeightField::flat(c_.L, c_.r, false), sched, seed);
                for (std::size_t k = 0; k < c_.checkpoints.size(); ++k) {
                    const double t = c_.checkpoints[k];
                    p.advance_to(t);
                    guard_height(p.upper(), replica, t);
                    guard_height(p.lower(), replica, t);
                    record(k, [&](const std::string& o) -> double {
                        if (o == "upper0") return p.upper()[0];
                        if (o == "lower0") return p.lower()[0];
                        if (o == "gap0") return p.upper()[0] - p.lower()[0];
                        return p.ordered() ? 1.0 : 0.0;
                    });
                }
                break;
            }
            case ProcessKind::CoupledShared: {
                SharedSiteCoupling p(HeightField::flat(c_.L, c_.r, true), HeightField::flat(c_.L, c_.r, false), seed);
                for (std::size_t k = 0; k < c_.checkpoints.size(); ++k) {
                    const double t = c_.checkpoints[k];
                    p.advance_to(t);
                    guard_height(p.wall(), replica, t);
                    guard_height(p.free(), replica, t);
                    record(k, [&](const std::string& o) -> double {
                        if (o == "wall0") return p.wall()[0];
                        if (o == "free0") return p.free()[0];
                        for (int x = 0; x < c_.L; ++x) {
                            if (p.free()[x] > p.wall()[x]) return 1.0;
                        }
                        return 0.0;
                    });
                }
                break;
            }
            case ProcessKind::Ising: {
                IsingProcess p(SpinWindow::initial(c_.window), seed);
                for (std::size_t k = 0; k < c_.checkpoints.size(); ++k) {
                    p.advance_to(c_.checkpoints[k]);
                    const std::vector<int> b = spin_to_interface(p.window());
                    record(k, [&](const std::string& o) -> double {
                        if (o == "flips") return static_cast<double>(p.flips());
                        return b[static_cast<std::size_t>(c_.window)];
                    });
                }
                break;
            }
        }
        return out;
    }

private:
    const ExperimentConfig& c_;
    std::vector<std::string> scalars_;
    bool want_hist_ = false;
    bool want_series_ = false;
    bool want_stirring_ = false;
};

void write_text(const std::filesystem::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << body;
}

}  // namespace

RunResult run(ExperimentConfig config, bool write_files) {
    const auto start = std::chrono::steady_clock::now();
    RunResult res;
    res.warnings = config.validate();
    std::vector<std::string> scalars;
    for (const auto& o : config.observables) {
        if (is_scalar(o)) scalars.push_back(o);
    }
    res.seeds.resize(config.replicas);
    for (std::uint64_t i = 0; i < config.replicas; ++i) res.seeds[i] = derive_seed(config.seed, i);

    const ReplicaRunner runner(config, scalars);
    std::vector<ReplicaOut> outs(config.replicas);
    parallel_for(config.replicas, worker_count(), [&](std::uint64_t i) { outs[i] = runner.run(i, res.seeds[i]); });

    // Merge in replica order so the result does not depend on scheduling.
    const std::size_t nt = config.checkpoints.size();
    std::vector<std::vector<EnsembleAccumulator>> acc(scalars.size(), std::vector<EnsembleAccumulator>(nt));
    std::vector<HistogramAccumulator> hist(nt);
    for (const auto& o : outs) {
        for (std::size_t s = 0; s < scalars.size(); ++s) {
            for (std::size_t k = 0; k < nt; ++k) acc[s][k].add(o.values[s][k]);
        }
        for (std::size_t k = 0; k < o.hist.size(); ++k) hist[k].merge(o.hist[k]);
    }
    for (std::size_t s = 0; s < scalars.size(); ++s) {
        auto& rows = res.table[scalars[s]];
        const Reduce red = reduction_of(scalars[s]);
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = config.checkpoints[k];
            Estimate e = red == Reduce::Mean ? acc[s][k].mean_ci(0.95) : acc[s][k].variance_ci(0.95);
            if (red == Reduce::VarianceScaled) {
                const double f = t > 0 ? 1.0 / std::sqrt(t) : 0.0;
                e.value *= f;
                e.lo *= f;
                e.hi *= f;
            }
            rows.push_back({t, e.value, e.lo, e.hi, acc[s][k].count()});
        }
    }

    if (write_files) {
        namespace fs = std::filesystem;
        const fs::path dir(config.out);
        fs::create_directories(dir);
        for (const auto& [name, rows] : res.table) {
            std::string body = "t,estimate,ci_low,ci_high,n_replicas\n";
            for (const auto& r : rows) {
                body += format_number(r.t) + "," + format_number(r.estimate) + "," + format_number(r.ci_low) + "," +
                        format_number(r.ci_high) + "," + std::to_string(r.n) + "\n";
            }
            write_text(dir / (name + ".csv"), body);
            res.files.push_back(name + ".csv");
        }
        if (std::find(config.observables.begin(), config.observables.end(), "histogram") != config.observables.end()) {
            for (std::size_t k = 0; k < nt; ++k) {
                const double t = config.checkpoints[k];
                if (!(t > 0)) continue;
                const ScaledHistogram h = hist[k].scaled(t);
                std::string body = "s,mass\n";
                for (std::size_t i = 0; i < h.mass.size(); ++i) {
                    body += format_number(h.s_of(static_cast<int>(i))) + "," + format_number(h.mass[i]) + "\n";
                }
                const std::string name = "histogram_t" + format_number(t) + ".csv";
                write_text(dir / name, body);
                res.files.push_back(name);
            }
        }
        if (std::find(config.observables.begin(), config.observables.end(), "flux_series") != config.observables.end()) {
            std::string body = "replica,t,J,H,I\n";
            for (std::size_t i = 0; i < outs.size(); ++i) {
                for (const auto& r : outs[i].flux_rows) {
                    body += std::to_string(i) + "," + format_number(r.t) + "," + std::to_string(r.J) + "," + std::to_string(r.H) +
                            "," + std::to_string(r.I) + "\n";
                }
            }
            write_text(dir / "flux_series.csv", body);
            res.files.push_back("flux_series.csv");
        }
        if (config.trajectory) {
            std::string body = "t,observable,value\n";
            for (std::size_t k = 0; k < nt; ++k) {
                for (std::size_t s = 0; s < scalars.size(); ++s) {
                    body += format_number(config.checkpoints[k]) + "," + scalars[s] + "," + format_number(outs[0].values[s][k]) + "\n";
                }
            }
            write_text(dir / "trajectory.csv", body);
            res.files.push_back("trajectory.csv");
        }
        res.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        nlohmann::ordered_json m;
        nlohmann::ordered_json cfg;
        for (const auto& [k, v] : config.entries()) cfg[k] = v;
        m["config"] = cfg;
        m["code_version"] = code_version();
        m["rng"] = "xoshiro256++ seeded by splitmix64; replica seed = mix(mix(master) + (i+1) * 0x9E3779B97F4A7C15)";
        m["seeds"] = res.seeds;
        m["files"] = res.files;
        m["warnings"] = res.warnings;
        m["wall_clock_seconds"] = res.wall_clock_seconds;
        write_text(dir / "manifest.json", m.dump(2) + "\n");
    } else {
        res.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return res;
}

}  // namespace wallsep
