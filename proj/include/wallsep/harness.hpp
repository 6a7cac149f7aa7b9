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

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallsep {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a replica outgrows the ring approximation.
class GuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProcessKind { Wall, Free, Exclusion, CoupledMonotone, CoupledShared, Ising };
enum class InitialKind { Flat, Product };

[[nodiscard]] std::string to_string(ProcessKind p);
[[nodiscard]] ProcessKind parse_process(const std::string& s);

/// Flat key=value experiment description. Keys: process, L, t (comma list of
/// checkpoints), replicas, seed, init (flat | product), r, rho, observables
/// (comma list), out, schedule (discrete | continuous), window (Ising W),
/// trajectory (true | false).
struct ExperimentConfig {
    ProcessKind process = ProcessKind::Wall;
    int L = 1024;
    std::vector<double> checkpoints{16.0};
    std::uint64_t replicas = 8;
    std::uint64_t seed = 1;
    InitialKind init = InitialKind::Flat;
    int r = 0;
    double rho = 0.5;
    std::vector<std::string> observables;  // empty: the process default set
    std::string out = "out";
    std::string schedule;  // empty: the process default
    int window = 16;
    bool trajectory = false;

    /// Applies one key=value pair; throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Checks all fields and fills defaults. Returns warnings (for example
    /// t_max > L^2 / 100).
    std::vector<std::string> validate();
    /// Canonical key=value lines, in fixed key order.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> entries() const;
    [[nodiscard]] bool continuous() const { return schedule == "continuous"; }
};

[[nodiscard]] ExperimentConfig parse_config(std::istream& is);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Observables available for a process, and the default subset.
[[nodiscard]] std::vector<std::string> available_observables(ProcessKind p);
[[nodiscard]] std::vector<std::string> default_observables(ProcessKind p);

/// One CSV row: t, estimate, ci_low, ci_high, n_replicas.
struct ObservableRow {
    double t = 0.0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t n = 0;
};

struct RunResult {
    std::map<std::string, std::vector<ObservableRow>> table;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    std::vector<std::uint64_t> seeds;
    double wall_clock_seconds = 0.0;
};

/// Runs every replica, writes CSVs and manifest.json into config.out.
/// Throws ConfigError for invalid configurations and GuardError when a
/// replica's max |height| or label displacement exceeds L/4.
RunResult run(ExperimentConfig config, bool write_files = true);

/// Worker count from WALLSEP_WORKERS (default: hardware concurrency).
[[nodiscard]] int worker_count();

/// Calls body(i) for i in [0, n) on `workers` threads; the first exception
/// thrown by any call is rethrown after all threads stop.
void parallel_for(std::uint64_t n, int workers, const std::function<void(std::uint64_t)>& body);

/// Shortest round-trip decimal form of a double.
[[nodiscard]] std::string format_number(double x);

[[nodiscard]] const char* code_version() noexcept;

}  // namespace wallsep
