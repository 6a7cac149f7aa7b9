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

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "wallsep/lattice.hpp"
#include "wallsep/rng.hpp"

namespace wallsep {

struct Point {
    int x = 0;
    int y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// R(x, y) = (x + y, x - y).
[[nodiscard]] constexpr Point rotate(Point p) noexcept { return {p.x + p.y, p.x - p.y}; }
/// R^{-1}(u, v) = ((u + v) / 2, (u - v) / 2); throws unless u + v is even.
[[nodiscard]] Point rotate_inverse(Point q);

/// Zero-temperature spins on the rotated even sublattice of the square
/// [-W, W]^2. Column u carries minus spins exactly at v <= -b(u) (v = u mod 2),
/// so the interface height is b(u) = -max{v : spin(u, v) = -1}. Spins outside
/// the window are frozen: rows above are plus, rows below are minus, and
/// columns beyond +-W continue the interface as a zig-zag from b(+-W).
class SpinWindow {
public:
    /// The initial configuration: plus below the diagonal of the original
    /// lattice (rotated v >= 1), minus on and above it.
    static SpinWindow initial(int W);
    /// Window built from interface heights b(u), u = -W..W.
    static SpinWindow from_interface(const std::vector<int>& heights, int W);

    [[nodiscard]] int half_width() const noexcept { return W_; }
    [[nodiscard]] bool in_window(int u, int v) const noexcept { return std::abs(u) <= W_ && std::abs(v) <= W_; }
    /// Spin at any even-sublattice point (window or frozen boundary).
    [[nodiscard]] int spin(int u, int v) const;
    /// Flips a window spin.
    void flip(int u, int v);
    /// Frozen interface height of a column outside the window.
    [[nodiscard]] int boundary_height(int u) const;

    /// Window sites (u, v) with u + v even, in row-major order of u then v.
    [[nodiscard]] std::vector<Point> sites() const;

    friend bool operator==(const SpinWindow&, const SpinWindow&) = default;

private:
    [[nodiscard]] std::size_t idx(int u, int v) const noexcept {
        return static_cast<std::size_t>((u + W_) * (2 * W_ + 1) + (v + W_));
    }
    int W_ = 0;
    int left_edge_ = 0;   // b(-W) at construction
    int right_edge_ = 0;  // b(W) at construction
    std::vector<std::int8_t> s_;
};

/// Number of the four diagonal neighbours whose spin differs from spin(u, v).
[[nodiscard]] int disagreeing_neighbours(const SpinWindow& w, int u, int v);

/// The displayed zero-temperature rate: 1/2 when exactly two neighbours
/// disagree and the site is on or above the original diagonal (v <= 0),
/// else 0. Throws std::out_of_range for sites outside the window.
[[nodiscard]] double glauber_rate(const SpinWindow& w, int u, int v);

/// The beta -> infinity limit of e^{-beta dH} / (1 + e^{-beta dH}) computed
/// from the Hamiltonian with field `field` > 0 on the sites v >= 1.
[[nodiscard]] double zero_temperature_rate(const SpinWindow& w, int u, int v, double field = 1.0);

/// Interface heights b(u) for u = -W..W. Throws InvariantError if some column
/// is not a single minus half-line.
[[nodiscard]] std::vector<int> spin_to_interface(const SpinWindow& w);

/// Zero-temperature Glauber evolution with the generator prefactor 1/2:
/// each flippable site flips at rate (1/2) c = 1/4.
class IsingProcess {
public:
    IsingProcess(SpinWindow start, std::uint64_t seed);
    void advance_to(double t);
    [[nodiscard]] const SpinWindow& window() const noexcept { return win_; }
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] std::uint64_t flips() const noexcept { return flips_; }

private:
    SpinWindow win_;
    std::vector<Point> sites_;
    Rng rng_;
    double time_ = 0.0;
    std::uint64_t flips_ = 0;
};

[[nodiscard]] SpinWindow evolve_ising(SpinWindow start, double t, std::uint64_t seed);

/// One allowed move: the successor interface over the window and its rate.
struct InterfaceMove {
    std::vector<int> heights;
    double rate = 0.0;
    friend auto operator<=>(const InterfaceMove&, const InterfaceMove&) = default;
};

struct RateAuditReport {
    std::size_t states = 0;
    std::size_t ising_moves = 0;
    std::size_t wall_moves = 0;
    std::size_t mismatches = 0;        // moves present on one side only or with different rates
    std::size_t rate_form_mismatches = 0;  // displayed rate vs Hamiltonian limit
    std::size_t monotonicity_failures = 0;
    std::vector<std::string> details;  // first few mismatches

    void merge(const RateAuditReport& o);
    [[nodiscard]] bool clean() const noexcept { return mismatches == 0 && rate_form_mismatches == 0 && monotonicity_failures == 0; }
};

/// Successors of the window interface under the spin dynamics (displayed
/// rates) and under the wall process (rate 1/2 corner flips with the wall
/// indicator, boundary columns frozen), compared one to one.
[[nodiscard]] RateAuditReport ising_vs_wall_rate_audit(const SpinWindow& w);

/// All width-3 patterns (a, b, c) with 0 <= heights <= max_height placed at
/// the centre of a window of half-width W.
[[nodiscard]] RateAuditReport exhaustive_pattern_audit(int max_height = 4, int W = 6);
/// Every interface on a window of half-width W with heights <= max_height.
[[nodiscard]] RateAuditReport exhaustive_window_audit(int W = 5, int max_height = 4);
/// States sampled along spin-dynamics trajectories from the initial window.
[[nodiscard]] RateAuditReport simulation_audit(std::size_t samples, int W, std::uint64_t seed);

/// Text grid of the window: one row per v from W down to -W, '+'/'-' on the
/// even sublattice and '.' elsewhere.
void dump_window(std::ostream& os, const SpinWindow& w);
[[nodiscard]] std::string to_string(const SpinWindow& w);

}  // namespace wallsep
