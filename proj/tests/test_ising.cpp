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

#include <doctest.h>

#include <sstream>

#include "wallsep/ising.hpp"

using namespace wallsep;

TEST_CASE("rotation") {
    CHECK(rotate({0, 0}) == Point{0, 0});
    CHECK(rotate({1, 0}) == Point{1, 1});
    CHECK(rotate({0, 1}) == Point{1, -1});
    for (int x = -6; x <= 6; ++x) {
        for (int y = -6; y <= 6; ++y) {
            const Point p{x, y};
            CHECK(rotate_inverse(rotate(p)) == p);
            CHECK(rotate(rotate(p)) == Point{2 * x, 2 * y});
        }
    }
    CHECK_THROWS_AS((void)rotate_inverse({1, 0}), std::invalid_argument);
}

TEST_CASE("initial window maps to the flat wall configuration") {
    const SpinWindow w = SpinWindow::initial(6);
    const auto b = spin_to_interface(w);
    REQUIRE(b.size() == 13);
    for (int u = -6; u <= 6; ++u) CHECK(b[static_cast<std::size_t>(u + 6)] == (u & 1));
    CHECK(SpinWindow::from_interface(b, 6) == w);
}

TEST_CASE("glauber rates") {
    const SpinWindow w = SpinWindow::initial(6);
    // local-minimum corner of the flat interface, column 0, top minus at v = 0
    CHECK(w.spin(0, 0) == -1);
    CHECK(disagreeing_neighbours(w, 0, 0) == 2);
    CHECK(glauber_rate(w, 0, 0) == 0.5);
    // deep in the minus phase: all four neighbours agree
    CHECK(disagreeing_neighbours(w, 0, -4) == 0);
    CHECK(glauber_rate(w, 0, -4) == 0.0);
    CHECK_THROWS_AS((void)glauber_rate(w, 0, 8), std::out_of_range);

    // sites with v >= 1 never flip, in the initial window and in evolved ones
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SpinWindow e = evolve_ising(SpinWindow::initial(8), 3.0, seed);
        for (const Point& p : e.sites()) {
            if (p.y >= 1) {
                REQUIRE(glauber_rate(e, p.x, p.y) == 0.0);
                REQUIRE(e.spin(p.x, p.y) == 1);
            }
            REQUIRE(zero_temperature_rate(e, p.x, p.y, 1.0) == glauber_rate(e, p.x, p.y));
            REQUIRE(zero_temperature_rate(e, p.x, p.y, 0.37) == zero_temperature_rate(e, p.x, p.y, 5.0));
        }
    }
}

TEST_CASE("one corner flip moves one column by two") {
    SpinWindow w = SpinWindow::initial(6);
    const auto before = spin_to_interface(w);
    w.flip(0, 0);
    const auto after = spin_to_interface(w);
    for (std::size_t k = 0; k < before.size(); ++k) CHECK(after[k] - before[k] == (k == 6 ? 2 : 0));
    // and back down
    w.flip(0, 0);
    CHECK(spin_to_interface(w) == before);
}

TEST_CASE("broken column monotonicity is detected") {
    SpinWindow w = SpinWindow::initial(6);
    w.flip(0, -4);
    CHECK_THROWS_AS((void)spin_to_interface(w), InvariantError);
}

TEST_CASE("evolved interfaces stay non-negative and monotone") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        IsingProcess p(SpinWindow::initial(12), seed);
        for (double t = 0.5; t <= 4.0; t += 0.5) {
            p.advance_to(t);
            const auto b = spin_to_interface(p.window());
            for (int v : b) REQUIRE(v >= 0);
            for (std::size_t k = 1; k < b.size(); ++k) REQUIRE(std::abs(b[k] - b[k - 1]) == 1);
        }
    }
}

TEST_CASE("flat start allows exactly the up flips at local minima") {
    const SpinWindow w = SpinWindow::initial(6);
    const RateAuditReport r = ising_vs_wall_rate_audit(w);
    CHECK(r.clean());
    CHECK(r.states == 1);
    CHECK(r.ising_moves == r.wall_moves);
    // every even column is a local minimum, the edge columns included
    CHECK(r.wall_moves == 7);
}

TEST_CASE("local maximum at height one is blocked on both sides") {
    // columns -1, 0, 1 at heights 0, 1, 0 (u = 0 is odd-parity only for b odd)
    std::vector<int> b(13);
    for (int u = -6; u <= 6; ++u) b[static_cast<std::size_t>(u + 6)] = (u & 1);
    const SpinWindow w = SpinWindow::from_interface(b, 6);
    // column 1 sits at height 1 between two zeros: its top minus is at v = -1
    CHECK(w.spin(1, -1) == -1);
    CHECK(w.spin(1, 1) == 1);
    // turning the plus at (1, 1) minus would lower the column below the wall
    CHECK(glauber_rate(w, 1, 1) == 0.0);
    CHECK(ising_vs_wall_rate_audit(w).clean());
}

TEST_CASE("exhaustive and simulation audits") {
    const RateAuditReport pattern = exhaustive_pattern_audit(4, 6);
    CHECK(pattern.clean());
    CHECK(pattern.states > 0);
    CHECK_THROWS_AS((void)exhaustive_window_audit(4, 4), std::invalid_argument);
    const RateAuditReport window = exhaustive_window_audit(5, 4);
    CHECK(window.clean());
    const RateAuditReport sim = simulation_audit(200, 10, 3);
    CHECK(sim.states == 200);
    CHECK(sim.clean());
}

TEST_CASE("window dump") {
    const SpinWindow w = SpinWindow::initial(1);
    const std::string s = to_string(w);
    // rows v = 1, 0, -1
    CHECK(s == "+.+\n.-.\n-.-\n");
}
