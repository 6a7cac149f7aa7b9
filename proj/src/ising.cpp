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

#include "wallsep/ising.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wallsep {

namespace {

int mod2(int x) { return ((x % 2) + 2) % 2; }

constexpr int kDu[4] = {1, 1, -1, -1};
constexpr int kDv[4] = {1, -1, 1, -1};

void require_even(int u, int v) {
    if (mod2(u + v) != 0) throw std::invalid_argument("point is not on the even sublattice");
}

void validate_interface(const std::vector<int>& b, int W) {
    if (W < 1) throw std::invalid_argument("window half-width must be positive");
    if (b.size() != static_cast<std::size_t>(2 * W + 1)) throw std::invalid_argument("interface length must be 2W+1");
    for (int u = -W; u <= W; ++u) {
        const int h = b[static_cast<std::size_t>(u + W)];
        if (h < 0) throw InvariantError("interface height below the wall");
        if (h > W) throw InvariantError("interface height outside the window");
        if (mod2(h) != mod2(u)) throw InvariantError("interface height has the wrong parity");
        if (u > -W && std::abs(h - b[static_cast<std::size_t>(u - 1 + W)]) != 1) throw InvariantError("interface gradient must be +-1");
    }
}

}  // namespace

Point rotate_inverse(Point q) {
    if (mod2(q.x + q.y) != 0) throw std::invalid_argument("rotate_inverse: u + v must be even");
    return {(q.x + q.y) / 2, (q.x - q.y) / 2};
}

SpinWindow SpinWindow::initial(int W) {
    if (W < 1) throw std::invalid_argument("window half-width must be positive");
    SpinWindow w;
    w.W_ = W;
    w.left_edge_ = mod2(W);
    w.right_edge_ = mod2(W);
    w.s_.assign(static_cast<std::size_t>(2 * W + 1) * (2 * W + 1), 0);
    for (int u = -W; u <= W; ++u) {
        for (int v = -W; v <= W; ++v) {
            if (mod2(u + v) != 0) continue;
            const Point p = rotate_inverse({u, v});
            w.s_[w.idx(u, v)] = p.x > p.y ? 1 : -1;
        }
    }
    return w;
}

SpinWindow SpinWindow::from_interface(const std::vector<int>& heights, int W) {
    validate_interface(heights, W);
    SpinWindow w;
    w.W_ = W;
    w.left_edge_ = heights.front();
    w.right_edge_ = heights.back();
    w.s_.assign(static_cast<std::size_t>(2 * W + 1) * (2 * W + 1), 0);
    for (int u = -W; u <= W; ++u) {
        const int b = heights[static_cast<std::size_t>(u + W)];
        for (int v = -W; v <= W; ++v) {
            if (mod2(u + v) == 0) w.s_[w.idx(u, v)] = v <= -b ? -1 : 1;
        }
    }
    return w;
}

int SpinWindow::boundary_height(int u) const {
    if (u > W_) return right_edge_ + mod2(u - W_);
    if (u < -W_) return left_edge_ + mod2(-W_ - u);
    throw std::invalid_argument("boundary_height: column inside the window");
}

int SpinWindow::spin(int u, int v) const {
    require_even(u, v);
    if (std::abs(u) <= W_) {
        if (v > W_) return 1;
        if (v < -W_) return -1;
        return s_[idx(u, v)];
    }
    return v <= -boundary_height(u) ? -1 : 1;
}

void SpinWindow::flip(int u, int v) {
    require_even(u, v);
    if (!in_window(u, v)) throw std::out_of_range("flip: site outside the window");
    auto& s = s_[idx(u, v)];
    if (s < 0 && v - 2 < -W_) throw InvariantError("interface left the window");
    s = static_cast<std::int8_t>(-s);
}

std::vector<Point> SpinWindow::sites() const {
    std::vector<Point> out;
    for (int u = -W_; u <= W_; ++u) {
        for (int v = -W_; v <= W_; ++v) {
            if (mod2(u + v) == 0) out.push_back({u, v});
        }
    }
    return out;
}

int disagreeing_neighbours(const SpinWindow& w, int u, int v) {
    const int s = w.spin(u, v);
    int d = 0;
    for (int k = 0; k < 4; ++k) d += w.spin(u + kDu[k], v + kDv[k]) != s;
    return d;
}

double glauber_rate(const SpinWindow& w, int u, int v) {
    if (!w.in_window(u, v)) throw std::out_of_range("glauber_rate: site outside the window");
    return (disagreeing_neighbours(w, u, v) == 2 && v <= 0) ? 0.5 : 0.0;
}

double zero_temperature_rate(const SpinWindow& w, int u, int v, double field) {
    if (!(field > 0)) throw std::invalid_argument("field must be positive");
    if (!w.in_window(u, v)) throw std::out_of_range("zero_temperature_rate: site outside the window");
    const int s = w.spin(u, v);
    int sum = 0;
    for (int k = 0; k < 4; ++k) sum += w.spin(u + kDu[k], v + kDv[k]);
    // H = -sum over ordered neighbour pairs - field * sum over v >= 1 sites.
    const double dH = 4.0 * s * sum + (v >= 1 ? 2.0 * field * s : 0.0);
    if (dH < 0) return 1.0;
    if (dH == 0) return 0.5;
    return 0.0;
}

std::vector<int> spin_to_interface(const SpinWindow& w) {
    const int W = w.half_width();
    std::vector<int> b(static_cast<std::size_t>(2 * W + 1));
    for (int u = -W; u <= W; ++u) {
        const int top = mod2(W + u) == 0 ? W : W - 1;
        int m = 0;
        bool found = false;
        for (int v = top; v >= -W; v -= 2) {
            const int s = w.spin(u, v);
            if (!found && s < 0) {
                found = true;
                m = v;
            } else if (found && s > 0) {
                throw InvariantError("column has a plus spin below a minus spin");
            }
        }
        if (!found) throw InvariantError("interface left the window");
        b[static_cast<std::size_t>(u + W)] = -m;
    }
    return b;
}

IsingProcess::IsingProcess(SpinWindow start, std::uint64_t seed) : win_(std::move(start)), rng_(seed) {
    sites_ = win_.sites();
}

void IsingProcess::advance_to(double t) {
    if (t <= time_) return;
    const auto n = static_cast<std::uint32_t>(sites_.size());
    // Candidates at total rate n/4; a candidate flips iff its rate is 1/2.
    const std::uint64_t count = rng_.poisson(0.25 * n * (t - time_));
    for (std::uint64_t k = 0; k < count; ++k) {
        const Point p = sites_[rng_.below(n)];
        if (glauber_rate(win_, p.x, p.y) > 0) {
            win_.flip(p.x, p.y);
            ++flips_;
        }
    }
    time_ = t;
}

SpinWindow evolve_ising(SpinWindow start, double t, std::uint64_t seed) {
    IsingProcess p(std::move(start), seed);
    p.advance_to(t);
    return p.window();
}

void RateAuditReport::merge(const RateAuditReport& o) {
    states += o.states;
    ising_moves += o.ising_moves;
    wall_moves += o.wall_moves;
    mismatches += o.mismatches;
    rate_form_mismatches += o.rate_form_mismatches;
    monotonicity_failures += o.monotonicity_failures;
    for (const auto& d : o.details) {
        if (details.size() < 10) details.push_back(d);
    }
}

namespace {

std::string heights_str(const std::vector<int>& b) {
    std::ostringstream os;
    for (std::size_t i = 0; i < b.size(); ++i) os << (i ? " " : "") << b[i];
    return os.str();
}

}  // namespace

RateAuditReport ising_vs_wall_rate_audit(const SpinWindow& w) {
    RateAuditReport rep;
    rep.states = 1;
    const int W = w.half_width();
    std::vector<int> b;
    try {
        b = spin_to_interface(w);
    } catch (const InvariantError& e) {
        rep.monotonicity_failures = 1;
        rep.details.emplace_back(e.what());
        return rep;
    }
    std::vector<InterfaceMove> ising, wall;
    for (const Point& p : w.sites()) {
        const double r = glauber_rate(w, p.x, p.y);
        for (double field : {1.0, 0.37, 5.0}) {
            if (zero_temperature_rate(w, p.x, p.y, field) != r) {
                ++rep.rate_form_mismatches;
                if (rep.details.size() < 10) {
                    rep.details.push_back("rate form differs at (" + std::to_string(p.x) + "," + std::to_string(p.y) + ")");
                }
                break;
            }
        }
        if (r == 0) continue;
        SpinWindow next = w;
        try {
            next.flip(p.x, p.y);
            ising.push_back({spin_to_interface(next), r});
        } catch (const InvariantError& e) {
            ++rep.monotonicity_failures;
            if (rep.details.size() < 10) rep.details.emplace_back(e.what());
        }
    }
    const auto at = [&](int u) { return std::abs(u) <= W ? b[static_cast<std::size_t>(u + W)] : w.boundary_height(u); };
    for (int u = -W; u <= W; ++u) {
        const int h = at(u);
        const int d = at(u - 1) + at(u + 1) - 2 * h;
        if (d == 0 || h + d < 0) continue;
        std::vector<int> nb = b;
        nb[static_cast<std::size_t>(u + W)] = h + d;
        wall.push_back({std::move(nb), 0.5});
    }
    std::sort(ising.begin(), ising.end());
    std::sort(wall.begin(), wall.end());
    rep.ising_moves = ising.size();
    rep.wall_moves = wall.size();
    std::vector<InterfaceMove> only_ising, only_wall;
    std::set_difference(ising.begin(), ising.end(), wall.begin(), wall.end(), std::back_inserter(only_ising));
    std::set_difference(wall.begin(), wall.end(), ising.begin(), ising.end(), std::back_inserter(only_wall));
    rep.mismatches = only_ising.size() + only_wall.size();
    for (const auto& m : only_ising) {
        if (rep.details.size() < 10) rep.details.push_back("spin move without wall counterpart: " + heights_str(m.heights));
    }
    for (const auto& m : only_wall) {
        if (rep.details.size() < 10) rep.details.push_back("wall move without spin counterpart: " + heights_str(m.heights));
    }
    return rep;
}

RateAuditReport exhaustive_pattern_audit(int max_height, int W) {
    if (max_height + 1 > W) throw std::invalid_argument("window too small for the pattern heights");
    RateAuditReport rep;
    for (int b = 0; b <= max_height; ++b) {
        for (int a : {b - 1, b + 1}) {
            for (int c : {b - 1, b + 1}) {
                if (a < 0 || c < 0 || a > max_height || c > max_height) continue;
                const int u0 = mod2(b);
                std::vector<int> h(static_cast<std::size_t>(2 * W + 1));
                const auto set = [&](int u, int v) { h[static_cast<std::size_t>(u + W)] = v; };
                set(u0, b);
                // Zig-zag between the pattern's outer value and b on each side.
                for (int u = u0 - 1, k = 0; u >= -W; --u, ++k) set(u, k % 2 == 0 ? a : b);
                for (int u = u0 + 1, k = 0; u <= W; ++u, ++k) set(u, k % 2 == 0 ? c : b);
                rep.merge(ising_vs_wall_rate_audit(SpinWindow::from_interface(h, W)));
            }
        }
    }
    return rep;
}

RateAuditReport exhaustive_window_audit(int W, int max_height) {
    // a local minimum at max_height - 1 rises to max_height + 1
    if (max_height + 1 > W) throw std::invalid_argument("heights must stay inside the window after one move");
    RateAuditReport rep;
    std::vector<int> h(static_cast<std::size_t>(2 * W + 1));
    const auto rec = [&](auto&& self, int u) -> void {
        if (u > W) {
            rep.merge(ising_vs_wall_rate_audit(SpinWindow::from_interface(h, W)));
            return;
        }
        const int prev = h[static_cast<std::size_t>(u - 1 + W)];
        for (int next : {prev - 1, prev + 1}) {
            if (next < 0 || next > max_height) continue;
            h[static_cast<std::size_t>(u + W)] = next;
            self(self, u + 1);
        }
    };
    for (int start = mod2(W); start <= max_height; start += 2) {
        h[0] = start;
        rec(rec, -W + 1);
    }
    return rep;
}

RateAuditReport simulation_audit(std::size_t samples, int W, std::uint64_t seed) {
    RateAuditReport rep;
    Rng pick(seed);
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = pick.uniform() * 2.0 * W;
        IsingProcess p(SpinWindow::initial(W), derive_seed(seed, k));
        p.advance_to(t);
        rep.merge(ising_vs_wall_rate_audit(p.window()));
    }
    return rep;
}

void dump_window(std::ostream& os, const SpinWindow& w) {
    const int W = w.half_width();
    for (int v = W; v >= -W; --v) {
        for (int u = -W; u <= W; ++u) os << (mod2(u + v) != 0 ? '.' : (w.spin(u, v) > 0 ? '+' : '-'));
        os << '\n';
    }
}

std::string to_string(const SpinWindow& w) {
    std::ostringstream os;
    dump_window(os, w);
    return os.str();
}

}  // namespace wallsep
