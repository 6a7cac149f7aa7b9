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

#include "wallsep/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wallsep {

void require_rule(const HeightField& h, UpdateRule rule) {
    if ((rule == UpdateRule::Wall) != h.walled()) {
        throw std::invalid_argument("update rule does not match the field's walled flag");
    }
}

HeightField step_discrete(const HeightField& h, int x, UpdateRule rule) {
    require_rule(h, rule);
    if (x < 0 || x >= h.size()) throw std::out_of_range("site outside ring");
    HeightField out = h;
    apply_update(out, x, rule);
    return out;
}

std::uint64_t discrete_steps_for(double t, int length, double dt_per_step) {
    if (t < 0) throw std::invalid_argument("time must be non-negative");
    (void)length;
    // Small relative slack so that t = k * dt lands on k despite rounding.
    return static_cast<std::uint64_t>(std::floor(t / dt_per_step * (1.0 + 1e-12)));
}

HeightProcess::HeightProcess(HeightField initial, UpdateRule rule, ScheduleKind schedule, std::uint64_t seed)
    : field_(std::move(initial)), rule_(rule), schedule_(schedule), rng_(seed) {
    require_rule(field_, rule_);
}

double HeightProcess::time() const noexcept {
    if (schedule_ == ScheduleKind::DiscreteUniformSite) return 2.0 * static_cast<double>(steps_) / field_.size();
    return time_;
}

void HeightProcess::run_updates(std::uint64_t count) {
    auto& v = field_.raw();
    const auto n = static_cast<std::uint32_t>(v.size());
    int* h = v.data();
    if (rule_ == UpdateRule::Wall) {
        for (std::uint64_t k = 0; k < count; ++k) {
            const std::uint32_t x = rng_.below(n);
            const std::uint32_t l = x == 0 ? n - 1 : x - 1;
            const std::uint32_t r = x + 1 == n ? 0 : x + 1;
            const int d = h[l] + h[r] - 2 * h[x];
            const int nv = h[x] + d;
            h[x] = nv >= 0 ? nv : h[x];
        }
    } else {
        for (std::uint64_t k = 0; k < count; ++k) {
            const std::uint32_t x = rng_.below(n);
            const std::uint32_t l = x == 0 ? n - 1 : x - 1;
            const std::uint32_t r = x + 1 == n ? 0 : x + 1;
            h[x] = h[l] + h[r] - h[x];
        }
    }
    updates_ += count;
}

void HeightProcess::advance_to(double t) {
    if (t <= time()) return;
    if (schedule_ == ScheduleKind::DiscreteUniformSite) {
        const std::uint64_t target = discrete_steps_for(t, field_.size(), 2.0 / field_.size());
        if (target > steps_) {
            run_updates(target - steps_);
            steps_ = target;
        }
    } else {
        run_updates(rng_.poisson(0.5 * field_.size() * (t - time_)));
        time_ = t;
    }
}

EvolveResult evolve(HeightField h, double t, ScheduleKind schedule, UpdateRule rule, std::uint64_t seed) {
    if (t < 0) throw std::invalid_argument("time must be non-negative");
    HeightProcess p(std::move(h), rule, schedule, seed);
    p.advance_to(t);
    return {p.field(), p.time(), p.updates()};
}

MonotoneCoupling::MonotoneCoupling(HeightField upper, HeightField lower, ScheduleKind schedule, std::uint64_t seed)
    : upper_(std::move(upper)), lower_(std::move(lower)), schedule_(schedule), rng_(seed) {
    if (upper_.size() != lower_.size()) throw std::invalid_argument("coupled fields must share L");
    if (!upper_.walled() && lower_.walled()) {
        throw std::invalid_argument("a free upper field over a walled lower field is not order-preserving");
    }
    if (!ordered()) throw std::invalid_argument("coupling requires lower(x) <= upper(x) initially");
}

double MonotoneCoupling::time() const noexcept {
    if (schedule_ == ScheduleKind::DiscreteUniformSite) return static_cast<double>(steps_) / upper_.size();
    return time_;
}

bool MonotoneCoupling::ordered() const noexcept {
    for (int x = 0; x < upper_.size(); ++x) {
        if (lower_[x] > upper_[x]) return false;
    }
    return true;
}

CoupledResult monotone_coupled_evolve(HeightField xi, HeightField zeta, double t, std::uint64_t seed,
                                      ScheduleKind schedule) {
    if (!xi.walled()) throw std::invalid_argument("xi must be a walled field");
    if (zeta.walled()) throw std::invalid_argument("zeta must be a free field");
    MonotoneCoupling c(std::move(xi), std::move(zeta), schedule, seed);
    c.advance_to(t);
    return {c.upper(), c.lower(), c.time()};
}

SharedSiteCoupling::SharedSiteCoupling(HeightField wall, HeightField free, std::uint64_t seed)
    : wall_(std::move(wall)), free_(std::move(free)), rng_(seed) {
    if (wall_.size() != free_.size()) throw std::invalid_argument("coupled fields must share L");
    if (!wall_.walled() || free_.walled()) throw std::invalid_argument("expects one walled and one free field");
}

double SharedSiteCoupling::time() const noexcept { return 2.0 * static_cast<double>(steps_) / wall_.size(); }

void SharedSiteCoupling::step_at(int x) {
    apply_update(wall_, x, UpdateRule::Wall);
    apply_update(free_, x, UpdateRule::Free);
    ++steps_;
}

void SharedSiteCoupling::advance_to(double t) {
    const int n = wall_.size();
    const std::uint64_t target = discrete_steps_for(t, n, 2.0 / n);
    while (steps_ < target) step_at(static_cast<int>(rng_.below(static_cast<std::uint32_t>(n))));
}

CoupledResult shared_site_coupled_evolve(HeightField xi, HeightField zeta, double t, std::uint64_t seed) {
    SharedSiteCoupling c(std::move(xi), std::move(zeta), seed);
    c.advance_to(t);
    return {c.wall(), c.free(), c.time()};
}

WitnessReport discrepancy_witness(int length, int r, double t, double alpha, std::uint64_t seed,
                                  ScheduleKind schedule) {
    WitnessReport rep;
    const double reach = alpha * t;
    MonotoneCoupling c(HeightField::flat(length, r, true), HeightField::flat(length, r, false), schedule, seed);
    c.advance_to(t, [&](int x, MarkDirection dir, int du, int dl, const HeightField& upper, const HeightField& lower) {
        if (dir != MarkDirection::Down || dl >= 0) return;
        const int cx = centered(x, length);
        const bool inside = std::abs(cx) <= reach;
        if (lower[x] < 0 && inside) rep.lower_touched_window = true;
        // Upper still a local maximum after a down mark: the wall blocked it.
        if (du == 0 && upper.laplacian(x) < 0) {
            ++rep.wall_blocks;
            if (!inside) ++rep.blocks_outside_window;
            rep.leftmost_origin = rep.leftmost_origin ? std::min(*rep.leftmost_origin, cx) : cx;
            rep.rightmost_origin = rep.rightmost_origin ? std::max(*rep.rightmost_origin, cx) : cx;
        }
    });
    rep.differs_at_origin = c.upper()[0] != c.lower()[0];
    rep.inclusion_holds = !rep.differs_at_origin || rep.lower_touched_window || rep.blocks_outside_window > 0;
    return rep;
}

}  // namespace wallsep
