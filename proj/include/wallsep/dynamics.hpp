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

#include <cmath>
#include <cstdint>
#include <optional>

#include "wallsep/lattice.hpp"
#include "wallsep/rng.hpp"

namespace wallsep {

/// Wall blocks any flip that would leave a negative height; Free never blocks.
enum class UpdateRule { Wall, Free };

/// Single: one mark stream per site drives both flip directions.
/// UpDown: independent up and down streams per site.
enum class ClockFamily { Single, UpDown };

/// DiscreteUniformSite: one uniformly chosen site per update; each update
/// advances time by 2/L (1/L for the up/down coupling, whose marks are split
/// by a fair coin). ContinuousTime: rate-1/2 Poisson marks at every site.
enum class ScheduleKind { DiscreteUniformSite, ContinuousTime };

enum class MarkDirection { Up, Down };

[[nodiscard]] inline UpdateRule rule_of(const HeightField& h) noexcept { return h.walled() ? UpdateRule::Wall : UpdateRule::Free; }

/// Throws if `rule` disagrees with the field's walled flag.
void require_rule(const HeightField& h, UpdateRule rule);

/// One corner-flip update at site x, in place. Returns the applied height change.
inline int apply_update(HeightField& h, int x, UpdateRule rule) noexcept {
    auto& v = h.raw();
    const int n = h.size();
    const int d = v[ring_next(x, n)] + v[ring_prev(x, n)] - 2 * v[x];
    if (rule == UpdateRule::Wall && v[x] + d < 0) return 0;
    v[x] += d;
    return d;
}

/// Up/down mark at x, in place: an up mark only raises local minima, a down
/// mark only lowers local maxima (subject to the wall for walled rules).
inline int apply_mark(HeightField& h, int x, MarkDirection dir, UpdateRule rule) noexcept {
    auto& v = h.raw();
    const int n = h.size();
    const int d = v[ring_next(x, n)] + v[ring_prev(x, n)] - 2 * v[x];
    if (dir == MarkDirection::Up) {
        if (d > 0) {
            v[x] += d;
            return d;
        }
        return 0;
    }
    if (d < 0 && (rule == UpdateRule::Free || v[x] + d >= 0)) {
        v[x] += d;
        return d;
    }
    return 0;
}

/// Value-returning single update (the discrete-scheme step at a caller-chosen site).
[[nodiscard]] HeightField step_discrete(const HeightField& h, int x, UpdateRule rule);

/// Number of updates the discrete schedule performs to reach time t on a ring of length L.
[[nodiscard]] std::uint64_t discrete_steps_for(double t, int length, double dt_per_step);

/// A single replica of the wall or free process under one schedule.
class HeightProcess {
public:
    HeightProcess(HeightField initial, UpdateRule rule, ScheduleKind schedule, std::uint64_t seed);

    /// Advances to time t (no-op if t is not ahead). Under the discrete
    /// schedule the reached time is the largest multiple of 2/L not above t.
    void advance_to(double t);

    [[nodiscard]] const HeightField& field() const noexcept { return field_; }
    [[nodiscard]] double time() const noexcept;
    [[nodiscard]] std::uint64_t updates() const noexcept { return updates_; }
    [[nodiscard]] UpdateRule rule() const noexcept { return rule_; }
    [[nodiscard]] ScheduleKind schedule() const noexcept { return schedule_; }

private:
    void run_updates(std::uint64_t count);

    HeightField field_;
    UpdateRule rule_;
    ScheduleKind schedule_;
    Rng rng_;
    std::uint64_t updates_ = 0;
    std::uint64_t steps_ = 0;
    double time_ = 0.0;
};

struct EvolveResult {
    HeightField field;
    double time = 0.0;
    std::uint64_t updates = 0;
};

/// Evolves `h` for time t; deterministic in `seed`.
[[nodiscard]] EvolveResult evolve(HeightField h, double t, ScheduleKind schedule, UpdateRule rule, std::uint64_t seed);

/// Per-mark hook for the up/down coupling. The default does nothing.
struct NullMarkObserver {
    void operator()(int /*x*/, MarkDirection /*dir*/, int /*upper_delta*/, int /*lower_delta*/,
                    const HeightField& /*upper*/, const HeightField& /*lower*/) noexcept {}
};

/// Two fields driven by the same up/down marks. With the lower field free (or
/// both fields under the same rule) and lower <= upper initially, the order
/// is preserved at every mark.
class MonotoneCoupling {
public:
    MonotoneCoupling(HeightField upper, HeightField lower, ScheduleKind schedule, std::uint64_t seed);

    template <class Observer = NullMarkObserver>
    void advance_to(double t, Observer&& obs = Observer{});

    [[nodiscard]] const HeightField& upper() const noexcept { return upper_; }
    [[nodiscard]] const HeightField& lower() const noexcept { return lower_; }
    [[nodiscard]] double time() const noexcept;
    [[nodiscard]] std::uint64_t marks() const noexcept { return marks_; }

    /// Exact check of lower(x) <= upper(x) for all x.
    [[nodiscard]] bool ordered() const noexcept;

private:
    HeightField upper_;
    HeightField lower_;
    ScheduleKind schedule_;
    Rng rng_;
    std::uint64_t marks_ = 0;
    std::uint64_t steps_ = 0;
    double time_ = 0.0;
};

struct CoupledResult {
    HeightField upper;
    HeightField lower;
    double time = 0.0;
};

/// Wall field xi and free field zeta under the up/down coupling; rejects
/// inputs with zeta(x) > xi(x) anywhere.
[[nodiscard]] CoupledResult monotone_coupled_evolve(HeightField xi, HeightField zeta, double t, std::uint64_t seed,
                                                    ScheduleKind schedule = ScheduleKind::ContinuousTime);

/// Wall and free fields updated at one shared sequence of uniformly chosen
/// sites (discrete schedule). Not order-preserving.
class SharedSiteCoupling {
public:
    SharedSiteCoupling(HeightField wall, HeightField free, std::uint64_t seed);
    void advance_to(double t);
    /// Applies one update at a caller-chosen site to both fields.
    void step_at(int x);

    [[nodiscard]] const HeightField& wall() const noexcept { return wall_; }
    [[nodiscard]] const HeightField& free() const noexcept { return free_; }
    [[nodiscard]] double time() const noexcept;

private:
    HeightField wall_;
    HeightField free_;
    Rng rng_;
    std::uint64_t steps_ = 0;
};

[[nodiscard]] CoupledResult shared_site_coupled_evolve(HeightField xi, HeightField zeta, double t, std::uint64_t seed);

/// Instrumentation of the wall/free discrepancy under the up/down coupling,
/// both started flat at height r.
struct WitnessReport {
    bool differs_at_origin = false;          // xi_t(0) != zeta_t(0)
    bool lower_touched_window = false;       // zeta < 0 somewhere in [-alpha t, alpha t] at some mark
    std::uint64_t wall_blocks = 0;           // marks where xi was blocked and zeta moved below 0
    std::uint64_t blocks_outside_window = 0;
    std::optional<int> leftmost_origin;      // centered coordinates of blocking sites
    std::optional<int> rightmost_origin;
    bool inclusion_holds = true;             // differs => touched inside or a block happened outside
};

[[nodiscard]] WitnessReport discrepancy_witness(int length, int r, double t, double alpha, std::uint64_t seed,
                                                ScheduleKind schedule = ScheduleKind::ContinuousTime);

// ---------------------------------------------------------------------------

template <class Observer>
void MonotoneCoupling::advance_to(double t, Observer&& obs) {
    if (t <= time()) return;
    const int n = upper_.size();
    const UpdateRule ru = rule_of(upper_);
    const UpdateRule rl = rule_of(lower_);
    auto one_mark = [&](int x, MarkDirection dir) {
        const int du = apply_mark(upper_, x, dir, ru);
        const int dl = apply_mark(lower_, x, dir, rl);
        obs(x, dir, du, dl, upper_, lower_);
    };
    std::uint64_t count = 0;
    if (schedule_ == ScheduleKind::DiscreteUniformSite) {
        const std::uint64_t target = discrete_steps_for(t, n, 1.0 / n);
        count = target > steps_ ? target - steps_ : 0;
        steps_ += count;
        time_ = static_cast<double>(steps_) / n;
    } else {
        count = rng_.poisson(static_cast<double>(n) * (t - time_));
        time_ = t;
    }
    for (std::uint64_t k = 0; k < count; ++k) {
        const int x = static_cast<int>(rng_.below(static_cast<std::uint32_t>(n)));
        one_mark(x, rng_.coin() ? MarkDirection::Up : MarkDirection::Down);
    }
    marks_ += count;
}

}  // namespace wallsep
