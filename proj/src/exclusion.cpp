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

#include "wallsep/exclusion.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "wallsep/dynamics.hpp"

namespace wallsep {

namespace {

long long floor_div(long long a, long long b) noexcept {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

StirringState::StirringState(int length) : pos_(static_cast<std::size_t>(length)), label_at_(static_cast<std::size_t>(length)) {
    for (int x = 0; x < length; ++x) {
        pos_[static_cast<std::size_t>(x)] = x;
        label_at_[static_cast<std::size_t>(x)] = x;
    }
}

bool StirringState::consistent() const noexcept {
    const int n = size();
    for (int y = 0; y < n; ++y) {
        const int lab = label_at_[static_cast<std::size_t>(y)];
        if (lab < 0 || lab >= n || site_of(lab) != y) return false;
    }
    for (int x = 0; x < n; ++x) {
        if (label_at_[static_cast<std::size_t>(site_of(x))] != x) return false;
    }
    return true;
}

long long StirringState::max_abs_displacement() const noexcept {
    long long m = 0;
    for (int x = 0; x < size(); ++x) m = std::max(m, std::llabs(displacement(x)));
    return m;
}

long long flux_from_stirring(const StirringState& stirring, const OccupationField& eta0) {
    if (stirring.size() != eta0.size()) throw std::invalid_argument("size mismatch");
    const long long n = stirring.size();
    long long j = 0;
    for (int x = 0; x < eta0.size(); ++x) {
        if (eta0[x]) j += floor_div(stirring.position(x), n);
    }
    return j;
}

bool duality_check(const OccupationField& eta0, const OccupationField& eta_t, const StirringState& stirring) {
    if (eta0.size() != eta_t.size() || eta0.size() != stirring.size()) return false;
    if (!stirring.consistent()) return false;
    for (int y = 0; y < eta_t.size(); ++y) {
        if (eta_t[y] != eta0[stirring.label_at(y)]) return false;
    }
    return true;
}

FluxDecomposition flux_decomposition(const StirringState& stirring, const OccupationField& eta0) {
    if (stirring.size() != eta0.size()) throw std::invalid_argument("size mismatch");
    const int n = stirring.size();
    FluxDecomposition d;
    for (int x = 0; x < n; ++x) {
        if (!eta0[x]) continue;
        const long long start = centered(x, n);
        const long long now = start + stirring.displacement(x);
        if (start < 0) {
            d.H += now >= 0;
        } else {
            d.I += now < 0;
            d.H_prime += now < -1;
        }
    }
    return d;
}

OccupationField product_measure_init(int length, double rho, Rng& rng) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("density must lie in (0,1)");
    if (length < 2) throw std::invalid_argument("ring too short");
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(length));
    for (auto& b : bits) b = rng.bernoulli(rho) ? 1 : 0;
    return OccupationField(std::move(bits));
}

OccupationField flat_occupation(int length) { return height_to_occupation(HeightField::flat(length, 0, false)); }

ExclusionProcess::ExclusionProcess(OccupationField initial, std::uint64_t seed, bool track_stirring)
    : initial_(initial), rng_(seed), track_(track_stirring) {
    if (initial_.size() < 2) throw std::invalid_argument("ring too short");
    state_.eta = std::move(initial);
    if (track_) state_.stirring = StirringState(initial_.size());
}

void ExclusionProcess::mark(int x) {
    if (track_) {
        step_exclusion(state_, x);
    } else {
        auto& b = state_.eta.raw();
        const int y = ring_prev(x, state_.eta.size());
        std::swap(b[static_cast<std::size_t>(y)], b[static_cast<std::size_t>(x)]);
        if (x == 0) state_.flux.J += static_cast<int>(b[0]) - static_cast<int>(b[static_cast<std::size_t>(y)]);
    }
    ++marks_;
}

void ExclusionProcess::run_marks(std::uint64_t count) {
    if (track_) {
        const auto n = static_cast<std::uint32_t>(state_.eta.size());
        for (std::uint64_t k = 0; k < count; ++k) step_exclusion(state_, static_cast<int>(rng_.below(n)));
        marks_ += count;
        return;
    }
    // Flux-only kernel: occupations and the crossing counter.
    auto& bits = state_.eta.raw();
    std::uint8_t* b = bits.data();
    const auto n = static_cast<std::uint32_t>(bits.size());
    long long j = state_.flux.J;
    for (std::uint64_t k = 0; k < count; ++k) {
        const std::uint32_t x = rng_.below(n);
        const std::uint32_t y = x == 0 ? n - 1 : x - 1;
        const std::uint8_t left = b[y];
        const std::uint8_t right = b[x];
        b[y] = right;
        b[x] = left;
        j += (x == 0) ? static_cast<int>(left) - static_cast<int>(right) : 0;
    }
    state_.flux.J = j;
    marks_ += count;
}

void ExclusionProcess::advance_to(double t) {
    if (t <= time_) return;
    run_marks(rng_.poisson(0.5 * state_.eta.size() * (t - time_)));
    time_ = t;
}

namespace {

HeightFluxRun finish_run(const HeightField& h0, const HeightField& h, const ExclusionState& s, const OccupationField& eta0) {
    HeightFluxRun out;
    out.height_increment = static_cast<long long>(h[0]) - h0[0];
    out.flux = s.flux.J;
    out.stirring_flux = flux_from_stirring(s.stirring, eta0);
    out.gradient_image_matches = height_to_occupation(h) == s.eta;
    return out;
}

}  // namespace

HeightFluxRun height_flux_identity_run(int length, double t, std::uint64_t seed) {
    if (t < 0) throw std::invalid_argument("time must be non-negative");
    const HeightField h0 = HeightField::flat(length, 0, false);
    HeightField h = h0;
    const OccupationField eta0 = height_to_occupation(h0);
    ExclusionState s{eta0, StirringState(length), {}};
    Rng rng(seed);
    const std::uint64_t count = rng.poisson(0.5 * length * t);
    for (std::uint64_t k = 0; k < count; ++k) {
        const int x = static_cast<int>(rng.below(static_cast<std::uint32_t>(length)));
        apply_update(h, x, UpdateRule::Free);
        step_exclusion(s, x);
    }
    return finish_run(h0, h, s, eta0);
}

HeightFluxRun height_flux_identity_marks(int length, const std::vector<int>& marks) {
    const HeightField h0 = HeightField::flat(length, 0, false);
    HeightField h = h0;
    const OccupationField eta0 = height_to_occupation(h0);
    ExclusionState s{eta0, StirringState(length), {}};
    for (int x : marks) {
        if (x < 0 || x >= length) throw std::out_of_range("mark site outside ring");
        apply_update(h, x, UpdateRule::Free);
        step_exclusion(s, x);
    }
    return finish_run(h0, h, s, eta0);
}

}  // namespace wallsep
