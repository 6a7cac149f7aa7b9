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
#include <vector>

#include "wallsep/lattice.hpp"
#include "wallsep/rng.hpp"

namespace wallsep {

/// Labeled stirring particles on the ring. Label x starts at site x; its
/// position is kept unwrapped, so the integer displacement (including whole
/// windings) is exact.
class StirringState {
public:
    StirringState() = default;
    explicit StirringState(int length);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(label_at_.size()); }
    /// Unwrapped position of label x (the forward map x -> X^x_t).
    [[nodiscard]] long long position(int label) const noexcept { return pos_[static_cast<std::size_t>(label)]; }
    [[nodiscard]] long long displacement(int label) const noexcept { return pos_[static_cast<std::size_t>(label)] - label; }
    [[nodiscard]] int site_of(int label) const noexcept { return ring_wrap(pos_[static_cast<std::size_t>(label)], size()); }
    /// Label currently at site y (the inverse map y -> D^y_t).
    [[nodiscard]] int label_at(int site) const noexcept { return label_at_[static_cast<std::size_t>(site)]; }

    /// Exchanges the labels at sites x-1 and x (periodic).
    void swap_across(int x) noexcept {
        const int n = size();
        const int y = ring_prev(x, n);
        const int a = label_at_[static_cast<std::size_t>(y)];
        const int b = label_at_[static_cast<std::size_t>(x)];
        label_at_[static_cast<std::size_t>(y)] = b;
        label_at_[static_cast<std::size_t>(x)] = a;
        ++pos_[static_cast<std::size_t>(a)];
        --pos_[static_cast<std::size_t>(b)];
    }

    /// forward and inverse are mutually inverse permutations.
    [[nodiscard]] bool consistent() const noexcept;
    [[nodiscard]] long long max_abs_displacement() const noexcept;

    /// Direct access to the inverse table, for fault-injection tests.
    [[nodiscard]] std::vector<int>& inverse_raw() noexcept { return label_at_; }

private:
    std::vector<long long> pos_;
    std::vector<int> label_at_;
};

/// Signed count of particle crossings of the bond (L-1, 0): +1 rightward.
struct FluxCounter {
    long long J = 0;
};

/// H: left-started labels now at or right of 0; I: right-started labels now
/// left of 0; H': right-started labels now left of -1 (centered coordinates).
struct FluxDecomposition {
    long long H = 0;
    long long H_prime = 0;
    long long I = 0;
    [[nodiscard]] long long J() const noexcept { return H - I; }
};

struct ExclusionState {
    OccupationField eta;
    StirringState stirring;
    FluxCounter flux;
};

/// A mark at x exchanges the contents of sites x-1 and x, moves the stirring
/// labels there, and updates the flux counter when x == 0.
inline void step_exclusion(ExclusionState& s, int x) noexcept {
    auto& b = s.eta.raw();
    const int n = s.eta.size();
    const int y = ring_prev(x, n);
    const std::uint8_t left = b[static_cast<std::size_t>(y)];
    const std::uint8_t right = b[static_cast<std::size_t>(x)];
    b[static_cast<std::size_t>(y)] = right;
    b[static_cast<std::size_t>(x)] = left;
    if (x == 0) s.flux.J += static_cast<int>(left) - static_cast<int>(right);
    s.stirring.swap_across(x);
}

/// Flux from final label positions: sum over initially occupied labels of
/// their net number of windings past the distinguished bond.
[[nodiscard]] long long flux_from_stirring(const StirringState& stirring, const OccupationField& eta0);

/// eta_t(y) == eta_0(D^y_t) for all y, and the inverse table is a true inverse.
[[nodiscard]] bool duality_check(const OccupationField& eta0, const OccupationField& eta_t, const StirringState& stirring);

[[nodiscard]] FluxDecomposition flux_decomposition(const StirringState& stirring, const OccupationField& eta0);

/// I.i.d. Bernoulli(rho) occupations (no particle-number constraint).
[[nodiscard]] OccupationField product_measure_init(int length, double rho, Rng& rng);

/// Particles on even sites: the gradient image of the flat interface.
[[nodiscard]] OccupationField flat_occupation(int length);

/// Continuous-time exclusion replica: rate-1/2 marks on every bond.
class ExclusionProcess {
public:
    ExclusionProcess(OccupationField initial, std::uint64_t seed, bool track_stirring = true);

    void advance_to(double t);
    /// Applies one mark at a caller-chosen site.
    void mark(int x);

    [[nodiscard]] const OccupationField& initial() const noexcept { return initial_; }
    [[nodiscard]] const ExclusionState& state() const noexcept { return state_; }
    [[nodiscard]] long long flux() const noexcept { return state_.flux.J; }
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] std::uint64_t marks() const noexcept { return marks_; }
    [[nodiscard]] bool tracks_stirring() const noexcept { return track_; }

private:
    void run_marks(std::uint64_t count);

    OccupationField initial_;
    ExclusionState state_;
    Rng rng_;
    bool track_;
    double time_ = 0.0;
    std::uint64_t marks_ = 0;
};

/// Free interface and exclusion process driven by one mark stream.
struct HeightFluxRun {
    long long height_increment = 0;  // zeta_t(0) - zeta_0(0)
    long long flux = 0;              // J_t from the crossing counter
    long long stirring_flux = 0;     // J_t recomputed from label positions
    bool gradient_image_matches = false;  // eta_t == height_to_occupation(zeta_t)
    /// With particles on up-steps a rightward crossing at the origin lowers
    /// zeta(0) by two.
    [[nodiscard]] bool identity_holds() const noexcept { return height_increment == -2 * flux; }
};

[[nodiscard]] HeightFluxRun height_flux_identity_run(int length, double t, std::uint64_t seed);

/// Same construction with caller-supplied mark sites.
[[nodiscard]] HeightFluxRun height_flux_identity_marks(int length, const std::vector<int>& marks);

}  // namespace wallsep
