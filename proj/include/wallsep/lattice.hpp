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
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wallsep {

/// Thrown when a state or an argument violates a lattice invariant.
class InvariantError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Periodic index helpers for a ring of `n` sites.
[[nodiscard]] inline int ring_prev(int x, int n) noexcept { return x == 0 ? n - 1 : x - 1; }
[[nodiscard]] inline int ring_next(int x, int n) noexcept { return x + 1 == n ? 0 : x + 1; }
[[nodiscard]] inline int ring_wrap(long long x, int n) noexcept {
    long long r = x % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

/// Centered coordinate of a ring site: sites L/2..L-1 are read as -L/2..-1.
[[nodiscard]] inline int centered(int x, int n) noexcept { return x < n / 2 ? x : x - n; }

/// Height change produced by a corner flip at a site, together with the site.
struct SiteDelta {
    int site = 0;
    int delta = 0;  // one of -2, 0, +2
};

/// A nearest-neighbour interface on the ring Z/LZ.
///
/// Neighbouring heights differ by exactly one, heights(x) + x is even, and a
/// walled field never goes below zero. Every mutation goes through `flip`,
/// which moves a single height by its Laplacian, so a field constructed valid
/// stays valid.
class HeightField {
public:
    /// Flat zig-zag at height `offset`: h(x) = offset + (x mod 2).
    static HeightField flat(int length, int offset, bool walled);

    /// Validating constructor; throws InvariantError on any violated invariant.
    HeightField(std::vector<int> heights, int offset, bool walled);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(h_.size()); }
    [[nodiscard]] int offset() const noexcept { return offset_; }
    [[nodiscard]] bool walled() const noexcept { return walled_; }
    [[nodiscard]] std::span<const int> heights() const noexcept { return h_; }
    [[nodiscard]] int operator[](int x) const noexcept { return h_[static_cast<std::size_t>(x)]; }

    /// h(x+1) - 2 h(x) + h(x-1) with periodic wrap.
    [[nodiscard]] int laplacian(int x) const noexcept {
        const int n = size();
        return h_[ring_next(x, n)] - 2 * h_[x] + h_[ring_prev(x, n)];
    }

    /// Adds the Laplacian at x to h(x). Returns the applied delta.
    int flip(int x) noexcept {
        const int d = laplacian(x);
        h_[static_cast<std::size_t>(x)] += d;
        return d;
    }

    /// Raw mutable access for hot kernels that maintain the invariants themselves.
    [[nodiscard]] std::vector<int>& raw() noexcept { return h_; }

    /// Throws InvariantError when any invariant is broken.
    void check_invariants() const;
    [[nodiscard]] bool satisfies_invariants() const noexcept;

    [[nodiscard]] int max_abs() const noexcept;

    friend bool operator==(const HeightField&, const HeightField&) = default;

private:
    HeightField() = default;
    std::vector<int> h_;
    int offset_ = 0;
    bool walled_ = false;
};

/// Exclusion configuration in {0,1}^L.
class OccupationField {
public:
    OccupationField() = default;
    explicit OccupationField(std::vector<std::uint8_t> bits);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(bits_.size()); }
    [[nodiscard]] std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    [[nodiscard]] std::uint8_t operator[](int x) const noexcept { return bits_[static_cast<std::size_t>(x)]; }
    [[nodiscard]] std::vector<std::uint8_t>& raw() noexcept { return bits_; }
    [[nodiscard]] long long particle_count() const noexcept;

    /// Swaps the contents of sites a and b.
    void swap_sites(int a, int b) noexcept { std::swap(bits_[static_cast<std::size_t>(a)], bits_[static_cast<std::size_t>(b)]); }

    friend bool operator==(const OccupationField&, const OccupationField&) = default;

private:
    std::vector<std::uint8_t> bits_;
};

[[nodiscard]] HeightField new_flat(int length, int offset, bool walled);
[[nodiscard]] int laplacian(const HeightField& h, int x);

/// bits(x) = (1 + h(x+1) - h(x)) / 2: a particle on every up-step.
[[nodiscard]] OccupationField height_to_occupation(const HeightField& h);

/// Integrates gradients 2 bits(x) - 1 starting from h(0) = anchor.
[[nodiscard]] HeightField occupation_to_height(const OccupationField& occ, int anchor, bool walled = false);

/// Checkpoint format: a line "L r walled" followed by L integers.
void write_height_field(std::ostream& os, const HeightField& h);
[[nodiscard]] HeightField read_height_field(std::istream& is);
[[nodiscard]] std::string to_string(const HeightField& h);

}  // namespace wallsep
