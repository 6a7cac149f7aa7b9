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

#include "wallsep/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace wallsep {

namespace {

void require_ring_length(int length) {
    if (length < 4 || length % 2 != 0) {
        throw InvariantError("ring length must be even and at least 4, got " + std::to_string(length));
    }
}

}  // namespace

HeightField HeightField::flat(int length, int offset, bool walled) {
    require_ring_length(length);
    if (offset < 0) throw InvariantError("flat offset must be non-negative");
    if (offset % 2 != 0) throw InvariantError("flat offset must be even to keep h(x) + x even");
    HeightField f;
    f.h_.resize(static_cast<std::size_t>(length));
    for (int x = 0; x < length; ++x) f.h_[static_cast<std::size_t>(x)] = offset + (x & 1);
    f.offset_ = offset;
    f.walled_ = walled;
    return f;
}

HeightField::HeightField(std::vector<int> heights, int offset, bool walled)
    : h_(std::move(heights)), offset_(offset), walled_(walled) {
    require_ring_length(size());
    check_invariants();
}

void HeightField::check_invariants() const {
    const int n = size();
    for (int x = 0; x < n; ++x) {
        const int step = h_[ring_next(x, n)] - h_[x];
        if (step != 1 && step != -1) {
            throw InvariantError("gradient at bond (" + std::to_string(x) + "," + std::to_string(ring_next(x, n)) +
                                 ") is " + std::to_string(step));
        }
        if (((h_[x] + x) & 1) != 0) throw InvariantError("parity broken at site " + std::to_string(x));
        if (walled_ && h_[x] < 0) throw InvariantError("walled field negative at site " + std::to_string(x));
    }
}

bool HeightField::satisfies_invariants() const noexcept {
    try {
        check_invariants();
        return true;
    } catch (const InvariantError&) {
        return false;
    }
}

int HeightField::max_abs() const noexcept {
    int m = 0;
    for (int v : h_) m = std::max(m, std::abs(v));
    return m;
}

OccupationField::OccupationField(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
        if (b > 1) throw InvariantError("occupation values must be 0 or 1");
    }
}

long long OccupationField::particle_count() const noexcept {
    long long c = 0;
    for (auto b : bits_) c += b;
    return c;
}

HeightField new_flat(int length, int offset, bool walled) { return HeightField::flat(length, offset, walled); }

int laplacian(const HeightField& h, int x) {
    if (x < 0 || x >= h.size()) throw std::out_of_range("site outside ring");
    return h.laplacian(x);
}

OccupationField height_to_occupation(const HeightField& h) {
    const int n = h.size();
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) bits[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>((1 + h[ring_next(x, n)] - h[x]) / 2);
    return OccupationField(std::move(bits));
}

HeightField occupation_to_height(const OccupationField& occ, int anchor, bool walled) {
    const int n = occ.size();
    if (2 * occ.particle_count() != n) {
        throw InvariantError("occupation must hold exactly L/2 particles for the ring to close");
    }
    if (anchor % 2 != 0) throw InvariantError("anchor must be even");
    std::vector<int> h(static_cast<std::size_t>(n));
    h[0] = anchor;
    for (int x = 0; x + 1 < n; ++x) h[static_cast<std::size_t>(x) + 1] = h[static_cast<std::size_t>(x)] + 2 * occ[x] - 1;
    return HeightField(std::move(h), anchor, walled);
}

void write_height_field(std::ostream& os, const HeightField& h) {
    os << h.size() << ' ' << h.offset() << ' ' << (h.walled() ? 1 : 0) << '\n';
    for (int x = 0; x < h.size(); ++x) os << (x ? " " : "") << h[x];
    os << '\n';
}

HeightField read_height_field(std::istream& is) {
    int n = 0, r = 0, w = 0;
    if (!(is >> n >> r >> w)) throw InvariantError("malformed height-field header");
    if (n <= 0) throw InvariantError("malformed height-field length");
    std::vector<int> h(static_cast<std::size_t>(n));
    for (auto& v : h) {
        if (!(is >> v)) throw InvariantError("height-field body shorter than L");
    }
    return HeightField(std::move(h), r, w != 0);
}

std::string to_string(const HeightField& h) {
    std::ostringstream os;
    write_height_field(os, h);
    return os.str();
}

}  // namespace wallsep
