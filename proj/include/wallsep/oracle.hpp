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
#include <optional>
#include <utility>
#include <vector>

#include "wallsep/dynamics.hpp"
#include "wallsep/lattice.hpp"

namespace wallsep {

/// Thrown when a truncated computation cannot meet its mass tolerance.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Law of the rate-1 symmetric continuous-time walk (rate 1/2 each way) at
/// time t: p(k) = e^{-t} I_k(t) for |k| <= M.
struct WalkPmf {
    double t = 0.0;
    int M = 0;
    std::vector<double> p;  // p[k + M]

    [[nodiscard]] double operator()(int k) const noexcept;
    [[nodiscard]] double mass() const noexcept;
    /// P(X >= k).
    [[nodiscard]] double tail_ge(int k) const noexcept;
    /// Parity-split sums of p(k)^2: {even k, odd k}.
    [[nodiscard]] std::pair<double, double> square_sums() const noexcept;
    [[nodiscard]] double mean_abs() const noexcept;
};

/// Radius holding all but a negligible fraction of the mass at time t.
[[nodiscard]] int walk_radius(double t);

/// Ascending series for t <= 30, normalized backward recurrence beyond.
/// Throws TruncationError when the mass inside M falls short of 1 - 1e-12.
[[nodiscard]] WalkPmf walk_pmf(double t, int M);
[[nodiscard]] WalkPmf walk_pmf(double t);

/// sum_{i>0} [P(X_t >= i) - P(X_t >= i)^2].
[[nodiscard]] double v_term_exact(double t);
/// The same quantity as E X_t^+ - E (Y_t min Z_t)^+ by direct summation.
[[nodiscard]] double v_term_via_minimum(double t);

enum class PairGenerator { U, V };

/// Transient law of a labeled pair on the box [-M, M]^2. U: independent
/// walks. V: stirring pair (adjacent labels may also exchange).
struct PairSemigroup {
    PairGenerator which = PairGenerator::V;
    double t = 0.0;
    int M = 0;
    std::vector<double> prob;  // prob[(i + M) * (2M + 1) + (j + M)]
    double leaked = 0.0;       // mass that left the box

    [[nodiscard]] double at(int i, int j) const noexcept;
    [[nodiscard]] double mass() const noexcept;
    /// P(both coordinates congruent to y mod 2).
    [[nodiscard]] double parity_class(int y) const noexcept;
    [[nodiscard]] double prob_both_nonneg() const noexcept;
    [[nodiscard]] double prob_first_nonneg() const noexcept;
    [[nodiscard]] double prob_second_nonneg() const noexcept;
};

/// Throws TruncationError when the leaked mass exceeds `tol`.
[[nodiscard]] PairSemigroup pair_distribution(int i, int j, double t, int M, PairGenerator which, double tol = 1e-8);

/// Function side: values of (S_t f)(i, j) for f = 1{i >= 0, j >= 0} on
/// |i|, |j| <= R. Entries with i == j are meaningful for U only.
struct PairFunction {
    int R = 0;
    std::vector<double> value;  // value[(i + R) * (2R + 1) + (j + R)]
    [[nodiscard]] double at(int i, int j) const noexcept;
};

[[nodiscard]] PairFunction pair_orthant_function(double t, int R, PairGenerator which);

/// Var J_t for the flat start as V_t + E_t, with E_t from the time integral
/// of squared walk probabilities against the parity law of the pair
/// (X^0, X^1). The integral is refined until successive values agree to
/// `rel_tol`.
struct FluxVarianceResult {
    double variance = 0.0;
    double v_term = 0.0;
    double e_term = 0.0;
    int nodes = 0;
    double leaked = 0.0;
};
[[nodiscard]] FluxVarianceResult flux_variance_exact(double t, double rel_tol = 1e-7);

/// Same quantity from pair covariances over even labels |i|, |j| <= R.
[[nodiscard]] double flux_variance_direct(double t, int R = -1);

/// E J_t for the flat start (labels on even sites).
[[nodiscard]] double flux_mean_exact(double t);

/// Var J_t from an i.i.d. Bernoulli(rho) start: rho (1 - rho) E|X_t|.
[[nodiscard]] double product_flux_variance_exact(double t, double rho);

/// P(X^0_s, X^1_s both congruent to p mod 2) for p = 0, 1, from the chain on
/// (X^0 mod 2, X^1 - X^0).
class PairParityChain {
public:
    explicit PairParityChain(int max_gap);
    /// Advances the law by time ds.
    void advance(double ds);
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] std::pair<double, double> parity_probs() const noexcept;
    [[nodiscard]] double leaked() const noexcept { return leaked_; }
    [[nodiscard]] int max_gap() const noexcept { return D_; }

private:
    [[nodiscard]] int index(int parity, int gap) const noexcept;
    int D_;
    std::vector<double> p_;
    double time_ = 0.0;
    double leaked_ = 0.0;
};

/// Sparse finite chain: out[s] lists (target, rate) for a CTMC or
/// (target, probability) for a DTMC. A negative target denotes an absorbing
/// leak outside the enumerated space.
struct SparseChain {
    std::vector<std::vector<std::pair<int, double>>> out;
    [[nodiscard]] std::size_t size() const noexcept { return out.size(); }
};

/// p0 exp(tQ) by uniformization; returns the law and adds leaked mass to *leaked.
[[nodiscard]] std::vector<double> ctmc_transient(const SparseChain& chain, std::vector<double> p0, double t,
                                                 double* leaked = nullptr);
/// p0 P^steps.
[[nodiscard]] std::vector<double> dtmc_power(const SparseChain& chain, std::vector<double> p0, std::uint64_t steps,
                                             double* leaked = nullptr);

/// Exact flux-augmented exclusion law on a small ring (rate-1/2 marks per bond).
struct ExactRing {
    int L = 0;
    double t = 0.0;
    int J_max = 0;
    std::vector<double> site_marginal;  // P(eta_t(x) = 1)
    std::vector<double> flux_pmf;       // flux_pmf[J + J_max]
    double mean_J = 0.0;
    double var_J = 0.0;
    double leaked = 0.0;
};

/// Throws TruncationError when the leak past J_max exceeds 1e-8.
[[nodiscard]] ExactRing exact_ring_transient(int L, double t, int J_max, const std::optional<OccupationField>& initial = std::nullopt);

/// Exact law of a wall or free field on a small ring, with heights bounded
/// by `h_max` in absolute value (excess mass is reported as leaked).
struct ExactHeightLaw {
    std::vector<HeightField> states;
    std::vector<double> prob;
    double leaked = 0.0;
    /// Law of h(x): pairs (value, probability) sorted by value.
    [[nodiscard]] std::vector<std::pair<int, double>> marginal(int x) const;
    [[nodiscard]] double expect(const std::function<double(const HeightField&)>& f) const;
};

/// ContinuousTime: rate-1/2 flips per site. DiscreteUniformSite: floor(t L / 2)
/// uniform-site updates.
[[nodiscard]] ExactHeightLaw exact_height_law(const HeightField& initial, double t, ScheduleKind schedule, int h_max = 40);

/// Shortest site sequence (length <= max_len) after which the shared-site
/// coupling started from two flat fields has free(x) > wall(x) somewhere.
[[nodiscard]] std::optional<std::vector<int>> shared_site_order_violation(int L, int max_len);

}  // namespace wallsep
