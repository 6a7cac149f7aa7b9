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

#include "wallsep/oracle.hpp"

#include "wallsep/exclusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace wallsep {

namespace {

constexpr double kMassTol = 1e-12;

// Poisson(mean) weights for n = 0..N, stopping once the remaining tail is
// below 1e-17 (and never before the mean plus a few deviations).
std::vector<double> poisson_weights(double mean) {
    if (mean <= 0) return {1.0};
    const auto n_hard = static_cast<std::size_t>(std::ceil(mean + 14.0 * std::sqrt(mean) + 40.0));
    const auto n_soft = static_cast<std::size_t>(std::ceil(mean + 3.0 * std::sqrt(mean)));
    std::vector<double> w;
    w.reserve(n_hard + 1);
    const double lm = std::log(mean);
    long double cum = 0;
    for (std::size_t n = 0; n <= n_hard; ++n) {
        w.push_back(std::exp(-mean + static_cast<double>(n) * lm - std::lgamma(static_cast<double>(n) + 1.0)));
        cum += w.back();
        if (n >= n_soft && 1.0L - cum < 1e-17L) break;
    }
    return w;
}

// e^{-t} I_k(t) for k = 0..M by the ascending series.
std::vector<double> bessel_series(double t, int M) {
    std::vector<double> r(static_cast<std::size_t>(M) + 1, 0.0);
    const double half = 0.5 * t;
    const double q = half * half;
    for (int k = 0; k <= M; ++k) {
        double term = std::exp(k * std::log(half) - std::lgamma(k + 1.0) - t);
        if (term == 0.0) break;
        double sum = 0.0;
        for (int m = 0;; ++m) {
            sum += term;
            term *= q / ((m + 1.0) * (m + k + 1.0));
            if (term < 1e-17 * sum) break;
        }
        r[static_cast<std::size_t>(k)] = sum;
    }
    return r;
}

// Backward recurrence I_{k-1} = I_{k+1} + (2k/t) I_k from a far start,
// normalized by I_0 + 2 sum_{k>0} I_k = e^t.
std::vector<double> bessel_miller(double t, int M) {
    const int K = std::max(M, static_cast<int>(std::ceil(t + 12.0 * std::sqrt(t) + 40.0))) + 1;
    std::vector<double> r(static_cast<std::size_t>(K) + 2, 0.0);
    r[static_cast<std::size_t>(K)] = 1e-300;
    for (int k = K; k >= 1; --k) {
        const auto ku = static_cast<std::size_t>(k);
        r[ku - 1] = r[ku + 1] + (2.0 * k / t) * r[ku];
        if (r[ku - 1] > 1e250) {
            for (std::size_t j = ku - 1; j <= static_cast<std::size_t>(K); ++j) r[j] *= 1e-250;
        }
    }
    long double norm = r[0];
    for (int k = 1; k <= K; ++k) norm += 2.0L * r[static_cast<std::size_t>(k)];
    std::vector<double> out(static_cast<std::size_t>(M) + 1);
    for (int k = 0; k <= M; ++k) out[static_cast<std::size_t>(k)] = static_cast<double>(r[static_cast<std::size_t>(k)] / norm);
    return out;
}

}  // namespace

double WalkPmf::operator()(int k) const noexcept {
    if (k < -M || k > M) return 0.0;
    return p[static_cast<std::size_t>(k + M)];
}

double WalkPmf::mass() const noexcept {
    long double s = 0;
    for (double v : p) s += v;
    return static_cast<double>(s);
}

double WalkPmf::tail_ge(int k) const noexcept {
    if (k > M) return 0.0;
    long double s = 0;
    for (int j = std::max(k, -M); j <= M; ++j) s += p[static_cast<std::size_t>(j + M)];
    return static_cast<double>(s);
}

std::pair<double, double> WalkPmf::square_sums() const noexcept {
    long double e = 0, o = 0;
    for (int k = -M; k <= M; ++k) {
        const long double v = p[static_cast<std::size_t>(k + M)];
        ((k % 2 == 0) ? e : o) += v * v;
    }
    return {static_cast<double>(e), static_cast<double>(o)};
}

double WalkPmf::mean_abs() const noexcept {
    long double s = 0;
    for (int k = -M; k <= M; ++k) s += std::abs(k) * static_cast<long double>(p[static_cast<std::size_t>(k + M)]);
    return static_cast<double>(s);
}

int walk_radius(double t) { return static_cast<int>(std::ceil(12.0 * std::sqrt(std::max(t, 0.0)) + 30.0)); }

WalkPmf walk_pmf(double t, int M) {
    if (!(t >= 0)) throw std::invalid_argument("walk_pmf: t must be non-negative");
    if (M < 0) throw std::invalid_argument("walk_pmf: negative radius");
    WalkPmf w;
    w.t = t;
    w.M = M;
    w.p.assign(2 * static_cast<std::size_t>(M) + 1, 0.0);
    if (t == 0.0) {
        w.p[static_cast<std::size_t>(M)] = 1.0;
        return w;
    }
    const std::vector<double> r = t <= 30.0 ? bessel_series(t, M) : bessel_miller(t, M);
    for (int k = 0; k <= M; ++k) {
        w.p[static_cast<std::size_t>(M + k)] = r[static_cast<std::size_t>(k)];
        w.p[static_cast<std::size_t>(M - k)] = r[static_cast<std::size_t>(k)];
    }
    if (w.mass() < 1.0 - kMassTol) throw TruncationError("walk_pmf: radius too small for the mass target");
    return w;
}

WalkPmf walk_pmf(double t) { return walk_pmf(t, walk_radius(t)); }

double v_term_exact(double t) {
    const WalkPmf w = walk_pmf(t);
    long double s = 0, tail = 0;
    for (int i = w.M; i >= 1; --i) {
        tail += w(i);
        s += tail - tail * tail;
    }
    return static_cast<double>(s);
}

double v_term_via_minimum(double t) {
    const WalkPmf w = walk_pmf(t);
    long double ex = 0;
    for (int k = 1; k <= w.M; ++k) ex += k * static_cast<long double>(w(k));
    long double emin = 0;
    for (int y = 1; y <= w.M; ++y) {
        for (int z = 1; z <= w.M; ++z) emin += std::min(y, z) * static_cast<long double>(w(y)) * w(z);
    }
    return static_cast<double>(ex - emin);
}

// ---------------------------------------------------------------------------
// Pair semigroups.

namespace {

// Moves of the pair (i, j) with rates 1/2 each. For V, adjacent labels swap
// instead of moving onto each other.
template <class F>
void pair_moves(int i, int j, PairGenerator which, F&& emit) {
    if (which == PairGenerator::U) {
        emit(i + 1, j);
        emit(i - 1, j);
        emit(i, j + 1);
        emit(i, j - 1);
        return;
    }
    const int d = j - i;
    if (d == 1) {
        emit(i - 1, j);
        emit(i, j + 1);
        emit(j, i);
    } else if (d == -1) {
        emit(i + 1, j);
        emit(i, j - 1);
        emit(j, i);
    } else {
        emit(i + 1, j);
        emit(i - 1, j);
        emit(i, j + 1);
        emit(i, j - 1);
    }
}

constexpr double kPairLambda = 2.0;

}  // namespace

double PairSemigroup::at(int i, int j) const noexcept {
    if (std::abs(i) > M || std::abs(j) > M) return 0.0;
    const int n = 2 * M + 1;
    return prob[static_cast<std::size_t>((i + M) * n + (j + M))];
}

double PairSemigroup::mass() const noexcept {
    long double s = 0;
    for (double v : prob) s += v;
    return static_cast<double>(s);
}

namespace {

template <class Pred>
double pair_sum(const PairSemigroup& ps, Pred&& pred) {
    long double s = 0;
    for (int i = -ps.M; i <= ps.M; ++i) {
        for (int j = -ps.M; j <= ps.M; ++j) {
            if (pred(i, j)) s += ps.at(i, j);
        }
    }
    return static_cast<double>(s);
}

int mod2(int x) { return ((x % 2) + 2) % 2; }

}  // namespace

double PairSemigroup::parity_class(int y) const noexcept {
    const int p = mod2(y);
    return pair_sum(*this, [p](int i, int j) { return mod2(i) == p && mod2(j) == p; });
}

double PairSemigroup::prob_both_nonneg() const noexcept {
    return pair_sum(*this, [](int i, int j) { return i >= 0 && j >= 0; });
}

double PairSemigroup::prob_first_nonneg() const noexcept {
    return pair_sum(*this, [](int i, int) { return i >= 0; });
}

double PairSemigroup::prob_second_nonneg() const noexcept {
    return pair_sum(*this, [](int, int j) { return j >= 0; });
}

PairSemigroup pair_distribution(int i, int j, double t, int M, PairGenerator which, double tol) {
    if (!(t >= 0)) throw std::invalid_argument("pair_distribution: t must be non-negative");
    if (M < 1 || std::abs(i) > M || std::abs(j) > M) throw std::invalid_argument("pair_distribution: start outside box");
    if (which == PairGenerator::V && i == j) throw std::invalid_argument("pair_distribution: stirring labels must differ");
    const int n = 2 * M + 1;
    const auto idx = [n, M](int a, int b) { return static_cast<std::size_t>((a + M) * n + (b + M)); };
    std::vector<double> cur(static_cast<std::size_t>(n) * n, 0.0), next(cur.size()), acc(cur.size(), 0.0);
    cur[idx(i, j)] = 1.0;
    const std::vector<double> w = poisson_weights(kPairLambda * t);
    long double leak_step = 0;  // mass lost from the uniformized chain, weighted
    double lost = 0.0;          // cumulative loss of cur so far
    long double leaked = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        for (std::size_t s = 0; s < cur.size(); ++s) acc[s] += w[k] * cur[s];
        leaked += w[k] * lost;
        if (k + 1 == w.size()) break;
        std::fill(next.begin(), next.end(), 0.0);
        leak_step = 0;
        for (int a = -M; a <= M; ++a) {
            for (int b = -M; b <= M; ++b) {
                const double v = cur[idx(a, b)];
                if (v == 0.0) continue;
                double stay = v;
                pair_moves(a, b, which, [&](int a2, int b2) {
                    const double m = v * (0.5 / kPairLambda);
                    stay -= m;
                    if (std::abs(a2) > M || std::abs(b2) > M) {
                        leak_step += m;
                    } else {
                        next[idx(a2, b2)] += m;
                    }
                });
                next[idx(a, b)] += stay;
            }
        }
        lost += static_cast<double>(leak_step);
        cur.swap(next);
    }
    PairSemigroup out;
    out.which = which;
    out.t = t;
    out.M = M;
    out.prob = std::move(acc);
    out.leaked = std::max(static_cast<double>(leaked), 1.0 - out.mass());
    if (out.leaked > tol) throw TruncationError("pair_distribution: mass leaked past the box");
    return out;
}

double PairFunction::at(int i, int j) const noexcept {
    const int n = 2 * R + 1;
    return value[static_cast<std::size_t>((i + R) * n + (j + R))];
}

PairFunction pair_orthant_function(double t, int R, PairGenerator which) {
    if (!(t >= 0)) throw std::invalid_argument("pair_orthant_function: t must be non-negative");
    if (R < 0) throw std::invalid_argument("pair_orthant_function: negative radius");
    const std::vector<double> w = poisson_weights(kPairLambda * t);
    // Reads outside the box are clamped; their influence moves inward one
    // site per step, so the central region of radius R stays exact.
    const int M = R + static_cast<int>(w.size()) + 1;
    const int n = 2 * M + 1;
    const auto idx = [n, M](int a, int b) { return static_cast<std::size_t>((a + M) * n + (b + M)); };
    const auto clamp = [M](int a) { return std::clamp(a, -M, M); };
    std::vector<double> g(static_cast<std::size_t>(n) * n), nxt(g.size()), acc(g.size(), 0.0);
    for (int a = -M; a <= M; ++a) {
        for (int b = -M; b <= M; ++b) g[idx(a, b)] = (a >= 0 && b >= 0) ? 1.0 : 0.0;
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
        for (std::size_t s = 0; s < g.size(); ++s) acc[s] += w[k] * g[s];
        if (k + 1 == w.size()) break;
        for (int a = -M; a <= M; ++a) {
            for (int b = -M; b <= M; ++b) {
                const double v = g[idx(a, b)];
                if (which == PairGenerator::V && a == b) {
                    nxt[idx(a, b)] = v;
                    continue;
                }
                double sum = 0.0;
                int moves = 0;
                pair_moves(a, b, which, [&](int a2, int b2) {
                    sum += g[idx(clamp(a2), clamp(b2))];
                    ++moves;
                });
                nxt[idx(a, b)] = v + (0.5 / kPairLambda) * (sum - moves * v);
            }
        }
        g.swap(nxt);
    }
    PairFunction out;
    out.R = R;
    const int m = 2 * R + 1;
    out.value.resize(static_cast<std::size_t>(m) * m);
    for (int a = -R; a <= R; ++a) {
        for (int b = -R; b <= R; ++b) out.value[static_cast<std::size_t>((a + R) * m + (b + R))] = acc[idx(a, b)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flux moments.

namespace {

// a(x) = P(x + X_t >= 0).
double orthant_marginal(const WalkPmf& w, int x) { return w.tail_ge(-x); }

}  // namespace

double flux_variance_direct(double t, int R) {
    if (!(t >= 0)) throw std::invalid_argument("flux_variance_direct: t must be non-negative");
    if (t == 0) return 0.0;
    if (R < 0) R = static_cast<int>(std::ceil(8.0 * std::sqrt(t))) + 24;
    const WalkPmf w = walk_pmf(t, std::max(walk_radius(t), R + 1));
    const PairFunction vf = pair_orthant_function(t, R, PairGenerator::V);
    const int lo = -R + mod2(R);  // even labels only
    long double cov = 0;
    for (int x = lo; x <= R; x += 2) {
        for (int y = lo; y <= R; y += 2) {
            if (x == y) continue;
            cov += vf.at(x, y) - orthant_marginal(w, x) * orthant_marginal(w, y);
        }
    }
    return v_term_exact(t) + static_cast<double>(cov);
}

double flux_mean_exact(double t) {
    if (!(t >= 0)) throw std::invalid_argument("flux_mean_exact: t must be non-negative");
    const WalkPmf w = walk_pmf(t);
    const int lim = w.M + 2;
    long double s = 0;
    for (int i = -lim - mod2(lim); i <= lim; i += 2) {
        if (i < 0) {
            s += orthant_marginal(w, i);
        } else {
            s -= 1.0 - orthant_marginal(w, i);
        }
    }
    return static_cast<double>(s);
}

double product_flux_variance_exact(double t, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("density must lie in [0,1]");
    return rho * (1.0 - rho) * walk_pmf(t).mean_abs();
}

PairParityChain::PairParityChain(int max_gap) : D_(max_gap), p_(2 * (2 * static_cast<std::size_t>(max_gap) + 1), 0.0) {
    if (max_gap < 2) throw std::invalid_argument("PairParityChain: gap bound too small");
    p_[static_cast<std::size_t>(index(0, 1))] = 1.0;
}

int PairParityChain::index(int parity, int gap) const noexcept { return parity * (2 * D_ + 1) + gap + D_; }

void PairParityChain::advance(double ds) {
    if (!(ds >= 0)) throw std::invalid_argument("PairParityChain: negative time step");
    if (ds == 0) return;
    const std::vector<double> w = poisson_weights(kPairLambda * ds);
    std::vector<double> cur = p_, nxt(p_.size()), acc(p_.size(), 0.0);
    constexpr double m = 0.5 / kPairLambda;
    for (std::size_t k = 0; k < w.size(); ++k) {
        for (std::size_t s = 0; s < cur.size(); ++s) acc[s] += w[k] * cur[s];
        if (k + 1 == w.size()) break;
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int par = 0; par < 2; ++par) {
            for (int d = -D_; d <= D_; ++d) {
                if (d == 0) continue;
                const double v = cur[static_cast<std::size_t>(index(par, d))];
                if (v == 0.0) continue;
                double stay = v;
                const auto put = [&](int par2, int d2) {
                    stay -= v * m;
                    if (std::abs(d2) <= D_) nxt[static_cast<std::size_t>(index(par2, d2))] += v * m;
                };
                put(1 - par, d == -1 ? 1 : d + 1);   // X^0 steps left
                put(1 - par, d == 1 ? -1 : d - 1);   // X^0 steps right
                if (d != -1) put(par, d + 1);        // X^1 steps right
                if (d != 1) put(par, d - 1);         // X^1 steps left
                nxt[static_cast<std::size_t>(index(par, d))] += stay;
            }
        }
        cur.swap(nxt);
    }
    long double before = 0, after = 0;
    for (double v : p_) before += v;
    for (double v : acc) after += v;
    leaked_ += static_cast<double>(std::max(0.0L, before - after));
    p_ = std::move(acc);
    time_ += ds;
}

std::pair<double, double> PairParityChain::parity_probs() const noexcept {
    long double e = 0, o = 0;
    for (int d = -D_; d <= D_; d += 1) {
        if (d == 0 || mod2(d) != 0) continue;
        e += p_[static_cast<std::size_t>(index(0, d))];
        o += p_[static_cast<std::size_t>(index(1, d))];
    }
    return {static_cast<double>(e), static_cast<double>(o)};
}

namespace {

struct QuadratureValue {
    double e_term = 0.0;
    double leaked = 0.0;
};

// E_t = -int_0^t [S_e(t-s) q_e(s) + S_o(t-s) q_o(s)] ds with s = t (1 - cos(pi v)) / 2
// and the trapezoid rule in v on N intervals.
QuadratureValue e_term_quadrature(double t, int N) {
    const int D = static_cast<int>(std::ceil(8.0 * std::sqrt(2.0 * t) + 60.0));
    PairParityChain chain(D);
    long double sum = 0;
    for (int k = 0; k <= N; ++k) {
        const double v = static_cast<double>(k) / N;
        const double s = k == N ? t : 0.5 * t * (1.0 - std::cos(std::numbers::pi * v));
        chain.advance(std::max(0.0, s - chain.time()));
        const double jac = 0.5 * std::numbers::pi * t * std::sin(std::numbers::pi * v);
        if (jac == 0.0) continue;
        const auto [qe, qo] = chain.parity_probs();
        const auto [se, so] = walk_pmf(std::max(0.0, t - s)).square_sums();
        sum += (se * qe + so * qo) * jac;
    }
    return {-static_cast<double>(sum) / N, chain.leaked()};
}

}  // namespace

FluxVarianceResult flux_variance_exact(double t, double rel_tol) {
    if (!(t >= 0)) throw std::invalid_argument("flux_variance_exact: t must be non-negative");
    FluxVarianceResult r;
    if (t == 0) return r;
    r.v_term = v_term_exact(t);
    // Romberg table over trapezoid levels N = 16 * 2^k.
    std::vector<std::vector<double>> table;
    int N = 16;
    double leaked = 0.0;
    for (int k = 0;; ++k, N *= 2) {
        const QuadratureValue q = e_term_quadrature(t, N);
        leaked = q.leaked;
        std::vector<double> row{q.e_term};
        double f = 1.0;
        for (int j = 1; j <= k; ++j) {
            f *= 4.0;
            row.push_back(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / (f - 1.0));
        }
        table.push_back(std::move(row));
        if (k >= 2 && std::abs(table[k][k] - table[k - 1][k - 1]) <= rel_tol * std::abs(table[k][k])) break;
        if (N >= (1 << 15)) throw TruncationError("flux_variance_exact: quadrature did not converge");
    }
    if (leaked > 1e-8) throw TruncationError("flux_variance_exact: pair chain leaked mass");
    r.e_term = table.back().back();
    r.leaked = leaked;
    r.nodes = N + 1;
    r.variance = r.v_term + r.e_term;
    return r;
}

// ---------------------------------------------------------------------------
// Generic finite chains.

namespace {

double exit_rate(const std::vector<std::pair<int, double>>& row) {
    double s = 0;
    for (const auto& [to, r] : row) s += r;
    return s;
}

}  // namespace

std::vector<double> ctmc_transient(const SparseChain& chain, std::vector<double> p0, double t, double* leaked) {
    if (p0.size() != chain.size()) throw std::invalid_argument("ctmc_transient: size mismatch");
    if (!(t >= 0)) throw std::invalid_argument("ctmc_transient: t must be non-negative");
    double lambda = 0;
    for (const auto& row : chain.out) lambda = std::max(lambda, exit_rate(row));
    if (lambda == 0 || t == 0) return p0;
    const std::vector<double> w = poisson_weights(lambda * t);
    std::vector<double> cur = std::move(p0), nxt(cur.size()), acc(cur.size(), 0.0);
    long double initial = 0;
    for (double v : cur) initial += v;
    for (std::size_t k = 0; k < w.size(); ++k) {
        for (std::size_t s = 0; s < cur.size(); ++s) acc[s] += w[k] * cur[s];
        if (k + 1 == w.size()) break;
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::size_t s = 0; s < cur.size(); ++s) {
            const double v = cur[s];
            if (v == 0.0) continue;
            double stay = v;
            for (const auto& [to, r] : chain.out[s]) {
                const double m = v * r / lambda;
                stay -= m;
                if (to >= 0) nxt[static_cast<std::size_t>(to)] += m;
            }
            nxt[s] += stay;
        }
        cur.swap(nxt);
    }
    if (leaked) {
        long double s = 0;
        for (double v : acc) s += v;
        *leaked += static_cast<double>(std::max(0.0L, initial - s));
    }
    return acc;
}

std::vector<double> dtmc_power(const SparseChain& chain, std::vector<double> p0, std::uint64_t steps, double* leaked) {
    if (p0.size() != chain.size()) throw std::invalid_argument("dtmc_power: size mismatch");
    std::vector<double> cur = std::move(p0), nxt(cur.size());
    long double initial = 0;
    for (double v : cur) initial += v;
    for (std::uint64_t k = 0; k < steps; ++k) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (std::size_t s = 0; s < cur.size(); ++s) {
            const double v = cur[s];
            if (v == 0.0) continue;
            double stay = v;
            for (const auto& [to, pr] : chain.out[s]) {
                stay -= v * pr;
                if (to >= 0) nxt[static_cast<std::size_t>(to)] += v * pr;
            }
            nxt[s] += stay;
        }
        cur.swap(nxt);
    }
    if (leaked) {
        long double s = 0;
        for (double v : cur) s += v;
        *leaked += static_cast<double>(std::max(0.0L, initial - s));
    }
    return cur;
}

ExactRing exact_ring_transient(int L, double t, int J_max, const std::optional<OccupationField>& initial) {
    if (L < 2 || L > 12 || L % 2 != 0) throw std::invalid_argument("exact_ring_transient: need even L in [2, 12]");
    if (J_max < 1) throw std::invalid_argument("exact_ring_transient: J_max must be positive");
    const OccupationField eta0 = initial ? *initial : flat_occupation(L);
    if (eta0.size() != L) throw std::invalid_argument("exact_ring_transient: initial length mismatch");
    unsigned mask0 = 0;
    for (int x = 0; x < L; ++x) mask0 |= static_cast<unsigned>(eta0[x]) << x;
    const int k = std::popcount(mask0);
    std::vector<unsigned> confs;
    std::vector<int> conf_index(1u << L, -1);
    for (unsigned m = 0; m < (1u << L); ++m) {
        if (std::popcount(m) == k) {
            conf_index[m] = static_cast<int>(confs.size());
            confs.push_back(m);
        }
    }
    const int span = 2 * J_max + 1;
    SparseChain chain;
    chain.out.resize(confs.size() * static_cast<std::size_t>(span));
    for (std::size_t c = 0; c < confs.size(); ++c) {
        const unsigned m = confs[c];
        for (int J = -J_max; J <= J_max; ++J) {
            auto& row = chain.out[c * span + static_cast<std::size_t>(J + J_max)];
            for (int x = 0; x < L; ++x) {
                const int y = ring_prev(x, L);
                const unsigned bx = (m >> x) & 1u;
                const unsigned by = (m >> y) & 1u;
                if (bx == by) continue;
                const unsigned m2 = m ^ (1u << x) ^ (1u << y);
                const int J2 = x == 0 ? J + static_cast<int>(by) - static_cast<int>(bx) : J;
                if (std::abs(J2) > J_max) {
                    row.emplace_back(-1, 0.5);
                } else {
                    row.emplace_back(conf_index[m2] * span + (J2 + J_max), 0.5);
                }
            }
        }
    }
    std::vector<double> p0(chain.size(), 0.0);
    p0[static_cast<std::size_t>(conf_index[mask0] * span + J_max)] = 1.0;
    ExactRing r;
    r.L = L;
    r.t = t;
    r.J_max = J_max;
    const std::vector<double> pt = ctmc_transient(chain, std::move(p0), t, &r.leaked);
    if (r.leaked > 1e-8) throw TruncationError("exact_ring_transient: flux range too small");
    r.site_marginal.assign(static_cast<std::size_t>(L), 0.0);
    r.flux_pmf.assign(static_cast<std::size_t>(span), 0.0);
    for (std::size_t c = 0; c < confs.size(); ++c) {
        for (int j = 0; j < span; ++j) {
            const double v = pt[c * span + static_cast<std::size_t>(j)];
            r.flux_pmf[static_cast<std::size_t>(j)] += v;
            for (int x = 0; x < L; ++x) {
                if ((confs[c] >> x) & 1u) r.site_marginal[static_cast<std::size_t>(x)] += v;
            }
        }
    }
    long double m1 = 0, m2 = 0;
    for (int J = -J_max; J <= J_max; ++J) {
        m1 += J * static_cast<long double>(r.flux_pmf[static_cast<std::size_t>(J + J_max)]);
        m2 += static_cast<long double>(J) * J * r.flux_pmf[static_cast<std::size_t>(J + J_max)];
    }
    r.mean_J = static_cast<double>(m1);
    r.var_J = static_cast<double>(m2 - m1 * m1);
    return r;
}

std::vector<std::pair<int, double>> ExactHeightLaw::marginal(int x) const {
    std::map<int, double> acc;
    for (std::size_t s = 0; s < states.size(); ++s) acc[states[s][x]] += prob[s];
    return {acc.begin(), acc.end()};
}

double ExactHeightLaw::expect(const std::function<double(const HeightField&)>& f) const {
    long double s = 0;
    for (std::size_t i = 0; i < states.size(); ++i) s += prob[i] * f(states[i]);
    return static_cast<double>(s);
}

ExactHeightLaw exact_height_law(const HeightField& initial, double t, ScheduleKind schedule, int h_max) {
    initial.check_invariants();
    if (initial.max_abs() > h_max) throw std::invalid_argument("exact_height_law: initial field exceeds the height bound");
    const int L = initial.size();
    const UpdateRule rule = rule_of(initial);
    std::map<std::vector<int>, int> index;
    ExactHeightLaw law;
    SparseChain chain;
    std::queue<int> todo;
    const auto intern = [&](const HeightField& h) {
        std::vector<int> key(h.heights().begin(), h.heights().end());
        auto [it, fresh] = index.emplace(std::move(key), static_cast<int>(law.states.size()));
        if (fresh) {
            law.states.push_back(h);
            chain.out.emplace_back();
            todo.push(it->second);
        }
        return it->second;
    };
    intern(initial);
    const double weight = schedule == ScheduleKind::ContinuousTime ? 0.5 : 1.0 / L;
    while (!todo.empty()) {
        const int s = todo.front();
        todo.pop();
        for (int x = 0; x < L; ++x) {
            HeightField h = law.states[static_cast<std::size_t>(s)];
            if (apply_update(h, x, rule) == 0) continue;
            if (h.max_abs() > h_max) {
                chain.out[static_cast<std::size_t>(s)].emplace_back(-1, weight);
                continue;
            }
            const int to = intern(h);
            chain.out[static_cast<std::size_t>(s)].emplace_back(to, weight);
        }
    }
    std::vector<double> p0(chain.size(), 0.0);
    p0[0] = 1.0;
    if (schedule == ScheduleKind::ContinuousTime) {
        law.prob = ctmc_transient(chain, std::move(p0), t, &law.leaked);
    } else {
        law.prob = dtmc_power(chain, std::move(p0), discrete_steps_for(t, L, 2.0 / L), &law.leaked);
    }
    return law;
}

std::optional<std::vector<int>> shared_site_order_violation(int L, int max_len) {
    if (max_len < 0) throw std::invalid_argument("negative sequence length");
    const HeightField wall0 = HeightField::flat(L, 0, true);
    const HeightField free0 = HeightField::flat(L, 0, false);
    for (int len = 1; len <= max_len; ++len) {
        std::vector<int> seq(static_cast<std::size_t>(len), 0);
        for (;;) {
            HeightField w = wall0;
            HeightField f = free0;
            for (int x : seq) {
                apply_update(w, x, UpdateRule::Wall);
                apply_update(f, x, UpdateRule::Free);
            }
            for (int x = 0; x < L; ++x) {
                if (f[x] > w[x]) return seq;
            }
            int pos = len - 1;
            while (pos >= 0 && ++seq[static_cast<std::size_t>(pos)] == L) seq[static_cast<std::size_t>(pos--)] = 0;
            if (pos < 0) break;
        }
    }
    return std::nullopt;
}

}  // namespace wallsep
