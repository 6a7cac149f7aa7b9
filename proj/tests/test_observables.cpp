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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wallsep/dynamics.hpp"
#include "wallsep/observables.hpp"

using namespace wallsep;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST_CASE("accumulator moments") {
    EnsembleAccumulator acc;
    for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) acc.add(x);
    CHECK(acc.count() == 8);
    CHECK(acc.mean() == doctest::Approx(5.0));
    CHECK(acc.population_variance() == doctest::Approx(4.0));
    CHECK(acc.variance() == doctest::Approx(32.0 / 7.0));
    EnsembleAccumulator one;
    one.add(3.0);
    CHECK(one.variance() == 0.0);
}

TEST_CASE("accumulator merge equals concatenation") {
    Rng rng(42);
    std::vector<double> xs(5000);
    for (auto& x : xs) x = std::exp(rng.uniform() * 3.0) - 4.0;
    EnsembleAccumulator whole;
    for (double x : xs) whole.add(x);
    for (int trial = 0; trial < 20; ++trial) {
        // random partition into up to eight blocks, merged in a shuffled order
        std::vector<std::size_t> cuts{0, xs.size()};
        const int pieces = 1 + static_cast<int>(rng.below(7));
        for (int k = 0; k < pieces; ++k) cuts.push_back(rng.below(static_cast<std::uint32_t>(xs.size())));
        std::sort(cuts.begin(), cuts.end());
        std::vector<EnsembleAccumulator> parts;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            EnsembleAccumulator a;
            for (std::size_t i = cuts[k]; i < cuts[k + 1]; ++i) a.add(xs[i]);
            parts.push_back(a);
        }
        for (std::size_t i = parts.size(); i > 1; --i) std::swap(parts[i - 1], parts[rng.below(static_cast<std::uint32_t>(i))]);
        EnsembleAccumulator merged;
        for (const auto& p : parts) merged.merge(p);
        CHECK(merged.count() == whole.count());
        CHECK(rel_close(merged.mean(), whole.mean(), 1e-12));
        CHECK(rel_close(merged.m2(), whole.m2(), 1e-12));
        CHECK(rel_close(merged.m3(), whole.m3(), 1e-12));
        CHECK(rel_close(merged.m4(), whole.m4(), 1e-12));
    }
    EnsembleAccumulator a, b, empty;
    a.add(1.0);
    a.add(2.0);
    b.add(10.0);
    EnsembleAccumulator ab = a, ba = b;
    ab.merge(b);
    ba.merge(a);
    CHECK(ab.mean() == doctest::Approx(ba.mean()));
    CHECK(ab.m2() == doctest::Approx(ba.m2()));
    ab.merge(empty);
    CHECK(ab.count() == 3);
}

TEST_CASE("confidence intervals") {
    CHECK(normal_quantile(0.95) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(student_quantile(0.95, 5) == doctest::Approx(2.570582).epsilon(1e-6));
    // Coverage of the mean and variance intervals on Gaussian samples.
    int mean_hits = 0, var_hits = 0;
    const int trials = 400;
    std::normal_distribution<double> g(1.0, 2.0);
    Rng rng(7);
    for (int k = 0; k < trials; ++k) {
        EnsembleAccumulator acc;
        for (int i = 0; i < 400; ++i) acc.add(g(rng));
        mean_hits += acc.mean_ci(0.95).contains(1.0) ? 1 : 0;
        var_hits += acc.variance_ci(0.95).contains(4.0) ? 1 : 0;
    }
    CHECK(mean_hits > 0.91 * trials);
    CHECK(var_hits > 0.90 * trials);
}

TEST_CASE("site averages") {
    CHECK(site_mean_square(new_flat(4, 0, true)) == 0.5);
    CHECK(site_mean_square(new_flat(4, 2, false)) == 6.5);
    CHECK(site_mean(new_flat(4, 0, true)) == 0.5);
    CHECK(zero_fraction(new_flat(4, 0, true)) == 0.5);
    CHECK(zero_fraction(new_flat(4, 2, true)) == 0.0);
}

TEST_CASE("scaled distribution of the flat field") {
    const ScaledHistogram h = scaled_distribution(new_flat(4, 0, true), 1.0);
    CHECK(h.total_mass() == doctest::Approx(1.0));
    CHECK(h.mass_at(0) == 0.5);
    CHECK(h.mass_at(1) == 0.5);
    CHECK(h.s_of(0) == doctest::Approx(0.0));
    CHECK(h.s_of(1) == doctest::Approx(1.0));
    CHECK(h.bin_width() == doctest::Approx(1.0));
    CHECK(h.density(1) == doctest::Approx(0.5));
    CHECK(h.mode(1) == doctest::Approx(1.0));
}

TEST_CASE("scaled histogram second moment matches the site mean square") {
    const double t = 64.0;
    const auto r = evolve(new_flat(2048, 0, false), t, ScheduleKind::DiscreteUniformSite, UpdateRule::Free, 3);
    const ScaledHistogram h = scaled_distribution(r.field, t);
    CHECK(h.total_mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rel_close(h.moment(2), site_mean_square(r.field) / std::sqrt(t), 1e-12));
    // attainable values at one site parity class: masses at each parity sum to one half
    double even = 0.0;
    for (std::size_t k = 0; k < h.mass.size(); ++k) {
        if (((h.min_value + static_cast<int>(k)) & 1) == 0) even += h.mass[k];
    }
    CHECK(even == doctest::Approx(0.5));
}

TEST_CASE("free process histogram is symmetric and Gaussian-compatible") {
    const double t = 256.0;
    const auto r = evolve(new_flat(1 << 16, 0, false), t, ScheduleKind::DiscreteUniformSite, UpdateRule::Free, 8);
    const ScaledHistogram h = scaled_distribution(r.field, t);
    const double n_eff = (1 << 16) / std::sqrt(t);
    const double p = h.normality_pvalue(n_eff);
    MESSAGE("skew " << h.skewness() << " kurt " << h.excess_kurtosis() << " p " << p);
    CHECK(std::abs(h.skewness()) < 0.1);
    CHECK(p > 0.001);
}

TEST_CASE("histogram accumulator pools replicas") {
    HistogramAccumulator a, b;
    a.add(new_flat(4, 0, true));
    b.add(new_flat(4, 2, true));
    a.merge(b);
    CHECK(a.samples() == 8);
    const ScaledHistogram h = a.scaled(1.0);
    CHECK(h.mass_at(0) == 0.25);
    CHECK(h.mass_at(3) == 0.25);
    CHECK(h.total_mass() == doctest::Approx(1.0));
}

TEST_CASE("log_fit") {
    std::vector<std::pair<double, double>> s;
    for (int k = 4; k <= 14; ++k) {
        const double t = std::ldexp(1.0, k);
        s.emplace_back(t, 2.0 + 0.5 * std::log(t));
    }
    const FitResult f = log_fit(s);
    CHECK(std::abs(f.a - 2.0) < 1e-9);
    CHECK(std::abs(f.b - 0.5) < 1e-9);
    CHECK(f.rss < 1e-18);
    CHECK(f.predict(100.0) == doctest::Approx(2.0 + 0.5 * std::log(100.0)));

    std::vector<std::pair<double, double>> flat{{1.0, 3.0}, {2.0, 3.0}, {8.0, 3.0}};
    CHECK(log_fit(flat).b == doctest::Approx(0.0));

    std::vector<std::pair<double, double>> two{{1.0, 3.0}, {2.0, 4.0}, {2.0, 5.0}};
    CHECK_THROWS_AS((void)log_fit(two), std::invalid_argument);
    std::vector<std::pair<double, double>> bad_t{{0.0, 3.0}, {2.0, 4.0}, {4.0, 5.0}};
    CHECK_THROWS_AS((void)log_fit(bad_t), std::invalid_argument);
}

TEST_CASE("least-squares normal equations hold") {
    Rng rng(1);
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k < 12; ++k) {
        const double t = 10.0 + 50.0 * k;
        s.emplace_back(t, 1.0 + 0.3 * std::log(t) + (rng.uniform() - 0.5));
    }
    for (const FitResult& f : {log_fit(s), exponent_fit(s)}) {
        double r0 = 0.0, r1 = 0.0, scale = 0.0;
        for (auto [t, y] : s) {
            const double x = std::log(t);
            const double target = f.model == FitModel::LogLinear ? y : std::log(y);
            const double r = target - (f.a + f.b * x);
            r0 += r;
            r1 += r * x;
            scale += std::abs(target * x);
        }
        CHECK(std::abs(r0) <= 1e-9 * scale);
        CHECK(std::abs(r1) <= 1e-9 * scale);
        const Estimate ci = f.b_ci(0.95);
        CHECK(ci.lo < f.b);
        CHECK(f.b < ci.hi);
    }
}

TEST_CASE("exponent_fit") {
    std::vector<std::pair<double, double>> power, logged;
    for (int k = 8; k <= 16; ++k) {
        const double t = std::ldexp(1.0, k);
        power.emplace_back(t, 3.0 * std::pow(t, 0.25));
        logged.emplace_back(t, std::pow(t, 0.25) * std::log(t));
    }
    const FitResult f = exponent_fit(power);
    CHECK(std::abs(f.b - 0.25) < 1e-12);
    CHECK(std::exp(f.a) == doctest::Approx(3.0));
    // The log factor adds 1/log t to the local slope, so the fitted slope is
    // 1/4 plus the least-squares slope of log log t on log t (about 0.124 here).
    const double slope = exponent_fit(logged).b;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (auto [t, y] : logged) {
        const double x = std::log(t), z = std::log(std::log(t));
        sx += x;
        sy += z;
        sxx += x * x;
        sxy += x * z;
    }
    const double n = static_cast<double>(logged.size());
    const double extra = (sxy - sx * sy / n) / (sxx - sx * sx / n);
    CHECK(slope == doctest::Approx(0.25 + extra).epsilon(1e-12));
    CHECK(slope > 0.25);
    CHECK(slope < 0.40);
    std::vector<std::pair<double, double>> bad{{1.0, 1.0}, {2.0, 0.0}, {4.0, 1.0}};
    CHECK_THROWS_AS((void)exponent_fit(bad), std::invalid_argument);
    CHECK(to_string(FitModel::PowerLaw) != to_string(FitModel::LogLinear));
}
