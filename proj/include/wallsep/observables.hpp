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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wallsep/lattice.hpp"

namespace wallsep {

/// Point estimate with a two-sided confidence interval.
struct Estimate {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t n = 0;
    [[nodiscard]] bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    [[nodiscard]] double half_width() const noexcept { return 0.5 * (hi - lo); }
};

/// Single-pass central moments up to order four, mergeable (pairwise update
/// formulas of Chan et al. and Pebay).
class EnsembleAccumulator {
public:
    void add(double x) noexcept;
    void merge(const EnsembleAccumulator& other) noexcept;

    [[nodiscard]] std::uint64_t count() const noexcept { return n_; }
    [[nodiscard]] double mean() const noexcept { return mean_; }
    /// Unbiased sample variance (0 for fewer than two samples).
    [[nodiscard]] double variance() const noexcept;
    [[nodiscard]] double population_variance() const noexcept { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
    [[nodiscard]] double std_error() const noexcept;
    [[nodiscard]] double skewness() const noexcept;
    [[nodiscard]] double excess_kurtosis() const noexcept;
    [[nodiscard]] double central_moment(int k) const noexcept;

    /// Student-t interval for the mean.
    [[nodiscard]] Estimate mean_ci(double level = 0.95) const;
    /// Normal-approximation interval for the variance using the fourth moment:
    /// Var(s^2) ~ (mu4 - (n-3)/(n-1) s^4) / n.
    [[nodiscard]] Estimate variance_ci(double level = 0.95) const;

    [[nodiscard]] double m2() const noexcept { return m2_; }
    [[nodiscard]] double m3() const noexcept { return m3_; }
    [[nodiscard]] double m4() const noexcept { return m4_; }

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

/// Two-sided standard-normal and Student-t quantiles.
[[nodiscard]] double normal_quantile(double level);
[[nodiscard]] double student_quantile(double level, double dof);

/// L^{-1} sum_x h(x)^2.
[[nodiscard]] double site_mean_square(const HeightField& h);
[[nodiscard]] double site_mean(const HeightField& h);
/// Fraction of sites at height zero (f_t(0) for the wall process).
[[nodiscard]] double zero_fraction(const HeightField& h);

/// Empirical distribution of heights in units s = value / t^{1/4}. One bin
/// per integer value, bin width t^{-1/4}; masses sum to one.
struct ScaledHistogram {
    double t = 0.0;
    int min_value = 0;
    std::vector<double> mass;  // mass[k] is the weight of value min_value + k

    [[nodiscard]] double bin_width() const;
    [[nodiscard]] double s_of(int k) const;
    /// phi_t(s): mass divided by bin width.
    [[nodiscard]] double density(int k) const;
    [[nodiscard]] double mass_at(int value) const noexcept;
    [[nodiscard]] double total_mass() const noexcept;
    /// Moments of s under the histogram.
    [[nodiscard]] double moment(int k) const;
    [[nodiscard]] double skewness() const;
    [[nodiscard]] double excess_kurtosis() const;
    /// s at the largest mass among bins of the given value parity (-1: any).
    [[nodiscard]] double mode(int parity = -1) const;
    /// Moment-based normality statistic with effective sample size n_eff,
    /// n_eff (skew^2/6 + kurt^2/24); returns the chi-square(2) p-value.
    [[nodiscard]] double normality_pvalue(double n_eff) const;
};

[[nodiscard]] ScaledHistogram scaled_distribution(const HeightField& h, double t);

/// Accumulates integer height counts across replicas and renders the pooled
/// histogram.
class HistogramAccumulator {
public:
    void add(const HeightField& h);
    void merge(const HistogramAccumulator& other);
    [[nodiscard]] ScaledHistogram scaled(double t) const;
    [[nodiscard]] std::uint64_t samples() const noexcept { return total_; }

private:
    int min_value_ = 0;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

enum class FitModel { LogLinear, PowerLaw };

/// y = a + b log t (LogLinear) or log y = a + b log t (PowerLaw).
struct FitResult {
    double a = 0.0;
    double b = 0.0;
    double rss = 0.0;
    FitModel model = FitModel::LogLinear;
    double se_a = 0.0;
    double se_b = 0.0;
    std::size_t n = 0;
    /// Student-t interval for b with n - 2 degrees of freedom.
    [[nodiscard]] Estimate b_ci(double level = 0.95) const;
    [[nodiscard]] double predict(double t) const;
};

[[nodiscard]] FitResult log_fit(std::span<const std::pair<double, double>> samples);
[[nodiscard]] FitResult exponent_fit(std::span<const std::pair<double, double>> samples);

[[nodiscard]] std::string to_string(FitModel m);

}  // namespace wallsep
