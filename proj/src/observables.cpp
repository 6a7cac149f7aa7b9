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

#include "wallsep/observables.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace wallsep {

void EnsembleAccumulator::add(double x) noexcept {
    const double n1 = static_cast<double>(n_);
    ++n_;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double dn = delta / n;
    const double dn2 = dn * dn;
    const double term1 = delta * dn * n1;
    mean_ += dn;
    m4_ += term1 * dn2 * (n * n - 3 * n + 3) + 6 * dn2 * m2_ - 4 * dn * m3_;
    m3_ += term1 * dn * (n - 2) - 3 * dn * m2_;
    m2_ += term1;
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& o) noexcept {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double d = o.mean_ - mean_;
    const double d2 = d * d;
    const double m2 = m2_ + o.m2_ + d2 * na * nb / n;
    const double m3 = m3_ + o.m3_ + d2 * d * na * nb * (na - nb) / (n * n) + 3 * d * (na * o.m2_ - nb * m2_) / n;
    const double m4 = m4_ + o.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                      6 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n) + 4 * d * (na * o.m3_ - nb * m3_) / n;
    mean_ += d * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += o.n_;
}

double EnsembleAccumulator::variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double EnsembleAccumulator::std_error() const noexcept {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

double EnsembleAccumulator::central_moment(int k) const noexcept {
    if (n_ == 0) return 0.0;
    const double n = static_cast<double>(n_);
    switch (k) {
        case 1: return 0.0;
        case 2: return m2_ / n;
        case 3: return m3_ / n;
        case 4: return m4_ / n;
        default: return 0.0;
    }
}

double EnsembleAccumulator::skewness() const noexcept {
    const double v = central_moment(2);
    return v > 0 ? central_moment(3) / std::pow(v, 1.5) : 0.0;
}

double EnsembleAccumulator::excess_kurtosis() const noexcept {
    const double v = central_moment(2);
    return v > 0 ? central_moment(4) / (v * v) - 3.0 : 0.0;
}

double normal_quantile(double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<>(), 0.5 + 0.5 * level);
}

double student_quantile(double level, double dof) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0,1)");
    if (!(dof > 0)) throw std::invalid_argument("degrees of freedom must be positive");
    return boost::math::quantile(boost::math::students_t_distribution<>(dof), 0.5 + 0.5 * level);
}

Estimate EnsembleAccumulator::mean_ci(double level) const {
    Estimate e{mean_, mean_, mean_, n_};
    if (n_ < 2) return e;
    const double hw = student_quantile(level, static_cast<double>(n_ - 1)) * std_error();
    e.lo = mean_ - hw;
    e.hi = mean_ + hw;
    return e;
}

Estimate EnsembleAccumulator::variance_ci(double level) const {
    const double s2 = variance();
    Estimate e{s2, s2, s2, n_};
    if (n_ < 4) return e;
    const double n = static_cast<double>(n_);
    const double mu4 = m4_ / n;
    const double var_s2 = std::max(0.0, (mu4 - (n - 3) / (n - 1) * s2 * s2) / n);
    const double hw = normal_quantile(level) * std::sqrt(var_s2);
    e.lo = s2 - hw;
    e.hi = s2 + hw;
    return e;
}

double site_mean_square(const HeightField& h) {
    long double s = 0;
    for (int v : h.heights()) s += static_cast<long double>(v) * v;
    return static_cast<double>(s / h.size());
}

double site_mean(const HeightField& h) {
    long long s = 0;
    for (int v : h.heights()) s += v;
    return static_cast<double>(s) / h.size();
}

double zero_fraction(const HeightField& h) {
    long long c = 0;
    for (int v : h.heights()) c += v == 0;
    return static_cast<double>(c) / h.size();
}

double ScaledHistogram::bin_width() const {
    if (!(t > 0)) throw std::invalid_argument("histogram time must be positive");
    return std::pow(t, -0.25);
}

double ScaledHistogram::s_of(int k) const { return (min_value + k) * bin_width(); }

double ScaledHistogram::density(int k) const { return mass.at(static_cast<std::size_t>(k)) / bin_width(); }

double ScaledHistogram::mass_at(int value) const noexcept {
    const long long k = static_cast<long long>(value) - min_value;
    if (k < 0 || k >= static_cast<long long>(mass.size())) return 0.0;
    return mass[static_cast<std::size_t>(k)];
}

double ScaledHistogram::total_mass() const noexcept {
    double s = 0;
    for (double m : mass) s += m;
    return s;
}

double ScaledHistogram::moment(int k) const {
    double s = 0;
    for (std::size_t i = 0; i < mass.size(); ++i) s += mass[i] * std::pow(s_of(static_cast<int>(i)), k);
    return s;
}

namespace {

double central(const ScaledHistogram& h, int k) {
    const double mu = h.moment(1);
    double s = 0;
    for (std::size_t i = 0; i < h.mass.size(); ++i) s += h.mass[i] * std::pow(h.s_of(static_cast<int>(i)) - mu, k);
    return s;
}

}  // namespace

double ScaledHistogram::skewness() const {
    const double v = central(*this, 2);
    return v > 0 ? central(*this, 3) / std::pow(v, 1.5) : 0.0;
}

double ScaledHistogram::excess_kurtosis() const {
    const double v = central(*this, 2);
    return v > 0 ? central(*this, 4) / (v * v) - 3.0 : 0.0;
}

double ScaledHistogram::mode(int parity) const {
    int best = -1;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        const int value = min_value + static_cast<int>(i);
        if (parity >= 0 && ((value % 2) + 2) % 2 != parity) continue;
        if (best < 0 || mass[i] > mass[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    if (best < 0) throw std::invalid_argument("empty histogram");
    return s_of(best);
}

double ScaledHistogram::normality_pvalue(double n_eff) const {
    if (!(n_eff > 0)) throw std::invalid_argument("effective sample size must be positive");
    const double sk = skewness();
    const double ku = excess_kurtosis();
    const double stat = n_eff * (sk * sk / 6.0 + ku * ku / 24.0);
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<>(2.0), stat));
}

ScaledHistogram scaled_distribution(const HeightField& h, double t) {
    HistogramAccumulator acc;
    acc.add(h);
    return acc.scaled(t);
}

void HistogramAccumulator::add(const HeightField& h) {
    const auto [lo_it, hi_it] = std::minmax_element(h.heights().begin(), h.heights().end());
    const int lo = *lo_it;
    const int hi = *hi_it;
    if (counts_.empty()) {
        min_value_ = lo;
        counts_.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    } else {
        const int cur_hi = min_value_ + static_cast<int>(counts_.size()) - 1;
        if (lo < min_value_) {
            counts_.insert(counts_.begin(), static_cast<std::size_t>(min_value_ - lo), 0);
            min_value_ = lo;
        }
        if (hi > cur_hi) counts_.resize(counts_.size() + static_cast<std::size_t>(hi - cur_hi), 0);
    }
    for (int v : h.heights()) ++counts_[static_cast<std::size_t>(v - min_value_)];
    total_ += static_cast<std::uint64_t>(h.size());
}

void HistogramAccumulator::merge(const HistogramAccumulator& o) {
    if (o.counts_.empty()) return;
    if (counts_.empty()) {
        *this = o;
        return;
    }
    const int lo = std::min(min_value_, o.min_value_);
    const int hi = std::max(min_value_ + static_cast<int>(counts_.size()), o.min_value_ + static_cast<int>(o.counts_.size()));
    std::vector<std::uint64_t> c(static_cast<std::size_t>(hi - lo), 0);
    for (std::size_t i = 0; i < counts_.size(); ++i) c[i + static_cast<std::size_t>(min_value_ - lo)] += counts_[i];
    for (std::size_t i = 0; i < o.counts_.size(); ++i) c[i + static_cast<std::size_t>(o.min_value_ - lo)] += o.counts_[i];
    counts_ = std::move(c);
    min_value_ = lo;
    total_ += o.total_;
}

ScaledHistogram HistogramAccumulator::scaled(double t) const {
    if (!(t > 0)) throw std::invalid_argument("histogram time must be positive");
    if (total_ == 0) throw std::invalid_argument("empty histogram");
    ScaledHistogram out;
    out.t = t;
    out.min_value = min_value_;
    out.mass.resize(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) out.mass[i] = static_cast<double>(counts_[i]) / static_cast<double>(total_);
    return out;
}

Estimate FitResult::b_ci(double level) const {
    Estimate e{b, b, b, n};
    if (n < 3) return e;
    const double hw = student_quantile(level, static_cast<double>(n - 2)) * se_b;
    e.lo = b - hw;
    e.hi = b + hw;
    return e;
}

double FitResult::predict(double t) const {
    const double y = a + b * std::log(t);
    return model == FitModel::PowerLaw ? std::exp(y) : y;
}

namespace {

FitResult linear_fit(std::span<const std::pair<double, double>> samples, FitModel model) {
    std::set<double> distinct;
    for (const auto& [t, y] : samples) {
        if (!(t > 0)) throw std::invalid_argument("fit requires positive t");
        if (model == FitModel::PowerLaw && !(y > 0)) throw std::invalid_argument("power-law fit requires positive y");
        distinct.insert(t);
    }
    if (distinct.size() < 3) throw std::invalid_argument("fit requires at least three distinct t values");
    const double n = static_cast<double>(samples.size());
    std::vector<double> xs, ys;
    xs.reserve(samples.size());
    ys.reserve(samples.size());
    double mx = 0, my = 0;
    for (const auto& [t, y] : samples) {
        xs.push_back(std::log(t));
        ys.push_back(model == FitModel::PowerLaw ? std::log(y) : y);
        mx += xs.back();
        my += ys.back();
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    FitResult r;
    r.model = model;
    r.n = samples.size();
    r.b = sxy / sxx;
    r.a = my - r.b * mx;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - r.a - r.b * xs[i];
        r.rss += e * e;
    }
    if (r.n > 2) {
        const double s2 = r.rss / (n - 2);
        r.se_b = std::sqrt(s2 / sxx);
        r.se_a = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    }
    return r;
}

}  // namespace

FitResult log_fit(std::span<const std::pair<double, double>> samples) { return linear_fit(samples, FitModel::LogLinear); }

FitResult exponent_fit(std::span<const std::pair<double, double>> samples) { return linear_fit(samples, FitModel::PowerLaw); }

std::string to_string(FitModel m) { return m == FitModel::LogLinear ? "a+b*log(t)" : "power-law"; }

}  // namespace wallsep
