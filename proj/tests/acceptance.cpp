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

// Acceptance runs. Each criterion prints its individual checks and ends with
// one "PASS <name>" or "FAIL <name>" line; the exit status is non-zero on FAIL.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wallsep/dynamics.hpp"
#include "wallsep/exclusion.hpp"
#include "wallsep/harness.hpp"
#include "wallsep/ising.hpp"
#include "wallsep/observables.hpp"
#include "wallsep/oracle.hpp"

namespace ws = wallsep;

namespace {

const double kPi = std::numbers::pi;

class Report {
public:
    explicit Report(std::string name) : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    void check(bool pass, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
        ok_ = ok_ && pass;
        std::printf("  [%s] ", pass ? " ok " : "FAIL");
        va_list ap;
        va_start(ap, fmt);
        std::vprintf(fmt, ap);
        va_end(ap);
        std::printf("\n");
        std::fflush(stdout);
    }

    void info(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        std::printf("  [info] ");
        va_list ap;
        va_start(ap, fmt);
        std::vprintf(fmt, ap);
        va_end(ap);
        std::printf("\n");
        std::fflush(stdout);
    }

    int finish() const {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::printf("%s %s (%.1fs)\n", ok_ ? "PASS" : "FAIL", name_.c_str(), secs);
        return ok_ ? 0 : 1;
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
};

// Runs fn(i) for every replica on the worker pool; results land in index order.
template <class T>
std::vector<T> replicas(std::uint64_t n, const std::function<T(std::uint64_t)>& fn) {
    std::vector<T> out(n);
    ws::parallel_for(n, ws::worker_count(), [&](std::uint64_t i) { out[i] = fn(i); });
    return out;
}

double even_site_mean(const ws::HeightField& h) {
    double s = 0.0;
    for (int x = 0; x < h.size(); x += 2) s += h[x];
    return s / (h.size() / 2);
}

// ---------------------------------------------------------------------------

int exact_identities() {
    Report rep("exact_identities");
    const int L = 64;
    const double t = 32.0;
    const std::uint64_t n = 10000;

    struct Outcome {
        bool height_flux = true, stirring_flux = true, gradient_image = true;
        bool duality = true, decomposition = true, conserved = true;
        bool domination = true, wall_nonneg = true, lattice = true;
    };
    const auto out = replicas<Outcome>(n, [&](std::uint64_t i) {
        Outcome o;
        const std::uint64_t seed = ws::derive_seed(1, i);

        const auto hf = ws::height_flux_identity_run(L, t, seed);
        o.height_flux = hf.identity_holds();
        o.stirring_flux = hf.flux == hf.stirring_flux;
        o.gradient_image = hf.gradient_image_matches;

        const ws::OccupationField eta0 = ws::flat_occupation(L);
        ws::ExclusionProcess ex(eta0, ws::derive_seed(2, i));
        ex.advance_to(t);
        const auto& st = ex.state();
        o.duality = ws::duality_check(eta0, st.eta, st.stirring);
        const auto d = ws::flux_decomposition(st.stirring, eta0);
        o.decomposition = d.J() == ex.flux() && std::llabs(d.H_prime - d.I) <= 1 &&
                          ws::flux_from_stirring(st.stirring, eta0) == ex.flux();
        o.conserved = st.eta.particle_count() == L / 2;

        // Order and the wall checked after every mark at the touched site.
        const auto schedule = i % 2 == 0 ? ws::ScheduleKind::ContinuousTime : ws::ScheduleKind::DiscreteUniformSite;
        ws::MonotoneCoupling c(ws::new_flat(L, 0, true), ws::new_flat(L, 0, false), schedule, ws::derive_seed(3, i));
        c.advance_to(t, [&](int x, ws::MarkDirection, int, int, const ws::HeightField& up, const ws::HeightField& lo) {
            if (lo[x] > up[x]) o.domination = false;
            if (up[x] < 0) o.wall_nonneg = false;
            const int xl = ws::ring_prev(x, L), xr = ws::ring_next(x, L);
            if (std::abs(up[x] - up[xl]) != 1 || std::abs(up[xr] - up[x]) != 1) o.lattice = false;
            if (std::abs(lo[x] - lo[xl]) != 1 || std::abs(lo[xr] - lo[x]) != 1) o.lattice = false;
        });
        o.domination = o.domination && c.ordered();
        o.lattice = o.lattice && c.upper().satisfies_invariants() && c.lower().satisfies_invariants();

        for (bool walled : {true, false}) {
            ws::HeightProcess p(ws::new_flat(L, 0, walled), walled ? ws::UpdateRule::Wall : ws::UpdateRule::Free,
                                schedule, ws::derive_seed(walled ? 4 : 5, i));
            for (double s = 4.0; s <= t; s += 4.0) {
                p.advance_to(s);
                if (!p.field().satisfies_invariants()) o.lattice = false;
            }
        }
        return o;
    });

    auto count = [&](bool Outcome::*field) {
        std::uint64_t bad = 0;
        for (const auto& o : out) bad += (o.*field) ? 0 : 1;
        return bad;
    };
    const auto report = [&](bool Outcome::*field, const char* what) {
        const auto bad = count(field);
        rep.check(bad == 0, "%s: %llu failures in %llu trajectories", what, static_cast<unsigned long long>(bad),
                  static_cast<unsigned long long>(n));
    };
    report(&Outcome::height_flux, "zeta_t(0) - zeta_0(0) = -2 J_t (particles on up-steps)");
    report(&Outcome::stirring_flux, "crossing counter equals stirring flux");
    report(&Outcome::gradient_image, "eta_t is the gradient image of zeta_t");
    report(&Outcome::duality, "duality eta_t(y) = eta_0(D^y_t)");
    report(&Outcome::decomposition, "J = H - I and |H' - I| <= 1");
    report(&Outcome::conserved, "particle number conserved");
    report(&Outcome::domination, "monotone coupling zeta <= xi after every mark");
    report(&Outcome::wall_nonneg, "wall heights non-negative after every mark");
    report(&Outcome::lattice, "gradient and parity invariants");
    rep.info("L=%d t=%g, %llu seeds", L, t, static_cast<unsigned long long>(n));
    return rep.finish();
}

int small_ring_oracle() {
    Report rep("small_ring_oracle");
    const int L = 6;
    const double t = 1.0;
    const std::uint64_t n = 1000000;
    const ws::ExactRing exact = ws::exact_ring_transient(L, t, 10);

    struct Sample {
        std::uint8_t bits = 0;
        std::int8_t J = 0;
    };
    const auto out = replicas<Sample>(n, [&](std::uint64_t i) {
        ws::ExclusionProcess p(ws::flat_occupation(L), ws::derive_seed(21, i), false);
        p.advance_to(t);
        Sample s;
        for (int x = 0; x < L; ++x) s.bits |= static_cast<std::uint8_t>(p.state().eta[x] << x);
        s.J = static_cast<std::int8_t>(p.flux());
        return s;
    });

    std::array<double, 6> freq{};
    ws::EnsembleAccumulator flux;
    for (const auto& s : out) {
        for (int x = 0; x < L; ++x) freq[static_cast<std::size_t>(x)] += (s.bits >> x) & 1;
        flux.add(s.J);
    }
    double worst_tv = 0.0;
    for (int x = 0; x < L; ++x) {
        const double p = freq[static_cast<std::size_t>(x)] / static_cast<double>(n);
        // TV between two Bernoulli laws is |p - q|
        worst_tv = std::max(worst_tv, std::abs(p - exact.site_marginal[static_cast<std::size_t>(x)]));
    }
    rep.check(worst_tv < 0.01, "site marginals: max TV %.2e (limit 0.01)", worst_tv);
    const ws::Estimate m = flux.mean_ci(0.99);
    rep.check(m.contains(exact.mean_J), "E J_t: exact %.6f, MC %.6f [%.6f, %.6f] (99%%)", exact.mean_J, m.value, m.lo, m.hi);
    const ws::Estimate v = flux.variance_ci(0.99);
    rep.check(v.contains(exact.var_J), "Var J_t: exact %.6f, MC %.6f [%.6f, %.6f] (99%%)", exact.var_J, v.value, v.lo, v.hi);
    rep.info("L=%d t=%g, %llu replicas", L, t, static_cast<unsigned long long>(n));
    return rep.finish();
}

int flat_flux_variance() {
    Report rep("flat_flux_variance");
    const double limit = 0.25 / std::sqrt(kPi);

    {
        const double t = 20.0;
        const std::uint64_t n = 100000;
        const auto J = replicas<long long>(n, [&](std::uint64_t i) {
            ws::ExclusionProcess p(ws::flat_occupation(512), ws::derive_seed(31, i), false);
            p.advance_to(t);
            return p.flux();
        });
        ws::EnsembleAccumulator acc;
        for (long long j : J) acc.add(static_cast<double>(j));
        const double exact = ws::flux_variance_exact(t).variance;
        const ws::Estimate v = acc.variance_ci(0.99);
        rep.check(v.contains(exact), "t=20, L=512, %llu replicas: Var J = %.5f [%.5f, %.5f], exact %.6f",
                  static_cast<unsigned long long>(n), v.value, v.lo, v.hi, exact);
    }

    const std::array<double, 3> ts{256.0, 1024.0, 4096.0};
    const int L = 1 << 14;
    const std::uint64_t n = 2000;
    std::array<double, 3> exact{};
    for (std::size_t k = 0; k < ts.size(); ++k) exact[k] = ws::flux_variance_exact(ts[k]).variance / std::sqrt(ts[k]);
    rep.check(exact[0] > exact[1] && exact[1] > exact[2] && exact[2] > limit,
              "exact Var J_t / sqrt t decreasing toward %.6f: %.6f, %.6f, %.6f", limit, exact[0], exact[1], exact[2]);

    const auto J = replicas<std::array<long long, 3>>(n, [&](std::uint64_t i) {
        ws::ExclusionProcess p(ws::flat_occupation(L), ws::derive_seed(32, i), false);
        std::array<long long, 3> r{};
        for (std::size_t k = 0; k < ts.size(); ++k) {
            p.advance_to(ts[k]);
            r[k] = p.flux();
        }
        return r;
    });
    std::array<ws::Estimate, 3> mc{};
    for (std::size_t k = 0; k < ts.size(); ++k) {
        ws::EnsembleAccumulator acc;
        for (const auto& r : J) acc.add(static_cast<double>(r[k]));
        ws::Estimate v = acc.variance_ci(0.99);
        const double s = std::sqrt(ts[k]);
        mc[k] = {v.value / s, v.lo / s, v.hi / s, v.n};
        rep.check(mc[k].contains(exact[k]), "t=%g: MC ratio %.5f [%.5f, %.5f] (99%%) contains exact %.6f", ts[k],
                  mc[k].value, mc[k].lo, mc[k].hi, exact[k]);
    }
    const double rel = std::abs(mc[2].value / limit - 1.0);
    rep.check(rel < 0.08, "t=4096: MC ratio %.5f within 8%% of %.6f (off by %.2f%%)", mc[2].value, limit, 100.0 * rel);
    rep.info("MC ratios in order %.5f, %.5f, %.5f; the exact steps of %.1f%% and %.1f%% are below the MC resolution at %llu replicas",
             mc[0].value, mc[1].value, mc[2].value, 100.0 * (1.0 - exact[1] / exact[0]), 100.0 * (1.0 - exact[2] / exact[1]),
             static_cast<unsigned long long>(n));
    return rep.finish();
}

int product_flux_variance() {
    Report rep("product_flux_variance");
    const double t = 4096.0;
    const int L = 4096;
    const std::uint64_t n = 8000;
    for (auto [rho, tol, seed] : {std::tuple{0.5, 0.08, 41ULL}, std::tuple{0.25, 0.10, 42ULL}}) {
        const auto J = replicas<long long>(n, [&](std::uint64_t i) {
            ws::Rng init(ws::derive_seed(seed, 2 * i));
            ws::ExclusionProcess p(ws::product_measure_init(L, rho, init), ws::derive_seed(seed, 2 * i + 1), false);
            p.advance_to(t);
            return p.flux();
        });
        ws::EnsembleAccumulator acc;
        for (long long j : J) acc.add(static_cast<double>(j));
        const double s = std::sqrt(t);
        const ws::Estimate v = acc.variance_ci(0.99);
        const double ratio = v.value / s;
        const double limit = rho * (1.0 - rho) * std::sqrt(2.0 / kPi);
        const double rel = std::abs(ratio / limit - 1.0);
        rep.check(rel < tol, "rho=%g: Var J_t / sqrt t = %.5f [%.5f, %.5f], limit %.5f, off by %.2f%% (limit %g%%)", rho,
                  ratio, v.lo / s, v.hi / s, limit, 100.0 * rel, 100.0 * tol);
        const double exact = ws::product_flux_variance_exact(t, rho);
        rep.info("rho=%g: rho(1-rho) E|X_t| / sqrt t = %.6f, %s the 99%% CI", rho, exact / s,
                 v.contains(exact) ? "inside" : "outside");
    }
    rep.info("L=%d t=%g, %llu replicas per density", L, t, static_cast<unsigned long long>(n));
    return rep.finish();
}

int free_variance() {
    Report rep("free_variance");
    const int L = 1 << 17;
    const std::array<double, 3> ts{1024.0, 4096.0, 16384.0};
    const std::uint64_t n = 8;
    const double limit = 1.0 / std::sqrt(kPi);
    const auto out = replicas<std::array<double, 3>>(n, [&](std::uint64_t i) {
        ws::HeightProcess p(ws::new_flat(L, 0, false), ws::UpdateRule::Free, ws::ScheduleKind::DiscreteUniformSite,
                            ws::derive_seed(51, i));
        std::array<double, 3> r{};
        for (std::size_t k = 0; k < ts.size(); ++k) {
            p.advance_to(ts[k]);
            r[k] = ws::site_mean_square(p.field()) / std::sqrt(ts[k]);
        }
        return r;
    });
    for (std::size_t k = 0; k < ts.size(); ++k) {
        ws::EnsembleAccumulator acc;
        for (const auto& r : out) acc.add(r[k]);
        const ws::Estimate e = acc.mean_ci(0.95);
        const double rel = std::abs(e.value / limit - 1.0);
        rep.check(rel < 0.05, "t=%g: t^-1/2 mean zeta^2 = %.5f [%.5f, %.5f], 1/sqrt(pi) = %.5f, off by %.2f%%", ts[k],
                  e.value, e.lo, e.hi, limit, 100.0 * rel);
    }
    rep.info("L=%d, %llu replicas, discrete schedule", L, static_cast<unsigned long long>(n));
    return rep.finish();
}

int wall_scaling() {
    Report rep("wall_scaling");
    const int L = 1 << 17;
    const std::uint64_t n = 16;
    std::vector<double> ts;
    for (int k = 8; k <= 14; ++k) ts.push_back(std::ldexp(1.0, k));
    const std::size_t m = ts.size();

    struct Row {
        std::vector<double> mean0, msq, f0, origin;
    };
    const auto out = replicas<Row>(n, [&](std::uint64_t i) {
        ws::HeightProcess p(ws::new_flat(L, 0, true), ws::UpdateRule::Wall, ws::ScheduleKind::DiscreteUniformSite,
                            ws::derive_seed(61, i));
        Row r;
        for (double t : ts) {
            p.advance_to(t);
            // even sites share the law of site 0
            r.mean0.push_back(even_site_mean(p.field()));
            r.msq.push_back(ws::site_mean_square(p.field()) / std::sqrt(t));
            r.f0.push_back(ws::zero_fraction(p.field()));
            r.origin.push_back(p.field()[0]);
        }
        return r;
    });

    auto pooled = [&](std::vector<double> Row::*field) {
        std::vector<std::pair<double, double>> s;
        for (std::size_t k = 0; k < m; ++k) {
            double v = 0.0;
            for (const auto& r : out) v += (r.*field)[k];
            s.emplace_back(ts[k], v / static_cast<double>(n));
        }
        return s;
    };
    // Student-t interval over per-replica fitted slopes.
    auto replica_slopes = [&](std::vector<double> Row::*field, bool power) {
        ws::EnsembleAccumulator acc;
        for (const auto& r : out) {
            std::vector<std::pair<double, double>> s;
            for (std::size_t k = 0; k < m; ++k) s.emplace_back(ts[k], (r.*field)[k]);
            acc.add(power ? ws::exponent_fit(s).b : ws::log_fit(s).b);
        }
        return acc.mean_ci(0.95);
    };

    const auto mean0 = pooled(&Row::mean0);
    const ws::FitResult fa = ws::exponent_fit(mean0);
    const ws::Estimate sa = replica_slopes(&Row::mean0, true);
    rep.check(fa.b >= 0.20 && fa.b <= 0.35, "(a) slope of E xi_t(0) = %.4f (replica 95%% CI [%.4f, %.4f]), window [0.20, 0.35]",
              fa.b, sa.lo, sa.hi);
    {
        const auto origin = pooled(&Row::origin);
        rep.info("(a) mean of xi_t(0) alone at t=2^8..2^14: %.3f .. %.3f, slope %.4f", origin.front().second,
                 origin.back().second, ws::exponent_fit(origin).b);
    }

    const auto msq = pooled(&Row::msq);
    const ws::FitResult fb = ws::log_fit(msq);
    const ws::Estimate sb = replica_slopes(&Row::msq, false);
    rep.check(sb.lo > 0.0, "(b) log_fit of t^-1/2 mean xi^2: a = %.4f, b = %.4f, replica 95%% CI for b [%.4f, %.4f]", fb.a,
              fb.b, sb.lo, sb.hi);
    const ws::Estimate rb = fb.b_ci(0.95);
    rep.info("(b) regression 95%% CI for b [%.4f, %.4f]; reference constants 1.62 and 0.024 are not asserted", rb.lo, rb.hi);
    bool increasing = true;
    for (std::size_t k = 1; k < m; ++k) increasing = increasing && msq[k].second > msq[k - 1].second;
    rep.info("(b) t^-1/2 mean xi^2 from %.4f to %.4f, %s", msq.front().second, msq.back().second,
             increasing ? "increasing at every checkpoint" : "not monotone");

    const auto f0 = pooled(&Row::f0);
    const ws::FitResult fc = ws::exponent_fit(f0);
    const ws::Estimate sc = replica_slopes(&Row::f0, true);
    rep.check(fc.b >= -0.6 && fc.b <= -0.4, "(c) slope of f_t(0) = %.4f (replica 95%% CI [%.4f, %.4f]), window [-0.6, -0.4]",
              fc.b, sc.lo, sc.hi);
    std::string local;
    for (std::size_t k = 1; k < m; ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%.3f", k > 1 ? ", " : "",
                      std::log(f0[k].second / f0[k - 1].second) / std::log(ts[k] / ts[k - 1]));
        local += buf;
    }
    rep.info("(c) local slopes of f_t(0): %s", local.c_str());
    rep.info("L=%d, %llu replicas, discrete schedule", L, static_cast<unsigned long long>(n));
    return rep.finish();
}

int pair_parity() {
    Report rep("pair_parity");
    const ws::PairSemigroup p = ws::pair_distribution(0, 1, 50.0, 150, ws::PairGenerator::V);
    for (int y : {0, 1}) {
        const double q = p.parity_class(y);
        rep.check(std::abs(q - 0.25) <= 0.02, "t=50: P(X^0, X^1 both = %d mod 2) = %.6f", y, q);
    }
    rep.info("pair law mass %.12f, leaked %.2e", p.mass(), p.leaked);
    const double ratio = ws::v_term_exact(400.0) / 20.0;
    const double limit = 0.5 / std::sqrt(kPi);
    rep.check(std::abs(ratio / limit - 1.0) <= 0.02, "t=400: V_t / sqrt t = %.6f vs %.6f (off by %.3f%%)", ratio, limit,
              100.0 * std::abs(ratio / limit - 1.0));
    return rep.finish();
}

int ising_equivalence() {
    Report rep("ising_equivalence");
    auto show = [&](const char* what, const ws::RateAuditReport& r) {
        rep.check(r.clean(), "%s: %zu states, %zu spin moves, %zu wall moves, %zu mismatches, %zu rate-form, %zu monotonicity",
                  what, r.states, r.ising_moves, r.wall_moves, r.mismatches, r.rate_form_mismatches,
                  r.monotonicity_failures);
        for (const auto& d : r.details) rep.info("%s", d.c_str());
    };
    show("width-3 patterns, heights <= 4", ws::exhaustive_pattern_audit(4, 6));
    show("all interfaces, W=5, heights <= 4", ws::exhaustive_window_audit(5, 4));
    const auto sim = ws::simulation_audit(1000, 16, 81);
    rep.check(sim.states == 1000, "simulation audit sampled %zu states", sim.states);
    show("simulated states, W=16", sim);
    return rep.finish();
}

int flux_tail() {
    Report rep("flux_tail");
    const double t = 1024.0;
    const int L = 1024;
    const std::uint64_t n = 100000;
    const auto J = replicas<long long>(n, [&](std::uint64_t i) {
        ws::ExclusionProcess p(ws::flat_occupation(L), ws::derive_seed(91, i), false);
        p.advance_to(t);
        return p.flux();
    });
    long long max_abs = 0;
    ws::EnsembleAccumulator acc;
    for (long long j : J) {
        max_abs = std::max(max_abs, std::llabs(j));
        acc.add(static_cast<double>(j));
    }
    auto tail = [&](double threshold) {
        std::uint64_t c = 0;
        for (long long j : J) c += static_cast<double>(std::llabs(j)) > threshold ? 1 : 0;
        return static_cast<double>(c) / static_cast<double>(n);
    };
    const double scale = std::pow(t, 0.25) * std::log(t);
    std::array<double, 3> p{};
    for (int K = 1; K <= 3; ++K) p[static_cast<std::size_t>(K - 1)] = tail(K * scale);
    rep.check(p[0] > p[1] && p[1] > p[2], "P(|J| > K t^1/4 log t) for K=1,2,3 (thresholds %.1f, %.1f, %.1f): %.3g, %.3g, %.3g",
              scale, 2 * scale, 3 * scale, p[0], p[1], p[2]);
    const double sd = std::sqrt(acc.variance());
    rep.info("sd(J) = %.3f, max |J| = %lld over %llu replicas; the K=1 threshold is %.1f sd", sd, max_abs,
             static_cast<unsigned long long>(n), scale / sd);
    rep.info("P(|J| > K sd) for K=1,2,3,4: %.4g, %.4g, %.4g, %.4g", tail(sd), tail(2 * sd), tail(3 * sd), tail(4 * sd));
    return rep.finish();
}

struct Criterion {
    const char* name;
    int (*fn)();
};

const std::array<Criterion, 9> kCriteria{{
    {"exact_identities", exact_identities},
    {"small_ring_oracle", small_ring_oracle},
    {"flat_flux_variance", flat_flux_variance},
    {"product_flux_variance", product_flux_variance},
    {"free_variance", free_variance},
    {"wall_scaling", wall_scaling},
    {"pair_parity", pair_parity},
    {"ising_equivalence", ising_equivalence},
    {"flux_tail", flux_tail},
}};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wallsep acceptance runs"};
    std::vector<std::string> selected;
    bool list = false;
    app.add_option("-c,--criterion", selected, "criterion number (1-9) or name; repeatable");
    app.add_flag("--list", list, "list the criteria");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (std::size_t k = 0; k < kCriteria.size(); ++k) std::printf("%zu %s\n", k + 1, kCriteria[k].name);
        return 0;
    }
    std::vector<const Criterion*> todo;
    if (selected.empty()) {
        for (const auto& c : kCriteria) todo.push_back(&c);
    }
    for (const auto& s : selected) {
        const Criterion* found = nullptr;
        for (std::size_t k = 0; k < kCriteria.size(); ++k) {
            if (s == kCriteria[k].name || s == std::to_string(k + 1)) found = &kCriteria[k];
        }
        if (!found) {
            std::fprintf(stderr, "unknown criterion '%s'\n", s.c_str());
            return 2;
        }
        todo.push_back(found);
    }
    int failures = 0;
    for (const Criterion* c : todo) {
        try {
            failures += c->fn();
        } catch (const std::exception& e) {
            std::printf("FAIL %s (exception: %s)\n", c->name, e.what());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}
