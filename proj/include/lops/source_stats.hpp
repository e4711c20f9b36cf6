#pragma once

#include <cmath>
#include <stdexcept>

#include "lops/fock.hpp"

namespace lops {

/// Photon-pair source model: Poissonian pair number with mean w per
/// detection window, at a pulsed repetition rate, feeding a post-selected
/// scheme with the given success probability.
struct SourceParams {
    double w = 0.0;
    double rep_rate_hz = 0.0;
    double scheme_success = 0.0;
};

namespace detail {

inline void check_w(double w) {
    if (!(w > 0.0)) throw std::invalid_argument("Poisson parameter w must be positive");
}

}  // namespace detail

/// p(n) = w^n e^{-w} / n!
inline double poisson_pmf(int n, double w) {
    detail::check_w(w);
    if (n < 0) throw std::invalid_argument("photon number must be non-negative");
    return std::pow(w, n) * std::exp(-w) / factorial(n);
}

/// Faint-laser double counts: the ratio of one-source-emits-a-pair events,
/// 2 p(2), to one-photon-from-each-source events, p(1)^2. The algebra
/// collapses to e^w, which is what we return -- the closed form is exact
/// where the quotient of three exp/pow evaluations would carry rounding.
/// Always exceeds 1, so faint lasers never reach a clean two-photon regime.
inline double faint_laser_bad_good_ratio(double w) {
    detail::check_w(w);
    return std::exp(w);
}

/// Heralded SPDC: conditioned on a herald, the bad/good ratio is just w,
/// which (unlike the faint-laser case) vanishes as the source is dimmed.
inline double heralded_spdc_bad_good_ratio(double w) {
    detail::check_w(w);
    return w;
}

/// good / (good + bad) for the heralded source: 1 / (1 + w).
inline double heralded_purity(double w) {
    detail::check_w(w);
    return 1.0 / (1.0 + w);
}

/// Probability that N sources each deliver exactly one pair in the same
/// window: (w e^{-w})^N = p(1)^N.
inline double n_pair_probability(double w, int n_sources) {
    detail::check_w(w);
    if (n_sources < 1) throw std::invalid_argument("need at least one source");
    return std::pow(w * std::exp(-w), n_sources);
}

struct ProductionRates {
    double double_pair_rate_hz = 0.0;
    double ghz_rate_hz = 0.0;
};

/// Event rates for the three-photon scheme fed by two pair sources:
/// double-pair coincidences at rep_rate * p(1)^2, GHZ output after the
/// post-selection filter.
inline ProductionRates ghz_production_rate(const SourceParams& p) {
    detail::check_w(p.w);
    if (!(p.rep_rate_hz > 0.0)) throw std::invalid_argument("repetition rate must be positive");
    if (!(p.scheme_success > 0.0 && p.scheme_success <= 1.0)) {
        throw std::invalid_argument("scheme success probability must lie in (0, 1]");
    }
    const double double_pair = p.rep_rate_hz * n_pair_probability(p.w, 2);
    return {double_pair, double_pair * p.scheme_success};
}

}  // namespace lops
