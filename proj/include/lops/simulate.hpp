#pragma once

#include <bit>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "lops/elements.hpp"
#include "lops/fock.hpp"

namespace lops {

/// Coincidence condition: every listed spatial mode must hold exactly one
/// photon, H and V counted together. The rule never looks at polarization,
/// so projecting with it cannot destroy polarization coherence.
struct PostSelectionRule {
    std::vector<std::string> required_spatial;
};

struct PostSelectionOutcome {
    double probability = 0.0;
    FockState state;  // renormalized; the zero state when probability is 0
};

/// Evolve a state through a mode unitary exactly. Each basis term
/// |n1..nm> = prod_j (adag_j)^(n_j)/sqrt(n_j!) |vac> is expanded by
/// substituting adag_j -> sum_k U_kj adag_k photon by photon; the resulting
/// monomials prod_k (adag_k)^(m_k) |vac> collect as sqrt(prod m_k!) |m>.
/// Photon number and norm are conserved.
inline FockState apply_unitary(const FockState& s, const ModeUnitary& u) {
    if (!(s.registry() == u.registry)) {
        throw std::invalid_argument("state and unitary live on different mode registries");
    }
    const std::size_t m = s.registry().num_modes();
    std::map<Occupation, Complex> out;
    for (const auto& [occ, amp] : s.terms()) {
        double in_norm = 1.0;
        for (int n : occ.counts) in_norm *= factorial(n);

        // monomial -> coefficient, starting from the bare operator product
        std::map<Occupation, Complex> monomials;
        monomials.emplace(empty_occupation(s.registry()), amp / std::sqrt(in_norm));
        for (std::size_t j = 0; j < m; ++j) {
            for (int photon = 0; photon < occ.counts[j]; ++photon) {
                std::map<Occupation, Complex> next;
                for (const auto& [mono, coeff] : monomials) {
                    for (std::size_t k = 0; k < m; ++k) {
                        const Complex u_kj = u.matrix(static_cast<Eigen::Index>(k),
                                                      static_cast<Eigen::Index>(j));
                        if (u_kj == 0.0) continue;
                        Occupation grown = mono;
                        ++grown.counts[k];
                        next[std::move(grown)] += coeff * u_kj;
                    }
                }
                monomials = std::move(next);
            }
        }
        for (const auto& [mono, coeff] : monomials) {
            double out_norm = 1.0;
            for (int n : mono.counts) out_norm *= factorial(n);
            out[mono] += coeff * std::sqrt(out_norm);
        }
    }
    return FockState(s.registry(), std::move(out));
}

/// Keep exactly the terms satisfying the coincidence rule. The probability
/// is the squared norm of the projected state; the returned state is
/// renormalized. A zero-probability outcome is a valid result, not an error.
inline PostSelectionOutcome post_select(const FockState& s, const PostSelectionRule& rule) {
    std::vector<std::size_t> spatial_idx;
    spatial_idx.reserve(rule.required_spatial.size());
    for (const std::string& label : rule.required_spatial) {
        spatial_idx.push_back(s.registry().spatial_index(label));
    }
    std::map<Occupation, Complex> kept;
    double probability = 0.0;
    for (const auto& [occ, amp] : s.terms()) {
        bool ok = true;
        for (std::size_t si : spatial_idx) {
            if (occ.counts[2 * si] + occ.counts[2 * si + 1] != 1) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        probability += std::norm(amp);
        kept.emplace(occ, amp);
    }
    FockState projected(s.registry(), std::move(kept));
    if (probability == 0.0) return {0.0, FockState(s.registry())};
    return {probability, scale(projected, 1.0 / std::sqrt(probability))};
}

/// Permanent by Ryser's formula with Gray-code subset iteration, O(2^n n).
/// The 0x0 permanent is 1. Dimensions above 20 are refused; this is a
/// desk-scale oracle, not a production permanent.
inline Complex permanent(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("permanent requires a square matrix");
    const int n = static_cast<int>(m.rows());
    if (n > 20) throw std::invalid_argument("permanent dimension cap is 20");
    if (n == 0) return Complex{1.0, 0.0};

    std::vector<Complex> row_sum(static_cast<std::size_t>(n), Complex{0.0, 0.0});
    Complex total{0.0, 0.0};
    std::uint32_t prev_gray = 0;
    const std::uint32_t end = 1u << n;
    for (std::uint32_t iter = 1; iter < end; ++iter) {
        const std::uint32_t gray = iter ^ (iter >> 1);
        const std::uint32_t changed = gray ^ prev_gray;
        const int j = std::countr_zero(changed);
        const double direction = (gray & changed) ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i) {
            row_sum[static_cast<std::size_t>(i)] += direction * m(i, j);
        }
        Complex prod{1.0, 0.0};
        for (int i = 0; i < n; ++i) prod *= row_sum[static_cast<std::size_t>(i)];
        const int subset_size = std::popcount(gray);
        total += ((n - subset_size) % 2 == 0 ? 1.0 : -1.0) * prod;
        prev_gray = gray;
    }
    return total;
}

/// <out| U |in> via the permanent of the row/column-repeated submatrix,
///   perm(U[out|in]) / sqrt(prod in_j! prod out_k!).
/// Independent of apply_unitary; the two routes are cross-checked in the
/// test suites.
inline Complex transition_amplitude_permanent(const ModeUnitary& u,
                                              const Occupation& in,
                                              const Occupation& out) {
    const auto m = u.registry.num_modes();
    if (in.counts.size() != m || out.counts.size() != m) {
        throw std::invalid_argument("occupation length does not match registry");
    }
    if (in.total() != out.total()) {
        throw std::invalid_argument("photon numbers of in and out occupations differ");
    }
    std::vector<Eigen::Index> cols, rows;
    double denom = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (int t = 0; t < in.counts[j]; ++t) cols.push_back(static_cast<Eigen::Index>(j));
        for (int t = 0; t < out.counts[j]; ++t) rows.push_back(static_cast<Eigen::Index>(j));
        denom *= factorial(in.counts[j]) * factorial(out.counts[j]);
    }
    const auto k = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXcd sub(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            sub(r, c) = u.matrix(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
        }
    }
    return permanent(sub) / std::sqrt(denom);
}

}  // namespace lops
