#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lops/fock.hpp"

namespace lops {

/// Dual-rail qubit register: one spatial mode per qubit, logical 0 = H,
/// logical 1 = V. The first listed mode is the most significant bit.
struct QubitEncoding {
    std::vector<std::string> modes;

    std::size_t num_qubits() const { return modes.size(); }
};

/// Decode a post-selected state into a 2^n logical vector. Every term must
/// hold exactly one photon in each encoding mode and none elsewhere;
/// anything else is a dual-rail violation and an error, because the caller
/// asked for a qubit reading of a state that is not a qubit state.
inline Eigen::VectorXcd logical_vector(const FockState& s, const QubitEncoding& enc) {
    const std::size_t n = enc.num_qubits();
    if (n == 0) throw std::invalid_argument("encoding lists no modes");
    std::vector<std::size_t> spatial_idx;
    spatial_idx.reserve(n);
    for (const std::string& label : enc.modes) {
        spatial_idx.push_back(s.registry().spatial_index(label));
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(1) << n);
    for (const auto& [occ, amp] : s.terms()) {
        if (occ.total() != static_cast<int>(n)) {
            throw std::invalid_argument("dual-rail violation: photons outside the encoding modes");
        }
        std::size_t idx = 0;
        for (std::size_t q = 0; q < n; ++q) {
            const int h = occ.counts[2 * spatial_idx[q]];
            const int vcount = occ.counts[2 * spatial_idx[q] + 1];
            if (h + vcount != 1) {
                throw std::invalid_argument("dual-rail violation: mode " + enc.modes[q] +
                                            " does not hold exactly one photon");
            }
            idx = (idx << 1) | static_cast<std::size_t>(vcount);
        }
        v(static_cast<Eigen::Index>(idx)) += amp;
    }
    return v;
}

/// |GHZ_n(phi)> = (|H...H> + e^{i phi} |V...V>) / sqrt(2) over the listed
/// spatial modes. n = 2 gives the corresponding Bell state.
inline FockState ghz_target(const QubitEncoding& enc, double phase, const ModeRegistry& reg) {
    if (enc.num_qubits() < 2) throw std::invalid_argument("GHZ target needs at least 2 qubits");
    std::vector<std::pair<ModeId, int>> all_h, all_v;
    for (const std::string& label : enc.modes) {
        all_h.emplace_back(mode_h(label), 1);
        all_v.emplace_back(mode_v(label), 1);
    }
    const double r = 1.0 / std::sqrt(2.0);
    std::map<Occupation, Complex> terms;
    terms.emplace(occupation_of(reg, all_h), Complex{r, 0.0});
    terms.emplace(occupation_of(reg, all_v), std::polar(r, phase));
    return FockState(reg, std::move(terms));
}

/// |psi-> = (|H>_1 |V>_2 - |V>_1 |H>_2) / sqrt(2) over two spatial modes.
inline FockState psi_minus_state(const std::string& mode1, const std::string& mode2,
                                 const ModeRegistry& reg) {
    const double r = 1.0 / std::sqrt(2.0);
    std::map<Occupation, Complex> terms;
    terms.emplace(occupation_of(reg, {{mode_h(mode1), 1}, {mode_v(mode2), 1}}), Complex{r, 0.0});
    terms.emplace(occupation_of(reg, {{mode_v(mode1), 1}, {mode_h(mode2), 1}}), Complex{-r, 0.0});
    return FockState(reg, std::move(terms));
}

/// |<target|state>|^2 for normalized pure states. Both inputs must already
/// be normalized; a quietly unnormalized argument would silently skew the
/// answer, so it is rejected instead.
inline double fidelity(const FockState& state, const FockState& target) {
    if (std::abs(norm_squared(state) - 1.0) > 1e-9 ||
        std::abs(norm_squared(target) - 1.0) > 1e-9) {
        throw std::invalid_argument("fidelity requires normalized states");
    }
    return std::norm(inner_product(target, state));
}

struct PhaseFit {
    double phase = 0.0;     // radians, in (-pi, pi]
    double fidelity = 0.0;  // against GHZ(phase)
};

/// Best-fit GHZ phase for a logical state: phi* = arg(a_V...V) - arg(a_H...H),
/// the phase that maximizes |<GHZ(phi)|psi>|^2. Fails if both anchor
/// amplitudes vanish (the state has no GHZ component to fit).
inline PhaseFit ghz_phase_fit(const FockState& s, const QubitEncoding& enc) {
    const Eigen::VectorXcd v = logical_vector(s, enc);
    const Complex a_h = v(0);
    const Complex a_v = v(v.size() - 1);
    if (std::abs(a_h) == 0.0 && std::abs(a_v) == 0.0) {
        throw std::invalid_argument("state has no overlap with either GHZ branch");
    }
    double phase = std::arg(a_v) - std::arg(a_h);
    if (phase <= -M_PI) phase += 2.0 * M_PI;
    if (phase > M_PI) phase -= 2.0 * M_PI;
    const double overlap = 0.5 * std::norm(a_h + std::polar(1.0, -phase) * a_v);
    return {phase, overlap};
}

namespace detail {

/// sigma(theta) = cos(2 theta) Z + sin(2 theta) X: the observable measured
/// by a polarizer at angle theta from the H/V basis, eigenvalues +-1.
inline Eigen::Matrix2cd polarizer_observable(double theta_deg) {
    Eigen::Matrix2cd m;
    const double t = theta_deg * M_PI / 180.0;
    const double c = std::cos(2.0 * t);
    const double s = std::sin(2.0 * t);
    // logical basis order (|0>=H, |1>=V)
    m << c, s, s, -c;
    return m;
}

inline Eigen::VectorXcd apply_site_operator(const Eigen::VectorXcd& v,
                                            const Eigen::Matrix2cd& op, std::size_t site,
                                            std::size_t n) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    const std::size_t bit = n - 1 - site;  // site 0 is the MSB
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
        if (v(idx) == 0.0) continue;
        const std::size_t b = (static_cast<std::size_t>(idx) >> bit) & 1u;
        for (std::size_t bp = 0; bp < 2; ++bp) {
            const Complex entry = op(static_cast<Eigen::Index>(bp), static_cast<Eigen::Index>(b));
            if (entry == 0.0) continue;
            const auto target = (static_cast<std::size_t>(idx) & ~(std::size_t{1} << bit)) | (bp << bit);
            out(static_cast<Eigen::Index>(target)) += entry * v(idx);
        }
    }
    return out;
}

inline double expectation(const Eigen::VectorXcd& v, const std::vector<Eigen::Matrix2cd>& ops) {
    const std::size_t n = ops.size();
    Eigen::VectorXcd w = v;
    for (std::size_t site = 0; site < n; ++site) {
        w = apply_site_operator(w, ops[site], site, n);
    }
    return v.dot(w).real();  // Eigen's dot conjugates the left argument
}

}  // namespace detail

/// <sigma(theta_1) x ... x sigma(theta_n)> on a dual-rail qubit state:
/// each party measures with a polarizer at its own angle (degrees from H).
inline double polarizer_correlation(const FockState& s, const QubitEncoding& enc,
                                    const std::vector<double>& angles_deg) {
    if (angles_deg.size() != enc.num_qubits()) {
        throw std::invalid_argument("one polarizer angle per encoded qubit required");
    }
    const Eigen::VectorXcd v = logical_vector(s, enc);
    std::vector<Eigen::Matrix2cd> ops;
    ops.reserve(angles_deg.size());
    for (double t : angles_deg) ops.push_back(detail::polarizer_observable(t));
    return detail::expectation(v, ops);
}

/// Mermin combination M = <XXX> - <XYY> - <YXY> - <YYX> for three qubits.
/// Local realism bounds |M| by 2; |GHZ(0)> reaches 4.
inline double mermin_value(const FockState& s, const QubitEncoding& enc) {
    if (enc.num_qubits() != 3) throw std::invalid_argument("Mermin combination is for 3 qubits");
    const Eigen::VectorXcd v = logical_vector(s, enc);
    Eigen::Matrix2cd x, y;
    x << 0, 1, 1, 0;
    y << Complex{0, 0}, Complex{0, -1}, Complex{0, 1}, Complex{0, 0};
    auto term = [&](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b,
                    const Eigen::Matrix2cd& c) { return detail::expectation(v, {a, b, c}); };
    return term(x, x, x) - term(x, y, y) - term(y, x, y) - term(y, y, x);
}

}  // namespace lops
