#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "lops/fock.hpp"

namespace lops {

/// Linear-optical element lowered to a unitary on creation operators:
/// column j holds the image of adag_j over the registry's canonical modes.
struct ModeUnitary {
    ModeRegistry registry;
    Eigen::MatrixXcd matrix;
};

inline ModeUnitary identity_unitary(const ModeRegistry& reg) {
    const auto m = static_cast<Eigen::Index>(reg.num_modes());
    return {reg, Eigen::MatrixXcd::Identity(m, m)};
}

/// max |UdagU - I|, used by the unitarity invariants.
inline double unitarity_defect(const ModeUnitary& u) {
    const Eigen::MatrixXcd d =
        u.matrix.adjoint() * u.matrix -
        Eigen::MatrixXcd::Identity(u.matrix.rows(), u.matrix.cols());
    return d.cwiseAbs().maxCoeff();
}

namespace detail {

/// Spatial relabeling a->c, b->d as a full permutation: labels displaced by
/// the outputs are routed back to the freed input slots, in order. The
/// round-trip columns only ever act on vacuum modes in the shipped schemes;
/// they exist so the element is unitary on the whole registry.
inline std::vector<std::size_t> relabel_permutation(const ModeRegistry& reg,
                                                    const std::string& a, const std::string& b,
                                                    const std::string& c, const std::string& d) {
    std::vector<std::size_t> pi(reg.num_spatial());
    for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = i;
    const std::size_t ia = reg.spatial_index(a), ib = reg.spatial_index(b);
    const std::size_t ic = reg.spatial_index(c), id = reg.spatial_index(d);
    pi[ia] = ic;
    pi[ib] = id;
    std::vector<std::size_t> freed, displaced;
    for (std::size_t in : {ia, ib}) {
        if (in != ic && in != id) freed.push_back(in);
    }
    for (std::size_t out : {ic, id}) {
        if (out != ia && out != ib) displaced.push_back(out);
    }
    for (std::size_t k = 0; k < displaced.size(); ++k) pi[displaced[k]] = freed[k];
    return pi;
}

/// Two-port element: per-polarization 2x2 mixing on the input spatial pair,
/// followed by the output relabeling. mix maps (col a, col b) -> (row a, row b).
inline ModeUnitary two_port(const ModeRegistry& reg,
                            const std::string& a, const std::string& b,
                            const std::string& c, const std::string& d,
                            const Eigen::Matrix2cd& mix_h, const Eigen::Matrix2cd& mix_v) {
    if (a == b || c == d) {
        throw std::invalid_argument("element ports must name two distinct input and two distinct output modes");
    }
    ModeUnitary u = identity_unitary(reg);
    const std::size_t ia = reg.spatial_index(a), ib = reg.spatial_index(b);
    for (Pol p : {Pol::H, Pol::V}) {
        const Eigen::Matrix2cd& mix = p == Pol::H ? mix_h : mix_v;
        const Eigen::Index ra = static_cast<Eigen::Index>(2 * ia + (p == Pol::V));
        const Eigen::Index rb = static_cast<Eigen::Index>(2 * ib + (p == Pol::V));
        u.matrix(ra, ra) = mix(0, 0);
        u.matrix(rb, ra) = mix(1, 0);
        u.matrix(ra, rb) = mix(0, 1);
        u.matrix(rb, rb) = mix(1, 1);
    }
    const auto pi = relabel_permutation(reg, a, b, c, d);
    Eigen::MatrixXcd perm = Eigen::MatrixXcd::Zero(u.matrix.rows(), u.matrix.cols());
    for (std::size_t s = 0; s < pi.size(); ++s) {
        for (int p = 0; p < 2; ++p) {
            perm(static_cast<Eigen::Index>(2 * pi[s] + p), static_cast<Eigen::Index>(2 * s + p)) = 1.0;
        }
    }
    u.matrix = perm * u.matrix;
    return u;
}

}  // namespace detail

/// 50:50 beamsplitter mixing spatial modes a,b into c,d, polarization
/// preserving: adag_{a,p} -> (adag_{c,p} + adag_{d,p})/sqrt(2) and
/// adag_{b,p} -> (adag_{c,p} - adag_{d,p})/sqrt(2).
inline ModeUnitary beamsplitter_50(const std::string& a, const std::string& b,
                                   const std::string& c, const std::string& d,
                                   const ModeRegistry& reg) {
    Eigen::Matrix2cd mix;
    const double r = 1.0 / std::sqrt(2.0);
    mix << r, r, r, -r;
    return detail::two_port(reg, a, b, c, d, mix, mix);
}

/// Half-waveplate on one spatial mode, retardation axis at theta degrees
/// from the V (90-degree) axis. Jones matrix on (V, H):
///   V -> cos(2t) V + sin(2t) H,  H -> sin(2t) V - cos(2t) H.
/// Hermitian and involutory; at 45 degrees it swaps H and V with no sign.
inline ModeUnitary half_waveplate(const std::string& spatial, double theta_deg,
                                  const ModeRegistry& reg) {
    ModeUnitary u = identity_unitary(reg);
    const double t = 2.0 * theta_deg * M_PI / 180.0;
    const double c = std::cos(t), s = std::sin(t);
    const auto h = static_cast<Eigen::Index>(reg.mode_index(mode_h(spatial)));
    const auto v = static_cast<Eigen::Index>(reg.mode_index(mode_v(spatial)));
    u.matrix(v, v) = c;
    u.matrix(h, v) = s;
    u.matrix(v, h) = s;
    u.matrix(h, h) = -c;
    return u;
}

/// Polarizing beamsplitter routing inputs a,b to outputs c,d: the first
/// input's V and the second input's H exit the first output, the first
/// input's H and the second input's V exit the second output, all with
/// coefficient +1:
///   adag_{a,V} -> adag_{c,V},  adag_{a,H} -> adag_{d,H},
///   adag_{b,H} -> adag_{c,H},  adag_{b,V} -> adag_{d,V}.
inline ModeUnitary polarizing_beamsplitter(const std::string& a, const std::string& b,
                                           const std::string& c, const std::string& d,
                                           const ModeRegistry& reg) {
    Eigen::Matrix2cd swap_ports, keep;
    swap_ports << 0, 1, 1, 0;
    keep << 1, 0, 0, 1;
    return detail::two_port(reg, a, b, c, d, swap_ports, keep);
}

/// adag_m -> e^{i phi} adag_m on a single mode.
inline ModeUnitary phase_shift(const ModeId& mode, double phase_rad, const ModeRegistry& reg) {
    ModeUnitary u = identity_unitary(reg);
    const auto i = static_cast<Eigen::Index>(reg.mode_index(mode));
    u.matrix(i, i) = std::polar(1.0, phase_rad);
    return u;
}

struct Bs50Spec {
    std::string in_a, in_b, out_a, out_b;
    friend bool operator==(const Bs50Spec&, const Bs50Spec&) = default;
};

struct HwpSpec {
    std::string spatial;
    double theta_deg;
    friend bool operator==(const HwpSpec&, const HwpSpec&) = default;
};

struct PbsSpec {
    std::string in_a, in_b, out_a, out_b;
    friend bool operator==(const PbsSpec&, const PbsSpec&) = default;
};

struct PhaseSpec {
    ModeId mode;
    double phase_rad;
    friend bool operator==(const PhaseSpec&, const PhaseSpec&) = default;
};

using ElementSpec = std::variant<Bs50Spec, HwpSpec, PbsSpec, PhaseSpec>;

inline ModeUnitary element_unitary(const ElementSpec& spec, const ModeRegistry& reg) {
    return std::visit(
        [&](const auto& e) -> ModeUnitary {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Bs50Spec>) {
                return beamsplitter_50(e.in_a, e.in_b, e.out_a, e.out_b, reg);
            } else if constexpr (std::is_same_v<T, HwpSpec>) {
                return half_waveplate(e.spatial, e.theta_deg, reg);
            } else if constexpr (std::is_same_v<T, PbsSpec>) {
                return polarizing_beamsplitter(e.in_a, e.in_b, e.out_a, e.out_b, reg);
            } else {
                return phase_shift(e.mode, e.phase_rad, reg);
            }
        },
        spec);
}

/// Product U_k ... U_1 of a circuit's elements, first element applied first.
inline ModeUnitary compose(const std::vector<ElementSpec>& elements, const ModeRegistry& reg) {
    ModeUnitary u = identity_unitary(reg);
    for (const ElementSpec& spec : elements) {
        u.matrix = element_unitary(spec, reg).matrix * u.matrix;
    }
    return u;
}

}  // namespace lops
