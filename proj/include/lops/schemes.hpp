#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lops/analysis.hpp"
#include "lops/elements.hpp"
#include "lops/fock.hpp"
#include "lops/simulate.hpp"

namespace lops {

/// The generator's arm 1 acts on (V, H) as V -> H, H -> -V, a 90-degree
/// rotation (realized here as HWP(45) followed by a pi phase on V). A plain
/// half-wave plate at 45 degrees gives the sign-free involution V <-> H
/// instead. The two differ only in the relative phase of the final state
/// (0 vs pi), so both are offered; Rotation is the default.
enum class Wp1Convention { Rotation, PlainHwp };

enum class Plane { P1, P2, P3 };

struct TargetSpec {
    enum class Kind { None, BellPsiMinus, GhzFitted, GhzFixed };
    Kind kind = Kind::None;
    std::vector<std::string> modes;  // output spatial modes carrying the qubits
    double phase = 0.0;              // radians; used by GhzFixed only
};

struct Scheme {
    ModeRegistry registry;
    FockState input;
    std::vector<ElementSpec> elements;
    PostSelectionRule rule;
    TargetSpec target;
    // Prefix lengths of `elements` at which the named analysis planes sit;
    // empty for schemes without documented intermediate planes.
    std::vector<std::size_t> plane_cuts;
};

struct SchemeResult {
    int n = 0;                     // photon count
    double success_probability = 0.0;
    FockState post_state;          // normalized; zero state if nothing survives
    std::optional<double> target_fidelity;
    std::optional<double> fitted_phase;        // radians
    std::optional<double> fidelity_phase_zero; // against the phase-0 GHZ target
};

namespace detail {

/// WP1 as an element sequence on one spatial mode.
inline void append_wp1(std::vector<ElementSpec>& elements, const std::string& spatial,
                       Wp1Convention conv) {
    elements.push_back(HwpSpec{spatial, 45.0});
    if (conv == Wp1Convention::Rotation) {
        elements.push_back(PhaseSpec{mode_v(spatial), M_PI});
    }
}

}  // namespace detail

/// Two-photon Bell generator: |A_H, B_V> through a 50:50 BS into C and D,
/// coincidence on {C, D}. Succeeds half the time with the singlet as output.
inline Scheme bell_scheme() {
    ModeRegistry reg({"A", "B", "C", "D"});
    FockState input = product_state({mode_h("A"), mode_v("B")}, reg);
    return Scheme{
        .registry = reg,
        .input = std::move(input),
        .elements = {Bs50Spec{"A", "B", "C", "D"}},
        .rule = PostSelectionRule{{"C", "D"}},
        .target = TargetSpec{TargetSpec::Kind::BellPsiMinus, {"C", "D"}, 0.0},
        .plane_cuts = {},
    };
}

/// Three-photon GHZ generator: photons A (H), B (V) interfere on a BS into
/// arms D, E; WP1 acts on D, a 22.5-degree HWP rotates the fresh photon C,
/// and a PBS merges E with C into F, G. Coincidence on {D, F, G} succeeds
/// 1/4 of the time. Planes P1/P2/P3 sit after the BS, after both wave
/// plates, and after the PBS.
inline Scheme ghz3_scheme(Wp1Convention conv = Wp1Convention::Rotation) {
    ModeRegistry reg({"A", "B", "C", "D", "E", "F", "G"});
    FockState input = product_state({mode_h("A"), mode_v("B"), mode_v("C")}, reg);
    std::vector<ElementSpec> elements;
    elements.push_back(Bs50Spec{"A", "B", "D", "E"});
    detail::append_wp1(elements, "D", conv);
    const std::size_t p1 = 1;  // plane P1: just after the BS
    elements.push_back(HwpSpec{"C", 22.5});
    const std::size_t p2 = elements.size();
    elements.push_back(PbsSpec{"E", "C", "F", "G"});
    const std::size_t p3 = elements.size();
    return Scheme{
        .registry = reg,
        .input = std::move(input),
        .elements = std::move(elements),
        .rule = PostSelectionRule{{"D", "F", "G"}},
        .target = TargetSpec{TargetSpec::Kind::GhzFitted, {"D", "F", "G"}, 0.0},
        .plane_cuts = {p1, p2, p3},
    };
}

/// n-photon GHZ generator, the chained-PBS layout: ports A1 (H) and A2 (V)
/// interfere on a BS into B1, B2; WP1 acts on B1; then each fresh photon Ak
/// (k = 3..n), rotated by a 22.5-degree HWP, meets the running mode B_{k-1}
/// on a PBS whose second output becomes Bk. Coincidence on {B1..Bn}
/// succeeds with probability 2^{1-n}.
inline Scheme ghzn_scheme(int n, Wp1Convention conv = Wp1Convention::Rotation) {
    if (n < 2) throw std::invalid_argument("ghzn_scheme requires n >= 2");
    std::vector<std::string> labels;
    std::vector<std::string> outputs;
    for (int k = 1; k <= n; ++k) {
        labels.push_back("A" + std::to_string(k));
        labels.push_back("B" + std::to_string(k));
        outputs.push_back("B" + std::to_string(k));
    }
    ModeRegistry reg(labels);
    std::vector<ModeId> photons;
    photons.push_back(mode_h("A1"));
    for (int k = 2; k <= n; ++k) photons.push_back(mode_v("A" + std::to_string(k)));
    FockState input = product_state(photons, reg);

    std::vector<ElementSpec> elements;
    elements.push_back(Bs50Spec{"A1", "A2", "B1", "B2"});
    detail::append_wp1(elements, "B1", conv);
    for (int k = 3; k <= n; ++k) {
        const std::string ak = "A" + std::to_string(k);
        const std::string prev = "B" + std::to_string(k - 1);
        const std::string bk = "B" + std::to_string(k);
        elements.push_back(HwpSpec{ak, 22.5});
        elements.push_back(PbsSpec{prev, ak, prev, bk});
    }
    return Scheme{
        .registry = reg,
        .input = std::move(input),
        .elements = std::move(elements),
        .rule = PostSelectionRule{outputs},
        .target = TargetSpec{TargetSpec::Kind::GhzFitted, outputs, 0.0},
        .plane_cuts = {},
    };
}

/// Execute: compose the element list, evolve, post-select, and score
/// against the target. Fidelity and phase fields stay empty when nothing
/// survives post-selection.
inline SchemeResult run_scheme(const FockState& input, const std::vector<ElementSpec>& elements,
                               const PostSelectionRule& rule, const TargetSpec& target) {
    const ModeRegistry& reg = input.registry();
    const ModeUnitary u = compose(elements, reg);
    const FockState evolved = apply_unitary(input, u);
    PostSelectionOutcome outcome = post_select(evolved, rule);

    int n = 0;
    if (!input.terms().empty()) n = input.terms().begin()->first.total();

    SchemeResult result{n, outcome.probability, std::move(outcome.state), {}, {}, {}};
    if (result.success_probability == 0.0 || target.kind == TargetSpec::Kind::None) {
        return result;
    }
    switch (target.kind) {
        case TargetSpec::Kind::BellPsiMinus: {
            result.target_fidelity =
                fidelity(result.post_state, psi_minus_state(target.modes.at(0), target.modes.at(1), reg));
            break;
        }
        case TargetSpec::Kind::GhzFitted: {
            const QubitEncoding enc{target.modes};
            const PhaseFit fit = ghz_phase_fit(result.post_state, enc);
            result.fitted_phase = fit.phase;
            result.target_fidelity = fit.fidelity;
            result.fidelity_phase_zero = fidelity(result.post_state, ghz_target(enc, 0.0, reg));
            break;
        }
        case TargetSpec::Kind::GhzFixed: {
            const QubitEncoding enc{target.modes};
            result.target_fidelity =
                fidelity(result.post_state, ghz_target(enc, target.phase, reg));
            const PhaseFit fit = ghz_phase_fit(result.post_state, enc);
            result.fitted_phase = fit.phase;
            result.fidelity_phase_zero = fidelity(result.post_state, ghz_target(enc, 0.0, reg));
            break;
        }
        case TargetSpec::Kind::None:
            break;
    }
    return result;
}

inline SchemeResult run_scheme(const Scheme& s) {
    return run_scheme(s.input, s.elements, s.rule, s.target);
}

/// State at a documented analysis plane: the input evolved through the
/// element prefix ending there. Only schemes that declare planes (ghz3)
/// support this.
inline FockState plane_state(const Scheme& s, Plane plane) {
    if (s.plane_cuts.empty()) {
        throw std::invalid_argument("scheme declares no analysis planes");
    }
    const auto idx = static_cast<std::size_t>(plane);
    if (idx >= s.plane_cuts.size()) {
        throw std::invalid_argument("plane not defined for this scheme");
    }
    const std::size_t cut = s.plane_cuts[idx];
    const std::vector<ElementSpec> prefix(s.elements.begin(),
                                          s.elements.begin() + static_cast<std::ptrdiff_t>(cut));
    return apply_unitary(s.input, compose(prefix, s.registry));
}

}  // namespace lops
