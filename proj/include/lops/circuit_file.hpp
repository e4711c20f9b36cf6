#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lops/schemes.hpp"

namespace lops {

/// Parse/validation failure; the message names the offending field path.
class CircuitFileError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// On-disk circuit description (one JSON document): declared spatial modes,
/// the input photon list, the element sequence, the coincidence rule, and
/// an optional scoring target.
struct CircuitFile {
    struct Target {
        std::string kind;  // "ghz" or "bell_psi_minus"
        std::vector<std::string> modes;
        std::optional<double> phase_deg;  // ghz only; absent means fit the phase

        bool operator==(const Target&) const = default;
    };

    std::vector<std::string> spatial_modes;
    std::vector<ModeId> input_photons;
    std::vector<ElementSpec> elements;
    std::vector<std::string> postselect;
    std::optional<Target> target;

    bool operator==(const CircuitFile&) const = default;
};

namespace detail {

using nlohmann::json;

inline const json& require_field(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw CircuitFileError(path + ": missing field \"" + key + "\"");
    return *it;
}

inline std::string require_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw CircuitFileError(path + ": expected a string");
    return j.get<std::string>();
}

inline double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw CircuitFileError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw CircuitFileError(path + ": number must be finite");
    return v;
}

inline std::vector<std::string> require_string_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw CircuitFileError(path + ": expected an array");
    std::vector<std::string> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(require_string(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline Pol require_pol(const json& j, const std::string& path) {
    const std::string s = require_string(j, path);
    if (s == "H") return Pol::H;
    if (s == "V") return Pol::V;
    throw CircuitFileError(path + ": polarization must be \"H\" or \"V\"");
}

/// Two declared labels, e.g. the "in" or "out" pair of a two-port element.
inline std::pair<std::string, std::string> require_label_pair(const json& j, const std::string& path,
                                                              const std::set<std::string>& declared) {
    const auto labels = require_string_array(j, path);
    if (labels.size() != 2) throw CircuitFileError(path + ": expected exactly 2 labels");
    for (std::size_t i = 0; i < 2; ++i) {
        if (!declared.count(labels[i])) {
            throw CircuitFileError(path + "[" + std::to_string(i) + "]: undeclared spatial mode \"" +
                                   labels[i] + "\"");
        }
    }
    return {labels[0], labels[1]};
}

inline ElementSpec parse_element(const json& j, const std::string& path,
                                 const std::set<std::string>& declared) {
    if (!j.is_object()) throw CircuitFileError(path + ": expected an object");
    const std::string kind = require_string(require_field(j, "kind", path), path + ".kind");
    auto declared_label = [&](const json& node, const std::string& p) {
        const std::string label = require_string(node, p);
        if (!declared.count(label)) {
            throw CircuitFileError(p + ": undeclared spatial mode \"" + label + "\"");
        }
        return label;
    };
    if (kind == "bs50") {
        auto [ia, ib] = require_label_pair(require_field(j, "in", path), path + ".in", declared);
        auto [oa, ob] = require_label_pair(require_field(j, "out", path), path + ".out", declared);
        return Bs50Spec{ia, ib, oa, ob};
    }
    if (kind == "pbs") {
        auto [ia, ib] = require_label_pair(require_field(j, "in", path), path + ".in", declared);
        auto [oa, ob] = require_label_pair(require_field(j, "out", path), path + ".out", declared);
        return PbsSpec{ia, ib, oa, ob};
    }
    if (kind == "hwp") {
        const std::string spatial =
            declared_label(require_field(j, "spatial", path), path + ".spatial");
        const double theta = require_number(require_field(j, "theta_deg", path), path + ".theta_deg");
        return HwpSpec{spatial, theta};
    }
    if (kind == "phase") {
        const std::string spatial =
            declared_label(require_field(j, "spatial", path), path + ".spatial");
        const Pol pol = require_pol(require_field(j, "polarization", path), path + ".polarization");
        const double phase =
            require_number(require_field(j, "phase_rad", path), path + ".phase_rad");
        return PhaseSpec{ModeId{spatial, pol}, phase};
    }
    throw CircuitFileError(path + ".kind: unknown element kind \"" + kind + "\"");
}

}  // namespace detail

inline CircuitFile parse_circuit(const std::string& text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw CircuitFileError(std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CircuitFileError("top level: expected an object");

    CircuitFile file;
    file.spatial_modes =
        detail::require_string_array(detail::require_field(j, "spatial_modes", "top level"),
                                     "spatial_modes");
    if (file.spatial_modes.empty()) throw CircuitFileError("spatial_modes: must not be empty");
    std::set<std::string> declared(file.spatial_modes.begin(), file.spatial_modes.end());
    if (declared.size() != file.spatial_modes.size()) {
        throw CircuitFileError("spatial_modes: labels must be unique");
    }

    const auto& photons = detail::require_field(j, "input_photons", "top level");
    if (!photons.is_array()) throw CircuitFileError("input_photons: expected an array");
    if (photons.empty()) throw CircuitFileError("input_photons: must not be empty");
    for (std::size_t i = 0; i < photons.size(); ++i) {
        const std::string path = "input_photons[" + std::to_string(i) + "]";
        if (!photons[i].is_object()) throw CircuitFileError(path + ": expected an object");
        const std::string spatial =
            detail::require_string(detail::require_field(photons[i], "spatial", path),
                                   path + ".spatial");
        if (!declared.count(spatial)) {
            throw CircuitFileError(path + ".spatial: undeclared spatial mode \"" + spatial + "\"");
        }
        const Pol pol = detail::require_pol(detail::require_field(photons[i], "polarization", path),
                                            path + ".polarization");
        file.input_photons.push_back(ModeId{spatial, pol});
    }

    const auto& elements = detail::require_field(j, "elements", "top level");
    if (!elements.is_array()) throw CircuitFileError("elements: expected an array");
    for (std::size_t i = 0; i < elements.size(); ++i) {
        file.elements.push_back(
            detail::parse_element(elements[i], "elements[" + std::to_string(i) + "]", declared));
    }

    file.postselect = detail::require_string_array(
        detail::require_field(j, "postselect", "top level"), "postselect");
    if (file.postselect.empty()) throw CircuitFileError("postselect: must not be empty");
    for (std::size_t i = 0; i < file.postselect.size(); ++i) {
        if (!declared.count(file.postselect[i])) {
            throw CircuitFileError("postselect[" + std::to_string(i) +
                                   "]: undeclared spatial mode \"" + file.postselect[i] + "\"");
        }
    }

    if (auto it = j.find("target"); it != j.end() && !it->is_null()) {
        const auto& t = *it;
        if (!t.is_object()) throw CircuitFileError("target: expected an object");
        CircuitFile::Target target;
        target.kind = detail::require_string(detail::require_field(t, "kind", "target"),
                                             "target.kind");
        if (target.kind != "ghz" && target.kind != "bell_psi_minus") {
            throw CircuitFileError("target.kind: must be \"ghz\" or \"bell_psi_minus\"");
        }
        target.modes = detail::require_string_array(detail::require_field(t, "modes", "target"),
                                                    "target.modes");
        for (std::size_t i = 0; i < target.modes.size(); ++i) {
            if (!declared.count(target.modes[i])) {
                throw CircuitFileError("target.modes[" + std::to_string(i) +
                                       "]: undeclared spatial mode \"" + target.modes[i] + "\"");
            }
        }
        if (target.kind == "bell_psi_minus" && target.modes.size() != 2) {
            throw CircuitFileError("target.modes: bell_psi_minus needs exactly 2 modes");
        }
        if (target.kind == "ghz" && target.modes.size() < 2) {
            throw CircuitFileError("target.modes: ghz needs at least 2 modes");
        }
        if (auto pit = t.find("phase_deg"); pit != t.end() && !pit->is_null()) {
            if (target.kind != "ghz") {
                throw CircuitFileError("target.phase_deg: only valid for kind \"ghz\"");
            }
            target.phase_deg = detail::require_number(*pit, "target.phase_deg");
        }
        file.target = std::move(target);
    }
    return file;
}

/// Canonical serialization: fixed key order, numbers at full precision, so
/// parse -> serialize -> parse is the identity on the structure.
inline std::string serialize_circuit(const CircuitFile& file) {
    using detail::json;
    json j;
    j["spatial_modes"] = file.spatial_modes;
    j["input_photons"] = json::array();
    for (const ModeId& p : file.input_photons) {
        j["input_photons"].push_back(
            {{"spatial", p.spatial}, {"polarization", std::string(1, pol_char(p.pol))}});
    }
    j["elements"] = json::array();
    for (const ElementSpec& e : file.elements) {
        json node;
        std::visit(
            [&](const auto& spec) {
                using T = std::decay_t<decltype(spec)>;
                if constexpr (std::is_same_v<T, Bs50Spec>) {
                    node = {{"kind", "bs50"},
                            {"in", {spec.in_a, spec.in_b}},
                            {"out", {spec.out_a, spec.out_b}}};
                } else if constexpr (std::is_same_v<T, PbsSpec>) {
                    node = {{"kind", "pbs"},
                            {"in", {spec.in_a, spec.in_b}},
                            {"out", {spec.out_a, spec.out_b}}};
                } else if constexpr (std::is_same_v<T, HwpSpec>) {
                    node = {{"kind", "hwp"}, {"spatial", spec.spatial},
                            {"theta_deg", spec.theta_deg}};
                } else {
                    node = {{"kind", "phase"},
                            {"spatial", spec.mode.spatial},
                            {"polarization", std::string(1, pol_char(spec.mode.pol))},
                            {"phase_rad", spec.phase_rad}};
                }
            },
            e);
        j["elements"].push_back(std::move(node));
    }
    j["postselect"] = file.postselect;
    if (file.target) {
        json t = {{"kind", file.target->kind}, {"modes", file.target->modes}};
        if (file.target->phase_deg) t["phase_deg"] = *file.target->phase_deg;
        j["target"] = std::move(t);
    }
    return j.dump(2) + "\n";
}

/// Materialize the file as an executable scheme. A "ghz" target with an
/// explicit phase_deg scores against that fixed phase; without one, the
/// phase is fitted.
inline Scheme circuit_to_scheme(const CircuitFile& file) {
    ModeRegistry reg(file.spatial_modes);
    FockState input = product_state(file.input_photons, reg);
    TargetSpec target;
    if (file.target) {
        target.modes = file.target->modes;
        if (file.target->kind == "bell_psi_minus") {
            target.kind = TargetSpec::Kind::BellPsiMinus;
        } else if (file.target->phase_deg) {
            target.kind = TargetSpec::Kind::GhzFixed;
            target.phase = *file.target->phase_deg * M_PI / 180.0;
        } else {
            target.kind = TargetSpec::Kind::GhzFitted;
        }
    }
    return Scheme{
        .registry = reg,
        .input = std::move(input),
        .elements = file.elements,
        .rule = PostSelectionRule{file.postselect},
        .target = std::move(target),
        .plane_cuts = {},
    };
}

}  // namespace lops
