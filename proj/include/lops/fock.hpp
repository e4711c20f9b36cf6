#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lops {

using Complex = std::complex<double>;

/// Amplitudes at or below this magnitude are dropped after every
/// linear-algebra pass; 1/sqrt(2)-algebra only ever accumulates float
/// error orders of magnitude below it.
inline constexpr double kAmplitudeTol = 1e-12;

/// Linear polarization of a photonic mode. H is the 0-degree axis,
/// V the 90-degree axis; other linear polarizations are superpositions,
/// never extra modes.
enum class Pol : std::uint8_t { H = 0, V = 1 };

inline char pol_char(Pol p) { return p == Pol::H ? 'H' : 'V'; }

inline Pol pol_from_char(char c) {
    if (c == 'H') return Pol::H;
    if (c == 'V') return Pol::V;
    throw std::invalid_argument(std::string("unknown polarization '") + c + "'");
}

/// One photonic mode: a spatial path label plus a polarization.
struct ModeId {
    std::string spatial;
    Pol pol;

    friend auto operator<=>(const ModeId&, const ModeId&) = default;
};

inline ModeId mode_h(std::string spatial) { return {std::move(spatial), Pol::H}; }
inline ModeId mode_v(std::string spatial) { return {std::move(spatial), Pol::V}; }

/// The declared set of spatial labels of a circuit. Each label carries an
/// H and a V mode; modes are totally ordered (lexicographic on the spatial
/// label, then H before V) so occupation vectors are canonical.
class ModeRegistry {
public:
    ModeRegistry() = default;

    explicit ModeRegistry(std::vector<std::string> spatial) {
        std::sort(spatial.begin(), spatial.end());
        auto dup = std::adjacent_find(spatial.begin(), spatial.end());
        if (dup != spatial.end()) {
            throw std::invalid_argument("duplicate spatial label '" + *dup + "'");
        }
        spatial_ = std::move(spatial);
    }

    std::size_t num_spatial() const { return spatial_.size(); }
    std::size_t num_modes() const { return 2 * spatial_.size(); }
    const std::vector<std::string>& spatial_labels() const { return spatial_; }

    bool has_spatial(const std::string& s) const {
        return std::binary_search(spatial_.begin(), spatial_.end(), s);
    }

    std::size_t spatial_index(const std::string& s) const {
        auto it = std::lower_bound(spatial_.begin(), spatial_.end(), s);
        if (it == spatial_.end() || *it != s) {
            throw std::invalid_argument("unknown spatial mode '" + s + "'");
        }
        return static_cast<std::size_t>(it - spatial_.begin());
    }

    std::size_t mode_index(const ModeId& m) const {
        return 2 * spatial_index(m.spatial) + (m.pol == Pol::V ? 1 : 0);
    }

    ModeId mode_at(std::size_t index) const {
        if (index >= num_modes()) throw std::out_of_range("mode index out of range");
        return {spatial_[index / 2], index % 2 ? Pol::V : Pol::H};
    }

    friend bool operator==(const ModeRegistry&, const ModeRegistry&) = default;

private:
    std::vector<std::string> spatial_;
};

/// Photon counts per registry mode, dense and in canonical mode order.
/// Comparison is lexicographic, so map keys are canonical.
struct Occupation {
    std::vector<int> counts;

    int total() const { return std::accumulate(counts.begin(), counts.end(), 0); }

    friend auto operator<=>(const Occupation&, const Occupation&) = default;
};

inline Occupation empty_occupation(const ModeRegistry& reg) {
    return Occupation{std::vector<int>(reg.num_modes(), 0)};
}

/// Occupation with the given per-mode counts; unspecified modes hold zero.
inline Occupation occupation_of(const ModeRegistry& reg,
                                const std::vector<std::pair<ModeId, int>>& counts) {
    Occupation occ = empty_occupation(reg);
    for (const auto& [mode, n] : counts) {
        if (n < 0) throw std::invalid_argument("negative photon count");
        occ.counts[reg.mode_index(mode)] += n;
    }
    return occ;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// Sparse multi-photon state: complex amplitude per occupation vector.
///
/// Basis kets are orthonormal with the convention
/// |n1..nm> = prod_j (adag_j)^(n_j) / sqrt(n_j!) |vac>. A default-constructed
/// state (no terms) is the zero vector, not the vacuum; physical states carry
/// squared norm 1 and post-selected projections are sub-normalized. Values are
/// immutable once built; every operation below is a pure function.
class FockState {
public:
    FockState() = default;

    explicit FockState(ModeRegistry registry) : registry_(std::move(registry)) {}

    FockState(ModeRegistry registry, std::map<Occupation, Complex> terms)
        : registry_(std::move(registry)), terms_(std::move(terms)) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (it->first.counts.size() != registry_.num_modes()) {
                throw std::invalid_argument("occupation length does not match registry");
            }
            for (int c : it->first.counts) {
                if (c < 0) throw std::invalid_argument("negative photon count");
            }
            it = std::abs(it->second) <= kAmplitudeTol ? terms_.erase(it) : std::next(it);
        }
    }

    const ModeRegistry& registry() const { return registry_; }
    const std::map<Occupation, Complex>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Complex amplitude(const Occupation& occ) const {
        auto it = terms_.find(occ);
        return it == terms_.end() ? Complex{0.0, 0.0} : it->second;
    }

private:
    ModeRegistry registry_;
    std::map<Occupation, Complex> terms_;
};

/// |vac>: amplitude 1 on the all-zero occupation.
inline FockState vacuum_state(const ModeRegistry& reg) {
    std::map<Occupation, Complex> terms;
    terms.emplace(empty_occupation(reg), Complex{1.0, 0.0});
    return FockState(reg, std::move(terms));
}

/// One photon in the given mode, nothing anywhere else.
inline FockState single_photon(const ModeId& mode, const ModeRegistry& reg) {
    std::map<Occupation, Complex> terms;
    Occupation occ = empty_occupation(reg);
    occ.counts[reg.mode_index(mode)] = 1;
    terms.emplace(std::move(occ), Complex{1.0, 0.0});
    return FockState(reg, std::move(terms));
}

inline void require_same_registry(const FockState& a, const FockState& b) {
    if (!(a.registry() == b.registry())) {
        throw std::invalid_argument("states live on different mode registries");
    }
}

/// Product of two states on one registry. Occupations add termwise; when a
/// mode receives n and m photons from the two factors the amplitudes pick up
/// the bosonic factor sqrt(C(n+m, n)), since
/// (adag)^n/sqrt(n!) (adag)^m/sqrt(m!) |vac> = sqrt(C(n+m,n)) |n+m>.
inline FockState tensor_product(const FockState& a, const FockState& b) {
    require_same_registry(a, b);
    std::map<Occupation, Complex> out;
    for (const auto& [occ_a, amp_a] : a.terms()) {
        for (const auto& [occ_b, amp_b] : b.terms()) {
            Occupation occ = occ_a;
            double boson = 1.0;
            for (std::size_t j = 0; j < occ.counts.size(); ++j) {
                const int n = occ_a.counts[j];
                const int m = occ_b.counts[j];
                occ.counts[j] = n + m;
                if (n > 0 && m > 0) {
                    boson *= factorial(n + m) / (factorial(n) * factorial(m));
                }
            }
            out[std::move(occ)] += amp_a * amp_b * std::sqrt(boson);
        }
    }
    return FockState(a.registry(), std::move(out));
}

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner_product(const FockState& a, const FockState& b) {
    require_same_registry(a, b);
    Complex sum{0.0, 0.0};
    // iterate the smaller term map
    const FockState& small = a.terms().size() <= b.terms().size() ? a : b;
    const FockState& large = a.terms().size() <= b.terms().size() ? b : a;
    const bool small_is_a = &small == &a;
    for (const auto& [occ, amp] : small.terms()) {
        const Complex other = large.amplitude(occ);
        sum += small_is_a ? std::conj(amp) * other : std::conj(other) * amp;
    }
    return sum;
}

inline double norm_squared(const FockState& s) {
    double sum = 0.0;
    for (const auto& [occ, amp] : s.terms()) sum += std::norm(amp);
    return sum;
}

inline FockState scale(const FockState& s, Complex factor) {
    std::map<Occupation, Complex> out;
    for (const auto& [occ, amp] : s.terms()) out.emplace(occ, amp * factor);
    return FockState(s.registry(), std::move(out));
}

inline FockState add(const FockState& a, const FockState& b) {
    require_same_registry(a, b);
    std::map<Occupation, Complex> out = a.terms();
    for (const auto& [occ, amp] : b.terms()) out[occ] += amp;
    return FockState(a.registry(), std::move(out));
}

/// s / |s|. The zero state is returned unchanged.
inline FockState normalized(const FockState& s) {
    const double n2 = norm_squared(s);
    if (n2 == 0.0) return s;
    return scale(s, 1.0 / std::sqrt(n2));
}

/// Product basis state of single photons (repeated modes pick up the
/// bosonic sqrt factors).
inline FockState product_state(const std::vector<ModeId>& photons, const ModeRegistry& reg) {
    FockState s = vacuum_state(reg);
    for (const ModeId& m : photons) s = tensor_product(s, single_photon(m, reg));
    return s;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// "A:H=1,B:V=2" in canonical mode order; "-" for the vacuum occupation.
inline std::string occupation_to_string(const Occupation& occ, const ModeRegistry& reg) {
    std::string out;
    for (std::size_t j = 0; j < occ.counts.size(); ++j) {
        if (occ.counts[j] == 0) continue;
        if (!out.empty()) out += ',';
        const ModeId m = reg.mode_at(j);
        out += m.spatial;
        out += ':';
        out += pol_char(m.pol);
        out += '=';
        out += std::to_string(occ.counts[j]);
    }
    return out.empty() ? "-" : out;
}

inline Occupation occupation_from_string(const std::string& text, const ModeRegistry& reg) {
    Occupation occ = empty_occupation(reg);
    if (text == "-") return occ;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.rfind(':');
        const auto eq = item.rfind('=');
        if (colon == std::string::npos || eq == std::string::npos || eq < colon + 2 ||
            eq + 1 >= item.size()) {
            throw std::invalid_argument("malformed occupation entry '" + item + "'");
        }
        const ModeId mode{item.substr(0, colon), pol_from_char(item[colon + 1])};
        const int count = std::stoi(item.substr(eq + 1));
        if (count <= 0) throw std::invalid_argument("non-positive count in '" + item + "'");
        occ.counts[reg.mode_index(mode)] += count;
    }
    return occ;
}

/// Debug text form: one term per line,
/// `<amp re> <amp im> <occupation>` with 17 significant digits.
/// Round-trips through state_from_text bit-for-bit.
inline std::string to_text(const FockState& s) {
    std::string out;
    for (const auto& [occ, amp] : s.terms()) {
        out += format_double(amp.real());
        out += ' ';
        out += format_double(amp.imag());
        out += ' ';
        out += occupation_to_string(occ, s.registry());
        out += '\n';
    }
    return out;
}

inline FockState state_from_text(const std::string& text, const ModeRegistry& reg) {
    std::map<Occupation, Complex> terms;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        double re = 0.0, im = 0.0;
        std::string occ_text;
        if (!(fields >> re >> im >> occ_text)) {
            throw std::invalid_argument("malformed state line '" + line + "'");
        }
        terms[occupation_from_string(occ_text, reg)] += Complex{re, im};
    }
    return FockState(reg, std::move(terms));
}

}  // namespace lops
