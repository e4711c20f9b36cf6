// lops: post-selected linear-optics scheme runner.
//
// Subcommands: scheme (named generators), sweep (success vs photon count),
// run (circuit file), rates (source statistics), planes (ghz3 intermediate
// states). Reports are deterministic: fixed key order, 17-significant-digit
// numbers, so identical invocations are byte-identical.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lops/circuit_file.hpp"
#include "lops/schemes.hpp"
#include "lops/source_stats.hpp"

namespace {

using lops::FockState;
using lops::SchemeResult;

enum class Format { Json, Csv, Text };

Format parse_format(const std::string& s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    return Format::Text;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string num(double v) { return lops::format_double(v); }

std::string opt_deg(const std::optional<double>& rad) {
    return rad ? num(*rad * 180.0 / M_PI) : "null";
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "null"; }

/// Terms as a JSON array, one object per line, keys in fixed order.
void emit_terms_json(std::ostream& os, const FockState& s, const std::string& indent) {
    os << "[";
    bool first = true;
    for (const auto& [occ, amp] : s.terms()) {
        os << (first ? "\n" : ",\n") << indent << "  "
           << "{\"amp_im\": " << num(amp.imag()) << ", \"amp_re\": " << num(amp.real())
           << ", \"occupation\": \"" << json_escape(occupation_to_string(occ, s.registry()))
           << "\"}";
        first = false;
    }
    if (!first) os << "\n" << indent;
    os << "]";
}

void emit_terms_text(std::ostream& os, const FockState& s) {
    for (const auto& [occ, amp] : s.terms()) {
        os << "  " << num(amp.real()) << " " << num(amp.imag()) << " "
           << occupation_to_string(occ, s.registry()) << "\n";
    }
}

void emit_result(std::ostream& os, const SchemeResult& r, Format format) {
    switch (format) {
        case Format::Json:
            os << "{\n"
               << "  \"fidelity\": " << opt_num(r.target_fidelity) << ",\n"
               << "  \"fitted_phase_deg\": " << opt_deg(r.fitted_phase) << ",\n"
               << "  \"n\": " << r.n << ",\n"
               << "  \"success_probability\": " << num(r.success_probability) << ",\n"
               << "  \"terms\": ";
            emit_terms_json(os, r.post_state, "  ");
            os << "\n}\n";
            break;
        case Format::Csv:
            os << "n,success_probability,fidelity,fitted_phase_deg\n"
               << r.n << "," << num(r.success_probability) << ","
               << (r.target_fidelity ? num(*r.target_fidelity) : "") << ","
               << (r.fitted_phase ? num(*r.fitted_phase * 180.0 / M_PI) : "") << "\n";
            break;
        case Format::Text:
            os << "n: " << r.n << "\n"
               << "success_probability: " << num(r.success_probability) << "\n"
               << "fidelity: " << (r.target_fidelity ? num(*r.target_fidelity) : "n/a") << "\n"
               << "fitted_phase_deg: "
               << (r.fitted_phase ? num(*r.fitted_phase * 180.0 / M_PI) : "n/a") << "\n"
               << "terms:\n";
            emit_terms_text(os, r.post_state);
            break;
    }
}

void emit_sweep(std::ostream& os, const std::vector<SchemeResult>& rows, Format format) {
    switch (format) {
        case Format::Json: {
            os << "[";
            bool first = true;
            for (const SchemeResult& r : rows) {
                os << (first ? "\n" : ",\n") << "  "
                   << "{\"fidelity\": " << opt_num(r.target_fidelity)
                   << ", \"fitted_phase_deg\": " << opt_deg(r.fitted_phase) << ", \"n\": " << r.n
                   << ", \"success_probability\": " << num(r.success_probability) << "}";
                first = false;
            }
            os << "\n]\n";
            break;
        }
        case Format::Csv:
            os << "n,success_probability,fidelity,fitted_phase_deg\n";
            for (const SchemeResult& r : rows) {
                os << r.n << "," << num(r.success_probability) << ","
                   << (r.target_fidelity ? num(*r.target_fidelity) : "") << ","
                   << (r.fitted_phase ? num(*r.fitted_phase * 180.0 / M_PI) : "") << "\n";
            }
            break;
        case Format::Text:
            os << "n success_probability fidelity fitted_phase_deg\n";
            for (const SchemeResult& r : rows) {
                os << r.n << " " << num(r.success_probability) << " "
                   << (r.target_fidelity ? num(*r.target_fidelity) : "n/a") << " "
                   << (r.fitted_phase ? num(*r.fitted_phase * 180.0 / M_PI) : "n/a") << "\n";
            }
            break;
    }
}

void emit_planes(std::ostream& os, const lops::Scheme& scheme, Format format) {
    const std::array<std::pair<const char*, lops::Plane>, 3> planes = {{
        {"P1", lops::Plane::P1},
        {"P2", lops::Plane::P2},
        {"P3", lops::Plane::P3},
    }};
    switch (format) {
        case Format::Json: {
            os << "{";
            bool first = true;
            for (const auto& [name, plane] : planes) {
                os << (first ? "\n" : ",\n") << "  \"" << name << "\": ";
                emit_terms_json(os, lops::plane_state(scheme, plane), "  ");
                first = false;
            }
            os << "\n}\n";
            break;
        }
        case Format::Csv:
            os << "plane,amp_re,amp_im,occupation\n";
            for (const auto& [name, plane] : planes) {
                const FockState s = lops::plane_state(scheme, plane);
                for (const auto& [occ, amp] : s.terms()) {
                    // occupation strings contain commas, so the column is quoted
                    os << name << "," << num(amp.real()) << "," << num(amp.imag()) << ",\""
                       << occupation_to_string(occ, s.registry()) << "\"\n";
                }
            }
            break;
        case Format::Text:
            for (const auto& [name, plane] : planes) {
                os << name << ":\n";
                emit_terms_text(os, lops::plane_state(scheme, plane));
            }
            break;
    }
}

struct RatesReport {
    lops::SourceParams params;
    lops::ProductionRates rates;
    double purity = 0.0;
    double faint_ratio = 0.0;
    double heralded_ratio = 0.0;
};

void emit_rates(std::ostream& os, const RatesReport& r, Format format) {
    switch (format) {
        case Format::Json:
            os << "{\n"
               << "  \"double_pair_rate_hz\": " << num(r.rates.double_pair_rate_hz) << ",\n"
               << "  \"faint_laser_bad_good_ratio\": " << num(r.faint_ratio) << ",\n"
               << "  \"ghz_rate_hz\": " << num(r.rates.ghz_rate_hz) << ",\n"
               << "  \"heralded_bad_good_ratio\": " << num(r.heralded_ratio) << ",\n"
               << "  \"purity\": " << num(r.purity) << ",\n"
               << "  \"rep_rate_hz\": " << num(r.params.rep_rate_hz) << ",\n"
               << "  \"scheme_success\": " << num(r.params.scheme_success) << ",\n"
               << "  \"w\": " << num(r.params.w) << "\n"
               << "}\n";
            break;
        case Format::Csv:
            os << "w,rep_rate_hz,scheme_success,double_pair_rate_hz,ghz_rate_hz,purity,"
                  "faint_laser_bad_good_ratio,heralded_bad_good_ratio\n"
               << num(r.params.w) << "," << num(r.params.rep_rate_hz) << ","
               << num(r.params.scheme_success) << "," << num(r.rates.double_pair_rate_hz) << ","
               << num(r.rates.ghz_rate_hz) << "," << num(r.purity) << "," << num(r.faint_ratio)
               << "," << num(r.heralded_ratio) << "\n";
            break;
        case Format::Text:
            os << "w: " << num(r.params.w) << "\n"
               << "rep_rate_hz: " << num(r.params.rep_rate_hz) << "\n"
               << "scheme_success: " << num(r.params.scheme_success) << "\n"
               << "double_pair_rate_hz: " << num(r.rates.double_pair_rate_hz) << "\n"
               << "ghz_rate_hz: " << num(r.rates.ghz_rate_hz) << "\n"
               << "purity: " << num(r.purity) << "\n"
               << "faint_laser_bad_good_ratio: " << num(r.faint_ratio) << "\n"
               << "heralded_bad_good_ratio: " << num(r.heralded_ratio) << "\n";
            break;
    }
}

lops::Wp1Convention parse_wp1(const std::string& s) {
    return s == "hwp" ? lops::Wp1Convention::PlainHwp : lops::Wp1Convention::Rotation;
}

constexpr const char* kWp1Help = "arm-1 waveplate convention";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"post-selected linear-optics scheme simulator"};
    app.require_subcommand(1);
    std::string format_name = "text";
    app.add_option("--format", format_name, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}));

    auto* scheme_cmd = app.add_subcommand("scheme", "run a named generator scheme");
    scheme_cmd->fallthrough();
    std::string scheme_name;
    int scheme_n = 3;
    std::string wp1_name = "rotation";
    scheme_cmd->add_option("--name", scheme_name, "bell or ghz")
        ->required()
        ->check(CLI::IsMember({"bell", "ghz"}));
    scheme_cmd->add_option("--n", scheme_n, "photon count for ghz (>= 2)");
    scheme_cmd->add_option("--wp1", wp1_name, kWp1Help)
        ->check(CLI::IsMember({"rotation", "hwp"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "success probability for n = 2..n_max");
    sweep_cmd->fallthrough();
    int n_max = 0;
    sweep_cmd->add_option("--n-max", n_max, "largest photon count (2..10)")->required();
    sweep_cmd->add_option("--wp1", wp1_name, kWp1Help)
        ->check(CLI::IsMember({"rotation", "hwp"}));

    auto* run_cmd = app.add_subcommand("run", "execute a circuit file");
    run_cmd->fallthrough();
    std::string file_path;
    run_cmd->add_option("--file", file_path, "circuit JSON file")->required();

    auto* rates_cmd = app.add_subcommand("rates", "photon-source statistics and event rates");
    rates_cmd->fallthrough();
    double w = 0.01;
    double rep_rate = 8e7;
    int rates_n = 3;
    rates_cmd->add_option("--w", w, "Poisson pair parameter per window");
    rates_cmd->add_option("--rep-rate", rep_rate, "pulse repetition rate in Hz");
    rates_cmd->add_option("--n", rates_n, "GHZ size; scheme success is 2^(1-n)");

    auto* planes_cmd = app.add_subcommand("planes", "ghz3 intermediate-plane states");
    planes_cmd->fallthrough();
    planes_cmd->add_option("--wp1", wp1_name, kWp1Help)
        ->check(CLI::IsMember({"rotation", "hwp"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const Format format = parse_format(format_name);
    try {
        if (*scheme_cmd) {
            const SchemeResult r = scheme_name == "bell"
                                       ? lops::run_scheme(lops::bell_scheme())
                                       : lops::run_scheme(lops::ghzn_scheme(scheme_n, parse_wp1(wp1_name)));
            emit_result(std::cout, r, format);
        } else if (*sweep_cmd) {
            if (n_max < 2 || n_max > 10) {
                throw std::invalid_argument("--n-max must lie in 2..10");
            }
            std::vector<SchemeResult> rows;
            for (int n = 2; n <= n_max; ++n) {
                rows.push_back(lops::run_scheme(lops::ghzn_scheme(n, parse_wp1(wp1_name))));
            }
            emit_sweep(std::cout, rows, format);
        } else if (*run_cmd) {
            std::ifstream in(file_path);
            if (!in) throw std::runtime_error("cannot open file: " + file_path);
            std::stringstream buffer;
            buffer << in.rdbuf();
            const lops::CircuitFile file = lops::parse_circuit(buffer.str());
            emit_result(std::cout, lops::run_scheme(lops::circuit_to_scheme(file)), format);
        } else if (*rates_cmd) {
            if (rates_n < 2) throw std::invalid_argument("--n must be at least 2");
            lops::SourceParams params{w, rep_rate, std::pow(2.0, 1 - rates_n)};
            RatesReport report{params, lops::ghz_production_rate(params),
                               lops::heralded_purity(w), lops::faint_laser_bad_good_ratio(w),
                               lops::heralded_spdc_bad_good_ratio(w)};
            emit_rates(std::cout, report, format);
        } else if (*planes_cmd) {
            emit_planes(std::cout, lops::ghz3_scheme(parse_wp1(wp1_name)), format);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
