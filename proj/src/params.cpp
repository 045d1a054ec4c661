#include "caes/params.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace caes {

namespace {

enum class Dim { volume, area, specific_heat, ratio, temperature, pressure, heat_coeff, density,
                 mass_flow, power, flow_per_power, cost, fraction };

struct Field {
    double PlantConfig::*member;
    Dim dim;
    bool required;
};

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> t = {
        {"V_s", {&PlantConfig::V_s, Dim::volume, true}},
        {"A_c", {&PlantConfig::A_c, Dim::area, true}},
        {"c_v", {&PlantConfig::c_v, Dim::specific_heat, true}},
        {"R", {&PlantConfig::R, Dim::specific_heat, true}},
        {"k", {&PlantConfig::k, Dim::ratio, true}},
        {"T_RW", {&PlantConfig::T_RW, Dim::temperature, true}},
        {"T_in", {&PlantConfig::T_in, Dim::temperature, true}},
        {"p_in", {&PlantConfig::p_in, Dim::pressure, true}},
        {"C_ch", {&PlantConfig::C_ch, Dim::cost, true}},
        {"C_dch", {&PlantConfig::C_dch, Dim::cost, true}},
        {"h_a", {&PlantConfig::h_a, Dim::heat_coeff, false}},
        {"h_b", {&PlantConfig::h_b, Dim::heat_coeff, false}},
        {"rho_av", {&PlantConfig::rho_av, Dim::density, false}},
        {"mdot_in_max", {&PlantConfig::mdot_in_max, Dim::mass_flow, false}},
        {"mdot_in0", {&PlantConfig::mdot_in0, Dim::mass_flow, false}},
        {"mdot_in1", {&PlantConfig::mdot_in1, Dim::mass_flow, false}},
        {"mdot_out_max", {&PlantConfig::mdot_out_max, Dim::mass_flow, false}},
        {"mdot_out0", {&PlantConfig::mdot_out0, Dim::mass_flow, false}},
        {"mdot_out1", {&PlantConfig::mdot_out1, Dim::mass_flow, false}},
        {"p_min", {&PlantConfig::p_min, Dim::pressure, false}},
        {"p_max", {&PlantConfig::p_max, Dim::pressure, false}},
        {"P_ch_min", {&PlantConfig::P_ch_min, Dim::power, false}},
        {"P_ch_max", {&PlantConfig::P_ch_max, Dim::power, false}},
        {"P_dch_min", {&PlantConfig::P_dch_min, Dim::power, false}},
        {"P_dch_max", {&PlantConfig::P_dch_max, Dim::power, false}},
        {"c_Ain", {&PlantConfig::c_Ain, Dim::flow_per_power, false}},
        {"c_Aout", {&PlantConfig::c_Aout, Dim::flow_per_power, false}},
        {"near_empty_fraction", {&PlantConfig::near_empty_fraction, Dim::fraction, false}},
    };
    return t;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Splits "66 bar" / "66bar" / "4.6e6" into number and unit token.
bool split_number(const std::string& text, double& value, std::string& unit) {
    std::string s = trim(text);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto r = std::from_chars(first, last, value);
    if (r.ec != std::errc() || !std::isfinite(value)) return false;
    unit = trim(std::string(r.ptr, last));
    return true;
}

double apply_unit(Dim dim, double v, const std::string& unit, const std::string& key) {
    auto bad = [&]() -> double {
        throw std::invalid_argument("config field '" + key + "': unsupported unit '" + unit + "'");
    };
    switch (dim) {
        case Dim::volume: return unit == "m3" ? v : bad();
        case Dim::area: return unit == "m2" ? v : bad();
        case Dim::specific_heat: return (unit == "J/kgK" || unit == "J/(kg K)" || unit == "J/(kg*K)") ? v : bad();
        case Dim::ratio: return unit.empty() ? v : bad();
        case Dim::fraction: return unit.empty() ? v : bad();
        case Dim::temperature:
            if (unit == "K") return v;
            if (unit == "C") return c_to_k(v);
            return bad();
        case Dim::pressure:
            if (unit == "Pa") return v;
            if (unit == "bar") return bar_to_pa(v);
            if (unit == "MPa") return v * 1e6;
            return bad();
        case Dim::heat_coeff: return (unit.empty() || unit == "W/m3K") ? v : bad();
        case Dim::density: return unit == "kg/m3" ? v : bad();
        case Dim::mass_flow: return unit == "kg/s" ? v : bad();
        case Dim::power:
            if (unit == "W") return v;
            if (unit == "MW") return v * 1e6;
            return bad();
        case Dim::flow_per_power:
            if (unit == "kg/s/W") return v;
            if (unit == "kg/s/MW") return v / 1e6;
            return bad();
        case Dim::cost: return unit == "$/MWh" ? v : bad();
    }
    return bad();
}

}  // namespace

PlantConfig huntorf_config() {
    PlantConfig c;
    c.V_s = 141000.0;
    c.A_c = 25000.0;
    c.c_v = 718.3;
    c.R = 286.7;
    c.k = 1.4;
    c.T_RW = c_to_k(40.0);
    c.T_in = c_to_k(50.0);
    c.p_in = bar_to_pa(66.0);
    c.C_ch = 3.0;
    c.C_dch = 3.0;
    return resolved(c);
}

PlantConfig parse_config(std::istream& in) {
    PlantConfig cfg;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value unit'");
        std::string key = trim(line.substr(0, eq));
        std::string rhs = trim(line.substr(eq + 1));
        auto it = field_table().find(key);
        if (it == field_table().end())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw std::invalid_argument("config field '" + key + "' given twice");
        double v = 0.0;
        std::string unit;
        if (!split_number(rhs, v, unit))
            throw std::invalid_argument("config field '" + key + "': cannot parse value '" + rhs + "'");
        cfg.*(it->second.member) = apply_unit(it->second.dim, v, unit, key);
    }
    for (const auto& [key, f] : field_table()) {
        if (f.required && !seen.count(key))
            throw std::invalid_argument("config field '" + key + "' is missing");
    }
    return resolved(cfg);
}

PlantConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(f);
}

PlantConfig resolved(const PlantConfig& in) {
    PlantConfig cfg = in;
    if (cfg.rho_av == 0.0 && cfg.R > 0 && cfg.T_RW > 0)
        cfg.rho_av = 0.5 * (cfg.p_min + cfg.p_max) / (cfg.R * cfg.T_RW);
    if (cfg.c_Ain == 0.0 && cfg.P_ch_max > 0) cfg.c_Ain = cfg.mdot_in_max / cfg.P_ch_max;
    if (cfg.c_Aout == 0.0 && cfg.P_dch_max > 0) cfg.c_Aout = cfg.mdot_out_max / cfg.P_dch_max;
    validate_config(cfg);
    return cfg;
}

void validate_config(const PlantConfig& cfg) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("config field '") + name + "' must be positive");
    };
    positive(cfg.V_s, "V_s");
    positive(cfg.A_c, "A_c");
    positive(cfg.c_v, "c_v");
    positive(cfg.R, "R");
    positive(cfg.T_RW, "T_RW");
    positive(cfg.T_in, "T_in");
    positive(cfg.p_in, "p_in");
    positive(cfg.h_a, "h_a");
    positive(cfg.h_b, "h_b");
    positive(cfg.rho_av, "rho_av");
    positive(cfg.mdot_in_max, "mdot_in_max");
    positive(cfg.mdot_in0, "mdot_in0");
    positive(cfg.mdot_in1, "mdot_in1");
    positive(cfg.mdot_out_max, "mdot_out_max");
    positive(cfg.mdot_out0, "mdot_out0");
    positive(cfg.mdot_out1, "mdot_out1");
    positive(cfg.p_min, "p_min");
    positive(cfg.p_max, "p_max");
    positive(cfg.P_ch_min, "P_ch_min");
    positive(cfg.P_ch_max, "P_ch_max");
    positive(cfg.P_dch_min, "P_dch_min");
    positive(cfg.P_dch_max, "P_dch_max");
    positive(cfg.c_Ain, "c_Ain");
    positive(cfg.c_Aout, "c_Aout");
    positive(cfg.near_empty_fraction, "near_empty_fraction");
    if (cfg.C_ch < 0.0) throw std::invalid_argument("config field 'C_ch' must not be negative");
    if (cfg.C_dch < 0.0) throw std::invalid_argument("config field 'C_dch' must not be negative");
    if (!(cfg.k > 1.0)) throw std::invalid_argument("config field 'k' must exceed 1");
    if (!(cfg.p_min < cfg.p_max)) throw std::invalid_argument("config fields 'p_min'/'p_max': p_min must be below p_max");
    if (!(cfg.mdot_in1 <= cfg.mdot_in_max)) throw std::invalid_argument("config field 'mdot_in1' exceeds mdot_in_max");
    if (!(cfg.mdot_out1 <= cfg.mdot_out_max)) throw std::invalid_argument("config field 'mdot_out1' exceeds mdot_out_max");
    if (!(cfg.P_ch_min <= cfg.P_ch_max)) throw std::invalid_argument("config field 'P_ch_min' exceeds P_ch_max");
    if (!(cfg.P_dch_min <= cfg.P_dch_max)) throw std::invalid_argument("config field 'P_dch_min' exceeds P_dch_max");
}

DerivedParams derive_params(const PlantConfig& cfg) {
    DerivedParams d;
    d.m_av0 = cfg.rho_av * cfg.V_s;
    d.c_p = cfg.k * cfg.c_v;
    d.p_mid = 0.5 * (cfg.p_min + cfg.p_max);
    d.m_s_min = cfg.p_min * cfg.V_s / (cfg.R * d.T_s_max);
    d.m_s_max = cfg.p_max * cfg.V_s / (cfg.R * d.T_s_min);
    return d;
}

CoefficientSet compute_coefficients(const PlantConfig& cfg, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (cfg.mdot_in1 == cfg.mdot_in0) throw std::domain_error("degenerate linearization: mdot_in1 equals mdot_in0");
    if (cfg.mdot_out1 == cfg.mdot_out0) throw std::domain_error("degenerate linearization: mdot_out1 equals mdot_out0");
    using std::pow;
    const double V = cfg.V_s, cv = cfg.c_v, k = cfg.k, R = cfg.R;
    const double TRW = cfg.T_RW, Tin = cfg.T_in, pin = cfg.p_in;
    const double ha = cfg.h_a, hb = cfg.h_b;
    const double mi0 = cfg.mdot_in0, mi1 = cfg.mdot_in1, mo0 = cfg.mdot_out0, mo1 = cfg.mdot_out1;
    const double rho = cfg.rho_av;
    const double m0 = rho * V;

    CoefficientSet c;
    c.dt = dt;
    c.a1 = V / cv * (k - 2) * dt * dt / (2 * m0);
    c.a2 = pow(R, k) * pow(Tin, k) / (pow(V, k) * pow(pin, k - 1));
    c.a3 = pow(R, k - 1) * pow(Tin, k) / (pow(V, k - 1) * pow(pin, k - 1));
    c.a4 = ha * V * dt / (m0 * cv);
    c.l1 = (pow(mi1, 0.8) - pow(mi0, 0.8)) / (mi1 - mi0);
    c.l2 = (pow(mi1, 1.8) - pow(mi0, 1.8)) / (mi1 - mi0);
    c.l3 = (pow(mo1, 0.8) - pow(mo0, 0.8)) / (mo1 - mo0);
    c.l4 = (pow(mo1, 1.8) - pow(mo0, 1.8)) / (mo1 - mo0);
    c.a5 = hb * pow(mi0, 1.8) - hb * c.l2 * mi0;
    c.a6 = V * dt / cv;
    c.a7 = V * dt * dt / (2 * m0 * cv) * (k - 1);
    c.a8 = R * TRW * dt / cv;
    c.a9 = R * dt * dt / (2 * cv) * (k - 1);
    c.a10 = R * dt / cv;
    c.a11 = dt * dt / (cv * rho);
    c.a12 = R * TRW * dt / cv;
    c.a13 = V / (2 * cv) * c.a3 * dt * dt * pow(m0, k - 3);

    const double a1 = c.a1, a2 = c.a2, a3 = c.a3, a4 = c.a4, a5 = c.a5, a6 = c.a6, a7 = c.a7,
                 a8 = c.a8, a9 = c.a9, a10 = c.a10, a11 = c.a11, a12 = c.a12, a13 = c.a13;
    const double l1 = c.l1, l2 = c.l2, l3 = c.l3, l4 = c.l4;
    const double mi0_08 = pow(mi0, 0.8), mi0_18 = pow(mi0, 1.8);
    const double mo0_08 = pow(mo0, 0.8), mo0_18 = pow(mo0, 1.8);

    // charge, temperature
    c.c2 = (k - 2) * dt - V / cv * hb * dt * l1 - a1 * hb * l2 - a1 * ha;
    c.c3 = a3 * dt * (k - 1) * pow(m0, k - 2) - a13 * (hb * l2 + ha) * (k - 2);
    c.c4 = a3 * dt * pow(m0, k - 1) + V / cv * hb * TRW * dt * l1 - a3 * dt * (k - 1) * pow(m0, k - 1) -
           a13 * (hb * l2 + ha) * (3 - k) * m0;
    c.c5 = V / cv * (hb * dt * l1 * mi0 - hb * dt * mi0_08 - ha * dt) - a1 * hb * mi0_18 + a1 * hb * l2 * mi0;
    c.c6 = -a13 * a5 * (k - 2);
    c.c7 = V / cv * TRW * (dt * hb * mi0_08 - dt * hb * l1 * mi0 + ha * dt) - a13 * a5 * (3 - k) * m0;
    // charge, pressure
    c.c8 = (k - 1) * dt - a11 * ha - 0.5 * a11 * (k - 2) * (ha + hb * l2) - dt * V * hb * l1 / cv - a11 * hb * l2;
    c.c9 = a2 * dt * k * pow(m0, k - 1) + a12 * hb * l1;
    c.c10 = a2 * dt * (1 - k) * pow(m0, k) + a12 * ha * dt + a12 * dt * hb * l2;
    c.c11 = a12 * (hb * mi0_08 - hb * l1 * mi0 + ha);
    c.c12 = -((V * hb * mi0_08 + ha * V - V * hb * l1 * mi0) * dt / cv + a11 * hb * (mi0_18 - l2 * mi0) +
              0.5 * a11 * (k - 2) * hb * (mi0_18 - l2 * mi0));
    c.c13 = a12 * dt * hb * (mi0_18 - l2 * mi0);
    // discharge, temperature
    c.c14 = a7 * (ha + hb * l4) - (k - 1) * dt - a6 * hb * l3;
    c.c15 = a6 * hb * l3 * TRW;
    c.c16 = a7 * (hb * mo0_18 - hb * l4 * mo0) - a6 * (ha + hb * mo0_08 - hb * l3 * mo0);
    c.c17 = a6 * TRW * (ha + hb * mo0_08 - hb * l3 * mo0);
    // discharge, pressure
    c.c18 = -(k * dt + a10 * V * hb / R * l3);
    c.c19 = -a10 * ha;
    c.c20 = a10 * dt * ha + a9 * ha + (a10 * dt * hb + a9 * hb) * l4;
    c.c21 = -a8 * dt * hb * l3;
    c.c22 = a8 * hb * l3;
    c.c23 = -a8 * dt * (ha + hb * mo0_08 - hb * l3 * mo0);
    c.c24 = a8 * (ha + hb * mo0_08 - hb * l3 * mo0);
    c.c25 = -a10 * V * hb / R * (mo0_08 - l3 * mo0);
    c.c26 = (a10 * dt * hb + a9 * hb) * (mo0_18 - l4 * mo0);
    // idle
    const double e = std::exp(-a4);
    c.c27 = a4 * e / m0;
    c.c28 = e - a4 * e;
    c.c29 = -TRW * a4 * e / m0;
    c.c30 = -TRW * (e - a4 * e - 1);
    c.c31 = -R * TRW * a4 * e / (m0 * V);
    c.c32 = (1 - e + a4 * e) * R * TRW / V;

    c.m_av0 = m0;
    c.V_s = V;
    c.R = R;
    c.mdot_in_max = cfg.mdot_in_max;
    c.mdot_out_max = cfg.mdot_out_max;
    c.m_guard = cfg.near_empty_fraction * m0;
    return c;
}

CavernState state_from_pT(double p, double T, const PlantConfig& cfg) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("state_from_pT: pressure must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("state_from_pT: temperature must be positive");
    return CavernState{T, p, p * cfg.V_s / (cfg.R * T)};
}

double ideal_gas_residual(const CavernState& s, const PlantConfig& cfg) {
    const double pv = s.p_s * cfg.V_s;
    return std::abs(pv - s.m_s * cfg.R * s.T_s) / pv;
}

namespace {
double parse_quantity(const std::string& text, Dim dim, const char* what) {
    double v = 0.0;
    std::string unit;
    if (!split_number(text, v, unit) || unit.empty())
        throw std::invalid_argument(std::string("cannot parse ") + what + " '" + text + "' (unit required)");
    return apply_unit(dim, v, unit, what);
}
}  // namespace

double parse_pressure(const std::string& text) { return parse_quantity(text, Dim::pressure, "pressure"); }
double parse_temperature(const std::string& text) { return parse_quantity(text, Dim::temperature, "temperature"); }

}  // namespace caes
