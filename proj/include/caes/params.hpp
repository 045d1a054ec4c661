#pragma once

#include <istream>
#include <string>

namespace caes {

// Plant constants, SI units and Kelvin throughout.
struct PlantConfig {
    double V_s = 0.0;   // m3
    double A_c = 0.0;   // m2
    double c_v = 0.0;   // J/(kg K)
    double R = 0.0;     // J/(kg K)
    double k = 0.0;
    double T_RW = 0.0;  // K
    double T_in = 0.0;  // K
    double p_in = 0.0;  // Pa
    double h_a = 0.2356;
    double h_b = 0.0149;
    double rho_av = 0.0;  // kg/m3, 0 means use the mid-range default
    double mdot_in_max = 49.12;
    double mdot_in0 = 22.74;
    double mdot_in1 = 49.12;
    double mdot_out_max = 189.67;
    double mdot_out0 = 90.97;
    double mdot_out1 = 189.67;
    double p_min = 46e5;
    double p_max = 66e5;
    double P_ch_min = 15e6;  // W
    double P_ch_max = 60e6;
    double P_dch_min = 40e6;
    double P_dch_max = 290e6;
    double c_Ain = 0.0;   // kg/s per W, 0 means default
    double c_Aout = 0.0;
    double C_ch = 0.0;    // $/MWh
    double C_dch = 0.0;
    double near_empty_fraction = 0.01;  // guard threshold as a fraction of m_av0
};

struct DerivedParams {
    double m_av0 = 0.0;
    double c_p = 0.0;
    double m_s_min = 0.0;
    double m_s_max = 0.0;
    double T_s_min = 283.15;
    double T_s_max = 333.15;
    double p_mid = 0.0;
};

struct CoefficientSet {
    double dt = 0.0;
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0, a7 = 0, a8 = 0, a9 = 0, a10 = 0, a11 = 0,
           a12 = 0, a13 = 0;
    double l1 = 0, l2 = 0, l3 = 0, l4 = 0;
    double c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0, c7 = 0, c8 = 0, c9 = 0, c10 = 0, c11 = 0, c12 = 0,
           c13 = 0, c14 = 0, c15 = 0, c16 = 0, c17 = 0, c18 = 0, c19 = 0, c20 = 0, c21 = 0, c22 = 0,
           c23 = 0, c24 = 0, c25 = 0, c26 = 0, c27 = 0, c28 = 0, c29 = 0, c30 = 0, c31 = 0, c32 = 0;
    // filled by compute_coefficients, used by the steppers for guards
    double m_av0 = 0.0;
    double V_s = 0.0;
    double R = 0.0;
    double mdot_in_max = 0.0;
    double mdot_out_max = 0.0;
    double m_guard = 0.0;
};

struct CavernState {
    double T_s = 0.0;  // K
    double p_s = 0.0;  // Pa
    double m_s = 0.0;  // kg
};

// Huntorf plant values with every optional field at its default.
PlantConfig huntorf_config();

// Parses the flat `key = value unit` format. Throws std::invalid_argument
// naming the offending field or line.
PlantConfig parse_config(std::istream& in);
PlantConfig load_config(const std::string& path);

// Fills defaults (rho_av, c_Ain, c_Aout) and checks invariants.
PlantConfig resolved(const PlantConfig& cfg);
void validate_config(const PlantConfig& cfg);

DerivedParams derive_params(const PlantConfig& cfg);
CoefficientSet compute_coefficients(const PlantConfig& cfg, double dt);

CavernState state_from_pT(double p, double T, const PlantConfig& cfg);

// Relative ideal gas residual |pV - mRT| / (pV).
double ideal_gas_residual(const CavernState& s, const PlantConfig& cfg);

// bar/Pa and C/K helpers for I/O boundaries.
inline double bar_to_pa(double bar) { return bar * 1e5; }
inline double pa_to_bar(double pa) { return pa / 1e5; }
inline double c_to_k(double c) { return c + 273.15; }
inline double k_to_c(double k) { return k - 273.15; }

// Parses "60bar", "46 bar", "4.6e6Pa", "45C", "318.15 K". Bare numbers are rejected.
double parse_pressure(const std::string& text);
double parse_temperature(const std::string& text);

}  // namespace caes
