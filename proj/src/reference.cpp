#include "caes/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "caes/io.hpp"

namespace caes {

namespace {

void check_flow(const StepMode& mode, const PlantConfig& cfg) {
    double max = mode.mode == Mode::charge ? cfg.mdot_in_max : cfg.mdot_out_max;
    if (mode.mode == Mode::idle) return;
    if (!(mode.mdot >= 0.0) || mode.mdot > max * (1.0 + 1e-12))
        throw std::domain_error(std::string(mode_name(mode.mode)) + " flow " + fmt(mode.mdot) + " kg/s out of range");
}

CavernState finish(double T, double m, const PlantConfig& cfg) { return CavernState{T, T * m * cfg.R / cfg.V_s, m}; }

}  // namespace

CavernState analytical_step(const CavernState& s, const StepMode& mode, const PlantConfig& cfg, double dt) {
    check_flow(mode, cfg);
    if (!(s.m_s > 0.0) || !(s.T_s > 0.0)) throw std::domain_error("invalid cavern state");
    const double md = mode.mode == Mode::idle ? 0.0 : mode.mdot;
    const double hA = h_eff(cfg, md) * cfg.V_s;  // h_c * A_c
    const double cap = cfg.V_s * cfg.rho_av * cfg.c_v;
    const double cp = cfg.k * cfg.c_v;
    double D = 0.0, N = 0.0, m_next = s.m_s;
    switch (mode.mode) {
        case Mode::charge:
            D = md * (cfg.R - cp) - hA;
            N = md * cp * s.T_s + hA * cfg.T_RW;
            m_next = s.m_s + md * dt;
            break;
        case Mode::discharge:
            D = -md * cfg.R - hA;
            N = hA * cfg.T_RW;
            m_next = s.m_s - md * dt;
            if (!(m_next > 0.0)) throw std::domain_error("empty cavern: discharge would exhaust the stored mass");
            break;
        case Mode::idle: {
            const double T = (s.T_s - cfg.T_RW) * std::exp(-hA * dt / cap) + cfg.T_RW;
            return finish(T, m_next, cfg);
        }
    }
    if (std::abs(D) <= 1e-9)
        throw std::domain_error("singular denominator in analytical step at flow " + fmt(md) + " kg/s");
    const double r = N / D;
    const double T = (s.T_s + r) * std::exp(D * dt / cap) - r;
    return finish(T, m_next, cfg);
}

CavernState constant_temperature_step(const CavernState& s, const StepMode& mode, const PlantConfig& cfg, double dt) {
    check_flow(mode, cfg);
    if (mode.mode == Mode::idle) return s;
    double m = s.m_s;
    if (mode.mode == Mode::charge) m += mode.mdot * dt;
    if (mode.mode == Mode::discharge) {
        m -= mode.mdot * dt;
        if (!(m > 0.0)) throw std::domain_error("empty cavern: discharge would exhaust the stored mass");
    }
    return finish(s.T_s, m, cfg);
}

}  // namespace caes
