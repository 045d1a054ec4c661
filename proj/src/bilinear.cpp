#include "caes/bilinear.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "caes/io.hpp"
#include "caes/reference.hpp"

namespace caes {

namespace {

void check_state(const CavernState& s, double m_guard) {
    if (!(s.T_s > 0.0) || !(s.p_s > 0.0) || !(s.m_s > 0.0) || !std::isfinite(s.T_s) || !std::isfinite(s.p_s) ||
        !std::isfinite(s.m_s))
        throw std::domain_error("invalid cavern state (non-positive or non-finite field)");
    if (s.m_s < m_guard)
        throw std::domain_error("near-empty cavern: m_s = " + fmt(s.m_s) + " kg is below the guard " + fmt(m_guard) +
                                " kg");
}

void check_flow(double mdot, double max, const char* what) {
    if (!(mdot >= 0.0) || mdot > max * (1.0 + 1e-12))
        throw std::domain_error(std::string(what) + " flow " + fmt(mdot) + " kg/s outside [0, " + fmt(max) + "]");
}

double guard_of(const PlantConfig& cfg) { return cfg.near_empty_fraction * cfg.rho_av * cfg.V_s; }

}  // namespace

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::charge: return "charge";
        case Mode::discharge: return "discharge";
        case Mode::idle: return "idle";
    }
    return "?";
}

const char* model_name(Model m) {
    switch (m) {
        case Model::bilinear: return "bilinear";
        case Model::prelinear: return "prelinear";
        case Model::analytical: return "analytical";
        case Model::constant_T: return "constant_T";
    }
    return "?";
}

Model parse_model(const std::string& name) {
    if (name == "bilinear") return Model::bilinear;
    if (name == "prelinear") return Model::prelinear;
    if (name == "analytical") return Model::analytical;
    if (name == "constant_T" || name == "constant-T" || name == "constT") return Model::constant_T;
    throw std::invalid_argument("unknown model '" + name + "'");
}

double h_eff(const PlantConfig& cfg, double mdot) { return cfg.h_a + cfg.h_b * std::pow(mdot, 0.8); }

CavernState step_charge_bilinear(const CavernState& s, double md, const CoefficientSet& c) {
    check_state(s, c.m_guard);
    check_flow(md, c.mdot_in_max, "charge");
    const double T = s.T_s, p = s.p_s, m = s.m_s;
    CavernState n;
    n.T_s = (T * m + c.c2 * T * md + c.c3 * m * md + c.c4 * md + c.c5 * T + c.c6 * m + c.c7) / m;
    n.p_s = (p * m + c.c8 * p * md + c.c9 * m * md + c.c10 * md + c.c11 * m + c.c12 * p + c.c13) / m;
    n.m_s = m + md * c.dt;
    return n;
}

CavernState step_discharge_bilinear(const CavernState& s, double md, const CoefficientSet& c) {
    check_state(s, c.m_guard);
    check_flow(md, c.mdot_out_max, "discharge");
    const double T = s.T_s, p = s.p_s, m = s.m_s;
    if (!(m - md * c.dt > 0.0)) throw std::domain_error("empty cavern: discharge would exhaust the stored mass");
    CavernState n;
    n.T_s = (m * T + c.c14 * T * md + c.c15 * md + c.c16 * T + c.c17) / m;
    n.p_s = (p * m + c.c18 * p * md + c.c19 * T * m + c.c20 * T * md + c.c21 * md * md + c.c22 * m * md +
             c.c23 * md + c.c24 * m + c.c25 * p + c.c26 * T) /
            m;
    n.m_s = m - md * c.dt;
    return n;
}

CavernState step_idle_bilinear(const CavernState& s, const CoefficientSet& c) {
    check_state(s, c.m_guard);
    const double T = s.T_s, p = s.p_s, m = s.m_s;
    CavernState n;
    n.T_s = c.c27 * m * T + c.c28 * T + c.c29 * m + c.c30;
    n.p_s = c.c27 * p * m + c.c31 * m * m + c.c28 * p + c.c32 * m;
    n.m_s = m;
    return n;
}

CavernState step_charge_prelinear(const CavernState& s, double md, const PlantConfig& cfg, double t) {
    check_state(s, guard_of(cfg));
    check_flow(md, cfg.mdot_in_max, "charge");
    const double T = s.T_s, m = s.m_s, k = cfg.k, R = cfg.R, V = cfg.V_s;
    const double rho = cfg.rho_av, cv = cfg.c_v, TRW = cfg.T_RW;
    const double a3 = std::pow(R, k - 1) * std::pow(cfg.T_in, k) / (std::pow(V, k - 1) * std::pow(cfg.p_in, k - 1));
    const double he = h_eff(cfg, md);
    const double inj = a3 * std::pow(m, k - 2) * md * t;
    const double adi = T * (1 + (k - 2) * md * t / m);
    CavernState n;
    n.T_s = adi + inj +
            he / (rho * cv) * (TRW * t - T * (t + (k - 2) * md * t * t / (2 * m)) - a3 * std::pow(m, k - 2) * md * t * t / 2);
    n.p_s = (m + md * t) * R / V * adi + m * R * inj / V +
            (m + md * t) * R / (V * rho * cv) * he * (TRW * t - T * t - T * (k - 2) * md * t * t / (2 * m));
    n.m_s = m + md * t;
    return n;
}

CavernState step_discharge_prelinear(const CavernState& s, double md, const PlantConfig& cfg, double t) {
    check_state(s, guard_of(cfg));
    check_flow(md, cfg.mdot_out_max, "discharge");
    const double T = s.T_s, p = s.p_s, m = s.m_s, k = cfg.k, R = cfg.R;
    const double rho = cfg.rho_av, cv = cfg.c_v, TRW = cfg.T_RW;
    if (!(m - md * t > 0.0)) throw std::domain_error("empty cavern: discharge would exhaust the stored mass");
    const double he = h_eff(cfg, md);
    CavernState n;
    n.T_s = T - (k - 1) * T * md / m * t + he / (rho * cv) * ((TRW - T) * t + (k - 1) * T * md / (2 * m) * t * t);
    n.p_s = ((m - k * md * t) * p +
             he * R / cv * ((m - md * t / 2) * (TRW - T) * t + 0.5 * (k - 1) * T * md * t * t)) /
            m;
    n.m_s = m - md * t;
    return n;
}

CavernState step_idle_exact(const CavernState& s, const PlantConfig& cfg, double t) {
    check_state(s, guard_of(cfg));
    const double e = std::exp(-cfg.h_a * t / (cfg.rho_av * cfg.c_v));
    CavernState n;
    n.T_s = (s.T_s - cfg.T_RW) * e + cfg.T_RW;
    n.p_s = s.p_s * e + s.m_s * cfg.R * cfg.T_RW * (1 - e) / cfg.V_s;
    n.m_s = s.m_s;
    return n;
}

CavernState adiabatic_charge(const CavernState& s, double md, double dt, AdiabaticForm form, const PlantConfig& cfg) {
    if (!(md >= 0.0)) throw std::domain_error("charge flow must be non-negative");
    const double k = cfg.k, R = cfg.R, V = cfg.V_s, Tin = cfg.T_in, pin = cfg.p_in;
    const double a2 = std::pow(R, k) * std::pow(Tin, k) / (std::pow(V, k) * std::pow(pin, k - 1));
    const double a3 = std::pow(R, k - 1) * std::pow(Tin, k) / (std::pow(V, k - 1) * std::pow(pin, k - 1));
    const double m = s.m_s, dm = md * dt, x = dm / m;
    CavernState n;
    if (form == AdiabaticForm::exact) {
        n.p_s = s.p_s * std::pow(1 + x, k - 1) + a2 * std::pow(dm + m, k - 1) * dm;
        n.T_s = s.T_s * std::pow(1 + x, k - 2) + a3 * std::pow(dm + m, k - 2) * dm;
    } else {
        n.p_s = s.p_s * (1 + (k - 1) * x) + a2 * std::pow(m, k - 1) * dm;
        n.T_s = s.T_s * (1 + (k - 2) * x) + a3 * std::pow(m, k - 2) * dm;
    }
    n.m_s = m + dm;
    return n;
}

CavernState adiabatic_discharge(const CavernState& s, double md, double dt, AdiabaticForm form,
                                const PlantConfig& cfg) {
    if (!(md >= 0.0)) throw std::domain_error("discharge flow must be non-negative");
    const double k = cfg.k, m = s.m_s, dm = md * dt;
    if (!(dm < m)) throw std::domain_error("empty cavern: discharge would exhaust the stored mass");
    const double x = dm / m;
    CavernState n;
    if (form == AdiabaticForm::exact) {
        n.p_s = std::pow(1 - x, k) * s.p_s;
        n.T_s = std::pow(1 - x, k - 1) * s.T_s;
    } else {
        n.p_s = (1 - k * x) * s.p_s;
        n.T_s = (1 - (k - 1) * x) * s.T_s;
    }
    n.m_s = m - dm;
    return n;
}

CavernState apply_step(const CavernState& s, const StepMode& mode, const PlantConfig& cfg, const CoefficientSet& co,
                       Model model) {
    switch (model) {
        case Model::bilinear:
            switch (mode.mode) {
                case Mode::charge: return step_charge_bilinear(s, mode.mdot, co);
                case Mode::discharge: return step_discharge_bilinear(s, mode.mdot, co);
                case Mode::idle: return step_idle_bilinear(s, co);
            }
            break;
        case Model::prelinear:
            switch (mode.mode) {
                case Mode::charge: return step_charge_prelinear(s, mode.mdot, cfg, co.dt);
                case Mode::discharge: return step_discharge_prelinear(s, mode.mdot, cfg, co.dt);
                case Mode::idle: return step_idle_exact(s, cfg, co.dt);
            }
            break;
        case Model::analytical: return analytical_step(s, mode, cfg, co.dt);
        case Model::constant_T: return constant_temperature_step(s, mode, cfg, co.dt);
    }
    throw std::logic_error("unhandled model");
}

Trajectory simulate(const CavernState& initial, const std::vector<StepMode>& modes, const PlantConfig& cfg,
                    const CoefficientSet& co, Model model, double dt) {
    if (dt != co.dt)
        throw std::invalid_argument("coefficient set was computed for dt = " + fmt(co.dt) + " s, not " + fmt(dt) + " s");
    return simulate(initial, modes, cfg, co, model);
}

Trajectory simulate(const CavernState& initial, const std::vector<StepMode>& modes, const PlantConfig& cfg,
                    const CoefficientSet& co, Model model) {
    if (modes.empty()) throw std::invalid_argument("simulate: empty mode list");
    Trajectory tr;
    tr.dt = co.dt;
    tr.initial = initial;
    tr.modes = modes;
    tr.states.reserve(modes.size());
    CavernState s = initial;
    for (size_t i = 0; i < modes.size(); ++i) {
        try {
            s = apply_step(s, modes[i], cfg, co, model);
        } catch (const std::domain_error& e) {
            throw std::domain_error("step " + std::to_string(i) + ": " + e.what());
        }
        tr.states.push_back(s);
    }
    return tr;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr, int every, const char* model) {
    if (every < 1) throw std::invalid_argument("decimation factor must be at least 1");
    out << "t_s,mode,mdot_kg_s,T_K,p_Pa,m_kg";
    if (model) out << ",model";
    out << '\n';
    auto row = [&](size_t i, const char* mode, double mdot, const CavernState& s) {
        out << fmt(static_cast<double>(i) * tr.dt) << ',' << mode << ',' << fmt(mdot) << ',' << fmt(s.T_s) << ','
            << fmt(s.p_s) << ',' << fmt(s.m_s);
        if (model) out << ',' << model;
        out << '\n';
    };
    row(0, "initial", 0.0, tr.initial);
    const size_t n = tr.states.size();
    for (size_t i = 1; i <= n; ++i) {
        if (i % static_cast<size_t>(every) != 0 && i != n) continue;
        const auto& md = tr.modes[i - 1];
        row(i, mode_name(md.mode), md.mdot, tr.states[i - 1]);
    }
}

}  // namespace caes
