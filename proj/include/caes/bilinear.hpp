#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "caes/params.hpp"

namespace caes {

enum class Mode { charge, discharge, idle };

struct StepMode {
    Mode mode = Mode::idle;
    double mdot = 0.0;  // kg/s, magnitude of the single active flow

    static StepMode charge(double mdot_in) { return {Mode::charge, mdot_in}; }
    static StepMode discharge(double mdot_out) { return {Mode::discharge, mdot_out}; }
    static StepMode idle() { return {Mode::idle, 0.0}; }
};

const char* mode_name(Mode m);

enum class Model { bilinear, prelinear, analytical, constant_T };

const char* model_name(Model m);
Model parse_model(const std::string& name);

struct Trajectory {
    double dt = 0.0;
    CavernState initial;
    std::vector<StepMode> modes;
    std::vector<CavernState> states;  // states[i] is the state after modes[i]
};

// Bilinear steppers. Throw std::domain_error on precondition violations.
CavernState step_charge_bilinear(const CavernState& s, double mdot_in, const CoefficientSet& co);
CavernState step_discharge_bilinear(const CavernState& s, double mdot_out, const CoefficientSet& co);
CavernState step_idle_bilinear(const CavernState& s, const CoefficientSet& co);

// Forms before the Taylor/secant substitutions, evaluated at t = dt.
CavernState step_charge_prelinear(const CavernState& s, double mdot_in, const PlantConfig& cfg, double dt);
CavernState step_discharge_prelinear(const CavernState& s, double mdot_out, const PlantConfig& cfg, double dt);
CavernState step_idle_exact(const CavernState& s, const PlantConfig& cfg, double dt);

enum class AdiabaticForm { exact, linearized };

CavernState adiabatic_charge(const CavernState& s, double mdot_in, double dt, AdiabaticForm form,
                             const PlantConfig& cfg);
CavernState adiabatic_discharge(const CavernState& s, double mdot_out, double dt, AdiabaticForm form,
                                const PlantConfig& cfg);

// h_a + h_b * mdot^0.8
double h_eff(const PlantConfig& cfg, double mdot);

// Sequential dispatch over the modes. dt must equal co.dt.
Trajectory simulate(const CavernState& initial, const std::vector<StepMode>& modes, const PlantConfig& cfg,
                    const CoefficientSet& co, Model model, double dt);
Trajectory simulate(const CavernState& initial, const std::vector<StepMode>& modes, const PlantConfig& cfg,
                    const CoefficientSet& co, Model model);

CavernState apply_step(const CavernState& s, const StepMode& mode, const PlantConfig& cfg, const CoefficientSet& co,
                       Model model);

// CSV `t_s,mode,mdot_kg_s,T_K,p_Pa,m_kg`; row 0 is the initial state. With a
// model name a trailing `model` column is added. every > 1 keeps every Nth row
// and always the last one.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int every = 1, const char* model = nullptr);

}  // namespace caes
