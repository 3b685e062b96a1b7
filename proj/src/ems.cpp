#include "pvbsim/ems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pvbsim {

void GridRequest::validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(what); };
    if (!(p_request_kw >= 0.0) || !std::isfinite(p_request_kw))
        fail("grid: p_request must be finite and >= 0");
    if (!std::isfinite(q_request_kvar)) fail("grid: q_request must be finite");
    if (!(p_import_limit_kw >= 0.0) || !std::isfinite(p_import_limit_kw))
        fail("grid: p_import_limit must be finite and >= 0");
    if (!(p_export_limit_kw >= 0.0) || !std::isfinite(p_export_limit_kw))
        fail("grid: p_export_limit must be finite and >= 0");
}

const char* to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::Case1: return "case1";
        case CaseLabel::Case2: return "case2";
        case CaseLabel::Case3: return "case3";
        case CaseLabel::Case4: return "case4";
        case CaseLabel::Case5: return "case5";
        case CaseLabel::Other: return "other";
    }
    return "other";
}

CaseLabel classify_case(double p_mpp_available_kw, double p_load_kw,
                        const GridRequest& grid, double soc,
                        const BatteryParams& bat) {
    const double req = grid.absorb_max ? grid.p_export_limit_kw : grid.p_request_kw;
    const double demand = p_load_kw + req;
    if (p_mpp_available_kw > demand)
        return soc >= bat.soc_max ? CaseLabel::Case2 : CaseLabel::Case1;
    if (p_mpp_available_kw < demand) {
        if (soc <= bat.soc_min && req == 0.0 && p_mpp_available_kw < p_load_kw)
            return CaseLabel::Case5;
        if (soc >= bat.soc_min)
            return demand <= p_mpp_available_kw + bat.p_discharge_max_kw
                       ? CaseLabel::Case3
                       : CaseLabel::Case4;
    }
    return CaseLabel::Other;
}

DispatchResult dispatch(double p_mpp_available_kw, double p_load_kw,
                        const GridRequest& grid, double soc,
                        const BatteryParams& bat, SocGate gate) {
    if (!(p_mpp_available_kw >= 0.0))
        throw std::invalid_argument("dispatch: p_mpp_available must be >= 0");
    if (!(p_load_kw >= 0.0))
        throw std::invalid_argument("dispatch: p_load must be >= 0");
    grid.validate();

    gate = soc_gate_update(gate, soc, bat);
    const double p_req = std::min(
        grid.absorb_max ? grid.p_export_limit_kw : grid.p_request_kw,
        grid.p_export_limit_kw);
    const double surplus = p_mpp_available_kw - p_load_kw - p_req;

    double p_pv = p_mpp_available_kw;
    double p_bat = 0.0;
    double shed = 0.0;
    bool curtail = false;

    if (surplus > 0.0) {
        if (!gate.charge_blocked) {
            const double charge = std::min(surplus, bat.p_charge_max_kw);
            p_bat = -charge;
            const double spill = surplus - charge;
            if (p_req + spill > grid.p_export_limit_kw) {
                // battery and export both saturated: curtail the rest
                curtail = true;
                p_pv = p_load_kw + grid.p_export_limit_kw + charge;
            }
        } else {
            curtail = true;
            p_pv = p_req + p_load_kw;
        }
    } else if (surplus < 0.0) {
        const double deficit = -surplus;
        if (!gate.discharge_blocked) {
            p_bat = std::min(deficit, bat.p_discharge_max_kw);
            const double grid_kw = p_req - (deficit - p_bat);
            if (grid_kw < -grid.p_import_limit_kw)
                shed = -grid.p_import_limit_kw - grid_kw;
        } else {
            double grid_kw = p_req - deficit;
            if (grid_kw < -grid.p_import_limit_kw) {
                shed = -grid.p_import_limit_kw - grid_kw;
                grid_kw = -grid.p_import_limit_kw;
            }
            if (!gate.charge_blocked) {
                const double headroom = std::max(grid_kw + grid.p_import_limit_kw, 0.0);
                p_bat = -std::min(bat.p_charge_max_kw, headroom);
            }
        }
    }
    // surplus exactly 0: MPPT with idle battery.

    Dispatch d;
    d.p_pv_ref_kw = p_pv;
    d.p_bat_ref_kw = p_bat;
    d.p_grid_set_kw = p_pv + p_bat - (p_load_kw - shed);  // balance closed last
    d.q_set_kvar = grid.q_request_kvar;
    d.pv_mode = curtail ? PvControlMode::power_reference(p_pv * 1e3)
                        : PvControlMode::mppt();
    d.case_label = classify_case(p_mpp_available_kw, p_load_kw, grid, soc, bat);
    return {d, gate, shed};
}

}  // namespace pvbsim
