#pragma once

#include "pvbsim/battery.hpp"
#include "pvbsim/pv_controller.hpp"

namespace pvbsim {

// Utility-side demand. p_request is an export request (>= 0); absorb_max
// stands for "take everything the microgrid can spare" and resolves to the
// export limit at dispatch time.
struct GridRequest {
    double p_request_kw = 0.0;
    bool absorb_max = false;
    double q_request_kvar = 0.0;
    double p_import_limit_kw = 500.0;
    double p_export_limit_kw = 500.0;

    static GridRequest absorb_max_request() {
        GridRequest g;
        g.absorb_max = true;
        return g;
    }

    // Throws std::invalid_argument naming the violated invariant.
    void validate() const;

    bool operator==(const GridRequest&) const = default;
};

// Which of the five canonical operating regions the inputs fall in; Other
// covers ties and corners the region conditions do not reach.
enum class CaseLabel { Case1, Case2, Case3, Case4, Case5, Other };

const char* to_string(CaseLabel label);

// Supervisory setpoints for one dispatch interval. Sign conventions:
// p_bat_ref > 0 discharging, p_grid_set > 0 exporting. The balance
// p_pv_ref + p_bat_ref - p_grid_set - p_load = 0 holds by construction
// (losses are handled downstream by the plant models).
struct Dispatch {
    PvControlMode pv_mode;
    double p_pv_ref_kw = 0.0;
    double p_bat_ref_kw = 0.0;
    double p_grid_set_kw = 0.0;
    double q_set_kvar = 0.0;
    CaseLabel case_label = CaseLabel::Other;

    bool operator==(const Dispatch&) const = default;
};

struct DispatchResult {
    Dispatch dispatch;
    SocGate gate;             // updated hysteresis latches
    double load_shed_kw = 0.0;  // > 0: demand infeasible by this much

    bool infeasible() const { return load_shed_kw > 0.0; }
};

// Centralized decision procedure. Given the available MPP power, the DC load,
// the grid request and the battery state, produce a consistent dispatch:
//   surplus > 0, charging allowed  -> MPPT, charge the battery, spill the
//       remainder to export; curtail only once battery and export saturate.
//   surplus > 0, battery full      -> power-reference mode covering exactly
//       load + request; battery idle.
//   surplus < 0, discharge allowed -> MPPT, discharge up to the limit, import
//       any residual within the import limit.
//   surplus < 0, battery empty     -> MPPT, import the deficit and command a
//       recovery charge from the grid within the import headroom.
// Demand beyond every resource is returned as load_shed_kw; the dispatch then
// balances against the shed-reduced load.
DispatchResult dispatch(double p_mpp_available_kw, double p_load_kw,
                        const GridRequest& grid, double soc,
                        const BatteryParams& bat, SocGate gate);

// Literal encoding of the five operating-region conditions (battery power
// bound taken as the discharge limit; the upper Case-3 comparison is
// inclusive, so a demand exactly matching PV + full discharge counts as
// Case 3). Used for logging and tests only.
CaseLabel classify_case(double p_mpp_available_kw, double p_load_kw,
                        const GridRequest& grid, double soc,
                        const BatteryParams& bat);

}  // namespace pvbsim
