#ifndef MDM_PARAMS_HPP
#define MDM_PARAMS_HPP

#include <cmath>
#include <stdexcept>

namespace mdm {

// Electrical parameters of the crossbar. Defaults follow a 1T1R ReRAM
// operating point: 2.5 ohm per wire segment, 300 kohm LRS, 3 Mohm HRS.
struct ResistanceParams {
    double wire_r = 2.5;    // resistance of one wire segment between crosspoints
    double r_on = 3.0e5;    // device low-resistance (bit = 1)
    double r_off = 3.0e6;   // device high-resistance (bit = 0)
    double v_in = 1.0;      // read voltage applied to every driven row

    void validate() const {
        if (!std::isfinite(wire_r) || !std::isfinite(r_on) || !std::isfinite(r_off) ||
            !std::isfinite(v_in))
            throw std::invalid_argument("resistance params must be finite");
        if (r_on <= 0.0 || r_off <= 0.0)
            throw std::invalid_argument("device resistances must be positive");
        if (wire_r < 0.0)
            throw std::invalid_argument("wire resistance must be non-negative");
        if (!(wire_r < r_on / 100.0))
            throw std::invalid_argument("wire resistance must satisfy wire_r < r_on/100");
        if (!(r_on < r_off))
            throw std::invalid_argument("resistances must satisfy r_on < r_off");
    }

    double r_over_ron() const { return wire_r / r_on; }

    bool operator==(const ResistanceParams&) const = default;
};

}  // namespace mdm

#endif
