#include "cran/system_params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cran {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("SystemParams.") + name + " must be positive");
    }
}

}  // namespace

void SystemParams::validate() const {
    require_positive(slot_duration, "slot_duration");
    require_positive(feedback_rtt, "feedback_rtt");
    require_positive(subcarriers_per_rb, "subcarriers_per_rb");
    require_positive(symbols_per_rb, "symbols_per_rb");
    require_positive(data_symbols_per_slot, "data_symbols_per_slot");
    require_positive(subcarrier_spacing, "subcarrier_spacing");
    require_positive(total_rbs, "total_rbs");
    require_positive(code_block_bits, "code_block_bits");
    require_positive(max_transmissions, "max_transmissions");
}

}  // namespace cran
