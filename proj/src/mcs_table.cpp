#include "cran/mcs_table.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cran {

namespace {

constexpr double kNr256QamEfficiency[] = {
    0.2344, 0.3770, 0.6016, 0.8770, 1.1758, 1.4766, 1.6953, 1.9141, 2.1602, 2.4063,
    2.5703, 2.7305, 3.0293, 3.3223, 3.6094, 3.9023, 4.2129, 4.5234, 4.8164, 5.1152,
    5.3320, 5.5547, 5.8906, 6.2266, 6.5703, 6.9141, 7.1602, 7.4063};

}  // namespace

McsTable::McsTable(std::vector<McsMode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) {
        throw std::invalid_argument("MCS table must contain at least one mode");
    }
    efficiency_.reserve(modes_.size());
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        const auto& m = modes_[j];
        if (m.index != static_cast<int>(j)) {
            throw std::invalid_argument("MCS table indices must run 0..J in order, got " +
                                        std::to_string(m.index) + " at position " +
                                        std::to_string(j));
        }
        if (!(m.spectral_efficiency > 0.0) || !std::isfinite(m.spectral_efficiency)) {
            throw std::invalid_argument("MCS spectral efficiency must be positive and finite");
        }
        if (j > 0 && !(m.spectral_efficiency > modes_[j - 1].spectral_efficiency)) {
            throw std::invalid_argument("MCS spectral efficiencies must be strictly increasing");
        }
        efficiency_.push_back(m.spectral_efficiency);
    }
}

McsTable McsTable::nr_256qam() {
    std::vector<McsMode> modes;
    int j = 0;
    for (double se : kNr256QamEfficiency) {
        modes.push_back({j++, se});
    }
    return McsTable(std::move(modes));
}

McsTable McsTable::single_mode(double spectral_efficiency) {
    return McsTable({{0, spectral_efficiency}});
}

McsTable McsTable::parse(std::istream& in) {
    std::vector<McsMode> modes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        McsMode m;
        if (!(fields >> m.index)) {
            continue;  // blank or comment-only
        }
        if (!(fields >> m.spectral_efficiency)) {
            throw std::invalid_argument("MCS table line " + std::to_string(line_no) +
                                        ": missing spectral efficiency");
        }
        std::string extra;
        if (fields >> extra) {
            throw std::invalid_argument("MCS table line " + std::to_string(line_no) +
                                        ": unexpected field '" + extra + "'");
        }
        modes.push_back(m);
    }
    return McsTable(std::move(modes));
}

McsTable McsTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open MCS table file: " + path);
    }
    return parse(in);
}

void McsTable::write(std::ostream& out) const {
    out << "# index  spectral_efficiency[bit/symbol]\n";
    for (const auto& m : modes_) {
        out << m.index << ' ' << std::setprecision(17) << m.spectral_efficiency << '\n';
    }
}

}  // namespace cran
