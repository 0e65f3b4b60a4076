#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace cran {

struct McsMode {
    int index = 0;
    double spectral_efficiency = 0.0;  // bit/symbol
};

/// Ordered set of MCS modes. Construction enforces a non-empty table with
/// indices 0..J in order and strictly increasing positive efficiencies.
class McsTable {
public:
    explicit McsTable(std::vector<McsMode> modes);

    /// 28-entry NR 256QAM table (index table 2).
    static McsTable nr_256qam();
    static McsTable single_mode(double spectral_efficiency);

    /// Whitespace separated `index spectral_efficiency` records; `#` starts a comment.
    static McsTable parse(std::istream& in);
    static McsTable load(const std::string& path);

    std::size_t size() const { return modes_.size(); }
    int top_index() const { return static_cast<int>(modes_.size()) - 1; }
    double efficiency(int j) const { return efficiency_[static_cast<std::size_t>(j)]; }
    std::span<const double> efficiencies() const { return efficiency_; }
    std::span<const McsMode> modes() const { return modes_; }

    void write(std::ostream& out) const;

    bool operator==(const McsTable& other) const { return efficiency_ == other.efficiency_; }

private:
    std::vector<McsMode> modes_;
    std::vector<double> efficiency_;
};

}  // namespace cran
