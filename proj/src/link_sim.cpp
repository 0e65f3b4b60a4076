#include "cran/link_sim.hpp"

#include <cmath>
#include <deque>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace cran {

namespace {

constexpr double kUnitsPerBit = 1048576.0;  // 2^20

double to_bits(std::int64_t units) { return static_cast<double>(units) / kUnitsPerBit; }

struct Segment {
    std::int64_t slot;
    std::int64_t units;
};

// One channel use at the pair's thresholds: SNR draw, mode, decode outcome.
struct Attempt {
    double snr = 0.0;
    int mcs = -1;
    bool decoded = false;
};

class Link {
public:
    Link(double rho, const ChannelModel& channel, const SystemParams& params,
         const McsTable& table, bool conditioned, Rng& rng)
        : thresholds_(switching_thresholds(rho, table)),
          mean_(channel.mean_snr),
          bits_(params.code_block_bits),
          table_(table),
          conditioned_(conditioned),
          rng_(rng) {}

    Attempt draw() {
        Attempt a;
        a.snr = sample_snr(mean_, rng_, conditioned_ ? thresholds_.front() : 0.0);
        const auto j = select_mcs(a.snr, thresholds_);
        if (!j) {
            return a;  // outage: nothing decodes
        }
        a.mcs = *j;
        a.decoded = uniform01(rng_) >= block_error_rate(*j, a.snr, bits_, table_);
        return a;
    }

private:
    std::vector<double> thresholds_;
    double mean_;
    int bits_;
    const McsTable& table_;
    bool conditioned_;
    Rng& rng_;
};

double binomial_se(double p, std::int64_t n) {
    return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

// Time fraction of one slot during which a linear path from q0 with slope
// `net` per slot (reflected at 0) stays above `level`.
double fraction_above(double q0, double net, double level) {
    if (net >= 0.0) {
        const double q1 = q0 + net;
        if (q1 <= level) {
            return 0.0;
        }
        return q0 >= level ? 1.0 : (q1 - level) / net;
    }
    if (q0 <= level) {
        return 0.0;
    }
    return std::min(1.0, (q0 - level) / -net);
}

}  // namespace

void SimConfig::validate() const {
    if (n_slots < 1 || n_blocks < 1) {
        throw std::invalid_argument("simulation needs at least one slot and one block");
    }
}

BlerStats run_block_sim(const TpdSolution& solution, const ChannelModel& channel,
                        const SystemParams& params, const McsTable& table, const SimConfig& cfg) {
    cfg.validate();
    if (solution.transmissions < 1) {
        throw std::invalid_argument("block simulation needs X >= 1");
    }
    Rng rng(cfg.seed);
    Link link(solution.ber_threshold, channel, params, table, cfg.conditioned_draws, rng);
    BlerStats s;
    s.blocks = cfg.n_blocks;
    for (std::int64_t b = 0; b < cfg.n_blocks; ++b) {
        bool decoded = false;
        for (int x = 0; x < solution.transmissions && !decoded; ++x) {
            const auto a = link.draw();
            ++s.attempts;
            if (a.mcs < 0) {
                ++s.outage_attempts;
            }
            decoded = a.decoded;
            if (!decoded) {
                ++s.failed_attempts;
            }
        }
        if (!decoded) {
            ++s.residual_failures;
        }
    }
    s.per_attempt_failure = static_cast<double>(s.failed_attempts) / static_cast<double>(s.attempts);
    s.per_attempt_se = binomial_se(s.per_attempt_failure, s.attempts);
    s.residual_rate = static_cast<double>(s.residual_failures) / static_cast<double>(s.blocks);
    s.residual_se = binomial_se(s.residual_rate, s.blocks);
    return s;
}

QueueStats run_queue_sim(const TpdSolution& solution, const QosRequirement& qos,
                         const ChannelModel& channel, const SystemParams& params,
                         const McsTable& table, const SimConfig& cfg, SlotTrace* trace) {
    cfg.validate();
    if (solution.rb_count < 1 || solution.transmissions < 1 || !(solution.queue_budget > 0.0)) {
        throw std::invalid_argument("queue simulation needs r >= 1, X >= 1 and D_q > 0");
    }
    Rng rng(cfg.seed);
    Link link(solution.ber_threshold, channel, params, table, cfg.conditioned_draws, rng);

    const double arrival_bits = qos.arrival_rate * params.slot_duration;
    const auto arrival_units = static_cast<std::int64_t>(std::llround(arrival_bits * kUnitsPerBit));
    const auto max_age =
        static_cast<std::int64_t>(std::floor(solution.queue_budget / params.slot_duration + 1e-9));
    const double late_level = qos.arrival_rate * solution.queue_budget;
    const int r = solution.rb_count;

    std::deque<Segment> queue;
    std::int64_t backlog = 0;
    std::int64_t arrived = 0;
    std::int64_t served = 0;
    std::int64_t dropped = 0;
    std::int64_t residual = 0;
    double backlog_sum = 0.0;
    double shadow = 0.0;  // fluid backlog without drops, bits
    double late_fraction = 0.0;
    double rb_sum = 0.0;
    double rb_sq = 0.0;

    QueueStats st;
    st.slots = cfg.n_slots;
    if (trace) {
        trace->clear();
        trace->reserve(static_cast<std::size_t>(cfg.n_slots));
    }
    for (std::int64_t t = 0; t < cfg.n_slots; ++t) {
        queue.push_back({t, arrival_units});
        backlog += arrival_units;
        arrived += arrival_units;

        std::int64_t slot_dropped = 0;
        while (!queue.empty() && t - queue.front().slot > max_age) {
            slot_dropped += queue.front().units;
            queue.pop_front();
        }
        backlog -= slot_dropped;
        dropped += slot_dropped;

        const auto first = link.draw();
        std::int64_t capacity = 0;
        int rb_initial = 0;
        int rb_retx = 0;
        bool decoded = first.decoded;
        if (first.mcs >= 0) {
            const double bits = r * params.bits_per_rb(table.efficiency(first.mcs));
            capacity = static_cast<std::int64_t>(std::floor(bits * kUnitsPerBit));
            rb_initial = r;
            // Later attempts see fresh fading; their RBs are booked to this slot.
            for (int x = 1; x < solution.transmissions && !decoded; ++x) {
                const auto again = link.draw();
                rb_retx += again.mcs >= 0 ? r : 0;
                decoded = again.decoded;
            }
            st.retransmissions += rb_retx / r;
        } else {
            ++st.outage_slots;
        }

        std::int64_t slot_served = 0;
        std::int64_t room = capacity;
        while (room > 0 && !queue.empty()) {
            auto& head = queue.front();
            const std::int64_t take = std::min(room, head.units);
            head.units -= take;
            room -= take;
            slot_served += take;
            if (head.units == 0) {
                queue.pop_front();
            }
        }
        backlog -= slot_served;
        served += slot_served;
        if (!decoded) {
            residual += slot_served;
        }

        const double net = arrival_bits - to_bits(capacity);
        late_fraction += fraction_above(shadow, net, late_level);
        shadow = std::max(0.0, shadow + net);

        backlog_sum += to_bits(backlog);
        const double rbs = rb_initial + rb_retx;
        rb_sum += rbs;
        rb_sq += rbs * rbs;
        if (trace) {
            trace->push_back({t, first.snr, first.mcs, rb_initial, rb_retx, to_bits(slot_served),
                              to_bits(slot_dropped), to_bits(backlog)});
        }
    }

    const double n = static_cast<double>(cfg.n_slots);
    st.arrived_bits = to_bits(arrived);
    st.served_bits = to_bits(served);
    st.dropped_bits = to_bits(dropped);
    st.residual_lost_bits = to_bits(residual);
    st.final_backlog_bits = to_bits(backlog);
    st.conserved = arrived == served + dropped + backlog;
    st.mean_backlog_bits = backlog_sum / n;
    st.late_bits = late_fraction * arrival_bits;
    st.lvp_drop = st.dropped_bits / st.arrived_bits;
    st.lvp_violation = st.late_bits / st.arrived_bits;
    st.mean_rbs = rb_sum / n;
    const double var = n > 1 ? std::max(0.0, (rb_sq - rb_sum * rb_sum / n) / (n - 1.0)) : 0.0;
    st.rbs_se = std::sqrt(var / n);
    st.bandwidth_hz = st.mean_rbs * params.hertz_per_rb();
    return st;
}

BandwidthStats measure_bandwidth(const SlotTrace& trace, const SystemParams& params) {
    if (trace.empty()) {
        throw std::invalid_argument("measure_bandwidth: empty trace");
    }
    double sum = 0.0;
    double sq = 0.0;
    for (const auto& rec : trace) {
        const double rbs = rec.rb_initial + rec.rb_retx;
        sum += rbs;
        sq += rbs * rbs;
    }
    const double n = static_cast<double>(trace.size());
    BandwidthStats out;
    out.mean_rbs = sum / n;
    const double var = n > 1 ? std::max(0.0, (sq - sum * sum / n) / (n - 1.0)) : 0.0;
    out.rbs_se = std::sqrt(var / n);
    out.hertz = out.mean_rbs * params.hertz_per_rb();
    return out;
}

void write_trace(std::ostream& out, const SlotTrace& trace) {
    out << "slot\tsnr[linear]\tmcs[index]\trb_initial[rb]\trb_retx[rb]\tserved[bit]\t"
           "dropped[bit]\tbacklog[bit]\n";
    out << std::setprecision(17);
    for (const auto& r : trace) {
        out << r.slot << '\t' << r.snr << '\t' << r.mcs << '\t' << r.rb_initial << '\t'
            << r.rb_retx << '\t' << r.served_bits << '\t' << r.dropped_bits << '\t'
            << r.backlog_bits << '\n';
    }
}

}  // namespace cran
