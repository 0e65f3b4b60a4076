#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cran/link_sim.hpp"
#include "cran/units.hpp"
#include "oracles.hpp"

using namespace cran;

namespace {

TpdSolution fixed_solution(int r, double rho, int x, double queue_budget) {
    TpdSolution s;
    s.rb_count = r;
    s.ber_threshold = rho;
    s.transmissions = x;
    s.queue_budget = queue_budget;
    return s;
}

QosRequirement qos_of(double rate, double delay, double lvp, double decode = 1e-3) {
    QosRequirement q;
    q.arrival_rate = rate;
    q.total_delay_budget = delay;
    q.lvp_threshold = lvp;
    q.decode_bler_threshold = decode;
    return q;
}

SimConfig queue_config(std::int64_t slots, std::uint64_t seed, bool trace = false) {
    SimConfig c;
    c.mode = SimMode::queue;
    c.n_slots = slots;
    c.seed = seed;
    c.record_trace = trace;
    return c;
}

}  // namespace

TEST_SUITE("link_sim") {

TEST_CASE("block simulation agrees with the averaged BLER") {
    const auto t = McsTable::nr_256qam();
    const SystemParams p;
    std::uint64_t seed = 11;
    for (double rho : {1e-4, 1e-2}) {
        for (double db : {5.0, 15.0}) {
            const ChannelModel ch = ChannelModel::from_db(db);
            const double pbar = average_bler(rho, ch, p.code_block_bits, t);
            SimConfig cfg;
            cfg.mode = SimMode::block;
            cfg.n_blocks = 400000;
            cfg.seed = seed++;
            const auto one = run_block_sim(fixed_solution(1, rho, 1, 1e-3), ch, p, t, cfg);
            CHECK(std::abs(one.per_attempt_failure - pbar) <= 3.0 * std::max(one.per_attempt_se, 1e-12));
            CHECK(one.outage_attempts == 0);
            const auto two = run_block_sim(fixed_solution(1, rho, 2, 1e-3), ch, p, t, cfg);
            CHECK(std::abs(two.residual_rate - pbar * pbar) <= 3.0 * std::max(two.residual_se, 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("vanishing failure probability") {
    const auto t = McsTable::nr_256qam();
    const SystemParams p;
    const ChannelModel ch = ChannelModel::from_db(60.0);
    REQUIRE(average_bler(1e-9, ch, p.code_block_bits, t) < 1e-7);
    SimConfig cfg;
    cfg.mode = SimMode::block;
    cfg.n_blocks = 1000000;
    const auto s = run_block_sim(fixed_solution(1, 1e-9, 1, 1e-3), ch, p, t, cfg);
    CHECK(s.failed_attempts == 0);
}

TEST_CASE("unconditioned draws count outage attempts as failures") {
    const auto t = McsTable::nr_256qam();
    const SystemParams p;
    const ChannelModel ch = ChannelModel::from_db(0.0);
    SimConfig cfg;
    cfg.mode = SimMode::block;
    cfg.n_blocks = 200000;
    cfg.conditioned_draws = false;
    const auto s = run_block_sim(fixed_solution(1, 1e-5, 1, 1e-3), ch, p, t, cfg);
    const double pt = mcs_usable_probability(1e-5, ch, t);
    const double outage = static_cast<double>(s.outage_attempts) / static_cast<double>(s.attempts);
    CHECK(std::abs(outage - (1.0 - pt)) <= 3.0 * std::sqrt(pt * (1.0 - pt) / s.attempts));
    CHECK(s.failed_attempts >= s.outage_attempts);
}

TEST_CASE("deterministic service never violates") {
    const auto one = McsTable::single_mode(2.0);
    const SystemParams p;
    // r psi = 3 * 168 * 2 = 1008 bit/slot against 900 bit/slot arriving.
    const auto q = qos_of(1.8e6, 10e-3, 1e-3);
    SlotTrace trace;
    const auto s = run_queue_sim(fixed_solution(3, 1e-3, 1, 8e-3), q, ChannelModel{10.0}, p, one,
                                 queue_config(20000, 4, true), &trace);
    CHECK(s.dropped_bits == 0.0);
    CHECK(s.lvp_drop == 0.0);
    CHECK(s.lvp_violation == 0.0);
    CHECK(s.conserved);
    for (const auto& rec : trace) {
        CHECK(rec.backlog_bits <= 900.0);
    }
}

TEST_CASE("overload drops the excess fraction") {
    const auto one = McsTable::single_mode(1.0);
    const SystemParams p;
    const auto q = qos_of(672e3, 10e-3, 1e-3);  // 336 bit/slot against 168 served
    const auto s = run_queue_sim(fixed_solution(1, 1e-3, 1, 8e-3), q, ChannelModel{10.0}, p, one,
                                 queue_config(100000, 8));
    CHECK(s.conserved);
    CHECK(s.lvp_drop == doctest::Approx(0.5).epsilon(1e-3));
    // Without deadline drops the backlog grows without bound, so nearly every
    // bit is late in the fluid reference queue.
    CHECK(s.lvp_violation > 0.99);
}

TEST_CASE("deadline handling matches an independent FIFO") {
    const auto t = McsTable::nr_256qam();
    const SystemParams p;
    const auto q = qos_of(12e6, 5e-3, 1e-2);
    const auto sol = fixed_solution(14, 1e-3, 2, 3e-3);
    SlotTrace trace;
    const auto s = run_queue_sim(sol, q, ChannelModel::from_db(8.0), p, t, queue_config(30000, 21, true),
                                 &trace);
    REQUIRE(trace.size() == 30000);
    REQUIRE(s.dropped_bits > 0.0);

    // Reference queue in whole 2^-20 bit units, one entry per arrival slot.
    const double unit = 1048576.0;
    const auto arrival = static_cast<std::int64_t>(std::llround(12e6 * p.slot_duration * unit));
    std::vector<std::int64_t> left;
    std::size_t head = 0;
    bool ages_ok = true;
    bool counts_ok = true;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const auto& rec = trace[k];
        left.push_back(arrival);
        std::int64_t drop = 0;
        while (head < left.size() && (k - head) * p.slot_duration > sol.queue_budget + 1e-12) {
            drop += left[head];
            ++head;
        }
        std::int64_t room = 0;
        if (rec.mcs >= 0) {
            room = static_cast<std::int64_t>(std::floor(14 * 168.0 * t.efficiency(rec.mcs) * unit));
        }
        std::int64_t serve = 0;
        while (room > 0 && head < left.size()) {
            ages_ok = ages_ok && (k - head) * p.slot_duration <= sol.queue_budget + 1e-12;
            const std::int64_t take = std::min(room, left[head]);
            left[head] -= take;
            room -= take;
            serve += take;
            if (left[head] == 0) {
                ++head;
            }
        }
        counts_ok = counts_ok && static_cast<double>(drop) / unit == rec.dropped_bits &&
                    static_cast<double>(serve) / unit == rec.served_bits;
    }
    CHECK(ages_ok);
    CHECK(counts_ok);
}

TEST_CASE("solver output meets its delay-violation target") {
    QosRequirement q = qos_of(10e6, 10e-3, 1e-2);
    const PairContext ctx(ChannelModel::from_db(15.0), q, SystemParams{}, McsTable::nr_256qam());
    const auto sol = solve_pair(ctx);
    REQUIRE(sol.has_value());
    const auto s = run_queue_sim(*sol, q, ctx.channel, ctx.params, ctx.table, queue_config(1000000, 7));
    const double estimate = lvp_estimate(sol->latency_exponent, q.arrival_rate, sol->queue_budget,
                                         sol->expected_service_bits, ctx.params);
    CHECK(s.conserved);
    CHECK(s.lvp_violation <= 5.0 * q.lvp_threshold);
    CHECK(std::abs(std::log10(s.lvp_violation / estimate)) <= 1.0);
    CHECK(s.lvp_drop <= s.lvp_violation);
    CHECK(std::abs(s.mean_rbs - sol->expected_cost) <= 3.0 * s.rbs_se);
}

TEST_CASE("outage slots carry neither service nor RBs") {
    const auto t = McsTable::nr_256qam();
    const SystemParams p;
    auto cfg = queue_config(20000, 5, true);
    cfg.conditioned_draws = false;
    SlotTrace trace;
    const auto s = run_queue_sim(fixed_solution(10, 1e-5, 2, 4e-3), qos_of(5e6, 8e-3, 1e-2),
                                 ChannelModel::from_db(3.0), p, t, cfg, &trace);
    CHECK(s.outage_slots > 0);
    CHECK(s.conserved);
    for (const auto& rec : trace) {
        if (rec.mcs < 0) {
            CHECK(rec.rb_initial == 0);
            CHECK(rec.rb_retx == 0);
            CHECK(rec.served_bits == 0.0);
        }
    }
}

TEST_CASE("bandwidth accounting") {
    const SystemParams p;
    SlotTrace constant(50);
    for (auto& rec : constant) {
        rec.rb_initial = 7;
    }
    const auto b = measure_bandwidth(constant, p);
    CHECK(b.mean_rbs == 7.0);
    CHECK(b.rbs_se == 0.0);
    CHECK(b.hertz == doctest::Approx(7 * 360e3));
    CHECK_THROWS(measure_bandwidth(SlotTrace{}, p));

    // Single transmission: every slot books exactly r.
    const auto t = McsTable::nr_256qam();
    SlotTrace trace;
    run_queue_sim(fixed_solution(9, 1e-3, 1, 8e-3), qos_of(5e6, 10e-3, 1e-2), ChannelModel::from_db(15.0),
                  p, t, queue_config(5000, 3, true), &trace);
    CHECK(measure_bandwidth(trace, p).mean_rbs == 9.0);

    std::ostringstream out;
    write_trace(out, trace);
    CHECK(out.str().rfind("slot\tsnr[linear]\tmcs[index]", 0) == 0);
}

TEST_CASE("determinism") {
    const auto t = McsTable::nr_256qam();
    const SystemParams p;
    const auto sol = fixed_solution(12, 1e-3, 2, 6e-3);
    const auto q = qos_of(8e6, 10e-3, 1e-2);
    SlotTrace a;
    SlotTrace b;
    SlotTrace c;
    run_queue_sim(sol, q, ChannelModel::from_db(10.0), p, t, queue_config(5000, 42, true), &a);
    run_queue_sim(sol, q, ChannelModel::from_db(10.0), p, t, queue_config(5000, 42, true), &b);
    run_queue_sim(sol, q, ChannelModel::from_db(10.0), p, t, queue_config(5000, 43, true), &c);
    std::ostringstream sa;
    std::ostringstream sb;
    std::ostringstream sc;
    write_trace(sa, a);
    write_trace(sb, b);
    write_trace(sc, c);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str() != sc.str());
}

TEST_CASE("configuration guards") {
    SimConfig cfg;
    cfg.n_slots = 0;
    CHECK_THROWS(cfg.validate());
    const auto t = McsTable::nr_256qam();
    CHECK_THROWS(run_queue_sim(fixed_solution(1, 1e-3, 1, 0.0), qos_of(1e6, 10e-3, 1e-2), ChannelModel{10.0},
                               SystemParams{}, t, SimConfig{}));
}

}
