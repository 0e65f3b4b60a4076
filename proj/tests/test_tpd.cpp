#include <doctest.h>

#include <cmath>
#include <random>

#include "cran/tpd.hpp"
#include "cran/units.hpp"
#include "oracles.hpp"

using namespace cran;

namespace {

PairContext make_context(double snr_db, double rate, double delay, double lvp, double decode,
                         SystemParams params = {}) {
    QosRequirement q;
    q.arrival_rate = rate;
    q.total_delay_budget = delay;
    q.lvp_threshold = lvp;
    q.decode_bler_threshold = decode;
    return PairContext(ChannelModel::from_db(snr_db), q, params, McsTable::nr_256qam());
}

std::vector<double> table_se() {
    const auto t = McsTable::nr_256qam();
    return {t.efficiencies().begin(), t.efficiencies().end()};
}

}  // namespace

TEST_SUITE("tpd") {

TEST_CASE("expected RB cost") {
    CHECK(expected_rb_cost(7, 0.3, 1) == 7.0);
    CHECK(expected_rb_cost(10, 0.1, 2) == doctest::Approx(11.0).epsilon(1e-15));
    CHECK(expected_rb_cost(10, 0.5, 3) == doctest::Approx(17.5).epsilon(1e-15));
    CHECK(expected_rb_cost(4, 0.0, 5) == 4.0);
    CHECK_THROWS_AS(expected_rb_cost(0, 0.1, 1), std::domain_error);
    CHECK_THROWS_AS(expected_rb_cost(1, 1.0, 2), std::domain_error);
    CHECK_THROWS_AS(expected_rb_cost(1, 0.1, 0), std::domain_error);
}

TEST_CASE("search bounds") {
    SearchBounds b;
    CHECK_NOTHROW(b.validate());
    CHECK(b.max_bisection_steps() == 28);
    b.rho_max = 0.2;
    CHECK_THROWS(b.validate());
    b = {};
    b.tolerance = 0.0;
    CHECK_THROWS(b.validate());
}

TEST_CASE("bisection brackets and matches a grid scan") {
    const auto ctx = make_context(15.0, 10e6, 10e-3, 1e-3, 1e-3);
    const auto se = table_se();
    for (int r : {15, 20, 40}) {
        for (int x : {1, 2}) {
            const auto res = solve_ber_threshold(r, x, ctx, true);
            REQUIRE(res.rho.has_value());
            CHECK(res.steps <= ctx.bounds.max_bisection_steps());
            CHECK(res.probes.front().rho == ctx.bounds.rho_max);
            CHECK(res.probes.front().meets_rate);
            // Every probe that met the rate sits at or above the returned root.
            for (const auto& p : res.probes) {
                if (p.meets_rate) {
                    CHECK(p.rho >= *res.rho);
                } else {
                    CHECK(p.rho < *res.rho);
                }
            }
            const double dq = delay_split(10e-3, x, ctx.params)->queue_budget;
            const double ref = oracle::grid_root(1e-9, 0.199, 1e-10, [&](double rho) {
                return oracle::coupled_capacity(se, rho, ctx.channel.mean_snr, r, 10e6, dq, 1e-3) >=
                       10e6;
            });
            CHECK(std::abs(*res.rho - ref) <= ctx.bounds.tolerance);
        }
    }
}

TEST_CASE("bisection reports infeasible rates") {
    const auto ctx = make_context(15.0, 500e6, 10e-3, 1e-3, 1e-3);
    const auto res = solve_ber_threshold(5, 1, ctx, true);
    CHECK_FALSE(res.rho.has_value());
    CHECK(res.probes.size() == 1);
    CHECK_THROWS_AS(solve_ber_threshold(5, 6, ctx), std::domain_error);
}

TEST_CASE("reference pair") {
    const auto ctx = make_context(15.0, 20e6, 10e-3, 1e-5, 1e-3);
    SolveStats stats;
    const auto s = solve_pair(ctx, {}, &stats);
    REQUIRE(s.has_value());
    CHECK(s->rb_count == 30);
    CHECK(s->transmissions == 2);
    CHECK(s->ber_threshold == doctest::Approx(7.02934e-5).epsilon(1e-4));
    CHECK(s->expected_cost == doctest::Approx(30.882993).epsilon(1e-6));
    CHECK(certify(*s, ctx).ok);
    CHECK(stats.candidates > 0);
    CHECK(s->expected_cost == doctest::Approx(expected_rb_cost(s->rb_count, s->mean_bler, s->transmissions)));
    CHECK(lvp_estimate(s->latency_exponent, 20e6, s->queue_budget, s->expected_service_bits, ctx.params) ==
          doctest::Approx(1e-5).epsilon(1e-9));
}

TEST_CASE("slack requirements need a single transmission") {
    const auto ctx = make_context(40.0, 10e6, 1.0, 0.5, 0.5);
    const auto s = solve_pair(ctx);
    REQUIRE(s.has_value());
    CHECK(s->transmissions == 1);
    const auto se = table_se();
    const double dq = delay_split(1.0, 1, ctx.params)->queue_budget;
    int r_min = 0;
    for (int r = 1; r <= ctx.params.total_rbs; ++r) {
        if (oracle::coupled_capacity(se, 0.199, ctx.channel.mean_snr, r, 10e6, dq, 0.5) >= 10e6) {
            r_min = r;
            break;
        }
    }
    CHECK(s->rb_count == r_min);
    CHECK(s->expected_cost == s->rb_count);
}

TEST_CASE("infeasible pairs") {
    // Deep fade: conditional on no outage only the bottom mode is used, so a
    // large source rate needs more RBs than the carrier has.
    CHECK_FALSE(solve_pair(make_context(-60.0, 50e6, 10e-3, 1e-3, 1e-3)).has_value());
    CHECK_FALSE(solve_pair(make_context(15.0, 2e9, 10e-3, 1e-3, 1e-3)).has_value());
    SystemParams tiny;
    tiny.total_rbs = 3;
    CHECK_FALSE(solve_pair(make_context(15.0, 20e6, 10e-3, 1e-3, 1e-3, tiny)).has_value());
}

TEST_CASE("transmission count grows with the delay budget") {
    int prev = 0;
    for (double d : {4e-3, 6e-3, 8e-3, 10e-3, 12e-3, 14e-3}) {
        const auto s = solve_pair(make_context(15.0, 20e6, d, 1e-5, 1e-3));
        REQUIRE(s.has_value());
        CHECK(s->transmissions >= prev);
        prev = s->transmissions;
    }
    CHECK(prev > 1);
}

TEST_CASE("early break does not change the optimum") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SystemParams params;
    params.total_rbs = 60;
    int solved = 0;
    for (int i = 0; i < 12; ++i) {
        const double db = 8.0 + 20.0 * u(rng);
        const double rate = std::pow(10.0, 6.0 + 1.3 * u(rng));
        const double delay = 4e-3 + 8e-3 * u(rng);
        const double lvp = std::pow(10.0, -5.0 + 3.0 * u(rng));
        const auto ctx = make_context(db, rate, delay, lvp, 1e-3, params);
        SolveOptions full;
        full.early_break = false;
        full.max_transmissions = 3;
        SolveOptions fast;
        fast.max_transmissions = 3;
        const auto a = solve_pair(ctx, full);
        const auto b = solve_pair(ctx, fast);
        REQUIRE(a.has_value() == b.has_value());
        if (a) {
            ++solved;
            CHECK(a->expected_cost == b->expected_cost);
            CHECK(a->rb_count == b->rb_count);
            CHECK(a->transmissions == b->transmissions);
        }
    }
    CHECK(solved >= 6);
}

TEST_CASE("fixed configurations never beat the joint optimum") {
    const auto ctx = make_context(15.0, 20e6, 10e-3, 1e-5, 1e-3);
    const auto best = solve_pair(ctx);
    REQUIRE(best.has_value());
    const auto same = evaluate_fixed_config(ctx, best->ber_threshold, best->transmissions);
    REQUIRE(same.has_value());
    CHECK(same->expected_cost == doctest::Approx(best->expected_cost).epsilon(1e-12));
    for (double rho : {1e-7, 1e-5, 1e-3, 1e-2}) {
        for (int x = 1; x <= 4; ++x) {
            if (const auto f = evaluate_fixed_config(ctx, rho, x)) {
                CHECK(f->expected_cost >= best->expected_cost);
            }
        }
    }
    CHECK_FALSE(evaluate_fixed_config(ctx, 1e-3, 5).has_value());
    CHECK_FALSE(evaluate_fixed_config(ctx, 1e-3, 9).has_value());
    CHECK_THROWS_AS(evaluate_fixed_config(ctx, 0.2, 1), std::domain_error);
}

TEST_CASE("certification rejects tampered solutions") {
    const auto ctx = make_context(15.0, 10e6, 10e-3, 1e-3, 1e-3);
    const auto s = solve_pair(ctx);
    REQUIRE(s.has_value());
    CHECK(certify(*s, ctx).ok);
    auto t = *s;
    t.expected_cost *= 0.9;
    CHECK_FALSE(certify(t, ctx).ok);
    t = *s;
    t.latency_exponent *= 1.01;
    CHECK_FALSE(certify(t, ctx).ok);
    t = *s;
    t.rb_count -= 3;
    CHECK_FALSE(certify(t, ctx).ok);
    t = *s;
    t.transmissions = 5;
    CHECK_FALSE(certify(t, ctx).ok);
}

TEST_CASE("context validation") {
    CHECK_THROWS(make_context(15.0, -1.0, 10e-3, 1e-3, 1e-3));
    CHECK_THROWS(make_context(15.0, 1e6, 1e-3, 1e-3, 1e-3));
    CHECK_THROWS(make_context(15.0, 1e6, 10e-3, 0.0, 1e-3));
    const auto ctx = make_context(15.0, 1e6, 10e-3, 1e-3, 1e-3);
    CHECK(ctx.max_transmissions() == 4);
    CHECK(ctx.arrival_bits == doctest::Approx(500.0));
}

}
