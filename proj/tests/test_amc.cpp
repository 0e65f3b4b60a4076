#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cran/amc.hpp"
#include "cran/units.hpp"
#include "oracles.hpp"

using namespace cran;

namespace {

std::vector<double> table_se(const McsTable& t) {
    return {t.efficiencies().begin(), t.efficiencies().end()};
}

}  // namespace

TEST_SUITE("amc") {

TEST_CASE("builtin table matches the data file") {
    const auto t = McsTable::nr_256qam();
    CHECK(t.size() == 28);
    CHECK(t.efficiency(0) == doctest::Approx(0.2344).epsilon(1e-12));
    CHECK(t.efficiency(27) == doctest::Approx(7.4063).epsilon(1e-12));
    const auto loaded = McsTable::load(std::string(CRAN_SOURCE_DIR) + "/data/mcs_table_nr_256qam.txt");
    CHECK(loaded == t);
}

TEST_CASE("table parsing rejects bad input") {
    std::istringstream empty("# nothing\n");
    CHECK_THROWS(McsTable::parse(empty));
    std::istringstream decreasing("0 1.0\n1 0.5\n");
    CHECK_THROWS(McsTable::parse(decreasing));
    std::istringstream garbage("0 abc\n");
    CHECK_THROWS(McsTable::parse(garbage));
    CHECK_THROWS(McsTable::load("/nonexistent/table.txt"));
}

TEST_CASE("thresholds") {
    const auto t = McsTable::nr_256qam();
    SUBCASE("all zero at rho = 0.2") {
        const auto g = switching_thresholds(0.2, t);
        REQUIRE(g.size() == 29);
        for (int j = 0; j < 28; ++j) {
            CHECK(g[static_cast<std::size_t>(j)] == 0.0);
        }
        CHECK(std::isinf(g.back()));
    }
    SUBCASE("frozen value for a one-bit mode") {
        const auto g = switching_thresholds(1e-3, McsTable::single_mode(1.0));
        CHECK(g[0] == doctest::Approx(oracle::kGamma0Rho1e3V1).epsilon(1e-14));
    }
    SUBCASE("increasing in j, decreasing in rho") {
        const auto a = switching_thresholds(1e-5, t);
        const auto b = switching_thresholds(1e-3, t);
        for (int j = 0; j < 28; ++j) {
            const auto k = static_cast<std::size_t>(j);
            CHECK(a[k] > b[k]);
            CHECK(a[k + 1] > a[k]);
            CHECK(a[k] == doctest::Approx(oracle::threshold(t.efficiency(j), 1e-5)).epsilon(1e-13));
        }
    }
    SUBCASE("domain") {
        CHECK_THROWS_AS(switching_thresholds(0.0, t), std::domain_error);
        CHECK_THROWS_AS(switching_thresholds(-1e-3, t), std::domain_error);
        CHECK_THROWS_AS(switching_thresholds(0.25, t), std::domain_error);
        CHECK_THROWS_AS(switching_thresholds(std::nan(""), t), std::domain_error);
    }
}

TEST_CASE("mode selection") {
    const auto t = McsTable::nr_256qam();
    const auto g = switching_thresholds(1e-3, t);
    CHECK_FALSE(select_mcs(g[0] * 0.999, g).has_value());
    CHECK(select_mcs(g[0], g) == 0);
    CHECK(select_mcs(g[5], g) == 5);
    CHECK(select_mcs(0.5 * (g[5] + g[6]), g) == 5);
    CHECK(select_mcs(1e12, g) == 27);
    const auto zero = switching_thresholds(0.2, t);
    CHECK(select_mcs(0.0, zero) == 27);
}

TEST_CASE("BER and BLER") {
    const auto t = McsTable::nr_256qam();
    CHECK(bit_error_rate(3, 0.0, t) == doctest::Approx(0.2).epsilon(1e-15));
    for (double rho : {1e-8, 1e-5, 1e-3, 0.1}) {
        const auto g = switching_thresholds(rho, t);
        for (int j = 0; j < 28; ++j) {
            CHECK(std::abs(bit_error_rate(j, g[static_cast<std::size_t>(j)], t) - rho) <= 1e-12);
        }
    }
    CHECK(bit_error_rate(4, 10.0, t) > bit_error_rate(4, 20.0, t));

    const auto one = McsTable::single_mode(1.0);
    // L = 1 reduces to the BER.
    CHECK(block_error_rate(0, 3.0, 1, one) == doctest::Approx(oracle::ber(1.0, 3.0)).epsilon(1e-14));
    CHECK(block_error_rate(0, 1e6, 1024, one) == 0.0);
    // SNR giving Pb = 1e-6 exactly for the unit mode.
    const double snr = -std::log(5e-6) / 1.5;
    CHECK(bit_error_rate(0, snr, one) == doctest::Approx(1e-6).epsilon(1e-13));
    CHECK(block_error_rate(0, snr, 1024, one) == doctest::Approx(oracle::kBler1e6L1024).epsilon(1e-11));
    CHECK(block_error_rate(0, snr, 1024, one) + block_success_rate(0, snr, 1024, one) ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("usable probability and segment weights") {
    const auto t = McsTable::nr_256qam();
    CHECK(mcs_usable_probability(0.2, ChannelModel{10.0}, t) == 1.0);
    const double g0 = switching_thresholds(1e-3, t)[0];
    CHECK(mcs_usable_probability(1e-3, ChannelModel{g0}, t) == doctest::Approx(std::exp(-1.0)));
    CHECK(mcs_usable_probability(1e-5, ChannelModel{10.0}, t) <
          mcs_usable_probability(1e-3, ChannelModel{10.0}, t));
    for (double db : {0.0, 15.0, 30.0}) {
        const double mean = db_to_linear(db);
        const auto g = switching_thresholds(1e-4, t);
        const auto w = segment_weights(g, mean);
        double sum = 0.0;
        for (double x : w) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(mcs_usable_probability(1e-4, ChannelModel{mean}, t)).epsilon(1e-14));
    }
}

TEST_CASE("mode distribution against the naive formula") {
    const auto t = McsTable::nr_256qam();
    const auto se = table_se(t);
    for (double db : {5.0, 15.0, 25.0}) {
        const ModeDistribution d(1e-4, ChannelModel::from_db(db), t);
        const auto ref = oracle::mode_probabilities(se, 1e-4, db_to_linear(db));
        double sum = 0.0;
        for (std::size_t j = 0; j < se.size(); ++j) {
            CHECK(d.probabilities()[j] == doctest::Approx(ref[j]).epsilon(1e-11));
            sum += d.probabilities()[j];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    // Deep fade: P_T underflows but conditional probabilities stay finite.
    const ModeDistribution deep(1e-8, ChannelModel{1e-3}, t);
    CHECK(deep.usable_probability() == 0.0);
    CHECK(deep.probabilities()[0] == doctest::Approx(1.0));
}

TEST_CASE("average BLER closed form for one mode and L = 1") {
    // E[Pb | snr >= g0] = 0.2 e^{-a g0} / (1 + a mean), a = 1.5 / (2^v - 1).
    for (double v : {0.5, 2.0, 5.0}) {
        const auto one = McsTable::single_mode(v);
        for (double rho : {1e-6, 1e-3, 0.05}) {
            for (double mean : {1.0, 30.0, 1000.0}) {
                const double a = 1.5 / (std::pow(2.0, v) - 1.0);
                const double g0 = oracle::threshold(v, rho);
                const double ref = 0.2 * std::exp(-a * g0) / (1.0 + a * mean);
                CHECK(average_bler(rho, ChannelModel{mean}, 1, one) == doctest::Approx(ref).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("average BLER against high-precision values") {
    const auto t = McsTable::nr_256qam();
    for (const auto& ref : oracle::kAveragedBler) {
        CHECK(average_bler(ref.rho, ChannelModel::from_db(ref.mean_snr_db), 1024, t) ==
              doctest::Approx(ref.value).epsilon(1e-9));
    }
}

TEST_CASE("average BLER behaviour") {
    const auto t = McsTable::nr_256qam();
    const ChannelModel ch = ChannelModel::from_db(15.0);
    double prev = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double rho = std::pow(10.0, -8.0 + 7.0 * k / 20.0);
        const double p = average_bler(rho, ch, 1024, t);
        CHECK(p > prev);
        CHECK(p <= 1.0);
        CHECK(p + average_decode_success(rho, ch, 1024, t) == doctest::Approx(1.0).epsilon(1e-9));
        prev = p;
    }
    // Saturated: stays a probability and keeps the complement precise.
    const ChannelModel weak = ChannelModel::from_db(5.0);
    CHECK(average_bler(0.1, weak, 1024, t) == 1.0);
    CHECK(average_decode_success(0.1, weak, 1024, t) > 0.0);
    CHECK(average_decode_success(0.1, weak, 1024, t) < average_decode_success(0.07, weak, 1024, t));
    AverageBlerOptions direct;
    direct.saturation_complement = false;
    CHECK(average_bler(0.1, weak, 1024, t, direct) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(average_bler(1e-3, ch, 1024, t, direct) == average_bler(1e-3, ch, 1024, t));

    std::vector<SegmentDiagnostics> diag;
    average_bler(1e-3, ch, 1024, t, {}, &diag);
    REQUIRE_FALSE(diag.empty());
    CHECK(diag.front().segment == 0);

    AverageBlerOptions starved;
    starved.relative_tolerance = 1e-300;
    starved.max_depth = 2;
    try {
        average_bler(1e-3, ch, 1024, t, starved);
        FAIL("expected a NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("segment") != std::string::npos);
    }
    CHECK_THROWS_AS(average_bler(1e-3, ChannelModel{-1.0}, 1024, t), std::domain_error);
    CHECK_THROWS_AS(average_bler(1e-3, ch, 0, t), std::domain_error);
}

TEST_CASE("quadrature against Monte Carlo") {
    const auto t = McsTable::nr_256qam();
    const auto se = table_se(t);
    const SystemParams params;
    std::uint64_t seed = 101;
    for (double rho : {1e-5, 1e-3}) {
        for (double db : {5.0, 20.0}) {
            const double mean = db_to_linear(db);
            oracle::ConditionalChannel ch(se, rho, mean, seed++);
            const auto bler = oracle::sample_mean(200000, [&] {
                const double s = ch.snr();
                const int j = oracle::mode_of(se, rho, s);
                return oracle::bler(se[static_cast<std::size_t>(j)], s, 1024);
            });
            const auto info = oracle::sample_mean(200000, [&] {
                const int j = oracle::mode_of(se, rho, ch.snr());
                return 168.0 * se[static_cast<std::size_t>(j)];
            });
            CHECK(std::abs(average_bler(rho, ChannelModel{mean}, 1024, t) - bler.mean) <= 3.0 * bler.se);
            CHECK(std::abs(expected_info_per_rb(rho, ChannelModel{mean}, params, t) - info.mean) <=
                  3.0 * info.se);
        }
    }
}

TEST_CASE("expected info per RB") {
    const SystemParams params;
    const auto one = McsTable::single_mode(1.5);
    CHECK(expected_info_per_rb(1e-4, ChannelModel{7.0}, params, one) == doctest::Approx(168.0 * 1.5));
    const auto t = McsTable::nr_256qam();
    const ChannelModel ch = ChannelModel::from_db(15.0);
    CHECK(expected_info_per_rb(1e-5, ch, params, t) < expected_info_per_rb(1e-3, ch, params, t));
    CHECK(expected_info_per_rb(0.2, ch, params, t) == doctest::Approx(168.0 * 7.4063));
}

TEST_CASE("MGF") {
    const SystemParams params;
    const auto t = McsTable::nr_256qam();
    const ChannelModel ch = ChannelModel::from_db(12.0);
    CHECK(ec_mgf({1e-3, 10, 0.0}, ch, params, t) == 1.0);
    const auto one = McsTable::single_mode(2.0);
    CHECK(ec_mgf({1e-3, 3, 1e-4}, ch, params, one) == doctest::Approx(std::exp(-1e-4 * 3 * 168.0 * 2.0)));
    double prev = 1.0;
    for (double theta : {1e-6, 1e-5, 1e-4}) {
        const double m = ec_mgf({1e-3, 10, theta}, ch, params, t);
        CHECK(m > 0.0);
        CHECK(m < prev);
        CHECK(ec_mgf({1e-3, 11, theta}, ch, params, t) < m);
        prev = m;
    }
    const ModeDistribution d(1e-3, ch, t);
    CHECK(d.log_mgf(1e-5, 10, params) == doctest::Approx(std::log(d.mgf(1e-5, 10, params))).epsilon(1e-12));
    CHECK(d.log_mgf(1e-2, 40, params) == doctest::Approx(std::log(d.mgf(1e-2, 40, params))).epsilon(1e-10));
    CHECK(d.log_mgf(1e-15, 1, params) == doctest::Approx(-1e-15 * d.expected_info_per_rb(params)).epsilon(1e-9));

    // Monte Carlo with the std exponential generator.
    const auto se = table_se(t);
    oracle::ConditionalChannel mc(se, 1e-3, ch.mean_snr, 77);
    const double theta = 2e-4;
    const auto est = oracle::sample_mean(200000, [&] {
        const int j = oracle::mode_of(se, 1e-3, mc.snr());
        return std::exp(-theta * 10 * 168.0 * se[static_cast<std::size_t>(j)]);
    });
    CHECK(std::abs(ec_mgf({1e-3, 10, theta}, ch, params, t) - est.mean) <= 3.0 * est.se);
    CHECK_THROWS_AS(ec_mgf({1e-3, 0, theta}, ch, params, t), std::domain_error);
    CHECK_THROWS_AS(ec_mgf({1e-3, 1, -1.0}, ch, params, t), std::domain_error);
}

TEST_CASE("gap-to-capacity efficiency") {
    CHECK(shannon_gap_efficiency(0.0, 1e-3) == 0.0);
    const double gap = -2.0 * std::log(5e-3) / 3.0;
    CHECK(shannon_gap_efficiency(gap, 1e-3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(shannon_gap_efficiency(10.0, 1e-3) == doctest::Approx(oracle::kShannon10Rho1e3).epsilon(1e-13));
    CHECK_THROWS(shannon_gap_efficiency(-1.0, 1e-3));
}

TEST_CASE("SNR sampling") {
    Rng rng(5);
    const double mean = 20.0;
    const auto free = oracle::sample_mean(400000, [&] { return sample_snr(mean, rng); });
    CHECK(std::abs(free.mean - mean) <= 3.0 * free.se);

    const auto t = McsTable::nr_256qam();
    const double g0 = switching_thresholds(1e-3, t)[0];
    double lowest = std::numeric_limits<double>::infinity();
    const auto cond = oracle::sample_mean(400000, [&] {
        const double s = sample_snr(mean, rng, g0);
        lowest = std::min(lowest, s);
        return s;
    });
    CHECK(lowest >= g0);
    CHECK(std::abs(cond.mean - (g0 + mean)) <= 3.0 * cond.se);

    const double pt = mcs_usable_probability(1e-3, ChannelModel{mean}, t);
    const auto usable = oracle::sample_mean(400000, [&] { return sample_snr(mean, rng) >= g0 ? 1.0 : 0.0; });
    CHECK(std::abs(usable.mean - pt) <= 3.0 * usable.se);

    Rng a(9);
    Rng b(9);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_snr(3.0, a) == sample_snr(3.0, b));
    }
    CHECK(uniform01(a) < 1.0);
}

TEST_CASE("decibel conversion") {
    for (double db : {-20.0, 0.0, 3.0, 17.5}) {
        CHECK(linear_to_db(db_to_linear(db)) == doctest::Approx(db).epsilon(1e-12));
    }
    CHECK(ChannelModel::from_db(10.0).mean_snr == doctest::Approx(10.0));
}

}
