#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "noma/noma_rates.hpp"
#include "oracles.hpp"

using namespace noma;

namespace {

std::vector<double> random_powers(std::mt19937_64& rng, const Scenario& s) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) p[k] = u(rng) * s.user(k).p_max;
    return p;
}

std::vector<double> gains(const Scenario& s) {
    std::vector<double> g;
    for (const auto& u : s.users()) g.push_back(u.channel_gain);
    return g;
}

}  // namespace

TEST_CASE("decoding order parsing") {
    const auto o = DecodingOrder::parse("2->1");
    CHECK(o.user_at(0) == 1);
    CHECK(o.user_at(1) == 0);
    CHECK(o.position_of(0) == 1);
    CHECK(o.to_string() == "2->1");
    CHECK(DecodingOrder::parse("4-3-2-1") == DecodingOrder::reversed(4));
    CHECK_THROWS(DecodingOrder::parse("1->1"));
    CHECK_THROWS(DecodingOrder::parse("1->x"));
    CHECK_THROWS(DecodingOrder({0, 2}));
    CHECK(all_decoding_orders(3).size() == 6);
}

TEST_CASE("single user reduces to the point-to-point link") {
    const Scenario s = Scenario::homogeneous(std::vector<double>{2e-10}, 1.0, PaModel::ideal(), 1e-13, 1.0);
    const std::vector<double> p{0.5};
    const auto o = DecodingOrder::identity(1);
    CHECK(sinr(0, o, p, s) == doctest::Approx(0.5 * 2e-10 / 1e-13).epsilon(1e-14));
}

TEST_CASE("two-user rates written out by hand") {
    const Scenario s = fixture::two_user();
    const auto pi1 = DecodingOrder::parse("2->1");
    const std::vector<double> p{0.389, 0.389};
    const double h1 = s.user(0).channel_gain, h2 = s.user(1).channel_gain;
    const double n0 = s.noise_power();
    const double d = 0.0032 * std::pow(0.389, 1.3552) * (h1 + h2);
    // User 2 first sees user 1's signal; user 1 last sees distortion only.
    const double r2 = std::log2(1.0 + 0.389 * h2 / (0.389 * h1 + d + n0));
    const double r1 = std::log2(1.0 + 0.389 * h1 / (d + n0));
    const auto r = user_rates(pi1, p, s);
    CHECK(r[0] == doctest::Approx(r1).epsilon(1e-13));
    CHECK(r[1] == doctest::Approx(r2).epsilon(1e-13));
    CHECK(interference_plus_noise(1, pi1, p, s) == doctest::Approx(d + n0).epsilon(1e-13));
    CHECK(sum_rate(p, s) == doctest::Approx(r1 + r2).epsilon(1e-12));
}

TEST_CASE("sum rate at the reported two-user operating point") {
    const Scenario s = fixture::two_user();
    const double p = fixture::watts(25.9);
    const std::vector<double> pp{p, p};
    // Caption value (1.933 + 0.582) x 1e8 bits/s.
    CHECK(s.bandwidth() * sum_rate(pp, s) == doctest::Approx(2.515e8).epsilon(0.02));
    CHECK(sum_rate(std::vector<double>{0.0, 0.0}, s) == 0.0);
    CHECK(user_rate(0, DecodingOrder::identity(2), std::vector<double>{0.0, 0.0}, s) == 0.0);
}

TEST_CASE("property: sum rate is order invariant") {
    std::mt19937_64 rng(5);
    for (std::size_t k = 1; k <= 5; ++k) {
        for (int t = 0; t < 10; ++t) {
            const Scenario s = fixture::random_scenario(rng, k);
            const auto p = random_powers(rng, s);
            const double ref = sum_rate(p, s);
            for (const auto& o : all_decoding_orders(k)) {
                double total = 0.0;
                for (double r : user_rates(o, p, s)) total += r;
                CHECK(total == doctest::Approx(ref).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("property: rates match the extended precision oracle") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
        const Scenario s = fixture::random_scenario(rng, 3);
        const auto p = random_powers(rng, s);
        const auto o = all_decoding_orders(3)[t % 6];
        const std::vector<double> a(3, s.user(0).model.a()), al(3, s.user(0).model.alpha());
        for (std::size_t pos = 0; pos < 3; ++pos) {
            const auto ref = oracle::user_rate_ld(pos, o.perm(), p, gains(s), s.noise_power(), a, al);
            CHECK(user_rate(pos, o, p, s) == doctest::Approx((double)ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: decoding a user earlier never raises its rate") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 200; ++t) {
        const Scenario s = fixture::random_scenario(rng, 3);
        const auto p = random_powers(rng, s);
        for (const auto& o : all_decoding_orders(3)) {
            for (std::size_t pos = 1; pos < 3; ++pos) {
                auto perm = o.perm();
                std::swap(perm[pos - 1], perm[pos]);
                const DecodingOrder earlier(perm);
                const std::size_t u = o.user_at(pos);
                CHECK(user_rates(earlier, p, s)[u] <= user_rates(o, p, s)[u] + 1e-15);
            }
        }
    }
}

TEST_CASE("property: distortion drives the sum rate to zero at high power") {
    const Scenario s = Scenario::homogeneous(std::vector<double>{1e-10, 2e-10}, 1e7,
                                             PaModel(0.0032, 1.3552), 1e-13, 1.0);
    double prev = kInf;
    for (int t = 2; t <= 16; ++t) {
        const double p = std::pow(10.0, t);
        const double r = sum_rate(std::vector<double>{p, p}, s);
        CHECK(r < prev);
        prev = r;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("property: slack sign agrees with the rate floor") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> floor(0.0, 8.0);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const Scenario s = fixture::random_scenario(rng, 3);
        const auto p = random_powers(rng, s);
        const auto o = DecodingOrder::identity(3);
        const std::size_t pos = static_cast<std::size_t>(t % 3);
        const double r = floor(rng);
        const double rate = user_rate(pos, o, p, s);
        if (std::abs(rate - r) < 1e-9) continue;
        CHECK((rate_constraint_slack(pos, o, p, s, r) >= 0.0) == (rate >= r));
        ++checked;
    }
    CHECK(checked > 900);
    const Scenario s = fixture::two_user();
    const std::vector<double> p{0.3, 0.2};
    const auto o = DecodingOrder::identity(2);
    CHECK(rate_constraint_slack(0, o, p, s, 0.0) == doctest::Approx(0.3 * s.user(0).channel_gain));
    const double exact = user_rate(0, o, p, s);
    CHECK(std::abs(rate_constraint_slack(0, o, p, s, exact)) < 1e-12 * 0.3 * s.user(0).channel_gain);
}

TEST_CASE("input validation") {
    const Scenario s = fixture::two_user();
    CHECK_THROWS(sum_rate(std::vector<double>{1.0}, s));
    CHECK_THROWS(sum_rate(std::vector<double>{-1.0, 0.0}, s));
    CHECK_THROWS(user_rate(2, DecodingOrder::identity(2), std::vector<double>{0.0, 0.0}, s));
    CHECK_THROWS(Scenario({}, 1.0, 1.0));
    CHECK_THROWS(Scenario::homogeneous(std::vector<double>{1.0}, 1.0, PaModel::ideal(), 0.0, 1.0));
}
