#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "lm05/analytics.hpp"

using namespace lm05;

TEST_CASE("signal probability is the exact exponential") {
  CHECK(signal_probability(1.0, 1.0, 1.0) ==
        doctest::Approx(0.6321205588285577).epsilon(1e-12));
  CHECK(signal_probability(0.118, 0.5, 0.27) ==
        doctest::Approx(0.0158037886211428).epsilon(1e-10));
  CHECK(signal_probability(1e-12, 1.0, 1.0) > 0.0);
  CHECK(signal_probability(1e-12, 1.0, 1.0) < 2e-12);
  CHECK_THROWS_AS(signal_probability(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(signal_probability(1.0, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(signal_probability(1.0, 1.0, 1.5), std::domain_error);
}

TEST_CASE("average detection probability") {
  CHECK(detection_probability(0.5, 0.0) == 0.5);
  CHECK(detection_probability(0.0, 0.25) == 0.5);
  CHECK(detection_probability(0.01581, 2.4e-6) ==
        doctest::Approx(0.015814724112).epsilon(1e-12));
  CHECK_THROWS_AS(detection_probability(-0.1, 0.0), std::domain_error);
  CHECK_THROWS_AS(detection_probability(0.5, 1.5), std::domain_error);
}

TEST_CASE("multiphoton yield bounds") {
  CHECK(pns_yield_lm05(1.0) == doctest::Approx(0.0496447769737739).epsilon(1e-12));
  CHECK(pns_yield_lm05(0.118) ==
        doctest::Approx(0.000129031587494999).epsilon(1e-10));
  CHECK(pns_yield_bb84(1.0) == doctest::Approx(0.264241117657115).epsilon(1e-12));
  CHECK(pns_yield_bb84(0.1) == doctest::Approx(0.0046788401604444).epsilon(1e-10));
  CHECK_THROWS_AS(pns_yield_lm05(0.0), std::domain_error);
  CHECK_THROWS_AS(pns_yield_bb84(-0.5), std::domain_error);
}

TEST_CASE("yield bound cross-check against partial pmf sums") {
  // P~ must equal P3/2 + P_{n>3} computed term by term from the pmf
  for (const double mu : {0.1, 0.118, 0.5, 1.0, 2.0}) {
    const double head = poisson_pmf(0, mu) + poisson_pmf(1, mu) +
                        poisson_pmf(2, mu) + poisson_pmf(3, mu);
    const double alt = 0.5 * poisson_pmf(3, mu) + (1.0 - head);
    CHECK(pns_yield_lm05(mu) == doctest::Approx(alt).epsilon(1e-12));
    const double alt_star = 1.0 - poisson_pmf(0, mu) - poisson_pmf(1, mu);
    CHECK(pns_yield_bb84(mu) == doctest::Approx(alt_star).epsilon(1e-12));
  }
}

TEST_CASE("yield bounds: small-mu leading order") {
  const double mu = 1e-3;
  CHECK(pns_yield_lm05(mu) == doctest::Approx(mu * mu * mu / 12.0).epsilon(0.01));
  CHECK(pns_yield_bb84(mu) == doctest::Approx(mu * mu / 2.0).epsilon(0.01));
}

TEST_CASE("two-way yield is strictly below the BB84 yield") {
  for (int i = 1; i <= 500; ++i) {
    const double mu = 5.0 * i / 500.0;
    CHECK(pns_yield_lm05(mu) < pns_yield_bb84(mu));
  }
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0248) == doctest::Approx(0.167602664215024).epsilon(1e-12));
  for (int i = 1; i < 50; ++i) {
    const double e = i / 100.0;
    CHECK(binary_entropy(e) == doctest::Approx(binary_entropy(1.0 - e)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("privacy amplification fraction tau") {
  CHECK(tau(0.0) == 0.0);
  CHECK(std::abs(tau(0.5) - 1.0) < 1e-12);  // continuous at the branch point
  CHECK(tau(0.25) == doctest::Approx(0.807354922057604).epsilon(1e-12));
  CHECK(tau(0.75) == 1.0);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double t = tau(0.5 * i / 100.0);
    CHECK(t >= prev);
    prev = t;
  }
  CHECK_THROWS_AS(tau(-0.1), std::domain_error);
  CHECK_THROWS_AS(tau(1.1), std::domain_error);
}

TEST_CASE("cascade efficiency table") {
  const CascadeTable table;
  CHECK(table.efficiency(0.01) == doctest::Approx(1.16));
  CHECK(table.efficiency(0.05) == doctest::Approx(1.16));
  CHECK(table.efficiency(0.10) == doctest::Approx(1.22));
  CHECK(table.efficiency(0.15) == doctest::Approx(1.35));
  CHECK(table.efficiency(0.0248) == doctest::Approx(1.16));
  CHECK(table.efficiency(0.075) == doctest::Approx(1.19));
  // clamped outside the anchors
  CHECK(table.efficiency(0.001) == doctest::Approx(1.16));
  CHECK(table.efficiency(0.30) == doctest::Approx(1.35));
  CHECK_THROWS_AS(table.efficiency(-0.1), std::domain_error);
}

TEST_CASE("cascade table file loading") {
  const char* path = "cascade_test_table.txt";
  {
    std::ofstream out(path);
    out << "# qber efficiency\n0.01 1.10\n0.10 1.30\n";
  }
  const CascadeTable table = CascadeTable::from_file(path);
  CHECK(table.efficiency(0.01) == doctest::Approx(1.10));
  CHECK(table.efficiency(0.055) == doctest::Approx(1.20));
  CHECK(table.efficiency(0.10) == doctest::Approx(1.30));
  {
    std::ofstream out(path);
    out << "0.10 1.30\n0.01 1.10\n";  // not increasing
  }
  CHECK_THROWS_AS(CascadeTable::from_file(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "0.10\n";  // missing column
  }
  CHECK_THROWS_AS(CascadeTable::from_file(path), std::runtime_error);
  CHECK_THROWS_AS(CascadeTable::from_file("does_not_exist.txt"), std::runtime_error);
  std::remove(path);
}

TEST_CASE("secure gain in the noiseless limit equals p_av * beta") {
  const CascadeTable table;
  const GainReport r =
      secure_gain_at(Protocol::LM05, 1e-6, 1.0, 1.0, 0.0, 0.0, table);
  CHECK(r.g_sec == doctest::Approx(r.p_av * r.beta).epsilon(1e-15));
  CHECK(r.beta == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.g_sec == doctest::Approx(r.p_av).epsilon(1e-6));
}

TEST_CASE("measured-parameter gains under both eta accountings") {
  const CascadeTable table;
  // eta applied in the exponent
  GainOptions a;
  const GainReport la = secure_gain_at(Protocol::LM05, 0.118, 0.5, 0.27,
                                       2.4e-6, 0.0248, table, a);
  const GainReport ba = secure_gain_at(Protocol::BB84, 0.118, 0.5, 0.27,
                                       2.4e-6, 0.0248, table, a);
  CHECK(la.g_sec == doctest::Approx(0.0105011696788).epsilon(1e-9));
  CHECK(ba.g_sec == doctest::Approx(0.00214332121765).epsilon(1e-9));
  // eta already inside t_link
  GainOptions b;
  b.eta_in_gamma = true;
  const GainReport lb = secure_gain_at(Protocol::LM05, 0.118, 0.5, 0.27,
                                       2.4e-6, 0.0248, table, b);
  const GainReport bb = secure_gain_at(Protocol::BB84, 0.118, 0.5, 0.27,
                                       2.4e-6, 0.0248, table, b);
  CHECK(lb.g_sec == doctest::Approx(0.0209590150968).epsilon(1e-9));
  CHECK(bb.g_sec == doctest::Approx(0.00736114128578).epsilon(1e-9));
  CHECK(lb.g_sec / bb.g_sec == doctest::Approx(2.84725075679).epsilon(1e-9));
  // the BB84 sifting factor is visible in the report
  CHECK(bb.throughput_factor == 0.5);
  CHECK(lb.throughput_factor == 1.0);
}

TEST_CASE("gain vanishes at the security boundary") {
  const CascadeTable table;
  // bisect p_av(t) = P~ at mu = 1, eta = 1, no darks
  const double target = pns_yield_lm05(1.0);
  double lo = 1e-6, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (signal_probability(1.0, 1.0, mid) < target ? lo : hi) = mid;
  }
  const double t_star = 0.5 * (lo + hi);
  const GainReport below = secure_gain_at(Protocol::LM05, 1.0, 1.0,
                                          t_star * 0.999, 0.0, 0.0, table);
  CHECK(below.g_sec == 0.0);
  CHECK(below.beta <= 0.0);
  const GainReport above = secure_gain_at(Protocol::LM05, 1.0, 1.0,
                                          t_star * 1.001, 0.0, 0.0, table);
  CHECK(above.g_sec > 0.0);
}

TEST_CASE("account-cm charges the two-way throughput only") {
  const CascadeTable table;
  GainOptions opt;
  opt.account_cm = true;
  const GainReport l = secure_gain_at(Protocol::LM05, 0.118, 0.5, 0.27, 0.0,
                                      0.0248, table, opt, 0.25);
  const GainReport plain = secure_gain_at(Protocol::LM05, 0.118, 0.5, 0.27,
                                          0.0, 0.0248, table, GainOptions{}, 0.25);
  CHECK(l.throughput_factor == doctest::Approx(0.75));
  CHECK(l.g_sec == doctest::Approx(plain.g_sec * 0.75).epsilon(1e-12));
  const GainReport b = secure_gain_at(Protocol::BB84, 0.118, 0.5, 0.27, 0.0,
                                      0.0248, table, opt, 0.25);
  CHECK(b.throughput_factor == 0.5);  // no control mode in BB84
}

TEST_CASE("security margin crossings against a bisection oracle") {
  LinkParams link;
  link.mu = 1.0;
  link.eta_b = 1.0;
  const auto crossing = [&](Protocol proto) {
    double lo = 1e-6, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (security_margin(link, proto, mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  CHECK(crossing(Protocol::LM05) == doctest::Approx(0.050919445302854).epsilon(1e-9));
  CHECK(crossing(Protocol::BB84) == doctest::Approx(0.306852819440055).epsilon(1e-9));
  CHECK(security_margin(link, Protocol::LM05, 1.0) ==
        doctest::Approx(0.5824757818547838).epsilon(1e-12));
  CHECK(security_margin(link, Protocol::BB84, 1.0) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-12));
}

TEST_CASE("security margin has a unique sign change in t") {
  LinkParams link;
  link.mu = 1.0;
  link.eta_b = 1.0;
  int changes = 0;
  double prev = security_margin(link, Protocol::LM05, 1e-4);
  for (int i = 1; i <= 2000; ++i) {
    const double t = 1e-4 + (1.0 - 1e-4) * i / 2000.0;
    const double m = security_margin(link, Protocol::LM05, t);
    if ((prev < 0.0) != (m < 0.0)) ++changes;
    CHECK(m > prev);  // monotone in t
    prev = m;
  }
  CHECK(changes == 1);
}

TEST_CASE("gain report fields are mutually consistent") {
  const CascadeTable table;
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mu = 0.01 + 1.99 * u(gen);
    const double eta = 0.1 + 0.9 * u(gen);
    const double t = 0.001 + 0.999 * u(gen);
    const double d = u(gen) * 1e-4;
    const double e = u(gen) * 0.12;
    const Protocol proto = u(gen) < 0.5 ? Protocol::LM05 : Protocol::BB84;
    const GainReport r = secure_gain_at(proto, mu, eta, t, d, e, table);
    CHECK(std::abs(recompute_gain(r) - r.g_sec) <= 1e-12);
    CHECK(r.p_av ==
          doctest::Approx(r.p_sign + r.p_dark - r.p_sign * r.p_dark).epsilon(1e-12));
    CHECK(r.beta == doctest::Approx((r.p_av - r.yield_bound) / r.p_av).epsilon(1e-12));
    CHECK(r.g_sec >= 0.0);
    if (r.beta <= 0.0) CHECK(r.g_sec == 0.0);
  }
}

namespace {

LinkParams fig2_link() {
  LinkParams link;
  link.mu = 0.1;  // overridden by the optimizer
  link.alpha = 2.5;
  link.gamma_c_db = 8.0;
  link.eta_b = 0.5;
  link.d_b = 5e-8;
  return link;
}

}  // namespace

TEST_CASE("mu optimizer beats a 200-point verification grid") {
  const CascadeTable table;
  const QberModel model = QberModel::dark_driven(kDefaultMisalignment);
  for (const Protocol proto : {Protocol::LM05, Protocol::BB84}) {
    LinkParams link = fig2_link();
    link.length_km = 3.0;
    const MuOptimum opt = optimize_mu(link, proto, model, table);
    REQUIRE(opt.secure);
    for (int i = 0; i < 200; ++i) {
      const double mu = 1e-4 * std::pow(2.0 / 1e-4, i / 199.0);
      LinkParams probe = link;
      probe.mu = mu;
      const double g = secure_gain(probe, proto,
                                   [&] {
                                     const double path = path_km(proto, probe.length_km);
                                     const double t = transmissivity(probe.alpha, path, probe.gamma_c_db);
                                     const double ps = signal_probability(mu, probe.eta_b, t);
                                     const double pav = detection_probability(ps, probe.d_b);
                                     return model.evaluate(ps, pav, probe.d_b);
                                   }(),
                                   table)
                             .g_sec;
      CHECK(opt.g_star >= g - 1e-9);
    }
  }
}

TEST_CASE("optimizer reports the insecure sentinel beyond reach") {
  const CascadeTable table;
  LinkParams link = fig2_link();
  link.length_km = 10.0;
  const MuOptimum opt = optimize_mu(link, Protocol::LM05,
                                    QberModel::dark_driven(kDefaultMisalignment), table);
  CHECK_FALSE(opt.secure);
  CHECK(std::isnan(opt.mu_star));
  CHECK(opt.g_star == 0.0);
}

TEST_CASE("optimizer finds a finite optimum for ideal devices at zero distance") {
  const CascadeTable table;
  LinkParams link;
  link.mu = 0.1;
  link.eta_b = 1.0;
  const MuOptimum opt =
      optimize_mu(link, Protocol::LM05, QberModel::constant(0.0), table);
  REQUIRE(opt.secure);
  CHECK(opt.mu_star > 0.0);
  CHECK(opt.mu_star < 2.0);
  CHECK(opt.g_star > 0.0);
}

TEST_CASE("experimental mean photon number is near-optimal around 3 km") {
  // tabletop devices extrapolated over fiber: Gamma_c ~ 5.7 dB, d_B 2.4e-6
  const CascadeTable table;
  LinkParams link;
  link.mu = 0.1;
  link.alpha = 2.5;
  link.gamma_c_db = 5.7;
  link.eta_b = 0.5;
  link.d_b = 2.4e-6;
  link.length_km = 3.0;
  const MuOptimum opt = optimize_mu(link, Protocol::LM05,
                                    QberModel::dark_driven(0.0248), table);
  REQUIRE(opt.secure);
  CHECK(opt.mu_star >= 0.06);
  CHECK(opt.mu_star <= 0.25);
  CHECK(opt.mu_star == doctest::Approx(0.112).epsilon(0.05));
}

TEST_CASE("maximum secure distance") {
  const CascadeTable table;
  const QberModel model = QberModel::dark_driven(kDefaultMisalignment);
  const LinkParams link = fig2_link();
  const double dl = max_secure_distance(link, Protocol::LM05, model, table);
  const double db = max_secure_distance(link, Protocol::BB84, model, table);
  CHECK(dl >= 6.0);
  CHECK(dl <= 7.0);
  CHECK(db >= 6.0);
  CHECK(db <= 7.0);
  LinkParams opaque = link;
  opaque.alpha = 1e4;
  CHECK(max_secure_distance(opaque, Protocol::LM05, model, table) == 0.0);
}

TEST_CASE("qber estimator") {
  CHECK(qber_estimate({248, 0, 10000}) == doctest::Approx(0.0248).epsilon(1e-15));
  CHECK(qber_estimate({0, 0, 1234}) == 0.0);
  CHECK(qber_estimate({10, 4, 100}) == doctest::Approx(0.12).epsilon(1e-15));
  CHECK_THROWS_AS(qber_estimate({0, 0, 0}), std::domain_error);
  CHECK_THROWS_AS(qber_estimate({80, 40, 100}), std::domain_error);
}

TEST_CASE("qber models") {
  const QberModel c = QberModel::constant(0.03);
  CHECK(c.evaluate(0.5, 0.6, 1e-3) == 0.03);
  const QberModel d = QberModel::dark_driven(0.02);
  const double ps = 0.01, db = 1e-5;
  const double pav = detection_probability(ps, db);
  CHECK(d.evaluate(ps, pav, db) ==
        doctest::Approx((0.02 * ps + db) / pav).epsilon(1e-12));
  CHECK_THROWS_AS(QberModel::constant(1.5), std::domain_error);
}
