#include "lm05/analytics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lm05 {

namespace {

constexpr double kMuSearchLo = 1e-4;
constexpr double kMuSearchHi = 2.0;
constexpr double kMuTolerance = 1e-5;

std::atomic<bool> g_cascade_warned{false};

}  // namespace

const char* name(Protocol p) { return p == Protocol::LM05 ? "lm05" : "bb84"; }

double path_km(Protocol protocol, double length_km) {
  return protocol == Protocol::LM05 ? 2.0 * length_km : length_km;
}

double signal_probability(double mu, double eta_b, double t_link) {
  if (!(mu > 0.0)) throw std::domain_error("signal_probability: mu must be positive");
  if (eta_b < 0.0 || eta_b > 1.0)
    throw std::domain_error("signal_probability: eta_b must lie in [0,1]");
  if (t_link < 0.0 || t_link > 1.0)
    throw std::domain_error("signal_probability: t_link must lie in [0,1]");
  return -std::expm1(-mu * eta_b * t_link);
}

double detection_probability(double p_sign, double d_b) {
  if (p_sign < 0.0 || p_sign > 1.0 || d_b < 0.0 || d_b > 1.0)
    throw std::domain_error("detection_probability: inputs out of range");
  const double p_dark = std::min(2.0 * d_b, 1.0);  // two detectors
  return p_sign + p_dark - p_sign * p_dark;
}

double pns_yield_lm05(double mu) {
  if (!(mu > 0.0)) throw std::domain_error("pns_yield_lm05: mu must be positive");
  const double poly = 1.0 + mu + mu * mu / 2.0 + mu * mu * mu / 12.0;
  return 1.0 - poly * std::exp(-mu);
}

double pns_yield_bb84(double mu) {
  if (!(mu > 0.0)) throw std::domain_error("pns_yield_bb84: mu must be positive");
  return 1.0 - (1.0 + mu) * std::exp(-mu);
}

double pns_yield(Protocol protocol, double mu) {
  return protocol == Protocol::LM05 ? pns_yield_lm05(mu) : pns_yield_bb84(mu);
}

double binary_entropy(double e) {
  if (e < 0.0 || e > 1.0) throw std::domain_error("binary_entropy: e must lie in [0,1]");
  if (e == 0.0 || e == 1.0) return 0.0;
  return -e * std::log2(e) - (1.0 - e) * std::log2(1.0 - e);
}

double tau(double e) {
  if (e < 0.0 || e > 1.0) throw std::domain_error("tau: e must lie in [0,1]");
  if (e > 0.5) return 1.0;
  return std::log2(1.0 + 4.0 * e - 4.0 * e * e);
}

CascadeTable::CascadeTable()
    : anchors_{{0.01, 1.16}, {0.05, 1.16}, {0.10, 1.22}, {0.15, 1.35}} {}

CascadeTable::CascadeTable(std::vector<std::pair<double, double>> anchors)
    : anchors_(std::move(anchors)) {}

CascadeTable CascadeTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cascade table: cannot open " + path);
  std::vector<std::pair<double, double>> anchors;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double e, f;
    if (!(row >> e)) continue;  // blank line
    if (!(row >> f))
      throw std::runtime_error("cascade table: missing efficiency on line " +
                               std::to_string(lineno));
    if (e < 0.0 || e > 1.0 || f < 1.0)
      throw std::runtime_error("cascade table: out-of-range entry on line " +
                               std::to_string(lineno));
    if (!anchors.empty() && e <= anchors.back().first)
      throw std::runtime_error("cascade table: QBER column must be strictly increasing");
    anchors.emplace_back(e, f);
  }
  if (anchors.size() < 2)
    throw std::runtime_error("cascade table: need at least two anchor rows");
  return CascadeTable(std::move(anchors));
}

double CascadeTable::efficiency(double e) const {
  if (e < 0.0 || e > 1.0) throw std::domain_error("f_cascade: e must lie in [0,1]");
  if (e <= anchors_.front().first) return anchors_.front().second;
  if (e >= anchors_.back().first) {
    if (e > anchors_.back().first && !g_cascade_warned.exchange(true))
      std::cerr << "warning: QBER " << e << " above the Cascade table range; "
                << "clamping efficiency to " << anchors_.back().second << "\n";
    return anchors_.back().second;
  }
  for (std::size_t i = 1; i < anchors_.size(); ++i) {
    if (e <= anchors_[i].first) {
      const auto& [x0, y0] = anchors_[i - 1];
      const auto& [x1, y1] = anchors_[i];
      return y0 + (y1 - y0) * (e - x0) / (x1 - x0);
    }
  }
  return anchors_.back().second;  // unreachable
}

double recompute_gain(const GainReport& r) {
  if (r.beta <= 0.0) return 0.0;
  const double bracket = r.beta * (1.0 - r.tau_prime) - r.f_casc * r.h_e;
  return bracket > 0.0 ? r.p_av * bracket * r.throughput_factor : 0.0;
}

GainReport secure_gain_at(Protocol protocol, double mu, double eta_b,
                          double t_link, double d_b, double e,
                          const CascadeTable& cascade,
                          const GainOptions& options, double cm_probability,
                          double total_path_km) {
  if (e < 0.0 || e > 1.0) throw std::domain_error("secure_gain: e must lie in [0,1]");
  GainReport r;
  r.protocol = protocol;
  r.mu_used = mu;
  r.total_path_km = total_path_km;
  const double eta_eff = options.eta_in_gamma ? 1.0 : eta_b;
  r.p_sign = signal_probability(mu, eta_eff, t_link);
  r.p_dark = 2.0 * d_b;
  r.p_av = detection_probability(r.p_sign, d_b);
  r.yield_bound = pns_yield(protocol, mu);
  r.beta = (r.p_av - r.yield_bound) / r.p_av;
  r.e = e;
  r.h_e = binary_entropy(e);
  r.f_casc = cascade.efficiency(e);
  r.tau_prime = r.beta > 0.0 ? tau(std::min(e / r.beta, 1.0)) : 1.0;
  r.throughput_factor = protocol == Protocol::BB84 ? 0.5 : 1.0;
  if (options.account_cm && protocol == Protocol::LM05)
    r.throughput_factor *= 1.0 - cm_probability;
  r.g_sec = recompute_gain(r);
  return r;
}

GainReport secure_gain(const LinkParams& link, Protocol protocol, double e,
                       const CascadeTable& cascade,
                       const GainOptions& options) {
  link.validate();
  const double path = path_km(protocol, link.length_km);
  const double t = transmissivity(link.alpha, path, link.gamma_c_db);
  return secure_gain_at(protocol, link.mu, link.eta_b, t, link.d_b, e, cascade,
                        options, link.cm_probability, path);
}

double security_margin(const LinkParams& link, Protocol protocol,
                       double t_link) {
  return signal_probability(link.mu, link.eta_b, t_link) -
         pns_yield(protocol, link.mu);
}

QberModel QberModel::constant(double e) {
  if (e < 0.0 || e > 1.0) throw std::domain_error("QberModel: e must lie in [0,1]");
  return QberModel(Kind::Constant, e);
}

QberModel QberModel::dark_driven(double e_det) {
  if (e_det < 0.0 || e_det > 0.5)
    throw std::domain_error("QberModel: e_det must lie in [0,0.5]");
  return QberModel(Kind::DarkDriven, e_det);
}

double QberModel::evaluate(double p_sign, double p_av, double d_b) const {
  if (kind_ == Kind::Constant) return value_;
  if (p_av <= 0.0) return 0.5;
  return std::min((value_ * p_sign + d_b) / p_av, 1.0);
}

namespace {

// Gain as a function of mu with everything else held fixed.
double gain_of_mu(double mu, const LinkParams& link, Protocol protocol,
                  const QberModel& qber, const CascadeTable& cascade,
                  const GainOptions& options, double t, double path) {
  const double eta_eff = options.eta_in_gamma ? 1.0 : link.eta_b;
  const double ps = signal_probability(mu, eta_eff, t);
  const double pav = detection_probability(ps, link.d_b);
  const double e = qber.evaluate(ps, pav, link.d_b);
  return secure_gain_at(protocol, mu, link.eta_b, t, link.d_b, e, cascade,
                        options, link.cm_probability, path)
      .g_sec;
}

}  // namespace

MuOptimum optimize_mu(const LinkParams& link, Protocol protocol,
                      const QberModel& qber, const CascadeTable& cascade,
                      const GainOptions& options) {
  link.validate();
  const double path = path_km(protocol, link.length_km);
  const double t = transmissivity(link.alpha, path, link.gamma_c_db);
  const auto gain = [&](double mu) {
    return gain_of_mu(mu, link, protocol, qber, cascade, options, t, path);
  };

  // Coarse logarithmic prescan brackets the maximum; the gain is zero on
  // whole subranges at long distance, which plain golden section cannot cope
  // with on its own.
  constexpr int kPrescan = 256;
  const double ratio = kMuSearchHi / kMuSearchLo;
  double best_mu = std::numeric_limits<double>::quiet_NaN();
  double best_g = 0.0;
  int best_i = -1;
  for (int i = 0; i < kPrescan; ++i) {
    const double mu =
        kMuSearchLo * std::pow(ratio, static_cast<double>(i) / (kPrescan - 1));
    const double g = gain(mu);
    if (g > best_g) {
      best_g = g;
      best_mu = mu;
      best_i = i;
    }
  }
  if (best_i < 0) return MuOptimum{std::numeric_limits<double>::quiet_NaN(), 0.0, false};

  double a = best_i > 0
                 ? kMuSearchLo * std::pow(ratio, (best_i - 1.0) / (kPrescan - 1))
                 : kMuSearchLo;
  double b = best_i < kPrescan - 1
                 ? kMuSearchLo * std::pow(ratio, (best_i + 1.0) / (kPrescan - 1))
                 : kMuSearchHi;

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = gain(c);
  double fd = gain(d);
  const auto track = [&](double mu, double g) {
    if (g > best_g) {
      best_g = g;
      best_mu = mu;
    }
  };
  track(c, fc);
  track(d, fd);
  while (b - a > kMuTolerance) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = gain(d);
      track(d, fd);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = gain(c);
      track(c, fc);
    }
  }
  const double mid = 0.5 * (a + b);
  track(mid, gain(mid));

  if (!(best_g > 0.0)) return MuOptimum{std::numeric_limits<double>::quiet_NaN(), 0.0, false};
  return MuOptimum{best_mu, best_g, true};
}

double max_secure_distance(const LinkParams& link, Protocol protocol,
                           const QberModel& qber, const CascadeTable& cascade,
                           const GainOptions& options) {
  LinkParams probe = link;
  const auto secure_at = [&](double l) {
    probe.length_km = l;
    return optimize_mu(probe, protocol, qber, cascade, options).secure;
  };
  if (!secure_at(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (secure_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 4096.0) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    (secure_at(mid) ? lo : hi) = mid;
  }
  return lo;
}

double qber_estimate(const QberTally& tally) {
  if (tally.n_tot == 0) throw std::domain_error("qber_estimate: n_tot must be positive");
  if (tally.n_err + tally.n_d > tally.n_tot)
    throw std::domain_error("qber_estimate: n_err + n_d exceeds n_tot");
  return (static_cast<double>(tally.n_err) + static_cast<double>(tally.n_d) / 2.0) /
         static_cast<double>(tally.n_tot);
}

}  // namespace lm05
