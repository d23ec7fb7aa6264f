#include "lm05/commands.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "lm05/csv.hpp"

namespace lm05 {

namespace {

unsigned effective_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Index-ordered parallel map; results land by grid position no matter which
// worker finishes first.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

void gain_cell(CsvWriter& row, const MuOptimum& opt) {
  if (!opt.secure) {
    row.insecure().insecure();
  } else {
    row.cell(opt.mu_star).cell(opt.g_star);
  }
}

}  // namespace

std::vector<double> SweepSpec::grid() const {
  if (!(start < stop)) throw std::invalid_argument("sweep: start must be < stop");
  if (points < 2) throw std::invalid_argument("sweep: need at least 2 points");
  if (scale == Scale::Log && !(start > 0.0))
    throw std::invalid_argument("sweep: log scale needs start > 0");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    g[i] = scale == Scale::Log ? start * std::pow(stop / start, f)
                               : start + (stop - start) * f;
  }
  return g;
}

int cmd_rate_curve(const RateCurveParams& params, const CommonOptions& common,
                   std::ostream& csv) {
  LinkParams link;
  link.mu = params.mu;
  link.eta_b = common.eta_in_gamma ? 1.0 : params.eta_b;
  link.validate();
  const auto grid = params.sweep.grid();

  CsvWriter out(csv, {"t_link", "margin_lm05", "margin_bb84",
                      "log10_margin_lm05", "log10_margin_bb84"});
  for (const double t : grid) {
    const double ml = security_margin(link, Protocol::LM05, t);
    const double mb = security_margin(link, Protocol::BB84, t);
    out.cell(t).cell(ml).cell(mb);
    if (ml > 0.0)
      out.cell(std::log10(ml));
    else
      out.insecure();
    if (mb > 0.0)
      out.cell(std::log10(mb));
    else
      out.insecure();
    out.end_row();
  }
  return 0;
}

GainDistanceParams::GainDistanceParams() {
  link.mu = 0.1;  // placeholder; the optimizer owns mu
  link.alpha = 2.5;
  link.gamma_c_db = 8.0;
  link.eta_b = 0.5;
  link.d_b = 5e-8;
  for (int i = 1; i <= 32; ++i) distances.push_back(0.25 * i);
}

int cmd_gain_distance(const GainDistanceParams& params,
                      const CommonOptions& common, std::ostream& csv) {
  if (params.distances.empty())
    throw std::invalid_argument("gain-distance: no distances given");
  for (const double l : params.distances)
    if (l < 0.0) throw std::invalid_argument("gain-distance: negative distance");

  const GainOptions options{common.eta_in_gamma, common.account_cm};
  struct Row {
    MuOptimum lm05, bb84;
  };
  std::vector<Row> rows(params.distances.size());
  parallel_for(params.distances.size(), effective_threads(common.threads),
               [&](std::size_t i) {
                 LinkParams link = params.link;
                 link.length_km = params.distances[i];
                 rows[i].lm05 = optimize_mu(link, Protocol::LM05, params.qber,
                                            common.cascade, options);
                 rows[i].bb84 = optimize_mu(link, Protocol::BB84, params.qber,
                                            common.cascade, options);
               });

  CsvWriter out(csv, {"distance_km", "mu_star_lm05", "g_lm05", "mu_star_bb84",
                      "g_bb84"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.cell(params.distances[i]);
    gain_cell(out, rows[i].lm05);
    gain_cell(out, rows[i].bb84);
    out.end_row();
  }
  return 0;
}

int cmd_experiment(const ExperimentParams& params, const CommonOptions& common,
                   std::ostream& text, std::ostream* csv) {
  if (params.t_link <= 0.0 || params.t_link > 1.0)
    throw std::invalid_argument("experiment: t_link must lie in (0,1]");
  if (!(params.rep_rate_hz > 0.0))
    throw std::invalid_argument("experiment: rep_rate must be positive");

  struct Interp {
    const char* key;
    const char* label;
    GainOptions options;
  };
  const Interp interps[] = {
      {"A", "eta_B applied in the detection exponent",
       GainOptions{false, common.account_cm}},
      {"B", "eta_B already folded into t_link",
       GainOptions{true, common.account_cm}},
  };

  text << "weak-pulse gain report (measured-parameter evaluation)\n"
       << "  mu=" << format_double(params.mu)
       << " qber=" << format_double(params.qber)
       << " t_link=" << format_double(params.t_link)
       << " eta_B=" << format_double(params.eta_b)
       << " d_B=" << format_double(params.d_b)
       << " rep_rate_hz=" << format_double(params.rep_rate_hz) << "\n";

  std::vector<std::string> header{
      "interpretation", "protocol", "mu", "t_link", "p_sign", "p_dark", "p_av",
      "yield_bound", "beta", "qber", "tau_prime", "f_casc", "h_e",
      "throughput_factor", "g_sec", "key_rate_bits_per_s",
      "gain_ratio_lm05_over_bb84"};
  std::optional<CsvWriter> out;
  if (csv) out.emplace(*csv, header);

  for (const auto& interp : interps) {
    const GainReport lm05 = secure_gain_at(
        Protocol::LM05, params.mu, params.eta_b, params.t_link, params.d_b,
        params.qber, common.cascade, interp.options, params.cm_probability);
    const GainReport bb84 = secure_gain_at(
        Protocol::BB84, params.mu, params.eta_b, params.t_link, params.d_b,
        params.qber, common.cascade, interp.options, params.cm_probability);
    const double ratio = bb84.g_sec > 0.0 ? lm05.g_sec / bb84.g_sec : 0.0;

    text << "interpretation " << interp.key << " (" << interp.label << "):\n";
    for (const GainReport* r : {&lm05, &bb84}) {
      text << "  " << name(r->protocol)
           << ": g_sec=" << format_double(r->g_sec)
           << " beta=" << format_double(r->beta)
           << " key_rate=" << format_double(r->g_sec * params.rep_rate_hz)
           << " bits/s\n";
      if (out) {
        out->cell(std::string(interp.key)).cell(std::string(name(r->protocol)));
        out->cell(r->mu_used).cell(params.t_link).cell(r->p_sign);
        out->cell(r->p_dark).cell(r->p_av).cell(r->yield_bound);
        if (r->beta > 0.0)
          out->cell(r->beta);
        else
          out->insecure();
        out->cell(r->e).cell(r->tau_prime).cell(r->f_casc).cell(r->h_e);
        out->cell(r->throughput_factor).cell(r->g_sec);
        out->cell(r->g_sec * params.rep_rate_hz).cell(ratio);
        out->end_row();
      }
    }
    text << "  gain ratio lm05/bb84 = " << format_double(ratio) << "\n";
  }
  return 0;
}

bool detection_self_check(double observed, double expected, std::uint64_t n,
                          double k_sigma) {
  if (n == 0) return true;
  const double sigma =
      std::sqrt(std::max(expected * (1.0 - expected), 1e-300) /
                static_cast<double>(n));
  return std::abs(observed - expected) <= k_sigma * sigma;
}

int cmd_simulate(const SimulateParams& params, const CommonOptions& common,
                 std::ostream& text, std::ostream* csv) {
  SessionConfig cfg = params.cfg;
  cfg.seed = common.seed;
  cfg.eta_in_gamma = common.eta_in_gamma;
  cfg.validate();

  const SessionStats s =
      run_session_parallel(cfg, effective_threads(common.threads));

  const double observed =
      s.sent > 0 ? static_cast<double>(s.detected) / static_cast<double>(s.sent)
                 : 0.0;
  const double expected = expected_detection_fraction(cfg);
  const double sigma =
      s.sent > 0 ? std::sqrt(std::max(expected * (1.0 - expected), 0.0) /
                             static_cast<double>(s.sent))
                 : 0.0;
  const bool ok = detection_self_check(observed, expected, s.sent, 5.0);

  text << "session: protocol=" << name(cfg.protocol)
       << " pulses=" << cfg.n_pulses << " seed=" << cfg.seed << " mu="
       << format_double(cfg.link.mu) << " eve="
       << (cfg.strategy.kind == EveKind::None
               ? "none"
               : (cfg.strategy.kind == EveKind::PnsM ? "pns-m" : "pns-m-prime"))
       << "\n";
  text << "stats: sent=" << s.sent << " detected=" << s.detected
       << " n_tot=" << s.n_tot << " n_err=" << s.n_err << " n_d=" << s.n_d
       << " cm_trials=" << s.cm_trials << " cm_errors=" << s.cm_errors
       << " lost_forward=" << s.lost_forward
       << " lost_backward=" << s.lost_backward
       << " eve_accepted=" << s.eve_accepted
       << " eve_blocked=" << s.eve_blocked << "\n";

  double qber = 0.0;
  bool have_qber = s.n_tot > 0;
  if (have_qber) qber = qber_estimate(s.qber_tally());
  text << "qber: "
       << (have_qber ? format_double(qber) : std::string("n/a (no decoded events)"))
       << "\n";
  text << "detection: observed=" << format_double(observed)
       << " expected=" << format_double(expected)
       << " sigma=" << format_double(sigma) << "\n";

  GainReport gain;
  bool have_gain = s.n_tot > 0 && s.sent > 0;
  if (have_gain) {
    gain = empirical_gain(s, cfg.link, cfg.protocol, common.cascade,
                          GainOptions{common.eta_in_gamma, common.account_cm});
    text << "gain: g_sec=" << format_double(gain.g_sec)
         << " beta=" << format_double(gain.beta)
         << " key_rate=" << format_double(gain.g_sec * cfg.link.rep_rate_hz)
         << " bits/s"
         << (gain.beta <= 0.0 ? " (insecure)" : "") << "\n";
  } else {
    text << "gain: n/a (no decoded events)\n";
  }
  text << "self-check: "
       << (ok ? "OK (within 5 sigma)" : "FAILED (beyond 5 sigma)") << "\n";

  if (csv) {
    CsvWriter out(*csv,
                  {"protocol", "pulses", "sent", "detected", "n_tot", "n_err",
                   "n_d", "cm_trials", "cm_errors", "lost_forward",
                   "lost_backward", "eve_accepted", "eve_blocked", "qber",
                   "detect_observed", "detect_expected", "detect_sigma",
                   "beta", "g_sec"});
    out.cell(std::string(name(cfg.protocol))).cell(s.pulses).cell(s.sent);
    out.cell(s.detected).cell(s.n_tot).cell(s.n_err).cell(s.n_d);
    out.cell(s.cm_trials).cell(s.cm_errors).cell(s.lost_forward);
    out.cell(s.lost_backward).cell(s.eve_accepted).cell(s.eve_blocked);
    if (have_qber)
      out.cell(qber);
    else
      out.cell(std::string("n/a"));
    out.cell(observed).cell(expected).cell(sigma);
    if (!have_gain) {
      out.cell(std::string("n/a")).cell(std::string("n/a"));
    } else if (gain.beta <= 0.0) {
      out.cell(gain.beta).insecure();
    } else {
      out.cell(gain.beta).cell(gain.g_sec);
    }
    out.end_row();
  }
  return ok ? 0 : 2;
}

}  // namespace lm05
